use futures_util::{SinkExt, StreamExt};
use serde_json::{json, Value};
use std::io::{BufRead, BufReader};
use std::process::{Child, Command, Stdio};
use std::time::Duration;
use tokio::net::TcpStream;
use tokio::time::timeout;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

type Ws = WebSocketStream<MaybeTlsStream<TcpStream>>;

struct Server {
    child: Child,
    url: String,
    _dir: tempfile::TempDir,
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn start() -> Server {
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_vibronav"))
        .args(["serve", "--port", "0", "--resume-timeout", "5", "-o"])
        .arg(dir.path())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    let url = line
        .trim()
        .strip_prefix("listening on ")
        .expect(&line)
        .to_string();
    Server {
        child,
        url,
        _dir: dir,
    }
}

async fn connect(url: &str) -> Ws {
    tokio_tungstenite::connect_async(url).await.unwrap().0
}

async fn next(ws: &mut Ws) -> Value {
    loop {
        let m = timeout(Duration::from_secs(5), ws.next())
            .await
            .unwrap()
            .unwrap()
            .unwrap();
        if let Message::Text(t) = m {
            return serde_json::from_str(&t).unwrap();
        }
    }
}

async fn next_of(ws: &mut Ws, ty: &str) -> Value {
    loop {
        let v = next(ws).await;
        if v["type"] == ty {
            return v;
        }
    }
}

async fn send(ws: &mut Ws, v: Value) {
    ws.send(Message::text(v.to_string())).await.unwrap();
}

#[tokio::test]
async fn greets_and_streams_state() {
    let s = start();
    let mut ws = connect(&s.url).await;
    let hello = next(&mut ws).await;
    assert_eq!(hello["type"], "hello");
    assert_eq!(hello["protocol"], "vibronav-live");
    assert_eq!(next(&mut ws).await["type"], "config");
    let a = next_of(&mut ws, "state").await;
    let b = next_of(&mut ws, "state").await;
    assert!(b["tick"].as_u64() > a["tick"].as_u64());
    assert_eq!(a["x"], 9.0);
}

#[tokio::test]
async fn one_step_moves_one_stride() {
    let s = start();
    let mut ws = connect(&s.url).await;
    let before = next_of(&mut ws, "state").await;
    let (x0, y0) = (before["x"].as_f64().unwrap(), before["y"].as_f64().unwrap());
    send(&mut ws, json!({"type": "input", "step": true})).await;
    // 0.7 s of walking at 30 Hz plus slack
    let mut last = before;
    for _ in 0..60 {
        last = next_of(&mut ws, "state").await;
    }
    let d = (last["x"].as_f64().unwrap() - x0).hypot(last["y"].as_f64().unwrap() - y0);
    assert!((d - 1.17).abs() < 1e-6, "moved {d}");
}

#[tokio::test]
async fn malformed_message_gets_error_frame() {
    let s = start();
    let mut ws = connect(&s.url).await;
    send(&mut ws, json!({"type": "input", "turn_rate": "fast"})).await;
    let e = next_of(&mut ws, "error").await;
    assert!(
        e["message"]
            .as_str()
            .unwrap()
            .starts_with("malformed message"),
        "{e}"
    );
    ws.send(Message::text("not json")).await.unwrap();
    next_of(&mut ws, "error").await;
    // the session keeps ticking
    next_of(&mut ws, "state").await;
}

#[tokio::test]
async fn dropped_session_can_resume() {
    let s = start();
    let mut ws = connect(&s.url).await;
    let id = next(&mut ws).await["session"].as_str().unwrap().to_string();
    send(&mut ws, json!({"type": "input", "step": true})).await;
    for _ in 0..40 {
        next_of(&mut ws, "state").await;
    }
    let moved = next_of(&mut ws, "state").await;
    ws.close(None).await.unwrap();
    drop(ws);

    let mut ws = connect(&s.url).await;
    let fresh = next(&mut ws).await;
    assert_ne!(fresh["session"], id.as_str());
    send(&mut ws, json!({"type": "hello", "resume": id})).await;
    let hello = next_of(&mut ws, "hello").await;
    assert_eq!(hello["session"], id.as_str());
    let st = next_of(&mut ws, "state").await;
    assert!(st["tick"].as_u64() > moved["tick"].as_u64());
    assert_eq!(st["y"], moved["y"]);

    send(&mut ws, json!({"type": "hello", "resume": "s999"})).await;
    next_of(&mut ws, "error").await;
}
