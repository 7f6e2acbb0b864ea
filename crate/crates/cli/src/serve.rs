use crate::{load_config, CliResult, Failure};
use anyhow::Context;
use futures_util::{SinkExt, StreamExt};
use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{mpsc, watch};
use tokio::time::{Instant, MissedTickBehavior};
use tokio_tungstenite::tungstenite::Message;
use vibronav::session_io::live::{ClientMessage, LiveSession, ServerMessage};
use vibronav::session_io::{write_log_file, RunConfig};
use vibronav::{Mode, WorldSpec};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// 0 picks a free port; the bound address is printed.
    #[arg(long, default_value_t = 8765)]
    port: u16,
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Directory for finished session logs.
    #[arg(long, short, default_value = "runs/live")]
    out: PathBuf,
    /// Seconds a dropped session waits for a resume.
    #[arg(long, default_value_t = 30.0)]
    resume_timeout: f64,
}

// Unsent frames per connection; state frames beyond this are dropped.
const QUEUE: usize = 8;

struct Parked {
    session: LiveSession,
    deadline: Instant,
}

struct Server {
    cfg: RunConfig,
    world: Arc<WorldSpec>,
    out: PathBuf,
    resume_timeout: Duration,
    next_id: AtomicU64,
    parked: Mutex<HashMap<String, Parked>>,
}

impl Server {
    fn new_session(&self) -> anyhow::Result<LiveSession> {
        let n = self.next_id.fetch_add(1, Ordering::Relaxed) + 1;
        let condition = self.cfg.conditions[0];
        let sc = self
            .cfg
            .session_config(&self.world, condition, self.cfg.seed.wrapping_add(n))?;
        Ok(LiveSession::new(&format!("s{n}"), self.world.clone(), sc)?)
    }

    fn finalize(&self, s: LiveSession) {
        let path = self.out.join(format!("live-{}.jsonl", s.id()));
        match write_log_file(&s.into_log(), &path) {
            Ok(()) => println!("wrote {}", path.display()),
            Err(e) => eprintln!("error: {e}"),
        }
    }

    fn park(&self, s: LiveSession) {
        if s.is_finished() {
            return self.finalize(s);
        }
        let deadline = Instant::now() + self.resume_timeout;
        let id = s.id().to_string();
        self.parked.lock().unwrap().insert(
            id,
            Parked {
                session: s,
                deadline,
            },
        );
    }

    fn unpark(&self, id: &str) -> Option<LiveSession> {
        self.parked.lock().unwrap().remove(id).map(|p| p.session)
    }

    fn reap(&self, all: bool) {
        let now = Instant::now();
        let expired: Vec<LiveSession> = {
            let mut map = self.parked.lock().unwrap();
            let ids: Vec<String> = map
                .iter()
                .filter(|(_, p)| all || p.deadline <= now)
                .map(|(k, _)| k.clone())
                .collect();
            ids.into_iter()
                .filter_map(|k| map.remove(&k))
                .map(|p| p.session)
                .collect()
        };
        for s in expired {
            self.finalize(s);
        }
    }
}

pub fn run(a: Args) -> CliResult {
    if !(a.resume_timeout.is_finite() && a.resume_timeout >= 0.0) {
        return Err(Failure::Usage("--resume-timeout must be >= 0".into()));
    }
    let (cfg, world) = load_config(a.config.as_deref(), Mode::Navigation)?;
    cfg.validate()?;
    std::fs::create_dir_all(&a.out).with_context(|| a.out.display().to_string())?;
    let server = Arc::new(Server {
        cfg,
        world: Arc::new(world),
        out: a.out,
        resume_timeout: Duration::from_secs_f64(a.resume_timeout),
        next_id: AtomicU64::new(0),
        parked: Mutex::new(HashMap::new()),
    });
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(serve(server, &a.host, a.port))?;
    Ok(())
}

async fn serve(server: Arc<Server>, host: &str, port: u16) -> anyhow::Result<()> {
    let listener = TcpListener::bind((host, port))
        .await
        .with_context(|| format!("bind {host}:{port}"))?;
    println!("listening on ws://{}", listener.local_addr()?);
    let (stop_tx, stop_rx) = watch::channel(false);
    let mut reaper = tokio::time::interval(Duration::from_millis(250));
    let mut conns = tokio::task::JoinSet::new();
    loop {
        tokio::select! {
            acc = listener.accept() => {
                let (stream, peer) = acc?;
                conns.spawn(connection(server.clone(), stream, peer, stop_rx.clone()));
            }
            _ = reaper.tick() => server.reap(false),
            _ = tokio::signal::ctrl_c() => break,
        }
    }
    let _ = stop_tx.send(true);
    while conns.join_next().await.is_some() {}
    server.reap(true);
    Ok(())
}

async fn connection(
    server: Arc<Server>,
    stream: TcpStream,
    peer: SocketAddr,
    mut stop: watch::Receiver<bool>,
) {
    let ws = match tokio_tungstenite::accept_async(stream).await {
        Ok(ws) => ws,
        Err(e) => {
            eprintln!("{peer}: handshake failed: {e}");
            return;
        }
    };
    let (mut sink, mut source) = ws.split();
    let (tx, mut rx) = mpsc::channel::<Message>(QUEUE);
    let writer = tokio::spawn(async move {
        while let Some(msg) = rx.recv().await {
            let close = matches!(msg, Message::Close(_));
            if sink.send(msg).await.is_err() || close {
                break;
            }
        }
    });

    let mut live = match server.new_session() {
        Ok(s) => s,
        Err(e) => {
            send_all(&tx, error(e.to_string())).await;
            return;
        }
    };
    send_all(&tx, live.opening()).await;
    let tick = Duration::from_secs_f64(server.cfg.tick);
    let mut interval = tokio::time::interval(tick);
    interval.set_missed_tick_behavior(MissedTickBehavior::Burst);
    let mut closed_by_client = false;
    loop {
        tokio::select! {
            _ = interval.tick() => {
                send_all(&tx, live.tick()).await;
                if live.is_finished() {
                    break;
                }
            }
            frame = source.next() => match frame {
                Some(Ok(Message::Text(text))) => {
                    match serde_json::from_str::<ClientMessage>(&text) {
                        Ok(ClientMessage::Hello { resume: Some(id), .. }) if id != live.id() => {
                            match server.unpark(&id) {
                                // the fresh session is discarded
                                Some(old) => {
                                    live = old;
                                    send_all(&tx, live.opening()).await;
                                }
                                None => send_all(&tx, error(format!("no parked session {id}"))).await,
                            }
                        }
                        _ => send_all(&tx, live.handle_text(&text)).await,
                    }
                }
                Some(Ok(Message::Binary(_))) => {
                    send_all(&tx, error("binary frames are not supported".into())).await
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => {
                    closed_by_client = true;
                    break;
                }
                Some(Ok(_)) => {}
            },
            _ = stop.changed() => break,
        }
    }
    if live.is_finished() || *stop.borrow() {
        server.finalize(live);
    } else {
        server.park(live);
    }
    if !closed_by_client {
        let _ = tx.send(Message::Close(None)).await;
    }
    drop(tx);
    let _ = writer.await;
}

// One ordered queue: a lagging client misses state frames rather than
// stalling the tick, everything else waits for room.
async fn send_all(tx: &mpsc::Sender<Message>, msgs: Vec<ServerMessage>) {
    for m in msgs {
        let text = Message::text(m.to_text());
        if matches!(m, ServerMessage::State(_)) {
            let _ = tx.try_send(text);
        } else if tx.send(text).await.is_err() {
            return;
        }
    }
}

fn error(message: String) -> Vec<ServerMessage> {
    vec![ServerMessage::Error { message }]
}
