use super::IoError;
use crate::world::{Record, SessionLog, LOG_FORMAT, LOG_VERSION};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// One JSON record per line, header first.
pub fn write_log<W: Write>(log: &SessionLog, mut w: W) -> std::io::Result<()> {
    let header = Record::Header(log.header.clone());
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for r in &log.records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_log_file(log: &SessionLog, path: &Path) -> Result<(), IoError> {
    let f = std::fs::File::create(path).map_err(|e| IoError::file(path, e))?;
    write_log(log, BufWriter::new(f)).map_err(|e| IoError::file(path, e))
}

pub fn read_log<R: BufRead>(r: R) -> Result<SessionLog, IoError> {
    let mut log: Option<SessionLog> = None;
    for (k, line) in r.lines().enumerate() {
        let n = k + 1;
        let line = line.map_err(|e| IoError::Log {
            line: n,
            msg: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line).map_err(|e| IoError::Log {
            line: n,
            msg: e.to_string(),
        })?;
        match (rec, log.as_mut()) {
            (Record::Header(h), None) => {
                if h.format != LOG_FORMAT || h.version != LOG_VERSION {
                    return Err(IoError::Log {
                        line: n,
                        msg: format!("unsupported log format {} version {}", h.format, h.version),
                    });
                }
                log = Some(SessionLog::new(h));
            }
            (Record::Header(_), Some(_)) => {
                return Err(IoError::Log {
                    line: n,
                    msg: "second header record".into(),
                })
            }
            (_, None) => {
                return Err(IoError::Log {
                    line: n,
                    msg: "first record must be the header".into(),
                })
            }
            (r, Some(l)) => l.records.push(r),
        }
    }
    log.ok_or(IoError::Log {
        line: 0,
        msg: "empty log".into(),
    })
}

pub fn read_log_file(path: &Path) -> Result<SessionLog, IoError> {
    let f = std::fs::File::open(path).map_err(|e| IoError::file(path, e))?;
    read_log(BufReader::new(f)).map_err(|e| match e {
        IoError::Log { line, msg } => IoError::Log {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}
