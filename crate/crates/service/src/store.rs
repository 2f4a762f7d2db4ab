//! On-disk layout: `{id}.json` holds the latest snapshot (inputs, state and
//! full log), `{id}.log.jsonl` one applied operation per line.

use std::io;
use std::path::{Path, PathBuf};

use glyphlab_core::session::{Operation, Session, SessionSnapshot};
use tokio::fs;
use tokio::io::AsyncWriteExt;

#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub async fn open(dir: impl Into<PathBuf>) -> io::Result<Store> {
        let dir = dir.into();
        fs::create_dir_all(&dir).await?;
        Ok(Store { dir })
    }

    fn snapshot_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    fn log_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.log.jsonl"))
    }

    /// Writes a brand-new session: snapshot plus an empty log.
    pub async fn create(&self, session: &Session) -> io::Result<()> {
        fs::write(self.log_path(session.id()), b"").await?;
        self.write_snapshot(session).await
    }

    /// Records one applied operation and refreshes the snapshot.
    pub async fn record(&self, session: &Session, op: &Operation) -> io::Result<()> {
        let mut line = serde_json::to_vec(op)?;
        line.push(b'\n');
        let mut log = fs::OpenOptions::new().append(true).create(true).open(self.log_path(session.id())).await?;
        log.write_all(&line).await?;
        log.flush().await?;
        self.write_snapshot(session).await
    }

    async fn write_snapshot(&self, session: &Session) -> io::Result<()> {
        let json = serde_json::to_vec(&session.snapshot())?;
        let path = self.snapshot_path(session.id());
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, json).await?;
        fs::rename(&tmp, &path).await
    }

    /// Loads every stored session, verifying each snapshot against its log.
    pub async fn load_all(&self) -> io::Result<Vec<Session>> {
        let mut out = Vec::new();
        let mut entries = fs::read_dir(&self.dir).await?;
        while let Some(entry) = entries.next_entry().await? {
            let path = entry.path();
            if !is_snapshot(&path) {
                continue;
            }
            let bytes = fs::read(&path).await?;
            let snap: SessionSnapshot = serde_json::from_slice(&bytes)?;
            let session = Session::from_snapshot(snap)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
            out.push(session);
        }
        out.sort_by(|a, b| a.id().cmp(b.id()));
        Ok(out)
    }

    /// Operations recorded in the log file for `id`.
    pub async fn read_log(&self, id: &str) -> io::Result<Vec<Operation>> {
        let text = fs::read_to_string(self.log_path(id)).await?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(io::Error::from))
            .collect()
    }
}

fn is_snapshot(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
        && !path.file_name().is_some_and(|n| n.to_string_lossy().ends_with(".log.json"))
}
