//! Sessions in memory, mirrored to one JSON file each in the data
//! directory. Every mutation is applied to a copy, written with
//! temp-file-then-rename, and only then made visible.

use std::collections::HashMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use fcax_core::formats::{load_session, save_session, SessionDocument};

use crate::error::{ApiError, ApiResult};

type Slot = Arc<tokio::sync::RwLock<SessionDocument>>;

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    sessions: RwLock<HashMap<String, Slot>>,
}

const SUFFIX: &str = ".json";

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
}

impl Store {
    /// Opens `dir`, creating it if needed, and loads every session file.
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            let Some(id) = path.file_name().and_then(|n| n.to_str()).and_then(|n| n.strip_suffix(SUFFIX)) else {
                continue;
            };
            if !valid_id(id) {
                continue;
            }
            let text = std::fs::read_to_string(&path)?;
            let doc = load_session(&text).map_err(|e| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", path.display()))
            })?;
            sessions.insert(id.to_string(), Arc::new(tokio::sync::RwLock::new(doc)));
        }
        tracing::info!(dir = %dir.display(), sessions = sessions.len(), "session store opened");
        Ok(Self {
            dir,
            sessions: RwLock::new(sessions),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}{SUFFIX}"))
    }

    fn write(&self, id: &str, doc: &SessionDocument) -> ApiResult<()> {
        let text = save_session(doc);
        let io = |e: std::io::Error| ApiError::internal(format!("persisting session {id}: {e}"));
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        tmp.write_all(text.as_bytes()).map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(self.path(id)).map_err(|e| io(e.error))?;
        Ok(())
    }

    fn slot(&self, id: &str) -> ApiResult<Slot> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    pub fn insert(&self, id: &str, doc: SessionDocument) -> ApiResult<()> {
        self.write(id, &doc)?;
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id.to_string(), Arc::new(tokio::sync::RwLock::new(doc)));
        Ok(())
    }

    pub async fn read<T>(&self, id: &str, f: impl FnOnce(&SessionDocument) -> ApiResult<T>) -> ApiResult<T> {
        let slot = self.slot(id)?;
        let doc = slot.read().await;
        f(&doc)
    }

    /// Runs `f` on a copy under the session's write lock; the copy replaces
    /// the session only if `f` succeeds and the file was written.
    pub async fn update<T>(&self, id: &str, f: impl FnOnce(&mut SessionDocument) -> ApiResult<T>) -> ApiResult<T> {
        let slot = self.slot(id)?;
        let mut doc = slot.write().await;
        let mut next = doc.clone();
        let out = f(&mut next)?;
        self.write(id, &next)?;
        *doc = next;
        Ok(out)
    }
}
