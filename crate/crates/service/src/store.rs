//! In-memory sessions with optional JSON snapshots on disk.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use crate::error::ServiceError;
use crate::session::{Session, SessionSpec};

pub type SharedSession = Arc<Mutex<Session>>;

#[derive(Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, SharedSession>>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create(&self, spec: &SessionSpec) -> Result<String, ServiceError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::create(id.clone(), spec)?;
        self.insert(session);
        Ok(id)
    }

    pub fn insert(&self, session: Session) {
        let id = session.id().to_string();
        self.sessions.write().expect("store lock").insert(id, Arc::new(Mutex::new(session)));
    }

    pub fn get(&self, id: &str) -> Result<SharedSession, ServiceError> {
        self.sessions.read().expect("store lock").get(id).cloned().ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Write every session to `dir/<id>.json`, each through a temporary file.
    pub fn snapshot(&self, dir: &Path) -> Result<usize, ServiceError> {
        let err = |e: std::io::Error| ServiceError::Snapshot(e.to_string());
        std::fs::create_dir_all(dir).map_err(err)?;
        let sessions: Vec<SharedSession> = self.sessions.read().expect("store lock").values().cloned().collect();
        for shared in &sessions {
            let (id, json) = {
                let s = shared.lock().expect("session lock");
                (s.id().to_string(), serde_json::to_vec(&*s).map_err(|e| ServiceError::Snapshot(e.to_string()))?)
            };
            let path = dir.join(format!("{id}.json"));
            let tmp = dir.join(format!("{id}.json.tmp"));
            std::fs::write(&tmp, json).map_err(err)?;
            std::fs::rename(&tmp, &path).map_err(err)?;
        }
        Ok(sessions.len())
    }

    /// Load every `*.json` session in `dir`; a missing directory is empty.
    pub fn restore(dir: &Path) -> Result<Self, ServiceError> {
        let store = Self::new();
        let entries = match std::fs::read_dir(dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(store),
            Err(e) => return Err(ServiceError::Snapshot(e.to_string())),
        };
        let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
        paths.retain(|p| p.extension().is_some_and(|x| x == "json"));
        for path in paths {
            let bytes = std::fs::read(&path).map_err(|e| ServiceError::Snapshot(e.to_string()))?;
            let session: Session = serde_json::from_slice(&bytes)
                .map_err(|e| ServiceError::Snapshot(format!("{}: {e}", path.display())))?;
            store.insert(session);
        }
        Ok(store)
    }
}
