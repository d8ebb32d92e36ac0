//! Profile persistence: one JSON document per profile id.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use copaint_core::user_model::{load_profile_with_warnings, save_profile, Profile, ProfileIoError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid profile id `{0}`")]
    InvalidId(String),
    #[error("unknown profile `{0}`")]
    NotFound(String),
    #[error("profile `{id}`: {source}")]
    Load { id: String, source: ProfileIoError },
    #[error("profile `{id}`: {message}")]
    Io { id: String, message: String },
}

type Slot = Arc<RwLock<Option<Profile>>>;

/// Profiles by id. Each id has its own lock: writes to one profile are
/// serialized while reads and other ids proceed concurrently. Without a
/// directory the store lives in memory only.
#[derive(Debug, Default)]
pub struct ProfileStore {
    dir: Option<PathBuf>,
    slots: Mutex<HashMap<String, Slot>>,
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 128 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

impl ProfileStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn on_disk(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| StoreError::Io {
            id: String::new(),
            message: format!("{}: {e}", dir.display()),
        })?;
        Ok(Self {
            dir: Some(dir),
            slots: Mutex::default(),
        })
    }

    fn file(&self, id: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{id}.json")))
    }

    fn slot(&self, id: &str) -> Result<Slot, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::InvalidId(id.to_string()));
        }
        let mut slots = self.slots.lock().expect("store lock");
        if let Some(slot) = slots.get(id) {
            return Ok(slot.clone());
        }
        let loaded = match self.file(id) {
            Some(path) if path.exists() => Some(read_profile(id, &path)?),
            _ => None,
        };
        let slot = Arc::new(RwLock::new(loaded));
        slots.insert(id.to_string(), slot.clone());
        Ok(slot)
    }

    pub fn get(&self, id: &str) -> Result<Option<Profile>, StoreError> {
        let slot = self.slot(id)?;
        let guard = slot.read().expect("profile lock");
        Ok(guard.clone())
    }

    pub fn require(&self, id: &str) -> Result<Profile, StoreError> {
        self.get(id)?.ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    pub fn put(&self, profile: Profile) -> Result<(), StoreError> {
        self.update(&profile.id.clone(), |_| Ok::<_, StoreError>(profile))
            .map(|_| ())
    }

    /// Replaces the profile with `f(current)` under the id's write lock and
    /// persists it before releasing the lock.
    pub fn update<E, F>(&self, id: &str, f: F) -> Result<Profile, E>
    where
        F: FnOnce(Option<Profile>) -> Result<Profile, E>,
        E: From<StoreError>,
    {
        let slot = self.slot(id)?;
        let mut guard = slot.write().expect("profile lock");
        let next = f(guard.clone())?;
        if next.id != id {
            return Err(StoreError::InvalidId(next.id).into());
        }
        if let Some(path) = self.file(id) {
            write_atomically(id, &path, &save_profile(&next))?;
        }
        *guard = Some(next.clone());
        Ok(next)
    }
}

fn read_profile(id: &str, path: &Path) -> Result<Profile, StoreError> {
    let bytes = std::fs::read(path).map_err(|e| StoreError::Io {
        id: id.to_string(),
        message: e.to_string(),
    })?;
    let (profile, warnings) = load_profile_with_warnings(&bytes).map_err(|source| StoreError::Load {
        id: id.to_string(),
        source,
    })?;
    for w in warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(profile)
}

fn write_atomically(id: &str, path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let io = |e: std::io::Error| StoreError::Io {
        id: id.to_string(),
        message: e.to_string(),
    };
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, bytes).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}
