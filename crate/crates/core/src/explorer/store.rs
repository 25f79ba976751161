use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;

use super::session::ExplorationSession;

pub const DEFAULT_SESSION_CAP: usize = 256;

/// Shared handle to one session. Holding the lock serializes operations on
/// that session; other sessions stay available.
pub type SessionHandle = Arc<Mutex<ExplorationSession>>;

/// Bounded in-memory session registry; the least recently used session is
/// evicted once the cap is reached.
#[derive(Debug)]
pub struct SessionStore {
    sessions: Mutex<LruCache<String, SessionHandle>>,
}

impl SessionStore {
    pub fn new(cap: NonZeroUsize) -> Self {
        Self {
            sessions: Mutex::new(LruCache::new(cap)),
        }
    }

    pub fn insert(&self, session: ExplorationSession) -> SessionHandle {
        let id = session.id().to_string();
        let handle = Arc::new(Mutex::new(session));
        self.sessions
            .lock()
            .expect("session store poisoned")
            .put(id, Arc::clone(&handle));
        handle
    }

    /// Looks a session up and marks it as recently used.
    pub fn get(&self, id: &str) -> Option<SessionHandle> {
        self.sessions
            .lock()
            .expect("session store poisoned")
            .get(id)
            .cloned()
    }

    pub fn remove(&self, id: &str) -> Option<SessionHandle> {
        self.sessions.lock().expect("session store poisoned").pop(id)
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("session store poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for SessionStore {
    fn default() -> Self {
        Self::new(NonZeroUsize::new(DEFAULT_SESSION_CAP).unwrap())
    }
}
