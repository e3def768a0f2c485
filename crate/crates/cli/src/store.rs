use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use serde_json::Value;
use tripsolve::repair::{RepairSession, SuggestionProvider};
use uuid::Uuid;

pub const DEFAULT_TTL: Duration = Duration::from_secs(3600);

/// A live repair session and the provider that serves it.
pub struct Entry {
    pub session: RepairSession,
    pub provider: Box<dyn SuggestionProvider + Send>,
}

pub struct Slot {
    pub created: Instant,
    pub expires: Instant,
    /// `try_lock` failing means another feedback request is in flight.
    pub entry: Mutex<Entry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    NotFound,
    Expired,
}

/// In-memory sessions keyed by UUID. Expired sessions answer once with
/// [`Lookup::Expired`] and are then forgotten.
pub struct SessionStore {
    ttl: Duration,
    slots: RwLock<HashMap<Uuid, Arc<Slot>>>,
}

impl SessionStore {
    pub fn new(ttl: Duration) -> Self {
        SessionStore { ttl, slots: RwLock::default() }
    }

    pub fn insert(&self, entry: Entry) -> (Uuid, Arc<Slot>) {
        let now = Instant::now();
        let slot = Arc::new(Slot { created: now, expires: now + self.ttl, entry: Mutex::new(entry) });
        let mut slots = self.slots.write().expect("store lock");
        loop {
            let id = Uuid::new_v4();
            if let std::collections::hash_map::Entry::Vacant(v) = slots.entry(id) {
                v.insert(Arc::clone(&slot));
                return (id, slot);
            }
        }
    }

    pub fn get(&self, id: &Uuid) -> Result<Arc<Slot>, Lookup> {
        let slot = self.slots.read().expect("store lock").get(id).cloned().ok_or(Lookup::NotFound)?;
        if Instant::now() >= slot.expires {
            self.slots.write().expect("store lock").remove(id);
            return Err(Lookup::Expired);
        }
        Ok(slot)
    }

    /// Drops sessions expired for longer than one more TTL; returns how many.
    pub fn purge(&self) -> usize {
        let now = Instant::now();
        let mut slots = self.slots.write().expect("store lock");
        let before = slots.len();
        slots.retain(|_, s| now < s.expires + self.ttl);
        before - slots.len()
    }

    pub fn len(&self) -> usize {
        self.slots.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub enum Job {
    Running,
    Done { status: u16, body: Value },
}

/// Results of asynchronous plan requests.
#[derive(Default)]
pub struct JobStore {
    jobs: RwLock<HashMap<Uuid, Job>>,
}

impl JobStore {
    pub fn start(&self) -> Uuid {
        let id = Uuid::new_v4();
        self.jobs.write().expect("job lock").insert(id, Job::Running);
        id
    }

    pub fn finish(&self, id: Uuid, status: u16, body: Value) {
        self.jobs.write().expect("job lock").insert(id, Job::Done { status, body });
    }

    pub fn get(&self, id: &Uuid) -> Option<Job> {
        self.jobs.read().expect("job lock").get(id).cloned()
    }
}
