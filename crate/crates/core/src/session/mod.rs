//! Persistent, resumable exploration sessions for a human expert.
//!
//! A session is an [`Exploration`] whose journal is mirrored to a file, plus
//! the pending question and the token that an answer has to echo. The token is
//! derived from the journal length, so a resumed session hands out the same
//! token for the same question.

mod replay;

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

pub use replay::{verify_journal, Divergence, ReplayReport};

use crate::base::PartialExample;
use crate::engine::{Exploration, Question, RejectReason};
use crate::error::{Error, Result};
use crate::expert::ExpertAnswer;
use crate::format::{self, ExampleRecord, ImplicationRecord, JournalRecord, SchemaFile};
use crate::schema::ExplorationSchema;

/// Journal entries included in a state snapshot.
const JOURNAL_TAIL: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    AwaitingAnswer,
    Complete,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PendingQuestion {
    pub question: Question,
    pub token: String,
}

#[derive(Debug)]
pub struct Session {
    id: String,
    exploration: Exploration,
    pending: Option<PendingQuestion>,
    journal_path: Option<PathBuf>,
    persisted: usize,
    questions_asked: usize,
}

impl Session {
    /// Starts a session. With a `journal_path`, the file is created (or
    /// truncated) and receives every journal entry from now on.
    pub fn create(
        id: impl Into<String>,
        schema: ExplorationSchema,
        initial: Vec<PartialExample>,
        journal_path: Option<&Path>,
    ) -> Result<Self> {
        let exploration = Exploration::start(schema, initial)?;
        if let Some(path) = journal_path {
            File::create(path)?;
        }
        let mut session = Self {
            id: id.into(),
            exploration,
            pending: None,
            journal_path: journal_path.map(Path::to_path_buf),
            persisted: 0,
            questions_asked: 0,
        };
        session.persist()?;
        session.refresh();
        Ok(session)
    }

    /// Rebuilds a session from its journal file. A journal cut inside a
    /// normalization pass is completed and the missing entries are appended.
    pub fn resume(
        id: impl Into<String>,
        schema: ExplorationSchema,
        journal_path: &Path,
    ) -> Result<Self> {
        let entries = format::load_journal(journal_path, &schema)?;
        let questions_asked = entries
            .iter()
            .filter(|e| e.actor == crate::base::Actor::Expert)
            .count();
        let exploration = Exploration::resume(schema, &entries)?;
        let mut session = Self {
            id: id.into(),
            exploration,
            pending: None,
            journal_path: Some(journal_path.to_path_buf()),
            persisted: entries.len(),
            questions_asked,
        };
        session.persist()?;
        session.refresh();
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn schema(&self) -> &ExplorationSchema {
        self.exploration.schema()
    }

    pub fn exploration(&self) -> &Exploration {
        &self.exploration
    }

    pub fn pending(&self) -> Option<&PendingQuestion> {
        self.pending.as_ref()
    }

    pub fn status(&self) -> Status {
        if self.pending.is_some() {
            Status::AwaitingAnswer
        } else {
            Status::Complete
        }
    }

    fn refresh(&mut self) {
        let token = format!("q{}", self.exploration.base().journal().len());
        self.pending = self
            .exploration
            .question()
            .map(|question| PendingQuestion { question, token });
    }

    fn persist(&mut self) -> Result<()> {
        let journal = self.exploration.base().journal();
        if let Some(path) = &self.journal_path {
            if self.persisted < journal.len() {
                let mut file = OpenOptions::new().append(true).create(true).open(path)?;
                let mut buf = Vec::new();
                format::write_journal(
                    &mut buf,
                    self.exploration.schema(),
                    &journal[self.persisted..],
                )?;
                file.write_all(&buf)?;
                file.sync_data()?;
            }
        }
        self.persisted = journal.len();
        Ok(())
    }

    /// Submits an answer to the pending question identified by `token`.
    /// Rejections leave the journal untouched and keep the question pending.
    pub fn submit_answer(&mut self, token: &str, answer: ExpertAnswer) -> Result<()> {
        let Some(pending) = &self.pending else {
            return Err(Error::Rejected {
                reason: RejectReason::StaleToken,
                message: "the exploration is complete; no question is pending".to_owned(),
            });
        };
        if pending.token != token {
            return Err(Error::Rejected {
                reason: RejectReason::StaleToken,
                message: format!(
                    "token {token} does not match pending question {}",
                    pending.token
                ),
            });
        }
        let question = pending.question.clone();
        self.exploration.submit(&question, answer)?;
        self.questions_asked += 1;
        self.persist()?;
        self.refresh();
        Ok(())
    }

    pub fn is_consistent(&self) -> bool {
        self.exploration.base().is_consistent(self.schema())
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        let schema = self.schema();
        let base = self.exploration.base();
        let journal = base.journal();
        let tail_start = journal.len().saturating_sub(JOURNAL_TAIL);
        SessionSnapshot {
            session_id: self.id.clone(),
            status: self.status(),
            attributes: schema.attributes().to_vec(),
            implications: base
                .implications()
                .iter()
                .map(|i| ImplicationRecord::encode(schema, i))
                .collect(),
            examples: base
                .examples()
                .iter()
                .map(|e| ExampleRecord::encode(schema, e))
                .collect(),
            pending: self.pending.as_ref().map(|p| PendingView {
                token: p.token.clone(),
                premise: schema.names_of(p.question.premise()),
                conclusion: ImplicationRecord::encode(schema, p.question.implication()).conclusion,
                prior_questions: self.questions_asked,
            }),
            journal_length: journal.len(),
            journal_tail: journal[tail_start..]
                .iter()
                .map(|e| JournalRecord::encode(schema, e))
                .collect(),
            consistent: self.is_consistent(),
        }
    }

    pub fn journal_page(&self, offset: usize, limit: usize) -> JournalPage {
        let schema = self.schema();
        let journal = self.exploration.base().journal();
        JournalPage {
            total: journal.len(),
            offset,
            entries: journal
                .iter()
                .skip(offset)
                .take(limit)
                .map(|e| JournalRecord::encode(schema, e))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingView {
    pub token: String,
    pub premise: Vec<String>,
    pub conclusion: format::ConclusionRecord,
    pub prior_questions: usize,
}

/// Read-only view of a session, with attribute names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub session_id: String,
    pub status: Status,
    pub attributes: Vec<String>,
    pub implications: Vec<ImplicationRecord>,
    pub examples: Vec<ExampleRecord>,
    pub pending: Option<PendingView>,
    pub journal_length: usize,
    pub journal_tail: Vec<JournalRecord>,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalPage {
    pub total: usize,
    pub offset: usize,
    pub entries: Vec<JournalRecord>,
}

/// Hosts many independent sessions. Each session is behind its own lock, so
/// answers to one session are serialized while others proceed.
#[derive(Debug, Default)]
pub struct SessionManager {
    dir: Option<PathBuf>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
}

pub type SharedSession = Arc<Mutex<Session>>;

impl SessionManager {
    /// Sessions kept in memory only.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Sessions persisted under `dir` as `<id>.schema.json` + `<id>.jsonl`.
    /// Sessions already present in the directory are resumed.
    pub fn persistent(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let manager = Self {
            dir: Some(dir.clone()),
            sessions: RwLock::default(),
        };
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            let Some(id) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".schema.json"))
            else {
                continue;
            };
            let schema = format::load_schema(&path)?;
            let session = Session::resume(id, schema, &dir.join(format!("{id}.jsonl")))?;
            manager.insert(session);
        }
        Ok(manager)
    }

    fn insert(&self, session: Session) -> SharedSession {
        let id = session.id().to_owned();
        let shared = Arc::new(Mutex::new(session));
        self.sessions
            .write()
            .expect("session table poisoned")
            .insert(id, shared.clone());
        shared
    }

    fn fresh_id(&self) -> String {
        let sessions = self.sessions.read().expect("session table poisoned");
        loop {
            let id = format!("{:016x}", rand::random::<u64>());
            if !sessions.contains_key(&id) {
                return id;
            }
        }
    }

    pub fn create(
        &self,
        schema: ExplorationSchema,
        initial: Vec<PartialExample>,
    ) -> Result<SharedSession> {
        let id = self.fresh_id();
        let journal = match &self.dir {
            Some(dir) => {
                let text = serde_json::to_string_pretty(&SchemaFile::from_schema(&schema))?;
                let session =
                    Session::create(&id, schema, initial, Some(&dir.join(format!("{id}.jsonl"))))?;
                fs::write(dir.join(format!("{id}.schema.json")), text)?;
                session
            }
            None => Session::create(&id, schema, initial, None)?,
        };
        Ok(self.insert(journal))
    }

    pub fn get(&self, id: &str) -> Option<SharedSession> {
        self.sessions
            .read()
            .expect("session table poisoned")
            .get(id)
            .cloned()
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<_> = self
            .sessions
            .read()
            .expect("session table poisoned")
            .keys()
            .cloned()
            .collect();
        ids.sort();
        ids
    }
}
