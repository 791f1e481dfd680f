use serde::{Deserialize, Serialize};

use crate::base::PartialExample;
use crate::logic::Implication;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Expert,
    Engine,
    Normalizer,
    Init,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    AddImplication,
    AddExample,
    TightenExample,
    DropExample,
    DropImplication,
}

/// One modification of the base. Indices refer to positions in the
/// implication or example list at the time the change is applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Change {
    AddImplication {
        implication: Implication,
    },
    AddExample {
        example: PartialExample,
    },
    TightenExample {
        index: usize,
        before: PartialExample,
        after: PartialExample,
    },
    DropExample {
        index: usize,
        example: PartialExample,
    },
    DropImplication {
        index: usize,
        implication: Implication,
    },
}

impl Change {
    pub fn action(&self) -> Action {
        match self {
            Change::AddImplication { .. } => Action::AddImplication,
            Change::AddExample { .. } => Action::AddExample,
            Change::TightenExample { .. } => Action::TightenExample,
            Change::DropExample { .. } => Action::DropExample,
            Change::DropImplication { .. } => Action::DropImplication,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JournalEntry {
    pub seq: u64,
    pub actor: Actor,
    pub change: Change,
    pub note: String,
}

impl JournalEntry {
    pub fn action(&self) -> Action {
        self.change.action()
    }
}
