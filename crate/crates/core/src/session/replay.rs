use crate::base::{Action, Actor, Change, ExplorationBase, JournalEntry};
use crate::engine::Exploration;
use crate::error::Error;
use crate::expert::ExpertAnswer;
use crate::schema::ExplorationSchema;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    pub seq: u64,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct ReplayReport {
    pub base: ExplorationBase,
    pub entries: usize,
    pub divergence: Option<Divergence>,
    /// The journal stops inside a normalization pass.
    pub truncated: bool,
    /// No question remains after the last entry.
    pub complete: bool,
}

impl ReplayReport {
    pub fn is_clean(&self) -> bool {
        self.divergence.is_none()
    }
}

/// Re-runs the exploration recorded in `entries`, feeding back the recorded
/// expert answers, and checks that every engine and normalizer entry is
/// re-derived identically and that every expert entry answers the question the
/// engine would have posed at that point.
pub fn verify_journal(schema: &ExplorationSchema, entries: &[JournalEntry]) -> ReplayReport {
    let init: Vec<_> = entries
        .iter()
        .take_while(|e| e.actor == Actor::Init)
        .map(|e| match &e.change {
            Change::AddExample { example } => Ok(example.clone()),
            _ => Err(e.seq),
        })
        .collect();

    let report = |base: ExplorationBase,
                  divergence: Option<Divergence>,
                  truncated: bool,
                  complete: bool| ReplayReport {
        base,
        entries: entries.len(),
        divergence,
        truncated,
        complete,
    };
    let diverge = |seq: u64, reason: String| Some(Divergence { seq, reason });

    if let Some(seq) = init.iter().find_map(|r| r.as_ref().err()) {
        return report(
            ExplorationBase::new(),
            diverge(*seq, "initial entries may only add examples".into()),
            false,
            false,
        );
    }
    let init = init.into_iter().map(Result::unwrap).collect();
    let mut state = match Exploration::start(schema.clone(), init) {
        Ok(state) => state,
        Err(e) => {
            return report(
                ExplorationBase::new(),
                diverge(1, e.to_string()),
                false,
                false,
            )
        }
    };

    let mut checked = 0;
    loop {
        let derived = &state.base().journal()[checked..];
        for (offset, expected) in derived.iter().enumerate() {
            let at = checked + offset;
            let Some(recorded) = entries.get(at) else {
                let base = ExplorationBase::replay(&entries[..at]).unwrap_or_default();
                return report(base, None, true, false);
            };
            if recorded != expected {
                let base = ExplorationBase::replay(&entries[..at]).unwrap_or_default();
                return report(
                    base,
                    diverge(recorded.seq, describe_mismatch(recorded, expected)),
                    false,
                    false,
                );
            }
        }
        checked = state.base().journal().len();
        let Some(entry) = entries.get(checked) else {
            let complete = state.question().is_none();
            return report(state.into_base(), None, false, complete);
        };

        let question = match state.question() {
            Some(q) => q,
            None => {
                return report(
                    state.into_base(),
                    diverge(
                        entry.seq,
                        "entry recorded after the exploration completed".into(),
                    ),
                    false,
                    true,
                )
            }
        };
        let answer = match (&entry.actor, &entry.change) {
            (Actor::Expert, Change::AddImplication { implication }) => {
                if implication != question.implication() {
                    let reason = format!(
                        "validated {} but the posed question was {}",
                        implication.display(schema),
                        question.implication().display(schema)
                    );
                    return report(state.into_base(), diverge(entry.seq, reason), false, false);
                }
                ExpertAnswer::Valid
            }
            (Actor::Expert, Change::AddExample { example }) => {
                ExpertAnswer::Counterexample(example.clone())
            }
            (actor, change) => {
                let reason = format!(
                    "expected an expert answer, found {:?} by {:?}",
                    change.action(),
                    actor
                );
                return report(state.into_base(), diverge(entry.seq, reason), false, false);
            }
        };
        if let Err(e) = state.submit(&question, answer) {
            let reason = match e {
                Error::Rejected { reason, message } => {
                    format!("answer would be rejected ({reason}): {message}")
                }
                other => other.to_string(),
            };
            return report(state.into_base(), diverge(entry.seq, reason), false, false);
        }
    }
}

fn describe_mismatch(recorded: &JournalEntry, expected: &JournalEntry) -> String {
    let action = |e: &JournalEntry| -> Action { e.action() };
    if recorded.actor != expected.actor || action(recorded) != action(expected) {
        format!(
            "recorded {:?} by {:?}, re-derived {:?} by {:?}",
            action(recorded),
            recorded.actor,
            action(expected),
            expected.actor
        )
    } else {
        "payload differs from the re-derived entry".to_owned()
    }
}
