//! The exploration base: validated implications, partial counter-examples,
//! and the journal of every modification made to either list.

mod journal;
mod normalize;

use std::ops::ControlFlow;

pub use journal::{Action, Actor, Change, JournalEntry};
pub use normalize::{normalize, NormalizeReport};

use crate::attrset::AttributeSet;
use crate::error::{Error, Result};
use crate::logic::{self, Implication};
use crate::schema::{satisfies_all, CumulatedClause, ExplorationSchema};

/// An interval `(lower, upper)` standing for some unknown admissible set
/// between the two bounds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialExample {
    lower: AttributeSet,
    upper: AttributeSet,
}

impl PartialExample {
    pub fn new(lower: AttributeSet, upper: AttributeSet) -> Result<Self> {
        if lower.universe() != upper.universe() {
            return Err(Error::SchemaMismatch {
                expected: lower.universe(),
                found: upper.universe(),
            });
        }
        if !lower.is_subset(&upper) {
            return Err(Error::NotAnInterval {
                lower: lower.to_string(),
                upper: upper.to_string(),
            });
        }
        Ok(Self { lower, upper })
    }

    /// A fully specified example `(d, d)`.
    pub fn exact(set: AttributeSet) -> Self {
        Self {
            lower: set.clone(),
            upper: set,
        }
    }

    pub fn lower(&self) -> &AttributeSet {
        &self.lower
    }

    pub fn upper(&self) -> &AttributeSet {
        &self.upper
    }

    pub fn universe(&self) -> usize {
        self.lower.universe()
    }

    pub fn contains(&self, set: &AttributeSet) -> bool {
        self.lower.is_subset(set) && set.is_subset(&self.upper)
    }

    /// `self` lies inside `other`: `other.lower ⊆ self.lower ⊆ self.upper ⊆ other.upper`.
    pub fn is_tighter_than(&self, other: &PartialExample) -> bool {
        other.lower.is_subset(&self.lower) && self.upper.is_subset(&other.upper)
    }

    pub fn refutes(&self, imp: &Implication) -> bool {
        imp.premise().is_subset(&self.lower) && !imp.conclusion_within(&self.upper)
    }

    pub fn format(&self, schema: &ExplorationSchema) -> String {
        format!(
            "({}, {})",
            schema.format_set(&self.lower),
            schema.format_set(&self.upper)
        )
    }
}

pub fn refutes(example: &PartialExample, imp: &Implication) -> bool {
    example.refutes(imp)
}

/// A compatible completion of `example`: a set between its bounds that
/// respects every implication and satisfies every clause. Complete search.
pub fn find_completion(
    example: &PartialExample,
    imps: &[Implication],
    background: &[CumulatedClause],
) -> Option<AttributeSet> {
    let mut found = None;
    let _ = logic::for_each_least_model(
        imps,
        background,
        example.lower(),
        Some(example.upper()),
        |leaf| {
            found = Some(leaf.clone());
            ControlFlow::Break(())
        },
    );
    found
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplorationBase {
    implications: Vec<Implication>,
    examples: Vec<PartialExample>,
    journal: Vec<JournalEntry>,
}

impl ExplorationBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// A base holding the given lists, with no journal. Used for checks and
    /// comparisons; bases driven by an exploration go through [`Self::apply`].
    pub fn from_parts(implications: Vec<Implication>, examples: Vec<PartialExample>) -> Self {
        Self {
            implications,
            examples,
            journal: Vec::new(),
        }
    }

    pub fn implications(&self) -> &[Implication] {
        &self.implications
    }

    pub fn examples(&self) -> &[PartialExample] {
        &self.examples
    }

    pub fn journal(&self) -> &[JournalEntry] {
        &self.journal
    }

    fn next_seq(&self) -> u64 {
        self.journal.last().map_or(1, |e| e.seq + 1)
    }

    pub fn add_implication(&mut self, implication: Implication, actor: Actor, note: &str) {
        self.apply(actor, Change::AddImplication { implication }, note)
            .expect("appending never fails");
    }

    pub fn add_example(&mut self, example: PartialExample, actor: Actor, note: &str) {
        self.apply(actor, Change::AddExample { example }, note)
            .expect("appending never fails");
    }

    /// Applies a change and journals it. Index-based changes are checked
    /// against the current lists.
    pub fn apply(&mut self, actor: Actor, change: Change, note: &str) -> Result<()> {
        let stale = |what: &str| Error::Contract(format!("{what} does not match the base"));
        match &change {
            Change::AddImplication { implication } => {
                self.implications.push(implication.clone());
            }
            Change::AddExample { example } => {
                self.examples.push(example.clone());
            }
            Change::TightenExample {
                index,
                before,
                after,
            } => {
                if self.examples.get(*index) != Some(before) {
                    return Err(stale("tighten_example"));
                }
                if !after.is_tighter_than(before) {
                    return Err(Error::Contract(
                        "tighten_example widens the example".to_owned(),
                    ));
                }
                self.examples[*index] = after.clone();
            }
            Change::DropExample { index, example } => {
                if self.examples.get(*index) != Some(example) {
                    return Err(stale("drop_example"));
                }
                self.examples.remove(*index);
            }
            Change::DropImplication { index, implication } => {
                if self.implications.get(*index) != Some(implication) {
                    return Err(stale("drop_implication"));
                }
                self.implications.remove(*index);
            }
        }
        let seq = self.next_seq();
        self.journal.push(JournalEntry {
            seq,
            actor,
            change,
            note: note.to_owned(),
        });
        Ok(())
    }

    /// Rebuilds a base from its journal.
    pub fn replay<'a, I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a JournalEntry>,
    {
        let mut base = Self::new();
        for entry in entries {
            base.replay_entry(entry)?;
        }
        Ok(base)
    }

    /// Applies one recorded entry, checking its sequence number.
    pub fn replay_entry(&mut self, entry: &JournalEntry) -> Result<()> {
        let expected = self.next_seq();
        if entry.seq != expected {
            return Err(Error::CorruptJournal {
                seq: entry.seq,
                reason: format!("expected seq {expected}"),
            });
        }
        self.apply(entry.actor, entry.change.clone(), &entry.note)
            .map_err(|e| Error::CorruptJournal {
                seq: entry.seq,
                reason: e.to_string(),
            })
    }

    /// Every example has a compatible completion.
    pub fn is_consistent(&self, schema: &ExplorationSchema) -> bool {
        self.first_uncompletable(schema).is_none()
    }

    /// Index of the first example without a compatible completion.
    pub fn first_uncompletable(&self, schema: &ExplorationSchema) -> Option<usize> {
        self.examples
            .iter()
            .position(|ex| find_completion(ex, &self.implications, schema.background()).is_none())
    }

    /// Reads off the largest realizer: all implication-closed sets compatible
    /// with the background. Brute force, guarded by `limit`.
    pub fn largest_realizer(
        &self,
        schema: &ExplorationSchema,
        limit: usize,
    ) -> Result<Vec<AttributeSet>> {
        logic::models(&self.implications, schema.background(), schema.len(), limit)
    }
}

pub fn is_consistent(base: &ExplorationBase, schema: &ExplorationSchema) -> bool {
    base.is_consistent(schema)
}

/// `b1` is better (or equally) focused than `b2`: every implication of `b2`
/// is weakened from one of `b1`, and every example of `b2` contains one of `b1`.
pub fn better_focused(b1: &ExplorationBase, b2: &ExplorationBase) -> bool {
    let imp_covered = |target: &Implication| {
        b1.implications.iter().any(|cand| {
            cand.premise().is_subset(target.premise())
                && cand.conclusion().includes(target.conclusion())
        })
    };
    let ex_covered =
        |target: &PartialExample| b1.examples.iter().any(|cand| cand.is_tighter_than(target));
    b2.implications.iter().all(imp_covered) && b2.examples.iter().all(ex_covered)
}

/// Every realizer of `b1` is a realizer of `b2`.
///
/// A realizer is a family of implication-closed, background-compatible sets
/// that contains a completion of every example. With realizers read that way
/// the containment reduces to two checks: every model of `b1` is a model of
/// `b2`'s implications, and each example of `b2` contains the whole completion
/// set of some example of `b1`. An inconsistent `b1` has no realizer.
pub fn more_expressive(
    b1: &ExplorationBase,
    b2: &ExplorationBase,
    schema: &ExplorationSchema,
    limit: usize,
) -> Result<bool> {
    let models = logic::models(&b1.implications, schema.background(), schema.len(), limit)?;
    let completions: Vec<Vec<&AttributeSet>> = b1
        .examples
        .iter()
        .map(|ex| models.iter().filter(|m| ex.contains(m)).collect())
        .collect();
    if completions.iter().any(Vec::is_empty) {
        return Ok(true);
    }
    if !models
        .iter()
        .all(|m| logic::respects_all(m, &b2.implications))
    {
        return Ok(false);
    }
    Ok(b2.examples.iter().all(|target| {
        completions
            .iter()
            .any(|comp| comp.iter().all(|d| target.contains(d)))
    }))
}

/// Brute-force completion check, for cross-validation of [`find_completion`].
pub fn completions_by_enumeration(
    example: &PartialExample,
    imps: &[Implication],
    background: &[CumulatedClause],
    limit: usize,
) -> Result<Vec<AttributeSet>> {
    Ok(logic::power_set(example.universe(), limit)?
        .filter(|d| {
            example.contains(d) && logic::respects_all(d, imps) && satisfies_all(d, background)
        })
        .collect())
}
