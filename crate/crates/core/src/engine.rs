//! Query engine and the exploration loop.
//!
//! For a set `A`, `A⁺?` is the meet of the upper bounds of all examples whose
//! lower bound contains `A`: the largest conclusion no stored example refutes.
//! The engine asks `A -> A⁺?` for the lectically smallest implication-closed
//! `A` with `A ≠ A⁺?`, and the exploration is complete once no such set exists.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::attrset::AttributeSet;
use crate::base::{
    find_completion, normalize, Actor, ExplorationBase, JournalEntry, PartialExample,
};
use crate::error::{Error, Result};
use crate::expert::{Expert, ExpertAnswer};
use crate::logic::{self, close, Conclusion, Implication};
use crate::schema::{CumulatedClause, ExplorationSchema};

/// Re-asks of one question before a batch exploration gives up on an expert.
const MAX_REASKS: usize = 3;

/// `A⁺?`: meet of the upper bounds of examples with `a ⊆ lower`; the full set
/// when no example qualifies.
pub fn plus_query(examples: &[PartialExample], a: &AttributeSet) -> AttributeSet {
    examples
        .iter()
        .filter(|ex| a.is_subset(ex.lower()))
        .fold(AttributeSet::full(a.universe()), |acc, ex| {
            acc.intersection(ex.upper())
        })
}

/// Closure that reads `Bottom` as the full set, so that it is a closure
/// operator on the whole power set.
fn closure_or_top(imps: &[Implication], set: &AttributeSet) -> AttributeSet {
    close(imps, set).to_set_or_full(set.universe())
}

/// `full` only counts as closed when it does not close to `Bottom`.
fn admit_closed(imps: &[Implication], candidate: AttributeSet) -> Option<AttributeSet> {
    if candidate.is_full() && close(imps, &candidate).is_bottom() {
        None
    } else {
        Some(candidate)
    }
}

/// The lectically first implication-closed set.
pub fn first_closed(imps: &[Implication], universe: usize) -> Option<AttributeSet> {
    admit_closed(imps, closure_or_top(imps, &AttributeSet::empty(universe)))
}

/// Next-Closure step: the lectically next implication-closed set after
/// `current`, or `None` after the last one. Sets closing to `Bottom` are
/// skipped.
pub fn lectic_next_closed(imps: &[Implication], current: &AttributeSet) -> Option<AttributeSet> {
    for i in (0..current.universe()).rev() {
        if current.contains(i) {
            continue;
        }
        let prefix = current.truncated_below(i);
        let mut candidate = prefix.clone();
        candidate.insert(i);
        let next = closure_or_top(imps, &candidate);
        if next.truncated_below(i) == prefix {
            return admit_closed(imps, next);
        }
    }
    None
}

/// All implication-closed sets in lectic order.
pub fn closed_sets(
    imps: &[Implication],
    universe: usize,
) -> impl Iterator<Item = AttributeSet> + '_ {
    std::iter::successors(first_closed(imps, universe), move |a| {
        lectic_next_closed(imps, a)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Question {
    implication: Implication,
}

impl Question {
    pub fn implication(&self) -> &Implication {
        &self.implication
    }

    /// The closed set `A` the question was generated from.
    pub fn premise(&self) -> &AttributeSet {
        self.implication.premise()
    }
}

/// The question for the lectically smallest implication-closed `A` with
/// `A ≠ A⁺?`, or `None` when every closed set is pinned by the examples.
///
/// When no example lies above `A` and the background excludes the full set,
/// the question is the indefinite implication `A -> ⊥`. Once an example
/// refutes that, `A -> M` is asked instead: any answer to it lowers `A⁺?`.
pub fn next_question(base: &ExplorationBase, schema: &ExplorationSchema) -> Option<Question> {
    let imps = base.implications();
    closed_sets(imps, schema.len()).find_map(|a| {
        let plus = plus_query(base.examples(), &a);
        if plus == a {
            return None;
        }
        let uncovered = !base.examples().iter().any(|ex| a.is_subset(ex.lower()));
        let implication = if uncovered && !schema.admits_top() {
            Implication::bottom(a)
        } else {
            Implication::new(a, plus)
        };
        Some(Question { implication })
    })
}

/// Why an answer was not admitted into the base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// The counter-example does not refute the question.
    ConditionI,
    /// The counter-example has no compatible completion.
    ConditionIii,
    /// Accepting the implication would leave an example without completion.
    Consistency,
    /// The answer targets a question that is no longer pending.
    StaleToken,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let code = match self {
            RejectReason::ConditionI => "condition_i",
            RejectReason::ConditionIii => "condition_iii",
            RejectReason::Consistency => "consistency",
            RejectReason::StaleToken => "stale_token",
        };
        f.write_str(code)
    }
}

fn reject(reason: RejectReason, message: String) -> Error {
    Error::Rejected { reason, message }
}

/// A base together with its schema, driven question by question.
#[derive(Clone, Debug)]
pub struct Exploration {
    schema: ExplorationSchema,
    base: ExplorationBase,
}

impl Exploration {
    /// Seeds a base with `initial` examples. Each must have a completion under
    /// the background alone.
    pub fn start(schema: ExplorationSchema, initial: Vec<PartialExample>) -> Result<Self> {
        let mut base = ExplorationBase::new();
        for ex in initial {
            schema.check(ex.lower())?;
            if find_completion(&ex, &[], schema.background()).is_none() {
                return Err(Error::NoCompletion {
                    example: ex.format(&schema),
                });
            }
            base.add_example(ex, Actor::Init, "initial example");
        }
        normalize(&mut base)?;
        Ok(Self { schema, base })
    }

    /// Rebuilds an exploration from its journal. A journal cut inside a
    /// normalization pass is completed; the schedule is restartable, so the
    /// continuation matches the uninterrupted run.
    pub fn resume(schema: ExplorationSchema, journal: &[JournalEntry]) -> Result<Self> {
        let mut base = ExplorationBase::replay(journal)?;
        normalize(&mut base)?;
        Ok(Self { schema, base })
    }

    pub fn schema(&self) -> &ExplorationSchema {
        &self.schema
    }

    pub fn base(&self) -> &ExplorationBase {
        &self.base
    }

    pub fn into_base(self) -> ExplorationBase {
        self.base
    }

    pub fn question(&self) -> Option<Question> {
        next_question(&self.base, &self.schema)
    }

    /// Admits an answer to `question`, normalizes, and journals. A rejected
    /// answer leaves the base untouched.
    pub fn submit(&mut self, question: &Question, answer: ExpertAnswer) -> Result<()> {
        let imp = question.implication();
        match answer {
            ExpertAnswer::Valid => {
                let mut imps = self.base.implications().to_vec();
                imps.push(imp.clone());
                let blocked = self
                    .base
                    .examples()
                    .iter()
                    .find(|ex| find_completion(ex, &imps, self.schema.background()).is_none());
                if let Some(ex) = blocked {
                    return Err(reject(
                        RejectReason::Consistency,
                        format!(
                            "counter-example required: {} would leave {} without completion",
                            imp.display(&self.schema),
                            ex.format(&self.schema)
                        ),
                    ));
                }
                self.base
                    .add_implication(imp.clone(), Actor::Expert, "validated");
            }
            ExpertAnswer::Counterexample(ex) => {
                self.schema.check(ex.lower())?;
                if !ex.refutes(imp) {
                    return Err(reject(
                        RejectReason::ConditionI,
                        format!(
                            "{} does not refute {}",
                            ex.format(&self.schema),
                            imp.display(&self.schema)
                        ),
                    ));
                }
                if find_completion(&ex, self.base.implications(), self.schema.background())
                    .is_none()
                {
                    let refuted: Vec<String> = self
                        .base
                        .implications()
                        .iter()
                        .filter(|v| ex.refutes(v))
                        .map(|v| v.display(&self.schema).to_string())
                        .collect();
                    let mut message =
                        format!("no compatible completion for {}", ex.format(&self.schema));
                    if !refuted.is_empty() {
                        message.push_str(&format!("; it refutes validated {}", refuted.join(", ")));
                    }
                    return Err(reject(RejectReason::ConditionIii, message));
                }
                self.base.add_example(ex, Actor::Expert, "counter-example");
            }
        }
        normalize(&mut self.base)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Complete,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct ExplorationResult {
    pub final_base: ExplorationBase,
    pub validated: Vec<Implication>,
    pub question_count: usize,
    pub terminated: Termination,
    /// Consecutive questions whose premises went lectically backwards.
    pub order_violations: usize,
}

/// Runs the ask/answer/normalize loop until no question remains or `budget`
/// questions have been posed. A rejected answer is re-asked a few times before
/// the exploration fails.
pub fn explore(
    schema: &ExplorationSchema,
    expert: &mut dyn Expert,
    initial: Vec<PartialExample>,
    budget: Option<usize>,
) -> Result<ExplorationResult> {
    let mut state = Exploration::start(schema.clone(), initial)?;
    let mut answered: HashSet<Implication> = HashSet::new();
    let mut question_count = 0;
    let mut order_violations = 0;
    let mut previous: Option<AttributeSet> = None;

    let terminated = loop {
        let Some(question) = state.question() else {
            break Termination::Complete;
        };
        if budget.is_some_and(|b| question_count >= b) {
            break Termination::BudgetExhausted;
        }
        if !answered.insert(question.implication().clone()) {
            return Err(Error::Contract(format!(
                "question {} was already answered",
                question.implication().display(schema)
            )));
        }
        if let Some(prev) = &previous {
            if question.premise().lectic_cmp(prev).is_lt() {
                order_violations += 1;
                log::warn!(
                    "question premise {} precedes previous premise {}",
                    schema.format_set(question.premise()),
                    schema.format_set(prev)
                );
            }
        }
        previous = Some(question.premise().clone());

        let mut attempts = 0;
        loop {
            question_count += 1;
            let answer = expert.answer(question.implication());
            match state.submit(&question, answer) {
                Ok(()) => break,
                Err(Error::Rejected { reason, message }) if attempts + 1 < MAX_REASKS => {
                    log::warn!("answer rejected ({reason}): {message}; asking again");
                    attempts += 1;
                }
                Err(e) => return Err(e),
            }
        }
    };

    let final_base = state.into_base();
    Ok(ExplorationResult {
        validated: final_base.implications().to_vec(),
        final_base,
        question_count,
        terminated,
        order_violations,
    })
}

/// The ⋂-irreducible models of `imps ∪ background`: models that are not the
/// meet of the models strictly above them. A model with nothing above it is
/// reported, so the full set is included whenever it is a model.
pub fn minimal_realizer_report(
    imps: &[Implication],
    background: &[CumulatedClause],
    universe: usize,
    limit: usize,
) -> Result<Vec<AttributeSet>> {
    let models = logic::models(imps, background, universe, limit)?;
    Ok(models
        .iter()
        .filter(|m| {
            let mut above = models
                .iter()
                .filter(|o| o != m && m.is_subset(o))
                .peekable();
            if above.peek().is_none() {
                return true;
            }
            let meet = above.fold(AttributeSet::full(universe), |acc, o| acc.intersection(o));
            &meet != *m
        })
        .cloned()
        .collect())
}

/// Whether `imp` follows from the validated implications, optionally together
/// with the background.
pub fn follows(
    base: &ExplorationBase,
    schema: &ExplorationSchema,
    imp: &Implication,
    mode: logic::InferenceMode,
) -> bool {
    logic::entails(base.implications(), schema.background(), imp, mode)
}

/// Closure of `a` under the validated implications.
pub fn base_closure(base: &ExplorationBase, a: &AttributeSet) -> Conclusion {
    close(base.implications(), a)
}
