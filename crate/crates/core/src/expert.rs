//! Domain experts: the answer-source contract, scripted experts over an
//! explicit finite domain, masking of their answers into genuinely partial
//! counter-examples, and validation of the expert axioms.
//!
//! An expert answers an implication either with `Valid` or with a partial
//! counter-example `(T, U)`. A well-behaved expert
//!
//! * (i) only answers `(T, U)` to `X -> Y` when `X ⊆ T` and `Y ⊄ U`,
//! * (ii) never answers a `(T, U)` that refutes an implication it called valid,
//! * (iii) only answers `(T, U)` that have a compatible completion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attrset::AttributeSet;
use crate::base::{find_completion, PartialExample};
use crate::error::{Error, Result};
use crate::logic::{close, Conclusion, Implication};
use crate::schema::ExplorationSchema;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExpertAnswer {
    Valid,
    Counterexample(PartialExample),
}

/// Anything that can answer implication questions: a scripted domain, a
/// human behind a session, or a test mutant.
pub trait Expert {
    fn answer(&mut self, question: &Implication) -> ExpertAnswer;
}

impl<F> Expert for F
where
    F: FnMut(&Implication) -> ExpertAnswer,
{
    fn answer(&mut self, question: &Implication) -> ExpertAnswer {
        self(question)
    }
}

/// Which attributes a scripted expert withholds when describing a
/// counter-example.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaskPolicy {
    /// Full disclosure: answers are exact sets `(D, D)`.
    None,
    /// A constant set of attributes that are never disclosed.
    FixedHideSet(AttributeSet),
    /// Each attribute is hidden with probability 1/2, drawn from a generator
    /// seeded by `seed` and the question, so answers are reproducible.
    PerQueryRandom { seed: u64 },
}

impl MaskPolicy {
    /// Hide-set used for `question`.
    pub fn hide_set(&self, question: &Implication) -> AttributeSet {
        let n = question.universe();
        match self {
            MaskPolicy::None => AttributeSet::empty(n),
            MaskPolicy::FixedHideSet(h) => h.clone(),
            MaskPolicy::PerQueryRandom { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(question_seed(*seed, question));
                let picked = (0..n).filter(|_| rng.random_bool(0.5));
                AttributeSet::from_indices(n, picked).expect("indices below universe")
            }
        }
    }
}

/// Stable per-question seed. `DefaultHasher` is not stable across releases,
/// so the mixing is done by hand (splitmix64 over the member indices).
fn question_seed(seed: u64, question: &Implication) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let mut h = mix(seed);
    for i in question.premise().iter() {
        h = mix(h ^ (i as u64 + 1));
    }
    h = mix(h ^ 0xffff);
    match question.conclusion() {
        Conclusion::Set(s) => {
            for i in s.iter() {
                h = mix(h ^ (i as u64 + 1));
            }
        }
        Conclusion::Bottom => h = mix(h ^ 0xdead),
    }
    h
}

/// Describes the refuting set `d` as an interval, withholding `hide`.
///
/// The premise always stays in the lower bound. The lowest-index attribute of
/// the conclusion missing from `d` stays out of the upper bound, so the result
/// still refutes `imp`; every other hidden attribute moves out of the lower
/// bound or into the upper bound.
pub fn mask(d: &AttributeSet, imp: &Implication, hide: &AttributeSet) -> Result<PartialExample> {
    if !imp.premise().is_subset(d) || imp.is_respected_by(d) {
        return Err(Error::Contract(format!(
            "mask requires a set refuting the implication, got {d}"
        )));
    }
    let lower = d.difference(hide).union(imp.premise());
    let mut widen = hide.clone();
    if let Conclusion::Set(s) = imp.conclusion() {
        let witness = s.difference(d).first().expect("d refutes the implication");
        widen.remove(witness);
    }
    PartialExample::new(lower, d.union(&widen))
}

/// An expert answering from an explicit family of sets.
#[derive(Clone, Debug)]
pub struct ScriptedDomain {
    universe: usize,
    sets: Vec<AttributeSet>,
    mask: MaskPolicy,
}

impl ScriptedDomain {
    /// Every member must satisfy the background of `schema`.
    pub fn new(
        schema: &ExplorationSchema,
        sets: Vec<AttributeSet>,
        mask: MaskPolicy,
    ) -> Result<Self> {
        for d in &sets {
            schema.check(d)?;
            if !schema.compatible_with_background(d) {
                return Err(Error::DomainOutsideBackground {
                    member: schema.format_set(d),
                });
            }
        }
        if let MaskPolicy::FixedHideSet(h) = &mask {
            schema.check(h)?;
        }
        Ok(Self {
            universe: schema.len(),
            sets,
            mask,
        })
    }

    pub fn sets(&self) -> &[AttributeSet] {
        &self.sets
    }

    pub fn mask_policy(&self) -> &MaskPolicy {
        &self.mask
    }

    pub fn is_valid(&self, imp: &Implication) -> bool {
        self.sets.iter().all(|d| imp.is_respected_by(d))
    }

    /// `Valid` iff every member respects `imp`; otherwise the first member
    /// refuting it, masked by the policy.
    pub fn answer_for(&self, imp: &Implication) -> ExpertAnswer {
        match self.sets.iter().find(|d| !imp.is_respected_by(d)) {
            None => ExpertAnswer::Valid,
            Some(d) => {
                let hide = self.mask.hide_set(imp);
                ExpertAnswer::Counterexample(mask(d, imp, &hide).expect("d refutes imp"))
            }
        }
    }

    /// Meet of all members containing `x`; the full set when none does.
    pub fn closure(&self, x: &AttributeSet) -> AttributeSet {
        self.sets
            .iter()
            .filter(|d| x.is_subset(d))
            .fold(AttributeSet::full(self.universe), |acc, d| {
                acc.intersection(d)
            })
    }
}

impl Expert for ScriptedDomain {
    fn answer(&mut self, question: &Implication) -> ExpertAnswer {
        self.answer_for(question)
    }
}

pub fn scripted_answer(domain: &ScriptedDomain, imp: &Implication) -> ExpertAnswer {
    domain.answer_for(imp)
}

pub fn expert_closure(domain: &ScriptedDomain, x: &AttributeSet) -> AttributeSet {
    domain.closure(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    /// Counter-examples refute the question they answer.
    #[serde(rename = "i")]
    I,
    /// Counter-examples do not refute implications answered valid.
    #[serde(rename = "ii")]
    Ii,
    /// Counter-examples have a compatible completion.
    #[serde(rename = "iii")]
    Iii,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub query: Implication,
    pub condition: Condition,
    pub evidence: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpertReport {
    pub checked_queries: usize,
    pub violations: Vec<Violation>,
}

impl ExpertReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn conditions(&self) -> std::collections::BTreeSet<Condition> {
        self.violations.iter().map(|v| v.condition).collect()
    }
}

/// Checks the expert axioms on a sample of queries. Condition (ii) is checked
/// pairwise over the sample; condition (iii) looks for a completion against
/// `validated` and the schema's background.
pub fn validate_expert(
    source: &mut dyn Expert,
    schema: &ExplorationSchema,
    validated: &[Implication],
    sample: &[Implication],
) -> ExpertReport {
    let answers: Vec<(&Implication, ExpertAnswer)> =
        sample.iter().map(|q| (q, source.answer(q))).collect();
    let mut report = ExpertReport {
        checked_queries: answers.len(),
        violations: Vec::new(),
    };
    let valid: Vec<&Implication> = answers
        .iter()
        .filter(|(_, a)| *a == ExpertAnswer::Valid)
        .map(|(q, _)| *q)
        .collect();

    for (query, answer) in &answers {
        let ExpertAnswer::Counterexample(ex) = answer else {
            continue;
        };
        let shown = ex.format(schema);
        if !ex.refutes(query) {
            report.violations.push(Violation {
                query: (*query).clone(),
                condition: Condition::I,
                evidence: format!("{shown} does not refute {}", query.display(schema)),
            });
        }
        for v in valid.iter().filter(|v| ex.refutes(v)) {
            report.violations.push(Violation {
                query: (*query).clone(),
                condition: Condition::Ii,
                evidence: format!(
                    "{shown} refutes {}, which was answered valid",
                    v.display(schema)
                ),
            });
        }
        if find_completion(ex, validated, schema.background()).is_none() {
            report.violations.push(Violation {
                query: (*query).clone(),
                condition: Condition::Iii,
                evidence: format!("{shown} has no compatible completion"),
            });
        }
    }
    report
}

/// Replaces the lower bound of a counter-example by its closure under
/// `theory`. The result refutes the same question and no member of `theory`.
pub fn normalize_expert_answer(
    answer: &ExpertAnswer,
    theory: &[Implication],
) -> Result<ExpertAnswer> {
    let ExpertAnswer::Counterexample(ex) = answer else {
        return Ok(ExpertAnswer::Valid);
    };
    let inconsistent = || Error::NoCompletion {
        example: format!("({}, {})", ex.lower(), ex.upper()),
    };
    match close(theory, ex.lower()) {
        Conclusion::Bottom => Err(inconsistent()),
        Conclusion::Set(lower) if !lower.is_subset(ex.upper()) => Err(inconsistent()),
        Conclusion::Set(lower) => Ok(ExpertAnswer::Counterexample(PartialExample::new(
            lower,
            ex.upper().clone(),
        )?)),
    }
}
