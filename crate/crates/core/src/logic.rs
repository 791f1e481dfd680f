//! Implicational and clausal inference.
//!
//! Implication closure is a plain fire-until-fixpoint loop. Inference that
//! takes cumulated clauses into account searches the least models above a
//! start set: close under the implications, pick the first violated clause,
//! and branch over its disjuncts. Every model above the start set lies above
//! one of the leaves of that search, so the meet of the leaves is the largest
//! set that follows. The search is exponential only in the number of clauses
//! that get violated along a branch.

use std::collections::HashSet;
use std::fmt;
use std::ops::ControlFlow;

use crate::attrset::AttributeSet;
use crate::error::{Error, Result};
use crate::schema::{CumulatedClause, ExplorationSchema};

/// Default cap on the number of attributes for brute-force enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 20;

/// Hard cap: enumeration indexes sets by a `u64` bit pattern.
const MAX_ENUMERATION: usize = 32;

/// Right-hand side of an implication, or the result of a closure.
///
/// `Bottom` is the absorbing top element: an implication `A -> ⊥` says that no
/// admissible set contains `A`, and a closure is `Bottom` when no model
/// contains the start set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Conclusion {
    Set(AttributeSet),
    Bottom,
}

impl Conclusion {
    pub fn as_set(&self) -> Option<&AttributeSet> {
        match self {
            Conclusion::Set(s) => Some(s),
            Conclusion::Bottom => None,
        }
    }

    pub fn into_set(self) -> Option<AttributeSet> {
        match self {
            Conclusion::Set(s) => Some(s),
            Conclusion::Bottom => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Conclusion::Bottom)
    }

    /// Containment with `Bottom` above every set.
    pub fn includes(&self, other: &Conclusion) -> bool {
        match (self, other) {
            (Conclusion::Bottom, _) => true,
            (Conclusion::Set(_), Conclusion::Bottom) => false,
            (Conclusion::Set(a), Conclusion::Set(b)) => b.is_subset(a),
        }
    }

    /// `Bottom` is read as the full set.
    pub fn to_set_or_full(&self, universe: usize) -> AttributeSet {
        match self {
            Conclusion::Set(s) => s.clone(),
            Conclusion::Bottom => AttributeSet::full(universe),
        }
    }
}

/// An implication `premise -> conclusion`, stored with the premise folded into
/// the conclusion.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Implication {
    premise: AttributeSet,
    conclusion: Conclusion,
}

impl Implication {
    pub fn new(premise: AttributeSet, conclusion: AttributeSet) -> Self {
        let conclusion = premise.union(&conclusion);
        Self {
            premise,
            conclusion: Conclusion::Set(conclusion),
        }
    }

    pub fn bottom(premise: AttributeSet) -> Self {
        Self {
            premise,
            conclusion: Conclusion::Bottom,
        }
    }

    pub fn with_conclusion(premise: AttributeSet, conclusion: Conclusion) -> Self {
        match conclusion {
            Conclusion::Set(s) => Self::new(premise, s),
            Conclusion::Bottom => Self::bottom(premise),
        }
    }

    pub fn premise(&self) -> &AttributeSet {
        &self.premise
    }

    pub fn conclusion(&self) -> &Conclusion {
        &self.conclusion
    }

    pub fn universe(&self) -> usize {
        self.premise.universe()
    }

    /// Whether `set` is a model of this implication.
    pub fn is_respected_by(&self, set: &AttributeSet) -> bool {
        if !self.premise.is_subset(set) {
            return true;
        }
        match &self.conclusion {
            Conclusion::Set(s) => s.is_subset(set),
            Conclusion::Bottom => false,
        }
    }

    /// Whether the conclusion lies inside `set` (never, for `Bottom`).
    pub fn conclusion_within(&self, set: &AttributeSet) -> bool {
        match &self.conclusion {
            Conclusion::Set(s) => s.is_subset(set),
            Conclusion::Bottom => false,
        }
    }

    pub fn display<'a>(&'a self, schema: &'a ExplorationSchema) -> DisplayImplication<'a> {
        DisplayImplication { imp: self, schema }
    }
}

pub struct DisplayImplication<'a> {
    imp: &'a Implication,
    schema: &'a ExplorationSchema,
}

impl fmt::Display for DisplayImplication<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> ", self.schema.format_set(&self.imp.premise))?;
        match &self.imp.conclusion {
            Conclusion::Set(s) => write!(f, "{}", self.schema.format_set(s)),
            Conclusion::Bottom => write!(f, "⊥"),
        }
    }
}

pub fn respects(set: &AttributeSet, imp: &Implication) -> bool {
    imp.is_respected_by(set)
}

pub fn respects_all(set: &AttributeSet, imps: &[Implication]) -> bool {
    imps.iter().all(|imp| imp.is_respected_by(set))
}

/// How much of the knowledge base an inference consults.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InferenceMode {
    /// Implications only. Sound, possibly incomplete under background clauses.
    ImplicationsOnly,
    /// Implications plus cumulated background clauses. Complete.
    WithBackground,
}

/// Implicational closure of `start`: fires every implication whose premise is
/// contained in the growing set until nothing changes.
pub fn close(imps: &[Implication], start: &AttributeSet) -> Conclusion {
    let mut set = start.clone();
    let mut pending: Vec<&Implication> = imps.iter().collect();
    loop {
        let mut grew = false;
        let mut i = 0;
        while i < pending.len() {
            let imp = pending[i];
            if imp.premise.is_subset(&set) {
                match &imp.conclusion {
                    Conclusion::Bottom => return Conclusion::Bottom,
                    Conclusion::Set(s) => {
                        if !s.is_subset(&set) {
                            set.union_with(s);
                            grew = true;
                        }
                    }
                }
                pending.swap_remove(i);
            } else {
                i += 1;
            }
        }
        if !grew {
            return Conclusion::Set(set);
        }
    }
}

/// Closure that optionally folds in background clauses.
///
/// With the background, the result is the meet of all models of
/// `imps ∪ background` that contain `start`, or `Bottom` if there are none.
pub fn close_in(
    imps: &[Implication],
    background: &[CumulatedClause],
    start: &AttributeSet,
    mode: InferenceMode,
) -> Conclusion {
    match mode {
        InferenceMode::ImplicationsOnly => close(imps, start),
        InferenceMode::WithBackground => {
            let mut meet: Option<AttributeSet> = None;
            let _ = for_each_least_model(imps, background, start, None, |leaf| {
                match &mut meet {
                    Some(m) => m.intersect_with(leaf),
                    None => meet = Some(leaf.clone()),
                }
                // The meet can not drop below the start set.
                if meet.as_ref().is_some_and(|m| m == start) {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            meet.map_or(Conclusion::Bottom, Conclusion::Set)
        }
    }
}

/// Visits the leaves of the disjunct-branching search: models of
/// `imps ∪ clauses` that contain `start` (and lie inside `ceiling`, if given),
/// such that every model in that range lies above at least one leaf.
pub fn for_each_least_model<F>(
    imps: &[Implication],
    clauses: &[CumulatedClause],
    start: &AttributeSet,
    ceiling: Option<&AttributeSet>,
    mut visit: F,
) -> ControlFlow<()>
where
    F: FnMut(&AttributeSet) -> ControlFlow<()>,
{
    let admissible = |c: &Conclusion| -> Option<AttributeSet> {
        let set = c.as_set()?;
        match ceiling {
            Some(top) if !set.is_subset(top) => None,
            _ => Some(set.clone()),
        }
    };

    let Some(root) = admissible(&close(imps, start)) else {
        return ControlFlow::Continue(());
    };
    let mut seen = HashSet::new();
    let mut stack = vec![root.clone()];
    seen.insert(root);

    while let Some(node) = stack.pop() {
        let violated = clauses.iter().find(|c| !c.is_satisfied_by(&node));
        let Some(clause) = violated else {
            visit(&node)?;
            continue;
        };
        // Push in reverse so the first disjunct is explored first.
        for disjunct in clause.disjuncts.iter().rev() {
            let Some(child) = admissible(&close(imps, &node.union(disjunct))) else {
                continue;
            };
            if seen.insert(child.clone()) {
                stack.push(child);
            }
        }
    }
    ControlFlow::Continue(())
}

/// Whether every model of the knowledge base respects `imp`.
pub fn entails(
    imps: &[Implication],
    background: &[CumulatedClause],
    imp: &Implication,
    mode: InferenceMode,
) -> bool {
    close_in(imps, background, imp.premise(), mode).includes(imp.conclusion())
}

fn check_enumeration(universe: usize, limit: usize) -> Result<()> {
    if universe > limit.min(MAX_ENUMERATION) {
        Err(Error::EnumerationLimit {
            attributes: universe,
            limit: limit.min(MAX_ENUMERATION),
        })
    } else {
        Ok(())
    }
}

/// All subsets of the universe, for brute-force checks.
pub fn power_set(universe: usize, limit: usize) -> Result<impl Iterator<Item = AttributeSet>> {
    check_enumeration(universe, limit)?;
    Ok((0..1u64 << universe).map(move |bits| AttributeSet::from_bits(universe, bits)))
}

/// Every set respecting all implications and satisfying all clauses, by
/// enumeration of the power set. Refuses universes above `limit` attributes.
pub fn models(
    imps: &[Implication],
    background: &[CumulatedClause],
    universe: usize,
    limit: usize,
) -> Result<Vec<AttributeSet>> {
    Ok(power_set(universe, limit)?
        .filter(|x| respects_all(x, imps) && crate::schema::satisfies_all(x, background))
        .collect())
}

/// Drops, in list order, every implication entailed by the ones still kept
/// plus the ones not yet examined. The result depends on the input order.
pub fn remove_redundant(imps: &[Implication]) -> Vec<Implication> {
    let mut kept: Vec<Implication> = imps.to_vec();
    let mut i = 0;
    while i < kept.len() {
        let candidate = kept.remove(i);
        if entails(&kept, &[], &candidate, InferenceMode::ImplicationsOnly) {
            continue;
        }
        kept.insert(i, candidate);
        i += 1;
    }
    kept
}
