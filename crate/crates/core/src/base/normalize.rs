//! Normalization of the example list.
//!
//! Three rewrites, each replacing an example by a tighter one that keeps every
//! compatible completion:
//!
//! 1. `(U, V)` with an implication `R -> S`, `R ⊆ U`, becomes `(U ∪ S, V)`.
//! 2. `(U, V)` with `v ∈ V \ U` and an implication `R -> S`, `R ⊆ U ∪ {v}`,
//!    `S ⊄ V`, becomes `(U, V \ {v})`.
//! 3. `(U1, V1)` is dropped when another example `(U2, V2)` lies inside it.
//!
//! The schedule is a step function: rule 1 on the first example it changes
//! (run to its fixpoint for that example), else rule 2 on the first example it
//! changes (ascending `v`, to fixpoint), else rule 3 on the first dominated
//! example. Restarting from any intermediate state therefore continues the
//! same sequence of rewrites, which keeps journals resumable.

use crate::base::{Actor, Change, ExplorationBase, PartialExample};
use crate::error::{Error, Result};
use crate::logic::{Conclusion, Implication};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalizeReport {
    /// For each example after normalization, the index it had before.
    pub origins: Vec<usize>,
    pub rewrites: usize,
}

pub fn normalize(base: &mut ExplorationBase) -> Result<NormalizeReport> {
    let mut origins: Vec<usize> = (0..base.examples().len()).collect();
    let mut rewrites = 0;
    while let Some((change, note)) = next_rewrite(base.implications(), base.examples())? {
        if let Change::DropExample { index, .. } = &change {
            origins.remove(*index);
        }
        base.apply(Actor::Normalizer, change, note)?;
        rewrites += 1;
    }
    Ok(NormalizeReport { origins, rewrites })
}

fn inconsistent(ex: &PartialExample, imp: &Implication) -> Error {
    Error::Inconsistent {
        example: format!("({}, {})", ex.lower(), ex.upper()),
        implication: format!(
            "{} -> {}",
            imp.premise(),
            imp.conclusion()
                .as_set()
                .map_or_else(|| "⊥".to_owned(), ToString::to_string)
        ),
    }
}

fn absorb_premises(imps: &[Implication], ex: &PartialExample) -> Result<Option<PartialExample>> {
    let mut lower = ex.lower().clone();
    loop {
        let mut grew = false;
        for imp in imps {
            if !imp.premise().is_subset(&lower) {
                continue;
            }
            match imp.conclusion() {
                Conclusion::Bottom => return Err(inconsistent(ex, imp)),
                Conclusion::Set(s) => {
                    if !s.is_subset(ex.upper()) {
                        return Err(inconsistent(ex, imp));
                    }
                    if !s.is_subset(&lower) {
                        lower.union_with(s);
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    if &lower == ex.lower() {
        return Ok(None);
    }
    Ok(Some(PartialExample::new(lower, ex.upper().clone())?))
}

fn prune_upper(imps: &[Implication], ex: &PartialExample) -> Result<Option<PartialExample>> {
    let lower = ex.lower();
    let mut upper = ex.upper().clone();
    'scan: loop {
        for v in upper.difference(lower).iter().collect::<Vec<_>>() {
            let mut grown = lower.clone();
            grown.insert(v);
            let blocked = imps
                .iter()
                .any(|imp| imp.premise().is_subset(&grown) && !imp.conclusion_within(&upper));
            if blocked {
                upper.remove(v);
                continue 'scan;
            }
        }
        break;
    }
    if &upper == ex.upper() {
        return Ok(None);
    }
    Ok(Some(PartialExample::new(lower.clone(), upper)?))
}

fn first_dominated(examples: &[PartialExample]) -> Option<usize> {
    (0..examples.len()).find(|&i| {
        examples.iter().enumerate().any(|(j, other)| {
            // Identical intervals: the later one survives.
            j != i && other.is_tighter_than(&examples[i]) && (other != &examples[i] || j > i)
        })
    })
}

fn next_rewrite(
    imps: &[Implication],
    examples: &[PartialExample],
) -> Result<Option<(Change, &'static str)>> {
    for (index, ex) in examples.iter().enumerate() {
        if let Some(after) = absorb_premises(imps, ex)? {
            let change = Change::TightenExample {
                index,
                before: ex.clone(),
                after,
            };
            return Ok(Some((
                change,
                "rule 1: absorb conclusions of contained premises",
            )));
        }
    }
    for (index, ex) in examples.iter().enumerate() {
        if let Some(after) = prune_upper(imps, ex)? {
            let change = Change::TightenExample {
                index,
                before: ex.clone(),
                after,
            };
            return Ok(Some((
                change,
                "rule 2: exclude attributes that force a conclusion outside the upper bound",
            )));
        }
    }
    Ok(first_dominated(examples).map(|index| {
        let change = Change::DropExample {
            index,
            example: examples[index].clone(),
        };
        (change, "rule 3: a tighter example exists")
    }))
}
