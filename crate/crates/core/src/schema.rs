//! Attribute universe, background knowledge, and name/index encoding.
//!
//! Background knowledge is a list of cumulated clauses `A -> B1 | ... | Bk`:
//! any admissible set containing all of `A` contains all of some `Bi`. A
//! clause with no disjuncts says that no admissible set contains `A`.

use std::collections::HashMap;

use crate::attrset::AttributeSet;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CumulatedClause {
    pub premise: AttributeSet,
    pub disjuncts: Vec<AttributeSet>,
}

impl CumulatedClause {
    pub fn new(premise: AttributeSet, disjuncts: Vec<AttributeSet>) -> Self {
        Self { premise, disjuncts }
    }

    /// A clause excluding every superset of `premise`.
    pub fn exclusion(premise: AttributeSet) -> Self {
        Self {
            premise,
            disjuncts: Vec::new(),
        }
    }

    pub fn is_satisfied_by(&self, set: &AttributeSet) -> bool {
        !self.premise.is_subset(set) || self.disjuncts.iter().any(|b| b.is_subset(set))
    }

    fn universe_mismatch(&self, universe: usize) -> Option<usize> {
        std::iter::once(&self.premise)
            .chain(&self.disjuncts)
            .map(AttributeSet::universe)
            .find(|&u| u != universe)
    }
}

/// Checked clause evaluation.
pub fn satisfies_clause(set: &AttributeSet, clause: &CumulatedClause) -> Result<bool> {
    if let Some(found) = clause.universe_mismatch(set.universe()) {
        return Err(Error::SchemaMismatch {
            expected: set.universe(),
            found,
        });
    }
    Ok(clause.is_satisfied_by(set))
}

/// Whether `set` satisfies every clause in `background`.
pub fn satisfies_all(set: &AttributeSet, background: &[CumulatedClause]) -> bool {
    background.iter().all(|c| c.is_satisfied_by(set))
}

/// The attribute universe plus background knowledge. Immutable once built.
#[derive(Clone, Debug)]
pub struct ExplorationSchema {
    attributes: Vec<String>,
    index: HashMap<String, usize>,
    background: Vec<CumulatedClause>,
}

impl ExplorationSchema {
    pub fn new(attributes: Vec<String>, background: Vec<CumulatedClause>) -> Result<Self> {
        let mut index = HashMap::with_capacity(attributes.len());
        for (i, name) in attributes.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidSchema(format!(
                    "attribute {i} has an empty name"
                )));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidSchema(format!(
                    "duplicate attribute `{name}`"
                )));
            }
        }
        let n = attributes.len();
        if let Some(found) = background.iter().find_map(|c| c.universe_mismatch(n)) {
            return Err(Error::SchemaMismatch { expected: n, found });
        }
        Ok(Self {
            attributes,
            index,
            background,
        })
    }

    /// Schema with attributes named by the given strings and no background.
    pub fn with_attributes<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(names.into_iter().map(Into::into).collect(), Vec::new())
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn background(&self) -> &[CumulatedClause] {
        &self.background
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownAttribute(name.to_owned()))
    }

    pub fn name_of(&self, index: usize) -> &str {
        &self.attributes[index]
    }

    pub fn empty_set(&self) -> AttributeSet {
        AttributeSet::empty(self.len())
    }

    pub fn full_set(&self) -> AttributeSet {
        AttributeSet::full(self.len())
    }

    /// Encodes attribute names into a set.
    pub fn set_of<I, S>(&self, names: I) -> Result<AttributeSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = self.empty_set();
        for name in names {
            set.insert(self.index_of(name.as_ref())?);
        }
        Ok(set)
    }

    /// Decodes a set into names, in declaration order.
    pub fn names_of(&self, set: &AttributeSet) -> Vec<String> {
        set.iter().map(|i| self.attributes[i].clone()).collect()
    }

    /// Human-readable `{a,b}` rendering.
    pub fn format_set(&self, set: &AttributeSet) -> String {
        format!("{{{}}}", self.names_of(set).join(","))
    }

    pub fn check(&self, set: &AttributeSet) -> Result<()> {
        if set.universe() == self.len() {
            Ok(())
        } else {
            Err(Error::SchemaMismatch {
                expected: self.len(),
                found: set.universe(),
            })
        }
    }

    pub fn compatible_with_background(&self, set: &AttributeSet) -> bool {
        satisfies_all(set, &self.background)
    }

    /// Whether the full attribute set is admissible under the background. When
    /// it is not, implications concluding in everything are written `A -> ⊥`.
    pub fn admits_top(&self) -> bool {
        self.compatible_with_background(&self.full_set())
    }
}
