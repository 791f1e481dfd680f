//! JSON documents exchanged with files and clients. Attribute names appear on
//! disk and on the wire; indices never leave the process.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::attrset::AttributeSet;
use crate::base::{Action, Actor, Change, JournalEntry, PartialExample};
use crate::error::{Error, Result};
use crate::expert::{ExpertAnswer, MaskPolicy, ScriptedDomain};
use crate::logic::{Conclusion, Implication};
use crate::schema::{CumulatedClause, ExplorationSchema};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClauseRecord {
    pub premise: Vec<String>,
    #[serde(default)]
    pub disjuncts: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaFile {
    pub attributes: Vec<String>,
    #[serde(default)]
    pub background: Vec<ClauseRecord>,
}

impl SchemaFile {
    pub fn into_schema(self) -> Result<ExplorationSchema> {
        let names = ExplorationSchema::new(self.attributes.clone(), Vec::new())?;
        let background = self
            .background
            .iter()
            .map(|c| {
                Ok(CumulatedClause::new(
                    names.set_of(&c.premise)?,
                    c.disjuncts
                        .iter()
                        .map(|d| names.set_of(d))
                        .collect::<Result<_>>()?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        ExplorationSchema::new(self.attributes, background)
    }

    pub fn from_schema(schema: &ExplorationSchema) -> Self {
        Self {
            attributes: schema.attributes().to_vec(),
            background: schema
                .background()
                .iter()
                .map(|c| ClauseRecord {
                    premise: schema.names_of(&c.premise),
                    disjuncts: c.disjuncts.iter().map(|d| schema.names_of(d)).collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_schema(text: &str) -> Result<ExplorationSchema> {
    serde_json::from_str::<SchemaFile>(text)?.into_schema()
}

pub fn load_schema(path: &Path) -> Result<ExplorationSchema> {
    parse_schema(&fs::read_to_string(path)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleRecord {
    pub lower: Vec<String>,
    pub upper: Vec<String>,
}

impl ExampleRecord {
    pub fn encode(schema: &ExplorationSchema, ex: &PartialExample) -> Self {
        Self {
            lower: schema.names_of(ex.lower()),
            upper: schema.names_of(ex.upper()),
        }
    }

    pub fn decode(&self, schema: &ExplorationSchema) -> Result<PartialExample> {
        PartialExample::new(schema.set_of(&self.lower)?, schema.set_of(&self.upper)?)
    }
}

pub fn parse_examples(text: &str, schema: &ExplorationSchema) -> Result<Vec<PartialExample>> {
    serde_json::from_str::<Vec<ExampleRecord>>(text)?
        .iter()
        .map(|r| r.decode(schema))
        .collect()
}

/// A conclusion is a list of names, or the string `"bottom"` for `⊥`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConclusionRecord {
    Set(Vec<String>),
    Bottom,
}

const BOTTOM: &str = "bottom";

impl Serialize for ConclusionRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ConclusionRecord::Set(names) => names.serialize(serializer),
            ConclusionRecord::Bottom => serializer.serialize_str(BOTTOM),
        }
    }
}

impl<'de> Deserialize<'de> for ConclusionRecord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Set(Vec<String>),
            Tag(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Set(names) => Ok(ConclusionRecord::Set(names)),
            Raw::Tag(t) if t == BOTTOM || t == "⊥" => Ok(ConclusionRecord::Bottom),
            Raw::Tag(t) => Err(de::Error::custom(format!(
                "expected a list of attributes or \"bottom\", got {t:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplicationRecord {
    pub premise: Vec<String>,
    pub conclusion: ConclusionRecord,
}

impl ImplicationRecord {
    pub fn encode(schema: &ExplorationSchema, imp: &Implication) -> Self {
        Self {
            premise: schema.names_of(imp.premise()),
            conclusion: match imp.conclusion() {
                Conclusion::Set(s) => ConclusionRecord::Set(schema.names_of(s)),
                Conclusion::Bottom => ConclusionRecord::Bottom,
            },
        }
    }

    pub fn decode(&self, schema: &ExplorationSchema) -> Result<Implication> {
        let premise = schema.set_of(&self.premise)?;
        Ok(match &self.conclusion {
            ConclusionRecord::Set(names) => Implication::new(premise, schema.set_of(names)?),
            ConclusionRecord::Bottom => Implication::bottom(premise),
        })
    }
}

/// Plain-text rendering `b -> a` with the premise dropped from the conclusion.
pub fn implication_line(schema: &ExplorationSchema, imp: &Implication) -> String {
    let premise = schema.names_of(imp.premise()).join(", ");
    let conclusion = match imp.conclusion() {
        Conclusion::Set(s) => schema.names_of(&s.difference(imp.premise())).join(", "),
        Conclusion::Bottom => "⊥".to_owned(),
    };
    format!("{premise} -> {conclusion}").trim_start().to_owned()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayloadRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implication: Option<ImplicationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub before: Option<ExampleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after: Option<ExampleRecord>,
}

/// One journal line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JournalRecord {
    pub seq: u64,
    pub actor: Actor,
    pub action: Action,
    pub payload: PayloadRecord,
    #[serde(default)]
    pub note: String,
}

impl JournalRecord {
    pub fn encode(schema: &ExplorationSchema, entry: &JournalEntry) -> Self {
        let ex = |e: &PartialExample| Some(ExampleRecord::encode(schema, e));
        let imp = |i: &Implication| Some(ImplicationRecord::encode(schema, i));
        let payload = match &entry.change {
            Change::AddImplication { implication } => PayloadRecord {
                implication: imp(implication),
                ..Default::default()
            },
            Change::AddExample { example } => PayloadRecord {
                example: ex(example),
                ..Default::default()
            },
            Change::TightenExample {
                index,
                before,
                after,
            } => PayloadRecord {
                index: Some(*index),
                before: ex(before),
                after: ex(after),
                ..Default::default()
            },
            Change::DropExample { index, example } => PayloadRecord {
                index: Some(*index),
                example: ex(example),
                ..Default::default()
            },
            Change::DropImplication { index, implication } => PayloadRecord {
                index: Some(*index),
                implication: imp(implication),
                ..Default::default()
            },
        };
        Self {
            seq: entry.seq,
            actor: entry.actor,
            action: entry.action(),
            payload,
            note: entry.note.clone(),
        }
    }

    pub fn decode(&self, schema: &ExplorationSchema) -> Result<JournalEntry> {
        let corrupt = |reason: String| Error::CorruptJournal {
            seq: self.seq,
            reason,
        };
        let missing = |field: &str| corrupt(format!("payload lacks `{field}`"));
        let p = &self.payload;
        let index = || p.index.ok_or_else(|| missing("index"));
        let example = |r: &Option<ExampleRecord>, field: &str| {
            r.as_ref()
                .ok_or_else(|| missing(field))?
                .decode(schema)
                .map_err(|e| corrupt(e.to_string()))
        };
        let implication = || {
            p.implication
                .as_ref()
                .ok_or_else(|| missing("implication"))?
                .decode(schema)
                .map_err(|e| corrupt(e.to_string()))
        };
        let change = match self.action {
            Action::AddImplication => Change::AddImplication {
                implication: implication()?,
            },
            Action::AddExample => Change::AddExample {
                example: example(&p.example, "example")?,
            },
            Action::TightenExample => Change::TightenExample {
                index: index()?,
                before: example(&p.before, "before")?,
                after: example(&p.after, "after")?,
            },
            Action::DropExample => Change::DropExample {
                index: index()?,
                example: example(&p.example, "example")?,
            },
            Action::DropImplication => Change::DropImplication {
                index: index()?,
                implication: implication()?,
            },
        };
        Ok(JournalEntry {
            seq: self.seq,
            actor: self.actor,
            change,
            note: self.note.clone(),
        })
    }
}

pub fn journal_line(schema: &ExplorationSchema, entry: &JournalEntry) -> String {
    serde_json::to_string(&JournalRecord::encode(schema, entry)).expect("journal records serialize")
}

/// Appends entries to `out`, one JSON object per line.
pub fn write_journal<W: Write>(
    out: &mut W,
    schema: &ExplorationSchema,
    entries: &[JournalEntry],
) -> io::Result<()> {
    for entry in entries {
        writeln!(out, "{}", journal_line(schema, entry))?;
    }
    Ok(())
}

/// Parses a line-delimited journal. A line that fails to parse is reported
/// with the sequence number it should have carried.
pub fn parse_journal(text: &str, schema: &ExplorationSchema) -> Result<Vec<JournalEntry>> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let expected = i as u64 + 1;
        if line.trim().is_empty() {
            return Err(Error::CorruptJournal {
                seq: expected,
                reason: "empty line".to_owned(),
            });
        }
        let record: JournalRecord =
            serde_json::from_str(line).map_err(|e| Error::CorruptJournal {
                seq: expected,
                reason: e.to_string(),
            })?;
        if record.seq != expected {
            return Err(Error::CorruptJournal {
                seq: record.seq,
                reason: format!("expected seq {expected}"),
            });
        }
        entries.push(record.decode(schema)?);
    }
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(Error::CorruptJournal {
            seq: entries.len() as u64,
            reason: "truncated final line".to_owned(),
        });
    }
    Ok(entries)
}

pub fn load_journal(path: &Path, schema: &ExplorationSchema) -> Result<Vec<JournalEntry>> {
    parse_journal(&fs::read_to_string(path)?, schema)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MaskRecord {
    #[default]
    None,
    FixedHideSet {
        hide: Vec<String>,
    },
    PerQueryRandom {
        seed: u64,
    },
}

impl MaskRecord {
    pub fn decode(&self, schema: &ExplorationSchema) -> Result<MaskPolicy> {
        Ok(match self {
            MaskRecord::None => MaskPolicy::None,
            MaskRecord::FixedHideSet { hide } => MaskPolicy::FixedHideSet(schema.set_of(hide)?),
            MaskRecord::PerQueryRandom { seed } => MaskPolicy::PerQueryRandom { seed: *seed },
        })
    }
}

/// Scripted-domain file: the member sets plus the masking configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub sets: Vec<Vec<String>>,
    #[serde(default)]
    pub mask: MaskRecord,
}

impl DomainFile {
    pub fn member_sets(&self, schema: &ExplorationSchema) -> Result<Vec<AttributeSet>> {
        self.sets.iter().map(|s| schema.set_of(s)).collect()
    }

    pub fn into_domain(&self, schema: &ExplorationSchema) -> Result<ScriptedDomain> {
        ScriptedDomain::new(schema, self.member_sets(schema)?, self.mask.decode(schema)?)
    }
}

pub fn load_domain_file(path: &Path) -> Result<DomainFile> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// An expert answer on the wire.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnswerRecord {
    Valid,
    Counterexample {
        lower: Vec<String>,
        upper: Vec<String>,
    },
}

impl AnswerRecord {
    pub fn encode(schema: &ExplorationSchema, answer: &ExpertAnswer) -> Self {
        match answer {
            ExpertAnswer::Valid => AnswerRecord::Valid,
            ExpertAnswer::Counterexample(ex) => AnswerRecord::Counterexample {
                lower: schema.names_of(ex.lower()),
                upper: schema.names_of(ex.upper()),
            },
        }
    }

    pub fn decode(&self, schema: &ExplorationSchema) -> Result<ExpertAnswer> {
        Ok(match self {
            AnswerRecord::Valid => ExpertAnswer::Valid,
            AnswerRecord::Counterexample { lower, upper } => ExpertAnswer::Counterexample(
                PartialExample::new(schema.set_of(lower)?, schema.set_of(upper)?)?,
            ),
        })
    }
}
