//! Per-category index of previously accepted texts for novelty checks.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::metrics::normalize_text;
use crate::types::Category;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NoveltyError {
    #[error("duplicate_id: {0} is already indexed")]
    DuplicateId(String),
}

/// One indexed entry. Seeds carry no response; the duplicate-response check
/// only applies to entries that have one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoveltyEntry {
    pub id: String,
    pub instruction: String,
    pub response: Option<String>,
    /// Character-trigram set of the normalized instruction. Rebuilt rather
    /// than serialized; see [`NoveltyIndex::rebuild`].
    #[serde(skip)]
    trigrams: BTreeSet<String>,
}

fn trigrams_of(normalized: &str) -> BTreeSet<String> {
    let chars: Vec<char> = normalized.chars().collect();
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

impl NoveltyEntry {
    fn new(id: String, instruction: &str, response: Option<&str>) -> Self {
        let instruction = normalize_text(instruction);
        let trigrams = trigrams_of(&instruction);
        NoveltyEntry {
            id,
            instruction,
            response: response.map(normalize_text),
            trigrams,
        }
    }
}

/// The comparison corpus for the novelty criterion: everything previously
/// indexed (seeds plus accepted pairs), grouped by category. A single writer
/// inserts; reads see a consistent snapshot.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct NoveltyIndex {
    entries: BTreeMap<Category, Vec<NoveltyEntry>>,
    #[serde(skip)]
    ids: HashSet<String>,
}

impl NoveltyIndex {
    pub fn new() -> Self {
        NoveltyIndex::default()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.ids.contains(id)
    }

    /// Index an instruction (and optionally its response) under a category.
    pub fn insert(
        &mut self,
        id: &str,
        category: Category,
        instruction: &str,
        response: Option<&str>,
    ) -> Result<(), NoveltyError> {
        if !self.ids.insert(id.to_string()) {
            return Err(NoveltyError::DuplicateId(id.to_string()));
        }
        self.entries
            .entry(category)
            .or_default()
            .push(NoveltyEntry::new(id.to_string(), instruction, response));
        Ok(())
    }

    /// Maximum trigram similarity of `instruction` against every indexed
    /// instruction across all categories. Empty index yields 0.0, and
    /// entries too short to compare are skipped the same way
    /// `trigram_similarity` treats them: by exact equality.
    pub fn max_similarity(&self, instruction: &str) -> f64 {
        let normalized = normalize_text(instruction);
        let chars: Vec<char> = normalized.chars().collect();
        let own = trigrams_of(&normalized);
        let mut max = 0.0f64;
        for entry in self.entries.values().flatten() {
            let sim = if chars.len() < 3 || entry.instruction.chars().count() < 3 {
                if normalized == entry.instruction {
                    1.0
                } else {
                    0.0
                }
            } else {
                let intersection = own.intersection(&entry.trigrams).count();
                let union = own.len() + entry.trigrams.len() - intersection;
                if union == 0 {
                    0.0
                } else {
                    intersection as f64 / union as f64
                }
            };
            if sim > max {
                max = sim;
            }
        }
        max
    }

    /// True iff the normalized response equals an indexed response in the
    /// same category.
    pub fn has_duplicate_response(&self, category: Category, response: &str) -> bool {
        let normalized = normalize_text(response);
        self.entries
            .get(&category)
            .map(|entries| {
                entries
                    .iter()
                    .any(|e| e.response.as_deref() == Some(normalized.as_str()))
            })
            .unwrap_or(false)
    }

    /// Recompute the skipped fields after deserialization.
    pub fn rebuild(&mut self) {
        self.ids.clear();
        for entry in self.entries.values_mut().flatten() {
            entry.trigrams = trigrams_of(&entry.instruction);
            self.ids.insert(entry.id.clone());
        }
    }
}
