//! The worker-response matrix.
//!
//! Responses form a sparse `k x d` table of binary answers. A cell that was
//! never asked is simply absent; there is no in-band sentinel. The on-disk
//! format is a JSON object
//!
//! ```json
//! {"k": 2, "d": 2, "entries": [{"i": 1, "j": 1, "y": 1}, {"i": 2, "j": 1, "y": 0}]}
//! ```
//!
//! with 1-based worker index `i`, 1-based question index `j`, and answer
//! `y` in `{0, 1}`. Indices are converted to 0-based internally. Entries are
//! kept sorted by `(i, j)` so iteration order is deterministic.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One observed response, 0-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResponseEntry {
    pub worker: usize,
    pub question: usize,
    /// `true` encodes the answer "1".
    pub answer: bool,
}

/// A validated sparse response matrix. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseMatrix {
    workers: usize,
    questions: usize,
    entries: Vec<ResponseEntry>,
}

/// Raw entry as it appears in the file format (1-based, unvalidated).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RawEntry {
    pub i: u64,
    pub j: u64,
    pub y: i64,
}

/// Raw file content before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawResponses {
    pub k: u64,
    pub d: u64,
    pub entries: Vec<RawEntry>,
}

/// Validate a raw entry list into a [`ResponseMatrix`].
///
/// Rejects duplicate cells, out-of-range indices, answers outside `{0, 1}`,
/// and empty entry sets. The surviving entries are sorted by worker then
/// question.
pub fn validate_responses(raw: &RawResponses) -> Result<ResponseMatrix> {
    if raw.k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if raw.d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    if raw.entries.is_empty() {
        return Err(Error::EmptyEntries);
    }
    let mut seen = BTreeSet::new();
    let mut entries = Vec::with_capacity(raw.entries.len());
    for e in &raw.entries {
        if e.i == 0 || e.i > raw.k {
            return Err(Error::IndexOutOfRange {
                what: "worker",
                got: e.i,
                max: raw.k,
            });
        }
        if e.j == 0 || e.j > raw.d {
            return Err(Error::IndexOutOfRange {
                what: "question",
                got: e.j,
                max: raw.d,
            });
        }
        if e.y != 0 && e.y != 1 {
            return Err(Error::AnswerOutOfRange { got: e.y });
        }
        if !seen.insert((e.i, e.j)) {
            return Err(Error::DuplicateEntry {
                worker: e.i,
                question: e.j,
            });
        }
        entries.push(ResponseEntry {
            worker: (e.i - 1) as usize,
            question: (e.j - 1) as usize,
            answer: e.y == 1,
        });
    }
    entries.sort_by_key(|e| (e.worker, e.question));
    Ok(ResponseMatrix {
        workers: raw.k as usize,
        questions: raw.d as usize,
        entries,
    })
}

impl ResponseMatrix {
    /// Build from 0-based `(worker, question, answer)` triples.
    pub fn from_triples(
        workers: usize,
        questions: usize,
        triples: &[(usize, usize, bool)],
    ) -> Result<Self> {
        let raw = RawResponses {
            k: workers as u64,
            d: questions as u64,
            entries: triples
                .iter()
                .map(|&(i, j, a)| RawEntry {
                    i: i as u64 + 1,
                    j: j as u64 + 1,
                    y: a as i64,
                })
                .collect(),
        };
        validate_responses(&raw)
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn questions(&self) -> usize {
        self.questions
    }

    /// Number of observed responses, `n(Y)`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in canonical `(worker, question)` order.
    pub fn entries(&self) -> &[ResponseEntry] {
        &self.entries
    }

    /// Number of responses given by worker `i`.
    pub fn responses_of_worker(&self, worker: usize) -> usize {
        self.entries.iter().filter(|e| e.worker == worker).count()
    }

    /// A copy with every answer flipped.
    pub fn flipped(&self) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.answer = !e.answer;
        }
        out
    }

    pub fn to_raw(&self) -> RawResponses {
        RawResponses {
            k: self.workers as u64,
            d: self.questions as u64,
            entries: self
                .entries
                .iter()
                .map(|e| RawEntry {
                    i: e.worker as u64 + 1,
                    j: e.question as u64 + 1,
                    y: e.answer as i64,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("response serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let raw: RawResponses = serde_json::from_str(json)?;
        validate_responses(&raw)
    }
}
