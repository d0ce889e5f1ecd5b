//! Word-vector lookup and bag-of-words text embeddings.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::ops::Add;
use std::path::Path;

use thiserror::Error;

pub const DEFAULT_DIMENSION: usize = 50;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("vector file line {line}: expected {expected} components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("vector file line {line}: invalid number `{token}`")]
    BadNumber { line: usize, token: String },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("vector dimensions differ: {0} vs {1}")]
    VectorMismatch(usize, usize),
}

/// Immutable word → vector table. Keys are lowercased at load time.
#[derive(Debug, Clone)]
pub struct VectorStore {
    dimension: usize,
    table: HashMap<String, Vec<f64>>,
}

impl VectorStore {
    pub fn empty(dimension: usize) -> Self {
        Self {
            dimension,
            table: HashMap::new(),
        }
    }

    /// Builds a store from in-memory rows; first occurrence of a word wins.
    pub fn from_rows<I, S>(dimension: usize, rows: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        if dimension == 0 {
            return Err(EmbeddingError::ZeroDimension);
        }
        let mut store = Self::empty(dimension);
        for (i, (word, vector)) in rows.into_iter().enumerate() {
            if vector.len() != dimension {
                return Err(EmbeddingError::DimensionMismatch {
                    line: i + 1,
                    expected: dimension,
                    found: vector.len(),
                });
            }
            store
                .table
                .entry(word.as_ref().to_lowercase())
                .or_insert(vector);
        }
        Ok(store)
    }

    pub fn load(path: &Path, dimension: usize) -> Result<Self, EmbeddingError> {
        let file = File::open(path).map_err(|source| EmbeddingError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::read(BufReader::new(file), dimension).map_err(|e| match e {
            EmbeddingError::Io { source, .. } => EmbeddingError::Io {
                path: path.display().to_string(),
                source,
            },
            other => other,
        })
    }

    /// Reads the plain-text `word c1 ... cd` format.
    pub fn read<R: BufRead>(reader: R, dimension: usize) -> Result<Self, EmbeddingError> {
        if dimension == 0 {
            return Err(EmbeddingError::ZeroDimension);
        }
        let mut store = Self::empty(dimension);
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| EmbeddingError::Io {
                path: String::new(),
                source,
            })?;
            let line_no = idx + 1;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else {
                continue;
            };
            let mut vector = Vec::with_capacity(dimension);
            for token in fields {
                let value: f64 = token.parse().map_err(|_| EmbeddingError::BadNumber {
                    line: line_no,
                    token: token.to_string(),
                })?;
                vector.push(value);
            }
            if vector.len() != dimension {
                return Err(EmbeddingError::DimensionMismatch {
                    line: line_no,
                    expected: dimension,
                    found: vector.len(),
                });
            }
            store.table.entry(word.to_lowercase()).or_insert(vector);
        }
        Ok(store)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        match self.table.get(word) {
            Some(v) => Some(v),
            None => self.table.get(&word.to_lowercase()).map(Vec::as_slice),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.get(word).is_some()
    }
}

/// Splits on whitespace, keeps only letters and digits, lowercases, and drops
/// tokens left empty.
pub fn preprocess(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| {
            raw.chars()
                .filter(|c| c.is_alphanumeric())
                .flat_map(char::to_lowercase)
                .collect::<String>()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

/// Component-wise sum of the in-vocabulary word vectors of a text.
#[derive(Debug, Clone, PartialEq)]
pub struct TextVector {
    pub components: Vec<f64>,
    pub matched_tokens: usize,
    pub total_tokens: usize,
}

impl TextVector {
    pub fn zero(dimension: usize) -> Self {
        Self {
            components: vec![0.0; dimension],
            matched_tokens: 0,
            total_tokens: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            components: self.components.iter().map(|x| x * factor).collect(),
            ..self.clone()
        }
    }
}

impl Add for &TextVector {
    type Output = TextVector;

    fn add(self, rhs: &TextVector) -> TextVector {
        assert_eq!(self.dimension(), rhs.dimension(), "dimension mismatch");
        TextVector {
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
            matched_tokens: self.matched_tokens + rhs.matched_tokens,
            total_tokens: self.total_tokens + rhs.total_tokens,
        }
    }
}

pub fn embed_text<S: AsRef<str>>(tokens: &[S], store: &VectorStore) -> TextVector {
    let mut out = TextVector::zero(store.dimension());
    out.total_tokens = tokens.len();
    for token in tokens {
        if let Some(vector) = store.get(token.as_ref()) {
            for (acc, x) in out.components.iter_mut().zip(vector) {
                *acc += x;
            }
            out.matched_tokens += 1;
        }
    }
    out
}

/// Preprocesses then embeds.
pub fn embed(text: &str, store: &VectorStore) -> TextVector {
    embed_text(&preprocess(text), store)
}

/// Cosine similarity, `None` when either vector has zero norm. The result is
/// clamped to `[-1, 1]`.
pub fn cosine_similarity(a: &TextVector, b: &TextVector) -> Result<Option<f64>, EmbeddingError> {
    cosine_of(&a.components, &b.components)
}

pub fn cosine_of(a: &[f64], b: &[f64]) -> Result<Option<f64>, EmbeddingError> {
    if a.len() != b.len() {
        return Err(EmbeddingError::VectorMismatch(a.len(), b.len()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(None);
    }
    Ok(Some((dot / (na * nb)).clamp(-1.0, 1.0)))
}
