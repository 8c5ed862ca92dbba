use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    /// Sparse feature vector of dimension `Dataset::feature_dim`.
    pub features: Point,
    /// `+1.0` or `-1.0`.
    pub label: f64,
}

/// Labelled examples in `label idx:val ...` form (1-based feature indices on disk).
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    examples: Vec<Example>,
    feature_dim: usize,
}

impl Dataset {
    pub fn new(examples: Vec<Example>, feature_dim: usize) -> Result<Self> {
        for (n, e) in examples.iter().enumerate() {
            if e.label != 1.0 && e.label != -1.0 {
                return Err(Error::InvalidArgument(format!(
                    "example {n}: label {} is not +1 or -1",
                    e.label
                )));
            }
            if e.features.dim() != feature_dim {
                return Err(Error::DimensionMismatch {
                    expected: feature_dim,
                    found: e.features.dim(),
                });
            }
        }
        Ok(Dataset {
            examples,
            feature_dim,
        })
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    /// Same examples embedded in a feature space of dimension `dim >= feature_dim`.
    pub fn with_feature_dim(&self, dim: usize) -> Result<Self> {
        if dim < self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                found: dim,
            });
        }
        let examples = self
            .examples
            .iter()
            .map(|e| {
                Ok(Example {
                    features: Point::sparse(dim, e.features.entries().collect())?,
                    label: e.label,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            examples,
            feature_dim: dim,
        })
    }

    fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            feature_dim: self.feature_dim,
        }
    }

    /// Seeded shuffle into 80% training and 20% test data; the test share is
    /// `floor(n / 5)`.
    pub fn split_80_20(&self, seed: u64) -> Result<(Dataset, Dataset)> {
        let n = self.len();
        if n < 5 {
            return Err(Error::InvalidArgument(format!(
                "need at least 5 examples to split, got {n}"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let test = n / 5;
        Ok((self.subset(&order[test..]), self.subset(&order[..test])))
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.examples {
            out.write_all(if e.label > 0.0 { b"+1" } else { b"-1" })?;
            for (i, v) in e.features.entries() {
                write!(out, " {}:{}", i + 1, v)?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub fn parse_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_dataset_from(BufReader::new(file), path)
}

/// Parses the sparse text format. Blank lines and `#` comments are skipped.
pub fn parse_dataset_from<R: BufRead>(reader: R, name: impl Into<PathBuf>) -> Result<Dataset> {
    let name = name.into();
    let err = |line: usize, message: String| Error::Parse {
        path: name.clone(),
        line,
        message,
    };
    let mut rows: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut feature_dim = 0;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(lineno, format!("bad label '{label_tok}'")))?;
        if label != 1.0 && label != -1.0 {
            return Err(err(lineno, format!("label must be +1 or -1, got '{label_tok}'")));
        }
        let mut feats = Vec::new();
        let mut last = 0;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(lineno, format!("expected idx:val, got '{tok}'")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| err(lineno, format!("bad feature index '{idx}'")))?;
            if idx == 0 {
                return Err(err(lineno, "feature indices are 1-based".into()));
            }
            if idx <= last {
                return Err(err(lineno, format!("feature index {idx} not increasing")));
            }
            last = idx;
            let val: f64 = val
                .parse()
                .map_err(|_| err(lineno, format!("bad feature value '{val}'")))?;
            feats.push((idx - 1, val));
            feature_dim = feature_dim.max(idx);
        }
        rows.push((label, feats));
    }
    let examples = rows
        .into_iter()
        .map(|(label, feats)| {
            Ok(Example {
                features: Point::sparse(feature_dim, feats)?,
                label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(examples, feature_dim)
}
