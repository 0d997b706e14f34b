//! Pre-trained word vectors in the plain text interchange format: one token
//! per line, followed by its space-separated components. Profiles embed as
//! the mean vector of their in-vocabulary tokens.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::encoder::tokenize;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalVectors {
    dim: usize,
    map: BTreeMap<String, Vec<f64>>,
}

impl ExternalVectors {
    pub fn new(map: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        let dim = map.values().next().map_or(0, Vec::len);
        if map.values().any(|v| v.len() != dim) {
            return Err(Error::config("vectors", "inconsistent vector dimensions"));
        }
        Ok(ExternalVectors { dim, map })
    }

    /// Load a plain text vector file. Tokens are stored lowercased; on
    /// duplicates the last line wins.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
        let mut map = BTreeMap::new();
        let mut dim: Option<usize> = None;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let token = parts
                .next()
                .ok_or_else(|| Error::format(path, format!("line {}: empty", lineno + 1)))?
                .to_lowercase();
            let values: Vec<f64> = parts
                .map(|p| {
                    p.parse::<f64>().map_err(|e| {
                        Error::format(path, format!("line {}: {e}", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            match dim {
                None => dim = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(Error::format(
                        path,
                        format!("line {}: expected {d} components, got {}", lineno + 1, values.len()),
                    ));
                }
                Some(_) => {}
            }
            map.insert(token, values);
        }
        Ok(ExternalVectors {
            dim: dim.unwrap_or(0),
            map,
        })
    }

    /// Write in the same format, one token per line in sorted order.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        for (token, values) in &self.map {
            write!(out, "{token}").map_err(|e| Error::io(path, e))?;
            for v in values {
                write!(out, " {v}").map_err(|e| Error::io(path, e))?;
            }
            writeln!(out).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.map.get(token).map(Vec::as_slice)
    }
}

/// Mean of the vectors of in-vocabulary lowercased tokens. Profiles that are
/// empty or entirely out-of-vocabulary embed to the zero vector.
pub fn avg_embedding(profile: &str, vectors: &ExternalVectors) -> Vec<f64> {
    let mut sum = vec![0.0; vectors.dim()];
    let mut n = 0usize;
    for token in tokenize(profile) {
        if let Some(v) = vectors.get(&token) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            n += 1;
        }
    }
    if n > 0 {
        for s in &mut sum {
            *s /= n as f64;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ExternalVectors {
        let mut map = BTreeMap::new();
        map.insert("alpha".to_owned(), vec![1.0, 0.0]);
        map.insert("beta".to_owned(), vec![0.0, 1.0]);
        ExternalVectors::new(map).unwrap()
    }

    #[test]
    fn single_in_vocab_token_is_its_own_mean() {
        assert_eq!(avg_embedding("Alpha!", &toy()), vec![1.0, 0.0]);
    }

    #[test]
    fn all_oov_profile_gives_zero_vector() {
        assert_eq!(avg_embedding("gamma delta", &toy()), vec![0.0, 0.0]);
        assert_eq!(avg_embedding("", &toy()), vec![0.0, 0.0]);
    }

    #[test]
    fn two_tokens_average() {
        assert_eq!(avg_embedding("alpha beta", &toy()), vec![0.5, 0.5]);
    }

    #[test]
    fn file_round_trip_and_dim_check() {
        let f = tempfile::NamedTempFile::new().unwrap();
        toy().save(f.path()).unwrap();
        let loaded = ExternalVectors::load(f.path()).unwrap();
        assert_eq!(loaded, toy());
        assert_eq!(loaded.dim(), 2);
    }

    #[test]
    fn inconsistent_dims_rejected() {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), "a 1.0 2.0\nb 3.0\n").unwrap();
        assert!(ExternalVectors::load(f.path()).is_err());
    }
}
