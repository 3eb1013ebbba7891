//! Validated embedding records, tables and category sets.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::association::dot;
use crate::{Error, Result};

/// One image's identifier and feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRecord {
    pub id: String,
    pub vector: Vec<f64>,
}

impl EmbeddingRecord {
    pub fn new(id: impl Into<String>, vector: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            vector,
        }
    }

    /// Checks the per-record invariants: non-empty, finite, nonzero norm.
    pub fn validate(&self) -> Result<()> {
        if self.vector.is_empty() {
            return Err(Error::EmptyVector(self.id.clone()));
        }
        if let Some(index) = self.vector.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                id: self.id.clone(),
                index,
            });
        }
        // Also catches vectors whose squared norm underflows to zero.
        if dot(&self.vector, &self.vector) == 0.0 {
            return Err(Error::ZeroNorm(self.id.clone()));
        }
        Ok(())
    }
}

/// An id-indexed collection of records sharing one dimension.
///
/// Iteration order is the insertion (file) order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    records: Vec<EmbeddingRecord>,
    index: BTreeMap<String, usize>,
}

impl EmbeddingTable {
    /// Builds a table, rejecting the first record that breaks an invariant.
    pub fn from_records(records: Vec<EmbeddingRecord>) -> Result<Self> {
        let dimension = match records.first() {
            Some(first) => first.vector.len(),
            None => return Err(Error::EmptyTable),
        };
        let mut index = BTreeMap::new();
        for (row, record) in records.iter().enumerate() {
            if record.id.is_empty() {
                return Err(Error::EmptyId(row));
            }
            if record.vector.len() != dimension {
                return Err(Error::DimensionMismatch {
                    id: record.id.clone(),
                    expected: dimension,
                    found: record.vector.len(),
                });
            }
            record.validate()?;
            if index.insert(record.id.clone(), row).is_some() {
                return Err(Error::DuplicateId(record.id.clone()));
            }
        }
        Ok(Self {
            dimension,
            records,
            index,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[EmbeddingRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.index.get(id).map(|&i| self.records[i].vector.as_slice())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }
}

/// A named concept realized as an ordered list of vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CategorySet {
    name: String,
    vectors: Vec<Vec<f64>>,
}

impl CategorySet {
    /// Requires at least one vector and a common dimension.
    pub fn new(name: impl Into<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let name = name.into();
        let dim = match vectors.first() {
            Some(v) => v.len(),
            None => return Err(Error::EmptyCategory(name)),
        };
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                id: name,
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Self { name, vectors })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn size(&self) -> usize {
        self.vectors.len()
    }

    pub fn dimension(&self) -> usize {
        self.vectors[0].len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rec(id: &str, v: &[f64]) -> EmbeddingRecord {
        EmbeddingRecord::new(id, v.to_vec())
    }

    #[test]
    fn minimal_table() {
        let t = EmbeddingTable::from_records(vec![rec("a", &[1.0, 0.0]), rec("b", &[0.0, 1.0])])
            .unwrap();
        assert_eq!(t.dimension(), 2);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("b"), Some(&[0.0, 1.0][..]));
    }

    #[test]
    fn dimension_mismatch_names_row() {
        let err = EmbeddingTable::from_records(vec![rec("a", &[1.0, 0.0]), rec("b", &[1.0])])
            .unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                id: "b".into(),
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn zero_norm_rejected() {
        let err = EmbeddingTable::from_records(vec![rec("a", &[0.0, 0.0])]).unwrap_err();
        assert_eq!(err, Error::ZeroNorm("a".into()));
    }

    #[test]
    fn non_finite_and_duplicates() {
        let err = EmbeddingTable::from_records(vec![rec("a", &[1.0, f64::NAN])]).unwrap_err();
        assert_eq!(err, Error::NonFinite { id: "a".into(), index: 1 });
        let err = EmbeddingTable::from_records(vec![rec("a", &[1.0]), rec("a", &[2.0])])
            .unwrap_err();
        assert_eq!(err, Error::DuplicateId("a".into()));
        assert_eq!(EmbeddingTable::from_records(vec![]).unwrap_err(), Error::EmptyTable);
    }

    #[test]
    fn category_set_requires_members() {
        assert!(CategorySet::new("X", vec![]).is_err());
        assert!(CategorySet::new("X", vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert_eq!(CategorySet::new("X", vec![vec![1.0]]).unwrap().size(), 1);
    }
}
