//! Selection of high-imagery, extreme-valence words from rated norms.

use core::cmp::Ordering;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// One word with its pleasantness and imagery ratings.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValenceNormRow {
    pub word: String,
    pub valence: f64,
    pub imagery: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceSelection {
    /// Most pleasant first.
    pub positive: Vec<String>,
    /// Most unpleasant first.
    pub negative: Vec<String>,
}

/// Keeps rows with `imagery >= imagery_min`, then takes the `k` highest- and
/// `k` lowest-valence words. Ties on valence are broken by word.
pub fn select_valence_words(
    norms: &[ValenceNormRow],
    k: usize,
    imagery_min: f64,
) -> Result<ValenceSelection> {
    if norms.is_empty() {
        return Err(Error::EmptyNorms);
    }
    if k == 0 {
        return Err(Error::InvalidK);
    }
    if let Some(row) = norms
        .iter()
        .find(|r| !r.valence.is_finite() || !r.imagery.is_finite())
    {
        return Err(Error::NonFiniteNorm(row.word.clone()));
    }
    let mut pool: Vec<&ValenceNormRow> = norms.iter().filter(|r| r.imagery >= imagery_min).collect();
    if pool.len() < 2 * k {
        return Err(Error::InsufficientWords {
            available: pool.len(),
            needed: 2 * k,
        });
    }

    let by_word = |a: &&ValenceNormRow, b: &&ValenceNormRow| a.word.cmp(&b.word);
    pool.sort_by(|a, b| b.valence.total_cmp(&a.valence).then_with(|| by_word(a, b)));
    let positive: Vec<String> = pool[..k].iter().map(|r| r.word.clone()).collect();
    pool.sort_by(|a, b| match a.valence.total_cmp(&b.valence) {
        Ordering::Equal => by_word(a, b),
        other => other,
    });
    let negative: Vec<String> = pool[..k].iter().map(|r| r.word.clone()).collect();

    let pos: BTreeSet<&str> = positive.iter().map(String::as_str).collect();
    if let Some(shared) = negative.iter().find(|w| pos.contains(w.as_str())) {
        return Err(Error::ValenceOverlap(shared.clone()));
    }
    Ok(ValenceSelection { positive, negative })
}
