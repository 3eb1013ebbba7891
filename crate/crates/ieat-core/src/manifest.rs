//! Stimulus manifest: category → exemplar → image ids, with collection metadata.

use core::fmt;
use core::str::FromStr;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::association::dot;
use crate::embedding::{CategorySet, EmbeddingTable};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Role {
    Target,
    Attribute,
    #[default]
    Unspecified,
}

/// One verbal stimulus and the images collected for it.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExemplarEntry {
    pub verbal_stimulus: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub search_terms: Vec<String>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub image_ids: Vec<String>,
    /// Set for words too abstract to picture; such exemplars carry no images.
    #[cfg_attr(feature = "serde", serde(default))]
    pub unvisualizable: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CategoryEntry {
    pub name: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub role: Role,
    pub exemplars: Vec<ExemplarEntry>,
}

impl CategoryEntry {
    pub fn image_count(&self) -> usize {
        self.exemplars.iter().map(|e| e.image_ids.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StimulusManifest {
    pub categories: Vec<CategoryEntry>,
}

impl StimulusManifest {
    pub fn new(categories: Vec<CategoryEntry>) -> Result<Self> {
        let manifest = Self { categories };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for cat in &self.categories {
            if cat.name.trim().is_empty() {
                return Err(Error::InvalidManifest("category with empty name".into()));
            }
            if !names.insert(cat.name.as_str()) {
                return Err(Error::DuplicateCategory(cat.name.clone()));
            }
            if cat.exemplars.is_empty() || cat.image_count() == 0 {
                return Err(Error::EmptyCategory(cat.name.clone()));
            }
            for ex in &cat.exemplars {
                let label = || format!("category `{}`, exemplar `{}`", cat.name, ex.verbal_stimulus);
                if ex.verbal_stimulus.trim().is_empty() {
                    return Err(Error::InvalidManifest(format!(
                        "category `{}` has an exemplar without a verbal stimulus",
                        cat.name
                    )));
                }
                if ex.image_ids.iter().any(|id| id.is_empty()) {
                    return Err(Error::InvalidManifest(format!("{}: empty image id", label())));
                }
                match (ex.image_ids.is_empty(), ex.unvisualizable) {
                    (true, false) => {
                        return Err(Error::InvalidManifest(format!(
                            "{}: no image ids and not flagged unvisualizable",
                            label()
                        )))
                    }
                    (false, true) => {
                        return Err(Error::InvalidManifest(format!(
                            "{}: flagged unvisualizable but lists image ids",
                            label()
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn category(&self, name: &str) -> Option<&CategoryEntry> {
        self.categories.iter().find(|c| c.name == name)
    }
}

/// How the images of a category become set elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Pooling {
    /// Every image is an element.
    #[default]
    PerImage,
    /// Each exemplar contributes the unit-normalized mean of its images.
    PerExemplarMean,
}

impl Pooling {
    pub fn as_str(self) -> &'static str {
        match self {
            Pooling::PerImage => "per-image",
            Pooling::PerExemplarMean => "per-exemplar-mean",
        }
    }
}

impl fmt::Display for Pooling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pooling {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "per-image" => Ok(Pooling::PerImage),
            "per-exemplar-mean" => Ok(Pooling::PerExemplarMean),
            other => Err(format!("unknown pooling `{other}`")),
        }
    }
}

/// Looks up a category's images in `table` and builds its vector set.
pub fn resolve_category(
    manifest: &StimulusManifest,
    table: &EmbeddingTable,
    name: &str,
    pooling: Pooling,
) -> Result<CategorySet> {
    let entry = manifest
        .category(name)
        .ok_or_else(|| Error::UnknownCategory(name.into()))?;

    let missing: Vec<String> = entry
        .exemplars
        .iter()
        .flat_map(|e| &e.image_ids)
        .filter(|id| !table.contains(id))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingImages {
            category: name.into(),
            ids: missing,
        });
    }

    let lookup = |id: &String| table.get(id).expect("checked above");
    let vectors: Vec<Vec<f64>> = match pooling {
        Pooling::PerImage => entry
            .exemplars
            .iter()
            .flat_map(|e| &e.image_ids)
            .map(|id| lookup(id).to_vec())
            .collect(),
        Pooling::PerExemplarMean => {
            let mut out = Vec::new();
            for ex in entry.exemplars.iter().filter(|e| !e.image_ids.is_empty()) {
                let mut mean = alloc::vec![0.0; table.dimension()];
                for id in &ex.image_ids {
                    for (m, v) in mean.iter_mut().zip(lookup(id)) {
                        *m += v;
                    }
                }
                let count = ex.image_ids.len() as f64;
                mean.iter_mut().for_each(|m| *m /= count);
                let norm = libm::sqrt(dot(&mean, &mean));
                if norm == 0.0 {
                    return Err(Error::DegeneratePooledVector {
                        category: name.into(),
                        exemplar: ex.verbal_stimulus.clone(),
                    });
                }
                mean.iter_mut().for_each(|m| *m /= norm);
                out.push(mean);
            }
            out
        }
    };
    CategorySet::new(name, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbeddingRecord;
    use alloc::string::ToString;
    use alloc::vec;

    fn exemplar(word: &str, ids: &[&str]) -> ExemplarEntry {
        ExemplarEntry {
            verbal_stimulus: word.into(),
            search_terms: vec![word.into()],
            image_ids: ids.iter().map(|s| s.to_string()).collect(),
            unvisualizable: false,
        }
    }

    fn category(name: &str, exemplars: Vec<ExemplarEntry>) -> CategoryEntry {
        CategoryEntry {
            name: name.into(),
            role: Role::Target,
            exemplars,
        }
    }

    #[test]
    fn single_category_manifest() {
        let m = StimulusManifest::new(vec![category(
            "Flower",
            vec![exemplar("orchid", &["f1", "f2", "f3", "f4", "f5"])],
        )])
        .unwrap();
        assert_eq!(m.categories.len(), 1);
        assert_eq!(m.category("Flower").unwrap().image_count(), 5);
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = StimulusManifest::new(vec![
            category("Male", vec![exemplar("man", &["m1"])]),
            category("Male", vec![exemplar("boy", &["m2"])]),
        ])
        .unwrap_err();
        assert_eq!(err, Error::DuplicateCategory("Male".into()));
    }

    #[test]
    fn imageless_exemplar_needs_flag() {
        let bad = StimulusManifest::new(vec![category(
            "Pleasant",
            vec![exemplar("joy", &[]), exemplar("rainbow", &["r1"])],
        )]);
        assert!(matches!(bad, Err(Error::InvalidManifest(_))));

        let mut flagged = exemplar("joy", &[]);
        flagged.unvisualizable = true;
        let ok = StimulusManifest::new(vec![category(
            "Pleasant",
            vec![flagged, exemplar("rainbow", &["r1"])],
        )]);
        assert!(ok.is_ok());
    }

    #[test]
    fn empty_category_rejected() {
        let err = StimulusManifest::new(vec![category("Empty", vec![])]).unwrap_err();
        assert_eq!(err, Error::EmptyCategory("Empty".into()));
    }

    fn table(rows: &[(&str, &[f64])]) -> EmbeddingTable {
        EmbeddingTable::from_records(
            rows.iter()
                .map(|(id, v)| EmbeddingRecord::new(*id, v.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn per_image_counts_every_image() {
        let ids: Vec<String> = (0..35).map(|i| format!("f{i}")).collect();
        let exemplars = ids
            .chunks(5)
            .enumerate()
            .map(|(k, chunk)| ExemplarEntry {
                verbal_stimulus: format!("flower{k}"),
                image_ids: chunk.to_vec(),
                ..Default::default()
            })
            .collect();
        let m = StimulusManifest::new(vec![category("Flower", exemplars)]).unwrap();
        let t = EmbeddingTable::from_records(
            ids.iter()
                .enumerate()
                .map(|(i, id)| EmbeddingRecord::new(id.clone(), vec![1.0, i as f64]))
                .collect(),
        )
        .unwrap();
        let set = resolve_category(&m, &t, "Flower", Pooling::PerImage).unwrap();
        assert_eq!(set.size(), 35);
        let pooled = resolve_category(&m, &t, "Flower", Pooling::PerExemplarMean).unwrap();
        assert_eq!(pooled.size(), 7);
    }

    #[test]
    fn single_image_same_under_both_poolings() {
        let m = StimulusManifest::new(vec![category("C", vec![exemplar("w", &["a"])])]).unwrap();
        let t = table(&[("a", &[0.6, 0.8])]);
        let a = resolve_category(&m, &t, "C", Pooling::PerImage).unwrap();
        let b = resolve_category(&m, &t, "C", Pooling::PerExemplarMean).unwrap();
        assert_eq!(a.vectors(), b.vectors());
    }

    #[test]
    fn opposite_vectors_pool_to_zero() {
        let m = StimulusManifest::new(vec![category("C", vec![exemplar("w", &["a", "b"])])]).unwrap();
        let t = table(&[("a", &[1.0, 0.0]), ("b", &[-1.0, 0.0])]);
        let err = resolve_category(&m, &t, "C", Pooling::PerExemplarMean).unwrap_err();
        assert!(matches!(err, Error::DegeneratePooledVector { .. }));
    }

    #[test]
    fn resolution_errors() {
        let m = StimulusManifest::new(vec![category("C", vec![exemplar("w", &["a", "x", "y"])])])
            .unwrap();
        let t = table(&[("a", &[1.0, 0.0])]);
        assert_eq!(
            resolve_category(&m, &t, "D", Pooling::PerImage).unwrap_err(),
            Error::UnknownCategory("D".into())
        );
        assert_eq!(
            resolve_category(&m, &t, "C", Pooling::PerImage).unwrap_err(),
            Error::MissingImages {
                category: "C".into(),
                ids: vec!["x".into(), "y".into()]
            }
        );
    }
}
