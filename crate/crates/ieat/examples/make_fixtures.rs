//! Regenerates the shipped fixtures under `fixtures/`.
//!
//! ```text
//! cargo run -p ieat --example make_fixtures
//! ```
//!
//! `synthetic/` covers every category named by the batteries in `data/`;
//! `null/` is an i.i.d. standard-normal pool for false-positive calibration.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ieat::ieat_core::{
    CategoryEntry, EmbeddingRecord, EmbeddingTable, ExemplarEntry, Role, StimulusManifest,
};
use ieat::{load_battery, write_embeddings, EmbeddingFormat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const SYNTHETIC_DIM: usize = 12;
const NULL_DIM: usize = 64;
const IMAGES_PER_EXEMPLAR: usize = 3;

fn slug(name: &str) -> String {
    name.chars()
        .filter_map(|c| match c {
            c if c.is_ascii_alphanumeric() => Some(c.to_ascii_lowercase()),
            ' ' | '-' | '.' => Some('-'),
            _ => None,
        })
        .collect::<String>()
        .split('-')
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("-")
}

fn normal(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

/// Builds one category of `size` images split into exemplars of at most
/// three, drawing each vector from `draw`.
fn category(
    name: &str,
    role: Role,
    size: usize,
    records: &mut Vec<EmbeddingRecord>,
    mut draw: impl FnMut() -> Vec<f64>,
) -> CategoryEntry {
    let base = slug(name);
    let exemplars = (0..size.div_ceil(IMAGES_PER_EXEMPLAR))
        .map(|e| {
            let stimulus = format!("{base}-{}", e + 1);
            let count = IMAGES_PER_EXEMPLAR.min(size - e * IMAGES_PER_EXEMPLAR);
            let image_ids = (0..count)
                .map(|i| {
                    let id = format!("{stimulus}-{}.png", i + 1);
                    records.push(EmbeddingRecord::new(id.clone(), draw()));
                    id
                })
                .collect();
            ExemplarEntry {
                search_terms: vec![format!("{name} {}", e + 1)],
                verbal_stimulus: stimulus,
                image_ids,
                unvisualizable: false,
            }
        })
        .collect();
    CategoryEntry {
        name: name.into(),
        role,
        exemplars,
    }
}

fn target_size(name: &str) -> usize {
    match name {
        "Male" | "Female" | "White" | "Black" => 10,
        _ => 6,
    }
}

fn synthetic(data: &Path, out: &Path) {
    let mut roles: BTreeMap<String, Role> = BTreeMap::new();
    for file in ["replication.battery", "intersectional.battery", "logit.battery"] {
        let battery = load_battery(&data.join(file)).expect("shipped battery loads");
        for spec in &battery.tests {
            let [x, y, a, b] = spec.categories();
            for t in [x, y] {
                roles.insert(t.into(), Role::Target);
            }
            for t in [a, b] {
                roles.insert(t.into(), Role::Attribute);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(20200101);
    let mut records = Vec::new();
    let mut categories = Vec::new();
    for (name, role) in &roles {
        let size = match role {
            Role::Attribute => 8,
            _ => target_size(name),
        };
        let centre = normal(&mut rng, SYNTHETIC_DIM);
        let entry = category(name, *role, size, &mut records, || {
            let noise = normal(&mut rng, SYNTHETIC_DIM);
            centre.iter().zip(noise).map(|(c, n)| c + 1.5 * n).collect()
        });
        categories.push(entry);
    }
    let manifest = StimulusManifest::new(categories).expect("valid manifest");
    let table = EmbeddingTable::from_records(records).expect("valid table");
    fs::create_dir_all(out).unwrap();
    write_embeddings(&out.join("embeddings.csv"), &table, EmbeddingFormat::Csv).unwrap();
    ieat::config::write_manifest(&out.join("manifest.json"), &manifest).unwrap();
}

fn null(out: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let mut records = Vec::new();
    let categories = [("X", Role::Target, 10), ("Y", Role::Target, 10), ("A", Role::Attribute, 20), ("B", Role::Attribute, 20)]
        .into_iter()
        .map(|(name, role, size)| category(name, role, size, &mut records, || normal(&mut rng, NULL_DIM)))
        .collect();
    let manifest = StimulusManifest::new(categories).expect("valid manifest");
    let table = EmbeddingTable::from_records(records).expect("valid table");
    fs::create_dir_all(out).unwrap();
    write_embeddings(&out.join("embeddings.bin"), &table, EmbeddingFormat::PackedBinary).unwrap();
    ieat::config::write_manifest(&out.join("manifest.json"), &manifest).unwrap();
    fs::write(
        out.join("null.battery"),
        "name = \"null\"\n\n[[tests]]\nname = \"Null\"\nx_category = \"X\"\ny_category = \"Y\"\na_category = \"A\"\nb_category = \"B\"\n",
    )
    .unwrap();
}

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    synthetic(&root.join("data"), &root.join("fixtures/synthetic"));
    null(&root.join("fixtures/null"));
    println!("fixtures written to {}", root.join("fixtures").display());
}
