//! Acceptance gate. Each criterion is its own test and writes one
//! `PASS`/`FAIL` line straight to stderr, so the lines show up even when the
//! harness captures output.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use ieat::ieat_core::permutation::for_each_partition;
use ieat::ieat_core::{
    effect_size, exact_p_value, monte_carlo_p_value, resolve_category, select_valence_words,
    test_statistic, CategorySet, Magnitude, Pooling, RunOptions, TiePolicy,
};
use ieat::{load_battery, load_embeddings, load_manifest, load_norms, EmbeddingFormat, Parallel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn report(id: u32, title: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let line = format!("acceptance {id} {verdict}: {title}: {detail}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {id} failed: {detail}");
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn normal_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

fn set(name: &str, rng: &mut ChaCha8Rng, size: usize, dim: usize) -> CategorySet {
    CategorySet::new(name, (0..size).map(|_| normal_vec(rng, dim)).collect()).unwrap()
}

struct Instance {
    x: CategorySet,
    y: CategorySet,
    a: CategorySet,
    b: CategorySet,
}

impl Instance {
    fn random(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Self {
        let na = rng.random_range(1..=5);
        let nb = rng.random_range(1..=5);
        Self {
            x: set("X", rng, n, dim),
            y: set("Y", rng, n, dim),
            a: set("A", rng, na, dim),
            b: set("B", rng, nb, dim),
        }
    }

    fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let m = |s: &CategorySet| {
            CategorySet::new(s.name(), s.vectors().iter().map(|v| f(v)).collect()).unwrap()
        };
        Self {
            x: m(&self.x),
            y: m(&self.y),
            a: m(&self.a),
            b: m(&self.b),
        }
    }
}

// Reference arithmetic, written out from the definitions without touching
// the engine: cosine, s(w, A, B), and the statistic of a labelling.

fn naive_cos(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}

fn naive_s(w: &[f64], a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let ma = a.iter().map(|v| naive_cos(w, v)).sum::<f64>() / a.len() as f64;
    let mb = b.iter().map(|v| naive_cos(w, v)).sum::<f64>() / b.len() as f64;
    ma - mb
}

/// Statistic when the elements whose bit is set in `mask` are labelled X.
fn naive_statistic(elements: &[Vec<f64>], mask: u32, a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut xs = 0.0;
    let mut ys = 0.0;
    for (i, w) in elements.iter().enumerate() {
        if mask & (1 << i) != 0 {
            xs += naive_s(w, a, b);
        } else {
            ys += naive_s(w, a, b);
        }
    }
    xs - ys
}

#[test]
fn criterion_1_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut mismatches = Vec::new();
    let mut partitions = 0u64;
    for case in 0..500 {
        let n = rng.random_range(1..=6);
        let dim = rng.random_range(1..=8);
        let inst = Instance::random(&mut rng, n, dim);
        let (_, profile) = test_statistic(&inst.x, &inst.y, &inst.a, &inst.b).unwrap();
        let elements: Vec<Vec<f64>> = inst.x.vectors().iter().chain(inst.y.vectors()).cloned().collect();
        let (a, b) = (inst.a.vectors(), inst.b.vectors());

        let observed = naive_statistic(&elements, (1 << n) - 1, a, b);
        let max_abs = elements
            .iter()
            .map(|w| naive_s(w, a, b).abs())
            .fold(0.0, f64::max);
        let tolerance = 1e-12 * max_abs * (2 * n) as f64;
        let (mut greater, mut ties) = (0u64, 0u64);
        for mask in 0u32..(1 << (2 * n)) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let stat = naive_statistic(&elements, mask, a, b);
            if stat > observed + tolerance {
                greater += 1;
            } else if (stat - observed).abs() <= tolerance {
                ties += 1;
            }
        }

        let mut visited = 0u64;
        let total = (1..=n as u64).fold(1u64, |acc, k| acc * (n as u64 + k) / k);
        for_each_partition(&profile, 0..total, |chosen, stat| {
            let mask = chosen.iter().fold(0u32, |m, &i| m | (1 << i));
            let err = (stat - naive_statistic(&elements, mask, a, b)).abs();
            worst = worst.max(err);
            visited += 1;
        });
        partitions += visited;

        let p = exact_p_value(&profile, TiePolicy::Strict, u64::MAX).unwrap();
        if (p.greater_count, p.tie_count, visited) != (greater, ties, total) {
            mismatches.push(format!(
                "case {case}: engine {}/{} oracle {greater}/{ties}",
                p.greater_count, p.tie_count
            ));
        }
    }
    let elapsed = started.elapsed();
    let ok = mismatches.is_empty() && worst <= 1e-12 && elapsed < Duration::from_secs(5);
    report(
        1,
        "exact engine matches brute force",
        ok,
        &format!(
            "500 instances, {partitions} partitions, max |stat diff| {worst:.2e}, count mismatches {:?}, {:.2}s",
            mismatches,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_separated_fixture() {
    let e1 = vec![1.0, 0.0];
    let e2 = vec![0.0, 1.0];
    let x = CategorySet::new("X", vec![e1.clone(), e1.clone()]).unwrap();
    let y = CategorySet::new("Y", vec![e2.clone(), e2.clone()]).unwrap();
    let a = CategorySet::new("A", vec![e1]).unwrap();
    let b = CategorySet::new("B", vec![e2]).unwrap();
    let (_, profile) = test_statistic(&x, &y, &a, &b).unwrap();
    let d = effect_size(&profile).unwrap();
    let strict = exact_p_value(&profile, TiePolicy::Strict, 100).unwrap();
    let inclusive = exact_p_value(&profile, TiePolicy::Inclusive, 100).unwrap();
    let frac = |p: &ieat::ieat_core::PValueResult| (p.numerator(), p.denominator());
    // sqrt(3), printed to eight figures as 1.7320508
    let ok = (d - 3f64.sqrt()).abs() <= 1e-9
        && frac(&strict) == (0, 6)
        && strict.p == 0.0
        && frac(&inclusive) == (1, 6)
        && (inclusive.p - 1.0 / 6.0).abs() < 1e-15;
    report(
        2,
        "separated 2+2 fixture",
        ok,
        &format!(
            "d = {d:.10}, strict p = {}/{}, inclusive p = {}/{}",
            strict.numerator(),
            strict.denominator(),
            inclusive.numerator(),
            inclusive.denominator()
        ),
    );
}

#[test]
fn criterion_3_monte_carlo_consistency() {
    const S: u64 = 100_000;
    let mut failures = Vec::new();
    let mut worst_ratio = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let (profile, exact) = loop {
            let inst = Instance::random(&mut rng, 7, 6);
            let (_, profile) = test_statistic(&inst.x, &inst.y, &inst.a, &inst.b).unwrap();
            let exact = exact_p_value(&profile, TiePolicy::Strict, u64::MAX).unwrap();
            if (0.05..=0.5).contains(&exact.p) {
                break (profile, exact.p);
            }
        };
        let mc = monte_carlo_p_value(&profile, S, seed, TiePolicy::Strict).unwrap();
        let bound = 3.0 * (exact * (1.0 - exact) / S as f64).sqrt();
        let gap = (mc.p - exact).abs();
        worst_ratio = worst_ratio.max(gap / bound);
        if gap > bound {
            failures.push(format!("seed {seed}: exact {exact:.5} mc {:.5}", mc.p));
        }
    }
    report(
        3,
        "Monte-Carlo agrees with exact p",
        failures.is_empty(),
        &format!(
            "{}/20 seeds within 3 sigma, worst |gap|/bound {worst_ratio:.3} {:?}",
            20 - failures.len(),
            failures
        ),
    );
}

#[test]
fn criterion_4_specificity_calibration() {
    let started = Instant::now();
    let dir = crate_dir().join("fixtures/null");
    let table = load_embeddings(&dir.join("embeddings.bin"), EmbeddingFormat::PackedBinary).unwrap();
    let manifest = load_manifest(&dir.join("manifest.json")).unwrap();
    let battery = load_battery(&dir.join("null.battery")).unwrap();
    let spec = &battery.tests[0];
    let mut pool = Vec::new();
    let mut sizes = [0; 4];
    for (size, name) in sizes.iter_mut().zip(spec.categories()) {
        let s = resolve_category(&manifest, &table, name, Pooling::PerImage).unwrap();
        *size = s.size();
        pool.extend_from_slice(s.vectors());
    }
    let report_ = Parallel::new(0)
        .unwrap()
        .specificity_eval(&pool, sizes, 1000, &[0.1, 0.01], 7, &RunOptions::default())
        .unwrap();
    let elapsed = started.elapsed();
    let fpr10 = report_.thresholds[0].1;
    let fpr01 = report_.thresholds[1].1;
    let ok = table.dimension() == 64
        && sizes == [10, 10, 20, 20]
        && (0.07..=0.13).contains(&fpr10)
        && (0.002..=0.02).contains(&fpr01)
        && elapsed < Duration::from_secs(120);
    report(
        4,
        "specificity on an i.i.d. normal null pool",
        ok,
        &format!(
            "D = {}, sizes {sizes:?}, 1000 trials, seed 7: FPR(0.1) = {fpr10:.3}, FPR(0.01) = {fpr01:.3}, {:.1}s",
            table.dimension(),
            elapsed.as_secs_f64()
        ),
    );
}

/// Random orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
fn random_orthogonal(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = normal_vec(rng, dim);
        for _ in 0..2 {
            for q in &basis {
                let proj: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= proj * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    basis
}

#[test]
fn criterion_5_invariance_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut problems = Vec::new();
    let (mut rot_worst, mut scale_worst) = (0.0f64, 0.0f64);
    for case in 0..50 {
        let n = rng.random_range(2..=6);
        let dim = rng.random_range(2..=8);
        let inst = Instance::random(&mut rng, n, dim);
        let eval = |i: &Instance| {
            let (_, profile) = test_statistic(&i.x, &i.y, &i.a, &i.b).unwrap();
            let d = effect_size(&profile).unwrap();
            let p = exact_p_value(&profile, TiePolicy::Strict, u64::MAX).unwrap();
            (d, p)
        };
        let (d, p) = eval(&inst);

        let q = random_orthogonal(&mut rng, dim);
        let (d_rot, p_rot) = eval(&inst.map(|v| q.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()));
        rot_worst = rot_worst.max((d - d_rot).abs());
        if (d - d_rot).abs() > 1e-9 || p_rot.p != p.p {
            problems.push(format!("case {case}: rotation changed d or p"));
        }

        let scales: Vec<f64> = (0..64).map(|_| 10f64.powf(rng.random_range(-3.0..3.0))).collect();
        let counter = std::cell::Cell::new(0usize);
        let scaled = inst.map(|v| {
            let c = scales[counter.get() % scales.len()];
            counter.set(counter.get() + 1);
            v.iter().map(|a| a * c).collect()
        });
        let (d_scaled, p_scaled) = eval(&scaled);
        scale_worst = scale_worst.max((d - d_scaled).abs());
        if (d - d_scaled).abs() > 1e-12 || p_scaled.p != p.p {
            problems.push(format!("case {case}: scaling changed d or p"));
        }

        let swapped_xy = Instance {
            x: inst.y.clone(),
            y: inst.x.clone(),
            a: inst.a.clone(),
            b: inst.b.clone(),
        };
        let swapped_ab = Instance {
            x: inst.x.clone(),
            y: inst.y.clone(),
            a: inst.b.clone(),
            b: inst.a.clone(),
        };
        for (label, swapped) in [("X<->Y", swapped_xy), ("A<->B", swapped_ab)] {
            let (d_s, p_s) = eval(&swapped);
            if d_s != -d || p_s.greater_count != p.less_count() || p_s.less_count() != p.greater_count {
                problems.push(format!("case {case}: {label} not antisymmetric"));
            }
        }
    }
    report(
        5,
        "rotation, scaling and swap invariances",
        problems.is_empty(),
        &format!(
            "50 instances, max |dd| rotation {rot_worst:.1e}, scaling {scale_worst:.1e}, problems {problems:?}"
        ),
    );
}

/// Effect sizes and their published magnitude shading: `None` marks a
/// negative value left unshaded.
const PUBLISHED_EFFECT_SIZES: &[(&str, f64, Option<Magnitude>)] = {
    use Magnitude as M;
    &[
        ("Age / iGPT", 0.42, Some(M::Small)),
        ("Age / SimCLR", 0.59, Some(M::Medium)),
        ("Arab-Muslim / iGPT", 0.86, Some(M::Large)),
        ("Arab-Muslim / SimCLR", 1.06, Some(M::Large)),
        ("Asian / iGPT", 0.25, Some(M::Small)),
        ("Asian / SimCLR", 0.47, Some(M::Small)),
        ("Disability / iGPT", -0.02, None),
        ("Disability / SimCLR", 0.38, Some(M::Small)),
        ("Gender-Career / iGPT", 0.62, Some(M::Medium)),
        ("Gender-Career / SimCLR", 0.74, Some(M::Medium)),
        ("Gender-Science / iGPT", 0.44, Some(M::Small)),
        ("Gender-Science / SimCLR", -0.10, None),
        ("Insect-Flower / iGPT", 0.34, Some(M::Small)),
        ("Insect-Flower / SimCLR", 1.69, Some(M::Large)),
        ("Native / iGPT", -0.33, None),
        ("Native / SimCLR", -0.19, None),
        ("Race / iGPT", -0.62, None),
        ("Race / SimCLR", -0.57, None),
        ("Religion / iGPT", 0.37, Some(M::Small)),
        ("Religion / SimCLR", 0.36, Some(M::Small)),
        ("Sexuality / iGPT", -0.03, None),
        ("Sexuality / SimCLR", 0.04, Some(M::None)),
        ("Skin-Tone / iGPT", 1.26, Some(M::Large)),
        ("Skin-Tone / SimCLR", -0.19, None),
        ("Weapon / iGPT", 0.86, Some(M::Large)),
        ("Weapon / SimCLR", 1.38, Some(M::Large)),
        ("Weapon (Modern) / iGPT", 0.88, Some(M::Large)),
        ("Weapon (Modern) / SimCLR", 1.28, Some(M::Large)),
        ("Weight / iGPT", 1.67, Some(M::Large)),
        ("Weight / SimCLR", -0.30, None),
        ("Age / IAT", 1.23, Some(M::Large)),
        ("Arab-Muslim / IAT", 0.33, Some(M::Small)),
        ("Asian / IAT", 0.62, Some(M::Medium)),
        ("Disability / IAT", 1.05, Some(M::Large)),
        ("Gender-Career / IAT", 1.1, Some(M::Large)),
        ("Gender-Science / IAT", 0.93, Some(M::Large)),
        ("Insect-Flower / IAT", 1.35, Some(M::Large)),
        ("Native / IAT", 0.46, Some(M::Small)),
        ("Race / IAT", 0.86, Some(M::Large)),
        ("Religion / IAT", -0.34, None),
        ("Sexuality / IAT", 0.74, Some(M::Medium)),
        ("Skin-Tone / IAT", 0.73, Some(M::Medium)),
        ("Weapon / IAT", 1.0, Some(M::Large)),
        ("Weight / IAT", 1.83, Some(M::Large)),
    ]
};

fn expected_class(abs_d: f64) -> Magnitude {
    if abs_d >= 0.8 {
        Magnitude::Large
    } else if abs_d >= 0.5 {
        Magnitude::Medium
    } else if abs_d >= 0.2 {
        Magnitude::Small
    } else {
        Magnitude::None
    }
}

#[test]
fn criterion_6_magnitude_classes() {
    let mut problems = Vec::new();
    let mut shaded = 0;
    for &(label, d, shading) in PUBLISHED_EFFECT_SIZES {
        let class = Magnitude::classify(d);
        if class != Magnitude::classify(-d) || class != expected_class(d.abs()) {
            problems.push(format!("{label}: {d} classified {class}"));
        }
        if let Some(colour) = shading {
            shaded += 1;
            if class != colour {
                problems.push(format!("{label}: {d} classified {class}, published {colour}"));
            }
        }
    }
    let boundaries = [0.19, 0.2, 0.79, 0.8].map(Magnitude::classify);
    if boundaries != [Magnitude::None, Magnitude::Small, Magnitude::Medium, Magnitude::Large] {
        problems.push(format!("boundaries 0.19/0.2/0.79/0.8 -> {boundaries:?}"));
    }
    report(
        6,
        "magnitude classes match published shading",
        problems.is_empty(),
        &format!(
            "{} values ({shaded} shaded) and 4 boundary cases, problems {problems:?}",
            PUBLISHED_EFFECT_SIZES.len()
        ),
    );
}

#[derive(serde::Deserialize)]
struct ExpectedValence {
    k: usize,
    imagery_min: Option<f64>,
    positive: Vec<String>,
    negative: Vec<String>,
}

#[test]
fn criterion_7_valence_words() {
    let config_path = crate_dir().join("data/valence_expected.toml");
    let expected: ExpectedValence =
        toml::from_str(&std::fs::read_to_string(&config_path).unwrap()).unwrap();
    let norms_path = std::env::var_os("IEAT_VALENCE_NORMS").map(PathBuf::from);
    let (ok, detail) = match (&norms_path, expected.imagery_min) {
        (None, _) => (
            false,
            "rated norms table not available (set IEAT_VALENCE_NORMS to a word,valence,imagery CSV)".to_string(),
        ),
        (Some(_), None) => (
            false,
            "no imagery threshold recorded in data/valence_expected.toml; the published selection cannot be re-derived without it".to_string(),
        ),
        (Some(path), Some(imagery_min)) => {
            let norms = load_norms(Path::new(path)).unwrap();
            match select_valence_words(&norms, expected.k, imagery_min) {
                Ok(sel) => (
                    sel.positive == expected.positive && sel.negative == expected.negative,
                    format!("selected {:?} / {:?}", sel.positive, sel.negative),
                ),
                Err(e) => (false, e.to_string()),
            }
        }
    };
    report(7, "valence selection reproduces the published word lists", ok, &detail);
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_ieat")).args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn criterion_8_cli_determinism() {
    let dir = crate_dir();
    let synthetic = dir.join("fixtures/synthetic");
    let emb = synthetic.join("embeddings.csv");
    let man = synthetic.join("manifest.json");
    let mut checks = Vec::new();
    for battery in ["replication.battery", "intersectional.battery"] {
        let bat = dir.join("data").join(battery);
        for exact_limit in ["10000000", "100"] {
            let base = [
                "run",
                "--embeddings",
                emb.to_str().unwrap(),
                "--manifest",
                man.to_str().unwrap(),
                "--battery",
                bat.to_str().unwrap(),
                "--out-format",
                "csv",
                "--mc-samples",
                "20000",
                "--exact-limit",
                exact_limit,
            ];
            let with_threads = |t: &str| {
                let mut args = base.to_vec();
                args.extend(["--threads", t]);
                run_cli(&args)
            };
            let first = run_cli(&base);
            let second = run_cli(&base);
            let one = with_threads("1");
            let eight = with_threads("8");
            checks.push((
                format!("{battery} exact-limit {exact_limit}"),
                first == second && one == eight && first == one,
                first.iter().filter(|&&c| c == b'\n').count(),
            ));
        }
    }
    let ok = checks.iter().all(|c| c.1);
    let detail: Vec<String> = checks
        .iter()
        .map(|(label, same, lines)| format!("{label}: {lines} lines {}", if *same { "identical" } else { "DIFFER" }))
        .collect();
    report(8, "ieat run is byte-identical across runs and thread counts", ok, &detail.join("; "));
}
