//! Verdicts on the three intersectional-bias hypotheses.
//!
//! Test names follow the `Family (CODE)` convention of the intersectional
//! battery. `MF`/`FM` name the gender-axis test of a family and `BW`/`WB` the
//! race-axis test. Four-letter codes compare two groups drawn from `WM`, `WF`,
//! `BM` and `BF`.
//!
//! Rules, applied per family, using only tests with `p < 0.05` as evidence:
//!
//! * intersectionality: some test whose groups differ in both race and gender
//!   has `|d|` above both the family's gender-axis and race-axis `|d|`;
//! * race: the male-male race comparison is significant while the
//!   female-female one is not, or both are and `|d_MM| > |d_FF|`;
//! * gender: the White male vs White female comparison is significant and is
//!   the largest significant same-race gender comparison.
//!
//! A hypothesis is consistent if some family is consistent, inconsistent if
//! some family is inconsistent and none is consistent, and otherwise lacks
//! significance.

use core::fmt;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::battery::TestResult;
use crate::{Error, Result};

/// Results must have `p` below this to count as evidence.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// A named effect size with its p-value.
pub trait Evidence {
    fn name(&self) -> &str;
    fn d(&self) -> f64;
    fn p(&self) -> f64;
    fn note(&self) -> Option<&str> {
        None
    }
}

impl Evidence for TestResult {
    fn name(&self) -> &str {
        &self.name
    }
    fn d(&self) -> f64 {
        self.d
    }
    fn p(&self) -> f64 {
        self.p.p
    }
}

/// An externally reported `(d, p)` pair, e.g. a published table row.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PublishedResult {
    pub name: String,
    pub d: f64,
    pub p: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub note: Option<String>,
}

impl PublishedResult {
    pub fn new(name: &str, d: f64, p: f64) -> Self {
        Self {
            name: name.into(),
            d,
            p,
            note: None,
        }
    }
}

impl Evidence for PublishedResult {
    fn name(&self) -> &str {
        &self.name
    }
    fn d(&self) -> f64 {
        self.d
    }
    fn p(&self) -> f64 {
        self.p
    }
    fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Intersectionality,
    Race,
    Gender,
}

impl Hypothesis {
    pub fn as_str(self) -> &'static str {
        match self {
            Hypothesis::Intersectionality => "intersectionality",
            Hypothesis::Race => "race",
            Hypothesis::Gender => "gender",
        }
    }

    pub fn rule(self) -> &'static str {
        match self {
            Hypothesis::Intersectionality => {
                "a race-and-gender test's |d| exceeds the max |d| of the family's gender-axis \
                 and race-axis tests, all three significant"
            }
            Hypothesis::Race => {
                "male-male race comparison significant while female-female is not, \
                 or both significant and |d_MM| > |d_FF|"
            }
            Hypothesis::Gender => {
                "White male vs White female is the largest significant same-race gender |d|"
            }
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    InsufficientSignificance,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
            Verdict::InsufficientSignificance => "insufficient-significance",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A test referenced by a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Citation {
    pub name: String,
    pub d: f64,
    pub p: f64,
    /// Whether this test's `d` entered a comparison. Insignificant tests are
    /// only ever cited for their lack of significance.
    pub compared: bool,
}

impl Citation {
    pub fn significant(&self) -> bool {
        self.p < SIGNIFICANCE_LEVEL
    }
}

/// The outcome of one rule within one test family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyFinding {
    pub family: String,
    pub verdict: Verdict,
    pub cited: Vec<Citation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisEntry {
    pub hypothesis: Hypothesis,
    pub verdict: Verdict,
    pub rule: &'static str,
    pub findings: Vec<FamilyFinding>,
}

impl HypothesisEntry {
    pub fn cited(&self) -> impl Iterator<Item = &Citation> {
        self.findings.iter().flat_map(|f| &f.cited)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub entries: Vec<HypothesisEntry>,
    /// Notes carried by any cited input.
    pub notes: Vec<String>,
}

impl HypothesisReport {
    pub fn entry(&self, hypothesis: Hypothesis) -> &HypothesisEntry {
        self.entries
            .iter()
            .find(|e| e.hypothesis == hypothesis)
            .expect("every hypothesis has an entry")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Group {
    WhiteMale,
    WhiteFemale,
    BlackMale,
    BlackFemale,
}

impl Group {
    fn parse(code: &str) -> Option<Self> {
        match code {
            "WM" => Some(Group::WhiteMale),
            "WF" => Some(Group::WhiteFemale),
            "BM" => Some(Group::BlackMale),
            "BF" => Some(Group::BlackFemale),
            _ => None,
        }
    }

    fn white(self) -> bool {
        matches!(self, Group::WhiteMale | Group::WhiteFemale)
    }

    fn male(self) -> bool {
        matches!(self, Group::WhiteMale | Group::BlackMale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Code {
    GenderAxis,
    RaceAxis,
    /// Unordered pair, stored sorted.
    Pair(Group, Group),
}

impl Code {
    fn parse(code: &str) -> Option<Self> {
        match code {
            "MF" | "FM" => Some(Code::GenderAxis),
            "BW" | "WB" => Some(Code::RaceAxis),
            _ if code.len() == 4 && code.is_ascii() => {
                let a = Group::parse(&code[..2])?;
                let b = Group::parse(&code[2..])?;
                (a != b).then(|| Code::Pair(a.min(b), a.max(b)))
            }
            _ => None,
        }
    }

    fn pair(a: Group, b: Group) -> Self {
        Code::Pair(a.min(b), a.max(b))
    }
}

fn split_name(name: &str) -> Option<(&str, Code)> {
    let open = name.rfind(" (")?;
    let inner = name[open + 2..].strip_suffix(')')?;
    Some((&name[..open], Code::parse(inner)?))
}

fn cite(e: &dyn Evidence, compared: bool) -> Citation {
    Citation {
        name: e.name().into(),
        d: e.d(),
        p: e.p(),
        compared,
    }
}

fn significant(e: &dyn Evidence) -> bool {
    e.p() < SIGNIFICANCE_LEVEL
}

type Family<'a> = BTreeMap<Code, &'a dyn Evidence>;

fn intersectionality(family: &Family) -> Option<(Verdict, Vec<Citation>)> {
    let gender = *family.get(&Code::GenderAxis)?;
    let race = *family.get(&Code::RaceAxis)?;
    let crossed: Vec<&dyn Evidence> = family
        .iter()
        .filter_map(|(code, e)| match code {
            Code::Pair(a, b) if a.white() != b.white() && a.male() != b.male() => Some(*e),
            _ => None,
        })
        .collect();
    if crossed.is_empty() {
        return None;
    }
    if !significant(gender) || !significant(race) {
        let mut cited = vec![cite(gender, false), cite(race, false)];
        cited.extend(crossed.iter().map(|e| cite(*e, false)));
        return Some((Verdict::InsufficientSignificance, cited));
    }
    let bound = gender.d().abs().max(race.d().abs());
    let mut cited = vec![cite(gender, true), cite(race, true)];
    let mut verdict = Verdict::InsufficientSignificance;
    for e in &crossed {
        if significant(*e) {
            cited.push(cite(*e, true));
            if e.d().abs() > bound {
                verdict = Verdict::Consistent;
            } else if verdict != Verdict::Consistent {
                verdict = Verdict::Inconsistent;
            }
        } else {
            cited.push(cite(*e, false));
        }
    }
    Some((verdict, cited))
}

// Shared shape of the race and gender rules: `lead` must be significant, and
// beats `other` if `other` is insignificant or has smaller |d|.
fn lead_versus(family: &Family, lead: Code, other: Code) -> Option<(Verdict, Vec<Citation>)> {
    let lead = *family.get(&lead)?;
    let other = *family.get(&other)?;
    if !significant(lead) {
        return Some((
            Verdict::InsufficientSignificance,
            vec![cite(lead, false), cite(other, false)],
        ));
    }
    if !significant(other) {
        return Some((Verdict::Consistent, vec![cite(lead, false), cite(other, false)]));
    }
    let verdict = if lead.d().abs() > other.d().abs() {
        Verdict::Consistent
    } else {
        Verdict::Inconsistent
    };
    Some((verdict, vec![cite(lead, true), cite(other, true)]))
}

fn race(family: &Family) -> Option<(Verdict, Vec<Citation>)> {
    lead_versus(
        family,
        Code::pair(Group::WhiteMale, Group::BlackMale),
        Code::pair(Group::WhiteFemale, Group::BlackFemale),
    )
}

fn gender(family: &Family) -> Option<(Verdict, Vec<Citation>)> {
    lead_versus(
        family,
        Code::pair(Group::WhiteMale, Group::WhiteFemale),
        Code::pair(Group::BlackMale, Group::BlackFemale),
    )
}

fn required_codes(hypothesis: Hypothesis) -> &'static [&'static str] {
    match hypothesis {
        Hypothesis::Intersectionality => &["MF", "BW", "WMBF|WFBM"],
        Hypothesis::Race => &["WMBM", "WFBF"],
        Hypothesis::Gender => &["WMWF", "BFBM"],
    }
}

type Rule = fn(&Family) -> Option<(Verdict, Vec<Citation>)>;

/// Applies the three rules to intersectional battery results.
///
/// Fails if some hypothesis has no family with the tests its rule needs.
pub fn hypothesis_report<T: Evidence>(results: &[T]) -> Result<HypothesisReport> {
    let mut families: BTreeMap<&str, Family> = BTreeMap::new();
    for r in results {
        if let Some((family, code)) = split_name(r.name()) {
            families.entry(family).or_default().insert(code, r as &dyn Evidence);
        }
    }

    let rules: [(Hypothesis, Rule); 3] = [
        (Hypothesis::Intersectionality, intersectionality),
        (Hypothesis::Race, race),
        (Hypothesis::Gender, gender),
    ];

    let mut entries = Vec::new();
    for (hypothesis, rule) in rules {
        let findings: Vec<FamilyFinding> = families
            .iter()
            .filter_map(|(name, family)| {
                rule(family).map(|(verdict, cited)| FamilyFinding {
                    family: (*name).into(),
                    verdict,
                    cited,
                })
            })
            .collect();
        if findings.is_empty() {
            let names = families
                .keys()
                .copied()
                .chain(families.is_empty().then_some("Valence"))
                .flat_map(|f| required_codes(hypothesis).iter().map(move |c| format!("{f} ({c})")))
                .collect();
            return Err(Error::MissingTests {
                hypothesis: hypothesis.as_str(),
                names,
            });
        }
        let any = |v: Verdict| findings.iter().any(|f| f.verdict == v);
        let verdict = if any(Verdict::Consistent) {
            Verdict::Consistent
        } else if any(Verdict::Inconsistent) {
            Verdict::Inconsistent
        } else {
            Verdict::InsufficientSignificance
        };
        entries.push(HypothesisEntry {
            hypothesis,
            verdict,
            rule: hypothesis.rule(),
            findings,
        });
    }

    let mut notes = Vec::new();
    for r in results {
        let was_cited = entries.iter().any(|e| e.cited().any(|c| c.name == r.name()));
        if let (true, Some(note)) = (was_cited, r.note()) {
            notes.push(format!("{}: {}", r.name(), note));
        }
    }
    Ok(HypothesisReport { entries, notes })
}
