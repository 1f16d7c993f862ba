//! JSON documents. Exact rationals are written as strings (`"3"`, `"-7/20"`)
//! so nothing is lost on a round trip.

use std::collections::BTreeMap;

use coexist_core::completion::{CompletionSet, SearchConfig};
use coexist_core::grassmann::{BasisTable, PartialChirotope, TriSign};
use coexist_core::linalg::{parse_rational, Matrix};
use coexist_core::model::{ParameterPoint, Sign, SignPattern};
use coexist_core::witness::WitnessReport;
use coexist_core::{BigRational, Error};
use serde::{Deserialize, Serialize};

/// Version tag written into every report and matched by the shipped schema.
pub const SCHEMA_VERSION: &str = "coexist/1";

/// The schema document for [`SCHEMA_VERSION`].
pub const SCHEMA: &str = include_str!("../schemas/coexist.v1.schema.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternJson {
    pub n: usize,
    pub a: Vec<String>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<String>>,
}

fn sign_str(s: Sign) -> String {
    s.as_char().to_string()
}

impl From<&SignPattern> for PatternJson {
    fn from(sp: &SignPattern) -> Self {
        let n = sp.n();
        Self {
            n,
            a: sp.a_signs().iter().map(|&s| sign_str(s)).collect(),
            b: (0..n)
                .map(|i| (0..n).map(|j| sign_str(sp.b(i, j))).collect())
                .collect(),
        }
    }
}

impl PatternJson {
    pub fn to_pattern(&self, allow_negative_diagonal: bool) -> Result<SignPattern, Error> {
        if self.a.len() != self.n
            || self.b.len() != self.n
            || self.b.iter().any(|r| r.len() != self.n)
        {
            return Err(Error::Dimension(format!(
                "pattern document does not match n = {}",
                self.n
            )));
        }
        let mut text = self.a.concat();
        for row in &self.b {
            text.push_str(&row.concat());
        }
        SignPattern::parse_with(&text, allow_negative_diagonal)
    }
}

/// A chirotope as a map from basis labels to `"+"`, `"-"` or `"?"`.
pub fn chirotope_json(chi: &PartialChirotope) -> BTreeMap<String, String> {
    let table = BasisTable::new(chi.n);
    chi.chi
        .iter()
        .enumerate()
        .map(|(r, s)| (table.label(r), s.as_char().to_string()))
        .collect()
}

pub fn chirotope_from_json(
    n: usize,
    map: &BTreeMap<String, String>,
) -> Result<PartialChirotope, Error> {
    let table = BasisTable::new(n);
    if map.len() != table.len() {
        return Err(Error::Dimension(format!(
            "expected {} bases, got {}",
            table.len(),
            map.len()
        )));
    }
    let mut chi = PartialChirotope::unknown(n);
    for r in 0..table.len() {
        let label = table.label(r);
        let text = map
            .get(&label)
            .ok_or_else(|| Error::Dimension(format!("missing basis {label}")))?;
        let mut chars = text.chars();
        let s = match (chars.next(), chars.next()) {
            (Some(c), None) => TriSign::from_char(c),
            _ => None,
        };
        chi.chi[r] = s.ok_or_else(|| Error::IllegalCharacter {
            found: text.chars().next().unwrap_or(' '),
            position: r,
        })?;
    }
    Ok(chi)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsJson {
    pub nodes: u64,
    pub inferences: u64,
    pub conflicts: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub feasibility: bool,
    pub stability: bool,
    pub det_b_positive: bool,
    pub max_nodes: u64,
    pub first_only: bool,
}

impl From<&SearchConfig> for ConfigJson {
    fn from(c: &SearchConfig) -> Self {
        Self {
            feasibility: c.enable_feasibility,
            stability: c.enable_stability,
            det_b_positive: c.det_b_positive,
            max_nodes: c.max_nodes,
            first_only: !c.collect_all,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionSetJson {
    pub schema_version: String,
    pub pattern: String,
    pub n: usize,
    pub count: usize,
    pub completions: Vec<String>,
    pub stats: StatsJson,
    pub verdict: String,
    pub config: ConfigJson,
}

impl From<&CompletionSet> for CompletionSetJson {
    fn from(set: &CompletionSet) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            pattern: set.pattern.to_string(),
            n: set.pattern.n(),
            count: set.count(),
            completions: set.completion_strings(),
            stats: StatsJson {
                nodes: set.stats.nodes,
                inferences: set.stats.inferences,
                conflicts: set.stats.conflicts,
            },
            verdict: set.verdict().as_str().into(),
            config: ConfigJson::from(&set.config),
        }
    }
}

pub fn rational_string(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

fn rationals(v: &[BigRational]) -> Vec<String> {
    v.iter().map(rational_string).collect()
}

/// A parameter point. Entries may be written as JSON strings (`"-0.033"`,
/// `"7/3"`) or plain numbers; numbers are read through their decimal text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub a: Vec<Entry>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Text(String),
    Number(serde_json::Number),
}

impl Entry {
    fn value(&self) -> Result<BigRational, Error> {
        match self {
            Entry::Text(s) => parse_rational(s),
            Entry::Number(n) => parse_rational(&n.to_string()),
        }
    }
}

impl PointJson {
    pub fn from_point(p: &ParameterPoint) -> Self {
        let n = p.n();
        Self {
            a: p.a
                .iter()
                .map(|v| Entry::Text(rational_string(v)))
                .collect(),
            b: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| Entry::Text(rational_string(&p.b[(i, j)])))
                        .collect()
                })
                .collect(),
            pattern: None,
        }
    }

    pub fn to_point(&self) -> Result<ParameterPoint, Error> {
        let n = self.a.len();
        if self.b.len() != n || self.b.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("B must be {n}x{n}")));
        }
        let a = self
            .a
            .iter()
            .map(Entry::value)
            .collect::<Result<Vec<_>, _>>()?;
        let b = self
            .b
            .iter()
            .flatten()
            .map(Entry::value)
            .collect::<Result<Vec<_>, _>>()?;
        ParameterPoint::new(a, Matrix::from_rows(n, n, b)?)
    }

    pub fn expected_pattern(&self) -> Result<Option<SignPattern>, Error> {
        self.pattern.as_deref().map(SignPattern::parse).transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityJson {
    pub x_tilde: Vec<String>,
    pub det_b: String,
    pub equilibrium: Option<Vec<String>>,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurwitzJson {
    pub coefficients: Vec<String>,
    pub determinants: Vec<String>,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReportJson {
    pub schema_version: String,
    pub pattern: String,
    pub point: PointJson,
    pub feasibility: FeasibilityJson,
    pub hurwitz: HurwitzJson,
    /// Rank order; `0` marks a vanishing coordinate.
    pub chirotope: String,
    pub trials_used: u64,
    pub feasible_stable: bool,
    pub witness: bool,
}

impl From<&WitnessReport> for WitnessReportJson {
    fn from(r: &WitnessReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            pattern: r.pattern.to_string(),
            point: PointJson::from_point(&r.point),
            feasibility: FeasibilityJson {
                x_tilde: rationals(&r.feasibility.x_tilde),
                det_b: rational_string(&r.feasibility.det_b),
                equilibrium: r.feasibility.equilibrium().map(|x| rationals(&x)),
                feasible: r.feasibility.feasible,
            },
            hurwitz: HurwitzJson {
                coefficients: rationals(&r.coefficients.c),
                determinants: rationals(&r.hurwitz.h),
                stable: r.hurwitz.stable,
            },
            chirotope: r
                .chirotope
                .iter()
                .map(|s| s.map_or('0', Sign::as_char))
                .collect(),
            trials_used: r.trials_used,
            feasible_stable: r.feasible_stable(),
            witness: r.is_witness(),
        }
    }
}

/// Result of a witness search; `report` is null when nothing was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSearchJson {
    pub schema_version: String,
    pub pattern: String,
    pub trials: u64,
    pub seed: u64,
    pub mode: String,
    pub found: bool,
    pub report: Option<WitnessReportJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub schema_version: String,
    pub pattern: String,
    pub canonical: String,
    pub class_id: String,
    pub verdict: String,
    pub count: usize,
    pub completions: Vec<String>,
    pub stats: StatsJson,
}

/// One line of the check matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckJson {
    pub id: String,
    pub section: String,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReportJson {
    pub schema_version: String,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckJson>,
}
