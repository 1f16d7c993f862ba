//! Reference checks: the published counts, certificates and sample points,
//! plus the property suites behind them. Shared by `check-paper` and the
//! acceptance tests.

use std::time::{Duration, Instant};

use coexist_core::completion::{certify_impossible, complete, Certificate, SearchConfig};
use coexist_core::grassmann::{
    enumerate_gp_relations, plucker_vector, relation_status, verify_gp, BasisTable, Initialization,
    RelationStatus, TriSign,
};
use coexist_core::linalg::{int, parse_rational, to_f64};
use coexist_core::model::{
    sample_point_with, sign_string, MagnitudeRange, ParameterPoint, Permutations, Sign, SignPattern,
};
use coexist_core::stability::{char_poly_coeffs, check_point, hurwitz_determinants};
use coexist_core::witness::{find_witness, verify_point, WitnessConfig, WitnessReport};
use coexist_core::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eigen::eigen_check;
use crate::formats::{CheckJson, CheckReportJson, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    N2,
    N3,
    N4,
    Counts,
    Samples,
    Properties,
    Scope,
}

impl Section {
    pub const ALL: [Section; 7] = [
        Section::N2,
        Section::N3,
        Section::N4,
        Section::Counts,
        Section::Samples,
        Section::Properties,
        Section::Scope,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Section::N2 => "n2",
            Section::N3 => "n3",
            Section::N4 => "n4",
            Section::Counts => "counts",
            Section::Samples => "samples",
            Section::Properties => "properties",
            Section::Scope => "scope",
        }
    }

    pub fn parse(text: &str) -> Option<Section> {
        Section::ALL.into_iter().find(|s| s.name() == text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub id: &'static str,
    pub section: Section,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:<3} {:<10} {} :: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.section.name(),
            self.title,
            self.detail
        )
    }

    pub fn to_json(&self) -> CheckJson {
        CheckJson {
            id: self.id.into(),
            section: self.section.name().into(),
            title: self.title.into(),
            passed: self.passed,
            detail: self.detail.clone(),
        }
    }
}

pub fn report_json(checks: &[Check]) -> CheckReportJson {
    let passed = checks.iter().filter(|c| c.passed).count();
    CheckReportJson {
        schema_version: SCHEMA_VERSION.into(),
        passed,
        failed: checks.len() - passed,
        checks: checks.iter().map(Check::to_json).collect(),
    }
}

// n = 2 patterns in (a1, a2, b12, b21) order
pub const N2_FEASIBLE_STABLE: [&str; 8] = [
    "++++", "-+--", "++--", "+++-", "+---", "-+-+", "+-+-", "++-+",
];
pub const N2_EMPTY: [&str; 8] = [
    "----", "+-++", "-+++", "+--+", "-++-", "--++", "--+-", "---+",
];

pub const OBLIGATE_MUTUALISM_2: &str = "--+--+";
pub const OBLIGATE_MUTUALISM_3: &str = "---+---+---+";
pub const COMPETITION_TWO_MUTUALISTS: &str = "+--+++++-+-+";
pub const FACULTATIVE_PREDATION: &str = "+--+--++-+-+";
pub const CYCLIC_PREDATION: &str = "---+-+++--++";
pub const FACULTATIVE_PREDATION_COMPLETION: &str = "+-+-++--+++--++----+";

/// The boxed n = 4 patterns: growth signs and off-diagonal signs row by row.
pub const N4_BOXED: [(&str, &str, &str); 3] = [
    ("P1", "----", "------------"),
    ("P2", "+---", "++++--+--+--"),
    ("P3", "++--", "-++-++++-++-"),
];
pub const N4_SYMMETRIC: [(&str, &str, &str); 2] = [
    ("U1", "+---", "-++-++++-++-"),
    ("U2", "----", "-++-++++-++-"),
];

/// Sample points for n = 3: `a`, then `b12, b13, b21, b23, b31, b32`, with a unit diagonal.
pub const TABLE_TWO: [(&str, [&str; 9]); 6] = [
    (
        "+--+-+-+-",
        [
            "0.11", "-0.056", "-1.966", "2.949", "-3.84", "0.897", "-1.954", "3.996", "-6.962",
        ],
    ),
    (
        "---+-+--+",
        [
            "-0.361", "-2.199", "-0.453", "0.369", "-1.731", "0.934", "-4.133", "-2.816", "1.363",
        ],
    ),
    (
        "---+----+",
        [
            "-0.306", "-3.197", "-0.365", "0.237", "-1.543", "-1.196", "-3.001", "-2.28", "0.915",
        ],
    ),
    (
        "---+-+---",
        [
            "-0.126", "-1.451", "-0.222", "0.464", "-1.59", "0.491", "-2.942", "-1.095", "-0.127",
        ],
    ),
    (
        "---+--+--",
        [
            "-0.199", "-2.153", "-0.204", "0.771", "-1.97", "-3.547", "0.394", "-1.081", "-0.123",
        ],
    ),
    (
        "---+-----",
        [
            "-0.193", "-3.158", "-0.394", "0.57", "-1.763", "-1.498", "-2.66", "-1.228", "-0.166",
        ],
    ),
];

pub const N4_SAMPLE_PATTERN: &str = "++--++++++++-++-";
pub const N4_SAMPLE: [&str; 16] = [
    "14.834", "4.38", "-0.033", "-0.019", "0.847", "11.543", "1.444", "0.601", "0.117", "2.662",
    "0.003", "0.589", "-1.625", "0.064", "0.005", "-1.088",
];

pub const X_STAR_TOLERANCE: f64 = 2e-3;
pub const ROW_SUM_TOLERANCE: f64 = 2e-3;

pub fn n2_pattern(abbc: &str) -> SignPattern {
    SignPattern::parse_compact(abbc).expect("valid n = 2 pattern")
}

pub fn n4_pattern(a: &str, off: &str) -> SignPattern {
    SignPattern::parse_compact(&format!("{a}{off}")).expect("valid n = 4 pattern")
}

fn point_with_unit_diagonal(values: &[&str], n: usize) -> ParameterPoint {
    let v: Vec<BigRational> = values
        .iter()
        .map(|s| parse_rational(s).expect("decimal"))
        .collect();
    ParameterPoint::from_off_diagonal(v[..n].to_vec(), &v[n..], &int(1)).expect("consistent sizes")
}

pub fn table_two_point(row: usize) -> (SignPattern, ParameterPoint) {
    let (sp, values) = TABLE_TWO[row];
    (
        SignPattern::parse_compact(sp).expect("valid pattern"),
        point_with_unit_diagonal(&values, 3),
    )
}

pub fn n4_sample_point() -> (SignPattern, ParameterPoint) {
    (
        SignPattern::parse_compact(N4_SAMPLE_PATTERN).expect("valid pattern"),
        point_with_unit_diagonal(&N4_SAMPLE, 4),
    )
}

pub fn criterion_witness_config() -> WitnessConfig {
    WitnessConfig {
        trials: 10_000,
        ..WitnessConfig::default()
    }
}

fn ms(d: Duration) -> String {
    format!("{:.0} ms", d.as_secs_f64() * 1e3)
}

fn check(
    id: &'static str,
    section: Section,
    title: &'static str,
    passed: bool,
    detail: String,
) -> Check {
    Check {
        id,
        section,
        title,
        passed,
        detail,
    }
}

pub fn criterion_1() -> Check {
    let sp = SignPattern::parse(OBLIGATE_MUTUALISM_2).expect("valid");
    let t = Instant::now();
    let cert = certify_impossible(&sp).expect("supported size");
    let elapsed = t.elapsed();
    check(
        "1",
        Section::N2,
        "n=2 obligate mutualism is impossible",
        matches!(cert, Certificate::Impossible(_)) && elapsed < Duration::from_secs(1),
        format!("verdict {} in {}", cert.verdict(), ms(elapsed)),
    )
}

/// Witnesses found for the eight feasible-stable n = 2 patterns.
pub fn n2_witnesses() -> Vec<(SignPattern, Option<WitnessReport>)> {
    let cfg = criterion_witness_config();
    N2_FEASIBLE_STABLE
        .iter()
        .map(|p| {
            let sp = n2_pattern(p);
            let w = find_witness(&sp, &cfg).expect("positive trials");
            (sp, w)
        })
        .collect()
}

pub fn criterion_2() -> Check {
    let t = Instant::now();
    let cfg = criterion_witness_config();
    let mut problems = Vec::new();
    for (sp, w) in n2_witnesses() {
        let set = complete(&sp, SearchConfig::default()).expect("supported size");
        if set.count() == 0 {
            problems.push(format!("{sp}: no completion"));
        }
        if w.is_none() {
            problems.push(format!("{sp}: no witness"));
        }
    }
    for p in N2_EMPTY {
        let sp = n2_pattern(p);
        if find_witness(&sp, &cfg).expect("positive trials").is_some() {
            problems.push(format!("{sp}: unexpected witness"));
        }
    }
    let elapsed = t.elapsed();
    if elapsed > Duration::from_secs(60) {
        problems.push(format!("took {}", ms(elapsed)));
    }
    check(
        "2",
        Section::N2,
        "n=2 classification: 8 patterns completed and witnessed, 8 unwitnessed",
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "8 + 8 patterns, {} trials each, {}",
                cfg.trials,
                ms(elapsed)
            )
        } else {
            problems.join("; ")
        },
    )
}

pub fn criterion_3() -> Check {
    let cases: [(&str, &str, usize); 4] = [
        ("obligate mutualism", OBLIGATE_MUTUALISM_3, 0),
        (
            "competition with two obligate mutualists",
            COMPETITION_TWO_MUTUALISTS,
            0,
        ),
        ("facultative predation", FACULTATIVE_PREDATION, 1),
        ("obligate cyclic predation", CYCLIC_PREDATION, 1),
    ];
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for (name, text, expected) in cases {
        let sp = SignPattern::parse(text).expect("valid");
        let t = Instant::now();
        let set = complete(&sp, SearchConfig::default()).expect("supported size");
        let elapsed = t.elapsed();
        summary.push(format!("{}={}", text, set.count()));
        if set.count() != expected || set.truncated {
            problems.push(format!("{name}: {} completions", set.count()));
        }
        if elapsed > Duration::from_secs(10) {
            problems.push(format!("{name}: {}", ms(elapsed)));
        }
        if text == FACULTATIVE_PREDATION
            && set.completion_strings().first().map(String::as_str)
                != Some(FACULTATIVE_PREDATION_COMPLETION)
        {
            problems.push(format!("{name}: completion {:?}", set.completion_strings()));
        }
    }
    check(
        "3",
        Section::N3,
        "n=3 quartet: 0, 0, 1 (tabulated), 1 completions",
        problems.is_empty(),
        if problems.is_empty() {
            summary.join(", ")
        } else {
            problems.join("; ")
        },
    )
}

pub fn criterion_4() -> Check {
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for (name, a, off) in N4_BOXED {
        let sp = n4_pattern(a, off);
        let t = Instant::now();
        let cert = certify_impossible(&sp).expect("supported size");
        let base = t.elapsed();
        if !matches!(cert, Certificate::Impossible(_)) {
            problems.push(format!("{name}: {}", cert.verdict()));
        }
        if base > Duration::from_secs(300) {
            problems.push(format!("{name}: {}", ms(base)));
        }
        let mut worst = base;
        for perm in Permutations::new(4) {
            let t = Instant::now();
            let v = certify_impossible(&sp.permute(&perm))
                .expect("supported size")
                .verdict();
            worst = worst.max(t.elapsed());
            if v != cert.verdict() {
                problems.push(format!("{name} relabelled by {perm:?}: {v}"));
            }
        }
        summary.push(format!(
            "{name} {} (slowest of 25 runs {})",
            cert.verdict(),
            ms(worst)
        ));
    }
    check(
        "4",
        Section::N4,
        "n=4 boxed patterns impossible under all 24 relabelings",
        problems.is_empty(),
        if problems.is_empty() {
            summary.join(", ")
        } else {
            problems.join("; ")
        },
    )
}

pub fn criterion_5() -> Check {
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for (name, a, off) in N4_SYMMETRIC {
        let sp = n4_pattern(a, off);
        let full = complete(&sp, SearchConfig::default())
            .expect("supported size")
            .count();
        let open = complete(&sp, SearchConfig::chirotope_only())
            .expect("supported size")
            .count();
        let trivial_full = complete(
            &sp,
            SearchConfig {
                initialization: Initialization::TrivialOnly,
                ..SearchConfig::default()
            },
        )
        .expect("supported size")
        .count();
        let trivial_open = complete(
            &sp,
            SearchConfig {
                initialization: Initialization::TrivialOnly,
                ..SearchConfig::chirotope_only()
            },
        )
        .expect("supported size")
        .count();
        if (full, open) != (64, 256) {
            problems.push(format!("{name}: {full}/{open}"));
        }
        summary.push(format!(
            "{name} {full}/{open} (trivial-only init {trivial_full}/{trivial_open})"
        ));
    }
    check(
        "5",
        Section::Counts,
        "n=4 symmetric patterns: 64 completions with checks, 256 without",
        problems.is_empty(),
        if problems.is_empty() {
            summary.join(", ")
        } else {
            problems.join("; ")
        },
    )
}

fn all_sample_points() -> Vec<(String, SignPattern, ParameterPoint)> {
    let mut out: Vec<(String, SignPattern, ParameterPoint)> = (0..TABLE_TWO.len())
        .map(|r| {
            let (sp, p) = table_two_point(r);
            (format!("row {}", r + 1), sp, p)
        })
        .collect();
    let (sp, p) = n4_sample_point();
    out.push(("n=4".into(), sp, p));
    out
}

pub fn criterion_6a() -> Check {
    let mut problems = Vec::new();
    for (name, sp, p) in all_sample_points() {
        match verify_point(&p, Some(&sp)) {
            Ok(r) if r.feasible_stable() => {}
            Ok(_) => problems.push(format!("{name}: not feasible-stable")),
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    check(
        "6a",
        Section::Samples,
        "sample points verify feasible-stable exactly",
        problems.is_empty(),
        if problems.is_empty() {
            "6 n=3 rows and the n=4 point".into()
        } else {
            problems.join("; ")
        },
    )
}

/// Largest componentwise distance of each row's `x⋆` from `(1, 1, 1)`.
pub fn table_two_equilibrium_deviation() -> Vec<f64> {
    (0..TABLE_TWO.len())
        .map(|r| {
            let (_, p) = table_two_point(r);
            let x = check_point(&p)
                .feasibility
                .equilibrium()
                .expect("nonsingular");
            x.iter()
                .map(|v| (to_f64(v) - 1.0).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

pub fn criterion_6b() -> Check {
    let dev = table_two_equilibrium_deviation();
    let bad: Vec<String> = dev
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > X_STAR_TOLERANCE)
        .map(|(r, d)| format!("row {} off by {:.2e}", r + 1, d))
        .collect();
    check(
        "6b",
        Section::Samples,
        "sample x* within 2e-3 of (1,1,1)",
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "max deviation {:.2e}",
                dev.iter().copied().fold(0.0, f64::max)
            )
        } else {
            bad.join("; ")
        },
    )
}

/// Largest `|a_i − Σ_j b_ij|` per row, which should vanish when `x⋆ = 1`.
pub fn table_two_row_sum_deviation() -> Vec<f64> {
    (0..TABLE_TWO.len())
        .map(|r| {
            let (_, p) = table_two_point(r);
            (0..3)
                .map(|i| {
                    let s: f64 = (0..3).map(|j| to_f64(&p.b[(i, j)])).sum();
                    (to_f64(&p.a[i]) - s).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

pub fn criterion_6c() -> Check {
    let dev = table_two_row_sum_deviation();
    let worst = dev.iter().copied().fold(0.0, f64::max);
    check(
        "6c",
        Section::Samples,
        "sample column order: a = B(1,1,1) within 2e-3",
        worst <= ROW_SUM_TOLERANCE,
        format!("max row-sum deviation {worst:.2e}"),
    )
}

pub fn criterion_7a() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let range = MagnitudeRange::default();
    let mut failures = 0;
    for n in 2..=4 {
        for _ in 0..100 {
            let sp = random_pattern(&mut rng, n);
            let p = sample_point_with(&sp, &range, &mut rng);
            if !verify_gp(&plucker_vector(&p)) {
                failures += 1;
            }
        }
    }
    check(
        "7a",
        Section::Properties,
        "3-term relations vanish exactly on random points",
        failures == 0,
        format!("300 points, {failures} failures"),
    )
}

fn random_pattern(rng: &mut ChaCha8Rng, n: usize) -> SignPattern {
    let s = |rng: &mut ChaCha8Rng| {
        if rng.random::<bool>() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    };
    let a = (0..n).map(|_| s(rng)).collect();
    let b = (0..n * n)
        .map(|k| if k % (n + 1) == 0 { Sign::Plus } else { s(rng) })
        .collect();
    SignPattern::new(a, b).expect("consistent sizes")
}

pub const SPECTRAL_MARGIN: f64 = 1e-6;

pub fn criterion_7b() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let range = MagnitudeRange::new(0.1, 10.0).expect("valid range");
    let (mut total, mut agree, mut outside_band) = (0, 0, 0);
    while total < 100 {
        let n = 2 + total % 3;
        let sp = random_pattern(&mut rng, n);
        let p = sample_point_with(&sp, &range, &mut rng);
        let Some(x) = check_point(&p).feasibility.equilibrium() else {
            continue;
        };
        let Some(e) = eigen_check(&p) else { continue };
        let exact = hurwitz_determinants(&char_poly_coeffs(&x, &p.b).expect("square")).stable;
        total += 1;
        if exact == e.stable() {
            agree += 1;
        } else if e.margin() > SPECTRAL_MARGIN {
            outside_band += 1;
        }
    }
    check(
        "7b",
        Section::Properties,
        "Routh-Hurwitz agrees with eigenvalues",
        agree >= 99 && outside_band == 0,
        format!("{agree}/{total} agree, {outside_band} disagreements outside the {SPECTRAL_MARGIN:e} band"),
    )
}

pub fn criterion_7c() -> Check {
    let mut witnesses: Vec<WitnessReport> =
        n2_witnesses().into_iter().filter_map(|(_, w)| w).collect();
    for (_, sp, p) in all_sample_points() {
        if let Ok(r) = verify_point(&p, Some(&sp)) {
            witnesses.push(r);
        }
    }
    let mut problems = Vec::new();
    for w in &witnesses {
        let Some(chi) = w.full_chirotope() else {
            problems.push(format!("{}: zero coordinate", w.pattern));
            continue;
        };
        let set = complete(&w.pattern, SearchConfig::default()).expect("supported size");
        if !set.contains(&chi) {
            problems.push(format!(
                "{}: {} not among {} completions",
                w.pattern,
                sign_string(&chi),
                set.count()
            ));
        }
    }
    check(
        "7c",
        Section::Properties,
        "witness chirotopes are completions",
        problems.is_empty() && !witnesses.is_empty(),
        if problems.is_empty() {
            format!("{} witnesses", witnesses.len())
        } else {
            problems.join("; ")
        },
    )
}

// X − Y + Z = 0 with positive magnitudes is solvable iff the signed terms differ
fn solvable(signs: &[i8; 6]) -> bool {
    let t = [
        signs[0] * signs[1],
        -signs[2] * signs[3],
        signs[4] * signs[5],
    ];
    !(t[0] == t[1] && t[1] == t[2])
}

pub fn criterion_7d() -> Check {
    let table = BasisTable::new(2);
    let rel = enumerate_gp_relations(&table).remove(0);
    let bases = rel.bases();
    let mut mismatches = 0;
    for code in 0..729usize {
        let mut tri = [0i8; 6];
        let mut c = code;
        for t in &mut tri {
            *t = (c % 3) as i8 - 1;
            c /= 3;
        }
        let mut chi = vec![TriSign::Unknown; table.len()];
        for (k, &b) in bases.iter().enumerate() {
            chi[b] = match tri[k] {
                1 => TriSign::Plus,
                -1 => TriSign::Minus,
                _ => TriSign::Unknown,
            };
        }
        let unknown: Vec<usize> = (0..6).filter(|&k| tri[k] == 0).collect();
        let mut options: Vec<[i8; 6]> = Vec::new();
        for fill in 0..1usize << unknown.len() {
            let mut full = tri;
            for (bit, &k) in unknown.iter().enumerate() {
                full[k] = if fill >> bit & 1 == 1 { -1 } else { 1 };
            }
            if solvable(&full) {
                options.push(full);
            }
        }
        let ok = match relation_status(&rel, &chi) {
            RelationStatus::Violated => options.is_empty(),
            RelationStatus::Satisfied => unknown.is_empty() && !options.is_empty(),
            RelationStatus::Forces(b, s) => {
                let k = bases.iter().position(|&x| x == b).expect("relation basis");
                unknown == [k] && options.len() == 1 && options[0][k] == s.as_i8()
            }
            RelationStatus::Open => {
                !unknown.is_empty() && (unknown.len() > 1 || options.len() == 2)
            }
        };
        if !ok {
            mismatches += 1;
        }
    }
    check(
        "7d",
        Section::Properties,
        "3-term sign rule matches the brute-force oracle on all 3^6 tuples",
        mismatches == 0,
        format!("729 tuples, {mismatches} mismatches"),
    )
}

pub fn criterion_8() -> Check {
    check(
        "8",
        Section::Scope,
        "out of scope: region counts",
        true,
        "the 72 n=2 regions with their per-row counts and the 1207/343 n=3 regions are not reproduced; \
         only the realizability structure is, through checks 2 and 6"
            .into(),
    )
}

pub fn section_checks(section: Section) -> Vec<fn() -> Check> {
    match section {
        Section::N2 => vec![criterion_1, criterion_2],
        Section::N3 => vec![criterion_3],
        Section::N4 => vec![criterion_4],
        Section::Counts => vec![criterion_5],
        Section::Samples => vec![criterion_6a, criterion_6b, criterion_6c],
        Section::Properties => vec![criterion_7a, criterion_7b, criterion_7c, criterion_7d],
        Section::Scope => vec![criterion_8],
    }
}

/// Runs one section, or all of them in order.
pub fn run(section: Option<Section>) -> Vec<Check> {
    let sections: Vec<Section> = match section {
        Some(s) => vec![s],
        None => Section::ALL.to_vec(),
    };
    sections
        .into_iter()
        .flat_map(section_checks)
        .map(|f| f())
        .collect()
}
