//! Witness points: sampled parameters verified exactly to lie in the
//! feasible-stable stratum of a sign pattern.
//!
//! Candidates are drawn in floating point, screened with a cheap float test and
//! then rationalized and verified in exact arithmetic, so every reported
//! witness carries an exact certificate. Failing to find a witness proves
//! nothing.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grassmann::plucker_vector;
use crate::linalg::{self, Matrix};
use crate::model::{MagnitudeRange, ParameterPoint, Sign, SignPattern, SAMPLE_DIGITS};
use crate::stability::{self, CharPolyCoeffs, FeasibilityReport, HurwitzReport};
use crate::Error;

/// Exact verification of one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub pattern: SignPattern,
    pub point: ParameterPoint,
    pub feasibility: FeasibilityReport,
    pub coefficients: CharPolyCoeffs,
    pub hurwitz: HurwitzReport,
    /// Plücker signs in rank order; `None` marks a zero coordinate.
    pub chirotope: Vec<Option<Sign>>,
    /// Trials drawn up to and including this point; 0 for a supplied point.
    pub trials_used: u64,
}

impl WitnessReport {
    pub fn feasible_stable(&self) -> bool {
        self.feasibility.feasible && self.hurwitz.stable
    }

    /// The sign vector, if no coordinate vanishes.
    pub fn full_chirotope(&self) -> Option<Vec<Sign>> {
        self.chirotope.iter().copied().collect()
    }

    /// Feasible, stable and with a zero-free chirotope.
    pub fn is_witness(&self) -> bool {
        self.feasible_stable() && self.chirotope.iter().all(Option::is_some)
    }
}

/// Signs of all Plücker coordinates of `[diag(a) | B]`.
pub fn chirotope_of_point(point: &ParameterPoint) -> Vec<Option<Sign>> {
    plucker_vector(point).signs()
}

/// Exactly verifies `point`, checking its entry signs against `expected`.
pub fn verify_point(
    point: &ParameterPoint,
    expected: Option<&SignPattern>,
) -> Result<WitnessReport, Error> {
    let pattern = match expected {
        Some(sp) => {
            point.check_signs(sp)?;
            sp.clone()
        }
        None => point.sign_pattern().ok_or_else(|| {
            Error::Dimension("point has a zero entry and no pattern was given".into())
        })?,
    };
    let stratum = stability::is_feasible_stable(&point.a, &point.b)?;
    Ok(WitnessReport {
        pattern,
        point: point.clone(),
        feasibility: stratum.feasibility,
        coefficients: stratum.coefficients,
        hurwitz: stratum.hurwitz,
        chirotope: chirotope_of_point(point),
        trials_used: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Draw `a` and `B` directly.
    Direct,
    /// Draw `x⋆ > 0` and `B`, set `a = Bx⋆` and keep it when its signs match.
    FixedEquilibrium,
    /// Alternate the two, direct first.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessConfig {
    pub trials: u64,
    pub seed: u64,
    pub range: MagnitudeRange,
    pub mode: SamplingMode,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 0,
            range: MagnitudeRange::default(),
            mode: SamplingMode::Mixed,
        }
    }
}

/// The generator for trial `t`: one ChaCha stream per trial, so trials can be
/// evaluated in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn signed(s: Sign, v: f64) -> f64 {
    if s.is_plus() {
        v
    } else {
        -v
    }
}

/// One floating-point candidate `(a, B)` for trial `t`, or `None` when a
/// fixed-equilibrium draw lands on the wrong growth-rate signs.
pub fn draw_candidate(
    sp: &SignPattern,
    cfg: &WitnessConfig,
    trial: u64,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = sp.n();
    let mut rng = trial_rng(cfg.seed, trial);
    let fixed = match cfg.mode {
        SamplingMode::Direct => false,
        SamplingMode::FixedEquilibrium => true,
        SamplingMode::Mixed => trial % 2 == 1,
    };
    let round = |v: f64| linalg::to_f64(&linalg::rationalize(v, SAMPLE_DIGITS));
    let b: Vec<f64> = sp
        .b_signs()
        .iter()
        .map(|&s| {
            let m = cfg.range.draw(&mut rng);
            signed(s, round(m))
        })
        .collect();
    let a = if fixed {
        let x: Vec<f64> = (0..n).map(|_| round(cfg.range.draw(&mut rng))).collect();
        let a: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| b[i * n + j] * x[j]).sum::<f64>())
            .collect();
        if a.iter()
            .zip(sp.a_signs())
            .any(|(&v, &s)| v == 0.0 || (v > 0.0) != s.is_plus())
        {
            return None;
        }
        a.into_iter()
            .map(|v| {
                signed(
                    if v > 0.0 { Sign::Plus } else { Sign::Minus },
                    round(v.abs()),
                )
            })
            .collect()
    } else {
        sp.a_signs()
            .iter()
            .map(|&s| signed(s, round(cfg.range.draw(&mut rng))))
            .collect()
    };
    Some((a, b))
}

/// Float screen; errs on the side of passing near the boundary.
pub fn screen(a: &[f64], b: &[f64]) -> bool {
    let n = a.len();
    if negative(b, n) {
        return false;
    }
    let adj = adjugate_f64(b, n);
    for i in 0..n {
        let row = &adj[i * n..(i + 1) * n];
        let x: f64 = row.iter().zip(a).map(|(p, q)| p * q).sum();
        let mag: f64 = row.iter().zip(a).map(|(p, q)| (p * q).abs()).sum();
        if x < -TOL * mag {
            return false;
        }
    }
    let x: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| adj[i * n + j] * a[j]).sum::<f64>().abs())
        .collect();
    // coefficients of det(λI + diag(x)B) from principal minors
    let mut c = vec![0.0; n];
    for mask in 1u32..1 << n {
        let j: Vec<usize> = (0..n).filter(|&k| mask >> k & 1 == 1).collect();
        let mut sub = Vec::with_capacity(j.len() * j.len());
        for &r in &j {
            for &s in &j {
                sub.push(b[r * n + s]);
            }
        }
        let w: f64 = j.iter().map(|&k| x[k]).product();
        c[n - j.len()] += w * det_f64(sub, j.len());
    }
    let coef = |i: isize| -> f64 {
        if i == n as isize {
            1.0
        } else if (0..n as isize).contains(&i) {
            c[i as usize]
        } else {
            0.0
        }
    };
    for k in 1..=n {
        let mut h = Vec::with_capacity(k * k);
        for i in 1..=k as isize {
            for j in 1..=k as isize {
                h.push(coef(n as isize - 2 * j + i));
            }
        }
        if negative(&h, k) {
            return false;
        }
    }
    true
}

const TOL: f64 = 1e-6;

// determinant clearly below zero relative to the Hadamard bound
fn negative(m: &[f64], n: usize) -> bool {
    let bound: f64 = (0..n)
        .map(|i| libm::sqrt(m[i * n..(i + 1) * n].iter().map(|v| v * v).sum::<f64>()))
        .product();
    det_f64(m.to_vec(), n) < -TOL * bound
}

fn det_f64(mut m: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap();
        if m[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            for k in col..n {
                m[r * n + k] -= f * m[col * n + k];
            }
        }
    }
    det
}

fn adjugate_f64(b: &[f64], n: usize) -> Vec<f64> {
    let mut adj = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            for r in (0..n).filter(|&r| r != j) {
                for s in (0..n).filter(|&s| s != i) {
                    minor.push(b[r * n + s]);
                }
            }
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[i * n + j] = sign * det_f64(minor, n - 1);
        }
    }
    adj
}

/// Turns a screened float candidate into an exact point.
pub fn exact_point(a: &[f64], b: &[f64]) -> ParameterPoint {
    let n = a.len();
    let q = |v: &f64| -> BigRational { linalg::rationalize(*v, SAMPLE_DIGITS + 2) };
    ParameterPoint::new(
        a.iter().map(q).collect(),
        Matrix::from_rows(n, n, b.iter().map(q).collect()).expect("square"),
    )
    .expect("consistent sizes")
}

/// Checks trial `t` completely; returns the report when it is a witness.
pub fn try_trial(sp: &SignPattern, cfg: &WitnessConfig, trial: u64) -> Option<WitnessReport> {
    let (a, b) = draw_candidate(sp, cfg, trial)?;
    if !screen(&a, &b) {
        return None;
    }
    let point = exact_point(&a, &b);
    let mut report = verify_point(&point, Some(sp)).ok()?;
    report.trials_used = trial + 1;
    report.is_witness().then_some(report)
}

/// The lowest-index trial that yields a witness.
pub fn find_witness(sp: &SignPattern, cfg: &WitnessConfig) -> Result<Option<WitnessReport>, Error> {
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be positive".into()));
    }
    Ok((0..cfg.trials).find_map(|t| try_trial(sp, cfg, t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{complete, SearchConfig};
    use crate::linalg::{int, parse_rational};
    use proptest::prelude::*;

    fn dec(v: &[&str]) -> Vec<BigRational> {
        v.iter().map(|s| parse_rational(s).unwrap()).collect()
    }

    #[test]
    fn zero_entries_need_a_pattern() {
        let pt = ParameterPoint::new(vec![int(1), int(1)], Matrix::identity(2)).unwrap();
        assert!(verify_point(&pt, None).is_err());
        assert!(stability::check_point(&pt).feasible_stable());
        // p13 = p24 = 0
        assert_eq!(
            chirotope_of_point(&pt)
                .iter()
                .filter(|c| c.is_none())
                .count(),
            2
        );
    }

    #[test]
    fn two_by_two_chirotope() {
        let pt = ParameterPoint::new(
            vec![int(1), int(1)],
            Matrix::from_i64(2, 2, &[2, 1, 1, 2]).unwrap(),
        )
        .unwrap();
        let chi: Vec<Sign> = chirotope_of_point(&pt)
            .into_iter()
            .map(Option::unwrap)
            .collect();
        assert_eq!(crate::model::sign_string(&chi), "+++--+");
    }

    #[test]
    fn singular_point_has_zero_det_coordinate() {
        let pt = ParameterPoint::new(
            vec![int(1), int(2)],
            Matrix::from_i64(2, 2, &[1, 1, 1, 1]).unwrap(),
        )
        .unwrap();
        assert_eq!(*chirotope_of_point(&pt).last().unwrap(), None);
    }

    #[test]
    fn negative_determinant_is_rejected() {
        let pt = ParameterPoint::new(
            vec![int(1), int(1)],
            Matrix::from_i64(2, 2, &[1, 2, 2, 1]).unwrap(),
        )
        .unwrap();
        let rep = verify_point(&pt, None).unwrap();
        assert!(!rep.feasibility.feasible);
        assert!(!rep.feasible_stable());
    }

    #[test]
    fn sign_mismatch_is_an_error() {
        let pt = ParameterPoint::new(vec![int(1), int(1)], Matrix::identity(2)).unwrap();
        let sp = SignPattern::parse("+-++++").unwrap();
        assert!(matches!(
            verify_point(&pt, Some(&sp)),
            Err(Error::SignMismatch { .. })
        ));
    }

    #[test]
    fn first_table_point_verifies() {
        let v = dec(&[
            "0.11", "-0.056", "-1.966", "2.949", "-3.84", "0.897", "-1.954", "3.996", "-6.962",
        ]);
        let pt = ParameterPoint::from_off_diagonal(v[..3].to_vec(), &v[3..], &int(1)).unwrap();
        let sp = SignPattern::parse_compact("+--+-+-+-").unwrap();
        let rep = verify_point(&pt, Some(&sp)).unwrap();
        assert!(rep.is_witness());
    }

    #[test]
    fn all_plus_pair_has_a_witness() {
        let sp = SignPattern::parse("++++++").unwrap();
        let rep = find_witness(&sp, &WitnessConfig::default())
            .unwrap()
            .unwrap();
        assert!(rep.is_witness());
        assert!(rep.trials_used >= 1);
    }

    #[test]
    fn obligate_mutualism_pair_has_no_witness() {
        let sp = SignPattern::parse("--+--+").unwrap();
        let cfg = WitnessConfig {
            trials: 2_000,
            ..WitnessConfig::default()
        };
        assert!(find_witness(&sp, &cfg).unwrap().is_none());
    }

    #[test]
    fn zero_trials_rejected() {
        let sp = SignPattern::parse("++++++").unwrap();
        let cfg = WitnessConfig {
            trials: 0,
            ..WitnessConfig::default()
        };
        assert!(find_witness(&sp, &cfg).is_err());
    }

    #[test]
    fn fixed_equilibrium_points_are_feasible() {
        let sp = SignPattern::parse_compact("+--+-+-+-").unwrap();
        let cfg = WitnessConfig {
            mode: SamplingMode::FixedEquilibrium,
            ..WitnessConfig::default()
        };
        let mut checked = 0;
        for t in 0..200 {
            if let Some((a, b)) = draw_candidate(&sp, &cfg, t) {
                let pt = exact_point(&a, &b);
                let rep = verify_point(&pt, Some(&sp)).unwrap();
                if rep.feasibility.det_b > int(0) {
                    assert!(rep.feasibility.x_tilde.iter().all(|v| *v > int(0)));
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn witness_chirotope_is_a_completion() {
        let mut found = 0;
        for text in [
            "++++++++++++",
            "++++---+---+",
            "+-++++++-+-+",
            "+-+-++--+++--+++-----+",
        ] {
            let Ok(sp) = SignPattern::parse(text) else {
                continue;
            };
            let cfg = WitnessConfig {
                trials: 2_000,
                ..WitnessConfig::default()
            };
            if let Some(rep) = find_witness(&sp, &cfg).unwrap() {
                let set = complete(&sp, SearchConfig::default()).unwrap();
                assert!(set.contains(&rep.full_chirotope().unwrap()), "{text}");
                found += 1;
            }
        }
        assert!(found >= 2);
    }

    // one surviving completion, yet impossible
    #[test]
    fn facultative_predation_has_no_witness() {
        let sp = SignPattern::parse("+--+--++-+-+").unwrap();
        assert_eq!(complete(&sp, SearchConfig::default()).unwrap().count(), 1);
        let cfg = WitnessConfig {
            trials: 5_000,
            ..WitnessConfig::default()
        };
        assert!(find_witness(&sp, &cfg).unwrap().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn seeded_search_is_deterministic(seed in any::<u64>(), bits in 0usize..16) {
            let sp = SignPattern::all_with_positive_diagonal(2).nth(bits).unwrap();
            let cfg = WitnessConfig { trials: 300, seed, ..WitnessConfig::default() };
            prop_assert_eq!(find_witness(&sp, &cfg).unwrap(), find_witness(&sp, &cfg).unwrap());
        }

        // The screen never rejects a point the exact checker accepts.
        #[test]
        fn screen_is_conservative(seed in any::<u64>(), bits in any::<u64>(), n in 2usize..=3) {
            let sp = SignPattern::all_with_positive_diagonal(n).nth((bits % (1 << (n * n))) as usize).unwrap();
            let cfg = WitnessConfig { seed, mode: SamplingMode::Direct, ..WitnessConfig::default() };
            for t in 0..50 {
                let (a, b) = draw_candidate(&sp, &cfg, t).unwrap();
                let pt = exact_point(&a, &b);
                if stability::check_point(&pt).feasible_stable() {
                    prop_assert!(screen(&a, &b));
                }
            }
        }
    }
}
