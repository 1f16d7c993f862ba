//! Classification of every positive-diagonal sign pattern of a given size.

use std::collections::BTreeMap;

use coexist_core::completion::{SearchConfig, Verdict};
use coexist_core::model::SignPattern;
use coexist_core::witness::WitnessConfig;
use coexist_core::Error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::parallel::complete_parallel;

/// Above this size enumeration needs an explicit override.
pub const GUARDRAIL_N: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationRow {
    pub canonical: String,
    pub orbit_size: usize,
    pub completions: usize,
    pub verdict: String,
    /// Some declining species has no beneficial interaction at all.
    pub trivial: bool,
    /// `found`, `none` or empty when no search was made.
    pub witness: String,
    pub witness_trials: u64,
}

impl EnumerationRow {
    /// Not trivially impossible, and either without completions or with a
    /// single completion that no sampled point realizes.
    pub fn flagged(&self) -> bool {
        !self.trivial
            && (self.verdict == Verdict::Impossible.as_str()
                || (self.completions == 1 && self.witness == "none"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerateOptions {
    pub canonical_only: bool,
    pub witness: Option<WitnessConfig>,
    pub search: SearchConfig,
    pub threads: usize,
}

/// Orbits under relabelling, keyed by canonical form, with their sizes.
pub fn orbits(n: usize) -> BTreeMap<String, (SignPattern, usize)> {
    let mut out: BTreeMap<String, (SignPattern, usize)> = BTreeMap::new();
    for sp in SignPattern::all_with_positive_diagonal(n) {
        let (canon, _) = sp.canonicalize();
        out.entry(canon.to_string()).or_insert((canon, 0)).1 += 1;
    }
    out
}

/// One row per orbit, or per pattern unless `canonical_only`. Rows are in
/// canonical order. Any truncated search is a resource-limit error.
pub fn enumerate(n: usize, opts: &EnumerateOptions) -> Result<Vec<EnumerationRow>, Error> {
    let classes = orbits(n);
    let mut jobs: Vec<(SignPattern, usize)> = Vec::new();
    for (canon, size) in classes.into_values() {
        if opts.canonical_only {
            jobs.push((canon, size));
        } else {
            let mut members = canon.orbit();
            members.sort_by_key(|m| m.to_string());
            members.dedup();
            jobs.extend(members.into_iter().map(|m| (m, size)));
        }
    }
    let run = |(sp, size): &(SignPattern, usize)| -> Result<EnumerationRow, Error> {
        let set = complete_parallel(sp, opts.search, 1)?;
        let (witness, trials) = match (&opts.witness, set.count()) {
            (Some(cfg), c) if c > 0 => match coexist_core::witness::find_witness(sp, cfg)? {
                Some(r) => ("found".to_string(), r.trials_used),
                None => ("none".to_string(), cfg.trials),
            },
            _ => (String::new(), 0),
        };
        Ok(EnumerationRow {
            canonical: sp.to_string(),
            orbit_size: *size,
            completions: set.count(),
            verdict: set.verdict().as_str().into(),
            trivial: sp.declining_without_support().is_some(),
            witness,
            witness_trials: trials,
        })
    };
    let rows: Vec<EnumerationRow> = if opts.threads > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| jobs.par_iter().map(run).collect::<Result<_, _>>())?
    } else {
        jobs.iter().map(run).collect::<Result<_, _>>()?
    };
    Ok(rows)
}

pub fn to_csv(rows: &[EnumerationRow]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub pattern: String,
    pub verdict: String,
    pub trials_used: u64,
}

pub fn witness_csv(rows: &[WitnessRow]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(canonical_only: bool) -> EnumerateOptions {
        EnumerateOptions {
            canonical_only,
            witness: None,
            search: SearchConfig::default(),
            threads: 1,
        }
    }

    #[test]
    fn two_species_has_ten_orbits() {
        let o = orbits(2);
        assert_eq!(o.len(), 10);
        assert_eq!(o.values().map(|(_, s)| s).sum::<usize>(), 16);
    }

    #[test]
    fn full_listing_covers_every_pattern() {
        let rows = enumerate(2, &opts(false)).unwrap();
        assert_eq!(rows.len(), 16);
        let canon = enumerate(2, &opts(true)).unwrap();
        assert_eq!(canon.len(), 10);
    }

    #[test]
    fn csv_has_header() {
        let rows = enumerate(2, &opts(true)).unwrap();
        let text = to_csv(&rows).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "canonical,orbit_size,completions,verdict,trivial,witness,witness_trials"
        );
        assert_eq!(lines.count(), 10);
    }

    #[test]
    fn parallel_rows_match() {
        let serial = enumerate(2, &opts(true)).unwrap();
        let par = enumerate(
            2,
            &EnumerateOptions {
                threads: 3,
                ..opts(true)
            },
        )
        .unwrap();
        assert_eq!(serial, par);
    }
}
