//! Command implementations behind the `coexist` binary. Each returns a
//! [`CommandResult`]; the binary only parses flags and prints.

use std::fmt::Write as _;
use std::path::Path;

use coexist_core::completion::{BranchHeuristic, CompletionSet, SearchConfig, Verdict};
use coexist_core::grassmann::{BasisTable, Initialization};
use coexist_core::model::{MagnitudeRange, SignPattern};
use coexist_core::witness::{verify_point, SamplingMode, WitnessConfig, WitnessReport};
use coexist_core::Error;
use serde::Serialize;

use crate::checks::{self, Section};
use crate::dsl::parse_pattern_arg;
use crate::enumerate::{enumerate, to_csv, witness_csv, EnumerateOptions, WitnessRow, GUARDRAIL_N};
use crate::formats::{
    CertificateJson, CompletionSetJson, PatternJson, PointJson, StatsJson, WitnessReportJson,
    WitnessSearchJson, SCHEMA_VERSION,
};
use crate::parallel::{complete_parallel, find_witness_parallel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    CheckFailed = 1,
    Input = 2,
    ResourceLimit = 3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub command: String,
    pub payload: serde_json::Value,
    pub summary: String,
    /// Replaces the summary when CSV output was requested.
    pub csv: Option<String>,
    pub exit: Exit,
}

impl CommandResult {
    fn new(command: String, payload: impl Serialize, summary: String, exit: Exit) -> Self {
        Self {
            command,
            payload: serde_json::to_value(payload).expect("serializable payload"),
            summary,
            csv: None,
            exit,
        }
    }

    pub fn input_error(command: &str, err: &Error) -> Self {
        Self::new(
            command.into(),
            serde_json::json!({ "schema_version": SCHEMA_VERSION, "error": err.to_string() }),
            format!("error: {err}"),
            Exit::Input,
        )
    }
}

/// Pattern text, a network description, or a path to a pattern JSON file.
pub fn read_pattern(arg: &str, allow_negative_diagonal: bool) -> Result<SignPattern, Error> {
    if arg.ends_with(".json") && Path::new(arg).is_file() {
        let text =
            std::fs::read_to_string(arg).map_err(|e| Error::Config(format!("{arg}: {e}")))?;
        let doc: PatternJson =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{arg}: {e}")))?;
        return doc.to_pattern(allow_negative_diagonal);
    }
    parse_pattern_arg(arg, allow_negative_diagonal)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompleteArgs {
    pub pattern: String,
    pub no_feasibility: bool,
    pub no_stability: bool,
    pub free_det_sign: bool,
    pub max_nodes: u64,
    pub first_only: bool,
    pub trivial_init: bool,
    pub lowest_rank: bool,
    pub parallel: usize,
    pub allow_negative_diagonal: bool,
}

impl Default for CompleteArgs {
    fn default() -> Self {
        Self {
            pattern: String::new(),
            no_feasibility: false,
            no_stability: false,
            free_det_sign: false,
            max_nodes: SearchConfig::default().max_nodes,
            first_only: false,
            trivial_init: false,
            lowest_rank: false,
            parallel: 1,
            allow_negative_diagonal: false,
        }
    }
}

impl CompleteArgs {
    pub fn config(&self) -> SearchConfig {
        SearchConfig {
            enable_feasibility: !self.no_feasibility,
            enable_stability: !self.no_stability,
            det_b_positive: !self.free_det_sign,
            branch_heuristic: if self.lowest_rank {
                BranchHeuristic::LowestRank
            } else {
                BranchHeuristic::MostConstrained
            },
            max_nodes: self.max_nodes,
            collect_all: !self.first_only,
            initialization: if self.trivial_init {
                Initialization::TrivialOnly
            } else {
                Initialization::Generalized
            },
        }
    }
}

fn exit_for(set: &CompletionSet) -> Exit {
    if set.verdict() == Verdict::ResourceLimit {
        Exit::ResourceLimit
    } else {
        Exit::Ok
    }
}

fn completion_table(n: usize, completion: &str) -> String {
    let table = BasisTable::new(n);
    let mut out = String::new();
    for (r, c) in completion.chars().enumerate() {
        let _ = write!(
            out,
            "{}{}={c}",
            if r == 0 { "" } else { " " },
            table.label(r)
        );
    }
    out
}

pub fn cmd_complete(args: &CompleteArgs) -> CommandResult {
    let command = format!("complete {}", args.pattern);
    let sp = match read_pattern(&args.pattern, args.allow_negative_diagonal) {
        Ok(sp) => sp,
        Err(e) => return CommandResult::input_error(&command, &e),
    };
    let set = match complete_parallel(&sp, args.config(), args.parallel) {
        Ok(set) => set,
        Err(e) => return CommandResult::input_error(&command, &e),
    };
    let mut summary = format!(
        "pattern {sp}\nverdict {} ({} completion{}, {} nodes)",
        set.verdict(),
        set.count(),
        if set.count() == 1 { "" } else { "s" },
        set.stats.nodes
    );
    for c in set.completion_strings().iter().take(16) {
        let _ = write!(summary, "\n{c}");
        if set.count() == 1 {
            let _ = write!(summary, "\n{}", completion_table(sp.n(), c));
        }
    }
    if set.count() > 16 {
        let _ = write!(summary, "\n... {} more (use --json)", set.count() - 16);
    }
    if set.truncated {
        let _ = write!(
            summary,
            "\nnode budget of {} exhausted",
            set.config.max_nodes
        );
    }
    CommandResult::new(
        command,
        CompletionSetJson::from(&set),
        summary,
        exit_for(&set),
    )
}

/// A compact id for the symmetry class: `n`, then the canonical signs of
/// `a` and the off-diagonal of `B` as hex bits (`-` = 1).
pub fn class_id(canonical: &SignPattern) -> String {
    let mut bits: Vec<bool> = canonical.a_signs().iter().map(|s| !s.is_plus()).collect();
    bits.extend(canonical.off_diagonal().iter().map(|s| !s.is_plus()));
    let mut hex = String::new();
    for chunk in bits.chunks(4) {
        let v = chunk.iter().fold(0u8, |acc, &b| acc << 1 | b as u8) << (4 - chunk.len());
        let _ = write!(hex, "{v:x}");
    }
    format!("n{}-{hex}", canonical.n())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyArgs {
    pub pattern: String,
    pub max_nodes: u64,
    pub witness_trials: u64,
    pub seed: u64,
    pub parallel: usize,
}

impl Default for CertifyArgs {
    fn default() -> Self {
        Self {
            pattern: String::new(),
            max_nodes: SearchConfig::default().max_nodes,
            witness_trials: 10_000,
            seed: 0,
            parallel: 1,
        }
    }
}

#[derive(Serialize)]
struct CertifyPayload {
    #[serde(flatten)]
    certificate: CertificateJson,
    note: Option<String>,
    witness: Option<WitnessReportJson>,
}

pub fn cmd_certify(args: &CertifyArgs) -> CommandResult {
    let command = format!("certify {}", args.pattern);
    let sp = match read_pattern(&args.pattern, false) {
        Ok(sp) => sp,
        Err(e) => return CommandResult::input_error(&command, &e),
    };
    let cfg = SearchConfig {
        max_nodes: args.max_nodes,
        ..SearchConfig::default()
    };
    let set = match complete_parallel(&sp, cfg, args.parallel) {
        Ok(set) => set,
        Err(e) => return CommandResult::input_error(&command, &e),
    };
    let (canonical, _) = sp.canonicalize();
    let verdict = set.verdict();
    let witness = if verdict == Verdict::Possible && args.witness_trials > 0 {
        let wcfg = WitnessConfig {
            trials: args.witness_trials,
            seed: args.seed,
            ..WitnessConfig::default()
        };
        find_witness_parallel(&sp, &wcfg, args.parallel)
            .ok()
            .flatten()
    } else {
        None
    };
    let note = match (verdict, &witness) {
        (Verdict::Possible, Some(_)) => {
            Some("a sampled witness point realizes the pattern".to_string())
        }
        (Verdict::Possible, None) => Some(
            "completions survive the sign relaxation, which does not prove realizability; \
             no witness was found and finer minor analysis may still refute the pattern"
                .to_string(),
        ),
        (Verdict::Impossible, _) if sp.declining_without_support().is_some() => Some(
            "trivially impossible: a declining species has no beneficial interaction".to_string(),
        ),
        _ => None,
    };
    let mut summary = format!(
        "pattern {sp}\ncanonical {canonical} (class {})\nverdict {verdict} ({} completion{})",
        class_id(&canonical),
        set.count(),
        if set.count() == 1 { "" } else { "s" }
    );
    if let Some(n) = &note {
        let _ = write!(summary, "\nnote: {n}");
    }
    if let Some(w) = &witness {
        let _ = write!(
            summary,
            "\nwitness after {} trials: {}",
            w.trials_used,
            point_summary(w)
        );
    }
    let payload = CertifyPayload {
        certificate: CertificateJson {
            schema_version: SCHEMA_VERSION.into(),
            pattern: sp.to_string(),
            canonical: canonical.to_string(),
            class_id: class_id(&canonical),
            verdict: verdict.as_str().into(),
            count: set.count(),
            completions: set.completion_strings(),
            stats: StatsJson {
                nodes: set.stats.nodes,
                inferences: set.stats.inferences,
                conflicts: set.stats.conflicts,
            },
        },
        note,
        witness: witness.as_ref().map(WitnessReportJson::from),
    };
    CommandResult::new(command, payload, summary, exit_for(&set))
}

fn point_summary(w: &WitnessReport) -> String {
    let doc = PointJson::from_point(&w.point);
    serde_json::to_string(&doc).expect("serializable point")
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerateArgs {
    pub n: usize,
    pub canonical_only: bool,
    pub with_witness: bool,
    pub trials: u64,
    pub seed: u64,
    pub max_nodes: u64,
    pub allow_large: bool,
    pub parallel: usize,
}

impl Default for EnumerateArgs {
    fn default() -> Self {
        Self {
            n: 2,
            canonical_only: false,
            with_witness: false,
            trials: 10_000,
            seed: 0,
            max_nodes: 1_000_000,
            allow_large: false,
            parallel: 1,
        }
    }
}

pub fn cmd_enumerate(args: &EnumerateArgs) -> CommandResult {
    let command = format!("enumerate {}", args.n);
    if args.n < 2 || args.n > coexist_core::grassmann::MAX_N {
        let e = Error::Unsupported {
            n: args.n,
            max: coexist_core::grassmann::MAX_N,
        };
        return CommandResult::input_error(&command, &e);
    }
    if args.n > GUARDRAIL_N && !args.allow_large {
        let e = Error::Config(format!(
            "enumerating n = {} visits 2^{} patterns; pass --allow-large to run it",
            args.n,
            args.n * args.n
        ));
        return CommandResult::input_error(&command, &e);
    }
    let opts = EnumerateOptions {
        canonical_only: args.canonical_only,
        witness: args.with_witness.then_some(WitnessConfig {
            trials: args.trials,
            seed: args.seed,
            ..WitnessConfig::default()
        }),
        search: SearchConfig {
            max_nodes: args.max_nodes,
            ..SearchConfig::default()
        },
        threads: args.parallel,
    };
    let rows = match enumerate(args.n, &opts) {
        Ok(rows) => rows,
        Err(e) => return CommandResult::input_error(&command, &e),
    };
    let count = |v: Verdict| rows.iter().filter(|r| r.verdict == v.as_str()).count();
    let flagged: Vec<&str> = rows
        .iter()
        .filter(|r| r.flagged())
        .map(|r| r.canonical.as_str())
        .collect();
    let mut summary = format!(
        "n = {}: {} {}; {} impossible ({} trivially), {} possible, {} over budget",
        args.n,
        rows.len(),
        if args.canonical_only {
            "classes"
        } else {
            "patterns"
        },
        count(Verdict::Impossible),
        rows.iter()
            .filter(|r| r.trivial && r.verdict == Verdict::Impossible.as_str())
            .count(),
        count(Verdict::Possible),
        count(Verdict::ResourceLimit)
    );
    if args.with_witness {
        let _ = write!(
            summary,
            "\nflagged (nontrivial, impossible or one unwitnessed completion): {}",
            flagged.join(" ")
        );
    }
    let exit = if count(Verdict::ResourceLimit) > 0 {
        Exit::ResourceLimit
    } else {
        Exit::Ok
    };
    let payload = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "n": args.n,
        "canonical_only": args.canonical_only,
        "rows": rows,
        "flagged": flagged,
    });
    let mut result = CommandResult::new(command, payload, summary, exit);
    result.csv = to_csv(&rows).ok();
    result
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessArgs {
    pub pattern: Option<String>,
    pub trials: u64,
    pub seed: u64,
    pub fixed_equilibrium: bool,
    pub direct: bool,
    pub low: f64,
    pub high: f64,
    pub check_point: Option<String>,
    pub parallel: usize,
}

impl Default for WitnessArgs {
    fn default() -> Self {
        let range = MagnitudeRange::default();
        Self {
            pattern: None,
            trials: 10_000,
            seed: 0,
            fixed_equilibrium: false,
            direct: false,
            low: range.low,
            high: range.high,
            check_point: None,
            parallel: 1,
        }
    }
}

pub fn cmd_witness(args: &WitnessArgs) -> CommandResult {
    if let Some(path) = &args.check_point {
        return check_point_file(path, args.pattern.as_deref());
    }
    let Some(text) = &args.pattern else {
        return CommandResult::input_error(
            "witness",
            &Error::Config("a pattern or --check-point is required".into()),
        );
    };
    let command = format!("witness {text}");
    let sp = match read_pattern(text, false) {
        Ok(sp) => sp,
        Err(e) => return CommandResult::input_error(&command, &e),
    };
    let range = match MagnitudeRange::new(args.low, args.high) {
        Ok(r) => r,
        Err(e) => return CommandResult::input_error(&command, &e),
    };
    let mode = match (args.fixed_equilibrium, args.direct) {
        (true, false) => SamplingMode::FixedEquilibrium,
        (false, true) => SamplingMode::Direct,
        (false, false) => SamplingMode::Mixed,
        (true, true) => {
            let e = Error::Config("--fixed-equilibrium and --direct are exclusive".into());
            return CommandResult::input_error(&command, &e);
        }
    };
    let cfg = WitnessConfig {
        trials: args.trials,
        seed: args.seed,
        range,
        mode,
    };
    let found = match find_witness_parallel(&sp, &cfg, args.parallel) {
        Ok(f) => f,
        Err(e) => return CommandResult::input_error(&command, &e),
    };
    let mode_name = match mode {
        SamplingMode::Direct => "direct",
        SamplingMode::FixedEquilibrium => "fixed-equilibrium",
        SamplingMode::Mixed => "mixed",
    };
    let summary = match &found {
        Some(w) => format!(
            "pattern {sp}\nwitness found at trial {}\npoint {}",
            w.trials_used,
            point_summary(w)
        ),
        None => format!(
            "pattern {sp}\nnone found in {} trials (seed {}); this is not a proof of impossibility",
            args.trials, args.seed
        ),
    };
    let row = WitnessRow {
        pattern: sp.to_string(),
        verdict: if found.is_some() { "found" } else { "none" }.into(),
        trials_used: found.as_ref().map_or(args.trials, |w| w.trials_used),
    };
    let payload = WitnessSearchJson {
        schema_version: SCHEMA_VERSION.into(),
        pattern: sp.to_string(),
        trials: args.trials,
        seed: args.seed,
        mode: mode_name.into(),
        found: found.is_some(),
        report: found.as_ref().map(WitnessReportJson::from),
    };
    let mut result = CommandResult::new(command, payload, summary, Exit::Ok);
    result.csv = witness_csv(&[row]).ok();
    result
}

fn check_point_file(path: &str, pattern: Option<&str>) -> CommandResult {
    let command = format!("witness --check-point {path}");
    let load = || -> Result<(coexist_core::model::ParameterPoint, Option<SignPattern>), Error> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
        let doc: PointJson =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{path}: {e}")))?;
        let expected = match pattern {
            Some(p) => Some(read_pattern(p, false)?),
            None => doc.expected_pattern()?,
        };
        Ok((doc.to_point()?, expected))
    };
    let (point, expected) = match load() {
        Ok(v) => v,
        Err(e) => return CommandResult::input_error(&command, &e),
    };
    let report = match verify_point(&point, expected.as_ref()) {
        Ok(r) => r,
        Err(e) => return CommandResult::input_error(&command, &e),
    };
    let summary = format!(
        "pattern {}\nfeasible {}, stable {}, zero-free chirotope {}\nverdict {}",
        report.pattern,
        report.feasibility.feasible,
        report.hurwitz.stable,
        report.chirotope.iter().all(Option::is_some),
        if report.feasible_stable() {
            "feasible-stable"
        } else {
            "not feasible-stable"
        }
    );
    let exit = if report.feasible_stable() {
        Exit::Ok
    } else {
        Exit::CheckFailed
    };
    CommandResult::new(command, WitnessReportJson::from(&report), summary, exit)
}

pub fn cmd_check_paper(section: Option<&str>) -> CommandResult {
    let command = format!(
        "check-paper{}",
        section
            .map(|s| format!(" --section {s}"))
            .unwrap_or_default()
    );
    let section = match section.map(|s| Section::parse(s).ok_or(s)) {
        None => None,
        Some(Ok(s)) => Some(s),
        Some(Err(s)) => {
            let names: Vec<&str> = Section::ALL.iter().map(|s| s.name()).collect();
            let e = Error::Config(format!(
                "unknown section {s:?}; expected one of {}",
                names.join(", ")
            ));
            return CommandResult::input_error(&command, &e);
        }
    };
    let results = checks::run(section);
    let report = checks::report_json(&results);
    let mut summary: String = results.iter().map(|c| c.line() + "\n").collect();
    let _ = write!(
        summary,
        "{} passed, {} failed",
        report.passed, report.failed
    );
    let exit = if report.failed == 0 {
        Exit::Ok
    } else {
        Exit::CheckFailed
    };
    CommandResult::new(command, report, summary, exit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_counts_quartet_member() {
        let r = cmd_complete(&CompleteArgs {
            pattern: "+--+--++-+-+".into(),
            ..CompleteArgs::default()
        });
        assert_eq!(r.exit, Exit::Ok);
        assert_eq!(r.payload["count"], 1);
        assert!(r.summary.contains("123=+"));
    }

    #[test]
    fn malformed_pattern_is_input_error() {
        let r = cmd_complete(&CompleteArgs {
            pattern: "+-+".into(),
            ..CompleteArgs::default()
        });
        assert_eq!(r.exit, Exit::Input);
    }

    #[test]
    fn budget_is_resource_limit() {
        let r = cmd_complete(&CompleteArgs {
            pattern: "++++++++++++".into(),
            max_nodes: 1,
            ..CompleteArgs::default()
        });
        assert_eq!(r.exit, Exit::ResourceLimit);
        assert_eq!(r.payload["verdict"], "resource-limit");
    }

    #[test]
    fn class_ids() {
        let sp = SignPattern::parse("---+---+---+").unwrap();
        assert_eq!(class_id(&sp), "n3-ff8");
        let sp = SignPattern::parse("++++++").unwrap();
        assert_eq!(class_id(&sp), "n2-0");
    }

    #[test]
    fn guardrail() {
        let r = cmd_enumerate(&EnumerateArgs {
            n: 4,
            ..EnumerateArgs::default()
        });
        assert_eq!(r.exit, Exit::Input);
    }

    #[test]
    fn witness_requires_input() {
        assert_eq!(cmd_witness(&WitnessArgs::default()).exit, Exit::Input);
    }

    #[test]
    fn unknown_section() {
        assert_eq!(cmd_check_paper(Some("n9")).exit, Exit::Input);
    }
}
