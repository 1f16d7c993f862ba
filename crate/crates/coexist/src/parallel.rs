//! Deterministic parallel search and witness sampling on a rayon pool.

use coexist_core::completion::{CompletionSet, Search, SearchConfig};
use coexist_core::model::SignPattern;
use coexist_core::witness::{try_trial, WitnessConfig, WitnessReport};
use coexist_core::Error;
use rayon::prelude::*;

fn pool(threads: usize) -> Result<rayon::ThreadPool, Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))
}

/// Searches subtrees on `threads` workers. Completions and the verdict match
/// the single-threaded run; node counts may differ when the budget is hit.
pub fn complete_parallel(
    sp: &SignPattern,
    cfg: SearchConfig,
    threads: usize,
) -> Result<CompletionSet, Error> {
    let search = Search::new(sp, cfg)?;
    if threads <= 1 || !cfg.collect_all {
        return Ok(search.run());
    }
    let (head, open) = search.split(threads * 8);
    let parts: Vec<CompletionSet> =
        pool(threads)?.install(|| open.par_iter().map(|node| search.run_from(node)).collect());
    let mut all = vec![head];
    all.extend(parts);
    Ok(CompletionSet::merge(all))
}

/// Like [`coexist_core::witness::find_witness`]; trials run in chunks and
/// the lowest successful trial index wins.
pub fn find_witness_parallel(
    sp: &SignPattern,
    cfg: &WitnessConfig,
    threads: usize,
) -> Result<Option<WitnessReport>, Error> {
    if threads <= 1 {
        return coexist_core::witness::find_witness(sp, cfg);
    }
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be positive".into()));
    }
    let chunk = 256 * threads as u64;
    pool(threads)?.install(|| {
        let mut start = 0;
        while start < cfg.trials {
            let end = (start + chunk).min(cfg.trials);
            let hit = (start..end)
                .into_par_iter()
                .find_map_first(|t| try_trial(sp, cfg, t));
            if hit.is_some() {
                return Ok(hit);
            }
            start = end;
        }
        Ok(None)
    })
}
