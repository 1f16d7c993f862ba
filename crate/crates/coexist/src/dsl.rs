//! Pattern arguments: flat sign strings or a small network language.
//!
//! ```text
//! n=3; grow 1; mutual 2 3; pred 1>2; comp 1 3
//! ```
//!
//! Species are 1-based. Every species declines unless listed in `grow`, and
//! every pair competes unless stated otherwise. `pred i>j` means `i` predates
//! on `j`.

use coexist_core::model::{EcologicalNetwork, Sign, SignPattern};
use coexist_core::Error;

pub fn parse_network(text: &str) -> Result<EcologicalNetwork, Error> {
    let bad = |msg: String| Error::Network(msg);
    let mut stmts = text
        .split([';', '\n'])
        .map(str::trim)
        .filter(|s| !s.is_empty());
    let head = stmts.next().ok_or_else(|| bad("empty network".into()))?;
    let n: usize = head
        .strip_prefix("n")
        .map(|r| r.trim_start())
        .and_then(|r| r.strip_prefix('='))
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| bad(format!("expected `n=<species>` first, found {head:?}")))?;
    if n == 0 {
        return Err(bad("n must be positive".into()));
    }
    let species = |tok: &str| -> Result<usize, Error> {
        match tok.trim().parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
            _ => Err(bad(format!("species {tok:?} is not in 1..={n}"))),
        }
    };
    let mut growth = vec![Sign::Minus; n];
    let mut edits: Vec<(String, Vec<usize>)> = Vec::new();
    for stmt in stmts {
        let (word, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
        match word {
            "grow" | "decline" => {
                for tok in rest.split_whitespace() {
                    growth[species(tok)?] = if word == "grow" {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    };
                }
            }
            "comp" | "mutual" => {
                let ids = rest
                    .split_whitespace()
                    .map(species)
                    .collect::<Result<Vec<_>, _>>()?;
                if ids.len() != 2 {
                    return Err(bad(format!("`{word}` takes two species: {stmt:?}")));
                }
                edits.push((word.into(), ids));
            }
            "pred" => {
                let (i, j) = rest
                    .split_once('>')
                    .ok_or_else(|| bad(format!("expected `pred i>j`: {stmt:?}")))?;
                edits.push(("pred".into(), vec![species(i)?, species(j)?]));
            }
            _ => return Err(bad(format!("unknown statement {stmt:?}"))),
        }
    }
    let mut net = EcologicalNetwork::new(growth);
    for (word, ids) in edits {
        let (i, j) = (ids[0], ids[1]);
        match word.as_str() {
            "comp" => net.set_competition(i, j)?,
            "mutual" => net.set_mutualism(i, j)?,
            _ => net.set_predation(i, j)?,
        }
    }
    Ok(net)
}

/// Reads a flat pattern, or a network when the text starts with `n=`.
pub fn parse_pattern_arg(text: &str, allow_negative_diagonal: bool) -> Result<SignPattern, Error> {
    let t = text.trim();
    if t.starts_with('n') {
        return Ok(parse_network(t)?.to_sign_pattern());
    }
    // n^2 signs: `a` then the off-diagonal of B, with a positive diagonal.
    let len = t.chars().filter(|c| matches!(c, '+' | '-')).count();
    let root = (1..=len).find(|k| k * k >= len).unwrap_or(0);
    if len > 0 && root * root == len {
        SignPattern::parse_compact(t)
    } else {
        SignPattern::parse_with(t, allow_negative_diagonal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_form() {
        let full = parse_pattern_arg("+--+++++-+-+", false).unwrap();
        assert_eq!(parse_pattern_arg("+--+++-+-", false).unwrap(), full);
        assert_eq!(
            parse_pattern_arg("--+-", false).unwrap().to_string(),
            "--++-+"
        );
    }

    #[test]
    fn spec_style_network() {
        let sp = parse_pattern_arg("n=3; grow 1; mutual 2 3; pred 1>2; comp 1 3", false).unwrap();
        // a = (+,-,-); b12 = -, b21 = +; b23 = b32 = -; b13 = b31 = +
        assert_eq!(sp, SignPattern::parse("+-- +-+ ++- +-+").unwrap());
    }

    #[test]
    fn defaults_are_decline_and_competition() {
        let sp = parse_pattern_arg("n=2", false).unwrap();
        assert_eq!(sp, SignPattern::parse("--++++").unwrap());
    }

    #[test]
    fn predation_direction() {
        let sp = parse_pattern_arg("n=2; grow 1 2; pred 1>2", false).unwrap();
        assert_eq!(sp, SignPattern::parse("+++-++").unwrap());
    }

    #[test]
    fn obligate_mutualism() {
        let sp = parse_pattern_arg("n=3\nmutual 1 2\nmutual 1 3\nmutual 2 3", false).unwrap();
        assert_eq!(sp, SignPattern::parse("---+---+---+").unwrap());
    }

    #[test]
    fn errors() {
        for bad in [
            "n=0",
            "n=2; grow 3",
            "n=2; pred 1 2",
            "n=2; eat 1 2",
            "n=2; comp 1",
            "n=2; comp 1 1",
            "nope",
        ] {
            assert!(parse_pattern_arg(bad, false).is_err(), "{bad}");
        }
        assert!(parse_pattern_arg("++-+++", false).is_err());
    }

    #[test]
    fn flat_text_passes_through() {
        assert_eq!(
            parse_pattern_arg(" -- +--+ ", false).unwrap(),
            SignPattern::parse("--+--+").unwrap()
        );
    }
}
