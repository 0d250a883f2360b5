//! The shipped list of the 146 known Deuring-Waterhouse numbers, one
//! "p e" pair per line in ascending q order, plus the verification pass
//! that recomputes every entry from scratch. The list is OEIS sequence
//! A364690.

use crate::classify::{self, ClassifySummary};
use crate::dw::{is_dw, PrimePower};
use crate::error::{Error, Result};

/// Contents of data/dw146.txt, compiled in so the binary is self-contained;
/// `--fixture PATH` substitutes an external file.
pub const FIXTURE_TEXT: &str = include_str!("../data/dw146.txt");

/// Outcome of re-verifying a fixture. `summary` is present only when every
/// entry passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureReport {
    pub verified: usize,
    pub rejections: Vec<String>,
    pub summary: Option<ClassifySummary>,
}

/// Parses "p e" lines, skipping blanks and '#' comments. Bad lines are
/// collected, not fatal, so a corrupt file is reported in one pass.
pub fn parse_fixture(text: &str) -> (Vec<PrimePower>, Vec<Error>) {
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let (p, e) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(p), Some(e), None) => (p, e),
            _ => {
                errors.push(Error::FixtureParse {
                    line,
                    message: format!("expected \"p e\", got {body:?}"),
                });
                continue;
            }
        };
        let parsed = p
            .parse::<u64>()
            .map_err(|err| err.to_string())
            .and_then(|p| {
                e.parse::<u32>()
                    .map_err(|err| err.to_string())
                    .map(|e| (p, e))
            })
            .and_then(|(p, e)| PrimePower::new(p, e).map_err(|err| err.to_string()));
        match parsed {
            Ok(pp) => entries.push(pp),
            Err(message) => errors.push(Error::FixtureParse { line, message }),
        }
    }
    (entries, errors)
}

/// Recomputes the predicate and both classifications for every entry.
pub fn verify_entries(entries: &[PrimePower]) -> FixtureReport {
    let rejections: Vec<String> = entries
        .iter()
        .filter(|pp| !is_dw(pp.p, pp.e).unwrap_or(false))
        .map(|pp| pp.to_string())
        .collect();
    let verified = entries.len() - rejections.len();
    let summary = if rejections.is_empty() && !entries.is_empty() {
        Some(classify::classify_dw_list(entries).expect("entries re-verified"))
    } else {
        None
    };
    FixtureReport {
        verified,
        rejections,
        summary,
    }
}

/// The compiled-in list as validated entries.
pub fn builtin_fixture() -> Result<Vec<PrimePower>> {
    let (entries, errors) = parse_fixture(FIXTURE_TEXT);
    match errors.into_iter().next() {
        Some(err) => Err(err),
        None => Ok(entries),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_shape() {
        let entries = builtin_fixture().unwrap();
        assert_eq!(entries.len(), 146);
        assert_eq!(entries[0].to_string(), "2^7");
        assert_eq!(entries[3].to_string(), "7^5");
        assert_eq!(entries[145].to_string(), "3^229");
        for window in entries.windows(2) {
            assert!(window[0].q < window[1].q, "ascending by q");
        }
        // the list's tail entry 3^229 is a 363-bit number
        assert_eq!(entries[145].q.bits(), 363);
    }

    #[test]
    fn builtin_verifies_clean() {
        let entries = builtin_fixture().unwrap();
        let report = verify_entries(&entries);
        assert_eq!(report.verified, 146);
        assert!(report.rejections.is_empty());
        let summary = report.summary.unwrap();
        assert_eq!(summary.defect1, 61);
        assert_eq!(summary.defect2, 85);
        assert_eq!(summary.mrd2, 26);
        assert_eq!(summary.mrd3, 120);
    }

    #[test]
    fn rejects_are_itemized() {
        let (mut entries, errors) = parse_fixture("2 7\n2 9\n3 7\n");
        assert!(errors.is_empty());
        let report = verify_entries(&entries);
        assert_eq!(report.verified, 2);
        assert_eq!(report.rejections, vec!["2^9".to_string()]);
        assert!(report.summary.is_none());
        entries.clear();
        let empty = verify_entries(&entries);
        assert_eq!(empty.verified, 0);
        assert!(empty.summary.is_none());
    }

    #[test]
    fn parse_collects_errors() {
        let text = "2 7\nnot numbers\n9 5\n# comment\n\n3 7 9\n5 0\n";
        let (entries, errors) = parse_fixture(text);
        assert_eq!(entries.len(), 1);
        assert_eq!(errors.len(), 4);
        for (err, line) in errors.iter().zip([2usize, 3, 6, 7]) {
            match err {
                Error::FixtureParse { line: l, .. } => assert_eq!(*l, line),
                other => panic!("unexpected {other:?}"),
            }
        }
    }
}
