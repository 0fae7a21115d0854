//! Independent re-checking of classification output.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::invariants::{gorenstein_index, is_gorenstein, picard_index, GeneratorMatrix};
use crate::normal_form::{normal_form_of_generator, Canonicalizer};
use crate::record::ClassificationRecord;
use crate::reflexive::is_reflexive;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyFailure {
    /// 1-based.
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    /// Records checked before the first failure, or all of them.
    pub records: usize,
    pub failure: Option<VerifyFailure>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.failure.is_none()
    }
}

/// Everything wrong with one record, checked in order; `None` if it passes.
///
/// The reflexivity test runs on the stored normal form itself, so it does not
/// share any code path with the degree-matrix invariants.
pub fn check_record(r: &ClassificationRecord, canon: Option<&Canonicalizer>) -> Option<String> {
    let q = &r.degree;
    if let Some(c) = q.failing_column() {
        return Some(format!("not a degree matrix: the columns other than {c} do not generate"));
    }
    if !is_gorenstein(q) {
        return Some("degree matrix fails the Gorenstein conditions".into());
    }
    let iota = gorenstein_index(q);
    if iota != 1 || r.gorenstein_index != 1 {
        return Some(format!("Gorenstein index is {iota}, recorded {}", r.gorenstein_index));
    }
    let pic = picard_index(q);
    if pic != r.picard_index {
        return Some(format!("Picard index is {pic}, recorded {}", r.picard_index));
    }
    let p = match GeneratorMatrix::new(r.normal_form.rows().to_vec()) {
        Ok(p) => p,
        Err(e) => return Some(format!("normal form is not a generator matrix: {e}")),
    };
    match is_reflexive(&p) {
        Ok(true) => {}
        Ok(false) => return Some("simplex of the normal form is not reflexive".into()),
        Err(e) => return Some(format!("reflexivity check failed: {e}")),
    }
    let own;
    let canon = match canon {
        Some(c) if c.weights() == q.weights() => c,
        _ => {
            own = Canonicalizer::new(q.weights());
            &own
        }
    };
    if canon.normal_form(q) != r.normal_form {
        return Some("normal form does not match the degree matrix".into());
    }
    match normal_form_of_generator(&p) {
        Ok(nf) if nf == r.normal_form => None,
        Ok(_) => Some("normal form is not idempotent".into()),
        Err(e) => Some(format!("normal form of the normal form failed: {e}")),
    }
}

/// Checks every line of a record file and stops at the first failure.
///
/// Besides [`check_record`], each line must be in canonical form and records
/// must be strictly increasing in (weights, normal-form bytes), which also
/// rules out duplicates.
pub fn verify_file(path: &Path) -> Result<VerifyReport> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    verify_lines(BufReader::new(f).lines().map(|l| l.map_err(|e| Error::Io(e.to_string()))))
}

pub fn verify_lines<I: IntoIterator<Item = Result<String>>>(lines: I) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let mut previous: Option<(Vec<crate::Int>, Vec<u8>)> = None;
    let mut canon: Option<Canonicalizer> = None;
    for (i, line) in lines.into_iter().enumerate() {
        let line = line?;
        let fail = |reason: String| VerifyReport { records: report.records, failure: Some(VerifyFailure { line: i + 1, reason }) };
        let r = match ClassificationRecord::from_line(&line) {
            Ok(r) => r,
            Err(e) => return Ok(fail(format!("malformed record: {e}"))),
        };
        if r.to_line() != line {
            return Ok(fail("record is not in canonical form".into()));
        }
        if canon.as_ref().is_none_or(|c| c.weights() != r.degree.weights()) {
            canon = Some(Canonicalizer::new(r.degree.weights()));
        }
        if let Some(reason) = check_record(&r, canon.as_ref()) {
            return Ok(fail(reason));
        }
        let k = (r.degree.weights().to_vec(), r.normal_form.to_bytes());
        if previous.as_ref().is_some_and(|p| *p >= k) {
            return Ok(fail("record is out of order or duplicated".into()));
        }
        previous = Some(k);
        report.records += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_weight;

    fn lines(w: &[crate::Int]) -> Vec<String> {
        classify_weight(w).iter().map(|r| r.to_line()).collect()
    }

    fn run(lines: &[String]) -> VerifyReport {
        verify_lines(lines.iter().cloned().map(Ok)).unwrap()
    }

    #[test]
    fn clean_shard() {
        let l = lines(&[1, 1, 1, 1]);
        let report = run(&l);
        assert!(report.is_clean(), "{report:?}");
        assert_eq!(report.records, l.len());
        assert_eq!(run(&[]), VerifyReport::default());
    }

    #[test]
    fn corrupted_torsion_entry() {
        let mut l = lines(&[1, 1, 1, 1]);
        let idx = l.iter().position(|s| s.contains("\"torsion\":[[")).unwrap();
        l[idx] = l[idx].replacen("\"torsion\":[[\"0\"", "\"torsion\":[[\"1\"", 1);
        let report = run(&l);
        assert_eq!(report.failure.unwrap().line, idx + 1);
        assert_eq!(report.records, idx);
    }

    #[test]
    fn duplicates_and_order() {
        let l = lines(&[1, 1, 1]);
        let doubled = vec![l[0].clone(), l[0].clone()];
        assert_eq!(run(&doubled).failure.unwrap().line, 2);
        let reversed: Vec<String> = l.iter().rev().cloned().collect();
        assert_eq!(run(&reversed).failure.unwrap().line, 2);
        assert_eq!(run(&["nonsense".to_string()]).failure.unwrap().line, 1);
    }

    #[test]
    fn wrong_indices() {
        let l = lines(&[1, 1, 1]);
        let bad = l[1].replace("\"picard_index\":\"3\"", "\"picard_index\":\"4\"");
        assert_ne!(bad, l[1]);
        assert!(run(&[bad]).failure.unwrap().reason.contains("Picard"));
    }
}
