//! One line of classification output.
//!
//! Records are JSON objects with every integer written as a decimal string.
//! [`ClassificationRecord::to_line`] is canonical: parsing a line and writing
//! it back must give the same bytes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Int;
use crate::error::{Error, Result};
use crate::invariants::{gorenstein_index, picard_index, DegreeMatrix};
use crate::normal_form::NormalForm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationRecord {
    pub degree: DegreeMatrix,
    pub normal_form: NormalForm,
    pub picard_index: Int,
    pub gorenstein_index: Int,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    dim: String,
    class_group: Vec<String>,
    weights: Vec<String>,
    torsion: Vec<Vec<String>>,
    normal_form: Vec<Vec<String>>,
    picard_index: String,
    gorenstein_index: String,
}

fn strings(v: &[Int]) -> Vec<String> {
    v.iter().map(Int::to_string).collect()
}

fn ints(v: &[String], what: &str) -> Result<Vec<Int>> {
    v.iter().map(|s| int(s, what)).collect()
}

fn int(s: &str, what: &str) -> Result<Int> {
    // reject forms such as "+1" or "007" that would not write back identically
    let x: Int = s.parse().map_err(|_| Error::Parse(format!("{what}: bad integer {s:?}")))?;
    if x.to_string() != s {
        return Err(Error::Parse(format!("{what}: non-canonical integer {s:?}")));
    }
    Ok(x)
}

impl ClassificationRecord {
    pub fn new(degree: DegreeMatrix, normal_form: NormalForm) -> Self {
        let picard_index = picard_index(&degree);
        let gorenstein_index = gorenstein_index(&degree);
        Self { degree, normal_form, picard_index, gorenstein_index }
    }

    pub fn dim(&self) -> usize {
        self.degree.dim()
    }

    pub fn to_line(&self) -> String {
        let q = &self.degree;
        let wire = Wire {
            dim: q.dim().to_string(),
            class_group: strings(q.factors()),
            weights: strings(q.weights()),
            torsion: q.torsion().iter().map(|r| strings(r)).collect(),
            normal_form: self.normal_form.rows().iter().map(|r| strings(r)).collect(),
            picard_index: self.picard_index.to_string(),
            gorenstein_index: self.gorenstein_index.to_string(),
        };
        serde_json::to_string(&wire).expect("records serialize")
    }

    /// Parses a line without re-deriving anything: the degree matrix is only
    /// shape-checked and the stored indices are kept as written.
    pub fn from_line(line: &str) -> Result<Self> {
        let wire: Wire = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
        let dim = int(&wire.dim, "dim")?;
        let weights = ints(&wire.weights, "weights")?;
        let factors = ints(&wire.class_group, "class_group")?;
        if wire.torsion.len() != factors.len() {
            return Err(Error::Parse(format!(
                "{} torsion rows for {} invariant factors",
                wire.torsion.len(),
                factors.len()
            )));
        }
        let torsion = factors
            .iter()
            .zip(&wire.torsion)
            .map(|(&m, r)| Ok((m, ints(r, "torsion")?)))
            .collect::<Result<Vec<_>>>()?;
        let degree = DegreeMatrix::new_unverified(weights, torsion)?;
        if dim != degree.dim() as Int {
            return Err(Error::Parse(format!("dim {dim} for {} weights", degree.weights().len())));
        }
        let rows = wire.normal_form.iter().map(|r| ints(r, "normal_form")).collect::<Result<Vec<_>>>()?;
        let normal_form = NormalForm::from_rows(rows)?;
        Ok(Self {
            degree,
            normal_form,
            picard_index: int(&wire.picard_index, "picard_index")?,
            gorenstein_index: int(&wire.gorenstein_index, "gorenstein_index")?,
        })
    }

    /// Header of the invariant summary written by `--format csv`.
    pub const CSV_HEADER: &'static str = "dim,weights,class_group,picard_index,gorenstein_index";

    /// Lists inside a field are space separated.
    pub fn to_csv(&self) -> String {
        let join = |v: &[Int]| v.iter().map(Int::to_string).collect::<Vec<_>>().join(" ");
        format!(
            "{},{},{},{},{}",
            self.dim(),
            join(self.degree.weights()),
            join(self.degree.factors()),
            self.picard_index,
            self.gorenstein_index
        )
    }
}

/// `Z ⊕ Z/μ_1 ⊕ …` written as `Z x Z/μ_1 x …`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassGroup(pub Vec<Int>);

impl fmt::Display for ClassGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z")?;
        for m in &self.0 {
            write!(f, " x Z/{m}")?;
        }
        Ok(())
    }
}
