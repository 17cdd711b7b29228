//! JSON documents for verdicts. Integers are decimal strings and variables
//! are named `x1, x2, ...`, with `x(n+1)` the homogenizing variable.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::binomial::{Binomial, Degree, Exponents};
use crate::error::{usage, Result};
use crate::families::FamilyVerdict;
use crate::oracle::OracleReport;
use crate::reduction::ReductionStep;
use crate::semigroup::{Certificate, CurveSpec};
use crate::verdict::{Decision, Method, Verdict};

pub fn var(slot: usize) -> String {
    format!("x{}", slot + 1)
}

pub fn slot_of(name: &str) -> Result<usize> {
    name.strip_prefix('x')
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .map(|k| k - 1)
        .ok_or_else(|| usage(format!("'{name}' is not a variable name")))
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| usage(format!("'{s}' is not a decimal integer")))
}

fn exps_doc(e: &Exponents) -> BTreeMap<String, String> {
    e.iter().map(|(&i, c)| (var(i), c.to_string())).collect()
}

fn exps_from_doc(doc: &BTreeMap<String, String>) -> Result<Exponents> {
    doc.iter().map(|(k, v)| Ok((slot_of(k)?, num::<BigUint>(v)?))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DegreeDoc {
    Affine(String),
    Projective([String; 2]),
}

impl From<&Degree> for DegreeDoc {
    fn from(d: &Degree) -> Self {
        match d {
            Degree::Affine(b) => DegreeDoc::Affine(b.to_string()),
            Degree::Projective(b1, b2) => DegreeDoc::Projective([b1.to_string(), b2.to_string()]),
        }
    }
}

impl DegreeDoc {
    pub fn to_degree(&self) -> Result<Degree> {
        Ok(match self {
            DegreeDoc::Affine(b) => Degree::Affine(num(b)?),
            DegreeDoc::Projective([b1, b2]) => Degree::Projective(num(b1)?, num(b2)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinomialDoc {
    pub plus: BTreeMap<String, String>,
    pub minus: BTreeMap<String, String>,
    pub degree: DegreeDoc,
}

impl From<&Binomial> for BinomialDoc {
    fn from(b: &Binomial) -> Self {
        Self { plus: exps_doc(b.plus()), minus: exps_doc(b.minus()), degree: b.degree().into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum StepDoc {
    Scale { var: String, factor: String },
    Remove { var: String, target: String, certificate: BTreeMap<String, String> },
    DropIsolated { var: String },
}

impl From<&ReductionStep> for StepDoc {
    fn from(s: &ReductionStep) -> Self {
        match s {
            ReductionStep::Scale { slot, factor } => StepDoc::Scale { var: var(*slot), factor: factor.to_string() },
            ReductionStep::Remove { slot, certificate } => StepDoc::Remove {
                var: var(*slot),
                target: certificate.target().to_string(),
                certificate: exps_doc(certificate.coeffs()),
            },
            ReductionStep::DropIsolated { slot } => StepDoc::DropIsolated { var: var(*slot) },
        }
    }
}

impl StepDoc {
    pub fn to_step(&self) -> Result<ReductionStep> {
        Ok(match self {
            StepDoc::Scale { var, factor } => ReductionStep::Scale { slot: slot_of(var)?, factor: num(factor)? },
            StepDoc::Remove { var, target, certificate } => ReductionStep::Remove {
                slot: slot_of(var)?,
                certificate: Certificate::unchecked(exps_from_doc(certificate)?, num(target)?),
            },
            StepDoc::DropIsolated { var } => ReductionStep::DropIsolated { slot: slot_of(var)? },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisDoc {
    pub name: String,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiDoc {
    pub degree: DegreeDoc,
    pub count: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleDoc {
    pub bound: String,
    pub betti: Vec<BettiDoc>,
    pub mu_within_bound: String,
    pub scan_exhausted_to_bound: bool,
    pub certified: bool,
}

impl From<&OracleReport> for OracleDoc {
    fn from(r: &OracleReport) -> Self {
        Self {
            bound: r.bound.to_string(),
            betti: r.betti.iter().map(|(d, c)| BettiDoc { degree: d.into(), count: c.to_string() }).collect(),
            mu_within_bound: r.mu_within_bound.to_string(),
            scan_exhausted_to_bound: r.scan_exhausted_to_bound,
            certified: r.certified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub input: Vec<String>,
    pub variant: String,
    pub verdict: String,
    pub method: String,
    pub matched_condition: Option<String>,
    pub generators: Vec<BinomialDoc>,
    pub frobenius: Option<String>,
    pub trace: Vec<StepDoc>,
    pub hypothesis_report: Vec<HypothesisDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDoc>,
    /// The general algorithm's verdict when a family theorem did not apply.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<Box<VerdictDoc>>,
}

impl VerdictDoc {
    pub fn new(input: &CurveSpec, projective: bool, v: &Verdict) -> Self {
        Self {
            input: input.gens().iter().map(|g| g.to_string()).collect(),
            variant: if projective { "projective" } else { "affine" }.to_string(),
            verdict: v.decision.tag().to_string(),
            method: v.method.tag().to_string(),
            matched_condition: None,
            generators: v.generators.iter().flatten().map(BinomialDoc::from).collect(),
            frobenius: v.frobenius.as_ref().map(|g| g.to_string()),
            trace: v.trace.iter().flat_map(|t| t.steps.iter()).map(StepDoc::from).collect(),
            hypothesis_report: Vec::new(),
            oracle: v.oracle.as_ref().map(OracleDoc::from),
            fallback: None,
        }
    }

    pub fn from_family(input: &CurveSpec, projective: bool, fv: &FamilyVerdict) -> Self {
        let mut doc = Self::new(input, projective, &fv.verdict);
        doc.matched_condition = fv.matched_condition.clone();
        doc.hypothesis_report = fv
            .hypothesis_report
            .iter()
            .map(|h| HypothesisDoc { name: h.name.clone(), satisfied: h.satisfied })
            .collect();
        doc
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| usage(format!("malformed verdict document: {e}")))
    }

    pub fn decision(&self) -> Result<Decision> {
        Decision::from_tag(&self.verdict).ok_or_else(|| usage(format!("unknown verdict '{}'", self.verdict)))
    }

    pub fn method(&self) -> Result<Method> {
        Method::from_tag(&self.method).ok_or_else(|| usage(format!("unknown method '{}'", self.method)))
    }

    /// `(plus, minus, degree)` of every generator.
    pub fn generator_parts(&self) -> Result<Vec<(Exponents, Exponents, Degree)>> {
        self.generators
            .iter()
            .map(|g| Ok((exps_from_doc(&g.plus)?, exps_from_doc(&g.minus)?, g.degree.to_degree()?)))
            .collect()
    }

    pub fn frobenius_value(&self) -> Result<Option<BigInt>> {
        self.frobenius.as_deref().map(num).transpose()
    }

    pub fn trace_steps(&self) -> Result<Vec<ReductionStep>> {
        self.trace.iter().map(StepDoc::to_step).collect()
    }
}
