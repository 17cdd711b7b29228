use num_bigint::BigInt;

use crate::binomial::Binomial;
use crate::oracle::OracleReport;
use crate::reduction::ReductionTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Ci,
    NotCi,
    Inconclusive,
}

impl Decision {
    pub fn tag(self) -> &'static str {
        match self {
            Decision::Ci => "ci",
            Decision::NotCi => "not_ci",
            Decision::Inconclusive => "inconclusive",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [Decision::Ci, Decision::NotCi, Decision::Inconclusive].into_iter().find(|d| d.tag() == tag)
    }
}

/// Which argument settled a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// The reduction emptied the configuration.
    EmptyReduction,
    /// A three-element reduced residual is never a complete intersection.
    ThreeGeneratorResidual,
    /// Two critical binomials use each other's variables.
    CrossedCriticalPair,
    /// At least `n − 1` pairwise distinct critical degrees `m_i d_i`.
    DistinctCriticalDegrees,
    /// Fiber-graph generator count.
    OracleCount,
    /// Closed-form family characterization.
    FamilyTheorem,
    /// Bounded-coefficient removal loop for the projective closure.
    ProjectiveReduction,
}

impl Method {
    /// Stable wire name used in JSON output.
    pub fn tag(self) -> &'static str {
        match self {
            Method::EmptyReduction => "empty_reduction",
            Method::ThreeGeneratorResidual => "prop_n3",
            Method::CrossedCriticalPair => "no_ic_lemma",
            Method::DistinctCriticalDegrees => "n_minus1_distinct",
            Method::OracleCount => "oracle_count",
            Method::FamilyTheorem => "family_theorem",
            Method::ProjectiveReduction => "table1_algorithm",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        use Method::*;
        [
            EmptyReduction,
            ThreeGeneratorResidual,
            CrossedCriticalPair,
            DistinctCriticalDegrees,
            OracleCount,
            FamilyTheorem,
            ProjectiveReduction,
        ]
        .into_iter()
        .find(|m| m.tag() == tag)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub decision: Decision,
    pub method: Method,
    /// A minimal generating set, present only for complete intersections.
    pub generators: Option<Vec<Binomial>>,
    /// Frobenius number of `⟨A / gcd(A)⟩`, present alongside generators.
    pub frobenius: Option<BigInt>,
    pub trace: Option<ReductionTrace>,
    pub oracle: Option<OracleReport>,
}

impl Verdict {
    pub(crate) fn bare(decision: Decision, method: Method) -> Self {
        Self { decision, method, generators: None, frobenius: None, trace: None, oracle: None }
    }

    pub fn is_ci(&self) -> bool {
        self.decision == Decision::Ci
    }
}
