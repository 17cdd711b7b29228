//! Parameter sweeps comparing the family characterizations against the
//! general algorithms and the oracle.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{usage, Error, Result};
use crate::families::{family_build, family_ci, Family, FamilyParams};
use crate::oracle::{oracle_ci, projective_oracle_ci};
use crate::reduction::{affine_ci, projective_ci};
use crate::verdict::Decision;

/// Inclusive ranges keyed by parameter name.
pub type Ranges = BTreeMap<String, (u64, u64)>;

/// Parses `d1=2..20,h=1..3,n=3` into inclusive ranges.
pub fn parse_ranges(spec: &str) -> Result<Ranges> {
    let mut out = Ranges::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, range) =
            part.split_once('=').ok_or_else(|| usage(format!("range '{part}' is not of the form name=lo..hi")))?;
        let num =
            |s: &str| s.trim().parse::<u64>().map_err(|_| usage(format!("'{s}' in range '{part}' is not an integer")));
        let (lo, hi) = match range.split_once("..") {
            Some((lo, hi)) => (num(lo)?, num(hi)?),
            None => {
                let v = num(range)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(usage(format!("empty range '{part}'")));
        }
        if out.insert(name.trim().to_string(), (lo, hi)).is_some() {
            return Err(usage(format!("parameter '{name}' given twice")));
        }
    }
    Ok(out)
}

/// Every parameter point of the grid in lexicographic order of the family's
/// field list. Points rejected as invalid input (such as non-coprime `p,q`)
/// are counted, not returned.
pub fn grid(family: &str, ranges: &Ranges, projective: bool) -> Result<(Vec<FamilyParams>, usize)> {
    let names = Family::field_names(family).ok_or_else(|| usage(format!("unknown family '{family}'")))?;
    if let Some(extra) = ranges.keys().find(|k| !names.contains(&k.as_str())) {
        return Err(usage(format!("'{extra}' is not a parameter of {family}")));
    }
    let bounds = names
        .iter()
        .map(|k| ranges.get(*k).copied().ok_or_else(|| usage(format!("missing range for '{k}'"))))
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::new();
    let mut rejected = 0;
    let mut current: Vec<u64> = bounds.iter().map(|b| b.0).collect();
    loop {
        let get = |k: &str| names.iter().position(|n| *n == k).map(|i| current[i]);
        match Family::from_fields(family, get) {
            Ok(f) => points.push(FamilyParams { family: f, projective }),
            Err(Error::InvalidInput(_)) => rejected += 1,
            Err(e) => return Err(e),
        }
        let mut i = bounds.len();
        loop {
            if i == 0 {
                return Ok((points, rejected));
            }
            i -= 1;
            if current[i] < bounds[i].1 {
                current[i] += 1;
                break;
            }
            current[i] = bounds[i].0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub params: FamilyParams,
    pub family: Decision,
    pub general: Decision,
    /// `None` when the largest term exceeds the oracle cap.
    pub oracle: Option<Decision>,
    pub agree: bool,
}

/// Evaluates one point, or returns `None` when the family hypotheses fail.
pub fn evaluate(params: &FamilyParams, oracle_max: &BigUint) -> Result<Option<SweepRow>> {
    let fam = family_ci(params)?;
    if fam.verdict.decision == Decision::Inconclusive {
        return Ok(None);
    }
    let a = family_build(params)?;
    let general = if params.projective { projective_ci(&a) } else { affine_ci(&a, None) }.decision;
    let oracle = (a.max() <= oracle_max).then(|| {
        let v = if params.projective { projective_oracle_ci(&a, None) } else { oracle_ci(&a, None) };
        v.map(|v| v.decision).unwrap_or(Decision::Inconclusive)
    });
    let family = fam.verdict.decision;
    let agree = family == general && oracle.is_none_or(|o| o == family);
    Ok(Some(SweepRow { params: *params, family, general, oracle, agree }))
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Points outside the family hypotheses.
    pub skipped: usize,
    /// Points rejected as invalid parameter combinations.
    pub rejected: usize,
}

impl SweepOutcome {
    pub fn disagreements(&self) -> usize {
        self.rows.iter().filter(|r| !r.agree).count()
    }
}

/// Evaluates every point of the grid in parallel; rows keep grid order.
pub fn run_sweep(family: &str, ranges: &Ranges, projective: bool, oracle_max: &BigUint) -> Result<SweepOutcome> {
    let (points, rejected) = grid(family, ranges, projective)?;
    let evaluated = points.par_iter().map(|p| evaluate(p, oracle_max)).collect::<Result<Vec<_>>>()?;
    let skipped = evaluated.iter().filter(|r| r.is_none()).count();
    Ok(SweepOutcome { rows: evaluated.into_iter().flatten().collect(), skipped, rejected })
}

/// One header row, then one row per point.
pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = rows.first() {
        let mut header: Vec<&str> = first.params.family.fields().iter().map(|(k, _)| *k).collect();
        header.extend(["family_verdict", "general_verdict", "oracle_verdict", "agree"]);
        w.write_record(&header)?;
    }
    for row in rows {
        let mut rec: Vec<String> = row.params.family.fields().iter().map(|(_, v)| v.to_string()).collect();
        rec.push(row.family.tag().to_string());
        rec.push(row.general.tag().to_string());
        rec.push(row.oracle.map_or("skipped", |d| d.tag()).to_string());
        rec.push(row.agree.to_string());
        w.write_record(&rec)?;
    }
    w.flush()
}
