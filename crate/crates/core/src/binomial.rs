//! Homogeneous binomials `x^plus − x^minus` over the variables of a curve.
//!
//! Variables are indexed from 0; for a projective configuration with `n`
//! affine generators, index `n` is the homogenizing variable.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{usage, Result};

pub type Exponents = BTreeMap<usize, BigUint>;

/// An `A`-degree (affine) or `A★`-degree (projective).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Degree {
    Affine(BigUint),
    Projective(BigUint, BigUint),
}

impl Degree {
    /// The affine degree, or the first coordinate of a projective one.
    pub fn first(&self) -> &BigUint {
        match self {
            Degree::Affine(b) | Degree::Projective(b, _) => b,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Affine(b) => write!(f, "{b}"),
            Degree::Projective(b1, b2) => write!(f, "({b1},{b2})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binomial {
    plus: Exponents,
    minus: Exponents,
    degree: Degree,
}

fn clean(mut e: Exponents) -> Exponents {
    e.retain(|_, v| !v.is_zero());
    e
}

fn weighted(e: &Exponents, weight: impl Fn(usize) -> Option<BigUint>) -> Result<BigUint> {
    let mut acc = BigUint::zero();
    for (&i, c) in e {
        let w = weight(i).ok_or_else(|| usage(format!("variable index {i} out of range")))?;
        acc += c * w;
    }
    Ok(acc)
}

impl Binomial {
    fn checked(plus: Exponents, minus: Exponents, dp: Degree, dm: Degree) -> Result<Self> {
        let (plus, minus) = (clean(plus), clean(minus));
        if plus.keys().any(|k| minus.contains_key(k)) {
            return Err(usage("binomial supports must be disjoint"));
        }
        if dp != dm {
            return Err(usage(format!("binomial is not homogeneous: {dp} vs {dm}")));
        }
        Ok(Self { plus, minus, degree: dp })
    }

    /// A binomial over the affine generators `values`.
    pub fn affine(plus: Exponents, minus: Exponents, values: &[BigUint]) -> Result<Self> {
        let w = |i: usize| values.get(i).cloned();
        let dp = Degree::Affine(weighted(&plus, w)?);
        let dm = Degree::Affine(weighted(&minus, w)?);
        Self::checked(plus, minus, dp, dm)
    }

    /// A binomial over `A★`: slot `i < n` has degree `(d_i, d − d_i)` and
    /// slot `n` has degree `(0, d)` where `d = max(values)`.
    pub fn projective(plus: Exponents, minus: Exponents, values: &[BigUint]) -> Result<Self> {
        let n = values.len();
        let d = values.iter().max().cloned().unwrap_or_default();
        let first = |i: usize| {
            if i < n {
                Some(values[i].clone())
            } else if i == n {
                Some(BigUint::zero())
            } else {
                None
            }
        };
        let second = |i: usize| {
            if i < n {
                Some(&d - &values[i])
            } else if i == n {
                Some(d.clone())
            } else {
                None
            }
        };
        let dp = Degree::Projective(weighted(&plus, first)?, weighted(&plus, second)?);
        let dm = Degree::Projective(weighted(&minus, first)?, weighted(&minus, second)?);
        Self::checked(plus, minus, dp, dm)
    }

    pub fn plus(&self) -> &Exponents {
        &self.plus
    }

    pub fn minus(&self) -> &Exponents {
        &self.minus
    }

    pub fn degree(&self) -> &Degree {
        &self.degree
    }

    /// Re-checks homogeneity against a (possibly different) configuration.
    pub fn is_homogeneous_for(&self, values: &[BigUint], projective: bool) -> bool {
        let rebuilt = if projective {
            Self::projective(self.plus.clone(), self.minus.clone(), values)
        } else {
            Self::affine(self.plus.clone(), self.minus.clone(), values)
        };
        rebuilt.is_ok_and(|b| b.degree == self.degree)
    }

    /// Renames variables, e.g. when a sub-configuration is embedded into a
    /// larger one.
    pub fn relabel(&self, map: impl Fn(usize) -> usize, values: &[BigUint], projective: bool) -> Result<Self> {
        let plus = self.plus.iter().map(|(&i, c)| (map(i), c.clone())).collect();
        let minus = self.minus.iter().map(|(&i, c)| (map(i), c.clone())).collect();
        if projective {
            Self::projective(plus, minus, values)
        } else {
            Self::affine(plus, minus, values)
        }
    }
}

fn fmt_monomial(f: &mut fmt::Formatter<'_>, e: &Exponents) -> fmt::Result {
    if e.is_empty() {
        return write!(f, "1");
    }
    for (k, (i, c)) in e.iter().enumerate() {
        if k > 0 {
            write!(f, "*")?;
        }
        write!(f, "x{}", i + 1)?;
        if !c.is_one() {
            write!(f, "^{c}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Binomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_monomial(f, &self.plus)?;
        write!(f, " - ")?;
        fmt_monomial(f, &self.minus)
    }
}

/// Shorthand for building exponent maps from small literals.
pub fn exps(pairs: &[(usize, u64)]) -> Exponents {
    pairs.iter().map(|&(i, c)| (i, BigUint::from(c))).collect()
}
