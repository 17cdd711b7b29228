//! Exact integer utilities and the two-term `(p,q)` recurrences.
//!
//! Both sequences obey `U_{k+2} = p U_{k+1} + q U_k`; the Fibonacci-type
//! sequence starts at `(0, 1)` and the Lucas-type sequence at `(2, p)`.
//! Terms are produced by plain iteration over `BigUint`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, usage, Result};

/// Greatest common divisor of a nonempty list of positive integers.
pub fn gcd_many(values: &[BigUint]) -> Result<BigUint> {
    let (first, rest) = values.split_first().ok_or_else(|| usage("gcd of an empty list"))?;
    if values.iter().any(Zero::is_zero) {
        return Err(usage("gcd_many expects positive integers"));
    }
    let mut g = first.clone();
    for v in rest {
        if g.is_one() {
            break;
        }
        g = g.gcd(v);
    }
    Ok(g)
}

/// gcd of an arbitrary slice, zero for the empty slice.
pub(crate) fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigUint>) -> BigUint {
    values.into_iter().fold(BigUint::zero(), |g, v| if g.is_one() { g } else { g.gcd(v) })
}

pub fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    a.lcm(b)
}

/// 2-adic valuation: the largest `t` with `2^t | a`.
pub fn val2(a: u64) -> Result<u32> {
    if a == 0 {
        return Err(usage("val2 is defined for positive integers only"));
    }
    Ok(a.trailing_zeros())
}

/// Coprime positive recurrence coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PqParams {
    p: u64,
    q: u64,
}

impl PqParams {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(invalid(format!("p and q must be positive (got p={p}, q={q})")));
        }
        if p.gcd(&q) != 1 {
            return Err(invalid(format!("p and q must be coprime (got p={p}, q={q})")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `q^e` as an exact integer.
    pub fn q_pow(&self, e: u64) -> BigUint {
        num_traits::pow(BigUint::from(self.q), e as usize)
    }
}

impl fmt::Display for PqParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeqKind {
    Fibonacci,
    Lucas,
}

/// Terms `U_0, ..., U_upto` of the chosen sequence.
pub fn seq_terms(pq: PqParams, kind: SeqKind, upto: u64) -> Vec<BigUint> {
    let p = BigUint::from(pq.p);
    let q = BigUint::from(pq.q);
    let (mut a, mut b) = match kind {
        SeqKind::Fibonacci => (BigUint::zero(), BigUint::one()),
        SeqKind::Lucas => (BigUint::from(2u32), p.clone()),
    };
    let mut out = Vec::with_capacity(upto as usize + 1);
    for _ in 0..=upto {
        out.push(a.clone());
        let next = &p * &b + &q * &a;
        a = std::mem::replace(&mut b, next);
    }
    out
}

/// The `k`-th term of the chosen sequence.
pub fn seq_term(pq: PqParams, kind: SeqKind, k: u64) -> BigUint {
    let p = BigUint::from(pq.p);
    let q = BigUint::from(pq.q);
    let (mut a, mut b) = match kind {
        SeqKind::Fibonacci => (BigUint::zero(), BigUint::one()),
        SeqKind::Lucas => (BigUint::from(2u32), p.clone()),
    };
    for _ in 0..k {
        let next = &p * &b + &q * &a;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// gcd of two sequence terms, evaluated from the closed-form case analysis on
/// `d = gcd(a, b)`, the 2-adic valuations of the indices and the parities of
/// `p` and `q`. Mixed `(Fibonacci, Lucas)` arguments are swapped into
/// `(Lucas, Fibonacci)` order.
pub fn gcd_closed(pq: PqParams, kind_a: SeqKind, a: u64, kind_b: SeqKind, b: u64) -> Result<BigUint> {
    if a == 0 || b == 0 {
        return Err(usage("gcd_closed expects positive indices"));
    }
    let d = a.gcd(&b);
    let (va, vb) = (val2(a)?, val2(b)?);
    let p_odd = pq.p % 2 == 1;
    let q_odd = pq.q % 2 == 1;
    let two = || BigUint::from(2u32);
    let value = match (kind_a, kind_b) {
        (SeqKind::Fibonacci, SeqKind::Fibonacci) => seq_term(pq, SeqKind::Fibonacci, d),
        (SeqKind::Lucas, SeqKind::Lucas) => {
            if va == vb {
                seq_term(pq, SeqKind::Lucas, d)
            } else if (p_odd && q_odd && d % 3 == 0) || (!p_odd && q_odd) {
                two()
            } else {
                BigUint::one()
            }
        }
        (SeqKind::Lucas, SeqKind::Fibonacci) => {
            if va < vb {
                seq_term(pq, SeqKind::Lucas, d)
            } else if (p_odd && q_odd && d % 3 == 0) || (!p_odd && b % 2 == 0 && q_odd) {
                two()
            } else {
                BigUint::one()
            }
        }
        (SeqKind::Fibonacci, SeqKind::Lucas) => return gcd_closed(pq, kind_b, b, kind_a, a),
    };
    Ok(value)
}
