//! Closed-form complete-intersection characterizations for four families of
//! monomial curves, with explicit generators and Frobenius numbers:
//!
//! * generalized arithmetic sequences `{d_1, h d_1 + s, h d_1 + 2s, ...}`;
//! * the same with one extra value appended;
//! * `(p,q)`-Fibonacci terms at indices `a, ha + d, ha + 2d, ...`;
//! * `(p,q)`-Lucas terms at indices `a, a + d, a + 2d, ...`.
//!
//! Each characterization is only a biconditional under its hypotheses;
//! outside them the verdict is inconclusive and the report says why.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{seq_term, seq_terms, val2, PqParams, SeqKind};
use crate::binomial::{Binomial, Exponents};
use crate::error::{invalid, usage, Result};
use crate::reduction::{affine_ci, affine_reduce, frobenius_from_degrees, projective_ci};
use crate::semigroup::{frobenius, member_bounded_in, member_in, minimal_generators, CurveSpec};
use crate::verdict::{Decision, Method, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenArith {
    pub d1: u64,
    pub h: u64,
    pub step: u64,
    pub n: u64,
}

/// A generalized arithmetic sequence of length `n_seq` plus the value `dn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlmostArith {
    pub d1: u64,
    pub h: u64,
    pub step: u64,
    pub n_seq: u64,
    pub dn: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fib {
    pub pq: PqParams,
    pub h: u64,
    pub a: u64,
    pub step_d: u64,
    pub n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lucas {
    pub pq: PqParams,
    pub a: u64,
    pub step_d: u64,
    pub n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    GenArith(GenArith),
    AlmostArith(AlmostArith),
    Fib(Fib),
    Lucas(Lucas),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FamilyParams {
    pub family: Family,
    pub projective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis {
    pub name: String,
    pub satisfied: bool,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, if self.satisfied { "ok" } else { "violated" })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyVerdict {
    pub verdict: Verdict,
    pub matched_condition: Option<String>,
    pub hypothesis_report: Vec<Hypothesis>,
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn exps(pairs: &[(usize, &BigUint)]) -> Exponents {
    pairs.iter().filter(|(_, c)| !c.is_zero()).map(|&(i, c)| (i, c.clone())).collect()
}

fn exact_div(a: &BigUint, b: &BigUint) -> Result<BigUint> {
    let (q, r) = a.div_rem(b);
    if !r.is_zero() {
        return Err(usage(format!("{a} is not divisible by {b}")));
    }
    Ok(q)
}

fn positive(fields: &[(&str, u64)]) -> Result<()> {
    for (name, v) in fields {
        if *v == 0 {
            return Err(invalid(format!("{name} must be a positive integer")));
        }
    }
    Ok(())
}

fn gen_arith_values(d1: u64, h: u64, step: u64, n: u64) -> Result<Vec<BigUint>> {
    let mut out = vec![big(d1)];
    for i in 1..n {
        let v = h
            .checked_mul(d1)
            .and_then(|x| x.checked_add(i.checked_mul(step)?))
            .ok_or_else(|| invalid("sequence term overflows"))?;
        out.push(big(v));
    }
    Ok(out)
}

fn fib_indices(f: &Fib) -> Vec<u64> {
    let mut idx = vec![f.a];
    idx.extend((1..f.n).map(|i| f.h * f.a + i * f.step_d));
    idx
}

fn lucas_indices(l: &Lucas) -> Vec<u64> {
    (0..l.n).map(|i| l.a + i * l.step_d).collect()
}

/// The generator list of a family member.
pub fn family_build(params: &FamilyParams) -> Result<CurveSpec> {
    let values = match params.family {
        Family::GenArith(g) => {
            positive(&[("d1", g.d1), ("h", g.h), ("step", g.step), ("n", g.n)])?;
            gen_arith_values(g.d1, g.h, g.step, g.n)?
        }
        Family::AlmostArith(g) => {
            positive(&[("d1", g.d1), ("h", g.h), ("step", g.step), ("n", g.n_seq), ("dn", g.dn)])?;
            let mut v = gen_arith_values(g.d1, g.h, g.step, g.n_seq)?;
            v.push(big(g.dn));
            v
        }
        Family::Fib(f) => {
            positive(&[("h", f.h), ("a", f.a), ("d", f.step_d), ("n", f.n)])?;
            let idx = fib_indices(&f);
            let terms = seq_terms(f.pq, SeqKind::Fibonacci, *idx.iter().max().expect("n >= 1"));
            idx.iter().map(|&k| terms[k as usize].clone()).collect()
        }
        Family::Lucas(l) => {
            positive(&[("a", l.a), ("d", l.step_d), ("n", l.n)])?;
            let idx = lucas_indices(&l);
            let terms = seq_terms(l.pq, SeqKind::Lucas, *idx.iter().max().expect("n >= 1"));
            idx.iter().map(|&k| terms[k as usize].clone()).collect()
        }
    };
    CurveSpec::new(values)
}

/// Whether the third term lies in the span of the first two, decided by
/// `d` odd or `F_{2d} ≥ lcm(F_a, F_d)`.
pub fn d3_member_fib(pq: PqParams, _h: u64, a: u64, step_d: u64) -> bool {
    if step_d % 2 == 1 {
        return true;
    }
    let f2d = seq_term(pq, SeqKind::Fibonacci, 2 * step_d);
    let fa = seq_term(pq, SeqKind::Fibonacci, a);
    let fd = seq_term(pq, SeqKind::Fibonacci, step_d);
    f2d >= fa.lcm(&fd)
}

/// The Lucas analogue: `d` odd or `F_{2d} ≥ lcm(L_a, F_d)`.
pub fn d3_member_lucas(pq: PqParams, a: u64, step_d: u64) -> bool {
    if step_d % 2 == 1 {
        return true;
    }
    let f2d = seq_term(pq, SeqKind::Fibonacci, 2 * step_d);
    let la = seq_term(pq, SeqKind::Lucas, a);
    let fd = seq_term(pq, SeqKind::Fibonacci, step_d);
    f2d >= la.lcm(&fd)
}

struct Report(Vec<Hypothesis>);

impl Report {
    fn check(&mut self, name: &str, satisfied: bool) {
        self.0.push(Hypothesis { name: name.to_string(), satisfied });
    }

    fn ok(&self) -> bool {
        self.0.iter().all(|h| h.satisfied)
    }
}

fn outcome(report: Report, decision: Decision, matched: Option<&str>) -> FamilyVerdict {
    FamilyVerdict {
        verdict: Verdict::bare(decision, Method::FamilyTheorem),
        matched_condition: matched.map(str::to_string),
        hypothesis_report: report.0,
    }
}

fn inconclusive(report: Report) -> FamilyVerdict {
    outcome(report, Decision::Inconclusive, None)
}

fn not_ci(report: Report) -> FamilyVerdict {
    outcome(report, Decision::NotCi, None)
}

fn ci(report: Report, matched: &str, generators: Option<Vec<Binomial>>, frobenius: Option<BigInt>) -> FamilyVerdict {
    let mut v = outcome(report, Decision::Ci, Some(matched));
    v.verdict.generators = generators;
    v.verdict.frobenius = frobenius;
    v
}

fn projective_frobenius(gens: &[Binomial], a: &CurveSpec) -> BigInt {
    frobenius_from_degrees(gens.iter().map(|g| g.degree().first()), a)
}

fn semigroup_hypotheses(report: &mut Report, a: &CurveSpec) {
    report.check("gcd_one", a.gcd().is_one());
    report.check("minimal_generation", minimal_generators(a).len() == a.len() && !a.has_duplicates());
}

/// Dispatches to the characterization of the chosen family.
pub fn family_ci(params: &FamilyParams) -> Result<FamilyVerdict> {
    match params.family {
        Family::GenArith(g) => ci_gen_arith(&g, params.projective),
        Family::AlmostArith(g) => ci_almost_arith(&g, params.projective),
        Family::Fib(f) => ci_fibonacci(&f, params.projective),
        Family::Lucas(l) => ci_lucas(&l, params.projective),
    }
}

pub fn ci_gen_arith(g: &GenArith, projective: bool) -> Result<FamilyVerdict> {
    let params = FamilyParams { family: Family::GenArith(*g), projective };
    let a = family_build(&params)?;
    let v = a.gens();
    let mut report = Report(Vec::new());
    report.check("n_at_least_2", g.n >= 2);
    semigroup_hypotheses(&mut report, &a);
    if !report.ok() {
        return Ok(inconclusive(report));
    }
    if g.n == 2 {
        let (d1, d2) = (&v[0], &v[1]);
        let gens = if projective {
            let slack = d2 - d1;
            vec![Binomial::projective(exps(&[(0, d2)]), exps(&[(1, d1), (2, &slack)]), v)?]
        } else {
            vec![Binomial::affine(exps(&[(0, d2)]), exps(&[(1, d1)]), v)?]
        };
        let frob = BigInt::from(d1 * d2) - BigInt::from(d1 + d2);
        return Ok(ci(report, "n_eq_2", Some(gens), Some(frob)));
    }
    let d1_even = g.d1 % 2 == 0;
    if projective {
        if !(g.n == 3 && g.h == 1 && d1_even) {
            return Ok(not_ci(report));
        }
        let (d1, d2, d3) = (&v[0], &v[1], &v[2]);
        let two = big(2);
        let one = BigUint::one();
        let gens = vec![
            Binomial::projective(exps(&[(1, &two)]), exps(&[(0, &one), (2, &one)]), v)?,
            Binomial::projective(exps(&[(0, &(d3 / 2u32))]), exps(&[(2, &(d1 / 2u32)), (3, &(d2 - d1))]), v)?,
        ];
        let frob = projective_frobenius(&gens, &a);
        return Ok(ci(report, "n_eq_3_arithmetic_d1_even", Some(gens), Some(frob)));
    }
    if !(g.n == 3 && d1_even) {
        return Ok(not_ci(report));
    }
    let (d1, d2, d3) = (&v[0], &v[1], &v[2]);
    let gens = vec![
        Binomial::affine(exps(&[(1, &big(2))]), exps(&[(0, &big(g.h)), (2, &BigUint::one())]), v)?,
        Binomial::affine(exps(&[(0, &(d3 / 2u32))]), exps(&[(2, &(d1 / 2u32))]), v)?,
    ];
    let frob =
        BigInt::from(d1 * d3 / 2u32) - BigInt::from(d1.clone()) + BigInt::from(d2.clone()) - BigInt::from(d3.clone());
    Ok(ci(report, "n_eq_3_d1_even", Some(gens), Some(frob)))
}

fn is_arithmetic(values: &[&BigUint]) -> bool {
    values.windows(2).all(|w| w[1] > w[0]) && values.windows(3).all(|w| w[1] - w[0] == w[2] - w[1])
}

pub fn ci_almost_arith(g: &AlmostArith, projective: bool) -> Result<FamilyVerdict> {
    let params = FamilyParams { family: Family::AlmostArith(*g), projective };
    let a = family_build(&params)?;
    let n = a.len();
    let mut report = Report(Vec::new());
    report.check("n_at_least_4", n >= 4);
    semigroup_hypotheses(&mut report, &a);
    if !report.ok() {
        return Ok(inconclusive(report));
    }
    if projective {
        return almost_projective(&a, report);
    }
    if n >= 5 {
        return Ok(not_ci(report));
    }
    let v = a.gens();
    let (d1, d2, d3, d4) = (&v[0], &v[1], &v[2], &v[3]);
    let h = big(g.h);
    let one = BigUint::one();
    let two = big(2);
    let b = d1.gcd(d2);
    let quotient_even = (d1 / &b).is_even();
    if quotient_even {
        if let Some(cert) = member_in(v, &[0, 1, 2], &(&b * d4)) {
            let (b1, b2, b3) = (cert.coeff(0), cert.coeff(1), cert.coeff(2));
            let gens = vec![
                Binomial::affine(exps(&[(3, &b)]), exps(&[(0, &b1), (1, &b2), (2, &b3)]), v)?,
                Binomial::affine(exps(&[(1, &two)]), exps(&[(0, &h), (2, &one)]), v)?,
                Binomial::affine(exps(&[(0, &(d3 / (&b * 2u32)))]), exps(&[(2, &(d1 / (&b * 2u32)))]), v)?,
            ];
            let frob = BigInt::from(d1 * d3 / (&b * 2u32)) - BigInt::from(d1.clone()) + BigInt::from(d2.clone())
                - BigInt::from(d3.clone())
                + (BigInt::from(b.clone()) - 1) * BigInt::from(d4.clone());
            return Ok(ci(report, "b_times_dn_in_span", Some(gens), Some(frob)));
        }
    }
    if d1.is_even() && d4.is_even() {
        let c = CurveSpec::new(vec![d1.clone(), d3.clone(), d4.clone()])?;
        if affine_reduce(&c).is_empty_residual() {
            let sub = affine_ci(&c, None);
            let slot = [0usize, 2, 3];
            let mut gens = vec![Binomial::affine(exps(&[(1, &two)]), exps(&[(0, &h), (2, &one)]), v)?];
            for bin in sub.generators.iter().flatten() {
                gens.push(bin.relabel(|i| slot[i], v, false)?);
            }
            let half = CurveSpec::new(vec![d1 / 2u32, d3 / 2u32, d4 / 2u32])?;
            let frob = frobenius(&half)? * 2 + BigInt::from(d2.clone());
            return Ok(ci(report, "even_d1_dn_sub_reduces_empty", Some(gens), Some(frob)));
        }
    }
    Ok(not_ci(report))
}

fn almost_projective(a: &CurveSpec, report: Report) -> Result<FamilyVerdict> {
    let n = a.len();
    let orig = a.gens();
    // relabel so that the first n-1 values are not preceded by a swap candidate
    let mut perm: Vec<usize> = (0..n).collect();
    let swapped_view: Vec<&BigUint> = std::iter::once(&orig[n - 1]).chain(orig[1..n - 1].iter()).collect();
    if is_arithmetic(&swapped_view) {
        perm.swap(0, n - 1);
    }
    let v: Vec<BigUint> = perm.iter().map(|&i| orig[i].clone()).collect();
    let head: Vec<&BigUint> = v[..3].iter().collect();
    if n != 4 || !is_arithmetic(&head) {
        return Ok(not_ci(report));
    }
    // slot k of the permuted configuration is slot perm[k] of the input;
    // the homogenizing variable keeps index n
    let back = |k: usize| if k < n { perm[k] } else { n };
    let (d1, d2, d3, d4) = (&v[0], &v[1], &v[2], &v[3]);
    let one = BigUint::one();
    let two = big(2);
    let b = d1.gcd(d2);
    if (d1 / &b).is_even() {
        if let Some(cert) = member_bounded_in(&v, &[0, 1, 2], &(&b * d4), &b) {
            let slack = &b - cert.total();
            let (b1, b2, b3) = (cert.coeff(0), cert.coeff(1), cert.coeff(2));
            let local = vec![
                Binomial::projective(exps(&[(3, &b)]), exps(&[(0, &b1), (1, &b2), (2, &b3), (4, &slack)]), &v)?,
                Binomial::projective(exps(&[(1, &two)]), exps(&[(0, &one), (2, &one)]), &v)?,
                Binomial::projective(
                    exps(&[(0, &(d3 / (&b * 2u32)))]),
                    exps(&[(2, &(d1 / (&b * 2u32))), (4, &((d2 - d1) / &b))]),
                    &v,
                )?,
            ];
            let gens = local.iter().map(|g| g.relabel(back, orig, true)).collect::<Result<Vec<_>>>()?;
            let frob = projective_frobenius(&gens, a);
            return Ok(ci(report, "b_times_dn_in_bounded_span", Some(gens), Some(frob)));
        }
    }
    if d1.is_even() && d4.is_even() {
        let c = CurveSpec::new(vec![d1.clone(), d3.clone(), d4.clone()])?;
        let sub = projective_ci(&c);
        if sub.is_ci() {
            let slot = [0usize, 2, 3, 4];
            let mut local = vec![Binomial::projective(exps(&[(1, &two)]), exps(&[(0, &one), (2, &one)]), &v)?];
            for bin in sub.generators.iter().flatten() {
                local.push(bin.relabel(|i| slot[i], &v, true)?);
            }
            let gens = local.iter().map(|g| g.relabel(back, orig, true)).collect::<Result<Vec<_>>>()?;
            let frob = projective_frobenius(&gens, a);
            return Ok(ci(report, "even_d1_dn_sub_projective_reduces_empty", Some(gens), Some(frob)));
        }
    }
    Ok(not_ci(report))
}

fn distinct_terms(report: &mut Report, a: &CurveSpec) {
    report.check("distinct_terms", !a.has_duplicates());
}

/// `x_1^{d_2/e} − x_2^{d_1/e}` and `g = (d_1 d_2 / e − d_1 − d_2) / e`.
fn two_term_head(v: &[BigUint], e: &BigUint) -> Result<(Binomial, BigInt)> {
    let (d1, d2) = (&v[0], &v[1]);
    let bin = Binomial::affine(exps(&[(0, &(d2 / e))]), exps(&[(1, &(d1 / e))]), v)?;
    let g = (BigInt::from(d1 * d2 / e) - BigInt::from(d1 + d2)) / BigInt::from(e.clone());
    Ok((bin, g))
}

/// The chain `x_i − x_{i−2}^{q^d} x_{i−1}^{L_d}` for `i ≥ 4` (0-based slots
/// 3 and up), valid when `d` is odd.
fn odd_step_chain(v: &[BigUint], qd: &BigUint, ld: &BigUint) -> Result<Vec<Binomial>> {
    let one = BigUint::one();
    (3..v.len()).map(|i| Binomial::affine(exps(&[(i, &one)]), exps(&[(i - 2, qd), (i - 1, ld)]), v)).collect()
}

/// `x_i − x_1^{b_{i,1}} x_2^{b_{i,2}}` for every `i ≥ 3`, when all those
/// memberships hold.
fn certificate_chain(v: &[BigUint]) -> Option<Vec<Binomial>> {
    let one = BigUint::one();
    (2..v.len())
        .map(|i| {
            let cert = member_in(v, &[0, 1], &v[i])?;
            Binomial::affine(exps(&[(i, &one)]), exps(&[(0, &cert.coeff(0)), (1, &cert.coeff(1))]), v).ok()
        })
        .collect()
}

pub fn ci_fibonacci(f: &Fib, projective: bool) -> Result<FamilyVerdict> {
    let params = FamilyParams { family: Family::Fib(*f), projective };
    let a = family_build(&params)?;
    let mut report = Report(Vec::new());
    report.check("n_at_least_3", f.n >= 3);
    distinct_terms(&mut report, &a);
    if !report.ok() {
        return Ok(inconclusive(report));
    }
    let (aa, d, n, h) = (f.a, f.step_d, f.n, f.h);
    let pq = f.pq;
    let v = a.gens();
    let ld = seq_term(pq, SeqKind::Lucas, d);
    let qd = pq.q_pow(d);
    let f2d = seq_term(pq, SeqKind::Fibonacci, 2 * d);
    if projective {
        if !(n == 3 && h == 1 && d % 2 == 0 && aa % (2 * d) == 0) {
            return Ok(not_ci(report));
        }
        let gens = three_term_projective(v, &f2d, &ld, &qd)?;
        let frob = projective_frobenius(&gens, &a);
        return Ok(ci(report, "n3_h1_d_even_2d_divides_a", Some(gens), Some(frob)));
    }
    let e = seq_term(pq, SeqKind::Fibonacci, aa.gcd(&d));
    let fha = seq_term(pq, SeqKind::Fibonacci, h * aa);
    let coef = &qd * exact_div(&fha, &v[0])?;
    let matched = if d % 2 == 1 {
        Some("d_odd")
    } else if d >= aa {
        Some("d_at_least_a")
    } else if aa == 2 * d {
        Some("a_eq_2d")
    } else if aa.gcd(&d) == aa - d && aa % 2 == 1 {
        Some("gcd_eq_a_minus_d_a_odd")
    } else if n == 3 && aa % (2 * d) == 0 {
        Some("n3_2d_divides_a")
    } else {
        None
    };
    let Some(matched) = matched else { return Ok(not_ci(report)) };
    let one = BigUint::one();
    match matched {
        "d_odd" => {
            let (head, g) = two_term_head(v, &e)?;
            let mut gens = vec![head, Binomial::affine(exps(&[(2, &one)]), exps(&[(0, &coef), (1, &ld)]), v)?];
            gens.extend(odd_step_chain(v, &qd, &ld)?);
            Ok(ci(report, matched, Some(gens), Some(g)))
        }
        "n3_2d_divides_a" => {
            let (d1, d2, d3) = (&v[0], &v[1], &v[2]);
            let gens = vec![
                Binomial::affine(exps(&[(0, &exact_div(d3, &f2d)?)]), exps(&[(2, &exact_div(d1, &f2d)?)]), v)?,
                Binomial::affine(exps(&[(1, &ld)]), exps(&[(0, &coef), (2, &one)]), v)?,
            ];
            let fd = seq_term(pq, SeqKind::Fibonacci, d);
            let num = BigInt::from(d1 * d3 / &f2d) - BigInt::from(d1.clone())
                + (BigInt::from(ld.clone()) - 1) * BigInt::from(d2.clone())
                - BigInt::from(d3.clone());
            Ok(ci(report, matched, Some(gens), Some(num / BigInt::from(fd))))
        }
        _ => {
            let (head, g) = two_term_head(v, &e)?;
            let gens = certificate_chain(v).map(|mut chain| {
                chain.insert(0, head);
                chain
            });
            Ok(ci(report, matched, gens, Some(g)))
        }
    }
}

/// Generators of the projective closure of a three-term family member
/// `{d_1, d_2, d_3}` with `L_d d_2 = q^d d_1 + d_3` and
/// `gcd(d_1, d_3) = div`.
fn three_term_projective(v: &[BigUint], div: &BigUint, ld: &BigUint, qd: &BigUint) -> Result<Vec<Binomial>> {
    let (d1, d3) = (&v[0], &v[2]);
    let one = BigUint::one();
    let slack = ld - qd - 1u32;
    Ok(vec![
        Binomial::projective(
            exps(&[(0, &exact_div(d3, div)?)]),
            exps(&[(2, &exact_div(d1, div)?), (3, &exact_div(&(d3 - d1), div)?)]),
            v,
        )?,
        Binomial::projective(exps(&[(1, ld)]), exps(&[(0, qd), (2, &one), (3, &slack)]), v)?,
    ])
}

pub fn ci_lucas(l: &Lucas, projective: bool) -> Result<FamilyVerdict> {
    let params = FamilyParams { family: Family::Lucas(*l), projective };
    let a = family_build(&params)?;
    let mut report = Report(Vec::new());
    report.check("n_at_least_3", l.n >= 3);
    distinct_terms(&mut report, &a);
    if !report.ok() {
        return Ok(inconclusive(report));
    }
    let (aa, d, n) = (l.a, l.step_d, l.n);
    let pq = l.pq;
    let (p_odd, q_odd) = (pq.p() % 2 == 1, pq.q() % 2 == 1);
    let v = a.gens();
    let ld = seq_term(pq, SeqKind::Lucas, d);
    let qd = pq.q_pow(d);
    let ratio_odd = aa % d == 0 && (aa / d) % 2 == 1;
    if projective {
        if !(n == 3 && d % 2 == 0 && p_odd && ratio_odd && (!q_odd || d % 3 != 0)) {
            return Ok(not_ci(report));
        }
        let gens = three_term_projective(v, &ld, &ld, &qd)?;
        let frob = projective_frobenius(&gens, &a);
        return Ok(ci(report, "n3_d_even_p_odd_ratio_odd", Some(gens), Some(frob)));
    }
    let matched = if d % 2 == 1 {
        Some("d_odd")
    } else if d >= aa {
        Some("d_at_least_a")
    } else if aa.gcd(&d) == aa - d && val2(d)? > val2(aa)? && val2(aa)? >= 1 {
        Some("gcd_eq_a_minus_d_val2")
    } else if n == 3 && p_odd && ratio_odd && !q_odd {
        Some("n3_p_odd_q_even_ratio_odd")
    } else if n == 3 && d % 3 != 0 && p_odd && q_odd && ratio_odd {
        Some("n3_3_ndivides_d_pq_odd_ratio_odd")
    } else {
        None
    };
    let Some(matched) = matched else { return Ok(not_ci(report)) };
    let one = BigUint::one();
    let e = v[0].gcd(&v[1]);
    match matched {
        "d_odd" => {
            let (head, g) = two_term_head(v, &e)?;
            let mut gens = vec![head, Binomial::affine(exps(&[(2, &one)]), exps(&[(0, &qd), (1, &ld)]), v)?];
            gens.extend(odd_step_chain(v, &qd, &ld)?);
            Ok(ci(report, matched, Some(gens), Some(g)))
        }
        "d_at_least_a" | "gcd_eq_a_minus_d_val2" => {
            let (head, g) = two_term_head(v, &e)?;
            let gens = certificate_chain(v).map(|mut chain| {
                chain.insert(0, head);
                chain
            });
            Ok(ci(report, matched, gens, Some(g)))
        }
        _ => {
            let (d1, d2, d3) = (&v[0], &v[1], &v[2]);
            let gens = vec![
                Binomial::affine(exps(&[(0, &exact_div(d3, &ld)?)]), exps(&[(2, &exact_div(d1, &ld)?)]), v)?,
                Binomial::affine(exps(&[(1, &ld)]), exps(&[(0, &qd), (2, &one)]), v)?,
            ];
            let g = BigInt::from(d1 * d3 / &ld) - BigInt::from(d1.clone())
                + (BigInt::from(ld.clone()) - 1) * BigInt::from(d2.clone())
                - BigInt::from(d3.clone());
            Ok(ci(report, matched, Some(gens), Some(g)))
        }
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::GenArith(_) => "gen-arith",
            Family::AlmostArith(_) => "almost",
            Family::Fib(_) => "fib",
            Family::Lucas(_) => "lucas",
        }
    }

    /// Named parameters in a stable order.
    pub fn fields(&self) -> Vec<(&'static str, u64)> {
        match *self {
            Family::GenArith(g) => vec![("d1", g.d1), ("h", g.h), ("step", g.step), ("n", g.n)],
            Family::AlmostArith(g) => {
                vec![("d1", g.d1), ("h", g.h), ("step", g.step), ("n", g.n_seq + 1), ("dn", g.dn)]
            }
            Family::Fib(f) => {
                vec![("p", f.pq.p()), ("q", f.pq.q()), ("h", f.h), ("a", f.a), ("d", f.step_d), ("n", f.n)]
            }
            Family::Lucas(l) => vec![("p", l.pq.p()), ("q", l.pq.q()), ("a", l.a), ("d", l.step_d), ("n", l.n)],
        }
    }

    /// Parameter names accepted by [`Family::from_fields`].
    pub fn field_names(family: &str) -> Option<&'static [&'static str]> {
        Some(match family {
            "gen-arith" => &["d1", "h", "step", "n"],
            "almost" => &["d1", "h", "step", "n", "dn"],
            "fib" => &["p", "q", "h", "a", "d", "n"],
            "lucas" => &["p", "q", "a", "d", "n"],
            _ => return None,
        })
    }

    /// Builds a family from `name=value` pairs. For `almost`, `n` counts
    /// all values including `dn`.
    pub fn from_fields(family: &str, get: impl Fn(&str) -> Option<u64>) -> Result<Family> {
        let names = Family::field_names(family).ok_or_else(|| usage(format!("unknown family '{family}'")))?;
        let need = |k: &str| get(k).ok_or_else(|| usage(format!("missing parameter '{k}' for {family}")));
        debug_assert!(names.iter().all(|k| !k.is_empty()));
        Ok(match family {
            "gen-arith" => {
                Family::GenArith(GenArith { d1: need("d1")?, h: need("h")?, step: need("step")?, n: need("n")? })
            }
            "almost" => {
                let n = need("n")?;
                if n < 2 {
                    return Err(invalid("n must count at least two values"));
                }
                Family::AlmostArith(AlmostArith {
                    d1: need("d1")?,
                    h: need("h")?,
                    step: need("step")?,
                    n_seq: n - 1,
                    dn: need("dn")?,
                })
            }
            "fib" => Family::Fib(Fib {
                pq: PqParams::new(need("p")?, need("q")?)?,
                h: need("h")?,
                a: need("a")?,
                step_d: need("d")?,
                n: need("n")?,
            }),
            _ => Family::Lucas(Lucas {
                pq: PqParams::new(need("p")?, need("q")?)?,
                a: need("a")?,
                step_d: need("d")?,
                n: need("n")?,
            }),
        })
    }
}

/// Largest sequence term of a family member, as an `f64` estimate.
pub fn max_term(a: &CurveSpec) -> f64 {
    a.max().to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::member;

    fn pq(p: u64, q: u64) -> PqParams {
        PqParams::new(p, q).unwrap()
    }

    fn gens_of(v: &FamilyVerdict) -> Vec<String> {
        v.verdict.generators.as_ref().unwrap().iter().map(|g| g.to_string()).collect()
    }

    fn build(f: Family) -> Vec<u64> {
        family_build(&FamilyParams { family: f, projective: false }).unwrap().to_u64().unwrap()
    }

    fn check_frobenius(a: &CurveSpec, v: &FamilyVerdict, projective: bool) {
        let g = v.verdict.frobenius.clone().unwrap();
        assert_eq!(g, frobenius(&a.normalized()).unwrap(), "{a}");
        if let Some(gens) = &v.verdict.generators {
            assert_eq!(gens.len(), a.len() - 1);
            for b in gens {
                assert!(b.is_homogeneous_for(a.gens(), projective), "{a}: {b}");
            }
            assert_eq!(frobenius_from_degrees(gens.iter().map(|b| b.degree().first()), a), g);
        }
    }

    #[test]
    fn build_examples() {
        assert_eq!(build(Family::GenArith(GenArith { d1: 4, h: 1, step: 1, n: 3 })), vec![4, 5, 6]);
        assert_eq!(build(Family::Fib(Fib { pq: pq(1, 1), h: 1, a: 4, step_d: 2, n: 3 })), vec![3, 8, 21]);
        assert_eq!(build(Family::Lucas(Lucas { pq: pq(1, 1), a: 5, step_d: 1, n: 3 })), vec![11, 18, 29]);
    }

    #[test]
    fn gen_arith_examples() {
        let g = GenArith { d1: 4, h: 1, step: 1, n: 3 };
        let v = ci_gen_arith(&g, false).unwrap();
        assert_eq!(v.verdict.decision, Decision::Ci);
        assert_eq!(gens_of(&v), vec!["x2^2 - x1*x3", "x1^3 - x3^2"]);
        assert_eq!(v.verdict.frobenius, Some(BigInt::from(7)));
        let a = CurveSpec::from_u64(&[4, 5, 6]).unwrap();
        check_frobenius(&a, &v, false);
        let v = ci_gen_arith(&GenArith { d1: 5, h: 1, step: 1, n: 3 }, false).unwrap();
        assert_eq!(v.verdict.decision, Decision::NotCi);
        let v = ci_gen_arith(&GenArith { d1: 4, h: 2, step: 1, n: 3 }, true).unwrap();
        assert_eq!(v.verdict.decision, Decision::NotCi);
        let v = ci_gen_arith(&g, true).unwrap();
        assert_eq!(v.verdict.decision, Decision::Ci);
        check_frobenius(&a, &v, true);
    }

    #[test]
    fn gen_arith_hypothesis_failure_is_inconclusive() {
        let v = ci_gen_arith(&GenArith { d1: 2, h: 1, step: 1, n: 4 }, false).unwrap();
        assert_eq!(v.verdict.decision, Decision::Inconclusive);
        assert!(v.hypothesis_report.iter().any(|h| h.name == "minimal_generation" && !h.satisfied));
        let v = ci_gen_arith(&GenArith { d1: 4, h: 1, step: 2, n: 3 }, false).unwrap();
        assert_eq!(v.verdict.decision, Decision::Inconclusive);
    }

    #[test]
    fn almost_examples() {
        let g = AlmostArith { d1: 8, h: 1, step: 2, n_seq: 3, dn: 15 };
        let v = ci_almost_arith(&g, false).unwrap();
        assert_eq!(v.verdict.decision, Decision::Ci);
        assert_eq!(v.matched_condition.as_deref(), Some("b_times_dn_in_span"));
        assert_eq!(v.verdict.frobenius, Some(BigInt::from(29)));
        check_frobenius(&CurveSpec::from_u64(&[8, 10, 12, 15]).unwrap(), &v, false);

        let g = AlmostArith { d1: 8, h: 1, step: 3, n_seq: 3, dn: 20 };
        let v = ci_almost_arith(&g, false).unwrap();
        assert_eq!(v.verdict.decision, Decision::Ci);
        assert_eq!(v.matched_condition.as_deref(), Some("even_d1_dn_sub_reduces_empty"));
        assert_eq!(v.verdict.frobenius, Some(BigInt::from(37)));
        check_frobenius(&CurveSpec::from_u64(&[8, 11, 14, 20]).unwrap(), &v, false);

        let g = AlmostArith { d1: 9, h: 1, step: 1, n_seq: 4, dn: 17 };
        assert_eq!(ci_almost_arith(&g, false).unwrap().verdict.decision, Decision::NotCi);
    }

    #[test]
    fn d3_membership_examples() {
        assert!(d3_member_fib(pq(1, 1), 1, 4, 2));
        assert!(!d3_member_fib(pq(1, 1), 1, 8, 2));
        assert!(d3_member_fib(pq(2, 3), 2, 9, 3));
        assert!(member(&CurveSpec::from_u64(&[3, 8]).unwrap(), &BigUint::from(21u32)).is_some());
        assert!(member(&CurveSpec::from_u64(&[21, 55]).unwrap(), &BigUint::from(144u32)).is_none());
    }

    #[test]
    fn fibonacci_examples() {
        let f = |a, d, n| Fib { pq: pq(1, 1), h: 1, a, step_d: d, n };
        let v = ci_fibonacci(&f(3, 2, 3), false).unwrap();
        assert_eq!(build(Family::Fib(f(3, 2, 3))), vec![2, 5, 13]);
        assert_eq!(v.matched_condition.as_deref(), Some("gcd_eq_a_minus_d_a_odd"));
        let v = ci_fibonacci(&f(8, 2, 3), false).unwrap();
        assert_eq!(v.matched_condition.as_deref(), Some("n3_2d_divides_a"));
        assert_eq!(gens_of(&v), vec!["x1^48 - x3^7", "x2^3 - x1*x3"]);
        check_frobenius(&CurveSpec::from_u64(&[21, 55, 144]).unwrap(), &v, false);
        assert_eq!(ci_fibonacci(&f(9, 2, 3), false).unwrap().verdict.decision, Decision::NotCi);
        assert_eq!(ci_fibonacci(&f(8, 2, 4), false).unwrap().verdict.decision, Decision::NotCi);
        let v = ci_fibonacci(&f(4, 2, 3), true).unwrap();
        assert_eq!(gens_of(&v), vec!["x1^7 - x3*x4^6", "x2^3 - x1*x3*x4"]);
        check_frobenius(&CurveSpec::from_u64(&[3, 8, 21]).unwrap(), &v, true);
    }

    #[test]
    fn lucas_examples() {
        let l = |a, d, n| Lucas { pq: pq(1, 1), a, step_d: d, n };
        let v = ci_lucas(&l(5, 1, 3), false).unwrap();
        assert_eq!(v.matched_condition.as_deref(), Some("d_odd"));
        check_frobenius(&CurveSpec::from_u64(&[11, 18, 29]).unwrap(), &v, false);
        assert_eq!(build(Family::Lucas(l(6, 2, 3))), vec![18, 47, 123]);
        let v = ci_lucas(&l(6, 2, 3), false).unwrap();
        assert_eq!(v.matched_condition.as_deref(), Some("n3_3_ndivides_d_pq_odd_ratio_odd"));
        check_frobenius(&CurveSpec::from_u64(&[18, 47, 123]).unwrap(), &v, false);
        assert_eq!(ci_lucas(&l(4, 2, 3), false).unwrap().verdict.decision, Decision::NotCi);
        assert_eq!(ci_lucas(&l(6, 2, 3), true).unwrap().verdict.decision, Decision::Ci);
    }

    #[test]
    fn from_fields_parses_and_rejects() {
        let get = |k: &str| match k {
            "p" => Some(2),
            "q" => Some(4),
            _ => Some(3),
        };
        assert!(matches!(Family::from_fields("fib", get), Err(crate::Error::InvalidInput(_))));
        assert!(matches!(Family::from_fields("nope", |_| Some(1)), Err(crate::Error::Usage(_))));
        let f = Family::from_fields("almost", |k| Some(if k == "n" { 4 } else { 5 })).unwrap();
        assert_eq!(f.fields().iter().find(|(k, _)| *k == "n").unwrap().1, 4);
    }
}
