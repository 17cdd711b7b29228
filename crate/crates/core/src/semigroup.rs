//! Numerical semigroup primitives: membership with certificates, bounded
//! membership, Apéry tables, Frobenius numbers, minimal generators and the
//! per-generator indices `B_i` and `m_i`.
//!
//! Every query is phrased over a slice of "slot" values plus a list of
//! allowed slots, so that the reduction code can ask about a shrinking
//! subset without copying. Certificates always refer to slot indices.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::gcd_all;
use crate::error::{invalid, resource, usage, Result};

/// Largest modulus for which residue tables are built.
pub const APERY_LIMIT: u64 = 1 << 21;

/// Above this estimated node count the depth-first membership search hands
/// over to a residue table.
const DFS_BUDGET: f64 = 1e5;

/// Table entries must stay below `2^127`; with a modulus of at most `2^21`
/// this holds whenever every generator is below `2^106`.
const TABLE_GEN_BITS: u64 = 106;

/// Multiples of `d_i` tried by the search-based fallback for `m_i`.
const M_SCAN_LIMIT: u64 = 100_000;

/// The generator multiset `A = {d_1, ..., d_n}` of an affine monomial curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveSpec {
    gens: Vec<BigUint>,
}

impl CurveSpec {
    pub fn new(gens: Vec<BigUint>) -> Result<Self> {
        if gens.is_empty() {
            return Err(invalid("a curve needs at least one generator"));
        }
        if gens.iter().any(Zero::is_zero) {
            return Err(invalid("generators must be positive integers"));
        }
        Ok(Self { gens })
    }

    pub fn from_u64(gens: &[u64]) -> Result<Self> {
        Self::new(gens.iter().map(|&g| BigUint::from(g)).collect())
    }

    pub fn gens(&self) -> &[BigUint] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn has_duplicates(&self) -> bool {
        let mut seen = HashSet::new();
        !self.gens.iter().all(|g| seen.insert(g))
    }

    /// Drops repeated values, keeping first occurrences in order.
    pub fn dedup(&self) -> CurveSpec {
        let mut seen = HashSet::new();
        let gens = self.gens.iter().filter(|g| seen.insert(*g)).cloned().collect();
        CurveSpec { gens }
    }

    pub fn sorted(&self) -> CurveSpec {
        let mut gens = self.gens.clone();
        gens.sort();
        CurveSpec { gens }
    }

    pub fn gcd(&self) -> BigUint {
        gcd_all(&self.gens)
    }

    /// The same curve with every generator divided by `gcd(A)`.
    pub fn normalized(&self) -> CurveSpec {
        let e = self.gcd();
        CurveSpec { gens: self.gens.iter().map(|g| g / &e).collect() }
    }

    pub fn min(&self) -> &BigUint {
        self.gens.iter().min().expect("nonempty")
    }

    pub fn max(&self) -> &BigUint {
        self.gens.iter().max().expect("nonempty")
    }

    pub fn sum(&self) -> BigUint {
        self.gens.iter().sum()
    }

    /// Generators as machine integers, when they all fit.
    pub fn to_u64(&self) -> Option<Vec<u64>> {
        self.gens.iter().map(ToPrimitive::to_u64).collect()
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, g) in self.gens.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

/// A witness `Σ α_j d_j = target`, keyed by slot index. Zero coefficients
/// are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    coeffs: BTreeMap<usize, BigUint>,
    target: BigUint,
}

impl Certificate {
    /// Builds a certificate and checks it against the slot values.
    pub fn new(coeffs: BTreeMap<usize, BigUint>, target: BigUint, values: &[BigUint]) -> Result<Self> {
        let cert = Self::unchecked(coeffs, target);
        if !cert.verify(values) {
            return Err(usage(format!("certificate does not evaluate to {}", cert.target)));
        }
        Ok(cert)
    }

    pub(crate) fn unchecked(mut coeffs: BTreeMap<usize, BigUint>, target: BigUint) -> Self {
        coeffs.retain(|_, c| !c.is_zero());
        Self { coeffs, target }
    }

    pub fn empty() -> Self {
        Self { coeffs: BTreeMap::new(), target: BigUint::zero() }
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, BigUint> {
        &self.coeffs
    }

    pub fn coeff(&self, slot: usize) -> BigUint {
        self.coeffs.get(&slot).cloned().unwrap_or_default()
    }

    pub fn target(&self) -> &BigUint {
        &self.target
    }

    /// Σ α_j.
    pub fn total(&self) -> BigUint {
        self.coeffs.values().sum()
    }

    pub fn verify(&self, values: &[BigUint]) -> bool {
        let mut acc = BigUint::zero();
        for (&slot, c) in &self.coeffs {
            let Some(v) = values.get(slot) else { return false };
            acc += c * v;
        }
        acc == self.target
    }
}

/// Minimal element of `⟨gens⟩` in each residue class modulo `modulus`,
/// computed by the round-robin method. The modulus need not be a generator.
/// `pred[r]` records the last generator added to reach the class minimum,
/// which is enough to rebuild a factorization of every entry.
pub(crate) struct ResidueTable {
    modulus: u64,
    gens: Vec<(usize, u128)>,
    min: Vec<u128>,
    pred: Vec<u32>,
}

const UNREACHED: u128 = u128::MAX;

impl ResidueTable {
    pub(crate) fn feasible(values: &[BigUint], allowed: &[usize], modulus: u64) -> bool {
        modulus >= 1 && modulus <= APERY_LIMIT && allowed.iter().all(|&s| values[s].bits() <= TABLE_GEN_BITS)
    }

    pub(crate) fn build(values: &[BigUint], allowed: &[usize], modulus: u64) -> Option<Self> {
        if !Self::feasible(values, allowed, modulus) {
            return None;
        }
        let m = modulus as usize;
        let gens: Vec<(usize, u128)> =
            allowed.iter().map(|&s| (s, values[s].to_u128().expect("checked bit length"))).collect();
        let mut min = vec![UNREACHED; m];
        let mut pred = vec![u32::MAX; m];
        min[0] = 0;
        for (k, &(_, a)) in gens.iter().enumerate() {
            let step = (a % m as u128) as usize;
            let d = m.gcd(&step);
            for p in 0..d {
                let mut start = UNREACHED;
                let mut r = p;
                for q in (p..m).step_by(d) {
                    if min[q] < start {
                        start = min[q];
                        r = q;
                    }
                }
                if start == UNREACHED {
                    continue;
                }
                let mut n = start;
                for _ in 1..m / d {
                    n += a;
                    r = (r + step) % m;
                    if min[r] <= n {
                        n = min[r];
                    } else {
                        min[r] = n;
                        pred[r] = k as u32;
                    }
                }
            }
        }
        Some(Self { modulus, gens, min, pred })
    }

    pub(crate) fn class_min(&self, r: u64) -> Option<u128> {
        let v = self.min[r as usize];
        (v != UNREACHED).then_some(v)
    }

    /// Factorization of the class minimum of residue `r`.
    pub(crate) fn chain(&self, r: u64) -> Option<BTreeMap<usize, BigUint>> {
        let m = self.modulus as u128;
        let mut v = self.class_min(r)?;
        let mut coeffs: BTreeMap<usize, BigUint> = BTreeMap::new();
        while v != 0 {
            let k = self.pred[(v % m) as usize] as usize;
            let (slot, a) = self.gens[k];
            *coeffs.entry(slot).or_default() += 1u32;
            v -= a;
        }
        Some(coeffs)
    }

    /// All finite entries, in residue order.
    pub(crate) fn entries(&self) -> Vec<u128> {
        self.min.iter().copied().filter(|&v| v != UNREACHED).collect()
    }

    /// Membership when the modulus is itself the value of `modulus_slot`.
    pub(crate) fn member(&self, t: &BigUint, modulus_slot: usize) -> Option<Certificate> {
        let r = (t % self.modulus).to_u64().expect("residue fits");
        let w = self.class_min(r)?;
        let w_big = BigUint::from(w);
        if &w_big > t {
            return None;
        }
        let mut coeffs = self.chain(r)?;
        let extra = (t - &w_big) / self.modulus;
        *coeffs.entry(modulus_slot).or_default() += extra;
        Some(Certificate::unchecked(coeffs, t.clone()))
    }
}

fn sorted_desc(values: &[BigUint], allowed: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = allowed.to_vec();
    order.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
    order
}

/// Largest `x` with `x·g1 ≤ rem` and `rem − x·g1 ≡ 0 (mod g2)`.
fn solve_pair(rem: &BigUint, g1: &BigUint, g2: &BigUint) -> Option<(BigUint, BigUint)> {
    let g = g1.gcd(g2);
    if !(rem % &g).is_zero() {
        return None;
    }
    let (a, b, r) = (g1 / &g, g2 / &g, rem / &g);
    let x0 = if b.is_one() {
        BigUint::zero()
    } else {
        let ai = BigInt::from(a.clone());
        let bi = BigInt::from(b.clone());
        let inv = ai.extended_gcd(&bi).x.mod_floor(&bi);
        let inv = inv.to_biguint().expect("nonnegative");
        (&r % &b) * inv % &b
    };
    let xmax = rem / g1;
    if x0 > xmax {
        return None;
    }
    let x = &x0 + (&xmax - &x0) / &b * &b;
    let y = (rem - &x * g1) / g2;
    Some((x, y))
}

fn suffix_gcds(values: &[BigUint], order: &[usize]) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); order.len() + 1];
    for k in (0..order.len()).rev() {
        out[k] = out[k + 1].gcd(&values[order[k]]);
    }
    out
}

struct Dfs<'a> {
    values: &'a [BigUint],
    order: Vec<usize>,
    suffix_gcd: Vec<BigUint>,
    failed: HashSet<(usize, BigUint)>,
    coeffs: Vec<BigUint>,
}

impl<'a> Dfs<'a> {
    fn new(values: &'a [BigUint], allowed: &[usize]) -> Self {
        let order = sorted_desc(values, allowed);
        let suffix_gcd = suffix_gcds(values, &order);
        let coeffs = vec![BigUint::zero(); order.len()];
        Self { values, order, suffix_gcd, failed: HashSet::new(), coeffs }
    }

    fn run(&mut self, pos: usize, rem: &BigUint) -> bool {
        if rem.is_zero() {
            for c in &mut self.coeffs[pos..] {
                c.set_zero();
            }
            return true;
        }
        let len = self.order.len();
        if pos == len || !(rem % &self.suffix_gcd[pos]).is_zero() {
            return false;
        }
        let g = &self.values[self.order[pos]];
        if pos + 1 == len {
            self.coeffs[pos] = rem / g;
            return true;
        }
        if pos + 2 == len {
            let g2 = &self.values[self.order[pos + 1]];
            return match solve_pair(rem, g, g2) {
                Some((x, y)) => {
                    self.coeffs[pos] = x;
                    self.coeffs[pos + 1] = y;
                    true
                }
                None => false,
            };
        }
        let key = (pos, rem.clone());
        if self.failed.contains(&key) {
            return false;
        }
        let mut c = rem / g;
        loop {
            let next = rem - &c * g;
            if self.run(pos + 1, &next) {
                self.coeffs[pos] = c;
                return true;
            }
            if c.is_zero() {
                break;
            }
            c -= 1u32;
        }
        self.failed.insert(key);
        false
    }

    fn certificate(&self, target: &BigUint) -> Certificate {
        let coeffs = self.order.iter().zip(&self.coeffs).map(|(&s, c)| (s, c.clone())).collect();
        Certificate::unchecked(coeffs, target.clone())
    }
}

fn dfs_cost(values: &[BigUint], order: &[usize], t: &BigUint) -> f64 {
    let mut cost = 1.0f64;
    for &s in order.iter().take(order.len().saturating_sub(2)) {
        let q = (t / &values[s]).to_f64().unwrap_or(f64::INFINITY);
        cost *= q + 1.0;
        if cost > DFS_BUDGET {
            break;
        }
    }
    cost
}

/// Membership of `t` in the span of the allowed slots.
pub(crate) fn member_in(values: &[BigUint], allowed: &[usize], t: &BigUint) -> Option<Certificate> {
    if t.is_zero() {
        return Some(Certificate::unchecked(BTreeMap::new(), BigUint::zero()));
    }
    if allowed.is_empty() {
        return None;
    }
    let order = sorted_desc(values, allowed);
    let smallest = *order.last().expect("nonempty");
    let small_modulus = values[smallest].to_u64();
    let use_table = dfs_cost(values, &order, t) > DFS_BUDGET
        && small_modulus.is_some_and(|m| ResidueTable::feasible(values, allowed, m));
    if use_table {
        let m = small_modulus.expect("checked");
        let table = ResidueTable::build(values, allowed, m).expect("feasible");
        return table.member(t, smallest);
    }
    let mut dfs = Dfs::new(values, allowed);
    dfs.run(0, t).then(|| dfs.certificate(t))
}

/// Membership with total coefficient at most `budget`; generators are tried
/// in descending order and branches whose remainder exceeds what the budget
/// can still cover are cut.
pub(crate) fn member_bounded_in(
    values: &[BigUint],
    allowed: &[usize],
    t: &BigUint,
    budget: &BigUint,
) -> Option<Certificate> {
    let order = sorted_desc(values, allowed);
    let suffix_gcd = suffix_gcds(values, &order);
    let mut coeffs = vec![BigUint::zero(); order.len()];
    if bounded_dfs(values, &order, &suffix_gcd, 0, t, budget, &mut coeffs) {
        let map = order.iter().zip(coeffs).map(|(&s, c)| (s, c)).collect();
        Some(Certificate::unchecked(map, t.clone()))
    } else {
        None
    }
}

fn bounded_dfs(
    values: &[BigUint],
    order: &[usize],
    suffix_gcd: &[BigUint],
    pos: usize,
    rem: &BigUint,
    budget: &BigUint,
    coeffs: &mut [BigUint],
) -> bool {
    if rem.is_zero() {
        for c in &mut coeffs[pos..] {
            c.set_zero();
        }
        return true;
    }
    if pos == order.len() || !(rem % &suffix_gcd[pos]).is_zero() {
        return false;
    }
    let g = &values[order[pos]];
    if rem > &(budget * g) {
        return false;
    }
    if pos + 1 == order.len() {
        coeffs[pos] = rem / g;
        return true;
    }
    if pos + 2 == order.len() {
        let g2 = &values[order[pos + 1]];
        return match solve_pair(rem, g, g2) {
            Some((x, y)) if &x + &y <= *budget => {
                coeffs[pos] = x;
                coeffs[pos + 1] = y;
                true
            }
            _ => false,
        };
    }
    let mut c = (rem / g).min(budget.clone());
    loop {
        let next = rem - &c * g;
        let left = budget - &c;
        if bounded_dfs(values, order, suffix_gcd, pos + 1, &next, &left, coeffs) {
            coeffs[pos] = c;
            return true;
        }
        if c.is_zero() {
            return false;
        }
        c -= 1u32;
    }
}

/// `B_i = gcd(A ∖ {d_i}) / gcd(A)` over the allowed slots.
pub(crate) fn b_index_in(values: &[BigUint], allowed: &[usize], i: usize) -> BigUint {
    let others = gcd_all(allowed.iter().filter(|&&s| s != i).map(|&s| &values[s]));
    let all = others.gcd(&values[i]);
    others / all
}

/// `m_i`: least `b ≥ 1` with `b·d_i` in the span of the other allowed slots.
pub(crate) fn m_index_in(values: &[BigUint], allowed: &[usize], i: usize) -> Result<(BigUint, Certificate)> {
    let others: Vec<usize> = allowed.iter().copied().filter(|&s| s != i).collect();
    if others.is_empty() {
        return Err(usage("m_i needs at least one other generator"));
    }
    let di = &values[i];
    let g_others = gcd_all(others.iter().map(|&s| &values[s]));
    let step = &g_others / di.gcd(&g_others);
    let (m_slot, m_val) = others.iter().map(|&s| (s, &values[s])).min_by(|a, b| a.1.cmp(b.1)).expect("nonempty");
    let via_self = di.to_u64().filter(|&m| ResidueTable::feasible(values, &others, m));
    let via_min = m_val.to_u64().filter(|&m| ResidueTable::feasible(values, &others, m));
    let pick_self = match (via_self, via_min) {
        (Some(a), Some(b)) => a <= b,
        (Some(_), None) => true,
        _ => false,
    };
    if pick_self {
        let m = via_self.expect("checked");
        let table = ResidueTable::build(values, &others, m).expect("feasible");
        let mut best: Option<(u128, usize)> = None;
        for &s in &others {
            let vs = values[s].to_u128().expect("checked");
            let r = ((m as u128 - vs % m as u128) % m as u128) as u64;
            if let Some(w) = table.class_min(r) {
                let total = w + vs;
                if best.is_none_or(|(b, _)| total < b) {
                    best = Some((total, s));
                }
            }
        }
        let (total, s) = best.expect("some multiple of d_i is always reachable");
        let vs = values[s].to_u128().expect("checked");
        let r = ((m as u128 - vs % m as u128) % m as u128) as u64;
        let mut coeffs = table.chain(r).expect("reachable");
        *coeffs.entry(s).or_default() += 1u32;
        let target = BigUint::from(total);
        let b = &target / di;
        return Ok((b, Certificate::unchecked(coeffs, target)));
    }
    if let Some(m) = via_min {
        let table = ResidueTable::build(values, &others, m).expect("feasible");
        let mut b = step.clone();
        loop {
            let t = &b * di;
            if let Some(cert) = table.member(&t, m_slot) {
                return Ok((b, cert));
            }
            b += &step;
        }
    }
    let mut b = step.clone();
    for _ in 0..M_SCAN_LIMIT {
        let t = &b * di;
        if let Some(cert) = member_in(values, &others, &t) {
            return Ok((b, cert));
        }
        b += &step;
    }
    Err(resource(format!("m_i for {di} not found among the first {M_SCAN_LIMIT} candidates")))
}

fn all_slots(a: &CurveSpec) -> Vec<usize> {
    (0..a.len()).collect()
}

fn check_index(a: &CurveSpec, i: usize) -> Result<()> {
    if a.len() < 2 {
        return Err(usage("the index needs at least two generators"));
    }
    if i >= a.len() {
        return Err(usage(format!("generator index {i} out of range")));
    }
    Ok(())
}

/// `B_i` for the generator at position `i` (0-based).
pub fn b_index(a: &CurveSpec, i: usize) -> Result<BigUint> {
    check_index(a, i)?;
    Ok(b_index_in(a.gens(), &all_slots(a), i))
}

/// A certificate for `t ∈ ⟨A⟩`, or `None`.
pub fn member(a: &CurveSpec, t: &BigUint) -> Option<Certificate> {
    member_in(a.gens(), &all_slots(a), t)
}

/// A certificate for `t ∈ ⟨A⟩` with coefficient total at most `budget`.
pub fn member_bounded(a: &CurveSpec, t: &BigUint, budget: &BigUint) -> Option<Certificate> {
    member_bounded_in(a.gens(), &all_slots(a), t, budget)
}

/// `m_i` for the generator at position `i` (0-based) with its witness.
pub fn m_index(a: &CurveSpec, i: usize) -> Result<(BigUint, Certificate)> {
    check_index(a, i)?;
    m_index_in(a.gens(), &all_slots(a), i)
}

/// Apéry set of `⟨A⟩` with respect to `min(A)`, in residue order.
pub fn apery_set(a: &CurveSpec) -> Result<Vec<BigUint>> {
    let a = a.dedup();
    let m = a.min().to_u64().filter(|&m| ResidueTable::feasible(a.gens(), &all_slots(&a), m));
    let m = m.ok_or_else(|| resource(format!("Apéry table modulus {} is too large", a.min())))?;
    let table = ResidueTable::build(a.gens(), &all_slots(&a), m).expect("feasible");
    Ok(table.entries().into_iter().map(BigUint::from).collect())
}

/// Frobenius number of `⟨A⟩`; `-1` when `1 ∈ A`.
pub fn frobenius(a: &CurveSpec) -> Result<BigInt> {
    if !a.gcd().is_one() {
        return Err(usage(format!("frobenius needs gcd(A) = 1, got {}", a.gcd())));
    }
    if a.min().is_one() {
        return Ok(BigInt::from(-1));
    }
    let ap = apery_set(a)?;
    let max = ap.into_iter().max().expect("nonempty");
    Ok(BigInt::from(max) - BigInt::from(a.min().clone()))
}

/// The minimal generating subset of `⟨A⟩`, sorted ascending.
pub fn minimal_generators(a: &CurveSpec) -> CurveSpec {
    let d = a.dedup().sorted();
    let values = d.gens();
    let keep: Vec<BigUint> = (0..values.len())
        .filter(|&i| {
            let others: Vec<usize> = (0..i).collect();
            member_in(values, &others, &values[i]).is_none()
        })
        .map(|i| values[i].clone())
        .collect();
    CurveSpec { gens: keep }
}
