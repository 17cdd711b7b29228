//! Gcd-based reduction of monomial curve configurations.
//!
//! Two moves preserve the complete-intersection property: scaling `d_i` by
//! `B_i` when `B_i > 1` (which substitutes `x_i ↦ x_i^{B_i}` in the ideal),
//! and removing `d_i` when it lies in the span of the remaining values (which
//! adds one binomial). A lone value can always be dropped. What survives
//! every move is the reduced configuration; it is empty for every complete
//! intersection in three variables and for every projective complete
//! intersection, and nonempty otherwise in those settings.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::binomial::{Binomial, Exponents};
use crate::error::{usage, Error, Result};
use crate::oracle::Oracle;
use crate::semigroup::{b_index_in, m_index_in, member_bounded_in, member_in, Certificate, CurveSpec};
use crate::verdict::{Decision, Method, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionStep {
    /// Multiply the value of `slot` by `factor ≥ 2`.
    Scale { slot: usize, factor: BigUint },
    /// Remove `slot`; the certificate expresses its current value through
    /// the other live slots.
    Remove { slot: usize, certificate: Certificate },
    /// Remove the last live slot.
    DropIsolated { slot: usize },
}

impl ReductionStep {
    pub fn slot(&self) -> usize {
        match self {
            ReductionStep::Scale { slot, .. }
            | ReductionStep::Remove { slot, .. }
            | ReductionStep::DropIsolated { slot } => *slot,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub initial: CurveSpec,
    pub steps: Vec<ReductionStep>,
    /// Live slots at the end, ascending.
    pub residual_slots: Vec<usize>,
    /// Current (scaled) values of the residual slots.
    pub residual_values: Vec<BigUint>,
}

impl ReductionTrace {
    pub fn is_empty_residual(&self) -> bool {
        self.residual_slots.is_empty()
    }

    /// The residual as a configuration, if nonempty.
    pub fn residual(&self) -> Option<CurveSpec> {
        CurveSpec::new(self.residual_values.clone()).ok()
    }

    /// Re-applies the steps to `initial`, checking every certificate, and
    /// returns the final live slots and all slot values.
    pub fn replay(&self) -> Result<(Vec<usize>, Vec<BigUint>)> {
        let mut state = State::new(&self.initial);
        for step in &self.steps {
            match step {
                ReductionStep::Scale { slot, factor } => {
                    state.require_alive(*slot)?;
                    if factor < &BigUint::from(2u32) {
                        return Err(usage("scale factors must be at least 2"));
                    }
                    state.values[*slot] *= factor;
                    state.scale[*slot] *= factor;
                }
                ReductionStep::Remove { slot, certificate } => {
                    state.require_alive(*slot)?;
                    let live = state.live();
                    let ok = certificate.target() == &state.values[*slot]
                        && certificate.verify(&state.values)
                        && certificate.coeffs().keys().all(|&k| k != *slot && live.contains(&k));
                    if !ok {
                        return Err(usage(format!("invalid removal certificate for slot {slot}")));
                    }
                    state.alive[*slot] = false;
                }
                ReductionStep::DropIsolated { slot } => {
                    state.require_alive(*slot)?;
                    if state.live().len() != 1 {
                        return Err(usage("only a lone slot can be dropped"));
                    }
                    state.alive[*slot] = false;
                }
            }
        }
        Ok((state.live(), state.values))
    }

    /// Accumulated scale factor of every slot.
    fn scale_factors(&self) -> Vec<BigUint> {
        let mut scale = vec![BigUint::one(); self.initial.len()];
        for step in &self.steps {
            if let ReductionStep::Scale { slot, factor } = step {
                scale[*slot] *= factor;
            }
        }
        scale
    }
}

struct State {
    values: Vec<BigUint>,
    scale: Vec<BigUint>,
    alive: Vec<bool>,
}

impl State {
    fn new(a: &CurveSpec) -> Self {
        Self { values: a.gens().to_vec(), scale: vec![BigUint::one(); a.len()], alive: vec![true; a.len()] }
    }

    fn live(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&i| self.alive[i]).collect()
    }

    fn others(&self, i: usize) -> Vec<usize> {
        (0..self.alive.len()).filter(|&j| j != i && self.alive[j]).collect()
    }

    fn require_alive(&self, slot: usize) -> Result<()> {
        if self.alive.get(slot).copied().unwrap_or(false) {
            Ok(())
        } else {
            Err(usage(format!("slot {slot} is not live")))
        }
    }

    /// Removes later copies of repeated values with unit certificates.
    fn drop_duplicates(&mut self, steps: &mut Vec<ReductionStep>) {
        for i in 0..self.values.len() {
            if !self.alive[i] {
                continue;
            }
            if let Some(j) = (0..i).find(|&j| self.alive[j] && self.values[j] == self.values[i]) {
                let mut coeffs = std::collections::BTreeMap::new();
                coeffs.insert(j, BigUint::one());
                let certificate = Certificate::unchecked(coeffs, self.values[i].clone());
                steps.push(ReductionStep::Remove { slot: i, certificate });
                self.alive[i] = false;
            }
        }
    }

    fn finish(self, initial: &CurveSpec, steps: Vec<ReductionStep>) -> ReductionTrace {
        let residual_slots = self.live();
        let residual_values = residual_slots.iter().map(|&s| self.values[s].clone()).collect();
        ReductionTrace { initial: initial.clone(), steps, residual_slots, residual_values }
    }
}

/// Applies scale and remove moves to a fixpoint. Each pass scans slots in
/// ascending order, first scaling every slot with `B_i > 1`, then removing
/// slots one at a time; a final lone slot is dropped.
pub fn affine_reduce(a: &CurveSpec) -> ReductionTrace {
    let mut state = State::new(a);
    let mut steps = Vec::new();
    state.drop_duplicates(&mut steps);
    loop {
        let mut changed = false;
        if state.live().len() >= 2 {
            for i in state.live() {
                let factor = b_index_in(&state.values, &state.live(), i);
                if factor > BigUint::one() {
                    state.values[i] *= &factor;
                    state.scale[i] *= &factor;
                    steps.push(ReductionStep::Scale { slot: i, factor });
                    changed = true;
                }
            }
            for i in state.live() {
                let others = state.others(i);
                if others.is_empty() {
                    break;
                }
                if let Some(certificate) = member_in(&state.values, &others, &state.values[i]) {
                    steps.push(ReductionStep::Remove { slot: i, certificate });
                    state.alive[i] = false;
                    changed = true;
                }
            }
        }
        let live = state.live();
        if live.len() == 1 {
            steps.push(ReductionStep::DropIsolated { slot: live[0] });
            state.alive[live[0]] = false;
            break;
        }
        if !changed || live.is_empty() {
            break;
        }
    }
    state.finish(a, steps)
}

/// The binomial contributed by each removal, pulled back through the scale
/// factors accumulated up to that point.
fn removal_binomials(trace: &ReductionTrace) -> Result<Vec<Binomial>> {
    let values = trace.initial.gens();
    let mut scale = vec![BigUint::one(); values.len()];
    let mut out = Vec::new();
    for step in &trace.steps {
        match step {
            ReductionStep::Scale { slot, factor } => scale[*slot] *= factor,
            ReductionStep::Remove { slot, certificate } => {
                let mut plus = Exponents::new();
                plus.insert(*slot, scale[*slot].clone());
                let minus = certificate.coeffs().iter().map(|(&j, c)| (j, c * &scale[j])).collect();
                out.push(Binomial::affine(plus, minus, values)?);
            }
            ReductionStep::DropIsolated { .. } => {}
        }
    }
    Ok(out)
}

/// `(Σ deg − Σ d) / gcd(A)` for a complete intersection.
pub(crate) fn frobenius_from_degrees<'a>(degrees: impl IntoIterator<Item = &'a BigUint>, a: &CurveSpec) -> BigInt {
    let total: BigUint = degrees.into_iter().sum();
    (BigInt::from(total) - BigInt::from(a.sum())) / BigInt::from(a.gcd())
}

fn ci_from_generators(method: Method, generators: Vec<Binomial>, a: &CurveSpec) -> Verdict {
    let frob = frobenius_from_degrees(generators.iter().map(|g| g.degree().first()), a);
    let mut v = Verdict::bare(Decision::Ci, method);
    v.generators = Some(generators);
    v.frobenius = Some(frob);
    v
}

/// Decides whether `I(A)` is a complete intersection.
pub fn affine_ci(a: &CurveSpec, oracle_bound: Option<&BigUint>) -> Verdict {
    affine_ci_with(a, oracle_bound, &Oracle::default())
}

pub fn affine_ci_with(a: &CurveSpec, oracle_bound: Option<&BigUint>, oracle: &Oracle) -> Verdict {
    let trace = affine_reduce(a);
    let mut verdict = decide_residual(a, &trace, oracle_bound, oracle);
    verdict.trace = Some(trace);
    verdict
}

fn decide_residual(a: &CurveSpec, trace: &ReductionTrace, oracle_bound: Option<&BigUint>, oracle: &Oracle) -> Verdict {
    let removals = match removal_binomials(trace) {
        Ok(r) => r,
        Err(e) => unreachable!("reduction produced an inhomogeneous binomial: {e}"),
    };
    if trace.is_empty_residual() {
        return ci_from_generators(Method::EmptyReduction, removals, a);
    }
    let slots = &trace.residual_slots;
    if slots.len() == 3 {
        return Verdict::bare(Decision::NotCi, Method::ThreeGeneratorResidual);
    }
    let (_, values) = trace.replay().expect("trace built by affine_reduce replays");
    if let Some(v) = critical_tests(&values, slots) {
        return v;
    }
    let residual = trace.residual().expect("nonempty residual");
    match oracle.oracle_ci(&residual, oracle_bound) {
        Ok(ov) => {
            let mut v = Verdict::bare(ov.decision, Method::OracleCount);
            if ov.decision == Decision::Ci {
                let scale = trace.scale_factors();
                let pulled: Result<Vec<Binomial>> = ov
                    .generators
                    .iter()
                    .flatten()
                    .map(|g| {
                        let lift = |e: &Exponents| -> Exponents {
                            e.iter().map(|(&k, c)| (slots[k], c * &scale[slots[k]])).collect()
                        };
                        Binomial::affine(lift(g.plus()), lift(g.minus()), a.gens())
                    })
                    .collect();
                match pulled {
                    Ok(mut gens) => {
                        let mut all = removals;
                        all.append(&mut gens);
                        v = ci_from_generators(Method::OracleCount, all, a);
                    }
                    Err(Error::Usage(msg)) => unreachable!("pull-back failed: {msg}"),
                    Err(_) => {}
                }
            }
            v.oracle = ov.oracle;
            v
        }
        Err(_) => Verdict::bare(Decision::Inconclusive, Method::OracleCount),
    }
}

/// Critical-degree arguments on a reduced residual with at least four values.
fn critical_tests(values: &[BigUint], slots: &[usize]) -> Option<Verdict> {
    let crit: Vec<(BigUint, Certificate)> = slots
        .iter()
        .map(|&i| m_index_in(values, slots, i).map(|(m, c)| (&m * &values[i], c)))
        .collect::<Result<_>>()
        .ok()?;
    for x in 0..slots.len() {
        for y in x + 1..slots.len() {
            let (i, j) = (slots[x], slots[y]);
            if crit[x].0 == crit[y].0 {
                continue;
            }
            if uses_other(values, slots, i, &crit[x].0, j) && uses_other(values, slots, j, &crit[y].0, i) {
                return Some(Verdict::bare(Decision::NotCi, Method::CrossedCriticalPair));
            }
        }
    }
    let mut degrees: Vec<&BigUint> = crit.iter().map(|c| &c.0).collect();
    degrees.sort();
    degrees.dedup();
    if degrees.len() + 1 >= slots.len() {
        return Some(Verdict::bare(Decision::NotCi, Method::DistinctCriticalDegrees));
    }
    None
}

/// Whether `target` (the critical degree of slot `i`) has a factorization
/// over the slots other than `i` that uses slot `j`.
fn uses_other(values: &[BigUint], slots: &[usize], i: usize, target: &BigUint, j: usize) -> bool {
    let others: Vec<usize> = slots.iter().copied().filter(|&s| s != i).collect();
    target >= &values[j] && member_in(values, &others, &(target - &values[j])).is_some()
}

/// Decides whether `I(A★)` is a complete intersection with the
/// bounded-coefficient removal loop: the maximum is never removed, every
/// other value `d_i` is removed when `B_i d_i` is a combination of the
/// remaining values with coefficient sum at most `B_i`, and the loop stops
/// when only the maximum is left or a full pass removes nothing.
pub fn projective_ci(a: &CurveSpec) -> Verdict {
    let mut state = State::new(a);
    let mut steps = Vec::new();
    state.drop_duplicates(&mut steps);
    let n = a.len();
    let values = a.gens();
    let d = a.max().clone();
    let max_slot = state.live().into_iter().find(|&s| values[s] == d).expect("max present");
    let mut generators: Vec<Binomial> = steps
        .iter()
        .map(|s| match s {
            ReductionStep::Remove { slot, certificate } => {
                let plus: Exponents = [(*slot, BigUint::one())].into_iter().collect();
                Binomial::projective(plus, certificate.coeffs().clone(), values).expect("duplicate pair")
            }
            _ => unreachable!(),
        })
        .collect();
    loop {
        let before = state.live();
        for i in before.iter().copied().filter(|&s| s != max_slot) {
            if !state.alive[i] {
                continue;
            }
            let live = state.live();
            let others = state.others(i);
            let factor = b_index_in(values, &live, i);
            let target = &factor * &values[i];
            if let Some(cert) = member_bounded_in(values, &others, &target, &factor) {
                let slack = &factor - cert.total();
                let mut minus = cert.coeffs().clone();
                if !slack.is_zero() {
                    minus.insert(n, slack);
                }
                let plus: Exponents = [(i, factor.clone())].into_iter().collect();
                generators.push(Binomial::projective(plus, minus, values).expect("homogeneous by construction"));
                if factor > BigUint::one() {
                    steps.push(ReductionStep::Scale { slot: i, factor: factor.clone() });
                }
                let scaled: Vec<BigUint> =
                    values.iter().enumerate().map(|(k, v)| if k == i { target.clone() } else { v.clone() }).collect();
                let certificate = Certificate::unchecked(cert.coeffs().clone(), target.clone());
                debug_assert!(certificate.verify(&scaled));
                steps.push(ReductionStep::Remove { slot: i, certificate });
                state.alive[i] = false;
            }
        }
        let live = state.live();
        if live == [max_slot] || live == before {
            break;
        }
    }
    let live = state.live();
    let decision = if live == [max_slot] { Decision::Ci } else { Decision::NotCi };
    let mut verdict = if decision == Decision::Ci {
        steps.push(ReductionStep::DropIsolated { slot: max_slot });
        state.alive[max_slot] = false;
        let degrees: Vec<BigUint> = generators.iter().map(|g| g.degree().first().clone()).collect();
        let frob = frobenius_from_degrees(degrees.iter(), a);
        let mut v = Verdict::bare(Decision::Ci, Method::ProjectiveReduction);
        v.generators = Some(generators);
        v.frobenius = Some(frob);
        v
    } else {
        Verdict::bare(Decision::NotCi, Method::ProjectiveReduction)
    };
    let mut values_now = values.to_vec();
    for s in &steps {
        if let ReductionStep::Scale { slot, factor } = s {
            values_now[*slot] *= factor;
        }
    }
    let residual_slots = state.live();
    let residual_values = residual_slots.iter().map(|&s| values_now[s].clone()).collect();
    verdict.trace = Some(ReductionTrace { initial: a.clone(), steps, residual_slots, residual_values });
    verdict
}
