//! Acceptance run: one PASS/FAIL line per criterion, then a summary.
//!
//! The process always exits 0 so that `cargo test` stays green when a
//! criterion fails; the printed lines are the result.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use toric_ci::arith::{gcd_closed, seq_terms, PqParams, SeqKind};
use toric_ci::cli::sweep::{parse_ranges, run_sweep, SweepOutcome, SweepRow};
use toric_ci::families::{ci_gen_arith, family_build, family_ci, Family, GenArith};
use toric_ci::oracle::oracle_ci;
use toric_ci::reduction::{affine_ci, affine_reduce, projective_ci};
use toric_ci::semigroup::{frobenius, CurveSpec};
use toric_ci::verdict::Decision;

const PQ: [(u64, u64); 5] = [(1, 1), (1, 2), (2, 1), (3, 2), (2, 3)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct Report {
    lines: Vec<bool>,
}

impl Report {
    fn run(&mut self, id: usize, name: &str, limit: Duration, check: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took <= limit;
        let status = if pass { "PASS" } else { "FAIL" };
        println!("criterion {id} {status}: {name} ({}; {:.1}s of {}s)", o.detail, took.as_secs_f64(), limit.as_secs());
        self.lines.push(pass);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn sweep(family: &str, ranges: &str, projective: bool, oracle_max: u64) -> SweepOutcome {
    let r = parse_ranges(ranges).expect("ranges parse");
    run_sweep(family, &r, projective, &BigUint::from(oracle_max)).expect("sweep runs")
}

fn merge(parts: impl IntoIterator<Item = SweepOutcome>) -> SweepOutcome {
    let mut all = SweepOutcome::default();
    for p in parts {
        all.rows.extend(p.rows);
        all.skipped += p.skipped;
        all.rejected += p.rejected;
    }
    all
}

fn summary(o: &SweepOutcome) -> String {
    let oracle_runs = o.rows.iter().filter(|r| r.oracle.is_some()).count();
    format!(
        "{} points, {} oracle runs, {} outside hypotheses, {} disagreements",
        o.rows.len(),
        oracle_runs,
        o.skipped,
        o.disagreements()
    )
}

fn gen_sweep(projective: bool) -> SweepOutcome {
    merge((3..=20u64).map(|d1| {
        let ranges = format!("d1={d1},h=1..3,step=1..8,n=3..{}", d1.min(6));
        sweep("gen-arith", &ranges, projective, 200)
    }))
}

fn almost_sweep(n: u64, projective: bool) -> SweepOutcome {
    sweep("almost", &format!("d1=1..20,h=1..3,step=1..6,n={n},dn=1..60"), projective, 200)
}

fn fib_lucas_sweeps(projective: bool, oracle_max: u64) -> (SweepOutcome, SweepOutcome) {
    let fib = merge(
        PQ.iter()
            .map(|(p, q)| sweep("fib", &format!("p={p},q={q},h=1..3,a=2..10,d=1..6,n=3..5"), projective, oracle_max)),
    );
    let lucas = merge(
        PQ.iter().map(|(p, q)| sweep("lucas", &format!("p={p},q={q},a=2..10,d=1..6,n=3..5"), projective, oracle_max)),
    );
    (fib, lucas)
}

fn first_disagreement(o: &SweepOutcome) -> String {
    o.rows
        .iter()
        .find(|r| !r.agree)
        .map(|r| {
            format!(
                "; first: {:?} family {} general {} oracle {:?}",
                r.params.family.fields(),
                r.family.tag(),
                r.general.tag(),
                r.oracle.map(|d| d.tag())
            )
        })
        .unwrap_or_default()
}

fn worked_example() -> Outcome {
    let cases = [
        ([11u64, 18, 29], Decision::Ci),
        ([11, 199, 322], Decision::NotCi),
        ([11, 2207, 3571], Decision::Ci),
        ([11, 24476, 39603], Decision::NotCi),
    ];
    let wrong: Vec<String> = cases
        .iter()
        .filter_map(|(gens, want)| {
            let got = affine_ci(&CurveSpec::from_u64(gens).unwrap(), None).decision;
            (got != *want).then(|| format!("{gens:?} gave {}", got.tag()))
        })
        .collect();
    outcome(wrong.is_empty(), if wrong.is_empty() { "4/4 verdicts match".into() } else { wrong.join(", ") })
}

/// The general decision for fixed `(a, d, n)` must not depend on `(p, q, h)`.
fn fib_independence(fib: &SweepOutcome) -> Vec<(u64, u64, u64)> {
    let mut seen: BTreeMap<(u64, u64, u64), Decision> = BTreeMap::new();
    let mut broken = Vec::new();
    for row in &fib.rows {
        if let Family::Fib(f) = row.params.family {
            let key = (f.a, f.step_d, f.n);
            match seen.get(&key) {
                Some(d) if *d != row.general => broken.push(key),
                Some(_) => {}
                None => {
                    seen.insert(key, row.general);
                }
            }
        }
    }
    broken.sort();
    broken.dedup();
    broken
}

struct FrobeniusTally {
    checked: usize,
    enumerated: usize,
    beyond_enumeration: usize,
    failures: Vec<String>,
}

fn check_frobenius(rows: &[SweepRow], tally: &mut FrobeniusTally) {
    for row in rows.iter().filter(|r| r.family == Decision::Ci && !r.params.projective) {
        let a = family_build(&row.params).unwrap();
        let v = family_ci(&row.params).unwrap().verdict;
        tally.checked += 1;
        let tag = format!("{:?}", row.params.family.fields());
        let Some(g) = v.frobenius.clone() else {
            tally.failures.push(format!("{tag}: no Frobenius number"));
            continue;
        };
        match frobenius(&a.normalized()) {
            Ok(enumerated) => {
                tally.enumerated += 1;
                if enumerated != g {
                    tally.failures.push(format!("{tag}: closed form {g}, enumeration {enumerated}"));
                }
            }
            Err(_) => tally.beyond_enumeration += 1,
        }
        let Some(gens) = v.generators.as_ref() else {
            tally.failures.push(format!("{tag}: no generators"));
            continue;
        };
        let degrees: BigUint = gens.iter().map(|b| b.degree().first().clone()).sum();
        let rhs = BigInt::from(degrees) - BigInt::from(a.sum());
        if BigInt::from(a.gcd()) * &g != rhs {
            tally.failures.push(format!("{tag}: e*g = {} but degree sum gives {rhs}", BigInt::from(a.gcd()) * &g));
        }
    }
}

fn frobenius_spots() -> Vec<String> {
    let mut bad = Vec::new();
    for (gens, want) in [(&[4u64, 5, 6][..], 7), (&[8, 10, 12, 15], 29), (&[2, 3], 1)] {
        let a = CurveSpec::from_u64(gens).unwrap();
        let enumerated = frobenius(&a).unwrap();
        let general = affine_ci(&a, None).frobenius;
        if enumerated != BigInt::from(want) || general != Some(BigInt::from(want)) {
            bad.push(format!("{gens:?}: enumeration {enumerated}, algorithm {general:?}"));
        }
    }
    let closed = ci_gen_arith(&GenArith { d1: 4, h: 1, step: 1, n: 3 }, false).unwrap().verdict.frobenius;
    if closed != Some(BigInt::from(7)) {
        bad.push(format!("closed form for <4,5,6> gave {closed:?}"));
    }
    bad
}

/// Terms of one sequence as signed integers, indices `0..=upto`.
struct Seqs {
    pq: PqParams,
    f: Vec<BigInt>,
    l: Vec<BigInt>,
}

impl Seqs {
    fn new(pq: PqParams, upto: u64) -> Self {
        let signed = |kind| seq_terms(pq, kind, upto).into_iter().map(BigInt::from).collect();
        Self { pq, f: signed(SeqKind::Fibonacci), l: signed(SeqKind::Lucas) }
    }

    fn q(&self) -> BigInt {
        BigInt::from(self.pq.q())
    }

    fn qp(&self, e: u64) -> BigInt {
        num_traits::pow(self.q(), e as usize)
    }

    fn sign(e: u64) -> BigInt {
        if e % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        }
    }

    fn u(&self, which: SeqKind) -> &[BigInt] {
        match which {
            SeqKind::Fibonacci => &self.f,
            SeqKind::Lucas => &self.l,
        }
    }
}

#[derive(Default)]
struct Violations {
    by_identity: BTreeMap<&'static str, (usize, String)>,
    checks: usize,
}

impl Violations {
    fn check(&mut self, name: &'static str, holds: bool, at: impl FnOnce() -> String) {
        self.checks += 1;
        if !holds {
            let e = self.by_identity.entry(name).or_insert_with(|| (0, at()));
            e.0 += 1;
        }
    }
}

const KINDS: [SeqKind; 2] = [SeqKind::Fibonacci, SeqKind::Lucas];

fn gcd_identities(s: &Seqs, v: &mut Violations) {
    for a in 1..=12u64 {
        for b in 1..=12u64 {
            for ka in KINDS {
                for kb in KINDS {
                    let direct = s.u(ka)[a as usize].gcd(&s.u(kb)[b as usize]);
                    let closed = BigInt::from(gcd_closed(s.pq, ka, a, kb, b).unwrap());
                    v.check("gcd closed form", direct == closed, || format!("{} {ka:?}_{a} {kb:?}_{b}", s.pq));
                }
            }
        }
    }
}

fn divisibility(s: &Seqs, v: &mut Violations) {
    let (f, l) = (&s.f, &s.l);
    let p = s.pq.p();
    for a in 1..=10usize {
        for b in 1..=10usize {
            if b % a == 0 {
                v.check("F_a | F_b when a | b", f[a].is_zero() || f[b].is_multiple_of(&f[a]), || {
                    format!("{} a={a} b={b}", s.pq)
                });
            }
            let exempt = p == 1 && b == 1 && a == 2;
            if !exempt && f[b].is_multiple_of(&f[a]) {
                v.check("a | b when F_a | F_b", b % a == 0, || format!("{} a={a} b={b}", s.pq));
            }
            if a >= 2 {
                let odd_ratio = b % a == 0 && (b / a) % 2 == 1;
                v.check("L_a | L_b iff b/a odd", l[b].is_multiple_of(&l[a]) == odd_ratio, || {
                    format!("{} a={a} b={b}", s.pq)
                });
            }
            if b % 2 == 0 {
                v.check("gcd(L_a, L_a+b) = gcd(L_a, F_b)", l[a].gcd(&l[a + b]) == l[a].gcd(&f[b]), || {
                    format!("{} a={a} b={b}", s.pq)
                });
            }
        }
    }
}

fn recurrence_identities(s: &Seqs, v: &mut Violations) {
    let (f, l, q) = (&s.f, &s.l, s.q());
    for kind in KINDS {
        let u = s.u(kind);
        for a in 1..=10usize {
            for b in 1..=10usize {
                v.check("index addition", u[a + b] == &f[a] * &u[b + 1] + &q * &f[a - 1] * &u[b], || {
                    format!("{} {kind:?} a={a} b={b}", s.pq)
                });
                v.check(
                    "U_a+2b + (-q)^b U_a = L_b U_a+b",
                    &u[a + 2 * b] + Seqs::sign(b as u64) * s.qp(b as u64) * &u[a] == &l[b] * &u[a + b],
                    || format!("{} {kind:?} a={a} b={b}", s.pq),
                );
                for c in 1..=10usize {
                    if a + b <= c {
                        continue;
                    }
                    let d = a + b - c;
                    if d > 10 {
                        continue;
                    }
                    for e in 1..=a.min(b).min(c).min(d) {
                        let lhs = &f[a] * &u[b] - &f[c] * &u[d];
                        let rhs =
                            Seqs::sign(e as u64) * s.qp(e as u64) * (&f[a - e] * &u[b - e] - &f[c - e] * &u[d - e]);
                        v.check("index shift", lhs == rhs, || {
                            format!("{} {kind:?} a={a} b={b} c={c} d={d} e={e}", s.pq)
                        });
                    }
                }
            }
        }
    }
    for a in 1..=10usize {
        let ok = &l[a] * &f[a] == f[2 * a] && l[a] == &f[a + 1] + &q * &f[a - 1];
        v.check("L_a = F_2a / F_a", ok, || format!("{} a={a}", s.pq));
    }
}

fn inequalities(s: &Seqs, v: &mut Violations) {
    let (f, l) = (&s.f, &s.l);
    let range = 2..=10usize;
    for kind in KINDS {
        let u = s.u(kind);
        for a in range.clone() {
            for b in range.clone() {
                v.check("q^b U_a < U_a+2b", s.qp(b as u64) * &u[a] < u[a + 2 * b], || {
                    format!("{} {kind:?} a={a} b={b}", s.pq)
                });
                let fu = &f[a] * &u[b];
                v.check("U_a+b-2 < F_a U_b < U_a+b-1", u[a + b - 2] < fu && fu < u[a + b - 1], || {
                    format!("{} {kind:?} a={a} b={b}", s.pq)
                });
                for c in range.clone() {
                    for d in range.clone() {
                        let other = &f[c] * &u[d];
                        if a + b < c + d {
                            v.check("F_a U_b grows with a+b", fu < other, || {
                                format!("{} {kind:?} a={a} b={b} c={c} d={d}", s.pq)
                            });
                        }
                        if a < c && a < d && a + b == c + d {
                            v.check("F_a U_b order at equal index sum", (fu < other) == (a % 2 == 0), || {
                                format!("{} {kind:?} a={a} b={b} c={c} d={d}", s.pq)
                            });
                        }
                    }
                }
            }
        }
    }
    for a in range.clone() {
        v.check("L_a < F_a+2", l[a] < f[a + 2], || format!("{} a={a}", s.pq));
        for b in range.clone() {
            let prod = &l[a] * &l[b];
            let upper = l[a + b + 1].clone().min(BigInt::from(2) * &l[a + b]);
            v.check("L_a L_b between neighbours", l[a + b - 1] < prod && prod < upper, || {
                format!("{} a={a} b={b}", s.pq)
            });
            if a <= b {
                let ok = if a % 2 == 1 { prod < l[a + b] } else { prod > l[a + b] };
                v.check("L_a L_b against L_a+b", ok, || format!("{} a={a} b={b}", s.pq));
            }
        }
    }
}

fn identity_suites() -> Outcome {
    let mut v = Violations::default();
    for (p, q) in PQ {
        let s = Seqs::new(PqParams::new(p, q).unwrap(), 40);
        gcd_identities(&s, &mut v);
        divisibility(&s, &mut v);
        recurrence_identities(&s, &mut v);
        inequalities(&s, &mut v);
    }
    let total: usize = v.by_identity.values().map(|e| e.0).sum();
    let mut detail = format!("{} checks, {total} violations", v.checks);
    for (name, (count, first)) in &v.by_identity {
        detail += &format!("; {name}: {count}, first at {first}");
    }
    outcome(total == 0, detail)
}

fn three_generator_equivalence() -> Outcome {
    let mut triples = 0;
    let mut bad = Vec::new();
    for a in 1..=30u64 {
        for b in a + 1..=30 {
            for c in b + 1..=30 {
                if a.gcd(&b).gcd(&c) != 1 {
                    continue;
                }
                triples += 1;
                let spec = CurveSpec::from_u64(&[a, b, c]).unwrap();
                let empty = affine_reduce(&spec).is_empty_residual();
                match oracle_ci(&spec, None) {
                    Ok(o) if (o.decision == Decision::Ci) == empty && o.decision != Decision::Inconclusive => {}
                    Ok(o) => bad.push(format!("{{{a},{b},{c}}} oracle {} residual empty {empty}", o.decision.tag())),
                    Err(e) => bad.push(format!("{{{a},{b},{c}}} oracle error {e}")),
                }
            }
        }
    }
    let mut detail = format!("{triples} triples, {} disagreements", bad.len());
    if let Some(first) = bad.first() {
        detail += &format!("; first: {first}");
    }
    outcome(bad.is_empty(), detail)
}

fn main() {
    let mut report = Report { lines: Vec::new() };
    report.run(1, "worked example verdicts", secs(5), worked_example);

    let mut affine_rows: Vec<SweepRow> = Vec::new();
    report.run(2, "generalized arithmetic sweep", secs(120), || {
        let o = gen_sweep(false);
        let pass = o.disagreements() == 0 && !o.rows.is_empty();
        let out = outcome(pass, summary(&o) + &first_disagreement(&o));
        affine_rows.extend(o.rows);
        out
    });
    report.run(3, "almost arithmetic sweep", secs(300), || {
        let four = almost_sweep(4, false);
        let five = almost_sweep(5, false);
        let five_ci = five.rows.iter().filter(|r| r.family != Decision::NotCi || r.general != Decision::NotCi).count();
        let pass = four.disagreements() == 0 && five.disagreements() == 0 && five_ci == 0 && !four.rows.is_empty();
        let out = outcome(
            pass,
            format!(
                "n=4: {}{}; n=5: {}, {five_ci} not NotCI{}",
                summary(&four),
                first_disagreement(&four),
                summary(&five),
                first_disagreement(&five)
            ),
        );
        affine_rows.extend(four.rows);
        affine_rows.extend(five.rows);
        out
    });
    report.run(4, "Fibonacci and Lucas sweeps", secs(300), || {
        let (fib, lucas) = fib_lucas_sweeps(false, 10_000_000);
        let broken = fib_independence(&fib);
        let pass = fib.disagreements() == 0 && lucas.disagreements() == 0 && broken.is_empty();
        let out = outcome(
            pass,
            format!(
                "fib: {}{}; lucas: {}{}; (a,d,n) with p,q,h-dependent verdicts: {}",
                summary(&fib),
                first_disagreement(&fib),
                summary(&lucas),
                first_disagreement(&lucas),
                broken.len()
            ),
        );
        affine_rows.extend(fib.rows);
        affine_rows.extend(lucas.rows);
        out
    });
    report.run(5, "projective sweeps", secs(600), || {
        let gen = gen_sweep(true);
        let almost = almost_sweep(4, true);
        let (fib, lucas) = fib_lucas_sweeps(true, 200);
        let witness = CurveSpec::from_u64(&[4, 9, 10]).unwrap();
        let witness_ok =
            affine_ci(&witness, None).decision == Decision::Ci && projective_ci(&witness).decision == Decision::NotCi;
        let all = [&gen, &almost, &fib, &lucas];
        let pass = witness_ok && all.iter().all(|o| o.disagreements() == 0);
        let mut detail = format!(
            "gen: {}; almost: {}; fib: {}; lucas: {}; {{4,9,10}} affine CI and projective NotCI: {witness_ok}",
            summary(&gen),
            summary(&almost),
            summary(&fib),
            summary(&lucas)
        );
        for o in all {
            detail += &first_disagreement(o);
        }
        outcome(pass, detail)
    });
    report.run(6, "Frobenius numbers of CI points", secs(300), || {
        let mut tally = FrobeniusTally { checked: 0, enumerated: 0, beyond_enumeration: 0, failures: Vec::new() };
        check_frobenius(&affine_rows, &mut tally);
        let spots = frobenius_spots();
        let pass = tally.failures.is_empty() && spots.is_empty() && tally.checked > 0;
        let mut detail = format!(
            "{} CI points, {} compared with enumeration, {} beyond the enumeration limit, {} failures",
            tally.checked,
            tally.enumerated,
            tally.beyond_enumeration,
            tally.failures.len()
        );
        if let Some(first) = tally.failures.first().or(spots.first()) {
            detail += &format!("; first: {first}");
        }
        outcome(pass, detail)
    });
    report.run(7, "sequence identity suites", secs(30), identity_suites);
    report.run(8, "three-generator equivalence", secs(120), three_generator_equivalence);

    let passed = report.lines.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", report.lines.len());
}
