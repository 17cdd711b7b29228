//! Verdicts stated in the source text, checked through the public API.

use num_bigint::BigInt;
use toric_ci::arith::{seq_term, PqParams, SeqKind};
use toric_ci::families::{
    ci_fibonacci, ci_gen_arith, ci_lucas, family_build, Family, FamilyParams, Fib, GenArith, Lucas,
};
use toric_ci::reduction::{affine_ci, projective_ci};
use toric_ci::semigroup::CurveSpec;
use toric_ci::verdict::{Decision, Method};

fn spec(v: &[u64]) -> CurveSpec {
    CurveSpec::from_u64(v).unwrap()
}

#[test]
fn lucas_example_depends_on_h() {
    let pq = PqParams::new(1, 1).unwrap();
    let l = |k| seq_term(pq, SeqKind::Lucas, k);
    for (h, ci) in [(1u64, true), (2, false), (3, true), (4, false)] {
        let a = CurveSpec::new(vec![l(5), l(5 * h + 1), l(5 * h + 2)]).unwrap();
        assert_eq!(affine_ci(&a, None).is_ci(), ci, "h = {h}: {a}");
    }
    assert_eq!(spec(&[11, 2207, 3571]), CurveSpec::new(vec![l(5), l(16), l(17)]).unwrap());
    assert_eq!(spec(&[11, 24476, 39603]), CurveSpec::new(vec![l(5), l(21), l(22)]).unwrap());
}

#[test]
fn three_value_residual_is_never_ci() {
    let v = affine_ci(&spec(&[11, 199, 322]), None);
    assert_eq!((v.decision, v.method), (Decision::NotCi, Method::ThreeGeneratorResidual));
}

#[test]
fn affine_ci_does_not_imply_projective_ci() {
    let a = spec(&[4, 9, 10]);
    assert!(affine_ci(&a, None).is_ci());
    let v = projective_ci(&a);
    assert_eq!((v.decision, v.method), (Decision::NotCi, Method::ProjectiveReduction));
    let g = ci_gen_arith(&GenArith { d1: 4, h: 2, step: 1, n: 3 }, true).unwrap();
    assert_eq!(g.verdict.decision, Decision::NotCi);
}

#[test]
fn generalized_arithmetic_verdicts() {
    let odd = ci_gen_arith(&GenArith { d1: 5, h: 1, step: 1, n: 3 }, false).unwrap();
    assert_eq!(odd.verdict.decision, Decision::NotCi);
    let four = ci_gen_arith(&GenArith { d1: 8, h: 1, step: 1, n: 4 }, false).unwrap();
    assert_eq!(four.verdict.decision, Decision::NotCi);
    let proj = ci_gen_arith(&GenArith { d1: 4, h: 1, step: 1, n: 3 }, true).unwrap();
    assert_eq!(proj.verdict.decision, Decision::Ci);
    assert_eq!(proj.verdict.frobenius, Some(BigInt::from(7)));
}

#[test]
fn fibonacci_verdict_ignores_p_q_h() {
    for (a, d, n) in [(4u64, 2u64, 3u64), (8, 2, 3), (9, 2, 3), (8, 2, 4), (6, 3, 5), (5, 4, 4)] {
        let decisions: Vec<Decision> = [(1, 1), (1, 2), (2, 1), (3, 2), (2, 3)]
            .into_iter()
            .flat_map(|(p, q)| (1..=3).map(move |h| (p, q, h)))
            .map(|(p, q, h)| {
                let f = Fib { pq: PqParams::new(p, q).unwrap(), h, a, step_d: d, n };
                let built = family_build(&FamilyParams { family: Family::Fib(f), projective: false }).unwrap();
                let general = affine_ci(&built, None).decision;
                assert_eq!(ci_fibonacci(&f, false).unwrap().verdict.decision, general, "{f:?}");
                general
            })
            .collect();
        assert!(decisions.windows(2).all(|w| w[0] == w[1]), "a={a} d={d} n={n}");
    }
}

#[test]
fn lucas_projective_example() {
    let l = Lucas { pq: PqParams::new(1, 1).unwrap(), a: 6, step_d: 2, n: 3 };
    assert_eq!(ci_lucas(&l, true).unwrap().verdict.decision, Decision::Ci);
    assert!(projective_ci(&spec(&[18, 47, 123])).is_ci());
}
