use momentforge::polynomial::{format_rational, from_f64, parse_rational, rat, to_f64, Polynomial, Rational};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn poly3() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((small_rat(), prop::collection::vec(0u32..=2, 3)), 0..6)
        .prop_map(|terms| Polynomial::from_terms(3, terms).unwrap())
}

fn point3() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rat(), 3)
}

proptest! {
    #[test]
    fn ring_operations_commute_with_evaluation(p in poly3(), q in poly3(), x in point3()) {
        let (pv, qv) = (p.eval_exact(&x).unwrap(), q.eval_exact(&x).unwrap());
        prop_assert_eq!((&p + &q).eval_exact(&x).unwrap(), &pv + &qv);
        prop_assert_eq!((&p - &q).eval_exact(&x).unwrap(), &pv - &qv);
        prop_assert_eq!((&p * &q).eval_exact(&x).unwrap(), &pv * &qv);
        prop_assert_eq!(p.pow(2).eval_exact(&x).unwrap(), &pv * &pv);
    }

    #[test]
    fn float_evaluation_tracks_exact(p in poly3(), x in point3()) {
        let xf: Vec<f64> = x.iter().map(to_f64).collect();
        let exact = to_f64(&p.eval_exact(&x).unwrap());
        let approx = p.eval(&xf).unwrap();
        prop_assert!((exact - approx).abs() <= 1e-9 * (1.0 + exact.abs()));
    }

    #[test]
    fn substitution_agrees_with_evaluation(p in poly3(), x in point3()) {
        let r = p.substitute(&[(1, x[1].clone())]).unwrap();
        prop_assert_eq!(r.nvars(), 2);
        prop_assert_eq!(r.eval_exact(&[x[0].clone(), x[2].clone()]).unwrap(), p.eval_exact(&x).unwrap());
    }

    #[test]
    fn product_rule(p in poly3(), q in poly3(), i in 0usize..3) {
        let lhs = (&p * &q).partial(i);
        let rhs = &(&p.partial(i) * &q) + &(&p * &q.partial(i));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn degree_is_additive(p in poly3(), q in poly3()) {
        if !p.is_zero() && !q.is_zero() {
            prop_assert_eq!((&p * &q).degree(), p.degree() + q.degree());
        }
    }

    #[test]
    fn rational_text_round_trip(r in small_rat()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn floats_are_exact_rationals(v in -1e6f64..1e6) {
        prop_assert_eq!(to_f64(&from_f64(v).unwrap()), v);
    }
}
