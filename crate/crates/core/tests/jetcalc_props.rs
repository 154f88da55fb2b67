use jetorbit_core::jetcalc::{parse_poly, Jet, JetPoly, Monomial};
use jetorbit_core::rat;
use proptest::prelude::*;

fn jet(colors: usize) -> impl Strategy<Value = Jet> {
    (1..=colors, 0usize..=3).prop_map(|(c, n)| Jet::new(c, n))
}

fn monomial(colors: usize, laurent: bool) -> impl Strategy<Value = Monomial> {
    prop::collection::vec((jet(colors), 1i32..=2, any::<bool>()), 0..=3).prop_map(move |fs| {
        fs.into_iter().fold(Monomial::one(), |m, (j, e, neg)| {
            let e = if laurent && neg && j.order >= 1 { -e } else { e };
            m.mul(&Monomial::var(j, e))
        })
    })
}

fn poly(colors: usize, laurent: bool) -> impl Strategy<Value = JetPoly> {
    prop::collection::vec((monomial(colors, laurent), -4i64..=4), 1..=4).prop_map(|ts| {
        let mut p = JetPoly::zero();
        for (m, c) in ts {
            p.add_term(m, rat(c));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_derivatives_have_no_variational_derivative(f in poly(2, true)) {
        let d = f.dx();
        prop_assert!(d.var_deriv(1).is_zero());
        prop_assert!(d.var_deriv(2).is_zero());
    }

    #[test]
    fn dx_is_a_derivation(f in poly(2, true), g in poly(2, true)) {
        let lhs = (&f * &g).dx();
        let rhs = &(&f.dx() * &g) + &(&f * &g.dx());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_commutator_with_dx(f in poly(2, true), c in 1usize..=2, n in 1usize..=4) {
        let lhs = f.dx().partial(c, n);
        let rhs = &f.partial(c, n).dx() + &f.partial(c, n - 1);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn integration_inverts_dx(f in poly(1, false)) {
        let g = f.dx().formal_integrate().unwrap();
        prop_assert_eq!(g.dx(), f.dx());
    }

    #[test]
    fn t_op_at_zero_is_the_variational_derivative(f in poly(2, true), c in 1usize..=2) {
        prop_assert_eq!(f.t_op(c, 0), f.var_deriv(c));
    }

    #[test]
    fn evolutionary_along_translation_is_dx(f in poly(2, false)) {
        let k = vec![JetPoly::var(1, 1), JetPoly::var(2, 1)];
        prop_assert_eq!(f.evolutionary(&k), f.dx());
    }

    #[test]
    fn display_round_trips(f in poly(3, true)) {
        let back = parse_poly(&f.to_string()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn var_deriv_of_square_is_euler_lagrange(f in poly(1, false)) {
        let lhs = (&f * &f).var_deriv(1);
        let mut rhs = JetPoly::zero();
        for n in 0..=5usize {
            let d = &f * &f.partial(1, n);
            rhs += d.neg_dx_n(n).scale(&rat(2));
        }
        prop_assert_eq!(lhs, rhs);
    }
}
