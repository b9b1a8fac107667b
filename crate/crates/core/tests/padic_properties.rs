use num::BigRational;
use proptest::prelude::*;

use adelic_walks::padic::{
    bracket_lambda, gp_add, gp_neg, gp_sub, qp_abs, qp_shift, rational_valuation_oracle, GpElement, Prime, QpDigits,
    RadialValue,
};

fn prime_strategy() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7, 13, 251, 65_521, 4_294_967_291]).prop_map(|p| Prime::new(p).unwrap())
}

fn gp_point(p: Prime, max_len: usize) -> impl Strategy<Value = QpDigits> {
    prop::collection::vec(0..p.get(), 0..max_len).prop_map(move |digits| {
        QpDigits::from_digits(p, digits.into_iter().enumerate().map(|(j, d)| (-(j as i64) - 1, d))).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (QpDigits, QpDigits, QpDigits)> {
    prime_strategy().prop_flat_map(|p| (gp_point(p, 90), gp_point(p, 90), gp_point(p, 90)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn group_laws((x, y, z) in triple()) {
        let p = x.prime();
        prop_assert_eq!(gp_add(&x, &y).unwrap(), gp_add(&y, &x).unwrap());
        let left = gp_add(&gp_add(&x, &y).unwrap(), &z).unwrap();
        let right = gp_add(&x, &gp_add(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(gp_add(&x, &gp_neg(&x).unwrap()).unwrap().is_zero());
        prop_assert_eq!(gp_add(&x, &QpDigits::zero(p)).unwrap(), x.clone());
        prop_assert_eq!(gp_add(&gp_sub(&x, &y).unwrap(), &y).unwrap(), x.clone());
    }

    #[test]
    fn strong_triangle_inequality((x, y, _z) in triple()) {
        let sum = qp_abs(&gp_add(&x, &y).unwrap());
        let (ax, ay) = (qp_abs(&x), qp_abs(&y));
        prop_assert!(sum <= ax.max(ay));
        if ax != ay {
            prop_assert_eq!(sum, ax.max(ay));
        }
    }

    #[test]
    fn packed_arithmetic_agrees((x, y, _z) in triple()) {
        let px = GpElement::from_digits(&x).unwrap();
        let py = GpElement::from_digits(&y).unwrap();
        prop_assert_eq!(px.to_digits(), x.clone());
        prop_assert_eq!(px.abs(), qp_abs(&x));
        let sum = px.checked_add(&py).unwrap();
        prop_assert_eq!(sum.to_digits(), gp_add(&x, &y).unwrap());
        prop_assert_eq!(sum.abs(), qp_abs(&gp_add(&x, &y).unwrap()));
    }

    #[test]
    fn absolute_value_matches_valuation(p in prime_strategy(), x in -(1i64 << 40)..(1i64 << 40), den_exp in 0u32..20, shift in -10i64..10) {
        // |x / p^e|_p = p^{e - ord_p(x)}, with ord_p counted by trial division.
        let pp = p.get() as i128;
        let den = pp.checked_pow(den_exp).filter(|d| *d < (1i128 << 100));
        prop_assume!(den.is_some() && x != 0);
        let oracle = rational_valuation_oracle(x as i128, den.unwrap(), p).unwrap();
        let mut v = x.unsigned_abs() as u128;
        let mut ord = 0i64;
        while v % p.get() as u128 == 0 {
            v /= p.get() as u128;
            ord += 1;
        }
        prop_assert_eq!(oracle, RadialValue::Pow(den_exp as i64 - ord));
        let digit = QpDigits::from_digits(p, [(-3, 1)]).unwrap();
        prop_assert_eq!(qp_abs(&qp_shift(&digit, shift)), RadialValue::Pow(3 - shift));
    }

    #[test]
    fn bracket_is_largest_power_below(p in prime_strategy(), num in 1i64..100_000, den in 1i64..100_000) {
        let lambda = BigRational::new(num.into(), den.into());
        let e = bracket_lambda(&lambda, p).unwrap().exponent().unwrap();
        prop_assert!(RadialValue::Pow(e).to_rational(p) < lambda);
        prop_assert!(RadialValue::Pow(e + 1).to_rational(p) >= lambda);
    }
}
