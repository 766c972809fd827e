//! Exact moments of subset-sum laws, the componentwise square-expectation
//! convention, and the power-sum / Newton-recurrence machinery used as an
//! independent route to the moment structure.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::{CycElem, CycRat, CyclotomicContext};
use crate::distribution::DiscreteLaw;

/// One exact moment together with its classification.
///
/// `predicted_zero` records whether the moment order is outside the divisor
/// lattice of the root order (`d` does not divide `k`); such moments vanish
/// for every rotation-invariant law and the field lets reports cross-check
/// the computed value against that prediction.
#[derive(Clone, Debug)]
pub struct MomentReport {
    pub k: u32,
    pub value: CycRat,
    pub is_real: bool,
    pub is_rational: bool,
    pub predicted_zero: bool,
    pub numeric: Complex64,
}

fn report_for(ctx: &CyclotomicContext, k: u32, value: CycRat) -> MomentReport {
    let class = value.classify(ctx);
    let predicted_zero = u64::from(k) % ctx.order() != 0;
    let numeric = value.to_complex(ctx);
    MomentReport {
        k,
        value,
        is_real: class.is_real,
        is_rational: class.is_rational,
        predicted_zero,
        numeric,
    }
}

/// `E[X^k]` over any exact law: `sum(count * z^k) / denominator`.
pub fn moment<L: DiscreteLaw>(law: &L, k: u32) -> MomentReport {
    assert!(k >= 1, "moment order must be positive");
    let ctx = law.ctx();
    let mut acc = ctx.zero();
    for (key, count) in law.entries() {
        let powered = ctx.pow(key, k);
        acc = ctx.add(&acc, &ctx.scale(&powered, &BigInt::from(count.clone())));
    }
    report_for(ctx, k, CycRat::new(acc, law.denominator().clone()))
}

/// All moments `E[X^k]` for `1 <= k <= k_max`, sharing the per-atom power
/// chain instead of recomputing it for every order.
pub fn moments_up_to<L: DiscreteLaw>(law: &L, k_max: u32) -> Vec<MomentReport> {
    assert!(k_max >= 1);
    let ctx = law.ctx();
    let mut acc = vec![ctx.zero(); k_max as usize];
    for (key, count) in law.entries() {
        let count = BigInt::from(count.clone());
        let mut power = key.clone();
        for slot in acc.iter_mut() {
            *slot = ctx.add(slot, &ctx.scale(&power, &count));
            power = ctx.multiply(&power, key);
        }
    }
    acc.into_iter()
        .enumerate()
        .map(|(i, num)| report_for(ctx, i as u32 + 1, CycRat::new(num, law.denominator().clone())))
        .collect()
}

/// Exact variance `E[|X|^2] - |E[X]|^2`, always an ordinary rational.
pub fn variance<L: DiscreteLaw>(law: &L) -> BigRational {
    let ctx = law.ctx();
    let den = law.denominator();
    let mut abs2 = ctx.zero();
    let mut mean_num = ctx.zero();
    for (key, count) in law.entries() {
        let count = BigInt::from(count.clone());
        abs2 = ctx.add(&abs2, &ctx.scale(&ctx.multiply(key, &ctx.conjugate(key)), &count));
        mean_num = ctx.add(&mean_num, &ctx.scale(key, &count));
    }
    let mean_sq = ctx.multiply(&mean_num, &ctx.conjugate(&mean_num));
    let num = ctx.sub(&ctx.scale(&abs2, &BigInt::from(den.clone())), &mean_sq);
    CycRat::new(num, den * den)
        .to_rational(ctx)
        .expect("variance of an exact law is rational")
}

/// Exact `E[(2U)^a * (2jV)^b]` where `z = U + jV`: the component moments with
/// integral keys `z + conj(z)` and `z - conj(z)`. Callers recover
/// `E[U^a V^b]` by dividing the numeric view by `2^(a+b) * j^b`.
pub fn component_moments<L: DiscreteLaw>(law: &L, a: u32, b: u32) -> CycRat {
    assert!(a + b >= 1, "at least one component order must be positive");
    let ctx = law.ctx();
    let mut acc = ctx.zero();
    for (key, count) in law.entries() {
        let conj = ctx.conjugate(key);
        let u_key = ctx.add(key, &conj);
        let v_key = ctx.sub(key, &conj);
        let term = ctx.multiply(&ctx.pow(&u_key, a), &ctx.pow(&v_key, b));
        acc = ctx.add(&acc, &ctx.scale(&term, &BigInt::from(count.clone())));
    }
    CycRat::new(acc, law.denominator().clone())
}

/// The componentwise square-expectation convention
/// `E[U^2] + E[V^2] - 2j*E[UV]` for `X = U + jV`.
///
/// This is a distinct quantity from the algebraic `E[X^2]` (they agree only
/// when `E[UV] = 0` and the cross terms cancel), so it is a separately named
/// operation. Per atom it equals `z*conj(z) - (z^2 - conj(z)^2)/2`, which
/// keeps the whole computation inside the cyclotomic field.
pub fn square_expectation<L: DiscreteLaw>(law: &L) -> CycRat {
    let ctx = law.ctx();
    let den = law.denominator();
    let mut abs2 = ctx.zero();
    let mut sq = ctx.zero();
    let mut sq_conj = ctx.zero();
    for (key, count) in law.entries() {
        let count = BigInt::from(count.clone());
        let conj = ctx.conjugate(key);
        abs2 = ctx.add(&abs2, &ctx.scale(&ctx.multiply(key, &conj), &count));
        sq = ctx.add(&sq, &ctx.scale(&ctx.multiply(key, key), &count));
        sq_conj = ctx.add(&sq_conj, &ctx.scale(&ctx.multiply(&conj, &conj), &count));
    }
    let two = BigInt::from(2);
    let num = ctx.add(&ctx.sub(&ctx.scale(&abs2, &two), &sq), &sq_conj);
    CycRat::new(num, den * BigUint::from(2u32))
}

/// Exact power sum `p_n = sum_{k=1}^{N} w^{k n}`, evaluated in the ring and
/// returned as the rational integer it always reduces to (0 when the root
/// order does not divide `n`, N when it does).
pub fn power_sum(ctx: &CyclotomicContext, n: u64) -> BigInt {
    assert!(n >= 1, "power-sum order must be positive");
    // As k runs over 1..=N the basis exponent of w^k covers every residue
    // class modulo d exactly g times, so the sum folds to g copies of the
    // full orbit of zeta^n.
    let d = ctx.order();
    let mut acc = ctx.zero();
    for r in 0..d {
        acc = ctx.add(&acc, ctx.zeta_power((r as u128 * n as u128 % d as u128) as u64));
    }
    acc = ctx.scale(&acc, &BigInt::from(ctx.g()));
    ctx.classify(&acc)
        .rational_value
        .expect("full power sums of roots of unity are rational integers")
}

/// Elementary symmetric function `sigma_n(w, w^2, ..., w^N)` via the Newton
/// recurrence seeded with exact power sums:
/// `n * sigma_n = sum_{i=1}^{n} (-1)^(i-1) sigma_{n-i} p_i`.
pub fn elementary_symmetric(ctx: &CyclotomicContext, n: u64) -> CycRat {
    assert!(n >= 1 && n <= ctx.n(), "symmetric-function order must lie in [1, N]");
    let p: Vec<CycRat> = (1..=n)
        .map(|i| CycRat::from_int(ctx, power_sum(ctx, i)))
        .collect();
    let mut sigma: Vec<CycRat> = Vec::with_capacity(n as usize + 1);
    sigma.push(CycRat::from_int(ctx, BigInt::one())); // sigma_0
    for order in 1..=n as usize {
        let mut acc = CycRat::zero(ctx);
        for i in 1..=order {
            let term = sigma[order - i].mul(ctx, &p[i - 1]);
            acc = if i % 2 == 1 { acc.add(ctx, &term) } else { acc.sub(ctx, &term) };
        }
        sigma.push(acc.div_uint(&BigUint::from(order)));
    }
    sigma.pop().expect("nonempty")
}

/// Mean of a law as an exact cyclotomic rational.
pub fn mean<L: DiscreteLaw>(law: &L) -> CycRat {
    let ctx = law.ctx();
    let mut acc = ctx.zero();
    for (key, count) in law.entries() {
        acc = ctx.add(&acc, &ctx.scale(key, &BigInt::from(count.clone())));
    }
    CycRat::new(acc, law.denominator().clone())
}

/// Brute-force elementary symmetric function by expanding over all
/// `n`-subsets of the root multiset. Exponentially slow; this is the
/// independent oracle the Newton recurrence is checked against.
pub fn elementary_symmetric_expanded(ctx: &CyclotomicContext, n: u64) -> CycElem {
    assert!(n >= 1 && n <= ctx.n());
    let mut acc: BTreeMap<u64, BigInt> = BTreeMap::new();
    let mut subset: Vec<u64> = (1..=n).collect();
    loop {
        // product of roots = zeta^(sum of exponents)
        let e: u128 = subset.iter().map(|&i| ctx.exponent_of(i) as u128).sum();
        *acc.entry((e % ctx.order() as u128) as u64).or_insert_with(BigInt::zero) += 1;
        // next combination in lex order
        let m = subset.len();
        let mut i = m;
        loop {
            if i == 0 {
                let mut result = ctx.zero();
                for (e, mult) in acc {
                    result = ctx.add(&result, &ctx.scale(ctx.zeta_power(e), &mult));
                }
                return result;
            }
            i -= 1;
            if subset[i] < ctx.n() - (m - 1 - i) as u64 {
                subset[i] += 1;
                for j in i + 1..m {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Signed magnitude check helper used in tests: `|value| = expected` exactly.
pub fn rational_is(value: &BigRational, num: i64, den: u64) -> bool {
    *value == BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::pmf_x;
    use crate::ExactPmf;
    use std::sync::Arc;

    fn law(n: u64, l: u64, m: u64) -> ExactPmf {
        let ctx = Arc::new(CyclotomicContext::new(n, l).unwrap());
        pmf_x(&ctx, m, crate::DEFAULT_ENUM_BUDGET).unwrap()
    }

    #[test]
    fn moments_of_the_four_point_fixture() {
        let pmf = law(4, 1, 2);
        let ctx = pmf.context().clone();
        for k in 1..=3 {
            let report = moment(&pmf, k);
            assert!(report.value.is_zero(), "k = {k}");
            assert!(report.predicted_zero && report.is_real && report.is_rational);
        }
        // the k = 4 moment: brute force over the six subsets gives -8/3
        let report = moment(&pmf, 4);
        assert!(!report.predicted_zero);
        assert!(report
            .value
            .eq_rational(&ctx, &BigRational::new(BigInt::from(-8), BigInt::from(3))));
        assert!((report.numeric.re + 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn moments_of_constant_law() {
        let pmf = law(5, 0, 3);
        let ctx = pmf.context().clone();
        for k in 1..=4u32 {
            let report = moment(&pmf, k);
            let expected = BigRational::from_integer(BigInt::from(3i64.pow(k)));
            assert!(report.value.eq_rational(&ctx, &expected));
            assert!(!report.predicted_zero);
        }
    }

    #[test]
    fn moments_up_to_matches_single_calls() {
        let pmf = law(9, 2, 3);
        let all = moments_up_to(&pmf, 6);
        for (i, report) in all.iter().enumerate() {
            let single = moment(&pmf, i as u32 + 1);
            assert_eq!(report.value, single.value);
            assert_eq!(report.k, single.k);
        }
    }

    #[test]
    fn variance_examples() {
        assert!(rational_is(&variance(&law(4, 1, 2)), 4, 3));
        assert!(rational_is(&variance(&law(7, 3, 4)), 2, 1));
        assert!(rational_is(&variance(&law(5, 0, 2)), 0, 1));
    }

    #[test]
    fn component_moment_examples() {
        let pmf = law(4, 1, 2);
        let ctx = pmf.context().clone();
        // E[(2U)^2] = 4 E[U^2] = 8/3
        let u2 = component_moments(&pmf, 2, 0);
        assert!(u2.eq_rational(&ctx, &BigRational::new(BigInt::from(8), BigInt::from(3))));
        // E[(2U)(2jV)] = 4j E[UV] = 0
        assert!(component_moments(&pmf, 1, 1).is_zero());

        let pmf = law(6, 2, 3);
        assert!(component_moments(&pmf, 0, 3).is_zero());
    }

    #[test]
    fn square_expectation_examples() {
        let pmf = law(6, 2, 1);
        let ctx = pmf.context().clone();
        assert!(square_expectation(&pmf).eq_rational(&ctx, &BigRational::from_integer(BigInt::one())));

        let pmf = law(4, 1, 2);
        let ctx = pmf.context().clone();
        assert!(square_expectation(&pmf)
            .eq_rational(&ctx, &BigRational::new(BigInt::from(4), BigInt::from(3))));

        // constant variable: the convention gives m^2
        let pmf = law(6, 0, 4);
        let ctx = pmf.context().clone();
        assert!(square_expectation(&pmf).eq_rational(&ctx, &BigRational::from_integer(BigInt::from(16))));
    }

    #[test]
    fn power_sum_rule() {
        let ctx = CyclotomicContext::new(4, 1).unwrap();
        assert_eq!(power_sum(&ctx, 2), BigInt::zero());
        assert_eq!(power_sum(&ctx, 4), BigInt::from(4));
        let ctx = CyclotomicContext::new(9, 0).unwrap();
        for n in 1..=5 {
            assert_eq!(power_sum(&ctx, n), BigInt::from(9));
        }
        // exhaustive small check against the stated rule
        for n_sig in 2..=10u64 {
            for l in 1..n_sig {
                let ctx = CyclotomicContext::new(n_sig, l).unwrap();
                for k in 1..=12u64 {
                    let expected = if k % ctx.order() == 0 { n_sig } else { 0 };
                    assert_eq!(power_sum(&ctx, k), BigInt::from(expected), "N={n_sig} l={l} k={k}");
                }
            }
        }
    }

    #[test]
    fn elementary_symmetric_examples() {
        let ctx = CyclotomicContext::new(4, 1).unwrap();
        let sigma1 = elementary_symmetric(&ctx, 1);
        assert!(sigma1.is_zero());
        let sigma2 = elementary_symmetric(&ctx, 2);
        assert!(sigma2.is_zero());
        let sigma4 = elementary_symmetric(&ctx, 4);
        assert!(sigma4.eq_rational(&ctx, &BigRational::from_integer(BigInt::from(-1))));
    }

    #[test]
    fn newton_recurrence_matches_expansion() {
        for n_sig in 2..=8u64 {
            for l in 0..n_sig {
                let ctx = CyclotomicContext::new(n_sig, l).unwrap();
                for order in 1..=n_sig {
                    let via_newton = elementary_symmetric(&ctx, order);
                    let via_expansion = elementary_symmetric_expanded(&ctx, order);
                    assert_eq!(via_newton.den(), &BigUint::one(), "sigma must be integral");
                    assert_eq!(via_newton.num(), &via_expansion, "N={n_sig} l={l} n={order}");
                    assert!(via_newton.classify(&ctx).is_real);
                }
            }
        }
    }

    #[test]
    fn pushforward_moment_consistency() {
        for (n, l, m) in [(4u64, 1u64, 2u64), (6, 2, 3), (8, 3, 3)] {
            let pmf = law(n, l, m);
            for k in 1..=4 {
                let direct = moment(&pmf, k);
                let pushed = moment(&pmf.transform_pow(k), 1);
                assert_eq!(direct.value, pushed.value, "N={n} l={l} m={m} k={k}");
            }
        }
    }
}
