//! The Bernoulli-mask companion variable: every sample position is kept
//! independently with probability `m/N`, and the law of the resulting sum is
//! enumerated exactly over all `2^N` masks with integer weights
//! `m^s * (N-m)^(N-s)` over the common denominator `N^N`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

use crate::cyclotomic::{CycElem, CycRat, CyclotomicContext};
use crate::distribution::{pmf_x, DiscreteLaw};
use crate::error::{Error, Result};
use crate::moments::{mean, moments_up_to, variance, MomentReport};

/// Exact law of the mask sum: canonical atom -> total integer weight, with
/// denominator `N^N`.
#[derive(Clone, Debug)]
pub struct MaskPmf {
    ctx: Arc<CyclotomicContext>,
    m: u64,
    entries: BTreeMap<CycElem, BigUint>,
    denominator: BigUint,
}

impl DiscreteLaw for MaskPmf {
    fn ctx(&self) -> &CyclotomicContext {
        &self.ctx
    }

    fn entries(&self) -> &BTreeMap<CycElem, BigUint> {
        &self.entries
    }

    fn denominator(&self) -> &BigUint {
        &self.denominator
    }
}

impl MaskPmf {
    pub fn context(&self) -> &Arc<CyclotomicContext> {
        &self.ctx
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn count_of(&self, key: &CycElem) -> BigUint {
        self.entries.get(key).cloned().unwrap_or_else(BigUint::zero)
    }
}

/// Exact mask-sum law over all `2^N` masks.
///
/// Masks are visited in Gray-code order so each step flips a single position
/// and the running sum is patched in place. Refuses `N > mask_budget`; the
/// Monte Carlo sampler covers larger sizes.
pub fn pmf_tilde(ctx: &Arc<CyclotomicContext>, m: u64, mask_budget: u64) -> Result<MaskPmf> {
    let n = ctx.n();
    if m == 0 || m > n {
        return Err(Error::usage(format!("m must lie in [1, N]; got m = {m}, N = {n}")));
    }
    if n > mask_budget {
        return Err(Error::MaskBudget { n, budget: mask_budget });
    }

    // weight of a mask with s kept positions: m^s * (N - m)^(N - s)
    let keep = BigUint::from(m);
    let drop = BigUint::from(n - m);
    let weights: Vec<BigUint> = (0..=n)
        .map(|s| keep.pow(s as u32) * drop.pow((n - s) as u32))
        .collect();

    let mut entries: HashMap<CycElem, BigUint> = HashMap::new();
    let mut sum = vec![BigInt::zero(); ctx.basis_dim()];
    let mut kept: u64 = 0;
    let mut mask: u64 = 0;

    let record = |sum: &[BigInt], kept: u64, entries: &mut HashMap<CycElem, BigUint>| {
        let weight = &weights[kept as usize];
        if !weight.is_zero() {
            *entries.entry(ctx.reduce(sum)).or_insert_with(BigUint::zero) += weight;
        }
    };

    record(&sum, kept, &mut entries);
    for i in 1u64..(1u64 << n) {
        let bit = i.trailing_zeros() as u64;
        let position = bit + 1;
        let power = ctx.zeta_power(ctx.exponent_of(position));
        mask ^= 1 << bit;
        if mask & (1 << bit) != 0 {
            for (a, b) in sum.iter_mut().zip(power.coeffs()) {
                *a += b;
            }
            kept += 1;
        } else {
            for (a, b) in sum.iter_mut().zip(power.coeffs()) {
                *a -= b;
            }
            kept -= 1;
        }
        record(&sum, kept, &mut entries);
    }

    Ok(MaskPmf {
        ctx: ctx.clone(),
        m,
        entries: entries.into_iter().collect(),
        denominator: BigUint::from(n).pow(n as u32),
    })
}

/// Moment-by-moment comparison of the mask variable against the
/// fixed-subset-size variable at the same `(N, l, m)`.
#[derive(Clone, Debug)]
pub struct MomentComparison {
    pub k: u32,
    pub tilde: CycRat,
    pub fixed: CycRat,
    pub delta: CycRat,
}

/// Exact moments of the mask variable plus the comparison table.
#[derive(Clone, Debug)]
pub struct TildeReport {
    pub moments: Vec<MomentReport>,
    pub mean: CycRat,
    pub variance: BigRational,
    /// Variance of the fixed-subset-size companion.
    pub variance_fixed: BigRational,
    /// `variance / variance_fixed`, when the latter is nonzero.
    pub variance_ratio: Option<BigRational>,
    pub comparisons: Vec<MomentComparison>,
}

/// Exact `E[X~^k]` for `k <= k_max` together with the comparison table
/// against the fixed-subset-size law.
pub fn tilde_moments(
    ctx: &Arc<CyclotomicContext>,
    m: u64,
    k_max: u32,
    mask_budget: u64,
    enum_budget: u64,
) -> Result<TildeReport> {
    let mask = pmf_tilde(ctx, m, mask_budget)?;
    let fixed = pmf_x(ctx, m, enum_budget)?;

    let moments = moments_up_to(&mask, k_max);
    let fixed_moments = moments_up_to(&fixed, k_max);
    let comparisons = moments
        .iter()
        .zip(&fixed_moments)
        .map(|(t, f)| MomentComparison {
            k: t.k,
            tilde: t.value.clone(),
            fixed: f.value.clone(),
            delta: t.value.sub(ctx, &f.value),
        })
        .collect();

    let var_tilde = variance(&mask);
    let var_fixed = variance(&fixed);
    let variance_ratio = (!var_fixed.is_zero()).then(|| &var_tilde / &var_fixed);

    Ok(TildeReport {
        moments,
        mean: mean(&mask),
        variance: var_tilde,
        variance_fixed: var_fixed,
        variance_ratio,
        comparisons,
    })
}

/// Closed-form binomial mass `C(N, k) p^k (1-p)^(N-k)` with `p = m/N`,
/// expressed over the common denominator `N^N`. The zero-frequency mask law
/// must match it exactly.
pub fn binomial_reference_weights(n: u64, m: u64) -> Vec<(u64, BigUint)> {
    (0..=n)
        .map(|k| {
            let weight = crate::combinatorics::binomial(n, k)
                * BigUint::from(m).pow(k as u32)
                * BigUint::from(n - m).pow((n - k) as u32);
            (k, weight)
        })
        .filter(|(_, w)| !w.is_zero())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn context(n: u64, l: u64) -> Arc<CyclotomicContext> {
        Arc::new(CyclotomicContext::new(n, l).unwrap())
    }

    #[test]
    fn two_sample_mask_law() {
        // N = 2, l = 1, m = 1: atoms 0 (empty and full masks), -1, 1.
        let ctx = context(2, 1);
        let mask = pmf_tilde(&ctx, 1, crate::DEFAULT_MASK_BUDGET).unwrap();
        assert_eq!(mask.denominator(), &BigUint::from(4u32));
        assert_eq!(mask.count_of(&ctx.zero()), BigUint::from(2u32));
        assert_eq!(mask.count_of(&ctx.from_int(BigInt::from(-1))), BigUint::one());
        assert_eq!(mask.count_of(&ctx.from_int(BigInt::from(1))), BigUint::one());
    }

    #[test]
    fn zero_frequency_mask_law_is_binomial() {
        for n in 1..=10u64 {
            for m in 1..=n {
                let ctx = context(n, 0);
                let mask = pmf_tilde(&ctx, m, crate::DEFAULT_MASK_BUDGET).unwrap();
                let reference = binomial_reference_weights(n, m);
                assert_eq!(mask.support_size(), reference.len(), "N={n} m={m}");
                for (k, weight) in reference {
                    assert_eq!(
                        mask.count_of(&ctx.from_int(BigInt::from(k))),
                        weight,
                        "N={n} m={m} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn full_rate_mask_is_degenerate() {
        let ctx = context(6, 1);
        let mask = pmf_tilde(&ctx, 6, crate::DEFAULT_MASK_BUDGET).unwrap();
        assert_eq!(mask.support_size(), 1);
        // the only atom is the full sum, which vanishes for l >= 1
        assert_eq!(mask.count_of(&ctx.zero()), BigUint::from(6u64).pow(6));
    }

    #[test]
    fn mask_support_contains_subset_support() {
        let ctx = context(8, 3);
        let mask = pmf_tilde(&ctx, 3, crate::DEFAULT_MASK_BUDGET).unwrap();
        let fixed = pmf_x(&ctx, 3, crate::DEFAULT_ENUM_BUDGET).unwrap();
        for key in fixed.entries().keys() {
            assert!(!mask.count_of(key).is_zero());
        }
    }

    #[test]
    fn mask_weights_normalize() {
        for (n, l, m) in [(5u64, 2u64, 2u64), (6, 1, 4), (7, 3, 7)] {
            let ctx = context(n, l);
            let mask = pmf_tilde(&ctx, m, crate::DEFAULT_MASK_BUDGET).unwrap();
            let total: BigUint = mask.entries().values().sum();
            assert_eq!(&total, mask.denominator());
        }
    }

    #[test]
    fn mask_variance_closed_form() {
        for n in 2..=9u64 {
            for l in 1..n {
                for m in 1..=n {
                    let ctx = context(n, l);
                    let mask = pmf_tilde(&ctx, m, crate::DEFAULT_MASK_BUDGET).unwrap();
                    let var = variance(&mask);
                    let expected = BigRational::new(BigInt::from(m * (n - m)), BigInt::from(n));
                    assert_eq!(var, expected, "N={n} l={l} m={m}");
                }
            }
        }
    }

    #[test]
    fn comparison_table_values() {
        let ctx = context(6, 1);
        let report = tilde_moments(&ctx, 2, 4, crate::DEFAULT_MASK_BUDGET, crate::DEFAULT_ENUM_BUDGET).unwrap();
        assert!(report.mean.is_zero());
        assert_eq!(report.variance, BigRational::new(BigInt::from(4), BigInt::from(3)));
        assert_eq!(report.variance_fixed, BigRational::new(BigInt::from(8), BigInt::from(5)));
        let ratio = report.variance_ratio.unwrap();
        assert_eq!(ratio, BigRational::new(BigInt::from(5), BigInt::from(6)));
        assert_eq!(report.comparisons.len(), 4);
        assert!(report.comparisons[0].delta.is_zero()); // both means vanish
    }

    #[test]
    fn binomial_mean_and_variance() {
        let ctx = context(4, 0);
        let mask = pmf_tilde(&ctx, 2, crate::DEFAULT_MASK_BUDGET).unwrap();
        let mu = mean(&mask);
        assert!(mu.eq_rational(&ctx, &BigRational::from_integer(BigInt::from(2))));
        assert_eq!(variance(&mask), BigRational::from_integer(BigInt::one()));
    }

    #[test]
    fn mask_budget_is_enforced() {
        let ctx = context(25, 1);
        assert!(matches!(
            pmf_tilde(&ctx, 3, 22).unwrap_err(),
            Error::MaskBudget { n: 25, budget: 22 }
        ));
    }

    #[test]
    fn predicted_zero_moments_vanish_for_mask_law() {
        for n in 2..=8u64 {
            for l in 1..n {
                let ctx = context(n, l);
                let mask = pmf_tilde(&ctx, 2.min(n), crate::DEFAULT_MASK_BUDGET).unwrap();
                for report in moments_up_to(&mask, 8) {
                    if report.predicted_zero {
                        assert!(report.value.is_zero(), "N={n} l={l} k={}", report.k);
                    }
                    assert!(report.is_real, "N={n} l={l} k={}", report.k);
                }
            }
        }
    }
}
