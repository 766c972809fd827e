//! Big-integer verification of the combinatorial identities obtained by
//! computing variances of the real-valued subset-sum families two ways.
//! Rational right-hand sides are cleared to integer form before comparison,
//! and the divisibility implied by the clearing is asserted separately.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};

/// The seven checked identities. `FromStr`/`Display` use the stable CLI
/// names, which are part of the report format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityName {
    /// `sum_k C(l,k) C(l,m-k) = C(2l,m)`.
    ChuVandermonde,
    /// `sum_k C(m,k)^2 = C(2m,m)`.
    ChuVandermondeCentral,
    /// `sum_k (2k-m)^2 C(l,k) C(l,m-k) = m(2l-m)/(2l-1) * C(2l,m)`.
    WeightedPairSum,
    /// `sum_k (2k-m)^2 C(m,k)^2 = 2m * C(2m-2, m-1)`.
    WeightedCentralSum,
    /// `sum_k (2m-3k)^2 C(l,m-k) C(2l,k) = 2m(3l-m)/(3l-1) * C(3l,m)`.
    TripleGroupSum,
    /// The l = m case of the triple-group sum:
    /// `sum_k (2m-3k)^2 C(m,k) C(2m,k) = 4m^2/(3m-1) * C(3m,m)`.
    TripleGroupCentral,
    /// `sum_{m1+m2+m3+m4=m} (2m1-2m2+m3-m4)^2 C(l,m1)C(l,m2)C(2l,m3)C(2l,m4)
    ///  = 2m(6l-m)/(6l-1) * C(6l,m)`.
    QuadrupleGroupSum,
}

pub const ALL_IDENTITIES: [IdentityName; 7] = [
    IdentityName::ChuVandermonde,
    IdentityName::ChuVandermondeCentral,
    IdentityName::WeightedPairSum,
    IdentityName::WeightedCentralSum,
    IdentityName::TripleGroupSum,
    IdentityName::TripleGroupCentral,
    IdentityName::QuadrupleGroupSum,
];

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            IdentityName::ChuVandermonde => "chu_vandermonde",
            IdentityName::ChuVandermondeCentral => "chu_vandermonde_central",
            IdentityName::WeightedPairSum => "identity_33",
            IdentityName::WeightedCentralSum => "identity_3_3",
            IdentityName::TripleGroupSum => "remark_3_4_a",
            IdentityName::TripleGroupCentral => "remark_3_4_b",
            IdentityName::QuadrupleGroupSum => "remark_3_4_c",
        };
        f.write_str(name)
    }
}

impl FromStr for IdentityName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chu_vandermonde" => Ok(IdentityName::ChuVandermonde),
            "chu_vandermonde_central" => Ok(IdentityName::ChuVandermondeCentral),
            "identity_33" => Ok(IdentityName::WeightedPairSum),
            "identity_3_3" => Ok(IdentityName::WeightedCentralSum),
            "remark_3_4_a" => Ok(IdentityName::TripleGroupSum),
            "remark_3_4_b" => Ok(IdentityName::TripleGroupCentral),
            "remark_3_4_c" => Ok(IdentityName::QuadrupleGroupSum),
            other => Err(Error::UnknownIdentity(other.to_string())),
        }
    }
}

/// One evaluated instance: both sides in cleared integer form.
#[derive(Clone, Debug)]
pub struct IdentityCase {
    pub name: IdentityName,
    pub params: Vec<u64>,
    pub lhs: BigUint,
    pub rhs: BigUint,
    /// `lhs == rhs` after clearing denominators.
    pub holds: bool,
    /// The cleared right-hand product is divisible by the cleared factor,
    /// i.e. the rational right-hand side is in fact an integer.
    pub divisible: bool,
}

impl IdentityCase {
    pub fn ok(&self) -> bool {
        self.holds && self.divisible
    }

    fn exact(name: IdentityName, params: Vec<u64>, lhs: BigUint, rhs: BigUint) -> Self {
        let holds = lhs == rhs;
        IdentityCase { name, params, lhs, rhs, holds, divisible: true }
    }

    fn cleared(
        name: IdentityName,
        params: Vec<u64>,
        lhs_raw: BigUint,
        factor: u64,
        rhs_product: BigUint,
    ) -> Self {
        let lhs = lhs_raw * BigUint::from(factor);
        let divisible = (&rhs_product % BigUint::from(factor)).is_zero();
        let holds = lhs == rhs_product;
        IdentityCase { name, params, lhs, rhs: rhs_product, holds, divisible }
    }
}

fn square_u64(x: i64) -> BigUint {
    BigUint::from((x * x) as u64)
}

/// `sum_k C(l,k) C(l,m-k)` with the `max{0, m-l} .. min{m, l}` bounds.
fn chu_vandermonde_case(l: u64, m: u64) -> IdentityCase {
    let lo = m.saturating_sub(l);
    let hi = m.min(l);
    let lhs: BigUint = (lo..=hi).map(|k| binomial(l, k) * binomial(l, m - k)).sum();
    IdentityCase::exact(IdentityName::ChuVandermonde, vec![l, m], lhs, binomial(2 * l, m))
}

fn chu_vandermonde_central_case(m: u64) -> IdentityCase {
    let lhs: BigUint = (0..=m).map(|k| binomial(m, k).pow(2)).sum();
    IdentityCase::exact(IdentityName::ChuVandermondeCentral, vec![m], lhs, binomial(2 * m, m))
}

/// `sum_k (2k-m)^2 C(l,k) C(l,m-k)`, cleared against `2l - 1`.
pub fn weighted_pair_sum_case(l: u64, m: u64) -> IdentityCase {
    let lo = m.saturating_sub(l);
    let hi = m.min(l);
    let lhs_raw: BigUint = (lo..=hi)
        .map(|k| square_u64(2 * k as i64 - m as i64) * binomial(l, k) * binomial(l, m - k))
        .sum();
    let rhs = BigUint::from(m) * BigUint::from(2 * l - m) * binomial(2 * l, m);
    IdentityCase::cleared(IdentityName::WeightedPairSum, vec![l, m], lhs_raw, 2 * l - 1, rhs)
}

fn weighted_central_sum_case(m: u64) -> IdentityCase {
    let lhs: BigUint = (0..=m)
        .map(|k| square_u64(2 * k as i64 - m as i64) * binomial(m, k).pow(2))
        .sum();
    let rhs = BigUint::from(2 * m) * binomial(2 * m - 2, m - 1);
    IdentityCase::exact(IdentityName::WeightedCentralSum, vec![m], lhs, rhs)
}

fn triple_group_sum_case(l: u64, m: u64) -> IdentityCase {
    let lo = m.saturating_sub(l);
    let hi = m.min(2 * l);
    let lhs_raw: BigUint = (lo..=hi)
        .map(|k| square_u64(2 * m as i64 - 3 * k as i64) * binomial(l, m - k) * binomial(2 * l, k))
        .sum();
    let rhs = BigUint::from(2 * m) * BigUint::from(3 * l - m) * binomial(3 * l, m);
    IdentityCase::cleared(IdentityName::TripleGroupSum, vec![l, m], lhs_raw, 3 * l - 1, rhs)
}

fn triple_group_central_case(m: u64) -> IdentityCase {
    let lhs_raw: BigUint = (0..=m)
        .map(|k| square_u64(2 * m as i64 - 3 * k as i64) * binomial(m, k) * binomial(2 * m, k))
        .sum();
    let rhs = BigUint::from(4 * m * m) * binomial(3 * m, m);
    IdentityCase::cleared(IdentityName::TripleGroupCentral, vec![m], lhs_raw, 3 * m - 1, rhs)
}

/// Quadruple sum over all splits `m1 + m2 + m3 + m4 = m`; three nested loops
/// with the fourth index forced, independent of any generating-function
/// shortcut.
fn quadruple_group_sum_case(l: u64, m: u64) -> IdentityCase {
    let mut lhs_raw = BigUint::zero();
    for m1 in 0..=l.min(m) {
        let b1 = binomial(l, m1);
        for m2 in 0..=l.min(m - m1) {
            let b2 = &b1 * binomial(l, m2);
            for m3 in 0..=(2 * l).min(m - m1 - m2) {
                let m4 = m - m1 - m2 - m3;
                if m4 > 2 * l {
                    continue;
                }
                let weight =
                    square_u64(2 * m1 as i64 - 2 * m2 as i64 + m3 as i64 - m4 as i64);
                lhs_raw += weight * &b2 * binomial(2 * l, m3) * binomial(2 * l, m4);
            }
        }
    }
    let rhs = BigUint::from(2 * m) * BigUint::from(6 * l - m) * binomial(6 * l, m);
    IdentityCase::cleared(IdentityName::QuadrupleGroupSum, vec![l, m], lhs_raw, 6 * l - 1, rhs)
}

/// Default primary-parameter limit per identity: the ranges over which each
/// one is verified by the standard regression run.
pub fn default_limit(name: IdentityName) -> u64 {
    match name {
        IdentityName::ChuVandermondeCentral | IdentityName::WeightedCentralSum => 200,
        IdentityName::QuadrupleGroupSum => 12,
        _ => 60,
    }
}

/// Evaluate an identity over its parameter range: single-parameter identities
/// run `m = 1..=limit`, two-parameter identities run `l = 1..=limit` with
/// every valid `m` for that `l`.
pub fn check_identity(name: IdentityName, limit: u64) -> Vec<IdentityCase> {
    if limit == 0 {
        return Vec::new();
    }
    match name {
        IdentityName::ChuVandermondeCentral => {
            (1..=limit).into_par_iter().map(chu_vandermonde_central_case).collect()
        }
        IdentityName::WeightedCentralSum => {
            (1..=limit).into_par_iter().map(weighted_central_sum_case).collect()
        }
        IdentityName::TripleGroupCentral => {
            (1..=limit).into_par_iter().map(triple_group_central_case).collect()
        }
        IdentityName::ChuVandermonde => two_param_sweep(limit, 2, chu_vandermonde_case),
        IdentityName::WeightedPairSum => two_param_sweep(limit, 2, weighted_pair_sum_case),
        IdentityName::TripleGroupSum => two_param_sweep(limit, 3, triple_group_sum_case),
        IdentityName::QuadrupleGroupSum => two_param_sweep(limit, 6, quadruple_group_sum_case),
    }
}

/// Parse-and-run front end for callers holding the textual name.
pub fn check_identity_by_name(name: &str, limit: Option<u64>) -> Result<Vec<IdentityCase>> {
    let name: IdentityName = name.parse()?;
    Ok(check_identity(name, limit.unwrap_or_else(|| default_limit(name))))
}

fn two_param_sweep(
    l_max: u64,
    m_factor: u64,
    case: impl Fn(u64, u64) -> IdentityCase + Sync,
) -> Vec<IdentityCase> {
    (1..=l_max)
        .into_par_iter()
        .flat_map_iter(|l| (1..=m_factor * l).map(move |m| (l, m)))
        .map(|(l, m)| case(l, m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn name_round_trip() {
        for name in ALL_IDENTITIES {
            let parsed: IdentityName = name.to_string().parse().unwrap();
            assert_eq!(parsed, name);
        }
        assert!(matches!(
            "not_an_identity".parse::<IdentityName>(),
            Err(Error::UnknownIdentity(_))
        ));
    }

    #[test]
    fn weighted_central_hand_value() {
        // m = 2: (2k-2)^2 C(2,k)^2 over k: 4 + 0 + 4 = 8 = 2*2*C(2,1)
        let case = weighted_central_sum_case(2);
        assert_eq!(case.lhs, BigUint::from(8u32));
        assert_eq!(case.rhs, BigUint::from(8u32));
        assert!(case.ok());
    }

    #[test]
    fn chu_vandermonde_hand_value() {
        let case = chu_vandermonde_case(2, 2);
        assert_eq!(case.lhs, BigUint::from(6u32));
        assert_eq!(case.rhs, BigUint::from(6u32));
        assert!(case.ok());
    }

    #[test]
    fn triple_group_hand_value() {
        // l = 1, m = 1: (2)^2 C(1,1)C(2,0) + (-1)^2 C(1,0)C(2,1) = 6,
        // cleared by (3l - 1) = 2: 12 = 2*1*2*C(3,1)
        let case = triple_group_sum_case(1, 1);
        assert_eq!(case.lhs, BigUint::from(12u32));
        assert_eq!(case.rhs, BigUint::from(12u32));
        assert!(case.ok());
    }

    #[test]
    fn weighted_pair_reduces_to_central_at_l_equals_m() {
        for m in 1..=10u64 {
            let pair = weighted_pair_sum_case(m, m);
            assert!(pair.ok(), "m = {m}");
        }
    }

    #[test]
    fn all_identities_hold_on_small_ranges() {
        for name in ALL_IDENTITIES {
            let cases = check_identity(name, 8);
            assert!(!cases.is_empty());
            for case in &cases {
                assert!(case.ok(), "{} {:?}: {} vs {}", case.name, case.params, case.lhs, case.rhs);
            }
        }
    }

    #[test]
    fn quadruple_case_count() {
        // l = 1, m = 1: splits of 1 into four parts bounded by (1,1,2,2)
        let case = quadruple_group_sum_case(1, 1);
        assert!(case.ok());
        // rhs = 2*1*5*C(6,1) = 60; lhs_raw * 5
        assert_eq!(case.rhs, BigUint::from(60u32));
    }
}
