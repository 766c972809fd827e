//! Exact probability laws of random subset sums.
//!
//! The law of the sum of `m` distinct samples is computed by enumerating all
//! `C(N, m)` subsets of `{1, ..., N}` in colexicographic order, reducing every
//! sum to its canonical cyclotomic form and counting occurrences. Colex order
//! lets the subset space be partitioned into contiguous rank ranges, so the
//! enumeration parallelizes with a deterministic, order-independent merge.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;

use crate::combinatorics::{binomial, binomial_capped};
use crate::cyclotomic::{CycElem, CyclotomicContext};
use crate::error::{Error, Result};

/// Anything that assigns exact big-integer weights over canonical atoms.
/// Weights sum to `denominator`; probabilities are `weight / denominator`.
pub trait DiscreteLaw {
    fn ctx(&self) -> &CyclotomicContext;
    fn entries(&self) -> &BTreeMap<CycElem, BigUint>;
    fn denominator(&self) -> &BigUint;
}

/// Exact law of the sum of `m` samples drawn without replacement:
/// canonical atom -> number of subsets realizing it, over `C(N, m)`.
#[derive(Clone, Debug)]
pub struct ExactPmf {
    ctx: Arc<CyclotomicContext>,
    m: u64,
    entries: BTreeMap<CycElem, BigUint>,
    denominator: BigUint,
}

impl DiscreteLaw for ExactPmf {
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

impl ExactPmf {
    pub fn context(&self) -> &Arc<CyclotomicContext> {
        &self.ctx
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    /// Exact probability of an atom, as (count, denominator); zero count for
    /// values outside the support.
    pub fn count_of(&self, key: &CycElem) -> BigUint {
        self.entries.get(key).cloned().unwrap_or_else(BigUint::zero)
    }

    /// Pushforward law of the `k`-th power of the variable.
    pub fn transform_pow(&self, k: u32) -> ExactPmf {
        let ctx = &self.ctx;
        let mut entries: BTreeMap<CycElem, BigUint> = BTreeMap::new();
        for (key, count) in &self.entries {
            let image = ctx.pow(key, k);
            *entries.entry(image).or_insert_with(BigUint::zero) += count;
        }
        ExactPmf { ctx: self.ctx.clone(), m: self.m, entries, denominator: self.denominator.clone() }
    }

    /// Pushforward law of the squared modulus `z * conj(z)`.
    pub fn abs_squared(&self) -> ExactPmf {
        let ctx = &self.ctx;
        let mut entries: BTreeMap<CycElem, BigUint> = BTreeMap::new();
        for (key, count) in &self.entries {
            let image = ctx.multiply(key, &ctx.conjugate(key));
            *entries.entry(image).or_insert_with(BigUint::zero) += count;
        }
        ExactPmf { ctx: self.ctx.clone(), m: self.m, entries, denominator: self.denominator.clone() }
    }

    /// Pushforward under negation; used for the antisymmetry comparison
    /// between the laws at `m` and `N - m`.
    pub fn negated(&self) -> ExactPmf {
        let ctx = &self.ctx;
        let entries = self
            .entries
            .iter()
            .map(|(key, count)| (ctx.negate(key), count.clone()))
            .collect();
        ExactPmf { ctx: self.ctx.clone(), m: self.m, entries, denominator: self.denominator.clone() }
    }

    /// Exact key-by-key equality of two laws (atoms and counts).
    pub fn same_law(&self, other: &ExactPmf) -> bool {
        self.denominator == other.denominator && self.entries == other.entries
    }
}

/// Which component of `z = u + jv` a component law describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    RealPart,
    ImagPart,
}

/// Law of the real or imaginary part, keyed inside the integer ring:
/// real-part keys are `z + conj(z)` (twice the real part) and imaginary-part
/// keys are `z - conj(z)` (2j times the imaginary part). Halving happens only
/// in the numeric view, so the hot keys stay integral.
#[derive(Clone, Debug)]
pub struct ComponentPmf {
    pub kind: ComponentKind,
    pub entries: BTreeMap<CycElem, BigUint>,
    pub denominator: BigUint,
}

impl ComponentPmf {
    /// Floating value of the component encoded by a key: half the real part
    /// of a real-part key, half the imaginary part of an imaginary-part key.
    pub fn numeric_value(&self, ctx: &CyclotomicContext, key: &CycElem) -> f64 {
        let z = ctx.to_complex(key);
        match self.kind {
            ComponentKind::RealPart => z.re / 2.0,
            ComponentKind::ImagPart => z.im / 2.0,
        }
    }
}

/// Marginal laws of both components plus the joint pushforward law.
#[derive(Clone, Debug)]
pub struct ComponentLaws {
    pub u: ComponentPmf,
    pub v: ComponentPmf,
    /// True joint law of (real-part key, imaginary-part key); the components
    /// are dependent in general, so this is not a product of the marginals.
    pub joint: BTreeMap<(CycElem, CycElem), BigUint>,
}

/// Support census of a law: uniform iff every one of the `C(N, m)` subsets
/// produces a distinct sum. When not uniform, explicit pairs of distinct
/// subsets with equal sums are listed (at most [`MAX_WITNESSES`]).
#[derive(Clone, Debug)]
pub struct UniformityReport {
    pub n: u64,
    pub l: u64,
    pub m: u64,
    pub support_size: BigUint,
    pub binom: BigUint,
    pub is_uniform: bool,
    pub collision_witnesses: Vec<(Vec<u64>, Vec<u64>)>,
}

/// Cap on reported collision witness pairs.
pub const MAX_WITNESSES: usize = 16;

/// Exact law of the sum over a random `m`-subset, enumerated exhaustively.
///
/// Refuses to run when `C(N, m)` exceeds `budget`; sampling at larger scales
/// lives in [`crate::sampling`].
pub fn pmf_x(ctx: &Arc<CyclotomicContext>, m: u64, budget: u64) -> Result<ExactPmf> {
    let total = check_enumeration(ctx, m, budget)?;
    let entries = enumerate_counts(ctx, m, total);
    Ok(ExactPmf {
        ctx: ctx.clone(),
        m,
        entries,
        denominator: binomial(ctx.n(), m),
    })
}

/// Marginal laws of the two components and their joint law, obtained from the
/// law of the sum by the key transforms `z -> z +/- conj(z)`.
pub fn pmf_components(pmf: &ExactPmf) -> ComponentLaws {
    let ctx = pmf.ctx();
    let mut u_entries: BTreeMap<CycElem, BigUint> = BTreeMap::new();
    let mut v_entries: BTreeMap<CycElem, BigUint> = BTreeMap::new();
    let mut joint: BTreeMap<(CycElem, CycElem), BigUint> = BTreeMap::new();
    for (key, count) in pmf.entries() {
        let conj = ctx.conjugate(key);
        let u_key = ctx.add(key, &conj);
        let v_key = ctx.sub(key, &conj);
        *u_entries.entry(u_key.clone()).or_insert_with(BigUint::zero) += count;
        *v_entries.entry(v_key.clone()).or_insert_with(BigUint::zero) += count;
        *joint.entry((u_key, v_key)).or_insert_with(BigUint::zero) += count;
    }
    ComponentLaws {
        u: ComponentPmf {
            kind: ComponentKind::RealPart,
            entries: u_entries,
            denominator: pmf.denominator.clone(),
        },
        v: ComponentPmf {
            kind: ComponentKind::ImagPart,
            entries: v_entries,
            denominator: pmf.denominator.clone(),
        },
        joint,
    }
}

/// Support size versus `C(N, m)`, with explicit collision witnesses when the
/// law is not uniform.
pub fn uniformity_report(ctx: &Arc<CyclotomicContext>, m: u64, budget: u64) -> Result<UniformityReport> {
    let pmf = pmf_x(ctx, m, budget)?;
    let binom = pmf.denominator().clone();
    let support_size = BigUint::from(pmf.support_size());
    let is_uniform = support_size == binom;
    let collision_witnesses = if is_uniform {
        Vec::new()
    } else {
        collision_witness_pass(ctx, m)
    };
    Ok(UniformityReport {
        n: ctx.n(),
        l: ctx.l(),
        m,
        support_size,
        binom,
        is_uniform,
        collision_witnesses,
    })
}

fn check_enumeration(ctx: &CyclotomicContext, m: u64, budget: u64) -> Result<u64> {
    if m == 0 || m > ctx.n() {
        return Err(Error::usage(format!(
            "m must lie in [1, N]; got m = {m}, N = {}",
            ctx.n()
        )));
    }
    binomial_capped(ctx.n(), m, budget).ok_or_else(|| Error::Budget {
        n: ctx.n(),
        m,
        binom: binomial(ctx.n(), m).to_string(),
        budget,
    })
}

fn enumerate_counts(ctx: &Arc<CyclotomicContext>, m: u64, total: u64) -> BTreeMap<CycElem, BigUint> {
    let chunks = chunk_ranges(total);
    let partials: Vec<BTreeMap<CycElem, u64>> = chunks
        .into_par_iter()
        .map(|(start, len)| {
            let mut local: BTreeMap<CycElem, u64> = BTreeMap::new();
            let mut walker = ColexWalker::new(ctx, m, start);
            for _ in 0..len {
                *local.entry(walker.key()).or_insert(0) += 1;
                walker.advance();
            }
            local
        })
        .collect();

    let mut merged: BTreeMap<CycElem, BigUint> = BTreeMap::new();
    for partial in partials {
        for (key, count) in partial {
            *merged.entry(key).or_insert_with(BigUint::zero) += count;
        }
    }
    merged
}

/// Sequential pass collecting up to [`MAX_WITNESSES`] pairs of distinct
/// subsets with equal sums, one pair per collided atom, in colex order.
fn collision_witness_pass(ctx: &Arc<CyclotomicContext>, m: u64) -> Vec<(Vec<u64>, Vec<u64>)> {
    let total = binomial(ctx.n(), m)
        .try_into()
        .expect("witness pass runs only on budget-checked laws");
    let mut first_seen: std::collections::HashMap<CycElem, Vec<u64>> = std::collections::HashMap::new();
    let mut witnessed: std::collections::HashSet<CycElem> = std::collections::HashSet::new();
    let mut witnesses = Vec::new();
    let mut walker = ColexWalker::new(ctx, m, 0u64);
    for _ in 0..total {
        let key = walker.key();
        match first_seen.get(&key) {
            None => {
                first_seen.insert(key, walker.subset().to_vec());
            }
            Some(first) => {
                if !witnessed.contains(&key) {
                    witnesses.push((first.clone(), walker.subset().to_vec()));
                    witnessed.insert(key);
                    if witnesses.len() >= MAX_WITNESSES {
                        break;
                    }
                }
            }
        }
        walker.advance();
    }
    witnesses
}

/// Partition `[0, total)` into contiguous colex rank ranges for parallel
/// accumulation. Small spaces stay sequential.
fn chunk_ranges(total: u64) -> Vec<(u64, u64)> {
    const MIN_CHUNK: u64 = 4096;
    let threads = rayon::current_num_threads() as u64;
    if total <= MIN_CHUNK || threads <= 1 {
        return vec![(0, total)];
    }
    let chunks = (threads * 4).min(total / MIN_CHUNK).max(1);
    let base = total / chunks;
    let extra = total % chunks;
    let mut ranges = Vec::with_capacity(chunks as usize);
    let mut start = 0;
    for i in 0..chunks {
        let len = base + u64::from(i < extra);
        ranges.push((start, len));
        start += len;
    }
    ranges
}

/// Walks `m`-subsets of `{1, ..., N}` in colexicographic order from a given
/// rank, maintaining the canonical sum incrementally: one colex step changes
/// a short prefix of the subset, so the sum is patched rather than rebuilt.
struct ColexWalker<'a> {
    ctx: &'a CyclotomicContext,
    subset: Vec<u64>,
    sum: Vec<BigInt>,
}

impl<'a> ColexWalker<'a> {
    fn new(ctx: &'a CyclotomicContext, m: u64, start_rank: u64) -> Self {
        let subset = colex_unrank(ctx.n(), m, start_rank);
        let mut sum = vec![BigInt::zero(); ctx.basis_dim()];
        for &n in &subset {
            add_assign(&mut sum, ctx.zeta_power(ctx.exponent_of(n)).coeffs());
        }
        ColexWalker { ctx, subset, sum }
    }

    fn subset(&self) -> &[u64] {
        &self.subset
    }

    fn key(&self) -> CycElem {
        self.ctx.reduce(&self.sum)
    }

    fn advance(&mut self) {
        let m = self.subset.len();
        let mut i = 0;
        loop {
            if i == m {
                // Past the last subset; only reached when callers overrun the
                // rank space, which the chunking never does.
                return;
            }
            let next = if i + 1 == m { self.ctx.n() + 1 } else { self.subset[i + 1] };
            if self.subset[i] + 1 < next {
                break;
            }
            i += 1;
        }
        for j in 0..=i {
            let e = self.ctx.exponent_of(self.subset[j]);
            sub_assign(&mut self.sum, self.ctx.zeta_power(e).coeffs());
        }
        self.subset[i] += 1;
        for (j, slot) in self.subset[..i].iter_mut().enumerate() {
            *slot = j as u64 + 1;
        }
        for j in 0..=i {
            let e = self.ctx.exponent_of(self.subset[j]);
            add_assign(&mut self.sum, self.ctx.zeta_power(e).coeffs());
        }
    }
}

fn add_assign(acc: &mut [BigInt], rhs: &[BigInt]) {
    for (a, b) in acc.iter_mut().zip(rhs) {
        *a += b;
    }
}

fn sub_assign(acc: &mut [BigInt], rhs: &[BigInt]) {
    for (a, b) in acc.iter_mut().zip(rhs) {
        *a -= b;
    }
}

/// Subset of `{1, ..., n}` at colex rank `rank`: the combinatorial number
/// system with `rank = sum_i C(c_i - 1, i)` over 1-based positions.
fn colex_unrank(n: u64, m: u64, rank: u64) -> Vec<u64> {
    let mut remaining = BigUint::from(rank);
    let mut subset = vec![0u64; m as usize];
    let mut upper = n;
    for i in (1..=m).rev() {
        // Largest c with C(c - 1, i) <= remaining.
        let mut c = upper;
        while binomial(c - 1, i) > remaining {
            c -= 1;
        }
        remaining -= binomial(c - 1, i);
        subset[i as usize - 1] = c;
        upper = c - 1;
    }
    debug_assert!(remaining.is_zero());
    subset
}
