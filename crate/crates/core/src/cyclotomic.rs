//! Exact arithmetic in the ring of integers of a cyclotomic field.
//!
//! A context fixes the pair `(N, l)` and works with `w = exp(-2*pi*j*l/N)`,
//! a primitive `d`-th root of unity for `d = N / gcd(N, l)`. Elements are
//! integer coordinate vectors over the power basis `1, zeta, ..., zeta^(phi(d)-1)`
//! of `zeta = exp(-2*pi*j/d)`, reduced modulo the `d`-th cyclotomic polynomial.
//! Because that polynomial is the minimal polynomial of `zeta`, the coordinate
//! vector is a canonical form: two elements are equal as complex numbers if
//! and only if their vectors are identical. That is what makes subset sums
//! usable as exact hash/ordering keys.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinatorics::{divisors, gcd, totient};
use crate::error::{Error, Result};

/// Canonical element of the ring `Z[zeta_d]`: coordinates over the power
/// basis, constant term first, length exactly `phi(d)`.
///
/// Ordering and hashing are coefficient-vector lexicographic, which is a
/// total order on canonical forms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CycElem {
    coeffs: Vec<BigInt>,
}

impl CycElem {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if i == 0 {
                    write!(f, "{c}")?;
                } else if c.is_one() {
                    write!(f, "z^{i}")?;
                } else if (-c).is_one() {
                    write!(f, "-z^{i}")?;
                } else {
                    write!(f, "{c}*z^{i}")?;
                }
                first = false;
            } else {
                let (sign, abs) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
                if i == 0 {
                    write!(f, " {sign} {abs}")?;
                } else if abs.is_one() {
                    write!(f, " {sign} z^{i}")?;
                } else {
                    write!(f, " {sign} {abs}*z^{i}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Realness/rationality classification of an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub is_real: bool,
    pub is_rational: bool,
    pub rational_value: Option<BigInt>,
}

/// The algebra fixed by `(N, l)`: derived order, minimal polynomial and the
/// reduction table for all powers of the basis root.
///
/// Immutable after construction; all operations are pure functions, so a
/// context can be shared freely across threads.
#[derive(Debug)]
pub struct CyclotomicContext {
    n: u64,
    l: u64,
    g: u64,
    d: u64,
    /// `l / g`, coprime to `d`; rescales sample indices to basis exponents.
    lg: u64,
    phi_d: usize,
    /// Monic minimal polynomial of `zeta_d`, constant term first, length `phi_d + 1`.
    min_poly: Vec<BigInt>,
    /// `powers[e]` is the canonical form of `zeta^e`, `0 <= e < d`.
    powers: Vec<CycElem>,
}

impl CyclotomicContext {
    /// Build the context for signal length `n` and frequency index `l`.
    pub fn new(n: u64, l: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("N must be a positive integer"));
        }
        if l >= n {
            return Err(Error::usage(format!("l must lie in [0, N-1]; got l = {l}, N = {n}")));
        }
        let g = gcd(n, l);
        let d = n / g;
        let lg = l / g;
        let phi_d = totient(d) as usize;
        let min_poly = cyclotomic_polynomial(d);
        debug_assert_eq!(min_poly.len(), phi_d + 1);
        debug_assert!(min_poly[phi_d].is_one(), "minimal polynomial must be monic");

        let powers = power_table(d as usize, phi_d, &min_poly);
        Ok(CyclotomicContext { n, l, g, d, lg, phi_d, min_poly, powers })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    /// `gcd(N, l)`, with `gcd(N, 0) = N`.
    pub fn g(&self) -> u64 {
        self.g
    }

    /// Multiplicative order of `w`.
    pub fn order(&self) -> u64 {
        self.d
    }

    /// Degree of the field extension, i.e. the basis dimension.
    pub fn basis_dim(&self) -> usize {
        self.phi_d
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    /// Basis exponent of `w^n`: `(l*n mod N) / g`, a value in `[0, d)`.
    pub fn exponent_of(&self, n: u64) -> u64 {
        ((self.lg as u128 * n as u128) % self.d as u128) as u64
    }

    fn check(&self, a: &CycElem) {
        assert_eq!(
            a.coeffs.len(),
            self.phi_d,
            "element of dimension {} used with a context of dimension {}",
            a.coeffs.len(),
            self.phi_d
        );
    }

    pub fn zero(&self) -> CycElem {
        CycElem { coeffs: vec![BigInt::zero(); self.phi_d] }
    }

    pub fn one(&self) -> CycElem {
        self.from_int(BigInt::one())
    }

    pub fn from_int(&self, value: BigInt) -> CycElem {
        let mut coeffs = vec![BigInt::zero(); self.phi_d];
        coeffs[0] = value;
        CycElem { coeffs }
    }

    /// Canonical form of `zeta^e` for any exponent (reduced modulo `d`).
    pub fn zeta_power(&self, e: u64) -> &CycElem {
        &self.powers[(e % self.d) as usize]
    }

    /// Canonical form of `w^n` for a sample index `1 <= n <= N`.
    pub fn root_power(&self, n: u64) -> Result<CycElem> {
        if n == 0 || n > self.n {
            return Err(Error::usage(format!("sample index must lie in [1, N]; got {n}")));
        }
        Ok(self.powers[self.exponent_of(n) as usize].clone())
    }

    /// Remainder of an arbitrary integer polynomial in `zeta` modulo the
    /// minimal polynomial. The division is exact integer arithmetic against
    /// the monic divisor.
    pub fn reduce(&self, poly: &[BigInt]) -> CycElem {
        let mut work: Vec<BigInt> = poly.to_vec();
        reduce_in_place(&mut work, &self.min_poly);
        work.resize(self.phi_d, BigInt::zero());
        CycElem { coeffs: work }
    }

    pub fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        self.check(a);
        self.check(b);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CycElem { coeffs }
    }

    pub fn sub(&self, a: &CycElem, b: &CycElem) -> CycElem {
        self.check(a);
        self.check(b);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        CycElem { coeffs }
    }

    pub fn negate(&self, a: &CycElem) -> CycElem {
        self.check(a);
        CycElem { coeffs: a.coeffs.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, a: &CycElem, factor: &BigInt) -> CycElem {
        self.check(a);
        CycElem { coeffs: a.coeffs.iter().map(|x| x * factor).collect() }
    }

    /// Exact ring product: polynomial multiplication followed by reduction.
    pub fn multiply(&self, a: &CycElem, b: &CycElem) -> CycElem {
        self.check(a);
        self.check(b);
        if self.phi_d == 1 {
            return CycElem { coeffs: vec![&a.coeffs[0] * &b.coeffs[0]] };
        }
        let mut prod = vec![BigInt::zero(); 2 * self.phi_d - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce(&prod)
    }

    /// `a^k` by repeated multiplication; `a^0 = 1`.
    pub fn pow(&self, a: &CycElem, k: u32) -> CycElem {
        self.check(a);
        let mut result = self.one();
        let mut base = a.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = self.multiply(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.multiply(&base, &base);
            }
        }
        result
    }

    /// Complex conjugation, realized as the substitution `zeta -> zeta^(d-1)`
    /// followed by reduction.
    pub fn conjugate(&self, a: &CycElem) -> CycElem {
        self.check(a);
        let mut acc = self.zero();
        for (i, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let basis = &self.powers[((self.d - i as u64) % self.d) as usize];
            for (dst, src) in acc.coeffs.iter_mut().zip(&basis.coeffs) {
                *dst += c * src;
            }
        }
        acc
    }

    /// Realness and rationality of an element. Rationality reads off the
    /// basis coordinates directly: the power basis is a field basis, so an
    /// element is rational iff every coordinate of index >= 1 vanishes.
    pub fn classify(&self, a: &CycElem) -> Classification {
        self.check(a);
        let is_real = *a == self.conjugate(a);
        let is_rational = a.coeffs[1..].iter().all(Zero::is_zero);
        let rational_value = is_rational.then(|| a.coeffs[0].clone());
        Classification { is_real, is_rational, rational_value }
    }

    /// Double-precision view `sum_i coeffs[i] * exp(-2*pi*j*i/d)`. For display
    /// and floating cross-checks only; never used for equality decisions.
    pub fn to_complex(&self, a: &CycElem) -> Complex64 {
        self.check(a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = -2.0 * std::f64::consts::PI * (i as f64) / (self.d as f64);
            acc += Complex64::new(angle.cos(), angle.sin()) * c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }
}

/// Synthetic division of `work` by the monic polynomial `min_poly`, in place.
fn reduce_in_place(work: &mut Vec<BigInt>, min_poly: &[BigInt]) {
    let deg = min_poly.len() - 1;
    while work.len() > deg {
        let lead = work.pop().expect("nonempty");
        if lead.is_zero() {
            continue;
        }
        let offset = work.len() - deg;
        for (j, m) in min_poly[..deg].iter().enumerate() {
            if !m.is_zero() {
                work[offset + j] -= &lead * m;
            }
        }
    }
}

/// The `d`-th cyclotomic polynomial, built by exact division of `x^d - 1` by
/// the product of the lower-order cyclotomic polynomials over the proper
/// divisors of `d`. The division is integer-exact and the zero remainder is
/// asserted, so a wrong intermediate cannot slip through silently.
fn cyclotomic_polynomial(d: u64) -> Vec<BigInt> {
    let mut table: Vec<(u64, Vec<BigInt>)> = Vec::new();
    for e in divisors(d) {
        let mut x_e_minus_1 = vec![BigInt::zero(); e as usize + 1];
        x_e_minus_1[0] = -BigInt::one();
        x_e_minus_1[e as usize] = BigInt::one();

        let mut divisor = vec![BigInt::one()];
        for (f, poly) in &table {
            if e % f == 0 {
                divisor = poly_mul(&divisor, poly);
            }
        }
        let quotient = poly_div_exact(&x_e_minus_1, &divisor);
        table.push((e, quotient));
    }
    table.pop().expect("d divides d").1
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Quotient of `a / b` for monic `b`; panics unless the division is exact.
fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    assert!(b.last().map(BigInt::is_one).unwrap_or(false), "divisor must be monic");
    let deg_b = b.len() - 1;
    assert!(a.len() > deg_b, "dividend degree below divisor degree");
    let mut rem: Vec<BigInt> = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - deg_b];
    for i in (deg_b..a.len()).rev() {
        let c = std::mem::replace(&mut rem[i], BigInt::zero());
        if c.is_zero() {
            continue;
        }
        for (j, m) in b[..deg_b].iter().enumerate() {
            if !m.is_zero() {
                rem[i - deg_b + j] -= &c * m;
            }
        }
        quot[i - deg_b] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "non-exact cyclotomic division");
    quot
}

/// Canonical forms of `zeta^e` for `0 <= e < d`, built by repeated shifts
/// reduced against the monic minimal polynomial.
fn power_table(d: usize, phi_d: usize, min_poly: &[BigInt]) -> Vec<CycElem> {
    let mut powers = Vec::with_capacity(d);
    let mut cur = vec![BigInt::zero(); phi_d];
    cur[0] = BigInt::one();
    powers.push(CycElem { coeffs: cur.clone() });
    for _ in 1..d {
        let carry = if phi_d > 0 { cur[phi_d - 1].clone() } else { BigInt::zero() };
        for i in (1..phi_d).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = BigInt::zero();
        if !carry.is_zero() {
            for (j, m) in min_poly[..phi_d].iter().enumerate() {
                cur[j] -= &carry * m;
            }
        }
        powers.push(CycElem { coeffs: cur.clone() });
    }
    powers
}

/// Fully reduced quotient of a ring element by a positive integer:
/// `gcd(den, content(num)) = 1` and `den > 0` after construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycRat {
    num: CycElem,
    den: BigUint,
}

impl CycRat {
    pub fn new(num: CycElem, den: BigUint) -> Self {
        assert!(!den.is_zero(), "denominator must be positive");
        let mut content = den.clone();
        for c in &num.coeffs {
            content = content.gcd(&c.magnitude());
            if content.is_one() {
                break;
            }
        }
        if num.is_zero() {
            return CycRat { num, den: BigUint::one() };
        }
        if content.is_one() {
            return CycRat { num, den };
        }
        let divisor = BigInt::from(content.clone());
        let coeffs = num.coeffs.iter().map(|c| c / &divisor).collect();
        CycRat { num: CycElem { coeffs }, den: den / content }
    }

    pub fn from_int(ctx: &CyclotomicContext, value: BigInt) -> Self {
        CycRat { num: ctx.from_int(value), den: BigUint::one() }
    }

    pub fn zero(ctx: &CyclotomicContext) -> Self {
        CycRat { num: ctx.zero(), den: BigUint::one() }
    }

    pub fn num(&self) -> &CycElem {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, ctx: &CyclotomicContext, other: &CycRat) -> CycRat {
        let left = ctx.scale(&self.num, &BigInt::from(other.den.clone()));
        let right = ctx.scale(&other.num, &BigInt::from(self.den.clone()));
        CycRat::new(ctx.add(&left, &right), &self.den * &other.den)
    }

    pub fn sub(&self, ctx: &CyclotomicContext, other: &CycRat) -> CycRat {
        self.add(ctx, &other.negate(ctx))
    }

    pub fn negate(&self, ctx: &CyclotomicContext) -> CycRat {
        CycRat { num: ctx.negate(&self.num), den: self.den.clone() }
    }

    pub fn mul(&self, ctx: &CyclotomicContext, other: &CycRat) -> CycRat {
        CycRat::new(ctx.multiply(&self.num, &other.num), &self.den * &other.den)
    }

    pub fn div_uint(&self, divisor: &BigUint) -> CycRat {
        assert!(!divisor.is_zero());
        CycRat::new(self.num.clone(), &self.den * divisor)
    }

    pub fn scale_int(&self, ctx: &CyclotomicContext, factor: &BigInt) -> CycRat {
        CycRat::new(ctx.scale(&self.num, factor), self.den.clone())
    }

    pub fn conjugate(&self, ctx: &CyclotomicContext) -> CycRat {
        CycRat { num: ctx.conjugate(&self.num), den: self.den.clone() }
    }

    pub fn classify(&self, ctx: &CyclotomicContext) -> Classification {
        ctx.classify(&self.num)
    }

    /// The value as an ordinary rational, when it is one.
    pub fn to_rational(&self, ctx: &CyclotomicContext) -> Option<BigRational> {
        let class = ctx.classify(&self.num);
        class
            .rational_value
            .map(|v| BigRational::new(v, BigInt::from(self.den.clone())))
    }

    pub fn to_complex(&self, ctx: &CyclotomicContext) -> Complex64 {
        ctx.to_complex(&self.num) / self.den.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact equality with an ordinary rational.
    pub fn eq_rational(&self, ctx: &CyclotomicContext, value: &BigRational) -> bool {
        self.to_rational(ctx).map(|r| r == *value).unwrap_or(false)
    }
}

impl fmt::Display for CycRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / {}", self.num, self.den)
        }
    }
}
