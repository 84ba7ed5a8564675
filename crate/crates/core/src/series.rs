//! Truncated power series with exact rational coefficients, and the tree
//! generating functions built from them:
//!
//! * `T(z)`: unordered trees, internal outdegrees even and >= 4,
//! * `B(z)`: ordered full binary trees (`B = z(1 + B^2)`),
//! * `C(z)`: ordered trees, internal outdegrees even and >= 4
//!   (`C = z(1 + C^4 / (1 - C^2))`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Truncation order used for the headline computations.
pub const DEFAULT_ORDER: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("exp needs a zero constant term, got {0}")]
    NonZeroConstant(BigRational),
    #[error("series has no inverse: zero constant term")]
    NotInvertible,
    #[error("cannot truncate order {have} series to order {want}")]
    TruncateBeyondOrder { have: usize, want: usize },
    #[error("power-bound check needs {0}")]
    Domain(String),
}

/// `sum_{k=0}^{order} coeffs[k] z^k`, everything above `order` unknown.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalSeries {
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.coeffs.iter().map(|c| c.to_string()))
            .finish()
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RationalSeries {
    pub fn zero(order: usize) -> Self {
        RationalSeries {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// The series `z` (or `0` when `order == 0`).
    pub fn z(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = BigRational::one();
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least a constant term");
        RationalSeries { coeffs }
    }

    pub fn from_integers(order: usize, ints: &[i64]) -> Self {
        let mut s = Self::zero(order);
        for (k, &v) in ints.iter().enumerate().take(order + 1) {
            s.coeffs[k] = q(v);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        RationalSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `f(z^j)`, by spreading coefficients to multiples of `j`.
    pub fn dilate(&self, j: usize) -> Self {
        assert!(j >= 1);
        let mut out = Self::zero(self.order());
        for k in 0..=self.order() / j {
            out.coeffs[k * j] = self.coeffs[k].clone();
        }
        out
    }

    /// Keeps coefficients of `z^0 ..= z^order`.
    pub fn truncate(&self, order: usize) -> Result<Self, SeriesError> {
        if order > self.order() {
            return Err(SeriesError::TruncateBeyondOrder {
                have: self.order(),
                want: order,
            });
        }
        Ok(RationalSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    /// `exp(f)` for `f(0) = 0`, via `k g_k = sum_{i=1}^k i f_i g_{k-i}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonZeroConstant(self.coeffs[0].clone()));
        }
        let mut acc = ExpAccumulator::new();
        for k in 0..=self.order() {
            acc.push(self.coeffs[k].clone());
        }
        Ok(RationalSeries { coeffs: acc.values })
    }

    /// Multiplicative inverse, for a nonzero constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0].is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = self.coeffs[0].recip();
        let mut out: Vec<BigRational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for k in 1..=self.order() {
            let mut s = BigRational::zero();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    s += &self.coeffs[i] * &out[k - i];
                }
            }
            out.push(-s * &inv0);
        }
        Ok(RationalSeries { coeffs: out })
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(self.order());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Value of the truncated polynomial at `x`, in `f64`.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.to_f64_coeffs()
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// `index:numerator/denominator` lines.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{k}:{}/{}\n", c.numer(), c.denom()));
        }
        out
    }

    fn zip(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        let order = self.order().min(other.order());
        RationalSeries {
            coeffs: (0..=order)
                .map(|k| f(&self.coeffs[k], &other.coeffs[k]))
                .collect(),
        }
    }
}

impl Add for &RationalSeries {
    type Output = RationalSeries;
    fn add(self, rhs: &RationalSeries) -> RationalSeries {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &RationalSeries {
    type Output = RationalSeries;
    fn sub(self, rhs: &RationalSeries) -> RationalSeries {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for &RationalSeries {
    type Output = RationalSeries;
    fn neg(self) -> RationalSeries {
        RationalSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &RationalSeries {
    type Output = RationalSeries;
    fn mul(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.order().min(rhs.order());
        let mut out = RationalSeries::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }
}

/// Coefficients of `exp(f)` produced one at a time, as coefficients of `f`
/// become available. `f_0` must be zero.
#[derive(Debug, Default)]
struct ExpAccumulator {
    /// `k * f_k`
    weighted: Vec<BigRational>,
    values: Vec<BigRational>,
}

impl ExpAccumulator {
    fn new() -> Self {
        Self::default()
    }

    /// Feeds `f_k` (for `k = values.len()`) and returns `[z^k] exp(f)`.
    fn push(&mut self, fk: BigRational) -> &BigRational {
        let k = self.values.len();
        self.weighted.push(fk * q(k as i64));
        let value = if k == 0 {
            BigRational::one()
        } else {
            let mut s = BigRational::zero();
            for i in 1..=k {
                if !self.weighted[i].is_zero() {
                    s += &self.weighted[i] * &self.values[k - i];
                }
            }
            s / q(k as i64)
        };
        self.values.push(value);
        self.values.last().expect("just pushed")
    }
}

/// `[z^k] (a * b)` from the first `k + 1` coefficients of each.
fn conv_at(a: &[BigRational], b: &[BigRational], k: usize) -> BigRational {
    let mut s = BigRational::zero();
    for i in 0..=k {
        if !a[i].is_zero() && !b[k - i].is_zero() {
            s += &a[i] * &b[k - i];
        }
    }
    s
}

/// Generating function of the unordered tree class, to order `order`.
///
/// Solves `T = z/2 exp(sum_j T(z^j)/j) + z/2 exp(sum_j (-1)^j T(z^j)/j)
/// - z/2 (T^2 + T(z^2))` coefficient by coefficient: the right side at
/// `z^n` only involves `T_1 .. T_{n-1}`.
pub fn solve_t(order: usize) -> RationalSeries {
    let mut t: Vec<BigRational> = vec![BigRational::zero()];
    let mut plus = ExpAccumulator::new();
    let mut minus = ExpAccumulator::new();
    let mut square: Vec<BigRational> = Vec::new();
    for n in 1..=order {
        let k = n - 1;
        // [z^k] sum_{j|k} T(z^j)/j and its alternating twin
        let (mut a, mut am) = (BigRational::zero(), BigRational::zero());
        if k > 0 {
            for j in (1..=k).filter(|j| k % j == 0) {
                let term = &t[k / j] / q(j as i64);
                if j % 2 == 0 {
                    am += &term;
                } else {
                    am -= &term;
                }
                a += term;
            }
        }
        let e_plus = plus.push(a).clone();
        let e_minus = minus.push(am).clone();
        square.push(conv_at(&t, &t, k));
        let dilated = if k % 2 == 0 {
            t[k / 2].clone()
        } else {
            BigRational::zero()
        };
        let tn = (e_plus + e_minus - &square[k] - dilated) / q(2);
        t.push(tn);
    }
    RationalSeries { coeffs: t }
}

/// `B(z)`: full binary trees, `[z^(2n+1)] B` is the `n`-th Catalan number.
pub fn series_b(order: usize) -> RationalSeries {
    let mut b: Vec<BigRational> = vec![BigRational::zero()];
    for n in 1..=order {
        let k = n - 1;
        let mut v = conv_at(&b, &b, k);
        if k == 0 {
            v += BigRational::one();
        }
        b.push(v);
    }
    RationalSeries { coeffs: b }
}

/// `C(z)`: ordered trees with internal outdegrees even and >= 4.
pub fn series_c(order: usize) -> RationalSeries {
    let mut c: Vec<BigRational> = vec![BigRational::zero()];
    // running coefficients of C^2, 1/(1 - C^2), C^4 and C^4/(1 - C^2)
    let (mut sq, mut geo, mut quad, mut rhs): (
        Vec<BigRational>,
        Vec<BigRational>,
        Vec<BigRational>,
        Vec<BigRational>,
    ) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for n in 1..=order {
        let k = n - 1;
        sq.push(conv_at(&c, &c, k));
        let g = if k == 0 {
            BigRational::one()
        } else {
            let mut s = BigRational::zero();
            for i in 1..=k {
                s += &sq[i] * &geo[k - i];
            }
            s
        };
        geo.push(g);
        quad.push(conv_at(&sq, &sq, k));
        rhs.push(conv_at(&quad, &geo, k));
        let mut v = rhs[k].clone();
        if k == 0 {
            v += BigRational::one();
        }
        c.push(v);
    }
    RationalSeries { coeffs: c }
}

/// `L(z)`: `T` truncated to powers at most `order`.
pub fn make_l(order: usize) -> RationalSeries {
    solve_t(order)
}

/// `M(z)`: `B` truncated to powers at most `order`.
pub fn make_m(order: usize) -> RationalSeries {
    series_b(order)
}

/// Right side of the functional equation for `T`, evaluated on `t`.
pub fn t_equation_rhs(t: &RationalSeries) -> Result<RationalSeries, SeriesError> {
    let order = t.order();
    let mut a = RationalSeries::zero(order);
    let mut am = RationalSeries::zero(order);
    for j in 1..=order.max(1) {
        let term = t
            .dilate(j)
            .scale(&BigRational::new(BigInt::one(), BigInt::from(j)));
        a = &a + &term;
        am = if j % 2 == 0 { &am + &term } else { &am - &term };
    }
    let z_half = RationalSeries::z(order).scale(&BigRational::new(BigInt::one(), BigInt::from(2)));
    let exps = &a.exp()? + &am.exp()?;
    let correction = &(t * t) + &t.dilate(2);
    Ok(&z_half * &(&exps - &correction))
}

/// Index at which a coefficient-wise comparison failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceFailure {
    pub index: usize,
    pub what: &'static str,
}

#[derive(Debug, Clone)]
pub struct DominanceReport {
    pub order: usize,
    pub failures: Vec<DominanceFailure>,
    /// `B - C - C^3/(1 - C^2)` vanishes through `order`.
    pub identity_holds: bool,
}

impl DominanceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.identity_holds
    }
}

/// Checks `[z^n] T <= [z^n] C <= [z^n] B` for `n <= order` and the identity
/// `B - C = C^3 / (1 - C^2)`.
pub fn dominance_suite(order: usize) -> DominanceReport {
    let t = solve_t(order);
    let b = series_b(order);
    let c = series_c(order);
    let mut failures = Vec::new();
    for n in 0..=order {
        if t.coeff(n) > c.coeff(n) {
            failures.push(DominanceFailure {
                index: n,
                what: "T > C",
            });
        }
        if c.coeff(n) > b.coeff(n) {
            failures.push(DominanceFailure {
                index: n,
                what: "C > B",
            });
        }
    }
    let c2 = &c * &c;
    let c3 = &c2 * &c;
    let geo = (&RationalSeries::one(order) - &c2)
        .inverse()
        .expect("constant term 1");
    let residual = &(&b - &c) - &(&c3 * &geo);
    DominanceReport {
        order,
        failures,
        identity_holds: residual.is_zero(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `f(x^i)` with `f(x^2)^(i/2)` on the truncated series.
pub fn power_bound_check(f: &RationalSeries, x: f64, i: u32) -> Result<PowerBound, SeriesError> {
    if !f.has_nonnegative_coeffs() {
        return Err(SeriesError::Domain("nonnegative coefficients".into()));
    }
    if !f.coeff(0).is_zero() || f.order() < 1 || !f.coeff(1).is_one() {
        return Err(SeriesError::Domain("[z^0] f = 0 and [z^1] f = 1".into()));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(SeriesError::Domain(format!("x in [0, 1), got {x}")));
    }
    if i < 2 {
        return Err(SeriesError::Domain(format!("i >= 2, got {i}")));
    }
    let lhs = f.eval_f64(x.powi(i as i32));
    let rhs = f.eval_f64(x * x).powf(f64::from(i) / 2.0);
    // equality at i = 2 must not fail on rounding
    let holds = lhs <= rhs * (1.0 + 4.0 * f64::EPSILON);
    Ok(PowerBound { lhs, rhs, holds })
}

/// `(1 - sqrt(1 - 4x^2)) / (2x)`, the closed form of `B`.
pub fn b_closed_form(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (1.0 - (1.0 - 4.0 * x * x).sqrt()) / (2.0 * x)
}
