//! Bounds on the radius of convergence of `T(z)` from the characteristic
//! system `G(r, s) = s`, `G_w(r, s) = 1` of two bivariate functions built
//! from truncations of `T`:
//!
//! * the upper system `Ĝ`, whose solution is coefficient-wise below `T`
//!   (its root bounds the radius from above),
//! * the lower system `Ǧ`, which adds the truncation errors `e` and `b` and
//!   dominates `T` (its root bounds the radius from below).
//!
//! Both have the shape
//! `G(z, w) = z/2 exp(w + P(z)) + z/2 exp(-w + Q(z)) - z/2 (w^2 + R(z))`.
//!
//! Arithmetic is plain `f64`; this is not interval arithmetic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{b_closed_form, make_l, make_m, RationalSeries};

/// Upper end of the claimed radius interval, used to size the error terms.
pub const RHO_HAT: f64 = 0.6678;
/// Lower end of the claimed radius interval.
pub const RHO_CHECK: f64 = 0.6677;
/// Residual bound required of a solved characteristic system.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Terms of the `b^(j/2)/j` tails below this are dropped.
pub const TAIL_CUTOFF: f64 = 1e-20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadiusError {
    #[error("b = {0} must lie in (0, 1)")]
    BadB(f64),
    #[error("rho_hat^2 = {0} is outside the disk of B (radius 1/2)")]
    OutsideDisk(f64),
    #[error("order must be even and at least 20, got {0}")]
    BadOrder(usize),
    #[error("no fixed point at the left end of the bracket r = {0}")]
    DivergentAtLeft(f64),
    #[error("fixed point exists at the right end of the bracket r = {0}; no sign change")]
    NoSignChange(f64),
    #[error("Newton polishing failed to converge near r = {r} (residuals {value:e}, {slope:e})")]
    PolishFailed { r: f64, value: f64, slope: f64 },
    #[error("certificate check failed: {0}")]
    Check(String),
}

/// A smooth function `G(z, w)` with the partial derivatives the solver needs.
pub trait BivariateSystem {
    fn eval(&self, z: f64, w: f64) -> f64;
    fn eval_dw(&self, z: f64, w: f64) -> f64;
    fn eval_dz(&self, z: f64, w: f64) -> f64;
    fn eval_dww(&self, z: f64, w: f64) -> f64;
    fn eval_dwz(&self, z: f64, w: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Upper,
    Lower,
}

/// `Ĝ` or `Ǧ` for a fixed truncation order.
#[derive(Debug, Clone)]
pub struct TreeSystem {
    pub kind: SystemKind,
    pub order: usize,
    /// Coefficients of the truncation `L`.
    l: Vec<f64>,
    /// Constant added to `P`, `Q`, `R` respectively.
    plus_const: f64,
    minus_const: f64,
    r_const: f64,
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn horner_derivative(c: &[f64], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, &a)| acc * x + k as f64 * a)
}

struct Parts {
    p: f64,
    dp: f64,
    q: f64,
    dq: f64,
    r: f64,
    dr: f64,
}

impl TreeSystem {
    /// `P`, `Q`, `R` and their `z`-derivatives.
    fn parts(&self, z: f64) -> Parts {
        let (mut p, mut dp, mut q, mut dq) = (0.0, 0.0, 0.0, 0.0);
        let mut zj_1 = z; // z^(j-1)
        for j in 2..=self.order {
            let zj = zj_1 * z;
            let term = horner(&self.l, zj) / j as f64;
            let dterm = horner_derivative(&self.l, zj) * zj_1;
            p += term;
            dp += dterm;
            if j % 2 == 0 {
                q += term;
                dq += dterm;
            } else {
                q -= term;
                dq -= dterm;
            }
            zj_1 = zj;
        }
        let z2 = z * z;
        Parts {
            p: p + self.plus_const,
            dp,
            q: q + self.minus_const,
            dq,
            r: horner(&self.l, z2) + self.r_const,
            dr: 2.0 * z * horner_derivative(&self.l, z2),
        }
    }

    pub fn l_coeffs(&self) -> &[f64] {
        &self.l
    }

    /// Constants added inside the two exponentials and to `L(z^2)`.
    pub fn constants(&self) -> (f64, f64, f64) {
        (self.plus_const, self.minus_const, self.r_const)
    }
}

impl BivariateSystem for TreeSystem {
    fn eval(&self, z: f64, w: f64) -> f64 {
        let s = self.parts(z);
        z / 2.0 * ((w + s.p).exp() + (-w + s.q).exp()) - z / 2.0 * (w * w + s.r)
    }

    fn eval_dw(&self, z: f64, w: f64) -> f64 {
        let s = self.parts(z);
        z / 2.0 * ((w + s.p).exp() - (-w + s.q).exp()) - z * w
    }

    fn eval_dz(&self, z: f64, w: f64) -> f64 {
        let s = self.parts(z);
        let (ep, eq) = ((w + s.p).exp(), (-w + s.q).exp());
        0.5 * (ep + eq) - 0.5 * (w * w + s.r) + z / 2.0 * (s.dp * ep + s.dq * eq) - z / 2.0 * s.dr
    }

    fn eval_dww(&self, z: f64, w: f64) -> f64 {
        let s = self.parts(z);
        z / 2.0 * ((w + s.p).exp() + (-w + s.q).exp()) - z
    }

    fn eval_dwz(&self, z: f64, w: f64) -> f64 {
        let s = self.parts(z);
        let (ep, eq) = ((w + s.p).exp(), (-w + s.q).exp());
        0.5 * (ep - eq) - w + z / 2.0 * (s.dp * ep - s.dq * eq)
    }
}

fn l_to_f64(l: &RationalSeries, order: usize) -> Vec<f64> {
    l.to_f64_coeffs().into_iter().take(order + 1).collect()
}

/// `Ĝ`: `T(z^j)` replaced by the truncation `L(z^j)`, sums cut at `j = order`.
pub fn build_upper(l: &RationalSeries, order: usize) -> TreeSystem {
    TreeSystem {
        kind: SystemKind::Upper,
        order,
        l: l_to_f64(l, order),
        plus_const: 0.0,
        minus_const: 0.0,
        r_const: 0.0,
    }
}

/// `(sum_{j>order} b^(j/2)/j, sum_{j>order} (-1)^j b^(j/2)/j)`.
pub fn tails(b: f64, order: usize) -> (f64, f64) {
    let (mut plus, mut minus) = (0.0, 0.0);
    let mut j = order + 1;
    loop {
        let term = b.powf(j as f64 / 2.0) / j as f64;
        if term < TAIL_CUTOFF {
            break;
        }
        plus += term;
        minus += if j.is_multiple_of(2) { term } else { -term };
        j += 1;
    }
    (plus, minus)
}

/// `Ǧ`: each `L(z^j)` raised by `e`, plus the tails `b^(j/2)/j` for `j > order`.
pub fn build_lower(
    l: &RationalSeries,
    e_const: f64,
    b_const: f64,
    order: usize,
) -> Result<TreeSystem, RadiusError> {
    if !(b_const > 0.0 && b_const < 1.0) {
        return Err(RadiusError::BadB(b_const));
    }
    let (tail_plus, tail_minus) = tails(b_const, order);
    let harmonic: f64 = (2..=order).map(|j| 1.0 / j as f64).sum();
    let alternating: f64 = (2..=order)
        .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } / j as f64)
        .sum();
    Ok(TreeSystem {
        kind: SystemKind::Lower,
        order,
        l: l_to_f64(l, order),
        plus_const: e_const * harmonic + tail_plus,
        minus_const: e_const * alternating + tail_minus,
        r_const: e_const,
    })
}

/// `e = B(ρ̂²) - M(ρ̂²)` and `b = B(ρ̂²)`, with `B` in closed form and `M`
/// the truncation of `B` to `order`.
pub fn constants(rho_hat: f64, order: usize) -> Result<(f64, f64), RadiusError> {
    let x = rho_hat * rho_hat;
    if !(0.0..0.5).contains(&x) {
        return Err(RadiusError::OutsideDisk(x));
    }
    let b = b_closed_form(x);
    let e = b - make_m(order).eval_f64(x);
    Ok((e, b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub bracket: (f64, f64),
    pub tolerance: f64,
    pub max_newton: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            bracket: (0.5, 0.9),
            tolerance: 1e-13,
            max_newton: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSolution {
    pub r: f64,
    pub s: f64,
    /// `|G(r, s) - s|`
    pub residual_value: f64,
    /// `|G_w(r, s) - 1|`
    pub residual_slope: f64,
    pub bisection_steps: usize,
}

/// Least nonnegative fixed point of `s = G(r, s)` by Newton's method from
/// `s = 0`, or `None` if the iteration shows there is none.
///
/// `h(s) = G(r, s) - s` is convex for `s >= 0`, so Newton from the left
/// increases monotonically to the least root whenever one exists.
pub fn least_fixed_point(sys: &dyn BivariateSystem, r: f64, max_iter: usize) -> Option<f64> {
    let mut s = 0.0_f64;
    for _ in 0..max_iter {
        let h = sys.eval(r, s) - s;
        if h <= 0.0 {
            return Some(s);
        }
        let slope = sys.eval_dw(r, s) - 1.0;
        if slope >= 0.0 {
            return None;
        }
        let next = s - h / slope;
        if !next.is_finite() {
            return None;
        }
        if next - s <= 1e-16 * (1.0 + s) {
            return Some(next);
        }
        s = next;
    }
    None
}

/// Solves `G(r, s) = s`, `G_w(r, s) = 1`.
///
/// Bisects on `r`: a fixed point of `s = G(r, s)` exists below the root and
/// not above it. The bracket end is then polished by Newton's method on the
/// full two-equation system.
pub fn solve_characteristic(
    sys: &dyn BivariateSystem,
    opts: SolverOptions,
) -> Result<CharacteristicSolution, RadiusError> {
    let (mut lo, mut hi) = opts.bracket;
    if least_fixed_point(sys, lo, opts.max_newton).is_none() {
        return Err(RadiusError::DivergentAtLeft(lo));
    }
    if least_fixed_point(sys, hi, opts.max_newton).is_some() {
        return Err(RadiusError::NoSignChange(hi));
    }
    let mut steps = 0;
    while hi - lo > opts.tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if least_fixed_point(sys, mid, opts.max_newton).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    let s0 = least_fixed_point(sys, lo, opts.max_newton).ok_or(RadiusError::DivergentAtLeft(lo))?;

    let (mut r, mut s) = (lo, s0);
    for _ in 0..50 {
        let f1 = sys.eval(r, s) - s;
        let f2 = sys.eval_dw(r, s) - 1.0;
        if f1.abs() < 1e-15 && f2.abs() < 1e-15 {
            break;
        }
        let (a, b) = (sys.eval_dz(r, s), sys.eval_dw(r, s) - 1.0);
        let (c, d) = (sys.eval_dwz(r, s), sys.eval_dww(r, s));
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dr = (f1 * d - b * f2) / det;
        let ds = (a * f2 - c * f1) / det;
        r -= dr;
        s -= ds;
        if dr.abs() < 1e-17 && ds.abs() < 1e-17 {
            break;
        }
    }
    let residual_value = (sys.eval(r, s) - s).abs();
    let residual_slope = (sys.eval_dw(r, s) - 1.0).abs();
    // the polished root must stay at the bisection limit
    if !(residual_value <= RESIDUAL_TOL && residual_slope <= RESIDUAL_TOL) || (r - lo).abs() > 1e-8
    {
        return Err(RadiusError::PolishFailed {
            r,
            value: residual_value,
            slope: residual_slope,
        });
    }
    Ok(CharacteristicSolution {
        r,
        s,
        residual_value,
        residual_slope,
        bisection_steps: steps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusCertificate {
    #[serde(rename = "N")]
    pub order: usize,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub r_upper: f64,
    pub s_upper: f64,
    pub r_lower: f64,
    pub s_lower: f64,
    pub e: f64,
    pub b: f64,
    pub residuals: Residuals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub upper: [f64; 2],
    pub lower: [f64; 2],
}

impl RadiusCertificate {
    /// `rho_lo` rounded down to 4 decimals.
    pub fn lo_rounded_down(&self) -> f64 {
        (self.rho_lo * 1e4).floor() / 1e4
    }

    /// `rho_hi` rounded up to 4 decimals.
    pub fn hi_rounded_up(&self) -> f64 {
        (self.rho_hi * 1e4).ceil() / 1e4
    }

    /// Outward-rounded containment in `[lo, hi]` (both given to 4 decimals).
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        let scaled = |x: f64| (x * 1e4).round() as i64;
        (self.rho_lo * 1e4).floor() as i64 >= scaled(lo)
            && (self.rho_hi * 1e4).ceil() as i64 <= scaled(hi)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals
            .upper
            .iter()
            .chain(self.residuals.lower.iter())
            .fold(0.0, |m, &x| m.max(x))
    }
}

/// Truncates `T` at `order`, sizes the errors at `ρ̂`, and solves both
/// characteristic systems.
pub fn certify(order: usize) -> Result<RadiusCertificate, RadiusError> {
    if order < 20 || !order.is_multiple_of(2) {
        return Err(RadiusError::BadOrder(order));
    }
    let l = make_l(order);
    let (e, b) = constants(RHO_HAT, order)?;
    let upper = build_upper(&l, order);
    let lower = build_lower(&l, e, b, order)?;
    let (up, low) = rayon::join(
        || solve_characteristic(&upper, SolverOptions::default()),
        || solve_characteristic(&lower, SolverOptions::default()),
    );
    let (up, low) = (up?, low?);
    let cert = RadiusCertificate {
        order,
        rho_lo: low.r,
        rho_hi: up.r,
        r_upper: up.r,
        s_upper: up.s,
        r_lower: low.r,
        s_lower: low.s,
        e,
        b,
        residuals: Residuals {
            upper: [up.residual_value, up.residual_slope],
            lower: [low.residual_value, low.residual_slope],
        },
    };
    if cert.rho_lo > cert.rho_hi {
        return Err(RadiusError::Check(format!(
            "rho_lo {} exceeds rho_hi {}",
            cert.rho_lo, cert.rho_hi
        )));
    }
    Ok(cert)
}

/// `certify(order)` plus the outward-rounded check against
/// `[RHO_CHECK, RHO_HAT]`.
pub fn certify_interval(order: usize) -> Result<RadiusCertificate, RadiusError> {
    let cert = certify(order)?;
    if !cert.within(RHO_CHECK, RHO_HAT) {
        return Err(RadiusError::Check(format!(
            "[{}, {}] rounds outward to [{}, {}], not within [{RHO_CHECK}, {RHO_HAT}] (residuals {:e})",
            cert.rho_lo,
            cert.rho_hi,
            cert.lo_rounded_down(),
            cert.hi_rounded_up(),
            cert.max_residual()
        )));
    }
    Ok(cert)
}
