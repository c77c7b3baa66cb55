//! Haar measure, characters, Fourier/Mellin transforms and convolutions on
//! the Popa groups.
//!
//! The normalized Haar measure of `G_rho` has density `(1 + rho) / (1 + rho t)`
//! against Lebesgue measure (Lebesgue itself for `rho = 0`, `dt/t` for
//! `rho = inf`). Under the log-scale map `w = log eta_rho(t)` it becomes
//! `haar_scale * dw`, so every integral here is evaluated as an ordinary
//! Lebesgue integral in `w`, truncated to `[-T, T]` when the range is infinite.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::popa::{
    circle_unchecked, from_log_scale_unchecked, log_scale_unchecked, PopaParam, PopaPoint,
};
use crate::quadrature::{integrate_complex, integrate_real, Integral, QuadratureSpec};

pub type ComplexValue = Complex64;

/// Open interval `(lo, hi)` of `G_param`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
    param: PopaParam,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, param: PopaParam) -> Result<Self> {
        param.require(lo)?;
        param.require(hi)?;
        if !(lo < hi) {
            return Err(Error::invalid(format!("interval needs lo < hi, got ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi, param })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn param(&self) -> PopaParam {
        self.param
    }

    /// The translate `g o (lo, hi) = (g o lo, g o hi)`.
    pub fn translate(&self, g: &PopaPoint) -> Result<Interval> {
        if g.param() != self.param {
            return Err(Error::ParamMismatch {
                left: g.param(),
                right: self.param,
            });
        }
        let g = g.value();
        Interval::new(
            circle_unchecked(self.param, g, self.lo),
            circle_unchecked(self.param, g, self.hi),
            self.param,
        )
    }

    fn log_bounds(&self) -> (f64, f64) {
        (
            log_scale_unchecked(self.param, self.lo),
            log_scale_unchecked(self.param, self.hi),
        )
    }
}

/// Closed-form Haar measure of an interval.
pub fn haar_interval_measure(iv: &Interval) -> f64 {
    let width = iv.hi - iv.lo;
    // log of eta(hi) / eta(lo), without cancelling two nearby logarithms
    match iv.param {
        PopaParam::Zero => width,
        PopaParam::Finite(rho) => iv.param.haar_scale() * (rho * width / (1.0 + rho * iv.lo)).ln_1p(),
        PopaParam::Infinity => (width / iv.lo).ln_1p(),
    }
}

/// Initial segment count over a window of length `len`: one per oscillation
/// period and at least four per unit, so narrow compact features are not
/// stepped over by the initial Kronrod nodes.
fn oscillation_pieces(freq: f64, len: f64, spec: &QuadratureSpec) -> usize {
    let periods = (freq.abs() * len / (2.0 * PI)).ceil().max((4.0 * len).ceil());
    let cap = (spec.max_subdivisions / 2).max(1);
    if periods.is_finite() {
        (periods as usize).clamp(1, cap)
    } else {
        cap
    }
}

/// `int_iv f d(eta_G)`, integrated in the log scale.
pub fn haar_integrate<F>(f: F, iv: &Interval, q: &QuadratureSpec) -> Result<Integral<f64>>
where
    F: Fn(f64) -> f64,
{
    let param = iv.param;
    let scale = param.haar_scale();
    let (wl, wh) = iv.log_bounds();
    integrate_real(
        |w| {
            let t = from_log_scale_unchecked(param, w);
            finite(f(t), t).map(|v| v * scale)
        },
        wl,
        wh,
        1,
        q,
    )
}

fn finite(v: f64, at: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at, value: v })
    }
}

/// Character `u -> exp(i gamma log eta_rho(u))`; `exp(i gamma u)` on `G_0`.
pub fn character_eval(param: PopaParam, gamma: f64, u: f64) -> Result<ComplexValue> {
    param.require(u)?;
    Ok(Complex64::new(0.0, gamma * log_scale_unchecked(param, u)).exp())
}

/// The pullback `f_rho(t) = ((1 + rho) / rho) f((t - 1) / rho)` on `(0, inf)`.
pub fn pullback_f_rho<F>(f: F, param: PopaParam) -> Result<impl Fn(f64) -> f64>
where
    F: Fn(f64) -> f64,
{
    let rho = match param.check()? {
        PopaParam::Finite(rho) => rho,
        other => {
            return Err(Error::InvalidParam(format!(
                "pullback needs a finite positive rho, got {other}"
            )))
        }
    };
    let scale = (1.0 + rho) / rho;
    Ok(move |t: f64| scale * f((t - 1.0) / rho))
}

/// Fourier transform of a function already expressed on `(R_+, x)`:
/// `int_0^inf fr(t) t^{-i gamma} dt/t = int fr(e^w) e^{-i gamma w} dw`.
pub fn fourier_of_pullback<F>(fr: F, gamma: f64, q: &QuadratureSpec) -> Result<Integral<ComplexValue>>
where
    F: Fn(f64) -> f64,
{
    let t = q.truncation;
    let pieces = oscillation_pieces(gamma, 2.0 * t, q);
    integrate_complex(
        |w| {
            let x = w.exp();
            let v = finite(fr(x), x)?;
            Ok(Complex64::new(0.0, -gamma * w).exp() * v)
        },
        -t,
        t,
        pieces,
        q,
    )
}

/// Fourier-Popa transform `int f(u) gamma(-_rho u) d(eta_G)(u)`.
///
/// For finite `rho` this is the ordinary Fourier transform of `w -> f_rho(e^w)`;
/// `Zero` and `Infinity` give the classical transforms on `(R, +)` and `(R_+, x)`.
pub fn fourier_popa<F>(
    f: F,
    param: PopaParam,
    gamma: f64,
    q: &QuadratureSpec,
) -> Result<Integral<ComplexValue>>
where
    F: Fn(f64) -> f64,
{
    param.check()?;
    let scale = param.haar_scale();
    fourier_of_pullback(
        |x| scale * f(from_log_scale_unchecked(param, x.ln())),
        gamma,
        q,
    )
}

/// Mellin transform `int_0^inf fr(t) t^{-z} dt/t` of a function on `(R_+, x)`.
pub fn mellin_of_pullback<F>(fr: F, z: ComplexValue, q: &QuadratureSpec) -> Result<Integral<ComplexValue>>
where
    F: Fn(f64) -> f64,
{
    let t = q.truncation;
    let pieces = oscillation_pieces(z.im, 2.0 * t, q);
    integrate_complex(
        |w| {
            let x = w.exp();
            let v = finite(fr(x), x)?;
            let kernel = (-z * w).exp();
            let out = kernel * v;
            if out.re.is_finite() && out.im.is_finite() {
                Ok(out)
            } else {
                Err(Error::NonFinite { at: x, value: f64::INFINITY })
            }
        },
        -t,
        t,
        pieces,
        q,
    )
}

/// Mellin transform of the pullback `f_rho` of `f: G_rho -> R`.
pub fn mellin_popa<F>(
    f: F,
    param: PopaParam,
    z: ComplexValue,
    q: &QuadratureSpec,
) -> Result<Integral<ComplexValue>>
where
    F: Fn(f64) -> f64,
{
    let fr = pullback_f_rho(f, param)?;
    mellin_of_pullback(fr, z, q)
}

/// Convolution on the Popa group: `int f(-_rho t) g(x +_rho t) d(eta_G)(t)`.
pub fn popa_convolution<F, G>(f: F, g: G, x: &PopaPoint, q: &QuadratureSpec) -> Result<Integral<f64>>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let param = x.param();
    let scale = param.haar_scale();
    let wx = log_scale_unchecked(param, x.value());
    let t = q.truncation;
    integrate_real(
        |w| {
            let minus_t = from_log_scale_unchecked(param, -w);
            let fv = finite(f(minus_t), minus_t)?;
            if fv == 0.0 {
                return Ok(0.0);
            }
            let shifted = from_log_scale_unchecked(param, wx + w);
            Ok(scale * fv * finite(g(shifted), shifted)?)
        },
        -t,
        t,
        oscillation_pieces(0.0, 2.0 * t, q),
        q,
    )
}

/// Beurling convolution `int F(-t) H(x + t phi(x)) dt` over `t in [-T, T]`.
///
/// `H` is only evaluated where `F(-t)` is non-zero.
pub fn beurling_convolution<F, H, P>(
    big_f: F,
    big_h: H,
    phi: P,
    x: f64,
    q: &QuadratureSpec,
) -> Result<Integral<f64>>
where
    F: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let scale = phi(x);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::NonPositive {
            what: "phi",
            at: x,
            value: scale,
        });
    }
    let t = q.truncation;
    integrate_real(
        |s| {
            let fv = finite(big_f(-s), -s)?;
            if fv == 0.0 {
                return Ok(0.0);
            }
            let u = x + s * scale;
            Ok(fv * finite(big_h(u), u)?)
        },
        -t,
        t,
        oscillation_pieces(0.0, 2.0 * t, q),
        q,
    )
}
