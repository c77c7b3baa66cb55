//! Canonical additive kernels `K_kappa: G_rho -> G_sigma`, the Goldie auxiliary
//! function and residuals of the Cauchy-type functional equations.

use crate::error::{Error, Result};
use crate::haar::{haar_integrate, Interval};
use crate::popa::{
    circle_unchecked, from_log_scale_unchecked, log_scale_unchecked, PopaParam,
};
use crate::quadrature::{Integral, QuadratureSpec};

/// Selects `K_kappa(t) = eta_sigma^{-1}(eta_rho(t)^kappa)`, with `exp`/`log`
/// standing in for `eta` at `rho = 0` or `sigma = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub rho: PopaParam,
    pub sigma: PopaParam,
    pub kappa: f64,
}

impl KernelParams {
    pub fn new(rho: PopaParam, sigma: PopaParam, kappa: f64) -> Result<Self> {
        rho.check()?;
        sigma.check()?;
        if !kappa.is_finite() {
            return Err(Error::invalid(format!("kappa must be finite, got {kappa}")));
        }
        Ok(KernelParams { rho, sigma, kappa })
    }
}

/// Evaluates the table cell selected by `(rho, sigma)`:
///
/// | | `sigma = 0` | `0 < sigma < inf` | `sigma = inf` |
/// |---|---|---|---|
/// | `rho = 0` | `kappa t` | `eta_sigma^{-1}(e^{kappa t})` | `e^{kappa t}` |
/// | `0 < rho < inf` | `kappa log eta_rho(t)` | `eta_sigma^{-1}(eta_rho(t)^kappa)` | `eta_rho(t)^kappa` |
/// | `rho = inf` | `kappa log t` | `eta_sigma^{-1}(t^kappa)` | `t^kappa` |
pub fn kernel_eval(kp: &KernelParams, t: f64) -> Result<f64> {
    kp.rho.require(t)?;
    kp.sigma.check()?;
    let w = kp.kappa * log_scale_unchecked(kp.rho, t);
    let z = from_log_scale_unchecked(kp.sigma, w);
    if kp.sigma.contains(z) {
        Ok(z)
    } else {
        Err(Error::invalid(format!(
            "K_kappa({t}) = {z} is not representable in G_{}",
            kp.sigma
        )))
    }
}

pub fn kernel_inverse(kp: &KernelParams, z: f64) -> Result<f64> {
    if kp.kappa == 0.0 {
        return Err(Error::NonInvertibleKernel);
    }
    kp.sigma.require(z)?;
    kp.rho.check()?;
    let t = from_log_scale_unchecked(kp.rho, log_scale_unchecked(kp.sigma, z) / kp.kappa);
    kp.rho.require(t)?;
    Ok(t)
}

fn circle_in_domain(rho: PopaParam, u: f64, v: f64) -> Result<f64> {
    rho.require(u)?;
    rho.require(v)?;
    let uv = circle_unchecked(rho, u, v);
    rho.require(uv)?;
    Ok(uv)
}

/// `K(u o v) - [g(v) K(u) + K(v)]`.
pub fn bg_residual<K, G>(k: K, g: G, rho: PopaParam, u: f64, v: f64) -> Result<f64>
where
    K: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let uv = circle_in_domain(rho, u, v)?;
    Ok(k(uv) - (g(v) * k(u) + k(v)))
}

/// `g(u o v) - g(u) g(v)`. With `g = eta_rho` this is the Golab-Schinzel residual.
pub fn cj_residual<G>(g: G, rho: PopaParam, u: f64, v: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let uv = circle_in_domain(rho, u, v)?;
    Ok(g(uv) - g(u) * g(v))
}

/// `K(t) = kappa (g(t) - 1)`; requires `g(0) = 1`.
pub fn prop6_k_from_g<G>(g: G, kappa: f64) -> Result<impl Fn(f64) -> f64>
where
    G: Fn(f64) -> f64,
{
    let g0 = g(0.0);
    if !((g0 - 1.0).abs() <= 1e-10) {
        return Err(Error::invalid(format!("g(0) must be 1, got {g0}")));
    }
    Ok(move |t: f64| kappa * (g(t) - 1.0))
}

/// The auxiliary function `g(t) = (1 + rho t)^{-gamma}` on a finite-`rho` group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldieAux {
    rho: f64,
    gamma: f64,
}

impl GoldieAux {
    pub fn new(rho: PopaParam, gamma: f64) -> Result<Self> {
        match rho.check()? {
            PopaParam::Finite(rho) if gamma.is_finite() => Ok(GoldieAux { rho, gamma }),
            PopaParam::Finite(_) => Err(Error::invalid(format!("gamma must be finite, got {gamma}"))),
            other => Err(Error::InvalidParam(format!(
                "Goldie auxiliary function needs finite positive rho, got {other}"
            ))),
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn param(&self) -> PopaParam {
        PopaParam::Finite(self.rho)
    }

    pub fn g(&self, t: f64) -> Result<f64> {
        self.param().require(t)?;
        Ok((-self.gamma * (self.rho * t).ln_1p()).exp())
    }

    /// `g'(t) = -gamma rho (1 + rho t)^{-gamma - 1}`.
    pub fn g_prime(&self, t: f64) -> Result<f64> {
        let g = self.g(t)?;
        Ok(-self.gamma * self.rho * g / (1.0 + self.rho * t))
    }
}

/// `G(u) = int_0^u g(t) dt / eta(t)` in closed form:
/// `[1 - (1 + rho u)^{-gamma}] / (gamma rho)`, or `log(1 + rho u) / rho` at `gamma = 0`.
pub fn goldie_g_integral(aux: &GoldieAux, u: f64) -> Result<f64> {
    aux.param().require(u)?;
    let l = (aux.rho * u).ln_1p();
    if aux.gamma == 0.0 {
        Ok(l / aux.rho)
    } else {
        Ok(-(-aux.gamma * l).exp_m1() / (aux.gamma * aux.rho))
    }
}

/// Quadrature route to [`goldie_g_integral`]: the Haar integral of `g / (1 + rho)`.
pub fn goldie_g_integral_quadrature(
    aux: &GoldieAux,
    u: f64,
    q: &QuadratureSpec,
) -> Result<Integral<f64>> {
    aux.param().require(u)?;
    if u == 0.0 {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            converged: true,
            subdivisions: 0,
        });
    }
    let (lo, hi, sign) = if u > 0.0 { (0.0, u, 1.0) } else { (u, 0.0, -1.0) };
    let iv = Interval::new(lo, hi, aux.param())?;
    let norm = 1.0 + aux.rho;
    let r = haar_integrate(|t| aux.g(t).unwrap_or(f64::NAN) / norm, &iv, q)?;
    Ok(r.map(|v| sign * v))
}

/// `kappa g'(u) - c1 g(u) / eta(u)`; vanishes iff `gamma = -c1 / (kappa rho)`.
pub fn goldie_ode_residual(aux: &GoldieAux, c1: f64, kappa: f64, u: f64) -> Result<f64> {
    if kappa == 0.0 {
        return Err(Error::invalid("kappa must be non-zero"));
    }
    let g = aux.g(u)?;
    let gp = aux.g_prime(u)?;
    Ok(kappa * gp - c1 * g / (1.0 + aux.rho * u))
}
