use num_complex::Complex64;
use regvar::asymptotics::{
    beck_partition, beck_riemann_sum, beurling_op, cocycle_residual_beurling,
    cocycle_residual_general, cocycle_residual_karamata, estimate_limit, eta_x,
    fit_kappa, general_op, goldie_sum, karamata_op, two_point_index, EstimationResult,
    LimitScheme, Outside, SampledFunction,
};
use regvar::haar::{
    beurling_convolution, character_eval, fourier_of_pullback, fourier_popa,
    haar_integrate, haar_interval_measure, mellin_of_pullback, mellin_popa, popa_convolution,
    Interval,
};
use regvar::kernels::{
    bg_residual, cj_residual, goldie_g_integral, goldie_g_integral_quadrature,
    goldie_ode_residual, kernel_eval, kernel_inverse, GoldieAux,
};
use regvar::popa::{
    circle, eta, from_multiplicative, inverse, leq, norm, power, to_log_scale,
    to_multiplicative,
};
use regvar::subadd::{
    additively_bounded_check, default_probe_sequence, heiberg_seneta_probe,
    prop5_sandwich_check, subadditivity_check, GridSpec, Spacing, SubaddReport,
};
use regvar::{Integral, KernelParams, PopaParam, PopaPoint, QuadratureSpec};

use crate::cli::{
    BeckCmd, Cli, CocycleArgs, CocycleKind, Command, EstimateCmd, GroupCmd, KernelCmd,
    KernelSel, Mode, SchemeArgs, SpacingArg, SubaddCmd, TransformCmd,
};
use crate::error::{CliError, CliResult};
use crate::format::{boolean, complex, num};
use crate::functions::{FnSpec, Tracked};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const TOL_ENV: &str = "REGVAR_TOL";

/// Everything a command prints. `unconverged` records numerical results that
/// were reported without meeting the tolerance.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub unconverged: bool,
}

impl Output {
    fn line(&mut self, s: impl AsRef<str>) {
        self.stdout.push_str(s.as_ref());
        self.stdout.push('\n');
    }

    fn note(&mut self, s: impl AsRef<str>) {
        self.stderr.push_str(s.as_ref());
        self.stderr.push('\n');
    }

    fn integral<T>(&mut self, what: &str, r: &Integral<T>) {
        if !r.converged {
            self.unconverged = true;
            self.note(format!(
                "warning: {what} did not converge (error estimate {}, {} segments)",
                num(r.error),
                r.subdivisions
            ));
        }
    }
}

struct Ctx {
    tol: f64,
    quad: QuadratureSpec,
}

fn resolve_tol(flag: Option<f64>) -> CliResult<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{TOL_ENV}='{s}' is not a number")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(CliError::Usage(format!("tolerance must be positive, got {tol}")))
    }
}

pub fn run(cli: &Cli) -> CliResult<Output> {
    let tol = resolve_tol(cli.global.tol)?;
    let quad = QuadratureSpec {
        abs_tol: tol,
        rel_tol: tol,
        truncation: cli.global.truncation,
        ..QuadratureSpec::default()
    };
    quad.validate()?;
    let ctx = Ctx { tol, quad };
    let mut out = Output::default();
    match &cli.command {
        Command::Group(c) => group(c, &mut out)?,
        Command::Transform(c) => transform(c, &ctx, &mut out)?,
        Command::Kernel(c) => kernel(c, &ctx, &mut out)?,
        Command::Estimate(c) => estimate(c, &ctx, &mut out)?,
        Command::Cocycle(c) => cocycle(c, &mut out)?,
        Command::Subadd(c) => subadd(c, &ctx, &mut out)?,
        Command::Beck(c) => beck(c, &mut out)?,
    }
    Ok(out)
}

fn point(rho: PopaParam, v: f64) -> CliResult<PopaPoint> {
    Ok(PopaPoint::new(rho, v)?)
}

fn group(c: &GroupCmd, out: &mut Output) -> CliResult<()> {
    let text = match *c {
        GroupCmd::Circle { ref rho, x, y } => num(circle(&point(rho.rho, x)?, &point(rho.rho, y)?)?.value()),
        GroupCmd::Inverse { ref rho, x } => num(inverse(&point(rho.rho, x)?)?.value()),
        GroupCmd::Norm { ref rho, x } => num(norm(&point(rho.rho, x)?)),
        GroupCmd::Power { ref rho, delta, n } => num(power(rho.rho, delta, n)?),
        GroupCmd::Eta { ref rho, t } => num(eta(rho.rho, t)?),
        GroupCmd::Leq { ref rho, x, y } => boolean(leq(&point(rho.rho, x)?, &point(rho.rho, y)?)?).to_string(),
        GroupCmd::ToMult { ref rho, x } => num(to_multiplicative(&point(rho.rho, x)?)),
        GroupCmd::FromMult { ref rho, v } => num(from_multiplicative(rho.rho, v)?.value()),
        GroupCmd::LogScale { ref rho, t } => num(to_log_scale(rho.rho, t)?),
    };
    out.line(text);
    Ok(())
}

fn load(spec: &FnSpec, rho: PopaParam, outside: Outside) -> CliResult<SampledFunction> {
    spec.load(rho, outside)
}

fn transform(c: &TransformCmd, ctx: &Ctx, out: &mut Output) -> CliResult<()> {
    let q = &ctx.quad;
    match c {
        TransformCmd::HaarMeasure { rho, lo, hi } => {
            out.line(num(haar_interval_measure(&Interval::new(*lo, *hi, rho.rho)?)));
        }
        TransformCmd::HaarIntegrate { rho, f, lo, hi } => {
            let f = load(f, rho.rho, Outside::Zero)?;
            let tf = Tracked::new(&f);
            let r = tf.check(haar_integrate(|t| tf.call(t), &Interval::new(*lo, *hi, rho.rho)?, q))?;
            out.integral("Haar integral", &r);
            out.line(num(r.value));
        }
        TransformCmd::Character { rho, gamma, u } => {
            out.line(complex(character_eval(rho.rho, *gamma, *u)?));
        }
        TransformCmd::Fourier { rho, gamma, f, pullback } => {
            let f = load(f, rho.rho, Outside::Zero)?;
            let tf = Tracked::new(&f);
            let r = if *pullback {
                tf.check(fourier_of_pullback(|x| tf.call(x), *gamma, q))?
            } else {
                tf.check(fourier_popa(|t| tf.call(t), rho.rho, *gamma, q))?
            };
            out.integral("Fourier transform", &r);
            out.line(complex(r.value));
        }
        TransformCmd::Mellin { rho, z, z_im, f, pullback } => {
            let f = load(f, rho.rho, Outside::Zero)?;
            let tf = Tracked::new(&f);
            let z = Complex64::new(*z, *z_im);
            let r = if *pullback {
                tf.check(mellin_of_pullback(|x| tf.call(x), z, q))?
            } else {
                tf.check(mellin_popa(|t| tf.call(t), rho.rho, z, q))?
            };
            out.integral("Mellin transform", &r);
            out.line(complex(r.value));
        }
        TransformCmd::Convolve { rho, f, g, x } => {
            let f = load(f, rho.rho, Outside::Zero)?;
            let g = load(g, rho.rho, Outside::Zero)?;
            let (tf, tg) = (Tracked::new(&f), Tracked::new(&g));
            let r = popa_convolution(|t| tf.call(t), |t| tg.call(t), &point(rho.rho, *x)?, q);
            let r = tg.check(tf.check(r))?;
            out.integral("convolution", &r);
            out.line(num(r.value));
        }
        TransformCmd::BeurlingConvolve { big_f, big_h, phi, x } => {
            let zero = PopaParam::Zero;
            let f = load(big_f, zero, Outside::Zero)?;
            let h = load(big_h, zero, Outside::Refuse)?;
            let phi = load(phi, zero, Outside::Refuse)?;
            let (tf, th, tp) = (Tracked::new(&f), Tracked::new(&h), Tracked::new(&phi));
            let r = beurling_convolution(|s| tf.call(s), |u| th.call(u), |v| tp.call(v), *x, q);
            let r = tp.check(th.check(tf.check(r)))?;
            out.integral("Beurling convolution", &r);
            out.line(num(r.value));
        }
    }
    Ok(())
}

fn kernel_params(k: &KernelSel) -> CliResult<KernelParams> {
    Ok(KernelParams::new(k.rho, k.sigma, k.kappa)?)
}

fn kernel(c: &KernelCmd, ctx: &Ctx, out: &mut Output) -> CliResult<()> {
    match c {
        KernelCmd::Eval { kernel, t } => out.line(num(kernel_eval(&kernel_params(kernel)?, *t)?)),
        KernelCmd::Inverse { kernel, z } => out.line(num(kernel_inverse(&kernel_params(kernel)?, *z)?)),
        KernelCmd::Residuals { kernel, u, v } => {
            let kp = kernel_params(kernel)?;
            let (rho, sigma) = (kp.rho, kp.sigma);
            let k = |t: f64| kernel_eval(&kp, t);
            let uv = circle(&point(rho, *u)?, &point(rho, *v)?)?.value();
            let sum = circle(&point(sigma, k(*u)?)?, &point(sigma, k(*v)?)?)?.value();
            out.line(format!("additivity={}", num(k(uv)? - sum)));
            if sigma != PopaParam::Infinity {
                // g = eta_sigma o K pairs K with the Beurling-Goldie equation
                let kf = |t: f64| k(t).unwrap_or(f64::NAN);
                let g = |t: f64| eta(sigma, kf(t)).unwrap_or(f64::NAN);
                out.line(format!("bg={}", num(bg_residual(kf, g, rho, *u, *v)?)));
                out.line(format!("cj={}", num(cj_residual(g, rho, *u, *v)?)));
            }
        }
        KernelCmd::GoldieG { rho, gamma, u, quadrature } => {
            let aux = GoldieAux::new(rho.rho, *gamma)?;
            let closed = goldie_g_integral(&aux, *u)?;
            if *quadrature {
                let r = goldie_g_integral_quadrature(&aux, *u, &ctx.quad)?;
                out.integral("quadrature", &r);
                out.line(format!("closed={}", num(closed)));
                out.line(format!("quadrature={}", num(r.value)));
            } else {
                out.line(num(closed));
            }
        }
        KernelCmd::Ode { rho, gamma, c1, kappa, u } => {
            let aux = GoldieAux::new(rho.rho, *gamma)?;
            out.line(num(goldie_ode_residual(&aux, *c1, *kappa, *u)?));
        }
    }
    Ok(())
}

fn scheme(s: &SchemeArgs, tol: f64) -> CliResult<LimitScheme> {
    let scheme = LimitScheme {
        x0: s.x0,
        ratio: s.ratio,
        max_steps: s.max_steps,
        tol,
        stability_window: s.window,
    };
    scheme.validate()?;
    Ok(scheme)
}

/// Runs the limit estimate; if a tabulated function runs out of range along
/// the grid, retries with the grid cut just before the failing step.
fn estimate_in_range<F>(mut op: F, scheme: &LimitScheme) -> regvar::Result<EstimationResult>
where
    F: FnMut(f64) -> regvar::Result<f64>,
{
    match estimate_limit(&mut op, scheme) {
        Err(regvar::Error::Evaluation { step, source, .. })
            if step >= 1 && matches!(*source, regvar::Error::OutOfRange { .. }) =>
        {
            estimate_limit(op, &LimitScheme { max_steps: step, ..*scheme })
        }
        other => other,
    }
}

fn require<'a>(f: &'a Option<FnSpec>, name: &str, mode: &str) -> CliResult<&'a FnSpec> {
    f.as_ref()
        .ok_or_else(|| CliError::Usage(format!("--{name} is required in {mode} mode")))
}

fn estimate(c: &EstimateCmd, ctx: &Ctx, out: &mut Output) -> CliResult<()> {
    match c {
        EstimateCmd::Kernel { mode, f, phi, h, t, rho, sigma, scheme: sa } => {
            let scheme = scheme(sa, ctx.tol)?;
            let base = rho.unwrap_or(PopaParam::Zero);
            let refuse = Outside::Refuse;
            let f = load(f, base, refuse)?;
            let identity = SampledFunction::rule(|x| x);
            let (phi, h) = match mode {
                Mode::Karamata => (None, None),
                Mode::Bkdh => (None, Some(load(require(h, "h", "bkdh")?, base, refuse)?)),
                Mode::Beurling => (Some(load(require(phi, "phi", "beurling")?, base, refuse)?), None),
                Mode::General => (
                    Some(load(require(phi, "phi", "general")?, base, refuse)?),
                    Some(load(require(h, "h", "general")?, base, refuse)?),
                ),
            };

            // the index of the auxiliary function fixes the default domain group
            let rho_hat = match &phi {
                Some(phi) => {
                    let r = estimate_in_range(|x| eta_x(phi, 1.0, x), &scheme)?;
                    let rho_hat = r.value - 1.0;
                    out.note(format!("rho_hat={} converged={}", num(rho_hat), boolean(r.converged)));
                    if !r.converged {
                        out.unconverged = true;
                    }
                    Some(rho_hat)
                }
                None => None,
            };
            let default_rho = match (mode, rho_hat) {
                (Mode::Karamata | Mode::Bkdh, _) => PopaParam::Infinity,
                (_, Some(r)) => PopaParam::new(r.max(0.0))?,
                (_, None) => unreachable!("phi is required in beurling and general modes"),
            };
            let default_sigma = match mode {
                Mode::Karamata | Mode::Beurling => PopaParam::Infinity,
                Mode::Bkdh | Mode::General => PopaParam::Zero,
            };

            out.line("t,k_hat,converged");
            let mut samples = Vec::new();
            for &ti in t {
                let r = match mode {
                    Mode::Karamata => estimate_in_range(|x| karamata_op(&f, ti, x), &scheme),
                    Mode::Bkdh => {
                        let h = h.as_ref().expect("loaded above");
                        estimate_in_range(|x| general_op(&f, &identity, h, ti - 1.0, x), &scheme)
                    }
                    Mode::Beurling => {
                        let phi = phi.as_ref().expect("loaded above");
                        estimate_in_range(|x| beurling_op(&f, phi, ti, x), &scheme)
                    }
                    Mode::General => {
                        let (phi, h) = (phi.as_ref().expect("loaded above"), h.as_ref().expect("loaded above"));
                        estimate_in_range(|x| general_op(&f, phi, h, ti, x), &scheme)
                    }
                };
                match r {
                    Ok(r) => {
                        out.line(format!("{},{},{}", num(ti), num(r.value), boolean(r.converged)));
                        if !r.converged {
                            out.unconverged = true;
                        }
                        samples.push((ti, r.value));
                    }
                    Err(e) => {
                        out.line(format!("{},NaN,false", num(ti)));
                        out.note(format!("t={}: {e}", num(ti)));
                        out.unconverged = true;
                    }
                }
            }
            let fit_rho = rho.unwrap_or(default_rho);
            let fit_sigma = sigma.unwrap_or(default_sigma);
            match fit_kappa(&samples, fit_rho, fit_sigma) {
                Ok(fit) => out.note(format!(
                    "kappa={} rms={} (rho={fit_rho}, sigma={fit_sigma})",
                    num(fit.kappa),
                    num(fit.rms_residual)
                )),
                Err(e) => out.note(format!("kappa unavailable: {e}")),
            }
        }
        EstimateCmd::TwoPoint { lambda1, g1, lambda2, g2 } => {
            let r = two_point_index(*lambda1, *g1, *lambda2, *g2, ctx.tol)?;
            if r.consistent {
                out.line(format!("rho={} consistent", num(r.rho)));
            } else {
                out.line(format!(
                    "rho={} inconsistent rho1={} rho2={}",
                    num(r.rho),
                    num(r.rho1),
                    num(r.rho2)
                ));
            }
            if let Some((p, q)) = r.rational_ratio {
                out.note(format!(
                    "warning: log({}) / log({}) = {p}/{q} is rational; two such points do not determine the kernel",
                    num(*lambda1),
                    num(*lambda2)
                ));
            }
        }
        EstimateCmd::EtaRho { phi, t, scheme: sa } => {
            let scheme = scheme(sa, ctx.tol)?;
            let phi = load(phi, PopaParam::Zero, Outside::Refuse)?;
            if *t == 0.0 || !t.is_finite() {
                return Err(CliError::Usage("--t must be finite and non-zero".into()));
            }
            let r = estimate_in_range(|x| eta_x(&phi, *t, x), &scheme)?;
            let r = EstimationResult {
                value: (r.value - 1.0) / t,
                ..r
            };
            if !r.converged {
                out.unconverged = true;
            }
            out.line(format!("rho={} converged={}", num(r.value), boolean(r.converged)));
        }
    }
    Ok(())
}

fn cocycle(c: &CocycleArgs, out: &mut Output) -> CliResult<()> {
    let zero = PopaParam::Zero;
    let f = load(&c.f, zero, Outside::Refuse)?;
    let r = match c.kind {
        CocycleKind::Karamata => cocycle_residual_karamata(&f, c.s, c.t, c.x)?,
        CocycleKind::Beurling => {
            let phi = load(require(&c.phi, "phi", "beurling")?, zero, Outside::Refuse)?;
            cocycle_residual_beurling(&f, &phi, c.s, c.t, c.x)?
        }
        CocycleKind::General => {
            let phi = load(require(&c.phi, "phi", "general")?, zero, Outside::Refuse)?;
            let h = load(require(&c.h, "h", "general")?, zero, Outside::Refuse)?;
            cocycle_residual_general(&f, &phi, &h, c.s, c.t, c.x)?
        }
    };
    out.line(num(r));
    Ok(())
}

fn report(out: &mut Output, r: &SubaddReport) {
    out.line(format!("holds={}", boolean(r.holds)));
    out.line(format!("worst_violation={}", num(r.worst_violation)));
    out.line(format!("worst_pair={},{}", num(r.worst_pair.0), num(r.worst_pair.1)));
    out.line(format!("pairs_checked={}", r.pairs_checked));
    out.line(format!("pairs_skipped={}", r.pairs_skipped));
    out.line(format!("violations={}", r.violations));
}

fn subadd(c: &SubaddCmd, ctx: &Ctx, out: &mut Output) -> CliResult<()> {
    match c {
        SubaddCmd::Check { rho, sigma, f, lo, hi, n, spacing } => {
            let f = load(f, *rho, Outside::Refuse)?;
            let spacing = match spacing {
                SpacingArg::Linear => Spacing::Linear,
                SpacingArg::Geometric => Spacing::Geometric,
            };
            let grid = GridSpec::new(*lo, *hi, *n, spacing)?;
            let tf = Tracked::new(&f);
            let r = tf.check(subadditivity_check(|x| tf.call(x), *rho, *sigma, &grid, ctx.tol))?;
            report(out, &r);
        }
        SubaddCmd::Bounded { kernel, f, samples } => {
            let kp = kernel_params(kernel)?;
            let f = load(f, kp.rho, Outside::Refuse)?;
            let tf = Tracked::new(&f);
            let r = tf.check(additively_bounded_check(|x| tf.call(x), &kp, samples, ctx.tol))?;
            report(out, &r);
        }
        SubaddCmd::Hs { f, sequence } => {
            let f = load(f, PopaParam::Zero, Outside::Refuse)?;
            let seq = sequence.clone().unwrap_or_else(default_probe_sequence);
            let tf = Tracked::new(&f);
            let r = tf.check(heiberg_seneta_probe(|u| tf.call(u), &seq, ctx.tol))?;
            out.line(format!("limsup={}", num(r.limsup_estimate)));
            out.line(format!("passes={}", boolean(r.passes)));
        }
        SubaddCmd::Sandwich { rho, sigma, f, a, b, delta, m, probes } => {
            let f = load(f, *rho, Outside::Refuse)?;
            let tf = Tracked::new(&f);
            let r = tf.check(prop5_sandwich_check(|x| tf.call(x), *rho, *sigma, *a, *b, *delta, *m, *probes))?;
            out.line(format!("holds={}", boolean(r.holds)));
            out.line(format!("premise_holds={}", boolean(r.premise_holds)));
            out.line(format!("worst_violation={}", num(r.worst_violation)));
            out.line(format!("lower={}", num(r.lower)));
            out.line(format!("upper={}", num(r.upper)));
            if !r.premise_holds {
                out.note("warning: S <= M fails on B_delta(a); the check is vacuous");
            }
        }
    }
    Ok(())
}

fn beck(c: &BeckCmd, out: &mut Output) -> CliResult<()> {
    match c {
        BeckCmd::Partition { rho, delta, u } => {
            for p in beck_partition(rho.rho, *delta, *u)?.points {
                out.line(num(p));
            }
        }
        BeckCmd::Sum { rho, delta, u, g } => {
            let g = load(g, rho.rho, Outside::Refuse)?;
            let tg = Tracked::new(&g);
            out.line(num(tg.check(beck_riemann_sum(|t| tg.call(t), rho.rho, *delta, *u))?));
        }
        BeckCmd::GoldieSum { rho, delta, i, k_delta, g } => {
            let g = load(g, rho.rho, Outside::Refuse)?;
            let tg = Tracked::new(&g);
            out.line(num(tg.check(goldie_sum(*k_delta, |t| tg.call(t), rho.rho, *delta, *i))?));
        }
    }
    Ok(())
}
