use clap::{Args, Parser, Subcommand, ValueEnum};
use regvar::PopaParam;

use crate::functions::FnSpec;

/// Popa-group arithmetic, Haar transforms, additive kernels and regular
/// variation estimates.
///
/// Group parameters are written "0", "inf" or a positive decimal. Put "--"
/// before negative positional operands.
#[derive(Debug, Parser)]
#[command(name = "regvar", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Convergence tolerance [default: $REGVAR_TOL or 1e-6]
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Exit with status 3 when a required limit or integral does not converge
    #[arg(long, global = true)]
    pub strict: bool,

    /// Half-width T of the log-scale integration window [-T, T]
    #[arg(long, global = true, default_value_t = 30.0)]
    pub truncation: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Popa group arithmetic
    #[command(subcommand)]
    Group(GroupCmd),
    /// Haar measure, characters and transforms
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Canonical additive kernels and the Goldie auxiliary function
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Limit kernels and indices of regular variation
    #[command(subcommand)]
    Estimate(EstimateCmd),
    /// Pre-limit cocycle residual of an asymptotic operator
    Cocycle(CocycleArgs),
    /// Subadditivity and boundedness checks
    #[command(subcommand)]
    Subadd(SubaddCmd),
    /// Beck partitions and sums
    #[command(subcommand)]
    Beck(BeckCmd),
}

#[derive(Debug, Args)]
pub struct Rho {
    /// Group parameter rho
    #[arg(long)]
    pub rho: PopaParam,
}

#[derive(Debug, Subcommand)]
pub enum GroupCmd {
    /// x o y
    Circle {
        #[command(flatten)]
        rho: Rho,
        x: f64,
        y: f64,
    },
    /// Group inverse of x
    Inverse {
        #[command(flatten)]
        rho: Rho,
        x: f64,
    },
    /// Group norm of x
    Norm {
        #[command(flatten)]
        rho: Rho,
        x: f64,
    },
    /// n-th power of delta
    Power {
        #[command(flatten)]
        rho: Rho,
        delta: f64,
        n: i64,
    },
    /// eta_rho(t) = 1 + rho t
    Eta {
        #[command(flatten)]
        rho: Rho,
        t: f64,
    },
    /// Whether x <= y
    Leq {
        #[command(flatten)]
        rho: Rho,
        x: f64,
        y: f64,
    },
    /// Image of x in the multiplicative group
    ToMult {
        #[command(flatten)]
        rho: Rho,
        x: f64,
    },
    /// Preimage of a positive v
    FromMult {
        #[command(flatten)]
        rho: Rho,
        v: f64,
    },
    /// Image of t in the additive group (log scale)
    LogScale {
        #[command(flatten)]
        rho: Rho,
        t: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum TransformCmd {
    /// Haar measure of the interval (lo, hi)
    HaarMeasure {
        #[command(flatten)]
        rho: Rho,
        lo: f64,
        hi: f64,
    },
    /// Haar integral of f over (lo, hi)
    HaarIntegrate {
        #[command(flatten)]
        rho: Rho,
        #[arg(long, help = crate::functions::BUILTIN_HELP)]
        f: FnSpec,
        lo: f64,
        hi: f64,
    },
    /// Character exp(i gamma log eta(u))
    Character {
        #[command(flatten)]
        rho: Rho,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        u: f64,
    },
    /// Fourier-Popa transform at gamma
    Fourier {
        #[command(flatten)]
        rho: Rho,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, help = crate::functions::BUILTIN_HELP)]
        f: FnSpec,
        /// Treat f as the pullback f_rho on (0, inf) rather than a function on the group
        #[arg(long)]
        pullback: bool,
    },
    /// Mellin transform at z = re + i im
    Mellin {
        #[command(flatten)]
        rho: Rho,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        z_im: f64,
        #[arg(long, help = crate::functions::BUILTIN_HELP)]
        f: FnSpec,
        /// Treat f as the pullback f_rho on (0, inf) rather than a function on the group
        #[arg(long)]
        pullback: bool,
    },
    /// Haar convolution (f * g)(x)
    Convolve {
        #[command(flatten)]
        rho: Rho,
        #[arg(long)]
        f: FnSpec,
        #[arg(long)]
        g: FnSpec,
        x: f64,
    },
    /// Beurling convolution int F(-s) H(x + s phi(x)) ds
    BeurlingConvolve {
        #[arg(long = "big-f")]
        big_f: FnSpec,
        #[arg(long = "big-h")]
        big_h: FnSpec,
        #[arg(long)]
        phi: FnSpec,
        x: f64,
    },
}

#[derive(Debug, Args)]
pub struct KernelSel {
    #[arg(long)]
    pub rho: PopaParam,
    #[arg(long)]
    pub sigma: PopaParam,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
}

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    /// K_kappa(t)
    Eval {
        #[command(flatten)]
        kernel: KernelSel,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Solve K_kappa(t) = z for t
    Inverse {
        #[command(flatten)]
        kernel: KernelSel,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Additivity and Beurling-Goldie residuals at (u, v)
    Residuals {
        #[command(flatten)]
        kernel: KernelSel,
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
        #[arg(long, allow_negative_numbers = true)]
        v: f64,
    },
    /// G(u) = int_0^u g(t) dt / eta(t) for g = eta^-gamma
    GoldieG {
        #[command(flatten)]
        rho: Rho,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
        /// Also evaluate by quadrature and print both
        #[arg(long)]
        quadrature: bool,
    },
    /// Residual of kappa g' = c1 g / eta at u
    Ode {
        #[command(flatten)]
        rho: Rho,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        c1: f64,
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// f(t x) / f(x), t a multiplier
    Karamata,
    /// [f(t x) - f(x)] / h(x), t a multiplier
    Bkdh,
    /// f(x + t phi(x)) / f(x)
    Beurling,
    /// [f(x + t phi(x)) - f(x)] / h(x)
    General,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// First grid point
    #[arg(long, default_value_t = 10.0)]
    pub x0: f64,
    /// Grid ratio
    #[arg(long, default_value_t = 2.0)]
    pub ratio: f64,
    /// Maximum number of grid points
    #[arg(long, default_value_t = 40)]
    pub max_steps: usize,
    /// Number of trailing values that must agree
    #[arg(long, default_value_t = 3)]
    pub window: usize,
}

#[derive(Debug, Subcommand)]
pub enum EstimateCmd {
    /// Per-t limit kernel as CSV, with a fitted index on stderr
    Kernel {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, help = crate::functions::BUILTIN_HELP)]
        f: FnSpec,
        /// Auxiliary function (beurling, general)
        #[arg(long)]
        phi: Option<FnSpec>,
        /// Normalizer (bkdh, general)
        #[arg(long)]
        h: Option<FnSpec>,
        /// Comma-separated evaluation points
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        t: Vec<f64>,
        /// Domain group of the fitted kernel [default: by mode]
        #[arg(long)]
        rho: Option<PopaParam>,
        /// Codomain group of the fitted kernel [default: by mode]
        #[arg(long)]
        sigma: Option<PopaParam>,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Index from two ratio limits g_i = lim f(l_i x) / f(x)
    TwoPoint {
        lambda1: f64,
        g1: f64,
        lambda2: f64,
        g2: f64,
    },
    /// rho in lim phi(x + t phi(x)) / phi(x) = 1 + rho t
    EtaRho {
        #[arg(long)]
        phi: FnSpec,
        /// Probe argument t
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CocycleKind {
    Karamata,
    Beurling,
    General,
}

#[derive(Debug, Args)]
pub struct CocycleArgs {
    #[arg(long, value_enum)]
    pub kind: CocycleKind,
    #[arg(long)]
    pub f: FnSpec,
    #[arg(long)]
    pub phi: Option<FnSpec>,
    #[arg(long)]
    pub h: Option<FnSpec>,
    #[arg(long, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long)]
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Linear,
    Geometric,
}

#[derive(Debug, Subcommand)]
pub enum SubaddCmd {
    /// S(x o_rho y) <= S(x) o_sigma S(y) over grid pairs
    Check {
        #[arg(long)]
        rho: PopaParam,
        #[arg(long)]
        sigma: PopaParam,
        #[arg(long)]
        f: FnSpec,
        #[arg(long, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, allow_negative_numbers = true)]
        hi: f64,
        #[arg(long, default_value_t = 51)]
        n: usize,
        #[arg(long, value_enum, default_value_t = SpacingArg::Linear)]
        spacing: SpacingArg,
    },
    /// S(t) <= K_kappa(t) on sample points
    Bounded {
        #[command(flatten)]
        kernel: KernelSel,
        #[arg(long)]
        f: FnSpec,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        samples: Vec<f64>,
    },
    /// lim sup of S at 0+ along a decreasing sequence
    Hs {
        #[arg(long)]
        f: FnSpec,
        /// Comma-separated, strictly decreasing [default: 2^-n, n = 1..40]
        #[arg(long, value_delimiter = ',')]
        sequence: Option<Vec<f64>>,
    },
    /// Propagation of S <= M from B_delta(a) to a two-sided bound on B_delta(b)
    Sandwich {
        #[arg(long)]
        rho: PopaParam,
        #[arg(long)]
        sigma: PopaParam,
        #[arg(long)]
        f: FnSpec,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, allow_negative_numbers = true)]
        m: f64,
        #[arg(long, default_value_t = 41)]
        probes: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum BeckCmd {
    /// Beck points delta^(0), ..., delta^(i) covering [identity, u]
    Partition {
        #[command(flatten)]
        rho: Rho,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        u: f64,
    },
    /// Riemann sum of g / eta over the Beck partition of [identity, u]
    Sum {
        #[command(flatten)]
        rho: Rho,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        g: FnSpec,
    },
    /// k_delta * sum_{m=1..i} g(delta^(m-1))
    GoldieSum {
        #[command(flatten)]
        rho: Rho,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        i: usize,
        #[arg(long, allow_negative_numbers = true)]
        k_delta: f64,
        #[arg(long)]
        g: FnSpec,
    },
}
