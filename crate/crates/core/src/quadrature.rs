//! Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//!
//! Complex-valued throughout; real integrands go through [`integrate_real`].
//! Refinement always bisects the segment with the largest error estimate,
//! breaking ties by position, so results do not depend on anything but the
//! integrand and the [`QuadratureSpec`].

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and truncation for improper Haar integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Half-width `T` of the log-scale window `[-T, T]`.
    pub truncation: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
            truncation: 30.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(tol: f64) -> Self {
        QuadratureSpec {
            abs_tol: tol,
            rel_tol: tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("max_subdivisions must be at least 1"));
        }
        if !(self.truncation > 0.0 && self.truncation.is_finite()) {
            return Err(Error::invalid("truncation must be positive and finite"));
        }
        Ok(())
    }
}

/// Outcome of a quadrature. A non-converged result still carries the best
/// estimate and its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
    pub subdivisions: usize,
}

impl<T> Integral<T> {
    pub(crate) fn map<U>(self, f: impl FnOnce(T) -> U) -> Integral<U> {
        Integral {
            value: f(self.value),
            error: self.error,
            converged: self.converged,
            subdivisions: self.subdivisions,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (plus the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx)? + f(centre + dx)?;
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite {
            at: centre,
            value: f64::NAN,
        });
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
    })
}

/// Integrates `f` over `[a, b]`, starting from `pieces` equal segments.
pub fn integrate_complex<F>(
    mut f: F,
    a: f64,
    b: f64,
    pieces: usize,
    spec: &QuadratureSpec,
) -> Result<Integral<Complex64>>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration bounds must be finite"));
    }
    if a == b {
        return Ok(Integral {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            converged: true,
            subdivisions: 0,
        });
    }
    let pieces = pieces.clamp(1, spec.max_subdivisions);
    let width = (b - a) / pieces as f64;
    let mut segments = Vec::with_capacity(pieces * 2);
    for k in 0..pieces {
        let lo = a + width * k as f64;
        let hi = if k + 1 == pieces { b } else { a + width * (k + 1) as f64 };
        segments.push(gk15(&mut f, lo, hi)?);
    }

    loop {
        let value: Complex64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let target = spec.abs_tol.max(spec.rel_tol * value.norm());
        if error <= target || segments.len() >= spec.max_subdivisions {
            return Ok(Integral {
                value,
                error,
                converged: error <= target,
                subdivisions: segments.len(),
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                if s.error > be {
                    (i, s.error)
                } else {
                    (bi, be)
                }
            });
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // segment cannot be split further in double precision
            return Ok(Integral {
                value,
                error,
                converged: false,
                subdivisions: segments.len(),
            });
        }
        let left = gk15(&mut f, seg.a, mid)?;
        let right = gk15(&mut f, mid, seg.b)?;
        segments[worst] = left;
        segments.insert(worst + 1, right);
    }
}

pub fn integrate_real<F>(
    mut f: F,
    a: f64,
    b: f64,
    pieces: usize,
    spec: &QuadratureSpec,
) -> Result<Integral<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_complex(|x| f(x).map(|v| Complex64::new(v, 0.0)), a, b, pieces, spec)
        .map(|r| r.map(|v| v.re))
}
