//! Scalar phi-functions and the Fourier symbols of the dispersive operators.
//!
//! `phi0 = exp`, `phi1(z) = (e^z - 1)/z`, `phi2(z) = (phi1(z) - 1)/z` and
//! `psi2(z) = (e^z - phi1(z))/z`, all extended continuously to `z = 0`.
//! Equivalently `phi1(z) = int_0^1 e^{sz} ds` and `psi2(z) = int_0^1 s e^{sz} ds`.

use num_complex::Complex64;

use crate::error::{KgzError, Result};
use crate::spectral_core::{Multiplier, TorusGrid};

/// Below this modulus the phi-functions switch to their Taylor polynomials.
pub const TAYLOR_THRESHOLD: f64 = 1e-2;
const TAYLOR_DEGREE: usize = 10;

/// Divided differences with `|a - b|` below this use the contour formula.
const QUOTIENT_SPLIT: f64 = 0.5;
const CONTOUR_NODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhiKind {
    Phi0,
    Phi1,
    Phi2,
    Psi2,
}

/// `e^z - 1` without cancellation for small `z`.
fn exp_m1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

/// `sum_j coef(j) z^j` for `j = 0..=TAYLOR_DEGREE` by Horner's rule.
fn taylor(z: Complex64, coef: impl Fn(usize) -> f64) -> Complex64 {
    (0..=TAYLOR_DEGREE)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, j| acc * z + coef(j))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < TAYLOR_THRESHOLD {
        taylor(z, |j| 1.0 / factorial(j + 1))
    } else {
        exp_m1(z) / z
    }
}

pub fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < TAYLOR_THRESHOLD {
        taylor(z, |j| 1.0 / factorial(j + 2))
    } else {
        (phi1(z) - 1.0) / z
    }
}

pub fn psi2(z: Complex64) -> Complex64 {
    if z.norm() < TAYLOR_THRESHOLD {
        taylor(z, |j| (j + 1) as f64 / factorial(j + 2))
    } else {
        // e^z - phi1(z) = (e^z - 1) - (phi1(z) - 1)
        (exp_m1(z) - (phi1(z) - 1.0)) / z
    }
}

pub fn phi(kind: PhiKind, z: Complex64) -> Complex64 {
    match kind {
        PhiKind::Phi0 => z.exp(),
        PhiKind::Phi1 => phi1(z),
        PhiKind::Phi2 => phi2(z),
        PhiKind::Psi2 => psi2(z),
    }
}

/// The divided difference `(phi1(a) - phi1(b)) / (a - b)`, continuous across `a = b`.
///
/// Close arguments are handled by the Cauchy integral over a unit circle
/// around the midpoint, where the trapezoidal rule converges geometrically.
pub fn phi1_divided_difference(a: Complex64, b: Complex64) -> Complex64 {
    let h = a - b;
    if h.norm() >= QUOTIENT_SPLIT {
        return (phi1(a) - phi1(b)) / h;
    }
    let m = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..CONTOUR_NODES {
        let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / CONTOUR_NODES as f64;
        let w = Complex64::from_polar(1.0, theta);
        let t = m + w;
        acc += phi1(t) * w / ((t - a) * (t - b));
    }
    acc / CONTOUR_NODES as f64
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Cancellation-free `c sqrt(c^2 + k^2) - c^2`.
pub fn a_c(c: f64, k: f64) -> f64 {
    c * k * k / (c + (c * c + k * k).sqrt())
}

/// Fourier symbols used by the schemes, as functions of the wavenumber.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolSpec {
    /// A constant symbol.
    Constant(Complex64),
    /// `sqrt(k^2 + c^2)`.
    BracketC { c: f64 },
    /// `|k|`.
    Bracket0,
    /// `-k^2`.
    Laplace,
    /// `c sqrt(k^2 + c^2) - c^2`.
    Ac { c: f64 },
    /// `c sqrt(k^2 + c^2)`.
    CBracketC { c: f64 },
    /// `c sqrt(k^2 + c^2) + c^2`.
    CBracketCPlusC2 { c: f64 },
    /// `exp(i t c sqrt(k^2 + c^2))`.
    ExpITCBracket { c: f64, t: f64 },
    /// `cos(t |k|)`.
    Cos0 { t: f64 },
    /// `sin(t |k|)`.
    Sin0 { t: f64 },
    /// `sinc(t |k|)`.
    Sinc0 { t: f64 },
    /// `t sinc(t |k|)`, the regular form of `sin(t|k|)/|k|`.
    TSinc0 { t: f64 },
    /// `|k| sin(t |k|)`.
    Bracket0Sin0 { t: f64 },
    /// `1 / (k^2 + c^2)`.
    InvBracketCSq { c: f64 },
    /// `c / sqrt(k^2 + c^2)`.
    CInvBracketC { c: f64 },
    /// `sinc(t k^2 / 2)`, the filter of the second-order scheme.
    SincHalfLaplace { t: f64 },
    /// `phi(kind, scale * base(k))`.
    Phi {
        kind: PhiKind,
        scale: Complex64,
        base: Box<SymbolSpec>,
    },
    /// `phi1[a_scale a_base(k), b_scale b_base(k)]`, a divided difference of phi1.
    Phi1Quotient {
        a_scale: Complex64,
        a_base: Box<SymbolSpec>,
        b_scale: Complex64,
        b_base: Box<SymbolSpec>,
    },
}

impl SymbolSpec {
    fn validate(&self) -> Result<()> {
        let check_c = |c: f64| {
            if c.is_finite() && c >= 1.0 {
                Ok(())
            } else {
                Err(KgzError::Parameter(format!("plasma frequency must be >= 1, got {c}")))
            }
        };
        let check_t = |t: f64| {
            if t.is_finite() {
                Ok(())
            } else {
                Err(KgzError::Parameter(format!("time parameter must be finite, got {t}")))
            }
        };
        match self {
            Self::Constant(v) if !(v.re.is_finite() && v.im.is_finite()) => {
                Err(KgzError::Parameter("constant symbol must be finite".into()))
            }
            Self::Constant(_) | Self::Bracket0 | Self::Laplace => Ok(()),
            Self::BracketC { c }
            | Self::Ac { c }
            | Self::CBracketC { c }
            | Self::CBracketCPlusC2 { c }
            | Self::InvBracketCSq { c }
            | Self::CInvBracketC { c } => check_c(*c),
            Self::ExpITCBracket { c, t } => {
                check_c(*c)?;
                check_t(*t)
            }
            Self::Cos0 { t }
            | Self::Sin0 { t }
            | Self::Sinc0 { t }
            | Self::TSinc0 { t }
            | Self::Bracket0Sin0 { t }
            | Self::SincHalfLaplace { t } => check_t(*t),
            Self::Phi { scale, base, .. } => {
                if !(scale.re.is_finite() && scale.im.is_finite()) {
                    return Err(KgzError::Parameter("phi scale must be finite".into()));
                }
                base.validate()
            }
            Self::Phi1Quotient {
                a_scale,
                a_base,
                b_scale,
                b_base,
            } => {
                for s in [a_scale, b_scale] {
                    if !(s.re.is_finite() && s.im.is_finite()) {
                        return Err(KgzError::Parameter("quotient scale must be finite".into()));
                    }
                }
                a_base.validate()?;
                b_base.validate()
            }
        }
    }

    /// Symbol value at wavenumber `k`. Parameters are assumed valid.
    pub fn eval(&self, k: f64) -> Complex64 {
        let re = |v: f64| Complex64::new(v, 0.0);
        let k0 = k.abs();
        match self {
            Self::Constant(v) => *v,
            Self::BracketC { c } => re((k * k + c * c).sqrt()),
            Self::Bracket0 => re(k0),
            Self::Laplace => re(-k * k),
            Self::Ac { c } => re(a_c(*c, k)),
            Self::CBracketC { c } => re(c * (k * k + c * c).sqrt()),
            Self::CBracketCPlusC2 { c } => re(c * (k * k + c * c).sqrt() + c * c),
            Self::ExpITCBracket { c, t } => Complex64::from_polar(1.0, t * c * (k * k + c * c).sqrt()),
            Self::Cos0 { t } => re((t * k0).cos()),
            Self::Sin0 { t } => re((t * k0).sin()),
            Self::Sinc0 { t } => re(sinc(t * k0)),
            Self::TSinc0 { t } => re(t * sinc(t * k0)),
            Self::Bracket0Sin0 { t } => re(k0 * (t * k0).sin()),
            Self::InvBracketCSq { c } => re(1.0 / (k * k + c * c)),
            Self::CInvBracketC { c } => re(c / (k * k + c * c).sqrt()),
            Self::SincHalfLaplace { t } => re(sinc(0.5 * t * k * k)),
            Self::Phi { kind, scale, base } => phi(*kind, scale * base.eval(k)),
            Self::Phi1Quotient {
                a_scale,
                a_base,
                b_scale,
                b_base,
            } => phi1_divided_difference(a_scale * a_base.eval(k), b_scale * b_base.eval(k)),
        }
    }
}

/// Tabulates `spec` on the wavenumbers of `grid`.
pub fn build_multiplier(spec: &SymbolSpec, grid: &TorusGrid) -> Result<Multiplier> {
    spec.validate()?;
    Ok(Multiplier::from_symbol(grid, |k| spec.eval(k)))
}

/// The multiplier `phi(kind, scale * base(k))`.
pub fn phi_of_operator(
    kind: PhiKind,
    scale: Complex64,
    base: &SymbolSpec,
    grid: &TorusGrid,
) -> Result<Multiplier> {
    build_multiplier(
        &SymbolSpec::Phi {
            kind,
            scale,
            base: Box::new(base.clone()),
        },
        grid,
    )
}
