//! Parameters, state of the first-order-in-time reformulation, and the
//! benchmark initial data.
//!
//! The wave field `z` is replaced by the complex variable
//! `u = z - i (c <grad>_c)^{-1} dz/dt`, so that `z = Re u`. Its time
//! derivative `F` is carried as `G = (c <grad>_c)^{-1} F`.

use num_complex::Complex64;

use crate::error::{KgzError, Result};
use crate::oscillatory_kernels::{build_multiplier, SymbolSpec};
use crate::spectral_core::{
    apply_multiplier, pointwise_product_with, Multiplier, SpectralField, TorusGrid,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub c: f64,
    pub grid: TorusGrid,
    pub dealias: bool,
}

impl ModelParams {
    pub fn new(c: f64, grid: TorusGrid) -> Result<Self> {
        let p = Self {
            c,
            grid,
            dealias: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c >= 1.0) {
            return Err(KgzError::Parameter(format!(
                "plasma frequency must be >= 1, got {}",
                self.c
            )));
        }
        Ok(())
    }

    pub(crate) fn product(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        pointwise_product_with(f, g, self.dealias)
    }
}

/// Which integrator a state was prepared for; fixes the meaning of `s_f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeOrder {
    First,
    Second,
}

impl SchemeOrder {
    pub fn from_int(order: u32) -> Result<Self> {
        match order {
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            o => Err(KgzError::Parameter(format!("scheme order must be 1 or 2, got {o}"))),
        }
    }
}

/// One time slice `(u, G, n, dn/dt)` plus the running sum used to rebuild `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct KgzState {
    pub u: SpectralField,
    pub g: SpectralField,
    pub n: SpectralField,
    pub ndot: SpectralField,
    pub s_f: SpectralField,
    pub time: f64,
}

impl KgzState {
    pub fn grid(&self) -> &TorusGrid {
        self.u.grid()
    }

    /// `z = Re u`.
    pub fn z(&self) -> SpectralField {
        to_physical_z(&self.u)
    }

    pub fn is_finite(&self) -> bool {
        [&self.u, &self.g, &self.n, &self.ndot, &self.s_f]
            .iter()
            .all(|f| f.is_finite())
    }
}

/// The original variables `(z, dz/dt, n, dn/dt)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalState {
    pub z: SpectralField,
    pub zdot: SpectralField,
    pub n: SpectralField,
    pub ndot: SpectralField,
}

impl PhysicalState {
    pub fn grid(&self) -> &TorusGrid {
        self.z.grid()
    }

    pub fn zero(grid: TorusGrid) -> Self {
        let z = SpectralField::zeros(grid);
        Self {
            zdot: z.clone(),
            n: z.clone(),
            ndot: z.clone(),
            z,
        }
    }

    /// Builds the state from physical samples of the four fields.
    pub fn from_samples(
        grid: TorusGrid,
        z: &[f64],
        zdot: &[f64],
        n: &[f64],
        ndot: &[f64],
    ) -> Result<Self> {
        Ok(Self {
            z: SpectralField::from_real_samples(grid, z)?,
            zdot: SpectralField::from_real_samples(grid, zdot)?,
            n: SpectralField::from_real_samples(grid, n)?,
            ndot: SpectralField::from_real_samples(grid, ndot)?,
        })
    }

    fn check(&self, params: &ModelParams) -> Result<()> {
        for f in [&self.z, &self.zdot, &self.n, &self.ndot] {
            if *f.grid() != params.grid {
                return Err(KgzError::GridMismatch);
            }
        }
        Ok(())
    }
}

/// `u = z - i (c <grad>_c)^{-1} dz/dt`.
pub fn to_twisted(p: &PhysicalState, params: &ModelParams) -> Result<SpectralField> {
    params.validate()?;
    p.check(params)?;
    let c = params.c;
    let inv = Multiplier::from_symbol(&params.grid, |k| {
        Complex64::new(0.0, -1.0 / (c * (k * k + c * c).sqrt()))
    });
    p.z.add(&apply_multiplier(&inv, &p.zdot)?)
}

/// `z = (u + conj u) / 2`.
pub fn to_physical_z(u: &SpectralField) -> SpectralField {
    u.real_part()
}

/// Initial state for the first- or second-order scheme with step `tau`.
///
/// `G_0 = i u_0 + (i/2) <grad>_c^{-2} (n_0 (u_0 + conj u_0))`. The running sum
/// starts at `u_0` for the first-order scheme and at zero for the second-order
/// one, which keeps `u_0` separately.
pub fn initial_state(
    p: &PhysicalState,
    params: &ModelParams,
    tau: f64,
    order: SchemeOrder,
) -> Result<KgzState> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(KgzError::Parameter(format!("step size must be positive, got {tau}")));
    }
    let u = to_twisted(p, params)?;
    let grid = params.grid;
    let inv_sq = build_multiplier(&SymbolSpec::InvBracketCSq { c: params.c }, &grid)?;
    let re2 = u.add(&u.conj())?;
    let forcing = apply_multiplier(&inv_sq, &params.product(&p.n, &re2)?)?;
    let g = u
        .scale(Complex64::new(0.0, 1.0))
        .axpy(Complex64::new(0.0, 0.5), &forcing)?;
    let s_f = match order {
        SchemeOrder::First => u.clone(),
        SchemeOrder::Second => SpectralField::zeros(grid),
    };
    Ok(KgzState {
        u,
        g,
        n: p.n.real_part(),
        ndot: p.ndot.real_part(),
        s_f,
        time: 0.0,
    })
}

/// The benchmark data `z = sin x / (4 (2 - cos 2x))`, `dz/dt = c^2 z`,
/// `n = sin x cos x / (2 - sin 2x)`, `dn/dt = sin(x) / 2`.
pub fn benchmark_initial_data(grid: TorusGrid, c: f64) -> PhysicalState {
    let z = |x: f64| 0.25 * x.sin() / (2.0 - (2.0 * x).cos());
    PhysicalState {
        z: SpectralField::from_fn(grid, z),
        zdot: SpectralField::from_fn(grid, |x| c * c * z(x)),
        n: SpectralField::from_fn(grid, |x| x.sin() * x.cos() / (2.0 - (2.0 * x).sin())),
        ndot: SpectralField::from_fn(grid, |x| 0.5 * x.sin()),
    }
}
