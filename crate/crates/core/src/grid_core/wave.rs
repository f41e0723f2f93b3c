use num_complex::Complex;

use super::density::Density;
use super::fft;
use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::policy::NumericPolicy;
use crate::scalar::{from_usize, lit, sum, to_f64, Real};

/// Complex amplitudes on a grid with unit L2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction<T> {
    grid: GridSpec<T>,
    amps: Vec<Complex<T>>,
}

impl<T: Real> WaveFunction<T> {
    /// Rescales `amps` to unit norm.
    pub fn normalized(grid: GridSpec<T>, mut amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for a grid of {} points",
                amps.len(),
                grid.len()
            )));
        }
        let norm_sq = grid.dx() * sum(amps.iter().map(|a| a.norm_sqr()));
        if !(norm_sq > T::zero()) || !norm_sq.is_finite() {
            return Err(Error::NonNormalized(to_f64(norm_sq)));
        }
        let scale = T::one() / norm_sq.sqrt();
        for a in &mut amps {
            *a = *a * scale;
        }
        Ok(Self { grid, amps })
    }

    /// Samples an arbitrary amplitude function and normalizes.
    pub fn from_fn(grid: GridSpec<T>, f: impl Fn(T) -> Complex<T>) -> Result<Self> {
        let amps = grid.points().map(f).collect();
        Self::normalized(grid, amps)
    }

    /// All amplitude in the sample nearest to `x0`.
    pub fn spike(grid: GridSpec<T>, x0: T) -> Result<Self> {
        let i = grid.nearest_index(x0).ok_or(Error::SupportExceedsGrid {
            lo: to_f64(x0),
            hi: to_f64(x0),
            x_min: to_f64(grid.x_min()),
            x_max: to_f64(grid.x_max()),
        })?;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); grid.len()];
        amps[i] = Complex::new(T::one(), T::zero());
        Self::normalized(grid, amps)
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    /// `dx * sum |amps|^2`.
    pub fn norm_sq(&self) -> T {
        self.grid.dx() * sum(self.amps.iter().map(|a| a.norm_sqr()))
    }

    /// Multiplies by the plane wave `exp(i k0 x)`.
    pub fn with_momentum_kick(&self, k0: T) -> Self {
        let amps = self
            .grid
            .points()
            .zip(&self.amps)
            .map(|(x, a)| a * Complex::from_polar(T::one(), k0 * x))
            .collect();
        Self {
            grid: self.grid,
            amps,
        }
    }

    /// Position density `|psi|^2`.
    pub fn density(&self) -> Density<T> {
        Density::from_values_unchecked(self.grid, self.amps.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Largest `|psi|` in the outer boundary band relative to the peak.
    pub fn boundary_amplitude(&self, policy: &NumericPolicy) -> T {
        let n = self.amps.len();
        let band = ((n as f64 * policy.boundary_frac).ceil() as usize).max(1);
        let peak = self
            .amps
            .iter()
            .fold(T::zero(), |m, a| m.max(a.norm()));
        if peak <= T::zero() {
            return T::zero();
        }
        let edge = self.amps[..band]
            .iter()
            .chain(&self.amps[n - band..])
            .fold(T::zero(), |m, a| m.max(a.norm()));
        edge / peak
    }

    /// Fails when the state has non-negligible amplitude in the boundary band.
    pub fn check_boundary(&self, policy: &NumericPolicy) -> Result<()> {
        let rel = self.boundary_amplitude(policy);
        if rel > lit(policy.boundary_rel) {
            Err(Error::BoundaryLeakage {
                relative: to_f64(rel),
            })
        } else {
            Ok(())
        }
    }

    /// Momentum-space density on the conjugate grid (hbar = 1), using the
    /// unitary continuum transform `(2 pi)^(-1/2) int psi(x) exp(-ikx) dx`.
    pub fn momentum_density(&self) -> Result<Density<T>> {
        self.momentum_density_with(&NumericPolicy::DEFAULT)
    }

    pub fn momentum_density_with(&self, policy: &NumericPolicy) -> Result<Density<T>> {
        self.check_boundary(policy)?;
        let dx = self.grid.dx();
        let kgrid = self.grid.conjugate();
        // (-1)^j centers the spectrum so output index m carries k = (m - n/2) dk
        let mut buf: Vec<Complex<T>> = self
            .amps
            .iter()
            .enumerate()
            .map(|(j, a)| if j % 2 == 0 { *a } else { -*a })
            .collect();
        fft::forward(&mut buf);
        let scale = dx * dx / (lit::<T>(2.0) * T::PI());
        let vals = buf.iter().map(|c| c.norm_sqr() * scale).collect();
        // the exp(-i k x_min) phase drops out of the modulus
        Ok(Density::from_values_unchecked(kgrid, vals))
    }

    /// Cubic (Catmull-Rom) interpolation of the amplitude; zero off the grid.
    pub fn eval(&self, x: T) -> Complex<T> {
        let f = self.grid.fractional_index(x);
        let n = self.amps.len();
        if f < -T::one() || f > from_usize(n) {
            return Complex::new(T::zero(), T::zero());
        }
        let i0 = f.floor();
        let t = f - i0;
        let i0 = i0.to_i64().unwrap_or(i64::MIN);
        let at = |k: i64| -> Complex<T> {
            if k < 0 || k >= n as i64 {
                Complex::new(T::zero(), T::zero())
            } else {
                self.amps[k as usize]
            }
        };
        super::density::catmull_rom(at(i0 - 1), at(i0), at(i0 + 1), at(i0 + 2), t)
    }
}

/// `|psi|^2` as a density.
pub fn density_of<T: Real>(psi: &WaveFunction<T>) -> Density<T> {
    psi.density()
}

/// Momentum density of `psi`; see [`WaveFunction::momentum_density`].
pub fn momentum_density<T: Real>(psi: &WaveFunction<T>) -> Result<Density<T>> {
    psi.momentum_density()
}
