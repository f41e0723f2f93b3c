use num_complex::Complex;

use super::grid::GridSpec;
use super::wave::WaveFunction;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Parametrized families of single-particle states.
///
/// `Box` and `Triangle` are exactly supported on `[center - halfwidth,
/// center + halfwidth]`; the box edges may be rounded by a raised-cosine
/// ramp of width `edge_smoothing` inside that interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeFamily<T> {
    Gaussian { center: T, sigma: T },
    Box { center: T, halfwidth: T, edge_smoothing: T },
    Triangle { center: T, halfwidth: T },
    /// Skew-normal position density with shape parameter `skew`.
    SkewedGaussian { center: T, sigma: T, skew: T },
}

impl<T: Real> ProbeFamily<T> {
    pub fn gaussian(center: T, sigma: T) -> Self {
        Self::Gaussian { center, sigma }
    }

    pub fn boxed(center: T, halfwidth: T) -> Self {
        Self::Box {
            center,
            halfwidth,
            edge_smoothing: T::zero(),
        }
    }

    pub fn smoothed_box(center: T, halfwidth: T, edge_smoothing: T) -> Self {
        Self::Box {
            center,
            halfwidth,
            edge_smoothing,
        }
    }

    pub fn triangle(center: T, halfwidth: T) -> Self {
        Self::Triangle { center, halfwidth }
    }

    pub fn skewed_gaussian(center: T, sigma: T, skew: T) -> Self {
        Self::SkewedGaussian { center, sigma, skew }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        match *self {
            Self::Gaussian { sigma, .. } | Self::SkewedGaussian { sigma, .. } => {
                if !(sigma > T::zero()) {
                    return bad("sigma must be positive");
                }
            }
            Self::Box {
                halfwidth,
                edge_smoothing,
                ..
            } => {
                if !(halfwidth > T::zero()) {
                    return bad("halfwidth must be positive");
                }
                if !(edge_smoothing >= T::zero() && edge_smoothing < halfwidth) {
                    return bad("edge_smoothing must lie in [0, halfwidth)");
                }
            }
            Self::Triangle { halfwidth, .. } => {
                if !(halfwidth > T::zero()) {
                    return bad("halfwidth must be positive");
                }
            }
        }
        Ok(())
    }

    pub fn center(&self) -> T {
        match *self {
            Self::Gaussian { center, .. }
            | Self::Box { center, .. }
            | Self::Triangle { center, .. }
            | Self::SkewedGaussian { center, .. } => center,
        }
    }

    /// Halfwidth of the exact support for compact families.
    pub fn compact_halfwidth(&self) -> Option<T> {
        match *self {
            Self::Box { halfwidth, .. } | Self::Triangle { halfwidth, .. } => Some(halfwidth),
            _ => None,
        }
    }

    /// Interval that must fit inside the grid for sampling.
    pub fn required_support(&self) -> (T, T) {
        let three = lit::<T>(3.0);
        match *self {
            Self::Gaussian { center, sigma } | Self::SkewedGaussian { center, sigma, .. } => {
                (center - three * sigma, center + three * sigma)
            }
            Self::Box {
                center, halfwidth, ..
            }
            | Self::Triangle { center, halfwidth } => (center - halfwidth, center + halfwidth),
        }
    }

    /// Characteristic length, used for resolution checks.
    pub fn scale(&self) -> T {
        match *self {
            Self::Gaussian { sigma, .. } | Self::SkewedGaussian { sigma, .. } => sigma,
            Self::Box {
                halfwidth,
                edge_smoothing,
                ..
            } => {
                if edge_smoothing > T::zero() {
                    edge_smoothing
                } else {
                    halfwidth
                }
            }
            Self::Triangle { halfwidth, .. } => halfwidth,
        }
    }

    /// Unnormalized real amplitude at `x`.
    pub fn amplitude(&self, x: T) -> T {
        let half = lit::<T>(0.5);
        match *self {
            Self::Gaussian { center, sigma } => {
                let z = (x - center) / sigma;
                (-lit::<T>(0.25) * z * z).exp()
            }
            Self::SkewedGaussian {
                center,
                sigma,
                skew,
            } => {
                let z = (x - center) / sigma;
                let cdf = 0.5 * libm::erfc(-to_f64(skew * z) / std::f64::consts::SQRT_2);
                ((-half * z * z).exp() * lit::<T>(cdf)).sqrt()
            }
            Self::Box {
                center,
                halfwidth,
                edge_smoothing,
            } => {
                let r = (x - center).abs();
                if r > halfwidth {
                    T::zero()
                } else if edge_smoothing <= T::zero() || r <= halfwidth - edge_smoothing {
                    T::one()
                } else {
                    // raised-cosine ramp in amplitude, reaching zero at the support edge
                    let t = (r - (halfwidth - edge_smoothing)) / edge_smoothing;
                    (half * T::PI() * t).cos()
                }
            }
            Self::Triangle { center, halfwidth } => {
                let r = (x - center).abs();
                if r >= halfwidth {
                    T::zero()
                } else {
                    (T::one() - r / halfwidth).sqrt()
                }
            }
        }
    }
}

/// Samples `family` on `grid` and normalizes to unit L2 norm.
pub fn sample_wavefunction<T: Real>(
    grid: &GridSpec<T>,
    family: &ProbeFamily<T>,
) -> Result<WaveFunction<T>> {
    family.validate()?;
    let (lo, hi) = family.required_support();
    if lo < grid.x_min() || hi > grid.last_point() {
        return Err(Error::SupportExceedsGrid {
            lo: to_f64(lo),
            hi: to_f64(hi),
            x_min: to_f64(grid.x_min()),
            x_max: to_f64(grid.x_max()),
        });
    }
    let amps: Vec<Complex<T>> = grid
        .points()
        .map(|x| Complex::new(family.amplitude(x), T::zero()))
        .collect();
    WaveFunction::normalized(*grid, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_core::grid::make_grid;

    #[test]
    fn gaussian_density_moments() {
        let g = make_grid::<f64>(-8.0, 8.0, 1024).unwrap();
        let psi = sample_wavefunction(&g, &ProbeFamily::gaussian(0.0, 1.0)).unwrap();
        let d = psi.density();
        assert!((d.variance() - 1.0).abs() < 0.01);
        assert!(d.mean().abs() < g.dx());
    }

    #[test]
    fn box_density_is_uniform_half() {
        let g = make_grid::<f64>(-4.0, 4.0, 1024).unwrap();
        let psi = sample_wavefunction(&g, &ProbeFamily::boxed(0.0, 1.0)).unwrap();
        let d = psi.density();
        for (x, v) in g.points().zip(d.values()) {
            if x.abs() < 1.0 - 1e-12 {
                assert!((v - 0.5).abs() < 0.5 * 2.0 * g.dx(), "x={x} v={v}");
            } else if x.abs() > 1.0 + 1e-12 {
                assert_eq!(*v, 0.0);
            }
        }
        assert!((d.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_states_wider_than_grid() {
        let g = make_grid::<f64>(-8.0, 8.0, 1024).unwrap();
        let r = sample_wavefunction(&g, &ProbeFamily::gaussian(0.0, 10.0));
        assert!(matches!(r, Err(Error::SupportExceedsGrid { .. })));
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = make_grid::<f64>(-8.0, 8.0, 1024).unwrap();
        assert!(sample_wavefunction(&g, &ProbeFamily::gaussian(0.0, -1.0)).is_err());
        assert!(sample_wavefunction(&g, &ProbeFamily::smoothed_box(0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn compact_families_vanish_outside_support() {
        for fam in [
            ProbeFamily::smoothed_box(0.5, 1.0, 0.2),
            ProbeFamily::triangle(0.5, 1.0),
        ] {
            assert_eq!(fam.amplitude(1.5 + 1e-9), 0.0);
            assert_eq!(fam.amplitude(-0.5 - 1e-9), 0.0);
            assert!(fam.amplitude(0.5) > 0.0);
        }
    }

    #[test]
    fn skewed_gaussian_is_asymmetric() {
        let g = make_grid::<f64>(-8.0, 8.0, 1024).unwrap();
        let psi = sample_wavefunction(&g, &ProbeFamily::skewed_gaussian(0.0, 1.0, 4.0)).unwrap();
        let d = psi.density();
        // skew-normal mean: sigma * delta * sqrt(2/pi), delta = a/sqrt(1+a^2)
        let delta = 4.0 / 17.0f64.sqrt();
        let expected = delta * (2.0 / std::f64::consts::PI).sqrt();
        assert!((d.mean() - expected).abs() < 1e-3, "{}", d.mean());
    }
}
