//! Four-particle position measurement whose pointer commutes with total momentum.
//!
//! The object `x` couples to a reference particle `y` and a pointer `u`. After
//! the interaction the state is
//! `phi(x) Phi1(y) Phi2(u + lambda (x - y) / 2) phi_v(v)`, and the pointer is
//! read out through the calibration `w = -(2 / lambda) u`. Hence `w = x - x'`
//! with `x' = y + (2 / lambda) u0`, and the error density is the density of `x'`:
//! `|Phi1|^2` convolved with `|Phi2|^2` stretched by `2 / lambda`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid_core::{Density, GridSpec, WaveFunction};
use crate::policy::NumericPolicy;
use crate::quadrature::{check_input, check_mass, clamp_nonneg, trapezoid_nodes, LatticeKernel};
use crate::repeatability::JointDensity;
use crate::scalar::{lit, to_f64, Real};

/// Mass tolerance for quadrature results.
const QUAD_MASS_TOL: f64 = 1e-4;

/// Apparatus state: reference particle, pointer and the spectator `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct OzawaProbe<T> {
    pub phi1: WaveFunction<T>,
    pub phi2: WaveFunction<T>,
    /// Wavefunction of the `v` coordinate. It drops out of every outcome
    /// statistic but contributes to the apparatus momentum spread.
    pub phi_v: WaveFunction<T>,
}

impl<T: Real> OzawaProbe<T> {
    pub fn new(phi1: WaveFunction<T>, phi2: WaveFunction<T>, phi_v: WaveFunction<T>) -> Result<Self> {
        let p = NumericPolicy::DEFAULT;
        for psi in [&phi1, &phi2, &phi_v] {
            let n = psi.norm_sq();
            if (n - T::one()).abs() > lit(p.mass) {
                return Err(Error::NonNormalized(to_f64(n)));
            }
        }
        Ok(Self { phi1, phi2, phi_v })
    }
}

/// Coupling strength `lambda = K tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OzawaParams<T> {
    lambda: T,
}

impl<T: Real> OzawaParams<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {}",
                to_f64(lambda)
            )));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }
}

#[inline]
fn component<T: Real>(probe: &OzawaProbe<T>, lambda: T, x: T, y: T, u: T) -> Complex<T> {
    probe.phi1.eval(y) * probe.phi2.eval(u + lambda * lit(0.5) * (x - y))
}

/// `Phi1(y) Phi2(u + lambda (x - y) / 2)`: the evolved state without the
/// object and `v` factors. Arguments off the pointer grid evaluate to zero.
pub fn evolved_component<T: Real>(probe: &OzawaProbe<T>, lambda: T, x: T, y: T, u: T) -> Complex<T> {
    let s = u + lambda * lit(0.5) * (x - y);
    let g = probe.phi2.grid();
    if s < g.x_min() || s > g.last_point() {
        let a = probe.phi1.eval(y);
        if a.norm_sqr() > T::zero() {
            log::warn!(
                "pointer argument {} leaves the grid [{}, {}]",
                to_f64(s),
                to_f64(g.x_min()),
                to_f64(g.last_point())
            );
        }
        return Complex::new(T::zero(), T::zero());
    }
    component(probe, lambda, x, y, u)
}

struct Inputs<T> {
    lambda: T,
    obj: Density<T>,
    r: Density<T>,
    p2: Density<T>,
}

impl<T: Real> Inputs<T> {
    fn new(obj: Option<&WaveFunction<T>>, probe: &OzawaProbe<T>, lambda: T) -> Result<Self> {
        let lambda = OzawaParams::new(lambda)?.lambda();
        let p = NumericPolicy::DEFAULT;
        if let Some(o) = obj {
            check_input(o, &p)?;
        }
        check_input(&probe.phi1, &p)?;
        check_input(&probe.phi2, &p)?;
        let obj = obj
            .map(|o| o.density())
            .unwrap_or_else(|| probe.phi1.density());
        Ok(Self {
            lambda,
            obj,
            r: probe.phi1.density(),
            p2: probe.phi2.density(),
        })
    }

    fn cutoff(&self) -> T {
        lit(NumericPolicy::DEFAULT.support_cutoff)
    }

    fn two_over_lambda(&self) -> T {
        lit::<T>(2.0) / self.lambda
    }

    /// Support of the error density, `[y_lo + 2 u_lo / lambda, y_hi + 2 u_hi / lambda]`.
    fn error_support(&self) -> (T, T) {
        let (y_lo, y_hi) = self.r.support(self.cutoff());
        let (u_lo, u_hi) = self.p2.support(self.cutoff());
        let s = self.two_over_lambda();
        (y_lo + s * u_lo, y_hi + s * u_hi)
    }

    fn outcome_grid(&self) -> Result<GridSpec<T>> {
        let (x_lo, x_hi) = self.obj.support(self.cutoff());
        let (e_lo, e_hi) = self.error_support();
        self.obj
            .grid()
            .covering(x_lo - e_hi, x_hi - e_lo, 4, NumericPolicy::DEFAULT.max_auto_points)
    }

    fn pointer_grid(&self) -> Result<GridSpec<T>> {
        let c = self.cutoff();
        let (x_lo, x_hi) = self.obj.support(c);
        let (y_lo, y_hi) = self.r.support(c);
        let (u_lo, u_hi) = self.p2.support(c);
        let h = self.lambda * lit(0.5);
        self.p2.grid().covering(
            u_lo - h * (x_hi - y_lo),
            u_hi - h * (x_lo - y_hi),
            4,
            NumericPolicy::DEFAULT.max_auto_points,
        )
    }

    /// Integrating over `y` samples `|Phi2|^2` with stride `lambda dy / 2`;
    /// beyond one pointer cell the integral is taken over `u0` instead.
    fn integrate_over_y(&self) -> bool {
        self.lambda * lit(0.5) * self.r.dx() <= self.p2.dx()
    }

    /// `k(t)` with `q(w) = int P(x) k(x - w) dx`.
    fn kernel(&self, w_grid: &GridSpec<T>) -> Result<LatticeKernel<T>> {
        let c = NumericPolicy::DEFAULT.support_cutoff;
        if self.integrate_over_y() {
            let h = self.lambda * lit(0.5);
            let ys = trapezoid_nodes(&self.r, c);
            LatticeKernel::from_fn(self.obj.grid(), w_grid, |t| {
                h * ys
                    .iter()
                    .fold(T::zero(), |acc, n| acc + n.w * self.p2.eval(h * (t - n.x)))
            })
        } else {
            let s = self.two_over_lambda();
            let us = trapezoid_nodes(&self.p2, c);
            LatticeKernel::from_fn(self.obj.grid(), w_grid, |t| {
                us.iter()
                    .fold(T::zero(), |acc, n| acc + n.w * self.r.eval(t - s * n.x))
            })
        }
    }
}

/// Pointer grid used by [`pointer_density_numeric`]: the lattice of `Phi2`,
/// widened to hold every shifted pointer argument.
pub fn pointer_grid<T: Real>(obj: &WaveFunction<T>, probe: &OzawaProbe<T>, lambda: T) -> Result<GridSpec<T>> {
    Inputs::new(Some(obj), probe, lambda)?.pointer_grid()
}

/// Outcome grid: the object lattice, widened by the error support.
pub fn outcome_grid<T: Real>(obj: &WaveFunction<T>, probe: &OzawaProbe<T>, lambda: T) -> Result<GridSpec<T>> {
    Inputs::new(Some(obj), probe, lambda)?.outcome_grid()
}

/// Squared norm of the evolved state over `(x, y, u)` by direct summation.
pub fn evolved_state_mass<T: Real>(obj: &WaveFunction<T>, probe: &OzawaProbe<T>, lambda: T) -> Result<T> {
    let inp = Inputs::new(Some(obj), probe, lambda)?;
    let ug = inp.pointer_grid()?;
    let c = NumericPolicy::DEFAULT.support_cutoff;
    let xs = trapezoid_nodes(&inp.obj, c);
    let ys = trapezoid_nodes(&inp.r, c);
    let du = ug.dx();
    let mut total = crate::scalar::CompensatedSum::new();
    for xn in &xs {
        for yn in &ys {
            // trapezoid weight alone; |Phi1|^2 comes back through the component
            let wy = yn.w / inp.r.values()[yn.index];
            let inner = ug.points().fold(T::zero(), |acc, u| {
                acc + component(probe, inp.lambda, xn.x, yn.x, u).norm_sqr()
            });
            total.add(xn.w * wy * inner * du);
        }
    }
    Ok(total.value())
}

/// Pointer marginal `p(u) = int int |phi(x)|^2 |Phi1(y)|^2 |Phi2(u + lambda (x - y) / 2)|^2 dx dy`
/// by direct two-dimensional quadrature on [`pointer_grid`].
pub fn pointer_density_numeric<T: Real>(
    obj: &WaveFunction<T>,
    probe: &OzawaProbe<T>,
    lambda: T,
) -> Result<Density<T>> {
    let inp = Inputs::new(Some(obj), probe, lambda)?;
    let ug = inp.pointer_grid()?;
    pointer_density_on(&inp, &ug)
}

/// [`pointer_density_numeric`] on a caller-chosen pointer grid.
pub fn pointer_density_numeric_on<T: Real>(
    obj: &WaveFunction<T>,
    probe: &OzawaProbe<T>,
    lambda: T,
    pointer: &GridSpec<T>,
) -> Result<Density<T>> {
    let inp = Inputs::new(Some(obj), probe, lambda)?;
    pointer_density_on(&inp, pointer)
}

fn pointer_density_on<T: Real>(inp: &Inputs<T>, ug: &GridSpec<T>) -> Result<Density<T>> {
    let c = NumericPolicy::DEFAULT.support_cutoff;
    let xs = trapezoid_nodes(&inp.obj, c);
    let h = inp.lambda * lit(0.5);
    let mut vals: Vec<T> = if inp.integrate_over_y() {
        let ys = trapezoid_nodes(&inp.r, c);
        ug.points()
            .map(|u| {
                xs.iter().fold(T::zero(), |acc, xn| {
                    acc + xn.w
                        * ys.iter().fold(T::zero(), |a, yn| {
                            a + yn.w * inp.p2.eval(u + h * (xn.x - yn.x))
                        })
                })
            })
            .collect()
    } else {
        // y = x + (2 / lambda)(u - u0)
        let s = inp.two_over_lambda();
        let us = trapezoid_nodes(&inp.p2, c);
        ug.points()
            .map(|u| {
                s * xs.iter().fold(T::zero(), |acc, xn| {
                    acc + xn.w
                        * us.iter().fold(T::zero(), |a, un| {
                            a + un.w * inp.r.eval(xn.x + s * (u - un.x))
                        })
                })
            })
            .collect()
    };
    clamp_nonneg(&mut vals);
    let d = Density::from_values_unchecked(*ug, vals);
    check_mass("pointer density", d.mass(), QUAD_MASS_TOL)?;
    Ok(d)
}

/// Outcome density of `w = -(2 / lambda) u` by direct quadrature of the
/// pointer marginal, sampled on [`outcome_grid`].
pub fn scaled_outcome_density<T: Real>(
    obj: &WaveFunction<T>,
    probe: &OzawaProbe<T>,
    lambda: T,
) -> Result<Density<T>> {
    let inp = Inputs::new(Some(obj), probe, lambda)?;
    let wg = inp.outcome_grid()?;
    let ker = inp.kernel(&wg)?;
    let xs = trapezoid_nodes(&inp.obj, NumericPolicy::DEFAULT.support_cutoff);
    let mut vals = ker.outcome(&xs);
    clamp_nonneg(&mut vals);
    let d = Density::from_values_unchecked(wg, vals);
    check_mass("outcome density", d.mass(), QUAD_MASS_TOL)?;
    Ok(d)
}

/// Error density `|Phi1|^2 * (lambda/2)|Phi2(lambda s / 2)|^2` on the lattice
/// of `Phi1`. The outcome density is `smear(|phi|^2, e)`.
pub fn error_density<T: Real>(probe: &OzawaProbe<T>, lambda: T) -> Result<Density<T>> {
    let inp = Inputs::new(None, probe, lambda)?;
    let policy = NumericPolicy::DEFAULT;
    let g = inp
        .p2
        .pushforward_affine(inp.two_over_lambda(), T::zero(), inp.r.grid(), &policy)?;
    let e = inp.r.convolve(&g)?;
    Density::normalized(*e.grid(), e.values().to_vec())
}

/// `(Var e, Var |Phi1|^2 + (4 / lambda^2) Var |Phi2|^2)`.
pub fn variance_identity_check<T: Real>(probe: &OzawaProbe<T>, lambda: T) -> Result<(T, T)> {
    let e = error_density(probe, lambda)?;
    let s = lit::<T>(2.0) / lambda;
    let rhs = probe.phi1.density().variance() + s * s * probe.phi2.density().variance();
    Ok((e.variance(), rhs))
}

/// Joint density `p(x, w) = |phi(x)|^2 k(x - w)` of object position and
/// outcome, with the conditional kernel `k` integrated per lattice difference.
pub fn joint_object_outcome_density<T: Real>(
    obj: &WaveFunction<T>,
    probe: &OzawaProbe<T>,
    lambda: T,
) -> Result<JointDensity<T>> {
    let inp = Inputs::new(Some(obj), probe, lambda)?;
    let wg = inp.outcome_grid()?;
    let ker = inp.kernel(&wg)?;
    let mut vals = ker.joint(&inp.obj);
    clamp_nonneg(&mut vals);
    let mass = crate::scalar::sum(vals.iter().copied()) * inp.obj.dx() * wg.dx();
    check_mass("joint density", mass, QUAD_MASS_TOL)?;
    JointDensity::new(*inp.obj.grid(), wg, vals, QUAD_MASS_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_core::{l1_distance, make_grid, sample_wavefunction, smear, ProbeFamily};

    fn gauss(lo: f64, hi: f64, n: usize, s: f64) -> WaveFunction<f64> {
        let g = make_grid::<f64>(lo, hi, n).unwrap();
        sample_wavefunction(&g, &ProbeFamily::gaussian(0.0, s)).unwrap()
    }

    fn probe(s1: f64, s2: f64) -> OzawaProbe<f64> {
        OzawaProbe::new(gauss(-8.0, 8.0, 256, s1), gauss(-8.0, 8.0, 256, s2), gauss(-8.0, 8.0, 256, 1.0))
            .unwrap()
    }

    #[test]
    fn component_shift() {
        let p = probe(1.0, 1.0);
        let a = evolved_component(&p, 2.0, 0.5, 0.5, 0.25);
        let b = p.phi1.eval(0.5) * p.phi2.eval(0.25);
        assert!((a - b).norm() < 1e-15);
        let a = evolved_component(&p, 2.0, 1.0, 0.0, 0.0);
        let b = p.phi1.eval(0.0) * p.phi2.eval(1.0);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn spike_probes_transcribe_position() {
        let g = make_grid::<f64>(-4.0, 4.0, 64).unwrap();
        let p = OzawaProbe::new(
            WaveFunction::spike(g, 0.0).unwrap(),
            WaveFunction::spike(g, 0.0).unwrap(),
            gauss(-4.0, 4.0, 64, 0.5),
        )
        .unwrap();
        let obj = WaveFunction::spike(g, 1.0).unwrap();
        let pu = pointer_density_numeric(&obj, &p, 2.0).unwrap();
        let peak = pu.grid().point(pu.support_indices(1e-12).0);
        assert_eq!(pu.support_indices(1e-12).0, pu.support_indices(1e-12).1);
        assert!((peak + 1.0).abs() < 1e-12);
        let w = scaled_outcome_density(&obj, &p, 2.0).unwrap();
        assert!((w.mean() - 1.0).abs() < 1e-12);
        assert!(w.variance() < 1e-20);
    }

    #[test]
    fn gaussian_pointer_variance() {
        let obj = gauss(-8.0, 8.0, 256, 0.8);
        let p = probe(0.5, 1.0);
        for lambda in [0.5, 1.0, 2.0] {
            let pu = pointer_density_numeric(&obj, &p, lambda).unwrap();
            let want = 1.0 + lambda * lambda / 4.0 * (0.64 + 0.25);
            assert!((pu.variance() / want - 1.0).abs() < 0.01, "{lambda}");
            let w = scaled_outcome_density(&obj, &p, lambda).unwrap();
            let want = 0.64 + 0.25 + 4.0 / (lambda * lambda);
            assert!((w.variance() / want - 1.0).abs() < 0.01, "{lambda}");
        }
    }

    #[test]
    fn weak_coupling_leaves_pointer_alone() {
        let obj = gauss(-8.0, 8.0, 256, 0.8);
        let p = probe(0.5, 1.0);
        let pu = pointer_density_numeric(&obj, &p, 1e-6).unwrap();
        assert!(l1_distance(&pu, &p.phi2.density()).unwrap() < 1e-4);
    }

    #[test]
    fn evolved_state_is_normalized() {
        let obj = gauss(-8.0, 8.0, 256, 1.0);
        let p = probe(1.0, 1.0);
        let m = evolved_state_mass(&obj, &p, 1.0).unwrap();
        assert!((m - 1.0).abs() < 1e-6, "{m}");
    }

    #[test]
    fn error_density_variance() {
        let p = probe(0.5, 1.0);
        let (lhs, rhs) = variance_identity_check(&p, 2.0).unwrap();
        assert!((rhs - 1.25).abs() < 0.0125 && (lhs - 1.25).abs() < 0.0125);
        let (lhs, _) = variance_identity_check(&p, 10.0).unwrap();
        assert!((lhs - 0.29).abs() < 0.0029, "{lhs}");
    }

    #[test]
    fn smear_matches_quadrature_for_skewed_probes() {
        let g = make_grid::<f64>(-8.0, 8.0, 256).unwrap();
        let obj = sample_wavefunction(&g, &ProbeFamily::skewed_gaussian(0.3, 0.9, 3.0)).unwrap();
        let p = OzawaProbe::new(
            sample_wavefunction(&g, &ProbeFamily::skewed_gaussian(0.0, 0.6, -4.0)).unwrap(),
            sample_wavefunction(&g, &ProbeFamily::skewed_gaussian(0.2, 0.8, 5.0)).unwrap(),
            gauss(-8.0, 8.0, 256, 1.0),
        )
        .unwrap();
        for lambda in [0.5, 1.0, 2.0, 10.0] {
            let q = scaled_outcome_density(&obj, &p, lambda).unwrap();
            let e = error_density(&p, lambda).unwrap();
            let m = smear(&obj.density(), &e).unwrap();
            let d = l1_distance(&q, &m).unwrap();
            assert!(d < 1e-3, "lambda {lambda}: {d}");
        }
    }

    #[test]
    fn joint_marginals() {
        let obj = gauss(-8.0, 8.0, 256, 0.8);
        let p = probe(0.5, 1.0);
        let j = joint_object_outcome_density(&obj, &p, 2.0).unwrap();
        let mx = j.marginal_x().unwrap();
        assert!(l1_distance(&mx, &obj.density()).unwrap() < 1e-3);
        let mw = j.marginal_w().unwrap();
        let q = scaled_outcome_density(&obj, &p, 2.0).unwrap();
        assert!(l1_distance(&mw, &q).unwrap() < 1e-3);
    }

    #[test]
    fn rejects_nonpositive_lambda() {
        let p = probe(0.5, 1.0);
        assert!(matches!(error_density(&p, 0.0), Err(Error::InvalidParameter(_))));
    }
}
