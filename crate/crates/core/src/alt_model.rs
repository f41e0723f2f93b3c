//! Two-particle dilation measurement.
//!
//! The object `x` and probe `y` evolve into
//! `e^(lambda/2) phi(x) phi_p(y e^lambda - x (e^lambda - 1))`: the probe is
//! contracted towards the object position. The outcome `w = y / (1 - e^-lambda)`
//! equals `x - x'` with `x' = -y0 / (e^lambda - 1)`, so the error density is
//! `|phi_p|^2` reflected and compressed by `e^lambda - 1`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid_core::{Density, GridSpec, WaveFunction};
use crate::policy::NumericPolicy;
use crate::quadrature::{check_input, check_mass, clamp_nonneg, trapezoid_nodes, LatticeKernel};
use crate::repeatability::JointDensity;
use crate::scalar::{lit, sum, to_f64, Real};

const QUAD_MASS_TOL: f64 = 1e-4;

/// Probe state; the pointer observable is the probe position.
#[derive(Debug, Clone, PartialEq)]
pub struct AltProbe<T> {
    pub phi_probe: WaveFunction<T>,
}

impl<T: Real> AltProbe<T> {
    pub fn new(phi_probe: WaveFunction<T>) -> Result<Self> {
        let n = phi_probe.norm_sq();
        if (n - T::one()).abs() > lit(NumericPolicy::DEFAULT.mass) {
            return Err(Error::NonNormalized(to_f64(n)));
        }
        Ok(Self { phi_probe })
    }
}

/// Coupling strength `lambda = K tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltParams<T> {
    lambda: T,
}

impl<T: Real> AltParams<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {}",
                to_f64(lambda)
            )));
        }
        if lambda <= lit(NumericPolicy::DEFAULT.min_lambda) {
            return Err(Error::LambdaTooSmall(to_f64(lambda)));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// `e^lambda - 1`.
    pub fn gain(&self) -> T {
        self.lambda.exp_m1()
    }

    /// `1 - e^-lambda`, the inverse calibration factor.
    pub fn contraction(&self) -> T {
        -(-self.lambda).exp_m1()
    }
}

/// Final state on an `(x, y)` grid, row-major in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalState<T> {
    x_grid: GridSpec<T>,
    y_grid: GridSpec<T>,
    amps: Vec<Complex<T>>,
}

impl<T: Real> FinalState<T> {
    pub fn x_grid(&self) -> &GridSpec<T> {
        &self.x_grid
    }

    pub fn y_grid(&self) -> &GridSpec<T> {
        &self.y_grid
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.amps[i * self.y_grid.len() + j]
    }

    pub fn norm_sq(&self) -> T {
        sum(self.amps.iter().map(|a| a.norm_sqr())) * self.x_grid.dx() * self.y_grid.dx()
    }

    /// `int |Psi(x, y)|^2 dx`.
    pub fn pointer_marginal(&self) -> Density<T> {
        let ny = self.y_grid.len();
        let dx = self.x_grid.dx();
        let vals = (0..ny)
            .map(|j| sum((0..self.x_grid.len()).map(|i| self.at(i, j).norm_sqr())) * dx)
            .collect();
        Density::from_values_unchecked(self.y_grid, vals)
    }
}

struct Inputs<T> {
    params: AltParams<T>,
    obj: Density<T>,
    pp: Density<T>,
}

impl<T: Real> Inputs<T> {
    fn new(obj: Option<&WaveFunction<T>>, probe: &AltProbe<T>, lambda: T) -> Result<Self> {
        let params = AltParams::new(lambda)?;
        let p = NumericPolicy::DEFAULT;
        if let Some(o) = obj {
            check_input(o, &p)?;
        }
        check_input(&probe.phi_probe, &p)?;
        let pp = probe.phi_probe.density();
        Ok(Self {
            params,
            obj: obj.map(|o| o.density()).unwrap_or_else(|| pp.clone()),
            pp,
        })
    }

    fn cutoff(&self) -> T {
        lit(NumericPolicy::DEFAULT.support_cutoff)
    }

    fn error_support(&self) -> (T, T) {
        let (lo, hi) = self.pp.support(self.cutoff());
        let g = self.params.gain();
        (-hi / g, -lo / g)
    }

    fn outcome_grid(&self) -> Result<GridSpec<T>> {
        let (x_lo, x_hi) = self.obj.support(self.cutoff());
        let (e_lo, e_hi) = self.error_support();
        self.obj
            .grid()
            .covering(x_lo - e_hi, x_hi - e_lo, 4, NumericPolicy::DEFAULT.max_auto_points)
    }

    /// Probe lattice covering `(y0 + x (e^lambda - 1)) e^-lambda`.
    fn pointer_grid(&self) -> Result<GridSpec<T>> {
        let c = self.cutoff();
        let (x_lo, x_hi) = self.obj.support(c);
        let (y_lo, y_hi) = self.pp.support(c);
        let g = self.params.gain();
        let inv = (-self.params.lambda()).exp();
        self.pp.grid().covering(
            (y_lo + g * x_lo) * inv,
            (y_hi + g * x_hi) * inv,
            4,
            NumericPolicy::DEFAULT.max_auto_points,
        )
    }

    /// Integrating over `x` samples the probe with stride `(e^lambda - 1) dx`;
    /// beyond one probe cell the integral is taken over `y0` instead.
    fn integrate_over_x(&self) -> bool {
        self.params.gain() * self.obj.dx() <= self.pp.dx()
    }

    fn error_density_on(&self, lattice: &GridSpec<T>) -> Result<Density<T>> {
        let g = self.params.gain();
        self.pp
            .pushforward_affine(-T::one() / g, T::zero(), lattice, &NumericPolicy::DEFAULT)
    }

    /// `k(t)` with `q(w) = int P(x) k(x - w) dx`. Unresolved kernels are the
    /// cell-deposited error density.
    fn kernel(&self, w_grid: &GridSpec<T>) -> Result<LatticeKernel<T>> {
        let g = self.params.gain();
        if self.integrate_over_x() {
            LatticeKernel::from_fn(self.obj.grid(), w_grid, |t| g * self.pp.eval(-g * t))
        } else {
            let e = self.error_density_on(self.obj.grid())?;
            LatticeKernel::from_density(self.obj.grid(), w_grid, &e)
        }
    }
}

/// `Psi(x, y) = e^(lambda/2) phi(x) phi_p(y e^lambda - x (e^lambda - 1))` on the
/// object grid times the pointer grid of [`pointer_density_numeric`].
pub fn final_state<T: Real>(obj: &WaveFunction<T>, probe: &AltProbe<T>, lambda: T) -> Result<FinalState<T>> {
    let inp = Inputs::new(Some(obj), probe, lambda)?;
    let yg = inp.pointer_grid()?;
    let xg = *obj.grid();
    let lam = inp.params.lambda();
    let (e, g) = (lam.exp(), inp.params.gain());
    let pre = (lam * lit(0.5)).exp();
    let mut amps = Vec::with_capacity(xg.len() * yg.len());
    for (x, a) in xg.points().zip(obj.amplitudes()) {
        if a.norm_sqr() == T::zero() {
            amps.extend(std::iter::repeat(Complex::new(T::zero(), T::zero())).take(yg.len()));
            continue;
        }
        amps.extend(
            yg.points()
                .map(|y| *a * probe.phi_probe.eval(y * e - x * g) * pre),
        );
    }
    Ok(FinalState {
        x_grid: xg,
        y_grid: yg,
        amps,
    })
}

/// Probe-position density `p(y) = e^lambda int |phi(x)|^2 |phi_p(y e^lambda - x (e^lambda - 1))|^2 dx`
/// by direct quadrature on the probe lattice.
pub fn pointer_density_numeric<T: Real>(
    obj: &WaveFunction<T>,
    probe: &AltProbe<T>,
    lambda: T,
) -> Result<Density<T>> {
    let inp = Inputs::new(Some(obj), probe, lambda)?;
    let yg = inp.pointer_grid()?;
    let c = NumericPolicy::DEFAULT.support_cutoff;
    let lam = inp.params.lambda();
    let (e, g) = (lam.exp(), inp.params.gain());
    let mut vals: Vec<T> = if inp.integrate_over_x() {
        let xs = trapezoid_nodes(&inp.obj, c);
        yg.points()
            .map(|y| {
                e * xs
                    .iter()
                    .fold(T::zero(), |acc, n| acc + n.w * inp.pp.eval(y * e - n.x * g))
            })
            .collect()
    } else {
        // x = (y e^lambda - y0) / (e^lambda - 1)
        let ys = trapezoid_nodes(&inp.pp, c);
        yg.points()
            .map(|y| {
                e / g
                    * ys
                        .iter()
                        .fold(T::zero(), |acc, n| acc + n.w * inp.obj.eval((y * e - n.x) / g))
            })
            .collect()
    };
    clamp_nonneg(&mut vals);
    let d = Density::from_values_unchecked(yg, vals);
    check_mass("pointer density", d.mass(), QUAD_MASS_TOL)?;
    Ok(d)
}

/// Outcome density of `w = y / (1 - e^-lambda)` by direct quadrature, on the
/// object lattice.
pub fn scaled_outcome_density<T: Real>(
    obj: &WaveFunction<T>,
    probe: &AltProbe<T>,
    lambda: T,
) -> Result<Density<T>> {
    let inp = Inputs::new(Some(obj), probe, lambda)?;
    let wg = inp.outcome_grid()?;
    let c = NumericPolicy::DEFAULT.support_cutoff;
    let mut vals = if inp.integrate_over_x() {
        let ker = inp.kernel(&wg)?;
        ker.outcome(&trapezoid_nodes(&inp.obj, c))
    } else {
        let g = inp.params.gain();
        let ys = trapezoid_nodes(&inp.pp, c);
        wg.points()
            .map(|w| {
                ys.iter()
                    .fold(T::zero(), |acc, n| acc + n.w * inp.obj.eval(w - n.x / g))
            })
            .collect()
    };
    clamp_nonneg(&mut vals);
    let d = Density::from_values_unchecked(wg, vals);
    check_mass("outcome density", d.mass(), QUAD_MASS_TOL)?;
    Ok(d)
}

/// Error density `(e^lambda - 1) |phi_p(-x (e^lambda - 1))|^2` on the probe lattice.
pub fn error_density<T: Real>(probe: &AltProbe<T>, lambda: T) -> Result<Density<T>> {
    let inp = Inputs::new(None, probe, lambda)?;
    inp.error_density_on(inp.pp.grid())
}

/// Joint density `|Psi(x, y(w))|^2 |dy/dw|` of object position and outcome.
pub fn joint_object_outcome_density<T: Real>(
    obj: &WaveFunction<T>,
    probe: &AltProbe<T>,
    lambda: T,
) -> Result<JointDensity<T>> {
    let inp = Inputs::new(Some(obj), probe, lambda)?;
    let wg = inp.outcome_grid()?;
    let ker = inp.kernel(&wg)?;
    let mut vals = ker.joint(&inp.obj);
    clamp_nonneg(&mut vals);
    let mass = sum(vals.iter().copied()) * inp.obj.dx() * wg.dx();
    check_mass("joint density", mass, QUAD_MASS_TOL)?;
    JointDensity::new(*inp.obj.grid(), wg, vals, QUAD_MASS_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_core::{l1_distance, make_grid, reflect, sample_wavefunction, smear, ProbeFamily};

    fn wave(lo: f64, hi: f64, n: usize, fam: ProbeFamily<f64>) -> WaveFunction<f64> {
        sample_wavefunction(&make_grid(lo, hi, n).unwrap(), &fam).unwrap()
    }

    fn gauss(n: usize, s: f64) -> WaveFunction<f64> {
        wave(-8.0, 8.0, n, ProbeFamily::gaussian(0.0, s))
    }

    #[test]
    fn lambda_guard() {
        let p = AltProbe::new(gauss(256, 1.0)).unwrap();
        assert_eq!(error_density(&p, 1e-10), Err(Error::LambdaTooSmall(1e-10)));
        assert!(matches!(error_density(&p, -1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn unit_gain_reflects_probe() {
        let fam = ProbeFamily::skewed_gaussian(0.5, 1.0, 4.0);
        let p = AltProbe::new(wave(-10.0, 10.0, 512, fam)).unwrap();
        let e = error_density(&p, std::f64::consts::LN_2).unwrap();
        let r = reflect(&p.phi_probe.density());
        assert!(l1_distance(&e, &r).unwrap() < 1e-6);
    }

    #[test]
    fn gaussian_error_variance() {
        let p = AltProbe::new(gauss(1024, 1.0)).unwrap();
        let e = error_density(&p, 3.0).unwrap();
        let want = 1.0 / 3.0f64.exp_m1().powi(2);
        assert!((want - 2.74e-3).abs() < 1e-5);
        assert!((e.variance() / want - 1.0).abs() < 0.02, "{}", e.variance());
    }

    #[test]
    fn gaussian_pointer_and_outcome() {
        let (sigma, s) = (1.0, 0.8);
        let obj = gauss(512, sigma);
        let p = AltProbe::new(gauss(512, s)).unwrap();
        for lambda in [0.3, 1.0, 3.0] {
            let pu = pointer_density_numeric(&obj, &p, lambda).unwrap();
            let c: f64 = -(-lambda as f64).exp_m1();
            let want = c * c * sigma * sigma + (-2.0 * lambda as f64).exp() * s * s;
            assert!((pu.variance() / want - 1.0).abs() < 0.01, "pointer {lambda}");
            let w = scaled_outcome_density(&obj, &p, lambda).unwrap();
            let want = sigma * sigma + s * s / (lambda as f64).exp_m1().powi(2);
            assert!((w.variance() / want - 1.0).abs() < 0.01, "outcome {lambda}");
        }
    }

    #[test]
    fn spike_object_accurate_limit() {
        let g = make_grid::<f64>(-8.0, 8.0, 256).unwrap();
        let obj = WaveFunction::spike(g, 1.5).unwrap();
        let p = AltProbe::new(gauss(256, 1.0)).unwrap();
        let w = scaled_outcome_density(&obj, &p, 20.0).unwrap();
        assert!((w.mean() - 1.5).abs() <= g.dx());
        let (a, b) = w.support(1e-6);
        assert!(a >= 1.5 - g.dx() && b <= 1.5 + g.dx());
    }

    #[test]
    fn spike_object_contracts_probe() {
        let g = make_grid::<f64>(-8.0, 8.0, 256).unwrap();
        let obj = WaveFunction::spike(g, 0.0).unwrap();
        let p = AltProbe::new(gauss(256, 1.0)).unwrap();
        let lambda = 0.5f64;
        let pu = pointer_density_numeric(&obj, &p, lambda).unwrap();
        let pp = p.phi_probe.density();
        for (y, v) in pu.grid().points().zip(pu.values()) {
            let want = lambda.exp() * pp.eval(y * lambda.exp());
            assert!((v - want).abs() < 1e-9, "{y}");
        }
    }

    #[test]
    fn final_state_norm_and_contraction() {
        let obj = gauss(1024, 1.0);
        let p = AltProbe::new(gauss(1024, 1.0)).unwrap();
        for lambda in [0.5, 1.0, 3.0] {
            let psi = final_state(&obj, &p, lambda).unwrap();
            assert!((psi.norm_sq() - 1.0).abs() < 1e-6, "{lambda}: {}", psi.norm_sq());
        }
        let psi = final_state(&obj, &p, 1e-6).unwrap();
        for i in (0..1024).step_by(67) {
            for j in (0..psi.y_grid().len()).step_by(13) {
                let y = psi.y_grid().point(j);
                let want = obj.amplitudes()[i] * p.phi_probe.eval(y);
                assert!((psi.at(i, j) - want).norm() < 1e-5);
            }
        }
        let g = *obj.grid();
        let spike = WaveFunction::spike(g, 1.0).unwrap();
        let psi = final_state(&spike, &p, std::f64::consts::LN_2).unwrap();
        let i = g.nearest_index(1.0).unwrap();
        let y = psi.y_grid().point(40);
        let want = spike.amplitudes()[i] * p.phi_probe.eval(2.0 * y - 1.0) * 2f64.sqrt();
        assert!((psi.at(i, 40) - want).norm() < 1e-9);
    }

    #[test]
    fn boxes_at_unit_gain() {
        let obj = wave(-4.0, 4.0, 512, ProbeFamily::smoothed_box(0.0, 1.0, 0.2));
        let p = AltProbe::new(wave(-4.0, 4.0, 512, ProbeFamily::smoothed_box(0.0, 0.5, 0.1))).unwrap();
        let pu = pointer_density_numeric(&obj, &p, std::f64::consts::LN_2).unwrap();
        // y = (y0 + x) / 2 with |x| <= 1, |y0| <= 1/2
        let (a, b) = pu.support(1e-12);
        let dx = pu.dx();
        assert!((a + 0.75).abs() <= 2.0 * dx && (b - 0.75).abs() <= 2.0 * dx, "{a} {b}");
    }

    #[test]
    fn smear_matches_quadrature() {
        let obj = wave(-10.0, 10.0, 512, ProbeFamily::skewed_gaussian(0.2, 1.0, 3.0));
        let p = AltProbe::new(wave(-10.0, 10.0, 512, ProbeFamily::skewed_gaussian(-0.3, 0.7, -5.0))).unwrap();
        for lambda in [0.3, std::f64::consts::LN_2, 1.0, 3.0] {
            let q = scaled_outcome_density(&obj, &p, lambda).unwrap();
            let m = smear(&obj.density(), &error_density(&p, lambda).unwrap()).unwrap();
            let d = l1_distance(&q, &m).unwrap();
            assert!(d < 1e-3, "lambda {lambda}: {d}");
        }
    }

    #[test]
    fn joint_marginals_and_band() {
        let obj = gauss(512, 1.0);
        let p = AltProbe::new(wave(-8.0, 8.0, 512, ProbeFamily::triangle(0.0, 1.0))).unwrap();
        for lambda in [1.0, 3.0] {
            let j = joint_object_outcome_density(&obj, &p, lambda).unwrap();
            let mx = j.marginal_x().unwrap();
            assert!(l1_distance(&mx, &obj.density()).unwrap() < 1e-3);
            let q = scaled_outcome_density(&obj, &p, lambda).unwrap();
            assert!(l1_distance(&j.marginal_w().unwrap(), &q).unwrap() < 1e-3);
            let d = 1.0 / (lambda as f64).exp_m1();
            let dx = obj.grid().dx();
            for (i, x) in j.x_grid().points().enumerate() {
                for (k, w) in j.w_grid().points().enumerate() {
                    if (w - x).abs() > d + 2.0 * dx {
                        assert_eq!(j.at(i, k), 0.0, "x {x} w {w}");
                    }
                }
            }
        }
    }

    #[test]
    fn no_accuracy_floor() {
        let p = AltProbe::new(gauss(1024, 1.0)).unwrap();
        let mut last = f64::INFINITY;
        for lambda in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let v = error_density(&p, lambda).unwrap().variance();
            assert!(v < last);
            last = v;
        }
    }
}
