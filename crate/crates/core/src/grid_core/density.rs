use super::fft;
use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::policy::NumericPolicy;
use crate::scalar::{from_usize, lit, next_pow2, sum, to_f64, CompensatedSum, Real};

/// Nonnegative samples on a grid with `dx * sum(vals) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Density<T> {
    grid: GridSpec<T>,
    vals: Vec<T>,
}

impl<T: Real> Density<T> {
    /// Validates nonnegativity and unit mass within `policy.mass`.
    pub fn new(grid: GridSpec<T>, vals: Vec<T>, policy: &NumericPolicy) -> Result<Self> {
        check_len(&grid, vals.len())?;
        if vals.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "density values must be finite and nonnegative".into(),
            ));
        }
        let d = Self { grid, vals };
        let m = d.mass();
        if (m - T::one()).abs() > lit(policy.mass) {
            return Err(Error::NonNormalized(to_f64(m)));
        }
        Ok(d)
    }

    /// Clamps negative round-off to zero and rescales to unit mass.
    pub fn normalized(grid: GridSpec<T>, mut vals: Vec<T>) -> Result<Self> {
        check_len(&grid, vals.len())?;
        for v in vals.iter_mut() {
            if !v.is_finite() {
                return Err(Error::InvalidParameter("non-finite density sample".into()));
            }
            if *v < T::zero() {
                *v = T::zero();
            }
        }
        let m = grid.dx() * sum(vals.iter().copied());
        if !(m > T::zero()) {
            return Err(Error::NonNormalized(to_f64(m)));
        }
        let inv = T::one() / m;
        for v in vals.iter_mut() {
            *v = *v * inv;
        }
        Ok(Self { grid, vals })
    }

    pub fn from_fn(grid: GridSpec<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let vals = grid.points().map(f).collect();
        Self::normalized(grid, vals)
    }

    /// All mass in the cell nearest to `x0`.
    pub fn spike(grid: GridSpec<T>, x0: T) -> Result<Self> {
        let i = grid.nearest_index(x0).ok_or(Error::SupportExceedsGrid {
            lo: to_f64(x0),
            hi: to_f64(x0),
            x_min: to_f64(grid.x_min()),
            x_max: to_f64(grid.x_max()),
        })?;
        let mut vals = vec![T::zero(); grid.len()];
        vals[i] = T::one() / grid.dx();
        Ok(Self { grid, vals })
    }

    /// Uniform density on `[a, b]` (grid points inside the closed interval).
    pub fn uniform(grid: GridSpec<T>, a: T, b: T) -> Result<Self> {
        let tol = grid.dx() * lit(1e-9);
        Self::from_fn(grid, |x| {
            if x >= a - tol && x <= b + tol {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    pub(crate) fn from_values_unchecked(grid: GridSpec<T>, vals: Vec<T>) -> Self {
        debug_assert_eq!(grid.len(), vals.len());
        Self { grid, vals }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.vals
    }

    pub fn dx(&self) -> T {
        self.grid.dx()
    }

    pub fn mass(&self) -> T {
        self.grid.dx() * sum(self.vals.iter().copied())
    }

    pub fn mean(&self) -> T {
        let first = self.grid.dx() * sum(self.grid.points().zip(&self.vals).map(|(x, v)| x * *v));
        first / self.mass()
    }

    /// Second central moment.
    pub fn variance(&self) -> T {
        let mu = self.mean();
        let second = self.grid.dx()
            * sum(
                self.grid
                    .points()
                    .zip(&self.vals)
                    .map(|(x, v)| (x - mu) * (x - mu) * *v),
            );
        second / self.mass()
    }

    /// Expectation of `g(x)`.
    pub fn expect(&self, g: impl Fn(T) -> T) -> T {
        self.grid.dx() * sum(self.grid.points().zip(&self.vals).map(|(x, v)| g(x) * *v))
            / self.mass()
    }

    /// Length of the shortest run of whole cells carrying mass `>= (1 - eps)`
    /// of the total. Resolution is one cell.
    pub fn overall_width(&self, eps: T) -> Result<T> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(Error::InvalidEps(to_f64(eps)));
        }
        // prefix[i] = mass of cells [0, i)
        let mut prefix = Vec::with_capacity(self.vals.len() + 1);
        let mut acc = CompensatedSum::new();
        prefix.push(T::zero());
        for v in &self.vals {
            acc.add(*v);
            prefix.push(acc.value());
        }
        let total = *prefix.last().unwrap();
        let target = (T::one() - eps) * total;
        let n = self.vals.len();
        let mut best = n;
        let mut left = 0usize;
        for right in 1..=n {
            while left < right && prefix[right] - prefix[left + 1] >= target {
                left += 1;
            }
            if prefix[right] - prefix[left] >= target {
                best = best.min(right - left);
            }
        }
        Ok(from_usize::<T>(best) * self.grid.dx())
    }

    /// Linear convolution. The output grid starts at the sum of the input
    /// origins and spans at least the sum of both extents.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if !self.grid.same_spacing(&other.grid) {
            return Err(Error::GridMismatch(format!(
                "convolution needs equal spacing, got {} and {}",
                to_f64(self.dx()),
                to_f64(other.dx())
            )));
        }
        let dx = self.dx();
        let n = next_pow2(self.vals.len() + other.vals.len(), 8);
        let grid = GridSpec::with_spacing(self.grid.x_min() + other.grid.x_min(), dx, n)?;
        let mut vals = fft::linear_convolution(&self.vals, &other.vals, n);
        // transform round-off floor
        let peak = vals.iter().fold(T::zero(), |m, v| m.max(*v));
        let floor = peak * T::epsilon() * lit(16.0);
        for v in vals.iter_mut() {
            *v = if *v > floor { *v * dx } else { T::zero() };
        }
        Ok(Self { grid, vals })
    }

    /// `x -> -x`. The reflected samples land on a grid starting at `dx - x_max`.
    pub fn reflect(&self) -> Self {
        let dx = self.dx();
        let grid = GridSpec::with_spacing(dx - self.grid.x_max(), dx, self.grid.len())
            .expect("reflection of a valid grid");
        let vals = self.vals.iter().rev().copied().collect();
        Self { grid, vals }
    }

    /// `m(x) = int self(x + x') e(x') dx'`, the smearing of `self` by the
    /// error density `e`. Equivalent to `self * reflect(e)`.
    pub fn smear(&self, e: &Self) -> Result<Self> {
        self.convolve(&e.reflect())
    }

    /// Cubic (Catmull-Rom) interpolation between samples, limited to the
    /// range of the two bracketing samples; samples off the grid count as zero.
    pub fn eval(&self, x: T) -> T {
        let f = self.grid.fractional_index(x);
        let n = self.vals.len();
        if !(f > -T::one() && f < from_usize(n)) {
            return T::zero();
        }
        let i0 = f.floor();
        let t = f - i0;
        let i0 = i0.to_i64().unwrap_or(-1);
        let at = |k: i64| {
            if k < 0 || k >= n as i64 {
                T::zero()
            } else {
                self.vals[k as usize]
            }
        };
        let (p1, p2) = (at(i0), at(i0 + 1));
        let v = catmull_rom(at(i0 - 1), p1, p2, at(i0 + 2), t);
        // limited to the bracketing samples: no ringing at jumps, and the
        // overshoot and undershoot a jump would produce carry equal mass
        v.max(p1.min(p2)).min(p1.max(p2))
    }

    /// Index range `[first, last]` of samples exceeding `cutoff * max`.
    pub fn support_indices(&self, cutoff: T) -> (usize, usize) {
        let peak = self.vals.iter().fold(T::zero(), |m, v| m.max(*v));
        let thr = peak * cutoff;
        let first = self.vals.iter().position(|v| *v > thr).unwrap_or(0);
        let last = self
            .vals
            .iter()
            .rposition(|v| *v > thr)
            .unwrap_or(self.vals.len() - 1);
        (first, last)
    }

    /// Coordinates of [`Self::support_indices`].
    pub fn support(&self, cutoff: T) -> (T, T) {
        let (a, b) = self.support_indices(cutoff);
        (self.grid.point(a), self.grid.point(b))
    }

    /// Density of `scale * X + shift` for `X ~ self`, sampled on the lattice
    /// of `lattice` (same spacing and origin lattice).
    ///
    /// Resolved images (standard deviation at least one target cell) are
    /// point-sampled from the interpolated source; narrower images are
    /// deposited cloud-in-cell, which keeps mass and mean exact.
    pub fn pushforward_affine(
        &self,
        scale: T,
        shift: T,
        lattice: &GridSpec<T>,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        if scale == T::zero() || !scale.is_finite() {
            return Err(Error::InvalidParameter("pushforward scale must be nonzero".into()));
        }
        let (lo, hi) = self.support(lit(policy.support_cutoff));
        let (a, b) = (scale * lo + shift, scale * hi + shift);
        let (lo_t, hi_t) = if a <= b { (a, b) } else { (b, a) };
        let target = lattice.covering(lo_t, hi_t, 4, policy.max_auto_points)?;
        let dx = target.dx();
        let sigma = scale.abs() * self.variance().sqrt();
        let vals = if sigma >= dx {
            let jac = T::one() / scale.abs();
            target
                .points()
                .map(|s| self.eval((s - shift) / scale) * jac)
                .collect()
        } else {
            let mut out = vec![T::zero(); target.len()];
            let cell = self.dx();
            for (u, p) in self.grid.points().zip(&self.vals) {
                if *p <= T::zero() {
                    continue;
                }
                let f = target.fractional_index(scale * u + shift);
                let i0 = f.floor();
                let t = f - i0;
                let i0 = i0.to_i64().unwrap_or(-1);
                let m = *p * cell / dx;
                for (k, w) in [(i0, T::one() - t), (i0 + 1, t)] {
                    if k >= 0 && (k as usize) < out.len() {
                        out[k as usize] = out[k as usize] + m * w;
                    }
                }
            }
            out
        };
        Self::normalized(target, vals)
    }
}

#[inline]
pub(crate) fn catmull_rom<T, V>(p0: V, p1: V, p2: V, p3: V, t: T) -> V
where
    T: Real,
    V: Copy + std::ops::Mul<T, Output = V> + std::ops::Add<Output = V>,
{
    let half = lit::<T>(0.5);
    let t2 = t * t;
    let t3 = t2 * t;
    let w0 = half * (-t3 + lit::<T>(2.0) * t2 - t);
    let w1 = half * (lit::<T>(3.0) * t3 - lit::<T>(5.0) * t2 + lit::<T>(2.0));
    let w2 = half * (-lit::<T>(3.0) * t3 + lit::<T>(4.0) * t2 + t);
    let w3 = half * (t3 - t2);
    p0 * w0 + p1 * w1 + p2 * w2 + p3 * w3
}

fn check_len<T: Real>(grid: &GridSpec<T>, len: usize) -> Result<()> {
    if grid.len() != len {
        Err(Error::GridMismatch(format!(
            "{len} samples for a grid of {} points",
            grid.len()
        )))
    } else {
        Ok(())
    }
}

/// `int |a - b|` over the union of two grids sampling a common lattice.
pub fn l1_distance<T: Real>(a: &Density<T>, b: &Density<T>) -> Result<T> {
    let off = a.grid().lattice_offset(b.grid()).ok_or_else(|| {
        Error::GridMismatch("L1 distance needs grids on a common lattice".into())
    })?;
    let na = a.values().len() as i64;
    let nb = b.values().len() as i64;
    let lo = 0.min(off);
    let hi = na.max(off + nb);
    let get = |v: &[T], i: i64| {
        if i < 0 || i >= v.len() as i64 {
            T::zero()
        } else {
            v[i as usize]
        }
    };
    let total = sum((lo..hi).map(|i| (get(a.values(), i) - get(b.values(), i - off)).abs()));
    Ok(total * a.dx())
}

pub fn mean<T: Real>(d: &Density<T>) -> T {
    d.mean()
}

pub fn variance<T: Real>(d: &Density<T>) -> T {
    d.variance()
}

pub fn overall_width<T: Real>(d: &Density<T>, eps: T) -> Result<T> {
    d.overall_width(eps)
}

pub fn convolve<T: Real>(d1: &Density<T>, d2: &Density<T>) -> Result<Density<T>> {
    d1.convolve(d2)
}

pub fn reflect<T: Real>(d: &Density<T>) -> Density<T> {
    d.reflect()
}

pub fn smear<T: Real>(obj: &Density<T>, e: &Density<T>) -> Result<Density<T>> {
    obj.smear(e)
}
