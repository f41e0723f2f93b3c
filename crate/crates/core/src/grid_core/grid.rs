use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// Uniform sampling of `[x_min, x_max)` with `n` points `x_i = x_min + i*dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    x_min: T,
    x_max: T,
    n: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidRange {
                x_min: to_f64(x_min),
                x_max: to_f64(x_max),
            });
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Grid of `n` points starting at `x_min` with spacing `dx`.
    pub fn with_spacing(x_min: T, dx: T, n: usize) -> Result<Self> {
        Self::new(x_min, x_min + dx * from_usize(n), n)
    }

    /// Grid centered on zero: `x_min = -(n/2) dx`.
    pub fn centered(dx: T, n: usize) -> Result<Self> {
        Self::with_spacing(-dx * from_usize::<T>(n / 2), dx, n)
    }

    #[inline]
    pub fn x_min(&self) -> T {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> T {
        self.x_max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / from_usize(self.n)
    }

    #[inline]
    pub fn point(&self, i: usize) -> T {
        self.x_min + self.dx() * from_usize(i)
    }

    /// Last sample point, `x_max - dx`.
    #[inline]
    pub fn last_point(&self) -> T {
        self.point(self.n - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    /// Fractional index of `x`: `(x - x_min) / dx`.
    #[inline]
    pub fn fractional_index(&self, x: T) -> T {
        (x - self.x_min) / self.dx()
    }

    /// Index of the sample nearest to `x`, if `x` lies within half a cell of the grid.
    pub fn nearest_index(&self, x: T) -> Option<usize> {
        let f = self.fractional_index(x).round();
        if f < T::zero() || f > from_usize(self.n - 1) {
            None
        } else {
            f.to_usize()
        }
    }

    /// Conjugate (momentum) grid: spacing `2*pi/(n*dx)`, centered at zero.
    pub fn conjugate(&self) -> Self {
        let dk = lit::<T>(2.0) * T::PI() / (from_usize::<T>(self.n) * self.dx());
        Self::centered(dk, self.n).expect("conjugate of a valid grid is valid")
    }

    /// True when both grids share a spacing within relative `1e-9`.
    pub fn same_spacing(&self, other: &Self) -> bool {
        let a = self.dx();
        let b = other.dx();
        (a - b).abs() <= lit::<T>(1e-9) * a.max(b)
    }

    /// Integer offset (in cells) of `other`'s origin relative to `self`'s,
    /// when the two grids sample a common lattice.
    pub fn lattice_offset(&self, other: &Self) -> Option<i64> {
        if !self.same_spacing(other) {
            return None;
        }
        let f = (other.x_min - self.x_min) / self.dx();
        let r = f.round();
        if (f - r).abs() <= lit(1e-6) {
            r.to_i64()
        } else {
            None
        }
    }

    /// Grid with the same spacing and origin lattice covering `[lo, hi]`,
    /// padded by `margin` cells per side, rounded up to a power of two.
    pub fn covering(&self, lo: T, hi: T, margin: usize, max_points: usize) -> Result<Self> {
        let dx = self.dx();
        let first = ((lo - self.x_min) / dx).floor() - from_usize(margin);
        let last = ((hi - self.x_min) / dx).ceil() + from_usize(margin);
        let span = (last - first).to_usize().unwrap_or(usize::MAX).saturating_add(1);
        if span > max_points {
            return Err(Error::GridInadequate(format!(
                "covering [{}, {}] at dx = {} needs {} points",
                to_f64(lo),
                to_f64(hi),
                to_f64(dx),
                span
            )));
        }
        let n = crate::scalar::next_pow2(span, 8);
        // keep the requested interval centered within the padded grid
        let extra = from_usize::<T>((n - span) / 2);
        Self::with_spacing(self.x_min + (first - extra) * dx, dx, n)
    }
}

/// Builds a validated grid.
pub fn make_grid<T: Real>(x_min: T, x_max: T, n: usize) -> Result<GridSpec<T>> {
    GridSpec::new(x_min, x_max, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_examples() {
        let g = make_grid::<f64>(-8.0, 8.0, 1024).unwrap();
        assert_eq!(g.dx(), 0.015625);
        let g = make_grid::<f64>(0.0, 1.0, 8).unwrap();
        assert_eq!(g.dx(), 0.125);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            make_grid::<f64>(1.0, 0.0, 64),
            Err(Error::InvalidRange { .. })
        ));
        assert_eq!(make_grid::<f64>(0.0, 1.0, 100), Err(Error::NotPowerOfTwo(100)));
        assert_eq!(make_grid::<f64>(0.0, 1.0, 4), Err(Error::NotPowerOfTwo(4)));
    }

    #[test]
    fn conjugate_grid_is_centered() {
        let g = make_grid::<f64>(-8.0, 8.0, 1024).unwrap();
        let k = g.conjugate();
        assert!((k.dx() - 2.0 * std::f64::consts::PI / 16.0).abs() < 1e-12);
        assert_eq!(k.point(512), 0.0);
    }

    #[test]
    fn covering_stays_on_lattice() {
        let g = make_grid::<f64>(-8.0, 8.0, 1024).unwrap();
        let c = g.covering(-20.3, 3.1, 2, 1 << 20).unwrap();
        assert!(c.x_min() <= -20.3 && c.last_point() >= 3.1);
        assert!(g.lattice_offset(&c).is_some());
        assert!(c.len().is_power_of_two());
    }

    #[test]
    fn f32_grid() {
        let g = make_grid(-1.0f32, 1.0, 16).unwrap();
        assert_eq!(g.dx(), 0.125f32);
    }
}
