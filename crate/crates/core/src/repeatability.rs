//! Approximate repeatability of a position measurement.
//!
//! A measurement is δ-repeatable when an outcome in a set `X` implies, with
//! probability one, that an immediate accurate position measurement finds the
//! particle within distance δ of `X`. Here "probability one" is relaxed to
//! `1 - eps`, and the quantifier over all sets `X` is approximated by a finite
//! family of grid-aligned intervals together with unions of adjacent ones.

use crate::error::{Error, Result};
use crate::grid_core::{Density, GridSpec};
use crate::policy::NumericPolicy;
use crate::scalar::{from_usize, lit, sum, to_f64, CompensatedSum, Real};
use crate::Model;

/// Joint density of object position `x` and calibrated outcome `w`.
/// Row-major: `vals[i * n_w + j]` is the value at `(x_i, w_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDensity<T> {
    x_grid: GridSpec<T>,
    w_grid: GridSpec<T>,
    vals: Vec<T>,
}

impl<T: Real> JointDensity<T> {
    /// Validates shape, nonnegativity and unit mass within `tol`.
    pub fn new(x_grid: GridSpec<T>, w_grid: GridSpec<T>, vals: Vec<T>, tol: f64) -> Result<Self> {
        if vals.len() != x_grid.len() * w_grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} joint samples for a {}x{} grid",
                vals.len(),
                x_grid.len(),
                w_grid.len()
            )));
        }
        if !x_grid.same_spacing(&w_grid) {
            return Err(Error::GridMismatch(
                "object and outcome grids must share a spacing".into(),
            ));
        }
        if vals.iter().any(|v| !(*v >= T::zero())) {
            return Err(Error::InvalidParameter(
                "joint density values must be nonnegative".into(),
            ));
        }
        let j = Self {
            x_grid,
            w_grid,
            vals,
        };
        let m = j.mass();
        if (m - T::one()).abs() > lit(tol) {
            return Err(Error::MassDeficit(to_f64(m)));
        }
        Ok(j)
    }

    pub fn x_grid(&self) -> &GridSpec<T> {
        &self.x_grid
    }

    pub fn w_grid(&self) -> &GridSpec<T> {
        &self.w_grid
    }

    pub fn values(&self) -> &[T] {
        &self.vals
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.vals[i * self.w_grid.len() + j]
    }

    fn cell(&self) -> T {
        self.x_grid.dx() * self.w_grid.dx()
    }

    pub fn mass(&self) -> T {
        sum(self.vals.iter().copied()) * self.cell()
    }

    /// Object-position marginal.
    pub fn marginal_x(&self) -> Result<Density<T>> {
        let nw = self.w_grid.len();
        let dw = self.w_grid.dx();
        let vals = self
            .vals
            .chunks(nw)
            .map(|row| sum(row.iter().copied()) * dw)
            .collect();
        Density::normalized(self.x_grid, vals)
    }

    /// Outcome marginal.
    pub fn marginal_w(&self) -> Result<Density<T>> {
        let nw = self.w_grid.len();
        let mut acc = vec![CompensatedSum::new(); nw];
        for row in self.vals.chunks(nw) {
            for (a, v) in acc.iter_mut().zip(row) {
                a.add(*v);
            }
        }
        let dx = self.x_grid.dx();
        Density::normalized(self.w_grid, acc.iter().map(|a| a.value() * dx).collect())
    }

    /// `int g(x, w) p(x, w) dx dw`.
    pub fn expect(&self, g: impl Fn(T, T) -> T) -> T {
        let nw = self.w_grid.len();
        let mut acc = CompensatedSum::new();
        for (i, row) in self.vals.chunks(nw).enumerate() {
            let x = self.x_grid.point(i);
            for (j, v) in row.iter().enumerate() {
                if *v > T::zero() {
                    acc.add(g(x, self.w_grid.point(j)) * *v);
                }
            }
        }
        acc.value() * self.cell()
    }

    /// Per-object-cell mass of the event `w in X`: `s(x_i) = sum_{w_j in X} p(x_i, w_j) dw`.
    fn slice_mass(&self, x: &Interval<T>) -> Vec<T> {
        let nw = self.w_grid.len();
        let (j0, j1) = x.index_range(&self.w_grid);
        let dw = self.w_grid.dx();
        self.vals
            .chunks(nw)
            .map(|row| {
                if j0 >= j1 {
                    T::zero()
                } else {
                    sum(row[j0..j1].iter().copied()) * dw
                }
            })
            .collect()
    }
}

/// Half-open interval `[a, b)` of outcome values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> Interval<T> {
    pub fn new(a: T, b: T) -> Self {
        Self { a, b }
    }

    /// Indices `[j0, j1)` of the grid points `w_j` with `a <= w_j < b`.
    fn index_range(&self, grid: &GridSpec<T>) -> (usize, usize) {
        let n = grid.len();
        let eps = lit::<T>(1e-9);
        let clamp = |f: T| -> usize {
            let c = (f - eps).ceil();
            if c <= T::zero() {
                0
            } else {
                c.to_usize().unwrap_or(n).min(n)
            }
        };
        (
            clamp(grid.fractional_index(self.a)),
            clamp(grid.fractional_index(self.b)),
        )
    }
}

/// Finite family of conditioning events.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalFamily<T> {
    intervals: Vec<Interval<T>>,
}

impl<T: Real> IntervalFamily<T> {
    /// Explicit list of grid-aligned, non-overlapping intervals.
    pub fn new(mut intervals: Vec<Interval<T>>) -> Result<Self> {
        intervals.sort_by(|p, q| p.a.partial_cmp(&q.a).expect("finite bounds"));
        for w in intervals.windows(2) {
            if w[1].a < w[0].b {
                return Err(Error::InvalidParameter("intervals overlap".into()));
            }
        }
        if intervals.iter().any(|i| !(i.b > i.a)) {
            return Err(Error::InvalidParameter("empty interval".into()));
        }
        Ok(Self { intervals })
    }

    /// Partition of `[lo, hi)` into intervals of `cells` grid cells each.
    /// `lo` is snapped down to the grid lattice.
    pub fn partition(grid: &GridSpec<T>, lo: T, hi: T, cells: usize) -> Result<Self> {
        if cells == 0 || !(hi > lo) {
            return Err(Error::InvalidParameter("empty partition window".into()));
        }
        let dx = grid.dx();
        let start = grid.x_min() + (grid.fractional_index(lo) + lit(1e-9)).floor() * dx;
        let width = dx * from_usize(cells);
        let mut intervals = Vec::new();
        let mut a = start;
        while a < hi {
            intervals.push(Interval::new(a, a + width));
            a = a + width;
        }
        Self::new(intervals)
    }

    /// Partition of the outcome window where the marginal has support.
    pub fn covering_support(j: &JointDensity<T>, cells: usize, policy: &NumericPolicy) -> Result<Self> {
        let m = j.marginal_w()?;
        let (lo, hi) = m.support(lit(policy.support_cutoff));
        Self::partition(j.w_grid(), lo, hi + j.w_grid().dx(), cells)
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    /// Members plus the unions of up to `order` adjacent members.
    pub fn events(&self, order: usize) -> Vec<Interval<T>> {
        let mut out = Vec::new();
        for k in 1..=order.max(1) {
            for w in self.intervals.windows(k) {
                let contiguous = w.windows(2).all(|p| (p[1].a - p[0].b).abs() <= lit(1e-9));
                if contiguous {
                    out.push(Interval::new(w[0].a, w[k - 1].b));
                }
            }
        }
        out
    }
}

/// Smallest mass of the conditioning event `w in X` treated as non-null.
pub const NULL_EVENT_MASS: f64 = 1e-8;

/// `P(x in X_delta | w in X)` with `X_delta` the points within `delta` of the
/// outcome samples lying in `X`.
pub fn conditional_prob<T: Real>(j: &JointDensity<T>, x: &Interval<T>, delta: T) -> Result<T> {
    let s = j.slice_mass(x);
    let dx = j.x_grid().dx();
    let total = sum(s.iter().copied()) * dx;
    if !(total > lit(NULL_EVENT_MASS)) {
        return Err(Error::NullConditioningEvent(to_f64(total)));
    }
    let (lo, hi) = sample_hull(j.w_grid(), x);
    let tol = dx * lit(1e-6);
    let inside = sum(j
        .x_grid()
        .points()
        .zip(&s)
        .filter(|(xp, _)| *xp >= lo - delta - tol && *xp <= hi + delta + tol)
        .map(|(_, v)| *v))
        * dx;
    Ok(inside / total)
}

/// Outermost outcome samples inside `X`.
fn sample_hull<T: Real>(grid: &GridSpec<T>, x: &Interval<T>) -> (T, T) {
    let (j0, j1) = x.index_range(grid);
    if j0 >= j1 {
        (x.a, x.a)
    } else {
        (grid.point(j0), grid.point(j1 - 1))
    }
}

/// Minimal grid-multiple δ for one event, or `None` when the event is null.
fn event_width<T: Real>(j: &JointDensity<T>, x: &Interval<T>, eps: T) -> Result<Option<T>> {
    let s = j.slice_mass(x);
    let xg = j.x_grid();
    let dx = xg.dx();
    let total = sum(s.iter().copied());
    if !(total * dx > lit(NULL_EVENT_MASS)) {
        return Ok(None);
    }
    let (lo, hi) = sample_hull(j.w_grid(), x);
    // index range [i0, i1] of x-samples inside [lo, hi]
    let n = xg.len() as i64;
    let tol = lit::<T>(1e-9);
    let i0 = (xg.fractional_index(lo) - tol).ceil().to_i64().unwrap_or(0);
    let i1 = (xg.fractional_index(hi) + tol).floor().to_i64().unwrap_or(n - 1);
    let allowed = eps * total;
    let get = |i: i64| -> T {
        if i < 0 || i >= n {
            T::zero()
        } else {
            s[i as usize]
        }
    };
    // outside mass for k extra cells on each side, computed from both tails
    let mut left_tail = vec![T::zero(); (n + 2) as usize];
    let mut acc = CompensatedSum::new();
    for i in 0..n {
        acc.add(get(i));
        left_tail[i as usize + 1] = acc.value();
    }
    let mass_below = |i: i64| -> T {
        // sum of s over indices < i
        let c = i.clamp(0, n) as usize;
        left_tail[c]
    };
    let total_c = left_tail[n as usize];
    let max_k = n + (i1 - i0).abs() + 2;
    for k in 0..=max_k {
        let below = mass_below(i0 - k);
        let above = total_c - mass_below(i1 + k + 1);
        if below + above <= allowed {
            return Ok(Some(from_usize::<T>(k as usize) * dx));
        }
    }
    Err(Error::NoFiniteDelta)
}

/// Smallest grid-multiple δ with `conditional_prob >= 1 - eps` for every
/// non-null event of `family` (members and adjacent pairs).
pub fn repeatability_width<T: Real>(
    j: &JointDensity<T>,
    family: &IntervalFamily<T>,
    eps: T,
) -> Result<T> {
    repeatability_width_with_order(j, family, eps, 2)
}

pub fn repeatability_width_with_order<T: Real>(
    j: &JointDensity<T>,
    family: &IntervalFamily<T>,
    eps: T,
    order: usize,
) -> Result<T> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::InvalidEps(to_f64(eps)));
    }
    let mut worst: Option<T> = None;
    for x in family.events(order) {
        if let Some(d) = event_width(j, &x, eps)? {
            worst = Some(worst.map_or(d, |w| w.max(d)));
        }
    }
    worst.ok_or(Error::NoFiniteDelta)
}

/// Support halfwidths of compactly supported probe states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeSupports<T> {
    /// Reference state on `[-l, l]`, pointer state on `[-m, m]`.
    Ozawa { l: T, m: T },
    /// Probe state on `[-n, n]`.
    Alt { n: T },
}

/// Halfwidth `d` of the interval carrying the error density, as stated for
/// each model: `l + m/lambda` (ozawa) and `n/(e^lambda - 1)` (alt).
pub fn predicted_halfwidth<T: Real>(model: Model, supports: ProbeSupports<T>, lambda: T) -> Result<T> {
    check_lambda(lambda)?;
    match (model, supports) {
        (Model::Ozawa, ProbeSupports::Ozawa { l, m }) => Ok(l + m / lambda),
        (Model::Alt, ProbeSupports::Alt { n }) => Ok(n / lambda.exp_m1()),
        _ => Err(Error::InvalidParameter(
            "probe supports do not match the model".into(),
        )),
    }
}

/// Exact support halfwidth of the error density built by this crate. For the
/// ozawa model the pointer is calibrated by `w = -(2/lambda) u`, so a pointer
/// state on `[-m, m]` contributes `2m/lambda`.
pub fn support_halfwidth<T: Real>(model: Model, supports: ProbeSupports<T>, lambda: T) -> Result<T> {
    check_lambda(lambda)?;
    match (model, supports) {
        (Model::Ozawa, ProbeSupports::Ozawa { l, m }) => Ok(l + lit::<T>(2.0) * m / lambda),
        (Model::Alt, ProbeSupports::Alt { n }) => Ok(n / lambda.exp_m1()),
        _ => Err(Error::InvalidParameter(
            "probe supports do not match the model".into(),
        )),
    }
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if lambda > T::zero() && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {}",
            to_f64(lambda)
        )))
    }
}
