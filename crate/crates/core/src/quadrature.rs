//! Trapezoid nodes and translation kernels shared by the brute-force outcome
//! integrals of both models.

use crate::error::{Error, Result};
use crate::grid_core::{Density, GridSpec};
use crate::scalar::{lit, Real};

/// A trapezoid node: sample index, abscissa and `weight * value`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Node<T> {
    pub index: usize,
    pub x: T,
    pub w: T,
}

/// Nodes for every sample of `d` above `cutoff * max`, with trapezoid weights
/// (half weight at the two grid ends).
pub(crate) fn trapezoid_nodes<T: Real>(d: &Density<T>, cutoff: f64) -> Vec<Node<T>> {
    let vals = d.values();
    let peak = vals.iter().fold(T::zero(), |m, v| m.max(*v));
    let thr = peak * lit(cutoff);
    let dx = d.dx();
    let last = vals.len() - 1;
    d.grid()
        .points()
        .zip(vals)
        .enumerate()
        .filter(|(_, (_, v))| **v > thr)
        .map(|(i, (x, v))| {
            let wt = if i == 0 || i == last { dx * lit(0.5) } else { dx };
            Node {
                index: i,
                x,
                w: wt * *v,
            }
        })
        .collect()
}

/// Values `k(x_i - w_j)` for every pair of samples of an object grid and an
/// outcome grid on a common lattice. Only the `n_x + n_w - 1` distinct
/// differences are stored.
#[derive(Debug, Clone)]
pub(crate) struct LatticeKernel<T> {
    n_w: usize,
    vals: Vec<T>,
}

impl<T: Real> LatticeKernel<T> {
    /// Differences `t_m = x_i - w_j` with `m = i - j + n_w - 1`.
    fn differences(x: &GridSpec<T>, w: &GridSpec<T>) -> Result<Vec<T>> {
        let off = x.lattice_offset(w).ok_or_else(|| {
            Error::GridMismatch("object and outcome grids must share a lattice".into())
        })?;
        let dx = x.dx();
        let base = w.len() as i64 - 1 + off;
        Ok((0..x.len() + w.len() - 1)
            .map(|m| dx * lit::<T>((m as i64 - base) as f64))
            .collect())
    }

    pub fn from_fn(x: &GridSpec<T>, w: &GridSpec<T>, k: impl Fn(T) -> T) -> Result<Self> {
        let vals = Self::differences(x, w)?.into_iter().map(k).collect();
        Ok(Self { n_w: w.len(), vals })
    }

    /// Looks the differences up in a density sampled on the same lattice.
    pub fn from_density(x: &GridSpec<T>, w: &GridSpec<T>, k: &Density<T>) -> Result<Self> {
        let kg = k.grid();
        if !kg.same_spacing(x) {
            return Err(Error::GridMismatch("kernel spacing differs from object grid".into()));
        }
        let vals = Self::differences(x, w)?
            .into_iter()
            .map(|t| match kg.nearest_index(t) {
                Some(i) => k.values()[i],
                None => T::zero(),
            })
            .collect();
        Ok(Self { n_w: w.len(), vals })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.vals[i + self.n_w - 1 - j]
    }

    /// `q(w_j) = sum_i trap_i P(x_i) k(x_i - w_j)`.
    pub fn outcome(&self, obj: &[Node<T>]) -> Vec<T> {
        (0..self.n_w)
            .map(|j| {
                obj.iter()
                    .fold(T::zero(), |acc, n| acc + n.w * self.at(n.index, j))
            })
            .collect()
    }

    /// Row-major joint values `P(x_i) k(x_i - w_j)`.
    pub fn joint(&self, obj: &Density<T>) -> Vec<T> {
        let mut out = Vec::with_capacity(obj.values().len() * self.n_w);
        for (i, p) in obj.values().iter().enumerate() {
            out.extend((0..self.n_w).map(|j| *p * self.at(i, j)));
        }
        out
    }
}

/// Replaces tiny negative round-off by zero.
pub(crate) fn clamp_nonneg<T: Real>(v: &mut [T]) {
    for x in v {
        if !(*x > T::zero()) {
            *x = T::zero();
        }
    }
}

/// Unit norm and no amplitude in the boundary band.
pub(crate) fn check_input<T: Real>(
    psi: &crate::grid_core::WaveFunction<T>,
    policy: &crate::policy::NumericPolicy,
) -> Result<()> {
    let n = psi.norm_sq();
    if (n - T::one()).abs() > lit(policy.mass) {
        return Err(Error::NonNormalized(crate::scalar::to_f64(n)));
    }
    psi.check_boundary(policy)
}

/// Fails with [`Error::Leakage`] when a quadrature result lost mass.
pub(crate) fn check_mass<T: Real>(what: &str, mass: T, tol: f64) -> Result<()> {
    if (mass - T::one()).abs() > lit(tol) {
        return Err(Error::Leakage(format!(
            "{what} has mass {}",
            crate::scalar::to_f64(mass)
        )));
    }
    Ok(())
}
