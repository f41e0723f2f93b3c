//! Central numeric tolerances.

/// Every tolerance used by checks and preconditions. Refining a grid study
/// only needs a different instance of this record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Allowed deviation of a density's mass from 1.
    pub mass: f64,
    /// Allowed deviation of a wavefunction's L2 norm from 1.
    pub norm: f64,
    /// Absolute moment tolerance.
    pub moment_abs: f64,
    /// Relative moment tolerance.
    pub moment_rel: f64,
    /// Overall-width tolerance in grid cells.
    pub width_cells: f64,
    /// Relative amplitude allowed in the outer boundary band.
    pub boundary_rel: f64,
    /// Fraction of the grid (per side) forming the boundary band.
    pub boundary_frac: f64,
    /// Relative value below which a density sample counts as outside the support.
    pub support_cutoff: f64,
    /// L1 gap allowed between quadrature and closed-form outcome statistics.
    pub oracle_l1: f64,
    /// Relative slack for the error/momentum trade-off inequalities.
    pub bound_slack: f64,
    /// Smallest admissible coupling for scaled pointers.
    pub min_lambda: f64,
    /// Largest grid generated automatically.
    pub max_auto_points: usize,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        mass: 1e-6,
        norm: 1e-9,
        moment_abs: 1e-4,
        moment_rel: 0.01,
        width_cells: 2.0,
        boundary_rel: 1e-6,
        boundary_frac: 0.02,
        support_cutoff: 1e-14,
        oracle_l1: 1e-3,
        bound_slack: 0.02,
        min_lambda: 1e-9,
        max_auto_points: 1 << 20,
    };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}
