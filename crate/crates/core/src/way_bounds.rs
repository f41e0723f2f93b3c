//! Noise, apparatus momentum spread and the error/momentum trade-off.
//!
//! The noise operator is `N = Z(tau) - Q` with `Z` the calibrated pointer. In
//! both models the position is conserved (`Q(tau) = Q`) and commutes with the
//! calibrated pointer, so `<N^2>` is the second moment of `w - x` under the
//! joint object/outcome density, and `mu^2 = <(Q(tau) - Z(tau))^2>` coincides
//! with it.
//!
//! The uncertainty relation for `N` and the total momentum gives
//! `eps^2 >= |<[Z(tau) - Q, P + P_A]>|^2 / (4 (Delta P_total)^2)`. Under the
//! Yanase condition the commutator is `i` and the object term drops, leaving
//! `eps^2 >= 1 / (4 (Delta P_A)^2)`.

use crate::alt_model::{AltParams, AltProbe};
use crate::error::{Error, Result};
use crate::ozawa_model::{OzawaParams, OzawaProbe};
use crate::policy::NumericPolicy;
use crate::repeatability::JointDensity;
use crate::scalar::{lit, to_f64, Real};
use crate::{Model, WaveFunction};

/// Apparatus of either model.
#[derive(Debug, Clone, Copy)]
pub enum Apparatus<'a, T> {
    Ozawa(&'a OzawaProbe<T>),
    Alt(&'a AltProbe<T>),
}

impl<T> Apparatus<'_, T> {
    pub fn model(&self) -> Model {
        match self {
            Self::Ozawa(_) => Model::Ozawa,
            Self::Alt(_) => Model::Alt,
        }
    }
}

/// `eps(phi)^2 = int int (w - x)^2 p(x, w) dx dw`.
pub fn noise_moment<T: Real>(j: &JointDensity<T>) -> Result<T> {
    let m = j.mass();
    if (m - T::one()).abs() > lit(1e-4) {
        return Err(Error::MassDeficit(to_f64(m)));
    }
    Ok(j.expect(|x, w| (w - x) * (w - x)) / m)
}

/// `mu(phi)^2`; equal to [`noise_moment`] because both models conserve `Q`.
pub fn mu_moment<T: Real>(j: &JointDensity<T>) -> Result<T> {
    noise_moment(j)
}

/// `(Delta P_A)^2` of the whole apparatus. In the four-particle model the
/// reference momentum and the `v` mode (itself the sum of the two pointer
/// momenta) carry the apparatus momentum.
pub fn apparatus_momentum_spread_sq<T: Real>(app: Apparatus<'_, T>) -> Result<T> {
    match app {
        Apparatus::Ozawa(p) => {
            Ok(p.phi1.momentum_density()?.variance() + p.phi_v.density().variance())
        }
        Apparatus::Alt(p) => Ok(p.phi_probe.momentum_density()?.variance()),
    }
}

/// Momentum variance of the particle that carries the reference position
/// (`Phi1` or the probe) alone.
pub fn reference_momentum_spread_sq<T: Real>(app: Apparatus<'_, T>) -> Result<T> {
    match app {
        Apparatus::Ozawa(p) => Ok(p.phi1.momentum_density()?.variance()),
        Apparatus::Alt(p) => Ok(p.phi_probe.momentum_density()?.variance()),
    }
}

/// `|<[Z(tau) - Q, P + P_A]>|` for the calibrated pointer.
pub fn commutator_magnitude<T: Real>(model: Model, lambda: T) -> Result<T> {
    match model {
        Model::Ozawa => OzawaParams::new(lambda).map(|_| T::one()),
        Model::Alt => {
            let p = AltParams::new(lambda)?;
            Ok(T::one() / p.gain())
        }
    }
}

/// Quantities entering the trade-off inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs<T> {
    pub model: Model,
    pub lambda: T,
    pub eps_sq: T,
    pub mu_sq: T,
    pub delta_p_object_sq: T,
    pub delta_p_apparatus_sq: T,
    pub delta_p_reference_sq: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport<T> {
    pub model: Model,
    pub lambda: T,
    pub eps_sq: T,
    pub mu_sq: T,
    pub delta_p_apparatus_sq: T,
    /// Momentum variance of the reference particle alone.
    pub delta_p_reference_sq: T,
    pub delta_p_object_sq: T,
    pub commutator_magnitude: T,
    /// `c^2 / (4 (Delta P^2 + Delta P_A^2))`.
    pub rhs_general: T,
    /// `1 / (4 Delta P_A^2)`.
    pub rhs_yanase: T,
    pub general_ok: bool,
    pub yanase_ok: bool,
    pub mu_yanase_ok: bool,
    /// Whether the pointer satisfies the Yanase condition, so that a
    /// violated `rhs_yanase` would contradict the theory.
    pub yanase_applicable: bool,
}

/// Evaluates both inequalities with the relative slack of `policy`.
pub fn check_bounds_with<T: Real>(inp: &BoundInputs<T>, policy: &NumericPolicy) -> Result<BoundReport<T>> {
    let finite = [
        inp.lambda,
        inp.eps_sq,
        inp.mu_sq,
        inp.delta_p_object_sq,
        inp.delta_p_apparatus_sq,
        inp.delta_p_reference_sq,
    ]
    .iter()
    .all(|v| v.is_finite());
    if !finite {
        return Err(Error::InvalidParameter("bound inputs must be finite".into()));
    }
    let c = commutator_magnitude(inp.model, inp.lambda)?;
    let four = lit::<T>(4.0);
    let rhs_general = c * c / (four * (inp.delta_p_object_sq + inp.delta_p_apparatus_sq));
    let rhs_yanase = T::one() / (four * inp.delta_p_apparatus_sq);
    let keep = T::one() - lit(policy.bound_slack);
    Ok(BoundReport {
        model: inp.model,
        lambda: inp.lambda,
        eps_sq: inp.eps_sq,
        mu_sq: inp.mu_sq,
        delta_p_apparatus_sq: inp.delta_p_apparatus_sq,
        delta_p_reference_sq: inp.delta_p_reference_sq,
        delta_p_object_sq: inp.delta_p_object_sq,
        commutator_magnitude: c,
        rhs_general,
        rhs_yanase,
        general_ok: inp.eps_sq >= rhs_general * keep,
        yanase_ok: inp.eps_sq >= rhs_yanase * keep,
        mu_yanase_ok: inp.mu_sq >= rhs_yanase * keep,
        yanase_applicable: inp.model == Model::Ozawa,
    })
}

pub fn check_bounds<T: Real>(inp: &BoundInputs<T>) -> Result<BoundReport<T>> {
    check_bounds_with(inp, &NumericPolicy::DEFAULT)
}

/// Builds the joint density for `obj` and evaluates every bound.
pub fn evaluate<T: Real>(obj: &WaveFunction<T>, app: Apparatus<'_, T>, lambda: T) -> Result<BoundReport<T>> {
    let j = match app {
        Apparatus::Ozawa(p) => crate::ozawa_model::joint_object_outcome_density(obj, p, lambda)?,
        Apparatus::Alt(p) => crate::alt_model::joint_object_outcome_density(obj, p, lambda)?,
    };
    let eps_sq = noise_moment(&j)?;
    check_bounds(&BoundInputs {
        model: app.model(),
        lambda,
        eps_sq,
        mu_sq: mu_moment(&j)?,
        delta_p_object_sq: obj.momentum_density()?.variance(),
        delta_p_apparatus_sq: apparatus_momentum_spread_sq(app)?,
        delta_p_reference_sq: reference_momentum_spread_sq(app)?,
    })
}
