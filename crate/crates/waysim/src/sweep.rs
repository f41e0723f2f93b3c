//! One record of derived quantities per coupling value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use waysim_core::alt_model::{self, AltParams, AltProbe};
use waysim_core::ozawa_model::{self, OzawaProbe};
use waysim_core::repeatability::{self, ProbeSupports};
use waysim_core::way_bounds::{self, Apparatus, BoundInputs};
use waysim_core::{
    grid_core, Density64, Grid64, IntervalFamily, JointDensity64, Model, NumericPolicy, WaveFunction64,
};

use crate::config::{ModelName, StateSpec, SweepConfig};
use crate::error::CliError;

/// Smallest grid accepted for a sweep.
pub const MIN_POINTS: usize = 64;
/// Every state scale must span this many cells.
pub const MIN_CELLS_PER_SCALE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub lambda: f64,
    pub var_e: f64,
    /// Closed-form variance of the error density.
    pub var_e_expected: f64,
    pub mean_e: f64,
    pub width_e: f64,
    /// Overall width of `|Phi1|^2` (ozawa only).
    pub width_reference: Option<f64>,
    pub eps_sq: f64,
    /// Largest noise moment over the object and the random object states.
    pub eps_sq_sup: f64,
    pub mu_sq: f64,
    pub delta_p_object_sq: f64,
    pub delta_p_apparatus_sq: f64,
    pub delta_p_reference_sq: f64,
    pub commutator: f64,
    pub rhs_general: f64,
    pub rhs_yanase: f64,
    pub bound_general_ok: bool,
    pub bound_yanase_ok: bool,
    pub yanase_applicable: bool,
    pub repeat_width: f64,
    pub predicted_d: Option<f64>,
    pub support_d: Option<f64>,
    pub oracle_l1_gap: f64,
}

#[derive(Debug, Clone)]
pub enum ApparatusState {
    Ozawa(OzawaProbe<f64>),
    Alt(AltProbe<f64>),
}

impl ApparatusState {
    pub fn view(&self) -> Apparatus<'_, f64> {
        match self {
            Self::Ozawa(p) => Apparatus::Ozawa(p),
            Self::Alt(p) => Apparatus::Alt(p),
        }
    }
}

/// Sampled states shared by all coupling values.
#[derive(Debug, Clone)]
pub struct Setup {
    pub model: Model,
    pub grid: Grid64,
    pub object: WaveFunction64,
    pub extra_objects: Vec<WaveFunction64>,
    pub apparatus: ApparatusState,
    pub supports: Option<ProbeSupports<f64>>,
}

fn sample(grid: &Grid64, spec: &StateSpec, name: &str) -> Result<WaveFunction64, CliError> {
    let dx = grid.dx();
    if spec.resolution_scale() < MIN_CELLS_PER_SCALE * dx {
        return Err(CliError::numeric(
            name,
            waysim_core::Error::GridInadequate(format!(
                "scale {} is below {MIN_CELLS_PER_SCALE} cells of {dx}",
                spec.resolution_scale()
            )),
        ));
    }
    grid_core::sample_wavefunction(grid, &spec.family()).map_err(|e| CliError::numeric(name, e))
}

fn random_state(rng: &mut ChaCha8Rng) -> StateSpec {
    let center = rng.gen_range(-0.5..0.5);
    let sigma = rng.gen_range(0.5..1.2);
    if rng.gen_bool(0.5) {
        StateSpec::Gaussian { center, sigma }
    } else {
        StateSpec::SkewedGaussian {
            center,
            sigma,
            skew: rng.gen_range(-4.0..4.0),
        }
    }
}

/// Validates the grid and samples every state of the configuration.
pub fn prepare(cfg: &SweepConfig) -> Result<Setup, CliError> {
    cfg.validate()?;
    let g = cfg.grid;
    if g.n < MIN_POINTS {
        return Err(CliError::numeric(
            "grid",
            waysim_core::Error::GridInadequate(format!("{} points; at least {MIN_POINTS} needed", g.n)),
        ));
    }
    let grid = grid_core::make_grid(g.x_min, g.x_max, g.n).map_err(|e| CliError::Config(e.to_string()))?;
    let object = sample(&grid, &cfg.object_state, "object state")?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let extra_objects = (0..cfg.random_objects)
        .map(|k| sample(&grid, &random_state(&mut rng), &format!("random object {k}")))
        .collect::<Result<Vec<_>, _>>()?;
    let (apparatus, supports) = match cfg.model {
        ModelName::Ozawa => {
            let s = &cfg.probes.ozawa;
            let probe = OzawaProbe::new(
                sample(&grid, &s.phi1, "phi1")?,
                sample(&grid, &s.phi2, "phi2")?,
                sample(&grid, &s.phi_v, "phi_v")?,
            )
            .map_err(|e| CliError::numeric("ozawa probe", e))?;
            let supports = match (s.phi1.compact_halfwidth(), s.phi2.compact_halfwidth()) {
                (Some(l), Some(m)) => Some(ProbeSupports::Ozawa { l, m }),
                _ => None,
            };
            (ApparatusState::Ozawa(probe), supports)
        }
        ModelName::Alt => {
            let s = &cfg.probes.alt;
            let probe = AltProbe::new(sample(&grid, &s.probe, "probe")?)
                .map_err(|e| CliError::numeric("alt probe", e))?;
            let supports = s.probe.compact_halfwidth().map(|n| ProbeSupports::Alt { n });
            (ApparatusState::Alt(probe), supports)
        }
    };
    Ok(Setup {
        model: cfg.model.into(),
        grid,
        object,
        extra_objects,
        apparatus,
        supports,
    })
}

impl Setup {
    pub fn error_density(&self, lambda: f64) -> waysim_core::Result<Density64> {
        match &self.apparatus {
            ApparatusState::Ozawa(p) => ozawa_model::error_density(p, lambda),
            ApparatusState::Alt(p) => alt_model::error_density(p, lambda),
        }
    }

    pub fn scaled_outcome_density(&self, obj: &WaveFunction64, lambda: f64) -> waysim_core::Result<Density64> {
        match &self.apparatus {
            ApparatusState::Ozawa(p) => ozawa_model::scaled_outcome_density(obj, p, lambda),
            ApparatusState::Alt(p) => alt_model::scaled_outcome_density(obj, p, lambda),
        }
    }

    pub fn joint(&self, obj: &WaveFunction64, lambda: f64) -> waysim_core::Result<JointDensity64> {
        match &self.apparatus {
            ApparatusState::Ozawa(p) => ozawa_model::joint_object_outcome_density(obj, p, lambda),
            ApparatusState::Alt(p) => alt_model::joint_object_outcome_density(obj, p, lambda),
        }
    }

    fn expected_error_variance(&self, lambda: f64) -> waysim_core::Result<f64> {
        match &self.apparatus {
            ApparatusState::Ozawa(p) => {
                let s = 2.0 / lambda;
                Ok(p.phi1.density().variance() + s * s * p.phi2.density().variance())
            }
            ApparatusState::Alt(p) => {
                let g = AltParams::new(lambda)?.gain();
                Ok(p.phi_probe.density().variance() / (g * g))
            }
        }
    }

    /// All quantities for one coupling value.
    pub fn record(&self, cfg: &SweepConfig, lambda: f64) -> waysim_core::Result<SweepRecord> {
        let policy = NumericPolicy::DEFAULT;
        let e = self.error_density(lambda)?;
        let q = self.scaled_outcome_density(&self.object, lambda)?;
        let smeared = grid_core::smear(&self.object.density(), &e)?;
        let oracle_l1_gap = grid_core::l1_distance(&q, &smeared)?;

        let j = self.joint(&self.object, lambda)?;
        let eps_sq = way_bounds::noise_moment(&j)?;
        let app = self.apparatus.view();
        let bounds = way_bounds::check_bounds(&BoundInputs {
            model: self.model,
            lambda,
            eps_sq,
            mu_sq: way_bounds::mu_moment(&j)?,
            delta_p_object_sq: self.object.momentum_density()?.variance(),
            delta_p_apparatus_sq: way_bounds::apparatus_momentum_spread_sq(app)?,
            delta_p_reference_sq: way_bounds::reference_momentum_spread_sq(app)?,
        })?;
        let family = IntervalFamily::covering_support(&j, cfg.repeat_cells, &policy)?;
        let repeat_width = repeatability::repeatability_width(&j, &family, cfg.eps_repeat)?;
        drop(j);

        let mut eps_sq_sup = eps_sq;
        for obj in &self.extra_objects {
            let jk = self.joint(obj, lambda)?;
            eps_sq_sup = eps_sq_sup.max(way_bounds::noise_moment(&jk)?);
        }

        let width_reference = match &self.apparatus {
            ApparatusState::Ozawa(p) => Some(p.phi1.density().overall_width(cfg.eps_width)?),
            ApparatusState::Alt(_) => None,
        };
        let (predicted_d, support_d) = match self.supports {
            Some(s) => (
                Some(repeatability::predicted_halfwidth(self.model, s, lambda)?),
                Some(repeatability::support_halfwidth(self.model, s, lambda)?),
            ),
            None => (None, None),
        };
        Ok(SweepRecord {
            lambda,
            var_e: e.variance(),
            var_e_expected: self.expected_error_variance(lambda)?,
            mean_e: e.mean(),
            width_e: e.overall_width(cfg.eps_width)?,
            width_reference,
            eps_sq,
            eps_sq_sup,
            mu_sq: bounds.mu_sq,
            delta_p_object_sq: bounds.delta_p_object_sq,
            delta_p_apparatus_sq: bounds.delta_p_apparatus_sq,
            delta_p_reference_sq: bounds.delta_p_reference_sq,
            commutator: bounds.commutator_magnitude,
            rhs_general: bounds.rhs_general,
            rhs_yanase: bounds.rhs_yanase,
            bound_general_ok: bounds.general_ok,
            bound_yanase_ok: bounds.yanase_ok,
            yanase_applicable: bounds.yanase_applicable,
            repeat_width,
            predicted_d,
            support_d,
            oracle_l1_gap,
        })
    }
}

/// Records in the order of `lambda_values`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>, CliError> {
    let setup = prepare(cfg)?;
    run_prepared(cfg, &setup)
}

pub fn run_prepared(cfg: &SweepConfig, setup: &Setup) -> Result<Vec<SweepRecord>, CliError> {
    cfg.lambda_values
        .par_iter()
        .map(|&lambda| {
            setup
                .record(cfg, lambda)
                .map_err(|e| CliError::numeric(format!("lambda = {lambda}"), e))
        })
        .collect()
}
