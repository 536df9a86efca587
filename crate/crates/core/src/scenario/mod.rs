//! Reproducible runs of the three experiments and the two audits.
//!
//! Each driver turns a [`ScenarioConfig`] into a [`ScenarioOutput`]: a
//! serializable [`ScenarioReport`] plus any field snapshots requested.

mod analysis;
mod aspect;
mod continuous;
mod gauge_check;
mod madelung;
mod rotor_series;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{gaussian_packet, make_grid, Grid2D, WaveField};
use crate::io::ScenarioConfig;
use crate::propagate::PropagatorConfig;

pub use analysis::{circular_distance, fringe_shift, jump_analysis, unwrap_phases, JumpAnalysis};
pub use aspect::{run_flux_quantization_sweep, run_instantaneous_aspect};
pub use continuous::run_continuous_aspect;
pub use gauge_check::run_gauge_invariance;
pub use madelung::run_madelung_demo;
pub use rotor_series::{rotor_series, RotorSeries};

/// The five drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ScenarioKind {
    MadelungDemo,
    ContinuousAspect,
    InstantaneousAspect,
    GaugeInvariance,
    FluxQuantizationSweep,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::MadelungDemo,
        ScenarioKind::ContinuousAspect,
        ScenarioKind::InstantaneousAspect,
        ScenarioKind::GaugeInvariance,
        ScenarioKind::FluxQuantizationSweep,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::MadelungDemo => "madelung-demo",
            ScenarioKind::ContinuousAspect => "continuous-aspect",
            ScenarioKind::InstantaneousAspect => "instantaneous-aspect",
            ScenarioKind::GaugeInvariance => "gauge-invariance",
            ScenarioKind::FluxQuantizationSweep => "flux-quantization-sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Invariants a report of this kind may issue verdicts on.
    pub fn invariants(&self) -> &'static [&'static str] {
        match self {
            ScenarioKind::MadelungDemo => &[
                "initial_density_phase_blind",
                "initial_current_phase_blind",
                "final_density_phase_sensitive",
                "final_density_identical",
                "norm_drift",
            ],
            ScenarioKind::ContinuousAspect => {
                &["velocity_constant", "no_lag", "overlap_continuous", "branch_phase_oracle", "norm_drift"]
            }
            ScenarioKind::InstantaneousAspect | ScenarioKind::FluxQuantizationSweep => &[
                "jump_magnitude",
                "jump_time",
                "abruptness",
                "free_stage_modulus",
                "free_stage_argument",
                "fringe_shift",
                "periodic_pattern",
                "oracle_equivalence",
                "mutual_mass",
                "norm_drift",
                "periodic_density",
                "periodic_fringe_shift",
            ],
            ScenarioKind::GaugeInvariance => &["density_agreement", "velocity_agreement", "norm_drift"],
        }
    }
}

/// Named columns sampled on a common time axis; column 0 is `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, observables: &[&str]) -> Self {
        let mut columns = vec!["t".to_string()];
        columns.extend(observables.iter().map(|s| s.to_string()));
        Self { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, t: f64, values: &[f64]) {
        debug_assert_eq!(values.len() + 1, self.columns.len());
        let mut row = Vec::with_capacity(values.len() + 1);
        row.push(t);
        row.extend_from_slice(values);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub name: String,
    pub t: Option<f64>,
    pub value: f64,
}

/// How a measurement is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// Pass when `measured < tolerance`.
    Below,
    /// Pass when `measured > tolerance`.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub invariant: String,
    /// What was measured, e.g. `lattice alpha=1.5708`.
    pub subject: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub version: String,
    pub parameters: BTreeMap<String, String>,
    pub series: Vec<TimeSeries>,
    pub events: Vec<Event>,
    pub verdicts: Vec<Verdict>,
}

impl ScenarioReport {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        Self {
            scenario: cfg.scenario.name().to_string(),
            version: crate::VERSION.to_string(),
            parameters: cfg.parameter_record(),
            series: Vec::new(),
            events: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    fn kind(&self) -> ScenarioKind {
        ScenarioKind::parse(&self.scenario).expect("reports carry a known scenario")
    }

    /// Records a verdict; panics on an undeclared invariant.
    pub fn verdict(
        &mut self,
        invariant: &str,
        subject: impl Into<String>,
        measured: f64,
        tolerance: f64,
        relation: Relation,
    ) {
        assert!(self.kind().invariants().contains(&invariant), "undeclared invariant {invariant}");
        let passed = match relation {
            Relation::Below => measured < tolerance,
            Relation::Above => measured > tolerance,
        };
        self.verdicts.push(Verdict {
            invariant: invariant.to_string(),
            subject: subject.into(),
            passed,
            measured,
            tolerance,
            relation,
        });
    }

    pub fn event(&mut self, name: impl Into<String>, t: Option<f64>, value: f64) {
        self.events.push(Event { name: name.into(), t, value });
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    /// Verdicts on `invariant` whose subject contains `subject`.
    pub fn find<'a>(&'a self, invariant: &'a str, subject: &'a str) -> impl Iterator<Item = &'a Verdict> + 'a {
        self.verdicts.iter().filter(move |v| v.invariant == invariant && v.subject.contains(subject))
    }
}

/// A field captured by a scenario, with its gauge descriptor.
#[derive(Debug, Clone)]
pub struct NamedSnapshot {
    pub name: String,
    pub t: f64,
    pub gauge: String,
    pub field: WaveField,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub report: ScenarioReport,
    pub snapshots: Vec<NamedSnapshot>,
}

/// Runs the driver selected by `cfg.scenario`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    cfg.validate()?;
    match cfg.scenario {
        ScenarioKind::MadelungDemo => run_madelung_demo(cfg),
        ScenarioKind::ContinuousAspect => run_continuous_aspect(cfg),
        ScenarioKind::InstantaneousAspect => run_instantaneous_aspect(cfg),
        ScenarioKind::GaugeInvariance => run_gauge_invariance(cfg),
        ScenarioKind::FluxQuantizationSweep => run_flux_quantization_sweep(cfg),
    }
}

pub(crate) fn grid_of(cfg: &ScenarioConfig) -> Result<Grid2D> {
    make_grid(cfg.nx, cfg.ny, cfg.dx, cfg.dy, cfg.x0, cfg.y0)
}

pub(crate) fn propagator_of(cfg: &ScenarioConfig) -> PropagatorConfig {
    let mut p = PropagatorConfig::new(cfg.dt, cfg.t_end).with_record_every(cfg.record_every).with_scheme(cfg.scheme);
    p.norm_tolerance = cfg.norm_tolerance;
    p.solver_tolerance = cfg.solver_tolerance;
    p.boundary_tolerance = cfg.boundary_tolerance;
    p
}

/// The two interferometer packets at `(∓separation/2, packet_y)`, each
/// carrying probability ½.
pub(crate) fn packet_pair(cfg: &ScenarioConfig, grid: &Grid2D) -> Result<(WaveField, WaveField)> {
    let h = 0.5 * cfg.separation;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let scale = |mut f: WaveField| {
        f.amplitudes_mut().iter_mut().for_each(|a| *a *= s);
        f
    };
    let left = scale(gaussian_packet(grid, (-h, cfg.packet_y), cfg.sigma, (cfg.kx, cfg.ky))?);
    let right = scale(gaussian_packet(grid, (h, cfg.packet_y), cfg.sigma, (cfg.kx, cfg.ky))?);
    Ok((left, right))
}

pub(crate) fn sum_fields(a: &WaveField, b: &WaveField) -> WaveField {
    let mut t = a.clone();
    for (x, y) in t.amplitudes_mut().iter_mut().zip(b.amplitudes()) {
        *x += *y;
    }
    t
}

pub(crate) fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::scenario(msg))
    }
}
