//! Time-evolution engines.
//!
//! * [`evolve_lattice`]: ADI-split Crank-Nicolson on the Peierls lattice, any gauge.
//! * [`evolve_staged`]: exact free evolution with a single phase kick on one packet.
//! * [`evolve_line_system`]: a line electron entangled with a cylinder's angular momentum.

mod cayley;
mod fft2;
mod lattice;
mod line;
mod staged;

pub use cayley::{CayleyLine, KineticScheme};
pub use fft2::Fft2;
pub use lattice::{evolve_lattice, evolve_lattice_observed, LatticePropagator, LatticeRun};
pub use line::{evolve_line_system, Branch, LineGrid, LineRecord, LineRun, LineSystemConfig, LineSystemState};
pub use staged::{evolve_free, evolve_staged, CrossingEvent, StagedRun, MAX_MUTUAL_MASS};

use crate::error::{Error, Result};
use crate::grid::{NodeMask, WaveField};

/// Settings shared by the two-dimensional engines.
#[derive(Debug, Clone)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Hard-wall nodes (lattice engine only).
    pub mask: Option<NodeMask>,
    /// Largest accepted relative residual of an implicit solve.
    pub solver_tolerance: f64,
    /// Times at which full fields are delivered, non-decreasing.
    pub snapshot_times: Vec<f64>,
    /// Observer cadence in steps; the first and last steps are always observed.
    pub record_every: usize,
    pub scheme: KineticScheme,
    /// Largest accepted relative drift of the norm over a run.
    pub norm_tolerance: f64,
    /// Largest accepted `|ψ|²` on the outer ring of nodes.
    pub boundary_tolerance: f64,
}

impl PropagatorConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            mask: None,
            solver_tolerance: 1e-10,
            snapshot_times: Vec::new(),
            record_every: 1,
            scheme: KineticScheme::default(),
            norm_tolerance: 1e-10,
            boundary_tolerance: 1e-6,
        }
    }

    pub fn with_mask(mut self, mask: NodeMask) -> Self {
        self.mask = Some(mask);
        self
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn with_record_every(mut self, n: usize) -> Self {
        self.record_every = n;
        self
    }

    pub fn with_scheme(mut self, scheme: KineticScheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Number of steps; `t_end` is rounded to a whole number of steps.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if !(self.solver_tolerance > 0.0 && self.solver_tolerance <= 1e-10) {
            return Err(Error::config(format!(
                "solver_tolerance must lie in (0, 1e-10], got {}",
                self.solver_tolerance
            )));
        }
        if self.record_every == 0 {
            return Err(Error::config("record_every must be at least 1"));
        }
        let end = self.steps() as f64 * self.dt;
        let mut last = 0.0;
        for &t in &self.snapshot_times {
            if !(t >= last) || t > end + 0.5 * self.dt {
                return Err(Error::config(format!("snapshot times must be non-decreasing within [0, {end}], got {t}")));
            }
            last = t;
        }
        Ok(())
    }

    /// Step index of each requested snapshot.
    pub(crate) fn snapshot_steps(&self) -> Vec<usize> {
        self.snapshot_times.iter().map(|t| (t / self.dt).round() as usize).collect()
    }

    pub(crate) fn is_record_step(&self, step: usize) -> bool {
        step.is_multiple_of(self.record_every) || step == self.steps()
    }
}

/// A state handed to an observer during a run.
#[derive(Debug)]
pub struct Sample<'a> {
    pub step: usize,
    pub t: f64,
    pub field: &'a WaveField,
}

/// Field captured at a requested time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub field: WaveField,
}

/// Observer invoked on record steps.
pub type Observer<'a> = dyn FnMut(&Sample<'_>) -> Result<()> + 'a;

pub(crate) fn check_norm(n0: f64, n: f64, tol: f64, t: f64) -> Result<()> {
    let drift = (n - n0).abs() / n0;
    if !(drift <= tol) {
        return Err(Error::numerical(format!("norm drift {drift:.3e} at t = {t} exceeds {tol:.1e}")));
    }
    Ok(())
}

pub(crate) fn check_boundary(f: &WaveField, tol: f64, t: f64) -> Result<()> {
    let b = f.max_boundary_density();
    if !(b <= tol) {
        return Err(Error::numerical(format!(
            "boundary density {b:.3e} at t = {t} exceeds {tol:.1e}; enlarge the domain"
        )));
    }
    Ok(())
}
