use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_boundary, check_norm, CayleyLine, Observer, PropagatorConfig, Sample, Snapshot};
use crate::error::{Error, Result};
use crate::gauge::GaugeField;
use crate::grid::{Grid2D, WaveField};

/// Factored ADI step for one grid, gauge and mask.
#[derive(Debug, Clone)]
pub struct LatticePropagator {
    grid: Grid2D,
    rows: Vec<CayleyLine>,
    cols: Vec<CayleyLine>,
    blocked: Vec<bool>,
    work: Vec<Complex64>,
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], nx: usize, ny: usize) {
    const B: usize = 32;
    for jb in (0..ny).step_by(B) {
        for ib in (0..nx).step_by(B) {
            for j in jb..(jb + B).min(ny) {
                for i in ib..(ib + B).min(nx) {
                    dst[i * ny + j] = src[j * nx + i];
                }
            }
        }
    }
}

impl LatticePropagator {
    pub fn new(gauge: &GaugeField, cfg: &PropagatorConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = *gauge.grid();
        let blocked = match &cfg.mask {
            Some(m) => {
                grid.ensure_same(m.grid())?;
                m.blocked().to_vec()
            }
            None => vec![false; grid.len()],
        };
        let (nx, ny) = (grid.nx, grid.ny);
        let rows = (0..ny)
            .into_par_iter()
            .map(|j| {
                let hops: Vec<Complex64> = (0..nx - 1).map(|i| gauge.hop_x(i, j)).collect();
                CayleyLine::new(&hops, &blocked[j * nx..(j + 1) * nx], grid.dx, cfg.dt, cfg.scheme)
            })
            .collect();
        let cols = (0..nx)
            .into_par_iter()
            .map(|i| {
                let hops: Vec<Complex64> = (0..ny - 1).map(|j| gauge.hop_y(i, j)).collect();
                let mask: Vec<bool> = (0..ny).map(|j| blocked[j * nx + i]).collect();
                CayleyLine::new(&hops, &mask, grid.dy, cfg.dt, cfg.scheme)
            })
            .collect();
        Ok(Self { grid, rows, cols, blocked, work: vec![Complex64::new(0.0, 0.0); grid.len()] })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Zeroes masked nodes.
    pub fn apply_mask(&self, f: &mut WaveField) {
        for (a, b) in f.amplitudes_mut().iter_mut().zip(&self.blocked) {
            if *b {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// One x-sweep followed by one y-sweep.
    pub fn step(&mut self, f: &mut WaveField) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let amp = f.amplitudes_mut();
        amp.par_chunks_mut(nx)
            .zip(self.rows.par_iter())
            .for_each_init(|| vec![Complex64::new(0.0, 0.0); nx], |scratch, (row, line)| line.step(row, scratch));
        transpose(amp, &mut self.work, nx, ny);
        self.work
            .par_chunks_mut(ny)
            .zip(self.cols.par_iter())
            .for_each_init(|| vec![Complex64::new(0.0, 0.0); ny], |scratch, (col, line)| line.step(col, scratch));
        transpose(&self.work, amp, ny, nx);
    }

    /// Largest residual of the x- and y-solves for one step from `f`.
    pub fn step_residual(&mut self, f: &WaveField) -> f64 {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut g = f.clone();
        let before: Vec<Complex64> = f.amplitudes().to_vec();
        let amp = g.amplitudes_mut();
        let mut worst: f64 = 0.0;
        let mut scratch = vec![Complex64::new(0.0, 0.0); nx.max(ny)];
        for (j, line) in self.rows.iter().enumerate() {
            let row = &mut amp[j * nx..(j + 1) * nx];
            line.step(row, &mut scratch[..nx]);
            worst = worst.max(line.residual(&before[j * nx..(j + 1) * nx], row));
        }
        let mut t = vec![Complex64::new(0.0, 0.0); nx * ny];
        transpose(amp, &mut t, nx, ny);
        let mid = t.clone();
        for (i, line) in self.cols.iter().enumerate() {
            let col = &mut t[i * ny..(i + 1) * ny];
            line.step(col, &mut scratch[..ny]);
            worst = worst.max(line.residual(&mid[i * ny..(i + 1) * ny], col));
        }
        worst
    }
}

/// Result of a lattice run.
#[derive(Debug, Clone)]
pub struct LatticeRun {
    pub field: WaveField,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    pub norm_drift: f64,
    pub max_residual: f64,
}

/// Evolves `f` to `cfg.t_end` and collects the requested snapshots.
pub fn evolve_lattice(f: &WaveField, gauge: &GaugeField, cfg: &PropagatorConfig) -> Result<LatticeRun> {
    evolve_lattice_observed(f, gauge, cfg, &mut |_| Ok(()))
}

/// Like [`evolve_lattice`], also calling `observer` on every record step.
pub fn evolve_lattice_observed(
    f: &WaveField,
    gauge: &GaugeField,
    cfg: &PropagatorConfig,
    observer: &mut Observer<'_>,
) -> Result<LatticeRun> {
    f.grid().ensure_same(gauge.grid())?;
    let mut prop = LatticePropagator::new(gauge, cfg)?;
    let mut psi = f.clone();
    prop.apply_mask(&mut psi);
    let n0 = psi.norm_sq();
    if !(n0 > 0.0) {
        return Err(Error::numerical("initial field has zero norm after masking"));
    }
    let steps = cfg.steps();
    let snap_steps = cfg.snapshot_steps();
    let mut snapshots = Vec::with_capacity(snap_steps.len());
    let mut next_snap = 0;
    let mut max_residual: f64 = 0.0;
    for step in 0..=steps {
        let t = step as f64 * cfg.dt;
        if step > 0 {
            if step == 1 || cfg.is_record_step(step) && step % (cfg.record_every * 50) == 0 {
                let r = prop.step_residual(&psi);
                max_residual = max_residual.max(r);
                if !(r <= cfg.solver_tolerance) {
                    return Err(Error::numerical(format!(
                        "implicit solve residual {r:.3e} exceeds {:.1e}",
                        cfg.solver_tolerance
                    )));
                }
            }
            prop.step(&mut psi);
        }
        if cfg.is_record_step(step) {
            check_norm(n0, psi.norm_sq(), cfg.norm_tolerance, t)?;
            check_boundary(&psi, cfg.boundary_tolerance, t)?;
            observer(&Sample { step, t, field: &psi })?;
        }
        while next_snap < snap_steps.len() && snap_steps[next_snap] == step {
            snapshots.push(Snapshot { t, field: psi.clone() });
            next_snap += 1;
        }
    }
    let norm_drift = (psi.norm_sq() - n0).abs() / n0;
    check_norm(n0, psi.norm_sq(), cfg.norm_tolerance, steps as f64 * cfg.dt)?;
    Ok(LatticeRun { field: psi, snapshots, steps, norm_drift, max_residual })
}
