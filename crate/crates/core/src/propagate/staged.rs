//! Piecewise-free evolution of two packets with a phase kick on the right one.
//!
//! Free evolution is exact in Fourier space, so the state at any record time is
//! rebuilt directly from the initial spectrum `S`. The kick is the unitary
//! `e^{iα·P_R}`, with `P_R = |R⟩⟨R|/⟨R|R⟩` the projector onto the right packet.
//! It multiplies the right packet by `e^{iα}` and leaves anything orthogonal to
//! it alone, so the norm is kept even when the packets' tails overlap. Since
//! `P_R` commutes past free evolution up to time-invariant inner products, the
//! state after the kick step is `U(t)·(S + κ·R)` with
//! `κ = (e^{iα} − 1)·⟨R|S⟩/⟨R|R⟩`. For `α = 0`, `κ` is an exact zero and the
//! run reproduces [`evolve_free`] bit for bit.

use num_complex::Complex64;

use super::{check_boundary, check_norm, Fft2, Observer, PropagatorConfig, Sample, Snapshot};
use crate::error::{Error, Result};
use crate::grid::{Grid2D, WaveField};
use crate::observables::expectation_position;

/// When and how the right packet crossed the line `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingEvent {
    /// Time at which the right-packet centroid reaches `y = 0`.
    pub t_cross: f64,
    /// Step after which the kick is in effect.
    pub kick_step: usize,
    /// `t` of the kick step.
    pub t_kick: f64,
    /// `∫ρ_L·ρ_R dA` at the kick step.
    pub mutual_mass: f64,
}

/// Result of a staged or free run.
#[derive(Debug, Clone)]
pub struct StagedRun {
    pub field: WaveField,
    pub snapshots: Vec<Snapshot>,
    pub crossing: Option<CrossingEvent>,
    pub steps: usize,
    pub norm_drift: f64,
}

/// Largest accepted `∫ρ_L·ρ_R dA` at the crossing.
pub const MAX_MUTUAL_MASS: f64 = 1e-6;

struct Spectral {
    fft: Fft2,
    grid: Grid2D,
}

impl Spectral {
    fn spectrum(&mut self, f: &WaveField) -> Vec<Complex64> {
        let mut s = f.amplitudes().to_vec();
        self.fft.forward(&mut s);
        s
    }

    /// Real-space field at time `t` of `S·P(t) + κ·R·P(t)`, where `P` is the
    /// free propagator in Fourier space and `(κ, R)` the optional kick term.
    fn field_at(&mut self, base: &[Complex64], kick: Option<(Complex64, &[Complex64])>, t: f64) -> WaveField {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut out = WaveField::zeros(&self.grid);
        let amp = out.amplitudes_mut();
        for j in 0..ny {
            let ky = self.fft.ky()[j];
            for i in 0..nx {
                let kx = self.fft.kx()[i];
                let k2 = kx * kx + ky * ky;
                let idx = j * nx + i;
                let p = Complex64::from_polar(1.0, -0.5 * k2 * t);
                let mut v = base[idx] * p;
                if let Some((kappa, r)) = kick {
                    v += kappa * (r[idx] * p);
                }
                amp[idx] = v;
            }
        }
        self.fft.inverse(amp);
        out
    }
}

fn run(
    initial: &WaveField,
    right: Option<(&WaveField, f64)>,
    cfg: &PropagatorConfig,
    observer: &mut Observer<'_>,
) -> Result<StagedRun> {
    cfg.validate()?;
    let n0 = initial.norm_sq();
    if !(n0 > 0.0) {
        return Err(Error::numerical("initial field has zero norm"));
    }
    let steps = cfg.steps();
    let grid = *initial.grid();
    let mut sp = Spectral { fft: Fft2::new(&grid), grid };
    let base = sp.spectrum(initial);

    let mut crossing = None;
    let mut kick: Option<(Complex64, Vec<Complex64>, usize)> = None;
    if let Some((r, alpha)) = right {
        let spec_r = sp.spectrum(r);
        let (_, y0) = expectation_position(r);
        let (mut w, mut ky_sum) = (0.0, 0.0);
        for j in 0..grid.ny {
            let ky = sp.fft.ky()[j];
            for a in &spec_r[j * grid.nx..(j + 1) * grid.nx] {
                let p = a.norm_sqr();
                w += p;
                ky_sum += p * ky;
            }
        }
        let vy = ky_sum / w;
        let t_cross = -y0 / vy;
        if !(t_cross > 0.0) || t_cross > steps as f64 * cfg.dt {
            return Err(Error::scenario(format!(
                "right packet does not cross y = 0 within the run (centroid {y0:.4}, velocity {vy:.4})"
            )));
        }
        let kick_step = (t_cross / cfg.dt).round() as usize;
        let t_kick = kick_step as f64 * cfg.dt;
        // the two packets at the kick step, evolved separately
        let left_spec: Vec<Complex64> = base.iter().zip(&spec_r).map(|(s, r)| s - r).collect();
        let left_field = sp.field_at(&left_spec, None, t_kick);
        let right_field = sp.field_at(&spec_r, None, t_kick);
        let mutual: f64 = left_field
            .amplitudes()
            .iter()
            .zip(right_field.amplitudes())
            .map(|(a, b)| a.norm_sqr() * b.norm_sqr())
            .sum::<f64>()
            * grid.cell_area();
        if mutual > MAX_MUTUAL_MASS {
            return Err(Error::scenario(format!(
                "packets overlap at the crossing: mutual mass {mutual:.3e} exceeds {MAX_MUTUAL_MASS:.0e}"
            )));
        }
        crossing = Some(CrossingEvent { t_cross, kick_step, t_kick, mutual_mass: mutual });
        // e^{iα·P_R} with P_R the projector onto the right packet; inner
        // products are time invariant, so they are taken between initial spectra
        let rr: f64 = spec_r.iter().map(|a| a.norm_sqr()).sum();
        let rs: Complex64 = spec_r.iter().zip(&base).map(|(a, b)| a.conj() * b).sum();
        let kappa = (Complex64::from_polar(1.0, alpha) - 1.0) * (rs / rr);
        kick = Some((kappa, spec_r, kick_step));
    }

    let snap_steps = cfg.snapshot_steps();
    let mut snapshots = Vec::with_capacity(snap_steps.len());
    let mut next_snap = 0;
    let mut last = initial.clone();
    for step in 0..=steps {
        let wanted_snap = next_snap < snap_steps.len() && snap_steps[next_snap] == step;
        if !(cfg.is_record_step(step) || wanted_snap) {
            continue;
        }
        let t = step as f64 * cfg.dt;
        let extra = match &kick {
            Some((kappa, r, ks)) if step >= *ks => Some((*kappa, r.as_slice())),
            _ => None,
        };
        let f = sp.field_at(&base, extra, t);
        if cfg.is_record_step(step) {
            check_norm(n0, f.norm_sq(), cfg.norm_tolerance, t)?;
            check_boundary(&f, cfg.boundary_tolerance, t)?;
            observer(&Sample { step, t, field: &f })?;
        }
        while next_snap < snap_steps.len() && snap_steps[next_snap] == step {
            snapshots.push(Snapshot { t, field: f.clone() });
            next_snap += 1;
        }
        last = f;
    }
    let norm_drift = (last.norm_sq() - n0).abs() / n0;
    Ok(StagedRun { field: last, snapshots, crossing, steps, norm_drift })
}

/// Exact free evolution of `f` on the periodic grid.
pub fn evolve_free(f: &WaveField, cfg: &PropagatorConfig, observer: &mut Observer<'_>) -> Result<StagedRun> {
    run(f, None, cfg, observer)
}

/// Evolves `left + right` freely, multiplying the right packet by `e^{iα}` at
/// the step nearest its centroid's crossing of `y = 0`.
pub fn evolve_staged(
    left: &WaveField,
    right: &WaveField,
    alpha: f64,
    cfg: &PropagatorConfig,
    observer: &mut Observer<'_>,
) -> Result<StagedRun> {
    left.grid().ensure_same(right.grid())?;
    let mut total = left.clone();
    for (a, b) in total.amplitudes_mut().iter_mut().zip(right.amplitudes()) {
        *a += *b;
    }
    run(&total, Some((right, alpha)), cfg, observer)
}
