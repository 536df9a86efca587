//! A line electron at fixed transverse offset `d`, entangled with the angular
//! momentum `L_c = n` of a charged cylinder. Each branch `n` carries a 1D field
//! evolving under `(p_y − μn/r)²/2` with `r = √(d² + y²)`.

use num_complex::Complex64;

use super::{check_norm, CayleyLine, PropagatorConfig};
use crate::error::{Error, Result};
use crate::observables::{covariant_derivative, line_velocity_sum, StencilOrder};

/// Uniform 1D grid `y_k = y0 + k·dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid {
    pub n: usize,
    pub dy: f64,
    pub y0: f64,
}

impl LineGrid {
    pub fn new(n: usize, dy: f64, y0: f64) -> Result<Self> {
        if n < 16 || !(dy > 0.0) || !y0.is_finite() {
            return Err(Error::config(format!("invalid line grid: n = {n}, dy = {dy}, y0 = {y0}")));
        }
        Ok(Self { n, dy, y0 })
    }

    #[inline]
    pub fn y(&self, k: usize) -> f64 {
        self.y0 + k as f64 * self.dy
    }
}

/// One cylinder branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub n: i64,
    pub amp: Vec<Complex64>,
}

/// Joint state `Σ_n |n⟩ ⊗ c_n(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSystemState {
    pub grid: LineGrid,
    /// Transverse offset of the line from the cylinder axis.
    pub d: f64,
    pub mu: f64,
    pub inertia_c: f64,
    pub branches: Vec<Branch>,
}

/// `∫ μn/r dy` from the origin to `y`.
fn potential_integral(mu_n: f64, d: f64, y: f64) -> f64 {
    mu_n * (y / d).asinh()
}

impl LineSystemState {
    /// Branches `c_n = w_n·e^{iΛ_n(y)}·φ(y)` sharing one Gaussian `φ`, where
    /// `Λ_n` integrates the branch's vector potential; every branch then has
    /// the same kinetic state. The weights are normalized.
    pub fn gaussian(
        grid: LineGrid,
        d: f64,
        mu: f64,
        inertia_c: f64,
        weights: &[(i64, Complex64)],
        y_c: f64,
        sigma: f64,
        k: f64,
    ) -> Result<Self> {
        if !(d > 0.0) || !(inertia_c > 0.0) || !mu.is_finite() {
            return Err(Error::config("line system needs d > 0, I_c > 0 and finite μ"));
        }
        if weights.is_empty() {
            return Err(Error::config("line system needs at least one branch"));
        }
        let wsum: f64 = weights.iter().map(|(_, w)| w.norm_sqr()).sum();
        if !(wsum > 0.0) {
            return Err(Error::config("branch weights are all zero"));
        }
        let phi: Vec<Complex64> = (0..grid.n)
            .map(|i| {
                let u = grid.y(i) - y_c;
                Complex64::from_polar((-u * u / (4.0 * sigma * sigma)).exp(), k * grid.y(i))
            })
            .collect();
        let pnorm: f64 = phi.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.dy;
        let peak = phi.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let edge = phi[0].norm().max(phi[grid.n - 1].norm()) / peak;
        if !(edge <= 1e-10) {
            return Err(Error::config(format!("packet amplitude at the line ends is {edge:.2e} of the peak")));
        }
        let s = 1.0 / (pnorm * wsum).sqrt();
        let branches = weights
            .iter()
            .map(|&(n, w)| Branch {
                n,
                amp: (0..grid.n)
                    .map(|i| {
                        let lam = potential_integral(mu * n as f64, d, grid.y(i));
                        w * s * Complex64::from_polar(1.0, lam) * phi[i]
                    })
                    .collect(),
            })
            .collect();
        Ok(Self { grid, d, mu, inertia_c, branches })
    }

    /// Link phases `∫ a_n dy` for branch quantum number `n`.
    pub fn link_phases(&self, n: i64) -> Vec<f64> {
        let mn = self.mu * n as f64;
        (0..self.grid.n - 1)
            .map(|k| {
                potential_integral(mn, self.d, self.grid.y(k + 1)) - potential_integral(mn, self.d, self.grid.y(k))
            })
            .collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.branches.iter().map(|b| branch_mass(&b.amp, self.grid.dy)).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.branches.iter().map(|b| branch_mass(&b.amp, self.grid.dy)).collect()
    }

    /// `⟨c_a|c_b⟩ / (‖c_a‖·‖c_b‖)`.
    pub fn overlap(&self, a: usize, b: usize) -> Complex64 {
        let (ca, cb) = (&self.branches[a].amp, &self.branches[b].amp);
        let s: Complex64 = ca.iter().zip(cb).map(|(p, q)| p.conj() * q).sum::<Complex64>() * self.grid.dy;
        s / (branch_mass(ca, self.grid.dy) * branch_mass(cb, self.grid.dy)).sqrt()
    }

    /// `⟨y⟩` of branch `b`.
    pub fn mean_y(&self, b: usize) -> f64 {
        let amp = &self.branches[b].amp;
        let m: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
        amp.iter().enumerate().map(|(k, a)| a.norm_sqr() * self.grid.y(k)).sum::<f64>() / m
    }

    /// Branch density `|c_b|²` per site.
    pub fn density(&self, b: usize) -> Vec<f64> {
        self.branches[b].amp.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨v_y⟩` and the symmetrized `⟨v_y/r⟩` of branch `b`.
    pub fn velocity_moments(&self, b: usize, order: StencilOrder) -> (f64, f64) {
        let br = &self.branches[b];
        let phases = self.link_phases(br.n);
        let m: f64 = br.amp.iter().map(|a| a.norm_sqr()).sum();
        let v = line_velocity_sum(&br.amp, &phases, self.grid.dy, order.weights()) / m;
        let dpsi = covariant_derivative(&br.amp, &phases, self.grid.dy, order.weights());
        let vr: f64 = br
            .amp
            .iter()
            .zip(&dpsi)
            .enumerate()
            .map(|(k, (a, da))| {
                let y = self.grid.y(k);
                (a.conj() * da).im / (self.d * self.d + y * y).sqrt()
            })
            .sum::<f64>()
            / m;
        (v, vr)
    }
}

fn branch_mass(amp: &[Complex64], dy: f64) -> f64 {
    amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * dy
}

/// Scalars recorded on each record step.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRecord {
    pub t: f64,
    /// Per-branch `⟨v_y⟩`.
    pub velocity: Vec<f64>,
    /// Per-branch `⟨y⟩`.
    pub mean_y: Vec<f64>,
    /// Per-branch probability.
    pub probability: Vec<f64>,
    /// Normalized overlap of the first two branches (1 for a single branch).
    pub overlap: Complex64,
    /// Probability-weighted `⟨v_y/r⟩`.
    pub v_over_r: f64,
    /// Accumulated cylinder angle `−μ∫⟨v_y/r⟩dt`.
    pub delta_phi_c: f64,
    pub norm: f64,
}

/// Result of [`evolve_line_system`].
#[derive(Debug, Clone)]
pub struct LineRun {
    pub state: LineSystemState,
    pub records: Vec<LineRecord>,
    pub snapshots: Vec<(f64, LineSystemState)>,
}

/// Settings for the line system; the mask and boundary fields are ignored.
pub type LineSystemConfig = PropagatorConfig;

fn record(state: &LineSystemState, t: f64, prev: Option<&LineRecord>) -> LineRecord {
    let nb = state.branches.len();
    let probability = state.probabilities();
    let total: f64 = probability.iter().sum();
    let mut velocity = Vec::with_capacity(nb);
    let mut v_over_r = 0.0;
    for (b, p) in probability.iter().enumerate() {
        let (v, vr) = state.velocity_moments(b, StencilOrder::default());
        velocity.push(v);
        v_over_r += p / total * vr;
    }
    let mean_y = (0..nb).map(|b| state.mean_y(b)).collect();
    let overlap = if nb > 1 { state.overlap(0, 1) } else { Complex64::new(1.0, 0.0) };
    let delta_phi_c = match prev {
        Some(p) => p.delta_phi_c - state.mu * 0.5 * (p.v_over_r + v_over_r) * (t - p.t),
        None => 0.0,
    };
    LineRecord { t, velocity, mean_y, probability, overlap, v_over_r, delta_phi_c, norm: total }
}

/// Crank-Nicolson evolution of every branch, recording [`LineRecord`]s.
pub fn evolve_line_system(state: &LineSystemState, cfg: &LineSystemConfig) -> Result<LineRun> {
    cfg.validate()?;
    let n0 = state.norm_sq();
    if (n0 - 1.0).abs() > 1e-12 {
        return Err(Error::numerical(format!("line system state is not normalized: Σ‖c_n‖² = {n0}")));
    }
    let g = state.grid;
    let blocked = vec![false; g.n];
    let lines: Vec<CayleyLine> = state
        .branches
        .iter()
        .map(|b| {
            let hops: Vec<Complex64> = state.link_phases(b.n).iter().map(|p| Complex64::from_polar(1.0, -p)).collect();
            CayleyLine::new(&hops, &blocked, g.dy, cfg.dt, cfg.scheme)
        })
        .collect();
    let mut cur = state.clone();
    let mut scratch = vec![Complex64::new(0.0, 0.0); g.n];
    let steps = cfg.steps();
    let snap_steps = cfg.snapshot_steps();
    let mut next_snap = 0;
    let mut records: Vec<LineRecord> = Vec::new();
    let mut snapshots = Vec::new();
    for step in 0..=steps {
        let t = step as f64 * cfg.dt;
        if step > 0 {
            for (b, line) in cur.branches.iter_mut().zip(&lines) {
                if step == 1 {
                    let before = b.amp.clone();
                    line.step(&mut b.amp, &mut scratch);
                    let r = line.residual(&before, &b.amp);
                    if !(r <= cfg.solver_tolerance) {
                        return Err(Error::numerical(format!("line solve residual {r:.3e}")));
                    }
                } else {
                    line.step(&mut b.amp, &mut scratch);
                }
            }
        }
        if cfg.is_record_step(step) {
            let rec = record(&cur, t, records.last());
            check_norm(n0, rec.norm, cfg.norm_tolerance, t)?;
            let edge =
                cur.branches.iter().map(|b| b.amp[0].norm_sqr().max(b.amp[g.n - 1].norm_sqr())).fold(0.0, f64::max);
            if edge > cfg.boundary_tolerance {
                return Err(Error::numerical(format!("line density {edge:.2e} reached the line ends at t = {t}")));
            }
            records.push(rec);
        }
        while next_snap < snap_steps.len() && snap_steps[next_snap] == step {
            snapshots.push((t, cur.clone()));
            next_snap += 1;
        }
    }
    Ok(LineRun { state: cur, records, snapshots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> LineGrid {
        LineGrid::new(2048, 1.0 / 32.0, -32.0).unwrap()
    }

    #[test]
    fn gaussian_state_is_normalized() {
        let s = LineSystemState::gaussian(
            grid(),
            2.0,
            0.05,
            50.0,
            &[(10, Complex64::new(1.0, 0.0)), (11, Complex64::new(0.0, 1.0))],
            4.0,
            2.0,
            -2.0,
        )
        .unwrap();
        assert!((s.norm_sq() - 1.0).abs() < 1e-13);
        assert!((s.probabilities()[0] - 0.5).abs() < 1e-13);
    }

    #[test]
    fn link_phases_are_pure_gauge() {
        let s =
            LineSystemState::gaussian(grid(), 2.0, 0.3, 50.0, &[(3, Complex64::new(1.0, 0.0))], 0.0, 2.0, 0.0).unwrap();
        let total: f64 = s.link_phases(3).iter().sum();
        let g = s.grid;
        let expect = 0.9 * ((g.y(g.n - 1) / 2.0).asinh() - (g.y(0) / 2.0).asinh());
        assert!((total - expect).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_branches_stay_identical() {
        let s = LineSystemState::gaussian(
            grid(),
            2.0,
            0.0,
            50.0,
            &[(10, Complex64::new(1.0, 0.0)), (11, Complex64::new(1.0, 0.0))],
            4.0,
            2.0,
            -2.0,
        )
        .unwrap();
        let run = evolve_line_system(&s, &PropagatorConfig::new(0.002, 2.0)).unwrap();
        for r in &run.records {
            assert!((r.overlap - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert_eq!(r.delta_phi_c, 0.0);
        }
    }
}
