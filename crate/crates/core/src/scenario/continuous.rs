//! A line electron passing the charged cylinder, compared with a neutral one.

use num_complex::Complex64;

use super::analysis::unwrap_phases;
use super::{propagator_of, require, Relation, ScenarioOutput, ScenarioReport, TimeSeries};
use crate::error::Result;
use crate::io::ScenarioConfig;
use crate::propagate::{evolve_line_system, LineGrid, LineRecord, LineSystemState};

pub const VELOCITY_TOLERANCE: f64 = 1e-8;
/// Lag tolerance as a fraction of the line length.
pub const LAG_FRACTION: f64 = 1e-8;
pub const PHASE_TOLERANCE: f64 = 1e-4;

fn weighted(r: &LineRecord, values: &[f64]) -> f64 {
    r.probability.iter().zip(values).map(|(p, v)| p * v).sum::<f64>() / r.norm
}

pub fn run_continuous_aspect(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    require(cfg.n0 != cfg.n1, "the cylinder superposition needs two distinct levels")?;
    let grid = LineGrid::new(cfg.line_n, cfg.line_dy, cfg.line_y0)?;
    let weights = [(cfg.n0, Complex64::new(1.0, 0.0)), (cfg.n1, Complex64::new(1.0, 0.0))];
    let build =
        |mu: f64| LineSystemState::gaussian(grid, cfg.d, mu, cfg.inertia_c, &weights, cfg.packet_y, cfg.sigma, cfg.ky);
    let pcfg = propagator_of(cfg);
    let charged = evolve_line_system(&build(cfg.mu)?, &pcfg)?;
    let neutral = evolve_line_system(&build(0.0)?, &pcfg)?;

    let mut report = ScenarioReport::new(cfg);
    let mut series = TimeSeries::new(
        "line",
        &["v_y", "mean_y_charged", "mean_y_neutral", "lag", "overlap_abs", "overlap_arg", "v_over_r", "delta_phi_c"],
    );
    let recs = &charged.records;
    let v0 = weighted(&recs[0], &recs[0].velocity);
    let (mut dv, mut lag) = (0.0f64, 0.0f64);
    let mut norm_drift = 0.0f64;
    for (c, n) in recs.iter().zip(&neutral.records) {
        let v = weighted(c, &c.velocity);
        let (yc, yn) = (weighted(c, &c.mean_y), weighted(n, &n.mean_y));
        dv = dv.max((v - v0).abs());
        lag = lag.max((yc - yn).abs());
        norm_drift = norm_drift.max((c.norm - 1.0).abs()).max((n.norm - 1.0).abs());
        series.push(c.t, &[v, yc, yn, yc - yn, c.overlap.norm(), c.overlap.arg(), c.v_over_r, c.delta_phi_c]);
    }
    let length = grid.dy * (grid.n - 1) as f64;
    report.verdict("velocity_constant", "charged", dv, VELOCITY_TOLERANCE, Relation::Below);
    report.verdict("no_lag", "charged vs neutral", lag, LAG_FRACTION * length, Relation::Below);
    report.verdict("norm_drift", "charged and neutral", norm_drift, cfg.norm_tolerance, Relation::Below);

    // |dO/dt| ≤ μ|Δn|·⟨|v|/r⟩, and ⟨|v|⟩ is bounded by |k| plus a few momentum widths
    let dn = (cfg.n1 - cfg.n0) as f64;
    let rate_bound = (cfg.mu * dn).abs() * (cfg.ky.abs() + 3.0 / (2.0 * cfg.sigma)) / cfg.d;
    let max_rate =
        recs.windows(2).map(|w| (w[1].overlap - w[0].overlap).norm() / (w[1].t - w[0].t)).fold(0.0, f64::max);
    report.verdict(
        "overlap_continuous",
        "branch overlap",
        max_rate,
        rate_bound.max(f64::MIN_POSITIVE),
        Relation::Below,
    );

    let args: Vec<f64> = recs.iter().map(|r| r.overlap.arg()).collect();
    let u = unwrap_phases(&args);
    let measured = u[u.len() - 1] - u[0];
    let integral: f64 = recs.windows(2).map(|w| 0.5 * (w[0].v_over_r + w[1].v_over_r) * (w[1].t - w[0].t)).sum();
    let predicted = cfg.mu * dn * integral;
    report.event("branch_phase_change", Some(cfg.t_end), measured);
    report.event("branch_phase_predicted", Some(cfg.t_end), predicted);
    report.verdict("branch_phase_oracle", "charged", (measured - predicted).abs(), PHASE_TOLERANCE, Relation::Below);
    let last = recs.last().expect("records");
    report.event("delta_phi_c", Some(last.t), last.delta_phi_c);
    report.event("final_overlap_abs", Some(last.t), last.overlap.norm());
    report.series.push(series);
    Ok(ScenarioOutput { report, snapshots: Vec::new() })
}
