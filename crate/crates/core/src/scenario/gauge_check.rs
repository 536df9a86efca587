//! The same physical run in the string and symmetric gauges.

use super::{
    grid_of, packet_pair, propagator_of, sum_fields, NamedSnapshot, Relation, ScenarioOutput, ScenarioReport,
    TimeSeries,
};
use crate::error::Result;
use crate::gauge::{gauge_transform, string_gauge, symmetric_gauge, GaugeField, GaugeFunction};
use crate::grid::{NodeMask, WaveField};
use crate::io::ScenarioConfig;
use crate::observables::{density, expectation_canonical_momentum, expectation_velocity};
use crate::propagate::{evolve_lattice_observed, LatticeRun, Sample};

pub const DENSITY_TOLERANCE: f64 = 1e-3;
pub const VELOCITY_TOLERANCE: f64 = 1e-6;
/// Mismatch above which a run is flagged as a gauge misuse. The mismatch is
/// the larger of the worst density L² difference and the worst velocity
/// difference.
pub const MISUSE_THRESHOLD: f64 = 1e-2;

struct Record {
    t: f64,
    velocity: (f64, f64),
    canonical: (f64, f64),
}

fn evolve(
    cfg: &ScenarioConfig,
    f: &WaveField,
    gauge: &GaugeField,
    mask: &Option<NodeMask>,
) -> Result<(LatticeRun, Vec<Record>)> {
    let mut pcfg = propagator_of(cfg).with_snapshots(cfg.snapshot_times.clone());
    if let Some(m) = mask {
        pcfg = pcfg.with_mask(m.clone());
    }
    let mut records = Vec::new();
    let run = evolve_lattice_observed(f, gauge, &pcfg, &mut |s: &Sample<'_>| {
        records.push(Record {
            t: s.t,
            velocity: expectation_velocity(s.field, gauge)?,
            canonical: expectation_canonical_momentum(s.field),
        });
        Ok(())
    })?;
    Ok((run, records))
}

pub fn run_gauge_invariance(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let grid = grid_of(cfg)?;
    let (left, right) = packet_pair(cfg, &grid)?;
    let f = sum_fields(&left, &right);
    let mask = (cfg.core_radius > 0.0).then(|| NodeMask::disk(&grid, (0.0, 0.0), cfg.core_radius));
    let r0 = if cfg.core_radius > 0.0 { cfg.core_radius } else { 4.0 * grid.dx.max(grid.dy) };
    let mut report = ScenarioReport::new(cfg);
    let mut snapshots = Vec::new();
    for &alpha in &cfg.alpha {
        let string = string_gauge(&grid, alpha)?;
        let symmetric = symmetric_gauge(&grid, alpha, r0)?;
        let f_sym = if cfg.skip_gauge_transform {
            f.clone()
        } else {
            let chi = GaugeFunction::symmetric_to_string(&grid, alpha).negated();
            gauge_transform(&f, &string, &chi)?.0
        };
        let (run_s, rec_s) = evolve(cfg, &f, &string, &mask)?;
        let (run_y, rec_y) = evolve(cfg, &f_sym, &symmetric, &mask)?;
        let tag = format!("alpha={alpha:.6}");
        report.verdict("norm_drift", format!("string {tag}"), run_s.norm_drift, cfg.norm_tolerance, Relation::Below);
        report.verdict("norm_drift", format!("symmetric {tag}"), run_y.norm_drift, cfg.norm_tolerance, Relation::Below);

        let mut worst_density = 0.0f64;
        let mut pairs: Vec<(f64, &WaveField, &WaveField)> =
            run_s.snapshots.iter().zip(&run_y.snapshots).map(|(a, b)| (a.t, &a.field, &b.field)).collect();
        if !pairs.iter().any(|p| (p.0 - cfg.t_end).abs() < 0.5 * cfg.dt) {
            pairs.push((cfg.t_end, &run_s.field, &run_y.field));
        }
        for (t, a, b) in pairs {
            let d = density(a).l2_distance(&density(b))?;
            worst_density = worst_density.max(d);
            report.verdict("density_agreement", format!("{tag} t={t:.4}"), d, DENSITY_TOLERANCE, Relation::Below);
        }
        for s in run_s.snapshots.iter() {
            snapshots.push(NamedSnapshot {
                name: format!("string_{tag}"),
                t: s.t,
                gauge: string.descriptor(),
                field: s.field.clone(),
            });
        }
        for s in run_y.snapshots.iter() {
            snapshots.push(NamedSnapshot {
                name: format!("symmetric_{tag}"),
                t: s.t,
                gauge: symmetric.descriptor(),
                field: s.field.clone(),
            });
        }

        let mut series = TimeSeries::new(
            format!("alpha{alpha:.6}"),
            &[
                "vx_string",
                "vy_string",
                "vx_symmetric",
                "vy_symmetric",
                "px_string",
                "py_string",
                "px_symmetric",
                "py_symmetric",
            ],
        );
        let mut dv = 0.0f64;
        let mut dp = 0.0f64;
        for (a, b) in rec_s.iter().zip(&rec_y) {
            dv = dv.max((a.velocity.0 - b.velocity.0).abs()).max((a.velocity.1 - b.velocity.1).abs());
            dp = dp.max((a.canonical.0 - b.canonical.0).abs()).max((a.canonical.1 - b.canonical.1).abs());
            series.push(
                a.t,
                &[
                    a.velocity.0,
                    a.velocity.1,
                    b.velocity.0,
                    b.velocity.1,
                    a.canonical.0,
                    a.canonical.1,
                    b.canonical.0,
                    b.canonical.1,
                ],
            );
        }
        report.series.push(series);
        report.verdict("velocity_agreement", &tag, dv, VELOCITY_TOLERANCE, Relation::Below);
        report.event(format!("canonical_momentum_difference {tag}"), None, dp);
        let mismatch = worst_density.max(dv);
        if mismatch > MISUSE_THRESHOLD {
            report.event(format!("gauge_misuse_detected {tag}"), None, mismatch);
        }
    }
    Ok(ScenarioOutput { report, snapshots })
}
