//! Fast example checks: closed-form values and small-grid oracles that run in
//! a few seconds.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use num_complex::Complex64;

use crate::gauge::{loop_flux, rectangle_path, string_gauge, symmetric_gauge};
use crate::grid::{bump_packet, gaussian_packet, make_grid, superpose};
use crate::io::parse_config;
use crate::observables::{density, modular_momentum_expectation};
use crate::propagate::{evolve_free, evolve_staged, PropagatorConfig};
use crate::rotor::{
    circular_mean, coherent_angular_state, energy_level, entanglement_entropy, RotorParams, RotorState,
};
use crate::scenario::ScenarioKind;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> Check {
    match f() {
        Ok(detail) => Check { name, passed: true, detail },
        Err(detail) => Check { name, passed: false, detail },
    }
}

fn within(what: &str, got: f64, want: f64, tol: f64) -> Result<String, String> {
    let msg = format!("{what} = {got:.6e} (expected {want:.6e} ± {tol:.0e})");
    if (got - want).abs() <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

pub fn run_all() -> Vec<Check> {
    let s = |e: crate::Error| e.to_string();
    vec![
        check("scenario-list", || {
            let n = ScenarioKind::ALL.len();
            if n == 5 {
                Ok("5 scenarios".into())
            } else {
                Err(format!("{n} scenarios"))
            }
        }),
        check("config-defaults", || {
            let c = parse_config("scenario=instantaneous-aspect\nalpha=1.25").map_err(s)?;
            within("alpha", c.alpha[0], 1.25, 0.0)
        }),
        check("config-errors", || match (parse_config("alpha=abc\nscenario=madelung-demo"), parse_config("")) {
            (Err(crate::Error::ConfigLine { line: 1, .. }), Err(_)) => {
                Ok("malformed value and empty file rejected".into())
            }
            other => Err(format!("{other:?}")),
        }),
        check("rotor-energy", || {
            let p = RotorParams::new(2.0, 1.0, 0.5).map_err(s)?;
            within("E(2, 1)", energy_level(&p, 2, 1), 1.0, 0.0)
        }),
        check("rotor-coherent-state", || {
            let c = coherent_angular_state(1.0, 8.0, 128).map_err(s)?;
            within("circular mean", circular_mean(&c), 1.0, 1e-6)
        }),
        check("rotor-bell-entropy", || {
            let p = RotorParams::new(50.0, 1.0, 0.1).map_err(s)?;
            let (mut a, mut b) = (vec![Complex64::new(0.0, 0.0); 9], vec![Complex64::new(0.0, 0.0); 9]);
            a[4] = Complex64::new(1.0, 0.0);
            b[5] = Complex64::new(1.0, 0.0);
            let one = Complex64::new(1.0, 0.0);
            let st = RotorState::from_branches(p, 8, &[(1, one, &a), (2, one, &b)]).map_err(s)?;
            within("entropy", entanglement_entropy(&st), LN_2, 1e-10)
        }),
        check("string-gauge-loop", || {
            let g = make_grid(64, 64, 0.25, 0.25, -7.875, -7.875).map_err(s)?;
            let gauge = string_gauge(&g, 1.3).map_err(s)?;
            within("loop flux", loop_flux(&gauge, &rectangle_path(10, 10, 50, 50)).map_err(s)?, 1.3, 1e-12)
        }),
        check("symmetric-gauge-loop", || {
            let g = make_grid(64, 64, 0.25, 0.25, -7.875, -7.875).map_err(s)?;
            let gauge = symmetric_gauge(&g, 1.3, 1.0).map_err(s)?;
            within("loop flux", loop_flux(&gauge, &rectangle_path(10, 10, 50, 50)).map_err(s)?, 1.3, 1e-12)
        }),
        check("bump-packets-disjoint", || {
            let g = make_grid(96, 96, 0.125, 0.125, -5.9375, -5.9375).map_err(s)?;
            let a = bump_packet(&g, (-1.5, 0.0), 1.0).map_err(s)?;
            let b = bump_packet(&g, (1.5, 0.0), 1.0).map_err(s)?;
            let overlap: f64 = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x * y).norm()).sum();
            let r0 = density(&superpose(&a, &b, 1.0, 1.0, 0.0).map_err(s)?);
            let r1 = density(&superpose(&a, &b, 1.0, 1.0, FRAC_PI_2).map_err(s)?);
            let d = r0.values.iter().zip(&r1.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            if overlap == 0.0 && d <= 1e-14 {
                Ok(format!("product 0, density difference {d:.1e}"))
            } else {
                Err(format!("product {overlap:e}, density difference {d:e}"))
            }
        }),
        check("modular-momentum-two-packets", || {
            let g = make_grid(160, 96, 0.125, 0.125, -9.9375, -5.9375).map_err(s)?;
            let a = gaussian_packet(&g, (-4.0, 0.0), 0.5, (0.0, 0.0)).map_err(s)?;
            let b = gaussian_packet(&g, (4.0, 0.0), 0.5, (0.0, 0.0)).map_err(s)?;
            let f = superpose(&a, &b, 1.0, 1.0, 0.7).map_err(s)?;
            let t = modular_momentum_expectation(&f, 8.0).map_err(s)?;
            within("|⟨T⟩ − ½e^{iβ}|", (t - Complex64::from_polar(0.5, 0.7)).norm(), 0.0, 1e-8)
        }),
        check("staged-zero-kick-is-free", || {
            let g = make_grid(160, 160, 0.25, 0.25, -19.875, -19.875).map_err(s)?;
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut l = gaussian_packet(&g, (-5.0, 5.0), 1.2, (0.0, -2.0)).map_err(s)?;
            let mut r = gaussian_packet(&g, (5.0, 5.0), 1.2, (0.0, -2.0)).map_err(s)?;
            l.amplitudes_mut().iter_mut().for_each(|a| *a *= h);
            r.amplitudes_mut().iter_mut().for_each(|a| *a *= h);
            let cfg = PropagatorConfig::new(0.01, 4.0).with_record_every(100);
            let staged = evolve_staged(&l, &r, 0.0, &cfg, &mut |_| Ok(())).map_err(s)?;
            let mut sum = l.clone();
            sum.amplitudes_mut().iter_mut().zip(r.amplitudes()).for_each(|(a, b)| *a += *b);
            let free = evolve_free(&sum, &cfg, &mut |_| Ok(())).map_err(s)?;
            if staged.field == free.field {
                Ok("bit-identical".into())
            } else {
                Err("fields differ".into())
            }
        }),
        check("staged-kick-phase", || {
            let g = make_grid(160, 160, 0.25, 0.25, -19.875, -19.875).map_err(s)?;
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut l = gaussian_packet(&g, (-5.0, 5.0), 1.2, (0.0, -2.0)).map_err(s)?;
            let mut r = gaussian_packet(&g, (5.0, 5.0), 1.2, (0.0, -2.0)).map_err(s)?;
            l.amplitudes_mut().iter_mut().for_each(|a| *a *= h);
            r.amplitudes_mut().iter_mut().for_each(|a| *a *= h);
            let cfg = PropagatorConfig::new(0.01, 4.0).with_record_every(400);
            let mut last = Complex64::new(0.0, 0.0);
            evolve_staged(&l, &r, 0.5 * PI, &cfg, &mut |smp| {
                last = modular_momentum_expectation(smp.field, 10.0)?;
                Ok(())
            })
            .map_err(s)?;
            within("arg ⟨T⟩", last.arg(), 0.5 * PI, 1e-2)
        }),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn every_check_passes() {
        for c in super::run_all() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
