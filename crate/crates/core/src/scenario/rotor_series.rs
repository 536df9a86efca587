//! Spectrum and entanglement-entropy series for the rotor pair.

use num_complex::Complex64;

use super::TimeSeries;
use crate::error::Result;
use crate::io::ScenarioConfig;
use crate::rotor::{
    coherent_angular_state, energy_level, entanglement_entropy, evolve_rotor, reduced_cylinder_state, RotorParams,
    RotorState,
};

#[derive(Debug, Clone)]
pub struct RotorSeries {
    /// Columns `n, m, energy` over the whole truncation.
    pub spectrum: TimeSeries,
    /// `t, entropy, electron_angle, coherence`.
    pub entropy: TimeSeries,
}

/// Starts from `(|n0⟩ + |n1⟩)/√2 ⊗ coherent(φ₀, Δm)` and evolves to `t_end`
/// in steps of `dt`.
pub fn rotor_series(cfg: &ScenarioConfig) -> Result<RotorSeries> {
    let params = RotorParams::new(cfg.inertia_c, cfg.inertia_e, cfg.lambda)?.with_mode(cfg.inertia_mode);
    let n = cfg.truncation;
    let mut spectrum = TimeSeries::new("spectrum", &["m", "energy"]);
    spectrum.columns[0] = "n".into();
    for a in -(n as i64)..=n as i64 {
        for b in -(n as i64)..=n as i64 {
            spectrum.push(a as f64, &[b as f64, energy_level(&params, a, b)]);
        }
    }
    let chi = coherent_angular_state(cfg.phi0, cfg.delta_m, n)?;
    let one = Complex64::new(1.0, 0.0);
    let state = RotorState::from_branches(params, n, &[(cfg.n0, one, &chi), (cfg.n1, one, &chi)])?;
    let (i0, i1) = ((cfg.n0 + n as i64) as usize, (cfg.n1 + n as i64) as usize);
    let mut entropy = TimeSeries::new("entropy", &["entropy", "electron_angle", "coherence"]);
    let steps = (cfg.t_end / cfg.dt).round() as usize;
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let s = evolve_rotor(&state, t);
        let moment: Complex64 = (-(n as i64)..=n as i64)
            .map(|c| s.electron_branch(c).windows(2).map(|w| w[1].conj() * w[0]).sum::<Complex64>())
            .sum();
        let rho = reduced_cylinder_state(&s);
        entropy.push(t, &[entanglement_entropy(&s), moment.arg(), rho[(i0, i1)].norm()]);
    }
    Ok(RotorSeries { spectrum, entropy })
}
