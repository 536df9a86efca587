//! Gauge-aware observables of a [`WaveField`].
//!
//! Derivatives use wide central stencils whose off-site terms are parallel
//! transported with products of link phases, so every observable here is
//! exactly gauge covariant on the lattice. The default stencil is eighth
//! order; order 2 is the plain nearest-neighbour difference.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauge::{zero_gauge, GaugeField};
use crate::grid::{ScalarField, VectorField, WaveField};

/// Accuracy order of the central first-derivative stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StencilOrder {
    Second,
    Fourth,
    Sixth,
    #[default]
    Eighth,
}

impl StencilOrder {
    /// Weights `c_s` in `f'(x) ≈ Σ_s c_s (f(x+s·h) − f(x−s·h)) / h`.
    pub fn weights(&self) -> &'static [f64] {
        match self {
            StencilOrder::Second => &[0.5],
            StencilOrder::Fourth => &[2.0 / 3.0, -1.0 / 12.0],
            StencilOrder::Sixth => &[3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
            StencilOrder::Eighth => &[4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0],
        }
    }
}

/// `ρ = |ψ|²` per node.
pub fn density(f: &WaveField) -> ScalarField {
    ScalarField { grid: *f.grid(), values: f.amplitudes().iter().map(|a| a.norm_sqr()).collect() }
}

/// Covariant derivative of a 1D line of amplitudes. `phases[k]` is the link
/// phase from site `k` to `k+1`.
pub(crate) fn covariant_derivative(line: &[Complex64], phases: &[f64], h: f64, weights: &[f64]) -> Vec<Complex64> {
    let n = line.len();
    let hops: Vec<Complex64> = phases.iter().map(|p| Complex64::from_polar(1.0, -p)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut fwd = Complex64::new(1.0, 0.0);
        let mut bwd = Complex64::new(1.0, 0.0);
        for (s0, c) in weights.iter().enumerate() {
            let s = s0 + 1;
            let mut term = Complex64::new(0.0, 0.0);
            if i + s < n {
                fwd *= hops[i + s - 1];
                term += fwd * line[i + s];
            }
            if i >= s {
                bwd *= hops[i - s].conj();
                term -= bwd * line[i - s];
            }
            acc += term * *c;
        }
        out[i] = acc / h;
    }
    out
}

/// `Σ_s 2c_s Σ_k Im(conj(ψ_k)·W_{k→k+s}·ψ_{k+s}) / h` for one line.
pub(crate) fn line_velocity_sum(line: &[Complex64], phases: &[f64], h: f64, weights: &[f64]) -> f64 {
    let n = line.len();
    let hops: Vec<Complex64> = phases.iter().map(|p| Complex64::from_polar(1.0, -p)).collect();
    let mut total = 0.0;
    for (s0, c) in weights.iter().enumerate() {
        let s = s0 + 1;
        if s >= n {
            break;
        }
        let mut sum = 0.0;
        for k in 0..n - s {
            let w: Complex64 = hops[k..k + s].iter().product();
            sum += (line[k].conj() * w * line[k + s]).im;
        }
        total += 2.0 * c * sum;
    }
    total / h
}

fn column(f: &WaveField, i: usize) -> Vec<Complex64> {
    let g = f.grid();
    (0..g.ny).map(|j| f.at(i, j)).collect()
}

fn column_phases(gauge: &GaugeField, i: usize) -> Vec<f64> {
    let g = gauge.grid();
    (0..g.ny).map(|j| gauge.phase_y(i, j)).collect()
}

/// Probability current `J = Re(ψ*(−i∇ − A)ψ)` (m = 1).
pub fn current(f: &WaveField, gauge: &GaugeField) -> Result<VectorField> {
    current_with(f, gauge, StencilOrder::default())
}

pub fn current_with(f: &WaveField, gauge: &GaugeField, order: StencilOrder) -> Result<VectorField> {
    let g = *f.grid();
    g.ensure_same(gauge.grid())?;
    let w = order.weights();
    let amp = f.amplitudes();
    let mut jx = vec![0.0; g.len()];
    let mut jy = vec![0.0; g.len()];
    for j in 0..g.ny {
        let r = j * g.nx..(j + 1) * g.nx;
        let d = covariant_derivative(&amp[r.clone()], &gauge.link_x()[r.clone()], g.dx, w);
        for (k, i) in r.enumerate() {
            jx[i] = (amp[i].conj() * d[k]).im;
        }
    }
    for i in 0..g.nx {
        let col = column(f, i);
        let d = covariant_derivative(&col, &column_phases(gauge, i), g.dy, w);
        for j in 0..g.ny {
            jy[g.index(i, j)] = (col[j].conj() * d[j]).im;
        }
    }
    Ok(VectorField { grid: g, x: jx, y: jy })
}

/// Density-weighted mean position.
pub fn expectation_position(f: &WaveField) -> (f64, f64) {
    let g = f.grid();
    let (mut sx, mut sy, mut s) = (0.0, 0.0, 0.0);
    for j in 0..g.ny {
        let y = g.y(j);
        let (mut rx, mut r) = (0.0, 0.0);
        for i in 0..g.nx {
            let p = f.at(i, j).norm_sqr();
            rx += g.x(i) * p;
            r += p;
        }
        sx += rx;
        sy += y * r;
        s += r;
    }
    (sx / s, sy / s)
}

/// Second central moments `(⟨(x−x̄)²⟩, ⟨(y−ȳ)²⟩)`.
pub fn position_variance(f: &WaveField) -> (f64, f64) {
    let (mx, my) = expectation_position(f);
    let g = f.grid();
    let (mut vx, mut vy, mut s) = (0.0, 0.0, 0.0);
    for j in 0..g.ny {
        let dy = g.y(j) - my;
        for i in 0..g.nx {
            let p = f.at(i, j).norm_sqr();
            let dx = g.x(i) - mx;
            vx += dx * dx * p;
            vy += dy * dy * p;
            s += p;
        }
    }
    (vx / s, vy / s)
}

/// Kinetic velocity expectation `⟨(p − A)⟩ / ⟨ψ|ψ⟩` (m = 1).
pub fn expectation_velocity(f: &WaveField, gauge: &GaugeField) -> Result<(f64, f64)> {
    expectation_velocity_with(f, gauge, StencilOrder::default())
}

pub fn expectation_velocity_with(f: &WaveField, gauge: &GaugeField, order: StencilOrder) -> Result<(f64, f64)> {
    let g = *f.grid();
    g.ensure_same(gauge.grid())?;
    let w = order.weights();
    let amp = f.amplitudes();
    let mut vx = 0.0;
    for j in 0..g.ny {
        let r = j * g.nx..(j + 1) * g.nx;
        vx += line_velocity_sum(&amp[r.clone()], &gauge.link_x()[r], g.dx, w);
    }
    let mut vy = 0.0;
    for i in 0..g.nx {
        vy += line_velocity_sum(&column(f, i), &column_phases(gauge, i), g.dy, w);
    }
    let n2 = f.norm_sq();
    let a = g.cell_area();
    Ok((vx * a / n2, vy * a / n2))
}

/// Canonical momentum `⟨−i∇⟩`, i.e. the velocity evaluated without links.
pub fn expectation_canonical_momentum(f: &WaveField) -> (f64, f64) {
    expectation_velocity(f, &zero_gauge(f.grid())).expect("same grid")
}

/// `⟨exp(i p_x L)⟩ = Σ conj(ψ(x, y))·ψ(x + L, y)·dx·dy`.
///
/// Values shifted in from outside the grid are zero. `L` must be an integer
/// multiple of `dx`, and the field is assumed to be in a gauge with `A_x = 0`.
pub fn modular_momentum_expectation(f: &WaveField, l: f64) -> Result<Complex64> {
    let g = f.grid();
    let s = l / g.dx;
    let shift = s.round();
    if (s - shift).abs() > 1e-9 * s.abs().max(1.0) {
        return Err(Error::config(format!("modular length {l} is not a multiple of dx = {}", g.dx)));
    }
    let shift = shift as isize;
    let nx = g.nx as isize;
    if shift.abs() >= nx {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let amp = f.amplitudes();
    let (lo, hi) = if shift >= 0 { (0, nx - shift) } else { (-shift, nx) };
    let mut total = Complex64::new(0.0, 0.0);
    for row in amp.chunks(g.nx) {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in lo..hi {
            acc += row[i as usize].conj() * row[(i + shift) as usize];
        }
        total += acc;
    }
    Ok(total * g.cell_area())
}

/// Modular transverse momentum `p_x mod 2π/L` implied by an expectation
/// `⟨exp(i p_x L)⟩`, in `[0, 2π/L)`.
pub fn modular_momentum_value(expectation: Complex64, l: f64) -> f64 {
    let period = 2.0 * std::f64::consts::PI / l;
    (expectation.arg() / l).rem_euclid(period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{gauge_transform, string_gauge, symmetric_gauge, GaugeFunction};
    use crate::grid::{gaussian_packet, make_grid, superpose, Grid2D};
    use std::f64::consts::PI;

    fn grid() -> Grid2D {
        make_grid(320, 320, 0.125, 0.125, -19.9375, -19.9375).unwrap()
    }

    #[test]
    fn density_of_normalized_field_integrates_to_one() {
        let f = gaussian_packet(&grid(), (1.0, -1.0), 1.5, (0.5, 0.2)).unwrap();
        assert!((density(&f).integral() - 1.0).abs() < 1e-12);
        let rotated = f.clone().with_global_phase(0.83);
        // |e^{iθ}ψ|² equals |ψ|² up to rounding in the complex product
        for (a, b) in density(&rotated).values.iter().zip(&density(&f).values) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs());
        }
    }

    #[test]
    fn gaussian_moments_match_analytics() {
        // oracle: a Gaussian density has mean x_c and variance σ²
        let f = gaussian_packet(&grid(), (0.0, 0.0), 1.5, (0.0, 0.0)).unwrap();
        let (mx, my) = expectation_position(&f);
        assert!(mx.abs() < 1e-12 && my.abs() < 1e-12);
        let (vx, vy) = position_variance(&f);
        assert!((vx - 2.25).abs() < 1e-6 && (vy - 2.25).abs() < 1e-6);
    }

    #[test]
    fn position_and_velocity_of_displaced_packets() {
        let g = grid();
        let z = zero_gauge(&g);
        let f = gaussian_packet(&g, (3.0, -2.0), 1.5, (0.0, 0.0)).unwrap();
        let (x, y) = expectation_position(&f);
        assert!((x - 3.0).abs() < 1e-8 && (y + 2.0).abs() < 1e-8);
        let (vx, vy) = expectation_velocity(&f, &z).unwrap();
        assert!(vx.abs() < 1e-8 && vy.abs() < 1e-8);

        let f = gaussian_packet(&g, (0.0, 0.0), 1.5, (1.0, 0.0)).unwrap();
        let (vx, vy) = expectation_velocity(&f, &z).unwrap();
        assert!((vx - 1.0).abs() < 1e-8 && vy.abs() < 1e-8, "{vx} {vy}");

        let f = gaussian_packet(&g, (0.0, 0.0), 1.5, (0.0, -2.0)).unwrap();
        let (vx, vy) = expectation_velocity(&f, &z).unwrap();
        assert!(vx.abs() < 1e-8 && (vy + 2.0).abs() < 1e-6, "{vx} {vy}");
    }

    #[test]
    fn second_order_stencil_shows_its_truncation_error() {
        let g = grid();
        let f = gaussian_packet(&g, (0.0, 0.0), 1.5, (1.0, 0.0)).unwrap();
        let (vx, _) = expectation_velocity_with(&f, &zero_gauge(&g), StencilOrder::Second).unwrap();
        // ⟨sin(k dx)/dx⟩ ≈ k(1 − (k dx)²/6)
        assert!((vx - 1.0).abs() > 1e-3 && (vx - 1.0).abs() < 5e-3);
    }

    #[test]
    fn real_field_has_no_current() {
        let g = grid();
        let f = gaussian_packet(&g, (0.5, 0.0), 1.5, (0.0, 0.0)).unwrap();
        let j = current(&f, &zero_gauge(&g)).unwrap();
        assert!(j.x.iter().chain(&j.y).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn plane_wave_current_is_k_rho() {
        // wide window so the envelope gradient is negligible in the interior
        let g = make_grid(256, 64, 0.125, 0.125, -16.0, -4.0).unwrap();
        let k = 1.3;
        let f = WaveField::from_fn(&g, |x, _| {
            let w = (-(x / 10.0).powi(8)).exp();
            Complex64::from_polar(w, k * x)
        })
        .normalized()
        .unwrap();
        let rho = density(&f);
        let j = current(&f, &zero_gauge(&g)).unwrap();
        for jj in 8..g.ny - 8 {
            for i in 96..160 {
                let idx = g.index(i, jj);
                assert!((j.x[idx] - k * rho.values[idx]).abs() < 1e-6 * rho.values[idx].max(1e-3));
            }
        }
    }

    #[test]
    fn observables_are_gauge_invariant() {
        let g = grid();
        let gauge = symmetric_gauge(&g, 1.1, 0.5).unwrap();
        let f = gaussian_packet(&g, (2.0, 1.0), 1.2, (0.4, -0.7)).unwrap();
        let chi = GaugeFunction::from_fn(&g, |x, y| 0.4 * x - 0.2 * y * y + (x * y).sin()).unwrap();
        let (f2, g2) = gauge_transform(&f, &gauge, &chi).unwrap();
        for (a, b) in density(&f).values.iter().zip(&density(&f2).values) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * a.abs());
        }
        let j1 = current(&f, &gauge).unwrap();
        let j2 = current(&f2, &g2).unwrap();
        for (a, b) in j1.x.iter().zip(&j2.x).chain(j1.y.iter().zip(&j2.y)) {
            assert!((a - b).abs() < 1e-10);
        }
        let v1 = expectation_velocity(&f, &gauge).unwrap();
        let v2 = expectation_velocity(&f2, &g2).unwrap();
        assert!((v1.0 - v2.0).abs() < 1e-10 && (v1.1 - v2.1).abs() < 1e-10);
        let p1 = expectation_canonical_momentum(&f);
        let p2 = expectation_canonical_momentum(&f2);
        assert!((p1.0 - p2.0).abs() > 1e-2);
    }

    #[test]
    fn integrated_current_equals_velocity() {
        let g = grid();
        let gauge = string_gauge(&g, 0.8).unwrap();
        let f = gaussian_packet(&g, (1.0, 0.5), 1.5, (0.3, -1.0)).unwrap();
        let (ix, iy) = current(&f, &gauge).unwrap().integral();
        let (vx, vy) = expectation_velocity(&f, &gauge).unwrap();
        assert!((ix - vx).abs() < 1e-8 && (iy - vy).abs() < 1e-8);
    }

    #[test]
    fn modular_expectation_identity_shift() {
        let f = gaussian_packet(&grid(), (0.0, 0.0), 1.5, (0.7, 0.0)).unwrap();
        let m = modular_momentum_expectation(&f, 0.0).unwrap();
        assert!((m - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(modular_momentum_expectation(&f, 0.3).is_err());
    }

    #[test]
    fn modular_expectation_of_single_gaussian() {
        // oracle: ∫ψ*(x)ψ(x+L) = e^{ik₀L}·e^{−L²/(8σ²)}
        let g = grid();
        let (sigma, k0, l) = (1.5, 0.9, 2.0);
        let f = gaussian_packet(&g, (0.0, 0.0), sigma, (k0, 0.0)).unwrap();
        let m = modular_momentum_expectation(&f, l).unwrap();
        let expect = Complex64::from_polar((-l * l / (8.0 * sigma * sigma)).exp(), k0 * l);
        assert!((m - expect).norm() < 1e-8);
    }

    #[test]
    fn modular_expectation_of_two_packets() {
        // oracle: cross term (1/2)e^{iβ}, residual bounded by the self-overlap
        let g = make_grid(320, 200, 0.125, 0.125, -19.9375, -12.4375).unwrap();
        let (sigma, l, beta) = (1.2, 12.0, 0.9);
        let a = gaussian_packet(&g, (-6.0, 0.0), sigma, (0.0, 0.0)).unwrap();
        let b = gaussian_packet(&g, (6.0, 0.0), sigma, (0.0, 0.0)).unwrap();
        let f = superpose(&a, &b, 1.0, 1.0, beta).unwrap();
        let m = modular_momentum_expectation(&f, l).unwrap();
        let bound = (-l * l / (8.0 * sigma * sigma)).exp() + 1e-8;
        assert!((m - Complex64::from_polar(0.5, beta)).norm() < bound);
        assert!((modular_momentum_value(m, l) - beta / l).abs() < 1e-6);
    }

    #[test]
    fn modular_expectation_symmetries() {
        let g = grid();
        let f = gaussian_packet(&g, (0.0, 0.0), 1.2, (0.3, 0.2)).unwrap();
        let m = modular_momentum_expectation(&f, 1.0).unwrap();
        let m2 = modular_momentum_expectation(&f.clone().with_global_phase(2.0), 1.0).unwrap();
        assert!((m - m2).norm() < 1e-14);
        let m3 = modular_momentum_expectation(&f.translated_rows(7), 1.0).unwrap();
        assert!((m - m3).norm() < 1e-14);
        assert!(m.norm() <= 1.0 + 1e-12);
        let _ = PI;
    }
}
