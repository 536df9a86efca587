//! Peierls link phases for the solenoid's vector potential.
//!
//! A link phase is the line integral `∫A·dl` from a node to its forward
//! neighbour (`+x` or `+y`). Hopping from node `j` into node `i` carries the
//! factor `exp(−i φ_{i→j})`, so a pure gauge `φ_{i→j} = Λ_j − Λ_i` is removed by
//! `ψ → exp(iΛ)ψ`.
//!
//! Fluxes are reported as clockwise circulations of the link phases. With
//! that orientation the string gauge (`link_y = −α` across the half-line
//! `y = 0, x > 0`) and the symmetric gauge both enclose `+α`, and a packet that
//! crosses the string downwards picks up `exp(+iα)` relative to one that does
//! not cross it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid2D, WaveField};

/// Which continuum potential a [`GaugeField`] discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeKind {
    Zero,
    String,
    Symmetric,
}

impl GaugeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GaugeKind::Zero => "zero",
            GaugeKind::String => "string",
            GaugeKind::Symmetric => "symmetric",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zero" => Some(GaugeKind::Zero),
            "string" => Some(GaugeKind::String),
            "symmetric" => Some(GaugeKind::Symmetric),
            _ => None,
        }
    }
}

/// Quadrature used for the symmetric-gauge link integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinkRule {
    /// Closed-form angle subtended by the link outside the core.
    #[default]
    Exact,
    /// `A(midpoint)·Δr`; carries an O(dx²) error.
    Midpoint,
}

/// Per-link phases on a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    grid: Grid2D,
    /// Phase on the link `(i, j) → (i+1, j)`; the last column is unused.
    link_x: Vec<f64>,
    /// Phase on the link `(i, j) → (i, j+1)`; the last row is unused.
    link_y: Vec<f64>,
    alpha: f64,
    kind: GaugeKind,
    transformed: bool,
}

impl GaugeField {
    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    /// Whether a gauge transformation has been applied since construction.
    pub fn is_transformed(&self) -> bool {
        self.transformed
    }

    /// Descriptor written into snapshot headers.
    pub fn descriptor(&self) -> String {
        if self.transformed {
            format!("{}-transformed", self.kind.as_str())
        } else {
            self.kind.as_str().to_string()
        }
    }

    pub fn link_x(&self) -> &[f64] {
        &self.link_x
    }

    pub fn link_y(&self) -> &[f64] {
        &self.link_y
    }

    #[inline]
    pub fn phase_x(&self, i: usize, j: usize) -> f64 {
        self.link_x[self.grid.index(i, j)]
    }

    #[inline]
    pub fn phase_y(&self, i: usize, j: usize) -> f64 {
        self.link_y[self.grid.index(i, j)]
    }

    /// Hopping factor `exp(−iφ)` for the forward x-link at `(i, j)`.
    #[inline]
    pub fn hop_x(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, -self.phase_x(i, j))
    }

    #[inline]
    pub fn hop_y(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, -self.phase_y(i, j))
    }

    /// True when every x-link carries exactly zero phase.
    pub fn has_vanishing_ax(&self) -> bool {
        self.link_x.iter().all(|p| *p == 0.0)
    }
}

/// Gauge with all link phases zero.
pub fn zero_gauge(grid: &Grid2D) -> GaugeField {
    GaugeField {
        grid: *grid,
        link_x: vec![0.0; grid.len()],
        link_y: vec![0.0; grid.len()],
        alpha: 0.0,
        kind: GaugeKind::Zero,
        transformed: false,
    }
}

/// Row index `j` such that `y_j < 0 < y_{j+1}`; errors if the origin sits on a
/// node row or outside the grid.
fn string_row(grid: &Grid2D) -> Result<usize> {
    let s = -grid.y0 / grid.dy;
    let frac = s - s.floor();
    if frac.abs() < 1e-9 || (1.0 - frac).abs() < 1e-9 {
        return Err(Error::config("the solenoid must sit between two node rows (origin lies on a row)"));
    }
    let j = s.floor();
    if j < 0.0 || j + 1.0 >= grid.ny as f64 {
        return Err(Error::config("the solenoid lies outside the grid"));
    }
    Ok(j as usize)
}

/// Singular gauge with the whole flux on the y-links crossing `{y = 0, x > 0}`.
pub fn string_gauge(grid: &Grid2D, alpha: f64) -> Result<GaugeField> {
    let js = string_row(grid)?;
    let mut g = zero_gauge(grid);
    g.kind = GaugeKind::String;
    g.alpha = alpha;
    if alpha != 0.0 {
        for i in 0..grid.nx {
            if grid.x(i) > 0.0 {
                g.link_y[grid.index(i, js)] = -alpha;
            }
        }
    }
    Ok(g)
}

/// Continuum symmetric potential, `A = −(α/2π)∇θ` outside `r₀` and solid
/// rotation inside, as a function of position.
fn symmetric_potential(alpha: f64, r0: f64, x: f64, y: f64) -> (f64, f64) {
    let r2 = x * x + y * y;
    let c = -alpha / (2.0 * PI);
    let s = if r2 >= r0 * r0 { c / r2 } else { c / (r0 * r0) };
    (-y * s, x * s)
}

fn symmetric_link(alpha: f64, r0: f64, rule: LinkRule, p: (f64, f64), q: (f64, f64)) -> f64 {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    match rule {
        LinkRule::Midpoint => {
            let (ax, ay) = symmetric_potential(alpha, r0, 0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1));
            ax * dx + ay * dy
        }
        LinkRule::Exact => {
            // distance from the origin to the segment
            let len2 = dx * dx + dy * dy;
            let t = (-(p.0 * dx + p.1 * dy) / len2).clamp(0.0, 1.0);
            let (cx, cy) = (p.0 + t * dx, p.1 + t * dy);
            if cx * cx + cy * cy >= r0 * r0 {
                let cross = p.0 * q.1 - p.1 * q.0;
                let dot = p.0 * q.0 + p.1 * q.1;
                -alpha / (2.0 * PI) * cross.atan2(dot)
            } else {
                // segment dips into the core: composite midpoint on fine pieces
                const PIECES: usize = 64;
                let h = 1.0 / PIECES as f64;
                (0..PIECES)
                    .map(|k| {
                        let s = (k as f64 + 0.5) * h;
                        let (ax, ay) = symmetric_potential(alpha, r0, p.0 + s * dx, p.1 + s * dy);
                        (ax * dx + ay * dy) * h
                    })
                    .sum()
            }
        }
    }
}

/// Rotationally symmetric gauge around the origin with core radius `r0`.
pub fn symmetric_gauge(grid: &Grid2D, alpha: f64, r0: f64) -> Result<GaugeField> {
    symmetric_gauge_with(grid, alpha, r0, LinkRule::Exact)
}

pub fn symmetric_gauge_with(grid: &Grid2D, alpha: f64, r0: f64, rule: LinkRule) -> Result<GaugeField> {
    let h = grid.dx.max(grid.dy);
    if !(r0 >= 3.0 * h) {
        return Err(Error::config(format!("core radius {r0} is under-resolved (needs ≥ {})", 3.0 * h)));
    }
    let mut g = zero_gauge(grid);
    g.kind = GaugeKind::Symmetric;
    g.alpha = alpha;
    if alpha == 0.0 {
        return Ok(g);
    }
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let p = (grid.x(i), grid.y(j));
            let idx = grid.index(i, j);
            if i + 1 < grid.nx {
                g.link_x[idx] = symmetric_link(alpha, r0, rule, p, (grid.x(i + 1), p.1));
            }
            if j + 1 < grid.ny {
                g.link_y[idx] = symmetric_link(alpha, r0, rule, p, (p.0, grid.y(j + 1)));
            }
        }
    }
    Ok(g)
}

/// Flux through one plaquette, split into a wrapped part and a winding count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaquetteFlux {
    /// Unwrapped clockwise circulation.
    pub raw: f64,
    /// `raw` wrapped to `(−π, π]`.
    pub wrapped: f64,
    /// `raw = wrapped + 2π·winding`.
    pub winding: i64,
}

/// Wraps an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Flux through the plaquette whose lower-left node is `(i, j)`.
pub fn plaquette_flux(gauge: &GaugeField, i: usize, j: usize) -> Result<PlaquetteFlux> {
    let g = &gauge.grid;
    if i + 1 >= g.nx || j + 1 >= g.ny {
        return Err(Error::config(format!("plaquette ({i}, {j}) is not inside the grid")));
    }
    let ccw = gauge.phase_x(i, j) + gauge.phase_y(i + 1, j) - gauge.phase_x(i, j + 1) - gauge.phase_y(i, j);
    let raw = -ccw;
    let wrapped = wrap_angle(raw);
    let winding = ((raw - wrapped) / (2.0 * PI)).round() as i64;
    Ok(PlaquetteFlux { raw, wrapped, winding })
}

/// Sum of raw plaquette fluxes over the whole grid.
pub fn total_flux(gauge: &GaugeField) -> f64 {
    let g = &gauge.grid;
    let mut s = 0.0;
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            s += plaquette_flux(gauge, i, j).map(|p| p.raw).unwrap_or(0.0);
        }
    }
    s
}

/// Clockwise circulation of the link phases along a closed lattice path.
///
/// Consecutive nodes must be nearest neighbours; the path is closed
/// implicitly. Traversing it counter-clockwise yields the enclosed flux.
pub fn loop_flux(gauge: &GaugeField, path: &[(usize, usize)]) -> Result<f64> {
    if path.len() < 4 {
        return Err(Error::config("a lattice loop needs at least four nodes"));
    }
    let mut ccw = 0.0;
    for k in 0..path.len() {
        let (a, b) = (path[k], path[(k + 1) % path.len()]);
        ccw += match (b.0 as isize - a.0 as isize, b.1 as isize - a.1 as isize) {
            (1, 0) => gauge.phase_x(a.0, a.1),
            (-1, 0) => -gauge.phase_x(b.0, b.1),
            (0, 1) => gauge.phase_y(a.0, a.1),
            (0, -1) => -gauge.phase_y(b.0, b.1),
            _ => return Err(Error::config(format!("path step {a:?} → {b:?} is not a lattice link"))),
        };
    }
    Ok(-ccw)
}

/// Counter-clockwise rectangular path with corners `(i0, j0)` and `(i1, j1)`.
pub fn rectangle_path(i0: usize, j0: usize, i1: usize, j1: usize) -> Vec<(usize, usize)> {
    let mut p = Vec::new();
    for i in i0..i1 {
        p.push((i, j0));
    }
    for j in j0..j1 {
        p.push((i1, j));
    }
    for i in (i0 + 1..=i1).rev() {
        p.push((i, j1));
    }
    for j in (j0 + 1..=j1).rev() {
        p.push((i0, j));
    }
    p
}

/// Half-line where a multivalued gauge function jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCut {
    pub center: (f64, f64),
    /// Direction of the half-line, radians from `+x`.
    pub direction: f64,
}

/// Real phase `χ` per node, optionally with a branch cut.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction {
    grid: Grid2D,
    chi: Vec<f64>,
    cut: Option<BranchCut>,
}

impl GaugeFunction {
    pub fn constant(grid: &Grid2D, c: f64) -> Self {
        Self { grid: *grid, chi: vec![c; grid.len()], cut: None }
    }

    /// Single-valued `χ(x, y)` sampled at the nodes.
    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut chi = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let v = f(grid.x(i), grid.y(j));
                if !v.is_finite() {
                    return Err(Error::numerical("gauge function is not finite"));
                }
                chi.push(v);
            }
        }
        Ok(Self { grid: *grid, chi, cut: None })
    }

    /// `χ = coefficient·θ`, with `θ ∈ [0, 2π)` measured counter-clockwise from
    /// the cut direction, so the jump of `2π·coefficient` sits on the cut.
    pub fn winding(grid: &Grid2D, center: (f64, f64), coefficient: f64, cut_direction: f64) -> Self {
        let mut chi = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let a = (grid.y(j) - center.1).atan2(grid.x(i) - center.0) - cut_direction;
                chi.push(coefficient * a.rem_euclid(2.0 * PI));
            }
        }
        Self { grid: *grid, chi, cut: Some(BranchCut { center, direction: cut_direction }) }
    }

    /// Gauge function taking `symmetric_gauge(α)` to `string_gauge(α)`.
    pub fn symmetric_to_string(grid: &Grid2D, alpha: f64) -> Self {
        Self::winding(grid, (0.0, 0.0), alpha / (2.0 * PI), 0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.chi
    }

    pub fn cut(&self) -> Option<BranchCut> {
        self.cut
    }

    pub fn negated(&self) -> Self {
        Self { grid: self.grid, chi: self.chi.iter().map(|c| -c).collect(), cut: self.cut }
    }
}

/// `ψ → exp(iχ)ψ`, `φ_{i→j} → φ_{i→j} + χ_j − χ_i`.
///
/// Differences are taken between node values, so a branch cut in `χ` lands
/// on the links it crosses.
pub fn gauge_transform(f: &WaveField, gauge: &GaugeField, chi: &GaugeFunction) -> Result<(WaveField, GaugeField)> {
    f.grid().ensure_same(&gauge.grid)?;
    gauge.grid.ensure_same(&chi.grid)?;
    let g = gauge.grid;
    let amp: Vec<Complex64> =
        f.amplitudes().iter().zip(&chi.chi).map(|(a, c)| a * Complex64::from_polar(1.0, *c)).collect();
    let mut out = gauge.clone();
    out.transformed = true;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let idx = g.index(i, j);
            if i + 1 < g.nx {
                out.link_x[idx] += chi.chi[idx + 1] - chi.chi[idx];
            }
            if j + 1 < g.ny {
                out.link_y[idx] += chi.chi[idx + g.nx] - chi.chi[idx];
            }
        }
    }
    Ok((WaveField::from_amplitudes(&g, amp)?, out))
}

/// Fluxes allowed by superconducting quantization: `α = πk`, `k = 0..=k_max`.
pub fn quantized_flux_values(k_max: usize) -> Vec<f64> {
    (0..=k_max).map(|k| PI * k as f64).collect()
}
