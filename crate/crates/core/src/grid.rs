//! Uniform rectangular lattice and complex wave fields living on it.
//!
//! Storage is row-major with `y` as the outer index: node `(i, j)` lives at
//! `j * nx + i`. Snapshot files depend on this order.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest admissible node count along either axis.
pub const MIN_NODES: usize = 16;

/// Uniform 2D lattice with node coordinates `x_i = x0 + i·dx`, `y_j = y0 + j·dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, x0: f64, y0: f64) -> Result<Self> {
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(Error::config(format!("grid needs at least {MIN_NODES} nodes per axis, got {nx}x{ny}")));
        }
        if !(dx > 0.0 && dy > 0.0) || !dx.is_finite() || !dy.is_finite() {
            return Err(Error::config(format!("grid spacings must be positive, got dx={dx}, dy={dy}")));
        }
        if !x0.is_finite() || !y0.is_finite() {
            return Err(Error::config("grid origin must be finite"));
        }
        Ok(Self { nx, ny, dx, dy, x0, y0 })
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Coordinates of the last node along each axis.
    pub fn upper_corner(&self) -> (f64, f64) {
        (self.x(self.nx - 1), self.y(self.ny - 1))
    }

    /// Column index nearest to `x`, clamped to the grid.
    pub fn nearest_column(&self, x: f64) -> usize {
        let i = ((x - self.x0) / self.dx).round();
        i.clamp(0.0, (self.nx - 1) as f64) as usize
    }

    /// Row index nearest to `y`, clamped to the grid.
    pub fn nearest_row(&self, y: f64) -> usize {
        let j = ((y - self.y0) / self.dy).round();
        j.clamp(0.0, (self.ny - 1) as f64) as usize
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    pub(crate) fn ensure_same(&self, other: &Grid2D) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::config("fields are defined on different grids"))
        }
    }
}

/// Convenience constructor mirroring [`Grid2D::new`].
pub fn make_grid(nx: usize, ny: usize, dx: f64, dy: f64, x0: f64, y0: f64) -> Result<Grid2D> {
    Grid2D::new(nx, ny, dx, dy, x0, y0)
}

/// Set of nodes where the wavefunction is pinned to zero (hard walls).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMask {
    grid: Grid2D,
    blocked: Vec<bool>,
}

impl NodeMask {
    pub fn empty(grid: &Grid2D) -> Self {
        Self { grid: *grid, blocked: vec![false; grid.len()] }
    }

    /// Blocks every node strictly closer than `radius` to `center`.
    pub fn disk(grid: &Grid2D, center: (f64, f64), radius: f64) -> Self {
        let mut blocked = vec![false; grid.len()];
        let r2 = radius * radius;
        for j in 0..grid.ny {
            let dy = grid.y(j) - center.1;
            for i in 0..grid.nx {
                let dx = grid.x(i) - center.0;
                blocked[grid.index(i, j)] = dx * dx + dy * dy < r2;
            }
        }
        Self { grid: *grid, blocked }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn is_blocked(&self, idx: usize) -> bool {
        self.blocked[idx]
    }

    pub fn blocked(&self) -> &[bool] {
        &self.blocked
    }

    pub fn count(&self) -> usize {
        self.blocked.iter().filter(|b| **b).count()
    }
}

/// Complex amplitude per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Grid2D,
    amp: Vec<Complex64>,
}

impl WaveField {
    pub fn zeros(grid: &Grid2D) -> Self {
        Self { grid: *grid, amp: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_amplitudes(grid: &Grid2D, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != grid.len() {
            return Err(Error::config(format!(
                "amplitude count {} does not match grid size {}",
                amp.len(),
                grid.len()
            )));
        }
        Ok(Self { grid: *grid, amp })
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut amp = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            let y = grid.y(j);
            for i in 0..grid.nx {
                amp.push(f(grid.x(i), y));
            }
        }
        Self { grid: *grid, amp }
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amp
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.amp[self.grid.index(i, j)]
    }

    /// `Σ|ψ|²·dx·dy`, summed row by row for a fixed reduction order.
    pub fn norm_sq(&self) -> f64 {
        let row_sums: Vec<f64> =
            self.amp.chunks(self.grid.nx).map(|row| row.iter().map(|a| a.norm_sqr()).sum::<f64>()).collect();
        row_sums.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_sq();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::numerical(format!("cannot normalize a field with norm² = {n2}")));
        }
        let s = 1.0 / n2.sqrt();
        self.amp.iter_mut().for_each(|a| *a *= s);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// Multiplies every amplitude by `exp(iθ)`.
    pub fn with_global_phase(mut self, theta: f64) -> Self {
        let p = Complex64::from_polar(1.0, theta);
        self.amp.iter_mut().for_each(|a| *a *= p);
        self
    }

    /// Pins masked nodes to zero.
    pub fn apply_mask(&mut self, mask: &NodeMask) -> Result<()> {
        self.grid.ensure_same(mask.grid())?;
        for (a, b) in self.amp.iter_mut().zip(mask.blocked()) {
            if *b {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(())
    }

    /// Shifts the field by `rows` lattice rows in +y, filling with zeros.
    pub fn translated_rows(&self, rows: isize) -> Self {
        let nx = self.grid.nx;
        let ny = self.grid.ny as isize;
        let mut out = WaveField::zeros(&self.grid);
        for j in 0..ny {
            let src = j - rows;
            if (0..ny).contains(&src) {
                let (d, s) = (j as usize * nx, src as usize * nx);
                out.amp[d..d + nx].copy_from_slice(&self.amp[s..s + nx]);
            }
        }
        out
    }

    /// Largest `|ψ|²` on the outermost ring of nodes.
    pub fn max_boundary_density(&self) -> f64 {
        let g = &self.grid;
        let mut m: f64 = 0.0;
        for i in 0..g.nx {
            m = m.max(self.at(i, 0).norm_sqr()).max(self.at(i, g.ny - 1).norm_sqr());
        }
        for j in 0..g.ny {
            m = m.max(self.at(0, j).norm_sqr()).max(self.at(g.nx - 1, j).norm_sqr());
        }
        m
    }

    /// `⟨self|other⟩ = Σ conj(self)·other·dx·dy`.
    pub fn inner(&self, other: &WaveField) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        let s: Complex64 = self
            .amp
            .chunks(self.grid.nx)
            .zip(other.amp.chunks(self.grid.nx))
            .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p.conj() * q).sum::<Complex64>())
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        Ok(s * self.grid.cell_area())
    }
}

/// One real value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn integral(&self) -> f64 {
        self.values.chunks(self.grid.nx).map(|r| r.iter().sum::<f64>()).collect::<Vec<_>>().iter().sum::<f64>()
            * self.grid.cell_area()
    }

    /// Continuum L² norm `sqrt(Σ v²·dx·dy)`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    /// Continuum L² distance between two fields on the same grid.
    pub fn l2_distance(&self, other: &ScalarField) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok((s * self.grid.cell_area()).sqrt())
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.grid.nx;
        &self.values[j * nx..(j + 1) * nx]
    }
}

/// Two real values per node.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid2D,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl VectorField {
    pub fn integral(&self) -> (f64, f64) {
        let a = self.grid.cell_area();
        (self.x.iter().sum::<f64>() * a, self.y.iter().sum::<f64>() * a)
    }
}

/// Normalized Gaussian `∝ exp(−r²/(4σ²))·exp(i k·x)` centred at `center`.
///
/// `σ` is the standard deviation of the density. The packet must be resolved
/// (`σ > 2·max(dx, dy)`) and its amplitude on the grid boundary must stay
/// below `1e-10` of the peak.
pub fn gaussian_packet(grid: &Grid2D, center: (f64, f64), sigma: f64, momentum: (f64, f64)) -> Result<WaveField> {
    let h = grid.dx.max(grid.dy);
    if !(sigma > 2.0 * h) {
        return Err(Error::config(format!("packet width {sigma} is under-resolved (needs > {})", 2.0 * h)));
    }
    let inv = 1.0 / (4.0 * sigma * sigma);
    let envelope = |x: f64, y: f64| {
        let (ux, uy) = (x - center.0, y - center.1);
        (-(ux * ux + uy * uy) * inv).exp()
    };
    let mut peak: f64 = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            peak = peak.max(envelope(grid.x(i), grid.y(j)));
        }
    }
    let mut edge: f64 = 0.0;
    for j in 0..grid.ny {
        for i in [0, grid.nx - 1] {
            edge = edge.max(envelope(grid.x(i), grid.y(j)));
        }
    }
    for i in 0..grid.nx {
        for j in [0, grid.ny - 1] {
            edge = edge.max(envelope(grid.x(i), grid.y(j)));
        }
    }
    if !(peak > 0.0) || edge > 1e-10 * peak {
        return Err(Error::config(format!(
            "packet at ({}, {}) with width {sigma} is not contained by the grid (edge/peak = {:e})",
            center.0,
            center.1,
            if peak > 0.0 { edge / peak } else { f64::INFINITY }
        )));
    }
    WaveField::from_fn(grid, |x, y| Complex64::from_polar(envelope(x, y), momentum.0 * x + momentum.1 * y)).normalized()
}

/// Compactly supported bump profile `exp(−1/(a² − r²))` for `r < a`, and
/// exactly zero for `r ≥ a`.
#[inline]
pub fn bump_amplitude(r: f64, a: f64) -> f64 {
    let d = a * a - r * r;
    if d <= 0.0 {
        0.0
    } else {
        (-1.0 / d).exp()
    }
}

/// Normalized radial bump packet of radius `a` centred at `center`.
pub fn bump_packet(grid: &Grid2D, center: (f64, f64), a: f64) -> Result<WaveField> {
    let h = grid.dx.max(grid.dy);
    if !(a > 4.0 * h) {
        return Err(Error::config(format!("bump radius {a} is under-resolved (needs > {})", 4.0 * h)));
    }
    WaveField::from_fn(grid, |x, y| {
        let r = (x - center.0).hypot(y - center.1);
        Complex64::new(bump_amplitude(r, a), 0.0)
    })
    .normalized()
    .map_err(|_| Error::config("bump packet has no support on the grid"))
}

/// Normalized `w1·f1 + w2·exp(iβ)·f2`.
pub fn superpose(f1: &WaveField, f2: &WaveField, w1: f64, w2: f64, beta: f64) -> Result<WaveField> {
    f1.grid.ensure_same(&f2.grid)?;
    let p = Complex64::from_polar(w2, beta);
    let amp: Vec<Complex64> = f1.amp.iter().zip(&f2.amp).map(|(a, b)| a * w1 + b * p).collect();
    let out = WaveField { grid: f1.grid, amp };
    let scale = w1 * w1 * f1.norm_sq() + w2 * w2 * f2.norm_sq();
    let n2 = out.norm_sq();
    if !(n2 > 1e-20 * scale) {
        return Err(Error::numerical("superposition has zero norm"));
    }
    out.normalized()
}
