//! Cylinder–electron rotor pair with `H = L_c²/(2I_c) + (L_e − λL_c)²/(2I_e)`.
//!
//! The Hamiltonian is diagonal in the angular-momentum basis `|n, m⟩`
//! (`L_c = n`, `L_e = m`), so evolution and the shift unitary are phase
//! multiplications. States are stored on `n ∈ [−N_c, N_c]`, `m ∈ [−N_e, N_e]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Which electron inertia enters the energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InertiaMode {
    /// `I_e` as given.
    #[default]
    Bare,
    /// `I_e′ = I_e − I_c·λ²`.
    Renormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotorParams {
    pub inertia_c: f64,
    pub inertia_e: f64,
    pub lambda: f64,
    pub mode: InertiaMode,
}

impl RotorParams {
    pub fn new(inertia_c: f64, inertia_e: f64, lambda: f64) -> Result<Self> {
        let p = Self { inertia_c, inertia_e, lambda, mode: InertiaMode::Bare };
        p.validate()?;
        Ok(p)
    }

    pub fn with_mode(mut self, mode: InertiaMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inertia_c > 0.0 && self.inertia_e > 0.0) || !self.lambda.is_finite() {
            return Err(Error::config(format!(
                "rotor needs I_c, I_e > 0 and finite λ (got {}, {}, {})",
                self.inertia_c, self.inertia_e, self.lambda
            )));
        }
        if !(self.inertia_c * self.lambda * self.lambda < self.inertia_e) {
            return Err(Error::config(format!(
                "I_c·λ² = {} must be below I_e = {}",
                self.inertia_c * self.lambda * self.lambda,
                self.inertia_e
            )));
        }
        Ok(())
    }

    /// Electron inertia used in the energy.
    pub fn effective_inertia_e(&self) -> f64 {
        match self.mode {
            InertiaMode::Bare => self.inertia_e,
            InertiaMode::Renormalized => self.inertia_e - self.inertia_c * self.lambda * self.lambda,
        }
    }
}

/// `E = ½[n²/I_c + (m − λn)²/I_e]`.
pub fn energy_level(p: &RotorParams, n: i64, m: i64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    let d = m - p.lambda * n;
    0.5 * (n * n / p.inertia_c + d * d / p.effective_inertia_e())
}

/// Normalized `c_m ∝ exp(−m²/Δm²)·exp(−i·m·φ₀)` on `m ∈ [−N_e, N_e]`.
pub fn coherent_angular_state(phi0: f64, dm: f64, ne: usize) -> Result<Vec<Complex64>> {
    if !(dm > 0.0) {
        return Err(Error::config(format!("Δm must be positive, got {dm}")));
    }
    if (ne as f64) < 6.0 * dm {
        return Err(Error::config(format!("truncation N_e = {ne} is below 6·Δm = {}", 6.0 * dm)));
    }
    let mut c: Vec<Complex64> = (-(ne as i64)..=ne as i64)
        .map(|m| {
            let mf = m as f64;
            Complex64::from_polar((-mf * mf / (dm * dm)).exp(), -mf * phi0)
        })
        .collect();
    let s = 1.0 / c.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    c.iter_mut().for_each(|a| *a *= s);
    Ok(c)
}

/// `⟨e^{iφ}⟩ = Σ_m conj(c_m)·c_{m−1}` for coefficients indexed from `−N`.
pub fn angle_moment(c: &[Complex64]) -> Complex64 {
    c.windows(2).map(|w| w[1].conj() * w[0]).sum()
}

/// Circular mean of the angle.
pub fn circular_mean(c: &[Complex64]) -> f64 {
    angle_moment(c).arg()
}

/// `2·√(−2 ln R)`, the 1/e amplitude half-width of a wrapped Gaussian with
/// mean resultant length `R`.
pub fn angular_spread(c: &[Complex64]) -> f64 {
    2.0 * (-2.0 * angle_moment(c).norm().ln()).max(0.0).sqrt()
}

/// Joint coefficients `c[n, m]`, `n` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct RotorState {
    pub params: RotorParams,
    nc: usize,
    ne: usize,
    coeffs: Vec<Complex64>,
}

/// Largest accepted mass on the two outermost shells of the truncation.
pub const TAIL_TOLERANCE: f64 = 1e-12;

impl RotorState {
    pub fn from_coefficients(params: RotorParams, nc: usize, ne: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        params.validate()?;
        if coeffs.len() != (2 * nc + 1) * (2 * ne + 1) {
            return Err(Error::config("rotor coefficient count does not match the truncation"));
        }
        let s = Self { params, nc, ne, coeffs };
        let n2 = s.norm_sq();
        if (n2 - 1.0).abs() > 1e-12 {
            return Err(Error::numerical(format!("rotor state is not normalized: {n2}")));
        }
        let tail = s.tail_mass();
        if tail > TAIL_TOLERANCE {
            return Err(Error::numerical(format!(
                "rotor truncation tail mass {tail:.2e} exceeds {TAIL_TOLERANCE:.0e}"
            )));
        }
        Ok(s)
    }

    /// `Σ_k a_k |n_k⟩ ⊗ |χ_k⟩` for cylinder indices `n_k` and electron vectors `χ_k`.
    pub fn from_branches(params: RotorParams, nc: usize, branches: &[(i64, Complex64, &[Complex64])]) -> Result<Self> {
        let ne = match branches.first() {
            Some((_, _, chi)) => (chi.len().saturating_sub(1)) / 2,
            None => return Err(Error::config("rotor state needs at least one branch")),
        };
        let width = 2 * ne + 1;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (2 * nc + 1) * width];
        for &(n, a, chi) in branches {
            if chi.len() != width || n.unsigned_abs() as usize > nc {
                return Err(Error::config(format!("branch n = {n} does not fit the truncation")));
            }
            let row = (n + nc as i64) as usize * width;
            for (k, c) in chi.iter().enumerate() {
                coeffs[row + k] += a * c;
            }
        }
        let s = 1.0 / coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        coeffs.iter_mut().for_each(|a| *a *= s);
        Self::from_coefficients(params, nc, ne, coeffs)
    }

    /// Cylinder eigenstate `n` times an electron vector.
    pub fn product(params: RotorParams, nc: usize, n: i64, electron: &[Complex64]) -> Result<Self> {
        Self::from_branches(params, nc, &[(n, Complex64::new(1.0, 0.0), electron)])
    }

    pub fn nc(&self) -> usize {
        self.nc
    }

    pub fn ne(&self) -> usize {
        self.ne
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn at(&self, n: i64, m: i64) -> Complex64 {
        self.coeffs[self.index(n, m)]
    }

    #[inline]
    fn index(&self, n: i64, m: i64) -> usize {
        (n + self.nc as i64) as usize * (2 * self.ne + 1) + (m + self.ne as i64) as usize
    }

    /// Iterates `(n, m, c)`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        let width = 2 * self.ne + 1;
        let (nc, ne) = (self.nc as i64, self.ne as i64);
        self.coeffs.iter().enumerate().map(move |(k, c)| ((k / width) as i64 - nc, (k % width) as i64 - ne, *c))
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Mass on `|n| ≥ N_c − 1` or `|m| ≥ N_e − 1`.
    pub fn tail_mass(&self) -> f64 {
        let (nc, ne) = (self.nc as i64, self.ne as i64);
        self.iter().filter(|(n, m, _)| n.abs() >= nc - 1 || m.abs() >= ne - 1).map(|(_, _, c)| c.norm_sqr()).sum()
    }

    /// Electron vector of branch `n` (unnormalized).
    pub fn electron_branch(&self, n: i64) -> &[Complex64] {
        let width = 2 * self.ne + 1;
        let row = (n + self.nc as i64) as usize * width;
        &self.coeffs[row..row + width]
    }

    fn map_phases(&self, phase: impl Fn(i64, i64) -> f64) -> Self {
        let mut out = self.clone();
        let width = 2 * self.ne + 1;
        let (nc, ne) = (self.nc as i64, self.ne as i64);
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            let (n, m) = ((k / width) as i64 - nc, (k % width) as i64 - ne);
            *c *= Complex64::from_polar(1.0, phase(n, m));
        }
        out
    }
}

/// `c_{n,m} → e^{−iE_{nm}t}·c_{n,m}`.
pub fn evolve_rotor(state: &RotorState, t: f64) -> RotorState {
    let p = state.params;
    state.map_phases(|n, m| -energy_level(&p, n, m) * t)
}

/// `exp(i(λL_c − L_e)δ)`: `c_{n,m} → e^{i(λn − m)δ}·c_{n,m}`.
pub fn shift_unitary(state: &RotorState, delta: f64) -> RotorState {
    let lambda = state.params.lambda;
    state.map_phases(|n, m| (lambda * n as f64 - m as f64) * delta)
}

/// Partial trace over the electron: `ρ_{nn′} = Σ_m c_{n,m}·conj(c_{n′,m})`.
pub fn reduced_cylinder_state(state: &RotorState) -> DMatrix<Complex64> {
    let dim = 2 * state.nc + 1;
    let width = 2 * state.ne + 1;
    let rows: Vec<&[Complex64]> = state.coeffs.chunks(width).collect();
    let mut rho = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let active: Vec<usize> = (0..dim).filter(|&a| rows[a].iter().any(|c| c.norm_sqr() > 0.0)).collect();
    for &a in &active {
        for &b in &active {
            if b < a {
                continue;
            }
            let v: Complex64 = rows[a].iter().zip(rows[b]).map(|(x, y)| x * y.conj()).sum();
            rho[(a, b)] = v;
            rho[(b, a)] = v.conj();
        }
    }
    rho
}

/// Von Neumann entropy of the reduced cylinder state, in nats.
pub fn entanglement_entropy(state: &RotorState) -> f64 {
    let rho = reduced_cylinder_state(state);
    // only the populated block matters; everything else is exactly zero
    let dim = rho.nrows();
    let active: Vec<usize> = (0..dim).filter(|&a| rho[(a, a)].re > 0.0).collect();
    let k = active.len();
    if k <= 1 {
        return 0.0;
    }
    let sub = DMatrix::from_fn(k, k, |i, j| rho[(active[i], active[j])]);
    von_neumann(&sub)
}

/// `−Σ p ln p` over the eigenvalues of a Hermitian density matrix.
pub fn von_neumann(rho: &DMatrix<Complex64>) -> f64 {
    let eig = rho.clone().symmetric_eigenvalues();
    eig.iter().filter(|p| **p > 1e-300).map(|p| -p * p.ln()).sum::<f64>().max(0.0)
}

/// How the `λ·L_c·L_e` coupling splits into the mean and fluctuating parts of
/// `L_c = ⟨L_c⟩ + δL_c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub mean_lc: f64,
    pub var_lc: f64,
    /// `(δL_c value, probability)` for every populated cylinder level.
    pub delta_spectrum: Vec<(f64, f64)>,
    /// `|⟨L_c⟩|·√⟨L_e²⟩`.
    pub mean_term: f64,
    /// `√⟨(δL_c)²·L_e²⟩`.
    pub fluctuation_term: f64,
    /// `mean_term / (mean_term + fluctuation_term)`; 1 when `δL_c ≡ 0`.
    pub mean_attribution: f64,
}

pub fn coupling_decomposition(state: &RotorState) -> CouplingReport {
    let nc = state.nc as i64;
    let mut probs = Vec::new();
    let mut le2_given_n = Vec::new();
    for n in -nc..=nc {
        let row = state.electron_branch(n);
        let p: f64 = row.iter().map(|c| c.norm_sqr()).sum();
        if p > 0.0 {
            let ne = state.ne as i64;
            let le2: f64 = row.iter().enumerate().map(|(k, c)| c.norm_sqr() * ((k as i64 - ne) as f64).powi(2)).sum();
            probs.push((n as f64, p));
            le2_given_n.push(le2);
        }
    }
    let total: f64 = probs.iter().map(|(_, p)| p).sum();
    let mean_lc = probs.iter().map(|(n, p)| n * p).sum::<f64>() / total;
    let var_lc = probs.iter().map(|(n, p)| (n - mean_lc).powi(2) * p).sum::<f64>() / total;
    let le2: f64 = le2_given_n.iter().sum::<f64>() / total;
    let fl2: f64 = probs.iter().zip(&le2_given_n).map(|((n, _), l)| (n - mean_lc).powi(2) * l).sum::<f64>() / total;
    let mean_term = mean_lc.abs() * le2.sqrt();
    let fluctuation_term = fl2.sqrt();
    let denom = mean_term + fluctuation_term;
    CouplingReport {
        mean_lc,
        var_lc,
        delta_spectrum: probs.iter().map(|(n, p)| (n - mean_lc, p / total)).collect(),
        mean_term,
        fluctuation_term,
        mean_attribution: if denom > 0.0 { mean_term / denom } else { 1.0 },
    }
}
