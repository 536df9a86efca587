//! Crank-Nicolson (Cayley) step for one lattice line with Peierls hopping.
//!
//! The line Hamiltonian is `H = −½·B⁻¹·D`, where `D` is the covariant second
//! difference with hard walls and `B = 1 + β·h²·D` (`β = 0` for the standard
//! three-point operator, `β = 1/12` for the compact fourth-order one). The
//! step `(1 + i·dt/2·H)ψ' = (1 − i·dt/2·H)ψ` is multiplied through by `B`, which
//! leaves a tridiagonal system whose factorization is computed once.

use num_complex::Complex64;

/// Spatial discretization of the kinetic operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KineticScheme {
    /// Three-point Laplacian, O(h²).
    Standard,
    /// Compact (Numerov) Laplacian `B⁻¹D`, O(h⁴), still tridiagonal.
    #[default]
    Compact,
}

impl KineticScheme {
    fn beta(&self) -> f64 {
        match self {
            KineticScheme::Standard => 0.0,
            KineticScheme::Compact => 1.0 / 12.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            KineticScheme::Standard => "standard",
            KineticScheme::Compact => "compact",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "standard" => Some(KineticScheme::Standard),
            "compact" => Some(KineticScheme::Compact),
            _ => None,
        }
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pre-factored Cayley step for a line of `n` sites.
#[derive(Debug, Clone)]
pub struct CayleyLine {
    // implicit operator M, kept for residual checks
    m_sub: Vec<Complex64>,
    m_diag: Vec<Complex64>,
    m_sup: Vec<Complex64>,
    // explicit operator N
    n_sub: Vec<Complex64>,
    n_diag: Vec<Complex64>,
    n_sup: Vec<Complex64>,
    // Thomas factors
    c_prime: Vec<Complex64>,
    inv_den: Vec<Complex64>,
}

impl CayleyLine {
    /// `hops[k] = exp(−iφ_{k→k+1})` (length `n − 1`), `blocked[k]` pins site `k`.
    pub fn new(hops: &[Complex64], blocked: &[bool], h: f64, dt: f64, scheme: KineticScheme) -> Self {
        let n = blocked.len();
        assert_eq!(hops.len() + 1, n, "one hop per link");
        let beta = scheme.beta();
        let r = dt / (4.0 * h * h);
        let diag_m = Complex64::new(1.0 - 2.0 * beta, 2.0 * r);
        let diag_n = Complex64::new(1.0 - 2.0 * beta, -2.0 * r);
        let off_m = Complex64::new(beta, -r);
        let off_n = Complex64::new(beta, r);

        let mut line = CayleyLine {
            m_sub: vec![ZERO; n],
            m_diag: vec![ZERO; n],
            m_sup: vec![ZERO; n],
            n_sub: vec![ZERO; n],
            n_diag: vec![ZERO; n],
            n_sup: vec![ZERO; n],
            c_prime: vec![ZERO; n],
            inv_den: vec![ZERO; n],
        };
        for k in 0..n {
            if blocked[k] {
                line.m_diag[k] = Complex64::new(1.0, 0.0);
                continue;
            }
            line.m_diag[k] = diag_m;
            line.n_diag[k] = diag_n;
            if k > 0 && !blocked[k - 1] {
                let u = hops[k - 1].conj();
                line.m_sub[k] = off_m * u;
                line.n_sub[k] = off_n * u;
            }
            if k + 1 < n && !blocked[k + 1] {
                let u = hops[k];
                line.m_sup[k] = off_m * u;
                line.n_sup[k] = off_n * u;
            }
        }
        let mut prev_c = ZERO;
        for k in 0..n {
            let den = line.m_diag[k] - line.m_sub[k] * prev_c;
            let inv = den.inv();
            line.inv_den[k] = inv;
            prev_c = line.m_sup[k] * inv;
            line.c_prime[k] = prev_c;
        }
        line
    }

    pub fn len(&self) -> usize {
        self.m_diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m_diag.is_empty()
    }

    /// `out = N·psi`.
    fn apply_explicit(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = psi.len();
        for k in 0..n {
            let mut v = self.n_diag[k] * psi[k];
            if k > 0 {
                v += self.n_sub[k] * psi[k - 1];
            }
            if k + 1 < n {
                v += self.n_sup[k] * psi[k + 1];
            }
            out[k] = v;
        }
    }

    /// Advances `psi` by one step in place; `scratch` must have the same length.
    pub fn step(&self, psi: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = psi.len();
        self.apply_explicit(psi, scratch);
        // forward sweep writes d' into psi
        let mut prev = ZERO;
        for k in 0..n {
            prev = (scratch[k] - self.m_sub[k] * prev) * self.inv_den[k];
            psi[k] = prev;
        }
        for k in (0..n - 1).rev() {
            let next = psi[k + 1];
            psi[k] -= self.c_prime[k] * next;
        }
    }

    /// Relative residual `‖M·x − N·psi‖ / ‖N·psi‖` of a step from `psi` to `x`.
    pub fn residual(&self, psi: &[Complex64], x: &[Complex64]) -> f64 {
        let n = psi.len();
        let mut rhs = vec![ZERO; n];
        self.apply_explicit(psi, &mut rhs);
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..n {
            let mut v = self.m_diag[k] * x[k];
            if k > 0 {
                v += self.m_sub[k] * x[k - 1];
            }
            if k + 1 < n {
                v += self.m_sup[k] * x[k + 1];
            }
            num += (v - rhs[k]).norm_sqr();
            den += rhs[k].norm_sqr();
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }
}
