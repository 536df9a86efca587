use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid2D;

/// Two-dimensional FFT on row-major grid data, with the grid's wavenumbers.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    kx: Vec<f64>,
    ky: Vec<f64>,
    work: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("nx", &self.nx).field("ny", &self.ny).finish()
    }
}

fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * h);
    (0..n).map(|i| if i < n / 2 { i as f64 * dk } else { (i as f64 - n as f64) * dk }).collect()
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], nx: usize, ny: usize) {
    for j in 0..ny {
        for i in 0..nx {
            dst[i * ny + j] = src[j * nx + i];
        }
    }
}

impl Fft2 {
    pub fn new(grid: &Grid2D) -> Self {
        let mut planner = FftPlanner::new();
        let (nx, ny) = (grid.nx, grid.ny);
        let fwd_x = planner.plan_fft_forward(nx);
        let inv_x = planner.plan_fft_inverse(nx);
        let fwd_y = planner.plan_fft_forward(ny);
        let inv_y = planner.plan_fft_inverse(ny);
        let scratch_len =
            [&fwd_x, &inv_x, &fwd_y, &inv_y].iter().map(|p| p.get_inplace_scratch_len()).max().unwrap_or(0);
        Self {
            nx,
            ny,
            fwd_x,
            inv_x,
            fwd_y,
            inv_y,
            kx: wavenumbers(nx, grid.dx),
            ky: wavenumbers(ny, grid.dy),
            work: vec![Complex64::new(0.0, 0.0); nx * ny],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn kx(&self) -> &[f64] {
        &self.kx
    }

    pub fn ky(&self) -> &[f64] {
        &self.ky
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.fwd_x.process_with_scratch(data, &mut self.scratch);
        transpose(data, &mut self.work, self.nx, self.ny);
        self.fwd_y.process_with_scratch(&mut self.work, &mut self.scratch);
        transpose(&self.work, data, self.ny, self.nx);
    }

    /// Inverse transform in place, including the `1/(nx·ny)` factor.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.inv_x.process_with_scratch(data, &mut self.scratch);
        transpose(data, &mut self.work, self.nx, self.ny);
        self.inv_y.process_with_scratch(&mut self.work, &mut self.scratch);
        transpose(&self.work, data, self.ny, self.nx);
        let s = 1.0 / (self.nx * self.ny) as f64;
        data.iter_mut().for_each(|a| *a *= s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn roundtrip_and_plane_wave_peak() {
        let g = make_grid(32, 16, 0.5, 0.25, -8.0, -2.0).unwrap();
        let mut fft = Fft2::new(&g);
        let (ix, iy) = (3usize, 14usize);
        let (kx, ky) = (fft.kx()[ix], fft.ky()[iy]);
        assert!(ky < 0.0);
        let mut data: Vec<Complex64> = (0..g.ny)
            .flat_map(|j| (0..g.nx).map(move |i| (i, j)))
            .map(|(i, j)| Complex64::from_polar(1.0, kx * g.x(i) + ky * g.y(j)))
            .collect();
        let orig = data.clone();
        fft.forward(&mut data);
        let peak = data.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0;
        assert_eq!(peak, iy * g.nx + ix);
        assert!((data[peak].norm() - 512.0).abs() < 1e-9);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
