use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::gauge::wrap_angle;

/// Removes `2π` jumps between consecutive samples.
pub fn unwrap_phases(args: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(args.len());
    let mut offset = 0.0;
    for (k, &a) in args.iter().enumerate() {
        if k > 0 {
            let prev = args[k - 1];
            offset += wrap_angle(a - prev) - (a - prev);
        }
        out.push(a + offset);
    }
    out
}

/// `|a − b|` on the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Summary of an `arg⟨exp(i p_x L)⟩` trace around a crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpAnalysis {
    /// Net argument change, wrapped to `(−π, π]`.
    pub magnitude: f64,
    /// Net change of the unwrapped argument.
    pub unwrapped: f64,
    /// Where the unwrapped argument passes half of its net change.
    pub jump_time: Option<f64>,
    /// Largest argument change before the window, from the first sample.
    pub pre_drift: f64,
    /// Largest argument change after the window, from the last sample.
    pub post_drift: f64,
    /// Same as the drifts, for the modulus.
    pub pre_modulus_drift: f64,
    pub post_modulus_drift: f64,
}

/// Net change below which no jump time is reported.
pub const MIN_JUMP: f64 = 1e-3;

/// Analyses a trace sampled at `times`, with the crossing window
/// `[t_cross − width/2, t_cross + width/2]`.
pub fn jump_analysis(times: &[f64], values: &[Complex64], t_cross: f64, width: f64) -> JumpAnalysis {
    assert!(!values.is_empty() && times.len() == values.len());
    let args: Vec<f64> = values.iter().map(|v| v.arg()).collect();
    let u = unwrap_phases(&args);
    let n = u.len();
    let unwrapped = u[n - 1] - u[0];
    let (lo, hi) = (t_cross - 0.5 * width, t_cross + 0.5 * width);
    let (a0, m0) = (args[0], values[0].norm());
    let (a1, m1) = (args[n - 1], values[n - 1].norm());
    let mut pre = (0.0f64, 0.0f64);
    let mut post = (0.0f64, 0.0f64);
    for k in 0..n {
        if times[k] < lo {
            pre.0 = pre.0.max(circular_distance(args[k], a0));
            pre.1 = pre.1.max((values[k].norm() - m0).abs());
        } else if times[k] > hi {
            post.0 = post.0.max(circular_distance(args[k], a1));
            post.1 = post.1.max((values[k].norm() - m1).abs());
        }
    }
    let jump_time = if unwrapped.abs() < MIN_JUMP {
        None
    } else {
        let half = u[0] + 0.5 * unwrapped;
        (1..n).find_map(|k| {
            let (p, q) = (u[k - 1] - half, u[k] - half);
            if p == 0.0 {
                Some(times[k - 1])
            } else if p.signum() != q.signum() || q == 0.0 {
                Some(times[k - 1] + (times[k] - times[k - 1]) * p / (p - q))
            } else {
                None
            }
        })
    };
    JumpAnalysis {
        magnitude: wrap_angle(a1 - a0),
        unwrapped,
        jump_time,
        pre_drift: pre.0,
        post_drift: post.0,
        pre_modulus_drift: pre.1,
        post_modulus_drift: post.1,
    }
}

/// Fringe displacement of `slice` relative to `reference`, in fringe
/// spacings towards `+x`, and the fringe wavenumber used.
///
/// The fringe wavenumber is the dominant positive frequency of the reference's
/// curvature spectrum `q²·|S(q)|`, which suppresses the smooth envelope. The
/// shift is `−arg(S(κ)·conj(S_ref(κ)))/2π`.
pub fn fringe_shift(slice: &[f64], reference: &[f64], dx: f64) -> (f64, f64) {
    assert_eq!(slice.len(), reference.len());
    let n = slice.len();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let spectrum = |s: &[f64]| {
        let mut v: Vec<Complex64> = s.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        fft.process(&mut v);
        v
    };
    let (s, r) = (spectrum(slice), spectrum(reference));
    let best = (1..n / 2)
        .max_by(|&a, &b| {
            let wa = (a * a) as f64 * r[a].norm();
            let wb = (b * b) as f64 * r[b].norm();
            wa.total_cmp(&wb)
        })
        .unwrap_or(1);
    let kappa = 2.0 * PI * best as f64 / (n as f64 * dx);
    let phase = (s[best] * r[best].conj()).arg();
    (-phase / (2.0 * PI), kappa)
}
