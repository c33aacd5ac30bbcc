//! Fourier-multiplier fractional Laplacian `|k|^{2s}`, used as an oracle for
//! the singular-integral route.
//!
//! The far-field constant is removed first. In one dimension the transform
//! of the samples is evaluated at Gauss-Legendre frequencies on
//! `[0, π/h]` (geometrically graded toward `k = 0`) and the inverse integral
//! is taken by the same rule, so no periodization enters. In two
//! dimensions the samples are zero-padded by an integer factor and the
//! multiplier is applied on the padded periodic lattice with angular wave
//! numbers `k = 2π m / (M h)`.

use std::sync::Arc;

use log::warn;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use rayon::prelude::*;

use crate::error::{check_param, Result};
use crate::fields::{ensure_same, GridSpec, ScalarField};
use crate::special::gauss_legendre;

/// Relative size of `u - c` near the box edge above which periodization
/// error is no longer negligible.
pub const BOUNDARY_THRESHOLD: f64 = 1e-10;

/// How the multiplier is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMethod {
    /// Frequency quadrature of the sampled transform (one dimension only).
    Quadrature,
    /// FFT on the lattice zero-padded by this factor per axis.
    PaddedFft(usize),
}

impl SpectralMethod {
    pub fn default_for(dim: usize) -> Self {
        if dim == 1 {
            Self::Quadrature
        } else {
            Self::PaddedFft(4)
        }
    }
}

/// Immutable, shareable plan for one grid and order.
pub struct SpectralPlan {
    grid: Arc<GridSpec>,
    exponent: f64,
    method: SpectralMethod,
    padded: usize,
    /// Radial frequency nodes (and weights) for the quadrature method,
    /// lattice wave numbers per axis for the FFT method.
    wave_numbers: Vec<f64>,
    wave_weights: Vec<f64>,
    fft: Option<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan")
            .field("exponent", &self.exponent)
            .field("method", &self.method)
            .finish()
    }
}

/// Output of [`SpectralPlan::apply`].
#[derive(Debug, Clone)]
pub struct SpectralOutput {
    pub field: ScalarField,
    /// Largest `|u - c|` near the edge relative to `max |u - c|`.
    pub boundary_excess: f64,
}

impl SpectralOutput {
    pub fn boundary_ok(&self) -> bool {
        self.boundary_excess <= BOUNDARY_THRESHOLD
    }
}

impl SpectralPlan {
    pub fn new(grid: Arc<GridSpec>, s: f64, method: SpectralMethod) -> Result<Self> {
        check_param("s", s, (0.0..=1.0).contains(&s), "order must lie in [0, 1]")?;
        let h = grid.spacing();
        match method {
            SpectralMethod::Quadrature => {
                check_param("dim", grid.dim() as f64, grid.dim() == 1, "frequency quadrature is one-dimensional")?;
                let (ks, kw) = frequency_rule(std::f64::consts::PI / h, 2.5 / grid.half_width());
                Ok(Self {
                    grid,
                    exponent: 2.0 * s,
                    method,
                    padded: 0,
                    wave_numbers: ks,
                    wave_weights: kw,
                    fft: None,
                })
            }
            SpectralMethod::PaddedFft(padding) => {
                check_param("padding", padding as f64, padding >= 1, "padding factor must be at least 1")?;
                let padded = padding * grid.points_per_axis();
                let wave_numbers = (0..padded)
                    .map(|m| {
                        let f = if m <= padded / 2 { m as f64 } else { m as f64 - padded as f64 };
                        2.0 * std::f64::consts::PI * f / (padded as f64 * h)
                    })
                    .collect();
                let mut planner = FftPlanner::new();
                Ok(Self {
                    fft: Some((planner.plan_fft_forward(padded), planner.plan_fft_inverse(padded))),
                    grid,
                    exponent: 2.0 * s,
                    method,
                    padded,
                    wave_numbers,
                    wave_weights: Vec::new(),
                })
            }
        }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn method(&self) -> SpectralMethod {
        self.method
    }

    /// Multiplier `|k|^{2s}`; exactly 0 at `k = 0`.
    pub fn symbol(&self, k: [f64; 2]) -> f64 {
        let k2 = k[0] * k[0] + k[1] * k[1];
        if k2 == 0.0 {
            0.0
        } else {
            k2.powf(0.5 * self.exponent)
        }
    }

    /// Multiplier at a lattice mode of the FFT method.
    fn multiplier(&self, mode: [usize; 2]) -> f64 {
        let kx = self.wave_numbers[mode[0]];
        let ky = if self.grid.dim() == 1 { 0.0 } else { self.wave_numbers[mode[1]] };
        self.symbol([kx, ky])
    }

    pub fn apply(&self, u: &ScalarField) -> Result<SpectralOutput> {
        ensure_same(&self.grid, u.grid())?;
        let c = u.far_field();
        let boundary_excess = boundary_excess(u, c);
        let n = self.grid.points_per_axis();
        let m = self.padded;
        let v = u.values();
        let out = if self.method == SpectralMethod::Quadrature {
            self.quadrature(u, c)
        } else if self.grid.dim() == 1 {
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for i in 0..n {
                buf[i].re = v[i] - c;
            }
            self.fft.as_ref().expect("fft plan").0.process(&mut buf);
            for (i, z) in buf.iter_mut().enumerate() {
                *z *= self.multiplier([i, 0]);
            }
            self.fft.as_ref().expect("fft plan").1.process(&mut buf);
            (0..n).map(|i| buf[i].re / m as f64).collect()
        } else {
            let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
            for i in 0..n {
                for j in 0..n {
                    buf[i * m + j].re = v[i * n + j] - c;
                }
            }
            self.transform_2d(&mut buf, &self.fft.as_ref().expect("fft plan").0);
            for i in 0..m {
                for j in 0..m {
                    buf[i * m + j] *= self.multiplier([i, j]);
                }
            }
            self.transform_2d(&mut buf, &self.fft.as_ref().expect("fft plan").1);
            let scale = (m * m) as f64;
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    out.push(buf[i * m + j].re / scale);
                }
            }
            out
        };
        Ok(SpectralOutput {
            field: ScalarField::new(self.grid.clone(), out)?,
            boundary_excess,
        })
    }

    /// `(1/π) ∫_0^{π/h} k^{2s} Re(û(k) e^{ikx}) dk` with `û` the trapezoidal
    /// transform of `u - c`.
    fn quadrature(&self, u: &ScalarField, c: f64) -> Vec<f64> {
        let x = self.grid.axis_nodes();
        let w = self.grid.weights();
        let v = u.values();
        let ks = &self.wave_numbers;
        let coeffs: Vec<(f64, f64)> = ks
            .par_iter()
            .zip(&self.wave_weights)
            .map(|(&k, &kw)| {
                let (mut re, mut im) = (0.0, 0.0);
                for j in 0..v.len() {
                    let (sn, cs) = (k * x[j]).sin_cos();
                    let a = w[j] * (v[j] - c);
                    re += a * cs;
                    im -= a * sn;
                }
                let f = kw * self.symbol([k, 0.0]);
                (f * re, f * im)
            })
            .collect();
        x.par_iter()
            .map(|&xi| {
                let mut acc = 0.0;
                for (k, (re, im)) in ks.iter().zip(&coeffs) {
                    let (sn, cs) = (k * xi).sin_cos();
                    acc += re * cs - im * sn;
                }
                acc / std::f64::consts::PI
            })
            .collect()
    }

    fn transform_2d(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.padded;
        for row in buf.chunks_mut(m) {
            fft.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..m {
            for i in 0..m {
                col[i] = buf[i * m + j];
            }
            fft.process(&mut col);
            for i in 0..m {
                buf[i * m + j] = col[i];
            }
        }
    }
}

/// Gauss-Legendre rule on `[0, k_max]`: uniform panels of width about
/// `width`, with the first panel split geometrically toward 0 where the
/// multiplier is not smooth.
fn frequency_rule(k_max: f64, width: f64) -> (Vec<f64>, Vec<f64>) {
    let (gn, gw) = gauss_legendre(20);
    let mut ks = Vec::new();
    let mut kw = Vec::new();
    let mut panel = |a: f64, b: f64| {
        for (t, wt) in gn.iter().zip(&gw) {
            ks.push(0.5 * (a + b) + 0.5 * (b - a) * t);
            kw.push(0.5 * (b - a) * wt);
        }
    };
    let panels = (k_max / width).ceil().max(1.0) as usize;
    let width = k_max / panels as f64;
    let mut hi = width;
    for _ in 0..60 {
        panel(0.5 * hi, hi);
        hi *= 0.5;
    }
    for p in 1..panels {
        panel(p as f64 * width, (p + 1) as f64 * width);
    }
    (ks, kw)
}

/// Largest `|u - c|` over the two outermost node layers, relative to
/// `max |u - c|` (0 when `u` is constant).
pub fn boundary_excess(u: &ScalarField, c: f64) -> f64 {
    let g = u.grid();
    let n = g.points_per_axis();
    let near_edge = |i: usize| i < 2 || i + 2 >= n;
    let mut edge: f64 = 0.0;
    let mut all: f64 = 0.0;
    for (k, v) in u.values().iter().enumerate() {
        let d = (v - c).abs();
        all = all.max(d);
        let [i, j] = g.axis_index(k);
        if near_edge(i) || (g.dim() == 2 && near_edge(j)) {
            edge = edge.max(d);
        }
    }
    if all == 0.0 {
        0.0
    } else {
        edge / all
    }
}

/// Spectral fractional Laplacian with the default method; logs a warning
/// when the input does not decay at the box edge.
pub fn frac_laplacian_spectral(u: &ScalarField, s: f64) -> Result<ScalarField> {
    let plan = SpectralPlan::new(u.grid().clone(), s, SpectralMethod::default_for(u.grid().dim()))?;
    let out = plan.apply(u)?;
    if !out.boundary_ok() {
        warn!(
            "spectral Laplacian: input does not decay at the boundary (relative edge value {:e})",
            out.boundary_excess
        );
    }
    Ok(out.field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_grid;
    use crate::special::integrate;
    use crate::testlib::{sample_scalar, ScalarFnSpec};
    use approx::assert_relative_eq;

    #[test]
    fn constant_is_annihilated() {
        let g = make_grid(1, 3.0, 64).unwrap();
        let c = ScalarField::constant(g, 7.0).unwrap();
        let l = frac_laplacian_spectral(&c, 0.5).unwrap();
        assert!(l.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn multiplier_properties() {
        let g = make_grid(2, 3.0, 16).unwrap();
        let p = SpectralPlan::new(g, 0.3, SpectralMethod::PaddedFft(2)).unwrap();
        assert_eq!(p.multiplier([0, 0]), 0.0);
        assert_eq!(p.multiplier([3, 5]), p.multiplier([5, 3]));
        assert_eq!(p.multiplier([3, 1]), p.multiplier([32 - 3, 32 - 1]));
        assert!(p.multiplier([1, 0]) > 0.0);
    }

    #[test]
    fn order_one_is_negative_laplacian() {
        let g = make_grid(1, 10.0, 257).unwrap();
        let u = sample_scalar(&ScalarFnSpec::gaussian(0.0, 1.0, 1.0), &g).unwrap();
        let l = frac_laplacian_spectral(&u, 1.0).unwrap();
        let h = g.spacing();
        let v = u.values();
        for i in 1..256 {
            let fd = -(v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
            assert!((l.values()[i] - fd).abs() < 1.5 * h * h, "i={i}");
        }
    }

    #[test]
    fn half_order_at_origin_matches_multiplier_integral() {
        // (1/2π) ∫ |k| √π e^{-k²/4} dk
        let oracle = integrate(|k| k * std::f64::consts::PI.sqrt() * (-k * k / 4.0).exp(), 0.0, 40.0, 200)
            / std::f64::consts::PI;
        assert_relative_eq!(oracle, 2.0 / std::f64::consts::PI.sqrt(), max_relative = 1e-12);
        let g = make_grid(1, 10.0, 513).unwrap();
        let u = sample_scalar(&ScalarFnSpec::gaussian(0.0, 1.0, 1.0), &g).unwrap();
        let l = frac_laplacian_spectral(&u, 0.5).unwrap();
        assert_relative_eq!(l.values()[256], oracle, max_relative = 1e-4);
    }

    #[test]
    fn padded_fft_agrees_with_quadrature() {
        let g = make_grid(1, 10.0, 256).unwrap();
        let u = sample_scalar(&ScalarFnSpec::gaussian(0.0, 1.0, 1.0), &g).unwrap();
        let a = SpectralPlan::new(g.clone(), 0.75, SpectralMethod::Quadrature).unwrap().apply(&u).unwrap();
        let b = SpectralPlan::new(g, 0.75, SpectralMethod::PaddedFft(16)).unwrap().apply(&u).unwrap();
        for (x, y) in a.field.values().iter().zip(b.field.values()) {
            assert!((x - y).abs() < 1e-5);
        }
    }

    #[test]
    fn two_dimensional_gaussian_at_origin() {
        // (1/4π²) ∫ |k| π e^{-|k|²/4} dk = (1/2) ∫_0^∞ k² e^{-k²/4} dk = √π
        let g = make_grid(2, 6.0, 49).unwrap();
        let u = sample_scalar(&ScalarFnSpec::gaussian(0.0, 1.0, 1.0), &g).unwrap();
        let l = frac_laplacian_spectral(&u, 0.5).unwrap();
        assert_relative_eq!(l.values()[24 * 49 + 24], std::f64::consts::PI.sqrt(), max_relative = 2e-3);
    }

    #[test]
    fn boundary_excess_flags_non_decaying_input() {
        let g = make_grid(1, 2.0, 64).unwrap();
        let u = ScalarField::from_fn(g.clone(), |x| x[0]).unwrap();
        assert!(boundary_excess(&u, u.far_field()) > 0.5);
        let ga = sample_scalar(&ScalarFnSpec::gaussian(0.0, 0.3, 1.0), &g).unwrap();
        assert!(boundary_excess(&ga, ga.far_field()) < 1e-10);
    }
}
