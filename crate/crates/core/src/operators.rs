//! Fractional gradient and divergence, mollification of scalar and pair
//! fields, and the singular-integral fractional Laplacian.
//!
//! Fields are extended beyond the box by their far-field constant
//! ([`ScalarField::far_field`]); pair fields of gradient provenance are
//! extended through their generator and other pair fields by zero.

use std::sync::OnceLock;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_param, FracError, Result};
use crate::fields::{fill_rows, GridSpec, OffDiagonalField, Provenance, ScalarField};
use crate::singular::{
    exterior_kernel_mass, extended, laplacian_deficit, nodal_laplacian, square_exterior_mass,
};
use crate::special::{hurwitz_zeta, integrate};

fn check_order(s: f64) -> Result<()> {
    check_param("s", s, (0.0..=1.0).contains(&s), "order must lie in [0, 1]")
}

/// `d_s u(x, y) = (u(x) - u(y)) / |x - y|^s`.
pub fn frac_gradient(u: &ScalarField, s: f64) -> Result<OffDiagonalField> {
    check_order(s)?;
    let grid = u.grid().clone();
    let inv = grid.offset_table(|r| r.powf(-s));
    let v = u.values();
    let m = grid.node_count();
    let mut upper = vec![0.0; m * (m - 1) / 2];
    let g = grid.clone();
    fill_rows(m, &mut upper, |a, b| (v[a] - v[b]) * inv.between(&g, a, b));
    Ok(OffDiagonalField::from_parts(
        grid,
        upper,
        Provenance::Gradient {
            order: s,
            generator: u.clone(),
        },
    ))
}

/// `div_s G(x) = ∫ 2 G(x, y) |x - y|^{-n-s} dy` by the punctured trapezoid
/// rule. Fields of gradient provenance additionally get the local diagonal
/// correction and the integral over the exterior of the box; the exterior
/// term is omitted at boundary nodes, where it diverges.
pub fn frac_divergence(g: &OffDiagonalField, s: f64) -> Result<ScalarField> {
    check_order(s)?;
    let grid = g.grid().clone();
    let n = grid.dim() as f64;
    let kernel = grid.offset_table(|r| 2.0 * r.powf(-n - s));
    let w = grid.weights();
    let m = grid.node_count();
    let mut out: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..m {
                if j != i {
                    acc += g.get(i, j) * w[j] * kernel.between(&grid, i, j);
                }
            }
            acc
        })
        .collect();
    if let Provenance::Gradient { order, generator } = g.provenance() {
        let a = s + order;
        if a <= 0.0 {
            return Err(FracError::Divergent("divergence of order-0 gradient on the whole space"));
        }
        let c = generator.far_field();
        let lap = nodal_laplacian(generator, c);
        let hn = grid.spacing().powi(grid.dim() as i32);
        let v = generator.values();
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            *o += laplacian_deficit(&grid, lap[i], a) * w[i] / hn;
            if !grid.is_boundary(i) && v[i] != c {
                *o += 2.0 * (v[i] - c) * exterior_kernel_mass(&grid, grid.coords(i), a);
            }
        });
    }
    ScalarField::new(grid, out)
}

/// Lattice evaluation of `div_s d_s u` through the symmetric second
/// difference `2u(x) - u(x+z) - u(x-z)`, with `u` extended by its far-field
/// constant and the near-diagonal lattice correction applied.
pub fn frac_laplacian_integral(u: &ScalarField, s: f64) -> Result<ScalarField> {
    check_param("s", s, s > 0.0 && s < 1.0, "order must lie in (0, 1)")?;
    let grid = u.grid().clone();
    let c = u.far_field();
    let lap = nodal_laplacian(u, c);
    let nn = grid.points_per_axis();
    let h = grid.spacing();
    let v = u.values();
    let out: Vec<f64> = if grid.dim() == 1 {
        let kern: Vec<f64> = (0..nn).map(|k| if k == 0 { 0.0 } else { (k as f64 * h).powf(-1.0 - 2.0 * s) }).collect();
        let tail = 4.0 * h.powf(-2.0 * s) * hurwitz_zeta(1.0 + 2.0 * s, nn as f64);
        (0..nn)
            .into_par_iter()
            .map(|i| {
                let ii = i as i64;
                let mut acc = 0.0;
                for (k, kv) in kern.iter().enumerate().skip(1) {
                    let kk = k as i64;
                    let d = 2.0 * v[i] - extended(v, &grid, c, [ii + kk, 0]) - extended(v, &grid, c, [ii - kk, 0]);
                    acc += d * kv;
                }
                2.0 * h * acc + tail * (v[i] - c) + laplacian_deficit(&grid, lap[i], 2.0 * s)
            })
            .collect()
    } else {
        let nk = nn as i64 - 1;
        let h2 = h * h;
        let kern = grid.offset_table(|r| 2.0 * h2 * r.powf(-2.0 - 2.0 * s));
        let tail = 2.0 * square_exterior_mass((nn as f64 - 0.5) * h, 2.0 * s);
        (0..grid.node_count())
            .into_par_iter()
            .map(|node| {
                let [i, j] = grid.axis_index(node);
                let (i, j) = (i as i64, j as i64);
                let mut acc = 0.0;
                // half plane: k0 > 0, or k0 = 0 and k1 > 0
                for k0 in 0..=nk {
                    let k1_lo = if k0 == 0 { 1 } else { -nk };
                    for k1 in k1_lo..=nk {
                        let d = 2.0 * v[node]
                            - extended(v, &grid, c, [i + k0, j + k1])
                            - extended(v, &grid, c, [i - k0, j - k1]);
                        acc += d * kern.get([k0 as usize, k1.unsigned_abs() as usize]);
                    }
                }
                acc + tail * (v[node] - c) + laplacian_deficit(&grid, lap[node], 2.0 * s)
            })
            .collect()
    };
    ScalarField::new(grid, out)
}

/// Kernel profile of a [`Mollifier`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelShape {
    /// `π^{-n/2} exp(-|x|²)`
    Gaussian,
    /// `C_n exp(-1 / (1 - |x|²))` on the unit ball
    Bump,
}

/// Unit-mass kernel `φ_ε(x) = ε^{-n} φ(x / ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    pub shape: KernelShape,
    pub epsilon: f64,
}

fn bump_normalizer(dim: usize) -> f64 {
    static C: OnceLock<[f64; 2]> = OnceLock::new();
    let c = C.get_or_init(|| {
        let prof = crate::testlib::bump_profile;
        let one = integrate(prof, -1.0, 1.0, 64);
        let two = 2.0 * std::f64::consts::PI * integrate(|r| r * prof(r), 0.0, 1.0, 64);
        [1.0 / one, 1.0 / two]
    });
    c[dim - 1]
}

impl Mollifier {
    pub fn new(shape: KernelShape, epsilon: f64) -> Result<Self> {
        check_param("epsilon", epsilon, epsilon > 0.0 && epsilon.is_finite(), "scale must be positive")?;
        Ok(Self { shape, epsilon })
    }

    pub fn gaussian(epsilon: f64) -> Result<Self> {
        Self::new(KernelShape::Gaussian, epsilon)
    }

    /// Continuum kernel value at distance `r` in dimension `dim`.
    pub fn phi(&self, r: f64, dim: usize) -> f64 {
        let t = r / self.epsilon;
        let scale = self.epsilon.powi(-(dim as i32));
        match self.shape {
            KernelShape::Gaussian => scale * std::f64::consts::PI.powf(-0.5 * dim as f64) * (-t * t).exp(),
            KernelShape::Bump => scale * bump_normalizer(dim) * crate::testlib::bump_profile(t),
        }
    }

    /// True when the kernel scale is below two grid spacings.
    pub fn under_resolved(&self, grid: &GridSpec) -> bool {
        self.epsilon < 2.0 * grid.spacing()
    }

    /// Discrete weights `c_k` on grid offsets, normalized to unit total mass
    /// over all signed offsets in `[-(N-1), N-1]^n`.
    pub fn weights(&self, grid: &GridSpec) -> KernelWeights {
        if self.under_resolved(grid) {
            warn!(
                "mollifier scale {} is below two grid spacings ({}); kernel under-resolved",
                self.epsilon,
                2.0 * grid.spacing()
            );
        }
        let n = grid.points_per_axis();
        let h = grid.spacing();
        let dim = grid.dim();
        let rows = if dim == 1 { 1 } else { n };
        let mut values = vec![0.0; rows * n];
        let mut total = 0.0;
        for di in 0..rows {
            for dj in 0..n {
                let (a, b) = if dim == 1 { (dj, 0) } else { (di, dj) };
                let r = h * ((a * a + b * b) as f64).sqrt();
                let v = self.phi(r, dim) * h.powi(dim as i32);
                values[di * n + dj] = v;
                let mult = |k: usize| if k == 0 { 1.0 } else { 2.0 };
                total += v * mult(a) * if dim == 1 { 1.0 } else { mult(b) };
            }
        }
        for v in &mut values {
            *v /= total;
        }
        KernelWeights { dim, n, values }
    }
}

/// Symmetric discrete kernel on signed grid offsets.
#[derive(Debug, Clone)]
pub struct KernelWeights {
    dim: usize,
    n: usize,
    values: Vec<f64>,
}

impl KernelWeights {
    #[inline]
    pub fn get(&self, k: [i64; 2]) -> f64 {
        let a = k[0].unsigned_abs() as usize;
        if self.dim == 1 {
            self.values[a]
        } else {
            self.values[a * self.n + k[1].unsigned_abs() as usize]
        }
    }

    /// Sum over all signed offsets; 1 up to rounding.
    pub fn mass(&self) -> f64 {
        let r = self.n as i64 - 1;
        let mut t = 0.0;
        for a in -r..=r {
            if self.dim == 1 {
                t += self.get([a, 0]);
            } else {
                for b in -r..=r {
                    t += self.get([a, b]);
                }
            }
        }
        t
    }

    fn offsets(&self) -> Vec<([i64; 2], f64)> {
        let r = self.n as i64 - 1;
        let mut out = Vec::new();
        for a in -r..=r {
            if self.dim == 1 {
                out.push(([a, 0], self.get([a, 0])));
            } else {
                for b in -r..=r {
                    out.push(([a, b], self.get([a, b])));
                }
            }
        }
        out
    }
}

/// `φ_ε ∗ u` with `u` extended by its far-field constant.
pub fn mollify_scalar(u: &ScalarField, m: &Mollifier) -> Result<ScalarField> {
    let grid = u.grid().clone();
    let kw = m.weights(&grid);
    let c = u.far_field();
    let v = u.values();
    let offs = kw.offsets();
    let out: Vec<f64> = (0..grid.node_count())
        .into_par_iter()
        .map(|node| {
            let [i, j] = grid.axis_index(node);
            let (i, j) = (i as i64, j as i64);
            let mut acc = 0.0;
            for (k, ck) in &offs {
                acc += ck * extended(v, &grid, c, [i - k[0], j - k[1]]);
            }
            acc
        })
        .collect();
    ScalarField::new(grid, out)
}

/// Diagonal convolution `(φ_ε ∗ F)(x, y) = Σ_z c_z F(x - z, y - z)`.
pub fn mollify_od(f: &OffDiagonalField, m: &Mollifier) -> Result<OffDiagonalField> {
    let grid = f.grid().clone();
    let kw = m.weights(&grid);
    let offs = kw.offsets();
    let nn = grid.points_per_axis() as i64;
    let dim = grid.dim();
    let inside = |p: [i64; 2]| (0..nn).contains(&p[0]) && (dim == 1 || (0..nn).contains(&p[1]));
    let node = |p: [i64; 2]| if dim == 1 { p[0] as usize } else { (p[0] * nn + p[1]) as usize };
    // Values of F at pairs leaving the box.
    let outside: Option<(f64, &ScalarField, f64)> = match f.provenance() {
        Provenance::Gradient { order, generator } => Some((*order, generator, generator.far_field())),
        Provenance::Sampled => None,
    };
    let m_nodes = grid.node_count();
    let mut upper = vec![0.0; m_nodes * (m_nodes - 1) / 2];
    let g = grid.clone();
    fill_rows(m_nodes, &mut upper, |a, b| {
        let pa = g.axis_index(a).map(|x| x as i64);
        let pb = g.axis_index(b).map(|x| x as i64);
        let mut acc = 0.0;
        let mut out_weight_diff = 0.0;
        for (k, ck) in &offs {
            let qa = [pa[0] - k[0], pa[1] - k[1]];
            let qb = [pb[0] - k[0], pb[1] - k[1]];
            let (ia, ib) = (inside(qa), inside(qb));
            if ia && ib {
                acc += ck * f.get(node(qa), node(qb));
            } else if let Some((_, gen, c)) = outside {
                let gv = gen.values();
                let va = if ia { gv[node(qa)] } else { c };
                let vb = if ib { gv[node(qb)] } else { c };
                out_weight_diff += ck * (va - vb);
            }
        }
        if let Some((t, _, _)) = outside {
            acc += out_weight_diff * g.distance(a, b).powf(-t);
        }
        acc
    });
    Ok(OffDiagonalField::from_parts(grid, upper, Provenance::Sampled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, pair_scalar};
    use crate::testlib::{sample_od, sample_scalar, ScalarFnSpec};
    use approx::assert_relative_eq;

    #[test]
    fn gradient_examples() {
        let g = make_grid(1, 2.0, 9).unwrap();
        let c = ScalarField::constant(g.clone(), 5.0).unwrap();
        for s in [0.0, 0.3, 1.0] {
            assert_eq!(frac_gradient(&c, s).unwrap().max_abs(), 0.0);
        }
        let x = ScalarField::from_fn(g.clone(), |p| p[0]).unwrap();
        // nodes 6 and 4 are x = 1 and x = 0
        assert_eq!(frac_gradient(&x, 0.5).unwrap().get(6, 4), 1.0);
        let ga = sample_scalar(&ScalarFnSpec::gaussian(0.0, 1.0, 1.0), &g).unwrap();
        let d0 = frac_gradient(&ga, 0.0).unwrap();
        assert_eq!(d0.get(6, 4), (-1.0f64).exp() - 1.0);
        assert!(frac_gradient(&ga, 1.5).is_err());
    }

    #[test]
    fn divergence_is_linear() {
        let g = make_grid(1, 5.0, 65).unwrap();
        let f = sample_od(&"disjoint_bumps()".parse().unwrap(), &g).unwrap();
        let d1 = frac_divergence(&f, 0.5).unwrap();
        let d3 = frac_divergence(&f.scaled(3.0), 0.5).unwrap();
        for (a, b) in d1.values().iter().zip(d3.values()) {
            assert!((3.0 * a - b).abs() <= 1e-14 * b.abs().max(1e-300) * 4.0);
        }
        let z = frac_divergence(&OffDiagonalField::zeros(g), 0.5).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mollifier_kernel_mass() {
        let g = make_grid(1, 10.0, 257).unwrap();
        for shape in [KernelShape::Gaussian, KernelShape::Bump] {
            let m = Mollifier::new(shape, 0.5).unwrap();
            let cont = integrate(|x| m.phi(x.abs(), 1), -3.0, 3.0, 600);
            assert!((cont - 1.0).abs() < 1e-10, "{shape:?}: {cont}");
            assert_relative_eq!(m.weights(&g).mass(), 1.0, max_relative = 1e-13);
        }
        let m = Mollifier::new(KernelShape::Bump, 0.7).unwrap();
        let two = integrate(|r| 2.0 * std::f64::consts::PI * r * m.phi(r, 2), 0.0, 0.7, 200);
        assert!((two - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mollify_constant_and_gaussian() {
        let g = make_grid(1, 10.0, 257).unwrap();
        let m = Mollifier::gaussian(0.5).unwrap();
        let c = ScalarField::constant(g.clone(), 2.5).unwrap();
        let mc = mollify_scalar(&c, &m).unwrap();
        assert!(mc.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
        // e^{-x²/σ²} ∗ φ_ε = σ / sqrt(σ²+ε²) · exp(-x² / (σ²+ε²))
        let sigma: f64 = 1.0;
        let u = sample_scalar(&ScalarFnSpec::gaussian(0.0, sigma, 1.0), &g).unwrap();
        let mu = mollify_scalar(&u, &m).unwrap();
        let w2 = sigma * sigma + 0.25;
        for (k, v) in mu.values().iter().enumerate() {
            let x = g.coords(k)[0];
            let exact = sigma / w2.sqrt() * (-x * x / w2).exp();
            assert!((v - exact).abs() < 1e-9, "x={x}: {v} vs {exact}");
        }
        assert!(mu.values()[128] < u.values()[128]);
    }

    #[test]
    fn mollify_od_vanishes_on_diagonal_and_zero() {
        let g = make_grid(1, 4.0, 33).unwrap();
        let m = Mollifier::gaussian(0.5).unwrap();
        let z = mollify_od(&OffDiagonalField::zeros(g.clone()), &m).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        let f = sample_od(&"disjoint_bumps(b=bump(-1.5, 1), c=bump(1.5, 1))".parse().unwrap(), &g).unwrap();
        let mf = mollify_od(&f, &m).unwrap();
        assert_eq!(mf.get(7, 7), 0.0);
        assert!(mf.max_abs() > 0.0);
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let g = make_grid(1, 5.0, 64).unwrap();
        let c = ScalarField::constant(g.clone(), 4.0).unwrap();
        let l = frac_laplacian_integral(&c, 0.5).unwrap();
        assert!(l.values().iter().all(|&v| v == 0.0));
        let g2 = make_grid(2, 3.0, 12).unwrap();
        let c2 = ScalarField::constant(g2, -1.0).unwrap();
        let l2 = frac_laplacian_integral(&c2, 0.25).unwrap();
        assert!(l2.values().iter().all(|&v| v == 0.0));
        assert!(frac_laplacian_integral(&c, 1.0).is_err());
    }

    #[test]
    fn laplacian_of_gaussian_at_origin() {
        // 2∫ (u(0) - u(y)) / |y|² dy for u = e^{-y²} equals 4√π
        let g = make_grid(1, 10.0, 513).unwrap();
        let u = sample_scalar(&ScalarFnSpec::gaussian(0.0, 1.0, 1.0), &g).unwrap();
        let l = frac_laplacian_integral(&u, 0.5).unwrap();
        let exact = 4.0 * std::f64::consts::PI.sqrt();
        assert_relative_eq!(l.values()[256], exact, max_relative = 1e-4);
        // unfused route through the gradient
        let d = frac_divergence(&frac_gradient(&u, 0.5).unwrap(), 0.5).unwrap();
        assert_relative_eq!(d.values()[256], exact, max_relative = 1e-3);
        assert!(pair_scalar(&l, &l).unwrap() > 0.0);
    }
}
