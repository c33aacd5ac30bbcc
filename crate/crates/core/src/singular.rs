//! Local corrections for punctured lattice sums of integrable singular
//! kernels, and integrals of the kernel over the exterior of the box.
//!
//! For an integrand `|r|^β g(r)` with `g` smooth, the punctured rule
//! `h Σ_{k≠0} f(kh)` differs from `∫ f` by `2 ζ(-β) g(0) h^{1+β}` to leading
//! order (one dimension). On the square lattice the corresponding constant
//! is the Epstein zeta value [`square_lattice_zeta`].

use crate::fields::{GridSpec, ScalarField};
use crate::special::{gauss_legendre, riemann_zeta, square_lattice_zeta};

/// Value of `u` beyond the box: the field is extended by its far-field
/// constant.
#[inline]
pub(crate) fn extended(u: &[f64], grid: &GridSpec, c_ext: f64, idx: [i64; 2]) -> f64 {
    let n = grid.points_per_axis() as i64;
    let inside = |i: i64| (0..n).contains(&i);
    if grid.dim() == 1 {
        if inside(idx[0]) {
            u[idx[0] as usize]
        } else {
            c_ext
        }
    } else if inside(idx[0]) && inside(idx[1]) {
        u[(idx[0] * n + idx[1]) as usize]
    } else {
        c_ext
    }
}

/// Finite-difference gradient per node (central inside, one-sided at the
/// edges).
pub(crate) fn nodal_gradient(u: &ScalarField) -> Vec<[f64; 2]> {
    let g = u.grid();
    let n = g.points_per_axis();
    let h = g.spacing();
    let v = u.values();
    let d = |k_minus: usize, k: usize, k_plus: usize, at_lo: bool, at_hi: bool| -> f64 {
        if at_lo {
            (v[k_plus] - v[k]) / h
        } else if at_hi {
            (v[k] - v[k_minus]) / h
        } else {
            (v[k_plus] - v[k_minus]) / (2.0 * h)
        }
    };
    (0..g.node_count())
        .map(|k| {
            let [i, j] = g.axis_index(k);
            if g.dim() == 1 {
                [d(k.saturating_sub(1), k, (k + 1).min(n - 1), i == 0, i == n - 1), 0.0]
            } else {
                let gx = d(
                    k.saturating_sub(n),
                    k,
                    (k + n).min(g.node_count() - 1),
                    i == 0,
                    i == n - 1,
                );
                let gy = d(k.saturating_sub(1), k, (k + 1).min(g.node_count() - 1), j == 0, j == n - 1);
                [gx, gy]
            }
        })
        .collect()
}

/// Discrete Laplacian per node, with the field extended by `c_ext` outside.
pub(crate) fn nodal_laplacian(u: &ScalarField, c_ext: f64) -> Vec<f64> {
    let g = u.grid();
    let h2 = g.spacing() * g.spacing();
    let v = u.values();
    (0..g.node_count())
        .map(|k| {
            let [i, j] = g.axis_index(k);
            let (i, j) = (i as i64, j as i64);
            let at = |a: i64, b: i64| extended(v, g, c_ext, [a, b]);
            let mut lap = at(i + 1, j) - 2.0 * v[k] + at(i - 1, j);
            if g.dim() == 2 {
                lap += at(i, j + 1) - 2.0 * v[k] + at(i, j - 1);
            }
            lap / h2
        })
        .collect()
}

/// Amount by which the punctured row sum of `|u(x)-u(y)|^p / |x-y|^{n+sp}`
/// overshoots the integral, given the local gradient. Zero where no
/// correction is known (two dimensions with `p ≠ 2`) or the integrand is
/// not integrable.
pub(crate) fn norm_overshoot(grid: &GridSpec, grad: [f64; 2], s: f64, p: f64) -> f64 {
    let h = grid.spacing();
    let beta = p - 1.0 - s * p;
    if grid.dim() == 1 {
        if beta <= -1.0 + 1e-12 {
            return 0.0;
        }
        let g0 = grad[0].abs().powf(p);
        if g0 == 0.0 {
            return 0.0;
        }
        2.0 * riemann_zeta(-beta) * g0 * h.powf(1.0 + beta)
    } else {
        let sigma = s * p;
        if (p - 2.0).abs() > 1e-12 || sigma >= 2.0 - 1e-12 {
            return 0.0;
        }
        let g2 = grad[0] * grad[0] + grad[1] * grad[1];
        h.powf(2.0 - sigma) * 0.5 * g2 * square_lattice_zeta(sigma)
    }
}

/// Amount to add to the punctured row sum of `2(v(x)-v(y)) / |x-y|^{n+a}`
/// to recover the integral, given the local Laplacian of `v`.
pub(crate) fn laplacian_deficit(grid: &GridSpec, lap: f64, a: f64) -> f64 {
    if a >= 2.0 - 1e-12 || lap == 0.0 {
        return 0.0;
    }
    let h = grid.spacing();
    if grid.dim() == 1 {
        2.0 * riemann_zeta(a - 1.0) * lap * h.powf(2.0 - a)
    } else {
        h.powf(2.0 - a) * 0.5 * lap * square_lattice_zeta(a)
    }
}

/// `∫_{y ∉ box} |x - y|^{-n-a} dy` for an interior node `x`, `a > 0`.
pub(crate) fn exterior_kernel_mass(grid: &GridSpec, x: [f64; 2], a: f64) -> f64 {
    let l = grid.half_width();
    if grid.dim() == 1 {
        ((l - x[0]).powf(-a) + (l + x[0]).powf(-a)) / a
    } else {
        angular_exit_integral(x, l, a) / a
    }
}

/// `∫_0^{2π} R(θ)^{-a} dθ` where `R(θ)` is the exit distance from `x` to the
/// boundary of `[-L, L]^2` along direction θ.
fn angular_exit_integral(x: [f64; 2], l: f64, a: f64) -> f64 {
    use std::f64::consts::PI;
    let exit = |theta: f64| -> f64 {
        let (s, c) = theta.sin_cos();
        let mut r = f64::INFINITY;
        if c > 0.0 {
            r = r.min((l - x[0]) / c);
        } else if c < 0.0 {
            r = r.min((-l - x[0]) / c);
        }
        if s > 0.0 {
            r = r.min((l - x[1]) / s);
        } else if s < 0.0 {
            r = r.min((-l - x[1]) / s);
        }
        r
    };
    let mut cuts: Vec<f64> = [[l, l], [-l, l], [-l, -l], [l, -l]]
        .iter()
        .map(|c| (c[1] - x[1]).atan2(c[0] - x[0]).rem_euclid(2.0 * PI))
        .collect();
    cuts.push(0.0);
    cuts.push(2.0 * PI);
    cuts.sort_by(f64::total_cmp);
    let (nodes, weights) = gauss_legendre(24);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= 0.0 {
            continue;
        }
        let panels = 4;
        let width = (hi - lo) / panels as f64;
        for p in 0..panels {
            let mid = lo + (p as f64 + 0.5) * width;
            for (t, wt) in nodes.iter().zip(&weights) {
                total += 0.5 * width * wt * exit(mid + 0.5 * width * t).powf(-a);
            }
        }
    }
    total
}

/// `∫_{|r|_∞ > W} |r|^{-2-a} dr` in the plane.
pub(crate) fn square_exterior_mass(width: f64, a: f64) -> f64 {
    let (nodes, weights) = gauss_legendre(24);
    let q = std::f64::consts::FRAC_PI_4;
    let mut acc = 0.0;
    for (t, w) in nodes.iter().zip(&weights) {
        let theta = 0.5 * q * (t + 1.0);
        acc += 0.5 * q * w * theta.cos().powf(a);
    }
    8.0 / a * width.powf(-a) * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_grid;
    use crate::special::integrate;
    use approx::assert_relative_eq;

    #[test]
    fn punctured_sum_with_correction_matches_integral_1d() {
        // ∫_{-1}^{1} |r|^{-1/2} cos r dr, punctured rule plus zeta term
        let exact = 2.0 * integrate(|t| 2.0 * (t * t).cos(), 0.0, 1.0, 8);
        for &n in &[41usize, 81, 161] {
            let h = 2.0 / (n - 1) as f64;
            let mut sum = 0.0;
            for k in 1..n / 2 + 1 {
                let r = k as f64 * h;
                let w = if k == n / 2 { 0.5 * h } else { h };
                sum += 2.0 * w * r.powf(-0.5) * r.cos();
            }
            let corrected = sum - 2.0 * riemann_zeta(0.5) * h.powf(0.5);
            assert!((corrected - exact).abs() < 5.0 * h * h, "n={n}");
            assert!((sum - exact).abs() > 10.0 * (corrected - exact).abs());
        }
    }

    #[test]
    fn lattice_correction_2d() {
        // Σ' h² f(hk) of f(r) = (a·r)² |r|^{-3} e^{-|r|²} against its integral
        let a = [0.6, -0.8];
        let exact = 0.5 * std::f64::consts::PI * std::f64::consts::PI.sqrt(); // |a|² π ∫_0^∞ e^{-r²} dr
        let h = 0.05;
        let m = (7.0 / h) as i64;
        let mut sum = 0.0;
        for i in -m..=m {
            for j in -m..=m {
                if i == 0 && j == 0 {
                    continue;
                }
                let (x, y) = (i as f64 * h, j as f64 * h);
                let r = (x * x + y * y).sqrt();
                let d = a[0] * x + a[1] * y;
                sum += h * h * d * d * r.powi(-3) * (-r * r).exp();
            }
        }
        let corrected = sum - h * 0.5 * square_lattice_zeta(1.0);
        assert!((corrected - exact).abs() < 1e-3, "{corrected} vs {exact}");
        assert!((sum - exact).abs() > 0.05);
    }

    #[test]
    fn exterior_mass_2d_center() {
        // at the centre of [-1,1]² the exit distance is 1/max(|cos|,|sin|)
        let v = angular_exit_integral([0.0, 0.0], 1.0, 0.5);
        let direct = 8.0 * integrate(|t: f64| t.cos().powf(0.5), 0.0, std::f64::consts::FRAC_PI_4, 8);
        assert_relative_eq!(v, direct, max_relative = 1e-12);
        assert_relative_eq!(square_exterior_mass(1.0, 0.5), direct / 0.5, max_relative = 1e-12);
    }

    #[test]
    fn exterior_mass_2d_off_center() {
        // brute-force polar integration of the exterior
        let x = [0.3, -0.55];
        let a = 1.0;
        let g = make_grid(2, 1.0, 8).unwrap();
        let v = exterior_kernel_mass(&g, x, a);
        let direct = integrate(
            |theta| {
                let (s, c) = theta.sin_cos();
                let tx = if c > 0.0 { (1.0 - x[0]) / c } else { (-1.0 - x[0]) / c };
                let ty = if s > 0.0 { (1.0 - x[1]) / s } else { (-1.0 - x[1]) / s };
                tx.min(ty).powf(-a) / a
            },
            0.0,
            2.0 * std::f64::consts::PI,
            400,
        );
        assert_relative_eq!(v, direct, max_relative = 1e-7);
    }

    #[test]
    fn exterior_mass_1d() {
        let g = make_grid(1, 2.0, 8).unwrap();
        let v = exterior_kernel_mass(&g, [0.5, 0.0], 0.5);
        assert_relative_eq!(v, (1.5f64.powf(-0.5) + 2.5f64.powf(-0.5)) / 0.5, max_relative = 1e-14);
    }
}
