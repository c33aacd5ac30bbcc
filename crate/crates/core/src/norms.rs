//! Norms, seminorms and functionals of scalar and pair fields.
//!
//! All integrals run over the box. Pair sums over a gradient field
//! `d_s u` subtract the leading near-diagonal lattice error, so that
//! Gagliardo-type quantities converge at the trapezoidal rate.

use serde::{Deserialize, Serialize};

use crate::error::{check_param, FracError, Result};
use crate::fields::{ensure_same, sum_rows, GridSpec, OffDiagonalField, Provenance, ScalarField};
use crate::operators::{frac_divergence, frac_gradient, mollify_scalar, Mollifier};
use crate::fields::pair_od;
use crate::singular::{nodal_gradient, norm_overshoot};

/// Exponent bundle `(s, p, q, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub n: usize,
}

impl FracParams {
    /// Sobolev regime: `sp < n`, `1/q = 1/p - s/n`.
    pub fn sobolev(n: usize, s: f64, p: f64) -> Result<Self> {
        check_param("s", s, s > 0.0 && s <= 1.0, "order must lie in (0, 1]")?;
        check_param("p", p, p >= 1.0, "exponent must be at least 1")?;
        check_param("s*p", s * p, s * p < n as f64, "Sobolev regime needs s p < n")?;
        let q = 1.0 / (1.0 / p - s / n as f64);
        Ok(Self { s, p, q, n })
    }

    /// Hölder regime: `sp > n`, exponent `α = s - n/p ∈ (0, 1)`.
    pub fn holder(n: usize, s: f64, p: f64) -> Result<Self> {
        check_param("s", s, s > 0.0 && s <= 1.0, "order must lie in (0, 1]")?;
        check_param("p", p, p >= 1.0, "exponent must be at least 1")?;
        let me = Self { s, p, q: p, n };
        let a = me.alpha();
        check_param("alpha", a, a > 0.0 && a < 1.0, "Hölder regime needs s - n/p in (0, 1)")?;
        Ok(me)
    }

    pub fn alpha(&self) -> f64 {
        self.s - self.n as f64 / self.p
    }

    /// Checks the Sobolev relation within 1e-12.
    pub fn check_sobolev(&self) -> Result<()> {
        let n = self.n as f64;
        check_param("s*p", self.s * self.p, self.s * self.p < n, "Sobolev regime needs s p < n")?;
        let gap = 1.0 / self.q - (1.0 / self.p - self.s / n);
        check_param("q", self.q, gap.abs() <= 1e-12, "exponents violate 1/q = 1/p - s/n")
    }
}

/// Functional tags for [`NormResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Lp,
    LpOd,
    Gagliardo,
    Wspq,
    Holder,
    ShiftedLq,
}

impl NormKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Lp => "lp",
            Self::LpOd => "lp_od",
            Self::Gagliardo => "gagliardo",
            Self::Wspq => "wspq",
            Self::Holder => "holder",
            Self::ShiftedLq => "shifted_lq",
        }
    }
}

/// A computed functional value with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub kind: NormKind,
    pub params: FracParams,
}

fn check_p(p: f64) -> Result<()> {
    check_param("p", p, p >= 1.0, "exponent must be at least 1")
}

/// `(Σ |u|^p w)^{1/p}`; `p = ∞` gives `max |u|`.
pub fn lp_norm(u: &ScalarField, p: f64) -> Result<f64> {
    check_p(p)?;
    let v = u.values();
    if p.is_infinite() {
        return Ok(v.iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    let w = u.grid().weights();
    let sum: f64 = v.iter().zip(w).map(|(x, w)| x.abs().powf(p) * w).sum();
    Ok(sum.powf(1.0 / p))
}

/// Per-node amount to remove from the `p`-th power row sums of `d_t v`.
fn row_overshoot(generator: &ScalarField, t: f64, p: f64) -> Vec<f64> {
    let g = generator.grid();
    let hn = g.spacing().powi(g.dim() as i32);
    nodal_gradient(generator)
        .iter()
        .zip(g.weights())
        .map(|(grad, w)| norm_overshoot(g, *grad, t, p) * w / hn)
        .collect()
}

/// `(Σ_{i≠j} |F|^p w_i w_j / |x_i - x_j|^n)^{1/p}`; `p = ∞` gives `max |F|`.
pub fn lp_od_norm(f: &OffDiagonalField, p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let grid = f.grid();
    let n = grid.dim() as i32;
    let kernel = grid.offset_table(|r| r.powi(-n));
    let w = grid.weights();
    let m = grid.node_count();
    let half = sum_rows(m, f.upper(), |a, b, v| v.abs().powf(p) * w[a] * w[b] * kernel.between(grid, a, b));
    let mut total = 2.0 * half;
    if let Provenance::Gradient { order, generator } = f.provenance() {
        let over = row_overshoot(generator, *order, p);
        total -= over.iter().zip(w).map(|(o, wi)| o * wi).sum::<f64>();
    }
    Ok(total.max(0.0).powf(1.0 / p))
}

/// `[u]_{W^{s,p}} = ‖d_s u‖_{L^p_od}`.
pub fn gagliardo_seminorm(u: &ScalarField, s: f64, p: f64) -> Result<f64> {
    check_param("s", s, s > 0.0 && s < 1.0, "order must lie in (0, 1)")?;
    lp_od_norm(&frac_gradient(u, s)?, p)
}

/// Pointwise `𝒟_{s,q} u(x) = (∫ |u(x) - u(y)|^q / |x - y|^{n+sq} dy)^{1/q}`.
pub fn dsq_functional(u: &ScalarField, s: f64, q: f64) -> Result<ScalarField> {
    check_param("s", s, s > 0.0 && s < 1.0, "order must lie in (0, 1)")?;
    check_param("q", q, q >= 1.0 && q.is_finite(), "exponent must lie in [1, ∞)")?;
    let grid = u.grid();
    let n = grid.dim() as f64;
    let kernel = grid.offset_table(|r| r.powf(-n - s * q));
    let w = grid.weights();
    let v = u.values();
    let over = row_overshoot(u, s, q);
    use rayon::prelude::*;
    let out: Vec<f64> = (0..grid.node_count())
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..grid.node_count() {
                if j != i {
                    acc += (v[i] - v[j]).abs().powf(q) * w[j] * kernel.between(grid, i, j);
                }
            }
            (acc - over[i]).max(0.0).powf(1.0 / q)
        })
        .collect();
    ScalarField::new(grid.clone(), out)
}

/// `‖u‖_{Ẇ^{s,(p,q)}} = ‖𝒟_{s,q} u‖_{L^p}`.
pub fn wspq_norm(u: &ScalarField, s: f64, p: f64, q: f64) -> Result<f64> {
    lp_norm(&dsq_functional(u, s, q)?, p)
}

/// The shift `c*` minimizing `‖u - c‖_{L^q}`, and the minimum.
pub fn best_constant_shift(u: &ScalarField, q: f64) -> Result<(f64, f64)> {
    check_param("q", q, q > 1.0 && q.is_finite(), "exponent must lie in (1, ∞)")?;
    if u.min() == u.max() {
        return Ok((u.min(), 0.0));
    }
    let w = u.grid().weights();
    let v = u.values();
    let c = if q == 2.0 {
        let wsum: f64 = w.iter().sum();
        v.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / wsum
    } else {
        // derivative of c ↦ Σ w |u - c|^q, up to the factor q; increasing in c
        let slope = |c: f64| -> f64 {
            v.iter()
                .zip(w)
                .map(|(x, w)| {
                    let d = c - x;
                    w * d.signum() * d.abs().powf(q - 1.0)
                })
                .sum()
        };
        let (mut lo, mut hi) = (u.min(), u.max());
        if lo == hi {
            lo
        } else {
            let mut iter = 0;
            while hi - lo > 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if slope(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
                iter += 1;
                if iter > 2000 {
                    return Err(FracError::NoConvergence(iter));
                }
            }
            0.5 * (lo + hi)
        }
    };
    Ok((c, lp_norm(&u.shifted(c), q)?))
}

/// `max_{i≠j} |u_i - u_j| / |x_i - x_j|^α`.
pub fn holder_seminorm(u: &ScalarField, alpha: f64) -> Result<f64> {
    check_param("alpha", alpha, alpha > 0.0 && alpha <= 1.0, "exponent must lie in (0, 1]")?;
    let grid = u.grid();
    let inv = grid.offset_table(|r| r.powf(-alpha));
    let v = u.values();
    use rayon::prelude::*;
    let m = grid.node_count();
    Ok((0..m)
        .into_par_iter()
        .map(|a| {
            let mut best: f64 = 0.0;
            for b in a + 1..m {
                best = best.max((v[a] - v[b]).abs() * inv.between(grid, a, b));
            }
            best
        })
        .reduce(|| 0.0, f64::max))
}

/// Axis-aligned sub-cube of grid nodes: indices `lo .. lo + len` on every axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub lo: usize,
    pub len: usize,
}

impl Cube {
    /// The nodes whose coordinates lie in `[a, b]` on every axis.
    pub fn from_interval(grid: &GridSpec, a: f64, b: f64) -> Result<Self> {
        let tol = 1e-9 * grid.spacing();
        let idx: Vec<usize> = (0..grid.points_per_axis())
            .filter(|&i| {
                let x = grid.axis_coord(i);
                x >= a - tol && x <= b + tol
            })
            .collect();
        let (Some(&lo), Some(&hi)) = (idx.first(), idx.last()) else {
            return Err(FracError::InvalidParameter {
                name: "cube",
                value: a,
                reason: "no grid nodes inside the interval",
            });
        };
        Self::new(grid, lo, hi - lo + 1)
    }

    pub fn new(grid: &GridSpec, lo: usize, len: usize) -> Result<Self> {
        if len < 4 || lo + len > grid.points_per_axis() {
            return Err(FracError::InvalidParameter {
                name: "cube",
                value: len as f64,
                reason: "cube needs at least 4 nodes per axis inside the grid",
            });
        }
        Ok(Self { lo, len })
    }

    /// Grid nodes of the cube and their trapezoidal weights on the cube.
    fn nodes(&self, grid: &GridSpec) -> (Vec<usize>, Vec<f64>) {
        let h = grid.spacing();
        let aw = |k: usize| if k == 0 || k + 1 == self.len { 0.5 * h } else { h };
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        if grid.dim() == 1 {
            for k in 0..self.len {
                nodes.push(self.lo + k);
                weights.push(aw(k));
            }
        } else {
            for a in 0..self.len {
                for b in 0..self.len {
                    nodes.push(grid.node_of([self.lo + a, self.lo + b]));
                    weights.push(aw(a) * aw(b));
                }
            }
        }
        (nodes, weights)
    }
}

/// Left and right sides of the fractional Poincaré inequality on a cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareSides {
    pub lhs: f64,
    pub rhs: f64,
}

impl PoincareSides {
    /// `lhs / rhs`, with `0/0 = 0` and `x/0 = ∞`.
    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Both sides of `‖u - ⨍_Q u‖_{L^q(Q)} ≤ C (∬_{Q×Q} |u(x)-u(y)|^p / |x-y|^{n+sp})^{1/p}`.
pub fn cube_poincare_sides(u: &ScalarField, cube: &Cube, params: &FracParams) -> Result<PoincareSides> {
    params.check_sobolev()?;
    let grid = u.grid();
    if params.n != grid.dim() {
        return Err(FracError::InvalidParameter {
            name: "n",
            value: params.n as f64,
            reason: "dimension differs from the grid",
        });
    }
    Cube::new(grid, cube.lo, cube.len)?;
    let (s, p, q) = (params.s, params.p, params.q);
    let (nodes, wq) = cube.nodes(grid);
    let v = u.values();
    let vol: f64 = wq.iter().sum();
    let first = v[nodes[0]];
    let mean = if nodes.iter().all(|&k| v[k] == first) {
        first
    } else {
        nodes.iter().zip(&wq).map(|(&k, w)| v[k] * w).sum::<f64>() / vol
    };
    let lhs = nodes
        .iter()
        .zip(&wq)
        .map(|(&k, w)| (v[k] - mean).abs().powf(q) * w)
        .sum::<f64>()
        .powf(1.0 / q);

    let n = grid.dim() as f64;
    let kernel = grid.offset_table(|r| r.powf(-n - s * p));
    let grads = nodal_gradient(u);
    let hn = grid.spacing().powi(grid.dim() as i32);
    use rayon::prelude::*;
    let rows: Vec<f64> = (0..nodes.len())
        .into_par_iter()
        .map(|a| {
            let ka = nodes[a];
            let mut acc = 0.0;
            for b in a + 1..nodes.len() {
                let kb = nodes[b];
                acc += (v[ka] - v[kb]).abs().powf(p) * wq[b] * kernel.between(grid, ka, kb);
            }
            2.0 * acc * wq[a] - wq[a] * wq[a] / hn * norm_overshoot(grid, grads[ka], s, p)
        })
        .collect();
    let rhs = rows.iter().sum::<f64>().max(0.0).powf(1.0 / p);
    Ok(PoincareSides { lhs, rhs })
}

/// `lhs / rhs` of [`cube_poincare_sides`].
pub fn cube_poincare_ratio(u: &ScalarField, cube: &Cube, params: &FracParams) -> Result<f64> {
    Ok(cube_poincare_sides(u, cube, params)?.ratio())
}

/// `max_G |⟨d_{1/2} u, G⟩| / ‖div_{1/2} G‖_{L²}` over a family of
/// diagonal-flat fields: a lower bound for `‖d_{1/2} u‖_{H^{-1/2}_od}`.
pub fn dual_hminushalf_estimate(u: &ScalarField, family: &[OffDiagonalField]) -> Result<f64> {
    if family.is_empty() {
        return Err(FracError::Empty("test field family"));
    }
    let du = frac_gradient(u, 0.5)?.detached();
    let mut best: Option<f64> = None;
    for g in family {
        ensure_same(u.grid(), g.grid())?;
        let g = g.detached();
        let denom = lp_norm(&frac_divergence(&g, 0.5)?, 2.0)?;
        if denom > 0.0 {
            let r = pair_od(&du, &g)?.abs() / denom;
            best = Some(best.map_or(r, |b: f64| b.max(r)));
        }
    }
    best.ok_or(FracError::Empty("test fields with nonzero divergence"))
}

/// Upper bound for `‖d_{1/2} u‖_{L¹_od + H^{-1/2}_od}` via the split
/// `u = (u - u_ε) + u_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumSpaceBound {
    pub value: f64,
    /// Chosen scale; `∞` for the pure-L¹ split and `0` for the pure-L² one.
    pub epsilon: f64,
    pub l1_part: f64,
    pub l2_part: f64,
}

/// Minimum over the ε ladder (Gaussian kernel) and the two degenerate
/// splits of `‖d_{1/2}(u - u_ε)‖_{L¹_od} + ‖u_ε - c*‖_{L²}`.
pub fn sum_space_upper(u: &ScalarField, epsilons: &[f64]) -> Result<SumSpaceBound> {
    if epsilons.is_empty() {
        return Err(FracError::Empty("mollifier scales"));
    }
    let l1 = |f: &ScalarField| -> Result<f64> { lp_od_norm(&frac_gradient(f, 0.5)?, 1.0) };
    let l2 = |f: &ScalarField| -> Result<f64> { Ok(best_constant_shift(f, 2.0)?.1) };
    let mut best = SumSpaceBound {
        value: l1(u)?,
        epsilon: f64::INFINITY,
        l1_part: l1(u)?,
        l2_part: 0.0,
    };
    let mut consider = |eps: f64, a: f64, b: f64| {
        if a + b < best.value {
            best = SumSpaceBound {
                value: a + b,
                epsilon: eps,
                l1_part: a,
                l2_part: b,
            };
        }
    };
    let pure = l2(u)?;
    consider(0.0, 0.0, pure);
    for &eps in epsilons {
        let ue = mollify_scalar(u, &Mollifier::gaussian(eps)?)?;
        let rest = u.sub(&ue)?;
        consider(eps, l1(&rest)?, l2(&ue)?);
    }
    Ok(best)
}

/// `∬_{[-R,R]²} |χ(x) - χ(y)|² / |x - y| dx dy` for `χ` the indicator of
/// `(-1, 1)`, in closed form.
pub fn chi_counterexample(r: f64) -> Result<f64> {
    check_param("R", r, r > 2.0 && r.is_finite(), "radius must exceed 2")?;
    // 4 [ (R+1) ln(R+1) - (R-1) ln(R-1) - 2 ln 2 ]
    let inv = 1.0 / r;
    let core = r * (inv.ln_1p() - (-inv).ln_1p()) + (r * r - 1.0).ln();
    Ok(4.0 * (core - 2.0 * std::f64::consts::LN_2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_grid;
    use crate::special::integrate;
    use crate::testlib::{sample_scalar, ScalarFnSpec};
    use approx::assert_relative_eq;

    fn gauss(l: f64, n: usize) -> ScalarField {
        sample_scalar(&ScalarFnSpec::gaussian(0.0, 1.0, 1.0), &make_grid(1, l, n).unwrap()).unwrap()
    }

    #[test]
    fn lp_examples() {
        let g = make_grid(1, 1.0, 16).unwrap();
        assert_eq!(lp_norm(&ScalarField::constant(g.clone(), 0.0).unwrap(), 2.0).unwrap(), 0.0);
        let one = ScalarField::constant(g, 1.0).unwrap();
        assert_relative_eq!(lp_norm(&one, 2.0).unwrap(), 2f64.sqrt(), max_relative = 1e-12);
        let u = gauss(10.0, 512);
        assert!((lp_norm(&u, 2.0).unwrap() - std::f64::consts::FRAC_PI_2.powf(0.25)).abs() < 1e-5);
        assert!(lp_norm(&u, 0.5).is_err());
        assert_eq!(lp_norm(&u, f64::INFINITY).unwrap(), u.max());
    }

    #[test]
    fn sobolev_and_holder_params() {
        let p = FracParams::sobolev(1, 0.25, 2.0).unwrap();
        assert_relative_eq!(p.q, 4.0, max_relative = 1e-14);
        let p = FracParams::sobolev(2, 0.5, 2.0).unwrap();
        assert_relative_eq!(p.q, 4.0, max_relative = 1e-14);
        assert_eq!(FracParams::holder(1, 0.75, 2.0).unwrap().alpha(), 0.25);
        assert!(FracParams::sobolev(1, 0.75, 2.0).is_err());
        assert!(FracParams::holder(1, 0.25, 2.0).is_err());
    }

    #[test]
    fn gaussian_half_gradient_l2_od() {
        // ∬ (u(x)-u(y))² / |x-y|² over ℝ² is 2π; the box misses
        // 2 ∫ u(x)² (1/(L-x) + 1/(L+x)) dx
        let u = gauss(10.0, 512);
        let l = 10.0;
        let missing = 2.0 * integrate(|x: f64| (-2.0 * x * x).exp() * (1.0 / (l - x) + 1.0 / (l + x)), -8.0, 8.0, 64);
        let oracle = (2.0 * std::f64::consts::PI - missing).sqrt();
        let v = lp_od_norm(&frac_gradient(&u, 0.5).unwrap(), 2.0).unwrap();
        assert_relative_eq!(v, oracle, max_relative = 1e-3);
    }

    #[test]
    fn fubini_identity() {
        let u = gauss(6.0, 200);
        for &(s, p) in &[(0.5, 2.0), (0.25, 1.5), (0.5, 1.0)] {
            let d = dsq_functional(&u, s, p).unwrap();
            let a = lp_norm(&d, p).unwrap();
            let b = gagliardo_seminorm(&u, s, p).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-10);
            assert_relative_eq!(wspq_norm(&u, s, p, p).unwrap(), b, max_relative = 1e-10);
        }
    }

    #[test]
    fn shift_examples() {
        let u = gauss(10.0, 512);
        let (c, _) = best_constant_shift(&u, 2.0).unwrap();
        let mass = integrate(|x: f64| (-x * x).exp(), -10.0, 10.0, 40);
        assert!((c - mass / 20.0).abs() < 1e-10);
        assert!((c - std::f64::consts::PI.sqrt() / 20.0).abs() < 1e-10);
        let g = u.grid().clone();
        let k = ScalarField::constant(g.clone(), 3.0).unwrap();
        assert_eq!(best_constant_shift(&k, 1.5).unwrap(), (3.0, 0.0));
        let odd = ScalarField::from_fn(g, |x| x[0] * (-x[0] * x[0]).exp()).unwrap();
        assert!(best_constant_shift(&odd, 2.0).unwrap().0.abs() < 1e-10);
        assert!(best_constant_shift(&odd, 3.0).unwrap().0.abs() < 1e-10);
        // q ≠ 2: the minimizer beats nearby shifts
        let (c3, v3) = best_constant_shift(&u, 3.0).unwrap();
        for d in [-1e-3, 1e-3] {
            assert!(lp_norm(&u.shifted(c3 + d), 3.0).unwrap() >= v3);
        }
    }

    #[test]
    fn holder_examples() {
        let g = make_grid(1, 4.0, 65).unwrap();
        let x = ScalarField::from_fn(g.clone(), |p| p[0]).unwrap();
        assert_eq!(holder_seminorm(&x, 1.0).unwrap(), 1.0);
        let g = make_grid(1, 3.0, 50).unwrap();
        let x = ScalarField::from_fn(g.clone(), |p| p[0]).unwrap();
        assert!((holder_seminorm(&x, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let u = gauss(3.0, 50);
        let via_grad = lp_od_norm(&frac_gradient(&u, 0.3).unwrap(), f64::INFINITY).unwrap();
        assert_eq!(holder_seminorm(&u, 0.3).unwrap(), via_grad);
    }

    #[test]
    fn chi_closed_form_matches_quadrature() {
        for r in [3.0, 10.0, 1e3] {
            // 4 ∫_1^R log((y+1)/(y-1)) dy with y = 1 + t², dy = 2t dt
            let f = |t: f64| 2.0 * t * ((2.0 + t * t) / (t * t)).ln();
            let q = 4.0 * (integrate(f, 0.0, 1.0, 400) + integrate(f, 1.0, (r - 1.0f64).sqrt(), 400));
            assert_relative_eq!(chi_counterexample(r).unwrap(), q, max_relative = 1e-9);
        }
        assert!(chi_counterexample(2.0).is_err());
    }

    #[test]
    fn poincare_constant_is_zero() {
        let g = make_grid(1, 2.0, 41).unwrap();
        let c = ScalarField::constant(g.clone(), 1.5).unwrap();
        let cube = Cube::from_interval(&g, -1.0, 1.0).unwrap();
        let p = FracParams::sobolev(1, 0.5, 1.0).unwrap();
        assert_eq!(cube_poincare_ratio(&c, &cube, &p).unwrap(), 0.0);
        assert_eq!(cube.len, 21);
    }
}
