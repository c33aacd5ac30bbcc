use std::sync::Arc;

use fracgrad::norms::{gagliardo_seminorm, lp_norm, lp_od_norm};
use fracgrad::operators::{frac_divergence, frac_gradient};
use fracgrad::{make_grid, pair_od, pair_scalar, GridSpec, OffDiagonalField, ScalarField};
use proptest::prelude::*;

fn grid(n: usize) -> Arc<GridSpec> {
    make_grid(1, 3.0, n).unwrap()
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

fn field(g: &Arc<GridSpec>, v: Vec<f64>) -> ScalarField {
    ScalarField::new(g.clone(), v).unwrap()
}

/// Antisymmetric pair field from an arbitrary table, detached from any generator.
fn pair_field(g: &Arc<GridSpec>, raw: &[f64]) -> OffDiagonalField {
    let m = g.node_count();
    OffDiagonalField::antisymmetrize_fn(g.clone(), |a, b| raw[(a * 7 + b * 13) % raw.len()] * (1.0 + a as f64 - b as f64))
        .unwrap()
        .detached()
        .scaled(1.0 / m as f64)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

const N: usize = 17;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradient_matches_difference_quotient(v in values(N), s in 0.0f64..=1.0) {
        let g = grid(N);
        let d = frac_gradient(&field(&g, v.clone()), s).unwrap();
        let x = g.axis_nodes();
        for a in 0..N {
            for b in 0..N {
                if a != b {
                    let want = (v[a] - v[b]) / (x[a] - x[b]).abs().powf(s);
                    prop_assert!(close(d.get(a, b), want, 1e-13));
                    prop_assert_eq!(d.get(a, b), -d.get(b, a));
                }
            }
        }
    }

    #[test]
    fn gradient_is_linear(u in values(N), v in values(N), a in -3.0f64..3.0, s in 0.05f64..0.95) {
        let g = grid(N);
        let (fu, fv) = (field(&g, u.clone()), field(&g, v.clone()));
        let comb: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + y).collect();
        let lhs = frac_gradient(&field(&g, comb), s).unwrap();
        let rhs = frac_gradient(&fu, s).unwrap().scaled(a).add(&frac_gradient(&fv, s).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn pairing_is_bilinear_and_symmetric(r1 in values(9), r2 in values(9), r3 in values(9), a in -3.0f64..3.0) {
        let g = grid(N);
        let (f, h, k) = (pair_field(&g, &r1), pair_field(&g, &r2), pair_field(&g, &r3));
        let left = pair_od(&f.scaled(a).add(&h).unwrap(), &k).unwrap();
        let right = a * pair_od(&f, &k).unwrap() + pair_od(&h, &k).unwrap();
        prop_assert!(close(left, right, 1e-12));
        prop_assert!(close(pair_od(&f, &h).unwrap(), pair_od(&h, &f).unwrap(), 1e-14));
    }

    #[test]
    fn discrete_adjointness(v in values(N), raw in values(11), s in 0.05f64..0.95) {
        let g = grid(N);
        let u = field(&g, v);
        let big_g = pair_field(&g, &raw);
        let lhs = pair_od(&frac_gradient(&u, s).unwrap(), &big_g).unwrap();
        let rhs = pair_scalar(&u, &frac_divergence(&big_g, s).unwrap()).unwrap();
        prop_assert!(close(lhs, rhs, 1e-11), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn od_norm_is_homogeneous_and_subadditive(r1 in values(9), r2 in values(9), a in -4.0f64..4.0, p in 1.0f64..4.0) {
        let g = grid(N);
        let (f, h) = (pair_field(&g, &r1), pair_field(&g, &r2));
        let nf = lp_od_norm(&f, p).unwrap();
        prop_assert!(close(lp_od_norm(&f.scaled(a), p).unwrap(), a.abs() * nf, 1e-12));
        let sum = lp_od_norm(&f.add(&h).unwrap(), p).unwrap();
        prop_assert!(sum <= (nf + lp_od_norm(&h, p).unwrap()) * (1.0 + 1e-12));
    }

    #[test]
    fn lp_norm_triangle(u in values(N), v in values(N), p in 1.0f64..6.0) {
        let g = grid(N);
        let (fu, fv) = (field(&g, u), field(&g, v));
        let sum = lp_norm(&fu.add(&fv).unwrap(), p).unwrap();
        prop_assert!(sum <= (lp_norm(&fu, p).unwrap() + lp_norm(&fv, p).unwrap()) * (1.0 + 1e-12));
    }

    #[test]
    fn seminorm_ignores_constants(v in values(N), c in -5.0f64..5.0, s in 0.1f64..0.9) {
        let g = grid(N);
        let u = field(&g, v);
        let a = gagliardo_seminorm(&u, s, 2.0).unwrap();
        let b = gagliardo_seminorm(&u.shifted(c), s, 2.0).unwrap();
        prop_assert!(close(a, b, 1e-10));
    }
}
