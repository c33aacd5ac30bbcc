use std::ffi::CString;
use std::ptr;

use fracgrad_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { fg_last_error(buf.as_mut_ptr() as *mut _, buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8(buf).unwrap()
}

unsafe fn grid(n: usize) -> *mut FgGrid {
    let mut g = ptr::null_mut();
    assert_eq!(fg_grid_new(1, 5.0, n, &mut g), FgStatus::Ok);
    g
}

#[test]
fn adjointness_through_handles() {
    unsafe {
        let g = grid(64);
        let spec = CString::new("gaussian(center=0.5, width=0.7)").unwrap();
        let pair = CString::new("disjoint_bumps(b=bump(center=-2, radius=1), c=bump(center=2, radius=1))").unwrap();
        let (mut u, mut big_g, mut du, mut div) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(fg_scalar_sample(g, spec.as_ptr(), &mut u), FgStatus::Ok);
        assert_eq!(fg_od_sample(g, pair.as_ptr(), &mut big_g), FgStatus::Ok);
        assert_eq!(fg_frac_gradient(u, 0.5, &mut du), FgStatus::Ok);
        assert_eq!(fg_frac_divergence(big_g, 0.5, &mut div), FgStatus::Ok);
        let (mut lhs, mut rhs) = (0.0, 0.0);
        assert_eq!(fg_pair_od(du, big_g, &mut lhs), FgStatus::Ok);
        assert_eq!(fg_pair_scalar(u, div, &mut rhs), FgStatus::Ok);
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "{lhs} vs {rhs}");

        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(fg_od_get(du, 3, 10, &mut a), FgStatus::Ok);
        assert_eq!(fg_od_get(du, 10, 3, &mut b), FgStatus::Ok);
        assert_eq!(a, -b);

        fg_od_free(du);
        fg_od_free(big_g);
        fg_scalar_free(div);
        fg_scalar_free(u);
        fg_grid_free(g);
    }
}

#[test]
fn values_round_trip_and_norms() {
    unsafe {
        let g = grid(9);
        assert_eq!(fg_grid_node_count(g), 9);
        let vals: Vec<f64> = (0..9).map(|i| i as f64 - 4.0).collect();
        let mut u = ptr::null_mut();
        assert_eq!(fg_scalar_from_values(g, vals.as_ptr(), vals.len(), &mut u), FgStatus::Ok);
        let mut back = vec![0.0; 9];
        let mut count = 0;
        assert_eq!(fg_scalar_values(u, back.as_mut_ptr(), back.len(), &mut count), FgStatus::Ok);
        assert_eq!((back.as_slice(), count), (vals.as_slice(), 9));
        let mut sup = 0.0;
        assert_eq!(fg_lp_norm(u, f64::INFINITY, &mut sup), FgStatus::Ok);
        assert_eq!(sup, 4.0);
        let mut semi = 0.0;
        assert_eq!(fg_gagliardo_seminorm(u, 0.5, 2.0, &mut semi), FgStatus::Ok);
        assert!(semi > 0.0);
        fg_scalar_free(u);
        fg_grid_free(g);
    }
}

#[test]
fn errors_set_codes_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(fg_grid_new(3, 1.0, 8, &mut g), FgStatus::InvalidArgument);
        assert!(g.is_null());
        assert!(!last_error().is_empty());

        let g = grid(8);
        let bad = CString::new("gaussian(width=").unwrap();
        let mut u = ptr::null_mut();
        assert_eq!(fg_scalar_sample(g, bad.as_ptr(), &mut u), FgStatus::Parse);
        assert_eq!(fg_scalar_sample(ptr::null(), bad.as_ptr(), &mut u), FgStatus::NullPointer);
        assert!(last_error().contains("grid"));

        let other = grid(9);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        let spec = CString::new("bump(radius=2)").unwrap();
        assert_eq!(fg_scalar_sample(g, spec.as_ptr(), &mut a), FgStatus::Ok);
        assert_eq!(fg_scalar_sample(other, spec.as_ptr(), &mut b), FgStatus::Ok);
        let mut x = 0.0;
        assert_eq!(fg_pair_scalar(a, b, &mut x), FgStatus::GridMismatch);
        assert_eq!(fg_lp_norm(a, 2.0, ptr::null_mut()), FgStatus::NullPointer);

        let mut d = ptr::null_mut();
        assert_eq!(fg_frac_gradient(a, 2.0, &mut d), FgStatus::InvalidArgument);
        assert_eq!(fg_last_error(ptr::null_mut(), 0), last_error().len());

        fg_scalar_free(a);
        fg_scalar_free(b);
        fg_grid_free(g);
        fg_grid_free(other);
        fg_grid_free(ptr::null_mut());
    }
}
