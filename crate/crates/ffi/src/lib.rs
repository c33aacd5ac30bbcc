//! C ABI over `fracgrad`.
//!
//! Grids and fields are opaque heap handles created by `fg_*_new` /
//! operator calls and released with the matching `fg_*_free`. Every fallible
//! call returns an [`FgStatus`]; on failure the message is kept per thread
//! and can be copied out with [`fg_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use fracgrad::norms::{gagliardo_seminorm, lp_norm, lp_od_norm};
use fracgrad::operators::{frac_divergence, frac_gradient, frac_laplacian_integral};
use fracgrad::testlib::{sample_od, sample_scalar, OdFnSpec, ScalarFnSpec};
use fracgrad::{make_grid, pair_od, pair_scalar, FracError, GridSpec, OffDiagonalField, ScalarField};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    GridMismatch = 3,
    Divergent = 4,
    Parse = 5,
    Internal = 6,
    Panic = 7,
}

/// Uniform grid handle.
pub struct FgGrid(Arc<GridSpec>);

/// Scalar field handle.
pub struct FgScalarField(ScalarField);

/// Antisymmetric pair field handle.
pub struct FgOdField(OffDiagonalField);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &FracError) -> FgStatus {
    match e {
        FracError::GridMismatch => FgStatus::GridMismatch,
        FracError::Divergent(_) => FgStatus::Divergent,
        FracError::Parse { .. } | FracError::Spec(_) => FgStatus::Parse,
        FracError::InvalidGrid(_)
        | FracError::InvalidParameter { .. }
        | FracError::NonFinite(_)
        | FracError::Empty(_)
        | FracError::Config(_) => FgStatus::InvalidArgument,
        _ => FgStatus::Internal,
    }
}

struct Fail(FgStatus, String);

impl From<FracError> for Fail {
    fn from(e: FracError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FgStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FgStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            FgStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = value;
    Ok(())
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FgStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len - 1` bytes) and returns the full message
/// length in bytes. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn fg_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a `dim`-dimensional grid on `[-half_width, half_width]^dim` with
/// `points` nodes per axis.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fg_grid_new(dim: usize, half_width: f64, points: usize, out: *mut *mut FgGrid) -> FgStatus {
    guard(|| store(out, FgGrid(make_grid(dim, half_width, points)?)))
}

/// Number of grid nodes, 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fg_grid_node_count(grid: *const FgGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.node_count())
}

/// # Safety
/// `grid` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fg_grid_free(grid: *mut FgGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Scalar field from `len` node values (row-major over the node index).
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_scalar_from_values(
    grid: *const FgGrid,
    values: *const f64,
    len: usize,
    out: *mut *mut FgScalarField,
) -> FgStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        if values.is_null() {
            return Err(null("values"));
        }
        let v = std::slice::from_raw_parts(values, len).to_vec();
        store(out, FgScalarField(ScalarField::new(g.0.clone(), v)?))
    })
}

/// Samples a named test function such as `"gaussian(width=2)"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_scalar_sample(
    grid: *const FgGrid,
    spec: *const c_char,
    out: *mut *mut FgScalarField,
) -> FgStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        let spec: ScalarFnSpec = c_str(spec, "spec")?.parse()?;
        store(out, FgScalarField(sample_scalar(&spec, &g.0)?))
    })
}

/// Copies up to `len` node values into `out` and stores the node count in
/// `count` (either may be null).
///
/// # Safety
/// `out` must be null or point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fg_scalar_values(
    field: *const FgScalarField,
    out: *mut f64,
    len: usize,
    count: *mut usize,
) -> FgStatus {
    guard(|| {
        let v = deref(field, "field")?.0.values();
        if !out.is_null() {
            std::ptr::copy_nonoverlapping(v.as_ptr(), out, v.len().min(len));
        }
        if !count.is_null() {
            *count = v.len();
        }
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fg_scalar_free(field: *mut FgScalarField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Samples a named pair test function such as
/// `"disjoint_bumps(b=bump(center=-2), c=bump(center=2))"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_od_sample(grid: *const FgGrid, spec: *const c_char, out: *mut *mut FgOdField) -> FgStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        let spec: OdFnSpec = c_str(spec, "spec")?.parse()?;
        store(out, FgOdField(sample_od(&spec, &g.0)?))
    })
}

/// Value at node pair `(a, b)`; zero on the diagonal.
///
/// # Safety
/// `field` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_od_get(field: *const FgOdField, a: usize, b: usize, out: *mut f64) -> FgStatus {
    guard(|| {
        let f = &deref(field, "field")?.0;
        let m = f.grid().node_count();
        if a >= m || b >= m {
            return Err(Fail(FgStatus::InvalidArgument, format!("node pair ({a}, {b}) out of range {m}")));
        }
        write(out, f.get(a, b))
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fg_od_free(field: *mut FgOdField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// `d_s u`.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_frac_gradient(u: *const FgScalarField, s: f64, out: *mut *mut FgOdField) -> FgStatus {
    guard(|| store(out, FgOdField(frac_gradient(&deref(u, "u")?.0, s)?)))
}

/// `div_s G`.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_frac_divergence(g: *const FgOdField, s: f64, out: *mut *mut FgScalarField) -> FgStatus {
    guard(|| store(out, FgScalarField(frac_divergence(&deref(g, "g")?.0, s)?)))
}

/// `div_s d_s u` by the lattice singular integral.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_frac_laplacian(u: *const FgScalarField, s: f64, out: *mut *mut FgScalarField) -> FgStatus {
    guard(|| store(out, FgScalarField(frac_laplacian_integral(&deref(u, "u")?.0, s)?)))
}

/// `∫ u v dx`.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_pair_scalar(u: *const FgScalarField, v: *const FgScalarField, out: *mut f64) -> FgStatus {
    guard(|| write(out, pair_scalar(&deref(u, "u")?.0, &deref(v, "v")?.0)?))
}

/// `∬ F G dx dy / |x-y|^n`.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_pair_od(f: *const FgOdField, g: *const FgOdField, out: *mut f64) -> FgStatus {
    guard(|| write(out, pair_od(&deref(f, "f")?.0, &deref(g, "g")?.0)?))
}

/// `‖u‖_{L^p}`; pass `INFINITY` for the max norm.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_lp_norm(u: *const FgScalarField, p: f64, out: *mut f64) -> FgStatus {
    guard(|| write(out, lp_norm(&deref(u, "u")?.0, p)?))
}

/// `‖F‖_{L^p_od}`.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_lp_od_norm(f: *const FgOdField, p: f64, out: *mut f64) -> FgStatus {
    guard(|| write(out, lp_od_norm(&deref(f, "f")?.0, p)?))
}

/// `‖d_s u‖_{L^p_od}`.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fg_gagliardo_seminorm(u: *const FgScalarField, s: f64, p: f64, out: *mut f64) -> FgStatus {
    guard(|| write(out, gagliardo_seminorm(&deref(u, "u")?.0, s, p)?))
}
