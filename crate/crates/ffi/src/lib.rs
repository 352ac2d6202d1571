//! C interface to the hfrep toolkit.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `*_new`/`*_build` call and released by the matching `*_free`. Functions
//! return an [`HfrepStatus`]; results come back through out-pointers. The
//! message of the last failure on the calling thread is available from
//! [`hfrep_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hfrep::frep::{model, Model};
use hfrep::io::write_hfrf;
use hfrep::pipeline::{hfrep_build, HfrepField as CoreField, HfrepParams, Route};
use hfrep::{HfrepError, Point, ScalarGrid};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfrepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    EmptyBoundary = 4,
    NonConvergence = 5,
    Lipschitz = 6,
    UnknownModel = 7,
    Io = 8,
    Format = 9,
    Panic = 10,
}

/// Unsigned distance route used by [`hfrep_field_build`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfrepRoute {
    Dt = 0,
    Fim = 1,
    HfimAdf = 2,
    Idf = 3,
}

impl From<HfrepRoute> for Route {
    fn from(r: HfrepRoute) -> Route {
        match r {
            HfrepRoute::Dt => Route::Dt,
            HfrepRoute::Fim => Route::Fim,
            HfrepRoute::HfimAdf => Route::HfimAdf,
            HfrepRoute::Idf => Route::Idf,
        }
    }
}

/// A named catalog model.
pub struct HfrepModel {
    inner: Model,
}

/// A built field.
pub struct HfrepField {
    inner: CoreField,
}

/// A sampled field lattice.
pub struct HfrepGrid {
    inner: ScalarGrid,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &HfrepError) -> HfrepStatus {
    match e {
        HfrepError::Domain { .. } => HfrepStatus::Domain,
        HfrepError::InvalidParameter(_) | HfrepError::Precondition(_) | HfrepError::Parse(_) => {
            HfrepStatus::InvalidArgument
        }
        HfrepError::EmptyBoundary => HfrepStatus::EmptyBoundary,
        HfrepError::NonConvergence { .. } => HfrepStatus::NonConvergence,
        HfrepError::Lipschitz { .. } => HfrepStatus::Lipschitz,
        HfrepError::UnknownModel(_) => HfrepStatus::UnknownModel,
        HfrepError::Format(_) => HfrepStatus::Format,
        HfrepError::Io(_) => HfrepStatus::Io,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (HfrepStatus, String)>) -> HfrepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HfrepStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HfrepStatus::Panic
        }
    }
}

fn core(e: HfrepError) -> (HfrepStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (HfrepStatus, String) {
    (HfrepStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, (HfrepStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (HfrepStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn free_box<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, 0 if none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hfrep_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Looks up a catalog model by name.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hfrep_model_new(name: *const c_char, out: *mut *mut HfrepModel) -> HfrepStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = model(str_arg(name, "name")?).map_err(core)?;
        *out = Box::into_raw(Box::new(HfrepModel { inner: m }));
        Ok(())
    })
}

/// # Safety
/// `m` must come from [`hfrep_model_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hfrep_model_free(m: *mut HfrepModel) {
    free_box(m)
}

/// Spatial dimension of the model (2 or 3), 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn hfrep_model_dim(m: *const HfrepModel) -> u32 {
    m.as_ref().map_or(0, |m| m.inner.dim() as u32)
}

/// FRep value at `p` (`dim` coordinates).
///
/// # Safety
/// `p` must point to as many doubles as the model dimension; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hfrep_model_eval(m: *const HfrepModel, p: *const f64, out: *mut f64) -> HfrepStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("model"))?;
        let p = point(p, m.inner.dim())?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = m.inner.tree.eval(&p);
        Ok(())
    })
}

unsafe fn point(p: *const f64, dim: usize) -> Result<Point, (HfrepStatus, String)> {
    if p.is_null() {
        return Err(null("point"));
    }
    let mut c = [0.0; 3];
    c[..dim].copy_from_slice(std::slice::from_raw_parts(p, dim));
    if c.iter().any(|v| !v.is_finite()) {
        return Err((HfrepStatus::InvalidArgument, "point has non-finite coordinates".into()));
    }
    Ok(Point(c))
}

/// Builds the field of a model over its own box. `slope <= 0` selects the
/// default sigmoid slope.
///
/// # Safety
/// `m` must be a live model handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hfrep_field_build(
    m: *const HfrepModel,
    route: HfrepRoute,
    res: u32,
    slope: f64,
    out: *mut *mut HfrepField,
) -> HfrepStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let params = HfrepParams { res: res as usize, slope: (slope > 0.0).then_some(slope), ..Default::default() };
        let f = hfrep_build(&m.inner.tree, m.inner.bbox, route.into(), &params).map_err(core)?;
        *out = Box::into_raw(Box::new(HfrepField { inner: f }));
        Ok(())
    })
}

/// # Safety
/// `f` must come from [`hfrep_field_build`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hfrep_field_free(f: *mut HfrepField) {
    free_box(f)
}

/// Field value at `p`; points outside the box give `HFREP_STATUS_DOMAIN`.
///
/// # Safety
/// `p` must point to as many doubles as the field dimension; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hfrep_field_eval(f: *const HfrepField, p: *const f64, out: *mut f64) -> HfrepStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("field"))?;
        let p = point(p, f.inner.dim())?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = f.inner.eval(&p).map_err(core)?;
        Ok(())
    })
}

/// Samples the field on `res` nodes per axis over its box.
///
/// # Safety
/// `f` must be a live field handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hfrep_field_sample(f: *const HfrepField, res: u32, out: *mut *mut HfrepGrid) -> HfrepStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("field"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let g = f.inner.sample(&vec![res as usize; f.inner.dim()]).map_err(core)?;
        *out = Box::into_raw(Box::new(HfrepGrid { inner: g }));
        Ok(())
    })
}

/// # Safety
/// `g` must come from [`hfrep_field_sample`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hfrep_grid_free(g: *mut HfrepGrid) {
    free_box(g)
}

/// Number of nodes, 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn hfrep_grid_len(g: *const HfrepGrid) -> usize {
    g.as_ref().map_or(0, |g| g.inner.len())
}

/// Node values, x index fastest. The pointer lives as long as the grid.
///
/// # Safety
/// `g` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn hfrep_grid_values(g: *const HfrepGrid) -> *const f64 {
    g.as_ref().map_or(ptr::null(), |g| g.inner.values().as_ptr())
}

/// Writes the grid as an HFRF file.
///
/// # Safety
/// `g` must be a live grid handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hfrep_grid_write(g: *const HfrepGrid, path: *const c_char) -> HfrepStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("grid"))?;
        write_hfrf(str_arg(path, "path")?, &g.inner).map_err(core)
    })
}
