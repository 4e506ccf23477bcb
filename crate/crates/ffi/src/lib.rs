//! C ABI for the `pcurv` library.
//!
//! Surfaces are opaque handles created by the `pcurv_*_new` constructors and
//! released with [`pcurv_surface_free`]. Every fallible call returns a
//! [`PcurvStatus`]; the message of the most recent failure on the calling
//! thread is available through [`pcurv_last_error`].

use pcurv::optimize::{minimize, OptStatus, OptimizerConfig};
use pcurv::surfaces::{make_sphere, make_torus, perturb};
use pcurv::variation::{discrete_gradient, ps_norm_surrogate};
use pcurv::{energy_value, willmore, Functional, PcurvError, Surface};
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Opaque surface handle.
pub struct PcurvSurface {
    inner: Surface,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcurvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    ShapeMismatch = 3,
    NotClosed = 4,
    DegenerateJet = 5,
    DegenerateStep = 6,
    Numerical = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcurvFunctional {
    Ep = 0,
    Wp = 1,
}

impl From<PcurvFunctional> for Functional {
    fn from(f: PcurvFunctional) -> Self {
        match f {
            PcurvFunctional::Ep => Functional::Ep,
            PcurvFunctional::Wp => Functional::Wp,
        }
    }
}

/// Termination of [`pcurv_minimize`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcurvOptStatus {
    ConvergedPs = 0,
    ConvergedEnergy = 1,
    MaxIters = 2,
    DegenerateStep = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &PcurvError) -> PcurvStatus {
    match e {
        PcurvError::InvalidParameter(_) | PcurvError::Io(_) => PcurvStatus::InvalidParameter,
        PcurvError::ShapeMismatch { .. } => PcurvStatus::ShapeMismatch,
        PcurvError::NotClosed => PcurvStatus::NotClosed,
        PcurvError::DegenerateJet { .. } => PcurvStatus::DegenerateJet,
        PcurvError::DegenerateStep { .. } => PcurvStatus::DegenerateStep,
        _ => PcurvStatus::Numerical,
    }
}

/// Runs `f`, recording errors and panics.
fn guard<F: FnOnce() -> Result<(), PcurvError>>(f: F) -> PcurvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PcurvStatus::Ok,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            PcurvStatus::Panic
        }
    }
}

fn null() -> PcurvError {
    PcurvError::InvalidParameter("null pointer".into())
}

unsafe fn surface<'a>(s: *const PcurvSurface) -> Result<&'a Surface, PcurvError> {
    s.as_ref().map(|s| &s.inner).ok_or_else(null)
}

unsafe fn store(out: *mut *mut PcurvSurface, s: Surface) -> Result<(), PcurvError> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(PcurvSurface { inner: s }));
    Ok(())
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), PcurvError> {
    if out.is_null() {
        return Err(null());
    }
    *out = v;
    Ok(())
}

fn null_status(ptrs: &[bool]) -> Option<PcurvStatus> {
    ptrs.iter().any(|&n| n).then(|| {
        set_error("null pointer".into());
        PcurvStatus::NullPointer
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pcurv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len − 1` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pcurv_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Closed-form sphere of radius `radius` with `m` profile nodes.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn pcurv_sphere_new(radius: f64, m: usize, out: *mut *mut PcurvSurface) -> PcurvStatus {
    if let Some(s) = null_status(&[out.is_null()]) {
        return s;
    }
    guard(|| store(out, Surface::Axisym(make_sphere(radius, m)?)))
}

/// Sampled torus of revolution in `R^n` on an `n1 × n2` grid.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn pcurv_torus_new(
    n: usize,
    big_r: f64,
    a: f64,
    n1: usize,
    n2: usize,
    out: *mut *mut PcurvSurface,
) -> PcurvStatus {
    if let Some(s) = null_status(&[out.is_null()]) {
        return s;
    }
    guard(|| store(out, Surface::Torus(make_torus(n, big_r, a, [n1, n2])?)))
}

/// Surface from a CLI shape spec such as `torus:R=2,a=1,N=64`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn pcurv_surface_from_spec(
    spec: *const c_char,
    p: f64,
    functional: PcurvFunctional,
    seed: u64,
    out: *mut *mut PcurvSurface,
) -> PcurvStatus {
    if let Some(s) = null_status(&[spec.is_null(), out.is_null()]) {
        return s;
    }
    guard(|| {
        let text = CStr::from_ptr(spec).to_str().map_err(|_| PcurvError::InvalidParameter("spec is not utf-8".into()))?;
        let shape: pcurv::cli::shape::ShapeSpec = text.parse()?;
        store(out, shape.build(p, functional.into(), seed)?)
    })
}

/// Smooth random normal perturbation of `src` (sampled copy), seeded.
///
/// # Safety
/// `src` must be a live handle; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn pcurv_surface_perturb(
    src: *const PcurvSurface,
    amplitude: f64,
    seed: u64,
    out: *mut *mut PcurvSurface,
) -> PcurvStatus {
    if let Some(s) = null_status(&[src.is_null(), out.is_null()]) {
        return s;
    }
    guard(|| store(out, perturb(&surface(src)?.to_sampled(), amplitude, seed)?))
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pcurv_surface_free(s: *mut PcurvSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of quadrature nodes, 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcurv_surface_node_count(s: *const PcurvSurface) -> usize {
    s.as_ref().map_or(0, |s| s.inner.node_count())
}

/// Number of nodal dofs, 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcurv_surface_dof_count(s: *const PcurvSurface) -> usize {
    s.as_ref().map_or(0, |s| s.inner.dof_count())
}

/// Copies the nodal dofs into `buf`, which must hold exactly the dof count.
///
/// # Safety
/// `s` must be a live handle and `buf` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pcurv_surface_dofs(s: *const PcurvSurface, buf: *mut f64, len: usize) -> PcurvStatus {
    if let Some(st) = null_status(&[s.is_null(), buf.is_null()]) {
        return st;
    }
    guard(|| {
        let d = surface(s)?.dofs();
        if d.len() != len {
            return Err(PcurvError::ShapeMismatch { expected: d.len(), got: len });
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(d);
        Ok(())
    })
}

/// `E^p` or `W^p` of the surface.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pcurv_energy(
    s: *const PcurvSurface,
    functional: PcurvFunctional,
    p: f64,
    out: *mut f64,
) -> PcurvStatus {
    if let Some(st) = null_status(&[s.is_null(), out.is_null()]) {
        return st;
    }
    guard(|| write(out, energy_value(surface(s)?, functional.into(), p)?))
}

/// Willmore energy and Gauss–Bonnet defect of a closed surface.
///
/// # Safety
/// `s` must be a live handle; outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pcurv_willmore(s: *const PcurvSurface, willmore_out: *mut f64, gb_defect: *mut f64) -> PcurvStatus {
    if let Some(st) = null_status(&[s.is_null(), willmore_out.is_null(), gb_defect.is_null()]) {
        return st;
    }
    guard(|| {
        let w = willmore(surface(s)?)?;
        write(willmore_out, w.willmore)?;
        write(gb_defect, w.gauss_bonnet_defect)
    })
}

/// Discrete gradient with respect to the nodal dofs; `grad` must hold exactly
/// the dof count.
///
/// # Safety
/// `s` must be a live handle and `grad` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pcurv_gradient(
    s: *const PcurvSurface,
    functional: PcurvFunctional,
    p: f64,
    grad: *mut f64,
    len: usize,
) -> PcurvStatus {
    if let Some(st) = null_status(&[s.is_null(), grad.is_null()]) {
        return st;
    }
    guard(|| {
        let surf = surface(s)?;
        if surf.dof_count() != len {
            return Err(PcurvError::ShapeMismatch { expected: surf.dof_count(), got: len });
        }
        let g = discrete_gradient(surf, p, functional.into())?;
        std::slice::from_raw_parts_mut(grad, len).copy_from_slice(&g.grad);
        Ok(())
    })
}

/// Dictionary lower bound on the dual norm of the first variation.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pcurv_ps_surrogate(
    s: *const PcurvSurface,
    functional: PcurvFunctional,
    p: f64,
    dictionary_size: usize,
    seed: u64,
    out: *mut f64,
) -> PcurvStatus {
    if let Some(st) = null_status(&[s.is_null(), out.is_null()]) {
        return st;
    }
    guard(|| write(out, ps_norm_surrogate(surface(s)?, p, functional.into(), dictionary_size, seed)?.surrogate))
}

/// Steepest descent with default settings except `max_iters`. On success
/// `*out` receives a new handle with the final surface.
///
/// # Safety
/// `s` must be a live handle; outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pcurv_minimize(
    s: *const PcurvSurface,
    functional: PcurvFunctional,
    p: f64,
    max_iters: usize,
    out: *mut *mut PcurvSurface,
    final_energy: *mut f64,
    status: *mut PcurvOptStatus,
) -> PcurvStatus {
    if let Some(st) = null_status(&[s.is_null(), out.is_null(), final_energy.is_null(), status.is_null()]) {
        return st;
    }
    guard(|| {
        let cfg = OptimizerConfig { max_iters, ..Default::default() };
        let run = minimize(surface(s)?, p, functional.into(), &cfg)?;
        write(final_energy, run.final_energy())?;
        write(
            status,
            match run.status {
                OptStatus::ConvergedPS => PcurvOptStatus::ConvergedPs,
                OptStatus::ConvergedEnergy => PcurvOptStatus::ConvergedEnergy,
                OptStatus::MaxIters => PcurvOptStatus::MaxIters,
                OptStatus::DegenerateStep => PcurvOptStatus::DegenerateStep,
            },
        )?;
        store(out, run.final_surface)
    })
}
