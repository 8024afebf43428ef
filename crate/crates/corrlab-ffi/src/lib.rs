//! C ABI for the correspondence laboratory.
//!
//! Handles are opaque pointers created and released by this library; every
//! function returns a `CorrlabStatus` and writes results through out
//! pointers. The most recent error message per thread is available through
//! `corrlab_last_error_message`. The header `include/corrlab.h` is
//! generated at build time.

use corrlab::cohomlin;
use corrlab::corr1::Corr1;
use corrlab::green::{backward_orbit_sample, AtomicMeasure};
use corrlab::mult;
use corrlab::polyalg::C64;
use corrlab::regcal;
use num_complex::Complex;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg).unwrap_or_default();
    });
}

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ComputeError = 4,
    BufferTooSmall = 5,
}

/// Opaque correspondence handle.
pub struct CorrlabCorr {
    inner: Corr1,
}

/// Opaque sampled-measure handle.
pub struct CorrlabMeasure {
    inner: AtomicMeasure,
}

/// Summary of a log-rate certificate run.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CorrlabRateSummary {
    pub big_d: f64,
    pub r: f64,
    pub c5: f64,
    /// 1 when every grid point passed
    pub all_pass: i32,
}

unsafe fn corr_ref<'a>(ptr: *const CorrlabCorr) -> Option<&'a Corr1> {
    unsafe { ptr.as_ref().map(|h| &h.inner) }
}

/// Copy the most recent error message on this thread into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn corrlab_last_error_message(buf: *mut c_char, len: usize) -> CorrlabStatus {
    if buf.is_null() {
        return CorrlabStatus::NullPointer;
    }
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if bytes.len() > len {
            return CorrlabStatus::BufferTooSmall;
        }
        unsafe {
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
        }
        CorrlabStatus::Ok
    })
}

/// Build a correspondence from its JSON graph document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrlab_corr_from_json(
    json: *const c_char,
    out: *mut *mut CorrlabCorr,
) -> CorrlabStatus {
    if json.is_null() || out.is_null() {
        return CorrlabStatus::NullPointer;
    }
    let text = match unsafe { CStr::from_ptr(json) }.to_str() {
        Ok(t) => t,
        Err(e) => {
            set_error(format!("invalid UTF-8: {e}"));
            return CorrlabStatus::ParseError;
        }
    };
    let value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            set_error(format!("JSON parse error: {e}"));
            return CorrlabStatus::ParseError;
        }
    };
    match Corr1::from_json(&value) {
        Ok(corr) => {
            unsafe { *out = Box::into_raw(Box::new(CorrlabCorr { inner: corr })) };
            CorrlabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CorrlabStatus::InvalidArgument
        }
    }
}

/// Build the parameter-family correspondence with rational parameter
/// c = c_num / c_den.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corrlab_corr_family(
    d0: u32,
    d1: u32,
    c_num: i64,
    c_den: i64,
    out: *mut *mut CorrlabCorr,
) -> CorrlabStatus {
    if out.is_null() {
        return CorrlabStatus::NullPointer;
    }
    if d0 == 0 || d1 == 0 || c_den == 0 {
        set_error("need d0, d1 >= 1 and a nonzero denominator");
        return CorrlabStatus::InvalidArgument;
    }
    let c = Complex::new(
        num::BigRational::new(c_num.into(), c_den.into()),
        num::BigRational::from_integer(0.into()),
    );
    match Corr1::family(d0 as usize, d1 as usize, c) {
        Ok(corr) => {
            unsafe { *out = Box::into_raw(Box::new(CorrlabCorr { inner: corr })) };
            CorrlabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CorrlabStatus::InvalidArgument
        }
    }
}

/// Release a correspondence handle.
///
/// # Safety
/// `ptr` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn corrlab_corr_free(ptr: *mut CorrlabCorr) {
    if !ptr.is_null() {
        drop(unsafe { Box::from_raw(ptr) });
    }
}

/// Bidegree of the correspondence.
///
/// # Safety
/// Valid handle and writable out pointers.
#[no_mangle]
pub unsafe extern "C" fn corrlab_corr_bidegree(
    corr: *const CorrlabCorr,
    d0: *mut u32,
    d1: *mut u32,
) -> CorrlabStatus {
    let Some(f) = (unsafe { corr_ref(corr) }) else {
        return CorrlabStatus::NullPointer;
    };
    if d0.is_null() || d1.is_null() {
        return CorrlabStatus::NullPointer;
    }
    unsafe {
        *d0 = f.d0() as u32;
        *d1 = f.d1() as u32;
    }
    CorrlabStatus::Ok
}

/// Adjoint correspondence as a fresh handle.
///
/// # Safety
/// Valid handle; writable out.
#[no_mangle]
pub unsafe extern "C" fn corrlab_corr_adjoint(
    corr: *const CorrlabCorr,
    out: *mut *mut CorrlabCorr,
) -> CorrlabStatus {
    let Some(f) = (unsafe { corr_ref(corr) }) else {
        return CorrlabStatus::NullPointer;
    };
    if out.is_null() {
        return CorrlabStatus::NullPointer;
    }
    unsafe {
        *out = Box::into_raw(Box::new(CorrlabCorr {
            inner: f.adjoint(),
        }));
    }
    CorrlabStatus::Ok
}

/// Composition f . g (g applied first) as a fresh handle.
///
/// # Safety
/// Valid handles; writable out.
#[no_mangle]
pub unsafe extern "C" fn corrlab_corr_compose(
    f: *const CorrlabCorr,
    g: *const CorrlabCorr,
    out: *mut *mut CorrlabCorr,
) -> CorrlabStatus {
    let (Some(fc), Some(gc)) = (unsafe { corr_ref(f) }, unsafe { corr_ref(g) }) else {
        return CorrlabStatus::NullPointer;
    };
    if out.is_null() {
        return CorrlabStatus::NullPointer;
    }
    match Corr1::compose(fc, gc) {
        Ok((h, _)) => {
            unsafe { *out = Box::into_raw(Box::new(CorrlabCorr { inner: h })) };
            CorrlabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CorrlabStatus::ComputeError
        }
    }
}

/// Serialized graph JSON of the correspondence.
///
/// # Safety
/// `buf` must point to `len` writable bytes; `written` receives the
/// required size (including NUL) when the buffer is too small.
#[no_mangle]
pub unsafe extern "C" fn corrlab_corr_to_json(
    corr: *const CorrlabCorr,
    buf: *mut c_char,
    len: usize,
    written: *mut usize,
) -> CorrlabStatus {
    let Some(f) = (unsafe { corr_ref(corr) }) else {
        return CorrlabStatus::NullPointer;
    };
    if buf.is_null() || written.is_null() {
        return CorrlabStatus::NullPointer;
    }
    let text = f.to_json().to_string();
    let bytes = text.as_bytes();
    unsafe { *written = bytes.len() + 1 };
    if bytes.len() + 1 > len {
        return CorrlabStatus::BufferTooSmall;
    }
    unsafe {
        ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
        *buf.add(bytes.len()) = 0;
    }
    CorrlabStatus::Ok
}

/// Local multiplicity of the first projection.
///
/// # Safety
/// Valid handle; writable out.
#[no_mangle]
pub unsafe extern "C" fn corrlab_local_multiplicity(
    corr: *const CorrlabCorr,
    rho: *mut u32,
) -> CorrlabStatus {
    let Some(f) = (unsafe { corr_ref(corr) }) else {
        return CorrlabStatus::NullPointer;
    };
    if rho.is_null() {
        return CorrlabStatus::NullPointer;
    }
    match mult::local_multiplicity(f) {
        Ok((r, _)) => {
            unsafe { *rho = r as u32 };
            CorrlabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CorrlabStatus::ComputeError
        }
    }
}

/// Adjoint multiplicity (local multiplicity of the second projection).
///
/// # Safety
/// Valid handle; writable out.
#[no_mangle]
pub unsafe extern "C" fn corrlab_adjoint_multiplicity(
    corr: *const CorrlabCorr,
    delta: *mut u32,
) -> CorrlabStatus {
    let Some(f) = (unsafe { corr_ref(corr) }) else {
        return CorrlabStatus::NullPointer;
    };
    if delta.is_null() {
        return CorrlabStatus::NullPointer;
    }
    match mult::adjoint_multiplicity(f) {
        Ok(d) => {
            unsafe { *delta = d as u32 };
            CorrlabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CorrlabStatus::ComputeError
        }
    }
}

/// kappa = 1 / (25 k (4 rho)^q) as an exact fraction.
///
/// # Safety
/// Writable out pointers.
#[no_mangle]
pub unsafe extern "C" fn corrlab_kappa(
    k: u32,
    q: u32,
    rho: u32,
    num: *mut u64,
    den: *mut u64,
) -> CorrlabStatus {
    if num.is_null() || den.is_null() {
        return CorrlabStatus::NullPointer;
    }
    if q == 0 || q > k || rho == 0 {
        set_error("need 1 <= q <= k and rho >= 1");
        return CorrlabStatus::InvalidArgument;
    }
    let v = mult::kappa(k as usize, q as usize, rho as usize);
    unsafe { write_fraction(&v, num, den) }
}

/// kappa~ with kappa~^{-1} = 25 k (4 delta)^{k-q+1}, as an exact fraction.
///
/// # Safety
/// Writable out pointers.
#[no_mangle]
pub unsafe extern "C" fn corrlab_kappa_tilde(
    k: u32,
    q: u32,
    delta: u32,
    num: *mut u64,
    den: *mut u64,
) -> CorrlabStatus {
    if num.is_null() || den.is_null() {
        return CorrlabStatus::NullPointer;
    }
    if q == 0 || q > k || delta == 0 {
        set_error("need 1 <= q <= k and delta >= 1");
        return CorrlabStatus::InvalidArgument;
    }
    let v = mult::kappa_tilde(k as usize, q as usize, delta as usize);
    unsafe { write_fraction(&v, num, den) }
}

unsafe fn write_fraction(v: &num::BigRational, num: *mut u64, den: *mut u64) -> CorrlabStatus {
    use num::ToPrimitive;
    let (Some(n), Some(d)) = (v.numer().to_u64(), v.denom().to_u64()) else {
        set_error("fraction exceeds 64-bit range");
        return CorrlabStatus::InvalidArgument;
    };
    unsafe {
        *num = n;
        *den = d;
    }
    CorrlabStatus::Ok
}

/// Degree profile of a model action. `model`: 0 projective (uses s1),
/// 1 graph-sum (s1, s2), 2 symmetric product (s1 = d0, s2 = d1). The
/// buffer must hold k + 1 entries.
///
/// # Safety
/// `out` must point to `out_len` writable entries.
#[no_mangle]
pub unsafe extern "C" fn corrlab_degree_profile(
    model: u32,
    s1: u64,
    s2: u64,
    k: u32,
    out: *mut u64,
    out_len: usize,
) -> CorrlabStatus {
    if out.is_null() {
        return CorrlabStatus::NullPointer;
    }
    let k = k as usize;
    if out_len < k + 1 {
        set_error(format!("buffer needs {} entries", k + 1));
        return CorrlabStatus::BufferTooSmall;
    }
    let profile = match model {
        0 => cohomlin::degrees_projective(s1 as u128, k),
        1 => cohomlin::degrees_graph_sum(s1 as u128, s2 as u128, k),
        2 => cohomlin::degrees_sym_product(s1 as u128, s2 as u128, k),
        _ => {
            set_error("model must be 0, 1 or 2");
            return CorrlabStatus::InvalidArgument;
        }
    };
    for (i, d) in profile.degrees.iter().enumerate() {
        let Ok(v) = u64::try_from(*d) else {
            set_error("degree exceeds 64-bit range");
            return CorrlabStatus::InvalidArgument;
        };
        unsafe { *out.add(i) = v };
    }
    CorrlabStatus::Ok
}

/// Verify the log-rate certificate on a xi grid; summary written on
/// success. Returns ComputeError when a grid point violates the chain.
///
/// # Safety
/// `xi` must point to `xi_len` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn corrlab_certify_log_rate(
    dq: f64,
    dqm1: f64,
    kappa: f64,
    xi: *const f64,
    xi_len: usize,
    out: *mut CorrlabRateSummary,
) -> CorrlabStatus {
    if xi.is_null() || out.is_null() {
        return CorrlabStatus::NullPointer;
    }
    let grid = unsafe { std::slice::from_raw_parts(xi, xi_len) };
    match regcal::certify_log_rate(dq, dqm1, kappa, grid, None) {
        Ok(cert) => {
            unsafe {
                *out = CorrlabRateSummary {
                    big_d: cert.big_d,
                    r: cert.r,
                    c5: cert.c5,
                    all_pass: cert.all_pass as i32,
                };
            }
            if cert.all_pass {
                CorrlabStatus::Ok
            } else {
                set_error("certificate violated on the grid");
                CorrlabStatus::ComputeError
            }
        }
        Err(e) => {
            set_error(e.to_string());
            CorrlabStatus::InvalidArgument
        }
    }
}

/// Fiber-motion exponent fit at a base point.
///
/// # Safety
/// Valid handle; writable out pointers.
#[no_mangle]
pub unsafe extern "C" fn corrlab_loja_exponent(
    corr: *const CorrlabCorr,
    z0_re: f64,
    z0_im: f64,
    slope: *mut f64,
    r2: *mut f64,
) -> CorrlabStatus {
    let Some(f) = (unsafe { corr_ref(corr) }) else {
        return CorrlabStatus::NullPointer;
    };
    if slope.is_null() || r2.is_null() {
        return CorrlabStatus::NullPointer;
    }
    match mult::loja_exponent(f, C64::new(z0_re, z0_im), &mult::default_radii()) {
        Ok(fit) => {
            unsafe {
                *slope = fit.slope;
                *r2 = fit.r2;
            }
            CorrlabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CorrlabStatus::ComputeError
        }
    }
}

/// Depth-n Monte-Carlo backward orbit of the point (a_re, a_im); the
/// resulting measure handle must be freed with `corrlab_measure_free`.
///
/// # Safety
/// Valid handle; writable out.
#[no_mangle]
pub unsafe extern "C" fn corrlab_backward_orbit(
    corr: *const CorrlabCorr,
    a_re: f64,
    a_im: f64,
    depth: u32,
    paths: u32,
    seed: u64,
    out: *mut *mut CorrlabMeasure,
) -> CorrlabStatus {
    let Some(f) = (unsafe { corr_ref(corr) }) else {
        return CorrlabStatus::NullPointer;
    };
    if out.is_null() {
        return CorrlabStatus::NullPointer;
    }
    let a = corrlab::corr1::P1Point::finite(C64::new(a_re, a_im));
    match backward_orbit_sample(f, a, depth as usize, paths as usize, seed) {
        Ok(s) => {
            unsafe {
                *out = Box::into_raw(Box::new(CorrlabMeasure { inner: s.measure }));
            }
            CorrlabStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            CorrlabStatus::ComputeError
        }
    }
}

/// Number of atoms in a measure.
///
/// # Safety
/// Valid handle; writable out.
#[no_mangle]
pub unsafe extern "C" fn corrlab_measure_len(
    measure: *const CorrlabMeasure,
    len: *mut usize,
) -> CorrlabStatus {
    let Some(m) = (unsafe { measure.as_ref() }) else {
        return CorrlabStatus::NullPointer;
    };
    if len.is_null() {
        return CorrlabStatus::NullPointer;
    }
    unsafe { *len = m.inner.atoms.len() };
    CorrlabStatus::Ok
}

/// Copy atoms as (re, im, weight, chart) rows into a flat double buffer of
/// 4 * len entries, in the stored chart coordinates.
///
/// # Safety
/// `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn corrlab_measure_atoms(
    measure: *const CorrlabMeasure,
    out: *mut f64,
    out_len: usize,
) -> CorrlabStatus {
    let Some(m) = (unsafe { measure.as_ref() }) else {
        return CorrlabStatus::NullPointer;
    };
    if out.is_null() {
        return CorrlabStatus::NullPointer;
    }
    let need = 4 * m.inner.atoms.len();
    if out_len < need {
        set_error(format!("buffer needs {need} doubles"));
        return CorrlabStatus::BufferTooSmall;
    }
    for (i, (p, w)) in m.inner.atoms.iter().enumerate() {
        let c = p.chart_coord();
        unsafe {
            *out.add(4 * i) = c.re;
            *out.add(4 * i + 1) = c.im;
            *out.add(4 * i + 2) = *w;
            *out.add(4 * i + 3) = p.chart_index() as f64;
        }
    }
    CorrlabStatus::Ok
}

/// Release a measure handle.
///
/// # Safety
/// `ptr` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn corrlab_measure_free(ptr: *mut CorrlabMeasure) {
    if !ptr.is_null() {
        drop(unsafe { Box::from_raw(ptr) });
    }
}
