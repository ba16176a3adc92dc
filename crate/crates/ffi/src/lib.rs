//! C ABI over the greysim core.
//!
//! Every function returns a [`GsStatus`]. On failure the message is kept in a
//! thread-local slot readable with [`gs_last_error`]. Generators are opaque
//! handles created by `gs_*_new` and released by the matching `gs_*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use greysim::density::ConstantFieldLaw;
use greysim::error::Error;
use greysim::fbm::{FbmGenerator, FbmMethod, TimeGrid};
use greysim::grey_sampler::sample_y_with;
use greysim::rng::RngStream;
use greysim::specfun::{self, GreyParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Overflow = 3,
    InvalidInput = 4,
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsFbmMethod {
    Cholesky = 0,
    Circulant = 1,
}

/// Opaque fractional Brownian motion generator.
pub struct GsFbm {
    inner: FbmGenerator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GsStatus {
    match e {
        Error::Domain { .. } => GsStatus::Domain,
        Error::Overflow(_) => GsStatus::Overflow,
        Error::NotPositiveDefinite { .. }
        | Error::NegativeEmbedding { .. }
        | Error::NonFinite { .. }
        | Error::Divergence(_) => GsStatus::Numerical,
        _ => GsStatus::InvalidInput,
    }
}

fn guard<F: FnOnce() -> Result<(), GsStatus>>(f: F) -> GsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            GsStatus::Panic
        }
    }
}

fn check<T>(r: greysim::error::Result<T>) -> Result<T, GsStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), GsStatus> {
    if p.is_null() {
        set_error(&format!("{name} is null"));
        Err(GsStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `len`). Returns the full message length, 0 when there is no
/// error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gs_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Γ(x).
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_gamma(x: f64, out: *mut f64) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(specfun::gamma(x))?;
        Ok(())
    })
}

/// E_β(x).
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_mittag_leffler(beta: f64, x: f64, out: *mut f64) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(specfun::mittag_leffler(beta, x))?;
        Ok(())
    })
}

/// M-Wright density M_β(τ).
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_m_wright_pdf(beta: f64, tau: f64, out: *mut f64) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(specfun::m_wright_pdf(beta, tau))?;
        Ok(())
    })
}

/// M-Wright distribution function.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_m_wright_cdf(beta: f64, tau: f64, out: *mut f64) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(specfun::m_wright_cdf(beta, tau))?;
        Ok(())
    })
}

/// Fills `out[0..n]` with draws of Y_β from stream `(seed, stream_id)`.
///
/// # Safety
/// `out` must be null or valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn gs_sample_y(beta: f64, seed: u64, stream_id: u64, out: *mut f64, n: usize) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        if !(beta > 0.0 && beta <= 1.0) {
            set_error(&format!("beta = {beta} not in (0, 1]"));
            return Err(GsStatus::Domain);
        }
        let dst = std::slice::from_raw_parts_mut(out, n);
        let mut rng = RngStream::new(seed, stream_id).rng();
        for v in dst {
            *v = sample_y_with(beta, &mut rng);
        }
        Ok(())
    })
}

/// Creates a generator for B_H on the uniform grid of `steps` intervals over
/// `[0, horizon]`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_fbm_new(
    method: GsFbmMethod,
    hurst: f64,
    horizon: f64,
    steps: usize,
    out: *mut *mut GsFbm,
) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        let method = match method {
            GsFbmMethod::Cholesky => FbmMethod::Cholesky,
            GsFbmMethod::Circulant => FbmMethod::Circulant,
        };
        let grid = check(TimeGrid::new(horizon, steps))?;
        let inner = check(FbmGenerator::new(method, hurst, grid))?;
        *out = Box::into_raw(Box::new(GsFbm { inner }));
        Ok(())
    })
}

/// Number of grid points (steps + 1) of one sampled path.
///
/// # Safety
/// `fbm` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_fbm_len(fbm: *const GsFbm) -> usize {
    fbm.as_ref().map_or(0, |f| f.inner.grid().steps() + 1)
}

/// Writes one scalar path, starting at B_H(0) = 0, into `out[0..len]`.
/// `len` must equal [`gs_fbm_len`].
///
/// # Safety
/// `fbm` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gs_fbm_sample(
    fbm: *const GsFbm,
    seed: u64,
    stream_id: u64,
    out: *mut f64,
    len: usize,
) -> GsStatus {
    guard(|| {
        non_null(fbm, "fbm")?;
        non_null(out, "out")?;
        let gen = &(*fbm).inner;
        let expected = gen.grid().steps() + 1;
        if len != expected {
            set_error(&format!("buffer length {len}, path length {expected}"));
            return Err(GsStatus::InvalidInput);
        }
        let path = gen.sample(1, &mut RngStream::new(seed, stream_id).rng());
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(path.values());
        Ok(())
    })
}

/// Releases a generator. Null is ignored.
///
/// # Safety
/// `fbm` must be null or a handle from [`gs_fbm_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_fbm_free(fbm: *mut GsFbm) {
    if !fbm.is_null() {
        drop(Box::from_raw(fbm));
    }
}

/// Density at `z` of x0 + b t + σ B_{α,β}(t) (scalar constant fields).
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gs_mixture_density(
    alpha: f64,
    beta: f64,
    sigma: f64,
    drift: f64,
    x0: f64,
    t: f64,
    z: f64,
    out: *mut f64,
) -> GsStatus {
    guard(|| {
        non_null(out, "out")?;
        let params = check(GreyParams::new(alpha, beta))?;
        let law = check(ConstantFieldLaw::new(params, &[vec![sigma]], &[drift], &[x0], t))?;
        *out = check(law.density(&[z]))?;
        Ok(())
    })
}
