//! C ABI over `adk-core`.
//!
//! Objects are opaque heap handles created by `adk_*_new`/`adk_*_parse`
//! style constructors and released with the matching `adk_*_free`. Every
//! fallible call returns an [`AdkStatus`]; on failure the message is
//! available from [`adk_last_error`] on the same thread. Strings returned
//! through `char **` out-parameters are owned by the caller and released
//! with [`adk_string_free`]. Rationals cross the boundary as `"p/q"`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use adk_core::cli::{parse_instance, serialize, Instance};
use adk_core::diffusion::{exact_spread, live_edge_spread, monte_carlo_spread, DEFAULT_BUDGET};
use adk_core::rational::{self, ratio};
use adk_core::setfn::{difference, is_adk, Order};
use adk_core::transforms::{gt_to_triggering, triggering_to_gt};
use adk_core::{Error, GroundSet, SetFunction};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Budget = 4,
    NotAdInfinity = 5,
    NotDag = 6,
    Distribution = 7,
    Panic = 8,
}

/// Target model of [`adk_instance_convert`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdkModel {
    Threshold = 0,
    Triggering = 1,
}

/// Outcome of [`adk_setfn_check`]. The witness fields are zero when `holds`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AdkCheck {
    pub holds: bool,
    /// Largest difference order actually examined.
    pub checked_k: u32,
    pub witness_s: u32,
    pub witness_a: u32,
}

/// Opaque set function over a ground set of at most 20 elements.
pub struct AdkSetFunction(SetFunction);

/// Opaque threshold or triggering instance.
pub struct AdkInstance(Instance);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> AdkStatus {
    match e {
        Error::Parse { .. } => AdkStatus::Parse,
        Error::Budget { .. } => AdkStatus::Budget,
        Error::NotAdInfinity { .. } => AdkStatus::NotAdInfinity,
        Error::NotDag { .. } => AdkStatus::NotDag,
        Error::Distribution { .. } => AdkStatus::Distribution,
        _ => AdkStatus::InvalidArgument,
    }
}

struct Failure(AdkStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AdkStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `body`, recording any failure or panic as the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AdkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AdkStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            AdkStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: non-null handles come from this library and are live per the caller's contract.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: `out` is non-null and writable per the caller's contract.
    unsafe { out.write(value) };
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn budget_or_default(budget: u64) -> u128 {
    if budget == 0 {
        DEFAULT_BUDGET
    } else {
        u128::from(budget)
    }
}

/// Most recent error message on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn adk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn adk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adk_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from `CString::into_raw` in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Builds a set function from `2^n` values `numerators[i] / denominators[i]`,
/// indexed by subset bitmask.
///
/// # Safety
/// Both arrays must hold `2^n` readable elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adk_setfn_new(
    n: usize,
    numerators: *const i64,
    denominators: *const i64,
    out: *mut *mut AdkSetFunction,
) -> AdkStatus {
    guard(|| {
        if numerators.is_null() {
            return Err(null("numerators"));
        }
        if denominators.is_null() {
            return Err(null("denominators"));
        }
        let ground = GroundSet::anonymous(n)?;
        let len = 1usize << n;
        // SAFETY: the caller guarantees `len` readable elements in each array.
        let (nums, dens) = unsafe {
            (
                std::slice::from_raw_parts(numerators, len),
                std::slice::from_raw_parts(denominators, len),
            )
        };
        if let Some(i) = dens.iter().position(|&d| d == 0) {
            return Err(Failure(
                AdkStatus::InvalidArgument,
                format!("denominator {i} is zero"),
            ));
        }
        let values = nums.iter().zip(dens).map(|(&p, &q)| ratio(p, q)).collect();
        let f = SetFunction::new(ground, values)?;
        // SAFETY: forwarded caller contract on `out`.
        unsafe { write_out(out, Box::into_raw(Box::new(AdkSetFunction(f))), "out") }
    })
}

/// # Safety
/// `f` must be null or a handle from [`adk_setfn_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adk_setfn_free(f: *mut AdkSetFunction) {
    if !f.is_null() {
        // SAFETY: `f` came from `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(f) });
    }
}

/// Ground set size, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adk_setfn_ground_size(f: *const AdkSetFunction) -> usize {
    // SAFETY: forwarded caller contract.
    unsafe { f.as_ref() }.map_or(0, |f| f.0.n())
}

/// Writes the difference of `f` over `A` at `S` as a `"p/q"` string to `out`; zero when `A` and `S` overlap.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adk_setfn_difference(
    f: *const AdkSetFunction,
    a: u32,
    s: u32,
    out: *mut *mut c_char,
) -> AdkStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let f = unsafe { borrow(f, "f") }?;
        let full = f.0.ground().full_mask();
        if (a | s) & !full != 0 {
            return Err(Failure(
                AdkStatus::InvalidArgument,
                format!("mask outside ground set {full:#b}"),
            ));
        }
        let value = rational::format(&difference(&f.0, a, s));
        // SAFETY: forwarded caller contract on `out`.
        unsafe { write_out(out, into_c_string(value), "out") }
    })
}

/// Checks the alternating-difference condition up to order `k`; `k = 0`
/// means every order.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adk_setfn_check(f: *const AdkSetFunction, k: u32, out: *mut AdkCheck) -> AdkStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let f = unsafe { borrow(f, "f") }?;
        let order = if k == 0 {
            Order::Infinity
        } else {
            Order::Finite(k as usize)
        };
        let r = is_adk(&f.0, order);
        let (witness_s, witness_a) = r.witness.map_or((0, 0), |w| (w.s, w.a));
        let check = AdkCheck {
            holds: r.holds,
            checked_k: r.checked_k as u32,
            witness_s,
            witness_a,
        };
        // SAFETY: forwarded caller contract on `out`.
        unsafe { write_out(out, check, "out") }
    })
}

/// Parses an instance in the text file format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adk_instance_parse(text: *const c_char, out: *mut *mut AdkInstance) -> AdkStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        // SAFETY: the caller guarantees a NUL-terminated string.
        let text = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|_| Failure(AdkStatus::InvalidArgument, "text is not UTF-8".into()))?;
        let inst = parse_instance(text)?;
        // SAFETY: forwarded caller contract on `out`.
        unsafe { write_out(out, Box::into_raw(Box::new(AdkInstance(inst))), "out") }
    })
}

/// # Safety
/// `inst` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adk_instance_free(inst: *mut AdkInstance) {
    if !inst.is_null() {
        // SAFETY: `inst` came from `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn adk_instance_node_count(inst: *const AdkInstance) -> usize {
    // SAFETY: forwarded caller contract.
    unsafe { inst.as_ref() }.map_or(0, |i| i.0.graph().n())
}

/// Model of the instance.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adk_instance_model(inst: *const AdkInstance, out: *mut AdkModel) -> AdkStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let inst = unsafe { borrow(inst, "inst") }?;
        let model = match inst.0 {
            Instance::Gt(_) => AdkModel::Threshold,
            Instance::Triggering(_) => AdkModel::Triggering,
        };
        // SAFETY: forwarded caller contract on `out`.
        unsafe { write_out(out, model, "out") }
    })
}

/// Canonical text form of the instance.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adk_instance_serialize(
    inst: *const AdkInstance,
    out: *mut *mut c_char,
) -> AdkStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let inst = unsafe { borrow(inst, "inst") }?;
        // SAFETY: forwarded caller contract on `out`.
        unsafe { write_out(out, into_c_string(serialize(&inst.0)), "out") }
    })
}

/// Converts to the requested model as a new handle. Threshold to triggering
/// fails with [`AdkStatus::NotAdInfinity`] when no equivalent exists.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adk_instance_convert(
    inst: *const AdkInstance,
    to: AdkModel,
    out: *mut *mut AdkInstance,
) -> AdkStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let inst = unsafe { borrow(inst, "inst") }?;
        let converted = match (&inst.0, to) {
            (Instance::Gt(g), AdkModel::Triggering) => Instance::Triggering(gt_to_triggering(g)?),
            (Instance::Triggering(t), AdkModel::Threshold) => Instance::Gt(triggering_to_gt(t)),
            (same, _) => same.clone(),
        };
        // SAFETY: forwarded caller contract on `out`.
        unsafe { write_out(out, Box::into_raw(Box::new(AdkInstance(converted))), "out") }
    })
}

/// Exact expected spread of the seed bitmask as a `"p/q"` string. `budget`
/// caps the enumeration size; 0 selects the default.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adk_exact_spread(
    inst: *const AdkInstance,
    seeds: u64,
    budget: u64,
    out: *mut *mut c_char,
) -> AdkStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let inst = unsafe { borrow(inst, "inst") }?;
        let graph = inst.0.graph();
        if seeds & !graph.full_mask() != 0 {
            return Err(Failure(
                AdkStatus::InvalidArgument,
                format!("seed mask {seeds:#b} names missing nodes"),
            ));
        }
        let budget = budget_or_default(budget);
        let spread = match &inst.0 {
            Instance::Gt(g) => exact_spread(g, seeds, budget)?,
            Instance::Triggering(t) => live_edge_spread(t, seeds, budget)?,
        };
        // SAFETY: forwarded caller contract on `out`.
        unsafe { write_out(out, into_c_string(rational::format(&spread.sigma)), "out") }
    })
}

/// Monte Carlo estimate of the spread; deterministic in `seed`.
///
/// # Safety
/// `inst` must be a live handle; `mean` and `std_error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn adk_monte_carlo_spread(
    inst: *const AdkInstance,
    seeds: u64,
    trials: u64,
    seed: u64,
    mean: *mut f64,
    std_error: *mut f64,
) -> AdkStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let inst = unsafe { borrow(inst, "inst") }?;
        if mean.is_null() || std_error.is_null() {
            return Err(null("mean/std_error"));
        }
        let converted;
        let gt = match &inst.0 {
            Instance::Gt(g) => g,
            Instance::Triggering(t) => {
                converted = triggering_to_gt(t);
                &converted
            }
        };
        let est = monte_carlo_spread(gt, seeds, trials, seed)?;
        // SAFETY: both pointers checked non-null above.
        unsafe {
            write_out(mean, est.mean, "mean")?;
            write_out(std_error, est.stderr, "std_error")
        }
    })
}
