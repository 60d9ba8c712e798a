//! C ABI over the `wbasket` engine.
//!
//! Conventions:
//! * every fallible call returns a [`WbStatus`]; results go through out-pointers;
//! * rationals cross the boundary as `p/q` strings owned by the library and
//!   released with [`wb_string_free`];
//! * weighted baskets and basket lists are opaque handles with their own
//!   `_free` functions; passing NULL to any `_free` is a no-op;
//! * after a non-OK status, [`wb_last_error`] describes the failure on the
//!   calling thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wbasket::b5::{b5_coefficients, PlurigenusData};
use wbasket::bounds::quantize_up;
use wbasket::packing::{descendants, DescendantFilter};
use wbasket::{Basket, Error, Rational, WeightedBasket};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidPair = 4,
    Infeasible = 5,
    OutOfRange = 6,
    Config = 7,
    Panic = 8,
}

/// Opaque weighted basket `(basket, P2, χ)`.
pub struct WbWeightedBasket(WeightedBasket);

/// Opaque list of weighted baskets.
pub struct WbBasketList(Vec<WeightedBasket>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> WbStatus {
    match e {
        Error::Parse { .. } => WbStatus::ParseError,
        Error::InvalidPair { .. } => WbStatus::InvalidPair,
        Error::Infeasible { .. } => WbStatus::Infeasible,
        Error::OutOfRange(_) => WbStatus::OutOfRange,
        Error::Config(_) => WbStatus::Config,
    }
}

type Outcome = Result<(), WbStatus>;

fn fail(status: WbStatus, msg: impl Into<String>) -> Outcome {
    set_error(msg);
    Err(status)
}

fn lib_err(e: Error) -> WbStatus {
    set_error(e.to_string());
    status_of(&e)
}

/// Runs `f`, turning panics into [`WbStatus::Panic`].
fn guard(f: impl FnOnce() -> Outcome) -> WbStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WbStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            WbStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, WbStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(WbStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        WbStatus::InvalidUtf8
    })
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Outcome {
    if out.is_null() {
        return fail(WbStatus::NullPointer, "null output pointer");
    }
    *out = CString::new(s).expect("no interior NUL").into_raw();
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, WbStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle");
        WbStatus::NullPointer
    })
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library from this thread.
#[no_mangle]
pub extern "C" fn wb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn wb_status_name(status: WbStatus) -> *const c_char {
    let s: &'static CStr = match status {
        WbStatus::Ok => c"ok",
        WbStatus::NullPointer => c"null pointer",
        WbStatus::InvalidUtf8 => c"invalid utf-8",
        WbStatus::ParseError => c"parse error",
        WbStatus::InvalidPair => c"invalid pair",
        WbStatus::Infeasible => c"infeasible",
        WbStatus::OutOfRange => c"out of range",
        WbStatus::Config => c"invalid configuration",
        WbStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn wb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses basket text such as `7x(1,2),2x(2,5)` into a weighted basket.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_weighted_basket_parse(
    text: *const c_char,
    p2: i64,
    chi: i64,
    out: *mut *mut WbWeightedBasket,
) -> WbStatus {
    guard(|| {
        if out.is_null() {
            return fail(WbStatus::NullPointer, "null output pointer");
        }
        let basket = Basket::parse(read_str(text)?).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(WbWeightedBasket(WeightedBasket::new(basket, p2, chi))));
        Ok(())
    })
}

/// # Safety
/// `wb` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn wb_weighted_basket_free(wb: *mut WbWeightedBasket) {
    if !wb.is_null() {
        drop(Box::from_raw(wb));
    }
}

/// Canonical text of the basket part.
///
/// # Safety
/// `wb` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_weighted_basket_text(wb: *const WbWeightedBasket, out: *mut *mut c_char) -> WbStatus {
    guard(|| write_string(out, handle(wb)?.0.basket.to_string()))
}

/// `K³` as a `p/q` string.
///
/// # Safety
/// `wb` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_k3(wb: *const WbWeightedBasket, out: *mut *mut c_char) -> WbStatus {
    guard(|| write_string(out, handle(wb)?.0.k3().to_string()))
}

/// `χ_m` for `m ≥ 2` as a `p/q` string.
///
/// # Safety
/// `wb` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_plurigenus(wb: *const WbWeightedBasket, m: u32, out: *mut *mut c_char) -> WbStatus {
    guard(|| {
        let wb = handle(wb)?;
        if m < 2 {
            return fail(WbStatus::OutOfRange, "plurigenus needs m >= 2");
        }
        write_string(out, wb.0.plurigenus(m).to_string())
    })
}

/// lcm of the local indices.
///
/// # Safety
/// `wb` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_cartier_index(wb: *const WbWeightedBasket, out: *mut u64) -> WbStatus {
    guard(|| {
        let wb = handle(wb)?;
        if out.is_null() {
            return fail(WbStatus::NullPointer, "null output pointer");
        }
        *out = wb.0.cartier_index();
        Ok(())
    })
}

/// Head multiplicities `n(1,2), n(2,5), n(1,3), n(1,4)` of `B^(5)` for
/// `p = [P2, P3, P4, P5, P6]`, with `tail_len` tail indices `r ≥ 5`
/// (`σ5 = tail_len`). `tail` may be NULL when `tail_len` is 0.
///
/// # Safety
/// `p` must point to 5 values, `tail` to `tail_len` values and
/// `coefficients` to room for 4.
#[no_mangle]
pub unsafe extern "C" fn wb_b5_coefficients(
    chi: i64,
    p: *const i64,
    tail: *const u32,
    tail_len: usize,
    coefficients: *mut i64,
) -> WbStatus {
    guard(|| {
        if p.is_null() || coefficients.is_null() || (tail.is_null() && tail_len > 0) {
            return fail(WbStatus::NullPointer, "null array argument");
        }
        let p: [i64; 5] = std::slice::from_raw_parts(p, 5).try_into().expect("length 5");
        let mut d = PlurigenusData::untailed(chi, p);
        if tail_len > 0 {
            for &r in std::slice::from_raw_parts(tail, tail_len) {
                *d.tail.entry(r).or_insert(0) += 1;
            }
        }
        d.sigma5 = tail_len as i64;
        let res = b5_coefficients(&d).map_err(lib_err)?;
        std::slice::from_raw_parts_mut(coefficients, 4).copy_from_slice(&res.coefficients);
        Ok(())
    })
}

/// `⌈q·r⌉/r` for a rational string `q`.
///
/// # Safety
/// `q` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_quantize_up(q: *const c_char, r: u64, out: *mut *mut c_char) -> WbStatus {
    guard(|| {
        let q: Rational = read_str(q)?
            .parse()
            .map_err(|e: wbasket::rational::ParseRationalError| {
                set_error(e.to_string());
                WbStatus::ParseError
            })?;
        if r == 0 {
            return fail(WbStatus::OutOfRange, "grid denominator must be positive");
        }
        write_string(out, quantize_up(&q, r).to_string())
    })
}

/// Packing descendants with an optional `K³` floor (NULL for none) and
/// `χ_m` preservation for `3 ≤ m ≤ preserve_pm_upto` (0 for none).
///
/// # Safety
/// `wb` must be a live handle, `k3_floor` NULL or a NUL-terminated string,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wb_descendants(
    wb: *const WbWeightedBasket,
    k3_floor: *const c_char,
    preserve_pm_upto: u32,
    out: *mut *mut WbBasketList,
) -> WbStatus {
    guard(|| {
        let wb = handle(wb)?;
        if out.is_null() {
            return fail(WbStatus::NullPointer, "null output pointer");
        }
        let floor = if k3_floor.is_null() {
            None
        } else {
            Some(read_str(k3_floor)?.parse::<Rational>().map_err(|e| {
                set_error(e.to_string());
                WbStatus::ParseError
            })?)
        };
        let f = DescendantFilter {
            k3_floor: floor,
            preserve_pm_upto: (preserve_pm_upto > 0).then_some(preserve_pm_upto),
            ..Default::default()
        };
        *out = Box::into_raw(Box::new(WbBasketList(descendants(&wb.0, &f, None))));
        Ok(())
    })
}

/// Number of entries; 0 for NULL.
///
/// # Safety
/// `list` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wb_basket_list_len(list: *const WbBasketList) -> usize {
    list.as_ref().map_or(0, |l| l.0.len())
}

/// Canonical basket text of entry `i`.
///
/// # Safety
/// `list` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_basket_list_text(list: *const WbBasketList, i: usize, out: *mut *mut c_char) -> WbStatus {
    guard(|| {
        let l = handle(list)?;
        match l.0.get(i) {
            Some(wb) => write_string(out, wb.basket.to_string()),
            None => fail(WbStatus::OutOfRange, format!("index {i} out of range")),
        }
    })
}

/// # Safety
/// `list` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn wb_basket_list_free(list: *mut WbBasketList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}
