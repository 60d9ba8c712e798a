use std::ffi::{c_char, CStr, CString};
use std::ptr;

use wbasket_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    wb_string_free(s);
    out
}

fn parse(text: &str, p2: i64, chi: i64) -> (*mut WbWeightedBasket, WbStatus) {
    let c = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { wb_weighted_basket_parse(c.as_ptr(), p2, chi, &mut h) };
    (h, st)
}

#[test]
fn k3_plurigenus_index_match_library() {
    let text = "4x(1,2),(1,3),2x(2,5),(5,12)";
    let (h, st) = parse(text, 1, 1);
    assert_eq!(st, WbStatus::Ok);
    let lib = wbasket::WeightedBasket::new(wbasket::Basket::parse(text).unwrap(), 1, 1);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(wb_k3(h, &mut s), WbStatus::Ok);
        assert_eq!(take(s), "1/60");
        for m in 2..=10 {
            assert_eq!(wb_plurigenus(h, m, &mut s), WbStatus::Ok);
            assert_eq!(take(s), lib.plurigenus(m).to_string());
        }
        let mut idx = 0u64;
        assert_eq!(wb_cartier_index(h, &mut idx), WbStatus::Ok);
        assert_eq!(idx, 60);
        assert_eq!(wb_weighted_basket_text(h, &mut s), WbStatus::Ok);
        assert_eq!(take(s), text);
        wb_weighted_basket_free(h);
    }
}

#[test]
fn malformed_basket_reports_parse_error() {
    let (h, st) = parse("4x(1,2", 1, 1);
    assert_eq!(st, WbStatus::ParseError);
    assert!(h.is_null());
    let msg = unsafe { CStr::from_ptr(wb_last_error()) }.to_str().unwrap();
    assert!(!msg.is_empty());
    let (_, st) = parse("(2,4)", 1, 1);
    assert_eq!(st, WbStatus::InvalidPair);
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(wb_weighted_basket_parse(ptr::null(), 1, 1, &mut h), WbStatus::NullPointer);
        let mut s = ptr::null_mut();
        assert_eq!(wb_k3(ptr::null(), &mut s), WbStatus::NullPointer);
        assert_eq!(wb_basket_list_len(ptr::null()), 0);
        wb_weighted_basket_free(ptr::null_mut());
        wb_basket_list_free(ptr::null_mut());
        wb_string_free(ptr::null_mut());
    }
}

#[test]
fn plurigenus_below_two_is_out_of_range() {
    let (h, _) = parse("(1,2)", 1, 1);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(wb_plurigenus(h, 1, &mut s), WbStatus::OutOfRange);
        wb_weighted_basket_free(h);
    }
}

#[test]
fn b5_coefficients_and_infeasible() {
    // pg1 sub-case P5 = P6 = 3
    let p = [1i64, 1, 2, 3, 3];
    let mut c = [0i64; 4];
    let st = unsafe { wb_b5_coefficients(1, p.as_ptr(), ptr::null(), 0, c.as_mut_ptr()) };
    assert_eq!(st, WbStatus::Ok);
    let lib = wbasket::b5::b5_coefficients(&wbasket::b5::PlurigenusData::untailed(1, p)).unwrap();
    assert_eq!(c, lib.coefficients);

    let tail = [7u32];
    let st = unsafe { wb_b5_coefficients(1, p.as_ptr(), tail.as_ptr(), 1, c.as_mut_ptr()) };
    assert_eq!(st, WbStatus::Infeasible);
    let msg = unsafe { CStr::from_ptr(wb_last_error()) }.to_str().unwrap();
    assert!(msg.contains("σ5"), "{msg}");
}

#[test]
fn quantize_up_examples() {
    unsafe {
        let q = CString::new("2/7").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(wb_quantize_up(q.as_ptr(), 10, &mut s), WbStatus::Ok);
        assert_eq!(take(s), "3/10");
        let bad = CString::new("2/").unwrap();
        assert_eq!(wb_quantize_up(bad.as_ptr(), 10, &mut s), WbStatus::ParseError);
        assert_eq!(wb_quantize_up(q.as_ptr(), 0, &mut s), WbStatus::OutOfRange);
    }
}

#[test]
fn descendants_list() {
    let (h, _) = parse("(1,2),(1,3)", 1, 1);
    unsafe {
        let mut l = ptr::null_mut();
        assert_eq!(wb_descendants(h, ptr::null(), 0, &mut l), WbStatus::Ok);
        let texts: Vec<String> = (0..wb_basket_list_len(l))
            .map(|i| {
                let mut s = ptr::null_mut();
                assert_eq!(wb_basket_list_text(l, i, &mut s), WbStatus::Ok);
                take(s)
            })
            .collect();
        assert_eq!(texts, vec!["(1,2),(1,3)", "(2,5)"]);
        let mut s = ptr::null_mut();
        assert_eq!(wb_basket_list_text(l, 99, &mut s), WbStatus::OutOfRange);
        wb_basket_list_free(l);
        wb_weighted_basket_free(h);
    }
}

#[test]
fn status_names_are_static() {
    let s = unsafe { CStr::from_ptr(wb_status_name(WbStatus::Infeasible)) };
    assert_eq!(s.to_str().unwrap(), "infeasible");
}
