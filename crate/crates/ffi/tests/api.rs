use std::ffi::{c_char, CStr, CString};
use std::ptr;

use adk_ffi::*;

const NONSUB: &str =
    "model gt\nn 3\nnodes a b v\nedge a v\nedge b v\ntable v\n  {} 0\n  {a} 1/4\n  {b} 1/4\n  {a,b} 1\n";
const TWO_NODE: &str = "model gt\nn 2\nnodes u v\nedge u v\ntable v\n  {} 0\n  {u} 1/2\n";

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { adk_string_free(s) };
    out
}

fn last_error() -> String {
    let p = adk_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn parse(text: &str) -> *mut AdkInstance {
    let c = CString::new(text).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(
        unsafe { adk_instance_parse(c.as_ptr(), &mut inst) },
        AdkStatus::Ok
    );
    inst
}

fn setfn(nums: &[i64], dens: &[i64]) -> *mut AdkSetFunction {
    let n = nums.len().trailing_zeros() as usize;
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { adk_setfn_new(n, nums.as_ptr(), dens.as_ptr(), &mut f) },
        AdkStatus::Ok
    );
    f
}

#[test]
fn nonsubmodular_function_fails_order_two() {
    // f = (0, 1/4, 1/4, 1)
    let f = setfn(&[0, 1, 1, 1], &[1, 4, 4, 1]);
    assert_eq!(unsafe { adk_setfn_ground_size(f) }, 2);
    let mut check = AdkCheck::default();
    assert_eq!(unsafe { adk_setfn_check(f, 1, &mut check) }, AdkStatus::Ok);
    assert!(check.holds);
    assert_eq!(unsafe { adk_setfn_check(f, 0, &mut check) }, AdkStatus::Ok);
    assert_eq!(
        check,
        AdkCheck {
            holds: false,
            checked_k: 2,
            witness_s: 0,
            witness_a: 0b11
        }
    );
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { adk_setfn_difference(f, 0b11, 0, &mut d) }, AdkStatus::Ok);
    assert_eq!(take(d), "1/2");
    assert_eq!(
        unsafe { adk_setfn_difference(f, 0b1, 0b1, &mut d) },
        AdkStatus::Ok
    );
    assert_eq!(take(d), "0/1");
    assert_eq!(
        unsafe { adk_setfn_difference(f, 0b100, 0, &mut d) },
        AdkStatus::InvalidArgument
    );
    unsafe { adk_setfn_free(f) };
}

#[test]
fn invalid_arguments_report_status_and_message() {
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { adk_setfn_new(1, ptr::null(), ptr::null(), &mut f) },
        AdkStatus::NullPointer
    );
    assert!(last_error().contains("numerators"));
    let (nums, dens) = ([0i64, 1], [1i64, 0]);
    assert_eq!(
        unsafe { adk_setfn_new(1, nums.as_ptr(), dens.as_ptr(), &mut f) },
        AdkStatus::InvalidArgument
    );
    assert!(last_error().contains("denominator 1"));
    assert_eq!(
        unsafe { adk_setfn_new(21, nums.as_ptr(), dens.as_ptr(), &mut f) },
        AdkStatus::InvalidArgument
    );
    let mut check = AdkCheck::default();
    assert_eq!(
        unsafe { adk_setfn_check(ptr::null(), 1, &mut check) },
        AdkStatus::NullPointer
    );
    assert_eq!(unsafe { adk_setfn_ground_size(ptr::null()) }, 0);
    unsafe { adk_setfn_free(ptr::null_mut()) };
    unsafe { adk_instance_free(ptr::null_mut()) };
    unsafe { adk_string_free(ptr::null_mut()) };
}

#[test]
fn parse_errors_carry_positions() {
    let c = CString::new("model gt\nn 2\nnodes u v\nedge u w\n").unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(
        unsafe { adk_instance_parse(c.as_ptr(), &mut inst) },
        AdkStatus::Parse
    );
    assert!(inst.is_null());
    assert!(last_error().starts_with("line 4, column"), "{}", last_error());
}

#[test]
fn exact_and_sampled_spread() {
    let inst = parse(TWO_NODE);
    assert_eq!(unsafe { adk_instance_node_count(inst) }, 2);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { adk_exact_spread(inst, 0b01, 0, &mut s) }, AdkStatus::Ok);
    assert_eq!(take(s), "3/2");
    assert_eq!(
        unsafe { adk_exact_spread(inst, 0b100, 0, &mut s) },
        AdkStatus::InvalidArgument
    );
    let (mut m1, mut e1, mut m2, mut e2) = (0.0, 0.0, 0.0, 0.0);
    assert_eq!(
        unsafe { adk_monte_carlo_spread(inst, 0b01, 20_000, 5, &mut m1, &mut e1) },
        AdkStatus::Ok
    );
    assert_eq!(
        unsafe { adk_monte_carlo_spread(inst, 0b01, 20_000, 5, &mut m2, &mut e2) },
        AdkStatus::Ok
    );
    assert_eq!((m1.to_bits(), e1.to_bits()), (m2.to_bits(), e2.to_bits()));
    assert!((m1 - 1.5).abs() < 4.0 * e1, "{m1} {e1}");
    assert_eq!(
        unsafe { adk_monte_carlo_spread(inst, 0b01, 0, 5, &mut m1, &mut e1) },
        AdkStatus::InvalidArgument
    );
    unsafe { adk_instance_free(inst) };
}

#[test]
fn budget_refusal_is_distinct() {
    let inst = parse(NONSUB);
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { adk_exact_spread(inst, 0b001, 1, &mut s) },
        AdkStatus::Budget
    );
    assert!(last_error().contains("budget"));
    unsafe { adk_instance_free(inst) };
}

#[test]
fn conversion_round_trips_and_rejects_non_ad_infinity() {
    let inst = parse(TWO_NODE);
    let mut tr = ptr::null_mut();
    assert_eq!(
        unsafe { adk_instance_convert(inst, AdkModel::Triggering, &mut tr) },
        AdkStatus::Ok
    );
    let mut model = AdkModel::Threshold;
    assert_eq!(unsafe { adk_instance_model(tr, &mut model) }, AdkStatus::Ok);
    assert_eq!(model, AdkModel::Triggering);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { adk_exact_spread(tr, 0b01, 0, &mut s) }, AdkStatus::Ok);
    assert_eq!(take(s), "3/2");
    let mut back = ptr::null_mut();
    assert_eq!(
        unsafe { adk_instance_convert(tr, AdkModel::Threshold, &mut back) },
        AdkStatus::Ok
    );
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { adk_instance_serialize(inst, &mut a) }, AdkStatus::Ok);
    assert_eq!(unsafe { adk_instance_serialize(back, &mut b) }, AdkStatus::Ok);
    assert_eq!(take(a), take(b));
    for h in [inst, tr, back] {
        unsafe { adk_instance_free(h) };
    }

    let nonsub = parse(NONSUB);
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { adk_instance_convert(nonsub, AdkModel::Triggering, &mut out) },
        AdkStatus::NotAdInfinity
    );
    assert!(out.is_null());
    assert!(last_error().contains("coefficient -1/2"), "{}", last_error());
    unsafe { adk_instance_free(nonsub) };
}

#[test]
fn errors_are_per_thread() {
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { adk_setfn_new(1, ptr::null(), ptr::null(), &mut f) },
        AdkStatus::NullPointer
    );
    std::thread::spawn(|| assert!(adk_last_error().is_null()))
        .join()
        .unwrap();
    assert!(!adk_last_error().is_null());
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(adk_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
