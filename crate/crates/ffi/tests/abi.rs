use std::ffi::CStr;
use std::ptr;

use mutable_rank_select_ffi::*;

fn example() -> *mut MrsBitmap {
    let word: u64 = "01101101010101110".chars().enumerate().map(|(i, c)| ((c == '1') as u64) << i).sum();
    let mut bm = ptr::null_mut();
    let s = unsafe { mrs_bitmap_from_words(&word, 1, 17, 256, MRS_INDEX_WIDE, &mut bm) };
    assert_eq!(s, MrsStatus::Ok);
    bm
}

#[test]
fn worked_example() {
    let bm = example();
    let (mut r, mut s) = (0u64, 0u64);
    unsafe {
        assert_eq!(mrs_bitmap_len(bm), 17);
        assert_eq!(mrs_bitmap_ones(bm), 10);
        assert_eq!(mrs_bitmap_rank(bm, 7, &mut r), MrsStatus::Ok);
        assert_eq!(mrs_bitmap_select(bm, 7, &mut s), MrsStatus::Ok);
        assert_eq!((r, s), (5, 13));
        assert_eq!(mrs_bitmap_flip(bm, 3), MrsStatus::Ok);
        assert_eq!(mrs_bitmap_flip(bm, 6), MrsStatus::Ok);
        mrs_bitmap_rank(bm, 7, &mut r);
        mrs_bitmap_select(bm, 7, &mut s);
        assert_eq!((r, s), (7, 9));
        let mut bit = false;
        assert_eq!(mrs_bitmap_access(bm, 3, &mut bit), MrsStatus::Ok);
        assert!(bit);
        mrs_bitmap_free(bm);
    }
}

#[test]
fn error_codes() {
    let bm = example();
    let mut out = 0u64;
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(mrs_bitmap_rank(bm, 17, &mut out), MrsStatus::OutOfRange);
        assert_eq!(mrs_bitmap_select(bm, 10, &mut out), MrsStatus::SelectOutOfRange);
        assert_eq!(mrs_bitmap_flip(bm, 99), MrsStatus::OutOfRange);
        assert_eq!(mrs_bitmap_rank(ptr::null(), 0, &mut out), MrsStatus::NullPointer);
        assert_eq!(mrs_bitmap_rank(bm, 0, ptr::null_mut()), MrsStatus::NullPointer);
        assert_eq!(mrs_bitmap_new(100, 128, MRS_INDEX_WIDE, &mut h), MrsStatus::UnsupportedBlock);
        assert_eq!(mrs_bitmap_new(100, 256, 9, &mut h), MrsStatus::InvalidArgument);
        assert_eq!(mrs_bitmap_new(0, 256, MRS_INDEX_WIDE, &mut h), MrsStatus::Capacity);
        assert_eq!(mrs_bitmap_new(1 << 40, 64, MRS_INDEX_FENWICK, &mut h), MrsStatus::Capacity);
        let dirty = u64::MAX;
        assert_eq!(mrs_bitmap_from_words(&dirty, 1, 10, 64, MRS_INDEX_SCALAR, &mut h), MrsStatus::Format);
        assert!(h.is_null());
        assert_eq!(mrs_bitmap_len(ptr::null()), 0);
        mrs_bitmap_free(ptr::null_mut());
        mrs_bitmap_free(bm);
    }
}

#[test]
fn serialize_round_trip() {
    let bm = example();
    unsafe {
        let mut size = 0usize;
        assert_eq!(mrs_bitmap_serialize(bm, ptr::null_mut(), 0, &mut size), MrsStatus::Ok);
        assert_eq!(size, 28);
        let mut small = [0u8; 10];
        assert_eq!(mrs_bitmap_serialize(bm, small.as_mut_ptr(), 10, &mut size), MrsStatus::BufferTooSmall);
        let mut buf = vec![0u8; size];
        assert_eq!(mrs_bitmap_serialize(bm, buf.as_mut_ptr(), buf.len(), &mut size), MrsStatus::Ok);
        assert_eq!(&buf[..4], b"MRSB");
        let mut copy = ptr::null_mut();
        assert_eq!(mrs_bitmap_deserialize(buf.as_ptr(), buf.len(), &mut copy), MrsStatus::Ok);
        let mut s = 0;
        mrs_bitmap_select(copy, 7, &mut s);
        assert_eq!(s, 13);
        assert_eq!(mrs_bitmap_deserialize(buf.as_ptr(), 5, &mut copy), MrsStatus::Format);
        mrs_bitmap_free(copy);
        mrs_bitmap_free(bm);
    }
}

#[test]
fn every_config_from_new() {
    for block in [64, 256, 512] {
        for index in [MRS_INDEX_SCALAR, MRS_INDEX_NARROW, MRS_INDEX_WIDE, MRS_INDEX_FENWICK] {
            let mut bm = ptr::null_mut();
            unsafe {
                assert_eq!(mrs_bitmap_new(5000, block, index, &mut bm), MrsStatus::Ok);
                for i in (0..5000).step_by(7) {
                    assert_eq!(mrs_bitmap_flip(bm, i), MrsStatus::Ok);
                }
                let (mut r, mut s) = (0, 0);
                mrs_bitmap_rank(bm, 4999, &mut r);
                assert_eq!(r, 715);
                mrs_bitmap_select(bm, 100, &mut s);
                assert_eq!(s, 700);
                mrs_bitmap_free(bm);
            }
        }
    }
}

#[test]
fn messages() {
    for code in 0..=11 {
        let msg = unsafe { CStr::from_ptr(mrs_status_message(code)) };
        assert!(!msg.to_bytes().is_empty());
    }
    let ok = unsafe { CStr::from_ptr(mrs_status_message(MrsStatus::Ok as i32)) };
    assert_eq!(ok.to_str().unwrap(), "ok");
}
