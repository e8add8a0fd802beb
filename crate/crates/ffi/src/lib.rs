//! C ABI over [`mutable_rank_select::MutableBitmap`].
//!
//! Every function returns an [`MrsStatus`] and writes its result through an
//! out-pointer, except the infallible getters. Handles come from
//! `mrs_bitmap_new`, `mrs_bitmap_from_words` or `mrs_bitmap_deserialize` and
//! are released with `mrs_bitmap_free`. A handle may be shared by readers
//! across threads; `mrs_bitmap_flip` needs exclusive access.
//!
//! Panics never cross the boundary: they are caught and reported as
//! `MRS_STATUS_PANIC`.

use std::ffi::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use mutable_rank_select::format::HEADER_LEN;
use mutable_rank_select::{BitmapConfig, BlockBits, Error, IndexKind, MutableBitmap};

/// Opaque bitmap handle.
pub struct MrsBitmap(MutableBitmap);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MrsStatus {
    Ok = 0,
    NullPointer = 1,
    OutOfRange = 2,
    SelectOutOfRange = 3,
    Capacity = 4,
    UnsupportedBlock = 5,
    Domain = 6,
    Format = 7,
    InvalidArgument = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

pub const MRS_INDEX_SCALAR: u32 = 0;
pub const MRS_INDEX_NARROW: u32 = 1;
pub const MRS_INDEX_WIDE: u32 = 2;
pub const MRS_INDEX_FENWICK: u32 = 3;

impl From<&Error> for MrsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::UnsupportedBlockSize(_) => MrsStatus::UnsupportedBlock,
            Error::Capacity { .. } => MrsStatus::Capacity,
            Error::Domain { .. } => MrsStatus::Domain,
            Error::OutOfRange { .. } => MrsStatus::OutOfRange,
            Error::SelectOutOfRange { .. } => MrsStatus::SelectOutOfRange,
            Error::Format(_) => MrsStatus::Format,
            Error::UnknownName { .. } => MrsStatus::InvalidArgument,
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), MrsStatus>) -> MrsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MrsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => MrsStatus::Panic,
    }
}

fn lift<T>(r: mutable_rank_select::Result<T>) -> Result<T, MrsStatus> {
    r.map_err(|e| MrsStatus::from(&e))
}

fn config(block_bits: u32, index: u32) -> Result<BitmapConfig, MrsStatus> {
    let block = lift(BlockBits::new(block_bits as u64))?;
    let index = *IndexKind::ALL.get(index as usize).ok_or(MrsStatus::InvalidArgument)?;
    Ok(BitmapConfig::new(block, index))
}

unsafe fn handle<'a>(bm: *const MrsBitmap) -> Result<&'a MutableBitmap, MrsStatus> {
    bm.as_ref().map(|b| &b.0).ok_or(MrsStatus::NullPointer)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), MrsStatus> {
    if out.is_null() {
        return Err(MrsStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

fn boxed(bm: MutableBitmap) -> *mut MrsBitmap {
    Box::into_raw(Box::new(MrsBitmap(bm)))
}

/// Creates an all-zero bitmap of `len` bits. `block_bits` is 64, 256 or 512;
/// `index` is one of the `MRS_INDEX_*` constants.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_new(len: u64, block_bits: u32, index: u32, out: *mut *mut MrsBitmap) -> MrsStatus {
    guard(|| {
        if out.is_null() {
            return Err(MrsStatus::NullPointer);
        }
        let bm = lift(MutableBitmap::new(len, config(block_bits, index)?))?;
        put(out, boxed(bm))
    })
}

/// Creates a bitmap of `len` bits from `ceil(len / 64)` little-endian-bit
/// words: bit `i` is bit `i % 64` of `words[i / 64]`. Bits past `len` in the
/// last word must be zero.
///
/// # Safety
/// `words` must point to `n_words` readable words; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_from_words(
    words: *const u64,
    n_words: usize,
    len: u64,
    block_bits: u32,
    index: u32,
    out: *mut *mut MrsBitmap,
) -> MrsStatus {
    guard(|| {
        if out.is_null() || (words.is_null() && n_words > 0) {
            return Err(MrsStatus::NullPointer);
        }
        let words = if n_words == 0 { &[][..] } else { slice::from_raw_parts(words, n_words) };
        let bm = lift(MutableBitmap::from_words(words, len, config(block_bits, index)?))?;
        put(out, boxed(bm))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `bm` must be null or a live handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_free(bm: *mut MrsBitmap) {
    if !bm.is_null() {
        drop(Box::from_raw(bm));
    }
}

/// Number of bits; 0 for a null handle.
///
/// # Safety
/// `bm` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_len(bm: *const MrsBitmap) -> u64 {
    handle(bm).map_or(0, |b| b.len())
}

/// Number of set bits; 0 for a null handle.
///
/// # Safety
/// `bm` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_ones(bm: *const MrsBitmap) -> u64 {
    handle(bm).map_or(0, |b| b.ones())
}

/// # Safety
/// `bm` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_access(bm: *const MrsBitmap, i: u64, out: *mut bool) -> MrsStatus {
    guard(|| put(out, lift(handle(bm)?.access(i))?))
}

/// Toggles bit `i`.
///
/// # Safety
/// `bm` must be a live handle not accessed concurrently.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_flip(bm: *mut MrsBitmap, i: u64) -> MrsStatus {
    guard(|| {
        let b = bm.as_mut().ok_or(MrsStatus::NullPointer)?;
        lift(b.0.flip(i))
    })
}

/// Number of set bits in positions `0..=i`.
///
/// # Safety
/// `bm` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_rank(bm: *const MrsBitmap, i: u64, out: *mut u64) -> MrsStatus {
    guard(|| put(out, lift(handle(bm)?.rank(i))?))
}

/// Position of the `(k+1)`-th set bit.
///
/// # Safety
/// `bm` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_select(bm: *const MrsBitmap, k: u64, out: *mut u64) -> MrsStatus {
    guard(|| put(out, lift(handle(bm)?.select(k))?))
}

/// Writes the binary file image into `buf`. `*written` always receives the
/// full image size, so a call with `buf = NULL, cap = 0` queries it;
/// `MRS_STATUS_BUFFER_TOO_SMALL` is returned when `cap` is short.
///
/// # Safety
/// `bm` must be a live handle; `buf` must be null or valid for `cap` bytes
/// of writes; `written` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_serialize(
    bm: *const MrsBitmap,
    buf: *mut u8,
    cap: usize,
    written: *mut usize,
) -> MrsStatus {
    guard(|| {
        let b = handle(bm)?;
        let size = HEADER_LEN + b.words().len() * 8;
        put(written, size)?;
        if buf.is_null() && cap == 0 {
            return Ok(());
        }
        if buf.is_null() {
            return Err(MrsStatus::NullPointer);
        }
        if cap < size {
            return Err(MrsStatus::BufferTooSmall);
        }
        let bytes = b.to_bytes();
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        Ok(())
    })
}

/// Rebuilds a bitmap from a file image written by `mrs_bitmap_serialize`.
///
/// # Safety
/// `buf` must point to `len` readable bytes; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mrs_bitmap_deserialize(buf: *const u8, len: usize, out: *mut *mut MrsBitmap) -> MrsStatus {
    guard(|| {
        if out.is_null() || buf.is_null() {
            return Err(MrsStatus::NullPointer);
        }
        let bm = lift(MutableBitmap::from_bytes(slice::from_raw_parts(buf, len)))?;
        put(out, boxed(bm))
    })
}

/// Static, NUL-terminated description of a status code; unknown codes get
/// a generic message.
#[no_mangle]
pub extern "C" fn mrs_status_message(status: c_int) -> *const c_char {
    let s: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"null pointer argument\0",
        2 => b"position out of range\0",
        3 => b"select rank exceeds the number of set bits\0",
        4 => b"bitmap size outside the supported capacity\0",
        5 => b"block size must be 64, 256 or 512\0",
        6 => b"count outside the block domain\0",
        7 => b"malformed bitmap image\0",
        8 => b"invalid argument\0",
        9 => b"output buffer too small\0",
        10 => b"internal error\0",
        _ => b"unknown status\0",
    };
    s.as_ptr().cast()
}
