//! C ABI over the hashing core.
//!
//! Every fallible function returns a [`CmhStatus`]; results go through out
//! pointers. Indexes and models are opaque handles released with their
//! matching `_free` function. Panics are caught at the boundary and reported
//! as [`CmhStatus::Internal`].

use std::ffi::{c_char, CStr};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use cmh_ecc::cmh::{read_model, AttributeVector, CoupledModel};
use cmh_ecc::codec::{pack, snap, PackedCode};
use cmh_ecc::eval::ndcg_at_k;
use cmh_ecc::galois::{gf_inv, gf_mul, Gf};
use cmh_ecc::index::{hamming, HashIndex};
use cmh_ecc::rscode::{rs_decode, rs_encode, RsParams};
use cmh_ecc::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    DuplicateId = 4,
    Io = 5,
    Format = 6,
    NoRelevantItems = 7,
    Internal = 8,
}

impl From<&Error> for CmhStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::LengthMismatch { .. } => CmhStatus::LengthMismatch,
            Error::DuplicateId(_) => CmhStatus::DuplicateId,
            Error::Io(_) => CmhStatus::Io,
            Error::Format(_) | Error::Json(_) => CmhStatus::Format,
            Error::NoRelevantItems => CmhStatus::NoRelevantItems,
            Error::NonFiniteLoss { .. } => CmhStatus::Internal,
            Error::ZeroInverse | Error::ZeroPower(_) | Error::InvalidParams(_) | Error::InfeasibleQueries { .. } => {
                CmhStatus::InvalidArgument
            }
        }
    }
}

/// Opaque exact Hamming index.
pub struct CmhIndex(HashIndex);

/// Opaque trained two-branch model.
pub struct CmhModel(CoupledModel);

fn guard(f: impl FnOnce() -> Result<(), CmhStatus>) -> CmhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CmhStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => CmhStatus::Internal,
    }
}

fn lift<T>(r: cmh_ecc::Result<T>) -> Result<T, CmhStatus> {
    r.map_err(|e| CmhStatus::from(&e))
}

unsafe fn input<'a, T>(p: *const T, len: usize) -> Result<&'a [T], CmhStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(CmhStatus::NullPointer);
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize) -> Result<&'a mut [T], CmhStatus> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(CmhStatus::NullPointer);
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn write<T>(p: *mut T, v: T) -> Result<(), CmhStatus> {
    if p.is_null() {
        return Err(CmhStatus::NullPointer);
    }
    p.write(v);
    Ok(())
}

fn copy_into(dst: &mut [u8], src: &[u8]) -> Result<(), CmhStatus> {
    if dst.len() != src.len() {
        return Err(CmhStatus::LengthMismatch);
    }
    dst.copy_from_slice(src);
    Ok(())
}

fn to_gf(bytes: &[u8]) -> Vec<Gf> {
    bytes.iter().copied().map(Gf).collect()
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn cmh_status_message(status: CmhStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CmhStatus::Ok => c"ok",
        CmhStatus::NullPointer => c"null pointer argument",
        CmhStatus::InvalidArgument => c"invalid argument",
        CmhStatus::LengthMismatch => c"length mismatch",
        CmhStatus::DuplicateId => c"duplicate id",
        CmhStatus::Io => c"i/o error",
        CmhStatus::Format => c"malformed input",
        CmhStatus::NoRelevantItems => c"no relevant items",
        CmhStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn cmh_gf_mul(a: u8, b: u8) -> u8 {
    gf_mul(Gf(a), Gf(b)).0
}

/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cmh_gf_inv(a: u8, out: *mut u8) -> CmhStatus {
    guard(|| {
        let v = lift(gf_inv(Gf(a)))?;
        write(out, v.0)
    })
}

/// Systematic encode of `k1 = n1 - 2t` message symbols into `n1` symbols.
///
/// # Safety
/// `message` must hold `message_len` bytes and `out` `out_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cmh_rs_encode(
    message: *const u8,
    message_len: usize,
    n1: usize,
    t: usize,
    out: *mut u8,
    out_len: usize,
) -> CmhStatus {
    guard(|| {
        let params = lift(RsParams::new(n1, t))?;
        let msg = to_gf(input(message, message_len)?);
        let cw = lift(rs_encode(&msg, &params))?;
        let bytes: Vec<u8> = cw.iter().map(|g| g.0).collect();
        copy_into(output(out, out_len)?, &bytes)
    })
}

/// Bounded-distance decode of `n1` received symbols. On failure `*failed`
/// is 1 and `out` holds the received word unchanged.
///
/// # Safety
/// `received` and `out` must hold `n1` bytes; `corrected` and `failed`
/// must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cmh_rs_decode(
    received: *const u8,
    n1: usize,
    t: usize,
    out: *mut u8,
    corrected: *mut usize,
    failed: *mut u8,
) -> CmhStatus {
    guard(|| {
        let params = lift(RsParams::new(n1, t))?;
        let recv = to_gf(input(received, n1)?);
        let outcome = lift(rs_decode(&recv, &params))?;
        let bytes: Vec<u8> = outcome.codeword.iter().map(|g| g.0).collect();
        copy_into(output(out, n1)?, &bytes)?;
        write(corrected, outcome.corrected_symbols)?;
        write(failed, outcome.failed as u8)
    })
}

/// Snaps a packed code of `len` bytes to the nearest codeword within `t`
/// symbols. `*snapped` is 0 when the code was left unchanged.
///
/// # Safety
/// `code` and `out` must hold `len` bytes; `snapped` must be valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn cmh_snap(code: *const u8, len: usize, t: usize, out: *mut u8, snapped: *mut u8) -> CmhStatus {
    guard(|| {
        let params = lift(RsParams::for_code_bits(len * 8, t))?;
        let packed = PackedCode::from_bytes(input(code, len)?.to_vec());
        let s = lift(snap(&packed, &params))?;
        copy_into(output(out, len)?, s.code.bytes())?;
        write(snapped, s.snapped as u8)
    })
}

/// # Safety
/// `a` and `b` must hold `len` bytes; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cmh_hamming(a: *const u8, b: *const u8, len: usize, out: *mut u32) -> CmhStatus {
    guard(|| {
        let a = PackedCode::from_bytes(input(a, len)?.to_vec());
        let b = PackedCode::from_bytes(input(b, len)?.to_vec());
        write(out, lift(hamming(&a, &b))?)
    })
}

/// NDCG@k of a ranked relevance list against all relevance grades.
///
/// # Safety
/// `ranked` must hold `ranked_len` values, `all` `all_len` values; `out`
/// must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cmh_ndcg_at_k(
    ranked: *const u32,
    ranked_len: usize,
    all: *const u32,
    all_len: usize,
    k: usize,
    out: *mut f64,
) -> CmhStatus {
    guard(|| {
        let mut ideal = input(all, all_len)?.to_vec();
        ideal.sort_unstable_by(|a, b| b.cmp(a));
        let v = lift(ndcg_at_k(input(ranked, ranked_len)?, &ideal, k))?;
        write(out, v)
    })
}

/// New empty index over codes of `code_bits` bits (a positive multiple of
/// 8). Returns null on invalid input.
#[no_mangle]
pub extern "C" fn cmh_index_new(code_bits: usize) -> *mut CmhIndex {
    if code_bits == 0 || !code_bits.is_multiple_of(8) {
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(CmhIndex(HashIndex::new(code_bits))))
}

/// # Safety
/// `index` must come from [`cmh_index_new`] and not be freed yet; null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn cmh_index_free(index: *mut CmhIndex) {
    if !index.is_null() {
        drop(Box::from_raw(index));
    }
}

/// # Safety
/// `index` must be a live handle and `code` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cmh_index_insert(index: *mut CmhIndex, id: u64, code: *const u8, len: usize) -> CmhStatus {
    guard(|| {
        let index = index.as_mut().ok_or(CmhStatus::NullPointer)?;
        let code = PackedCode::from_bytes(input(code, len)?.to_vec());
        lift(index.0.insert(id, code))
    })
}

/// Number of stored codes; 0 for a null handle.
///
/// # Safety
/// `index` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cmh_index_len(index: *const CmhIndex) -> usize {
    index.as_ref().map_or(0, |i| i.0.len())
}

/// Exact top-k by (distance, id). Writes up to `k` hits and their count.
///
/// # Safety
/// `index` must be a live handle, `query` must hold `len` bytes, `ids` and
/// `distances` must hold `k` values and `count` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cmh_index_top_k(
    index: *const CmhIndex,
    query: *const u8,
    len: usize,
    k: usize,
    ids: *mut u64,
    distances: *mut u32,
    count: *mut usize,
) -> CmhStatus {
    guard(|| {
        let index = index.as_ref().ok_or(CmhStatus::NullPointer)?;
        let query = PackedCode::from_bytes(input(query, len)?.to_vec());
        let result = lift(index.0.top_k(&query, k))?;
        let ids = output(ids, k)?;
        let distances = output(distances, k)?;
        for (i, hit) in result.hits.iter().enumerate() {
            ids[i] = hit.id;
            distances[i] = hit.distance;
        }
        write(count, result.hits.len())
    })
}

/// Loads a model file written by the training pipeline.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cmh_model_load(path: *const c_char, out: *mut *mut CmhModel) -> CmhStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return Err(CmhStatus::NullPointer);
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| CmhStatus::InvalidArgument)?;
        let file = File::open(path).map_err(|_| CmhStatus::Io)?;
        let model = lift(read_model(BufReader::new(file)))?;
        write(out, Box::into_raw(Box::new(CmhModel(model))))
    })
}

/// # Safety
/// `model` must come from [`cmh_model_load`] and not be freed yet; null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn cmh_model_free(model: *mut CmhModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cmh_model_code_bits(model: *const CmhModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.code_bits())
}

/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cmh_model_feature_dim(model: *const CmhModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.feature_dim())
}

/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cmh_model_attributes(model: *const CmhModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.attributes())
}

/// Packed image-branch code; `out_len` must equal `code_bits / 8`.
///
/// # Safety
/// `model` must be a live handle, `features` must hold `n` values and
/// `out` `out_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cmh_model_encode_image(
    model: *const CmhModel,
    features: *const f64,
    n: usize,
    out: *mut u8,
    out_len: usize,
) -> CmhStatus {
    guard(|| {
        let model = model.as_ref().ok_or(CmhStatus::NullPointer)?;
        let code = lift(model.0.encode_image(input(features, n)?))?;
        let packed = lift(pack(&code))?;
        copy_into(output(out, out_len)?, packed.bytes())
    })
}

/// Packed attribute-branch code from a 0/1 bitmap.
///
/// # Safety
/// `model` must be a live handle, `attrs` must hold `n` bytes and `out`
/// `out_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cmh_model_encode_attributes(
    model: *const CmhModel,
    attrs: *const u8,
    n: usize,
    out: *mut u8,
    out_len: usize,
) -> CmhStatus {
    guard(|| {
        let model = model.as_ref().ok_or(CmhStatus::NullPointer)?;
        let attrs = lift(AttributeVector::new(input(attrs, n)?.to_vec()))?;
        let code = lift(model.0.encode_attributes(&attrs))?;
        let packed = lift(pack(&code))?;
        copy_into(output(out, out_len)?, packed.bytes())
    })
}
