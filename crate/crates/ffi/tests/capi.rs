use std::ffi::{CStr, CString};
use std::ptr;

use cmh_ecc::cmh::{synth_dataset, train, write_model, SimilarityMatrix, SynthConfig, TrainConfig};
use cmh_ecc::codec::pack;
use cmh_ecc_ffi::*;

fn carryless_mul(a: u8, b: u8) -> u8 {
    let mut acc: u16 = 0;
    for i in 0..8 {
        if b >> i & 1 == 1 {
            acc ^= (a as u16) << i;
        }
    }
    for bit in (8..16).rev() {
        if acc >> bit & 1 == 1 {
            acc ^= 0x11D << (bit - 8);
        }
    }
    acc as u8
}

#[test]
fn gf_matches_reference() {
    for a in 0..=255u8 {
        for b in 0..=255u8 {
            assert_eq!(cmh_gf_mul(a, b), carryless_mul(a, b));
        }
    }
    let mut inv = 0u8;
    unsafe {
        assert_eq!(cmh_gf_inv(0, &mut inv), CmhStatus::InvalidArgument);
        assert_eq!(cmh_gf_inv(0x53, &mut inv), CmhStatus::Ok);
        assert_eq!(cmh_gf_inv(7, ptr::null_mut()), CmhStatus::NullPointer);
    }
    assert_eq!(cmh_gf_mul(0x53, inv), 1);
}

#[test]
fn rs_round_trip_through_c_abi() {
    let (n1, t) = (32usize, 8usize);
    let msg: Vec<u8> = (0..16u8).map(|i| i.wrapping_mul(37).wrapping_add(5)).collect();
    let mut cw = vec![0u8; n1];
    unsafe {
        assert_eq!(cmh_rs_encode(msg.as_ptr(), msg.len(), n1, t, cw.as_mut_ptr(), n1), CmhStatus::Ok);
        assert_eq!(&cw[..16], &msg[..]);
        assert_eq!(cmh_rs_encode(msg.as_ptr(), msg.len(), n1, t, cw.as_mut_ptr(), n1 - 1), CmhStatus::LengthMismatch);
        assert_eq!(cmh_rs_encode(msg.as_ptr(), msg.len(), 16, 8, cw.as_mut_ptr(), 16), CmhStatus::InvalidArgument);
    }
    let mut recv = cw.clone();
    for (pos, e) in [(0, 1u8), (5, 0x80), (17, 0xFF), (31, 9)] {
        recv[pos] ^= e;
    }
    let mut out = vec![0u8; n1];
    let (mut corrected, mut failed) = (0usize, 9u8);
    unsafe {
        let s = cmh_rs_decode(recv.as_ptr(), n1, t, out.as_mut_ptr(), &mut corrected, &mut failed);
        assert_eq!(s, CmhStatus::Ok);
    }
    assert_eq!(out, cw);
    assert_eq!((corrected, failed), (4, 0));
}

#[test]
fn snap_and_hamming() {
    let zero = [0u8; 32];
    let mut noisy = zero;
    noisy[3] = 0xF0;
    noisy[20] = 0x01;
    let mut out = [0xAAu8; 32];
    let mut snapped = 0u8;
    let mut d = 0u32;
    unsafe {
        assert_eq!(cmh_snap(noisy.as_ptr(), 32, 8, out.as_mut_ptr(), &mut snapped), CmhStatus::Ok);
        assert_eq!((out, snapped), (zero, 1));
        assert_eq!(cmh_hamming(noisy.as_ptr(), zero.as_ptr(), 32, &mut d), CmhStatus::Ok);
        assert_eq!(cmh_snap(noisy.as_ptr(), 3, 2, out.as_mut_ptr(), &mut snapped), CmhStatus::InvalidArgument);
    }
    assert_eq!(d, 5);
}

#[test]
fn ndcg_anchors() {
    let mut v = -1.0;
    unsafe {
        let ideal = [3u32, 2, 1];
        assert_eq!(cmh_ndcg_at_k(ideal.as_ptr(), 3, ideal.as_ptr(), 3, 3, &mut v), CmhStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        let zeros = [0u32; 3];
        assert_eq!(cmh_ndcg_at_k(zeros.as_ptr(), 3, zeros.as_ptr(), 3, 2, &mut v), CmhStatus::NoRelevantItems);
        let ranked = [0u32, 1];
        let all = [0u32, 1];
        assert_eq!(cmh_ndcg_at_k(ranked.as_ptr(), 2, all.as_ptr(), 2, 2, &mut v), CmhStatus::Ok);
    }
    assert!((v - 1.0 / 3f64.log2()).abs() < 1e-12);
}

#[test]
fn index_lifecycle() {
    assert!(cmh_index_new(0).is_null());
    assert!(cmh_index_new(12).is_null());
    let idx = cmh_index_new(16);
    assert!(!idx.is_null());
    let codes: [[u8; 2]; 4] = [[0, 0], [0xFF, 0xFF], [0x01, 0], [0, 0x03]];
    unsafe {
        for (id, c) in codes.iter().enumerate() {
            assert_eq!(cmh_index_insert(idx, id as u64, c.as_ptr(), 2), CmhStatus::Ok);
        }
        assert_eq!(cmh_index_insert(idx, 2, codes[0].as_ptr(), 2), CmhStatus::DuplicateId);
        assert_eq!(cmh_index_insert(idx, 9, codes[0].as_ptr(), 1), CmhStatus::LengthMismatch);
        assert_eq!(cmh_index_len(idx), 4);
        assert_eq!(cmh_index_len(ptr::null()), 0);

        let mut ids = [0u64; 8];
        let mut dist = [0u32; 8];
        let mut count = 0usize;
        let q = [0u8, 0];
        let s = cmh_index_top_k(idx, q.as_ptr(), 2, 8, ids.as_mut_ptr(), dist.as_mut_ptr(), &mut count);
        assert_eq!(s, CmhStatus::Ok);
        assert_eq!(count, 4);
        assert_eq!(&ids[..4], &[0, 2, 3, 1]);
        assert_eq!(&dist[..4], &[0, 1, 2, 16]);
        let s = cmh_index_top_k(idx, q.as_ptr(), 2, 0, ids.as_mut_ptr(), dist.as_mut_ptr(), &mut count);
        assert_eq!(s, CmhStatus::InvalidArgument);
        cmh_index_free(idx);
        cmh_index_free(ptr::null_mut());
    }
}

#[test]
fn model_handle_matches_core_encoders() {
    let synth = SynthConfig::new(48, 6, 10, 0.2, 4);
    let (samples, _) = synth_dataset(&synth).unwrap();
    let sim = SimilarityMatrix::from_samples(&samples);
    let mut cfg = TrainConfig::with_code_bits(64);
    cfg.epochs = 2;
    cfg.batch_size = 16;
    cfg.image_hidden = vec![12];
    cfg.attr_hidden = vec![12];
    let trained = train(&samples, &sim, &cfg).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bin");
    write_model(&trained.model, std::fs::File::create(&path).unwrap()).unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();

    let mut handle: *mut CmhModel = ptr::null_mut();
    unsafe {
        assert_eq!(cmh_model_load(cpath.as_ptr(), &mut handle), CmhStatus::Ok);
        assert_eq!(cmh_model_code_bits(handle), 64);
        assert_eq!(cmh_model_feature_dim(handle), 10);
        assert_eq!(cmh_model_attributes(handle), 6);
        let mut out = [0u8; 8];
        for s in &samples[..5] {
            let want = pack(&trained.model.encode_image(&s.features).unwrap()).unwrap();
            let st = cmh_model_encode_image(handle, s.features.as_ptr(), s.features.len(), out.as_mut_ptr(), 8);
            assert_eq!(st, CmhStatus::Ok);
            assert_eq!(&out[..], want.bytes());
            let want = pack(&trained.model.encode_attributes(&s.attrs).unwrap()).unwrap();
            let bits = s.attrs.bits();
            let st = cmh_model_encode_attributes(handle, bits.as_ptr(), bits.len(), out.as_mut_ptr(), 8);
            assert_eq!(st, CmhStatus::Ok);
            assert_eq!(&out[..], want.bytes());
        }
        let bad = [2u8; 6];
        assert_eq!(cmh_model_encode_attributes(handle, bad.as_ptr(), 6, out.as_mut_ptr(), 8), CmhStatus::Format);
        let short = [0.0f64; 3];
        assert_eq!(cmh_model_encode_image(handle, short.as_ptr(), 3, out.as_mut_ptr(), 8), CmhStatus::LengthMismatch);
        cmh_model_free(handle);

        let missing = CString::new(dir.path().join("nope").to_str().unwrap()).unwrap();
        let mut h2: *mut CmhModel = ptr::null_mut();
        assert_eq!(cmh_model_load(missing.as_ptr(), &mut h2), CmhStatus::Io);
        assert!(h2.is_null());
        assert_eq!(cmh_model_load(ptr::null(), &mut h2), CmhStatus::NullPointer);
    }
}

#[test]
fn every_status_has_a_message() {
    for s in [
        CmhStatus::Ok,
        CmhStatus::NullPointer,
        CmhStatus::InvalidArgument,
        CmhStatus::LengthMismatch,
        CmhStatus::DuplicateId,
        CmhStatus::Io,
        CmhStatus::Format,
        CmhStatus::NoRelevantItems,
        CmhStatus::Internal,
    ] {
        let msg = unsafe { CStr::from_ptr(cmh_status_message(s)) };
        assert!(!msg.to_bytes().is_empty());
    }
}

#[test]
fn header_is_generated() {
    let header = include_str!("../include/cmh_ecc.h");
    for name in
        ["cmh_index_top_k", "cmh_model_load", "cmh_rs_decode", "CMH_STATUS_DUPLICATE_ID", "typedef struct CmhIndex"]
    {
        assert!(header.contains(name), "{name} missing from header");
    }
}
