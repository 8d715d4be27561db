use std::ffi::{CStr, CString};
use std::ptr;

use nordlid::model::{self, FastModel, FeaturizerConfig};
use nordlid::{LabelSet, Language};
use nordlid_ffi::*;

fn small_model(seed: u64) -> FastModel {
    let cfg = FeaturizerConfig {
        bucket_count: 256,
        embed_dim: 8,
        ..Default::default()
    };
    FastModel::init(cfg, seed).unwrap()
}

fn last_error() -> String {
    let p = nordlid_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn load(bytes: &[u8]) -> (NordlidStatus, *mut NordlidModel) {
    let mut handle = ptr::null_mut();
    let status = unsafe { nordlid_model_load_bytes(bytes.as_ptr(), bytes.len(), &mut handle) };
    (status, handle)
}

#[test]
fn predictions_match_the_rust_api() {
    let m = small_model(3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.slfx");
    model::save_model(&m, &path).unwrap();

    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let mut handle = ptr::null_mut();
    assert_eq!(unsafe { nordlid_model_load(cpath.as_ptr(), &mut handle) }, NordlidStatus::Ok);
    assert_eq!(unsafe { nordlid_model_threshold(handle) }, m.threshold);

    for text in ["Jeg har en plan.", "Eg veit ikkje kva", "Hello world", ""] {
        let (labels, top1) = m.classify(text);
        let ctext = CString::new(text).unwrap();

        let (mut bits, mut best) = (0u8, u32::MAX);
        let status = unsafe { nordlid_predict(handle, ctext.as_ptr(), &mut bits, &mut best) };
        assert_eq!(status, NordlidStatus::Ok);
        assert_eq!(LabelSet::from_bits(bits).unwrap(), labels);
        assert_eq!(Language::from_index(best as usize), Some(top1));

        let mut s = ptr::null_mut();
        assert_eq!(unsafe { nordlid_predict_labels(handle, ctext.as_ptr(), &mut s) }, NordlidStatus::Ok);
        assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), labels.to_string());
        unsafe { nordlid_string_free(s) };

        let mut probs = [0.0f64; 4];
        let status = unsafe { nordlid_predict_proba(handle, ctext.as_ptr(), probs.as_mut_ptr()) };
        assert_eq!(status, NordlidStatus::Ok);
        assert_eq!(probs, m.probabilities(text));
    }
    unsafe { nordlid_model_free(handle) };
}

#[test]
fn label_bits_agree_with_label_set() {
    let tags = [
        (NORDLID_LABEL_DA, "da"),
        (NORDLID_LABEL_NB, "nb"),
        (NORDLID_LABEL_NN, "nn"),
        (NORDLID_LABEL_SV, "sv"),
        (NORDLID_LABEL_OTHER, "other"),
    ];
    for (bit, tag) in tags {
        assert_eq!(tag.parse::<LabelSet>().unwrap().bits(), bit);
    }
}

#[test]
fn load_errors_carry_status_and_message() {
    let bytes = model::write_model(&small_model(1));

    let mut corrupt = bytes.clone();
    let mid = corrupt.len() / 2;
    corrupt[mid] ^= 0x40;
    let (status, handle) = load(&corrupt);
    assert_eq!(status, NordlidStatus::Checksum);
    assert!(handle.is_null());
    assert!(last_error().contains("checksum"));

    let mut wrong_magic = bytes.clone();
    wrong_magic[..4].copy_from_slice(b"GGUF");
    assert_eq!(load(&wrong_magic).0, NordlidStatus::BadFormat);
    assert!(last_error().contains("SLFX"));

    let missing = CString::new("/nonexistent/model.slfx").unwrap();
    let mut handle = ptr::null_mut();
    assert_eq!(unsafe { nordlid_model_load(missing.as_ptr(), &mut handle) }, NordlidStatus::Io);

    let (status, handle) = load(&bytes);
    assert_eq!(status, NordlidStatus::Ok);
    unsafe { nordlid_model_free(handle) };
}

#[test]
fn null_and_invalid_arguments() {
    let mut bits = 0u8;
    let text = CString::new("hei").unwrap();
    let status = unsafe { nordlid_predict(ptr::null(), text.as_ptr(), &mut bits, ptr::null_mut()) };
    assert_eq!(status, NordlidStatus::NullPointer);
    assert!(last_error().contains("model"));

    let bytes = model::write_model(&small_model(2));
    let (_, handle) = load(&bytes);
    let bad = [0xffu8, 0xfe, 0];
    let status = unsafe { nordlid_predict(handle, bad.as_ptr().cast(), &mut bits, ptr::null_mut()) };
    assert_eq!(status, NordlidStatus::InvalidUtf8);
    let status = unsafe { nordlid_predict(handle, text.as_ptr(), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(status, NordlidStatus::NullPointer);
    unsafe {
        nordlid_model_free(handle);
        nordlid_model_free(ptr::null_mut());
        nordlid_string_free(ptr::null_mut());
    }
}

#[test]
fn normalize_and_compare() {
    let text = CString::new("Se https://a.no og 1 234,5 kr").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { nordlid_normalize(text.as_ptr(), &mut out) }, NordlidStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(out) }.to_str().unwrap(), "se ⟨URL⟩ og ⟨num⟩ kr");
    unsafe { nordlid_string_free(out) };

    let a = CString::new("Jeg  har\u{0065}\u{0301}").unwrap();
    let b = CString::new("Jeg har\u{00e9}").unwrap();
    let c = CString::new("Jag har").unwrap();
    let mut equal = false;
    assert_eq!(unsafe { nordlid_canonical_compare(a.as_ptr(), b.as_ptr(), &mut equal) }, NordlidStatus::Ok);
    assert!(equal);
    unsafe { nordlid_canonical_compare(a.as_ptr(), c.as_ptr(), &mut equal) };
    assert!(!equal);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(nordlid_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
