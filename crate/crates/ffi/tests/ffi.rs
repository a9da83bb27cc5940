use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use rabin_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    rabin_string_free(p);
    s
}

unsafe fn last_error() -> String {
    CStr::from_ptr(rabin_last_error())
        .to_str()
        .unwrap()
        .to_owned()
}

unsafe fn keygen(kind: &str, redundancy: &str, seed: u64) -> *mut RabinPrivateKey {
    let mut key = ptr::null_mut();
    let status = rabin_keygen(
        c(kind).as_ptr(),
        96,
        c(redundancy).as_ptr(),
        &seed,
        &mut key,
    );
    assert_eq!(status, RabinStatus::Ok, "{}", last_error());
    key
}

#[test]
fn sign_verify_all_schemes() {
    unsafe {
        for (kind, scheme, squares, products) in [
            ("blum", "classic", 1, 1),
            ("general", "general", 1, 1),
            ("blum", "variant1", 2, 2),
            ("blum", "variant2", 7, 3),
            ("rw", "rw", 1, 1),
        ] {
            let key = keygen(kind, "identity", 5);
            let mut public = ptr::null_mut();
            assert_eq!(rabin_private_key_public(key, &mut public), RabinStatus::Ok);
            let mut sig = ptr::null_mut();
            let status = rabin_sign(
                key,
                c(scheme).as_ptr(),
                c("987654321").as_ptr(),
                ptr::null(),
                &mut sig,
            );
            assert_eq!(status, RabinStatus::Ok, "{scheme}: {}", last_error());
            let mut result = RabinVerifyResult::default();
            assert_eq!(rabin_verify(public, sig, &mut result), RabinStatus::Ok);
            assert_eq!(
                result,
                RabinVerifyResult {
                    valid: true,
                    squares,
                    products
                },
                "{scheme}"
            );
            rabin_signature_free(sig);
            rabin_public_key_free(public);
            rabin_private_key_free(key);
        }
    }
}

#[test]
fn text_round_trips() {
    unsafe {
        let key = keygen("general", "quadratic", 9);
        let mut text = ptr::null_mut();
        assert_eq!(rabin_private_key_to_text(key, &mut text), RabinStatus::Ok);
        let text = take_string(text);
        let mut again = ptr::null_mut();
        assert_eq!(
            rabin_private_key_from_text(c(&text).as_ptr(), &mut again),
            RabinStatus::Ok
        );
        let mut public = ptr::null_mut();
        assert_eq!(
            rabin_public_key_from_text(c(&text).as_ptr(), &mut public),
            RabinStatus::Ok
        );
        let mut pub_text = ptr::null_mut();
        assert_eq!(
            rabin_public_key_to_text(public, &mut pub_text),
            RabinStatus::Ok
        );
        assert!(take_string(pub_text).contains("u4 = "));

        let seed = 3u64;
        let mut sig = ptr::null_mut();
        assert_eq!(
            rabin_sign(
                again,
                c("general").as_ptr(),
                c("77").as_ptr(),
                &seed,
                &mut sig
            ),
            RabinStatus::Ok
        );
        let mut sig_text = ptr::null_mut();
        assert_eq!(rabin_signature_to_text(sig, &mut sig_text), RabinStatus::Ok);
        let sig_text = take_string(sig_text);
        let mut parsed = ptr::null_mut();
        assert_eq!(
            rabin_signature_from_text(c(&sig_text).as_ptr(), &mut parsed),
            RabinStatus::Ok
        );
        let mut result = RabinVerifyResult::default();
        assert_eq!(rabin_verify(public, parsed, &mut result), RabinStatus::Ok);
        assert!(result.valid);

        let tampered = sig_text.replace("message = 77", "message = 78");
        let mut bad = ptr::null_mut();
        assert_eq!(
            rabin_signature_from_text(c(&tampered).as_ptr(), &mut bad),
            RabinStatus::Ok
        );
        assert_eq!(rabin_verify(public, bad, &mut result), RabinStatus::Ok);
        assert!(!result.valid);

        for p in [sig, parsed, bad] {
            rabin_signature_free(p);
        }
        rabin_public_key_free(public);
        rabin_private_key_free(again);
        rabin_private_key_free(key);
    }
}

#[test]
fn byte_messages_need_digest_keys() {
    unsafe {
        let data = b"hello, world";
        let digest_key = keygen("blum", "digest", 1);
        let mut sig = ptr::null_mut();
        let status = rabin_sign_bytes(
            digest_key,
            c("variant2").as_ptr(),
            data.as_ptr(),
            data.len(),
            ptr::null(),
            &mut sig,
        );
        assert_eq!(status, RabinStatus::Ok);
        rabin_signature_free(sig);

        let plain = keygen("blum", "identity", 1);
        let status = rabin_sign_bytes(
            plain,
            c("variant2").as_ptr(),
            data.as_ptr(),
            data.len(),
            ptr::null(),
            &mut sig,
        );
        assert_eq!(status, RabinStatus::InvalidArgument);
        rabin_private_key_free(plain);
        rabin_private_key_free(digest_key);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut key = ptr::null_mut();
        assert_eq!(
            rabin_keygen(
                ptr::null(),
                64,
                c("identity").as_ptr(),
                ptr::null(),
                &mut key
            ),
            RabinStatus::NullPointer
        );
        assert!(last_error().contains("kind"));
        assert_eq!(
            rabin_keygen(
                c("weird").as_ptr(),
                64,
                c("identity").as_ptr(),
                ptr::null(),
                &mut key
            ),
            RabinStatus::InvalidArgument
        );
        assert_eq!(
            rabin_keygen(
                c("blum").as_ptr(),
                4,
                c("identity").as_ptr(),
                ptr::null(),
                &mut key
            ),
            RabinStatus::InvalidArgument
        );
        assert_eq!(
            rabin_keygen(
                c("blum").as_ptr(),
                64,
                c("identity").as_ptr(),
                ptr::null(),
                ptr::null_mut()
            ),
            RabinStatus::NullPointer
        );

        let mut parsed = ptr::null_mut();
        assert_eq!(
            rabin_private_key_from_text(c("junk").as_ptr(), &mut parsed),
            RabinStatus::ParseError
        );
        assert!(last_error().contains("line"));

        let key = keygen("blum", "identity", 2);
        let mut sig = ptr::null_mut();
        assert_eq!(
            rabin_sign(
                key,
                c("general").as_ptr(),
                c("5").as_ptr(),
                ptr::null(),
                &mut sig
            ),
            RabinStatus::WrongKeyKind
        );
        assert_eq!(
            rabin_sign(
                key,
                c("variant2").as_ptr(),
                c("0").as_ptr(),
                ptr::null(),
                &mut sig
            ),
            RabinStatus::Unsignable
        );
        assert_eq!(
            rabin_sign(
                key,
                c("variant2").as_ptr(),
                c("12x").as_ptr(),
                ptr::null(),
                &mut sig
            ),
            RabinStatus::InvalidArgument
        );
        let huge = "9".repeat(100);
        assert_eq!(
            rabin_sign(
                key,
                c("variant2").as_ptr(),
                c(&huge).as_ptr(),
                ptr::null(),
                &mut sig
            ),
            RabinStatus::InvalidArgument
        );
        assert_eq!(
            rabin_sign(
                key,
                c("variant2").as_ptr(),
                c("5").as_ptr(),
                ptr::null(),
                &mut sig
            ),
            RabinStatus::Ok
        );
        assert_eq!(last_error(), "");
        rabin_signature_free(sig);
        rabin_private_key_free(key);

        rabin_private_key_free(ptr::null_mut());
        rabin_string_free(ptr::null_mut());
    }
}

#[test]
fn blind_session_through_the_abi() {
    unsafe {
        let key = keygen("blum", "quadratic", 4);
        let mut public = ptr::null_mut();
        assert_eq!(rabin_private_key_public(key, &mut public), RabinStatus::Ok);
        let mut session = ptr::null_mut();
        let seed = 8u64;
        assert_eq!(
            rabin_blind_session_start(public, c("31337").as_ptr(), &seed, &mut session),
            RabinStatus::Ok
        );

        let mut early = ptr::null_mut();
        assert_eq!(
            rabin_blind_session_unblind(session, &mut early),
            RabinStatus::ProtocolOrder
        );

        let mut d = ptr::null_mut();
        assert_eq!(
            rabin_blind_session_disguised(session, &mut d),
            RabinStatus::Ok
        );
        let d = take_string(d);
        let (mut f, mut r3) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            rabin_blind_sign(key, c(&d).as_ptr(), &seed, &mut f, &mut r3),
            RabinStatus::Ok
        );
        let (f, r3) = (take_string(f), take_string(r3));
        assert_eq!(
            rabin_blind_session_receive(session, c(&f).as_ptr(), c(&r3).as_ptr()),
            RabinStatus::Ok
        );
        assert_eq!(
            rabin_blind_session_receive(session, c(&f).as_ptr(), c(&r3).as_ptr()),
            RabinStatus::ProtocolOrder
        );
        let mut sig = ptr::null_mut();
        assert_eq!(
            rabin_blind_session_unblind(session, &mut sig),
            RabinStatus::Ok
        );
        let mut result = RabinVerifyResult::default();
        assert_eq!(rabin_verify(public, sig, &mut result), RabinStatus::Ok);
        assert!(result.valid);
        assert_eq!((result.squares, result.products), (7, 3));

        rabin_signature_free(sig);
        rabin_blind_session_free(session);
        rabin_public_key_free(public);
        rabin_private_key_free(key);
    }
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_is_generated() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rabin_ffi.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "RABIN_STATUS_OK",
        "typedef struct RabinPrivateKey RabinPrivateKey",
        "rabin_verify",
        "rabin_blind_session_unblind",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("librabin_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    assert!(
        lib.exists(),
        "static library not found at {}",
        lib.display()
    );
    let out = tempfile_path();
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/roundtrip.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C build failed");
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
    let _ = std::fs::remove_file(out);
}

fn tempfile_path() -> PathBuf {
    std::env::temp_dir().join(format!("rabin_ffi_roundtrip_{}", std::process::id()))
}
