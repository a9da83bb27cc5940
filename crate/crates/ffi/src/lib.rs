//! C ABI over `rabin-core`.
//!
//! Keys, signatures and blind sessions are opaque heap handles released with
//! their `*_free` function. Big integers cross the boundary as NUL-terminated
//! decimal strings; strings returned by this library must be released with
//! [`rabin_string_free`]. Every fallible call returns a [`RabinStatus`]; on
//! failure [`rabin_last_error`] describes the problem. A null `seed` pointer
//! means "seed from the operating system".

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigUint;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use rabin_core::blind::{self, BlindSession, BlindSignature};
use rabin_core::{
    format, gen_keypair, schemes, Error, KeyKind, Message, PrivateKey, PublicKey, Redundancy,
    Scheme, Signature,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RabinStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    InvalidKey = 4,
    Unsignable = 5,
    WrongKeyKind = 6,
    FactorLeak = 7,
    ProtocolOrder = 8,
    Failure = 9,
    Panic = 10,
}

/// Outcome of a verification. `valid` is false for a well-formed but wrong
/// signature; the call itself still returns `RABIN_STATUS_OK`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RabinVerifyResult {
    pub valid: bool,
    pub squares: u32,
    pub products: u32,
}

pub struct RabinPrivateKey(PrivateKey);
pub struct RabinPublicKey(PublicKey);
pub struct RabinSignature(Signature);
pub struct RabinBlindSession(BlindSession);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(RabinStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => RabinStatus::ParseError,
            Error::InvalidKey(_) | Error::InvalidModulus => RabinStatus::InvalidKey,
            Error::Unsignable | Error::NonResidue => RabinStatus::Unsignable,
            Error::WrongKeyKind(_) | Error::SchemeMismatch(_) => RabinStatus::WrongKeyKind,
            Error::FactorLeak => RabinStatus::FactorLeak,
            Error::ProtocolOrder(_) => RabinStatus::ProtocolOrder,
            Error::RedundancyMismatch(_) => RabinStatus::InvalidArgument,
            _ => RabinStatus::Failure,
        };
        Fail(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(RabinStatus::InvalidArgument, msg.into())
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RabinStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            RabinStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            RabinStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(RabinStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{name} is not UTF-8")))
}

unsafe fn decimal_arg(p: *const c_char, name: &str) -> Result<BigUint, Fail> {
    let s = str_arg(p, name)?;
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid(format!("{name} is not a decimal integer")));
    }
    s.parse()
        .map_err(|_| invalid(format!("{name} is not a decimal integer")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(RabinStatus::NullPointer, format!("{name} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(
            RabinStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

fn c_string(s: impl Into<Vec<u8>>) -> *mut c_char {
    CString::new(s)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

unsafe fn rng(seed: *const u64) -> ChaCha20Rng {
    match seed.as_ref() {
        Some(&s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

/// Message of the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rabin_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn rabin_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Generates a key pair. `kind` is "general", "blum" or "rw"; `redundancy`
/// is "identity", "quadratic" or "digest"; `prime_bits` is the size of each
/// prime (16..=8192).
///
/// # Safety
/// String arguments must be valid C strings; `seed` may be null.
#[no_mangle]
pub unsafe extern "C" fn rabin_keygen(
    kind: *const c_char,
    prime_bits: u32,
    redundancy: *const c_char,
    seed: *const u64,
    out: *mut *mut RabinPrivateKey,
) -> RabinStatus {
    guard(|| {
        let kind: KeyKind = str_arg(kind, "kind")?.parse().map_err(invalid)?;
        let redundancy: Redundancy = str_arg(redundancy, "redundancy")?
            .parse()
            .map_err(invalid)?;
        if !(16..=8192).contains(&prime_bits) {
            return Err(invalid("prime_bits must be between 16 and 8192"));
        }
        let key = gen_keypair(kind, u64::from(prime_bits), redundancy, &mut rng(seed));
        write_out(out, boxed(RabinPrivateKey(key)))
    })
}

/// # Safety
/// `key` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rabin_private_key_free(key: *mut RabinPrivateKey) {
    if !key.is_null() {
        drop(Box::from_raw(key));
    }
}

/// # Safety
/// `key` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rabin_public_key_free(key: *mut RabinPublicKey) {
    if !key.is_null() {
        drop(Box::from_raw(key));
    }
}

/// Copies the public half of a private key into a new handle.
///
/// # Safety
/// `key` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_private_key_public(
    key: *const RabinPrivateKey,
    out: *mut *mut RabinPublicKey,
) -> RabinStatus {
    guard(|| {
        let key = handle(key, "key")?;
        write_out(out, boxed(RabinPublicKey(key.0.public.clone())))
    })
}

/// # Safety
/// `key` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_private_key_to_text(
    key: *const RabinPrivateKey,
    out: *mut *mut c_char,
) -> RabinStatus {
    guard(|| {
        write_out(
            out,
            c_string(format::private_key_to_text(&handle(key, "key")?.0)),
        )
    })
}

/// # Safety
/// `key` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_public_key_to_text(
    key: *const RabinPublicKey,
    out: *mut *mut c_char,
) -> RabinStatus {
    guard(|| {
        write_out(
            out,
            c_string(format::public_key_to_text(&handle(key, "key")?.0)),
        )
    })
}

/// # Safety
/// `text` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_private_key_from_text(
    text: *const c_char,
    out: *mut *mut RabinPrivateKey,
) -> RabinStatus {
    guard(|| {
        let key = format::parse_private_key(str_arg(text, "text")?)?;
        write_out(out, boxed(RabinPrivateKey(key)))
    })
}

/// Accepts public or private key text.
///
/// # Safety
/// `text` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_public_key_from_text(
    text: *const c_char,
    out: *mut *mut RabinPublicKey,
) -> RabinStatus {
    guard(|| {
        let key = format::parse_public_key(str_arg(text, "text")?)?;
        write_out(out, boxed(RabinPublicKey(key)))
    })
}

unsafe fn sign_message(
    key: *const RabinPrivateKey,
    scheme: *const c_char,
    message: Message,
    seed: *const u64,
    out: *mut *mut RabinSignature,
) -> Result<(), Fail> {
    let key = handle(key, "key")?;
    let scheme: Scheme = str_arg(scheme, "scheme")?.parse().map_err(invalid)?;
    let sig = schemes::sign(scheme, &key.0, &message, &mut rng(seed))?;
    write_out(out, boxed(RabinSignature(sig)))
}

/// Signs a decimal integer message. `scheme` is one of "classic", "general",
/// "variant1", "variant2", "rw".
///
/// # Safety
/// `key` must be a live handle, strings valid C strings, `seed` null or
/// readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_sign(
    key: *const RabinPrivateKey,
    scheme: *const c_char,
    message: *const c_char,
    seed: *const u64,
    out: *mut *mut RabinSignature,
) -> RabinStatus {
    guard(|| {
        let m = decimal_arg(message, "message")?;
        let n = handle(key, "key")?.0.n();
        if matches!(
            handle(key, "key")?.0.public.redundancy,
            Redundancy::Identity | Redundancy::Quadratic
        ) && m >= *n
        {
            return Err(invalid("message must be smaller than N"));
        }
        sign_message(key, scheme, Message::Int(m), seed, out)
    })
}

/// Signs a byte string; the key must use digest redundancy.
///
/// # Safety
/// As [`rabin_sign`]; `data` must point to `len` readable bytes (or be null
/// when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn rabin_sign_bytes(
    key: *const RabinPrivateKey,
    scheme: *const c_char,
    data: *const u8,
    len: usize,
    seed: *const u64,
    out: *mut *mut RabinSignature,
) -> RabinStatus {
    guard(|| {
        let bytes = if len == 0 {
            Vec::new()
        } else if data.is_null() {
            return Err(Fail(RabinStatus::NullPointer, "data is null".into()));
        } else {
            std::slice::from_raw_parts(data, len).to_vec()
        };
        sign_message(key, scheme, Message::Bytes(bytes), seed, out)
    })
}

/// # Safety
/// `sig` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rabin_signature_free(sig: *mut RabinSignature) {
    if !sig.is_null() {
        drop(Box::from_raw(sig));
    }
}

/// # Safety
/// `sig` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_signature_to_text(
    sig: *const RabinSignature,
    out: *mut *mut c_char,
) -> RabinStatus {
    guard(|| {
        write_out(
            out,
            c_string(format::signature_to_text(&handle(sig, "sig")?.0)),
        )
    })
}

/// # Safety
/// `text` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_signature_from_text(
    text: *const c_char,
    out: *mut *mut RabinSignature,
) -> RabinStatus {
    guard(|| {
        let sig = format::parse_signature(str_arg(text, "text")?)?;
        write_out(out, boxed(RabinSignature(sig)))
    })
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_verify(
    key: *const RabinPublicKey,
    sig: *const RabinSignature,
    out: *mut RabinVerifyResult,
) -> RabinStatus {
    guard(|| {
        let report = schemes::verify(&handle(key, "key")?.0, &handle(sig, "sig")?.0);
        write_out(
            out,
            RabinVerifyResult {
                valid: report.valid,
                squares: report.op_counts.squares,
                products: report.op_counts.products,
            },
        )
    })
}

/// Author side: disguises a decimal message with a fresh blinding factor.
///
/// # Safety
/// `key` must be a live handle, `message` a valid C string, `seed` null or
/// readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_blind_session_start(
    key: *const RabinPublicKey,
    message: *const c_char,
    seed: *const u64,
    out: *mut *mut RabinBlindSession,
) -> RabinStatus {
    guard(|| {
        let key = handle(key, "key")?;
        let m = decimal_arg(message, "message")?;
        let session = BlindSession::start(&key.0, Message::Int(m), &mut rng(seed))?;
        write_out(out, boxed(RabinBlindSession(session)))
    })
}

/// # Safety
/// `session` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rabin_blind_session_free(session: *mut RabinBlindSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// The value `r² H(m)` to send to the signer, as a decimal string.
///
/// # Safety
/// `session` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_blind_session_disguised(
    session: *const RabinBlindSession,
    out: *mut *mut c_char,
) -> RabinStatus {
    guard(|| {
        write_out(
            out,
            c_string(handle(session, "session")?.0.disguised().to_string()),
        )
    })
}

/// Signer side: signs a disguised value, returning `F` and `R³` as decimal
/// strings.
///
/// # Safety
/// `key` must be a live handle, `disguised` a valid C string, `seed` null or
/// readable, both outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_blind_sign(
    key: *const RabinPrivateKey,
    disguised: *const c_char,
    seed: *const u64,
    out_f: *mut *mut c_char,
    out_r3: *mut *mut c_char,
) -> RabinStatus {
    guard(|| {
        let key = handle(key, "key")?;
        let d = decimal_arg(disguised, "disguised")?;
        if out_f.is_null() || out_r3.is_null() {
            return Err(Fail(
                RabinStatus::NullPointer,
                "output pointer is null".into(),
            ));
        }
        let bsig = blind::blind_sign(&key.0, &d, &mut rng(seed))?;
        write_out(out_f, c_string(bsig.masked_root.to_string()))?;
        write_out(out_r3, c_string(bsig.r_cubed.to_string()))
    })
}

/// Author side: accepts the signer's `F` and `R³`.
///
/// # Safety
/// `session` must be a live handle; strings must be valid C strings.
#[no_mangle]
pub unsafe extern "C" fn rabin_blind_session_receive(
    session: *mut RabinBlindSession,
    f: *const c_char,
    r3: *const c_char,
) -> RabinStatus {
    guard(|| {
        let session = session
            .as_mut()
            .ok_or_else(|| Fail(RabinStatus::NullPointer, "session is null".into()))?;
        let bsig = BlindSignature {
            disguised: session.0.disguised().clone(),
            masked_root: decimal_arg(f, "f")?,
            r_cubed: decimal_arg(r3, "r3")?,
        };
        session.0.receive(bsig)?;
        Ok(())
    })
}

/// Author side: produces the publishable Variant II signature.
///
/// # Safety
/// `session` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rabin_blind_session_unblind(
    session: *mut RabinBlindSession,
    out: *mut *mut RabinSignature,
) -> RabinStatus {
    guard(|| {
        let session = session
            .as_mut()
            .ok_or_else(|| Fail(RabinStatus::NullPointer, "session is null".into()))?;
        let sig = session.0.unblind()?;
        write_out(out, boxed(RabinSignature(sig)))
    })
}
