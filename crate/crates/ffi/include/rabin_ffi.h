#ifndef RABIN_FFI_H
#define RABIN_FFI_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum RabinStatus {
  RABIN_STATUS_OK = 0,
  RABIN_STATUS_NULL_POINTER = 1,
  RABIN_STATUS_INVALID_ARGUMENT = 2,
  RABIN_STATUS_PARSE_ERROR = 3,
  RABIN_STATUS_INVALID_KEY = 4,
  RABIN_STATUS_UNSIGNABLE = 5,
  RABIN_STATUS_WRONG_KEY_KIND = 6,
  RABIN_STATUS_FACTOR_LEAK = 7,
  RABIN_STATUS_PROTOCOL_ORDER = 8,
  RABIN_STATUS_FAILURE = 9,
  RABIN_STATUS_PANIC = 10,
} RabinStatus;

typedef struct RabinBlindSession RabinBlindSession;

typedef struct RabinPrivateKey RabinPrivateKey;

typedef struct RabinPublicKey RabinPublicKey;

typedef struct RabinSignature RabinSignature;

// Outcome of a verification. `valid` is false for a well-formed but wrong
// signature; the call itself still returns `RABIN_STATUS_OK`.
typedef struct RabinVerifyResult {
  bool valid;
  uint32_t squares;
  uint32_t products;
} RabinVerifyResult;

// Message of the last failed call on this thread, or "" after a success.
// The pointer stays valid until the next call on the same thread.
const char *rabin_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void rabin_string_free(char *s);

// Generates a key pair. `kind` is "general", "blum" or "rw"; `redundancy`
// is "identity", "quadratic" or "digest"; `prime_bits` is the size of each
// prime (16..=8192).
//
// # Safety
// String arguments must be valid C strings; `seed` may be null.
enum RabinStatus rabin_keygen(const char *kind,
                              uint32_t prime_bits,
                              const char *redundancy,
                              const uint64_t *seed,
                              struct RabinPrivateKey **out);

// # Safety
// `key` must be null or a handle from this library, not yet freed.
void rabin_private_key_free(struct RabinPrivateKey *key);

// # Safety
// `key` must be null or a handle from this library, not yet freed.
void rabin_public_key_free(struct RabinPublicKey *key);

// Copies the public half of a private key into a new handle.
//
// # Safety
// `key` must be a live handle; `out` must be writable.
enum RabinStatus rabin_private_key_public(const struct RabinPrivateKey *key,
                                          struct RabinPublicKey **out);

// # Safety
// `key` must be a live handle; `out` must be writable.
enum RabinStatus rabin_private_key_to_text(const struct RabinPrivateKey *key, char **out);

// # Safety
// `key` must be a live handle; `out` must be writable.
enum RabinStatus rabin_public_key_to_text(const struct RabinPublicKey *key, char **out);

// # Safety
// `text` must be a valid C string; `out` must be writable.
enum RabinStatus rabin_private_key_from_text(const char *text, struct RabinPrivateKey **out);

// Accepts public or private key text.
//
// # Safety
// `text` must be a valid C string; `out` must be writable.
enum RabinStatus rabin_public_key_from_text(const char *text, struct RabinPublicKey **out);

// Signs a decimal integer message. `scheme` is one of "classic", "general",
// "variant1", "variant2", "rw".
//
// # Safety
// `key` must be a live handle, strings valid C strings, `seed` null or
// readable, `out` writable.
enum RabinStatus rabin_sign(const struct RabinPrivateKey *key,
                            const char *scheme,
                            const char *message,
                            const uint64_t *seed,
                            struct RabinSignature **out);

// Signs a byte string; the key must use digest redundancy.
//
// # Safety
// As [`rabin_sign`]; `data` must point to `len` readable bytes (or be null
// when `len` is 0).
enum RabinStatus rabin_sign_bytes(const struct RabinPrivateKey *key,
                                  const char *scheme,
                                  const uint8_t *data,
                                  uintptr_t len,
                                  const uint64_t *seed,
                                  struct RabinSignature **out);

// # Safety
// `sig` must be null or a handle from this library, not yet freed.
void rabin_signature_free(struct RabinSignature *sig);

// # Safety
// `sig` must be a live handle; `out` must be writable.
enum RabinStatus rabin_signature_to_text(const struct RabinSignature *sig, char **out);

// # Safety
// `text` must be a valid C string; `out` must be writable.
enum RabinStatus rabin_signature_from_text(const char *text, struct RabinSignature **out);

// # Safety
// Handles must be live; `out` must be writable.
enum RabinStatus rabin_verify(const struct RabinPublicKey *key,
                              const struct RabinSignature *sig,
                              struct RabinVerifyResult *out);

// Author side: disguises a decimal message with a fresh blinding factor.
//
// # Safety
// `key` must be a live handle, `message` a valid C string, `seed` null or
// readable, `out` writable.
enum RabinStatus rabin_blind_session_start(const struct RabinPublicKey *key,
                                           const char *message,
                                           const uint64_t *seed,
                                           struct RabinBlindSession **out);

// # Safety
// `session` must be null or a handle from this library, not yet freed.
void rabin_blind_session_free(struct RabinBlindSession *session);

// The value `r² H(m)` to send to the signer, as a decimal string.
//
// # Safety
// `session` must be a live handle; `out` must be writable.
enum RabinStatus rabin_blind_session_disguised(const struct RabinBlindSession *session, char **out);

// Signer side: signs a disguised value, returning `F` and `R³` as decimal
// strings.
//
// # Safety
// `key` must be a live handle, `disguised` a valid C string, `seed` null or
// readable, both outputs writable.
enum RabinStatus rabin_blind_sign(const struct RabinPrivateKey *key,
                                  const char *disguised,
                                  const uint64_t *seed,
                                  char **out_f,
                                  char **out_r3);

// Author side: accepts the signer's `F` and `R³`.
//
// # Safety
// `session` must be a live handle; strings must be valid C strings.
enum RabinStatus rabin_blind_session_receive(struct RabinBlindSession *session,
                                             const char *f,
                                             const char *r3);

// Author side: produces the publishable Variant II signature.
//
// # Safety
// `session` must be a live handle; `out` must be writable.
enum RabinStatus rabin_blind_session_unblind(struct RabinBlindSession *session,
                                             struct RabinSignature **out);

#endif  /* RABIN_FFI_H */
