//! Executable attacks.
//!
//! * the classic re-padding forgery `U' = S² H(m')⁻¹`,
//! * scaling forgeries for every pseudo-homogeneous signature under `H(z) = z`,
//! * the blinding attack that turns a naive blind signer into a decryption
//!   (or factoring) oracle,
//! * padding recovery when Variant II leaks `R²` instead of `R³`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{CryptoRng, Rng};

use crate::blind::{self, BlindSignature};
use crate::error::{Error, Result};
use crate::hashing::{apply_redundancy, signable_digest, Message};
use crate::keygen::{PrivateKey, PublicKey};
use crate::numtheory::{mod_inverse, random_unit};
use crate::schemes::variant2::masked_root;
use crate::schemes::{require_blum, Scheme, Signature};

/// Per-component scaling exponents of a pseudo-homogeneous signature.
///
/// Scaling the message by `λ^message_exponent` and component `i` by
/// `λ^component_exponents[i]` multiplies verifier equation `j` by `λ^degrees[j]`,
/// so valid signatures map to valid signatures when `H(z) = z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForgeryTransform {
    pub message_exponent: u32,
    pub component_exponents: &'static [u32],
    pub degrees: &'static [u32],
}

impl ForgeryTransform {
    /// `[λ²d, λF, R³]` on a blind signature `[d, F, R³]`.
    pub const BLIND: ForgeryTransform = ForgeryTransform {
        message_exponent: 2,
        component_exponents: &[1, 0],
        degrees: &[12],
    };

    pub fn for_scheme(scheme: Scheme) -> ForgeryTransform {
        match scheme {
            // [λ²m, U, λS]: S² - mU has degree 2
            Scheme::Classic | Scheme::General => ForgeryTransform {
                message_exponent: 2,
                component_exponents: &[0, 1],
                degrees: &[2],
            },
            // [λ⁴m, U, λ²S, λT]: T² - (U+1)S degree 2, S² - mU degree 4
            Scheme::VariantI => ForgeryTransform {
                message_exponent: 4,
                component_exponents: &[0, 2, 1],
                degrees: &[2, 4],
            },
            // [λ²m, λF, R³]: F¹² - R¹²m⁶ degree 12
            Scheme::VariantII => ForgeryTransform {
                message_exponent: 2,
                component_exponents: &[1, 0],
                degrees: &[12],
            },
            // [λ²m, e, f, λS]
            Scheme::RabinWilliams => ForgeryTransform {
                message_exponent: 2,
                component_exponents: &[0, 0, 1],
                degrees: &[2],
            },
        }
    }

    fn scale(&self, exponent: u32, value: &BigUint, lambda: &BigUint, n: &BigUint) -> BigUint {
        lambda.modpow(&BigUint::from(exponent), n) * value % n
    }

    /// Applies the transform with factor `lambda` to an integer-message signature.
    pub fn apply(&self, sig: &Signature, lambda: &BigUint, n: &BigUint) -> Result<Signature> {
        let lambda = lambda % n;
        if !lambda.gcd(n).is_one() {
            return Err(Error::NotInvertible);
        }
        let mut forged = sig.clone();
        let Message::Int(m) = forged.message_mut() else {
            return Err(Error::RedundancyMismatch(
                "scaling needs an integer message".into(),
            ));
        };
        *m = self.scale(self.message_exponent, &(&*m % n), &lambda, n);
        let components = forged.components_mut();
        if components.len() != self.component_exponents.len() {
            return Err(Error::SchemeMismatch("this transform"));
        }
        for (c, &e) in components.into_iter().zip(self.component_exponents) {
            *c = self.scale(e, c, &lambda, n);
        }
        Ok(forged)
    }
}

fn expect_scheme(sig: &Signature, scheme: Scheme, name: &'static str) -> Result<()> {
    if sig.scheme() == scheme {
        Ok(())
    } else {
        Err(Error::SchemeMismatch(name))
    }
}

/// Re-pads a classic signature onto `target`: `[m', S² H(m')⁻¹, S]`.
pub fn forge_classic(sig: &Signature, target: &Message, public: &PublicKey) -> Result<Signature> {
    let Signature::Classic { root, .. } = sig else {
        return Err(Error::SchemeMismatch("classic forgery"));
    };
    let n = &public.n;
    let h = apply_redundancy(public.redundancy, target, n)?;
    let h_inv = mod_inverse(&h, n).ok_or(Error::NotInvertible)?;
    Ok(Signature::Classic {
        message: target.clone(),
        padding: root * root % n * h_inv % n,
        root: root.clone(),
    })
}

/// `[r²m, U, rS]`.
pub fn forge_classic_scaled(sig: &Signature, r: &BigUint, n: &BigUint) -> Result<Signature> {
    expect_scheme(sig, Scheme::Classic, "classic scaling")?;
    ForgeryTransform::for_scheme(Scheme::Classic).apply(sig, r, n)
}

/// `[r²m, u, rS]`.
pub fn forge_general_scaled(sig: &Signature, r: &BigUint, n: &BigUint) -> Result<Signature> {
    expect_scheme(sig, Scheme::General, "general scaling")?;
    ForgeryTransform::for_scheme(Scheme::General).apply(sig, r, n)
}

/// `[w⁴m, U, w²S, wT]`.
pub fn forge_variant1_scaled(sig: &Signature, w: &BigUint, n: &BigUint) -> Result<Signature> {
    expect_scheme(sig, Scheme::VariantI, "variant I scaling")?;
    ForgeryTransform::for_scheme(Scheme::VariantI).apply(sig, w, n)
}

/// `[λ²m, λF, R³]`.
pub fn forge_variant2_scaled(sig: &Signature, lambda: &BigUint, n: &BigUint) -> Result<Signature> {
    expect_scheme(sig, Scheme::VariantII, "variant II scaling")?;
    ForgeryTransform::for_scheme(Scheme::VariantII).apply(sig, lambda, n)
}

/// `[r²m, e, f, rS]`.
pub fn forge_rw_scaled(sig: &Signature, r: &BigUint, n: &BigUint) -> Result<Signature> {
    expect_scheme(sig, Scheme::RabinWilliams, "rabin-williams scaling")?;
    ForgeryTransform::for_scheme(Scheme::RabinWilliams).apply(sig, r, n)
}

/// Scales with the transform matching the signature's scheme.
pub fn forge_scaled(sig: &Signature, lambda: &BigUint, n: &BigUint) -> Result<Signature> {
    ForgeryTransform::for_scheme(sig.scheme()).apply(sig, lambda, n)
}

/// `[t² d, tF, R³]`.
pub fn forge_blind_scaled(
    bsig: &BlindSignature,
    t: &BigUint,
    n: &BigUint,
) -> Result<BlindSignature> {
    let t = t % n;
    if !t.gcd(n).is_one() {
        return Err(Error::NotInvertible);
    }
    Ok(BlindSignature {
        disguised: &t * &t % n * &bsig.disguised % n,
        masked_root: &t * &bsig.masked_root % n,
        r_cubed: bsig.r_cubed.clone(),
    })
}

/// What one blinding-attack trial achieved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttackOutcome {
    /// Recovered `±x` with `x² ≡ c`.
    Decrypted(BigUint),
    /// Recovered a nontrivial factor of `N`.
    Factored(BigUint),
    /// The oracle's answer carried no usable square root.
    Failed,
}

/// A signer the attacker may query with chosen disguised values.
pub trait BlindingOracle {
    /// The value the attacker gets back that is supposed to hide a square root
    /// of `disguised`.
    fn respond(&mut self, disguised: &BigUint) -> Result<BigUint>;
}

/// The naive blind signer: answers with a uniformly random root.
pub struct NaiveSigner<'k, R> {
    key: &'k PrivateKey,
    rng: R,
}

impl<'k, R: Rng> NaiveSigner<'k, R> {
    pub fn new(key: &'k PrivateKey, rng: R) -> Self {
        NaiveSigner { key, rng }
    }
}

impl<R: Rng> BlindingOracle for NaiveSigner<'_, R> {
    fn respond(&mut self, disguised: &BigUint) -> Result<BigUint> {
        blind::naive_blind_sign(self.key, disguised, &mut self.rng)
            .map_err(|e| Error::OracleRefused(e.to_string()))
    }
}

/// The Variant II blind signer: answers with `F = RS`.
pub struct HardenedSigner<'k, R> {
    key: &'k PrivateKey,
    rng: R,
}

impl<'k, R: Rng + CryptoRng> HardenedSigner<'k, R> {
    pub fn new(key: &'k PrivateKey, rng: R) -> Self {
        HardenedSigner { key, rng }
    }
}

impl<R: Rng + CryptoRng> BlindingOracle for HardenedSigner<'_, R> {
    fn respond(&mut self, disguised: &BigUint) -> Result<BigUint> {
        blind::blind_sign(self.key, disguised, &mut self.rng)
            .map(|bsig| bsig.masked_root)
            .map_err(|e| Error::OracleRefused(e.to_string()))
    }
}

/// Judges a candidate root `y` of `c` against a reference root `x`.
pub fn judge_candidate(
    y: &BigUint,
    ciphertext: &BigUint,
    reference: &BigUint,
    n: &BigUint,
) -> AttackOutcome {
    if y * y % n != ciphertext % n {
        return AttackOutcome::Failed;
    }
    let x = reference % n;
    let neg_x = (n - &x) % n;
    if *y == x || *y == neg_x {
        return AttackOutcome::Decrypted(y.clone());
    }
    let diff = if *y >= x { y - &x } else { &x - y };
    let g = diff.gcd(n);
    if !g.is_one() && g != *n && !g.is_zero() {
        AttackOutcome::Factored(g)
    } else {
        AttackOutcome::Failed
    }
}

/// One blinding-attack trial: submit `r²c`, unblind the reply by `r⁻¹`.
pub fn blinding_trial<O: BlindingOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &mut O,
    n: &BigUint,
    ciphertext: &BigUint,
    reference: &BigUint,
    rng: &mut R,
) -> Result<AttackOutcome> {
    let r = random_unit(n, rng);
    blinding_trial_with_factor(oracle, n, ciphertext, reference, &r)
}

pub fn blinding_trial_with_factor<O: BlindingOracle + ?Sized>(
    oracle: &mut O,
    n: &BigUint,
    ciphertext: &BigUint,
    reference: &BigUint,
    r: &BigUint,
) -> Result<AttackOutcome> {
    let r_inv = mod_inverse(r, n).ok_or(Error::NotInvertible)?;
    let submitted = r * r % n * ciphertext % n;
    let reply = oracle.respond(&submitted)?;
    let y = reply * r_inv % n;
    Ok(judge_candidate(&y, ciphertext, reference, n))
}

/// Runs `trials` independent blinding-attack trials against `oracle`.
///
/// `reference` is a known square root of `ciphertext`, used only to grade the
/// recovered roots (same root up to sign, or a factor of `N`).
pub fn rsa_blinding_attack<O: BlindingOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &mut O,
    n: &BigUint,
    ciphertext: &BigUint,
    reference: &BigUint,
    rng: &mut R,
    trials: usize,
) -> Result<AttackReport> {
    let outcomes = (0..trials)
        .map(|_| blinding_trial(oracle, n, ciphertext, reference, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(AttackReport { outcomes })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttackReport {
    pub outcomes: Vec<AttackOutcome>,
}

impl AttackReport {
    pub fn decrypted(&self) -> usize {
        self.count(|o| matches!(o, AttackOutcome::Decrypted(_)))
    }

    pub fn factored(&self) -> usize {
        self.count(|o| matches!(o, AttackOutcome::Factored(_)))
    }

    pub fn failed(&self) -> usize {
        self.count(|o| matches!(o, AttackOutcome::Failed))
    }

    fn count(&self, pred: impl Fn(&AttackOutcome) -> bool) -> usize {
        self.outcomes.iter().filter(|o| pred(o)).count()
    }
}

/// A deliberately weakened Variant II that publishes `R²` instead of `R³`.
/// Returns `(F, R²)`.
pub fn weakened_variant2_sign(
    key: &PrivateKey,
    message: &Message,
    r: &BigUint,
) -> Result<(BigUint, BigUint)> {
    require_blum(key, "variant II signing")?;
    let n = key.n();
    let h = signable_digest(key.public.redundancy, message, n)?;
    let (_, f, _) = masked_root(&key.secret, &h, r)?;
    Ok((f, r * r % n))
}

/// Recovers the hidden padding `U = F² / (R² H(m))` from a weakened signature.
pub fn recover_padding(
    public: &PublicKey,
    message: &Message,
    f: &BigUint,
    r_squared: &BigUint,
) -> Result<BigUint> {
    let n = &public.n;
    let h = apply_redundancy(public.redundancy, message, n)?;
    let denom_inv = mod_inverse(&(r_squared * h % n), n).ok_or(Error::NotInvertible)?;
    Ok(f * f % n * denom_inv % n)
}

/// `gcd(u + 1, N)` when `u` is a square root of unity other than ±1.
pub fn factor_from_unity_root(u: &BigUint, n: &BigUint) -> Option<BigUint> {
    let g = (u + 1u32).gcd(n);
    (!g.is_one() && g != *n).then_some(g)
}
