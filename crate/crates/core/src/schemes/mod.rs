//! Sign and verify for the five Rabin-type schemes.
//!
//! Verification runs through [`CountingRing`], which tallies the squarings and
//! general products performed in `Z_N` so reports can state the exact cost.
//! Evaluating the redundancy function is not counted.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::{CryptoRng, Rng};

use crate::error::{Error, Result};
use crate::hashing::Message;
use crate::keygen::{KeyKind, PrivateKey, PublicKey};

pub mod classic;
pub mod general;
pub mod rabin_williams;
pub mod variant1;
pub mod variant2;

/// Re-sampling budget for signer-side random factors.
pub(crate) const SIGN_ATTEMPTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Classic,
    General,
    VariantI,
    VariantII,
    RabinWilliams,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Classic,
        Scheme::General,
        Scheme::VariantI,
        Scheme::VariantII,
        Scheme::RabinWilliams,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Scheme::Classic => "classic",
            Scheme::General => "general",
            Scheme::VariantI => "variant1",
            Scheme::VariantII => "variant2",
            Scheme::RabinWilliams => "rw",
        }
    }

    /// The key kind that naturally hosts this scheme.
    pub fn preferred_key_kind(&self) -> KeyKind {
        match self {
            Scheme::General => KeyKind::General,
            Scheme::RabinWilliams => KeyKind::RabinWilliams,
            _ => KeyKind::Blum,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.tag() == s)
            .ok_or_else(|| format!("unknown scheme '{s}'"))
    }
}

/// A signed message. All numeric components are residues modulo `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Signature {
    /// `[m, U, S]` with `S² = H(m)U`.
    Classic {
        message: Message,
        padding: BigUint,
        root: BigUint,
    },
    /// `[m, u, S]` with `u` drawn from the public padding set.
    General {
        message: Message,
        padding: BigUint,
        root: BigUint,
    },
    /// `[m, U, S, T]` with `S² = H(m)U` and `T² = (U+1)S`.
    VariantI {
        message: Message,
        padding: BigUint,
        root: BigUint,
        witness: BigUint,
    },
    /// `[m, F, R³]` with `F = RS`.
    VariantII {
        message: Message,
        masked_root: BigUint,
        r_cubed: BigUint,
    },
    /// `[m, e, f, S]` with `efS² = H(m)`; `e` is stored as 1 or `N-1`.
    RabinWilliams {
        message: Message,
        e: BigUint,
        f: BigUint,
        root: BigUint,
    },
}

impl Signature {
    pub fn scheme(&self) -> Scheme {
        match self {
            Signature::Classic { .. } => Scheme::Classic,
            Signature::General { .. } => Scheme::General,
            Signature::VariantI { .. } => Scheme::VariantI,
            Signature::VariantII { .. } => Scheme::VariantII,
            Signature::RabinWilliams { .. } => Scheme::RabinWilliams,
        }
    }

    pub fn message(&self) -> &Message {
        match self {
            Signature::Classic { message, .. }
            | Signature::General { message, .. }
            | Signature::VariantI { message, .. }
            | Signature::VariantII { message, .. }
            | Signature::RabinWilliams { message, .. } => message,
        }
    }

    pub fn message_mut(&mut self) -> &mut Message {
        match self {
            Signature::Classic { message, .. }
            | Signature::General { message, .. }
            | Signature::VariantI { message, .. }
            | Signature::VariantII { message, .. }
            | Signature::RabinWilliams { message, .. } => message,
        }
    }

    /// Named numeric components after the message, in tuple order.
    pub fn components(&self) -> Vec<(&'static str, &BigUint)> {
        match self {
            Signature::Classic { padding, root, .. } | Signature::General { padding, root, .. } => {
                vec![("u", padding), ("s", root)]
            }
            Signature::VariantI {
                padding,
                root,
                witness,
                ..
            } => vec![("u", padding), ("s", root), ("t", witness)],
            Signature::VariantII {
                masked_root,
                r_cubed,
                ..
            } => vec![("f", masked_root), ("r3", r_cubed)],
            Signature::RabinWilliams { e, f, root, .. } => vec![("e", e), ("f", f), ("s", root)],
        }
    }

    pub fn components_mut(&mut self) -> Vec<&mut BigUint> {
        match self {
            Signature::Classic { padding, root, .. } | Signature::General { padding, root, .. } => {
                vec![padding, root]
            }
            Signature::VariantI {
                padding,
                root,
                witness,
                ..
            } => vec![padding, root, witness],
            Signature::VariantII {
                masked_root,
                r_cubed,
                ..
            } => vec![masked_root, r_cubed],
            Signature::RabinWilliams { e, f, root, .. } => vec![e, f, root],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub squares: u32,
    pub products: u32,
}

impl fmt::Display for OpCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let plural = |n: u32| if n == 1 { "" } else { "s" };
        write!(
            f,
            "{} square{}, {} product{}",
            self.squares,
            plural(self.squares),
            self.products,
            plural(self.products)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailedCheck {
    /// A component is not a residue in `[0, N)`.
    ComponentRange,
    /// The message cannot be fed to the key's redundancy function.
    MessageEncoding,
    /// The padding factor is not in the public padding set.
    Membership,
    /// `S² = H(m)U` (or `efS² = H(m)`) does not hold.
    RootEquation,
    /// `T² = (U+1)S` does not hold.
    WitnessEquation,
    /// The twelfth-power relation does not hold.
    PowerEquation,
    /// `e ∉ {1, -1}` or `f ∉ {1, 2}`.
    MultiplierRange,
    /// The key cannot verify this scheme (e.g. no padding set).
    KeyMismatch,
}

impl FailedCheck {
    pub fn label(&self) -> &'static str {
        match self {
            FailedCheck::ComponentRange => "component range",
            FailedCheck::MessageEncoding => "message encoding",
            FailedCheck::Membership => "membership",
            FailedCheck::RootEquation => "S equation",
            FailedCheck::WitnessEquation => "T equation",
            FailedCheck::PowerEquation => "power equation",
            FailedCheck::MultiplierRange => "multiplier range",
            FailedCheck::KeyMismatch => "key mismatch",
        }
    }
}

impl fmt::Display for FailedCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub valid: bool,
    pub failed_check: Option<FailedCheck>,
    pub op_counts: OpCounts,
}

impl VerifyReport {
    pub(crate) fn from_ring(ring: CountingRing<'_>, failed: Option<FailedCheck>) -> Self {
        VerifyReport {
            valid: failed.is_none(),
            failed_check: failed,
            op_counts: ring.counts(),
        }
    }

    pub(crate) fn rejected(check: FailedCheck) -> Self {
        VerifyReport {
            valid: false,
            failed_check: Some(check),
            op_counts: OpCounts::default(),
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failed_check {
            None => write!(f, "VALID ({})", self.op_counts),
            Some(check) => write!(f, "INVALID {check} ({})", self.op_counts),
        }
    }
}

/// Arithmetic in `Z_N` that counts squarings and products.
pub struct CountingRing<'a> {
    n: &'a BigUint,
    counts: OpCounts,
}

impl<'a> CountingRing<'a> {
    pub fn new(n: &'a BigUint) -> Self {
        CountingRing {
            n,
            counts: OpCounts::default(),
        }
    }

    pub fn square(&mut self, x: &BigUint) -> BigUint {
        self.counts.squares += 1;
        x * x % self.n
    }

    pub fn mul(&mut self, x: &BigUint, y: &BigUint) -> BigUint {
        self.counts.products += 1;
        x * y % self.n
    }

    /// Addition is free.
    pub fn add_small(&self, x: &BigUint, k: u32) -> BigUint {
        (x + k) % self.n
    }

    pub fn counts(&self) -> OpCounts {
        self.counts
    }
}

/// True when every numeric component lies in `[0, N)`.
pub(crate) fn components_in_range(sig: &Signature, n: &BigUint) -> bool {
    sig.components().iter().all(|(_, v)| *v < n)
}

/// Signs with the scheme-specific routine.
pub fn sign<R: Rng + CryptoRng + ?Sized>(
    scheme: Scheme,
    key: &PrivateKey,
    message: &Message,
    rng: &mut R,
) -> Result<Signature> {
    match scheme {
        Scheme::Classic => classic::sign(key, message, rng),
        Scheme::General => general::sign(key, message),
        Scheme::VariantI => variant1::sign(key, message, rng),
        Scheme::VariantII => variant2::sign(key, message, rng),
        Scheme::RabinWilliams => rabin_williams::sign(key, message),
    }
}

/// Verifies any signature against a public key.
pub fn verify(public: &PublicKey, sig: &Signature) -> VerifyReport {
    match sig {
        Signature::Classic { .. } => classic::verify(public, sig),
        Signature::General { .. } => general::verify(public, sig),
        Signature::VariantI { .. } => variant1::verify(public, sig),
        Signature::VariantII { .. } => variant2::verify(public, sig),
        Signature::RabinWilliams { .. } => rabin_williams::verify(public, sig),
    }
}

pub(crate) fn require_blum(key: &PrivateKey, what: &'static str) -> Result<()> {
    if key.secret.is_blum() {
        Ok(())
    } else {
        Err(Error::WrongKeyKind(what))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_tags_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.tag().parse::<Scheme>().unwrap(), s);
        }
        assert!("kurosawa".parse::<Scheme>().is_err());
    }

    #[test]
    fn op_counts_display() {
        let c = OpCounts {
            squares: 7,
            products: 3,
        };
        assert_eq!(c.to_string(), "7 squares, 3 products");
        let c = OpCounts {
            squares: 1,
            products: 1,
        };
        assert_eq!(c.to_string(), "1 square, 1 product");
    }
}
