//! Prime and key-pair generation, and construction of the public padding set.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{CryptoRng, Rng};

use crate::error::{Error, Result};
use crate::hashing::Redundancy;
use crate::numtheory::{is_probable_prime, jacobi_u, random_unit, JacobiClass, SecretModulus};

/// Re-sampling budget for the padding multipliers before fresh `a`, `b` are drawn.
const PADDING_ATTEMPTS: usize = 64;
/// Upper bound for the small Jacobi-class representatives `a1, a2, b1, b2`.
const SMALL_REPRESENTATIVE_BOUND: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimeConstraint {
    None,
    ThreeMod4,
    ThreeMod8,
    SevenMod8,
}

impl PrimeConstraint {
    fn admits(&self, p: &BigUint) -> bool {
        let low = p.iter_u32_digits().next().unwrap_or(0);
        match self {
            PrimeConstraint::None => true,
            PrimeConstraint::ThreeMod4 => low % 4 == 3,
            PrimeConstraint::ThreeMod8 => low % 8 == 3,
            PrimeConstraint::SevenMod8 => low % 8 == 7,
        }
    }

    /// Forces the low bits of an odd candidate to satisfy the constraint.
    fn shape(&self, candidate: &mut BigUint) {
        candidate.set_bit(0, true);
        match self {
            PrimeConstraint::None => {}
            PrimeConstraint::ThreeMod4 => candidate.set_bit(1, true),
            PrimeConstraint::ThreeMod8 => {
                candidate.set_bit(1, true);
                candidate.set_bit(2, false);
            }
            PrimeConstraint::SevenMod8 => {
                candidate.set_bit(1, true);
                candidate.set_bit(2, true);
            }
        }
    }
}

/// A random prime of exactly `bits` bits satisfying `constraint`.
pub fn gen_prime<R: Rng + CryptoRng + ?Sized>(
    bits: u64,
    constraint: PrimeConstraint,
    rng: &mut R,
) -> BigUint {
    assert!(bits >= 8, "primes need at least 8 bits");
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        constraint.shape(&mut candidate);
        debug_assert!(constraint.admits(&candidate));
        if is_probable_prime(&candidate, rng) {
            return candidate;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KeyKind {
    /// Any two distinct odd primes; carries a padding set.
    General,
    /// Both primes ≡ 3 mod 4.
    Blum,
    /// One prime ≡ 3 mod 8, the other ≡ 7 mod 8.
    RabinWilliams,
}

impl fmt::Display for KeyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyKind::General => "general",
            KeyKind::Blum => "blum",
            KeyKind::RabinWilliams => "rw",
        })
    }
}

impl FromStr for KeyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "general" => Ok(KeyKind::General),
            "blum" => Ok(KeyKind::Blum),
            "rw" | "rabin-williams" => Ok(KeyKind::RabinWilliams),
            other => Err(format!("unknown key kind '{other}'")),
        }
    }
}

/// The four public padding multipliers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddingSet {
    pub members: [BigUint; 4],
}

/// Reasons a padding set is unsafe to publish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PaddingDefect {
    NotUnit(usize),
    RootOfUnity(usize),
    DifferenceShareFactor(usize, usize),
    MissingClass(JacobiClass),
}

impl PaddingSet {
    pub fn contains(&self, u: &BigUint) -> bool {
        self.members.iter().any(|m| m == u)
    }

    pub fn classes(&self, secret: &SecretModulus) -> Result<[JacobiClass; 4]> {
        let mut out = [JacobiClass::new(0, 0); 4];
        for (slot, u) in out.iter_mut().zip(&self.members) {
            *slot = JacobiClass::of(u, secret)?;
        }
        Ok(out)
    }

    /// The member whose class equals `class`; multiplying a value of that
    /// class by it yields a quadratic residue.
    pub fn select(&self, class: JacobiClass, secret: &SecretModulus) -> Result<&BigUint> {
        let classes = self.classes(secret)?;
        self.members
            .iter()
            .zip(classes)
            .find(|(_, c)| *c == class)
            .map(|(u, _)| u)
            .ok_or(Error::InvalidKey("padding set lacks a Jacobi class".into()))
    }

    /// Every safety condition the signer checks before publishing.
    pub fn defects(&self, secret: &SecretModulus) -> Vec<PaddingDefect> {
        let n = &secret.n;
        let mut defects = Vec::new();
        for (i, u) in self.members.iter().enumerate() {
            if !u.gcd(n).is_one() {
                defects.push(PaddingDefect::NotUnit(i));
            }
            if (u * u % n).is_one() {
                defects.push(PaddingDefect::RootOfUnity(i));
            }
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                let (a, b) = (&self.members[i], &self.members[j]);
                let diff = if a >= b { a - b } else { b - a };
                if !diff.gcd(n).is_one() {
                    defects.push(PaddingDefect::DifferenceShareFactor(i, j));
                }
            }
        }
        let classes: Vec<_> = self
            .members
            .iter()
            .map(|u| JacobiClass::of(u, secret).unwrap_or(JacobiClass::new(0, 0)))
            .collect();
        for class in JacobiClass::ALL {
            if !classes.contains(&class) {
                defects.push(PaddingDefect::MissingClass(class));
            }
        }
        defects
    }

    pub fn is_safe(&self, secret: &SecretModulus) -> bool {
        self.defects(secret).is_empty()
    }
}

/// Forms `{r1²(a1ψ1+b1ψ2), r2²(a1ψ1+b2ψ2), r3²(a2ψ1+b1ψ2), r4²(a2ψ1+b2ψ2)}`
/// in that order, without any safety check.
pub fn padding_set_from(
    secret: &SecretModulus,
    a: [&BigUint; 2],
    b: [&BigUint; 2],
    r: [&BigUint; 4],
) -> PaddingSet {
    let n = &secret.n;
    let pairs = [(a[0], b[0]), (a[0], b[1]), (a[1], b[0]), (a[1], b[1])];
    let members = std::array::from_fn(|i| {
        let (x, y) = pairs[i];
        let base = secret.combine(&(x % &secret.p), &(y % &secret.q));
        r[i] * r[i] % n * base % n
    });
    PaddingSet { members }
}

fn small_with_symbol<R: Rng + ?Sized>(modulus: &BigUint, symbol: i8, rng: &mut R) -> BigUint {
    let bound = BigUint::from(SMALL_REPRESENTATIVE_BOUND);
    loop {
        let candidate = rng.gen_biguint_range(&BigUint::one(), &bound);
        if jacobi_u(&candidate, modulus).ok() == Some(symbol) {
            return candidate;
        }
    }
}

/// Builds a padding set that passes every safety check, published in random order.
///
/// Fails only when a prime is too small to give four distinct nonzero residues.
pub fn build_padding_set<R: Rng + CryptoRng + ?Sized>(
    secret: &SecretModulus,
    rng: &mut R,
) -> Result<PaddingSet> {
    let five = BigUint::from(5u32);
    if secret.p < five || secret.q < five {
        return Err(Error::InvalidKey(
            "primes too small for a padding set".into(),
        ));
    }
    loop {
        let a1 = small_with_symbol(&secret.p, 1, rng);
        let a2 = small_with_symbol(&secret.p, -1, rng);
        let b1 = small_with_symbol(&secret.q, 1, rng);
        let b2 = small_with_symbol(&secret.q, -1, rng);

        for _ in 0..PADDING_ATTEMPTS {
            let r: [BigUint; 4] = std::array::from_fn(|_| random_unit(&secret.n, rng));
            let distinct = (0..4).all(|i| ((i + 1)..4).all(|j| r[i] != r[j]));
            if !distinct {
                continue;
            }
            let mut set =
                padding_set_from(secret, [&a1, &a2], [&b1, &b2], [&r[0], &r[1], &r[2], &r[3]]);
            if set.is_safe(secret) {
                set.members.shuffle(rng);
                return Ok(set);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub kind: KeyKind,
    pub n: BigUint,
    pub redundancy: Redundancy,
    pub padding: Option<PaddingSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivateKey {
    pub public: PublicKey,
    pub secret: SecretModulus,
}

impl PrivateKey {
    /// Assembles a key from known primes, checking the kind's congruence
    /// conditions. General keys get a freshly built padding set.
    pub fn from_primes<R: Rng + CryptoRng + ?Sized>(
        kind: KeyKind,
        p: BigUint,
        q: BigUint,
        redundancy: Redundancy,
        rng: &mut R,
    ) -> Result<Self> {
        let secret = SecretModulus::new(p, q, rng)?;
        let padding = match kind {
            KeyKind::General => Some(build_padding_set(&secret, rng)?),
            _ => None,
        };
        Self::assemble(kind, secret, redundancy, padding)
    }

    /// Assembles a key from parts; the padding set is taken as given.
    pub fn assemble(
        kind: KeyKind,
        secret: SecretModulus,
        redundancy: Redundancy,
        padding: Option<PaddingSet>,
    ) -> Result<Self> {
        check_kind(kind, &secret)?;
        match (kind, &padding) {
            (KeyKind::General, None) => {
                return Err(Error::InvalidKey("general keys need a padding set".into()))
            }
            (KeyKind::Blum | KeyKind::RabinWilliams, Some(_)) => {
                return Err(Error::InvalidKey(
                    "only general keys carry a padding set".into(),
                ))
            }
            _ => {}
        }
        Ok(PrivateKey {
            public: PublicKey {
                kind,
                n: secret.n.clone(),
                redundancy,
                padding,
            },
            secret,
        })
    }

    pub fn kind(&self) -> KeyKind {
        self.public.kind
    }

    pub fn n(&self) -> &BigUint {
        &self.secret.n
    }
}

fn check_kind(kind: KeyKind, secret: &SecretModulus) -> Result<()> {
    let (p, q) = (&secret.p, &secret.q);
    let ok = match kind {
        KeyKind::General => true,
        KeyKind::Blum => secret.is_blum(),
        KeyKind::RabinWilliams => {
            let (t, s) = (PrimeConstraint::ThreeMod8, PrimeConstraint::SevenMod8);
            (t.admits(p) && s.admits(q)) || (s.admits(p) && t.admits(q))
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidKey(format!(
            "primes do not satisfy the {kind} congruences"
        )))
    }
}

/// Generates a key pair with `bits`-bit primes.
pub fn gen_keypair<R: Rng + CryptoRng + ?Sized>(
    kind: KeyKind,
    bits: u64,
    redundancy: Redundancy,
    rng: &mut R,
) -> PrivateKey {
    let (cp, cq) = match kind {
        KeyKind::General => (PrimeConstraint::None, PrimeConstraint::None),
        KeyKind::Blum => (PrimeConstraint::ThreeMod4, PrimeConstraint::ThreeMod4),
        KeyKind::RabinWilliams => (PrimeConstraint::ThreeMod8, PrimeConstraint::SevenMod8),
    };
    loop {
        let p = gen_prime(bits, cp, rng);
        let q = gen_prime(bits, cq, rng);
        if p == q {
            continue;
        }
        let secret = SecretModulus::from_primes_unchecked(p, q).expect("distinct primes");
        let padding = match kind {
            KeyKind::General => match build_padding_set(&secret, rng) {
                Ok(set) => Some(set),
                Err(_) => continue,
            },
            _ => None,
        };
        return PrivateKey::assemble(kind, secret, redundancy, padding).expect("constraints hold");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn ubig(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn primes_meet_constraints() {
        let mut rng = StdRng::seed_from_u64(7);
        for (c, m, r) in [
            (PrimeConstraint::ThreeMod4, 4u32, 3u32),
            (PrimeConstraint::ThreeMod8, 8, 3),
            (PrimeConstraint::SevenMod8, 8, 7),
        ] {
            for bits in [8u64, 16, 64] {
                let p = gen_prime(bits, c, &mut rng);
                assert_eq!(&p % m, ubig(r as u64));
                assert_eq!(p.bits(), bits);
                assert!(is_probable_prime(&p, &mut rng));
            }
        }
        let p = gen_prime(8, PrimeConstraint::None, &mut rng);
        assert_eq!(p.bits(), 8);
        assert!(is_probable_prime(&ubig(227), &mut rng) && ubig(227) % 4u32 == ubig(3));
        assert!(is_probable_prime(&ubig(239), &mut rng) && ubig(239) % 8u32 == ubig(7));
    }

    #[test]
    fn keypairs_meet_kind_constraints() {
        let mut rng = StdRng::seed_from_u64(11);
        let blum = gen_keypair(KeyKind::Blum, 64, Redundancy::Identity, &mut rng);
        assert_eq!(&blum.secret.p % 4u32, ubig(3));
        assert_eq!(&blum.secret.q % 4u32, ubig(3));
        assert!(blum.public.padding.is_none());

        let rw = gen_keypair(KeyKind::RabinWilliams, 64, Redundancy::Identity, &mut rng);
        let mut residues = [&rw.secret.p % 8u32, &rw.secret.q % 8u32];
        residues.sort();
        assert_eq!(residues, [ubig(3), ubig(7)]);

        let general = gen_keypair(KeyKind::General, 64, Redundancy::Quadratic, &mut rng);
        assert!(general
            .public
            .padding
            .as_ref()
            .unwrap()
            .is_safe(&general.secret));
    }

    #[test]
    fn oracle_padding_set_matches_hand_computation() {
        let secret = SecretModulus::from_primes_unchecked(ubig(7), ubig(11)).unwrap();
        let one = ubig(1);
        let set = padding_set_from(
            &secret,
            [&ubig(2), &ubig(3)],
            [&ubig(3), &ubig(2)],
            [&one, &one, &one, &one],
        );
        assert_eq!(set.members, [ubig(58), ubig(2), ubig(3), ubig(24)]);
        let classes = set.classes(&secret).unwrap();
        assert_eq!(classes, JacobiClass::ALL);
        // 58 - 2 = 56 = 7 * 8: this oracle set would be rejected for publication
        assert!(set
            .defects(&secret)
            .contains(&PaddingDefect::DifferenceShareFactor(0, 1)));
    }

    #[test]
    fn padding_set_covers_every_unit_exactly_once_mod_77() {
        let mut rng = StdRng::seed_from_u64(3);
        let secret = SecretModulus::from_primes_unchecked(ubig(7), ubig(11)).unwrap();
        let set = build_padding_set(&secret, &mut rng).unwrap();
        assert!(set.is_safe(&secret));
        let squares: std::collections::HashSet<u64> = (1..77u64).map(|x| x * x % 77).collect();
        for z in 1..77u64 {
            if z % 7 == 0 || z % 11 == 0 {
                continue;
            }
            let hits = set
                .members
                .iter()
                .filter(|u| {
                    let uz = (*u * ubig(z) % 77u32).iter_u64_digits().next().unwrap_or(0);
                    squares.contains(&uz)
                })
                .count();
            assert_eq!(hits, 1, "z = {z}");
        }
    }

    #[test]
    fn assemble_rejects_mismatched_material() {
        let secret = SecretModulus::from_primes_unchecked(ubig(5), ubig(11)).unwrap();
        assert!(
            PrivateKey::assemble(KeyKind::Blum, secret.clone(), Redundancy::Identity, None)
                .is_err()
        );
        assert!(
            PrivateKey::assemble(KeyKind::General, secret, Redundancy::Identity, None).is_err()
        );
        let rw = SecretModulus::from_primes_unchecked(ubig(11), ubig(7)).unwrap();
        assert!(
            PrivateKey::assemble(KeyKind::RabinWilliams, rw, Redundancy::Identity, None).is_ok()
        );
    }

    #[test]
    fn from_primes_rejects_composites() {
        let mut rng = StdRng::seed_from_u64(1);
        assert!(PrivateKey::from_primes(
            KeyKind::Blum,
            ubig(7),
            ubig(15),
            Redundancy::Identity,
            &mut rng
        )
        .is_err());
        assert!(PrivateKey::from_primes(
            KeyKind::Blum,
            ubig(7),
            ubig(7),
            Redundancy::Identity,
            &mut rng
        )
        .is_err());
    }
}
