//! Brute-force ground truth over small rings `Z_N`, `N ≤ 10⁴`.
//!
//! Everything here is computed by exhaustive enumeration with plain `u64`
//! arithmetic, independently of the big-integer code paths it is used to check.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{CryptoRng, Rng};

use crate::error::{Error, Result};
use crate::hashing::{Message, Redundancy};
use crate::keygen::{KeyKind, PrivateKey};
use crate::numtheory::{jacobi_u, sqrt_mod_pq, sqrt_of_unity_nontrivial, SecretModulus};
use crate::schemes::{self, Scheme, Signature};

pub const MAX_RING: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmallRing {
    pub p: u64,
    pub q: u64,
    pub n: u64,
}

fn is_small_prime(x: u64) -> bool {
    x >= 2
        && (2..x)
            .take_while(|d| d * d <= x)
            .all(|d| !x.is_multiple_of(d))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % n;
        }
        base = base * base % n;
        exp >>= 1;
    }
    acc
}

impl SmallRing {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == q
            || p.is_multiple_of(2)
            || q.is_multiple_of(2)
            || !is_small_prime(p)
            || !is_small_prime(q)
        {
            return Err(Error::InvalidKey(
                "ring needs two distinct odd primes".into(),
            ));
        }
        let n = p.checked_mul(q).ok_or(Error::RingTooLarge)?;
        if n > MAX_RING {
            return Err(Error::RingTooLarge);
        }
        Ok(SmallRing { p, q, n })
    }

    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (1..self.n).filter(move |&x| gcd(x, self.n) == 1)
    }

    pub fn is_unit(&self, x: u64) -> bool {
        gcd(x % self.n, self.n) == 1
    }

    /// Quadratic residues among the units.
    pub fn qr_set(&self) -> BTreeSet<u64> {
        self.units().map(|x| x * x % self.n).collect()
    }

    /// Every `x` in `[0, N)` with `x² ≡ a`.
    pub fn all_roots(&self, a: u64) -> Vec<u64> {
        let a = a % self.n;
        (0..self.n).filter(|x| x * x % self.n == a).collect()
    }

    /// Residuosity of `x` modulo each prime, by squaring.
    pub fn residue_class(&self, x: u64) -> (bool, bool) {
        let is_sq = |m: u64| (1..m).any(|y| y * y % m == x % m);
        (is_sq(self.p), is_sq(self.q))
    }

    fn redundancy(&self, spec: Redundancy, m: u64) -> Option<u64> {
        match spec {
            Redundancy::Identity => Some(m % self.n),
            Redundancy::Quadratic => Some(m % self.n * ((m + 1) % self.n) % self.n),
            Redundancy::Digest(_) => None,
        }
    }

    pub fn secret(&self) -> Result<SecretModulus> {
        SecretModulus::from_primes_unchecked(BigUint::from(self.p), BigUint::from(self.q))
    }
}

impl fmt::Display for SmallRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={}={}*{}", self.n, self.p, self.q)
    }
}

/// Result of an exhaustive run.
#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub label: String,
    pub checked: usize,
    pub skipped: usize,
    pub perturbations: usize,
    pub mismatches: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.checked > 0
    }

    fn fail(&mut self, what: String) {
        self.mismatches.push(what);
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} checked, {} skipped, {} perturbations, {} mismatches",
            if self.passed() { "PASS" } else { "FAIL" },
            self.label,
            self.checked,
            self.skipped,
            self.perturbations,
            self.mismatches.len()
        )
    }
}

fn small(x: &BigUint) -> u64 {
    x.to_u64().expect("small ring element")
}

/// Cross-checks residuosity, root extraction and roots of unity against
/// enumeration.
pub fn check_numtheory(ring: SmallRing) -> Result<OracleReport> {
    let secret = ring.secret()?;
    let mut report = OracleReport {
        label: format!("numtheory {ring}"),
        ..Default::default()
    };
    let qr = ring.qr_set();
    for a in ring.units() {
        report.checked += 1;
        let big_a = BigUint::from(a);
        let by_symbols = jacobi_u(&big_a, &secret.p)? == 1 && jacobi_u(&big_a, &secret.q)? == 1;
        if by_symbols != qr.contains(&a) {
            report.fail(format!("residuosity of {a}"));
        }
        match sqrt_mod_pq(&big_a, &secret) {
            Ok(roots) => {
                let got: Vec<u64> = roots.iter().map(|r| small(&r.value)).collect();
                let classes: BTreeSet<_> = roots.iter().map(|r| r.class).collect();
                if got != ring.all_roots(a) || got.len() != 4 {
                    report.fail(format!("roots of {a}: {got:?}"));
                }
                if secret.is_blum() && classes.len() != 4 {
                    report.fail(format!("root classes of {a}"));
                }
            }
            Err(Error::NonResidue) if !qr.contains(&a) => {}
            Err(e) => report.fail(format!("sqrt of {a}: {e}")),
        }
    }
    let mut unity: Vec<u64> = sqrt_of_unity_nontrivial(&secret)
        .iter()
        .map(small)
        .collect();
    unity.extend([1, ring.n - 1]);
    unity.sort();
    if unity != ring.all_roots(1) {
        report.fail(format!("roots of unity {unity:?}"));
    }
    Ok(report)
}

/// Brute-force evaluation of a scheme's defining equations.
fn predicate(ring: &SmallRing, sig: &Signature, h: u64, padding_set: &[u64]) -> bool {
    let n = ring.n;
    let c: Vec<u64> = sig
        .components()
        .iter()
        .map(|(_, v)| v.to_u64().unwrap_or(u64::MAX))
        .collect();
    if c.iter().any(|&v| v >= n) {
        return false;
    }
    match sig.scheme() {
        Scheme::Classic => c[1] * c[1] % n == h * c[0] % n,
        Scheme::General => padding_set.contains(&c[0]) && c[1] * c[1] % n == h * c[0] % n,
        Scheme::VariantI => {
            let (u, s, t) = (c[0], c[1], c[2]);
            t * t % n == (u + 1) % n * s % n && s * s % n == h * u % n
        }
        Scheme::VariantII => pow_mod(c[0], 12, n) == pow_mod(c[1], 4, n) * pow_mod(h, 6, n) % n,
        Scheme::RabinWilliams => {
            let (e, f, s) = (c[0], c[1], c[2]);
            (e == 1 || e == n - 1) && (f == 1 || f == 2) && e * f % n * (s * s % n) % n == h
        }
    }
}

/// Signs every signable message of the ring and checks, against enumeration:
/// the signature verifies, the padding choice is the predicted one, and
/// `±1` perturbations of each field are judged the same way by the verifier
/// and by the brute-force predicate.
pub fn check_scheme_exhaustive<R: Rng + CryptoRng + ?Sized>(
    scheme: Scheme,
    ring: SmallRing,
    redundancy: Redundancy,
    rng: &mut R,
) -> Result<OracleReport> {
    if matches!(redundancy, Redundancy::Digest(_)) {
        return Err(Error::RedundancyMismatch(redundancy.to_string()));
    }
    let kind = scheme.preferred_key_kind();
    let key = PrivateKey::from_primes(
        kind,
        BigUint::from(ring.p),
        BigUint::from(ring.q),
        redundancy,
        rng,
    )?;
    if matches!(kind, KeyKind::Blum) && !key.secret.is_blum() {
        return Err(Error::WrongKeyKind("blum schemes"));
    }
    let padding_set: Vec<u64> = key
        .public
        .padding
        .as_ref()
        .map(|s| s.members.iter().map(small).collect())
        .unwrap_or_default();
    let qr = ring.qr_set();
    let unity = ring.all_roots(1);
    let mut report = OracleReport {
        label: format!("{scheme} {ring} {redundancy}"),
        ..Default::default()
    };
    let n = ring.n;

    for m in 0..n {
        let h = ring.redundancy(redundancy, m).expect("non-digest");
        if h == 0 || !ring.is_unit(h) {
            report.skipped += 1;
            if schemes::sign(scheme, &key, &Message::int(m), rng).is_ok() {
                report.fail(format!("m={m}: unsignable message was signed"));
            }
            continue;
        }
        report.checked += 1;
        let sig = match schemes::sign(scheme, &key, &Message::int(m), rng) {
            Ok(sig) => sig,
            Err(e) => {
                report.fail(format!("m={m}: signing failed: {e}"));
                continue;
            }
        };
        if !schemes::verify(&key.public, &sig).valid || !predicate(&ring, &sig, h, &padding_set) {
            report.fail(format!("m={m}: honest signature rejected"));
        }

        let c: Vec<u64> = sig.components().iter().map(|(_, v)| small(v)).collect();
        let prediction_ok = match scheme {
            Scheme::Classic => ring.residue_class(c[0]) == ring.residue_class(h),
            Scheme::General => {
                let fitting: Vec<u64> = padding_set
                    .iter()
                    .copied()
                    .filter(|u| qr.contains(&(h * u % n)))
                    .collect();
                fitting == vec![c[0]]
            }
            Scheme::VariantI => {
                let (u, s) = (c[0], c[1]);
                let fitting: Vec<u64> = ring
                    .all_roots(h * u % n)
                    .into_iter()
                    .filter(|r| qr.contains(&((u + 1) % n * r % n)))
                    .collect();
                fitting == vec![s]
            }
            Scheme::VariantII => unity.iter().filter(|u| qr.contains(&(h * *u % n))).count() == 1,
            Scheme::RabinWilliams => {
                let fitting: Vec<(u64, u64)> = [(1, 1), (n - 1, 1), (1, 2), (n - 1, 2)]
                    .into_iter()
                    .filter(|&(e, f)| {
                        qr.contains(&(h * pow_mod(e * f % n, totient_inverse_exp(&ring), n) % n))
                    })
                    .collect();
                fitting == vec![(c[0], c[1])]
            }
        };
        if !prediction_ok {
            report.fail(format!("m={m}: padding choice differs from prediction"));
        }

        for field in 0..=c.len() {
            for delta in [1, n - 1] {
                let mut perturbed = sig.clone();
                let new_h = if field == 0 {
                    let Message::Int(mm) = perturbed.message_mut() else {
                        unreachable!()
                    };
                    let shifted = (m + delta) % n;
                    *mm = BigUint::from(shifted);
                    ring.redundancy(redundancy, shifted).expect("non-digest")
                } else {
                    let comp = &mut perturbed.components_mut()[field - 1];
                    **comp = BigUint::from((small(comp) + delta) % n);
                    h
                };
                report.perturbations += 1;
                let verdict = schemes::verify(&key.public, &perturbed).valid;
                if verdict != predicate(&ring, &perturbed, new_h, &padding_set) {
                    report.fail(format!("m={m}: perturbation of field {field} misjudged"));
                }
            }
        }
    }
    Ok(report)
}

/// Exponent `φ(N) - 1`, so that `x^e ≡ x⁻¹` for units.
fn totient_inverse_exp(ring: &SmallRing) -> u64 {
    (ring.p - 1) * (ring.q - 1) - 1
}

/// Rings used by the built-in self check.
pub fn builtin_rings() -> Vec<SmallRing> {
    [(3, 5), (3, 7), (7, 11), (11, 19)]
        .into_iter()
        .map(|(p, q)| SmallRing::new(p, q).expect("valid ring"))
        .collect()
}

/// Runs the full oracle suite on the built-in rings.
pub fn selfcheck<R: Rng + CryptoRng + ?Sized>(rng: &mut R) -> Result<Vec<OracleReport>> {
    let mut reports = Vec::new();
    for ring in builtin_rings() {
        reports.push(check_numtheory(ring)?);
    }
    let blum = [SmallRing::new(7, 11)?, SmallRing::new(11, 19)?];
    let rw = [SmallRing::new(11, 7)?, SmallRing::new(11, 23)?];
    for redundancy in [Redundancy::Identity, Redundancy::Quadratic] {
        for ring in blum {
            for scheme in [
                Scheme::Classic,
                Scheme::General,
                Scheme::VariantI,
                Scheme::VariantII,
            ] {
                reports.push(check_scheme_exhaustive(scheme, ring, redundancy, rng)?);
            }
        }
        for ring in rw {
            reports.push(check_scheme_exhaustive(
                Scheme::RabinWilliams,
                ring,
                redundancy,
                rng,
            )?);
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn qr_set_examples() {
        let r15 = SmallRing::new(3, 5).unwrap();
        assert_eq!(r15.qr_set(), [1, 4].into());
        let r77 = SmallRing::new(7, 11).unwrap();
        let qr = r77.qr_set();
        for a in [4, 9, 15, 16, 23, 25, 36, 60, 64, 1] {
            assert!(qr.contains(&a));
        }
        assert_eq!(qr.len(), 15);
    }

    #[test]
    fn all_roots_examples() {
        let r77 = SmallRing::new(7, 11).unwrap();
        assert_eq!(r77.all_roots(4), vec![2, 9, 68, 75]);
        assert_eq!(r77.all_roots(1), vec![1, 34, 43, 76]);
        assert_eq!(r77.all_roots(0), vec![0]);
    }

    #[test]
    fn ring_bounds() {
        assert!(matches!(SmallRing::new(101, 103), Err(Error::RingTooLarge)));
        assert!(SmallRing::new(7, 7).is_err());
        assert!(SmallRing::new(9, 7).is_err());
    }

    #[test]
    fn numtheory_matches_enumeration() {
        for ring in builtin_rings() {
            let report = check_numtheory(ring).unwrap();
            assert!(report.passed(), "{report}: {:?}", report.mismatches);
        }
    }

    #[test]
    fn schemes_match_enumeration_mod_77() {
        let mut rng = StdRng::seed_from_u64(77);
        let ring = SmallRing::new(7, 11).unwrap();
        for scheme in [
            Scheme::Classic,
            Scheme::General,
            Scheme::VariantI,
            Scheme::VariantII,
        ] {
            let report =
                check_scheme_exhaustive(scheme, ring, Redundancy::Identity, &mut rng).unwrap();
            assert!(report.passed(), "{report}: {:?}", report.mismatches);
            assert_eq!(report.checked, 60);
        }
        let rw = SmallRing::new(11, 7).unwrap();
        let report =
            check_scheme_exhaustive(Scheme::RabinWilliams, rw, Redundancy::Identity, &mut rng)
                .unwrap();
        assert!(report.passed(), "{report}: {:?}", report.mismatches);
    }

    #[test]
    fn digest_redundancy_is_not_enumerable() {
        let mut rng = StdRng::seed_from_u64(1);
        let ring = SmallRing::new(7, 11).unwrap();
        assert!(check_scheme_exhaustive(
            Scheme::VariantII,
            ring,
            Redundancy::Digest(crate::hashing::DigestAlg::Sha256),
            &mut rng
        )
        .is_err());
    }
}
