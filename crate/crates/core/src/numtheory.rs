//! Modular arithmetic over `Z_N` with `N = pq`: Jacobi symbols, extended
//! Euclid, CRT idempotents and square roots modulo a prime and modulo `pq`.

use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{CryptoRng, Rng};

use crate::error::{Error, Result};

/// Miller-Rabin rounds; each round errs with probability at most 1/4.
const MILLER_RABIN_ROUNDS: usize = 40;

const SMALL_PRIMES: [u32; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)` and `g > 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_x, mut x) = (BigInt::one(), BigInt::zero());
    let (mut old_y, mut y) = (BigInt::zero(), BigInt::one());

    while !r.is_zero() {
        let quotient = old_r.div_floor(&r);
        let next_r = &old_r - &quotient * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_x = &old_x - &quotient * &x;
        old_x = std::mem::replace(&mut x, next_x);
        let next_y = &old_y - &quotient * &y;
        old_y = std::mem::replace(&mut y, next_y);
    }

    if old_r.is_negative() {
        (-old_r, -old_x, -old_y)
    } else {
        (old_r, old_x, old_y)
    }
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn mod_inverse(a: &BigUint, n: &BigUint) -> Option<BigUint> {
    if n.is_zero() {
        return None;
    }
    let a = BigInt::from(a % n);
    let n_signed = BigInt::from(n.clone());
    let (g, x, _) = ext_gcd(&a, &n_signed);
    if !g.is_one() {
        return None;
    }
    x.mod_floor(&n_signed).to_biguint()
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
///
/// For prime `n` this is the Legendre symbol. The result is 0 exactly when
/// `gcd(a, n) > 1`.
pub fn jacobi(a: &BigInt, n: &BigUint) -> Result<i8> {
    if n.is_zero() || n.is_even() {
        return Err(Error::InvalidModulus);
    }
    let modulus = BigInt::from(n.clone());
    let mut a = a.mod_floor(&modulus).magnitude().clone();
    let mut n = n.clone();
    let mut sign = 1i8;

    while !a.is_zero() {
        let twos = a.trailing_zeros().unwrap_or(0);
        if twos > 0 {
            a >>= twos;
            let n_mod_8 = (&n % 8u32).to_u32_digits().first().copied().unwrap_or(0);
            if twos % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
                sign = -sign;
            }
        }
        if a.bit(1) && n.bit(1) {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= &n;
    }

    Ok(if n.is_one() { sign } else { 0 })
}

/// Convenience wrapper for a non-negative residue.
pub fn jacobi_u(a: &BigUint, n: &BigUint) -> Result<i8> {
    jacobi(&BigInt::from(a.clone()), n)
}

/// The pair of Legendre symbols `((x/p), (x/q))` of a unit of `Z_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JacobiClass {
    pub mod_p: i8,
    pub mod_q: i8,
}

impl JacobiClass {
    pub const ALL: [JacobiClass; 4] = [
        JacobiClass { mod_p: 1, mod_q: 1 },
        JacobiClass {
            mod_p: 1,
            mod_q: -1,
        },
        JacobiClass {
            mod_p: -1,
            mod_q: 1,
        },
        JacobiClass {
            mod_p: -1,
            mod_q: -1,
        },
    ];

    pub fn new(mod_p: i8, mod_q: i8) -> Self {
        JacobiClass { mod_p, mod_q }
    }

    pub fn of(x: &BigUint, secret: &SecretModulus) -> Result<Self> {
        Ok(JacobiClass {
            mod_p: jacobi_u(x, &secret.p)?,
            mod_q: jacobi_u(x, &secret.q)?,
        })
    }

    pub fn is_residue(&self) -> bool {
        self.mod_p == 1 && self.mod_q == 1
    }
}

impl fmt::Display for JacobiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |v: i8| match v {
            1 => '+',
            -1 => '-',
            _ => '0',
        };
        write!(f, "({},{})", s(self.mod_p), s(self.mod_q))
    }
}

/// CRT idempotents: `psi1 ≡ 1 (mod p)`, `psi1 ≡ 0 (mod q)` and
/// `psi2 ≡ 0 (mod p)`, `psi2 ≡ 1 (mod q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idempotents {
    pub psi1: BigUint,
    pub psi2: BigUint,
}

pub fn crt_idempotents(p: &BigUint, q: &BigUint) -> Result<Idempotents> {
    if p == q {
        return Err(Error::InvalidKey("p and q must be distinct".into()));
    }
    let q_inv = mod_inverse(q, p).ok_or_else(|| Error::InvalidKey("p and q not coprime".into()))?;
    let p_inv = mod_inverse(p, q).ok_or_else(|| Error::InvalidKey("p and q not coprime".into()))?;
    Ok(Idempotents {
        psi1: q * q_inv,
        psi2: p * p_inv,
    })
}

/// The factored modulus held by a signer.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretModulus {
    pub p: BigUint,
    pub q: BigUint,
    pub n: BigUint,
    pub idempotents: Idempotents,
}

impl fmt::Debug for SecretModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SecretModulus")
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

impl SecretModulus {
    /// Builds key material from two distinct odd primes. Primality is checked
    /// probabilistically.
    pub fn new<R: Rng + CryptoRng + ?Sized>(p: BigUint, q: BigUint, rng: &mut R) -> Result<Self> {
        for f in [&p, &q] {
            if f.is_even() || *f < BigUint::from(3u32) {
                return Err(Error::InvalidKey("factors must be odd primes".into()));
            }
            if !is_probable_prime(f, rng) {
                return Err(Error::InvalidKey("factor is composite".into()));
            }
        }
        Self::from_primes_unchecked(p, q)
    }

    /// As [`SecretModulus::new`], but trusts the caller on primality.
    pub fn from_primes_unchecked(p: BigUint, q: BigUint) -> Result<Self> {
        let idempotents = crt_idempotents(&p, &q)?;
        let n = &p * &q;
        let idempotents = Idempotents {
            psi1: idempotents.psi1 % &n,
            psi2: idempotents.psi2 % &n,
        };
        Ok(SecretModulus {
            p,
            q,
            n,
            idempotents,
        })
    }

    /// Both factors are Blum primes (≡ 3 mod 4).
    pub fn is_blum(&self) -> bool {
        is_3_mod_4(&self.p) && is_3_mod_4(&self.q)
    }

    /// Recombines residues `x mod p` and `y mod q` into `x*psi1 + y*psi2 mod N`.
    pub fn combine(&self, x: &BigUint, y: &BigUint) -> BigUint {
        (x * &self.idempotents.psi1 + y * &self.idempotents.psi2) % &self.n
    }

    /// `f1*psi1 + f2*psi2 mod N` for signs `f1, f2 ∈ {±1}`.
    pub fn signed_combination(&self, class: JacobiClass) -> BigUint {
        let lift = |s: i8, m: &BigUint| if s >= 0 { BigUint::one() } else { m - 1u32 };
        self.combine(&lift(class.mod_p, &self.p), &lift(class.mod_q, &self.q))
    }
}

fn is_3_mod_4(x: &BigUint) -> bool {
    x.bit(0) && x.bit(1)
}

/// Square root modulo a prime, canonicalised to `min(s, p - s)`.
pub fn sqrt_mod_prime(a: &BigUint, p: &BigUint) -> Result<BigUint> {
    let a = a % p;
    if a.is_zero() {
        return Ok(a);
    }
    if *p == BigUint::from(2u32) {
        return Ok(a);
    }
    if jacobi_u(&a, p)? != 1 {
        return Err(Error::NonResidue);
    }

    let root = if is_3_mod_4(p) {
        a.modpow(&((p + 1u32) >> 2), p)
    } else {
        tonelli_shanks(&a, p)
    };

    let other = p - &root;
    Ok(root.min(other))
}

fn tonelli_shanks(a: &BigUint, p: &BigUint) -> BigUint {
    let p_minus_1 = p - 1u32;
    let s = p_minus_1.trailing_zeros().unwrap_or(0);
    let odd = &p_minus_1 >> s;

    // smallest non-residue
    let mut z = BigUint::from(2u32);
    while jacobi_u(&z, p).unwrap_or(0) != -1 {
        z += 1u32;
    }

    let mut m = s;
    let mut c = z.modpow(&odd, p);
    let mut t = a.modpow(&odd, p);
    let mut r = a.modpow(&((&odd + 1u32) >> 1), p);

    while !t.is_one() {
        let mut i = 0;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = &t2 * &t2 % p;
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = &b * &b % p;
        }
        m = i;
        c = &b * &b % p;
        t = t * &c % p;
        r = r * &b % p;
    }
    r
}

/// A square root modulo `N` together with its Jacobi class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub value: BigUint,
    pub class: JacobiClass,
}

/// All four roots of `x² ≡ a (mod N)`, sorted ascending.
pub fn sqrt_mod_pq(a: &BigUint, secret: &SecretModulus) -> Result<Vec<Root>> {
    let a = a % &secret.n;
    if !a.gcd(&secret.n).is_one() {
        return Err(Error::FactorLeak);
    }
    let sp = sqrt_mod_prime(&a, &secret.p)?;
    let sq = sqrt_mod_prime(&a, &secret.q)?;

    let mut roots = Vec::with_capacity(4);
    for x in [sp.clone(), &secret.p - &sp] {
        for y in [sq.clone(), &secret.q - &sq] {
            let value = secret.combine(&x, &y);
            let class = JacobiClass::of(&value, secret)?;
            roots.push(Root { value, class });
        }
    }
    roots.sort_by(|l, r| l.value.cmp(&r.value));
    Ok(roots)
}

/// The smallest of the four square roots of `a` modulo `N`.
pub fn canonical_sqrt(a: &BigUint, secret: &SecretModulus) -> Result<BigUint> {
    let roots = sqrt_mod_pq(a, secret)?;
    Ok(roots
        .into_iter()
        .next()
        .map(|r| r.value)
        .expect("four roots"))
}

/// `{psi1 - psi2, psi2 - psi1} mod N`: the square roots of unity other than ±1.
pub fn sqrt_of_unity_nontrivial(secret: &SecretModulus) -> [BigUint; 2] {
    let n = &secret.n;
    let Idempotents { psi1, psi2 } = &secret.idempotents;
    [(psi1 + n - psi2) % n, (psi2 + n - psi1) % n]
}

/// Uniform element of `Z_N^*`.
pub fn random_unit<R: Rng + ?Sized>(n: &BigUint, rng: &mut R) -> BigUint {
    loop {
        let candidate = rng.gen_biguint_below(n);
        if !candidate.is_zero() && candidate.gcd(n).is_one() {
            return candidate;
        }
    }
}

/// Miller-Rabin with trial division by small primes.
pub fn is_probable_prime<R: Rng + ?Sized>(n: &BigUint, rng: &mut R) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    if *n == two {
        return true;
    }
    if n.is_even() {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }

    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    'witness: for _ in 0..MILLER_RABIN_ROUNDS {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Reduces a signed value into `[0, n)`.
pub fn reduce_signed(x: &BigInt, n: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, n.clone());
    x.mod_floor(&m).magnitude().clone()
}
