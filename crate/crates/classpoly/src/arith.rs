//! Exact integer/rational arithmetic, primality, modular square roots, and
//! balanced CRT reconstruction shared by all modules.
//!
//! Conventions: primes handled per-residue are machine words (`u64`, always
//! odd and < 2^62 in practice); accumulated products and reconstructed
//! coefficients are `BigInt`. Rationals are always reduced with positive
//! denominator (enforced by `num_rational::BigRational` itself).

use crate::{Error, Result};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub use num_bigint::BigInt as Int;
pub use num_rational::BigRational as Rat;

// ---------------------------------------------------------------------------
// Machine-word modular arithmetic
// ---------------------------------------------------------------------------

/// `(a * b) mod p` without overflow for `p < 2^64`.
#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// `(a + b) mod p`.
#[inline]
pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= p {
        s.wrapping_sub(p)
    } else {
        s
    }
}

/// `(a - b) mod p`.
#[inline]
pub fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a.wrapping_sub(b).wrapping_add(p)
    }
}

/// `b^e mod p` by square-and-multiply.
pub fn powmod(b: u64, e: u64, p: u64) -> u64 {
    debug_assert!(p > 0);
    let mut base = b % p;
    let mut exp = e;
    let mut acc = 1 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`. Panics on `a ≡ 0`, which is always a
/// caller bug at this level (public entry points screen their inputs).
pub fn invmod(a: u64, p: u64) -> u64 {
    let a = a % p;
    assert!(a != 0, "invmod of zero residue");
    powmod(a, p - 2, p)
}

/// Reduce a signed machine integer into `[0, p)`.
#[inline]
pub fn mod_signed(x: i64, p: u64) -> u64 {
    let r = x.rem_euclid(p as i64);
    r as u64
}

/// Reduce a `BigInt` into `[0, p)`.
pub fn mod_big(x: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    x.mod_floor(&m).to_u64().expect("mod_floor result fits u64")
}

/// Legendre symbol `(a/p)` for odd prime `p`: returns 1, -1, or 0.
pub fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let e = powmod(a, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

/// Strong probable prime test of `n` to base `a` (both already `BigInt`-sized
/// callers reduce to u64 when possible; this body works on u64).
fn sprp_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    let mut x = powmod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mulmod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for `n < 3.3 * 10^14` (fixed Miller–Rabin bases);
/// for larger inputs, 64 pseudo-random bases derived deterministically from
/// `n` so results are reproducible run to run.
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(n) = n.to_u64() {
        return is_prime_u64(n);
    }
    // Arbitrary-precision fallback: trial division by small primes, then
    // strong probable prime tests with bases seeded from n itself.
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let q = BigInt::from(q);
        if n == &q {
            return true;
        }
        if (n % &q).is_zero() {
            return false;
        }
    }
    let nm1 = n - 1u32;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut seed = 0x9e3779b97f4a7c15u64;
    for limb in n.iter_u64_digits() {
        seed = splitmix64(seed ^ limb);
    }
    'witness: for _ in 0..64 {
        seed = splitmix64(seed);
        let a = BigInt::from(2u64 + seed % 0xffff_ffff);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2u32), n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic Miller–Rabin for machine-word inputs. The base set
/// {2, 3, 5, 7, 11, 13, 17} is exact for all n < 3.4 * 10^14, and the
/// extended set used above 10^14 is exact for all 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let bases: &[u64] = if n < 340_000_000_000_000 {
        &[2, 3, 5, 7, 11, 13, 17]
    } else {
        &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
    };
    bases.iter().all(|&a| sprp_u64(n, a))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Stable 64-bit content hash used wherever derived determinism is needed
/// (e.g. seeding the polynomial root-splitting walk from coefficients).
pub fn fnv1a64(data: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for w in data {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

// ---------------------------------------------------------------------------
// Modular square roots (Tonelli–Shanks)
// ---------------------------------------------------------------------------

/// Square root of `a` mod odd prime `p`, if it exists. Deterministic
/// tie-break: the smaller of the two roots is returned.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    let r = if p % 4 == 3 {
        powmod(a, (p + 1) / 4, p)
    } else {
        tonelli_shanks(a, p)
    };
    Some(r.min(p - r))
}

fn tonelli_shanks(a: u64, p: u64) -> u64 {
    // p ≡ 1 (mod 4); write p - 1 = q * 2^s with q odd.
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    // Smallest quadratic non-residue (deterministic scan; tiny in practice).
    let mut z = 2;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, (q + 1) / 2, p);
    while t != 1 {
        // Find least i with t^(2^i) = 1.
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod(t2, t2, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    r
}

// ---------------------------------------------------------------------------
// Small-integer factorization
// ---------------------------------------------------------------------------

/// Trial-division factorization, `n = ∏ p_i^{e_i}` with `p_i` ascending.
/// Desk-scale inputs (conductors, levels m, |D|) stay far below 10^12.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factor_u64 of zero");
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Largest square divisor split: `n = v^2 * w` with `w` squarefree.
pub fn square_part(n: u64) -> (u64, u64) {
    let mut v = 1u64;
    let mut w = 1u64;
    for (p, e) in factor_u64(n) {
        v *= p.pow(e / 2);
        if e % 2 == 1 {
            w *= p;
        }
    }
    (v, w)
}

/// Dedekind psi: ψ(m) = m ∏_{p | m} (1 + 1/p), the degree of Φ_m in each
/// variable.
pub fn dedekind_psi(m: u64) -> u64 {
    let mut out = m;
    for (p, _) in factor_u64(m) {
        out = out / p * (p + 1);
    }
    out
}

// ---------------------------------------------------------------------------
// Balanced CRT
// ---------------------------------------------------------------------------

/// An ordered system of congruences `x ≡ r_i (mod p_i)` over pairwise
/// distinct primes, with the modulus product cached.
#[derive(Debug, Clone, Default)]
pub struct ResidueSystem {
    pairs: Vec<(u64, u64)>,
    product: BigInt,
}

impl ResidueSystem {
    pub fn new() -> Self {
        ResidueSystem {
            pairs: Vec::new(),
            product: BigInt::one(),
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut rs = ResidueSystem::new();
        for (p, r) in pairs {
            rs.push(p, r)?;
        }
        Ok(rs)
    }

    /// Add one congruence. Rejects duplicate primes.
    pub fn push(&mut self, p: u64, r: u64) -> Result<()> {
        if self.pairs.iter().any(|&(q, _)| q == p) {
            return Err(Error::BadInput(format!("duplicate prime {p} in residue system")));
        }
        self.pairs.push((p, r % p));
        self.product *= BigInt::from(p);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn product(&self) -> &BigInt {
        &self.product
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }
}

/// Balanced CRT: the unique integer `x` with `|x| < (∏ p)/2` satisfying all
/// congruences. The caller guarantees the true value fits (height bound).
pub fn crt_reconstruct(rs: &ResidueSystem) -> BigInt {
    let m = rs.product();
    let mut acc = BigInt::zero();
    for &(p, r) in rs.pairs() {
        let mi = m / BigInt::from(p); // product of the other primes
        let mi_mod_p = mod_big(&mi, p);
        let yi = invmod(mi_mod_p, p);
        acc += mi * BigInt::from(mulmod(r, yi, p));
    }
    let mut x = acc.mod_floor(m);
    if &x * 2 > *m {
        x -= m;
    }
    x
}

/// Reduce a signed `BigInt` coefficient modulo each prime of a plan —
/// the inverse direction of `crt_reconstruct`, used by tests and by the
/// CRT-vs-direct cross-checks.
pub fn reduce_coeff(x: &BigInt, primes: &[u64]) -> Vec<u64> {
    primes.iter().map(|&p| mod_big(x, p)).collect()
}

/// Convenience: reconstruct a signed integer from parallel prime/residue
/// slices (used in per-coefficient loops).
pub fn crt_signed(primes: &[u64], residues: &[u64]) -> Result<BigInt> {
    let rs = ResidueSystem::from_pairs(primes.iter().copied().zip(residues.iter().copied()))?;
    Ok(crt_reconstruct(&rs))
}

/// Rational reconstruction helper: given `x ≡ num * den^{-1}` for all primes
/// in the system and a known positive denominator `den`, recover the signed
/// numerator of `x * den` and return the reduced rational.
pub fn crt_rational(rs: &ResidueSystem, den: &BigInt) -> Result<Rat> {
    let mut scaled = ResidueSystem::new();
    for &(p, r) in rs.pairs() {
        let d = mod_big(den, p);
        if d == 0 {
            return Err(Error::BadInput(format!("denominator divisible by plan prime {p}")));
        }
        scaled.push(p, mulmod(r, d, p))?;
    }
    let num = crt_reconstruct(&scaled);
    Ok(Rat::new(num, den.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    #[test]
    fn crt_reconstructs_known_cubic_coefficient() {
        // Residues of the x^2 coefficient of 23^3 * H_{-23}(P; x) =
        // 12167x^3 - 279841x^2 + 1900168x - 5097973 across a six-prime plan.
        let rs = ResidueSystem::from_pairs([
            (1_562_207, 1_282_366),
            (2_744_591, 2_464_750),
            (4_294_607, 4_014_766),
            (6_454_031, 6_174_190),
            (7_089_107, 6_809_266),
            (10_010_291, 9_730_450),
        ])
        .unwrap();
        assert_eq!(crt_reconstruct(&rs), BigInt::from(-279_841));
    }

    #[test]
    fn crt_zero_and_roundtrip() {
        let rs = ResidueSystem::from_pairs([(101, 0), (103, 0), (107, 0)]).unwrap();
        assert!(crt_reconstruct(&rs).is_zero());

        let x = BigInt::from(12345);
        let primes = [101u64, 103, 107];
        let residues = reduce_coeff(&x, &primes);
        assert_eq!(crt_signed(&primes, &residues).unwrap(), x);
    }

    #[test]
    fn crt_rejects_duplicate_prime() {
        let mut rs = ResidueSystem::new();
        rs.push(101, 5).unwrap();
        assert!(rs.push(101, 6).is_err());
    }

    #[test]
    fn crt_rational_recovers_fraction() {
        // x = 3592/23 mod each prime.
        let primes = [1_000_003u64, 1_000_033, 1_000_037];
        let den = BigInt::from(23);
        let mut rs = ResidueSystem::new();
        for &p in &primes {
            let r = mulmod(3592 % p, invmod(23, p), p);
            rs.push(p, r).unwrap();
        }
        let q = crt_rational(&rs, &den).unwrap();
        assert_eq!(q, Rat::new(BigInt::from(3592), BigInt::from(23)));
    }

    #[test]
    fn primality_known_values() {
        assert!(is_prime_u64(1_562_207));
        assert!(!is_prime_u64(4));
        assert!(is_prime_u64(10_010_291));
        // Carmichael numbers must fail.
        assert!(!is_prime_u64(561));
        assert!(!is_prime_u64(1_729));
        // Trial-division cross-check on a window.
        for n in 2u64..2_000 {
            let by_trial = (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0) && n >= 2;
            assert_eq!(is_prime_u64(n), by_trial, "mismatch at {n}");
        }
        assert!(is_prime(&BigInt::from_u128(170141183460469231731687303715884105727).unwrap()));
        assert!(!is_prime(&BigInt::from_u128(170141183460469231731687303715884105725).unwrap()));
    }

    #[test]
    fn sqrt_mod_basics() {
        assert_eq!(sqrt_mod(1, 1_562_207), Some(1));
        let p = 1_562_207u64;
        let a = mod_signed(-23, p);
        let r = sqrt_mod(a, p).expect("-23 is a QR here");
        assert_eq!(mulmod(r, r, p), a);
        assert!(r <= p - r, "tie-break must pick the smaller root");
        // Non-residue -> none, cross-checked by Euler's criterion.
        let p = 1_000_003u64;
        for a in 1..200u64 {
            let euler = powmod(a, (p - 1) / 2, p) == 1;
            assert_eq!(sqrt_mod(a, p).is_some(), euler || a == 0);
            if let Some(r) = sqrt_mod(a, p) {
                assert_eq!(mulmod(r, r, p), a % p);
            }
        }
    }

    #[test]
    fn sqrt_mod_both_branches() {
        // p ≡ 1 mod 4 exercises Tonelli–Shanks proper.
        for p in [1_000_033u64, 999_999_937, 13, 97] {
            assert_eq!(p % 4, 1);
            for a in 2..50 {
                if let Some(r) = sqrt_mod(a, p) {
                    assert_eq!(mulmod(r, r, p), a % p);
                }
            }
        }
    }

    #[test]
    fn factorization_helpers() {
        assert_eq!(factor_u64(575), vec![(5, 2), (23, 1)]);
        assert_eq!(square_part(575), (5, 23));
        assert_eq!(square_part(1), (1, 1));
        assert_eq!(dedekind_psi(2), 3);
        assert_eq!(dedekind_psi(23), 24);
        assert_eq!(dedekind_psi(575), 720);
        assert_eq!(dedekind_psi(6), 12);
        assert_eq!(dedekind_psi(16), 24);
    }

    #[test]
    fn mod_helpers() {
        assert_eq!(mod_signed(-23, 101), 78);
        assert_eq!(mod_big(&BigInt::from(-23), 101), 78);
        assert_eq!(invmod(7, 101).wrapping_mul(7) % 101, 1);
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(3, 7), -1);
    }
}
