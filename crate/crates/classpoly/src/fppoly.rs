//! Dense polynomial arithmetic over prime fields F_p with machine-word p:
//! multiplication, division, gcd, derivatives, Taylor shift, root extraction
//! of (near-)split polynomials, multipoint evaluation, and interpolation.
//!
//! Degrees at desk scale stay in the low thousands, so everything is plain
//! quadratic arithmetic on dense coefficient vectors (low-to-high order);
//! no subproduct trees or FFTs.

use crate::arith::{addmod, fnv1a64, invmod, mulmod, sqrt_mod, submod};
use crate::{Error, Result};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Dense univariate polynomial over F_p. Invariant: no trailing zero
/// coefficients (the zero polynomial has an empty vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for x in coeffs.iter_mut() {
            *x %= p;
        }
        let mut f = FpPoly { p, c: coeffs };
        f.trim();
        f
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly { p, c: vec![1] }
    }

    pub fn constant(p: u64, a: u64) -> Self {
        FpPoly::new(p, vec![a])
    }

    /// The monomial x.
    pub fn x(p: u64) -> Self {
        FpPoly { p, c: vec![0, 1] }
    }

    /// x - r
    pub fn linear_root(p: u64, r: u64) -> Self {
        FpPoly::new(p, vec![submod(0, r % p, p), 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0 by convention of callers
    /// that first check `is_zero`.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn leading(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
    }

    fn assert_same_field(&self, other: &FpPoly) {
        assert_eq!(self.p, other.p, "mixed moduli in FpPoly arithmetic");
    }

    pub fn add(&self, other: &FpPoly) -> FpPoly {
        self.assert_same_field(other);
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0u64; n];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = addmod(self.coeff(i), other.coeff(i), self.p);
        }
        let mut f = FpPoly { p: self.p, c };
        f.trim();
        f
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        self.assert_same_field(other);
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0u64; n];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = submod(self.coeff(i), other.coeff(i), self.p);
        }
        let mut f = FpPoly { p: self.p, c };
        f.trim();
        f
    }

    pub fn neg(&self) -> FpPoly {
        FpPoly::zero(self.p).sub(self)
    }

    pub fn scale(&self, k: u64) -> FpPoly {
        let k = k % self.p;
        let mut f = FpPoly {
            p: self.p,
            c: self.c.iter().map(|&a| mulmod(a, k, self.p)).collect(),
        };
        f.trim();
        f
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        self.assert_same_field(other);
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p as u128;
        let mut acc = vec![0u128; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = a as u128;
            for (j, &b) in other.c.iter().enumerate() {
                let cell = &mut acc[i + j];
                *cell += a * b as u128 % p;
                if *cell >= (1u128 << 126) {
                    *cell %= p;
                }
            }
        }
        let mut f = FpPoly {
            p: self.p,
            c: acc.into_iter().map(|v| (v % p) as u64).collect(),
        };
        f.trim();
        f
    }

    /// Quotient and remainder of self by g (g nonzero).
    pub fn div_rem(&self, g: &FpPoly) -> (FpPoly, FpPoly) {
        self.assert_same_field(g);
        assert!(!g.is_zero(), "division by zero polynomial");
        if self.c.len() < g.c.len() {
            return (FpPoly::zero(self.p), self.clone());
        }
        let p = self.p;
        let lg_inv = invmod(g.leading(), p);
        let mut rem = self.c.clone();
        let dq = self.c.len() - g.c.len();
        let mut quot = vec![0u64; dq + 1];
        for k in (0..=dq).rev() {
            let top = rem[k + g.c.len() - 1];
            if top == 0 {
                continue;
            }
            let q = mulmod(top, lg_inv, p);
            quot[k] = q;
            for (j, &gj) in g.c.iter().enumerate() {
                rem[k + j] = submod(rem[k + j], mulmod(q, gj, p), p);
            }
        }
        let mut qf = FpPoly { p, c: quot };
        let mut rf = FpPoly { p, c: rem };
        qf.trim();
        rf.trim();
        (qf, rf)
    }

    pub fn rem(&self, g: &FpPoly) -> FpPoly {
        self.div_rem(g).1
    }

    pub fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(invmod(self.leading(), self.p))
    }

    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        self.assert_same_field(other);
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> FpPoly {
        if self.c.len() <= 1 {
            return FpPoly::zero(self.p);
        }
        let mut c = Vec::with_capacity(self.c.len() - 1);
        for (i, &a) in self.c.iter().enumerate().skip(1) {
            c.push(mulmod(a, (i as u64) % self.p, self.p));
        }
        let mut f = FpPoly { p: self.p, c };
        f.trim();
        f
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &a in self.c.iter().rev() {
            acc = addmod(mulmod(acc, x, self.p), a, self.p);
        }
        acc
    }

    /// [f(x), f'(x), f''(x)/2]: the first three Taylor coefficients of
    /// f(Y + x), by three Horner passes.
    pub fn eval_jet2(&self, x: u64) -> [u64; 3] {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        let half = invmod(2, self.p);
        [self.eval(x), d1.eval(x), mulmod(d2.eval(x), half, self.p)]
    }

    /// Monic product of (x - r) over the given roots.
    pub fn from_roots(p: u64, roots: &[u64]) -> FpPoly {
        let mut f = FpPoly::one(p);
        for &r in roots {
            f = f.mul(&FpPoly::linear_root(p, r));
        }
        f
    }

    /// self^e modulo g.
    pub fn powmod(&self, e: u64, g: &FpPoly) -> FpPoly {
        self.assert_same_field(g);
        let mut base = self.rem(g);
        let mut acc = FpPoly::one(self.p);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(g);
            }
            base = base.mul(&base).rem(g);
            e >>= 1;
        }
        acc
    }

    /// self^e modulo g for arbitrary-precision exponents (used for
    /// equal-degree splitting over extension-field-sized exponents).
    pub fn powmod_big(&self, e: &num_bigint::BigUint, g: &FpPoly) -> FpPoly {
        use num_traits::Zero;
        self.assert_same_field(g);
        let mut base = self.rem(g);
        let mut acc = FpPoly::one(self.p);
        let mut e = e.clone();
        while !e.is_zero() {
            if e.bit(0) {
                acc = acc.mul(&base).rem(g);
            }
            base = base.mul(&base).rem(g);
            e >>= 1;
        }
        acc
    }

    /// Inverse of self modulo g (extended Euclid); None when gcd ≠ 1.
    pub fn modinv(&self, g: &FpPoly) -> Option<FpPoly> {
        self.assert_same_field(g);
        // Maintain r0 = s0 * self (mod g), r1 = s1 * self (mod g).
        let mut r0 = g.clone();
        let mut r1 = self.rem(g);
        let mut s0 = FpPoly::zero(self.p);
        let mut s1 = FpPoly::one(self.p);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != 0 {
            return None;
        }
        Some(s0.scale(invmod(r0.leading(), self.p)).rem(g))
    }
}

// ---------------------------------------------------------------------------
// Factorization into irreducibles (squarefree inputs)
// ---------------------------------------------------------------------------

/// Irreducible monic factors of a squarefree polynomial, by distinct-degree
/// then equal-degree (Cantor–Zassenhaus) splitting. Deterministically seeded
/// like `roots_split`. Factors are returned sorted by (degree, coefficients).
pub fn factor_squarefree(f: &FpPoly) -> Vec<FpPoly> {
    let p = f.modulus();
    let monic = f.monic();
    if monic.degree() == 0 {
        return Vec::new();
    }
    let seed_words = [0x666163746f720000u64, p, fnv1a64(f.coeffs().iter().copied())];
    let mut seed = [0u8; 32];
    for (i, w) in seed_words.iter().enumerate() {
        seed[i * 8..(i + 1) * 8].copy_from_slice(&w.to_le_bytes());
    }
    let mut rng = ChaCha20Rng::from_seed(seed);

    let mut out = Vec::new();
    // Distinct-degree: peel off products of irreducibles of degree d.
    let mut rest = monic;
    let mut xq = FpPoly::x(p).rem(&rest); // x^(p^d) mod rest, maintained
    let mut d = 0usize;
    while rest.degree() >= 1 {
        d += 1;
        if 2 * d > rest.degree() {
            out.push(rest.clone());
            break;
        }
        xq = xq.powmod(p, &rest);
        let g = xq.sub(&FpPoly::x(p)).gcd(&rest);
        if g.degree() > 0 {
            let mut parts = Vec::new();
            split_equal_degree(&g, d, &mut rng, &mut parts);
            out.extend(parts);
            let (q, r) = rest.div_rem(&g);
            debug_assert!(r.is_zero());
            rest = q;
            xq = xq.rem(&rest);
        }
        if rest.degree() == 0 {
            break;
        }
    }
    out.sort_by(|a, b| (a.degree(), a.coeffs().to_vec()).cmp(&(b.degree(), b.coeffs().to_vec())));
    out
}

/// Cantor–Zassenhaus equal-degree splitting: g is a product of irreducibles
/// all of degree d; exponent (p^d − 1)/2 needs arbitrary precision.
fn split_equal_degree(g: &FpPoly, d: usize, rng: &mut ChaCha20Rng, out: &mut Vec<FpPoly>) {
    use num_bigint::BigUint;
    let p = g.modulus();
    if g.degree() == d {
        out.push(g.monic());
        return;
    }
    let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        // Random polynomial of degree < deg g.
        let mut c = vec![0u64; g.degree()];
        for ci in c.iter_mut() {
            *ci = rng.next_u64() % p;
        }
        let u = FpPoly::new(p, c);
        if u.is_zero() {
            continue;
        }
        let h = u.powmod_big(&e, g).sub(&FpPoly::one(p)).gcd(g);
        let dd = h.degree();
        if dd > 0 && dd < g.degree() {
            let (q, r) = g.div_rem(&h);
            debug_assert!(r.is_zero());
            split_equal_degree(&h, d, rng, out);
            split_equal_degree(&q, d, rng, out);
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Taylor shift
// ---------------------------------------------------------------------------

/// f(Y) ↦ f(Y + c), computed by the classical in-place synthetic-division
/// cascade (quadratic in the degree).
pub fn taylor_shift(f: &FpPoly, c: u64) -> FpPoly {
    let p = f.modulus();
    let c = c % p;
    let mut a = f.coeffs().to_vec();
    let n = a.len();
    for i in 0..n {
        // After pass i, a[i] is final: the coefficient of Y^i in f(Y+c).
        for j in (i..n.saturating_sub(1)).rev() {
            let add = mulmod(a[j + 1], c, p);
            a[j] = addmod(a[j], add, p);
        }
    }
    FpPoly::new(p, a)
}

// ---------------------------------------------------------------------------
// Multipoint evaluation and interpolation
// ---------------------------------------------------------------------------

/// Evaluate f at each point (plain Horner per point).
pub fn multipoint_eval(f: &FpPoly, points: &[u64]) -> Vec<u64> {
    points.iter().map(|&x| f.eval(x)).collect()
}

/// Lagrange interpolation through (points[i], values[i]); points must be
/// pairwise distinct mod p. Quadratic: master polynomial, synthetic-division
/// quotients, and barycentric weights.
pub fn interpolate(p: u64, points: &[u64], values: &[u64]) -> Result<FpPoly> {
    assert_eq!(points.len(), values.len(), "point/value length mismatch");
    let n = points.len();
    {
        let mut sorted: Vec<u64> = points.iter().map(|&x| x % p).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadInput("repeated interpolation node".into()));
        }
    }
    if n == 0 {
        return Ok(FpPoly::zero(p));
    }
    // master(x) = prod (x - x_i)
    let master = FpPoly::from_roots(p, points);
    let mut acc = vec![0u64; n];
    for i in 0..n {
        let xi = points[i] % p;
        // quotient q_i = master / (x - x_i) by synthetic division
        let mc = master.coeffs();
        let mut q = vec![0u64; n];
        let mut carry = 0u64;
        for j in (0..n).rev() {
            carry = addmod(mc[j + 1], mulmod(carry, xi, p), p);
            q[j] = carry;
        }
        // weight w_i = 1 / q_i(x_i)
        let mut qe = 0u64;
        for &a in q.iter().rev() {
            qe = addmod(mulmod(qe, xi, p), a, p);
        }
        let w = mulmod(values[i] % p, invmod(qe, p), p);
        for j in 0..n {
            acc[j] = addmod(acc[j], mulmod(q[j], w, p), p);
        }
    }
    Ok(FpPoly::new(p, acc))
}

// ---------------------------------------------------------------------------
// Root extraction
// ---------------------------------------------------------------------------

/// All roots of f in F_p with multiplicity, sorted ascending. Non-split
/// factors are silently ignored (callers check expected counts).
///
/// The random-splitting walk is seeded from (p, content hash of f), so the
/// output — and everything downstream of it — is reproducible run to run.
pub fn roots_split(f: &FpPoly) -> Vec<u64> {
    let p = f.modulus();
    if f.is_zero() || f.degree() == 0 {
        return Vec::new();
    }
    let seed_words = [0x726f6f74735f7370u64, p, fnv1a64(f.coeffs().iter().copied())];
    let mut seed = [0u8; 32];
    for (i, w) in seed_words.iter().enumerate() {
        seed[i * 8..(i + 1) * 8].copy_from_slice(&w.to_le_bytes());
    }
    let mut rng = ChaCha20Rng::from_seed(seed);

    // Distinct-root part: gcd(x^p - x, f).
    let monic = f.monic();
    let xp = FpPoly::x(p).powmod(p, &monic);
    let split = xp.sub(&FpPoly::x(p)).gcd(&monic);
    let mut distinct = Vec::new();
    split_equal_degree_one(&split, &mut rng, &mut distinct);
    distinct.sort_unstable();

    // Multiplicities by repeated synthetic division of the full input.
    let mut out = Vec::new();
    for &r in &distinct {
        let lin = FpPoly::linear_root(p, r);
        let mut g = monic.clone();
        loop {
            let (q, rem) = g.div_rem(&lin);
            if !rem.is_zero() {
                break;
            }
            out.push(r);
            g = q;
            if g.is_zero() || g.degree() == 0 {
                break;
            }
        }
    }
    out
}

/// True if f (assumed nonzero) splits into distinct linear factors over F_p
/// and is squarefree, i.e. gcd(x^p − x, f) = monic(f).
pub fn is_totally_split(f: &FpPoly) -> bool {
    if f.is_zero() {
        return false;
    }
    if f.degree() == 0 {
        return true;
    }
    let p = f.modulus();
    let monic = f.monic();
    let xp = FpPoly::x(p).powmod(p, &monic);
    xp.sub(&FpPoly::x(p)).gcd(&monic) == monic
}

fn split_equal_degree_one(g: &FpPoly, rng: &mut ChaCha20Rng, out: &mut Vec<u64>) {
    let p = g.modulus();
    match g.degree() {
        0 => {}
        1 => {
            // x + c0/c1 = 0
            let r = mulmod(submod(0, g.coeff(0), p), invmod(g.coeff(1), p), p);
            out.push(r);
        }
        2 => {
            // Quadratic formula; the discriminant is a square since g splits.
            let a = g.coeff(2);
            let b = g.coeff(1);
            let c = g.coeff(0);
            let disc = submod(mulmod(b, b, p), mulmod(4 % p, mulmod(a, c, p), p), p);
            let s = sqrt_mod(disc, p).expect("split quadratic must have square discriminant");
            let inv2a = invmod(mulmod(2, a, p), p);
            out.push(mulmod(submod(s, b, p), inv2a, p));
            out.push(mulmod(submod(submod(0, b, p), s, p), inv2a, p));
        }
        _ => {
            // Cantor–Zassenhaus split: gcd((x+d)^((p-1)/2) - 1, g).
            loop {
                let delta = rng.next_u64() % p;
                let base = FpPoly::new(p, vec![delta, 1]);
                let half = base.powmod((p - 1) / 2, g);
                let cand = half.sub(&FpPoly::one(p)).gcd(g);
                let d = cand.degree();
                if d > 0 && d < g.degree() {
                    let (quot, rem) = g.div_rem(&cand);
                    debug_assert!(rem.is_zero());
                    split_equal_degree_one(&cand, rng, out);
                    split_equal_degree_one(&quot, rng, out);
                    return;
                }
            }
        }
    }
}
