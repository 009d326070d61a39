//! Elliptic curves over F_p: construction from j-invariants, point
//! arithmetic, order computation, ℓ-torsion and kernel extraction, and Vélu
//! isogeny images — the engine behind the isogeny-volcano walks.
//!
//! Kernels are always reported in the coordinates of the curve that was
//! passed in, even when the rational points generating them live on its
//! quadratic twist (kernel polynomials transfer between twists by scaling
//! the variable). Isogeny images therefore preserve the group order, which
//! lets volcano walks thread a known order through every step.

use crate::arith::{addmod, factor_u64, invmod, legendre, mulmod, sqrt_mod, submod};
use crate::fppoly::{factor_squarefree, roots_split, FpPoly};
use crate::{Error, Result};
use num_integer::{Integer, Roots};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Short-Weierstrass curve y² = x³ + Ax + B over F_p (p > 3).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub p: u64,
    pub a: u64,
    pub b: u64,
}

/// Affine point or the point at infinity.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Infinity,
    Affine(u64, u64),
}

impl Curve {
    pub fn new(p: u64, a: u64, b: u64) -> Result<Self> {
        let e = Curve { p, a: a % p, b: b % p };
        if e.discriminant() == 0 {
            return Err(Error::BadInput(format!(
                "singular curve (A, B) = ({a}, {b}) over F_{p}"
            )));
        }
        Ok(e)
    }

    /// -16(4A³ + 27B²), nonzero exactly for nonsingular curves.
    fn discriminant(&self) -> u64 {
        let p = self.p;
        let a3 = mulmod(4, mulmod(self.a, mulmod(self.a, self.a, p), p), p);
        let b2 = mulmod(27, mulmod(self.b, self.b, p), p);
        mulmod(p - 16, addmod(a3, b2, p), p)
    }

    pub fn j_invariant(&self) -> u64 {
        let p = self.p;
        let a3 = mulmod(4, mulmod(self.a, mulmod(self.a, self.a, p), p), p);
        let b2 = mulmod(27, mulmod(self.b, self.b, p), p);
        let den = addmod(a3, b2, p);
        mulmod(mulmod(1728 % p, a3, p), invmod(den, p), p)
    }

    /// x³ + Ax + B.
    pub fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        let x2 = mulmod(x, x, p);
        addmod(addmod(mulmod(x, x2, p), mulmod(self.a, x, p), p), self.b, p)
    }

    pub fn contains(&self, pt: &Point) -> bool {
        match *pt {
            Point::Infinity => true,
            Point::Affine(x, y) => mulmod(y, y, self.p) == self.rhs(x),
        }
    }

    /// The quadratic twist by the smallest non-residue.
    pub fn twist(&self) -> (Curve, u64) {
        let p = self.p;
        let mut d = 2;
        while legendre(d, p) != -1 {
            d += 1;
        }
        let d2 = mulmod(d, d, p);
        let d3 = mulmod(d2, d, p);
        (
            Curve { p, a: mulmod(self.a, d2, p), b: mulmod(self.b, d3, p) },
            d,
        )
    }

    pub fn neg(&self, pt: &Point) -> Point {
        match *pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x, if y == 0 { 0 } else { self.p - y }),
        }
    }

    pub fn add(&self, lhs: &Point, rhs: &Point) -> Point {
        let p = self.p;
        let (x1, y1) = match *lhs {
            Point::Infinity => return *rhs,
            Point::Affine(x, y) => (x, y),
        };
        let (x2, y2) = match *rhs {
            Point::Infinity => return *lhs,
            Point::Affine(x, y) => (x, y),
        };
        let lambda = if x1 == x2 {
            if addmod(y1, y2, p) == 0 {
                return Point::Infinity;
            }
            // Doubling: (3x² + a) / 2y.
            let num = addmod(mulmod(3, mulmod(x1, x1, p), p), self.a, p);
            mulmod(num, invmod(mulmod(2, y1, p), p), p)
        } else {
            mulmod(submod(y2, y1, p), invmod(submod(x2, x1, p), p), p)
        };
        let x3 = submod(submod(mulmod(lambda, lambda, p), x1, p), x2, p);
        let y3 = submod(mulmod(lambda, submod(x1, x3, p), p), y1, p);
        Point::Affine(x3, y3)
    }

    pub fn mul(&self, k: u64, pt: &Point) -> Point {
        let mut acc = Point::Infinity;
        let mut base = *pt;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// A uniformly-ish random point, from the caller's RNG.
    pub fn random_point(&self, rng: &mut ChaCha20Rng) -> Point {
        let p = self.p;
        loop {
            let x = rng.next_u64() % p;
            let r = self.rhs(x);
            if let Some(y) = sqrt_mod(r, p) {
                let flip = rng.next_u64() & 1 == 1;
                let y = if flip && y != 0 { p - y } else { y };
                return Point::Affine(x, y);
            }
        }
    }
}

/// Curve with a prescribed j-invariant: A = 3k, B = 2k for k = j/(1728 − j).
/// j ∈ {0, 1728} is a hard error — suitability excludes those classes from
/// every volcano component this library walks.
pub fn curve_from_j(j: u64, p: u64) -> Result<Curve> {
    if p < 5 {
        return Err(Error::BadInput(format!("field too small: p = {p}")));
    }
    let j = j % p;
    if j == 0 || j == 1728 % p {
        return Err(Error::BadInput(format!(
            "j = {j} has extra automorphisms; not supported"
        )));
    }
    let k = mulmod(j, invmod(submod(1728 % p, j, p), p), p);
    Curve::new(p, mulmod(3, k, p), mulmod(2, k, p))
}

fn order_rng(e: &Curve, tag: u64) -> ChaCha20Rng {
    let mut seed = [0u8; 32];
    for (i, w) in [tag, e.p, e.a, e.b].iter().enumerate() {
        seed[i * 8..(i + 1) * 8].copy_from_slice(&w.to_le_bytes());
    }
    ChaCha20Rng::from_seed(seed)
}

fn naive_order(e: &Curve) -> u64 {
    let mut n = e.p + 1;
    for x in 0..e.p {
        match legendre(e.rhs(x), e.p) {
            1 => n += 1,
            -1 => n -= 1,
            _ => {}
        }
    }
    n
}

/// Any multiple of ord(P) in [lo, hi], by baby-step/giant-step. The interval
/// has width ~4√p, so both step arrays hold ~2·p^(1/4) points.
fn bsgs_zero_multiple(e: &Curve, pt: &Point, lo: u64, hi: u64) -> u64 {
    use std::collections::HashMap;
    let w = hi - lo + 1;
    let s = w.sqrt() + 1;
    // Baby steps j * P for j = 1..s.
    let mut baby: HashMap<u64, Vec<(u64, u64)>> = HashMap::new();
    let mut cur = *pt;
    for j in 1..=s {
        match cur {
            Point::Infinity => {
                // ord(P) = j exactly (first time we hit O).
                let first = lo.div_ceil(j) * j;
                debug_assert!(first <= hi);
                return first;
            }
            Point::Affine(x, y) => baby.entry(x).or_default().push((j, y)),
        }
        cur = e.add(&cur, pt);
    }
    let giant = e.mul(s, pt);
    let mut r = e.mul(lo, pt);
    let mut i = 0u64;
    loop {
        match r {
            Point::Infinity => {
                let m = lo + i * s;
                if m <= hi {
                    return m;
                }
            }
            Point::Affine(x, y) => {
                if let Some(hits) = baby.get(&x) {
                    for &(j, yj) in hits {
                        // r = ±jP: (lo + i·s ∓ j) P = O.
                        let m = if y == yj { (lo + i * s).wrapping_sub(j) } else { lo + i * s + j };
                        if (lo..=hi).contains(&m) && e.mul(m, pt) == Point::Infinity {
                            return m;
                        }
                    }
                }
            }
        }
        i += 1;
        r = e.add(&r, &giant);
        assert!(i <= w / s + 2, "BSGS walked past the Hasse interval");
    }
}

/// Exact order of P from a known multiple m of it.
fn point_order_from_multiple(e: &Curve, pt: &Point, mut m: u64) -> u64 {
    for (q, _) in factor_u64(m) {
        while m % q == 0 && e.mul(m / q, pt) == Point::Infinity {
            m /= q;
        }
    }
    m
}

fn multiples_in_range(step: u64, lo: u64, hi: u64) -> Vec<u64> {
    let mut v = Vec::new();
    let mut m = lo.div_ceil(step) * step;
    while m <= hi {
        v.push(m);
        m += step;
    }
    v
}

/// #E(F_p) by baby-step/giant-step from random points, with the classical
/// twist cross-check to resolve small-exponent ambiguity (for p > 229 one of
/// the two twists always has a point whose order pins the count).
pub fn curve_order(e: &Curve) -> u64 {
    let p = e.p;
    if p <= 229 {
        return naive_order(e);
    }
    let two_sqrt = 2 * p.sqrt();
    let (lo, hi) = (p + 1 - two_sqrt - 1, p + 1 + two_sqrt + 1);
    let (tw, _) = e.twist();
    let mut rng = order_rng(e, 0x6f72646572000000);
    let mut exps = [1u64, 1u64]; // accumulated exponent divisors on E, twist
    for _round in 0..64 {
        for (side, cur) in [e, &tw].iter().enumerate() {
            let pt = cur.random_point(&mut rng);
            if pt == Point::Infinity {
                continue;
            }
            let m = bsgs_zero_multiple(cur, &pt, lo, hi);
            let o = point_order_from_multiple(cur, &pt, m);
            exps[side] = exps[side].lcm(&o);
            let cands = multiples_in_range(exps[side], lo, hi);
            if cands.len() == 1 {
                let n = cands[0];
                return if side == 0 { n } else { 2 * p + 2 - n };
            }
        }
        // Cross-twist resolution: candidate orders must pair to 2p + 2.
        let ce = multiples_in_range(exps[0], lo, hi);
        let paired: Vec<u64> = ce
            .iter()
            .copied()
            .filter(|&n| (2 * p + 2 - n) % exps[1] == 0)
            .collect();
        if paired.len() == 1 {
            return paired[0];
        }
    }
    unreachable!("curve order ambiguity persisted beyond the sampling budget");
}

// ---------------------------------------------------------------------------
// Division polynomials
// ---------------------------------------------------------------------------

/// Table of the x-only division polynomials ψ̂_0..ψ̂_n for y² = x³ + Ax + B,
/// where ψ_k = ψ̂_k(x) · y^(k even). ψ̂_ℓ for odd ℓ has the x-coordinates of
/// the nonzero ℓ-torsion as roots, with degree (ℓ² − 1)/2.
pub fn division_poly_table(e: &Curve, n: usize) -> Vec<FpPoly> {
    let p = e.p;
    let (a, b) = (e.a, e.b);
    let fx = FpPoly::new(p, vec![b, a, 0, 1]);
    let f2 = fx.mul(&fx);
    let mut t: Vec<FpPoly> = Vec::with_capacity(n.max(5) + 1);
    t.push(FpPoly::zero(p)); // ψ̂₀
    t.push(FpPoly::one(p)); // ψ̂₁
    t.push(FpPoly::constant(p, 2)); // ψ₂ = 2y
    // ψ₃ = 3x⁴ + 6Ax² + 12Bx − A².
    t.push(FpPoly::new(
        p,
        vec![submod(0, mulmod(a, a, p), p), mulmod(12, b, p), mulmod(6, a, p), 0, 3],
    ));
    // ψ₄ = 4y(x⁶ + 5Ax⁴ + 20Bx³ − 5A²x² − 4ABx − A³ − 8B²).
    let a2 = mulmod(a, a, p);
    let a3 = mulmod(a2, a, p);
    let b2 = mulmod(b, b, p);
    t.push(
        FpPoly::new(
            p,
            vec![
                submod(0, addmod(a3, mulmod(8, b2, p), p), p),
                submod(0, mulmod(4, mulmod(a, b, p), p), p),
                submod(0, mulmod(5, a2, p), p),
                mulmod(20, b, p),
                mulmod(5, a, p),
                0,
                1,
            ],
        )
        .scale(4),
    );
    let inv2 = invmod(2, p);
    for k in 5..=n.max(4) {
        let m = k / 2;
        let next = if k % 2 == 1 {
            // ψ̂_{2m+1}: which side carries the y-factors depends on m's parity.
            let lhs = t[m + 2].mul(&t[m]).mul(&t[m]).mul(&t[m]);
            let rhs = t[m - 1].mul(&t[m + 1]).mul(&t[m + 1]).mul(&t[m + 1]);
            if m % 2 == 0 {
                lhs.mul(&f2).sub(&rhs)
            } else {
                lhs.sub(&rhs.mul(&f2))
            }
        } else {
            // ψ̂_{2m} = ψ̂_m (ψ̂_{m+2} ψ̂_{m−1}² − ψ̂_{m−2} ψ̂_{m+1}²) / 2.
            let lhs = t[m + 2].mul(&t[m - 1]).mul(&t[m - 1]);
            let rhs = t[m - 2].mul(&t[m + 1]).mul(&t[m + 1]);
            t[m].mul(&lhs.sub(&rhs)).scale(inv2)
        };
        t.push(next);
    }
    t.truncate(n + 1);
    t
}

/// ψ̂_ℓ itself (odd ℓ ≥ 3).
pub fn division_poly_x(e: &Curve, ell: u64) -> FpPoly {
    assert!(ell >= 3 && ell % 2 == 1);
    division_poly_table(e, ell as usize).pop().unwrap()
}

// ---------------------------------------------------------------------------
// Kernel extraction
// ---------------------------------------------------------------------------

/// A cyclic rational ℓ-isogeny kernel, as a monic kernel polynomial: degree
/// (ℓ−1)/2 for odd ℓ (one factor x − x(kP) per ± pair), degree 1 for ℓ = 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelSpec {
    pub ell: u64,
    pub h: FpPoly,
}

fn valuation(mut n: u64, q: u64) -> u32 {
    let mut v = 0;
    while n % q == 0 {
        n /= q;
        v += 1;
    }
    v
}

/// Kernel polynomial of ⟨T⟩ on curve `e` from an order-ℓ point T: the monic
/// product of (x − x(kT)) for k = 1..(ℓ−1)/2.
fn kernel_poly_from_point(e: &Curve, t: &Point, ell: u64) -> FpPoly {
    let d = (ell - 1) / 2;
    let mut xs = Vec::with_capacity(d as usize);
    let mut cur = *t;
    for _ in 0..d {
        match cur {
            Point::Affine(x, _) => xs.push(x),
            Point::Infinity => unreachable!("order-ℓ point hit O before (ℓ−1)/2 steps"),
        }
        cur = e.add(&cur, t);
    }
    FpPoly::from_roots(e.p, &xs)
}

/// Substitute x ↦ d·x and re-normalize monic: transfers a kernel polynomial
/// from the twist (where points were sampled) back to the original curve.
fn kernel_poly_unscale(h: &FpPoly, d: u64, p: u64) -> FpPoly {
    let mut c = h.coeffs().to_vec();
    let mut pw = 1u64;
    for ci in c.iter_mut() {
        *ci = mulmod(*ci, pw, p);
        pw = mulmod(pw, d, p);
    }
    FpPoly::new(p, c).monic()
}

/// Try to find an F_p-rational basis of E[ℓ] by cofactor sampling on a curve
/// whose order n is divisible by ℓ². Returns the ℓ+1 kernel polynomials on
/// that curve, or None when the torsion is not fully pointwise-rational.
fn kernels_by_sampling(e: &Curve, ell: u64, n: u64, rng: &mut ChaCha20Rng) -> Option<Vec<FpPoly>> {
    let sy = valuation(n, ell);
    if sy < 2 {
        return None;
    }
    let cof = n / ell.pow(sy);
    let mut t1: Option<Point> = None;
    let mut t1_multiples: Vec<Point> = Vec::new();
    for _ in 0..96 {
        let pt = e.random_point(rng);
        let mut r = e.mul(cof, &pt);
        if r == Point::Infinity {
            continue;
        }
        // Reduce within the ℓ-Sylow subgroup to an order-ℓ point.
        loop {
            let s = e.mul(ell, &r);
            if s == Point::Infinity {
                break;
            }
            r = s;
        }
        match &t1 {
            None => {
                t1_multiples = std::iter::successors(Some(r), |q| {
                    let nx = e.add(q, &r);
                    (nx != Point::Infinity).then_some(nx)
                })
                .collect();
                t1 = Some(r);
            }
            Some(_) => {
                if t1_multiples.contains(&r) {
                    continue;
                }
                // Independent pair found: enumerate the ℓ+1 subgroups.
                let t1 = t1.unwrap();
                let mut kernels = vec![kernel_poly_from_point(e, &t1, ell)];
                let mut gen = r; // T₂ + k·T₁ as k walks 0..ℓ
                for _ in 0..ell {
                    kernels.push(kernel_poly_from_point(e, &gen, ell));
                    gen = e.add(&gen, &t1);
                }
                kernels.sort_by(|a, b| a.coeffs().to_vec().cmp(&b.coeffs().to_vec()));
                kernels.dedup();
                if kernels.len() != ell as usize + 1 {
                    return None; // collision: fall back to the generic path
                }
                return Some(kernels);
            }
        }
    }
    None
}

/// Generic kernel extraction through the ℓ-division polynomial: factor ψ̂_ℓ,
/// adjoin a root (an x-coordinate of an order-ℓ point) to F_p, expand its
/// subgroup's full x-orbit with the division-poly multiplication formulas,
/// and keep the products whose coefficients land in F_p.
fn kernels_by_division_poly(e: &Curve, ell: u64) -> Vec<FpPoly> {
    let p = e.p;
    let d = ((ell - 1) / 2) as usize;
    let table = division_poly_table(e, d + 2);
    let fx = FpPoly::new(p, vec![e.b, e.a, 0, 1]);
    let psi = division_poly_x(e, ell);
    debug_assert!(psi.gcd(&psi.derivative()).degree() == 0, "ψ̂_ℓ not squarefree");
    let factors = factor_squarefree(&psi);
    let mut consumed = vec![false; factors.len()];
    let mut kernels: Vec<FpPoly> = Vec::new();

    for (i, g) in factors.iter().enumerate() {
        if consumed[i] || g.degree() > d {
            continue;
        }
        // Work in R = F_p[x]/(g); θ = x is the x-coordinate of ±P, ord P = ℓ.
        let theta = FpPoly::x(p).rem(g);
        let mut xs: Vec<FpPoly> = vec![theta.clone()];
        let mut ok = true;
        for k in 2..=d {
            // x(kP) = x − ψ_{k−1} ψ_{k+1} / ψ_k², with the y²-bookkeeping
            // folded in: the product picks up a factor f(x) when k is odd.
            let mut num = table[k - 1].mul(&table[k + 1]);
            if k % 2 == 1 {
                num = num.mul(&fx);
            }
            let mut den = table[k].mul(&table[k]);
            if k % 2 == 0 {
                den = den.mul(&fx);
            }
            let den_inv = match den.rem(g).modinv(g) {
                Some(v) => v,
                None => {
                    ok = false; // θ also kills smaller torsion: not order ℓ
                    break;
                }
            };
            let frac = num.rem(g).mul(&den_inv).rem(g);
            xs.push(theta.sub(&frac));
        }
        if !ok {
            consumed[i] = true;
            continue;
        }
        // H(X) = ∏ (X − x_k) with coefficients in R.
        let mut h: Vec<FpPoly> = vec![FpPoly::one(p)];
        for xk in &xs {
            let mut next = vec![FpPoly::zero(p); h.len() + 1];
            for (ci, coeff) in h.iter().enumerate() {
                next[ci + 1] = next[ci + 1].add(coeff);
                next[ci] = next[ci].sub(&coeff.mul(xk).rem(g));
            }
            h = next;
        }
        let rational = h.iter().all(|c| c.degree() == 0);
        consumed[i] = true;
        if rational {
            let hf = FpPoly::new(p, h.iter().map(|c| c.coeff(0)).collect());
            for (jdx, gj) in factors.iter().enumerate() {
                if !consumed[jdx] && hf.rem(gj).is_zero() {
                    consumed[jdx] = true;
                }
            }
            kernels.push(hf);
        }
    }
    kernels.sort_by(|a, b| a.coeffs().to_vec().cmp(&b.coeffs().to_vec()));
    kernels
}

/// All F_p-rational cyclic order-ℓ kernels of E (as subgroups; their points
/// may live on the twist or in extensions), as kernel polynomials in E's own
/// coordinates. `known_order` skips the order computation when the caller
/// already knows #E(F_p) — volcano walks always do.
pub fn ell_kernels_with_order(e: &Curve, ell: u64, known_order: Option<u64>) -> Result<Vec<KernelSpec>> {
    let p = e.p;
    if ell == p {
        return Err(Error::BadInput("ℓ = p is not separable".into()));
    }
    if ell == 2 {
        let cubic = FpPoly::new(p, vec![e.b, e.a, 0, 1]);
        let kernels = roots_split(&cubic)
            .into_iter()
            .map(|r| KernelSpec { ell, h: FpPoly::linear_root(p, r) })
            .collect();
        return Ok(kernels);
    }
    let n = known_order.unwrap_or_else(|| curve_order(e));
    let nt = 2 * p + 2 - n;
    let mut rng = order_rng(e, 0x6b65726e656c0000 ^ ell);
    // Pointwise-rational path on whichever twist carries full E[ℓ].
    if valuation(n, ell) >= 2 {
        if let Some(h) = kernels_by_sampling(e, ell, n, &mut rng) {
            return Ok(h.into_iter().map(|h| KernelSpec { ell, h }).collect());
        }
    }
    if valuation(nt, ell) >= 2 {
        let (tw, d) = e.twist();
        if let Some(hs) = kernels_by_sampling(&tw, ell, nt, &mut rng) {
            return Ok(hs
                .into_iter()
                .map(|h| KernelSpec { ell, h: kernel_poly_unscale(&h, d, p) })
                .collect());
        }
    }
    // Generic path: factor the division polynomial.
    Ok(kernels_by_division_poly(e, ell)
        .into_iter()
        .map(|h| KernelSpec { ell, h })
        .collect())
}

/// See `ell_kernels_with_order`.
pub fn ell_kernels(e: &Curve, ell: u64) -> Result<Vec<KernelSpec>> {
    ell_kernels_with_order(e, ell, None)
}

// ---------------------------------------------------------------------------
// Vélu
// ---------------------------------------------------------------------------

/// Image curve of the separable isogeny with the given kernel, by Vélu's
/// formulas driven from the kernel polynomial's power sums (no roots needed).
pub fn velu_image(e: &Curve, k: &KernelSpec) -> Result<Curve> {
    let p = e.p;
    let d = k.h.degree() as u64;
    let expected = if k.ell == 2 { 1 } else { (k.ell - 1) / 2 };
    if k.h.is_zero() || k.h.leading() != 1 || d != expected {
        return Err(Error::BadInput("malformed kernel polynomial".into()));
    }
    // Elementary symmetric functions from the monic coefficients.
    let c = |i: i64| -> u64 {
        if i < 0 {
            0
        } else {
            k.h.coeff(i as usize)
        }
    };
    let e1 = submod(0, c(d as i64 - 1), p);
    let e2 = c(d as i64 - 2);
    let e3 = submod(0, c(d as i64 - 3), p);
    // Newton's identities: power sums of the kernel x-coordinates.
    let p1 = e1;
    let p2 = submod(mulmod(e1, p1, p), mulmod(2, e2, p), p);
    let p3 = addmod(
        submod(mulmod(e1, p2, p), mulmod(e2, p1, p), p),
        mulmod(3, e3, p),
        p,
    );
    let (a, b) = (e.a, e.b);
    let dm = d % p;
    let (t, w) = if k.ell == 2 {
        // Kernel point (x₀, 0): t = 3x₀² + A, w = x₀·t.
        let x0 = p1;
        let t = addmod(mulmod(3, mulmod(x0, x0, p), p), a, p);
        (t, mulmod(x0, t, p))
    } else {
        let t = addmod(mulmod(6, p2, p), mulmod(2, mulmod(a, dm, p), p), p);
        let w = addmod(
            addmod(mulmod(10, p3, p), mulmod(6, mulmod(a, p1, p), p), p),
            mulmod(4, mulmod(b, dm, p), p),
        p,
        );
        (t, w)
    };
    let a2 = submod(a, mulmod(5, t, p), p);
    let b2 = submod(b, mulmod(7, w, p), p);
    Curve::new(p, a2, b2)
        .map_err(|_| Error::BadInput("kernel produced a singular image".into()))
}

/// j-invariant of E/⟨kernel⟩.
pub fn velu_image_j(e: &Curve, k: &KernelSpec) -> Result<u64> {
    Ok(velu_image(e, k)?.j_invariant())
}

/// Multiset of j-invariants ℓ-isogenous to j (the roots of Φ_ℓ(j, ·) in F_p),
/// sorted ascending. Twist-independent.
pub fn ell_neighbors(j: u64, ell: u64, p: u64) -> Result<Vec<u64>> {
    let e = curve_from_j(j, p)?;
    let kernels = ell_kernels(&e, ell)?;
    let mut out = Vec::with_capacity(kernels.len());
    for k in &kernels {
        out.push(velu_image_j(&e, k)?);
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_points(e: &Curve) -> Vec<Point> {
        let mut pts = vec![Point::Infinity];
        for x in 0..e.p {
            let r = e.rhs(x);
            if r == 0 {
                pts.push(Point::Affine(x, 0));
            } else if let Some(y) = sqrt_mod(r, e.p) {
                pts.push(Point::Affine(x, y));
                pts.push(Point::Affine(x, e.p - y));
            }
        }
        pts
    }

    #[test]
    fn curve_from_j_roundtrip() {
        let e = curve_from_j(244_476, 1_562_207).unwrap();
        assert_eq!(e.j_invariant(), 244_476);
        assert!(curve_from_j(0, 101).is_err());
        assert!(curve_from_j(1728, 1_562_207).is_err());
        for j in 1..101u64 {
            if j == 0 || j == 1728 % 101 {
                continue;
            }
            let e = curve_from_j(j, 101).unwrap();
            assert_eq!(e.j_invariant(), j);
        }
    }

    #[test]
    fn group_law_consistency() {
        let e = Curve::new(101, 3, 7).unwrap();
        let pts = brute_points(&e);
        let n = pts.len() as u64;
        for pt in pts.iter().take(12) {
            assert!(e.contains(pt));
            assert_eq!(e.mul(n, pt), Point::Infinity);
        }
        // Associativity spot check.
        let (p1, p2, p3) = (pts[1], pts[5], pts[9]);
        assert_eq!(e.add(&e.add(&p1, &p2), &p3), e.add(&p1, &e.add(&p2, &p3)));
    }

    #[test]
    fn order_matches_naive_and_twist_identity() {
        for (p, a, b) in [(233u64, 1u64, 3u64), (239, 5, 11), (251, 2, 9), (1009, 7, 40)] {
            let e = Curve::new(p, a, b).unwrap();
            let brute = brute_points(&e).len() as u64;
            assert_eq!(curve_order(&e), brute, "order mismatch at p={p}");
            let (tw, _) = e.twist();
            assert_eq!(curve_order(&tw), 2 * p + 2 - brute);
            // Hasse bound.
            let t = (p as i64 + 1) - brute as i64;
            assert!(t * t <= 4 * p as i64);
        }
    }

    #[test]
    fn two_isogeny_kernels_and_images() {
        // y² = x³ + x over p ≡ 3 mod 4: (0,0) generates a 2-torsion kernel.
        let p = 1019u64;
        let e = Curve::new(p, 1, 0).unwrap();
        let kernels = ell_kernels(&e, 2).unwrap();
        let cubic_roots = roots_split(&FpPoly::new(p, vec![0, 1, 0, 1]));
        assert_eq!(kernels.len(), cubic_roots.len());
        let n = curve_order(&e);
        for k in &kernels {
            let img = velu_image(&e, k).unwrap();
            // Isogenous curves have the same number of points.
            assert_eq!(curve_order(&img), n);
        }
    }

    #[test]
    fn division_poly_roots_are_torsion_x() {
        let p = 307u64;
        let e = Curve::new(p, 4, 1).unwrap();
        let n = curve_order(&e);
        let psi3 = division_poly_x(&e, 3);
        assert_eq!(psi3.degree(), 4);
        let psi5 = division_poly_x(&e, 5);
        assert_eq!(psi5.degree(), 12);
        let psi7 = division_poly_x(&e, 7);
        assert_eq!(psi7.degree(), 24);
        // Brute-force: the x-coordinates of order-3 points are ψ̂₃ roots.
        for pt in brute_points(&e) {
            if let Point::Affine(x, _) = pt {
                let ord = point_order_from_multiple(&e, &pt, n);
                // A rational point has order 3 exactly when its x kills ψ̂₃,
                // and likewise for 5 and 7.
                assert_eq!(ord == 3, psi3.eval(x) == 0);
                assert_eq!(ord == 5, psi5.eval(x) == 0);
                assert_eq!(ord == 7, psi7.eval(x) == 0);
            }
        }
    }

    #[test]
    fn kernels_agree_with_brute_force_subgroup_count() {
        // Exhaustive check on small fields: every rational ℓ-isogeny kernel
        // (Galois-stable subgroup) must be found, for ℓ ∈ {3, 5}.
        for p in [103u64, 131, 151, 199, 211] {
            for ab in [(1u64, 3u64), (2, 5), (4, 7)] {
                let Ok(e) = Curve::new(p, ab.0, ab.1) else { continue };
                for ell in [3u64, 5] {
                    let kernels = ell_kernels(&e, ell).unwrap();
                    // Oracle: factor ψ̂_ℓ into irreducibles and assemble all
                    // Galois-stable subgroups by brute force over subsets is
                    // overkill; instead verify structural properties:
                    let psi = division_poly_x(&e, ell);
                    let d = ((ell - 1) / 2) as usize;
                    let mut seen = std::collections::HashSet::new();
                    for k in &kernels {
                        assert_eq!(k.h.degree(), d);
                        assert_eq!(k.h.leading(), 1);
                        // kernel polynomial divides the division polynomial
                        assert!(psi.rem(&k.h).is_zero(), "kernel ∤ ψ at p={p}, ℓ={ell}");
                        assert!(seen.insert(k.h.coeffs().to_vec()), "duplicate kernel");
                        // image is a genuine curve with the same order
                        let img = velu_image(&e, k).unwrap();
                        assert_eq!(curve_order(&img), curve_order(&e));
                    }
                    // Count check: #kernels ∈ {0, 1, 2, ℓ+1}.
                    let c = kernels.len() as u64;
                    assert!(
                        c == 0 || c == 1 || c == 2 || c == ell + 1,
                        "impossible kernel count {c} for ℓ={ell}"
                    );
                }
            }
        }
    }

    #[test]
    fn neighbor_symmetry() {
        let p = 1009u64;
        for ell in [2u64, 3] {
            for j in [5u64, 77, 123, 500, 801] {
                let Ok(nbrs) = ell_neighbors(j, ell, p) else { continue };
                for &j2 in &nbrs {
                    if j2 == 0 || j2 == 1728 % p {
                        continue;
                    }
                    let back = ell_neighbors(j2, ell, p).unwrap();
                    assert!(back.contains(&j), "ℓ={ell}: {j2} misses backlink to {j}");
                }
            }
        }
    }

    #[test]
    fn sampling_path_full_torsion() {
        // Find a case with fully rational 3-torsion: 9 | #E and the sampling
        // path must report exactly ℓ+1 = 4 kernels.
        let mut checked = 0;
        for p in [307u64, 331, 367, 433, 499] {
            for aa in 1..20u64 {
                let Ok(e) = Curve::new(p, aa, 11) else { continue };
                let pts = brute_points(&e);
                let n = pts.len() as u64;
                if n % 9 != 0 {
                    continue;
                }
                let order3 = pts
                    .iter()
                    .filter(|q| **q != Point::Infinity && e.mul(3, q) == Point::Infinity)
                    .count();
                if order3 == 8 {
                    // E[3] ⊂ E(F_p): all four subgroups pointwise rational.
                    let kernels = ell_kernels(&e, 3).unwrap();
                    assert_eq!(kernels.len(), 4, "p={p}, A={aa}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 0, "no full-torsion instance found in sweep");
    }
}
