//! Classical modular polynomials Φ_m for arbitrary m > 1: per-prime
//! computation via isogeny-volcano walks over F_p, suitable-prime planning,
//! height bounds, and CRT lifting to ℤ.
//!
//! The per-prime routine works entirely from the ℓ-isogeny graph structure:
//! for a suitable imaginary quadratic order O (class-number window
//! ψ(m)+1 ≤ h ≤ 3ψ(m)) and a suitable prime p (4p = t² − ℓ²v²·disc(O) with
//! the v-divisibility conditions below), the roots of the Hilbert class
//! polynomial H_{disc(O)} mod p are j-invariants of curves whose prime-degree
//! isogenies are all F_p-rational to the depth the walks need. Φ_m(X, j_i)
//! is assembled as ∏(X − j̃) over the cyclic-m-isogeny targets j̃ of ψ(m)+1
//! surface vertices j_i, and Φ_m mod p follows by interpolation in Y.
//!
//! Every structural expectation (set cardinalities, complete splitting,
//! symmetry, monic leading row) is checked defensively; a violation rejects
//! the prime — the plan replaces it — rather than trusting the theory to
//! cover coincidences like j-collisions between walk vertices.

use crate::analytic;
use crate::arith::{self, Int};
use crate::ecfp;
use crate::error::Error;
use crate::fppoly::{self, FpPoly};
use crate::qforms;
use crate::Result;
use num_traits::{Signed, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Bivariate integer polynomial: `z[i][j]` is the coefficient of X^i Y^j,
/// rows trimmed of trailing zeros (same convention as the analytic oracle).
pub type ZPoly2 = Vec<Vec<Int>>;

/// Φ_m reduced modulo p, dense (ψ(m)+1) × (ψ(m)+1), `c[i][j]` ↔ X^i Y^j.
#[derive(Clone, Debug)]
pub struct PhiModP {
    pub m: u64,
    pub p: u64,
    pub c: Vec<Vec<u64>>,
}

impl PhiModP {
    /// Φ_m(X, y) as a univariate polynomial in X.
    pub fn specialize_y(&self, y: u64) -> FpPoly {
        let p = self.p;
        let coeffs: Vec<u64> = self
            .c
            .iter()
            .map(|row| {
                // Horner in y.
                row.iter()
                    .rev()
                    .fold(0u64, |acc, &cf| arith::addmod(arith::mulmod(acc, y, p), cf, p))
            })
            .collect();
        FpPoly::new(p, coeffs)
    }
}

/// One planned prime with its norm-equation witness 4p = t² − ℓ²v²·disc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanEntry {
    pub p: u64,
    pub t: i64,
    pub v: u64,
}

/// A set of suitable primes covering a coefficient-height budget.
#[derive(Clone, Debug)]
pub struct PrimePlan {
    pub m: u64,
    pub disc: i64,
    pub bound_nats: f64,
    pub entries: Vec<PlanEntry>,
}

/// Extra constraints for prime selection.
#[derive(Clone, Debug, Default)]
pub struct PrimeOptions {
    /// Require p ≡ 11 (mod 12) (the partition pipeline wants −1 to be a
    /// non-residue and 3 to behave; harmless elsewhere).
    pub require_11_mod_12: bool,
    /// Lower bound on p (defaults to an internal floor).
    pub min_p: u64,
    /// Primes to skip (already consumed or rejected upstream).
    pub avoid: Vec<u64>,
}

/// Dedekind ψ(m) = m · ∏_{p | m} (1 + 1/p): the degree of Φ_m in each
/// variable.
pub fn psi(m: u64) -> u64 {
    arith::dedekind_psi(m)
}

/// The nine-term Φ₂ as exact integer data.
pub fn phi2() -> ZPoly2 {
    let i = |s: &str| -> Int { s.parse().unwrap() };
    vec![
        vec![i("-157464000000000"), i("8748000000"), i("-162000"), i("1")],
        vec![i("8748000000"), i("40773375"), i("1488")],
        vec![i("-162000"), i("1488"), i("-1")],
        vec![i("1")],
    ]
}

/// Height bound (in nats) for the coefficients of Φ_m.
///
/// For prime m this is the explicit 6m·log m + 18m. For composite m it is a
/// deliberately generous composition-style bound: prime-power contributions
/// are combined multiplicatively over the factorization and inflated by
/// ψ(m)·log m, trading extra primes (linear cost) for a comfortable margin
/// (validated against measured oracle heights in the tests).
#[allow(non_snake_case)]
pub fn height_bound_phi(m: u64) -> f64 {
    assert!(m > 1, "height_bound_phi needs m > 1");
    let fac = arith::factor_u64(m);
    if fac.len() == 1 && fac[0].1 == 1 {
        let l = m as f64;
        return 6.0 * l * l.ln() + 18.0 * l;
    }
    let psi_m = psi(m) as f64;
    let mf = m as f64;
    let mut sum = 0.0;
    for &(l, k) in &fac {
        let lf = l as f64;
        sum += (k as f64) * (6.0 * lf * lf.ln() + 18.0 * lf) * (mf / lf);
    }
    psi_m / mf * sum + psi_m * mf.ln()
}

// ---------------------------------------------------------------------------
// Suitability and prime selection
// ---------------------------------------------------------------------------

/// (ℓ, v_base, k) for m: ℓ the largest prime of m with ℓ^k ∥ m, and
/// v_base = m/ℓ the required divisor of v. v = (m/ℓ)·w with ℓ ∤ w makes
/// every prime-degree walk in the algorithm rational: for each prime q with
/// q^a ∥ m, the q-isogeny volcano below the surface has depth
/// v_q(ℓ·v) ≥ a, so a consecutive q-steps stay on rational curves.
fn suitability_shape(m: u64) -> Result<(u64, u64, u32)> {
    let fac = arith::factor_u64(m);
    let &(ell, k) = fac.last().ok_or_else(|| Error::BadInput(format!("m = {m} too small")))?;
    Ok((ell, m / ell, k))
}

fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128 + 2;
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            break;
        }
        x = y;
    }
    while x * x > n {
        x -= 1;
    }
    x
}

/// Check whether p is suitable for (m, disc): p ≡ 1 (mod ℓ) and
/// 4p = t² − ℓ²v²·disc for some t ≡ 2 (mod ℓ) and v = (m/ℓ)·w, ℓ ∤ w.
/// Returns the witness with the smallest v.
pub fn is_suitable_prime(m: u64, disc: i64, p: u64) -> Option<PlanEntry> {
    let (ell, v_base, _) = suitability_shape(m).ok()?;
    if !arith::is_prime_u64(p) {
        return None;
    }
    if ell > 2 && p % ell != 1 {
        return None;
    }
    if p <= 3 {
        return None;
    }
    let absd = disc.unsigned_abs() as u128;
    let v_base = v_base.max(1);
    let mut w = 1u64;
    loop {
        let v = v_base * w;
        let sq = (ell as u128 * v as u128).pow(2) * absd;
        let rhs = 4u128 * p as u128;
        if sq > rhs {
            return None;
        }
        if w % ell != 0 {
            let t2 = rhs - sq;
            let t = isqrt_u128(t2);
            if t * t == t2 && t > 0 {
                // Normalize the sign so t ≡ 2 (mod ℓ); ±t are both valid
                // traces (they name the two quadratic twists).
                let tt = t as i64;
                let t_norm = if ell > 2 && tt.rem_euclid(ell as i64) != 2 {
                    -tt
                } else {
                    tt
                };
                if ell == 2 || t_norm.rem_euclid(ell as i64) == 2 {
                    return Some(PlanEntry { p, t: t_norm, v });
                }
            }
        }
        w += 1;
    }
}

/// Deterministic suitable-prime stream: for each v in an expanding ladder
/// (first the parity-preferred choice, then widening), scan t upward in the
/// residue class t ≡ 2 (mod ℓ) and keep every prime p = (t² − ℓ²v²·disc)/4
/// passing the filters. Primes are accumulated until Σ log p exceeds
/// `bound_nats` + log 2.
pub fn select_primes(m: u64, disc: i64, bound_nats: f64, opts: &PrimeOptions) -> Result<PrimePlan> {
    let (ell, v_base, _) = suitability_shape(m)?;
    if disc >= 0 || !(disc % 4 == 0 || disc.rem_euclid(4) == 1) {
        return Err(Error::BadInput(format!("{disc} is not a negative discriminant")));
    }
    let v_base = v_base.max(1);
    let min_p = opts.min_p.max(1009).max(2 * m);
    let avoid: BTreeSet<u64> = opts.avoid.iter().copied().collect();
    let need = bound_nats.max(0.0) + std::f64::consts::LN_2;

    // v ladder: v_base·w over w coprime to ℓ, ascending, with the
    // parity-preferred w first (v even iff disc ≡ 1 mod 8, when achievable).
    let want_even = disc.rem_euclid(8) == 1;
    let mut ws: Vec<u64> = (1..=64u64).filter(|w| w % ell != 0).collect();
    ws.sort_by_key(|&w| {
        let v = v_base * w;
        let parity_ok = (v % 2 == 0) == want_even;
        (!parity_ok, w)
    });

    let mut entries: Vec<PlanEntry> = Vec::new();
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut acc = 0.0f64;

    'outer: for &w in &ws {
        let v = v_base * w;
        let lv2d = (ell as i128 * v as i128).pow(2) * (-disc) as i128;
        // t range: p from min_p up to a generous ceiling.
        let p_cap: i128 = 1i128 << 44;
        let t_lo = isqrt_u128((4 * min_p as i128 - lv2d).max(0) as u128) as i128;
        let t_hi = isqrt_u128((4 * p_cap + lv2d) as u128) as i128 + 1;
        // Walk t ≡ 2 (mod ℓ) (every residue when ℓ = 2 after parity filter).
        let step = if ell == 2 { 2 } else { ell as i128 };
        let mut t = if ell == 2 {
            let mut t0 = t_lo.max(2);
            if (t0 * t0 - lv2d) % 4 != 0 {
                t0 += 1;
            }
            t0
        } else {
            let mut t0 = t_lo.max(2);
            t0 += (2 - t0).rem_euclid(step);
            t0
        };
        while t <= t_hi {
            let four_p = t * t + lv2d;
            if four_p % 4 == 0 {
                let p = (four_p / 4) as u64;
                if p >= min_p
                    && !seen.contains(&p)
                    && !avoid.contains(&p)
                    && (!opts.require_11_mod_12 || p % 12 == 11)
                    && p % ell != 0
                    && arith::is_prime_u64(p)
                {
                    seen.insert(p);
                    entries.push(PlanEntry { p, t: t as i64, v });
                    acc += (p as f64).ln();
                    if acc >= need {
                        break 'outer;
                    }
                }
            }
            t += step;
        }
    }

    if acc < need {
        // Randomized widening fallback: sample (t, w) in growing boxes.
        let mut rng = ChaCha20Rng::seed_from_u64(arith::fnv1a64([
            0x70726d73u64,
            m,
            disc.unsigned_abs(),
            bound_nats.to_bits(),
        ]));
        for _ in 0..2_000_000u64 {
            let w = 1 + rng.next_u64() % 4096;
            if w % ell == 0 {
                continue;
            }
            let v = v_base * w;
            let lv2d = (ell as i128 * v as i128).pow(2) * (-disc) as i128;
            let k = 2 + (rng.next_u64() & ((1 << 23) - 1)) as i128;
            let t = if ell == 2 { 2 * k } else { ell as i128 * k + 2 };
            let four_p = t * t + lv2d;
            if four_p % 4 != 0 {
                continue;
            }
            if four_p / 4 > (1i128 << 50) {
                continue;
            }
            let p = (four_p / 4) as u64;
            if p >= min_p
                && !seen.contains(&p)
                && !avoid.contains(&p)
                && (!opts.require_11_mod_12 || p % 12 == 11)
                && p % ell != 0
                && arith::is_prime_u64(p)
            {
                seen.insert(p);
                entries.push(PlanEntry { p, t: t as i64, v });
                acc += (p as f64).ln();
                if acc >= need {
                    break;
                }
            }
        }
    }

    if acc < need {
        return Err(Error::PrimePoolExhausted(format!(
            "suitable primes for m = {m}, disc = {disc} cover only {acc:.1} of {need:.1} nats"
        )));
    }
    entries.sort_by_key(|e| e.p);
    Ok(PrimePlan { m, disc, bound_nats, entries })
}

// ---------------------------------------------------------------------------
// Per-prime volcano machinery
// ---------------------------------------------------------------------------

/// The group order of a specific curve with known trace magnitude:
/// |E(F_p)| ∈ {p+1−t, p+1+t}. Samples points to pick the side; ambiguity
/// (points annihilated by both) falls back to full order computation.
fn curve_order_from_trace(e: &ecfp::Curve, t: i64) -> u64 {
    let p = e.p;
    let n1 = (p as i128 + 1 - t as i128) as u64;
    let n2 = (p as i128 + 1 + t as i128) as u64;
    if n1 == n2 {
        return ecfp::curve_order(e);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(arith::fnv1a64([0x74726163u64, p, e.a, e.b]));
    let mut ok1 = true;
    let mut ok2 = true;
    for _ in 0..12 {
        let pt = e.random_point(&mut rng);
        if !matches!(e.mul(n1, &pt), ecfp::Point::Infinity) {
            ok1 = false;
        }
        if !matches!(e.mul(n2, &pt), ecfp::Point::Infinity) {
            ok2 = false;
        }
        if ok1 != ok2 {
            break;
        }
    }
    match (ok1, ok2) {
        (true, false) => n1,
        (false, true) => n2,
        _ => ecfp::curve_order(e),
    }
}

/// The ℓ+1 j-invariants (with multiplicity, sorted) that are ℓ-isogenous to
/// j, using the known trace to skip the order search. Any failure (j with
/// extra automorphisms, kernel count off, singular Vélu image) rejects the
/// prime rather than aborting the whole computation.
fn ell_neighbors_traced(j: u64, ell: u64, p: u64, t: i64) -> Result<Vec<u64>> {
    let reject = |e: Error| Error::PrimeRejected(format!("vertex {j}, ℓ = {ell} mod {p}: {e}"));
    let e = ecfp::curve_from_j(j, p).map_err(&reject)?;
    let n = curve_order_from_trace(&e, t);
    let kernels = ecfp::ell_kernels_with_order(&e, ell, Some(n)).map_err(&reject)?;
    if kernels.len() != ell as usize + 1 {
        return Err(Error::PrimeRejected(format!(
            "vertex {j} has {} rational {ell}-kernels mod {p}, expected {}",
            kernels.len(),
            ell + 1
        )));
    }
    let mut out: Vec<u64> = kernels
        .iter()
        .map(|k| ecfp::velu_image_j(&e, k).map_err(&reject))
        .collect::<Result<_>>()?;
    out.sort_unstable();
    Ok(out)
}

/// Roots of H mod p: sorted, all simple, splitting completely; anything
/// else rejects the prime.
pub(crate) fn split_roots(hd: &[Int], p: u64, what: &str) -> Result<Vec<u64>> {
    let coeffs: Vec<u64> = hd.iter().map(|c| arith::mod_big(c, p)).collect();
    let f = FpPoly::new(p, coeffs);
    let deg = f.degree();
    if deg == 0 || hd.len() != deg + 1 {
        return Err(Error::PrimeRejected(format!("{what} drops degree mod {p}")));
    }
    let roots = fppoly::roots_split(&f);
    if roots.len() != deg {
        return Err(Error::PrimeRejected(format!(
            "{what} does not split completely mod {p} ({} of {deg} roots)",
            roots.len()
        )));
    }
    let mut sorted = roots;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::PrimeRejected(format!("{what} has repeated roots mod {p}")));
    }
    Ok(sorted)
}

/// All roots of Φ_q(X, j) mod p from cached reduced coefficients, as a
/// sorted deduplicated set. Rejects the prime if the specialized polynomial
/// fails to split completely.
fn phi_roots_at(phi_q: &[Vec<u64>], q: u64, j: u64, p: u64) -> Result<Vec<u64>> {
    let coeffs: Vec<u64> = phi_q
        .iter()
        .map(|row| {
            row.iter()
                .rev()
                .fold(0u64, |acc, &cf| arith::addmod(arith::mulmod(acc, j, p), cf, p))
        })
        .collect();
    let f = FpPoly::new(p, coeffs);
    let deg = f.degree();
    if deg as u64 != psi(q) {
        return Err(Error::PrimeRejected(format!(
            "Φ_{q}(X, {j}) has degree {deg} ≠ ψ({q}) mod {p}"
        )));
    }
    let mut roots = fppoly::roots_split(&f);
    if roots.len() != deg {
        return Err(Error::PrimeRejected(format!(
            "Φ_{q}(X, {j}) does not split completely mod {p}"
        )));
    }
    roots.sort_unstable();
    roots.dedup();
    Ok(roots)
}

/// Φ_m mod p for one plan entry, given H_{disc} over ℤ and the Φ_q caches
/// (over ℤ) for every prime q dividing m below its largest prime factor's
/// step-6 share.
pub fn phi_mod_p(
    m: u64,
    entry: &PlanEntry,
    hd: &[Int],
    cache: &BTreeMap<u64, ZPoly2>,
) -> Result<PhiModP> {
    let p = entry.p;
    if m == 2 {
        let z = phi2();
        return Ok(PhiModP { m, p, c: reduce_zpoly2(&z, p, 4) });
    }
    let psi_m = psi(m) as usize;
    let n = psi_m + 1;

    let roots = split_roots(hd, p, "class polynomial")?;
    if roots.len() < n {
        return Err(Error::PrimeRejected(format!(
            "only {} surface roots mod {p}, need {n}",
            roots.len()
        )));
    }
    let s = &roots[..n];

    // Per-vertex target multisets (prime m) or sets (composite m).
    let fac = arith::factor_u64(m);
    let mut products: Vec<FpPoly> = Vec::with_capacity(n);

    if fac.len() == 1 && fac[0].1 == 1 {
        // m an odd prime: enumerate the m+1 isogenous neighbors directly.
        for &j in s {
            let nbrs = ell_neighbors_traced(j, m, p, entry.t)?;
            products.push(FpPoly::from_roots(p, &nbrs));
        }
    } else {
        // Composite m: seed with the large-prime step when ℓ₀ > √m, then
        // expand one small prime at a time in ascending order.
        let ell_max = fac.last().unwrap().0;
        let ell0 = if ell_max as u128 * ell_max as u128 > m as u128 {
            ell_max
        } else {
            1
        };
        let mut steps: Vec<u64> = Vec::new();
        for &(q, k) in &fac {
            let reps = if q == ell0 { k - 1 } else { k };
            steps.extend(std::iter::repeat(q).take(reps as usize));
        }
        steps.sort_unstable();

        // Reduce the needed Φ_q caches once.
        let mut phi_p: BTreeMap<u64, Vec<Vec<u64>>> = BTreeMap::new();
        for &q in &steps {
            if !phi_p.contains_key(&q) {
                let z = cache.get(&q).ok_or_else(|| {
                    Error::BadInput(format!("missing cached Φ_{q} for m = {m}"))
                })?;
                phi_p.insert(q, reduce_zpoly2(z, p, psi(q) as usize + 1));
            }
        }

        // Memoized per-vertex root sets of Φ_q(X, ·) mod p.
        let mut memo: HashMap<(u64, u64), Vec<u64>> = HashMap::new();

        for &j in s {
            let s0: Vec<u64> = if ell0 > 1 {
                let mut v = ell_neighbors_traced(j, ell0, p, entry.t)?;
                v.dedup();
                v
            } else {
                vec![j]
            };
            let mut prev_prev: Vec<u64> = Vec::new(); // S^{d-2}
            let mut prev: Vec<u64> = s0; // S^{d-1}
            let mut first = true;
            let mut last_q = ell0;
            for &q in &steps {
                let mut next: BTreeSet<u64> = BTreeSet::new();
                for &u in &prev {
                    let roots_u = match memo.get(&(q, u)) {
                        Some(r) => r.clone(),
                        None => {
                            let r = phi_roots_at(&phi_p[&q], q, u, p)?;
                            memo.insert((q, u), r.clone());
                            r
                        }
                    };
                    next.extend(roots_u);
                }
                // Same prime twice in a row: remove the vertices two steps
                // back — in the q-isogeny forest those are exactly the
                // backtracking targets, which do not carry cyclic isogenies.
                let cur: Vec<u64> = if !first && q == last_q {
                    next.into_iter()
                        .filter(|x| prev_prev.binary_search(x).is_err())
                        .collect()
                } else {
                    next.into_iter().collect()
                };
                prev_prev = std::mem::take(&mut prev);
                prev = cur;
                first = false;
                last_q = q;
            }
            if prev.len() != psi_m {
                return Err(Error::PrimeRejected(format!(
                    "vertex {j}: |S^r| = {} ≠ ψ({m}) = {psi_m} mod {p}",
                    prev.len()
                )));
            }
            products.push(FpPoly::from_roots(p, &prev));
        }
    }

    // Interpolate each X-coefficient as a polynomial in Y over the n nodes.
    let mut c: Vec<Vec<u64>> = Vec::with_capacity(psi_m + 1);
    for k in 0..=psi_m {
        let vals: Vec<u64> = products.iter().map(|f| f.coeff(k)).collect();
        let fk = fppoly::interpolate(p, s, &vals)?;
        let mut row = fk.coeffs().to_vec();
        row.resize(psi_m + 1, 0);
        c.push(row);
    }

    // Structural checks: symmetric, monic in X (and so in Y).
    for i in 0..=psi_m {
        for j in 0..i {
            if c[i][j] != c[j][i] {
                return Err(Error::PrimeRejected(format!(
                    "asymmetry at ({i},{j}) mod {p}"
                )));
            }
        }
    }
    if c[psi_m][0] != 1 || c[psi_m][1..].iter().any(|&x| x != 0) {
        return Err(Error::PrimeRejected(format!("not monic in X mod {p}")));
    }

    Ok(PhiModP { m, p, c })
}

/// Reduce a ZPoly2 into a dense width × width coefficient table mod p.
pub fn reduce_zpoly2(z: &ZPoly2, p: u64, width: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![0u64; width]; width];
    for (i, row) in z.iter().enumerate() {
        for (j, cf) in row.iter().enumerate() {
            out[i][j] = arith::mod_big(cf, p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Lifting to ℤ
// ---------------------------------------------------------------------------

/// Pick the order used by the CRT driver: the smallest suitable fundamental
/// discriminant in which every small walk prime q is inert — inert q means
/// no horizontal q-edges anywhere in the q-isogeny graph, so the q-walks
/// live in forests and the set recurrences are exact — and the large prime
/// ℓ₀ (when present) is inert or ramified, so its ℓ₀+1 neighbor values are
/// always distinct (a split ℓ₀ whose ideal class has order ≤ 2 would merge
/// the two horizontal targets at every vertex of every prime).
pub fn pick_order(m: u64) -> Result<i64> {
    let fac = arith::factor_u64(m);
    let prime_m = fac.len() == 1 && fac[0].1 == 1;
    let ell_max = fac.last().unwrap().0;
    let ell0 = if ell_max as u128 * ell_max as u128 > m as u128 {
        ell_max
    } else {
        1
    };
    let mut walk_primes: Vec<u64> = Vec::new();
    for &(q, k) in &fac {
        let reps = if q == ell0 { k - 1 } else { k };
        if reps > 0 {
            walk_primes.push(q);
        }
    }
    for d in qforms::suitable_orders(m, None)?.take(20_000) {
        if prime_m {
            // Kernel enumeration keeps multiplicities; no graph constraint.
            return Ok(d);
        }
        let small_ok = walk_primes.iter().all(|&q| kronecker_disc(d, q) == -1);
        let large_ok = ell0 == 1 || kronecker_disc(d, ell0) <= 0;
        if small_ok && large_ok {
            return Ok(d);
        }
    }
    Err(Error::PrimePoolExhausted(format!(
        "no suitable order with inert walk primes for m = {m}"
    )))
}

/// Kronecker symbol (d | q) for prime q (including q = 2).
fn kronecker_disc(d: i64, q: u64) -> i32 {
    if q == 2 {
        match d.rem_euclid(8) {
            1 => 1,
            5 => -1,
            _ => 0,
        }
    } else if d % q as i64 == 0 {
        0
    } else {
        arith::legendre(d.rem_euclid(q as i64) as u64, q)
    }
}

/// The Φ_q caches (over ℤ) needed by the small-prime walk steps of m:
/// one entry per prime q | m whose step count in the walk is positive.
pub fn walk_caches(m: u64, safety: f64) -> Result<BTreeMap<u64, ZPoly2>> {
    let fac = arith::factor_u64(m);
    let ell_max = fac.last().map(|&(q, _)| q).unwrap_or(1);
    let ell0 = if ell_max as u128 * ell_max as u128 > m as u128 {
        ell_max
    } else {
        1
    };
    let mut cache: BTreeMap<u64, ZPoly2> = BTreeMap::new();
    for &(q, k) in &fac {
        let reps = if q == ell0 { k - 1 } else { k };
        if reps > 0 && !cache.contains_key(&q) {
            cache.insert(q, phi_lift_with(q, safety)?);
        }
    }
    Ok(cache)
}

/// Φ_m over ℤ via CRT over a suitable-prime plan. `safety` scales the
/// height bound (more primes, more margin).
pub fn phi_lift_with(m: u64, safety: f64) -> Result<ZPoly2> {
    if m < 2 {
        return Err(Error::BadInput(format!("phi_lift needs m ≥ 2, got {m}")));
    }
    if m == 2 {
        return Ok(phi2());
    }
    let cache = walk_caches(m, safety)?;
    let disc = pick_order(m)?;
    let hd = analytic::hilbert_analytic(disc)?;
    let bound = height_bound_phi(m) * safety.max(1.0);
    crt_phi(m, disc, &hd, &cache, bound).map(|(z, _)| z)
}

/// Φ_m over ℤ with the default safety margin.
pub fn phi_lift(m: u64) -> Result<ZPoly2> {
    phi_lift_with(m, 1.0)
}

/// Generic CRT driver shared by the Φ lift and the class-polynomial
/// algorithms: selects suitable primes for (m, disc) until Σ log p covers
/// `bound_nats` + log 2, runs `per_prime` on each (in parallel), replaces
/// any prime it rejects, reconstructs each of the `slots` residue slots as
/// a signed integer, and audits the measured height against the budget
/// (an audit failure means the budget did not really cover the answer, so
/// the reconstruction cannot be trusted).
///
/// `per_prime` must return exactly `slots` residues mod `entry.p`.
pub fn crt_run<F>(
    m: u64,
    disc: i64,
    bound_nats: f64,
    base_opts: &PrimeOptions,
    slots: usize,
    per_prime: F,
) -> Result<(Vec<Int>, Vec<u64>)>
where
    F: Fn(&PlanEntry) -> Result<Vec<u64>> + Sync,
{
    let mut opts = base_opts.clone();
    let need = bound_nats + std::f64::consts::LN_2;

    let mut done: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut acc = 0.0f64;
    let mut pending: Vec<PlanEntry> = select_primes(m, disc, bound_nats, &opts)?.entries;
    let mut round = 0;
    while acc < need {
        let results: Vec<(PlanEntry, Result<Vec<u64>>)> = pending
            .par_iter()
            .map(|e| (*e, per_prime(e)))
            .collect();
        pending.clear();
        for (e, r) in results {
            opts.avoid.push(e.p);
            match r {
                Ok(res) => {
                    if res.len() != slots {
                        return Err(Error::BadInput(format!(
                            "per-prime result has {} slots, expected {slots}",
                            res.len()
                        )));
                    }
                    acc += (e.p as f64).ln();
                    done.push((e.p, res));
                }
                Err(Error::PrimeRejected(_)) => {}
                Err(other) => return Err(other),
            }
        }
        if acc < need {
            round += 1;
            if round > 16 {
                return Err(Error::PrimePoolExhausted(format!(
                    "m = {m}, disc = {disc}: too many prime-rejection rounds"
                )));
            }
            pending = select_primes(m, disc, (need - acc).max(20.0), &opts)?.entries;
        }
    }

    done.sort_by_key(|d| d.0);
    let primes: Vec<u64> = done.iter().map(|d| d.0).collect();
    let mut out: Vec<Int> = Vec::with_capacity(slots);
    let mut max_ht = 0.0f64;
    for s in 0..slots {
        let residues: Vec<u64> = done.iter().map(|d| d.1[s]).collect();
        let val = arith::crt_signed(&primes, &residues)?;
        if !val.is_zero() {
            max_ht = max_ht.max(val.bits() as f64 * std::f64::consts::LN_2);
        }
        out.push(val);
    }
    if max_ht > bound_nats {
        return Err(Error::RoundingFailure(format!(
            "height audit failed for m = {m}: measured {max_ht:.1} nats exceeds budget {bound_nats:.1}"
        )));
    }
    Ok((out, primes))
}

/// CRT core shared by phi_lift and the tests: runs phi_mod_p across a plan
/// (replacing rejected primes), reconstructs signed coefficients, audits the
/// measured height, and returns the lift with the primes actually used.
pub fn crt_phi(
    m: u64,
    disc: i64,
    hd: &[Int],
    cache: &BTreeMap<u64, ZPoly2>,
    bound_nats: f64,
) -> Result<(ZPoly2, Vec<u64>)> {
    let psi_m = psi(m) as usize;
    let width = psi_m + 1;
    let (flat, primes) = crt_run(
        m,
        disc,
        bound_nats,
        &PrimeOptions::default(),
        width * width,
        |e| {
            let phi = phi_mod_p(m, e, hd, cache)?;
            Ok(phi.c.into_iter().flatten().collect())
        },
    )?;
    let mut out: ZPoly2 = Vec::with_capacity(width);
    for i in 0..width {
        let mut row: Vec<Int> = flat[i * width..(i + 1) * width].to_vec();
        while row.len() > 1 && row.last().map(Zero::is_zero).unwrap_or(false) {
            row.pop();
        }
        out.push(row);
    }
    Ok((out, primes))
}

/// Measured height (nats) of a bivariate integer polynomial.
pub fn zpoly2_height(z: &ZPoly2) -> f64 {
    let mut h = 0.0f64;
    for row in z {
        for c in row {
            if !c.is_zero() {
                h = h.max(c.abs().bits() as f64 * std::f64::consts::LN_2);
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn psi_values() {
        assert_eq!(psi(1), 1);
        assert_eq!(psi(23), 24);
        assert_eq!(psi(575), 720);
        assert_eq!(psi(12), 24);
    }

    #[test]
    fn phi2_matches_oracle_and_symmetry() {
        let z = phi2();
        assert_eq!(z, analytic::phi_analytic_oracle(2).unwrap());
        assert_eq!(z[0][0], "-157464000000000".parse().unwrap());
        // Symmetry.
        for i in 0..4 {
            for j in 0..4 {
                let a = z.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_default();
                let b = z.get(j).and_then(|r| r.get(i)).cloned().unwrap_or_default();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn height_bounds_dominate_measured() {
        assert!(height_bound_phi(2) >= 157464000000000.0f64.ln());
        let b23 = height_bound_phi(23);
        assert!((b23 - (6.0 * 23.0 * 23.0f64.ln() + 18.0 * 23.0)).abs() < 1e-9);
        for m in 2..=20u64 {
            let oracle = analytic::phi_analytic_oracle(m).unwrap();
            let ht = zpoly2_height(&oracle);
            let b = height_bound_phi(m);
            assert!(b >= ht, "height bound for m = {m}: {b:.1} < measured {ht:.1}");
        }
    }

    #[test]
    fn suitability_examples() {
        // The known working pair at m = 23: disc −2783 and p = 1562207 with
        // (t, v) = (600, 2).
        let e = is_suitable_prime(23, -2783, 1_562_207).expect("1562207 suitable");
        assert_eq!((e.t, e.v), (600, 2));
        assert_eq!(e.t.rem_euclid(23), 2);
        for p in [1562207u64, 2744591, 4294607, 6454031, 7089107, 10010291] {
            assert!(is_suitable_prime(23, -2783, p).is_some(), "{p} should be suitable");
            assert_eq!(p % 12, 11, "{p} ≢ 11 mod 12");
        }
        // Composite m: v must absorb m/ℓ.
        let m = 12u64;
        let d = pick_order(m).unwrap();
        let plan = select_primes(m, d, 40.0, &PrimeOptions::default()).unwrap();
        assert!(!plan.entries.is_empty());
        for e in &plan.entries {
            assert!(arith::is_prime_u64(e.p));
            assert_eq!(e.p % 3, 1);
            assert_eq!(e.v % 4, 0);
            assert_ne!(e.v % 12, 0);
            let lhs = Int::from(4) * Int::from(e.p);
            let rhs = Int::from(e.t) * Int::from(e.t)
                - Int::from(9) * Int::from(e.v) * Int::from(e.v) * Int::from(d);
            assert_eq!(lhs, rhs, "norm equation fails for {:?}", e);
        }
    }

    #[test]
    fn select_primes_respects_filters() {
        let opts = PrimeOptions {
            require_11_mod_12: true,
            min_p: 100_000,
            avoid: vec![],
        };
        let plan = select_primes(23, -2783, 60.0, &opts).unwrap();
        let mut acc = 0.0;
        for e in &plan.entries {
            assert!(e.p >= 100_000);
            assert_eq!(e.p % 12, 11);
            assert_eq!(e.p % 23, 1);
            acc += (e.p as f64).ln();
        }
        assert!(acc >= 60.0 + std::f64::consts::LN_2);
        // Avoid-list is honored.
        let opts2 = PrimeOptions {
            require_11_mod_12: true,
            min_p: 100_000,
            avoid: plan.entries.iter().map(|e| e.p).collect(),
        };
        let plan2 = select_primes(23, -2783, 60.0, &opts2).unwrap();
        for e in &plan2.entries {
            assert!(!plan.entries.iter().any(|f| f.p == e.p));
        }
    }

    #[test]
    fn phi23_mod_p_matches_oracle_at_paper_prime() {
        let entry = PlanEntry { p: 1_562_207, t: 600, v: 2 };
        let hd = analytic::hilbert_analytic(-2783).unwrap();
        let cache = BTreeMap::new();
        let phi = phi_mod_p(23, &entry, &hd, &cache).unwrap();
        let oracle = analytic::phi_analytic_oracle(23).unwrap();
        let want = reduce_zpoly2(&oracle, entry.p, 25);
        assert_eq!(phi.c, want);
    }

    #[test]
    fn lift_small_primes_match_oracle() {
        for m in [3u64, 5, 7] {
            let lift = phi_lift(m).unwrap();
            let oracle = analytic::phi_analytic_oracle(m).unwrap();
            assert_eq!(lift, oracle, "Φ_{m} lift ≠ oracle");
        }
    }

    #[test]
    fn lift_composite_matches_oracle() {
        // 4 and 9 exercise pure prime-power towers, 6 the large-prime seed
        // step, 12 the mixed tower with a repeated small prime (the
        // no-backtrack rule) followed by a different prime.
        for m in [4u64, 6, 9, 12] {
            let lift = phi_lift(m).unwrap();
            let oracle = analytic::phi_analytic_oracle(m).unwrap();
            assert_eq!(lift, oracle, "Φ_{m} lift ≠ oracle");
        }
    }

    #[test]
    fn lift_is_symmetric_and_monic() {
        let z = phi_lift(6).unwrap();
        let w = psi(6) as usize;
        assert_eq!(z.len(), w + 1);
        assert_eq!(z[w], vec![Int::one()]);
        for i in 0..=w {
            for j in 0..=w {
                let a = z.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_default();
                let b = z.get(j).and_then(|r| r.get(i)).cloned().unwrap_or_default();
                assert_eq!(a, b, "asymmetry at ({i},{j})");
            }
        }
    }

    #[test]
    fn extra_prime_consistency() {
        // Reduce the lifted Φ₃ modulo a fresh suitable prime and compare
        // against a fresh direct per-prime run.
        let m = 3u64;
        let lift = phi_lift(m).unwrap();
        let disc = pick_order(m).unwrap();
        let hd = analytic::hilbert_analytic(disc).unwrap();
        let plan = select_primes(
            m,
            disc,
            height_bound_phi(m) + 40.0,
            &PrimeOptions::default(),
        )
        .unwrap();
        let entry = *plan.entries.last().unwrap();
        let cache = BTreeMap::new();
        let fresh = phi_mod_p(m, &entry, &hd, &cache).unwrap();
        let want = reduce_zpoly2(&lift, entry.p, psi(m) as usize + 1);
        assert_eq!(fresh.c, want);
    }
}
