//! Partition class polynomials H_n^part(x) and partition numbers p(n).
//!
//! For D = 1 − 24n the polynomial H_n^part factors (Lemma-style twisting by
//! ε(u) = ±1) into class polynomials H_{D/u²}(P;x) of the nonholomorphic
//! level-6 function P = Â/(j(j−1728)) + B·γ. The values Â(α_Q), B(α_Q) are
//! not rational in j(α_Q), but they satisfy the bivariate resolvents Ψ_Â,
//! Ψ_B against j, and the quadratic-field class polynomials H_D(Â;x),
//! H_D(B;x) pin down which root belongs to which singular modulus. Each
//! suitable prime p ≡ 11 (mod 12) then yields |D|^h·H_D(P;x) mod p by the
//! same volcano machinery as the γ pipeline, and the CRT assembles the
//! rational polynomial. The trace of H_n^part(x) equals (24n−1)·p(n).

use crate::analytic::{self, ABKind, KQuadPoly, PsiPoly};
use crate::arith::{self, Int, Rat};
use crate::error::Error;
use crate::fppoly::{self, FpPoly};
use crate::gammapoly;
use crate::modpoly::{self, PhiModP, PrimeOptions};
use crate::qforms;
use crate::Result;
use num_traits::{One, Zero};

// ---------------------------------------------------------------------------
// Independent p(n) oracle
// ---------------------------------------------------------------------------

/// p(n) by Euler's pentagonal-number recurrence,
/// p(n) = Σ_{k≥1} (−1)^{k+1} (p(n − k(3k−1)/2) + p(n − k(3k+1)/2)).
pub fn pentagonal_pn(n: u64) -> Int {
    let n = n as usize;
    let mut table: Vec<Int> = Vec::with_capacity(n + 1);
    table.push(Int::one());
    for m in 1..=n {
        let mut acc = Int::zero();
        let mut k = 1usize;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let sign_plus = k % 2 == 1;
            let mut term = table[m - g1].clone();
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= m {
                term += &table[m - g2];
            }
            if sign_plus {
                acc += term;
            } else {
                acc -= term;
            }
            k += 1;
        }
        table.push(acc);
    }
    table.pop().unwrap()
}

// ---------------------------------------------------------------------------
// Height bound
// ---------------------------------------------------------------------------

/// Heuristic height bound (nats) for |D|^h·H_D(P;x):
/// B_P(D) = (7/3)·B_j(D) + h(D)·log|D|. The 7/3 is
/// deg_J(Ψ_Â)/deg_X(Ψ_Â) = 28/12; callers apply a safety factor on top.
#[allow(non_snake_case)]
pub fn bound_BP(d: i64) -> Result<f64> {
    let h = qforms::class_number(d)? as f64;
    Ok((7.0 / 3.0) * analytic::bound_Bj(d) + h * ((-d) as f64).ln())
}

// ---------------------------------------------------------------------------
// Per-prime machinery
// ---------------------------------------------------------------------------

/// Reduce a polynomial with coefficients (u + vΔ)/2 to F_p via Δ ↦ r.
fn kquad_reduce(kq: &KQuadPoly, p: u64, r: u64) -> FpPoly {
    let inv2 = arith::invmod(2, p);
    let c = kq
        .coeffs
        .iter()
        .map(|(u, v)| {
            let uv = arith::addmod(
                arith::mod_big(u, p),
                arith::mulmod(arith::mod_big(v, p), r, p),
                p,
            );
            arith::mulmod(uv, inv2, p)
        })
        .collect();
    FpPoly::new(p, c)
}

/// The unique root of gcd(Ψ_g(x, j_k), H_D(g;x)) mod p; any other gcd degree
/// rejects the prime.
fn pin_root(psi_at_jk: &FpPoly, hg_p: &FpPoly, what: &str) -> Result<u64> {
    let g = psi_at_jk.gcd(hg_p);
    if g.degree() != 1 {
        return Err(Error::PrimeRejected(format!(
            "gcd(Ψ_{what}, H({what})) has degree {} (want 1) mod {}",
            g.degree(),
            psi_at_jk.modulus()
        )));
    }
    Ok(arith::submod(0, g.coeff(0), psi_at_jk.modulus()))
}

/// Roots of f that lie in F_p (distinct), via gcd(f, x^p − x).
fn rational_roots(f: &FpPoly) -> Vec<u64> {
    let p = f.modulus();
    let x = FpPoly::new(p, vec![0, 1]);
    let xp = x.powmod(p, f);
    let g = xp.sub(&x).gcd(f);
    let mut r = fppoly::roots_split(&g);
    r.sort_unstable();
    r
}

/// The 36-combination cross-check: over the 6 F_p-roots ŝ_i of Ψ_Â(x, j_k)
/// and the 6 F_p-roots t_m of Ψ_B(x, j_k), form the candidate values
/// ŝ_i/(j_k(j_k−1728)) + t_m·γ_k. The true P_k must appear as a repeated
/// value (the two square-root branches of D produce it twice); empirically
/// it is the only repeat, though a second repeated pair at −P_k is also
/// tolerated. Extra or misplaced repeats reject the prime.
pub fn combo36_validate(
    p: u64,
    jk: u64,
    gamma_k: u64,
    psi_a_at_jk: &FpPoly,
    psi_b_at_jk: &FpPoly,
    claimed_pk: u64,
) -> Result<()> {
    let s_roots = rational_roots(psi_a_at_jk);
    let t_roots = rational_roots(psi_b_at_jk);
    if s_roots.len() != 6 || t_roots.len() != 6 {
        return Err(Error::PrimeRejected(format!(
            "Ψ root counts ({}, {}) ≠ (6, 6) at j = {jk} mod {p}",
            s_roots.len(),
            t_roots.len()
        )));
    }
    if claimed_pk == 0 {
        return Err(Error::PrimeRejected(format!(
            "P ≡ 0 at j = {jk} mod {p}"
        )));
    }
    let den = arith::mulmod(jk, arith::submod(jk, 1728 % p, p), p);
    if den == 0 {
        return Err(Error::PrimeRejected(format!(
            "j(j−1728) ≡ 0 at j = {jk} mod {p}"
        )));
    }
    let w = arith::invmod(den, p);
    let mut values = Vec::with_capacity(36);
    for &s in &s_roots {
        for &t in &t_roots {
            values.push(arith::addmod(
                arith::mulmod(s, w, p),
                arith::mulmod(t, gamma_k, p),
                p,
            ));
        }
    }
    values.sort_unstable();
    let mut repeated = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i;
        while j + 1 < values.len() && values[j + 1] == values[i] {
            j += 1;
        }
        if j > i {
            repeated.push((values[i], j - i + 1));
        }
        i = j + 1;
    }
    let neg_pk = arith::submod(0, claimed_pk, p);
    let ok = repeated.iter().all(|&(_, c)| c == 2)
        && match repeated.len() {
            1 => repeated[0].0 == claimed_pk,
            2 => {
                let mut want = [claimed_pk, neg_pk];
                want.sort_unstable();
                repeated[0].0 == want[0] && repeated[1].0 == want[1]
            }
            _ => false,
        };
    if !ok {
        return Err(Error::PrimeRejected(format!(
            "36-combination pattern failed at j = {jk} mod {p}: repeats {repeated:?}, want {claimed_pk} (±)"
        )));
    }
    Ok(())
}

/// Shared read-only context for the per-prime partition pipeline.
struct PContext<'a> {
    d: i64,
    hd_main: &'a [Int],
    ka: &'a KQuadPoly,
    kb: &'a KQuadPoly,
    psi_a: &'a PsiPoly,
    psi_b: &'a PsiPoly,
    scale: Int,
    validate: bool,
}

/// One root's worth of per-prime data (â, b kept for diagnostics/tests).
#[allow(dead_code)]
struct RootData {
    ahat: u64,
    b: u64,
    pval: u64,
}

fn root_data(ctx: &PContext, phi: &PhiModP, ha_p: &FpPoly, hb_p: &FpPoly, jk: u64) -> Result<RootData> {
    let p = phi.p;
    let betas = gammapoly::masser_betas(phi, jk)?;
    let gamma_k = gammapoly::gamma_mod_p(&betas, p);
    let psi_a_jk = ctx.psi_a.specialize_j(p, jk);
    let psi_b_jk = ctx.psi_b.specialize_j(p, jk);
    let ahat = pin_root(&psi_a_jk, ha_p, "Â")?;
    let b = pin_root(&psi_b_jk, hb_p, "B")?;
    let den = arith::mulmod(jk, arith::submod(jk, 1728 % p, p), p);
    if den == 0 {
        return Err(Error::PrimeRejected(format!(
            "j(j−1728) ≡ 0 at j = {jk} mod {p}"
        )));
    }
    let pval = arith::addmod(
        arith::mulmod(ahat, arith::invmod(den, p), p),
        arith::mulmod(b, gamma_k, p),
        p,
    );
    if ctx.validate {
        combo36_validate(p, jk, gamma_k, &psi_a_jk, &psi_b_jk, pval)?;
    }
    Ok(RootData { ahat, b, pval })
}

/// Per-prime leg of the partition pipeline: residues of
/// |D|^h·∏(x − P_k) mod p, optionally with a forced square root of D.
fn partition_residues(ctx: &PContext, phi: &PhiModP, forced_r: Option<u64>) -> Result<Vec<u64>> {
    let p = phi.p;
    let roots = modpoly::split_roots(ctx.hd_main, p, "Hilbert class polynomial")?;
    let r = match forced_r {
        Some(r) => r,
        None => arith::sqrt_mod(arith::mod_big(&Int::from(ctx.d), p), p).ok_or_else(|| {
            Error::PrimeRejected(format!("D = {} is not a square mod {p}", ctx.d))
        })?,
    };
    let ha_p = kquad_reduce(ctx.ka, p, r);
    let hb_p = kquad_reduce(ctx.kb, p, r);
    let mut pvals = Vec::with_capacity(roots.len());
    for &jk in &roots {
        pvals.push(root_data(ctx, phi, &ha_p, &hb_p, jk)?.pval);
    }
    let f = FpPoly::from_roots(p, &pvals).mul(&FpPoly::constant(p, arith::mod_big(&ctx.scale, p)));
    let mut out = f.coeffs().to_vec();
    out.resize(roots.len() + 1, 0);
    Ok(out)
}

/// Full per-prime diagnostic data: one slot per root of H_D mod p.
#[derive(Clone, Debug)]
pub struct PrimeTrace {
    pub p: u64,
    /// The square root of D that was used (the other root permutes â/b
    /// but produces the same P values).
    pub r: u64,
    pub j: Vec<u64>,
    pub gamma: Vec<u64>,
    pub ahat: Vec<u64>,
    pub b: Vec<u64>,
    pub pvals: Vec<u64>,
    /// Ascending coefficients of |D|^h·∏(x − P_k) mod p.
    pub f: Vec<u64>,
}

/// Standalone per-prime trace of the partition pipeline (diagnostics and
/// reproduction harnesses; the CRT driver uses a shared-context variant).
pub fn prime_trace(d: i64, phi: &PhiModP, forced_r: Option<u64>) -> Result<PrimeTrace> {
    validate_partition_disc(d)?;
    let p = phi.p;
    let hd_main = analytic::hilbert_analytic(d)?;
    let h = hd_main.len() - 1;
    let ka = analytic::kfield_class_poly(ABKind::AHat, d)?;
    let kb = analytic::kfield_class_poly(ABKind::B, d)?;
    let (psi_a, psi_b) = analytic::psi_polynomials()?;
    let scale = Int::from(d.unsigned_abs()).pow(h as u32);
    let ctx = PContext {
        d,
        hd_main: &hd_main,
        ka: &ka,
        kb: &kb,
        psi_a,
        psi_b,
        scale: scale.clone(),
        validate: true,
    };
    let roots = modpoly::split_roots(&hd_main, p, "Hilbert class polynomial")?;
    let r = match forced_r {
        Some(r) => r,
        None => arith::sqrt_mod(arith::mod_big(&Int::from(d), p), p).ok_or_else(|| {
            Error::PrimeRejected(format!("D = {d} is not a square mod {p}"))
        })?,
    };
    let ha_p = kquad_reduce(&ka, p, r);
    let hb_p = kquad_reduce(&kb, p, r);
    let mut trace = PrimeTrace {
        p,
        r,
        j: roots.clone(),
        gamma: Vec::new(),
        ahat: Vec::new(),
        b: Vec::new(),
        pvals: Vec::new(),
        f: Vec::new(),
    };
    for &jk in &roots {
        let betas = gammapoly::masser_betas(phi, jk)?;
        trace.gamma.push(gammapoly::gamma_mod_p(&betas, p));
        let data = root_data(&ctx, phi, &ha_p, &hb_p, jk)?;
        trace.ahat.push(data.ahat);
        trace.b.push(data.b);
        trace.pvals.push(data.pval);
    }
    let f = FpPoly::from_roots(p, &trace.pvals)
        .mul(&FpPoly::constant(p, arith::mod_big(&scale, p)));
    let mut coeffs = f.coeffs().to_vec();
    coeffs.resize(roots.len() + 1, 0);
    trace.f = coeffs;
    Ok(trace)
}

// ---------------------------------------------------------------------------
// H_D(P; x) by CRT
// ---------------------------------------------------------------------------

fn validate_partition_disc(d: i64) -> Result<()> {
    if d >= 0 || d.rem_euclid(24) != 1 {
        return Err(Error::BadInput(format!(
            "{d} is not a negative discriminant ≡ 1 (mod 24)"
        )));
    }
    Ok(())
}

/// H_{D,1}(P;x) ∈ ℚ[x] (β = 1 convention), degree h(D); |D|^h·H is integral.
#[allow(non_snake_case)]
pub fn class_poly_P_with(d: i64, safety: f64) -> Result<Vec<Rat>> {
    validate_partition_disc(d)?;
    let m = d.unsigned_abs();
    let daux = qforms::find_suitable_order(m, Some(d))?;
    let hd_aux = analytic::hilbert_analytic(daux)?;
    let hd_main = analytic::hilbert_analytic(d)?;
    let h = hd_main.len() - 1;
    let ka = analytic::kfield_class_poly(ABKind::AHat, d)?;
    let kb = analytic::kfield_class_poly(ABKind::B, d)?;
    let (psi_a, psi_b) = analytic::psi_polynomials()?;
    let cache = modpoly::walk_caches(m, safety.max(1.0))?;
    let bound = bound_BP(d)? * safety.max(1.0);
    let scale = Int::from(m).pow(h as u32);
    let ctx = PContext {
        d,
        hd_main: &hd_main,
        ka: &ka,
        kb: &kb,
        psi_a,
        psi_b,
        scale: scale.clone(),
        validate: true,
    };
    let opts = PrimeOptions {
        require_11_mod_12: true,
        ..PrimeOptions::default()
    };
    let (vals, _primes) = modpoly::crt_run(m, daux, bound, &opts, h + 1, |e| {
        let phi = modpoly::phi_mod_p(m, e, &hd_aux, &cache)?;
        partition_residues(&ctx, &phi, None)
    })?;
    if vals[h] != scale {
        return Err(Error::RoundingFailure(
            "leading coefficient differs from |D|^h".into(),
        ));
    }
    Ok(vals
        .iter()
        .map(|v| Rat::new(v.clone(), scale.clone()))
        .collect())
}

/// H_{D,1}(P;x) with the default 1.25 safety factor on B_P.
#[allow(non_snake_case)]
pub fn class_poly_P(d: i64) -> Result<Vec<Rat>> {
    class_poly_P_with(d, 1.25)
}

// ---------------------------------------------------------------------------
// Assembly of H_n^part
// ---------------------------------------------------------------------------

/// Result of the full partition pipeline for one n.
#[derive(Clone, Debug)]
pub struct PartitionResult {
    pub n: u64,
    /// H_n^part(x), ascending coefficients, monic of degree H(1−24n).
    pub poly: Vec<Rat>,
    /// p(n) = trace / (24n − 1).
    pub pn: Int,
    /// The factors (D/u², H_{D/u²,1}(P;x)) before ε-twisting.
    pub factors: Vec<(i64, Vec<Rat>)>,
}

/// 1 − 24n = v²·D₀ with D₀ fundamental; returns (v, D₀).
fn peel_square(n: u64) -> (u64, i64) {
    let (v, w) = arith::square_part(24 * n - 1);
    (v, -(w as i64))
}

/// ε(u) of the twisting lemma: +1 if u ≡ ±1 (mod 12), else −1.
fn epsilon(u: u64) -> i64 {
    match u % 12 {
        1 | 11 => 1,
        _ => -1,
    }
}

fn divisors(v: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (q, e) in arith::factor_u64(v) {
        let mut next = Vec::new();
        for d in &ds {
            let mut qe = 1u64;
            for _ in 0..=e {
                next.push(d * qe);
                qe *= q;
            }
        }
        ds = next;
    }
    ds.sort_unstable();
    ds
}

fn rat_poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Degree of H_n^part: the Hurwitz-style count Σ_{u|v} h((1−24n)/u²).
pub fn hurwitz_degree(n: u64) -> Result<u64> {
    let (v, d0) = peel_square(n);
    let mut deg = 0u64;
    for u in divisors(v) {
        deg += qforms::class_number((u as i64 * u as i64) * d0)?;
    }
    Ok(deg)
}

/// The full partition pipeline: H_n^part(x) and p(n).
pub fn partition_poly_with(n: u64, safety: f64) -> Result<PartitionResult> {
    if n == 0 {
        return Err(Error::BadInput("n must be positive".into()));
    }
    let (v, d0) = peel_square(n);
    let mut factors = Vec::new();
    let mut poly = vec![Rat::one()];
    for u in divisors(v) {
        let w = v / u; // factor discriminant (1−24n)/u² = w²·D₀
        let disc = (w as i64 * w as i64) * d0;
        let hp = class_poly_P_with(disc, safety)?;
        let hdeg = hp.len() - 1;
        // ε(u)^h · H(ε(u)·x): for ε = −1 the x^i coefficient picks up
        // (−1)^{h+i}, preserving monicity.
        let twisted: Vec<Rat> = if epsilon(u) == 1 {
            hp.clone()
        } else {
            hp.iter()
                .enumerate()
                .map(|(i, c)| {
                    if (hdeg + i) % 2 == 1 {
                        -c.clone()
                    } else {
                        c.clone()
                    }
                })
                .collect()
        };
        poly = rat_poly_mul(&poly, &twisted);
        factors.push((disc, hp));
    }
    let deg = poly.len() - 1;
    if !poly[deg].is_one() {
        return Err(Error::RoundingFailure(
            "assembled partition polynomial is not monic".into(),
        ));
    }
    let trace = -poly[deg - 1].clone();
    if !trace.is_integer() {
        return Err(Error::RoundingFailure(format!(
            "trace {trace} of H_{n}^part is not an integer"
        )));
    }
    let modulus = Int::from(24 * n as i64 - 1);
    let (pn, rem) = num_integer::Integer::div_rem(&trace.to_integer(), &modulus);
    if !rem.is_zero() {
        return Err(Error::RoundingFailure(format!(
            "trace {trace} is not divisible by 24n−1 = {modulus}"
        )));
    }
    Ok(PartitionResult { n, poly, pn, factors })
}

/// Partition pipeline with the default safety factor.
pub fn partition_poly(n: u64) -> Result<PartitionResult> {
    partition_poly_with(n, 1.25)
}
