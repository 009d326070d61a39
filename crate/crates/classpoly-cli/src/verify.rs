//! The `verify-paper` harness: recomputes the reference worked example and
//! the published value tables, printing one pass/fail line per row.

use classpoly::analytic;
use classpoly::arith::{self, Int, Rat};
use classpoly::ecfp;
use classpoly::error::Error;
use classpoly::fppoly::{self, FpPoly};
use classpoly::gammapoly::{self, GoodFunctionSpec};
use classpoly::modpoly;
use classpoly::partition;
use classpoly::Result;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;
use std::time::Instant;

const H24_EXPECTED: &str = include_str!("data/h24.txt");

fn rat(num: i128, den: i128) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

fn pw(base: i64, e: u32) -> Int {
    Int::from(base).pow(e)
}

/// The published gamma-table rows for the fundamental discriminants the
/// pipeline supports (D = -3, -4 are poles of gamma).
fn gamma_table() -> Vec<(i64, Vec<Rat>)> {
    let one = Rat::from_integer(Int::from(1));
    vec![
        (-7, vec![Rat::new(Int::from(-181), pw(3, 6) * pw(5, 3) * 7), one.clone()]),
        (-8, vec![Rat::new(Int::from(61), pw(2, 6) * pw(5, 3) * pw(7, 2)), one.clone()]),
        (-11, vec![Rat::new(Int::from(-289), pw(2, 14) * pw(7, 2) * 11), one.clone()]),
        (
            -15,
            vec![
                Rat::new(Int::from(-1045769), pw(3, 8) * pw(5, 3) * pw(7, 4) * pw(11, 5)),
                Rat::new(Int::from(313), pw(3, 4) * 5 * pw(11, 3)),
                one.clone(),
            ],
        ),
        (-16, vec![Rat::new(Int::from(179), pw(3, 6) * pw(7, 2) * pw(11, 3)), one.clone()]),
        (-19, vec![Rat::new(Int::from(-275), pw(2, 14) * pw(3, 6) * 19), one.clone()]),
        (
            -20,
            vec![
                Rat::new(Int::from(-2307859), pw(2, 18) * pw(5, 3) * pw(11, 5) * pw(19, 2)),
                Rat::new(Int::from(-43925), pw(2, 6) * pw(11, 3) * pw(19, 2)),
                one.clone(),
            ],
        ),
        (
            -23,
            vec![
                Rat::new(
                    Int::from(-346923509992369i64),
                    pw(5, 6) * pw(7, 4) * pw(11, 4) * pw(17, 3) * pw(19, 2) * 23,
                ),
                Rat::new(
                    Int::from(6062055706222i64),
                    pw(5, 6) * pw(7, 4) * pw(11, 4) * pw(17, 3) * pw(19, 2) * 23,
                ),
                Rat::new(
                    Int::from(8123835989i64),
                    pw(5, 3) * pw(7, 2) * pw(11, 3) * pw(17, 3) * pw(19, 2) * 23,
                ),
                one,
            ],
        ),
    ]
}

/// Published small partition class polynomials H_n^part for n = 1..4.
fn partition_table() -> Vec<(u64, Vec<Rat>)> {
    vec![
        (1, vec![rat(-419, 1), rat(3592, 23), rat(-23, 1), rat(1, 1)]),
        (
            2,
            vec![
                rat(1454023, 47),
                rat(1092873176, 47 * 47),
                rat(-65838, 1),
                rat(169659, 47),
                rat(-94, 1),
                rat(1, 1),
            ],
        ),
        (
            3,
            vec![
                rat(2791651635293, 71 * 71),
                rat(166629520876208, 71 * 71 * 71),
                rat(9188934683, 71),
                rat(44648582886, 71 * 71),
                rat(-723721, 1),
                rat(1312544, 71),
                rat(-213, 1),
                rat(1, 1),
            ],
        ),
        (
            4,
            vec![
                rat(-134884469547631, 5 * 5 * 5 * 5 * 19),
                rat(-53144327916296, 19 * 19),
                rat(9776785708507683, 95 * 95 * 95),
                rat(-97215753021, 19),
                rat(3949512899743, 95 * 95),
                rat(-9455070, 1),
                rat(9032603, 95),
                rat(-475, 1),
                rat(1, 1),
            ],
        ),
    ]
}

fn check_phi2() -> Result<()> {
    let built_in = modpoly::phi2();
    let lifted = modpoly::phi_lift(2)?;
    if lifted != built_in {
        return Err(Error::RoundingFailure("lifted Phi_2 differs from table".into()));
    }
    if built_in[0][0] != Int::from(-157464000000000i64) {
        return Err(Error::RoundingFailure("Phi_2 constant term mismatch".into()));
    }
    Ok(())
}

fn check_gamma_tables(safety: f64) -> Result<()> {
    for (d, want) in gamma_table() {
        let got = gammapoly::class_poly_gamma_with(d, safety.max(1.0))?.0;
        if got != want {
            return Err(Error::RoundingFailure(format!("gamma table mismatch at D = {d}")));
        }
    }
    Ok(())
}

fn check_zagier(safety: f64) -> Result<()> {
    let spec = GoodFunctionSpec::zagier_k();
    let got = gammapoly::class_poly_good_with(&spec, -7, safety.max(1.0))?;
    let want = vec![rat(3591, 1), rat(1, 1)];
    if got != want {
        return Err(Error::RoundingFailure("K-function value at D = -7 mismatch".into()));
    }
    Ok(())
}

fn phi23_at(p: u64) -> Result<classpoly::modpoly::PhiModP> {
    let entry = modpoly::is_suitable_prime(23, -2783, p)
        .ok_or_else(|| Error::BadInput(format!("{p} is not suitable for m = 23")))?;
    let hd_aux = analytic::hilbert_analytic(-2783)?;
    modpoly::phi_mod_p(23, &entry, &hd_aux, &BTreeMap::new())
}

/// Per-prime residues of |D|^h H_{-23}(P;x) at one forced suitable prime.
fn partition_residues_at(p: u64) -> Result<Vec<u64>> {
    Ok(partition::prime_trace(-23, &phi23_at(p)?, None)?.f)
}

fn check_worked_example() -> Result<()> {
    // Singular moduli, gamma values, pinned (a-hat, b, P) triples, and the
    // residue polynomial at p = 1562207.
    let phi = phi23_at(1_562_207)?;
    let mut detail = partition::prime_trace(-23, &phi, None)?;
    let want_ahat = vec![1201792, 98544, 239915];
    if detail.ahat != want_ahat {
        // the published table used the other square root of D
        detail = partition::prime_trace(-23, &phi, Some(detail.p - detail.r))?;
    }
    let want_j = vec![244476, 467416, 482979];
    let want_gamma = vec![1461486, 587848, 220836];
    // The published table's middle b-value reads 560362; the value that is
    // actually pinned by the gcd on the branch producing these a-hats is
    // 453808 (560362 is the other branch's 1560362 with a digit dropped).
    let want_b = vec![1120135, 453808, 531933];
    let want_p = vec![1352290, 519913, 1252234];
    let want_f = vec![1150855, 337961, 1282366, 12167];
    if detail.j != want_j {
        return Err(Error::RoundingFailure(format!("j mismatch: {:?}", detail.j)));
    }
    if detail.gamma != want_gamma {
        return Err(Error::RoundingFailure(format!("gamma mismatch: {:?}", detail.gamma)));
    }
    if detail.ahat != want_ahat {
        return Err(Error::RoundingFailure(format!("a-hat mismatch: {:?}", detail.ahat)));
    }
    if detail.b != want_b {
        return Err(Error::RoundingFailure(format!("b mismatch: {:?}", detail.b)));
    }
    if detail.pvals != want_p {
        return Err(Error::RoundingFailure(format!("P mismatch: {:?}", detail.pvals)));
    }
    if detail.f != want_f {
        return Err(Error::RoundingFailure(format!("f mismatch: {:?}", detail.f)));
    }
    Ok(())
}

fn check_partition_23_and_residues(safety: f64) -> Result<()> {
    let hp = partition::class_poly_P_with(-23, safety.max(1.0))?;
    let want = vec![rat(-419, 1), rat(3592, 23), rat(-23, 1), rat(1, 1)];
    if hp != want {
        return Err(Error::RoundingFailure("H_{-23}(P;x) mismatch".into()));
    }
    // 23^3 H has the published integer coefficients ...
    let scaled: Vec<Int> = hp
        .iter()
        .map(|c| (c * Rat::from_integer(pw(23, 3))).to_integer())
        .collect();
    if scaled != vec![Int::from(-5097973), Int::from(1900168), Int::from(-279841), Int::from(12167)] {
        return Err(Error::RoundingFailure("23^3 H mismatch".into()));
    }
    // ... and fresh per-prime runs at the published primes reproduce the
    // published residue polynomials.
    let table: [(u64, [u64; 4]); 5] = [
        (2744591, [391209, 1900168, 2464750, 12167]),
        (4294607, [3491241, 1900168, 4014766, 12167]),
        (6454031, [1356058, 1900168, 6174190, 12167]),
        (7089107, [1991134, 1900168, 6809266, 12167]),
        (10010291, [4912318, 1900168, 9730450, 12167]),
    ];
    for (p, want) in table {
        let got = partition_residues_at(p)?;
        if got != want {
            return Err(Error::RoundingFailure(format!(
                "residue mismatch mod {p}: {got:?}"
            )));
        }
    }
    Ok(())
}

fn check_partition_tables(safety: f64) -> Result<()> {
    for (n, want) in partition_table() {
        let r = partition::partition_poly_with(n, safety.max(1.0))?;
        if r.poly != want {
            return Err(Error::RoundingFailure(format!("H_{n}^part mismatch")));
        }
        if r.pn != partition::pentagonal_pn(n) {
            return Err(Error::RoundingFailure(format!("p({n}) oracle mismatch")));
        }
    }
    Ok(())
}

fn check_partition_24(safety: f64) -> Result<()> {
    let r = partition::partition_poly_with(24, safety.max(1.0))?;
    if r.pn != Int::from(1575) {
        return Err(Error::RoundingFailure(format!("p(24) = {} != 1575", r.pn)));
    }
    let (_, want) = crate::format::parse_poly(H24_EXPECTED)?;
    if r.poly != want {
        for (k, (g, w)) in r.poly.iter().zip(&want).enumerate() {
            if g != w {
                return Err(Error::RoundingFailure(format!(
                    "H_24^part x^{k} coefficient mismatch: {g} vs {w}"
                )));
            }
        }
        return Err(Error::RoundingFailure("H_24^part degree mismatch".into()));
    }
    // spot-check the published H_{-575}(P;x) leading coefficients
    let h575 = &r
        .factors
        .iter()
        .find(|(d, _)| *d == -575)
        .ok_or_else(|| Error::RoundingFailure("missing -575 factor".into()))?
        .1;
    if h575.len() != 19
        || h575[17] != rat(-905648, 1)
        || h575[16] != rat(7864919720287, 23)
        || h575[0]
            != Rat::new(
                "-274989755819545226019386671943056995003866543720439419"
                    .parse()
                    .unwrap(),
                Int::from(18504486125u64),
            )
    {
        return Err(Error::RoundingFailure("H_{-575}(P;x) coefficient mismatch".into()));
    }
    Ok(())
}

fn check_graph_sanity(seed: u64, samples: usize) -> Result<()> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let ells = [2u64, 3, 5, 7, 11, 13];
    let mut hd_cache: BTreeMap<i64, Vec<Int>> = BTreeMap::new();
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < samples {
        attempts += 1;
        if attempts > samples * 20 {
            return Err(Error::PrimePoolExhausted(
                "could not find enough (ell, p) samples".into(),
            ));
        }
        let ell = ells[(rng.next_u64() % ells.len() as u64) as usize];
        let daux = modpoly::pick_order(ell)?;
        let bound = 20.0 + (rng.next_u64() % 30) as f64;
        let plan = modpoly::select_primes(ell, daux, bound, &modpoly::PrimeOptions::default())?;
        if plan.entries.is_empty() {
            continue;
        }
        let entry = &plan.entries[(rng.next_u64() % plan.entries.len() as u64) as usize];
        let p = entry.p;
        let hd = hd_cache
            .entry(daux)
            .or_insert_with(|| analytic::hilbert_analytic(daux).expect("aux Hilbert"));
        let hp = FpPoly::new(p, hd.iter().map(|c| arith::mod_big(c, p)).collect());
        let roots = fppoly::roots_split(&hp);
        if roots.is_empty() {
            continue;
        }
        let j = roots[(rng.next_u64() % roots.len() as u64) as usize];
        let nbrs = match ecfp::ell_neighbors(j, ell, p) {
            Ok(n) => n,
            Err(_) => continue, // j = 0/1728 edge cases: resample
        };
        if nbrs.len() != (ell + 1) as usize {
            return Err(Error::RoundingFailure(format!(
                "surface vertex j = {j} mod {p} has {} != {} ell-neighbors",
                nbrs.len(),
                ell + 1
            )));
        }
        let b = nbrs[(rng.next_u64() % nbrs.len() as u64) as usize];
        match ecfp::ell_neighbors(b, ell, p) {
            Ok(back) => {
                if !back.contains(&j) {
                    return Err(Error::RoundingFailure(format!(
                        "asymmetric edge: {j} -> {b} (ell = {ell}, p = {p})"
                    )));
                }
            }
            Err(_) => continue,
        }
        done += 1;
    }
    Ok(())
}

/// Run the verification matrix; returns (passed, failed).
pub fn run(only: Option<&str>, seed: u64, safety: Option<f64>) -> (usize, usize) {
    let safety = safety.unwrap_or(1.25);
    let rows: Vec<(&str, Box<dyn Fn() -> Result<()>>)> = vec![
        ("phi_2 table and lift", Box::new(check_phi2)),
        ("gamma value tables (8 discriminants)", Box::new(move || check_gamma_tables(safety))),
        ("K-function class polynomial at D=-7", Box::new(move || check_zagier(safety))),
        ("worked-example micro-trace at p=1562207", Box::new(check_worked_example)),
        (
            "H_{-23}(P;x) and published residue polynomials",
            Box::new(move || check_partition_23_and_residues(safety)),
        ),
        ("partition class polynomials n=1..4", Box::new(move || check_partition_tables(safety))),
        ("partition n=24 (degree 21, p(24)=1575)", Box::new(move || check_partition_24(safety))),
        (
            "isogeny-graph sanity (seeded random samples)",
            Box::new(move || check_graph_sanity(seed, 12)),
        ),
    ];
    let mut passed = 0;
    let mut failed = 0;
    for (label, f) in rows {
        if let Some(filter) = only {
            if !label.contains(filter) {
                continue;
            }
        }
        let t0 = Instant::now();
        match f() {
            Ok(()) => {
                println!("[PASS] {label} ({:.1}s)", t0.elapsed().as_secs_f64());
                passed += 1;
            }
            Err(e) => {
                println!("[FAIL] {label} ({:.1}s): {e}", t0.elapsed().as_secs_f64());
                failed += 1;
            }
        }
    }
    println!("verify-paper: {passed} passed, {failed} failed");
    (passed, failed)
}
