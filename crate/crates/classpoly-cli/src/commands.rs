//! Subcommand implementations. Each returns the exact stdout payload so the
//! binary and the tests share one code path.

use crate::cache::{Cache, Kind};
use crate::format;
use classpoly::analytic::{self, ABKind};
use classpoly::arith::{self, Int};
use classpoly::error::Error;
use classpoly::gammapoly;
use classpoly::modpoly;
use classpoly::partition;
use classpoly::Result;
use num_traits::Zero;
use std::fmt::Write as _;

pub fn hilbert(d: i64, cache: &Cache) -> Result<String> {
    cache.get_or(Kind::Hilbert, &d.to_string(), || {
        let coeffs = analytic::hilbert_analytic(d)?;
        Ok(format::write_poly_int(&format!("hilbert_{d}"), &coeffs))
    })
}

pub fn modpoly_cmd(m: u64, modp: Option<u64>, safety: Option<f64>, cache: &Cache) -> Result<String> {
    let lifted = cache.get_or(Kind::Phi, &m.to_string(), || {
        let z = modpoly::phi_lift_with(m, safety.unwrap_or(1.0))?;
        Ok(format::write_bipoly(m, &z, ""))
    })?;
    match modp {
        None => Ok(lifted),
        Some(p) => {
            if p < 2 || !arith::is_prime_u64(p) {
                return Err(Error::BadInput(format!("--mod {p} is not prime")));
            }
            let (_, rows) = format::parse_bipoly(&lifted)?;
            let reduced: modpoly::ZPoly2 = rows
                .iter()
                .map(|row| row.iter().map(|c| Int::from(arith::mod_big(c, p))).collect())
                .collect();
            Ok(format::write_bipoly(m, &reduced, &format!(" mod={p}")))
        }
    }
}

pub fn classpoly_gamma(d: i64, safety: Option<f64>) -> Result<String> {
    let coeffs = gammapoly::class_poly_gamma_with(d, safety.unwrap_or(1.0))?.0;
    Ok(format::write_poly(&format!("gamma_{d}"), &coeffs))
}

pub fn classpoly_good(spec_text: &str, d: i64, safety: Option<f64>) -> Result<String> {
    let spec = format::parse_good_spec(spec_text)?;
    let coeffs = gammapoly::class_poly_good_with(&spec, d, safety.unwrap_or(1.0))?;
    Ok(format::write_poly(&format!("good_{d}"), &coeffs))
}

/// Serialize the shared Ψ and per-discriminant K-field class polynomials
/// into the cache as inspectable artifacts.
fn stash_partition_artifacts(n: u64, cache: &Cache) -> Result<()> {
    if !cache.enabled() {
        return Ok(());
    }
    let (psi_a, psi_b) = analytic::psi_polynomials()?;
    for (tag, psi) in [("ahat", psi_a), ("b", psi_b)] {
        let mut text = String::new();
        writeln!(text, "psipoly kind={tag}").unwrap();
        for (i, row) in psi.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    writeln!(text, "{i} {j}: {c}").unwrap();
                }
            }
        }
        let _ = cache.put(Kind::Psi, tag, &text);
    }
    let (v, d0) = {
        let (v, w) = arith::square_part(24 * n - 1);
        (v, -(w as i64))
    };
    let mut u = 1u64;
    while u <= v {
        if v % u == 0 {
            let disc = ((v / u) as i64).pow(2) * d0;
            for (tag, kind) in [("ahat", ABKind::AHat), ("b", ABKind::B)] {
                let kq = analytic::kfield_class_poly(kind, disc)?;
                let mut text = String::new();
                writeln!(text, "kquad D={disc} kind={tag}").unwrap();
                for (k, (uu, vv)) in kq.coeffs.iter().enumerate() {
                    writeln!(text, "{k}: {uu} {vv}").unwrap();
                }
                let _ = cache.put(Kind::Kfield, &format!("{tag}_{disc}"), &text);
            }
        }
        u += 1;
    }
    Ok(())
}

pub fn partition_poly(n: u64, safety: Option<f64>, cache: &Cache) -> Result<String> {
    let out = cache.get_or(Kind::Partition, &n.to_string(), || {
        let r = partition::partition_poly_with(n, safety.unwrap_or(1.25))?;
        Ok(format::write_poly(&format!("partition_{n}"), &r.poly))
    })?;
    stash_partition_artifacts(n, cache)?;
    Ok(out)
}

pub fn pn(n: u64, check_oracle: bool, safety: Option<f64>, cache: &Cache) -> Result<String> {
    // reuse a cached partition polynomial when available
    let pn_val = if let Some(text) = cache.get(Kind::Partition, &n.to_string()) {
        let (_, coeffs) = format::parse_poly(&text)?;
        let deg = coeffs.len() - 1;
        let trace = -coeffs[deg - 1].clone();
        if !trace.is_integer() {
            return Err(Error::RoundingFailure("cached trace not integral".into()));
        }
        let modulus = Int::from(24 * n as i64 - 1);
        let (q, r) = num_integer::Integer::div_rem(&trace.to_integer(), &modulus);
        if !r.is_zero() {
            return Err(Error::RoundingFailure(
                "cached trace not divisible by 24n-1".into(),
            ));
        }
        q
    } else {
        let r = partition::partition_poly_with(n, safety.unwrap_or(1.25))?;
        let _ = cache.put(
            Kind::Partition,
            &n.to_string(),
            &format::write_poly(&format!("partition_{n}"), &r.poly),
        );
        r.pn
    };
    if check_oracle {
        let want = partition::pentagonal_pn(n);
        if pn_val != want {
            return Err(Error::RoundingFailure(format!(
                "p({n}) = {pn_val} disagrees with pentagonal recurrence value {want}"
            )));
        }
        eprintln!("oracle: ok");
    }
    Ok(format!("{pn_val}\n"))
}
