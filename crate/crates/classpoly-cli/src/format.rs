//! Exact, diff-able, language-neutral text formats for polynomials.
//!
//! Univariate: header `poly <name> deg=<d> var=<x>`, then one line per
//! coefficient `k: <num>[/<den>]` in descending k, exact decimal integers.
//! Bivariate (symmetric): header `bipoly m=<m>`, then sparse lines
//! `i j: <coeff>` with only i ≥ j stored.

use classpoly::arith::{Int, Rat};
use classpoly::error::Error;
use classpoly::modpoly::ZPoly2;
use classpoly::Result;
use num_traits::{One, Signed, Zero};
use std::fmt::Write as _;

/// Render a rational polynomial (ascending coefficient slice) in the
/// univariate text format.
pub fn write_poly(name: &str, coeffs: &[Rat]) -> String {
    let deg = coeffs.len().saturating_sub(1);
    let mut out = String::new();
    writeln!(out, "poly {name} deg={deg} var=x").unwrap();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.denom().is_one() {
            writeln!(out, "{k}: {}", c.numer()).unwrap();
        } else {
            writeln!(out, "{k}: {}/{}", c.numer(), c.denom()).unwrap();
        }
    }
    out
}

/// Render an integer polynomial (ascending coefficient slice).
pub fn write_poly_int(name: &str, coeffs: &[Int]) -> String {
    let deg = coeffs.len().saturating_sub(1);
    let mut out = String::new();
    writeln!(out, "poly {name} deg={deg} var=x").unwrap();
    for (k, c) in coeffs.iter().enumerate().rev() {
        writeln!(out, "{k}: {c}").unwrap();
    }
    out
}

/// Parse the univariate format back into (name, ascending coefficients).
pub fn parse_poly(text: &str) -> Result<(String, Vec<Rat>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::BadInput("empty polynomial text".into()))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("poly") {
        return Err(Error::BadInput(format!("bad poly header: {header}")));
    }
    let name = parts
        .next()
        .ok_or_else(|| Error::BadInput("poly header missing name".into()))?
        .to_string();
    let deg: usize = parts
        .find_map(|p| p.strip_prefix("deg="))
        .ok_or_else(|| Error::BadInput("poly header missing deg=".into()))?
        .parse()
        .map_err(|e| Error::BadInput(format!("bad deg: {e}")))?;
    let mut coeffs = vec![Rat::zero(); deg + 1];
    for line in lines {
        let (k, val) = line
            .split_once(':')
            .ok_or_else(|| Error::BadInput(format!("bad coefficient line: {line}")))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|e| Error::BadInput(format!("bad exponent in {line:?}: {e}")))?;
        if k > deg {
            return Err(Error::BadInput(format!("exponent {k} exceeds deg={deg}")));
        }
        coeffs[k] = parse_rat(val.trim())?;
    }
    Ok((name, coeffs))
}

fn parse_int(s: &str) -> Result<Int> {
    s.parse()
        .map_err(|e| Error::BadInput(format!("bad integer {s:?}: {e}")))
}

fn parse_rat(s: &str) -> Result<Rat> {
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() || den.is_negative() {
                return Err(Error::BadInput(format!("bad denominator in {s:?}")));
            }
            Ok(Rat::new(parse_int(n)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Render a symmetric bivariate polynomial; only entries with i ≥ j are
/// written. `extra` is appended to the header (e.g. " mod=1009").
pub fn write_bipoly(m: u64, rows: &ZPoly2, extra: &str) -> String {
    let mut out = String::new();
    writeln!(out, "bipoly m={m}{extra}").unwrap();
    for (i, row) in rows.iter().enumerate() {
        for (j, c) in row.iter().enumerate().take(i + 1) {
            if !c.is_zero() {
                writeln!(out, "{i} {j}: {c}").unwrap();
            }
        }
    }
    out
}

/// Parse the bivariate format into (m, full symmetric coefficient matrix).
pub fn parse_bipoly(text: &str) -> Result<(u64, ZPoly2)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::BadInput("empty bipoly text".into()))?;
    if !header.starts_with("bipoly ") {
        return Err(Error::BadInput(format!("bad bipoly header: {header}")));
    }
    let m: u64 = header
        .split_whitespace()
        .find_map(|p| p.strip_prefix("m="))
        .ok_or_else(|| Error::BadInput("bipoly header missing m=".into()))?
        .parse()
        .map_err(|e| Error::BadInput(format!("bad m: {e}")))?;
    let mut entries = Vec::new();
    let mut dim = 0usize;
    for line in lines {
        let (ij, val) = line
            .split_once(':')
            .ok_or_else(|| Error::BadInput(format!("bad bipoly line: {line}")))?;
        let mut it = ij.split_whitespace();
        let i: usize = it
            .next()
            .ok_or_else(|| Error::BadInput(format!("bad bipoly line: {line}")))?
            .parse()
            .map_err(|e| Error::BadInput(format!("bad i in {line:?}: {e}")))?;
        let j: usize = it
            .next()
            .ok_or_else(|| Error::BadInput(format!("bad bipoly line: {line}")))?
            .parse()
            .map_err(|e| Error::BadInput(format!("bad j in {line:?}: {e}")))?;
        if j > i {
            return Err(Error::BadInput(format!(
                "bipoly stores only i ≥ j, got {i} {j}"
            )));
        }
        let c = parse_int(val.trim())?;
        dim = dim.max(i + 1);
        entries.push((i, j, c));
    }
    let mut rows = vec![vec![Int::zero(); dim]; dim];
    for (i, j, c) in entries {
        rows[i][j] = c.clone();
        rows[j][i] = c;
    }
    Ok((m, rows))
}

/// Parse a good-function specification file: lines
/// `A <n>: num=<c0,c1,...> den=<c0,c1,...>` plus `c1=<int>` and `c2=<int>`.
pub fn parse_good_spec(text: &str) -> Result<classpoly::gammapoly::GoodFunctionSpec> {
    use classpoly::gammapoly::{GoodFunctionSpec, GoodTerm};
    let mut terms = Vec::new();
    let mut c1 = None;
    let mut c2 = None;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("A ") {
            let (n, body) = rest
                .split_once(':')
                .ok_or_else(|| Error::BadInput(format!("bad A-line: {line}")))?;
            let n: u32 = n
                .trim()
                .parse()
                .map_err(|e| Error::BadInput(format!("bad n in {line:?}: {e}")))?;
            let mut num = None;
            let mut den = None;
            for field in body.split_whitespace() {
                if let Some(v) = field.strip_prefix("num=") {
                    num = Some(parse_int_list(v)?);
                } else if let Some(v) = field.strip_prefix("den=") {
                    den = Some(parse_int_list(v)?);
                } else {
                    return Err(Error::BadInput(format!("unknown field {field:?}")));
                }
            }
            terms.push(GoodTerm {
                n,
                num: num.ok_or_else(|| Error::BadInput(format!("missing num= in {line:?}")))?,
                den: den.ok_or_else(|| Error::BadInput(format!("missing den= in {line:?}")))?,
            });
        } else if let Some(v) = line.strip_prefix("c1=") {
            c1 = Some(
                v.trim()
                    .parse()
                    .map_err(|e| Error::BadInput(format!("bad c1: {e}")))?,
            );
        } else if let Some(v) = line.strip_prefix("c2=") {
            c2 = Some(
                v.trim()
                    .parse()
                    .map_err(|e| Error::BadInput(format!("bad c2: {e}")))?,
            );
        } else {
            return Err(Error::BadInput(format!("unrecognized spec line: {line}")));
        }
    }
    let spec = GoodFunctionSpec {
        terms,
        c1: c1.ok_or_else(|| Error::BadInput("spec missing c1=".into()))?,
        c2: c2.ok_or_else(|| Error::BadInput("spec missing c2=".into()))?,
    };
    spec.validate()?;
    Ok(spec)
}

fn parse_int_list(s: &str) -> Result<Vec<Int>> {
    s.split(',').map(|t| parse_int(t.trim())).collect()
}
