//! Binary quadratic forms, class groups, Heegner-point representatives,
//! Hurwitz class numbers, and suitable-order search.
//!
//! Forms are positive definite integral forms [a,b,c] = aX² + bXY + cY²
//! of negative discriminant D = b² − 4ac. The CM point attached to a form
//! is α_Q = (−b + √D)/(2a) in the upper half plane.

use crate::arith::{dedekind_psi, factor_u64, square_part};
use crate::{Error, Result};
use num_integer::Integer;
use std::collections::HashMap;

/// A negative discriminant: value < 0 and value ≡ 0 or 1 (mod 4).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(value: i64) -> Result<Self> {
        if value >= 0 {
            return Err(Error::BadInput(format!("discriminant {value} is not negative")));
        }
        if value.rem_euclid(4) > 1 {
            return Err(Error::BadInput(format!("{value} is not ≡ 0, 1 (mod 4)")));
        }
        Ok(Discriminant(value))
    }

    pub fn get(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }

    pub fn is_fundamental(self) -> bool {
        let (d0, v) = fundamental_decomposition_parts(self.0);
        v == 1 && d0 == self.0
    }
}

/// Positive definite integral binary quadratic form [a,b,c].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let q = QuadForm { a, b, c };
        if a <= 0 || q.disc() >= 0 {
            return Err(Error::BadInput(format!(
                "[{a},{b},{c}] is not positive definite of negative discriminant"
            )));
        }
        Ok(q)
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// gcd(a, b, c); 1 for primitive forms.
    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// True when |b| ≤ a ≤ c with b ≥ 0 if |b| = a or a = c.
    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        b.abs() <= a && a <= c && !(b < 0 && (b.abs() == a || a == c))
    }
}

/// SL₂(ℤ)-reduction by the classical translate/flip loop.
pub fn reduce_form(q: &QuadForm) -> Result<QuadForm> {
    if q.a <= 0 || q.disc() >= 0 {
        return Err(Error::BadInput(format!(
            "cannot reduce [{},{},{}]: not positive definite",
            q.a, q.b, q.c
        )));
    }
    let d = q.disc();
    let (mut a, mut b) = (q.a, q.b);
    loop {
        // Translate so that −a < b ≤ a.
        let two_a = 2 * a;
        b = b.rem_euclid(two_a);
        if b > a {
            b -= two_a;
        }
        let c = (b * b - d) / (4 * a);
        if a > c {
            // Flip: [a,b,c] → [c,−b,a].
            a = c;
            b = -b;
        } else {
            // Boundary normalization: b ≥ 0 when a = c or b = −a.
            if (a == c || b == -a) && b < 0 {
                b = -b;
            }
            return Ok(QuadForm { a, b, c });
        }
    }
}

fn enumerate_reduced_forms(d: i64, primitive_only: bool) -> Result<Vec<QuadForm>> {
    let d = Discriminant::new(d)?.get();
    let mut out = Vec::new();
    let a_max = ((d.unsigned_abs() / 3) as f64).sqrt() as i64 + 1;
    for a in 1..=a_max {
        for b in (-a + 1)..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if a == c && b < 0 {
                continue; // the mirror [a,−b,a] ~ [a,b,a]
            }
            let q = QuadForm { a, b, c };
            if primitive_only && !q.is_primitive() {
                continue;
            }
            out.push(q);
        }
    }
    out.sort_by_key(|q| (q.a, q.b));
    Ok(out)
}

/// All reduced primitive forms of discriminant D, sorted by (a, b).
pub fn primitive_reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    enumerate_reduced_forms(d, true)
}

/// All reduced forms of discriminant D of every content (content u forms are
/// u times primitive forms of discriminant D/u²), sorted by (a, b).
pub fn all_reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    enumerate_reduced_forms(d, false)
}

/// Class number h(D) = number of reduced primitive forms.
pub fn class_number(d: i64) -> Result<u64> {
    Ok(primitive_reduced_forms(d)?.len() as u64)
}

/// Hurwitz class number H(|D|) = Σ_{u² | D} h(D/u²), with the conventional
/// weights 1/2 and 1/3 at D/u² = −4, −3. (For D ≡ 1 mod 24 those weights
/// never arise and the sum is a plain integer.)
pub fn hurwitz_class_number(d: i64) -> Result<u64> {
    let d = Discriminant::new(d)?.get();
    let mut six_fold = 0u64; // sum of 6 * weighted class numbers
    let mut u = 1i64;
    while u * u <= -d {
        if d % (u * u) == 0 {
            let du = d / (u * u);
            if du.rem_euclid(4) <= 1 {
                six_fold += match du {
                    -3 => 2,
                    -4 => 3,
                    _ => 6 * class_number(du)?,
                };
            }
        }
        u += 1;
    }
    if six_fold % 6 != 0 {
        return Err(Error::BadInput(format!(
            "Hurwitz class number of {d} is not an integer"
        )));
    }
    Ok(six_fold / 6)
}

fn heegner_scan(d: i64, primitive_only: bool) -> Result<Vec<QuadForm>> {
    if d >= 0 || d.rem_euclid(24) != 1 {
        return Err(Error::BadInput(format!("{d} is not ≡ 1 (mod 24) and negative")));
    }
    let target = if primitive_only {
        class_number(d)? as usize
    } else {
        all_reduced_forms(d)?.len()
    };
    let mut found: HashMap<QuadForm, QuadForm> = HashMap::new();
    let mut order = Vec::new();
    // Scan a = 6, 12, 18, … and b ≡ 1 (mod 12) with −a < b ≤ a; first hit per
    // SL₂(ℤ)-class wins, which maximizes Im α_Q = √|D|/(2a) within the class
    // among scanned representatives.
    let a_cap = 60 * (-d) + 600; // defensive; every class appears long before
    let mut a = 6i64;
    while found.len() < target && a <= a_cap {
        let mut b = -a + 1;
        // smallest b > −a with b ≡ 1 mod 12
        b += (1 - b).rem_euclid(12);
        while b <= a {
            let num = b * b - d;
            if num % (4 * a) == 0 {
                let q = QuadForm { a, b, c: num / (4 * a) };
                if !primitive_only || q.is_primitive() {
                    let key = reduce_form(&q)?;
                    found.entry(key).or_insert_with(|| {
                        order.push(q);
                        q
                    });
                }
            }
            b += 12;
        }
        a += 6;
    }
    if found.len() < target {
        return Err(Error::BadInput(format!(
            "level-6 scan exhausted for discriminant {d} ({} of {target} classes found)",
            found.len()
        )));
    }
    Ok(order)
}

/// One primitive form [a,b,c] with 6 | a and b ≡ 1 (mod 12) per SL₂(ℤ)-class:
/// representatives of the level-6 Heegner points with invariant β = 1.
pub fn heegner_reps_level6(d: i64) -> Result<Vec<QuadForm>> {
    heegner_scan(d, true)
}

/// Same scan but over forms of every content; the imprimitive classes carry
/// the Heegner points of the non-maximal suborders. Cardinality equals the
/// Hurwitz class number of D.
pub fn heegner_reps_level6_all(d: i64) -> Result<Vec<QuadForm>> {
    heegner_scan(d, false)
}

fn fundamental_decomposition_parts(d: i64) -> (i64, u64) {
    let (v, w) = square_part(d.unsigned_abs());
    if (-(w as i64)).rem_euclid(4) == 1 {
        (-(w as i64), v)
    } else {
        (-4 * w as i64, v / 2)
    }
}

/// D = v² · D₀ with D₀ fundamental, v > 0.
pub fn fundamental_decomposition(d: i64) -> Result<(i64, u64)> {
    Discriminant::new(d)?;
    Ok(fundamental_decomposition_parts(d))
}

/// Largest prime divisor of m (m ≥ 2).
pub fn largest_prime_factor(m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::BadInput(format!("m = {m} has no prime divisor")));
    }
    Ok(factor_u64(m).last().unwrap().0)
}

/// Ascending-|D'| stream of discriminants D' whose orders are suitable for m:
/// ψ(m)+1 ≤ h(D') ≤ 3ψ(m), with ℓ (the largest prime of m) not dividing the
/// conductor multiplier. When `inside` is given, D' = f²·inside over
/// multipliers f coprime to 6ℓ; otherwise D' ranges over fundamental
/// discriminants < −4.
pub fn suitable_orders(m: u64, inside: Option<i64>) -> Result<impl Iterator<Item = i64>> {
    if m < 2 {
        return Err(Error::BadInput(format!("m = {m} is too small")));
    }
    let ell = largest_prime_factor(m)?;
    let psi = dedekind_psi(m);
    let (lo, hi) = (psi + 1, 3 * psi);
    // Hard scan ceiling: class-number enumeration is O(|D'|), and the window
    // is hit within a handful of candidates for every m at desk scale.
    const ABS_CAP: i64 = 100_000_000;
    if let Some(base) = inside {
        Discriminant::new(base)?;
        let f_cap = ((ABS_CAP / -base) as f64).sqrt() as i64 + 1;
        let iter = (1i64..=f_cap).filter_map(move |f| {
            if (f as u64).gcd(&(6 * ell)) != 1 {
                return None;
            }
            let d = f.checked_mul(f)?.checked_mul(base)?;
            if d < -ABS_CAP {
                return None;
            }
            let h = class_number(d).ok()?;
            (lo <= h && h <= hi).then_some(d)
        });
        Ok(Box::new(iter) as Box<dyn Iterator<Item = i64>>)
    } else {
        let iter = (5i64..=ABS_CAP).filter_map(move |abs_d| {
            let d = -abs_d;
            let disc = Discriminant::new(d).ok()?;
            if !disc.is_fundamental() {
                return None;
            }
            let h = class_number(d).ok()?;
            (lo <= h && h <= hi).then_some(d)
        });
        Ok(Box::new(iter) as Box<dyn Iterator<Item = i64>>)
    }
}

/// First (smallest |D'|) suitable order for m, optionally inside a given
/// order's field with containment-compatible conductor.
pub fn find_suitable_order(m: u64, inside: Option<i64>) -> Result<i64> {
    suitable_orders(m, inside)?
        .next()
        .ok_or_else(|| Error::PrimePoolExhausted(format!("no suitable order for m = {m} within search cap")))
}
