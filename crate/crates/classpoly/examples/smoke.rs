//! Minimal end-to-end smoke drive: computes a Hilbert class polynomial, a
//! classical modular polynomial coefficient, and a partition class polynomial
//! through the analytic (floating-point) route.

use classpoly::analytic;

fn main() {
    let h = analytic::hilbert_analytic(-23).unwrap();
    println!("H(-23) coeffs (low to high): {h:?}");

    let phi2 = analytic::phi_analytic_oracle(2).unwrap();
    println!("Phi_2 constant term = {}", phi2[0][0]);

    let hp = analytic::partition_poly_oracle(1).unwrap();
    let coeffs: Vec<String> = hp.iter().map(|r| r.to_string()).collect();
    println!("H_1^part coeffs (low to high): {coeffs:?}");
}
