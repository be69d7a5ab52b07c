//! Spinless Dirichlet free Fermi ground state on `[0, L]`.
//!
//! Orbitals are `φ_n(x) = √(2/L) sin(nπx/L)`, `n = 1..N`. Reduced density
//! matrices are `k×k` determinants of `γ¹(x, y) = Σ φ_n(x)φ_n(y)`, normalised
//! to `N!/(N−k)!`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeFermiBox {
    n: usize,
    l: f64,
}

impl FreeFermiBox {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one particle"));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::invalid("box length must be positive"));
        }
        Ok(FreeFermiBox { n, l })
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    pub fn density(&self) -> f64 {
        self.n as f64 / self.l
    }

    pub fn orbital(&self, n: usize, x: f64) -> f64 {
        (2.0 / self.l).sqrt() * (n as f64 * PI * x / self.l).sin()
    }

    fn check(&self, x: f64) -> Result<()> {
        if (0.0..=self.l).contains(&x) {
            Ok(())
        } else {
            Err(Error::invalid(format!("point {x} lies outside [0, {}]", self.l)))
        }
    }

    /// `γ¹(x, y)`.
    pub fn gamma1(&self, x: f64, y: f64) -> f64 {
        (1..=self.n).map(|n| self.orbital(n, x) * self.orbital(n, y)).sum()
    }

    /// `max |⟨φ_m, φ_n⟩ − δ_mn|` by composite Gauss–Legendre.
    pub fn gram_residual(&self) -> f64 {
        let (xs, ws) = GaussLegendre::new(16).composite(0.0, self.l, self.n + 1);
        let mut worst: f64 = 0.0;
        for m in 1..=self.n {
            for n in m..=self.n {
                let ip: f64 = xs
                    .iter()
                    .zip(&ws)
                    .map(|(x, w)| w * self.orbital(m, *x) * self.orbital(n, *x))
                    .sum();
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        worst
    }

    /// `γ^(k)(xs; ys)` for `k = xs.len() ≤ 4`.
    pub fn rdm(&self, xs: &[f64], ys: &[f64]) -> Result<f64> {
        let k = xs.len();
        if k == 0 || k > 4 || ys.len() != k {
            return Err(Error::invalid("reduced density matrices need 1 ≤ k ≤ 4 points each"));
        }
        for &p in xs.iter().chain(ys) {
            self.check(p)?;
        }
        let m = DMatrix::from_fn(k, k, |i, j| self.gamma1(xs[i], ys[j]));
        Ok(m.determinant())
    }

    /// `ρ^(k)(xs) = γ^(k)(xs; xs)`.
    pub fn rho(&self, xs: &[f64]) -> Result<f64> {
        self.rdm(xs, xs)
    }

    /// `ρ²(x₁, x₂)/(x₁ − x₂)²`, exact at coincident points.
    ///
    /// By Cauchy–Binet `ρ²` is the sum over `m < n` of squared `2×2` orbital
    /// minors; each minor is rewritten with product-to-sum identities so that
    /// the factor `x₁ − x₂` divides out analytically.
    pub fn rho2_over_gap_sq(&self, x1: f64, x2: f64) -> Result<f64> {
        self.check(x1)?;
        self.check(x2)?;
        let k = PI / self.l;
        let (d, s) = (x1 - x2, x1 + x2);
        let sinc = |t: f64| if t.abs() < 1e-8 { 1.0 - t * t / 6.0 } else { t.sin() / t };
        let mut total = 0.0;
        for m in 1..=self.n {
            for n in m + 1..=self.n {
                let (a, b) = (m as f64 * k, n as f64 * k);
                // minor/Δ with minor = sin((a+b)S/2) sin((a−b)Δ/2) − sin((a+b)Δ/2) sin((a−b)S/2)
                let minor = ((a + b) * s / 2.0).sin() * (a - b) / 2.0 * sinc((a - b) * d / 2.0)
                    - (a + b) / 2.0 * sinc((a + b) * d / 2.0) * ((a - b) * s / 2.0).sin();
                total += minor * minor;
            }
        }
        Ok(total * (2.0 / self.l).powi(2))
    }
}

/// `Σ_{n≤N} (nπ/L)²`.
pub fn free_fermi_energy(n: usize, l: f64) -> Result<f64> {
    let b = FreeFermiBox::new(n, l)?;
    let nf = b.n as f64;
    Ok((PI / b.l).powi(2) * nf * (nf + 1.0) * (2.0 * nf + 1.0) / 6.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityBoundReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub samples: usize,
    pub seed: u64,
    /// `max ρ²/(8π²ρ⁴Δ²)`; the bound holds iff this is ≤ 1.
    pub max_rho2_ratio: f64,
    pub rho2_violations: usize,
    /// Empirical `max ρ³/(ρ⁷ Δ₁₂² Δ₂₃²)`, reported only.
    pub fitted_rho3_constant: f64,
    /// Empirical `max ρ⁴/(ρ⁸ Δ₁₂² Δ₃₄²)`, reported only.
    pub fitted_rho4_constant: f64,
    pub min_density: f64,
    pub pass: bool,
}

/// Samples random points in the box and checks `ρ² ≤ 8π²ρ⁴Δ²`.
pub fn check_density_bounds(b: &FreeFermiBox, samples: usize, seed: u64) -> Result<DensityBoundReport> {
    let rho = b.density();
    let bound = 8.0 * PI * PI * rho.powi(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = || rng.gen_range(0.0..=b.l);
    let mut max_ratio: f64 = 0.0;
    let mut violations = 0;
    let mut c3: f64 = 0.0;
    let mut c4: f64 = 0.0;
    let mut min_density = f64::INFINITY;
    for _ in 0..samples {
        let (x1, x2) = (point(), point());
        let ratio = b.rho2_over_gap_sq(x1, x2)? / bound;
        if ratio > 1.0 {
            violations += 1;
        }
        max_ratio = max_ratio.max(ratio);

        let p3 = [point(), point(), point()];
        let r3 = b.rho(&p3)?;
        let s3 = rho.powi(7) * (p3[0] - p3[1]).powi(2) * (p3[1] - p3[2]).powi(2);
        if s3 > 0.0 {
            c3 = c3.max(r3 / s3);
        }
        let p4 = [point(), point(), point(), point()];
        let r4 = b.rho(&p4)?;
        let s4 = rho.powi(8) * (p4[0] - p4[1]).powi(2) * (p4[2] - p4[3]).powi(2);
        if s4 > 0.0 {
            c4 = c4.max(r4 / s4);
        }
        min_density = min_density.min(r3).min(r4).min(ratio * bound * (x1 - x2).powi(2));
    }
    Ok(DensityBoundReport {
        n: b.n,
        l: b.l,
        samples,
        seed,
        max_rho2_ratio: max_ratio,
        rho2_violations: violations,
        fitted_rho3_constant: c3,
        fitted_rho4_constant: c4,
        min_density,
        pass: violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn energies() {
        assert_relative_eq!(free_fermi_energy(1, 1.0).unwrap(), PI * PI, max_relative = 1e-15);
        assert_relative_eq!(free_fermi_energy(2, 1.0).unwrap(), 5.0 * PI * PI, max_relative = 1e-15);
        let e = free_fermi_energy(100, 100.0).unwrap();
        let leading = 100.0 * PI * PI / 3.0;
        let n = 100.0;
        assert_relative_eq!(e / leading, 1.0 + 1.5 / n + 0.5 / (n * n), max_relative = 1e-13);
        assert!(e / leading - 1.0 < 0.016);
        let direct: f64 = (1..=37).map(|k| (k as f64 * PI / 3.0).powi(2)).sum();
        assert_relative_eq!(free_fermi_energy(37, 3.0).unwrap(), direct, max_relative = 1e-13);
    }

    #[test]
    fn orbitals_orthonormal() {
        for n in [1, 4, 9] {
            let b = FreeFermiBox::new(n, 2.5).unwrap();
            assert!(b.gram_residual() <= 1e-10);
            assert_abs_diff_eq!(b.orbital(n, 0.0), 0.0);
            assert_abs_diff_eq!(b.orbital(n, 2.5), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn one_body_density_integrates_to_n() {
        let b = FreeFermiBox::new(7, 3.0).unwrap();
        let (xs, ws) = GaussLegendre::new(16).composite(0.0, 3.0, 8);
        let total: f64 = xs.iter().zip(&ws).map(|(x, w)| w * b.rho(&[*x]).unwrap()).sum();
        assert_relative_eq!(total, 7.0, max_relative = 1e-8);
    }

    #[test]
    fn pair_density_vanishes_on_diagonal_and_is_consistent() {
        let b = FreeFermiBox::new(5, 4.0).unwrap();
        assert_abs_diff_eq!(b.rho(&[1.3, 1.3]).unwrap(), 0.0, epsilon = 1e-14);
        let (xs, ws) = GaussLegendre::new(16).composite(0.0, 4.0, 8);
        for x1 in [0.4, 1.7, 2.9] {
            let integral: f64 = xs
                .iter()
                .zip(&ws)
                .map(|(x2, w)| w * b.rho(&[x1, *x2]).unwrap())
                .sum();
            assert_relative_eq!(integral, 4.0 * b.rho(&[x1]).unwrap(), max_relative = 1e-6);
        }
    }

    #[test]
    fn stable_ratio_matches_determinant() {
        let b = FreeFermiBox::new(6, 6.0).unwrap();
        for (x1, x2) in [(0.3, 2.2), (5.9, 1.0), (3.0, 3.4)] {
            let direct = b.rho(&[x1, x2]).unwrap() / (x1 - x2) * 1.0 / (x1 - x2);
            assert_relative_eq!(b.rho2_over_gap_sq(x1, x2).unwrap(), direct, max_relative = 1e-10);
        }
        // the coincident limit is the Wronskian sum Σ (φ_m φ_n′ − φ_n φ_m′)²
        let x = 2.1;
        let k = PI / 6.0;
        let mut w = 0.0;
        for m in 1..=6 {
            for n in m + 1..=6 {
                let (a, c) = (m as f64 * k, n as f64 * k);
                let wr = (a * x).sin() * c * (c * x).cos() - (c * x).sin() * a * (a * x).cos();
                w += wr * wr * (2.0 / 6.0f64).powi(2);
            }
        }
        assert_relative_eq!(b.rho2_over_gap_sq(x, x).unwrap(), w, max_relative = 1e-12);
    }

    #[test]
    fn small_separation_coefficient_at_mid_box() {
        // at x = L/2 only orbitals of opposite parity pair up, and the
        // Wronskian sum collapses to (N+1)(N+2)/N² · π²ρ⁴/3 for even N
        for n in [6usize, 12, 24, 48] {
            let l = n as f64;
            let b = FreeFermiBox::new(n, l).unwrap();
            let x2 = l / 2.0;
            let x1 = x2 + 1e-3;
            let fd = b.rho(&[x1, x2]).unwrap() / (x1 - x2).powi(2);
            let leading = PI * PI / 3.0 * b.density().powi(4);
            let nf = n as f64;
            let exact = leading * (nf + 1.0) * (nf + 2.0) / (nf * nf);
            assert_relative_eq!(b.rho2_over_gap_sq(x2, x2).unwrap(), exact, max_relative = 1e-12);
            assert_relative_eq!(fd, exact, max_relative = 1e-5);
        }
        // the finite-size excess decays like 3/N and drops below 10% past N = 30
        for n in [32usize, 96] {
            let b = FreeFermiBox::new(n, n as f64).unwrap();
            let c = b.rho2_over_gap_sq(n as f64 / 2.0, n as f64 / 2.0).unwrap();
            assert!(c / (PI * PI / 3.0) - 1.0 <= 0.1);
        }
    }

    #[test]
    fn antisymmetry_and_rejects_outside() {
        let b = FreeFermiBox::new(4, 2.0).unwrap();
        let a = b.rdm(&[0.3, 1.1], &[0.7, 1.6]).unwrap();
        let s = b.rdm(&[1.1, 0.3], &[0.7, 1.6]).unwrap();
        assert_abs_diff_eq!(a, -s, epsilon = 1e-12);
        assert!(b.rho(&[2.5]).is_err());
        assert!(b.rho(&[0.1, 0.2, 0.3, 0.4, 0.5]).is_err());
        assert!(FreeFermiBox::new(0, 1.0).is_err());
    }

    #[test]
    fn density_bound_holds() {
        let r8 = check_density_bounds(&FreeFermiBox::new(8, 8.0).unwrap(), 10_000, 1).unwrap();
        assert!(r8.pass && r8.max_rho2_ratio <= 1.0, "{r8:?}");
        let r4 = check_density_bounds(&FreeFermiBox::new(4, 4.0).unwrap(), 10_000, 1).unwrap();
        assert!(r4.pass);
        let r16 = check_density_bounds(&FreeFermiBox::new(16, 16.0).unwrap(), 10_000, 1).unwrap();
        // edge effects fade and the maximum approaches the bulk value 1/24 from above
        assert!(r4.max_rho2_ratio > r8.max_rho2_ratio && r8.max_rho2_ratio > r16.max_rho2_ratio);
        assert!(r16.max_rho2_ratio > 1.0 / 24.0);
        assert!(r8.min_density >= -1e-12);
        assert!(r8.fitted_rho3_constant.is_finite() && r8.fitted_rho4_constant.is_finite());
    }

    proptest! {
        #[test]
        fn densities_nonnegative(x in proptest::collection::vec(0.0f64..3.0, 4)) {
            let b = FreeFermiBox::new(5, 3.0).unwrap();
            for k in 1..=4 {
                prop_assert!(b.rho(&x[..k]).unwrap() >= -1e-12);
            }
        }
    }
}
