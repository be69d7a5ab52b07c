//! Property checks built on top of the scattering solver: the Dyson-type
//! lower bound, the hard-core comparison and convexity of `|F(x)ξ|²`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::solver::Measure;
use super::{
    energy_residual, scattering_lengths, solve_matrix_scattering, BoundaryMode, MatrixPotential,
    Parity, ScalarPotential, ScatteringConfig, ScatteringLength, ScatteringMatrixResult,
    ScatteringScalarResult, Tabulation,
};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Spin channel of a pair: antisymmetric spin goes with even spatial wave
/// functions (length `a_e`), symmetric spin with odd ones (`a_o`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinChannel {
    Antisymmetric,
    Symmetric,
}

impl SpinChannel {
    pub fn parity(self) -> Parity {
        match self {
            SpinChannel::Antisymmetric => Parity::Even,
            SpinChannel::Symmetric => Parity::Odd,
        }
    }
}

/// A real test function with definite parity.
pub trait TestFunction {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    fn parity(&self) -> Parity;
    /// Points where the function is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `Σ c_k x^k` restricted to powers of one parity.
#[derive(Debug, Clone)]
pub struct PolynomialTest {
    parity: Parity,
    /// Coefficient of `x^(2k)` (even) or `x^(2k+1)` (odd).
    coeffs: Vec<f64>,
}

impl PolynomialTest {
    pub fn new(parity: Parity, coeffs: Vec<f64>) -> Self {
        PolynomialTest { parity, coeffs }
    }

    /// Random coefficients in `[-1, 1]` for `terms` powers, scaled to `[-R, R]`.
    pub fn random<G: Rng>(rng: &mut G, parity: Parity, terms: usize, r: f64) -> Self {
        let offset = match parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        };
        let coeffs = (0..terms)
            .map(|k| rng.gen_range(-1.0..=1.0) / r.powi((2 * k + offset) as i32))
            .collect();
        PolynomialTest { parity, coeffs }
    }

    fn power(&self, k: usize) -> i32 {
        (2 * k + if self.parity == Parity::Odd { 1 } else { 0 }) as i32
    }
}

impl TestFunction for PolynomialTest {
    fn value(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * x.powi(self.power(k)))
            .sum()
    }

    fn derivative(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let p = self.power(k);
                if p == 0 {
                    0.0
                } else {
                    c * p as f64 * x.powi(p - 1)
                }
            })
            .sum()
    }

    fn parity(&self) -> Parity {
        self.parity
    }
}

impl TestFunction for ScatteringScalarResult {
    fn value(&self, x: f64) -> f64 {
        ScatteringScalarResult::value(self, x)
    }

    fn derivative(&self, x: f64) -> f64 {
        ScatteringScalarResult::derivative(self, x)
    }

    fn parity(&self) -> Parity {
        self.parity
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.psi.nodes().map(|(x, _, _)| x).collect()
    }
}

/// Evaluates the Dyson gap for many test functions against one potential.
#[derive(Debug, Clone)]
pub struct DysonChecker {
    v: ScalarPotential,
    r: f64,
    a_e: ScatteringLength,
    a_o: ScatteringLength,
    rule: GaussLegendre,
}

impl DysonChecker {
    pub fn new(v: &ScalarPotential, r: f64, cfg: &ScatteringConfig) -> Result<Self> {
        let (a_e, a_o) = scattering_lengths(v, r, cfg)?;
        Ok(DysonChecker {
            v: v.clone(),
            r,
            a_e,
            a_o,
            rule: GaussLegendre::new(8),
        })
    }

    pub fn lengths(&self) -> (ScatteringLength, ScatteringLength) {
        (self.a_e, self.a_o)
    }

    /// `∫_I |φ'|² + ½v|φ|² − (φ(R)² + φ(-R)²)/(R - a)` on `I = [lo, hi]`.
    pub fn gap(
        &self,
        phi: &dyn TestFunction,
        channel: SpinChannel,
        interval: (f64, f64),
    ) -> Result<f64> {
        if phi.parity() != channel.parity() {
            return Err(Error::invalid(format!(
                "{:?} test function paired with the {:?} spin channel",
                phi.parity(),
                channel
            )));
        }
        let (lo, hi) = interval;
        let r = self.r;
        if !(lo <= -r && hi >= r) {
            return Err(Error::invalid("interval must contain [-R, R]"));
        }
        let a = match channel {
            SpinChannel::Antisymmetric => self.a_e,
            SpinChannel::Symmetric => self.a_o,
        };

        if let Some(core) = self.v.hard_core_radius() {
            // infinite energy unless φ vanishes on the core
            let (xs, _) = self.rule.mapped(-core, core);
            if xs.iter().any(|&x| phi.value(x) != 0.0) {
                return Ok(f64::INFINITY);
            }
        }

        let mut cuts = vec![lo, hi, -r, r, 0.0];
        cuts.extend(self.v.atoms().iter().map(|a| a.x));
        if let Some(d) = self.v.density() {
            cuts.extend(d.xs.iter().copied());
        }
        if let Some(core) = self.v.hard_core_radius() {
            cuts.extend([-core, core]);
        }
        cuts.extend(phi.breakpoints());
        cuts.retain(|x| (lo..=hi).contains(x));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * r);

        let mut integral = 0.0;
        for w in cuts.windows(2) {
            integral += self.rule.integrate(w[0], w[1], |x| {
                let d = phi.derivative(x);
                d * d + 0.5 * self.v.density_at(x) * phi.value(x).powi(2)
            });
        }
        integral += self
            .v
            .atoms()
            .iter()
            .map(|at| 0.5 * at.weight * phi.value(at.x).powi(2))
            .sum::<f64>();
        let boundary = a.inverse_gap(r) * (phi.value(r).powi(2) + phi.value(-r).powi(2));
        Ok(integral - boundary)
    }
}

/// One-off Dyson gap; see [`DysonChecker::gap`].
pub fn dyson_gap(
    phi: &dyn TestFunction,
    channel: SpinChannel,
    v: &ScalarPotential,
    r: f64,
    interval: (f64, f64),
    cfg: &ScatteringConfig,
) -> Result<f64> {
    DysonChecker::new(v, r, cfg)?.gap(phi, channel, interval)
}

/// Energy identity on the non-degenerate subspace, relative to `‖4(R-𝖠)⁻¹‖`.
pub fn scattering_energy_identity(
    result: &ScatteringMatrixResult,
    v: &MatrixPotential,
) -> Result<f64> {
    if result.a.dim() != v.dim() {
        return Err(Error::invalid("result and potential dimensions differ"));
    }
    let energy = result.solution.energy(&Measure::from_matrix(v));
    Ok(energy_residual(&result.a, &energy, result.r))
}

fn random_unit<G: Rng>(rng: &mut G, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0));
        let norm = v.norm();
        if norm > 1e-3 && norm <= 1.0 {
            return v / norm;
        }
    }
}

/// Largest `|F_hc(x)ξ|² − |F(x)ξ|²` over random `x ∈ [-R, R]` and unit `ξ`,
/// where `F_hc` is the hard-core solution with radius `R₀` of `V`.
pub fn hard_core_pointwise_check(
    v: &MatrixPotential,
    r: f64,
    bc_mode: BoundaryMode,
    samples: usize,
    seed: u64,
    cfg: &ScatteringConfig,
) -> Result<f64> {
    let res = solve_matrix_scattering(v, r, bc_mode, cfg)?;
    let r0 = v.support_radius();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..samples {
        let x = match k {
            0 => r,
            1 => -r,
            _ => rng.gen_range(-r..=r),
        };
        let xi = random_unit(&mut rng, v.dim());
        let hc = if x.abs() > r0 {
            ((x.abs() - r0) / (r - r0)).powi(2)
        } else {
            0.0
        };
        let f = res.solution.value(x) * &xi;
        worst = worst.max(hc - f.norm_squared());
    }
    Ok(worst)
}

/// Smallest second difference of `x ↦ |F(x)ξ|²` on a uniform grid of
/// `points` nodes over the tabulated range.
pub fn convexity_defect(solution: &Tabulation, xi: &DVector<f64>, points: usize) -> f64 {
    let (lo, hi) = (solution.lo(), solution.hi());
    let h = (hi - lo) / (points - 1) as f64;
    let g: Vec<f64> = (0..points)
        .map(|i| {
            let x = if i + 1 == points { hi } else { lo + h * i as f64 };
            let f: DMatrix<f64> = solution.value(x);
            (f * xi).norm_squared()
        })
        .collect();
    g.windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::INFINITY, f64::min)
}
