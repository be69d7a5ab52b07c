//! The acceptance suite: every numbered criterion as a deterministic check.
//!
//! Criteria run in parallel but the report is assembled in criterion order and
//! contains no timings, so equal options give byte-identical JSON.

use std::f64::consts::{LN_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bethe::{solve_lieb_liniger, solve_yang_gaudin, BetheConfig};
use crate::error::{Error, Result};
use crate::expansion::{girardeau_margin_grid, hard_core_exact, yg_cross_check, CALIBRATION_NOTE};
use crate::free_fermi::{check_density_bounds, FreeFermiBox};
use crate::scattering::{
    hard_core_pointwise_check, scattering_energy_identity, scattering_lengths,
    solve_matrix_scattering, BoundaryMode, DysonChecker, MatrixPotential, Parity, PolynomialTest,
    ScalarPotential, ScatteringConfig, ScatteringLength, SpinChannel,
};
use crate::spin_algebra::{CouplingKind, PairProjectors, Spin};
use crate::spin_chain::{
    ground_energy_per_site, llh_chain_energy, thermodynamic_energy_per_site, Boundary, ChainSolver,
    SpinChainSpec,
};
use crate::SCHEMA;

/// Numerical resolution used by the solvers. Criteria thresholds never change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    #[default]
    Standard,
    /// Doubled scattering steps and Bethe grids.
    Fine,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "default" => Ok(Profile::Standard),
            "fine" => Ok(Profile::Fine),
            other => Err(Error::invalid(format!("unknown profile \"{other}\" (standard|fine)"))),
        }
    }
}

impl Profile {
    pub fn scattering(self) -> ScatteringConfig {
        let base = ScatteringConfig::default();
        match self {
            Profile::Standard => base,
            Profile::Fine => ScatteringConfig {
                steps_per_radius: 2 * base.steps_per_radius,
                ..base
            },
        }
    }

    pub fn bethe(self) -> BetheConfig {
        let base = BetheConfig::default();
        match self {
            Profile::Standard => base,
            Profile::Fine => BetheConfig {
                n_k: 2 * base.n_k,
                lambda_nodes_per_panel: 2 * base.lambda_nodes_per_panel,
                ..base
            },
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub profile: Profile,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            profile: Profile::Standard,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Set when the failure is a solver that did not converge.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub convergence_failure: bool,
    pub details: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub options: VerifyOptions,
    pub criteria: Vec<Criterion>,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
}

impl VerifyReport {
    /// One `PASS`/`FAIL` line per criterion.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {:>2} {:<34} {}\n", c.id, c.name, c.summary));
        }
        out.push_str(&format!("{} passed, {} failed\n", self.passed, self.failed));
        out
    }
}

struct Outcome {
    pass: bool,
    summary: String,
    details: Value,
}

type Check = fn(&VerifyOptions) -> Result<Outcome>;

const CHECKS: [(&str, Check); 14] = [
    ("scattering closed forms", closed_forms),
    ("matrix reduction", matrix_reduction),
    ("energy identity and R independence", energy_identity),
    ("Dyson property", dyson_property),
    ("hard-core pointwise bound", hard_core_pointwise),
    ("spin chain sandwich", chain_sandwich),
    ("small chain oracles", small_chain_oracles),
    ("LLH chain", llh_chain),
    ("Lieb-Liniger solver", lieb_liniger),
    ("Yang-Gaudin solver", yang_gaudin),
    ("end-to-end first order vs Bethe", end_to_end),
    ("hard-core end-to-end", hard_core_end_to_end),
    ("LLH vs Girardeau margin", girardeau_margin),
    ("free Fermi density bound", free_fermi_bound),
];

fn run_check(id: usize, opts: &VerifyOptions) -> Criterion {
    let (name, check) = CHECKS[id - 1];
    match check(opts) {
        Ok(o) => Criterion {
            id,
            name,
            pass: o.pass,
            summary: o.summary,
            error: None,
            convergence_failure: false,
            details: o.details,
        },
        Err(e) => Criterion {
            id,
            name,
            pass: false,
            summary: "error".into(),
            error: Some(e.to_string()),
            convergence_failure: e.is_convergence_failure(),
            details: Value::Null,
        },
    }
}

fn run_checks(opts: &VerifyOptions) -> Vec<Criterion> {
    (1..=CHECKS.len())
        .into_par_iter()
        .map(|id| run_check(id, opts))
        .collect()
}

/// Runs every criterion. The last one repeats the suite and compares the two
/// serialised reports byte for byte.
pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let (first, second) = rayon::join(|| run_checks(opts), || run_checks(opts));
    let a = crate::json::to_string(&first);
    let b = crate::json::to_string(&second);
    let identical = matches!((&a, &b), (Ok(x), Ok(y)) if x == y);
    let bytes = a.as_ref().map(|s| s.len()).unwrap_or(0);
    let mut criteria = first;
    criteria.push(Criterion {
        id: CHECKS.len() + 1,
        name: "determinism",
        pass: identical,
        summary: format!("two runs, {bytes} bytes, identical = {identical}"),
        error: None,
        convergence_failure: false,
        details: json!({ "seed": opts.seed, "bytes": bytes }),
    });
    let passed = criteria.iter().filter(|c| c.pass).count();
    VerifyReport {
        schema: SCHEMA,
        options: *opts,
        failed: criteria.len() - passed,
        passed,
        all_pass: passed == criteria.len(),
        criteria,
    }
}

fn finite(a: ScatteringLength) -> Result<f64> {
    a.finite()
        .ok_or_else(|| Error::Numerical("unexpected infinite scattering length".into()))
}

/// Potentials shared by the scattering criteria.
fn fixture_potentials() -> Result<Vec<(&'static str, MatrixPotential, BoundaryMode)>> {
    Ok(vec![
        (
            "delta c=1, J=1/2",
            MatrixPotential::from_scalar(Spin::HALF, ScalarPotential::delta(1.0)?),
            BoundaryMode::Fermionic,
        ),
        (
            "double delta c=2 R0=0.1, J=1/2",
            MatrixPotential::from_scalar(Spin::HALF, ScalarPotential::double_delta(2.0, 0.1)?),
            BoundaryMode::Fermionic,
        ),
        (
            "hard core a=0.1, J=1/2",
            MatrixPotential::from_scalar(Spin::HALF, ScalarPotential::hard_core(0.1)?),
            BoundaryMode::Fermionic,
        ),
        (
            "bump h=5 R0=0.4, J=1",
            MatrixPotential::from_scalar(Spin::ONE, ScalarPotential::bump(5.0, 0.4, 21)?),
            BoundaryMode::Fermionic,
        ),
        (
            "LLH contact c=2 c'=1",
            MatrixPotential::spin_dependent_delta(Spin::HALF, 2.0, 1.0)?,
            BoundaryMode::Symmetric,
        ),
    ])
}

fn closed_forms(opts: &VerifyOptions) -> Result<Outcome> {
    let cfg = opts.profile.scattering();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for c in [0.5, 1.0, 10.0, 100.0] {
        let (ae, ao) = scattering_lengths(&ScalarPotential::delta(c)?, 1.0, &cfg)?;
        let err = (finite(ae)? + 2.0 / c).abs().max(finite(ao)?.abs());
        worst = worst.max(err);
        rows.push(json!({ "potential": "delta", "c": c, "a_e": ae, "a_o": ao, "error": err }));
    }
    for (c, r0) in [(2.0, 0.1), (1.0, 0.5), (10.0, 0.05), (0.5, 0.3)] {
        let (ae, ao) = scattering_lengths(&ScalarPotential::double_delta(c, r0)?, 1.0, &cfg)?;
        let (ae, ao) = (finite(ae)?, finite(ao)?);
        let ae_exact = r0 - 1.0 / c;
        // a_o = R₀ − R₀/(1 + R₀c), the form consistent with a_o ≥ 0 and with
        // the inversion R₀ = (a_o + √(a_o² + 4a_o/c))/2
        let ao_exact = r0 - r0 / (1.0 + r0 * c);
        let r0_back = (ao + (ao * ao + 4.0 * ao / c).sqrt()) / 2.0;
        let err = (ae - ae_exact).abs().max((ao - ao_exact).abs()).max((r0_back - r0).abs());
        worst = worst.max(err);
        let minus_sign_form = r0 - r0 / (1.0 - r0 * c);
        rows.push(json!({
            "potential": "double_delta", "c": c, "R0": r0, "a_e": ae, "a_o": ao,
            "a_o_closed": ao_exact, "R0_from_inversion": r0_back,
            "a_o_minus_sign_form": minus_sign_form, "error": err,
        }));
    }
    Ok(Outcome {
        pass: worst <= 1e-8,
        summary: format!("max |err| = {worst:.2e} (tol 1e-8)"),
        details: json!({ "max_error": worst, "cases": rows }),
    })
}

fn matrix_reduction(opts: &VerifyOptions) -> Result<Outcome> {
    let cfg = opts.profile.scattering();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for spin in [Spin::HALF, Spin::ONE] {
        for (label, v) in [
            ("double delta", ScalarPotential::double_delta(2.0, 0.1)?),
            ("bump", ScalarPotential::bump(5.0, 0.4, 21)?),
        ] {
            let (ae, ao) = scattering_lengths(&v, 1.0, &cfg)?;
            let p = PairProjectors::new(spin);
            let expected = p.block_matrix(finite(ae)?, finite(ao)?);
            let m = solve_matrix_scattering(&MatrixPotential::from_scalar(spin, v), 1.0, BoundaryMode::Fermionic, &cfg)?;
            let a = m
                .a
                .matrix()
                .ok_or_else(|| Error::Numerical("unexpected degenerate channel".into()))?;
            let err = (a - expected).norm();
            worst = worst.max(err);
            rows.push(json!({ "J": spin, "potential": label, "error": err }));
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-8,
        summary: format!("max ‖A − (a_e P_A + a_o P_S)‖ = {worst:.2e} (tol 1e-8)"),
        details: json!({ "max_error": worst, "cases": rows }),
    })
}

fn energy_identity(opts: &VerifyOptions) -> Result<Outcome> {
    let cfg = ScatteringConfig {
        independence_factor: Some(2.0),
        ..opts.profile.scattering()
    };
    let (mut worst_energy, mut worst_r): (f64, f64) = (0.0, 0.0);
    let mut rows = Vec::new();
    for (label, v, bc) in fixture_potentials()? {
        let res = solve_matrix_scattering(&v, 1.0, bc, &cfg)?;
        let energy = scattering_energy_identity(&res, &v)?;
        let indep = res.diagnostics.r_independence_residual.unwrap_or(f64::INFINITY);
        worst_energy = worst_energy.max(energy);
        worst_r = worst_r.max(indep);
        rows.push(json!({ "potential": label, "energy_identity": energy, "r_independence": indep }));
    }
    Ok(Outcome {
        pass: worst_energy <= 1e-6 && worst_r <= 1e-8,
        summary: format!(
            "energy rel {worst_energy:.2e} (tol 1e-6), A(R) vs A(2R) {worst_r:.2e} (tol 1e-8)"
        ),
        details: json!({ "max_energy_identity": worst_energy, "max_r_independence": worst_r, "cases": rows }),
    })
}

fn dyson_property(opts: &VerifyOptions) -> Result<Outcome> {
    let v = ScalarPotential::double_delta(2.0, 0.1)?;
    let checker = DysonChecker::new(&v, 1.0, &opts.profile.scattering())?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut mins = Vec::new();
    for (parity, channel) in [
        (Parity::Even, SpinChannel::Antisymmetric),
        (Parity::Odd, SpinChannel::Symmetric),
    ] {
        let mut min = f64::INFINITY;
        for _ in 0..200 {
            let phi = PolynomialTest::random(&mut rng, parity, 4, 1.0);
            min = min.min(checker.gap(&phi, channel, (-1.5, 1.5))?);
        }
        mins.push(min);
    }
    let min = mins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        pass: min >= -1e-8,
        summary: format!("min gap = {min:.3e} over 2×200 tests (≥ −1e-8)"),
        details: json!({ "min_even": mins[0], "min_odd": mins[1] }),
    })
}

fn hard_core_pointwise(opts: &VerifyOptions) -> Result<Outcome> {
    let cfg = opts.profile.scattering();
    let cases = [
        (
            "double delta c=2 R0=0.1",
            MatrixPotential::from_scalar(Spin::HALF, ScalarPotential::double_delta(2.0, 0.1)?),
            BoundaryMode::Fermionic,
        ),
        (
            "bump h=5 R0=0.4, J=1",
            MatrixPotential::from_scalar(Spin::ONE, ScalarPotential::bump(5.0, 0.4, 21)?),
            BoundaryMode::Fermionic,
        ),
        (
            "LLH contact c=2 c'=1",
            MatrixPotential::spin_dependent_delta(Spin::HALF, 2.0, 1.0)?,
            BoundaryMode::Symmetric,
        ),
    ];
    let mut worst = f64::NEG_INFINITY;
    let mut rows = Vec::new();
    for (label, v, bc) in cases {
        let w = hard_core_pointwise_check(&v, 1.0, bc, 1000, opts.seed, &cfg)?;
        worst = worst.max(w);
        rows.push(json!({ "potential": label, "max_violation": w }));
    }
    Ok(Outcome {
        pass: worst <= 1e-8,
        summary: format!("max violation = {worst:.2e} over 3×1000 samples (tol 1e-8)"),
        details: json!({ "cases": rows }),
    })
}

/// Largest state space on which the dense cross-check is run.
const DENSE_CROSSCHECK_DIM: usize = 1024;

fn chain_sandwich(opts: &VerifyOptions) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut pass = true;
    let mut worst_agreement: f64 = 0.0;
    for (spin, sizes) in [(Spin::HALF, vec![4, 6, 8, 10, 12]), (Spin::ONE, vec![4, 6, 8])] {
        let eps_inf = thermodynamic_energy_per_site(spin);
        for n in sizes {
            let spec = SpinChainSpec::new(spin, n, Boundary::Periodic, CouplingKind::LaiSutherland)
                .with_solver(ChainSolver::lanczos(opts.seed));
            let res = ground_energy_per_site(&spec)?;
            let (lo, hi) = (eps_inf - 1.0 / n as f64, eps_inf + 1.0 / n as f64);
            let inside = lo <= res.epsilon && res.epsilon <= hi;
            let dense = if res.dim <= DENSE_CROSSCHECK_DIM {
                let d = ground_energy_per_site(&spec.clone().with_solver(ChainSolver::Dense))?;
                let diff = (d.epsilon - res.epsilon).abs();
                worst_agreement = worst_agreement.max(diff);
                Some(diff)
            } else {
                None
            };
            pass &= inside;
            rows.push(json!({
                "J": spin, "N": n, "epsilon": res.epsilon, "lower": lo, "upper": hi,
                "inside": inside, "lanczos_residual": res.residual, "dense_difference": dense,
            }));
        }
    }
    pass &= worst_agreement <= 1e-9;
    Ok(Outcome {
        pass,
        summary: format!(
            "J=1/2 N=4..12, J=1 N=4,6,8 inside ε∞ ± 1/N; Lanczos vs dense {worst_agreement:.1e}"
        ),
        details: json!({
            "epsilon_infinity_half": thermodynamic_energy_per_site(Spin::HALF),
            "epsilon_infinity_one": thermodynamic_energy_per_site(Spin::ONE),
            "rows": rows,
        }),
    })
}

fn small_chain_oracles(_: &VerifyOptions) -> Result<Outcome> {
    let eps = |n| {
        let spec = SpinChainSpec::new(Spin::HALF, n, Boundary::Periodic, CouplingKind::LaiSutherland)
            .with_solver(ChainSolver::Dense);
        ground_energy_per_site(&spec).map(|r| r.epsilon)
    };
    let (e2, e4) = (eps(2)?, eps(4)?);
    let err = e2.abs().max((e4 - 0.25).abs());
    Ok(Outcome {
        pass: err <= 1e-10,
        summary: format!("ε(2) = {e2:.3e}, ε(4) = {e4:.12} (tol 1e-10)"),
        details: json!({ "eps2": e2, "eps4": e4, "error": err }),
    })
}

fn llh_chain(opts: &VerifyOptions) -> Result<Outcome> {
    let e = llh_chain_energy(4.0, 1.0, 12, &ChainSolver::lanczos(opts.seed))?;
    let closed = -2.0 * (LN_2 + (1.0 - LN_2) / 4.0);
    let diff = (e - closed).abs();
    Ok(Outcome {
        pass: diff <= 2.0 / 12.0,
        summary: format!("ε(12) = {e:.6}, closed form {closed:.6}, |diff| = {diff:.4} (≤ 1/6)"),
        details: json!({ "epsilon": e, "closed_form": closed, "difference": diff }),
    })
}

const TG: f64 = PI * PI / 3.0;

fn lieb_liniger(opts: &VerifyOptions) -> Result<Outcome> {
    let cfg = opts.profile.bethe();
    let tonks = solve_lieb_liniger(1.0, 1e6, &cfg)?.reduced_energy();
    let tonks_err = (tonks - TG).abs();
    let mut pass = tonks_err <= 1e-4;
    let mut rows = Vec::new();
    for g in [0.005, 0.01, 0.02] {
        let e = solve_lieb_liniger(1.0, 1.0 / g, &cfg)?.reduced_energy();
        let dev = (e - TG * (1.0 - 4.0 * g)).abs();
        let band = 20.0 * g * g * TG;
        pass &= dev <= band;
        rows.push(json!({ "rho_over_c": g, "e_over_rho3": e, "deviation": dev, "band": band }));
    }
    Ok(Outcome {
        pass,
        summary: format!("Tonks |err| = {tonks_err:.1e}; dilute band at ρ/c = 0.005, 0.01, 0.02"),
        details: json!({ "tonks": tonks, "tonks_error": tonks_err, "band": rows, "note": CALIBRATION_NOTE }),
    })
}

fn yang_gaudin(opts: &VerifyOptions) -> Result<Outcome> {
    let cfg = opts.profile.bethe();
    let mut pass = true;
    let mut rows = Vec::new();
    for g in [0.005, 0.01] {
        let s = solve_yang_gaudin(1.0, 1.0 / g, &cfg)?;
        let e = s.reduced_energy();
        let dev = (e - TG * (1.0 - 4.0 * LN_2 * g)).abs();
        let band = 20.0 * g * g * TG;
        let m_err = (s.m_density - 0.5).abs();
        pass &= dev <= band && m_err <= 1e-4;
        rows.push(json!({
            "rho_over_c": g, "e_over_rho3": e, "deviation": dev, "band": band,
            "M_over_L": s.m_density, "truncation_warning": s.truncation_warning,
        }));
    }
    Ok(Outcome {
        pass,
        summary: "M/L = ρ/2 and dilute band at ρ/c = 0.005, 0.01".into(),
        details: json!({ "rows": rows, "note": CALIBRATION_NOTE }),
    })
}

fn end_to_end(opts: &VerifyOptions) -> Result<Outcome> {
    let mut pass = true;
    let mut rows = Vec::new();
    for g in [0.005, 0.01] {
        let r = yg_cross_check(1.0, 1.0 / g, &opts.profile.bethe(), &opts.profile.scattering())?;
        pass &= r.within_band;
        rows.push(serde_json::to_value(&r).map_err(|e| Error::Numerical(e.to_string()))?);
    }
    Ok(Outcome {
        pass,
        summary: "scattering → digamma → first order vs Yang-Gaudin, ρ/c = 0.005, 0.01".into(),
        details: json!({ "rows": rows }),
    })
}

fn hard_core_end_to_end(_: &VerifyOptions) -> Result<Outcome> {
    let mut pass = true;
    let mut rows = Vec::new();
    for rho_a in [0.01, 0.02, 0.05] {
        let h = hard_core_exact(100, 100.0, rho_a)?;
        pass &= h.within_band;
        rows.push(json!({ "rho_a": rho_a, "gap_over_leading": h.gap / h.leading, "band_over_leading": h.band / h.leading }));
    }
    Ok(Outcome {
        pass,
        summary: "exact vs first order within 1.5·3(ρa)² at ρa = 0.01, 0.02, 0.05".into(),
        details: json!({ "rows": rows, "note": CALIBRATION_NOTE }),
    })
}

fn girardeau_margin(_: &VerifyOptions) -> Result<Outcome> {
    let g = girardeau_margin_grid(0.01, 20)?;
    let pass = g.all_positive && g.diagonal_margin <= 1e-15;
    Ok(Outcome {
        pass,
        summary: format!(
            "min margin {:.3e} on {} points, |margin| at c = c' {:.1e}",
            g.min_margin, g.points, g.diagonal_margin
        ),
        details: serde_json::to_value(&g).map_err(|e| Error::Numerical(e.to_string()))?,
    })
}

fn free_fermi_bound(opts: &VerifyOptions) -> Result<Outcome> {
    let mut pass = true;
    let mut rows = Vec::new();
    for n in [4, 8] {
        let r = check_density_bounds(&FreeFermiBox::new(n, n as f64)?, 10_000, opts.seed)?;
        pass &= r.pass;
        rows.push(serde_json::to_value(&r).map_err(|e| Error::Numerical(e.to_string()))?);
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r["max_rho2_ratio"].as_f64().unwrap_or(f64::NAN)).collect();
    Ok(Outcome {
        pass,
        summary: format!("max ρ²/(8π²ρ⁴Δ²) = {:.4} (N=4), {:.4} (N=8)", ratios[0], ratios[1]),
        details: json!({ "rows": rows }),
    })
}
