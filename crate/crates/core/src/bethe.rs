//! Thermodynamic Bethe-ansatz ground states of the Lieb–Liniger gas and the
//! spin-1/2 Yang–Gaudin gas.
//!
//! Lieb–Liniger:
//! `2πf(k) = 1 + ∫_{-Q}^{Q} 2c f(k′)/(c² + (k−k′)²) dk′`.
//!
//! Yang–Gaudin, with the spin rapidities on `[-B, B]`:
//! `2πσ(Λ) = −∫ 2cσ(Λ′)/(c² + (Λ−Λ′)²) dΛ′ + ∫ 4c f(k)/(c² + 4(k−Λ)²) dk`,
//! `2πf(k) = 1 + ∫ 4cσ(Λ′)/(c² + 4(k−Λ′)²) dΛ′`.
//!
//! In both cases `ρ = ∫f`, `e = ∫k²f`, and `Q` is tuned by bisection so that
//! `∫f` hits the requested density. The spin-singlet ground state has
//! `B = ∞`; it is truncated at `B_cut` and the tail of `σ` is monitored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetheModel {
    Ll,
    Yg,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BetheConfig {
    /// Gauss–Legendre nodes on `[-Q, Q]`.
    pub n_k: usize,
    /// `B_cut = b_cut_factor · c` unless `b_cut` is given.
    pub b_cut_factor: f64,
    pub b_cut: Option<f64>,
    /// Nodes per spin-rapidity panel; panels are about `c` wide.
    pub lambda_nodes_per_panel: usize,
    /// Total spin-rapidity nodes, overriding the panel rule.
    pub n_lambda: Option<usize>,
    pub damping: f64,
    /// Sup-norm fixed-point defect at which an inner solve stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative density mismatch at which bisection on `Q` stops.
    pub rho_tol: f64,
    /// Drop the spin rapidities (σ ≡ 0); a diagnostic switch.
    pub freeze_spin: bool,
}

impl Default for BetheConfig {
    fn default() -> Self {
        BetheConfig {
            n_k: 64,
            b_cut_factor: 20.0,
            b_cut: None,
            lambda_nodes_per_panel: 16,
            n_lambda: None,
            damping: 0.5,
            tol: 1e-12,
            max_iter: 100_000,
            rho_tol: 1e-12,
            freeze_spin: false,
        }
    }
}

impl BetheConfig {
    fn validate(&self, c: f64) -> Result<()> {
        if self.n_k < 64 {
            return Err(Error::invalid("n_k must be at least 64"));
        }
        if let Some(b) = self.b_cut {
            if !(b >= 20.0 * c) {
                return Err(Error::invalid("B_cut must be at least 20c"));
            }
        } else if !(self.b_cut_factor >= 20.0) {
            return Err(Error::invalid("b_cut_factor must be at least 20"));
        }
        if self.n_lambda.is_some_and(|n| n < 64) || self.lambda_nodes_per_panel == 0 {
            return Err(Error::invalid("spin grid needs at least 64 nodes"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::invalid("damping must lie in (0, 1]"));
        }
        if !(self.tol > 0.0 && self.rho_tol > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BetheGrids {
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "B_cut", skip_serializing_if = "Option::is_none")]
    pub b_cut: Option<f64>,
    pub n_k: usize,
    pub n_lambda: usize,
    pub rule: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct BetheSolution {
    pub schema: &'static str,
    pub model: BetheModel,
    pub c: f64,
    pub grids: BetheGrids,
    pub k: Vec<f64>,
    pub f: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lambda: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sigma: Vec<f64>,
    pub rho: f64,
    pub m_density: f64,
    pub e_density: f64,
    /// Inner fixed-point sweeps summed over the outer solve.
    pub iterations: usize,
    pub outer_iterations: usize,
    /// Sup-norm fixed-point defect of the returned densities.
    pub residual: f64,
    /// `σ(±B_cut)/max σ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_ratio: Option<f64>,
    pub truncation_warning: bool,
}

impl BetheSolution {
    /// `e/ρ³`.
    pub fn reduced_energy(&self) -> f64 {
        self.e_density / self.rho.powi(3)
    }

    /// Largest `|f(k) − f(−k)|` and `|σ(Λ) − σ(−Λ)|`.
    pub fn asymmetry(&self) -> f64 {
        let mirror = |v: &[f64]| {
            v.iter()
                .zip(v.iter().rev())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        mirror(&self.f).max(mirror(&self.sigma))
    }
}

fn lorentz(c: f64, scale: f64, x: f64) -> f64 {
    // 2c·scale / (c² + scale²x²) with scale 1 or 2
    2.0 * c * scale / (c * c + scale * scale * x * x)
}

/// `[-b, b]` split into an even number of equal panels, mirrored exactly.
fn symmetric_composite(rule: &GaussLegendre, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let half = panels.div_ceil(2).max(1);
    let (xs, ws) = rule.composite(0.0, b, half);
    let mut nodes: Vec<f64> = xs.iter().rev().map(|x| -x).collect();
    let mut weights: Vec<f64> = ws.iter().rev().copied().collect();
    nodes.extend(xs);
    weights.extend(ws);
    (nodes, weights)
}

struct Inner {
    f: Vec<f64>,
    sigma: Vec<f64>,
    iterations: usize,
    residual: f64,
}

struct Problem<'a> {
    model: BetheModel,
    c: f64,
    cfg: &'a BetheConfig,
    k_rule: GaussLegendre,
    lambda: Vec<f64>,
    lambda_w: Vec<f64>,
    /// `K1(Λ_i − Λ_j) w_j`, row-major.
    spin_kernel: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(model: BetheModel, c: f64, cfg: &'a BetheConfig) -> Self {
        let (lambda, lambda_w) = match model {
            BetheModel::Yg if !cfg.freeze_spin => {
                let b = cfg.b_cut.unwrap_or(cfg.b_cut_factor * c);
                let per = cfg.lambda_nodes_per_panel;
                let panels = match cfg.n_lambda {
                    Some(n) => n.div_ceil(per),
                    None => (2.0 * b / c).ceil() as usize,
                };
                symmetric_composite(&GaussLegendre::new(per), b, panels)
            }
            _ => (Vec::new(), Vec::new()),
        };
        let n = lambda.len();
        let mut spin_kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                spin_kernel[i * n + j] = lorentz(c, 1.0, lambda[i] - lambda[j]) * lambda_w[j];
            }
        }
        Problem {
            model,
            c,
            cfg,
            k_rule: GaussLegendre::new(cfg.n_k),
            lambda,
            lambda_w,
            spin_kernel,
        }
    }

    fn k_grid(&self, q: f64) -> (Vec<f64>, Vec<f64>) {
        self.k_rule.mapped(-q, q)
    }

    /// Damped fixed point at fixed `Q`, warm-started from `start`.
    fn solve_at(&self, q: f64, start: Option<&Inner>) -> Result<Inner> {
        let c = self.c;
        let (k, wk) = self.k_grid(q);
        let (nk, nl) = (k.len(), self.lambda.len());
        let two_pi = 2.0 * std::f64::consts::PI;

        let charge: Vec<f64> = (0..nk * nk)
            .map(|idx| {
                let (i, j) = (idx / nk, idx % nk);
                match self.model {
                    BetheModel::Ll => lorentz(c, 1.0, k[i] - k[j]) * wk[j],
                    BetheModel::Yg => 0.0,
                }
            })
            .collect();
        // f ← σ and σ ← f couplings, both 4c/(c² + 4x²)
        let f_from_sigma: Vec<f64> = (0..nk * nl)
            .map(|idx| {
                let (i, j) = (idx / nl, idx % nl);
                lorentz(c, 2.0, k[i] - self.lambda[j]) * self.lambda_w[j]
            })
            .collect();
        let sigma_from_f: Vec<f64> = (0..nl * nk)
            .map(|idx| {
                let (i, j) = (idx / nk, idx % nk);
                lorentz(c, 2.0, self.lambda[i] - k[j]) * wk[j]
            })
            .collect();

        let mut f = start
            .map(|s| s.f.clone())
            .unwrap_or_else(|| vec![1.0 / two_pi; nk]);
        let mut sigma = start
            .map(|s| s.sigma.clone())
            .unwrap_or_else(|| vec![0.0; nl]);
        let theta = self.cfg.damping;
        let mut history = Vec::new();

        for it in 1..=self.cfg.max_iter {
            let mut defect: f64 = 0.0;
            let mut f_new = vec![0.0; nk];
            for i in 0..nk {
                let mut acc = 1.0;
                if self.model == BetheModel::Ll {
                    acc += dot(&charge[i * nk..(i + 1) * nk], &f);
                } else {
                    acc += dot(&f_from_sigma[i * nl..(i + 1) * nl], &sigma);
                }
                f_new[i] = acc / two_pi;
                defect = defect.max((f_new[i] - f[i]).abs());
            }
            for i in 0..nk {
                f[i] += theta * (f_new[i] - f[i]);
            }
            if nl > 0 {
                let mut s_new = vec![0.0; nl];
                for i in 0..nl {
                    let src = dot(&sigma_from_f[i * nk..(i + 1) * nk], &f);
                    let back = dot(&self.spin_kernel[i * nl..(i + 1) * nl], &sigma);
                    s_new[i] = (src - back) / two_pi;
                    defect = defect.max((s_new[i] - sigma[i]).abs());
                }
                for i in 0..nl {
                    // σ > 0 exactly; far tails are pure rounding noise
                    sigma[i] = (sigma[i] + theta * (s_new[i] - sigma[i])).max(0.0);
                }
            }
            if it % 64 == 0 || defect <= self.cfg.tol {
                history.push(defect);
            }
            if !defect.is_finite() {
                break;
            }
            if defect <= self.cfg.tol {
                return Ok(Inner {
                    f,
                    sigma,
                    iterations: it,
                    residual: defect,
                });
            }
        }
        Err(Error::NotConverged {
            solver: "bethe fixed point",
            iterations: self.cfg.max_iter,
            residual: history.last().copied().unwrap_or(f64::NAN),
            history,
        })
    }

    fn density(&self, q: f64, inner: &Inner) -> f64 {
        let (_, wk) = self.k_grid(q);
        dot(&wk, &inner.f)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve(model: BetheModel, rho: f64, c: f64, cfg: &BetheConfig) -> Result<BetheSolution> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid("density must be positive"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("coupling c must be positive and finite"));
    }
    cfg.validate(c)?;
    let problem = Problem::new(model, c, cfg);
    let mut iterations = 0;
    let mut outer = 0;

    // ρ(Q) ≥ Q/π because f ≥ 1/2π, so Q = πρ is an upper bracket
    let mut hi = std::f64::consts::PI * rho;
    let mut hi_sol = problem.solve_at(hi, None)?;
    iterations += hi_sol.iterations;
    let mut lo = 0.5 * hi;
    let mut lo_sol = problem.solve_at(lo, Some(&hi_sol))?;
    iterations += lo_sol.iterations;
    while problem.density(lo, &lo_sol) >= rho {
        outer += 1;
        if outer > 200 {
            return Err(Error::Numerical("could not bracket Q from below".into()));
        }
        lo *= 0.5;
        lo_sol = problem.solve_at(lo, Some(&lo_sol))?;
        iterations += lo_sol.iterations;
    }

    let (q, inner) = loop {
        outer += 1;
        let mid = 0.5 * (lo + hi);
        let sol = problem.solve_at(mid, Some(&hi_sol))?;
        iterations += sol.iterations;
        let r = problem.density(mid, &sol);
        if (r - rho).abs() <= cfg.rho_tol * rho || hi - lo <= 4.0 * f64::EPSILON * hi {
            break (mid, sol);
        }
        if outer > 400 {
            return Err(Error::NotConverged {
                solver: "bethe Q bisection",
                iterations: outer,
                residual: (r - rho).abs() / rho,
                history: vec![],
            });
        }
        if r < rho {
            lo = mid;
        } else {
            hi = mid;
            hi_sol = sol;
        }
    };

    let (k, wk) = problem.k_grid(q);
    let rho_out = dot(&wk, &inner.f);
    let e_density: f64 = k.iter().zip(&wk).zip(&inner.f).map(|((k, w), f)| w * k * k * f).sum();
    let m_density = dot(&problem.lambda_w, &inner.sigma);
    let (truncation_ratio, truncation_warning) = if inner.sigma.is_empty() {
        (None, false)
    } else {
        let max = inner.sigma.iter().copied().fold(0.0, f64::max);
        let edge = inner.sigma[0].abs().max(inner.sigma[inner.sigma.len() - 1].abs());
        let ratio = if max > 0.0 { edge / max } else { 0.0 };
        (Some(ratio), ratio > 1e-8)
    };
    let b_cut = (!problem.lambda.is_empty()).then(|| problem.lambda[problem.lambda.len() - 1]);
    Ok(BetheSolution {
        schema: crate::SCHEMA,
        model,
        c,
        grids: BetheGrids {
            q,
            b_cut: b_cut.map(|_| cfg.b_cut.unwrap_or(cfg.b_cut_factor * c)),
            n_k: k.len(),
            n_lambda: problem.lambda.len(),
            rule: "gauss-legendre",
        },
        k,
        f: inner.f,
        lambda: problem.lambda,
        sigma: inner.sigma,
        rho: rho_out,
        m_density,
        e_density,
        iterations,
        outer_iterations: outer,
        residual: inner.residual,
        truncation_ratio,
        truncation_warning,
    })
}

pub fn solve_lieb_liniger(rho: f64, c: f64, cfg: &BetheConfig) -> Result<BetheSolution> {
    solve(BetheModel::Ll, rho, c, cfg)
}

pub fn solve_yang_gaudin(rho: f64, c: f64, cfg: &BetheConfig) -> Result<BetheSolution> {
    solve(BetheModel::Yg, rho, c, cfg)
}

/// `(π²/3)Nρ²(1 − 4ρ/c − κN^{−2/3})`; `c = None` means `c = ∞`.
#[derive(Debug, Clone, Serialize)]
pub struct NeumannBound {
    pub value: f64,
    pub kappa: f64,
    /// κ is a tunable knob; the underlying bound has an unspecified constant.
    pub kappa_note: &'static str,
    /// The bracket is non-positive, so the bound says nothing beyond `E ≥ 0`.
    pub outside_validity: bool,
}

pub fn ll_neumann_lower_bound(n: usize, l: f64, c: Option<f64>, kappa: f64) -> Result<NeumannBound> {
    if n == 0 || !(l > 0.0) {
        return Err(Error::invalid("need N ≥ 1 and L > 0"));
    }
    if c.is_some_and(|c| !(c > 0.0)) {
        return Err(Error::invalid("coupling c must be positive"));
    }
    let nf = n as f64;
    let rho = nf / l;
    let bracket = 1.0 - c.map_or(0.0, |c| 4.0 * rho / c) - kappa * nf.powf(-2.0 / 3.0);
    Ok(NeumannBound {
        value: std::f64::consts::PI.powi(2) / 3.0 * nf * rho * rho * bracket,
        kappa,
        kappa_note: "calibration knob, never asserted",
        outside_validity: bracket <= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{LN_2, PI};

    const TG: f64 = PI * PI / 3.0;

    fn cfg() -> BetheConfig {
        BetheConfig::default()
    }

    #[test]
    fn tonks_limit() {
        let ll = solve_lieb_liniger(1.0, 1e6, &cfg()).unwrap();
        assert_relative_eq!(ll.reduced_energy(), TG, max_relative = 1e-4);
        let yg = solve_yang_gaudin(1.0, 1e6, &cfg()).unwrap();
        assert_relative_eq!(yg.reduced_energy(), TG, max_relative = 1e-4);
        for f in &yg.f {
            assert!((f - 1.0 / (2.0 * PI)).abs() < 1e-5);
        }
    }

    #[test]
    fn lieb_liniger_dilute_band() {
        for gamma_inv in [0.005, 0.01, 0.02] {
            let c = 1.0 / gamma_inv;
            let s = solve_lieb_liniger(1.0, c, &cfg()).unwrap();
            let first = TG * (1.0 - 4.0 * gamma_inv);
            assert!((s.reduced_energy() - first).abs() <= 20.0 * gamma_inv.powi(2) * TG);
            assert!((s.rho - 1.0).abs() < 1e-8);
            assert!(s.residual <= 1e-10);
            // strong-coupling series 1 − 4/γ + 12/γ² + O(γ⁻³)
            let second = TG * (1.0 - 4.0 * gamma_inv + 12.0 * gamma_inv.powi(2));
            assert!((s.reduced_energy() - second).abs() <= 60.0 * gamma_inv.powi(3) * TG);
        }
    }

    #[test]
    fn lieb_liniger_monotone_in_coupling() {
        let e = |c: f64| solve_lieb_liniger(1.0, c, &cfg()).unwrap().e_density;
        assert!(e(50.0) < e(100.0));
        assert!(e(100.0) < e(1e6));
    }

    #[test]
    fn yang_gaudin_dilute_band_and_magnetisation() {
        for gamma_inv in [0.005, 0.01, 0.02] {
            let c = 1.0 / gamma_inv;
            let s = solve_yang_gaudin(1.0, c, &cfg()).unwrap();
            assert!((s.m_density - 0.5).abs() < 1e-4, "{}", s.m_density);
            let first = TG * (1.0 - 4.0 * LN_2 * gamma_inv);
            assert!((s.reduced_energy() - first).abs() <= 20.0 * gamma_inv.powi(2) * TG);
            assert!(!s.truncation_warning);
            assert!(s.f.iter().all(|&f| f > 0.0));
            let smin = s.sigma.iter().copied().fold(f64::INFINITY, f64::min);
            let smax = s.sigma.iter().copied().fold(0.0, f64::max);
            assert!(smin >= 0.0, "min σ {smin:e}, max σ {smax:e}, ratio {:?}", s.truncation_ratio);
            assert!(s.asymmetry() <= 1e-12);
        }
    }

    #[test]
    fn frozen_spin_gives_free_fermions() {
        let cfg = BetheConfig {
            freeze_spin: true,
            ..cfg()
        };
        let s = solve_yang_gaudin(1.0, 10.0, &cfg).unwrap();
        for f in &s.f {
            assert_relative_eq!(*f, 1.0 / (2.0 * PI), max_relative = 1e-14);
        }
        assert_relative_eq!(s.grids.q, PI, max_relative = 1e-10);
        assert_relative_eq!(s.reduced_energy(), TG, max_relative = 1e-10);
    }

    #[test]
    fn quadrature_and_truncation_convergence() {
        let base = solve_lieb_liniger(1.0, 100.0, &cfg()).unwrap();
        let fine = solve_lieb_liniger(1.0, 100.0, &BetheConfig { n_k: 128, ..cfg() }).unwrap();
        assert!(((base.e_density - fine.e_density) / fine.e_density).abs() < 1e-9);

        let base = solve_yang_gaudin(1.0, 100.0, &cfg()).unwrap();
        let fine = solve_yang_gaudin(1.0, 100.0, &BetheConfig { n_k: 128, ..cfg() }).unwrap();
        assert!(((base.e_density - fine.e_density) / fine.e_density).abs() < 1e-9);
        let wide = solve_yang_gaudin(1.0, 100.0, &BetheConfig { b_cut_factor: 40.0, ..cfg() })
            .unwrap();
        assert!(((base.e_density - wide.e_density) / wide.e_density).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_lieb_liniger(0.0, 1.0, &cfg()).is_err());
        assert!(solve_lieb_liniger(1.0, -1.0, &cfg()).is_err());
        assert!(solve_yang_gaudin(1.0, 1.0, &BetheConfig { n_k: 10, ..cfg() }).is_err());
        assert!(solve_yang_gaudin(1.0, 1.0, &BetheConfig { b_cut: Some(5.0), ..cfg() }).is_err());
    }

    #[test]
    fn neumann_bound() {
        let b = ll_neumann_lower_bound(100, 100.0, None, 1.0).unwrap();
        assert_relative_eq!(b.value, TG * 100.0 * (1.0 - 100f64.powf(-2.0 / 3.0)), max_relative = 1e-14);
        assert!(!b.outside_validity);
        // the thermodynamic energy sits above the κ = 0 floor at ρ/c = 0.01
        let s = solve_lieb_liniger(1.0, 100.0, &cfg()).unwrap();
        let floor = ll_neumann_lower_bound(1000, 1000.0, Some(100.0), 0.0).unwrap();
        assert!(s.e_density * 1000.0 >= floor.value);
        let weak = ll_neumann_lower_bound(10, 10.0, Some(1e-3), 1.0).unwrap();
        assert!(weak.outside_validity && weak.value < 0.0);
        let weaker = ll_neumann_lower_bound(10, 10.0, Some(1e-4), 1.0).unwrap();
        assert!(weaker.value < weak.value);
    }
}
