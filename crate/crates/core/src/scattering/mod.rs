//! Zero-energy two-body scattering for scalar and matrix-valued potentials.
//!
//! For a scalar potential `v` the even (odd) scattering solution minimises
//! `∫ 2|ψ'|² + v|ψ|²` on `[-R, R]` with `ψ(±R) = 1` (`ψ(±R) = ±1`); the
//! minimum is `4/(R - a)` and defines `a_e` (`a_o`). Outside the support the
//! solution is affine, `ψ(x) = (|x| - a)/(R - a)`.
//!
//! For matrix potentials the scattering solution `F₀` solves
//! `-F₀'' + ½VF₀ = 0` with `F₀(R) = I` and `F₀(-R) = U` (`U = P_A - P_S` for
//! fermions), and the scattering length matrix is read off the tail,
//! `F₀(x) = (R - 𝖠)⁻¹(x - 𝖠)` for `x ≥ R₀`.
//!
//! A channel whose solution is constant has infinite negative scattering
//! length; it is carried as [`ScatteringLength::NegInfinity`] rather than a
//! large float.

mod checks;
mod potential;
mod solver;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_algebra::PairProjectors;

pub use checks::{
    convexity_defect, dyson_gap, hard_core_pointwise_check, scattering_energy_identity,
    DysonChecker, PolynomialTest, SpinChannel, TestFunction,
};
pub use potential::{
    Atom, MatrixAtom, MatrixAtomSpec, MatrixDensity, MatrixDensitySpec, MatrixPartSpec,
    MatrixPotential, PotentialSpec, ScalarPotential, Tabulated,
};
pub use solver::{Piece, Tabulation};

use solver::{solve_two_point, Measure};

/// A scattering length, possibly `-∞` (constant scattering solution).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScatteringLength {
    Finite(f64),
    NegInfinity,
}

impl ScatteringLength {
    pub fn finite(self) -> Option<f64> {
        match self {
            ScatteringLength::Finite(a) => Some(a),
            ScatteringLength::NegInfinity => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ScatteringLength::Finite(_))
    }

    /// `1/(R - a)`, which is `0` for `a = -∞`.
    pub fn inverse_gap(self, r: f64) -> f64 {
        match self {
            ScatteringLength::Finite(a) => 1.0 / (r - a),
            ScatteringLength::NegInfinity => 0.0,
        }
    }

    /// Ordering with `-∞` below every finite value.
    pub fn le(self, other: ScatteringLength) -> bool {
        match (self, other) {
            (ScatteringLength::NegInfinity, _) => true,
            (ScatteringLength::Finite(_), ScatteringLength::NegInfinity) => false,
            (ScatteringLength::Finite(a), ScatteringLength::Finite(b)) => a <= b,
        }
    }
}

impl Serialize for ScatteringLength {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ScatteringLength::Finite(a) => s.serialize_f64(*a),
            ScatteringLength::NegInfinity => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ScatteringLength {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(a) if a.is_finite() => Ok(ScatteringLength::Finite(a)),
            Raw::Str(s) if s == "-inf" => Ok(ScatteringLength::NegInfinity),
            _ => Err(serde::de::Error::custom(
                "scattering length must be a finite number or \"-inf\"",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Boundary condition at `-R` for the matrix scattering problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    /// `F₀(-R) = P_A - P_S` (spin-J fermions).
    Fermionic,
    /// `F₀(-R) = P_S - P_A` (spin-J bosons).
    Bosonic,
    /// `F₀(-R) = I` (spatially symmetric, e.g. the LLH model).
    Symmetric,
}

impl BoundaryMode {
    pub fn left_boundary(self, projectors: &PairProjectors) -> DMatrix<f64> {
        match self {
            BoundaryMode::Fermionic => projectors.antisymmetric() - projectors.symmetric(),
            BoundaryMode::Bosonic => projectors.symmetric() - projectors.antisymmetric(),
            BoundaryMode::Symmetric => projectors.identity(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScatteringConfig {
    /// RK4 step on density segments is `R / steps_per_radius` (further capped
    /// by a quarter of the smallest atom spacing).
    pub steps_per_radius: usize,
    /// A slope eigenvalue `s` with `s·R` below this marks an `a = -∞` channel.
    pub degenerate_slope_tol: f64,
    /// Second matching radius, as a multiple of `R`, for the R-independence
    /// diagnostic. `None` skips the second solve.
    pub independence_factor: Option<f64>,
}

impl Default for ScatteringConfig {
    fn default() -> Self {
        ScatteringConfig {
            steps_per_radius: 8192,
            degenerate_slope_tol: 1e-12,
            independence_factor: Some(2.0),
        }
    }
}

/// Self-consistency measurements recorded with every solve.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `max |𝖠(R) - 𝖠(λR)|` entrywise (plus any change in the `-∞` subspace).
    pub r_independence_residual: Option<f64>,
    /// Asymmetry of `𝖠` induced by the asymmetry of the computed slope.
    pub hermiticity_residual: f64,
    /// `‖[𝖠, SWAP]‖`, zero when `𝖠` is block diagonal.
    pub block_residual: f64,
    /// `‖E - 4(R-𝖠)⁻¹‖ / ‖4(R-𝖠)⁻¹‖` on the finite subspace.
    pub energy_identity_residual: f64,
    /// `|F(R) - I|`, `|F(-R) - U|`.
    pub boundary_residual: f64,
    /// Deviation of the tabulated tail on `[R₀, R]` from `(R-𝖠)⁻¹(x-𝖠)`.
    pub tail_affinity_residual: f64,
    /// `max |a_fit - a|` between slope extraction and a least-squares affine
    /// fit of the tail.
    pub affine_fit_disagreement: f64,
}

/// Eigen-decomposition of the scattering length matrix.
#[derive(Debug, Clone)]
pub struct ScatteringMatrix {
    lengths: Vec<ScatteringLength>,
    /// Orthonormal eigenvectors as columns.
    vectors: DMatrix<f64>,
}

impl ScatteringMatrix {
    pub fn lengths(&self) -> &[ScatteringLength] {
        &self.lengths
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lengths.iter().any(|a| !a.is_finite())
    }

    fn spectral_sum(&self, f: impl Fn(ScatteringLength) -> f64) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (k, a) in self.lengths.iter().enumerate() {
            let w = f(*a);
            if w != 0.0 {
                let v = self.vectors.column(k);
                m += v * v.transpose() * w;
            }
        }
        m
    }

    /// `𝖠` if every channel is finite.
    pub fn matrix(&self) -> Option<DMatrix<f64>> {
        (!self.is_degenerate()).then(|| self.finite_part())
    }

    /// `𝖠` restricted to the finite channels (zero on `-∞` channels).
    pub fn finite_part(&self) -> DMatrix<f64> {
        self.spectral_sum(|a| a.finite().unwrap_or(0.0))
    }

    pub fn finite_projector(&self) -> DMatrix<f64> {
        self.spectral_sum(|a| if a.is_finite() { 1.0 } else { 0.0 })
    }

    pub fn degenerate_projector(&self) -> DMatrix<f64> {
        self.spectral_sum(|a| if a.is_finite() { 0.0 } else { 1.0 })
    }

    /// `(R - 𝖠)⁻¹`, zero on `-∞` channels.
    pub fn inverse_gap(&self, r: f64) -> DMatrix<f64> {
        self.spectral_sum(|a| a.inverse_gap(r))
    }

    pub fn max_finite(&self) -> Option<f64> {
        self.lengths
            .iter()
            .filter_map(|a| a.finite())
            .max_by(f64::total_cmp)
    }

    /// Quadratic form `⟨ξ, 𝖠ξ⟩` for unit `ξ`, `-∞` if `ξ` overlaps a
    /// degenerate channel.
    pub fn expectation(&self, xi: &nalgebra::DVector<f64>) -> ScatteringLength {
        let mut acc = 0.0;
        for (k, a) in self.lengths.iter().enumerate() {
            let w = self.vectors.column(k).dot(xi).powi(2);
            match a {
                ScatteringLength::Finite(v) => acc += v * w,
                ScatteringLength::NegInfinity if w > 1e-14 => {
                    return ScatteringLength::NegInfinity
                }
                ScatteringLength::NegInfinity => {}
            }
        }
        ScatteringLength::Finite(acc)
    }
}

/// Result of the scalar even/odd problem.
#[derive(Debug, Clone)]
pub struct ScatteringScalarResult {
    pub parity: Parity,
    pub a: ScatteringLength,
    pub r: f64,
    /// `4/(R - a)`, the minimal scattering energy (zero for `a = -∞`).
    pub energy: f64,
    pub psi: Tabulation,
    pub diagnostics: Diagnostics,
}

impl ScatteringScalarResult {
    pub fn value(&self, x: f64) -> f64 {
        self.psi.value(x)[(0, 0)]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.psi.derivative(x)[(0, 0)]
    }
}

/// Result of the matrix problem.
#[derive(Debug, Clone)]
pub struct ScatteringMatrixResult {
    pub a: ScatteringMatrix,
    pub r: f64,
    pub bc_mode: BoundaryMode,
    pub solution: Tabulation,
    pub diagnostics: Diagnostics,
}

struct Analysis {
    a: ScatteringMatrix,
    table: Tabulation,
    diagnostics: Diagnostics,
}

fn analyse(
    measure: &Measure,
    r: f64,
    left: &DMatrix<f64>,
    swap: Option<&DMatrix<f64>>,
    cfg: &ScatteringConfig,
) -> Result<Analysis> {
    if !(r > measure.r0) || !r.is_finite() {
        return Err(Error::invalid(format!(
            "matching radius R = {r} must exceed the support radius R0 = {}",
            measure.r0
        )));
    }
    let raw = solve_two_point(measure, r, left, cfg)?;
    let s = &raw.slope;
    let n = measure.n;
    let s_sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(s_sym);

    let mut lengths = Vec::with_capacity(n);
    let mut max_inv_slope: f64 = 0.0;
    for &sv in eig.eigenvalues.iter() {
        if sv * r < cfg.degenerate_slope_tol {
            if sv * r < -1e-8 {
                return Err(Error::Numerical(format!(
                    "negative tail slope {sv:.3e}: potential is not repulsive"
                )));
            }
            lengths.push(ScatteringLength::NegInfinity);
        } else {
            lengths.push(ScatteringLength::Finite(r - 1.0 / sv));
            max_inv_slope = max_inv_slope.max(1.0 / sv);
        }
    }
    let a = ScatteringMatrix {
        lengths,
        vectors: eig.eigenvectors,
    };

    let hermiticity_residual = (s - s.transpose()).amax() * max_inv_slope * max_inv_slope;
    let block_residual = match swap {
        Some(sw) => {
            let af = a.finite_part();
            let pf = a.finite_projector();
            (&af * sw - sw * &af).amax().max((&pf * sw - sw * &pf).amax())
        }
        None => 0.0,
    };

    let energy = raw.table.energy(measure);
    let energy_identity_residual = energy_residual(&a, &energy, r);

    let (tail_affinity_residual, affine_fit_disagreement) =
        tail_checks(&raw.table, &a, r, measure.r0);

    Ok(Analysis {
        a,
        table: raw.table,
        diagnostics: Diagnostics {
            r_independence_residual: None,
            hermiticity_residual,
            block_residual,
            energy_identity_residual,
            boundary_residual: raw.boundary_residual,
            tail_affinity_residual,
            affine_fit_disagreement,
        },
    })
}

fn energy_residual(a: &ScatteringMatrix, energy: &DMatrix<f64>, r: f64) -> f64 {
    let target = a.inverse_gap(r) * 4.0;
    let p = a.finite_projector();
    let diff = &p * (energy - &target) * &p;
    let scale = target.amax();
    if scale == 0.0 {
        diff.amax()
    } else {
        diff.amax() / scale
    }
}

fn tail_checks(table: &Tabulation, a: &ScatteringMatrix, r: f64, r0: f64) -> (f64, f64) {
    let n = a.dim();
    let closed = |x: f64| {
        let mut m = a.degenerate_projector();
        for (k, len) in a.lengths.iter().enumerate() {
            if let ScatteringLength::Finite(av) = len {
                let v = a.vectors.column(k);
                m += v * v.transpose() * ((x - av) / (r - av));
            }
        }
        m
    };
    let tail: Vec<(f64, &DMatrix<f64>)> = table
        .nodes()
        .filter(|(x, _, _)| *x >= r0 - 1e-14 * r.max(1.0))
        .map(|(x, f, _)| (x, f))
        .collect();
    let affinity = tail
        .iter()
        .map(|(x, f)| (*f - closed(*x)).amax())
        .fold(0.0, f64::max);

    // least-squares F ≈ P + Q x on the tail nodes
    let m = tail.len() as f64;
    let xbar = tail.iter().map(|t| t.0).sum::<f64>() / m;
    let mut fbar = DMatrix::<f64>::zeros(n, n);
    for (_, f) in &tail {
        fbar += *f;
    }
    fbar /= m;
    let mut sxx = 0.0;
    let mut sxf = DMatrix::<f64>::zeros(n, n);
    for (x, f) in &tail {
        sxx += (x - xbar).powi(2);
        sxf += (*f - &fbar) * (x - xbar);
    }
    if sxx == 0.0 {
        return (affinity, 0.0);
    }
    let q = sxf / sxx;
    let p = fbar - &q * xbar;
    let mut disagreement: f64 = 0.0;
    for (k, len) in a.lengths.iter().enumerate() {
        if let ScatteringLength::Finite(av) = len {
            let v = a.vectors.column(k);
            let qv = (v.transpose() * &q * v)[(0, 0)];
            let pv = (v.transpose() * &p * v)[(0, 0)];
            if qv.abs() * r > 1e-10 {
                disagreement = disagreement.max((-pv / qv - av).abs());
            }
        }
    }
    (affinity, disagreement)
}

fn independence_residual(first: &ScatteringMatrix, second: &ScatteringMatrix) -> f64 {
    (first.finite_part() - second.finite_part())
        .amax()
        .max((first.degenerate_projector() - second.degenerate_projector()).amax())
}

/// Even/odd scattering solution of a scalar potential on `[-R, R]`.
pub fn solve_scalar_scattering(
    v: &ScalarPotential,
    r: f64,
    parity: Parity,
    cfg: &ScatteringConfig,
) -> Result<ScatteringScalarResult> {
    let measure = Measure::from_scalar(v);
    let left = DMatrix::from_element(
        1,
        1,
        match parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        },
    );
    let mut an = analyse(&measure, r, &left, None, cfg)?;
    if let Some(factor) = cfg.independence_factor {
        let other = analyse(&measure, r * factor, &left, None, cfg)?;
        an.diagnostics.r_independence_residual = Some(independence_residual(&an.a, &other.a));
    }
    let a = an.a.lengths[0];
    Ok(ScatteringScalarResult {
        parity,
        a,
        r,
        energy: 4.0 * a.inverse_gap(r),
        psi: an.table,
        diagnostics: an.diagnostics,
    })
}

/// Both scalar scattering lengths `(a_e, a_o)`.
pub fn scattering_lengths(
    v: &ScalarPotential,
    r: f64,
    cfg: &ScatteringConfig,
) -> Result<(ScatteringLength, ScatteringLength)> {
    let cfg = ScatteringConfig {
        independence_factor: None,
        ..cfg.clone()
    };
    let even = solve_scalar_scattering(v, r, Parity::Even, &cfg)?;
    let odd = solve_scalar_scattering(v, r, Parity::Odd, &cfg)?;
    Ok((even.a, odd.a))
}

/// Matrix scattering solution and scattering length matrix `𝖠`.
pub fn solve_matrix_scattering(
    v: &MatrixPotential,
    r: f64,
    bc_mode: BoundaryMode,
    cfg: &ScatteringConfig,
) -> Result<ScatteringMatrixResult> {
    let projectors = PairProjectors::new(v.spin());
    let measure = Measure::from_matrix(v);
    let left = bc_mode.left_boundary(&projectors);
    let mut an = analyse(&measure, r, &left, Some(projectors.swap()), cfg)?;
    if let Some(factor) = cfg.independence_factor {
        let other = analyse(&measure, r * factor, &left, Some(projectors.swap()), cfg)?;
        an.diagnostics.r_independence_residual = Some(independence_residual(&an.a, &other.a));
    }
    Ok(ScatteringMatrixResult {
        a: an.a,
        r,
        bc_mode,
        solution: an.table,
        diagnostics: an.diagnostics,
    })
}

// ---------------------------------------------------------------------------
// JSON reports

#[derive(Debug, Clone, Serialize)]
pub struct ScalarReport {
    pub schema: &'static str,
    pub kind: &'static str,
    pub parity: Parity,
    pub a: ScatteringLength,
    #[serde(rename = "R")]
    pub r: f64,
    pub energy: f64,
    pub diagnostics: Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[f64; 3]>>,
}

impl ScatteringScalarResult {
    /// `(x, ψ, ψ')` at every stored node.
    pub fn table(&self) -> Vec<[f64; 3]> {
        self.psi
            .nodes()
            .map(|(x, f, g)| [x, f[(0, 0)], g[(0, 0)]])
            .collect()
    }

    pub fn report(&self, with_table: bool) -> ScalarReport {
        ScalarReport {
            schema: crate::SCHEMA,
            kind: "scatter",
            parity: self.parity,
            a: self.a,
            r: self.r,
            energy: self.energy,
            diagnostics: self.diagnostics.clone(),
            table: with_table.then(|| self.table()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Channel {
    pub length: ScatteringLength,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixReport {
    pub schema: &'static str,
    pub kind: &'static str,
    pub bc_mode: BoundaryMode,
    #[serde(rename = "R")]
    pub r: f64,
    /// Finite part of `𝖠`, row-major.
    #[serde(rename = "A_finite")]
    pub a_finite: Vec<Vec<f64>>,
    pub degenerate_channels: usize,
    pub channels: Vec<Channel>,
    pub diagnostics: Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<MatrixRow>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixRow {
    pub x: f64,
    #[serde(rename = "F")]
    pub f: Vec<Vec<f64>>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl ScatteringMatrixResult {
    pub fn report(&self, with_table: bool) -> MatrixReport {
        let channels = self
            .a
            .lengths
            .iter()
            .enumerate()
            .map(|(k, l)| Channel {
                length: *l,
                vector: self.a.vectors.column(k).iter().copied().collect(),
            })
            .collect();
        MatrixReport {
            schema: crate::SCHEMA,
            kind: "scatter-matrix",
            bc_mode: self.bc_mode,
            r: self.r,
            a_finite: rows(&self.a.finite_part()),
            degenerate_channels: self.a.lengths.iter().filter(|l| !l.is_finite()).count(),
            channels,
            diagnostics: self.diagnostics.clone(),
            table: with_table.then(|| {
                self.solution
                    .nodes()
                    .map(|(x, f, _)| MatrixRow { x, f: rows(f) })
                    .collect()
            }),
        }
    }
}
