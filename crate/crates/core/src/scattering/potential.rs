//! Compactly supported, even, repulsive measure potentials.
//!
//! A potential is a finite sum of Dirac atoms plus a piecewise-linear density,
//! optionally with a hard core (the scattering solution pinned to zero on
//! `[-a, a]`). Matrix potentials add Hermitian pair-space increments on top of
//! a scalar part, `V = v·I + Ṽ`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_algebra::{rows_to_matrix, symmetry_residual, PairProjectors, Spin};

const EVEN_TOL: f64 = 1e-12;
const COMMUTE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub x: f64,
    pub weight: f64,
}

/// Piecewise-linear function through `(xs[i], vals[i])`, zero outside
/// `[xs[0], xs[n-1]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tabulated {
    pub xs: Vec<f64>,
    pub vals: Vec<f64>,
}

impl Tabulated {
    pub fn new(xs: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        let t = Tabulated { xs, vals };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        check_grid(&self.xs, self.vals.len())?;
        if self.vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("density values must be finite and ≥ 0"));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        interpolate(&self.xs, x, |i| self.vals[i], |a, b, t| a + (b - a) * t).unwrap_or(0.0)
    }

    fn is_even(&self) -> bool {
        let n = self.xs.len();
        let scale = self.vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        (0..n).all(|i| {
            (self.xs[i] + self.xs[n - 1 - i]).abs() <= EVEN_TOL * self.xs[n - 1].abs().max(1.0)
                && (self.vals[i] - self.vals[n - 1 - i]).abs() <= EVEN_TOL * scale
        })
    }

    fn support(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }
}

fn check_grid(xs: &[f64], nvals: usize) -> Result<()> {
    if xs.len() < 2 || xs.len() != nvals {
        return Err(Error::invalid(
            "tabulated density needs ≥ 2 nodes and one value per node",
        ));
    }
    if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("density nodes must be finite and strictly increasing"));
    }
    Ok(())
}

fn interpolate<T, U>(
    xs: &[f64],
    x: f64,
    val: impl Fn(usize) -> T,
    lerp: impl Fn(T, T, f64) -> U,
) -> Option<U> {
    let n = xs.len();
    if x < xs[0] || x > xs[n - 1] {
        return None;
    }
    let i = match xs.partition_point(|&p| p <= x) {
        0 => 0,
        k if k >= n => n - 2,
        k => k - 1,
    };
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    Some(lerp(val(i), val(i + 1), t))
}

/// Even, nonnegative scalar potential `v` supported in `[-R₀, R₀]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarPotential {
    atoms: Vec<Atom>,
    density: Option<Tabulated>,
    hard_core: Option<f64>,
    r0: f64,
}

impl ScalarPotential {
    pub fn new(
        atoms: Vec<Atom>,
        density: Option<Tabulated>,
        hard_core: Option<f64>,
        r0: f64,
    ) -> Result<Self> {
        let v = ScalarPotential {
            atoms,
            density,
            hard_core,
            r0,
        };
        v.validate()?;
        Ok(v)
    }

    fn validate(&self) -> Result<()> {
        if !self.r0.is_finite() || self.r0 < 0.0 {
            return Err(Error::invalid(format!("support radius R0 = {} must be ≥ 0", self.r0)));
        }
        let reach = self.r0 * (1.0 + 1e-12) + 1e-15;
        for a in &self.atoms {
            if !a.x.is_finite() || !a.weight.is_finite() || a.weight < 0.0 {
                return Err(Error::invalid("atom positions must be finite and weights ≥ 0"));
            }
            if a.x.abs() > reach {
                return Err(Error::invalid(format!(
                    "atom at x = {} lies outside [-R0, R0] with R0 = {}",
                    a.x, self.r0
                )));
            }
        }
        if !atoms_even(&self.atoms) {
            return Err(Error::invalid("atoms must come in ± pairs of equal weight"));
        }
        if let Some(d) = &self.density {
            d.validate()?;
            let (lo, hi) = d.support();
            if lo < -reach || hi > reach {
                return Err(Error::invalid("density support exceeds [-R0, R0]"));
            }
            if !d.is_even() {
                return Err(Error::invalid("density must be even in x"));
            }
        }
        if let Some(a) = self.hard_core {
            if !a.is_finite() || a <= 0.0 || a > reach {
                return Err(Error::invalid(format!(
                    "hard-core radius {a} must lie in (0, R0]"
                )));
            }
        }
        Ok(())
    }

    /// The free case `v = 0`.
    pub fn zero() -> Self {
        ScalarPotential {
            atoms: vec![],
            density: None,
            hard_core: None,
            r0: 0.0,
        }
    }

    /// `v = 2c·δ₀` (Lieb–Liniger / Yang–Gaudin contact interaction).
    pub fn delta(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::invalid(format!("coupling c = {c} must be positive")));
        }
        ScalarPotential::new(vec![Atom { x: 0.0, weight: 2.0 * c }], None, None, 0.0)
    }

    /// `v = 2c(δ_{-R₀} + δ_{R₀})`.
    pub fn double_delta(c: f64, r0: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::invalid(format!("coupling c = {c} must be positive")));
        }
        let atoms = if r0 == 0.0 {
            vec![Atom { x: 0.0, weight: 4.0 * c }]
        } else {
            vec![
                Atom { x: -r0, weight: 2.0 * c },
                Atom { x: r0, weight: 2.0 * c },
            ]
        };
        ScalarPotential::new(atoms, None, None, r0)
    }

    /// Hard core of radius `a`.
    pub fn hard_core(a: f64) -> Result<Self> {
        ScalarPotential::new(vec![], None, Some(a), a)
    }

    /// Smooth bump `h·(1 - (x/R₀)²)` tabulated on `nodes` points.
    pub fn bump(height: f64, r0: f64, nodes: usize) -> Result<Self> {
        let n = nodes.max(3);
        let xs: Vec<f64> = (0..n)
            .map(|i| -r0 + 2.0 * r0 * i as f64 / (n - 1) as f64)
            .collect();
        let mut vals: Vec<f64> = xs.iter().map(|x| height * (1.0 - (x / r0).powi(2))).collect();
        // pin the endpoints and enforce exact symmetry against rounding
        vals[0] = 0.0;
        vals[n - 1] = 0.0;
        for i in 0..n / 2 {
            let m = 0.5 * (vals[i] + vals[n - 1 - i]);
            vals[i] = m;
            vals[n - 1 - i] = m;
        }
        let mut xs = xs;
        for i in 0..n / 2 {
            let m = 0.5 * (xs[n - 1 - i] - xs[i]);
            xs[i] = -m;
            xs[n - 1 - i] = m;
        }
        if n % 2 == 1 {
            xs[n / 2] = 0.0;
        }
        ScalarPotential::new(vec![], Some(Tabulated::new(xs, vals)?), None, r0)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Tabulated> {
        self.density.as_ref()
    }

    pub fn hard_core_radius(&self) -> Option<f64> {
        self.hard_core
    }

    pub fn support_radius(&self) -> f64 {
        self.r0
    }

    pub fn density_at(&self, x: f64) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d.eval(x))
    }
}

fn atoms_even(atoms: &[Atom]) -> bool {
    let scale = atoms.iter().fold(1.0f64, |m, a| m.max(a.weight));
    let xscale = atoms.iter().fold(1.0f64, |m, a| m.max(a.x.abs()));
    let mut used = vec![false; atoms.len()];
    for (i, a) in atoms.iter().enumerate() {
        if used[i] {
            continue;
        }
        if a.x.abs() <= EVEN_TOL * xscale {
            used[i] = true;
            continue;
        }
        let partner = atoms.iter().enumerate().position(|(j, b)| {
            !used[j]
                && j != i
                && (a.x + b.x).abs() <= EVEN_TOL * xscale
                && (a.weight - b.weight).abs() <= EVEN_TOL * scale
        });
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => return false,
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixAtom {
    pub x: f64,
    pub weight: DMatrix<f64>,
}

/// Piecewise-linear matrix density, zero outside its node range.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDensity {
    xs: Vec<f64>,
    vals: Vec<DMatrix<f64>>,
}

impl MatrixDensity {
    pub fn new(xs: Vec<f64>, vals: Vec<DMatrix<f64>>) -> Result<Self> {
        check_grid(&xs, vals.len())?;
        Ok(MatrixDensity { xs, vals })
    }

    pub fn eval(&self, x: f64) -> Option<DMatrix<f64>> {
        interpolate(&self.xs, x, |i| &self.vals[i], |a, b, t| a * (1.0 - t) + b * t)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }
}

/// Matrix-valued potential `V = v·I + Ṽ` on the pair space `C^d ⊗ C^d`.
#[derive(Debug, Clone)]
pub struct MatrixPotential {
    spin: Spin,
    scalar: ScalarPotential,
    atoms: Vec<MatrixAtom>,
    density: Option<MatrixDensity>,
    r0: f64,
}

impl MatrixPotential {
    pub fn new(
        spin: Spin,
        scalar: ScalarPotential,
        atoms: Vec<MatrixAtom>,
        density: Option<MatrixDensity>,
        r0: f64,
    ) -> Result<Self> {
        let v = MatrixPotential {
            spin,
            scalar,
            atoms,
            density,
            r0,
        };
        v.validate()?;
        Ok(v)
    }

    /// `V = v·I`.
    pub fn from_scalar(spin: Spin, scalar: ScalarPotential) -> Self {
        let r0 = scalar.r0;
        MatrixPotential {
            spin,
            scalar,
            atoms: vec![],
            density: None,
            r0,
        }
    }

    /// Contact interaction `(2c′P_A + 2cP_S)·δ₀` (spin 1/2 gives the LLH model).
    pub fn spin_dependent_delta(spin: Spin, c: f64, c_prime: f64) -> Result<Self> {
        if !(c >= 0.0 && c_prime >= 0.0) {
            return Err(Error::invalid("contact couplings must be ≥ 0"));
        }
        let p = PairProjectors::new(spin);
        let weight = p.block_matrix(2.0 * c_prime, 2.0 * c);
        MatrixPotential::new(
            spin,
            ScalarPotential::zero(),
            vec![MatrixAtom { x: 0.0, weight }],
            None,
            0.0,
        )
    }

    fn validate(&self) -> Result<()> {
        let n = self.spin.pair_dim();
        if !self.r0.is_finite() || self.r0 < self.scalar.r0 {
            return Err(Error::invalid(
                "matrix potential R0 must be finite and cover the scalar part",
            ));
        }
        let reach = self.r0 * (1.0 + 1e-12) + 1e-15;
        let projectors = PairProjectors::new(self.spin);
        let check = |m: &DMatrix<f64>, what: &str| -> Result<()> {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::invalid(format!("{what}: expected a {n}×{n} matrix")));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("{what}: entries must be finite")));
            }
            let scale = m.amax().max(1.0);
            if symmetry_residual(m) > 1e-12 * scale {
                return Err(Error::invalid(format!("{what}: matrix is not Hermitian")));
            }
            if projectors.commutator_residual(m) > COMMUTE_TOL * scale {
                return Err(Error::invalid(format!(
                    "{what}: matrix does not commute with the pair swap"
                )));
            }
            Ok(())
        };
        for a in &self.atoms {
            check(&a.weight, "matrix atom")?;
            if !a.x.is_finite() || a.x.abs() > reach {
                return Err(Error::invalid("matrix atom outside [-R0, R0]"));
            }
        }
        if let Some(d) = &self.density {
            for m in &d.vals {
                check(m, "matrix density")?;
            }
            if d.xs[0] < -reach || d.xs[d.xs.len() - 1] > reach {
                return Err(Error::invalid("matrix density support exceeds [-R0, R0]"));
            }
        }
        if let Some(a) = self.scalar.hard_core {
            if a > reach {
                return Err(Error::invalid("hard core exceeds R0"));
            }
        }

        // evenness
        let scale = self
            .atoms
            .iter()
            .fold(1.0f64, |m, a| m.max(a.weight.amax()));
        for a in &self.atoms {
            let mirrored = self.atom_weight_at(-a.x);
            if (mirrored - self.atom_weight_at(a.x)).amax() > EVEN_TOL * scale {
                return Err(Error::invalid("matrix atoms must be even in x"));
            }
        }
        if let Some(d) = &self.density {
            let k = d.xs.len();
            let dscale = d.vals.iter().fold(1.0f64, |m, v| m.max(v.amax()));
            for i in 0..k {
                if (d.xs[i] + d.xs[k - 1 - i]).abs() > EVEN_TOL * d.xs[k - 1].abs().max(1.0)
                    || (&d.vals[i] - &d.vals[k - 1 - i]).amax() > EVEN_TOL * dscale
                {
                    return Err(Error::invalid("matrix density must be even in x"));
                }
            }
        }

        // positivity of the total measure at every atom and density node
        let mut positions: Vec<f64> = self.atoms.iter().map(|a| a.x).collect();
        positions.extend(self.scalar.atoms.iter().map(|a| a.x));
        for x in positions {
            let w = self.total_atom_weight_at(x);
            require_psd(&w, "atom weight")?;
        }
        let mut nodes: Vec<f64> = self.density.iter().flat_map(|d| d.xs.clone()).collect();
        nodes.extend(self.scalar.density.iter().flat_map(|d| d.xs.clone()));
        for x in nodes {
            // both one-sided limits at a node
            for probe in [x - 1e-13 * x.abs().max(1.0), x, x + 1e-13 * x.abs().max(1.0)] {
                require_psd(&self.density_at(probe), "density")?;
            }
        }
        Ok(())
    }

    fn atom_weight_at(&self, x: f64) -> DMatrix<f64> {
        let n = self.spin.pair_dim();
        let xscale = self.r0.max(1.0);
        self.atoms
            .iter()
            .filter(|a| (a.x - x).abs() <= EVEN_TOL * xscale)
            .fold(DMatrix::zeros(n, n), |acc, a| acc + &a.weight)
    }

    fn total_atom_weight_at(&self, x: f64) -> DMatrix<f64> {
        let n = self.spin.pair_dim();
        let xscale = self.r0.max(1.0);
        let s: f64 = self
            .scalar
            .atoms
            .iter()
            .filter(|a| (a.x - x).abs() <= EVEN_TOL * xscale)
            .map(|a| a.weight)
            .sum();
        self.atom_weight_at(x) + DMatrix::identity(n, n) * s
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.pair_dim()
    }

    pub fn scalar_part(&self) -> &ScalarPotential {
        &self.scalar
    }

    pub fn matrix_atoms(&self) -> &[MatrixAtom] {
        &self.atoms
    }

    pub fn matrix_density(&self) -> Option<&MatrixDensity> {
        self.density.as_ref()
    }

    pub fn support_radius(&self) -> f64 {
        self.r0
    }

    pub fn hard_core_radius(&self) -> Option<f64> {
        self.scalar.hard_core
    }

    /// Total density `v(x)·I + Ṽ(x)` (atoms excluded).
    pub fn density_at(&self, x: f64) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::identity(n, n) * self.scalar.density_at(x);
        if let Some(d) = &self.density {
            if let Some(v) = d.eval(x) {
                m += v;
            }
        }
        m
    }

    /// Total variation `∫‖Ṽ‖` of the matrix part (operator norm; the density
    /// part by the trapezoidal rule on its nodes).
    pub fn total_variation(&self) -> f64 {
        let norm = |m: &DMatrix<f64>| {
            SymmetricEigen::new(m.clone())
                .eigenvalues
                .iter()
                .fold(0.0f64, |acc, e| acc.max(e.abs()))
        };
        let atoms: f64 = self.atoms.iter().map(|a| norm(&a.weight)).sum();
        let dens = self.density.as_ref().map_or(0.0, |d| {
            d.xs.windows(2)
                .zip(d.vals.windows(2))
                .map(|(x, v)| 0.5 * (x[1] - x[0]) * (norm(&v[0]) + norm(&v[1])))
                .sum()
        });
        atoms + dens
    }
}

fn require_psd(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let scale = m.amax().max(1.0);
    let min = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &e| acc.min(e));
    if min < -PSD_TOL * scale {
        return Err(Error::invalid(format!(
            "{what} is not positive semidefinite (min eigenvalue {min:.3e})"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON document

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixAtomSpec {
    pub x: f64,
    pub weight: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDensitySpec {
    pub xs: Vec<f64>,
    pub vals: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixPartSpec {
    #[serde(default)]
    pub atoms: Vec<MatrixAtomSpec>,
    #[serde(default)]
    pub density: Option<MatrixDensitySpec>,
}

/// On-disk potential definition.
///
/// ```json
/// {"schema": "dilute1d/1", "R0": 0.1,
///  "atoms": [{"x": -0.1, "weight": 4.0}, {"x": 0.1, "weight": 4.0}],
///  "density": {"xs": [...], "vals": [...]},
///  "hard_core": 0.05,
///  "dim": 4, "matrix_part": {"atoms": [{"x": 0.0, "weight": [[...]]}]}}
/// ```
///
/// `dim` is the pair dimension `d²` and is required for matrix potentials.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(default)]
    pub schema: Option<String>,
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub density: Option<Tabulated>,
    #[serde(default)]
    pub hard_core: Option<f64>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub matrix_part: Option<MatrixPartSpec>,
}

impl PotentialSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: PotentialSpec =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("potential JSON: {e}")))?;
        crate::json::check_schema(spec.schema.as_deref())?;
        Ok(spec)
    }

    pub fn to_scalar(&self) -> Result<ScalarPotential> {
        if self.matrix_part.is_some() {
            return Err(Error::invalid(
                "document has a matrix_part; use the matrix scattering solver",
            ));
        }
        ScalarPotential::new(
            self.atoms.clone(),
            self.density.clone(),
            self.hard_core,
            self.r0,
        )
    }

    pub fn to_matrix(&self) -> Result<MatrixPotential> {
        let dim = self
            .dim
            .ok_or_else(|| Error::invalid("matrix potentials need \"dim\" (= d²)"))?;
        let spin = Spin::from_pair_dim(dim)?;
        let scalar = ScalarPotential::new(
            self.atoms.clone(),
            self.density.clone(),
            self.hard_core,
            self.r0,
        )?;
        let part = self.matrix_part.clone().unwrap_or_default();
        let atoms = part
            .atoms
            .iter()
            .map(|a| {
                Ok(MatrixAtom {
                    x: a.x,
                    weight: rows_to_matrix(&a.weight, dim)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let density = part
            .density
            .as_ref()
            .map(|d| {
                let vals = d
                    .vals
                    .iter()
                    .map(|m| rows_to_matrix(m, dim))
                    .collect::<Result<Vec<_>>>()?;
                MatrixDensity::new(d.xs.clone(), vals)
            })
            .transpose()?;
        MatrixPotential::new(spin, scalar, atoms, density, self.r0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_validation() {
        assert!(ScalarPotential::delta(1.0).is_ok());
        assert!(ScalarPotential::delta(0.0).is_err());
        assert!(ScalarPotential::double_delta(2.0, 0.1).is_ok());
        // atom outside support
        assert!(ScalarPotential::new(vec![Atom { x: 0.2, weight: 1.0 }], None, None, 0.1).is_err());
        // unpaired atom
        assert!(ScalarPotential::new(vec![Atom { x: 0.1, weight: 1.0 }], None, None, 0.1).is_err());
        // unequal pair
        assert!(ScalarPotential::new(
            vec![Atom { x: 0.1, weight: 1.0 }, Atom { x: -0.1, weight: 2.0 }],
            None,
            None,
            0.1
        )
        .is_err());
        // negative weight
        assert!(ScalarPotential::new(vec![Atom { x: 0.0, weight: -1.0 }], None, None, 0.0).is_err());
        // odd density
        let d = Tabulated::new(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 2.0]).unwrap();
        assert!(ScalarPotential::new(vec![], Some(d), None, 1.0).is_err());
        assert!(Tabulated::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Tabulated::new(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        assert!(ScalarPotential::hard_core(0.05).is_ok());
        assert!(ScalarPotential::new(vec![], None, Some(0.2), 0.1).is_err());
        assert!(ScalarPotential::bump(3.0, 0.5, 41).is_ok());
    }

    #[test]
    fn tabulated_interpolation() {
        let d = Tabulated::new(vec![-1.0, 0.0, 1.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(d.eval(0.5), 1.0);
        assert_eq!(d.eval(-0.25), 1.5);
        assert_eq!(d.eval(1.5), 0.0);
        assert_eq!(d.eval(1.0), 0.0);
    }

    #[test]
    fn matrix_validation() {
        let p = PairProjectors::new(Spin::HALF);
        assert!(MatrixPotential::spin_dependent_delta(Spin::HALF, 2.0, 1.0).is_ok());
        // not commuting with the swap
        let mut w = DMatrix::<f64>::zeros(4, 4);
        w[(0, 0)] = 1.0;
        w[(1, 1)] = 2.0;
        let bad = MatrixPotential::new(
            Spin::HALF,
            ScalarPotential::zero(),
            vec![MatrixAtom { x: 0.0, weight: w }],
            None,
            0.0,
        );
        assert!(bad.is_err());
        // not PSD: negative on the singlet, not compensated by v
        let neg = p.block_matrix(-1.0, 0.0);
        let bad = MatrixPotential::new(
            Spin::HALF,
            ScalarPotential::zero(),
            vec![MatrixAtom { x: 0.0, weight: neg.clone() }],
            None,
            0.0,
        );
        assert!(bad.is_err());
        // compensated by the scalar part at the same point
        let ok = MatrixPotential::new(
            Spin::HALF,
            ScalarPotential::delta(1.0).unwrap(),
            vec![MatrixAtom { x: 0.0, weight: neg }],
            None,
            0.0,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn total_variation_counts_matrix_part_only() {
        let v = MatrixPotential::spin_dependent_delta(Spin::HALF, 2.0, 1.0).unwrap();
        assert!((v.total_variation() - 4.0).abs() < 1e-12);
        let s = MatrixPotential::from_scalar(Spin::HALF, ScalarPotential::delta(3.0).unwrap());
        assert_eq!(s.total_variation(), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"schema": "dilute1d/1", "R0": 0.1,
            "atoms": [{"x": -0.1, "weight": 4.0}, {"x": 0.1, "weight": 4.0}]}"#;
        let spec = PotentialSpec::from_json(text).unwrap();
        let v = spec.to_scalar().unwrap();
        assert_eq!(v.atoms().len(), 2);
        assert!(PotentialSpec::from_json(r#"{"R0": 0.1, "bogus": 1}"#).is_err());
        assert!(PotentialSpec::from_json(r#"{"schema": "other/2", "R0": 0.1}"#).is_err());

        let text = r#"{"R0": 0.0, "dim": 4, "matrix_part": {"atoms": [{"x": 0.0,
            "weight": [[4,0,0,0],[0,3,1,0],[0,1,3,0],[0,0,0,4]]}]}}"#;
        let m = PotentialSpec::from_json(text).unwrap().to_matrix().unwrap();
        assert_eq!(m.dim(), 4);
        assert!(PotentialSpec::from_json(text).unwrap().to_scalar().is_err());
    }
}
