//! Nearest-neighbour pair-coupling chains `h = (1/N) Σᵢ M^{i,i+1}`.
//!
//! States live in `(C^d)^{⊗N}` with site 0 as the most significant digit, so a
//! pair index `a·d + b` on bond `(i, j)` matches the pair basis of
//! [`crate::spin_algebra`]. The Hamiltonian is applied bond by bond and never
//! stored, except by the dense solver on small chains.

mod lanczos;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::digamma;
use crate::spin_algebra::{build_coupling, CouplingKind, PairCoupling, PairProjectors, Spin};

use lanczos::{lowest_eigenpair, LanczosOptions};

/// Largest dimension the dense solver accepts.
pub const DENSE_MAX_DIM: usize = 4096;
/// Default memory guard on `d^N`.
pub const DEFAULT_MAX_DIM: usize = 1 << 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChainSolver {
    Dense,
    Lanczos {
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default)]
        seed: u64,
    },
}

fn default_max_iter() -> usize {
    400
}

fn default_tol() -> f64 {
    1e-10
}

impl Default for ChainSolver {
    fn default() -> Self {
        ChainSolver::Lanczos {
            max_iter: default_max_iter(),
            tol: default_tol(),
            seed: 0,
        }
    }
}

impl ChainSolver {
    pub fn lanczos(seed: u64) -> Self {
        ChainSolver::Lanczos {
            max_iter: default_max_iter(),
            tol: default_tol(),
            seed,
        }
    }
}

/// JSON-facing chain description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinChainSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(rename = "J")]
    pub spin: Spin,
    #[serde(rename = "N")]
    pub sites: usize,
    #[serde(default = "default_bc")]
    pub bc: Boundary,
    pub coupling: CouplingKind,
    #[serde(default)]
    pub solver: ChainSolver,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    #[serde(default)]
    pub keep_vector: bool,
}

fn default_bc() -> Boundary {
    Boundary::Periodic
}

fn default_max_dim() -> usize {
    DEFAULT_MAX_DIM
}

impl SpinChainSpec {
    pub fn new(spin: Spin, sites: usize, bc: Boundary, coupling: CouplingKind) -> Self {
        SpinChainSpec {
            schema: None,
            spin,
            sites,
            bc,
            coupling,
            solver: ChainSolver::default(),
            max_dim: DEFAULT_MAX_DIM,
            keep_vector: false,
        }
    }

    pub fn with_solver(mut self, solver: ChainSolver) -> Self {
        self.solver = solver;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SpinChainSpec = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("chain spec: {e}")))?;
        crate::json::check_schema(spec.schema.as_deref())?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinChainResult {
    pub schema: &'static str,
    pub kind: &'static str,
    #[serde(rename = "J")]
    pub spin: Spin,
    #[serde(rename = "N")]
    pub sites: usize,
    pub bc: Boundary,
    pub dim: usize,
    pub solver: &'static str,
    /// Ground energy per site.
    pub epsilon: f64,
    /// `‖Hψ − Eψ‖/‖ψ‖` for the returned vector.
    pub residual: f64,
    pub iterations: usize,
    /// A ground vector; not unique when the ground space is degenerate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_vector: Option<Vec<f64>>,
}

/// Matrix-free chain operator.
#[derive(Debug, Clone)]
pub struct ChainOperator {
    d: usize,
    sites: usize,
    dim: usize,
    bonds: Vec<(usize, usize)>,
    /// Nonzeros of the pair matrix by column: `(row, value)`.
    columns: Vec<Vec<(usize, f64)>>,
}

impl ChainOperator {
    pub fn new(coupling: &DMatrix<f64>, d: usize, sites: usize, bc: Boundary) -> Result<Self> {
        if sites < 2 {
            return Err(Error::invalid("a chain needs at least 2 sites"));
        }
        if coupling.nrows() != d * d || coupling.ncols() != d * d {
            return Err(Error::invalid("coupling is not a d²×d² matrix"));
        }
        let dim = (d as u128)
            .checked_pow(sites as u32)
            .filter(|&n| n <= usize::MAX as u128)
            .ok_or(Error::DimensionTooLarge {
                dim: usize::MAX,
                cap: usize::MAX,
            })? as usize;
        let mut bonds: Vec<(usize, usize)> = (0..sites - 1).map(|i| (i, i + 1)).collect();
        if bc == Boundary::Periodic {
            bonds.push((sites - 1, 0));
        }
        let columns = (0..d * d)
            .map(|col| {
                (0..d * d)
                    .filter(|&row| coupling[(row, col)] != 0.0)
                    .map(|row| (row, coupling[(row, col)]))
                    .collect()
            })
            .collect();
        Ok(ChainOperator {
            d,
            sites,
            dim,
            bonds,
            columns,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn stride(&self, site: usize) -> usize {
        self.d.pow((self.sites - 1 - site) as u32)
    }

    fn apply_bond(&self, (i, j): (usize, usize), x: &[f64], y: &mut [f64]) {
        let d = self.d;
        let (si, sj) = (self.stride(i), self.stride(j));
        for base in 0..self.dim {
            if (base / si) % d != 0 || (base / sj) % d != 0 {
                continue;
            }
            for (col, entries) in self.columns.iter().enumerate() {
                let xv = x[base + (col / d) * si + (col % d) * sj];
                if xv == 0.0 {
                    continue;
                }
                for &(row, m) in entries {
                    y[base + (row / d) * si + (row % d) * sj] += m * xv;
                }
            }
        }
    }

    /// `y += h x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut acc = vec![0.0; self.dim];
        for &b in &self.bonds {
            self.apply_bond(b, x, &mut acc);
        }
        let scale = 1.0 / self.sites as f64;
        for (yi, ai) in y.iter_mut().zip(acc) {
            *yi += ai * scale;
        }
    }

    /// The full matrix; only for small chains.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.dim > DENSE_MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: self.dim,
                cap: DENSE_MAX_DIM,
            });
        }
        let mut h = DMatrix::zeros(self.dim, self.dim);
        let mut e = vec![0.0; self.dim];
        let mut col = vec![0.0; self.dim];
        for j in 0..self.dim {
            e[j] = 1.0;
            col.iter_mut().for_each(|v| *v = 0.0);
            self.apply(&e, &mut col);
            h.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        Ok(h)
    }

    /// Cyclic relabelling `site k → site k+1`.
    pub fn translate(&self, x: &[f64]) -> Vec<f64> {
        let d = self.d;
        let top = self.stride(0);
        let mut y = vec![0.0; self.dim];
        for (idx, v) in x.iter().enumerate() {
            // last digit moves to the front
            let last = idx % d;
            let shifted = idx / d + last * top;
            y[shifted] = *v;
        }
        y
    }
}

pub fn coupling_for(spec: &SpinChainSpec) -> Result<PairCoupling> {
    build_coupling(spec.coupling.clone(), &PairProjectors::new(spec.spin))
}

/// Minimal eigenvalue of `h` per site.
pub fn ground_energy_per_site(spec: &SpinChainSpec) -> Result<SpinChainResult> {
    crate::json::check_schema(spec.schema.as_deref())?;
    let coupling = coupling_for(spec)?;
    let op = ChainOperator::new(&coupling.matrix, spec.spin.local_dim(), spec.sites, spec.bc)?;
    if op.dim() > spec.max_dim {
        return Err(Error::DimensionTooLarge {
            dim: op.dim(),
            cap: spec.max_dim,
        });
    }
    let apply = |x: &[f64], y: &mut [f64]| op.apply(x, y);
    let (solver, epsilon, vector, residual, iterations) = match &spec.solver {
        ChainSolver::Dense => {
            let h = op.to_dense()?;
            let eig = SymmetricEigen::new(h);
            let (k, &e) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("non-empty");
            let v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            let residual = lanczos::residual_norm(&apply, e, &v);
            ("dense", e, v, residual, 1)
        }
        ChainSolver::Lanczos {
            max_iter,
            tol,
            seed,
        } => {
            let opts = LanczosOptions {
                max_iter: *max_iter,
                tol: *tol,
                seed: *seed,
            };
            let pair = lowest_eigenpair(&apply, op.dim(), &opts)?;
            ("lanczos", pair.value, pair.vector, pair.residual, pair.iterations)
        }
    };
    Ok(SpinChainResult {
        schema: crate::SCHEMA,
        kind: "chain",
        spin: spec.spin,
        sites: spec.sites,
        bc: spec.bc,
        dim: op.dim(),
        solver,
        epsilon,
        residual,
        iterations,
        ground_vector: spec.keep_vector.then_some(vector),
    })
}

/// `1 − (ψ(1) − ψ(1/(2J+1)))/(2J+1)`, the infinite Lai–Sutherland chain.
pub fn thermodynamic_energy_per_site(spin: Spin) -> f64 {
    let n = spin.local_dim() as f64;
    1.0 - (digamma(1.0) - digamma(1.0 / n)) / n
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichRow {
    #[serde(rename = "N")]
    pub sites: usize,
    pub epsilon: f64,
    pub lower: f64,
    pub upper: f64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    #[serde(rename = "J")]
    pub spin: Spin,
    pub epsilon_infinity: f64,
    pub rows: Vec<SandwichRow>,
}

impl SandwichReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Periodic Lai–Sutherland energies against `ε∞ ± 1/N`.
pub fn finite_size_sandwich(
    spin: Spin,
    sizes: &[usize],
    solver: &ChainSolver,
) -> Result<SandwichReport> {
    let eps_inf = thermodynamic_energy_per_site(spin);
    let rows = sizes
        .iter()
        .map(|&n| {
            let spec = SpinChainSpec::new(spin, n, Boundary::Periodic, CouplingKind::LaiSutherland)
                .with_solver(solver.clone());
            let res = ground_energy_per_site(&spec)?;
            let (lower, upper) = (eps_inf - 1.0 / n as f64, eps_inf + 1.0 / n as f64);
            Ok(SandwichRow {
                sites: n,
                epsilon: res.epsilon,
                lower,
                upper,
                residual: res.residual,
                pass: lower <= res.epsilon && res.epsilon <= upper,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SandwichReport {
        spin,
        epsilon_infinity: eps_inf,
        rows,
    })
}

/// Ground energy per site of the periodic spin-1/2 LLH chain.
pub fn llh_chain_energy(c: f64, c_prime: f64, sites: usize, solver: &ChainSolver) -> Result<f64> {
    let spec = SpinChainSpec::new(
        Spin::HALF,
        sites,
        Boundary::Periodic,
        CouplingKind::Llh { c, c_prime },
    )
    .with_solver(solver.clone());
    Ok(ground_energy_per_site(&spec)?.epsilon)
}

/// Infinite-chain LLH energy. Since `h_LLH = −2/c′ + (2/c′ − 2/c)·h_LS`, it is
/// `−2(ln2/c′ + (1−ln2)/c)` for `c ≥ c′`; for `c < c′` the slope is negative
/// and the minimum sits at the top of the spectrum of `h_LS`, giving `−2/c`.
pub fn llh_thermodynamic_energy(c: f64, c_prime: f64) -> f64 {
    let slope = 2.0 / c_prime - 2.0 / c;
    let eps_ls = if slope >= 0.0 {
        thermodynamic_energy_per_site(Spin::HALF)
    } else {
        1.0
    };
    -2.0 / c_prime + slope * eps_ls
}

#[cfg(test)]
mod tests;
