//! Two-particle spin algebra for spin-J particles.
//!
//! All pair operators act on `C^d ⊗ C^d` with `d = 2J + 1`, in the
//! lexicographic product basis: `|a⟩ ⊗ |b⟩` has index `a * d + b`, where
//! local index `0` is `m = J` and `d - 1` is `m = -J`. Every module that
//! builds pair matrices uses this order.
//!
//! The operators here are all real, so matrices are real symmetric.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A spin quantum number `J ∈ {1/2, 1, 3/2, …}`, stored as `2J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    two_j: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { two_j: 1 };
    pub const ONE: Spin = Spin { two_j: 2 };

    pub fn from_twice(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::invalid("spin J must be positive"));
        }
        Ok(Spin { two_j })
    }

    /// Parses a half-integer `J`, e.g. `0.5`, `1.0`, `1.5`.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice < 0.5 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "spin J = {j} is not a positive half-integer"
            )));
        }
        Spin::from_twice(twice.round() as u32)
    }

    pub fn twice(self) -> u32 {
        self.two_j
    }

    pub fn value(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Local dimension `d = 2J + 1`.
    pub fn local_dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// Pair dimension `d²`.
    pub fn pair_dim(self) -> usize {
        self.local_dim() * self.local_dim()
    }

    /// Recovers the spin from a pair dimension `d²`.
    pub fn from_pair_dim(dim: usize) -> Result<Self> {
        let d = (dim as f64).sqrt().round() as usize;
        if d < 2 || d * d != dim {
            return Err(Error::invalid(format!(
                "pair dimension {dim} is not d² with d ≥ 2"
            )));
        }
        Spin::from_twice(d as u32 - 1)
    }
}

impl Serialize for Spin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = f64::deserialize(d)?;
        Spin::new(j).map_err(serde::de::Error::custom)
    }
}

/// Single-site spin operators `(S_z, S_+, S_-)`.
pub fn local_spin_operators(spin: Spin) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let d = spin.local_dim();
    let j = spin.value();
    let mut sz = DMatrix::zeros(d, d);
    let mut sp = DMatrix::zeros(d, d);
    for i in 0..d {
        let m = j - i as f64;
        sz[(i, i)] = m;
        // S+ |m⟩ = sqrt(J(J+1) - m(m+1)) |m+1⟩, and |m+1⟩ has index i-1
        if i > 0 {
            sp[(i - 1, i)] = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        }
    }
    let sm = sp.transpose();
    (sz, sp, sm)
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// The pair swap `|a⟩⊗|b⟩ ↦ |b⟩⊗|a⟩`.
pub fn swap_operator(d: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            s[(b * d + a, a * d + b)] = 1.0;
        }
    }
    s
}

/// `S₁·S₂ = S_z⊗S_z + (S₊⊗S₋ + S₋⊗S₊)/2`.
pub fn spin_dot(spin: Spin) -> DMatrix<f64> {
    let (sz, sp, sm) = local_spin_operators(spin);
    kron(&sz, &sz) + (kron(&sp, &sm) + kron(&sm, &sp)) * 0.5
}

/// Total pair spin squared `(S₁ + S₂)²`.
pub fn total_spin_squared(spin: Spin) -> DMatrix<f64> {
    let d = spin.local_dim();
    let j = spin.value();
    let id = DMatrix::<f64>::identity(d * d, d * d);
    id * (2.0 * j * (j + 1.0)) + spin_dot(spin) * 2.0
}

/// Global rotation `u = exp(-iθS_y)` on one site. Real orthogonal.
pub fn rotation(spin: Spin, theta: f64) -> DMatrix<f64> {
    let (_, sp, sm) = local_spin_operators(spin);
    let generator = (sp - sm) * (-0.5 * theta);
    generator.exp()
}

/// Swap and the symmetric/antisymmetric pair projectors for one spin.
#[derive(Debug, Clone)]
pub struct PairProjectors {
    spin: Spin,
    swap: DMatrix<f64>,
    sym: DMatrix<f64>,
    antisym: DMatrix<f64>,
}

impl PairProjectors {
    /// `P_S = (I + SWAP)/2`, `P_A = (I - SWAP)/2`.
    pub fn new(spin: Spin) -> Self {
        let d = spin.local_dim();
        let swap = swap_operator(d);
        let id = DMatrix::<f64>::identity(d * d, d * d);
        let sym = (&id + &swap) * 0.5;
        let antisym = (&id - &swap) * 0.5;
        PairProjectors {
            spin,
            swap,
            sym,
            antisym,
        }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn local_dim(&self) -> usize {
        self.spin.local_dim()
    }

    pub fn pair_dim(&self) -> usize {
        self.spin.pair_dim()
    }

    pub fn swap(&self) -> &DMatrix<f64> {
        &self.swap
    }

    /// `P_S`, projection onto `C^d ∨ C^d`.
    pub fn symmetric(&self) -> &DMatrix<f64> {
        &self.sym
    }

    /// `P_A`, projection onto `C^d ∧ C^d`.
    pub fn antisymmetric(&self) -> &DMatrix<f64> {
        &self.antisym
    }

    pub fn identity(&self) -> DMatrix<f64> {
        DMatrix::identity(self.pair_dim(), self.pair_dim())
    }

    /// `a_e P_A + a_o P_S`, the scattering length matrix of a scalar potential.
    pub fn block_matrix(&self, antisym_value: f64, sym_value: f64) -> DMatrix<f64> {
        &self.antisym * antisym_value + &self.sym * sym_value
    }

    /// `‖[M, SWAP]‖_max`, zero iff `M` leaves both spin blocks invariant.
    pub fn commutator_residual(&self, m: &DMatrix<f64>) -> f64 {
        (m * &self.swap - &self.swap * m).amax()
    }
}

/// Which nearest-neighbour coupling a chain uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingKind {
    /// `P_S`; the Heisenberg antiferromagnet (shifted) at spin 1/2.
    LaiSutherland,
    /// `-(2/c′) P_A - (2/c) P_S`.
    Llh { c: f64, c_prime: f64 },
    /// An arbitrary real symmetric pair matrix, row-major rows.
    Matrix { matrix: Vec<Vec<f64>> },
}

impl CouplingKind {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let rows = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect();
        CouplingKind::Matrix { matrix: rows }
    }
}

/// A realised pair coupling matrix on `C^d ⊗ C^d`.
#[derive(Debug, Clone)]
pub struct PairCoupling {
    pub kind: CouplingKind,
    pub matrix: DMatrix<f64>,
}

pub(crate) fn symmetry_residual(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

pub(crate) fn rows_to_matrix(rows: &[Vec<f64>], dim: usize) -> Result<DMatrix<f64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::invalid(format!("expected a {dim}×{dim} matrix")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix entries must be finite"));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

pub fn build_coupling(kind: CouplingKind, projectors: &PairProjectors) -> Result<PairCoupling> {
    let matrix = match &kind {
        CouplingKind::LaiSutherland => projectors.symmetric().clone(),
        CouplingKind::Llh { c, c_prime } => {
            if !(*c > 0.0 && *c_prime > 0.0) || !c.is_finite() || !c_prime.is_finite() {
                return Err(Error::invalid(format!(
                    "LLH couplings must be positive and finite, got c = {c}, c′ = {c_prime}"
                )));
            }
            projectors.block_matrix(-2.0 / c_prime, -2.0 / c)
        }
        CouplingKind::Matrix { matrix } => {
            let m = rows_to_matrix(matrix, projectors.pair_dim())?;
            let scale = m.amax().max(1.0);
            if symmetry_residual(&m) > 1e-12 * scale {
                return Err(Error::invalid("coupling matrix is not Hermitian"));
            }
            m
        }
    };
    Ok(PairCoupling { kind, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    fn rank_of_projector(p: &DMatrix<f64>) -> usize {
        p.trace().round() as usize
    }

    fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn all_spins() -> Vec<Spin> {
        (1..=5).map(|t| Spin::from_twice(t).unwrap()).collect()
    }

    #[test]
    fn spin_parsing() {
        assert_eq!(Spin::new(0.5).unwrap().local_dim(), 2);
        assert_eq!(Spin::new(2.5).unwrap().local_dim(), 6);
        assert!(Spin::new(0.0).is_err());
        assert!(Spin::new(-0.5).is_err());
        assert!(Spin::new(0.3).is_err());
        assert_eq!(Spin::from_pair_dim(9).unwrap(), Spin::ONE);
        assert!(Spin::from_pair_dim(8).is_err());
    }

    #[test]
    fn projector_identities() {
        for spin in all_spins() {
            let p = PairProjectors::new(spin);
            let id = p.identity();
            let (ps, pa, sw) = (p.symmetric(), p.antisymmetric(), p.swap());
            assert!((ps * ps - ps).amax() < 1e-12);
            assert!((pa * pa - pa).amax() < 1e-12);
            assert!((ps + pa - &id).amax() < 1e-12);
            assert!((ps * pa).amax() < 1e-12);
            assert!((sw * sw - &id).amax() < 1e-12);
            assert!(p.commutator_residual(ps) < 1e-12);
            let d = spin.local_dim();
            assert_eq!(rank_of_projector(ps), d * (d + 1) / 2);
            assert_eq!(rank_of_projector(pa), d * (d - 1) / 2);
        }
    }

    #[test]
    fn spin_half_ranks() {
        let p = PairProjectors::new(Spin::HALF);
        assert_eq!(rank_of_projector(p.antisymmetric()), 1);
        assert_eq!(rank_of_projector(p.symmetric()), 3);
        let p = PairProjectors::new(Spin::ONE);
        assert_eq!(rank_of_projector(p.symmetric()), 6);
        assert_eq!(rank_of_projector(p.antisymmetric()), 3);
    }

    #[test]
    fn swap_acts_on_product_basis() {
        let d = 3;
        let s = swap_operator(d);
        for a in 0..d {
            for b in 0..d {
                let mut v = nalgebra::DVector::zeros(d * d);
                v[a * d + b] = 1.0;
                let w = &s * v;
                assert_eq!(w[b * d + a], 1.0);
            }
        }
    }

    #[test]
    fn spin_half_symmetric_projector_is_heisenberg_bond() {
        // 2 P_S = (S₁ + S₂)² = 3/2 + 2 S₁·S₂
        let p = PairProjectors::new(Spin::HALF);
        let lhs = p.symmetric() * 2.0;
        let rhs = p.identity() * 1.5 + spin_dot(Spin::HALF) * 2.0;
        assert!((lhs - rhs).amax() < 1e-12);
    }

    #[test]
    fn symmetric_projector_on_total_spin_sectors() {
        // P_S is the identity on total spin S iff 2J - S is even, else zero.
        for spin in all_spins() {
            let p = PairProjectors::new(spin);
            let s2 = total_spin_squared(spin);
            let eig = SymmetricEigen::new(s2);
            let two_j = spin.twice();
            for total in 0..=two_j {
                let s = total as f64;
                let target = s * (s + 1.0);
                let n = p.pair_dim();
                let mut proj = DMatrix::<f64>::zeros(n, n);
                for (k, &lam) in eig.eigenvalues.iter().enumerate() {
                    if (lam - target).abs() < 1e-8 {
                        let v = eig.eigenvectors.column(k);
                        proj += v * v.transpose();
                    }
                }
                assert_eq!(proj.trace().round() as u32, 2 * total + 1);
                let restricted = p.symmetric() * &proj;
                if (two_j - total) % 2 == 0 {
                    assert!((restricted - &proj).amax() < 1e-10);
                } else {
                    assert!(restricted.amax() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn coupling_examples() {
        let p = PairProjectors::new(Spin::HALF);
        let ls = build_coupling(CouplingKind::LaiSutherland, &p).unwrap();
        assert_eq!(ls.matrix, *p.symmetric());
        let ev = sorted_eigenvalues(&ls.matrix);
        assert!((ev[0]).abs() < 1e-12 && ev[1..].iter().all(|e| (e - 1.0).abs() < 1e-12));

        let llh = build_coupling(CouplingKind::Llh { c: 2.0, c_prime: 1.0 }, &p).unwrap();
        let ev = sorted_eigenvalues(&llh.matrix);
        assert!((ev[0] + 2.0).abs() < 1e-12);
        assert!(ev[1..].iter().all(|e| (e + 1.0).abs() < 1e-12));
        // singlet carries the -2/c′ value
        let singlet = p.antisymmetric();
        assert!((&llh.matrix * singlet + singlet * 2.0).amax() < 1e-12);

        let a = p.block_matrix(-0.5, 0.2);
        let m = build_coupling(CouplingKind::from_matrix(&a), &p).unwrap();
        let ev = sorted_eigenvalues(&m.matrix);
        assert!((ev[0] + 0.5).abs() < 1e-12);
        assert!(ev[1..].iter().all(|e| (e - 0.2).abs() < 1e-12));

        let equal = build_coupling(CouplingKind::from_matrix(&p.block_matrix(0.3, 0.3)), &p).unwrap();
        assert!((equal.matrix - p.identity() * 0.3).amax() < 1e-12);
    }

    #[test]
    fn coupling_errors() {
        let p = PairProjectors::new(Spin::HALF);
        assert!(build_coupling(CouplingKind::Llh { c: 0.0, c_prime: 1.0 }, &p).is_err());
        assert!(build_coupling(CouplingKind::Llh { c: 1.0, c_prime: -1.0 }, &p).is_err());
        let mut m = p.identity();
        m[(0, 1)] = 0.5;
        assert!(build_coupling(CouplingKind::from_matrix(&m), &p).is_err());
        let wrong_size = DMatrix::<f64>::identity(3, 3);
        assert!(build_coupling(CouplingKind::from_matrix(&wrong_size), &p).is_err());
    }

    #[test]
    fn matrix_coupling_is_linear() {
        let p = PairProjectors::new(Spin::ONE);
        let m1 = p.block_matrix(0.7, -0.1) + p.swap() * 0.05;
        let m2 = spin_dot(Spin::ONE);
        let (x, y) = (1.7, -0.4);
        let c1 = build_coupling(CouplingKind::from_matrix(&m1), &p).unwrap();
        let c2 = build_coupling(CouplingKind::from_matrix(&m2), &p).unwrap();
        let combo = build_coupling(CouplingKind::from_matrix(&(&m1 * x + &m2 * y)), &p).unwrap();
        assert!((combo.matrix - (c1.matrix * x + c2.matrix * y)).amax() < 1e-12);
    }

    #[test]
    fn rotation_commutes_with_projectors() {
        for spin in all_spins() {
            let u = rotation(spin, 0.73);
            let d = spin.local_dim();
            assert!((u.transpose() * &u - DMatrix::<f64>::identity(d, d)).amax() < 1e-12);
            let uu = kron(&u, &u);
            let p = PairProjectors::new(spin);
            let conj = &uu * p.symmetric() * uu.transpose();
            assert!((conj - p.symmetric()).amax() < 1e-12);
        }
    }
}
