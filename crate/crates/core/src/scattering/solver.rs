//! Zero-energy matrix ODE `-F'' + ½VF = 0` with Dirac atoms.
//!
//! The interval is cut at every atom, density node, hard-core edge and `±R₀`,
//! so the density is linear on each segment. Segments are integrated with
//! classical RK4 on `(F, F')`; density-free segments are propagated exactly
//! in a single affine step. Atoms act as derivative jumps `F' ← F' + ½WF`.

use nalgebra::DMatrix;

use super::potential::{MatrixDensity, MatrixPotential, ScalarPotential, Tabulated};
use super::ScatteringConfig;
use crate::error::{Error, Result};

/// Internal unified representation of a scalar or matrix measure.
#[derive(Debug, Clone)]
pub(crate) struct Measure {
    pub n: usize,
    /// Atom weights merged by position, sorted by `x`.
    pub atoms: Vec<(f64, DMatrix<f64>)>,
    scalar_density: Option<Tabulated>,
    matrix_density: Option<MatrixDensity>,
    pub hard_core: Option<f64>,
    pub r0: f64,
}

impl Measure {
    pub fn from_scalar(v: &ScalarPotential) -> Self {
        let atoms = v
            .atoms()
            .iter()
            .map(|a| (a.x, DMatrix::from_element(1, 1, a.weight)))
            .collect();
        Measure::assemble(
            1,
            atoms,
            v.density().cloned(),
            None,
            v.hard_core_radius(),
            v.support_radius(),
        )
    }

    pub fn from_matrix(v: &MatrixPotential) -> Self {
        let n = v.dim();
        let id = DMatrix::<f64>::identity(n, n);
        let mut atoms: Vec<(f64, DMatrix<f64>)> = v
            .scalar_part()
            .atoms()
            .iter()
            .map(|a| (a.x, &id * a.weight))
            .collect();
        atoms.extend(v.matrix_atoms().iter().map(|a| (a.x, a.weight.clone())));
        Measure::assemble(
            n,
            atoms,
            v.scalar_part().density().cloned(),
            v.matrix_density().cloned(),
            v.hard_core_radius(),
            v.support_radius(),
        )
    }

    fn assemble(
        n: usize,
        mut raw: Vec<(f64, DMatrix<f64>)>,
        scalar_density: Option<Tabulated>,
        matrix_density: Option<MatrixDensity>,
        hard_core: Option<f64>,
        r0: f64,
    ) -> Self {
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let tol = 1e-12 * r0.max(1.0);
        let mut atoms: Vec<(f64, DMatrix<f64>)> = Vec::new();
        for (x, w) in raw {
            match atoms.last_mut() {
                Some((lx, lw)) if (x - *lx).abs() <= tol => *lw += w,
                _ => atoms.push((x, w)),
            }
        }
        Measure {
            n,
            atoms,
            scalar_density,
            matrix_density,
            hard_core,
            r0,
        }
    }

    pub fn density_at(&self, x: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        if let Some(d) = &self.scalar_density {
            let v = d.eval(x);
            if v != 0.0 {
                for i in 0..self.n {
                    m[(i, i)] += v;
                }
            }
        }
        if let Some(d) = &self.matrix_density {
            if let Some(v) = d.eval(x) {
                m += v;
            }
        }
        m
    }

    fn density_nodes(&self) -> Vec<f64> {
        let mut nodes: Vec<f64> = self.scalar_density.iter().flat_map(|d| d.xs.clone()).collect();
        nodes.extend(self.matrix_density.iter().flat_map(|d| d.nodes().to_vec()));
        nodes
    }

    pub fn atom_at(&self, x: f64) -> Option<&DMatrix<f64>> {
        let tol = 1e-12 * self.r0.max(1.0);
        self.atoms
            .iter()
            .find(|(ax, _)| (ax - x).abs() <= tol)
            .map(|(_, w)| w)
    }

    fn min_atom_spacing(&self) -> Option<f64> {
        self.atoms
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .min_by(f64::total_cmp)
    }

    /// Cuts `[lo, hi]` into segments on which the density is linear.
    pub fn segments(&self, lo: f64, hi: f64) -> Vec<Segment> {
        let tol = 1e-13 * hi.abs().max(lo.abs()).max(1.0);
        let mut cuts = vec![lo, hi, -self.r0, self.r0];
        cuts.extend(self.atoms.iter().map(|a| a.0));
        cuts.extend(self.density_nodes());
        if let Some(a) = self.hard_core {
            cuts.push(-a);
            cuts.push(a);
        }
        cuts.retain(|&x| x >= lo - tol && x <= hi + tol);
        cuts.sort_by(f64::total_cmp);
        let mut points: Vec<f64> = Vec::with_capacity(cuts.len());
        for x in cuts {
            match points.last() {
                Some(&p) if x - p <= tol => {}
                _ => points.push(x),
            }
        }
        // snap ends exactly
        points[0] = lo;
        let last = points.len() - 1;
        points[last] = hi;
        if points.len() >= 2 && points[last] - points[last - 1] <= tol {
            points.remove(last - 1);
        }

        points
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let len = b - a;
                let q1 = self.density_at(a + 0.25 * len);
                let q3 = self.density_at(a + 0.75 * len);
                let density = if q1.amax() == 0.0 && q3.amax() == 0.0 {
                    None
                } else {
                    // exact one-sided end values of the linear piece
                    let v_lo = (&q1 * 3.0 - &q3) * 0.5;
                    let v_hi = (&q3 * 3.0 - &q1) * 0.5;
                    Some((v_lo, v_hi))
                };
                Segment { lo: a, hi: b, density }
            })
            .collect()
    }

    /// Largest RK4 step: `min(R / steps_per_radius·4, spacing / 4)`.
    fn max_step(&self, r: f64, cfg: &ScatteringConfig) -> f64 {
        let base = r / cfg.steps_per_radius as f64 * 4.0;
        let base = match self.min_atom_spacing() {
            Some(s) if s > 0.0 => base.min(s),
            _ => base,
        };
        base / 4.0
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Segment {
    pub lo: f64,
    pub hi: f64,
    /// Density at the two ends; `None` where it vanishes identically.
    pub density: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

impl Segment {
    fn density_at(&self, x: f64) -> Option<DMatrix<f64>> {
        self.density.as_ref().map(|(a, b)| {
            let t = (x - self.lo) / (self.hi - self.lo);
            a * (1.0 - t) + b * t
        })
    }

    fn density_slope(&self) -> Option<DMatrix<f64>> {
        self.density
            .as_ref()
            .map(|(a, b)| (b - a) / (self.hi - self.lo))
    }
}

/// The solution on one segment, sampled at its step points.
#[derive(Debug, Clone)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub(crate) density: Option<(DMatrix<f64>, DMatrix<f64>)>,
    pub xs: Vec<f64>,
    pub f: Vec<DMatrix<f64>>,
    pub g: Vec<DMatrix<f64>>,
}

impl Piece {
    fn segment(&self) -> Segment {
        Segment {
            lo: self.lo,
            hi: self.hi,
            density: self.density.clone(),
        }
    }

    /// Cubic Hermite interpolation of `(F, F')` inside the piece.
    fn eval(&self, x: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.xs.len();
        let k = match self.xs.partition_point(|&p| p <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let h = x1 - x0;
        let t = ((x - x0) / h).clamp(0.0, 1.0);
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let (f0, f1, g0, g1) = (&self.f[k], &self.f[k + 1], &self.g[k], &self.g[k + 1]);
        let f = f0 * h00 + g0 * (h10 * h) + f1 * h01 + g1 * (h11 * h);
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        let g = f0 * d00 + g0 * d10 + f1 * d01 + g1 * d11;
        (f, g)
    }
}

/// A tabulated solution `F(x)` on `[-R, R]`.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pieces: Vec<Piece>,
}

impl Tabulation {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn lo(&self) -> f64 {
        self.pieces[0].lo
    }

    pub fn hi(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].hi
    }

    fn piece_for(&self, x: f64) -> &Piece {
        let i = self.pieces.partition_point(|p| p.hi < x);
        &self.pieces[i.min(self.pieces.len() - 1)]
    }

    /// `(F(x), F'(x))`. At an atom the derivative from the right is returned.
    pub fn eval(&self, x: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let i = self.pieces.partition_point(|p| p.hi <= x);
        let p = &self.pieces[i.min(self.pieces.len() - 1)];
        p.eval(x)
    }

    pub fn value(&self, x: f64) -> DMatrix<f64> {
        self.piece_for(x).eval(x).0
    }

    pub fn derivative(&self, x: f64) -> DMatrix<f64> {
        self.eval(x).1
    }

    /// All stored nodes `(x, F, F')` in increasing order. Atom positions
    /// appear twice (before and after the jump).
    pub fn nodes(&self) -> impl Iterator<Item = (f64, &DMatrix<f64>, &DMatrix<f64>)> {
        self.pieces
            .iter()
            .flat_map(|p| p.xs.iter().zip(&p.f).zip(&p.g).map(|((x, f), g)| (*x, f, g)))
    }

    /// `∫ 2F'ᵀF' + FᵀVF` over the tabulated range, atoms summed exactly.
    ///
    /// Each step uses the end-corrected trapezoidal rule
    /// `h/2 (y₀+y₁) + h²/12 (y₀'-y₁')`, with `y'` computed from the ODE.
    pub(crate) fn energy(&self, measure: &Measure) -> DMatrix<f64> {
        let n = self.pieces[0].f[0].nrows();
        let m = self.pieces[0].f[0].ncols();
        let _ = n;
        let mut total = DMatrix::<f64>::zeros(m, m);
        for piece in &self.pieces {
            let seg = piece.segment();
            let slope = seg.density_slope();
            let integrand = |x: f64, f: &DMatrix<f64>, g: &DMatrix<f64>| {
                let kin = g.transpose() * g * 2.0;
                match seg.density_at(x) {
                    None => (kin, DMatrix::zeros(m, m)),
                    Some(v) => {
                        let vf = &v * f;
                        let vg = &v * g;
                        let y = kin + f.transpose() * &vf;
                        let mut dy = (f.transpose() * &vg + g.transpose() * &vf) * 2.0;
                        if let Some(s) = &slope {
                            dy += f.transpose() * s * f;
                        }
                        (y, dy)
                    }
                }
            };
            for k in 0..piece.xs.len() - 1 {
                let h = piece.xs[k + 1] - piece.xs[k];
                let (y0, d0) = integrand(piece.xs[k], &piece.f[k], &piece.g[k]);
                let (y1, d1) = integrand(piece.xs[k + 1], &piece.f[k + 1], &piece.g[k + 1]);
                total += (y0 + y1) * (0.5 * h) + (d0 - d1) * (h * h / 12.0);
            }
        }
        let (lo, hi) = (self.lo(), self.hi());
        for (x, w) in &measure.atoms {
            if *x <= lo || *x >= hi {
                continue;
            }
            if let Some(a) = measure.hard_core {
                if x.abs() <= a {
                    continue;
                }
            }
            let f = self.value(*x);
            total += f.transpose() * w * &f;
        }
        total
    }
}

struct State {
    f: DMatrix<f64>,
    g: DMatrix<f64>,
}

fn rk4_step(seg: &Segment, x: f64, h: f64, s: &mut State) {
    let half = |x: f64| seg.density_at(x).map(|v| v * 0.5);
    let (v0, vm, v1) = (half(x), half(x + 0.5 * h), half(x + h));
    let (Some(v0), Some(vm), Some(v1)) = (v0, vm, v1) else {
        s.f += &s.g * h;
        return;
    };
    let k1f = s.g.clone();
    let k1g = &v0 * &s.f;
    let k2f = &s.g + &k1g * (0.5 * h);
    let k2g = &vm * (&s.f + &k1f * (0.5 * h));
    let k3f = &s.g + &k2g * (0.5 * h);
    let k3g = &vm * (&s.f + &k2f * (0.5 * h));
    let k4f = &s.g + &k3g * h;
    let k4g = &v1 * (&s.f + &k3f * h);
    s.f += (k1f + k2f * 2.0 + k3f * 2.0 + k4f) * (h / 6.0);
    s.g += (k1g + k2g * 2.0 + k3g * 2.0 + k4g) * (h / 6.0);
}

/// Propagates `(F, F')` across the segments, applying atoms at interior cuts.
/// Returns the pieces when `record` is set.
fn propagate(
    measure: &Measure,
    segments: &[Segment],
    max_step: f64,
    state: &mut State,
    record: bool,
) -> Vec<Piece> {
    let mut pieces = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        if i > 0 {
            if let Some(w) = measure.atom_at(seg.lo) {
                state.g += w * &state.f * 0.5;
            }
        }
        let len = seg.hi - seg.lo;
        let steps = if seg.density.is_none() {
            1
        } else {
            (len / max_step).ceil().max(1.0) as usize
        };
        let h = len / steps as f64;
        let mut piece = Piece {
            lo: seg.lo,
            hi: seg.hi,
            density: seg.density.clone(),
            xs: Vec::new(),
            f: Vec::new(),
            g: Vec::new(),
        };
        if record {
            piece.xs.push(seg.lo);
            piece.f.push(state.f.clone());
            piece.g.push(state.g.clone());
        }
        for k in 0..steps {
            let x = seg.lo + h * k as f64;
            rk4_step(seg, x, h, state);
            if record {
                piece.xs.push(if k + 1 == steps { seg.hi } else { x + h });
                piece.f.push(state.f.clone());
                piece.g.push(state.g.clone());
            }
        }
        if record {
            pieces.push(piece);
        }
    }
    pieces
}

/// Raw two-point solution with `F(R) = I`, `F(-R) = U`.
pub(crate) struct RawSolution {
    pub table: Tabulation,
    /// `F'(R)`.
    pub slope: DMatrix<f64>,
    /// `max |F(R) - I|, |F(-R) - U|`.
    pub boundary_residual: f64,
}

pub(crate) fn solve_two_point(
    measure: &Measure,
    r: f64,
    left: &DMatrix<f64>,
    cfg: &ScatteringConfig,
) -> Result<RawSolution> {
    let n = measure.n;
    let id = DMatrix::<f64>::identity(n, n);
    let max_step = measure.max_step(r, cfg);

    let raw = match measure.hard_core {
        Some(a) => {
            // F = 0 on [-a, a]; solve on [a, R] from F(a) = 0, mirror by F(-x) = U F(x)
            let segs = measure.segments(a, r);
            let mut s = State {
                f: DMatrix::zeros(n, n),
                g: id.clone(),
            };
            propagate(measure, &segs, max_step, &mut s, false);
            let c = invert(&s.f, "hard-core fundamental solution")?;
            let mut s = State {
                f: DMatrix::zeros(n, n),
                g: c,
            };
            let right = propagate(measure, &segs, max_step, &mut s, true);
            let mut pieces: Vec<Piece> = right
                .iter()
                .rev()
                .map(|p| Piece {
                    lo: -p.hi,
                    hi: -p.lo,
                    density: p.density.as_ref().map(|(a, b)| (b.clone(), a.clone())),
                    xs: p.xs.iter().rev().map(|x| -x).collect(),
                    f: p.f.iter().rev().map(|f| left * f).collect(),
                    g: p.g.iter().rev().map(|g| -(left * g)).collect(),
                })
                .collect();
            pieces.push(Piece {
                lo: -a,
                hi: a,
                density: None,
                xs: vec![-a, a],
                f: vec![DMatrix::zeros(n, n), DMatrix::zeros(n, n)],
                g: vec![DMatrix::zeros(n, n), DMatrix::zeros(n, n)],
            });
            pieces.extend(right);
            pieces
        }
        None => {
            let segs = measure.segments(-r, r);
            // fundamental pair [Φ₁ | Φ₂] with Φ₁(-R)=I, Φ₁'(-R)=0, Φ₂(-R)=0, Φ₂'(-R)=I
            let mut f = DMatrix::<f64>::zeros(n, 2 * n);
            let mut g = DMatrix::<f64>::zeros(n, 2 * n);
            f.view_mut((0, 0), (n, n)).copy_from(&id);
            g.view_mut((0, n), (n, n)).copy_from(&id);
            let mut s = State { f, g };
            propagate(measure, &segs, max_step, &mut s, false);
            let phi1 = s.f.columns(0, n).into_owned();
            let phi2 = s.f.columns(n, n).into_owned();
            let phi2_inv = invert(&phi2, "fundamental solution Φ₂(R)")?;
            let c = phi2_inv * (&id - phi1 * left);
            let mut s = State {
                f: left.clone(),
                g: c,
            };
            propagate(measure, &segs, max_step, &mut s, true)
        }
    };

    let table = Tabulation { pieces: raw };
    let last = table.pieces.last().expect("at least one piece");
    let f_end = last.f.last().unwrap();
    let slope = last.g.last().unwrap().clone();
    let first = &table.pieces[0];
    let boundary_residual = (f_end - &id).amax().max((&first.f[0] - left).amax());
    if !slope.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical("scattering solution overflowed".into()));
    }
    Ok(RawSolution {
        table,
        slope,
        boundary_residual,
    })
}

fn invert(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    m.clone()
        .try_inverse()
        .filter(|inv| inv.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Numerical(format!("{what} is singular")))
}
