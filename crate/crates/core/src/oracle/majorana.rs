//! Real-space free-fermion route: Bogoliubov–de Gennes ground-state
//! correlation matrix, its exact unitary evolution, and spin correlators as
//! Pfaffians of Majorana contractions. Shares no code with the kernel path.
//!
//! Conventions: `A_l = c_l† + c_l`, `B_l = c_l† - c_l`, `σᶻ_l = A_l B_l`,
//! `σˣ_l σˣ_{l+n} = B_l A_{l+1} B_{l+1} ⋯ A_{l+n}`. Momentum `k` of the mode
//! sums corresponds to real-space momentum `π - k`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::pfaffian::real_pfaffian;
use crate::correlators::{argmax, clamp_variance, VarianceTriple};
use crate::error::Result;
use crate::spectrum::{QuenchSpec, Sector, ZeroMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Antiperiodic,
}

impl Boundary {
    fn sign(self) -> f64 {
        match self {
            Boundary::Periodic => 1.0,
            Boundary::Antiperiodic => -1.0,
        }
    }
}

/// Fermion boundary condition reproducing a momentum grid.
pub fn boundary_for(n: usize, sector: Sector) -> Boundary {
    match sector {
        Sector::Integer => Boundary::Antiperiodic,
        Sector::HalfInteger if n % 2 == 0 => Boundary::Antiperiodic,
        Sector::HalfInteger => Boundary::Periodic,
    }
}

/// `2N × 2N` BdG matrix in the basis `Ψ = (c, c†)`, with `H = ½ Ψ† h Ψ + const`.
pub fn bdg_matrix(n: usize, lambda: f64, bc: Boundary) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        let s = if j > i { 1.0 } else { bc.sign() };
        h[(i, i)] += 2.0;
        h[(n + i, n + i)] -= 2.0;
        for (a, b, v) in [(i, j, -lambda * s), (j, i, -lambda * s)] {
            h[(a, b)] += v;
            h[(n + a, n + b)] -= v;
        }
        // Pairing block D (antisymmetric) and -D below.
        h[(i, n + j)] += -lambda * s;
        h[(j, n + i)] += lambda * s;
        h[(n + i, j)] -= -lambda * s;
        h[(n + j, i)] -= lambda * s;
    }
    h
}

/// Momentum-zero-like modes that pair with themselves: real-space momentum
/// `π` (antiperiodic, odd N) or `0` (periodic).
fn unpaired_modes(n: usize, bc: Boundary) -> Vec<Vec<f64>> {
    let norm = 1.0 / (n as f64).sqrt();
    let mut out = Vec::new();
    let has_pi = match bc {
        Boundary::Antiperiodic => n % 2 == 1,
        Boundary::Periodic => n % 2 == 0,
    };
    if has_pi {
        out.push((0..n).map(|l| if l % 2 == 0 { norm } else { -norm }).collect());
    }
    if bc == Boundary::Periodic {
        out.push(vec![norm; n]);
    }
    out
}

/// `C = ⟨Ψ Ψ†⟩` of the ground state: the projector on positive BdG energies,
/// with exact zero modes half filled.
pub fn ground_correlation(n: usize, lambda: f64, bc: Boundary) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(bdg_matrix(n, lambda, bc));
    let dim = 2 * n;
    let mut c = DMatrix::zeros(dim, dim);
    for (idx, &e) in eig.eigenvalues.iter().enumerate() {
        let w = if e > 1e-10 {
            1.0
        } else if e.abs() <= 1e-10 {
            0.5
        } else {
            continue;
        };
        let v = eig.eigenvectors.column(idx);
        c += w * (v * v.transpose());
    }
    c
}

/// Majorana contractions `⟨X_i Y_j⟩` for `X, Y ∈ {A, B}`.
pub struct Contractions {
    pub aa: DMatrix<Complex64>,
    pub bb: DMatrix<Complex64>,
    pub ba: DMatrix<Complex64>,
    pub ab: DMatrix<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    A(usize),
    B(usize),
}

impl Contractions {
    pub fn from_correlation(c: &DMatrix<Complex64>) -> Self {
        let n = c.nrows() / 2;
        // ⟨c_i c_j†⟩, ⟨c_i c_j⟩, ⟨c_i† c_j†⟩, ⟨c_i† c_j⟩.
        let ccd = c.view((0, 0), (n, n)).into_owned();
        let cc = c.view((0, n), (n, n)).into_owned();
        let cdcd = c.view((n, 0), (n, n)).into_owned();
        let cdc = c.view((n, n), (n, n)).into_owned();
        Self {
            aa: &cdcd + &cdc + &ccd + &cc,
            bb: &cdcd - &cdc - &ccd + &cc,
            ba: &cdcd + &cdc - &ccd - &cc,
            ab: &cdcd - &cdc + &ccd - &cc,
        }
    }

    fn pair(&self, x: Op, y: Op) -> Complex64 {
        match (x, y) {
            (Op::A(i), Op::A(j)) => self.aa[(i, j)],
            (Op::B(i), Op::B(j)) => self.bb[(i, j)],
            (Op::B(i), Op::A(j)) => self.ba[(i, j)],
            (Op::A(i), Op::B(j)) => self.ab[(i, j)],
        }
    }

    /// Wick expectation of an ordered Majorana string.
    fn string(&self, ops: &[Op], only_ba: bool) -> (f64, bool) {
        let m = ops.len();
        let mut a = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i + 1..m {
                let keep = !only_ba || matches!((ops[i], ops[j]), (Op::B(_), Op::A(_)) | (Op::A(_), Op::B(_)));
                let v = if keep { self.pair(ops[i], ops[j]) } else { Complex64::new(0.0, 0.0) };
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        real_pfaffian(&a)
    }
}

fn xx_ops(n: usize) -> Vec<Op> {
    let mut ops = vec![Op::B(0)];
    for j in 1..n {
        ops.push(Op::A(j));
        ops.push(Op::B(j));
    }
    ops.push(Op::A(n));
    ops
}

fn yy_ops(n: usize) -> Vec<Op> {
    let mut ops = vec![Op::A(0)];
    for j in 1..n {
        ops.push(Op::A(j));
        ops.push(Op::B(j));
    }
    ops.push(Op::B(n));
    ops
}

/// Post-quench state in real space, ready to be evolved to any time.
pub struct MajoranaQuench {
    pub spec: QuenchSpec,
    pub boundary: Boundary,
    c0: DMatrix<Complex64>,
    h2: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl MajoranaQuench {
    pub fn new(spec: &QuenchSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n;
        let bc = boundary_for(n, spec.sector);
        let mut c = ground_correlation(n, spec.lambda1, bc);
        if spec.zero_mode == ZeroMode::Exclude {
            // A decoupled unpaired mode put in the maximally mixed state
            // contributes nothing to the contractions, matching its removal
            // from the mode sums.
            for u in unpaired_modes(n, bc) {
                let uv = nalgebra::DVector::from_vec(u);
                let occ = (uv.transpose() * c.view((n, n), (n, n)) * &uv)[(0, 0)];
                let outer = &uv * uv.transpose();
                for i in 0..n {
                    for j in 0..n {
                        c[(i, j)] += outer[(i, j)] * (occ - 0.5);
                        c[(n + i, n + j)] += outer[(i, j)] * (0.5 - occ);
                    }
                }
            }
        }
        let h2 = SymmetricEigen::new(bdg_matrix(n, spec.lambda2, bc));
        Ok(Self { spec: *spec, boundary: bc, c0: c.map(|x| Complex64::new(x, 0.0)), h2 })
    }

    /// `C(t) = U C U†`, `U = e^{-i h2 t}`.
    pub fn correlation(&self, t: f64) -> DMatrix<Complex64> {
        let v = self.h2.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let mut vp = v.clone();
        for (j, &e) in self.h2.eigenvalues.iter().enumerate() {
            let p = Complex64::new(0.0, -e * t).exp();
            for x in vp.column_mut(j).iter_mut() {
                *x *= p;
            }
        }
        let u = vp * v.transpose();
        &u * &self.c0 * u.adjoint()
    }

    pub fn contractions(&self, t: f64) -> Contractions {
        Contractions::from_correlation(&self.correlation(t))
    }
}

/// Everything the real-space route produces at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaCorrelators {
    pub t: f64,
    /// `(j, G_j)` read off `⟨B_j A_0⟩` and `⟨B_0 A_{-j}⟩`.
    pub kernel: Vec<(isize, f64)>,
    /// `⟨σˣ_0 σˣ_n⟩`, `n = 0..N-1` (full Wick expansion).
    pub xx: Vec<f64>,
    pub yy: Vec<f64>,
    pub zz: Vec<f64>,
    /// The same strings keeping only `⟨BA⟩`-type contractions.
    pub xx_ba: Vec<f64>,
    pub yy_ba: Vec<f64>,
    pub z: f64,
    /// Some Pfaffian needed the Householder recomputation.
    pub careful: bool,
}

impl MajoranaCorrelators {
    fn assemble(&self, xx: &[f64], yy: &[f64]) -> VarianceTriple {
        let n = self.xx.len();
        let nf = n as f64;
        let sum = |s: &[f64]| nf * s.iter().sum::<f64>();
        let vx = clamp_variance(sum(xx), n);
        let vy = clamp_variance(sum(yy), n);
        let vz = clamp_variance(sum(&self.zz) - nf * nf * self.z * self.z, n);
        VarianceTriple { t: self.t, vx, vy, vz, z_exp: nf * self.z, argmax: argmax(vx, vy, vz) }
    }

    /// Variances of the actual evolved state.
    pub fn variances(&self) -> VarianceTriple {
        self.assemble(&self.xx, &self.yy)
    }

    /// Variances from `⟨BA⟩` contractions alone, the quantity the Toeplitz
    /// route evaluates.
    pub fn variances_ba_only(&self) -> VarianceTriple {
        self.assemble(&self.xx_ba, &self.yy_ba)
    }
}

pub fn majorana_correlators(q: &MajoranaQuench, t: f64) -> MajoranaCorrelators {
    let n = q.spec.n;
    let c = q.contractions(t);
    let sign = |j: usize| if j % 2 == 0 { -1.0 } else { 1.0 };
    let mut kernel: Vec<(isize, f64)> = Vec::with_capacity(2 * n - 1);
    for j in (1..n).rev() {
        kernel.push((-(j as isize), sign(j) * c.ba[(0, j)].re));
    }
    for j in 0..n {
        kernel.push((j as isize, sign(j) * c.ba[(j, 0)].re));
    }
    let mut careful = false;
    let mut run = |ops: &[Op], only_ba: bool| {
        let (v, f) = c.string(ops, only_ba);
        careful |= f;
        v
    };
    let z_ops = [Op::A(0), Op::B(0)];
    let z = run(&z_ops, false);
    let (mut xx, mut yy, mut zz, mut xx_ba, mut yy_ba) = (vec![1.0], vec![1.0], vec![1.0], vec![1.0], vec![1.0]);
    for m in 1..n {
        xx.push(run(&xx_ops(m), false));
        yy.push(-run(&yy_ops(m), false));
        xx_ba.push(run(&xx_ops(m), true));
        yy_ba.push(-run(&yy_ops(m), true));
        zz.push(run(&[Op::A(0), Op::B(0), Op::A(m), Op::B(m)], false));
    }
    MajoranaCorrelators { t, kernel, xx, yy, zz, xx_ba, yy_ba, z, careful }
}
