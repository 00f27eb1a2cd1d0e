//! Per-momentum 2×2 Bogoliubov blocks `h_k = [[A, iB], [-iB, -A]]` acting on
//! the `{|0⟩, |k, -k⟩}` pair, diagonalized and evolved independently of the
//! closed-form angles.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::Result;
use crate::spectrum::{bogoliubov_ab, build_modes, check_coupling, QuenchSpec};

fn block(lambda: f64, k: f64) -> Matrix2<Complex64> {
    let (a, b) = bogoliubov_ab(lambda, k);
    let i = Complex64::i();
    Matrix2::new(Complex64::new(a, 0.0), i * b, -i * b, Complex64::new(-a, 0.0))
}

/// Lowest eigenvector of `h_k` from a numerical Hermitian eigendecomposition.
pub fn ground_vector(lambda: f64, k: f64) -> Vector2<Complex64> {
    let eig = block(lambda, k).symmetric_eigen();
    let i = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
    eig.eigenvectors.column(i).into_owned()
}

/// `2θ` of `g ∝ (sin θ, -i cos θ)`, independent of the global phase of `g`.
pub fn double_angle(g: &Vector2<Complex64>) -> f64 {
    let c = Complex64::i() * g[1];
    let s2 = 2.0 * (g[0] * c.conj()).re;
    let c2 = c.norm_sqr() - g[0].norm_sqr();
    s2.atan2(c2)
}

/// `(cos 2Φ_k, sin 2Φ_k)` per paired mode from numerically diagonalized blocks.
pub fn quench_angles(lambda1: f64, lambda2: f64, ks: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_coupling(lambda1)?;
    check_coupling(lambda2)?;
    Ok(ks
        .iter()
        .map(|&k| {
            let d = double_angle(&ground_vector(lambda2, k)) - double_angle(&ground_vector(lambda1, k));
            (d.cos(), d.sin())
        })
        .collect())
}

/// `|⟨ψ0| e^{-iH2 t} |ψ0⟩|` as a product of per-pair amplitudes.
pub fn loschmidt_echo(spec: &QuenchSpec, t: f64) -> Result<f64> {
    let ms = build_modes(spec)?;
    let mut le = 1.0;
    for m in ms.paired() {
        let g = ground_vector(spec.lambda1, m.k);
        let h = block(spec.lambda2, m.k);
        let (a, b) = bogoliubov_ab(spec.lambda2, m.k);
        let e = a.hypot(b);
        // e^{-iht} = cos(et) - i sin(et) h/e, since h² = e².
        let u = if e == 0.0 {
            Matrix2::identity()
        } else {
            Matrix2::identity() * Complex64::new((e * t).cos(), 0.0) - h * Complex64::new(0.0, (e * t).sin() / e)
        };
        le *= g.dotc(&(u * g)).norm();
    }
    Ok(le)
}
