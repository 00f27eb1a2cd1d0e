//! Pfaffians of complex antisymmetric matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Parlett–Reid elimination with partial pivoting.
pub fn pfaffian(a: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "Pfaffian of a non-square matrix");
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut a = a.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    for k in (0..n - 1).step_by(2) {
        let kp = (k + 1..n).fold(k + 1, |b, i| if a[(i, k)].norm() > a[(b, k)].norm() { i } else { b });
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        if piv.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| a[(k, j)] / piv).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    pf
}

/// Householder tridiagonalization; slower, used to re-check suspicious results.
pub fn pfaffian_householder(a: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut a = a.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    for k in (0..n - 1).step_by(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let sigma: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        let alpha;
        if sigma == 0.0 {
            alpha = x[0];
        } else {
            let norm_x = (x[0].norm_sqr() + sigma).sqrt();
            let phase = if x[0].norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
            let mut v = x.clone();
            v[0] += phase * norm_x;
            let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut v {
                *z /= vn;
            }
            alpha = -phase * norm_x;
            // A <- P A Pᵀ with P = I - 2 v v†: the block gains v wᵀ - w vᵀ, w = 2 A conj(v).
            let m = n - k - 1;
            let w: Vec<Complex64> = (0..m)
                .map(|i| (0..m).map(|j| a[(k + 1 + i, k + 1 + j)] * v[j].conj()).sum::<Complex64>() * 2.0)
                .collect();
            for i in 0..m {
                for j in 0..m {
                    a[(k + 1 + i, k + 1 + j)] += v[i] * w[j] - w[i] * v[j];
                }
            }
            // det P = -1.
            pf = -pf;
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = -alpha;
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
            a[(k, i)] = Complex64::new(0.0, 0.0);
        }
        pf *= a[(k, k + 1)];
    }
    pf
}

/// Pfaffian expected to be real. A large imaginary part triggers the
/// Householder recomputation; the flag reports that it happened.
pub fn real_pfaffian(a: &DMatrix<Complex64>) -> (f64, bool) {
    let p = pfaffian(a);
    if p.im.abs() <= 1e-8 * (1.0 + p.re.abs()) {
        return (p.re, false);
    }
    (pfaffian_householder(a).re, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skew(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut s = seed;
        let mut rnd = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let z = Complex64::new(rnd(), rnd());
                a[(i, j)] = z;
                a[(j, i)] = -z;
            }
        }
        a
    }

    #[test]
    fn two_by_two() {
        let mut a = DMatrix::zeros(2, 2);
        a[(0, 1)] = Complex64::new(0.3, 0.4);
        a[(1, 0)] = -a[(0, 1)];
        assert_eq!(pfaffian(&a), Complex64::new(0.3, 0.4));
        assert!((pfaffian_householder(&a) - Complex64::new(0.3, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn square_is_determinant_and_methods_agree() {
        for (n, seed) in [(4, 1), (6, 2), (10, 3), (16, 4)] {
            let a = skew(n, seed);
            let p = pfaffian(&a);
            let h = pfaffian_householder(&a);
            let d = a.clone().determinant();
            assert!((p * p - d).norm() < 1e-12 * (1.0 + d.norm()), "n = {n}");
            assert!((p - h).norm() < 1e-12 * (1.0 + p.norm()), "n = {n}: {p} vs {h}");
        }
    }
}
