//! Fixed-size complex linear algebra for the 2x2 and 4x4 fluctuation problems.
//!
//! The matrices here are tiny and their sizes are known at compile time, so
//! everything works on stack arrays: closed-form inversion for 2x2, LU with
//! partial pivoting plus a refinement pass for 4x4, Faddeev-LeVerrier for
//! characteristic polynomials, and a shifted-QR iteration on the Hessenberg
//! form for eigenvalues.

use num_complex::Complex64;
use thiserror::Error;

/// Shorthand for the complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Errors from the dense-matrix routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    /// LU hit a zero pivot or the inverse failed the residual bound.
    #[error("matrix is singular or too ill-conditioned (residual {residual:.3e})")]
    Singular { residual: f64 },
    /// QR iteration did not deflate within the sweep budget.
    #[error("eigenvalue iteration failed to converge")]
    NoConverge,
}

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

pub fn identity<const N: usize>() -> [[C64; N]; N] {
    let mut m = [[ZERO; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn matmul<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut c = [[ZERO; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// Max absolute entry of `a*x - I`, the dimensionless inversion residual.
pub fn inversion_residual<const N: usize>(a: &[[C64; N]; N], x: &[[C64; N]; N]) -> f64 {
    let ax = matmul(a, x);
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((ax[i][j] - target).norm());
        }
    }
    worst
}

/// Result of an inversion together with the achieved residual.
#[derive(Debug, Clone, Copy)]
pub struct Inversion<const N: usize> {
    pub inv: [[C64; N]; N],
    pub residual: f64,
}

/// Invert a small complex matrix.
///
/// 2x2 goes through the adjugate; larger sizes use LU with partial pivoting.
/// One Newton refinement step `x <- x + x (I - a x)` is applied when the
/// first residual is above 1e-13, and the result is rejected if the final
/// residual exceeds `max_residual`.
pub fn inverse<const N: usize>(
    a: &[[C64; N]; N],
    max_residual: f64,
) -> Result<Inversion<N>, LinalgError> {
    let mut x = if N == 2 {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.norm() == 0.0 {
            return Err(LinalgError::Singular { residual: f64::INFINITY });
        }
        let mut x = [[ZERO; N]; N];
        x[0][0] = a[1][1] / det;
        x[0][1] = -a[0][1] / det;
        x[1][0] = -a[1][0] / det;
        x[1][1] = a[0][0] / det;
        x
    } else {
        lu_inverse(a)?
    };

    let mut residual = inversion_residual(a, &x);
    if residual > 1e-13 {
        // One Newton step: x (2I - a x).
        let ax = matmul(a, &x);
        let mut correction = [[ZERO; N]; N];
        for i in 0..N {
            for j in 0..N {
                correction[i][j] = -ax[i][j];
            }
            correction[i][i] += 2.0;
        }
        let refined = matmul(&x, &correction);
        let refined_residual = inversion_residual(a, &refined);
        if refined_residual < residual {
            x = refined;
            residual = refined_residual;
        }
    }
    if !residual.is_finite() || residual > max_residual {
        return Err(LinalgError::Singular { residual });
    }
    Ok(Inversion { inv: x, residual })
}

fn lu_inverse<const N: usize>(a: &[[C64; N]; N]) -> Result<[[C64; N]; N], LinalgError> {
    let mut lu = *a;
    let mut perm = [0usize; N];
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    for col in 0..N {
        let mut pivot = col;
        let mut best = lu[col][col].norm();
        for row in col + 1..N {
            let mag = lu[row][col].norm();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Err(LinalgError::Singular { residual: f64::INFINITY });
        }
        if pivot != col {
            lu.swap(pivot, col);
            perm.swap(pivot, col);
        }
        let diag = lu[col][col];
        for row in col + 1..N {
            let factor = lu[row][col] / diag;
            lu[row][col] = factor;
            for k in col + 1..N {
                let sub = factor * lu[col][k];
                lu[row][k] -= sub;
            }
        }
    }

    let mut inv = [[ZERO; N]; N];
    for rhs_col in 0..N {
        let mut y = [ZERO; N];
        for i in 0..N {
            let mut sum = if perm[i] == rhs_col { ONE } else { ZERO };
            for k in 0..i {
                sum -= lu[i][k] * y[k];
            }
            y[i] = sum;
        }
        for i in (0..N).rev() {
            let mut sum = y[i];
            for k in i + 1..N {
                sum -= lu[i][k] * inv[k][rhs_col];
            }
            inv[i][rhs_col] = sum / lu[i][i];
        }
    }
    Ok(inv)
}

/// Characteristic polynomial `det(lambda I - a)` via Faddeev-LeVerrier.
///
/// Returns `N + 1` coefficients in descending powers, leading coefficient 1.
pub fn char_poly<const N: usize>(a: &[[C64; N]; N]) -> Vec<C64> {
    let mut coeffs = vec![ONE];
    let mut m = *a;
    for k in 1..=N {
        let mut tr = ZERO;
        for (i, row) in m.iter().enumerate() {
            tr += row[i];
        }
        let c = -tr / (k as f64);
        coeffs.push(c);
        if k < N {
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += c;
            }
            m = matmul(a, &m);
        }
    }
    coeffs
}

/// Closed-form eigenvalues of a complex 2x2.
pub fn eigenvalues2(a: &[[C64; 2]; 2]) -> [C64; 2] {
    let half_trace = (a[0][0] + a[1][1]) * 0.5;
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = (half_trace * half_trace - det).sqrt();
    [half_trace - disc, half_trace + disc]
}

/// Eigenvalues of a small complex matrix by Hessenberg reduction and
/// explicitly shifted QR with Givens rotations.
pub fn eigenvalues<const N: usize>(a: &[[C64; N]; N]) -> Result<[C64; N], LinalgError> {
    if N == 2 {
        let m2 = [[a[0][0], a[0][1]], [a[1][0], a[1][1]]];
        let e = eigenvalues2(&m2);
        let mut out = [ZERO; N];
        out[0] = e[0];
        out[1] = e[1];
        return Ok(out);
    }
    let mut h = *a;
    hessenberg(&mut h);
    let mut eigs = [ZERO; N];
    let mut hi = N - 1;
    let mut sweeps_left = 100 * N;
    let mut stagnant = 0usize;
    loop {
        // Deflate converged subdiagonals in the active window.
        for i in 0..hi {
            let scale = h[i][i].norm() + h[i + 1][i + 1].norm();
            if h[i + 1][i].norm() <= f64::EPSILON * scale + f64::MIN_POSITIVE {
                h[i + 1][i] = ZERO;
            }
        }
        if hi == 0 {
            eigs[0] = h[0][0];
            return Ok(eigs);
        }
        if h[hi][hi - 1] == ZERO {
            eigs[hi] = h[hi][hi];
            hi -= 1;
            stagnant = 0;
            continue;
        }
        // Start of the unreduced block ending at hi.
        let mut lo = hi;
        while lo > 0 && h[lo][lo - 1] != ZERO {
            lo -= 1;
        }
        if hi - lo == 1 {
            let block = [[h[lo][lo], h[lo][hi]], [h[hi][lo], h[hi][hi]]];
            let e = eigenvalues2(&block);
            eigs[lo] = e[0];
            eigs[hi] = e[1];
            if lo == 0 {
                return Ok(eigs);
            }
            h[hi][hi - 1] = ZERO;
            h[lo][lo - 1] = ZERO;
            hi = lo - 1;
            stagnant = 0;
            continue;
        }
        if sweeps_left == 0 {
            return Err(LinalgError::NoConverge);
        }
        sweeps_left -= 1;
        let mut shift = wilkinson_shift(&h, hi);
        stagnant += 1;
        if stagnant > 20 {
            // Exceptional shift to break symmetric stalls.
            shift += C64::new(1.5, 0.0) * h[hi][hi - 1].norm();
            stagnant = 0;
        }
        qr_step(&mut h, lo, hi, shift);
    }
}

fn wilkinson_shift<const N: usize>(h: &[[C64; N]; N], hi: usize) -> C64 {
    let a = h[hi - 1][hi - 1];
    let b = h[hi - 1][hi];
    let c = h[hi][hi - 1];
    let d = h[hi][hi];
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let e1 = mid + disc;
    let e2 = mid - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// One explicit shifted QR step on the active window `lo..=hi` of a
/// Hessenberg matrix: `h - shift I = Q R`, then `h <- R Q + shift I`.
fn qr_step<const N: usize>(h: &mut [[C64; N]; N], lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[i][i] -= shift;
    }
    // Givens rotations (c real, s complex) zeroing each subdiagonal entry.
    let mut rotations = [(0.0f64, ZERO); N];
    for i in lo..hi {
        let f = h[i][i];
        let g = h[i + 1][i];
        let (c, s) = givens(f, g);
        rotations[i] = (c, s);
        for j in i..=hi.min(N - 1) {
            let top = h[i][j];
            let bottom = h[i + 1][j];
            h[i][j] = c * top + s * bottom;
            h[i + 1][j] = -s.conj() * top + c * bottom;
        }
    }
    // Right-multiply by Q = G_lo^H ... G_{hi-1}^H.
    for i in lo..hi {
        let (c, s) = rotations[i];
        for row in h.iter_mut().take(hi + 1).skip(lo) {
            let left = row[i];
            let right = row[i + 1];
            row[i] = c * left + s.conj() * right;
            row[i + 1] = -s * left + c * right;
        }
    }
    for i in lo..=hi {
        h[i][i] += shift;
    }
}

fn givens(f: C64, g: C64) -> (f64, C64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, ZERO);
    }
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let r = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / r;
    let s = (f / fn_) * g.conj() / r;
    (c, s)
}

fn hessenberg<const N: usize>(a: &mut [[C64; N]; N]) {
    if N < 3 {
        return;
    }
    for col in 0..N - 2 {
        // Householder vector for the column below the subdiagonal.
        let mut norm_sq = 0.0f64;
        for row in col + 1..N {
            norm_sq += a[row][col].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm <= f64::MIN_POSITIVE {
            continue;
        }
        let pivot = a[col + 1][col];
        let phase = if pivot.norm() == 0.0 { ONE } else { pivot / pivot.norm() };
        let mut v = [ZERO; N];
        for row in col + 1..N {
            v[row] = a[row][col];
        }
        v[col + 1] += phase * norm;
        let mut vsq = 0.0f64;
        for entry in v.iter().skip(col + 1) {
            vsq += entry.norm_sqr();
        }
        if vsq <= f64::MIN_POSITIVE {
            continue;
        }
        let beta = 2.0 / vsq;
        // A <- (I - beta v v^H) A
        for j in 0..N {
            let mut dot = ZERO;
            for row in col + 1..N {
                dot += v[row].conj() * a[row][j];
            }
            dot *= beta;
            for row in col + 1..N {
                let delta = v[row] * dot;
                a[row][j] -= delta;
            }
        }
        // A <- A (I - beta v v^H)
        for row_values in a.iter_mut() {
            let mut dot = ZERO;
            for kcol in col + 1..N {
                dot += row_values[kcol] * v[kcol];
            }
            dot *= beta;
            for kcol in col + 1..N {
                let delta = dot * v[kcol].conj();
                row_values[kcol] -= delta;
            }
        }
        for row in col + 2..N {
            a[row][col] = ZERO;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inverse_2x2_matches_adjugate() {
        let a = [[c(1.0, 2.0), c(-0.5, 0.0)], [c(0.0, 1.0), c(3.0, -1.0)]];
        let inv = inverse(&a, 1e-10).unwrap();
        assert!(inv.residual <= 1e-13);
        let prod = matmul(&a, &inv.inv);
        assert!((prod[0][0] - ONE).norm() < 1e-14);
        assert!((prod[1][0]).norm() < 1e-14);
    }

    #[test]
    fn inverse_4x4_residual_small() {
        let a = [
            [c(4.0, 1.0), c(1.0, 0.0), c(0.0, 2.0), c(0.3, 0.0)],
            [c(0.0, -1.0), c(3.0, 0.5), c(1.0, 0.0), c(0.0, 0.0)],
            [c(2.0, 0.0), c(0.0, 0.0), c(5.0, -2.0), c(1.0, 1.0)],
            [c(0.1, 0.1), c(1.0, -1.0), c(0.0, 0.0), c(2.0, 3.0)],
        ];
        let inv = inverse(&a, 1e-10).unwrap();
        assert!(inv.residual <= 1e-12, "residual {}", inv.residual);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = [[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(matches!(inverse(&a, 1e-10), Err(LinalgError::Singular { .. })));
    }

    #[test]
    fn char_poly_of_diagonal() {
        let a = [[c(1.0, 0.0), ZERO], [ZERO, c(2.0, 0.0)]];
        // (x-1)(x-2) = x^2 - 3x + 2
        let p = char_poly(&a);
        assert!((p[0] - ONE).norm() < 1e-15);
        assert!((p[1] - c(-3.0, 0.0)).norm() < 1e-14);
        assert!((p[2] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_triangular_4x4() {
        let a = [
            [c(1.0, 1.0), c(2.0, 0.0), c(0.5, 0.0), c(0.0, 1.0)],
            [ZERO, c(-2.0, 0.5), c(1.0, 0.0), c(0.0, 0.0)],
            [ZERO, ZERO, c(3.0, -1.0), c(0.2, 0.0)],
            [ZERO, ZERO, ZERO, c(0.5, 4.0)],
        ];
        let mut eigs = eigenvalues(&a).unwrap().to_vec();
        let mut expected = vec![c(1.0, 1.0), c(-2.0, 0.5), c(3.0, -1.0), c(0.5, 4.0)];
        let key = |z: &C64| (z.re, z.im);
        eigs.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        expected.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (got, want) in eigs.iter().zip(&expected) {
            assert!((got - want).norm() < 1e-10, "got {got} want {want}");
        }
    }

    #[test]
    fn eigenvalues_match_char_poly_roots_dense() {
        let a = [
            [c(0.3, 1.0), c(-1.0, 0.2), c(0.0, 2.0), c(0.4, 0.0)],
            [c(1.0, -1.0), c(2.0, 0.5), c(1.0, 0.0), c(0.0, 0.7)],
            [c(2.0, 0.3), c(0.0, 0.0), c(-1.0, -2.0), c(1.0, 1.0)],
            [c(0.1, 0.1), c(1.0, -1.0), c(0.5, 0.0), c(2.0, 3.0)],
        ];
        let eigs = eigenvalues(&a).unwrap();
        let p = char_poly(&a);
        for e in eigs {
            let mut val = ZERO;
            for coeff in &p {
                val = val * e + coeff;
            }
            assert!(val.norm() < 1e-9, "char poly residual {} at {}", val.norm(), e);
        }
    }
}
