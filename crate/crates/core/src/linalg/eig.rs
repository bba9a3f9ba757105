//! General (non-Hermitian) dense eigensolver: unitary Hessenberg reduction,
//! explicit single-shift QR with Wilkinson shifts, Schur-form back-substitution
//! for eigenvectors, and an eigenvector-basis condition number that flags
//! near-defective inputs. Matrices here are ≤16×16, so every sweep works on
//! full-size copies; clarity beats blocking at this scale.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// κ₁(V) above this marks the eigenvector basis as numerically unreliable
/// (the matrix is within roundoff of a defective one).
pub const DEFECTIVE_CONDITION_THRESHOLD: f64 = 1e8;

const EPS: f64 = f64::EPSILON;

/// Eigen-decomposition of a general complex matrix.
///
/// `eigenvalues[k]` pairs with column k of `eigenvectors`; entries are sorted
/// by (Re, Im). Columns have unit 2-norm. `eigvec_condition` is κ₁ of the
/// eigenvector matrix (∞ if numerically singular); `near_defective` is set
/// when it exceeds [`DEFECTIVE_CONDITION_THRESHOLD`], in which case
/// individual eigenvectors span an unreliable basis even though the
/// eigenvalues themselves remain meaningful.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: ComplexMatrix,
    pub eigvec_condition: f64,
    pub near_defective: bool,
}

/// Complex Givens rotation [[c, s], [−s̄, c]] with real c zeroing g in (f, g).
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if fn_ == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let h = fn_.hypot(gn);
    let phase = f / fn_;
    (fn_ / h, phase * g.conj() / h)
}

fn rot_rows(m: &mut ComplexMatrix, i: usize, c: f64, s: Complex64, col_from: usize) {
    for j in col_from..m.cols() {
        let a = m[(i, j)];
        let b = m[(i + 1, j)];
        m[(i, j)] = a * c + s * b;
        m[(i + 1, j)] = -s.conj() * a + b * c;
    }
}

/// Right-multiplies rows [0, row_to) by the adjoint rotation on columns (i, i+1).
fn rot_cols(m: &mut ComplexMatrix, i: usize, c: f64, s: Complex64, row_to: usize) {
    for r in 0..row_to {
        let a = m[(r, i)];
        let b = m[(r, i + 1)];
        m[(r, i)] = a * c + s.conj() * b;
        m[(r, i + 1)] = -s * a + b * c;
    }
}

/// Householder reduction to upper Hessenberg form; Q accumulates the
/// similarity so that Q·H·Q† reconstructs the input.
fn hessenberg(h: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut v: Vec<Complex64> = (0..m).map(|i| h[(k + 1 + i, k)]).collect();
        let norm_x = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        // Reflect x onto (phase of x₀)·‖x‖·e₁ with the sign that avoids cancellation.
        let phase = if v[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            v[0] / v[0].norm()
        };
        let alpha = -phase * norm_x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // H ← (I − 2vv†) H: rows k+1.. of every column.
        for j in 0..n {
            let mut w = Complex64::new(0.0, 0.0);
            for i in 0..m {
                w += v[i].conj() * h[(k + 1 + i, j)];
            }
            let w2 = w * 2.0;
            for i in 0..m {
                let sub = v[i] * w2;
                h[(k + 1 + i, j)] -= sub;
            }
        }
        // H ← H (I − 2vv†): columns k+1.. of every row; same for Q.
        for target in [&mut *h, &mut *q] {
            for r in 0..n {
                let mut w = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    w += target[(r, k + 1 + i)] * v[i];
                }
                let w2 = w * 2.0;
                for i in 0..m {
                    let sub = w2 * v[i].conj();
                    target[(r, k + 1 + i)] -= sub;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalue of the trailing 2×2 closest to the corner entry.
fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let mid = (a - d) * 0.5;
    let disc = (mid * mid + b * c).sqrt();
    let e1 = (a + d) * 0.5 + disc;
    let e2 = (a + d) * 0.5 - disc;
    if (e1 - d).norm() < (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// One explicit shifted QR sweep on the decoupled window [lo, hi], applied as
/// a similarity to the full H with the unitary accumulated into Q.
fn qr_sweep(h: &mut ComplexMatrix, q: &mut ComplexMatrix, lo: usize, hi: usize, mu: Complex64) {
    let n = h.rows();
    for i in lo..=hi {
        h[(i, i)] -= mu;
    }
    // Left rotations triangularize the window (and carry the similarity into
    // the columns right of it).
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
        rot_rows(h, i, c, s, i);
        h[(i + 1, i)] = Complex64::new(0.0, 0.0);
        rots.push((c, s));
    }
    // Right rotations restore Hessenberg form and finish the similarity;
    // rows above the window ride along (they see only the column action).
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let i = lo + idx;
        rot_cols(h, i, c, s, (i + 2).min(hi + 1));
        rot_cols(q, i, c, s, n);
    }
    for i in lo..=hi {
        h[(i, i)] += mu;
    }
}

/// Schur decomposition in place: H becomes upper triangular, Q unitary.
fn schur(h: &mut ComplexMatrix, q: &mut ComplexMatrix) -> Result<()> {
    let n = h.rows();
    if n < 2 {
        return Ok(());
    }
    let hnorm = h.norm_max().max(f64::MIN_POSITIVE);
    let max_iters = 40 * n;
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut block_iters = 0usize;
    while hi > 0 {
        // Active window start: first negligible subdiagonal below `hi`.
        let mut lo = hi;
        loop {
            if lo == 0 {
                break;
            }
            let sub = h[(lo, lo - 1)].norm();
            let mut tol = EPS * (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm());
            if tol == 0.0 {
                tol = EPS * hnorm;
            }
            if sub <= tol {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            block_iters = 0;
            continue;
        }
        total += 1;
        block_iters += 1;
        if total > max_iters {
            return Err(Error::NonConvergence { max_iters });
        }
        // Occasional magnitude-based shift breaks symmetric stalls.
        let mu = if block_iters.is_multiple_of(10) {
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(h, hi)
        };
        qr_sweep(h, q, lo, hi, mu);
    }
    Ok(())
}

/// Right eigenvectors of the triangular factor by back-substitution,
/// rotated back through Q. Degenerate diagonal differences are floored at
/// EPS·‖T‖ so defective inputs yield (flagged) collapsed vectors instead of NaN.
fn eigenvectors_from_schur(t: &ComplexMatrix, q: &ComplexMatrix) -> ComplexMatrix {
    let n = t.rows();
    let tnorm = t.norm_max().max(f64::MIN_POSITIVE);
    let mut v = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                acc -= t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < EPS * tnorm {
                d = Complex64::new(EPS * tnorm, 0.0);
            }
            y[i] = acc / d;
        }
        let full = q.mul_vec(&y);
        let norm = full.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            v[(i, k)] = full[i] / norm;
        }
    }
    v
}

/// Full eigen-decomposition of a general square complex matrix.
pub fn eig_general(m: &ComplexMatrix) -> Result<SpectrumResult> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.is_finite() {
        return Err(Error::InvalidState("non-finite entries in eigensolver input".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(SpectrumResult {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0, 0),
            eigvec_condition: 1.0,
            near_defective: false,
        });
    }
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);
    hessenberg(&mut h, &mut q);
    schur(&mut h, &mut q)?;
    let vectors = eigenvectors_from_schur(&h, &q);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (h[(a, a)], h[(b, b)]);
        la.re.total_cmp(&lb.re).then(la.im.total_cmp(&lb.im))
    });
    let eigenvalues: Vec<Complex64> = order.iter().map(|&k| h[(k, k)]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);

    let eigvec_condition = match eigenvectors.inverse()? {
        Some(inv) => eigenvectors.norm_one() * inv.norm_one(),
        None => f64::INFINITY,
    };
    let near_defective =
        !eigvec_condition.is_finite() || eigvec_condition > DEFECTIVE_CONDITION_THRESHOLD;
    Ok(SpectrumResult { eigenvalues, eigenvectors, eigvec_condition, near_defective })
}

#[cfg(test)]
mod tests {
    // Reference constants are frozen verbatim from an independent solver.
    #![allow(clippy::excessive_precision)]
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Full-rank 5×5 with well-separated eigenvalues (minimum gap ≈ 0.25),
    // exactly reproducible from integer arithmetic.
    fn fixture5() -> ComplexMatrix {
        ComplexMatrix::from_fn(5, 5, |j, k| {
            let re = ((7 * j + 3 * k + 1) % 11) as f64 / 11.0 - 0.4;
            let im = ((5 * j + k * k + 2) % 7) as f64 / 7.0 - 0.35;
            c(re, im)
        })
    }

    fn residual(m: &ComplexMatrix, r: &SpectrumResult) -> f64 {
        let n = m.rows();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let v = r.eigenvectors.column(k);
            let mv = m.mul_vec(&v);
            let err = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * r.eigenvalues[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(err);
        }
        worst
    }

    #[test]
    fn matches_reference_spectrum_of_fixed_matrix() {
        // Reference eigenvalues computed with an independent solver.
        let want = [
            c(-0.694_168_279_504_633_56, 0.080_915_283_644_949_779),
            c(-0.044_469_865_813_649_534, -0.979_729_069_538_876_62),
            c(0.221_343_693_881_152_91, 0.324_618_565_845_467_44),
            c(0.372_379_302_554_099_18, 0.127_884_337_609_454_95),
            c(0.690_369_694_337_576_67, 0.553_453_739_581_860_17),
        ];
        let r = eig_general(&fixture5()).unwrap();
        // Nearest-match comparison: ordering ties between solvers are not part
        // of the contract, values are.
        for w in want {
            let d = r.eigenvalues.iter().map(|l| (l - w).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-12, "eigenvalue {w} missed by {d}");
        }
        assert!(!r.near_defective);
    }

    #[test]
    fn eigenvalues_sorted_by_real_then_imaginary_part() {
        let r = eig_general(&fixture5()).unwrap();
        for w in r.eigenvalues.windows(2) {
            let ord = w[0].re < w[1].re || (w[0].re == w[1].re && w[0].im <= w[1].im);
            assert!(ord, "not sorted: {:?}", r.eigenvalues);
        }
    }

    #[test]
    fn residuals_below_tolerance_on_fixed_matrix() {
        let m = fixture5();
        let r = eig_general(&m).unwrap();
        let res = residual(&m, &r);
        assert!(res < 1e-12 * m.norm_one().max(1.0), "residual {res}");
    }

    #[test]
    fn diagonal_matrix_is_exact() {
        let mut d = ComplexMatrix::zeros(4, 4);
        let vals = [c(2.0, 1.0), c(-1.0, 0.0), c(0.5, -3.0), c(0.0, 0.25)];
        for (i, &v) in vals.iter().enumerate() {
            d[(i, i)] = v;
        }
        let r = eig_general(&d).unwrap();
        for v in vals {
            assert!(r.eigenvalues.iter().any(|l| (l - v).norm() < 1e-14));
        }
        assert!((r.eigvec_condition - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hermitian_input_gives_real_eigenvalues() {
        let a = fixture5();
        let h = a.add(&a.adjoint()).scale(c(0.5, 0.0));
        let r = eig_general(&h).unwrap();
        for l in &r.eigenvalues {
            assert!(l.im.abs() < 1e-12, "imaginary part {} on Hermitian input", l.im);
        }
        // Normal matrix: eigenvector basis is unitary up to roundoff.
        assert!(r.eigvec_condition < 100.0);
    }

    #[test]
    fn jordan_block_is_flagged_near_defective() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        let r = eig_general(&m).unwrap();
        assert!(r.near_defective);
        for l in r.eigenvalues {
            assert!((l - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn tiny_eigenvalue_splitting_drives_condition_up() {
        // [[1,1],[d,1]] has eigenvectors an angle ~√d apart.
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1e-18, 0.0), c(1.0, 0.0)],
        ]);
        let r = eig_general(&m).unwrap();
        assert!(r.near_defective, "condition {}", r.eigvec_condition);
        let m2 = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.01, 0.0), c(1.0, 0.0)],
        ]);
        let r2 = eig_general(&m2).unwrap();
        assert!(!r2.near_defective, "condition {}", r2.eigvec_condition);
    }

    #[test]
    fn rejects_non_square_input() {
        assert!(eig_general(&ComplexMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn one_by_one_matrix() {
        let mut m = ComplexMatrix::zeros(1, 1);
        m[(0, 0)] = c(3.0, -2.0);
        let r = eig_general(&m).unwrap();
        assert_eq!(r.eigenvalues, vec![c(3.0, -2.0)]);
    }

    fn seeded(n: usize, seed: u64, scale: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| {
            let h = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add((i * 17 + j * 3 + 1) as u64)
                .wrapping_mul(1442695040888963407);
            let re = ((h >> 11) % 4096) as f64 / 2048.0 - 1.0;
            let im = ((h >> 37) % 4096) as f64 / 2048.0 - 1.0;
            c(re * scale, im * scale)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn prop_residual_small(seed in 0u64..2000, n in 2usize..9) {
            let m = seeded(n, seed, 1.0);
            let r = eig_general(&m).unwrap();
            let res = residual(&m, &r);
            prop_assert!(res < 1e-9 * m.norm_one().max(1.0), "n={n} residual {res}");
        }

        #[test]
        fn prop_eigenvalue_sum_is_trace(seed in 0u64..2000, n in 2usize..9) {
            let m = seeded(n, seed, 1.0);
            let r = eig_general(&m).unwrap();
            let sum: Complex64 = r.eigenvalues.iter().sum();
            let err = (sum - m.trace()).norm();
            prop_assert!(err < 1e-10 * m.norm_one().max(1.0) * n as f64, "err {err}");
        }

        #[test]
        fn prop_similarity_preserves_spectrum(seed in 0u64..500) {
            // Compare spectra of M and S·M·S⁻¹ by one-sided nearest matching.
            let m = seeded(4, seed, 1.0);
            let s = seeded(4, seed.wrapping_add(99), 1.0).add(&ComplexMatrix::identity(4).scale(c(3.0, 0.0)));
            let s_inv = s.inverse().unwrap().unwrap();
            let m2 = s.mul(&m).mul(&s_inv);
            let r1 = eig_general(&m).unwrap();
            let r2 = eig_general(&m2).unwrap();
            for l in &r1.eigenvalues {
                let d = r2.eigenvalues.iter().map(|x| (x - l).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(d < 1e-7, "eigenvalue {l} moved by {d}");
            }
        }
    }
}
