//! Pfaffian of a real antisymmetric matrix by Parlett-Reid elimination.

use nalgebra::DMatrix;

/// Pfaffian via skew-symmetric Gaussian elimination with partial pivoting.
///
/// The input is assumed antisymmetric; only the strictly lower triangle
/// and its mirror are used implicitly through row/column updates.
pub fn pfaffian(matrix: &DMatrix<f64>) -> f64 {
    assert!(matrix.is_square(), "pfaffian of a non-square matrix");
    let n = matrix.nrows();
    if n == 0 {
        return 1.0;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut a = matrix.clone();
    let mut pf = 1.0;
    for k in (0..n - 1).step_by(2) {
        let mut kp = k + 1;
        let mut best = a[(k + 1, k)].abs();
        for i in k + 2..n {
            let v = a[(i, k)].abs();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)];
        if pivot == 0.0 {
            return 0.0;
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    pf
}

/// Pfaffian of the principal submatrix on `indices`, in the given order.
pub fn pfaffian_of_block(matrix: &DMatrix<f64>, indices: &[usize]) -> f64 {
    let m = indices.len();
    let block = DMatrix::from_fn(m, m, |i, j| matrix[(indices[i], indices[j])]);
    pfaffian(&block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Expansion along the first row; exponential, test-only.
    fn pfaffian_by_expansion(a: &DMatrix<f64>) -> f64 {
        let n = a.nrows();
        if n == 0 {
            return 1.0;
        }
        let mut total = 0.0;
        for j in 1..n {
            let rest: Vec<usize> = (1..n).filter(|&k| k != j).collect();
            let minor = DMatrix::from_fn(n - 2, n - 2, |p, q| a[(rest[p], rest[q])]);
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            total += sign * a[(0, j)] * pfaffian_by_expansion(&minor);
        }
        total
    }

    fn antisymmetric(n: usize, entries: &[f64]) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(n, n);
        let mut it = entries.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().unwrap();
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        a
    }

    #[test]
    fn two_by_two() {
        let a = antisymmetric(2, &[0.7]);
        assert_eq!(pfaffian(&a), 0.7);
    }

    #[test]
    fn canonical_blocks() {
        let mut a = DMatrix::zeros(6, 6);
        for (b, s) in [(0, 1.0), (2, -1.0), (4, 1.0)] {
            a[(b, b + 1)] = s;
            a[(b + 1, b)] = -s;
        }
        assert_eq!(pfaffian(&a), -1.0);
    }

    #[test]
    fn odd_and_singular() {
        assert_eq!(pfaffian(&DMatrix::zeros(3, 3)), 0.0);
        assert_eq!(pfaffian(&DMatrix::zeros(4, 4)), 0.0);
    }

    proptest! {
        #[test]
        fn matches_expansion(entries in proptest::collection::vec(-2.0f64..2.0, 15)) {
            let a = antisymmetric(6, &entries);
            let fast = pfaffian(&a);
            let slow = pfaffian_by_expansion(&a);
            prop_assert!((fast - slow).abs() <= 1e-10 * (1.0 + slow.abs()));
        }

        #[test]
        fn square_is_determinant(entries in proptest::collection::vec(-1.0f64..1.0, 28)) {
            let a = antisymmetric(8, &entries);
            let pf = pfaffian(&a);
            let det = a.clone().determinant();
            prop_assert!((pf * pf - det).abs() <= 1e-9 * (1.0 + det.abs()));
        }
    }
}
