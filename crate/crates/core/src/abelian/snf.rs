//! Smith normal form over the integers.
//!
//! Pivoting always picks the nonzero entry of least absolute value in the
//! remaining block, ties going to the lowest `(row, col)`, so the output is a
//! deterministic function of the input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// `u * a * v = s` with `u`, `v` unimodular and `s` diagonal.
///
/// `u_inv` and `v_inv` are tracked alongside so callers can lift along the
/// change of basis without inverting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    /// The `min(rows, cols)` diagonal entries of `s`; nonzero entries form a
    /// divisibility chain and precede the zeros.
    pub diag: Vec<BigInt>,
}

impl SnfDecomposition {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|d| !d.is_zero()).count()
    }
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_row_multiple(dst, src, c);
        self.u.add_row_multiple(dst, src, c);
        self.u_inv.add_col_multiple(src, dst, &-c);
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_col_multiple(dst, src, c);
        self.v.add_col_multiple(dst, src, c);
        self.v_inv.add_row_multiple(src, dst, &-c);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some(b) if self.a[b].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Work {
        a: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };

    'outer: for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = w.pivot(t) else {
                break 'outer;
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.a[(t, t)].clone();

            let mut clean = true;
            for i in t + 1..m {
                let q = w.a[(i, t)].div_floor(&p);
                w.add_row(i, t, &-q);
                clean &= w.a[(i, t)].is_zero();
            }
            for j in t + 1..n {
                let q = w.a[(t, j)].div_floor(&p);
                w.add_col(j, t, &-q);
                clean &= w.a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }

            // Divisibility: fold an offending row into the pivot row and retry.
            let offending = (t + 1..m)
                .find(|&i| (t + 1..n).any(|j| !w.a[(i, j)].is_multiple_of(&p)));
            match offending {
                Some(i) => w.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.a[(t, t)].is_negative() {
            w.negate_row(t);
        }
    }

    let diag = (0..m.min(n)).map(|i| w.a[(i, i)].clone()).collect();
    SnfDecomposition {
        s: w.a,
        u: w.u,
        v: w.v,
        u_inv: w.u_inv,
        v_inv: w.v_inv,
        diag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn m(rows: &[Vec<i64>], cols: usize) -> IntMatrix {
        IntMatrix::from_rows(rows, cols).unwrap()
    }

    fn check(a: &IntMatrix) -> SnfDecomposition {
        let d = smith_normal_form(a);
        assert_eq!(d.u.mul(a).unwrap().mul(&d.v).unwrap(), d.s);
        assert_eq!(d.u.mul(&d.u_inv).unwrap(), IntMatrix::identity(a.rows()));
        assert_eq!(d.v.mul(&d.v_inv).unwrap(), IntMatrix::identity(a.cols()));
        assert!(d.s.is_diagonal());
        d
    }

    #[test]
    fn identity_is_fixed() {
        let d = check(&IntMatrix::identity(2));
        assert_eq!(d.diag, vec![BigInt::one(), BigInt::one()]);
        assert_eq!(d.u, IntMatrix::identity(2));
        assert_eq!(d.v, IntMatrix::identity(2));
    }

    #[test]
    fn scalar_one_minus_n() {
        let d = check(&m(&[vec![1 - 5]], 1));
        assert_eq!(d.diag, vec![BigInt::from(4)]);
    }

    #[test]
    fn two_by_two() {
        // d1 = gcd(2,4,6,8) = 2, d1*d2 = |det| = 8
        let d = check(&m(&[vec![2, 4], vec![6, 8]], 2));
        assert_eq!(d.diag, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn empty_and_degenerate_shapes() {
        let d = check(&IntMatrix::zeros(0, 0));
        assert!(d.diag.is_empty());
        let d = check(&IntMatrix::zeros(3, 0));
        assert!(d.diag.is_empty());
        assert_eq!(d.u, IntMatrix::identity(3));
        let d = check(&IntMatrix::zeros(2, 3));
        assert_eq!(d.diag, vec![BigInt::zero(), BigInt::zero()]);
    }

    #[test]
    fn zeros_trail() {
        let d = check(&m(&[vec![0, 0, 0], vec![0, 6, 0], vec![0, 0, 4]], 3));
        assert_eq!(d.diag, vec![BigInt::from(2), BigInt::from(12), BigInt::zero()]);
    }

    #[test]
    fn deterministic() {
        let a = m(&[vec![3, -7, 2], vec![5, 1, 9]], 3);
        assert_eq!(smith_normal_form(&a), smith_normal_form(&a));
    }
}
