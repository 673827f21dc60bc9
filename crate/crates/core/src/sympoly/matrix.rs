use num_bigint::BigInt;

use super::{poly, SparsePoly, SymPolyError};

/// A 3×3 matrix of polynomials, indexed from 1 in the public API.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix3 {
    pub entries: [[SparsePoly; 3]; 3],
}

impl PolyMatrix3 {
    pub fn identity() -> Self {
        let one = SparsePoly::one;
        let z = SparsePoly::zero;
        Self {
            entries: [[one(), z(), z()], [z(), one(), z()], [z(), z(), one()]],
        }
    }

    /// Entry at 1-based `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> Result<&SparsePoly, SymPolyError> {
        check(i, j)?;
        Ok(&self.entries[i - 1][j - 1])
    }

    pub fn determinant(&self) -> SparsePoly {
        let m = &self.entries;
        let t1 = &m[0][0] * &(&(&m[1][1] * &m[2][2]) - &(&m[1][2] * &m[2][1]));
        let t2 = &m[0][1] * &(&(&m[1][0] * &m[2][2]) - &(&m[1][2] * &m[2][0]));
        let t3 = &m[0][2] * &(&(&m[1][0] * &m[2][1]) - &(&m[1][1] * &m[2][0]));
        &(&t1 - &t2) + &t3
    }

    /// `(-1)^(i+j)` times the minor obtained by deleting row `i` and column `j`.
    pub fn cofactor(&self, i: usize, j: usize) -> Result<SparsePoly, SymPolyError> {
        check(i, j)?;
        let rows: Vec<usize> = (0..3).filter(|&r| r != i - 1).collect();
        let cols: Vec<usize> = (0..3).filter(|&c| c != j - 1).collect();
        let m = &self.entries;
        let minor = &(&m[rows[0]][cols[0]] * &m[rows[1]][cols[1]])
            - &(&m[rows[0]][cols[1]] * &m[rows[1]][cols[0]]);
        Ok(if (i + j) % 2 == 0 { minor } else { -minor })
    }

    pub fn map(&self, f: impl Fn(&SparsePoly) -> SparsePoly) -> PolyMatrix3 {
        PolyMatrix3 {
            entries: std::array::from_fn(|i| std::array::from_fn(|j| f(&self.entries[i][j]))),
        }
    }

    pub fn specialize_coefficients(&self, c0: &BigInt, c1: &BigInt, c2: &BigInt) -> PolyMatrix3 {
        self.map(|p| p.specialize_coefficients(c0, c1, c2))
    }
}

fn check(i: usize, j: usize) -> Result<(), SymPolyError> {
    if (1..=3).contains(&i) && (1..=3).contains(&j) {
        Ok(())
    } else {
        Err(SymPolyError::IndexOutOfRange(i, j))
    }
}

/// Matrix of multiplication by `a0 + a1·r + a2·r²` in the basis `{1, r, r²}`,
/// reduced by `r³ = -c2·r² - c1·r - c0`. Column `j` holds the coordinates of
/// `α·r^(j-1)`.
pub fn mult_matrix_symbolic() -> PolyMatrix3 {
    PolyMatrix3 {
        entries: [
            [poly("a0"), poly("-c0*a2"), poly("a2*c0*c2 - a1*c0")],
            [
                poly("a1"),
                poly("a0 - c1*a2"),
                poly("a2*c1*c2 - a2*c0 - a1*c1"),
            ],
            [
                poly("a2"),
                poly("a1 - c2*a2"),
                poly("a2*c2^2 - a2*c1 - a1*c2 + a0"),
            ],
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sympoly::Var;

    /// Reduces `α·r^k` by repeated substitution, independently of the table above.
    fn column_by_reduction(k: usize) -> [SparsePoly; 3] {
        let mut v = [poly("a0"), poly("a1"), poly("a2")];
        for _ in 0..k {
            // multiply by r: (x0, x1, x2) -> (-c0*x2, x0 - c1*x2, x1 - c2*x2)
            let [x0, x1, x2] = v;
            v = [
                -(&poly("c0") * &x2),
                &x0 - &(&poly("c1") * &x2),
                &x1 - &(&poly("c2") * &x2),
            ];
        }
        v
    }

    #[test]
    fn matrix_columns_are_multiples_of_r() {
        let m = mult_matrix_symbolic();
        for j in 0..3 {
            let col = column_by_reduction(j);
            for i in 0..3 {
                assert_eq!(m.entries[i][j], col[i], "entry ({}, {})", i + 1, j + 1);
            }
        }
    }

    #[test]
    fn displayed_entries() {
        let m = mult_matrix_symbolic();
        assert_eq!(m.entry(1, 2).unwrap(), &poly("-c0*a2"));
        assert_eq!(m.entry(3, 3).unwrap(), &poly("a2*c2^2 - a2*c1 - a1*c2 + a0"));
        assert!(m.entry(0, 1).is_err());
        assert!(m.cofactor(4, 1).is_err());
    }

    #[test]
    fn specializes_to_identity_at_one() {
        let m = mult_matrix_symbolic();
        let one = m.map(|p| {
            p.substitute(&[
                (Var::A0, 1.into()),
                (Var::A1, 0.into()),
                (Var::A2, 0.into()),
            ])
        });
        assert_eq!(one, PolyMatrix3::identity());
        assert_eq!(PolyMatrix3::identity().cofactor(1, 1).unwrap(), SparsePoly::one());
        assert_eq!(PolyMatrix3::identity().cofactor(1, 2).unwrap(), SparsePoly::zero());
    }

    #[test]
    fn adjugate_identity() {
        // M * adj(M) = det(M) * I, adj(M)[i][j] = B_ji
        let m = mult_matrix_symbolic();
        let det = m.determinant();
        for i in 1..=3 {
            for j in 1..=3 {
                let mut s = SparsePoly::zero();
                for k in 1..=3 {
                    s = &s + &(m.entry(i, k).unwrap() * &m.cofactor(j, k).unwrap());
                }
                let expected = if i == j { det.clone() } else { SparsePoly::zero() };
                assert_eq!(s, expected);
            }
        }
    }
}
