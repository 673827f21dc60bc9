//! The cofactor/resultant identities used to trade `k_α / N(α)` for a fraction
//! whose denominator depends on `(a1, a2)` only.

use num_bigint::BigInt;
use serde::Serialize;

use super::{mult_matrix_symbolic, poly, resultant_wrt_a0, PolyMatrix3, SparsePoly, SymPolyError, Var};

/// All polynomials of the elimination step, computed from `M_α`.
#[derive(Debug, Clone)]
pub struct CofactorSystem {
    pub matrix: PolyMatrix3,
    /// `cofactors[i][j]` is `B_(i+1)(j+1)`.
    pub cofactors: [[SparsePoly; 3]; 3],
    pub norm: SparsePoly,
    /// `(B23·B11 − B13·B21) / N(α)`.
    pub q0: SparsePoly,
    /// `Res(B13, N(α); a0)`.
    pub r: SparsePoly,
    /// `Res(B13, B22; a0)`.
    pub r0: SparsePoly,
    /// `R0 / q0`.
    pub q: SparsePoly,
    pub u: SparsePoly,
    pub v: SparsePoly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    /// Side facts checked the same way but not part of the required set.
    pub informational: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.checks
            .iter()
            .chain(&self.informational)
            .find(|c| c.name == name)
            .map(|c| c.holds)
    }
}

/// Explicit forms of `U` and `V` in `U·B22 + V·B13 = q·q0`.
pub fn bezout_u() -> SparsePoly {
    poly("a2^2")
}

pub fn bezout_v() -> SparsePoly {
    poly("a2*a0 + a2^2*c2^2 - 2*a1*a2*c2 + a1^2")
}

impl CofactorSystem {
    /// Fully symbolic in `a0..a2` and `c0..c2`.
    pub fn generic() -> Result<Self, SymPolyError> {
        Self::from_matrix(mult_matrix_symbolic(), bezout_u(), bezout_v())
    }

    /// With the cubic's coefficients fixed to integers.
    pub fn specialized(c0: &BigInt, c1: &BigInt, c2: &BigInt) -> Result<Self, SymPolyError> {
        Self::from_matrix(
            mult_matrix_symbolic().specialize_coefficients(c0, c1, c2),
            bezout_u(),
            bezout_v().specialize_coefficients(c0, c1, c2),
        )
    }

    fn from_matrix(matrix: PolyMatrix3, u: SparsePoly, v: SparsePoly) -> Result<Self, SymPolyError> {
        let cofactors: [[SparsePoly; 3]; 3] = {
            let mut out: [[SparsePoly; 3]; 3] = Default::default();
            for (i, row) in out.iter_mut().enumerate() {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = matrix.cofactor(i + 1, j + 1)?;
                }
            }
            out
        };
        let norm = matrix.determinant();
        let b = |i: usize, j: usize| &cofactors[i - 1][j - 1];
        let cross = &(b(2, 3) * b(1, 1)) - &(b(1, 3) * b(2, 1));
        let q0 = cross.divide_exact(&norm)?;
        let r = resultant_wrt_a0(b(1, 3), &norm)?;
        let r0 = resultant_wrt_a0(b(1, 3), b(2, 2))?;
        let q = r0.divide_exact(&q0)?;
        Ok(Self {
            matrix,
            cofactors,
            norm,
            q0,
            r,
            r0,
            q,
            u,
            v,
        })
    }

    /// `B_ij`, 1-based.
    pub fn b(&self, i: usize, j: usize) -> &SparsePoly {
        &self.cofactors[i - 1][j - 1]
    }

    pub fn verify(&self) -> IdentityReport {
        let b = |i, j| self.b(i, j);
        let c0 = self.coefficient(Var::C0);
        let c1 = self.coefficient(Var::C1);
        let c2 = self.coefficient(Var::C2);

        let zero = |p: SparsePoly| p.is_zero();
        let qq0 = &self.q * &self.q0;

        let cross = &(b(2, 3) * b(1, 1)) - &(b(1, 3) * b(2, 1));
        let id1 = zero(&cross - &(&self.q0 * &self.norm));
        let id2 = zero(&(-(&(&self.q0 * &self.q0) * &self.r)) - &(&self.r0 * &self.r0));
        let id3 = zero(&self.r0 - &qq0);
        let id4 = zero(&(&(&self.u * b(2, 2)) + &(&self.v * b(1, 3))) - &qq0);
        let col1 = zero(b(2, 1) + &(&c0 * b(1, 3)));
        let col2 = zero(&(b(2, 2) - b(1, 1)) + &(&c1 * b(1, 3)));
        let col3 = zero(&(b(2, 3) - b(1, 2)) + &(&c2 * b(1, 3)));

        let res12 = resultant_wrt_a0(b(1, 3), b(1, 2));
        let id6 = res12
            .map(|r12| zero(&(-(&self.q0 * &r12)) - &self.r0))
            .unwrap_or(false);
        let congruence = (&(&self.u * &self.norm) - &(&self.q * b(2, 3)))
            .divide_exact(b(1, 3))
            .is_ok();
        let free_of_a0 = self.q0.degree_in(Var::A0).unwrap_or(0) == 0
            && self.q.degree_in(Var::A0).unwrap_or(0) == 0;

        IdentityReport {
            checks: vec![
                IdentityCheck {
                    name: "cross_cofactor",
                    statement: "B23*B11 - B13*B21 = q0*N",
                    holds: id1,
                },
                IdentityCheck {
                    name: "resultant_square",
                    statement: "-q0^2*R = R0^2",
                    holds: id2,
                },
                IdentityCheck {
                    name: "r0_factorization",
                    statement: "R0 = q*q0",
                    holds: id3,
                },
                IdentityCheck {
                    name: "bezout",
                    statement: "U*B22 + V*B13 = q*q0",
                    holds: id4,
                },
                IdentityCheck {
                    name: "column_relations",
                    statement: "B21 = -c0*B13, B22 = B11 - c1*B13, B23 = B12 - c2*B13",
                    holds: col1 && col2 && col3,
                },
            ],
            informational: vec![
                IdentityCheck {
                    name: "res_b12",
                    statement: "-q0*Res(B13,B12) = Res(B13,B22)",
                    holds: id6,
                },
                IdentityCheck {
                    name: "kalpha_congruence",
                    statement: "B13 divides U*N - q*B23",
                    holds: congruence,
                },
                IdentityCheck {
                    name: "q_free_of_a0",
                    statement: "q0 and q do not involve a0",
                    holds: free_of_a0,
                },
            ],
        }
    }

    /// `c_i` as a polynomial: the variable itself, or the fixed integer.
    fn coefficient(&self, v: Var) -> SparsePoly {
        // M[1][2] = -c0*a2, M[2][2] = a0 - c1*a2, M[3][2] = a1 - c2*a2
        let entry = match v {
            Var::C0 => -&self.matrix.entries[0][1],
            Var::C1 => &poly("a0") - &self.matrix.entries[1][1],
            Var::C2 => &poly("a1") - &self.matrix.entries[2][1],
            _ => unreachable!("not a coefficient variable"),
        };
        entry
            .divide_exact(&poly("a2"))
            .expect("column 2 of M_alpha is linear in a2")
    }
}
