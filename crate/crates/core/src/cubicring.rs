//! Arithmetic in ℤ[r] for a monic irreducible cubic `f = X³ + c2·X² + c1·X + c0`,
//! plus floating-point embeddings of ℚ(r) into ℂ.
//!
//! Elements are coordinate triples in the basis `{1, r, r²}`. Multiplication by
//! `α` is the 3×3 matrix `M_α` whose columns are the coordinates of `α`, `α·r`,
//! `α·r²`; the norm is its determinant and the cofactors give `α⁻¹·N(α)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("polynomial is reducible: {0} is a rational root")]
    Reducible(BigInt),
    #[error("constant coefficient too large for the rational-root test")]
    CoefficientTooLarge,
    #[error("cannot parse polynomial coefficients {0:?}; expected c2,c1,c0")]
    Parse(String),
}

pub type IntMatrix3 = [[BigInt; 3]; 3];

/// A monic irreducible cubic with its discriminant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CubicPoly {
    c2: BigInt,
    c1: BigInt,
    c0: BigInt,
    disc: BigInt,
}

impl CubicPoly {
    pub fn new(c2: BigInt, c1: BigInt, c0: BigInt) -> Result<Self, RingError> {
        let disc = discriminant(&c2, &c1, &c0);
        let f = Self { c2, c1, c0, disc };
        if let Some(root) = f.rational_root()? {
            return Err(RingError::Reducible(root));
        }
        Ok(f)
    }

    pub fn from_i64(c2: i64, c1: i64, c0: i64) -> Result<Self, RingError> {
        Self::new(c2.into(), c1.into(), c0.into())
    }

    /// `(c0, c1, c2)`.
    pub fn coefficients(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.c0, &self.c1, &self.c2)
    }

    pub fn c0(&self) -> &BigInt {
        &self.c0
    }

    pub fn c1(&self) -> &BigInt {
        &self.c1
    }

    pub fn c2(&self) -> &BigInt {
        &self.c2
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    /// `[c2, c1, c0]` as machine integers, when they fit.
    pub fn small_coefficients(&self) -> Option<[i64; 3]> {
        Some([self.c2.to_i64()?, self.c1.to_i64()?, self.c0.to_i64()?])
    }

    // A monic integer polynomial's rational roots are integers dividing c0.
    fn rational_root(&self) -> Result<Option<BigInt>, RingError> {
        if self.c0.is_zero() {
            return Ok(Some(BigInt::zero()));
        }
        let c0 = self.c0.abs().to_u128().ok_or(RingError::CoefficientTooLarge)?;
        let mut divisors = vec![1u128];
        for (p, e) in arith::factor(c0) {
            let mut next = Vec::with_capacity(divisors.len() * (e as usize + 1));
            for d in &divisors {
                let mut pk = 1u128;
                for _ in 0..=e {
                    next.push(d * pk);
                    pk *= p;
                }
            }
            divisors = next;
        }
        divisors.sort_unstable();
        for d in divisors {
            for x in [BigInt::from(d), -BigInt::from(d)] {
                if self.eval(&x).is_zero() {
                    return Ok(Some(x));
                }
            }
        }
        Ok(None)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        ((x + &self.c2) * x + &self.c1) * x + &self.c0
    }

    pub fn eval_derivative(&self, x: &BigInt) -> BigInt {
        BigInt::from(3) * x * x + BigInt::from(2) * &self.c2 * x + &self.c1
    }

    /// `f(n)` in machine arithmetic, `None` on overflow.
    pub fn eval_i128(&self, n: i128) -> Option<i128> {
        let [c2, c1, c0] = self.small_coefficients()?;
        let t = n.checked_add(c2 as i128)?;
        let t = t.checked_mul(n)?.checked_add(c1 as i128)?;
        t.checked_mul(n)?.checked_add(c0 as i128)
    }

    /// Machine-integer view for hot loops, when the coefficients fit in `i64`.
    pub fn small(&self) -> Option<SmallCubic> {
        let [c2, c1, c0] = self.small_coefficients()?;
        Some(SmallCubic {
            c2: c2 as i128,
            c1: c1 as i128,
            c0: c0 as i128,
        })
    }

    /// Product reduced modulo `f`.
    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        // schoolbook product, then fold r^4 and r^3
        let mut t = [
            &a.a0 * &b.a0,
            &a.a0 * &b.a1 + &a.a1 * &b.a0,
            &a.a0 * &b.a2 + &a.a1 * &b.a1 + &a.a2 * &b.a0,
            &a.a1 * &b.a2 + &a.a2 * &b.a1,
            &a.a2 * &b.a2,
        ];
        for k in [4usize, 3] {
            let top = std::mem::take(&mut t[k]);
            t[k - 1] -= &self.c2 * &top;
            t[k - 2] -= &self.c1 * &top;
            t[k - 3] -= &self.c0 * &top;
        }
        let [a0, a1, a2, _, _] = t;
        RingElem { a0, a1, a2 }
    }

    pub fn pow(&self, a: &RingElem, mut k: u32) -> RingElem {
        let mut base = a.clone();
        let mut acc = RingElem::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// `M_α`; column `j` holds the coordinates of `α·r^j`.
    pub fn mult_matrix(&self, a: &RingElem) -> IntMatrix3 {
        let (c0, c1, c2) = (&self.c0, &self.c1, &self.c2);
        let (a0, a1, a2) = (&a.a0, &a.a1, &a.a2);
        [
            [a0.clone(), -(c0 * a2), a2 * c0 * c2 - a1 * c0],
            [a1.clone(), a0 - c1 * a2, a2 * c1 * c2 - a2 * c0 - a1 * c1],
            [a2.clone(), a1 - c2 * a2, a2 * c2 * c2 - a2 * c1 - a1 * c2 + a0],
        ]
    }

    pub fn norm(&self, a: &RingElem) -> BigInt {
        det3(&self.mult_matrix(a))
    }

    /// Cofactor matrix `B`, with `B[i][j]` the signed minor of entry `(i, j)`.
    pub fn cofactors(&self, a: &RingElem) -> IntMatrix3 {
        cofactor_matrix(&self.mult_matrix(a))
    }

    /// `adj(M_α) = Bᵀ`, so that `M_α · adj(M_α) = N(α)·I`.
    pub fn adjugate(&self, a: &RingElem) -> IntMatrix3 {
        let b = self.cofactors(a);
        std::array::from_fn(|i| std::array::from_fn(|j| b[j][i].clone()))
    }

    /// Whether `β / α` lies in ℤ[r]; `false` for `α = 0`.
    pub fn divides_elem(&self, a: &RingElem, b: &RingElem) -> bool {
        self.quotient(b, a).is_some()
    }

    /// `β / α` when it lies in ℤ[r].
    pub fn quotient(&self, b: &RingElem, a: &RingElem) -> Option<RingElem> {
        let n = self.norm(a);
        if n.is_zero() {
            return None;
        }
        let adj = self.adjugate(a);
        let v = [&b.a0, &b.a1, &b.a2];
        let mut out: [BigInt; 3] = Default::default();
        for (i, slot) in out.iter_mut().enumerate() {
            let s: BigInt = (0..3).map(|j| &adj[i][j] * v[j]).sum();
            let (q, r) = s.div_rem(&n);
            if !r.is_zero() {
                return None;
            }
            *slot = q;
        }
        let [a0, a1, a2] = out;
        Some(RingElem { a0, a1, a2 })
    }

    /// `q(a1, a2)`, the `a0`-free factor of `Res(B13, B22; a0) = q·q0`.
    pub fn elim_q(&self, a1: &BigInt, a2: &BigInt) -> BigInt {
        let (c0, c1, c2) = (&self.c0, &self.c1, &self.c2);
        let a2sq = a2 * a2;
        let a2cu = &a2sq * a2;
        &a2cu * c1 * c2 - a1 * &a2sq * c2 * c2 - &a2cu * c0 - a1 * &a2sq * c1
            + BigInt::from(2) * a1 * a1 * a2 * c2
            - a1 * a1 * a1
    }

    /// `q0(a1, a2) = a2·c2 − a1`.
    pub fn elim_q0(&self, a1: &BigInt, a2: &BigInt) -> BigInt {
        a2 * &self.c2 - a1
    }

    /// Inverse of a unit (`|N| = 1`).
    pub fn unit_inverse(&self, u: &RingElem) -> Option<RingElem> {
        self.quotient(&RingElem::one(), u)
    }

    /// The three complex roots of `f`, real ones first.
    pub fn embeddings(&self, tolerance: f64) -> Embeddings {
        Embeddings::compute(self, tolerance)
    }
}

impl fmt::Display for CubicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^3")?;
        for (c, mono) in [(&self.c2, "X^2"), (&self.c1, "X"), (&self.c0, "")] {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { '-' } else { '+' };
            let mag = c.abs();
            if mag.is_one() && !mono.is_empty() {
                write!(f, " {sign} {mono}")?;
            } else {
                write!(f, " {sign} {mag}{mono}")?;
            }
        }
        Ok(())
    }
}

/// `"c2,c1,c0"`, the form taken by the `--poly` flag.
impl FromStr for CubicPoly {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(RingError::Parse(s.to_string()));
        }
        let mut c = parts
            .iter()
            .map(|p| p.parse::<BigInt>().map_err(|_| RingError::Parse(s.to_string())));
        let (c2, c1, c0) = (c.next().unwrap()?, c.next().unwrap()?, c.next().unwrap()?);
        Self::new(c2, c1, c0)
    }
}

/// `f` with `i128` coefficients. Norms are exact as long as
/// `|a_i| · (1 + |c|)² < 2^40` or so; callers keep coordinates small.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmallCubic {
    pub c2: i128,
    pub c1: i128,
    pub c0: i128,
}

impl SmallCubic {
    pub fn mult_matrix(&self, a: [i64; 3]) -> [[i128; 3]; 3] {
        let (c0, c1, c2) = (self.c0, self.c1, self.c2);
        let [a0, a1, a2] = a.map(|x| x as i128);
        [
            [a0, -c0 * a2, a2 * c0 * c2 - a1 * c0],
            [a1, a0 - c1 * a2, a2 * c1 * c2 - a2 * c0 - a1 * c1],
            [a2, a1 - c2 * a2, a2 * c2 * c2 - a2 * c1 - a1 * c2 + a0],
        ]
    }

    pub fn norm(&self, a: [i64; 3]) -> i128 {
        let m = self.mult_matrix(a);
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// [`CubicPoly::elim_q`] in machine integers.
    pub fn elim_q(&self, a1: i64, a2: i64) -> i128 {
        let (c0, c1, c2) = (self.c0, self.c1, self.c2);
        let (a1, a2) = (a1 as i128, a2 as i128);
        a2 * a2 * a2 * c1 * c2 - a1 * a2 * a2 * c2 * c2 - a2 * a2 * a2 * c0 - a1 * a2 * a2 * c1
            + 2 * a1 * a1 * a2 * c2
            - a1 * a1 * a1
    }

    /// `B13` and `B23`: the first two rows of the third column of the cofactor matrix.
    pub fn b13_b23(&self, a: [i64; 3]) -> (i128, i128) {
        let m = self.mult_matrix(a);
        let b13 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
        let b23 = -(m[0][0] * m[2][1] - m[0][1] * m[2][0]);
        (b13, b23)
    }
}

/// `c2²c1² − 4c1³ − 4c2³c0 − 27c0² + 18c2c1c0`.
pub fn discriminant(c2: &BigInt, c1: &BigInt, c0: &BigInt) -> BigInt {
    c2 * c2 * c1 * c1 - 4 * c1 * c1 * c1 - 4 * c2 * c2 * c2 * c0 - 27 * c0 * c0
        + 18 * c2 * c1 * c0
}

pub fn det3(m: &IntMatrix3) -> BigInt {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

pub fn cofactor_matrix(m: &IntMatrix3) -> IntMatrix3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
            let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
            let minor = &m[r[0]][c[0]] * &m[r[1]][c[1]] - &m[r[0]][c[1]] * &m[r[1]][c[0]];
            if (i + j) % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
    })
}

/// `α = a0 + a1·r + a2·r²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct RingElem {
    #[serde(serialize_with = "ser_big")]
    pub a0: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub a1: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub a2: BigInt,
}

pub(crate) fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

impl RingElem {
    pub fn new(a0: impl Into<BigInt>, a1: impl Into<BigInt>, a2: impl Into<BigInt>) -> Self {
        Self {
            a0: a0.into(),
            a1: a1.into(),
            a2: a2.into(),
        }
    }

    pub fn one() -> Self {
        Self::new(1, 0, 0)
    }

    pub fn r() -> Self {
        Self::new(0, 1, 0)
    }

    /// `n − r`.
    pub fn linear(n: impl Into<BigInt>) -> Self {
        Self::new(n, -1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.a1.is_zero() && self.a2.is_zero()
    }

    pub fn coords(&self) -> [&BigInt; 3] {
        [&self.a0, &self.a1, &self.a2]
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self {
            a0: &self.a0 * k,
            a1: &self.a1 * k,
            a2: &self.a2 * k,
        }
    }

    pub fn max_abs_coord(&self) -> BigInt {
        self.coords().into_iter().map(|c| c.abs()).max().unwrap()
    }

    pub fn to_f64(&self) -> [f64; 3] {
        self.coords().map(|c| c.to_f64().unwrap_or(f64::NAN))
    }

    /// Image under the embedding sending `r` to `root`.
    pub fn embed(&self, root: Complex64) -> Complex64 {
        let [a0, a1, a2] = self.to_f64();
        Complex64::new(a0, 0.0) + root * (a1 + root * a2)
    }

    /// Value at an integer `x` of `a0 + a1·x + a2·x²`, i.e. the image of `α` in ℤ/p
    /// under `r ↦ x` when `x` is a root of `f` mod p.
    pub fn eval_at(&self, x: &BigInt) -> BigInt {
        &self.a0 + x * (&self.a1 + x * &self.a2)
    }
}

impl std::ops::Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem {
            a0: -&self.a0,
            a1: -&self.a1,
            a2: -&self.a2,
        }
    }
}

impl std::ops::Add for &RingElem {
    type Output = RingElem;
    fn add(self, o: &RingElem) -> RingElem {
        RingElem {
            a0: &self.a0 + &o.a0,
            a1: &self.a1 + &o.a1,
            a2: &self.a2 + &o.a2,
        }
    }
}

impl std::ops::Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, o: &RingElem) -> RingElem {
        RingElem {
            a0: &self.a0 - &o.a0,
            a1: &self.a1 - &o.a1,
            a2: &self.a2 - &o.a2,
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a0, self.a1, self.a2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub real: u8,
    pub complex_pairs: u8,
}

/// Roots of `f` in ℂ. Order: real roots ascending, then the complex root with
/// positive imaginary part, then its conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings {
    pub roots: [Complex64; 3],
    pub signature: Signature,
    /// Largest `|f(root)|` relative to the size of the terms, after polishing.
    pub residual: f64,
}

impl Embeddings {
    fn compute(f: &CubicPoly, tolerance: f64) -> Self {
        let c = [
            f.c2.to_f64().unwrap(),
            f.c1.to_f64().unwrap(),
            f.c0.to_f64().unwrap(),
        ];
        let eval = |x: f64| ((x + c[0]) * x + c[1]) * x + c[2];
        let deriv = |x: f64| (3.0 * x + 2.0 * c[0]) * x + c[1];
        let bound = 1.0 + c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = tolerance.clamp(1e-15, 1e-12);

        let find = |lo: f64, hi: f64| -> f64 {
            let (mut lo, mut hi) = (lo, hi);
            let rising = eval(hi) > eval(lo);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (eval(mid) > 0.0) == rising {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= tol * (1.0 + mid.abs()) {
                    break;
                }
            }
            let mut x = 0.5 * (lo + hi);
            for _ in 0..4 {
                let d = deriv(x);
                if d == 0.0 {
                    break;
                }
                let next = x - eval(x) / d;
                if next.is_finite() && (next - x).abs() < (hi - lo).max(tol) * 4.0 {
                    x = next;
                }
            }
            x
        };

        let (roots, signature) = if f.disc.is_positive() {
            // three real roots separated by the critical points of f
            let a = 3.0;
            let b = 2.0 * c[0];
            let disc_d = (b * b - 4.0 * a * c[1]).max(0.0).sqrt();
            let (x1, x2) = ((-b - disc_d) / (2.0 * a), (-b + disc_d) / (2.0 * a));
            let r = [find(-bound, x1), find(x1, x2), find(x2, bound)];
            (
                r.map(|x| Complex64::new(x, 0.0)),
                Signature {
                    real: 3,
                    complex_pairs: 0,
                },
            )
        } else {
            let rho = find(-bound, bound);
            // f = (x - rho)(x^2 + p x + q)
            let p = c[0] + rho;
            let q = c[1] + rho * p;
            let im = (4.0 * q - p * p).max(0.0).sqrt() / 2.0;
            let mut z = Complex64::new(-p / 2.0, im);
            for _ in 0..4 {
                let fz = ((z + c[0]) * z + c[1]) * z + c[2];
                let dz = (z * 3.0 + 2.0 * c[0]) * z + c[1];
                if dz.norm() == 0.0 {
                    break;
                }
                z -= fz / dz;
            }
            (
                [Complex64::new(rho, 0.0), z, z.conj()],
                Signature {
                    real: 1,
                    complex_pairs: 1,
                },
            )
        };
        let residual = roots
            .iter()
            .map(|&z| {
                let scale = z.norm().powi(3) + c[0].abs() * z.norm_sqr() + c[1].abs() * z.norm() + c[2].abs();
                (((z + c[0]) * z + c[1]) * z + c[2]).norm() / scale.max(1.0)
            })
            .fold(0.0, f64::max);
        Embeddings {
            roots,
            signature,
            residual,
        }
    }

    /// Images of `α` under the three embeddings.
    pub fn embed(&self, a: &RingElem) -> [Complex64; 3] {
        self.roots.map(|z| a.embed(z))
    }

    /// Index of the real root used as "the" embedding in the annulus case.
    pub fn real_root(&self) -> f64 {
        self.roots[0].re
    }
}
