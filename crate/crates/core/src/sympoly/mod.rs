//! Exact sparse polynomials over ℤ in the six variables `a0, a1, a2, c0, c1, c2`.
//!
//! `a0..a2` are the coordinates of a ring element `a0 + a1·r + a2·r²` and
//! `c0..c2` the lower coefficients of the monic cubic `X³ + c2X² + c1X + c0`.
//! Coefficients are arbitrary precision, so every operation is exact.
//!
//! Terms are kept in graded lexicographic order with
//! `a0 > a1 > a2 > c0 > c1 > c2`; the text form lists the leading term first.

mod identities;
mod matrix;

pub use identities::{CofactorSystem, IdentityCheck, IdentityReport};
pub use matrix::{mult_matrix_symbolic, PolyMatrix3};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymPolyError {
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("division is not exact")]
    NotExact,
    #[error("resultant of the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial has degree 0 in a0")]
    ConstantInA0,
    #[error("matrix index ({0}, {1}) out of range 1..=3")]
    IndexOutOfRange(usize, usize),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// Variable indices, in term-order priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    A0 = 0,
    A1 = 1,
    A2 = 2,
    C0 = 3,
    C1 = 4,
    C2 = 5,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::A0, Var::A1, Var::A2, Var::C0, Var::C1, Var::C2];

    pub fn name(self) -> &'static str {
        ["a0", "a1", "a2", "c0", "c1", "c2"][self as usize]
    }
}

/// Exponent vector; `Ord` is graded lex (total degree first, then `a0` down to `c2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Exponents(pub [u8; 6]);

impl Exponents {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    fn add(&self, other: &Exponents) -> Exponents {
        let mut e = [0u8; 6];
        for i in 0..6 {
            e[i] = self.0[i]
                .checked_add(other.0[i])
                .expect("exponent overflow");
        }
        Exponents(e)
    }

    fn checked_sub(&self, other: &Exponents) -> Option<Exponents> {
        let mut e = [0u8; 6];
        for i in 0..6 {
            e[i] = self.0[i].checked_sub(other.0[i])?;
        }
        Some(Exponents(e))
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SparsePoly {
    // ascending term order; no zero coefficients
    terms: BTreeMap<Exponents, BigInt>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, Exponents::default())
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0u8; 6];
        e[v as usize] = 1;
        Self::monomial(1, Exponents(e))
    }

    pub fn monomial(c: impl Into<BigInt>, exps: Exponents) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Exponents, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.leading_term().map(|(e, _)| e.degree())
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, v: Var) -> Option<u8> {
        self.terms.keys().map(|e| e.0[v as usize]).max()
    }

    pub fn pow(&self, n: u32) -> SparsePoly {
        let mut acc = SparsePoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, k: &BigInt) -> SparsePoly {
        if k.is_zero() {
            return SparsePoly::zero();
        }
        SparsePoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// Coefficients with respect to `v`: entry `k` multiplies `v^k`.
    pub fn coefficients_in(&self, v: Var) -> Vec<SparsePoly> {
        let deg = self.degree_in(v).unwrap_or(0) as usize;
        let mut out = vec![SparsePoly::zero(); deg + 1];
        for (e, c) in &self.terms {
            let k = e.0[v as usize] as usize;
            let mut rest = *e;
            rest.0[v as usize] = 0;
            out[k].add_term(rest, c.clone());
        }
        out
    }

    /// Substitutes integer values for some of the variables.
    pub fn substitute(&self, values: &[(Var, BigInt)]) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (e, c) in &self.terms {
            let mut e = *e;
            let mut c = c.clone();
            for (v, val) in values {
                let k = e.0[*v as usize];
                if k > 0 {
                    c *= num_traits::pow(val.clone(), k as usize);
                    e.0[*v as usize] = 0;
                }
            }
            out.add_term(e, c);
        }
        out
    }

    /// Fixes the cubic's coefficients `(c0, c1, c2)`.
    pub fn specialize_coefficients(&self, c0: &BigInt, c1: &BigInt, c2: &BigInt) -> SparsePoly {
        self.substitute(&[
            (Var::C0, c0.clone()),
            (Var::C1, c1.clone()),
            (Var::C2, c2.clone()),
        ])
    }

    /// Full evaluation, values indexed by [`Var`].
    pub fn evaluate(&self, values: &[BigInt; 6]) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    t *= num_traits::pow(values[i].clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact quotient `self / divisor`, by repeated leading-term cancellation.
    pub fn divide_exact(&self, divisor: &SparsePoly) -> Result<SparsePoly, SymPolyError> {
        let (lead_e, lead_c) = divisor.leading_term().ok_or(SymPolyError::ZeroDivisor)?;
        let mut rem = self.clone();
        let mut quot = SparsePoly::zero();
        while let Some((e, c)) = rem.leading_term() {
            let shift = e.checked_sub(lead_e).ok_or(SymPolyError::NotExact)?;
            let (q, r) = c.div_rem(lead_c);
            if !r.is_zero() {
                return Err(SymPolyError::NotExact);
            }
            let step = SparsePoly::monomial(q, shift);
            rem = &rem - &(&step * divisor);
            quot = &quot + &step;
        }
        Ok(quot)
    }
}

/// Resultant of `p` and `q` with respect to `a0`: the determinant of the
/// Sylvester matrix with the `deg q` shifted rows of `p` on top, followed by
/// the `deg p` shifted rows of `q`, coefficients leading first.
pub fn resultant_wrt_a0(p: &SparsePoly, q: &SparsePoly) -> Result<SparsePoly, SymPolyError> {
    if p.is_zero() || q.is_zero() {
        return Err(SymPolyError::ZeroPolynomial);
    }
    let m = p.degree_in(Var::A0).unwrap_or(0) as usize;
    let n = q.degree_in(Var::A0).unwrap_or(0) as usize;
    if m == 0 || n == 0 {
        return Err(SymPolyError::ConstantInA0);
    }
    let pc: Vec<SparsePoly> = p.coefficients_in(Var::A0).into_iter().rev().collect();
    let qc: Vec<SparsePoly> = q.coefficients_in(Var::A0).into_iter().rev().collect();
    let size = m + n;
    let mut rows = vec![vec![SparsePoly::zero(); size]; size];
    for i in 0..n {
        for (j, c) in pc.iter().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in qc.iter().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    bareiss_determinant(rows)
}

/// Fraction-free Gaussian elimination over ℤ[a, c]; every division is exact.
pub fn bareiss_determinant(mut a: Vec<Vec<SparsePoly>>) -> Result<SparsePoly, SymPolyError> {
    let n = a.len();
    if n == 0 {
        return Ok(SparsePoly::one());
    }
    let mut negate = false;
    let mut prev = SparsePoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(SparsePoly::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.divide_exact(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for SparsePoly {
            type Output = SparsePoly;
            fn $m(self, rhs: SparsePoly) -> SparsePoly { (&self).$m(&rhs) }
        }
        impl $tr<&SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $m(self, rhs: &SparsePoly) -> SparsePoly { (&self).$m(rhs) }
        }
        impl $tr<SparsePoly> for &SparsePoly {
            type Output = SparsePoly;
            fn $m(self, rhs: SparsePoly) -> SparsePoly { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

/// `coef*a0^e0*...*c2^e5` terms joined by `+`, leading term first; a unit
/// exponent is written without `^1`, and the zero polynomial as `0`.
impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{c}")?;
            for v in Var::ALL {
                match e.0[v as usize] {
                    0 => {}
                    1 => write!(f, "*{}", v.name())?,
                    k => write!(f, "*{}^{k}", v.name())?,
                }
            }
        }
        Ok(())
    }
}

/// Parses the [`Display`](fmt::Display) form; coefficients may be omitted
/// (`a0*a1` means `1*a0*a1`) and `-` may separate terms.
impl FromStr for SparsePoly {
    type Err = SymPolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SymPolyError::Parse(s.to_string());
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(err());
        }
        // split on '+' and on '-' that starts a new term
        let mut pieces = Vec::new();
        let mut cur = String::new();
        for ch in cleaned.chars() {
            let after_sep = cur.is_empty() || cur == "-" || cur.ends_with('^');
            if ch == '+' {
                pieces.push(std::mem::take(&mut cur));
            } else if ch == '-' && !after_sep {
                pieces.push(std::mem::take(&mut cur));
                cur.push('-');
            } else {
                cur.push(ch);
            }
        }
        pieces.push(cur);
        let mut out = SparsePoly::zero();
        for piece in pieces {
            let (sign, body) = match piece.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, piece.as_str()),
            };
            if body.is_empty() {
                return Err(err());
            }
            let mut coef = BigInt::from(sign);
            let mut exps = Exponents::default();
            for factor in body.split('*') {
                if let Some(v) = Var::ALL.iter().find(|v| factor.starts_with(v.name())) {
                    let rest = &factor[2..];
                    let k: u8 = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|x| x.parse().ok())
                            .ok_or_else(err)?
                    };
                    exps.0[*v as usize] = exps.0[*v as usize].checked_add(k).ok_or_else(err)?;
                } else {
                    coef *= factor.parse::<BigInt>().map_err(|_| err())?;
                }
            }
            out.add_term(exps, coef);
        }
        Ok(out)
    }
}

/// Content-free shorthand used by tests and callers building fixed forms.
pub fn poly(s: &str) -> SparsePoly {
    s.parse().expect("valid polynomial literal")
}

impl SparsePoly {
    /// Gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
            .abs()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(e, c)| e.degree() == 0 && c.is_one())
    }
}
