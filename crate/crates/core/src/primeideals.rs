//! First-degree prime ideals of ℤ[r]: roots of `f` mod p, splitting types,
//! Hensel lifts, `ρ(I)`, the residue class `k_I`, and the cofactor formula
//! `k_α ≡ B23 · B13⁻¹ (mod N(α))`.
//!
//! A first-degree prime `P = (p, a − r)` has norm `p`, and `ℤ[r]/P^k ≅ ℤ/p^k`
//! via `r ↦ a_k` where `a_k` is the Hensel lift of `a`. Everything here works
//! away from primes dividing `Disc(f)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, crt_pair, mod_inverse, modulo};
use crate::cubicring::{ser_big, CubicPoly, RingElem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{p} divides the discriminant")]
    Ramified { p: u64 },
    #[error("{a} is not a root of f modulo {p}")]
    NotARoot { p: u64, a: u64 },
    #[error("{a} is a repeated root of f modulo {p}")]
    NonSimpleRoot { p: u64, a: u64 },
    #[error("two distinct prime ideals above {p}: rho = 0")]
    RhoZero { p: u64 },
    #[error("B13 is not invertible modulo N(alpha)")]
    NotInvertible,
    #[error("zero element")]
    ZeroElement,
    #[error("norm {0} is too large to factor")]
    NormTooLarge(BigInt),
    #[error("(alpha) has prime factors of degree > 1 above {p}")]
    NotFirstDegree { p: u64 },
    #[error("exponent must be positive")]
    ZeroExponent,
}

/// Below this bound roots are found by trying every residue.
const BRUTE_FORCE_BELOW: u64 = 1 << 10;

fn reduce_coeffs(f: &CubicPoly, p: u64) -> [u64; 3] {
    let pb = BigInt::from(p);
    let (c0, c1, c2) = f.coefficients();
    [c0, c1, c2].map(|c| modulo(c, &pb).to_u64().unwrap())
}

/// Polynomials over 𝔽_p, coefficients low degree first, no trailing zeros.
mod fp {
    use crate::arith::{mul_mod_u64, pow_mod_u64};

    pub type Poly = Vec<u64>;

    pub fn trim(mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        pow_mod_u64(a, p - 2, p)
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
        let n = a.len().max(b.len());
        let mut out = vec![0; n];
        for i in 0..n {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            out[i] = (x + p - y) % p;
        }
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod_u64(x, y, p)) % p;
            }
        }
        trim(out)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
        let mut a = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv(*m.last().unwrap(), p);
        while a.len() > dm {
            let top = mul_mod_u64(*a.last().unwrap(), lead_inv, p);
            let shift = a.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - mul_mod_u64(top, c, p)) % p;
            }
            a = trim(a);
        }
        a
    }

    pub fn monic(a: Poly, p: u64) -> Poly {
        match a.last() {
            None => a,
            Some(&l) => {
                let li = inv(l, p);
                a.into_iter().map(|c| mul_mod_u64(c, li, p)).collect()
            }
        }
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        monic(a, p)
    }

    /// `base^e mod m`.
    pub fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Poly {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        acc
    }

    /// Square root modulo an odd prime (Tonelli-Shanks).
    pub fn sqrt(a: u64, p: u64) -> Option<u64> {
        let a = a % p;
        if a == 0 {
            return Some(0);
        }
        if pow_mod_u64(a, (p - 1) / 2, p) != 1 {
            return None;
        }
        let (mut q, mut s) = (p - 1, 0u32);
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut z = 2;
        while pow_mod_u64(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod_u64(z, q, p);
        let mut t = pow_mod_u64(a, q, p);
        let mut r = pow_mod_u64(a, q.div_ceil(2), p);
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = mul_mod_u64(tt, tt, p);
                i += 1;
            }
            let b = pow_mod_u64(c, 1u64 << (m - i - 1), p);
            m = i;
            c = mul_mod_u64(b, b, p);
            t = mul_mod_u64(t, c, p);
            r = mul_mod_u64(r, b, p);
        }
        Some(r)
    }
}

/// Roots of a monic squarefree `g` that splits into distinct linear factors over 𝔽_p.
fn split_roots(g: &[u64], p: u64, out: &mut Vec<u64>) {
    use arith::mul_mod_u64;
    match g.len() {
        0 | 1 => {}
        2 => out.push((p - g[0]) % p),
        3 if p > 2 => {
            // x^2 + b x + c
            let (b, c) = (g[1], g[0]);
            let disc = (mul_mod_u64(b, b, p) + p - mul_mod_u64(4 % p, c, p)) % p;
            let s = fp::sqrt(disc, p).expect("split quadratic has a square discriminant");
            let half = fp::inv(2, p);
            out.push(mul_mod_u64((p - b + s) % p, half, p));
            out.push(mul_mod_u64((2 * p - b - s) % p, half, p));
        }
        _ => {
            // Cantor-Zassenhaus with deterministic shifts
            for delta in 0..p {
                let h = fp::pow_mod(&[delta, 1], (p - 1) / 2, g, p);
                let h = fp::sub(&h, &[1], p);
                let d = fp::gcd(g, &h, p);
                if d.len() > 1 && d.len() < g.len() {
                    split_roots(&d, p, out);
                    let (q, _) = div(g, &d, p);
                    split_roots(&q, p, out);
                    return;
                }
            }
            unreachable!("no splitting shift found");
        }
    }
}

fn div(a: &[u64], m: &[u64], p: u64) -> (fp::Poly, fp::Poly) {
    use arith::mul_mod_u64;
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let mut q = vec![0u64; a.len().saturating_sub(dm)];
    let li = fp::inv(*m.last().unwrap(), p);
    while r.len() > dm && !r.is_empty() {
        let top = mul_mod_u64(*r.last().unwrap(), li, p);
        let shift = r.len() - 1 - dm;
        q[shift] = top;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mul_mod_u64(top, c, p)) % p;
        }
        r.pop();
        r = fp::trim(r);
    }
    (fp::trim(q), r)
}

/// `gcd(X^p − X, f)` over 𝔽_p: the product of the distinct linear factors.
fn linear_part(f: &CubicPoly, p: u64) -> fp::Poly {
    let [c0, c1, c2] = reduce_coeffs(f, p);
    let fpoly = vec![c0, c1, c2, 1];
    let xp = fp::pow_mod(&[0, 1], p, &fpoly, p);
    let g = fp::sub(&xp, &[0, 1], p);
    if g.is_empty() {
        return fpoly;
    }
    fp::gcd(&fpoly, &g, p)
}

fn check_prime(p: u64) -> Result<(), IdealError> {
    if arith::is_prime(p as u128) {
        Ok(())
    } else {
        Err(IdealError::NotPrime(p))
    }
}

/// All `x` in `[0, p)` with `f(x) ≡ 0 (mod p)`, sorted.
pub fn roots_mod_p(f: &CubicPoly, p: u64) -> Result<Vec<u64>, IdealError> {
    check_prime(p)?;
    Ok(roots_unchecked(f, p))
}

fn roots_unchecked(f: &CubicPoly, p: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(3);
    if p < BRUTE_FORCE_BELOW {
        let [c0, c1, c2] = reduce_coeffs(f, p);
        for x in 0..p {
            if (((x + c2) * x % p + c1) * x + c0) % p == 0 {
                out.push(x);
            }
        }
        return out;
    }
    split_roots(&linear_part(f, p), p, &mut out);
    out.sort_unstable();
    out
}

/// Number of distinct roots of `f` mod p without extracting them.
pub fn root_count(f: &CubicPoly, p: u64) -> Result<usize, IdealError> {
    check_prime(p)?;
    if p < BRUTE_FORCE_BELOW {
        return Ok(roots_unchecked(f, p).len());
    }
    Ok(linear_part(f, p).len() - 1)
}

/// Memoised [`roots_mod_p`] for one polynomial. Concurrent readers, one writer
/// at a time on a miss.
#[derive(Debug)]
pub struct RootCache {
    f: CubicPoly,
    table: RwLock<HashMap<u64, Vec<u64>>>,
}

impl RootCache {
    pub fn new(f: CubicPoly) -> Self {
        Self {
            f,
            table: RwLock::new(HashMap::new()),
        }
    }

    pub fn poly(&self) -> &CubicPoly {
        &self.f
    }

    pub fn roots(&self, p: u64) -> Result<Vec<u64>, IdealError> {
        if let Some(r) = self.table.read().unwrap().get(&p) {
            return Ok(r.clone());
        }
        let r = roots_mod_p(&self.f, p)?;
        self.table.write().unwrap().entry(p).or_insert_with(|| r.clone());
        Ok(r)
    }

    pub fn len(&self) -> usize {
        self.table.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingType {
    Inert,
    OneRoot,
    Split,
    Ramified,
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Inert => "inert",
            Self::OneRoot => "one_root",
            Self::Split => "split",
            Self::Ramified => "ramified",
        })
    }
}

pub fn divides_disc(f: &CubicPoly, p: u64) -> bool {
    (f.disc() % BigInt::from(p)).is_zero()
}

pub fn splitting_type(f: &CubicPoly, p: u64) -> Result<SplittingType, IdealError> {
    check_prime(p)?;
    if divides_disc(f, p) {
        return Ok(SplittingType::Ramified);
    }
    Ok(match root_count(f, p)? {
        0 => SplittingType::Inert,
        1 => SplittingType::OneRoot,
        3 => SplittingType::Split,
        n => unreachable!("unramified cubic with {n} distinct roots"),
    })
}

/// The unique `a_k ≡ a (mod p)` in `[0, p^k)` with `f(a_k) ≡ 0 (mod p^k)`.
pub fn hensel_lift(f: &CubicPoly, p: u64, a: u64, k: u32) -> Result<BigInt, IdealError> {
    check_prime(p)?;
    if k == 0 {
        return Err(IdealError::ZeroExponent);
    }
    let pb = BigInt::from(p);
    let a_big = BigInt::from(a);
    if a >= p || !modulo(&f.eval(&a_big), &pb).is_zero() {
        return Err(IdealError::NotARoot { p, a });
    }
    if modulo(&f.eval_derivative(&a_big), &pb).is_zero() {
        return Err(IdealError::NonSimpleRoot { p, a });
    }
    if divides_disc(f, p) {
        return Err(IdealError::Ramified { p });
    }
    Ok(lift_simple(f, &pb, a_big, k))
}

// Newton iteration, doubling the precision each step.
fn lift_simple(f: &CubicPoly, p: &BigInt, mut x: BigInt, k: u32) -> BigInt {
    let target = p.pow(k);
    let mut prec = 1u32;
    while prec < k {
        prec = (2 * prec).min(k);
        let m = p.pow(prec);
        let d = mod_inverse(&f.eval_derivative(&x), &m).expect("simple root");
        x = modulo(&(&x - f.eval(&x) * d), &m);
    }
    modulo(&x, &target)
}

/// `P = (p, root − r)`, a first-degree prime of norm `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimeIdealFD {
    pub p: u64,
    pub root: u64,
}

impl PrimeIdealFD {
    pub fn new(f: &CubicPoly, p: u64, root: u64) -> Result<Self, IdealError> {
        check_prime(p)?;
        if root >= p || !modulo(&f.eval(&root.into()), &p.into()).is_zero() {
            return Err(IdealError::NotARoot { p, a: root });
        }
        Ok(Self { p, root })
    }

    /// Whether `α ∈ P^k`.
    pub fn divides_to(&self, f: &CubicPoly, a: &RingElem, k: u32) -> Result<bool, IdealError> {
        let ak = hensel_lift(f, self.p, self.root, k)?;
        let pk = BigInt::from(self.p).pow(k);
        Ok(modulo(&a.eval_at(&ak), &pk).is_zero())
    }
}

impl fmt::Display for PrimeIdealFD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} - r)", self.p, self.root)
    }
}

/// A product of first-degree prime-ideal powers, factors sorted by `(p, root)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealFD {
    pub factors: Vec<(PrimeIdealFD, u32)>,
    #[serde(serialize_with = "ser_big")]
    pub norm: BigInt,
}

impl IdealFD {
    /// The unit ideal.
    pub fn one() -> Self {
        Self {
            factors: Vec::new(),
            norm: BigInt::one(),
        }
    }

    /// Builds the product, merging repeated primes.
    pub fn new(f: &CubicPoly, factors: &[(u64, u64, u32)]) -> Result<Self, IdealError> {
        let mut merged: Vec<(PrimeIdealFD, u32)> = Vec::new();
        for &(p, root, e) in factors {
            if e == 0 {
                return Err(IdealError::ZeroExponent);
            }
            let pr = PrimeIdealFD::new(f, p, root)?;
            match merged.iter_mut().find(|(q, _)| *q == pr) {
                Some((_, k)) => *k += e,
                None => merged.push((pr, e)),
            }
        }
        merged.sort();
        Ok(Self::from_sorted(merged))
    }

    fn from_sorted(factors: Vec<(PrimeIdealFD, u32)>) -> Self {
        let norm = factors
            .iter()
            .map(|(pr, e)| BigInt::from(pr.p).pow(*e))
            .product();
        Self { factors, norm }
    }

    pub fn mul(&self, other: &IdealFD) -> IdealFD {
        let mut merged = self.factors.clone();
        for &(pr, e) in &other.factors {
            match merged.iter_mut().find(|(q, _)| *q == pr) {
                Some((_, k)) => *k += e,
                None => merged.push((pr, e)),
            }
        }
        merged.sort();
        Self::from_sorted(merged)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|(pr, _)| pr.p)
    }

    fn check_unramified(&self, f: &CubicPoly) -> Result<(), IdealError> {
        match self.primes().find(|&p| divides_disc(f, p)) {
            Some(p) => Err(IdealError::Ramified { p }),
            None => Ok(()),
        }
    }

    /// Whether `α ∈ I`.
    pub fn contains(&self, f: &CubicPoly, a: &RingElem) -> Result<bool, IdealError> {
        for (pr, e) in &self.factors {
            if !pr.divides_to(f, a, *e)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for IdealFD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("(1)");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(pr, e)| if *e == 1 { pr.to_string() } else { format!("{pr}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// `n − r ∈ I ⟺ n ≡ k (mod modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct KClass {
    #[serde(serialize_with = "ser_big")]
    pub k: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub modulus: BigInt,
}

impl KClass {
    pub fn contains(&self, n: &BigInt) -> bool {
        modulo(&(n - &self.k), &self.modulus).is_zero()
    }
}

/// `#{n mod N(I) : I | n − r}`, which is 0 or 1 away from the discriminant.
pub fn rho(f: &CubicPoly, ideal: &IdealFD) -> Result<u8, IdealError> {
    ideal.check_unramified(f)?;
    let same_p_twice = ideal.factors.windows(2).any(|w| w[0].0.p == w[1].0.p);
    Ok(if same_p_twice { 0 } else { 1 })
}

pub fn k_of_ideal(f: &CubicPoly, ideal: &IdealFD) -> Result<KClass, IdealError> {
    if rho(f, ideal)? == 0 {
        let p = ideal.factors.windows(2).find(|w| w[0].0.p == w[1].0.p).unwrap()[0].0.p;
        return Err(IdealError::RhoZero { p });
    }
    let mut k = BigInt::zero();
    let mut m = BigInt::one();
    for (pr, e) in &ideal.factors {
        let lift = hensel_lift(f, pr.p, pr.root, *e)?;
        let pe = BigInt::from(pr.p).pow(*e);
        (k, m) = crt_pair(&k, &m, &lift, &pe).expect("distinct primes are coprime");
    }
    Ok(KClass { k, modulus: m })
}

/// `k_α ≡ B23 · B13⁻¹ (mod |N(α)|)`.
pub fn k_alpha_cofactor(f: &CubicPoly, a: &RingElem) -> Result<KClass, IdealError> {
    let n = f.norm(a).abs();
    if n.is_zero() {
        return Err(IdealError::ZeroElement);
    }
    let g = n.gcd(f.disc());
    if !g.is_one() {
        let p = arith::smallest_prime_factor(g.to_u128().unwrap()).unwrap() as u64;
        return Err(IdealError::Ramified { p });
    }
    let b = f.cofactors(a);
    let inv = mod_inverse(&b[0][2], &n).ok_or(IdealError::NotInvertible)?;
    Ok(KClass {
        k: modulo(&(&b[1][2] * inv), &n),
        modulus: n,
    })
}

/// Whether `(n − r)/α ∈ ℤ[r]`.
pub fn divides(f: &CubicPoly, a: &RingElem, n: &BigInt) -> bool {
    f.divides_elem(a, &RingElem::linear(n.clone()))
}

/// Factorization of `(α)` into first-degree primes, via valuations at each
/// root above each prime dividing `N(α)`.
pub fn factor_principal(f: &CubicPoly, a: &RingElem) -> Result<IdealFD, IdealError> {
    let n = f.norm(a).abs();
    if n.is_zero() {
        return Err(IdealError::ZeroElement);
    }
    let n128 = n.to_u128().ok_or_else(|| IdealError::NormTooLarge(n.clone()))?;
    let mut factors = Vec::new();
    for (p, e) in arith::factor(n128) {
        let p = u64::try_from(p).map_err(|_| IdealError::NormTooLarge(n.clone()))?;
        if divides_disc(f, p) {
            return Err(IdealError::Ramified { p });
        }
        let mut found = 0u32;
        for root in roots_unchecked(f, p) {
            let pr = PrimeIdealFD { p, root };
            let mut v = 0;
            while v < e && pr.divides_to(f, a, v + 1)? {
                v += 1;
            }
            if v > 0 {
                factors.push((pr, v));
                found += v;
            }
        }
        if found != e {
            return Err(IdealError::NotFirstDegree { p });
        }
    }
    factors.sort();
    Ok(IdealFD::from_sorted(factors))
}

/// Number of prime ideals of norm at most `x`, away from primes dividing the
/// discriminant.
pub fn count_prime_ideals(f: &CubicPoly, x: u64) -> u64 {
    let x128 = x as u128;
    arith::primes_up_to(x)
        .into_iter()
        .filter(|&p| !divides_disc(f, p))
        .map(|p| {
            let p2 = (p as u128) * (p as u128);
            match root_count(f, p).expect("sieved prime") {
                3 => 3,
                1 => 1 + (p2 <= x128) as u64,
                _ => (p2 * p as u128 <= x128) as u64,
            }
        })
        .sum()
}

/// `#{(a, b) ∈ [A, A+M] × [B, B+M] : R | a − b·r}`, optionally with `gcd(a, b) = 1`.
pub fn lattice_pair_count(
    f: &CubicPoly,
    ideal: &IdealFD,
    a_lo: i64,
    b_lo: i64,
    m: u64,
    coprime_only: bool,
) -> Result<u64, IdealError> {
    let kc = if ideal.factors.is_empty() {
        KClass {
            k: BigInt::zero(),
            modulus: BigInt::one(),
        }
    } else {
        k_of_ideal(f, ideal)?
    };
    let nr = kc.modulus.to_i128().ok_or_else(|| IdealError::NormTooLarge(kc.modulus.clone()))?;
    let k = kc.k.to_i128().unwrap();
    let m = m as i128;
    let (a_lo, b_lo) = (a_lo as i128, b_lo as i128);
    let a_hi = a_lo + m;
    let mut total = 0u64;
    for b in b_lo..=b_lo + m {
        let t = (b * k).rem_euclid(nr);
        // first a >= a_lo with a ≡ t
        let first = a_lo + (t - a_lo).rem_euclid(nr);
        if first > a_hi {
            continue;
        }
        if coprime_only {
            let mut a = first;
            while a <= a_hi {
                if a.gcd(&b) == 1 {
                    total += 1;
                }
                a += nr;
            }
        } else {
            total += ((a_hi - first) / nr + 1) as u64;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x3p2() -> CubicPoly {
        CubicPoly::from_i64(0, 0, 2).unwrap()
    }

    fn brute_roots(f: &CubicPoly, p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        (0..p)
            .filter(|&x| modulo(&f.eval(&x.into()), &pb).is_zero())
            .collect()
    }

    #[test]
    fn roots_examples() {
        let f = x3p2();
        assert_eq!(roots_mod_p(&f, 5).unwrap(), vec![2]);
        assert_eq!(roots_mod_p(&f, 31).unwrap(), vec![11, 24, 27]);
        assert_eq!(roots_mod_p(&f, 7).unwrap(), Vec::<u64>::new());
        assert_eq!(roots_mod_p(&f, 9), Err(IdealError::NotPrime(9)));
    }

    #[test]
    fn gcd_method_matches_brute_force() {
        let polys = [(0, 0, 2), (0, -1, -1), (1, -2, -1), (3, -7, 11), (0, 5, -3)];
        for (a, b, c) in polys {
            let f = CubicPoly::from_i64(a, b, c).unwrap();
            for p in arith::primes_up_to(5000) {
                let mut out = Vec::new();
                split_roots(&linear_part(&f, p), p, &mut out);
                out.sort_unstable();
                assert_eq!(out, brute_roots(&f, p), "{f} mod {p}");
            }
        }
    }

    #[test]
    fn large_prime_roots() {
        let f = x3p2();
        // cubing is a bijection mod p ≡ 2 (mod 3); otherwise 0 or 3 roots
        for (p, counts) in [(1_000_000_007u64, &[1usize][..]), (1_000_000_009, &[0, 3][..])] {
            let roots = roots_mod_p(&f, p).unwrap();
            let pb = BigInt::from(p);
            for r in &roots {
                assert!(modulo(&f.eval(&(*r).into()), &pb).is_zero());
            }
            assert!(counts.contains(&roots.len()), "{p}: {roots:?}");
        }
    }

    #[test]
    fn splitting_examples() {
        let f = x3p2();
        assert_eq!(splitting_type(&f, 31).unwrap(), SplittingType::Split);
        assert_eq!(splitting_type(&f, 2).unwrap(), SplittingType::Ramified);
        assert_eq!(splitting_type(&f, 7).unwrap(), SplittingType::Inert);
        assert_eq!(splitting_type(&f, 5).unwrap(), SplittingType::OneRoot);
    }

    #[test]
    fn hensel_examples() {
        let f = x3p2();
        assert_eq!(hensel_lift(&f, 5, 2, 2).unwrap(), BigInt::from(22));
        assert_eq!(hensel_lift(&f, 5, 2, 1).unwrap(), BigInt::from(2));
        let l = hensel_lift(&f, 31, 11, 2).unwrap();
        let brute: Vec<u64> = (0..31u64)
            .map(|t| 11 + 31 * t)
            .filter(|&x| modulo(&f.eval(&x.into()), &961.into()).is_zero())
            .collect();
        assert_eq!(brute.len(), 1);
        assert_eq!(l, BigInt::from(brute[0]));
        assert_eq!(hensel_lift(&f, 5, 3, 2), Err(IdealError::NotARoot { p: 5, a: 3 }));
        assert_eq!(hensel_lift(&f, 3, 1, 2), Err(IdealError::NonSimpleRoot { p: 3, a: 1 }));
        let g = CubicPoly::from_i64(0, -1, -1).unwrap();
        let simple = roots_mod_p(&g, 23)
            .unwrap()
            .into_iter()
            .find(|&a| !modulo(&g.eval_derivative(&a.into()), &23.into()).is_zero())
            .unwrap();
        assert_eq!(hensel_lift(&g, 23, simple, 2), Err(IdealError::Ramified { p: 23 }));
    }

    #[test]
    fn rho_and_k_examples() {
        let f = x3p2();
        let i = IdealFD::new(&f, &[(31, 11, 1), (31, 24, 1)]).unwrap();
        assert_eq!(rho(&f, &i).unwrap(), 0);
        assert_eq!(k_of_ideal(&f, &i), Err(IdealError::RhoZero { p: 31 }));
        let i = IdealFD::new(&f, &[(5, 2, 2)]).unwrap();
        assert_eq!(rho(&f, &i).unwrap(), 1);
        assert_eq!(k_of_ideal(&f, &i).unwrap().k, BigInt::from(22));
        let i = IdealFD::new(&f, &[(5, 2, 1), (31, 11, 1)]).unwrap();
        assert_eq!(rho(&f, &i).unwrap(), 1);
        let kc = k_of_ideal(&f, &i).unwrap();
        assert_eq!((kc.k, kc.modulus), (BigInt::from(42), BigInt::from(155)));
        let ram = IdealFD::new(&f, &[(2, 0, 1)]).unwrap();
        assert_eq!(rho(&f, &ram), Err(IdealError::Ramified { p: 2 }));
        assert_eq!(i.to_string(), "(5, 2 - r)*(31, 11 - r)");
    }

    #[test]
    fn k_alpha_examples() {
        let f = x3p2();
        let kc = k_alpha_cofactor(&f, &RingElem::new(3, 1, 0)).unwrap();
        assert_eq!((kc.k, kc.modulus), (BigInt::from(22), BigInt::from(25)));
        for n in [3i64, 5, 11, 101] {
            let kc = k_alpha_cofactor(&f, &RingElem::linear(n)).unwrap();
            assert_eq!(kc.k, modulo(&n.into(), &f.eval(&n.into())));
        }
        assert_eq!(k_alpha_cofactor(&f, &RingElem::r()), Err(IdealError::Ramified { p: 2 }));
    }

    #[test]
    fn divides_examples() {
        let f = x3p2();
        assert!(divides(&f, &RingElem::r(), &4.into()));
        assert!(!divides(&f, &RingElem::r(), &3.into()));
        for n in -20..20 {
            assert!(divides(&f, &RingElem::one(), &n.into()));
        }
        let a = RingElem::new(3, 1, 0);
        for n in -100..100i64 {
            assert_eq!(divides(&f, &a, &n.into()), n.rem_euclid(25) == 22);
        }
    }

    #[test]
    fn factor_principal_examples() {
        let f = x3p2();
        let i = factor_principal(&f, &RingElem::new(3, 1, 0)).unwrap();
        assert_eq!(i, IdealFD::new(&f, &[(5, 2, 2)]).unwrap());
        // 7 is inert, so (7) is not first degree
        assert_eq!(
            factor_principal(&f, &RingElem::new(7, 0, 0)),
            Err(IdealError::NotFirstDegree { p: 7 })
        );
        assert_eq!(factor_principal(&f, &RingElem::one()).unwrap(), IdealFD::one());
    }

    #[test]
    fn prime_ideal_counts() {
        let f = x3p2();
        assert_eq!(count_prime_ideals(&f, 2), 0);
        // norm 5 (one root), 5^2 > 10; 7 inert (343 > 10)
        assert_eq!(count_prime_ideals(&f, 10), 1);
        let mut last = 0;
        for x in (2..3000).step_by(37) {
            let c = count_prime_ideals(&f, x);
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn lattice_examples() {
        let f = x3p2();
        let one = IdealFD::one();
        assert_eq!(lattice_pair_count(&f, &one, 0, 0, 10, false).unwrap(), 121);
        let r = IdealFD::new(&f, &[(5, 2, 1)]).unwrap();
        assert_eq!(lattice_pair_count(&f, &r, 0, 0, 24, false).unwrap(), 125);
        let brute = (0..=24i64)
            .flat_map(|a| (0..=24i64).map(move |b| (a, b)))
            .filter(|&(a, b)| (a - 2 * b).rem_euclid(5) == 0 && a.gcd(&b) == 1)
            .count() as u64;
        assert_eq!(lattice_pair_count(&f, &r, 0, 0, 24, true).unwrap(), brute);
        let bad = IdealFD::new(&f, &[(31, 11, 1), (31, 24, 1)]).unwrap();
        assert!(lattice_pair_count(&f, &bad, 0, 0, 5, false).is_err());
    }

    #[test]
    fn cache_is_consistent() {
        let cache = RootCache::new(x3p2());
        assert!(cache.is_empty());
        assert_eq!(cache.roots(31).unwrap(), vec![11, 24, 27]);
        assert_eq!(cache.roots(31).unwrap(), vec![11, 24, 27]);
        assert_eq!(cache.len(), 1);
    }

    fn fields() -> Vec<CubicPoly> {
        [(0, 0, 2), (0, -1, -1), (1, -2, -1), (2, 3, -5), (-1, 4, 11)]
            .into_iter()
            .map(|(a, b, c)| CubicPoly::from_i64(a, b, c).unwrap())
            .collect()
    }

    proptest! {
        #[test]
        fn k_class_matches_divides(a0 in -40i64..40, a1 in -40i64..40, a2 in -40i64..40, k in 0usize..5) {
            let f = &fields()[k];
            let a = RingElem::new(a0, a1, a2);
            if let Ok(kc) = k_alpha_cofactor(f, &a) {
                let n_abs = kc.modulus.to_i64().unwrap();
                for n in 0..(3 * n_abs).min(400) {
                    let n = BigInt::from(n);
                    prop_assert_eq!(divides(f, &a, &n), kc.contains(&n));
                }
                if let Ok(i) = factor_principal(f, &a) {
                    prop_assert_eq!(k_of_ideal(f, &i).unwrap(), kc);
                }
            }
        }

        #[test]
        fn lifts_are_roots(p_idx in 0usize..200, k in 1u32..6, f_idx in 0usize..5) {
            let f = &fields()[f_idx];
            let p = arith::primes_up_to(1300)[p_idx];
            prop_assume!(!divides_disc(f, p));
            for a in roots_mod_p(f, p).unwrap() {
                let l = hensel_lift(f, p, a, k).unwrap();
                let pk = BigInt::from(p).pow(k);
                prop_assert!(modulo(&f.eval(&l), &pk).is_zero());
                prop_assert_eq!(modulo(&l, &p.into()), BigInt::from(a));
            }
        }
    }
}
