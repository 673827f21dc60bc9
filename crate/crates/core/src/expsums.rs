//! Exponential sums attached to the `k_α` classes: `Σⱼ(n)`, `Eⱼ(n)`, the
//! error term `E(α)`, the Fourier cut-off of `ψ`, and an incomplete
//! rational sum `Σ e(h·f(n)·ḡ(n)/q)` with its envelope.
//!
//! Phases are reduced as exact residues before conversion to `f64`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{self, mod_inverse, modulo};
use crate::cubicring::{CubicPoly, RingElem};
use crate::primeideals::{k_alpha_cofactor, IdealError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpSumError {
    #[error("{count} element(s) not admissible, first {first}: {reason}")]
    Inadmissible {
        count: usize,
        first: String,
        reason: String,
    },
    #[error("gcd(B13, q) = {gcd} for {alpha}")]
    GcdFailure { alpha: String, gcd: String },
    #[error("q(a1, a2) = 0 for {0}")]
    QZero(String),
    #[error("modulus {0} is not squarefree")]
    NotSquarefree(u64),
    #[error("modulus must be at least 2")]
    ModulusTooSmall,
    #[error("H must be at least 1")]
    BadCutoff,
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

/// `e(x) = exp(2πi x)` for `x = num / den`, reduced exactly first.
pub fn e_frac(num: &BigInt, den: &BigInt) -> Complex64 {
    let d = den.abs();
    let r = modulo(&(num * den.signum()), &d);
    let t = ratio(&r, &d);
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

fn ratio(a: &BigInt, b: &BigInt) -> f64 {
    match (a.to_f64(), b.to_f64()) {
        (Some(x), Some(y)) if y.is_finite() && x.is_finite() => x / y,
        _ => num_rational::BigRational::new(a.clone(), b.clone()).to_f64().unwrap_or(0.0),
    }
}

fn ser_c64<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Deterministic pairwise sum.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::zero(),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpSumResult {
    /// `[re, im]`.
    #[serde(serialize_with = "ser_c64")]
    pub value: Complex64,
    pub abs: f64,
    pub term_count: usize,
    pub n: i64,
    pub j: i64,
    pub x: u64,
}

impl ExpSumResult {
    fn new(terms: &[Complex64], n: i64, j: i64, x: u64) -> Self {
        let value = pairwise_sum(terms);
        Self {
            value,
            abs: value.norm(),
            term_count: terms.len(),
            n,
            j,
            x,
        }
    }
}

/// Per-element data used by the sums: `N(α)`, `k_α`, `q`, `U = a2²`, the
/// cofactors `B13`, `B23`, and `Ū = U·B13⁻¹ mod q`.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaData {
    pub alpha: RingElem,
    #[serde(serialize_with = "crate::cubicring::ser_big")]
    pub norm: BigInt,
    #[serde(serialize_with = "crate::cubicring::ser_big")]
    pub k: BigInt,
    #[serde(serialize_with = "crate::cubicring::ser_big")]
    pub q: BigInt,
    #[serde(serialize_with = "crate::cubicring::ser_big")]
    pub u: BigInt,
    #[serde(serialize_with = "crate::cubicring::ser_big")]
    pub b13: BigInt,
    #[serde(serialize_with = "crate::cubicring::ser_big")]
    pub b23: BigInt,
    #[serde(serialize_with = "crate::cubicring::ser_big")]
    pub u_bar: BigInt,
}

impl AlphaData {
    pub fn new(f: &CubicPoly, a: &RingElem) -> Result<Self, ExpSumError> {
        let kc = k_alpha_cofactor(f, a)?;
        let norm = f.norm(a);
        let b = f.cofactors(a);
        let q = f.elim_q(&a.a1, &a.a2);
        if q.is_zero() {
            return Err(ExpSumError::QZero(a.to_string()));
        }
        let u = &a.a2 * &a.a2;
        let (b13, b23) = (b[0][2].clone(), b[1][2].clone());
        let g = b13.gcd(&q);
        if !g.is_one() {
            return Err(ExpSumError::GcdFailure {
                alpha: a.to_string(),
                gcd: g.to_string(),
            });
        }
        let u_bar = modulo(&(&u * mod_inverse(&b13, &q).unwrap()), &q.abs());
        Ok(Self {
            alpha: a.clone(),
            norm,
            k: kc.k,
            q,
            u,
            b13,
            b23,
            u_bar,
        })
    }

    /// `E = −U/(q·B13) + B23/(N(α)·B13)`.
    pub fn error_term(&self) -> f64 {
        -ratio(&self.u, &(&self.q * &self.b13)) + ratio(&self.b23, &(&self.norm * &self.b13))
    }

    /// `|U/(q·B13)| + |B23/(N(α)·B13)|`.
    pub fn error_bound(&self) -> f64 {
        ratio(&self.u, &(&self.q * &self.b13)).abs() + ratio(&self.b23, &(&self.norm * &self.b13)).abs()
    }

    /// `|e(k_α/N(α)) − e(Ū/q + E)|`.
    pub fn lemma_residual(&self) -> f64 {
        let lhs = e_frac(&self.k, &self.norm);
        let rhs = e_frac(&self.u_bar, &self.q) * Complex64::from_polar(1.0, 2.0 * PI * self.error_term());
        (lhs - rhs).norm()
    }
}

fn admissible_set(f: &CubicPoly, set: &[RingElem]) -> Result<Vec<AlphaData>, ExpSumError> {
    let data: Vec<Result<AlphaData, ExpSumError>> = set.par_iter().map(|a| AlphaData::new(f, a)).collect();
    let bad: Vec<(usize, &ExpSumError)> = data
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().err().map(|e| (i, e)))
        .collect();
    if let Some(&(i, e)) = bad.first() {
        return Err(ExpSumError::Inadmissible {
            count: bad.len(),
            first: set[i].to_string(),
            reason: e.to_string(),
        });
    }
    Ok(data.into_iter().map(Result::unwrap).collect())
}

/// `Σⱼ(n) = Σ_α e_{N(α)}(n(jX − k_α))`.
pub fn sigma_sum(f: &CubicPoly, set: &[RingElem], n: i64, j: i64, x: u64) -> Result<ExpSumResult, ExpSumError> {
    let data = admissible_set(f, set)?;
    Ok(sigma_from(&data, n, j, x))
}

pub fn sigma_from(data: &[AlphaData], n: i64, j: i64, x: u64) -> ExpSumResult {
    let jx = BigInt::from(j) * BigInt::from(x);
    let terms: Vec<Complex64> = data
        .par_iter()
        .map(|d| e_frac(&(BigInt::from(n) * (&jx - &d.k)), &d.norm))
        .collect();
    ExpSumResult::new(&terms, n, j, x)
}

/// `Eⱼ(n) = Σ_α e(njX/N(α) − n·Ū/q)`.
pub fn e_sum(f: &CubicPoly, set: &[RingElem], n: i64, j: i64, x: u64) -> Result<ExpSumResult, ExpSumError> {
    let data = admissible_set(f, set)?;
    Ok(e_from(&data, n, j, x))
}

pub fn e_from(data: &[AlphaData], n: i64, j: i64, x: u64) -> ExpSumResult {
    let njx = BigInt::from(n) * BigInt::from(j) * BigInt::from(x);
    let terms: Vec<Complex64> = data
        .par_iter()
        .map(|d| e_frac(&njx, &d.norm) * e_frac(&(-BigInt::from(n) * &d.u_bar), &d.q))
        .collect();
    ExpSumResult::new(&terms, n, j, x)
}

/// `Σ_α 2π|n|·(|U/(qB13)| + |B23/(N(α)B13)|)`, bounding `|Σⱼ(n) − Eⱼ(n)|`.
pub fn sigma_e_bound(data: &[AlphaData], n: i64) -> f64 {
    data.iter().map(|d| 2.0 * PI * (n as f64).abs() * d.error_bound()).sum()
}

pub fn error_term_e(f: &CubicPoly, a: &RingElem) -> Result<f64, ExpSumError> {
    Ok(AlphaData::new(f, a)?.error_term())
}

/// `ψ(t) = t − ⌊t⌋ − 1/2`; equal to `−1/2` at integers.
pub fn psi(t: f64) -> f64 {
    t - t.floor() - 0.5
}

/// Distance to the nearest integer.
pub fn dist_to_int(t: f64) -> f64 {
    (t - t.round()).abs()
}

/// `|ψ(t) + Σ_{n≤H} sin(2πnt)/(πn)|`.
pub fn psi_residual(t: f64, h: u64) -> Result<f64, ExpSumError> {
    if h == 0 {
        return Err(ExpSumError::BadCutoff);
    }
    let frac = t - t.floor();
    let mut s = 0.0;
    for n in 1..=h {
        let phase = (n as f64 * frac).fract();
        s += (2.0 * PI * phase).sin() / (PI * n as f64);
    }
    Ok((psi(t) + s).abs())
}

/// `min{1, 1/(H‖t‖)}`.
pub fn psi_envelope(t: f64, h: u64) -> f64 {
    let d = dist_to_int(t);
    if d == 0.0 {
        1.0
    } else {
        (1.0 / (h as f64 * d)).min(1.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiSweep {
    pub samples: usize,
    pub max_h: u64,
    /// `max residual / envelope` over all samples.
    pub constant: f64,
    /// The same maximum over each half of the samples.
    pub half_constants: [f64; 2],
    /// `max / min` of the two halves.
    pub drift: f64,
}

/// Measures the implied constant in the `ψ` cut-off over random `(t, H)`.
pub fn psi_constant_sweep(samples: usize, max_h: u64, seed: u64) -> Result<PsiSweep, ExpSumError> {
    if max_h == 0 {
        return Err(ExpSumError::BadCutoff);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, u64)> = (0..samples).map(|_| (rng.gen::<f64>(), rng.gen_range(1..=max_h))).collect();
    let ratios: Vec<f64> = pts
        .par_iter()
        .map(|&(t, h)| psi_residual(t, h).unwrap() / psi_envelope(t, h))
        .collect();
    let half = |r: &[f64]| r.iter().cloned().fold(0.0, f64::max);
    let (a, b) = ratios.split_at(samples / 2);
    let half_constants = [half(a), half(b)];
    let lo = half_constants[0].min(half_constants[1]);
    Ok(PsiSweep {
        samples,
        max_h,
        constant: half(&ratios),
        half_constants,
        drift: if lo > 0.0 { half_constants[0].max(half_constants[1]) / lo } else { f64::INFINITY },
    })
}

/// Integer polynomial, coefficients from the constant term up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntPoly(pub Vec<i64>);

impl IntPoly {
    pub fn eval_mod(&self, x: i64, m: u64) -> u64 {
        let m = m as i128;
        let x = (x as i128).rem_euclid(m);
        self.0
            .iter()
            .rev()
            .fold(0i128, |acc, &c| (acc * x + c as i128).rem_euclid(m)) as u64
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|&c| c != 0).unwrap_or(0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RationalSumReport {
    pub sum: ExpSumResult,
    pub q: u64,
    pub q_parts: Vec<u64>,
    pub a: i64,
    pub b: u64,
    pub h: i64,
    pub eps: f64,
    /// Right-hand side with implied constant 1.
    pub envelope: f64,
    /// `|sum| / envelope`.
    pub ratio: f64,
}

/// `Σ_{A<n≤A+B, (v(n)g(n), q)=1} e(h·f(n)·ḡ(n)/q)` with `q = q₀⋯q_k`, and
/// the envelope `q^ε·B·((Δ/q₀)^{1/2^{k+1}} + (q₀/(ΔB²))^{1/2^{k+1}} +
/// Σⱼ (q_{k+1−j}/B)^{1/2^j})`, `Δ = gcd(q₀, h)`.
#[allow(clippy::too_many_arguments)]
pub fn incomplete_rational_sum(
    fp: &IntPoly,
    gp: &IntPoly,
    vp: &IntPoly,
    q_parts: &[u64],
    a: i64,
    b: u64,
    h: i64,
    eps: f64,
) -> Result<RationalSumReport, ExpSumError> {
    let q: u64 = q_parts.iter().product();
    if q < 2 || q_parts.is_empty() {
        return Err(ExpSumError::ModulusTooSmall);
    }
    if !arith::is_squarefree(q as u128) {
        return Err(ExpSumError::NotSquarefree(q));
    }
    let qb = BigInt::from(q);
    let hq = (h as i128).rem_euclid(q as i128) as u64;
    let terms: Vec<Complex64> = (1..=b as i64)
        .into_par_iter()
        .filter_map(|i| {
            let n = a + i;
            let gv = gp.eval_mod(n, q);
            let vv = vp.eval_mod(n, q);
            if (gv as u128 * vv as u128).gcd(&(q as u128)) != 1 {
                return None;
            }
            let ginv = mod_inverse(&BigInt::from(gv), &qb).unwrap();
            let num = BigInt::from(hq) * BigInt::from(fp.eval_mod(n, q)) * ginv;
            Some(e_frac(&num, &qb))
        })
        .collect();
    let k = q_parts.len() - 1;
    let q0 = q_parts[0] as f64;
    let delta = q_parts[0].gcd(&(h.unsigned_abs())) as f64;
    let bf = b as f64;
    let top = 1.0 / 2f64.powi(k as i32 + 1);
    let mut inner = (delta / q0).powf(top) + (q0 / (delta * bf * bf)).powf(top);
    for j in 1..=k {
        inner += (q_parts[k + 1 - j] as f64 / bf).powf(1.0 / 2f64.powi(j as i32));
    }
    let envelope = (q as f64).powf(eps) * bf * inner;
    let sum = ExpSumResult::new(&terms, h, 0, 0);
    let ratio = sum.abs / envelope;
    Ok(RationalSumReport {
        sum,
        q,
        q_parts: q_parts.to_vec(),
        a,
        b,
        h,
        eps,
        envelope,
        ratio,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KloostermanRow {
    pub a1: i64,
    pub a2: i64,
    pub q: u64,
    pub q_parts: Vec<u64>,
    pub h: i64,
    pub abs: f64,
    pub terms: usize,
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KloostermanSweep {
    pub rows: Vec<KloostermanRow>,
    pub max_ratio: f64,
    pub attempts: usize,
}

/// For random `(a1, a2)` with `q(a1, a2)` squarefree, `P⁻(q) > floor` and
/// `gcd(a1a2, q) = 1`, sums `e(h·U·B̄13/q)` over `a0 ∈ (A, A+B]` with `k = 1`
/// and `q = q₀·q₁` split at its smallest prime.
pub fn kloosterman_sweep(
    f: &CubicPoly,
    rows: usize,
    coord_bound: i64,
    floor: u64,
    seed: u64,
) -> Result<KloostermanSweep, ExpSumError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let small = f.small().ok_or(ExpSumError::ModulusTooSmall)?;
    let (c1, c2) = (small.c1 as i64, small.c2 as i64);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < rows && attempts < 1000 * rows.max(1) {
        attempts += 1;
        let a1 = rng.gen_range(-coord_bound..=coord_bound);
        let a2 = rng.gen_range(-coord_bound..=coord_bound);
        let q = small.elim_q(a1, a2).unsigned_abs();
        if q < 2 || q > u64::MAX as u128 || (a1 as i128 * a2 as i128).unsigned_abs().gcd(&q) != 1 {
            continue;
        }
        let fac = arith::factor(q);
        if fac.len() < 2 || fac.iter().any(|&(_, e)| e > 1) || fac[0].0 <= floor as u128 {
            continue;
        }
        let q0 = fac[0].0 as u64;
        let parts = vec![q0, q as u64 / q0];
        // U = a2², B13 = −a2·a0 + (a2²c1 − a1a2c2 + a1²) as polynomials in a0
        let u = IntPoly(vec![a2 * a2]);
        let b13 = IntPoly(vec![a2 * a2 * c1 - a1 * a2 * c2 + a1 * a1, -a2]);
        let h = rng.gen_range(1..=q0 as i64 - 1);
        let a = rng.gen_range(-coord_bound..=coord_bound);
        let b = 2 * coord_bound as u64;
        let r = incomplete_rational_sum(&u, &b13, &IntPoly(vec![1]), &parts, a, b, h, 0.0)?;
        out.push(KloostermanRow {
            a1,
            a2,
            q: q as u64,
            q_parts: parts,
            h,
            abs: r.sum.abs,
            terms: r.sum.term_count,
            envelope: r.envelope,
            ratio: r.ratio,
        });
    }
    let max_ratio = out.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(KloostermanSweep {
        rows: out,
        max_ratio,
        attempts,
    })
}

/// Random elements with coordinates in `[-bound, bound]` that are admissible
/// for both `k_alpha_cofactor` and Lemma-style `(B13, q) = 1`.
pub fn sample_admissible(f: &CubicPoly, count: usize, bound: i64, seed: u64) -> Vec<AlphaData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 10_000 * count.max(1) {
        tries += 1;
        let a = RingElem::new(
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
        );
        if let Ok(d) = AlphaData::new(f, &a) {
            out.push(d);
        }
    }
    out
}
