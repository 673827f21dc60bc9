//! Lower-bound sieve weights, the polynomial-value sieve over `f(n)`, the
//! density scanner for `P⁺(f(n)) > n^{1+c}`, and the toy-scale
//! decomposition `S = X·S₀ + S₁`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::cubicring::{CubicPoly, RingElem};
use crate::primeideals::{self, divides_disc, hensel_lift, roots_mod_p, IdealError};
use crate::units::DomainDescriptor;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SieveError {
    #[error("sieving limit D = {0} is below 2")]
    LimitTooSmall(u64),
    #[error("need 2 <= z <= D, got z = {z}, D = {d}")]
    BadLevel { z: u64, d: u64 },
    #[error("empty range: need n_hi > n_lo >= 1")]
    EmptyRange,
    #[error("X = {0} is below 1000")]
    XTooSmall(u64),
    #[error("threshold c = {0} outside [0, 2]")]
    BadThreshold(f64),
    #[error("|f({0})| does not fit in 128 bits")]
    ValueTooLarge(i128),
    #[error("polynomial coefficients too large")]
    CoefficientsTooLarge,
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("toy parameters: {0}")]
    BadToy(String),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

/// `λ_d` on squarefree `d` with all prime factors below `z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SieveWeights {
    pub d_limit: u64,
    pub z: u64,
    pub weights: BTreeMap<u64, i8>,
}

impl SieveWeights {
    pub fn get(&self, d: u64) -> i8 {
        self.weights.get(&d).copied().unwrap_or(0)
    }

    /// `Σ_{d | g} λ_d` for squarefree `g`, by enumerating divisors of `g`.
    pub fn divisor_sum(&self, g: u64) -> i64 {
        let primes: Vec<u64> = arith::factor(g as u128).into_iter().map(|(p, _)| p as u64).collect();
        let mut total = 0i64;
        for mask in 0u32..(1 << primes.len()) {
            let d: u64 = (0..primes.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| primes[i])
                .product();
            total += self.get(d) as i64;
        }
        total
    }
}

/// Lower-bound Rosser weights: `λ_d = μ(d)` on `d = p₁⋯p_r` with
/// `z > p₁ > … > p_r` and `p₁⋯p_{m−1}·p_m³ ≤ D` for every even `m`.
/// Such `d` satisfy `d ≤ D` automatically.
pub fn rosser_weights(d_limit: u64, z: u64) -> Result<SieveWeights, SieveError> {
    if d_limit < 2 {
        return Err(SieveError::LimitTooSmall(d_limit));
    }
    if z < 2 || z > d_limit {
        return Err(SieveError::BadLevel { z, d: d_limit });
    }
    let primes: Vec<u64> = arith::primes_up_to(z - 1);
    let mut weights = BTreeMap::new();
    weights.insert(1, 1);
    // stack of (d, index bound into primes, length)
    let mut stack: Vec<(u64, usize, u32)> = vec![(1, primes.len(), 0)];
    while let Some((d, below, len)) = stack.pop() {
        for &p in primes[..below].iter() {
            let idx = primes.partition_point(|&q| q < p);
            let m = len + 1;
            let ok = if m % 2 == 0 {
                (d as u128) * (p as u128).pow(3) <= d_limit as u128
            } else {
                true
            };
            if !ok {
                continue;
            }
            let nd = d * p;
            weights.insert(nd, if m % 2 == 1 { -1 } else { 1 });
            stack.push((nd, idx, m));
        }
    }
    Ok(SieveWeights {
        d_limit,
        z,
        weights,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RosserCheck {
    pub upto: u64,
    pub checked: u64,
    pub max_abs_weight: i8,
    /// First `n ≥ 2` (z-smooth) with `Σ_{d|n} λ_d > 0`, if any.
    pub first_violation: Option<u64>,
    pub sum_at_one: i64,
    pub holds: bool,
}

/// Checks `Σ_{d|n} λ_d ≤ [n = 1]` for every `z`-smooth `n ≤ upto`.
pub fn check_rosser(w: &SieveWeights, upto: u64) -> RosserCheck {
    let n = upto as usize;
    let mut sums = vec![0i32; n + 1];
    for (&d, &l) in &w.weights {
        let d = d as usize;
        if d > n {
            continue;
        }
        let mut m = d;
        while m <= n {
            sums[m] += l as i32;
            m += d;
        }
    }
    // z-smoothness by smallest-prime-factor sieve
    let mut largest = vec![0u32; n + 1];
    for p in 2..=n {
        if largest[p] == 0 {
            let mut m = p;
            while m <= n {
                largest[m] = p as u32;
                m += p;
            }
        }
    }
    let mut checked = 0;
    let mut first_violation = None;
    for m in 2..=n {
        if (largest[m] as u64) < w.z {
            checked += 1;
            if sums[m] > 0 && first_violation.is_none() {
                first_violation = Some(m as u64);
            }
        }
    }
    let sum_at_one = if n >= 1 { sums[1] as i64 } else { 1 };
    let max_abs_weight = w.weights.values().map(|v| v.abs()).max().unwrap_or(0);
    RosserCheck {
        upto,
        checked,
        max_abs_weight,
        first_violation,
        sum_at_one,
        holds: first_violation.is_none() && sum_at_one == 1 && max_abs_weight <= 1,
    }
}

/// `f(n)` with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorizationRecord {
    pub n: u64,
    /// `|f(n)|`.
    pub value: u128,
    pub negative: bool,
    pub factors: Vec<(u128, u32)>,
    pub pplus: u128,
}

impl FactorizationRecord {
    fn from_factors(n: u64, value: u128, negative: bool, factors: Vec<(u128, u32)>) -> Self {
        let pplus = factors.last().map(|&(p, _)| p).unwrap_or(1);
        Self {
            n,
            value,
            negative,
            factors,
            pplus,
        }
    }

    pub fn recombine(&self) -> u128 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

/// Result of sieving one `n`: the small prime powers removed and what is left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFactorization {
    pub n: u64,
    pub value: u128,
    pub negative: bool,
    pub small: Vec<(u64, u32)>,
    /// Every prime factor of the cofactor exceeds the prime bound.
    pub cofactor: u128,
}

impl PartialFactorization {
    pub fn complete(self) -> FactorizationRecord {
        let mut factors: Vec<(u128, u32)> = self.small.iter().map(|&(p, e)| (p as u128, e)).collect();
        if self.cofactor > 1 {
            factors.extend(arith::factor(self.cofactor));
        }
        FactorizationRecord::from_factors(self.n, self.value, self.negative, factors)
    }
}

/// Prime progressions for `f`: for each `p ≤ bound`, the roots mod `p` and
/// their Hensel lifts to every `p^e ≤ bound²`.
#[derive(Debug, Clone)]
pub struct SieveTable {
    pub bound: u64,
    entries: Vec<SieveEntry>,
}

#[derive(Debug, Clone)]
struct SieveEntry {
    p: u64,
    ramified: bool,
    /// Per root: `(p^e, a_e)` for `e = 1, 2, …`.
    levels: Vec<Vec<(u128, u128)>>,
}

impl SieveTable {
    pub fn new(f: &CubicPoly, bound: u64) -> Self {
        let cap = (bound as u128) * (bound as u128);
        let entries = arith::primes_up_to(bound)
            .into_iter()
            .filter_map(|p| {
                let roots = roots_mod_p(f, p).expect("prime");
                if roots.is_empty() {
                    return None;
                }
                let ramified = divides_disc(f, p);
                let levels = roots
                    .iter()
                    .map(|&a| {
                        let mut out = vec![(p as u128, a as u128)];
                        if !ramified {
                            let mut e = 2;
                            while (p as u128).pow(e) <= cap {
                                let lift = hensel_lift(f, p, a, e).expect("simple root");
                                out.push(((p as u128).pow(e), lift.to_u128().unwrap()));
                                e += 1;
                            }
                        }
                        out
                    })
                    .collect();
                Some(SieveEntry { p, ramified, levels })
            })
            .collect();
        Self { bound, entries }
    }

    /// Progressions `(modulus, residue)` at level 1 for prime `p`.
    pub fn progressions(&self, p: u64) -> Vec<(u128, u128)> {
        self.entries
            .iter()
            .find(|e| e.p == p)
            .map(|e| e.levels.iter().map(|l| l[0]).collect())
            .unwrap_or_default()
    }
}

fn first_in_class(lo: u64, m: u128, a: u128) -> u128 {
    let lo = lo as u128;
    lo + (a + m - lo % m) % m
}

fn eval_abs(f: &CubicPoly, n: u64) -> Result<(u128, bool), SieveError> {
    let v = f
        .eval_i128(n as i128)
        .ok_or(SieveError::ValueTooLarge(n as i128))?;
    Ok((v.unsigned_abs(), v < 0))
}

/// Sieves `|f(n)|` for `n_lo ≤ n < n_hi` by the progressions in `table`.
pub fn progression_sieve(
    f: &CubicPoly,
    table: &SieveTable,
    n_lo: u64,
    n_hi: u64,
) -> Result<Vec<PartialFactorization>, SieveError> {
    if n_lo < 1 || n_hi <= n_lo {
        return Err(SieveError::EmptyRange);
    }
    let len = (n_hi - n_lo) as usize;
    let mut rows = Vec::with_capacity(len);
    for n in n_lo..n_hi {
        let (value, negative) = eval_abs(f, n)?;
        rows.push(PartialFactorization {
            n,
            value,
            negative,
            small: Vec::new(),
            cofactor: value,
        });
    }
    let hi = n_hi as u128;
    for entry in &table.entries {
        let p = entry.p;
        let pp = p as u128;
        for levels in &entry.levels {
            let deepest = levels.len() - 1;
            for (depth, &(m, a)) in levels.iter().enumerate() {
                let mut n = first_in_class(n_lo, m, a);
                while n < hi {
                    let row = &mut rows[(n - n_lo as u128) as usize];
                    // ramified primes, and the rare excess beyond the cap, by direct division
                    let exhaust = entry.ramified || depth == deepest;
                    let mut e = 0u32;
                    if depth == 0 || entry.ramified {
                        while row.cofactor % pp == 0 {
                            row.cofactor /= pp;
                            e += 1;
                            if !exhaust {
                                break;
                            }
                        }
                    } else {
                        row.cofactor /= pp;
                        e = 1;
                        if exhaust {
                            while row.cofactor % pp == 0 {
                                row.cofactor /= pp;
                                e += 1;
                            }
                        }
                    }
                    if e > 0 {
                        match row.small.last_mut() {
                            Some((q, k)) if *q == p => *k += e,
                            _ => row.small.push((p, e)),
                        }
                    }
                    n += m;
                }
                if entry.ramified {
                    break;
                }
            }
        }
    }
    Ok(rows)
}

/// `P⁺(f(n))`.
pub fn largest_prime_factor(f: &CubicPoly, n: i64) -> Result<u128, SieveError> {
    let v = f.eval_i128(n as i128).ok_or(SieveError::ValueTooLarge(n as i128))?;
    Ok(arith::largest_prime_factor(v.unsigned_abs()).unwrap_or(1))
}

pub fn factor_value(f: &CubicPoly, n: u64) -> Result<FactorizationRecord, SieveError> {
    let (value, negative) = eval_abs(f, n)?;
    Ok(FactorizationRecord::from_factors(
        n,
        value,
        negative,
        arith::factor(value),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub c: f64,
    pub count: u64,
    pub density: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub x: u64,
    /// The scanned range is `lo < n ≤ hi`.
    pub lo: u64,
    pub hi: u64,
    pub total: u64,
    pub prime_bound: u64,
    pub rows: Vec<ThresholdRow>,
    /// Wall-clock time; not serialized so that reports are reproducible.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

/// `P⁺ > n^{1+c}`, exactly for `c = 0`.
fn exceeds(pplus: u128, n: u64, c: f64) -> bool {
    if c == 0.0 {
        return pplus > n as u128;
    }
    (pplus as f64).ln() > (1.0 + c) * (n as f64).ln()
}

const CHUNK: u64 = 1 << 12;

/// Density of `n ∈ (X, 2X]` with `P⁺(f(n)) > n^{1+c}` for each `c`. The
/// result does not depend on `threads`.
pub fn scan_density(f: &CubicPoly, x: u64, cs: &[f64], threads: usize) -> Result<ScanReport, SieveError> {
    let start = Instant::now();
    if x < 1000 {
        return Err(SieveError::XTooSmall(x));
    }
    if let Some(&c) = cs.iter().find(|c| !(0.0..=2.0).contains(*c)) {
        return Err(SieveError::BadThreshold(c));
    }
    let (lo, hi) = (x + 1, 2 * x + 1);
    let (top, _) = eval_abs(f, 2 * x)?;
    let bound = ((top as f64).cbrt().ceil() as u64 + 2).max(2);
    let table = SieveTable::new(f, bound);
    let chunks: Vec<(u64, u64)> = (lo..hi)
        .step_by(CHUNK as usize)
        .map(|a| (a, (a + CHUNK).min(hi)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| SieveError::Pool(e.to_string()))?;
    let per_chunk: Vec<Result<Vec<u64>, SieveError>> = pool.install(|| {
        chunks
            .par_iter()
            .map(|&(a, b)| {
                let rows = progression_sieve(f, &table, a, b)?;
                let mut counts = vec![0u64; cs.len()];
                for row in rows {
                    let n = row.n;
                    let rec = row.complete();
                    for (slot, &c) in counts.iter_mut().zip(cs) {
                        if exceeds(rec.pplus, n, c) {
                            *slot += 1;
                        }
                    }
                }
                Ok(counts)
            })
            .collect()
    });
    let mut counts = vec![0u64; cs.len()];
    for chunk in per_chunk {
        for (t, c) in counts.iter_mut().zip(chunk?) {
            *t += c;
        }
    }
    let total = hi - lo;
    let rows = cs
        .iter()
        .zip(counts)
        .map(|(&c, count)| ThresholdRow {
            c,
            count,
            density: count as f64 / total as f64,
        })
        .collect();
    Ok(ScanReport {
        x,
        lo: x,
        hi: 2 * x,
        total,
        prime_bound: bound,
        rows,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// `log f(n)` split by prime-ideal size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogSplit {
    /// Prime ideal powers `I | n − r` with `Λ(I) ≤ log 3X`.
    pub log1: f64,
    pub log2: f64,
    /// Primes dividing the discriminant, kept out of both.
    pub excluded: f64,
}

/// Every prime ideal dividing `n − r` has degree one, since `ℤ[r]/P` is
/// generated by the image of `n`; so `Λ(P^k) = log p` with `p | f(n)`.
pub fn log_split(f: &CubicPoly, n: u64, x: u64) -> Result<LogSplit, SieveError> {
    let rec = factor_value(f, n)?;
    let cutoff = 3 * x as u128;
    let mut out = LogSplit {
        log1: 0.0,
        log2: 0.0,
        excluded: 0.0,
    };
    for (p, e) in rec.factors {
        let l = e as f64 * (p as f64).ln();
        if divides_disc(f, p as u64) {
            out.excluded += l;
        } else if p <= cutoff {
            out.log1 += l;
        } else {
            out.log2 += l;
        }
    }
    Ok(out)
}

/// Knobs for the toy-scale sets `𝒦` and `ℒ(K)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyParams {
    pub delta: f64,
    /// Exponent in `P⁻(N(L)) > X^θ`.
    pub theta: f64,
    /// `|q| ≥ q_constant · M³`.
    pub q_constant: f64,
    /// `|B13| ≥ b13_constant · M²`.
    pub b13_constant: f64,
    /// `P⁻(q) >` this; the default is `max(256, |c0|)`.
    pub small_prime_floor: u64,
    /// Require primes `q1, q2 | q` in `(N^{5/7}, N^{5/7+δ})` and `(N^{6/7}, N^{6/7+δ})`.
    pub require_q_windows: bool,
}

impl ToyParams {
    pub fn new(f: &CubicPoly, delta: f64) -> Self {
        let c0 = f.c0().abs().to_u64().unwrap_or(u64::MAX);
        Self {
            delta,
            theta: delta,
            q_constant: 1.0,
            b13_constant: 1.0,
            small_prime_floor: c0.max(256),
            require_q_windows: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToyTerm {
    pub k_prime: u64,
    pub alpha: RingElem,
    pub norm: u64,
    pub k_alpha: u64,
    pub weight: i64,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToyReport {
    pub x: u64,
    pub params: ToyParams,
    pub m: f64,
    pub n_param: f64,
    pub d_limit: u64,
    pub z: u64,
    /// Size of `𝒦`.
    pub k_primes: usize,
    pub terms: Vec<ToyTerm>,
    pub s: String,
    pub s0: String,
    pub s1: String,
    pub s0_approx: f64,
    pub s1_approx: f64,
    /// `S − (X·S₀ + S₁) = 0` in exact arithmetic.
    pub identity_holds: bool,
    /// Smallest `log⁽¹⁾(f(n)) / log X` over `n` counted with positive weight.
    pub min_log1_ratio: Option<f64>,
    #[serde(skip)]
    pub s_exact: BigRational,
    #[serde(skip)]
    pub s0_exact: BigRational,
    #[serde(skip)]
    pub s1_exact: BigRational,
}

fn smallest_prime(n: u128) -> u128 {
    arith::smallest_prime_factor(n).unwrap_or(u128::MAX)
}

fn has_prime_in(factors: &[(u128, u32)], lo: f64, hi: f64) -> bool {
    factors.iter().any(|&(p, _)| (p as f64) > lo && (p as f64) < hi)
}

/// Largest `X` for full enumeration.
pub const TOY_MAX_X: u64 = 10_000;

/// Evaluates `S`, `S₀`, `S₁` by enumerating `α ∈ 𝒟` with
/// `X^{1+δ} < N(α) ≤ X^{1+2δ}` and first-degree `K | (α)` in `𝒦`.
pub fn s0_s1_toy(f: &CubicPoly, d: &DomainDescriptor, x: u64, params: &ToyParams) -> Result<ToyReport, SieveError> {
    let small = f.small().ok_or(SieveError::CoefficientsTooLarge)?;
    let delta = params.delta;
    if !(10..=TOY_MAX_X).contains(&x) {
        return Err(SieveError::BadToy(format!("X = {x} outside [10, {TOY_MAX_X}]")));
    }
    if !(delta > 0.0 && delta <= 1.0 / 3.0) {
        return Err(SieveError::BadToy(format!("delta = {delta} outside (0, 1/3]")));
    }
    if !(params.theta > 0.0 && params.q_constant > 0.0 && params.b13_constant > 0.0) {
        return Err(SieveError::BadToy("theta and the constants must be positive".into()));
    }
    let xf = x as f64;
    let m = xf.powf((1.0 + delta) / 3.0);
    let n_param = xf.powf((1.0 + 2.0 * delta) / 3.0);
    let norm_lo = xf.powf(1.0 + delta);
    let norm_hi = xf.powf(1.0 + 2.0 * delta).floor() as i128;
    let k_lo = xf.powf(3.0 * delta);
    let k_hi = xf.powf(4.0 * delta);
    let z_level = xf.powf(delta);
    let d_limit = xf.powf(3.0 * delta).floor() as u64;
    let weights = if d_limit >= 2 && z_level.ceil() as u64 >= 2 {
        let z = (z_level.ceil() as u64).clamp(2, d_limit);
        rosser_weights(d_limit, z)?
    } else {
        SieveWeights {
            d_limit,
            z: 2,
            weights: BTreeMap::from([(1, 1)]),
        }
    };
    // Q: product of split primes below X^δ, kept as a list
    let q_primes: Vec<u64> = arith::primes_up_to(z_level.ceil() as u64)
        .into_iter()
        .filter(|&p| (p as f64) < z_level)
        .filter(|&p| primeideals::splitting_type(f, p).ok() == Some(primeideals::SplittingType::Split))
        .collect();
    let k_set: Vec<u64> = arith::primes_up_to(k_hi.ceil() as u64)
        .into_iter()
        .filter(|&p| (p as f64) > k_lo && (p as f64) < k_hi && !divides_disc(f, p))
        .filter(|&p| !roots_mod_p(f, p).unwrap().is_empty())
        .collect();

    let bound = (d.domain_box_constant() * (norm_hi as f64).cbrt()).ceil() as i64 + 1;
    let disc = f.disc().clone();
    let x_big = BigInt::from(x);
    let mut terms = Vec::new();
    let mut s = BigRational::zero();
    let mut s0 = BigRational::zero();
    let mut s1 = BigRational::zero();
    let mut min_log1: Option<f64> = None;

    for a1 in -bound..=bound {
        for a2 in -bound..=bound {
            if a1.gcd(&a2) != 1 {
                continue;
            }
            let q = small.elim_q(a1, a2).unsigned_abs();
            if q == 0 || (q as f64) < params.q_constant * m.powi(3) {
                continue;
            }
            let qf = arith::factor(q);
            if qf.iter().any(|&(_, e)| e > 1) || smallest_prime(q) <= params.small_prime_floor as u128 {
                continue;
            }
            if (a1 as i128 * a2 as i128).unsigned_abs().gcd(&q) != 1 {
                continue;
            }
            if params.require_q_windows {
                let w = |e: f64| n_param.powf(e);
                if !has_prime_in(&qf, w(5.0 / 7.0), w(5.0 / 7.0 + delta))
                    || !has_prime_in(&qf, w(6.0 / 7.0), w(6.0 / 7.0 + delta))
                {
                    continue;
                }
            }
            for a0 in -bound..=bound {
                if a0 % 2 == 0 {
                    continue;
                }
                let coords = [a0, a1, a2];
                let norm = small.norm(coords);
                // ±α are identified; keep the one of positive norm
                if norm <= 0 || (norm as f64) <= norm_lo || norm > norm_hi {
                    continue;
                }
                let (b13, b23) = small.b13_b23(coords);
                if (b13.unsigned_abs() as f64) < params.b13_constant * m.powi(2) {
                    continue;
                }
                if b13.unsigned_abs().gcd(&q) != 1 {
                    continue;
                }
                let nb = BigInt::from(norm);
                if !nb.gcd(&(BigInt::from(b13) * &disc)).is_one() {
                    continue;
                }
                let alpha = RingElem::new(a0, a1, a2);
                if !d.contains(&alpha) && !d.contains(&-&alpha) {
                    continue;
                }
                let Ok(ideal) = primeideals::factor_principal(f, &alpha) else {
                    continue;
                };
                if primeideals::rho(f, &ideal)? != 1 {
                    continue;
                }
                let k_alpha = (b23 * arith::mod_inverse(&BigInt::from(b13), &nb).unwrap().to_i128().unwrap())
                    .rem_euclid(norm);
                for (pr, e) in &ideal.factors {
                    if *e != 1 || !k_set.contains(&pr.p) {
                        continue;
                    }
                    let n_l = norm as u128 / pr.p as u128;
                    if n_l > 1 && (smallest_prime(n_l) as f64) <= xf.powf(params.theta) {
                        continue;
                    }
                    let g: u64 = q_primes
                        .iter()
                        .filter(|&&p| n_l % p as u128 == 0)
                        .product();
                    let weight = weights.divisor_sum(g);
                    // #{n ∈ (X, 2X] : n ≡ k_α mod N(α)}
                    let nn = norm;
                    let count = (Integer::div_floor(&(2 * x as i128 - k_alpha), &nn) - Integer::div_floor(&(x as i128 - k_alpha), &nn)) as u64;
                    let w = BigRational::from_integer(weight.into());
                    let inv_norm = BigRational::new(BigInt::one(), nb.clone());
                    s += &w * BigRational::from_integer(count.into());
                    s0 += &w * &inv_norm;
                    s1 += &w
                        * (BigRational::from_integer(count.into())
                            - BigRational::from_integer(x_big.clone()) * &inv_norm);
                    if weight > 0 {
                        let mut n = x as i128 + 1 + (k_alpha - x as i128 - 1).rem_euclid(nn);
                        while n <= 2 * x as i128 {
                            let ls = log_split(f, n as u64, x)?;
                            let r = ls.log1 / xf.ln();
                            min_log1 = Some(min_log1.map_or(r, |m: f64| m.min(r)));
                            n += nn;
                        }
                    }
                    terms.push(ToyTerm {
                        k_prime: pr.p,
                        alpha: alpha.clone(),
                        norm: norm as u64,
                        k_alpha: k_alpha as u64,
                        weight,
                        count,
                    });
                }
            }
        }
    }
    let identity = &s - (BigRational::from_integer(x_big) * &s0 + &s1);
    Ok(ToyReport {
        x,
        params: params.clone(),
        m,
        n_param,
        d_limit,
        z: weights.z,
        k_primes: k_set.len(),
        terms,
        s: s.to_string(),
        s0: s0.to_string(),
        s1: s1.to_string(),
        s0_approx: s0.to_f64().unwrap_or(f64::NAN),
        s1_approx: s1.to_f64().unwrap_or(f64::NAN),
        identity_holds: identity.is_zero(),
        min_log1_ratio: min_log1,
        s_exact: s,
        s0_exact: s0,
        s1_exact: s1,
    })
}
