//! Independent oracles for the integration and acceptance tests. Nothing here
//! calls into the library except to build `SparsePoly` values.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use cubic_lpf::sympoly::{SparsePoly, Var};

/// Parses a LaTeX display such as `a_2^3c_1c_2 - a_1a_2^2c_2^2 + 2a_1^2a_2c_2`
/// with implicit products, `\cdot` and parentheses.
pub fn latex_poly(src: &str) -> SparsePoly {
    let cleaned = src.replace("\\cdot", "*").replace(['$', ' '], "");
    let chars: Vec<char> = cleaned.trim_end_matches('.').chars().collect();
    let mut pos = 0;
    let p = sum(&chars, &mut pos);
    assert_eq!(pos, chars.len(), "trailing input in {src:?}");
    p
}

fn sum(s: &[char], pos: &mut usize) -> SparsePoly {
    let mut acc = SparsePoly::zero();
    let mut sign = 1;
    loop {
        match s.get(*pos) {
            Some('+') => {
                *pos += 1;
                sign = 1;
            }
            Some('-') => {
                *pos += 1;
                sign = -1;
            }
            _ => {}
        }
        let t = product(s, pos);
        acc = if sign > 0 { &acc + &t } else { &acc - &t };
        sign = 1;
        match s.get(*pos) {
            Some('+') | Some('-') => continue,
            _ => return acc,
        }
    }
}

fn product(s: &[char], pos: &mut usize) -> SparsePoly {
    let mut acc = SparsePoly::one();
    let mut any = false;
    loop {
        match s.get(*pos) {
            Some('*') => {
                *pos += 1;
            }
            Some(c) if c.is_ascii_digit() => {
                let start = *pos;
                while s.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                    *pos += 1;
                }
                let n: i64 = s[start..*pos].iter().collect::<String>().parse().unwrap();
                acc = &acc * &SparsePoly::constant(n);
                any = true;
            }
            Some('a') | Some('c') => {
                let kind = s[*pos];
                assert_eq!(s.get(*pos + 1), Some(&'_'));
                let idx = s[*pos + 2].to_digit(10).unwrap() as usize;
                *pos += 3;
                let v = match (kind, idx) {
                    ('a', 0) => Var::A0,
                    ('a', 1) => Var::A1,
                    ('a', 2) => Var::A2,
                    ('c', 0) => Var::C0,
                    ('c', 1) => Var::C1,
                    ('c', 2) => Var::C2,
                    _ => panic!("unknown variable"),
                };
                let mut base = SparsePoly::var(v);
                if s.get(*pos) == Some(&'^') {
                    let e = s[*pos + 1].to_digit(10).unwrap();
                    *pos += 2;
                    let b = base.clone();
                    for _ in 1..e {
                        base = &base * &b;
                    }
                }
                acc = &acc * &base;
                any = true;
            }
            Some('(') => {
                *pos += 1;
                let inner = sum(s, pos);
                assert_eq!(s.get(*pos), Some(&')'));
                *pos += 1;
                acc = &acc * &inner;
                any = true;
            }
            _ => {
                assert!(any, "empty factor");
                return acc;
            }
        }
    }
}

/// Multiplication matrix of `a0 + a1 r + a2 r²` for `r³ = −c2 r² − c1 r − c0`,
/// built column by column from repeated multiplication by `r`.
pub fn mult_matrix(c: [i128; 3], a: [i128; 3]) -> [[i128; 3]; 3] {
    let [c0, c1, c2] = c;
    let times_r = |v: [i128; 3]| [-c0 * v[2], v[0] - c1 * v[2], v[1] - c2 * v[2]];
    let mut cols = [a, [0; 3], [0; 3]];
    cols[1] = times_r(cols[0]);
    cols[2] = times_r(cols[1]);
    let mut m = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = cols[j][i];
        }
    }
    m
}

/// Signed cofactor of entry `(i, j)`, 1-indexed.
pub fn cofactor(m: &[[i128; 3]; 3], i: usize, j: usize) -> i128 {
    let rows: Vec<usize> = (0..3).filter(|&r| r != i - 1).collect();
    let cols: Vec<usize> = (0..3).filter(|&c| c != j - 1).collect();
    let minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]];
    if (i + j) % 2 == 0 {
        minor
    } else {
        -minor
    }
}

pub fn det(m: &[[i128; 3]; 3]) -> i128 {
    (0..3).map(|j| m[0][j] * cofactor(m, 1, j + 1)).sum()
}

pub fn norm(c: [i128; 3], a: [i128; 3]) -> i128 {
    det(&mult_matrix(c, a))
}

/// `α | β` in ℤ[r]: `adj(M_α)·β ≡ 0 (mod N(α))`.
pub fn divides(c: [i128; 3], a: [i128; 3], b: [i128; 3]) -> bool {
    let m = mult_matrix(c, a);
    let n = det(&m);
    if n == 0 {
        return false;
    }
    (0..3).all(|i| {
        let s: i128 = (0..3).map(|j| cofactor(&m, j + 1, i + 1) * b[j]).sum();
        s % n == 0
    })
}

pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let m = m.abs();
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1 || m == 1).then(|| s0.rem_euclid(m))
}

/// Full-rank sublattice of ℤ³ in upper-triangular Hermite form (rows are
/// basis vectors in coordinates `1, r, r²`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    pub rows: [[BigInt; 3]; 3],
}

impl Lattice {
    pub fn from_generators(gens: &[[BigInt; 3]]) -> Self {
        let mut v: Vec<[BigInt; 3]> = gens.to_vec();
        let mut out: Vec<[BigInt; 3]> = Vec::new();
        for col in 0..3 {
            // gcd-reduce column `col` over the remaining vectors
            loop {
                v.retain(|r| r.iter().any(|x| !x.is_zero()));
                let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i][col].is_zero()).collect();
                if nz.len() <= 1 {
                    break;
                }
                let piv = *nz.iter().min_by_key(|&&i| v[i][col].abs()).unwrap();
                let p = v[piv].clone();
                for &i in &nz {
                    if i != piv {
                        let q = v[i][col].div_floor(&p[col]);
                        for k in 0..3 {
                            let t = &v[i][k] - &q * &p[k];
                            v[i][k] = t;
                        }
                    }
                }
            }
            let idx = (0..v.len()).find(|&i| !v[i][col].is_zero()).expect("full rank");
            let mut row = v.remove(idx);
            if row[col].is_negative() {
                for x in row.iter_mut() {
                    *x = -&*x;
                }
            }
            out.push(row);
        }
        let mut rows: [[BigInt; 3]; 3] = [out[0].clone(), out[1].clone(), out[2].clone()];
        // reduce above the diagonal
        for col in 1..3 {
            for r in 0..col {
                let q = rows[r][col].div_floor(&rows[col][col]);
                for k in 0..3 {
                    let t = &rows[r][k] - &q * &rows[col][k];
                    rows[r][k] = t;
                }
            }
        }
        Self { rows }
    }

    pub fn index(&self) -> BigInt {
        &self.rows[0][0] * &self.rows[1][1] * &self.rows[2][2]
    }

    pub fn contains(&self, v: &[BigInt; 3]) -> bool {
        let mut w = v.clone();
        for col in 0..3 {
            let (q, r) = w[col].div_rem(&self.rows[col][col]);
            if !r.is_zero() {
                return false;
            }
            for k in 0..3 {
                let t = &w[k] - &q * &self.rows[col][k];
                w[k] = t;
            }
        }
        w.iter().all(Zero::is_zero)
    }
}

fn ring_mul(c: [i128; 3], a: &[BigInt; 3], b: &[BigInt; 3]) -> [BigInt; 3] {
    let (c0, c1, c2) = (BigInt::from(c[0]), BigInt::from(c[1]), BigInt::from(c[2]));
    // coefficients of the degree-4 product, then reduce r⁴ and r³
    let mut t: Vec<BigInt> = vec![BigInt::zero(); 5];
    for i in 0..3 {
        for j in 0..3 {
            t[i + j] += &a[i] * &b[j];
        }
    }
    for d in (3..5).rev() {
        let top = std::mem::take(&mut t[d]);
        t[d - 1] -= &c2 * &top;
        t[d - 2] -= &c1 * &top;
        t[d - 3] -= &c0 * &top;
    }
    [t[0].clone(), t[1].clone(), t[2].clone()]
}

fn basis_times_r(c: [i128; 3], g: &[BigInt; 3]) -> Vec<[BigInt; 3]> {
    let r = [BigInt::zero(), BigInt::one(), BigInt::zero()];
    let g1 = ring_mul(c, g, &r);
    let g2 = ring_mul(c, &g1, &r);
    vec![g.clone(), g1, g2]
}

/// The ideal `(g₁, …, g_k)` as a lattice.
pub fn ideal_from(c: [i128; 3], gens: &[[BigInt; 3]]) -> Lattice {
    let all: Vec<[BigInt; 3]> = gens.iter().flat_map(|g| basis_times_r(c, g)).collect();
    Lattice::from_generators(&all)
}

/// `(p, a − r)`.
pub fn prime_ideal(c: [i128; 3], p: u64, a: u64) -> Lattice {
    ideal_from(
        c,
        &[
            [BigInt::from(p), BigInt::zero(), BigInt::zero()],
            [BigInt::from(a), BigInt::from(-1), BigInt::zero()],
        ],
    )
}

/// Product of ideals: spanned by the pairwise products of the two bases.
pub fn ideal_mul(c: [i128; 3], x: &Lattice, y: &Lattice) -> Lattice {
    let mut gens = Vec::new();
    for a in &x.rows {
        for b in &y.rows {
            gens.push(ring_mul(c, a, b));
        }
    }
    Lattice::from_generators(&gens)
}

pub fn eval_cubic(c: [i128; 3], n: i128) -> i128 {
    ((n + c[2]) * n + c[1]) * n + c[0]
}

/// Roots of `f` mod `p` by trying every residue.
pub fn roots_brute(c: [i128; 3], p: u64) -> Vec<u64> {
    let p = p as i128;
    let (c0, c1, c2) = (c[0].rem_euclid(p), c[1].rem_euclid(p), c[2].rem_euclid(p));
    (0..p)
        .filter(|&x| ((((x + c2) % p) * x + c1) % p * x + c0) % p == 0)
        .map(|x| x as u64)
        .collect()
}

pub fn primes_below(n: usize) -> Vec<u64> {
    let mut comp = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return a * b % m;
    }
    let (mut a, mut b, mut r) = (a % m, b, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            r = (r + a) % m;
        }
        a = (a + a) % m;
        b >>= 1;
    }
    r
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Miller–Rabin with the first 13 prime bases (deterministic below 3.3·10²⁴).
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for b in BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for b in BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Factorization by trial division with `primes`. After removing primes up
/// to `∛value` the cofactor has at most two prime factors, so Miller–Rabin
/// decides whether trial division must continue towards `√value`.
pub fn brute_factor(value: u128, primes: &[u64]) -> Vec<(u128, u32)> {
    let mut m = value;
    let mut out = Vec::new();
    let mut cube = (value as f64).cbrt() as u128;
    while cube * cube * cube <= value {
        cube += 1;
    }
    let split = |m: &mut u128, p: u128, out: &mut Vec<(u128, u32)>| {
        if *m % p == 0 {
            let mut e = 0;
            while *m % p == 0 {
                *m /= p;
                e += 1;
            }
            out.push((p, e));
        }
    };
    let mut rest = primes.iter().map(|&p| p as u128).peekable();
    while let Some(&p) = rest.peek() {
        if p > cube || p * p > m {
            break;
        }
        split(&mut m, p, &mut out);
        rest.next();
    }
    if m > 1 && !is_prime(m) {
        for p in rest {
            if p * p > m {
                break;
            }
            split(&mut m, p, &mut out);
        }
        assert!(m == 1 || is_prime(m), "prime table too short for {value}");
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}
