//! Units of ℤ[r] found by bounded search, the fundamental domain `𝒟` they
//! define, and empirical constants attached to it.
//!
//! Signature (1,1): `𝒟 = {α : 1 ≤ |σ(α)| / |N(α)|^{1/3} < |w|}` on the real
//! embedding `σ`, half-open so that each orbit of `⟨w⟩` meets it once.
//! Signature (3,0): `𝒟 = 𝒟₁ ∪ 𝒟₂`, the open cones spanned over ℝ₊ by the
//! embedded images of `{1, w₁⁺, w₁⁺w₂⁺}` and `{1, w₂⁺, w₁⁺w₂⁺}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cubicring::{CubicPoly, Embeddings, RingElem, Signature, SmallCubic};

const EMBED_TOL: f64 = 1e-12;
/// Distance (in normalized coordinates) below which a point counts as on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitError {
    #[error("search bound {0} is below the minimum of 10")]
    BoundTooSmall(i64),
    #[error("no unit of infinite order with |a_i| <= {0}; increase the bound")]
    NoUnitFound(i64),
    #[error("found units span rank {found}, expected {expected}; increase the bound")]
    RankDeficient { found: usize, expected: usize },
    #[error("polynomial coefficients too large for the unit search")]
    CoefficientsTooLarge,
}

/// A unit together with its log-embedding vector (`ln|σ_i(u)|`, one entry per
/// real embedding plus one for the complex pair, last entry dropped).
#[derive(Debug, Clone)]
struct Tracked {
    elem: RingElem,
    log: Vec<f64>,
}

fn log_vector(emb: &Embeddings, a: &RingElem) -> Vec<f64> {
    let img = emb.embed(a);
    match emb.signature.real {
        3 => vec![img[0].norm().ln(), img[1].norm().ln()],
        _ => vec![img[0].norm().ln()],
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct UnitOps<'a> {
    f: &'a CubicPoly,
}

impl UnitOps<'_> {
    fn mul(&self, a: &Tracked, b: &Tracked) -> Tracked {
        Tracked {
            elem: self.f.mul(&a.elem, &b.elem),
            log: a.log.iter().zip(&b.log).map(|(x, y)| x + y).collect(),
        }
    }

    fn inv(&self, a: &Tracked) -> Tracked {
        Tracked {
            elem: self.f.unit_inverse(&a.elem).expect("unit"),
            log: a.log.iter().map(|x| -x).collect(),
        }
    }

    fn pow(&self, a: &Tracked, k: i64) -> Tracked {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        let e = k.unsigned_abs() as u32;
        Tracked {
            elem: self.f.pow(&base.elem, e),
            log: base.log.iter().map(|x| x * e as f64).collect(),
        }
    }
}

pub fn signed_pow(f: &CubicPoly, u: &RingElem, k: i64) -> RingElem {
    let base = if k < 0 {
        f.unit_inverse(u).expect("unit")
    } else {
        u.clone()
    };
    f.pow(&base, k.unsigned_abs() as u32)
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitGroup {
    pub signature: Signature,
    /// Independent units of infinite order; torsion is always `{±1}`.
    pub generators: Vec<RingElem>,
    /// Generators of the totally positive units of `⟨−1, generators⟩`, signature (3,0) only.
    pub totally_positive: Vec<RingElem>,
    /// `[⟨−1, generators⟩ : totally positive subgroup]`, signature (3,0) only.
    pub positive_index: Option<u32>,
    pub regulator: f64,
    pub search_bound: i64,
    /// Number of units (up to sign) met in the search box.
    pub units_found: usize,
    /// Whether every unit met in the box is a product of the generators.
    pub explains_search: bool,
    #[serde(skip)]
    log_basis: Vec<Vec<f64>>,
}

impl UnitGroup {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }
}

/// Units with `|a_i| ≤ bound`, reduced to a basis of the lattice they generate.
/// Fundamentality is not certified.
pub fn find_units(f: &CubicPoly, bound: i64) -> Result<UnitGroup, UnitError> {
    if bound < 10 {
        return Err(UnitError::BoundTooSmall(bound));
    }
    let small = f.small().ok_or(UnitError::CoefficientsTooLarge)?;
    let emb = f.embeddings(EMBED_TOL);
    let rank = match emb.signature.real {
        3 => 2,
        _ => 1,
    };
    let mut found: Vec<Tracked> = Vec::new();
    for a0 in -bound..=bound {
        for a1 in -bound..=bound {
            for a2 in -bound..=bound {
                // one of ±u, and skip ±1
                let first = if a0 != 0 { a0 } else if a1 != 0 { a1 } else { a2 };
                if first <= 0 || (a1 == 0 && a2 == 0) {
                    continue;
                }
                if small.norm([a0, a1, a2]).abs() == 1 {
                    let elem = RingElem::new(a0, a1, a2);
                    let log = log_vector(&emb, &elem);
                    found.push(Tracked { elem, log });
                }
            }
        }
    }
    if found.is_empty() {
        return Err(UnitError::NoUnitFound(bound));
    }
    let ops = UnitOps { f };
    let mut basis = if rank == 1 {
        reduce_rank1(&ops, &found)
    } else {
        reduce_rank2(&ops, &found)?
    };
    let explains = found.iter().all(|u| in_lattice(&basis, &u.log));
    // normalise signs: positive first embedding; in rank 1 also |w| > 1
    for b in basis.iter_mut() {
        if rank == 1 && b.log[0] < 0.0 {
            *b = ops.inv(b);
        }
        if emb.embed(&b.elem)[0].re < 0.0 {
            b.elem = -&b.elem;
        }
    }
    let regulator = if rank == 1 {
        basis[0].log[0].abs()
    } else {
        (basis[0].log[0] * basis[1].log[1] - basis[0].log[1] * basis[1].log[0]).abs()
    };
    let (totally_positive, positive_index) = if rank == 2 {
        let (tp, idx) = totally_positive_basis(f, &emb, &basis);
        (tp, Some(idx))
    } else {
        (Vec::new(), None)
    };
    Ok(UnitGroup {
        signature: emb.signature,
        generators: basis.iter().map(|b| b.elem.clone()).collect(),
        totally_positive,
        positive_index,
        regulator,
        search_bound: bound,
        units_found: found.len(),
        explains_search: explains,
        log_basis: basis.into_iter().map(|b| b.log).collect(),
    })
}

fn reduce_rank1(ops: &UnitOps, found: &[Tracked]) -> Vec<Tracked> {
    let pos = |t: &Tracked| if t.log[0] < 0.0 { ops.inv(t) } else { t.clone() };
    let mut g = found
        .iter()
        .filter(|t| t.log[0].abs() > 1e-9)
        .map(pos)
        .min_by(|a, b| a.log[0].total_cmp(&b.log[0]))
        .expect("nontrivial unit");
    // Euclid on logs: anything not a power of g yields a shorter unit
    loop {
        let mut changed = false;
        for u in found {
            let t = u.log[0] / g.log[0];
            let k = t.round();
            if (t - k).abs() > 1e-6 {
                let r = ops.mul(u, &ops.pow(&g, -(k as i64)));
                let r = pos(&r);
                if r.log[0] > 1e-9 && r.log[0] < g.log[0] {
                    g = r;
                    changed = true;
                }
            }
        }
        if !changed {
            return vec![g];
        }
    }
}

fn gauss_reduce(ops: &UnitOps, mut b1: Tracked, mut b2: Tracked) -> (Tracked, Tracked) {
    loop {
        if dot(&b2.log, &b2.log) < dot(&b1.log, &b1.log) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let m = (dot(&b1.log, &b2.log) / dot(&b1.log, &b1.log)).round();
        if m == 0.0 {
            return (b1, b2);
        }
        b2 = ops.mul(&b2, &ops.pow(&b1, -(m as i64)));
    }
}

fn det2(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn coords2(basis: &[Tracked], v: &[f64]) -> (f64, f64) {
    let d = det2(&basis[0].log, &basis[1].log);
    (det2(v, &basis[1].log) / d, det2(&basis[0].log, v) / d)
}

fn in_lattice(basis: &[Tracked], v: &[f64]) -> bool {
    let near = |x: f64| (x - x.round()).abs() < 1e-6;
    match basis.len() {
        1 => near(v[0] / basis[0].log[0]),
        _ => {
            let (x, y) = coords2(basis, v);
            near(x) && near(y)
        }
    }
}

fn reduce_rank2(ops: &UnitOps, found: &[Tracked]) -> Result<Vec<Tracked>, UnitError> {
    let mut sorted: Vec<&Tracked> = found.iter().filter(|t| dot(&t.log, &t.log) > 1e-12).collect();
    sorted.sort_by(|a, b| dot(&a.log, &a.log).total_cmp(&dot(&b.log, &b.log)));
    let b1 = sorted.first().ok_or(UnitError::RankDeficient { found: 0, expected: 2 })?;
    let b2 = sorted
        .iter()
        .find(|t| det2(&b1.log, &t.log).abs() > 1e-6)
        .ok_or(UnitError::RankDeficient { found: 1, expected: 2 })?;
    let (mut b1, mut b2) = gauss_reduce(ops, (*b1).clone(), (*b2).clone());
    // absorb units outside the current lattice; each step strictly shrinks the covolume
    for _ in 0..64 {
        let basis = [b1.clone(), b2.clone()];
        let Some(u) = found.iter().find(|u| !in_lattice(&basis, &u.log)) else {
            break;
        };
        let (x, y) = coords2(&basis, &u.log);
        let v = ops.mul(
            u,
            &ops.mul(&ops.pow(&b1, -(x.round() as i64)), &ops.pow(&b2, -(y.round() as i64))),
        );
        let d = det2(&b1.log, &b2.log).abs();
        let keep1 = det2(&b1.log, &v.log).abs();
        let keep2 = det2(&v.log, &b2.log).abs();
        if keep1 > 1e-6 && (keep1 <= keep2 || keep2 < 1e-6) && keep1 < d {
            (b1, b2) = gauss_reduce(ops, b1, v);
        } else if keep2 > 1e-6 && keep2 < d {
            (b1, b2) = gauss_reduce(ops, v, b2);
        } else {
            break;
        }
    }
    Ok(vec![b1, b2])
}

fn sign_vector(emb: &Embeddings, a: &RingElem) -> [bool; 3] {
    let img = emb.embed(a);
    [img[0].re < 0.0, img[1].re < 0.0, img[2].re < 0.0]
}

/// Basis of the totally positive units of `⟨−1, w1, w2⟩` and its index.
fn totally_positive_basis(f: &CubicPoly, emb: &Embeddings, basis: &[Tracked]) -> (Vec<RingElem>, u32) {
    let s1 = sign_vector(emb, &basis[0].elem);
    let s2 = sign_vector(emb, &basis[1].elem);
    let xor = |a: [bool; 3], b: [bool; 3]| [a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2]];
    // modulo −1, a sign pattern is trivial if it is all-equal
    let trivial = |s: [bool; 3]| s[0] == s[1] && s[1] == s[2];
    let k = |a: u8, b: u8| {
        let mut s = [false; 3];
        if a == 1 {
            s = xor(s, s1);
        }
        if b == 1 {
            s = xor(s, s2);
        }
        trivial(s)
    };
    // sublattice {(a, b) : w1^a w2^b ≡ ±(totally positive)}, which contains 2ℤ²
    let exps: [(i64, i64); 2] = match (k(1, 0), k(0, 1), k(1, 1)) {
        (true, true, _) => [(1, 0), (0, 1)],
        (true, false, _) => [(1, 0), (0, 2)],
        (false, true, _) => [(2, 0), (0, 1)],
        (false, false, true) => [(1, 1), (0, 2)],
        (false, false, false) => [(2, 0), (0, 2)],
    };
    let sub_index = (exps[0].0 * exps[1].1 - exps[0].1 * exps[1].0).unsigned_abs() as u32;
    let gens = exps
        .iter()
        .map(|&(a, b)| {
            let u = f.mul(&signed_pow(f, &basis[0].elem, a), &signed_pow(f, &basis[1].elem, b));
            if emb.embed(&u)[0].re < 0.0 {
                -&u
            } else {
                u
            }
        })
        .collect();
    // −1 is never totally positive, so it contributes a further factor 2
    (gens, 2 * sub_index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
    Boundary,
}

#[derive(Debug, Clone)]
enum Shape {
    Annulus {
        w: RingElem,
        log_w: f64,
    },
    Cones {
        /// Rows: generators of each cone as ring elements.
        spans: [[RingElem; 3]; 2],
        /// Inverse of the matrix whose columns are the embedded generators.
        inverse: [[[f64; 3]; 3]; 2],
        w_pos: [RingElem; 2],
        /// Sign-pattern coset representatives of the totally positive units.
        cosets: Vec<([bool; 3], RingElem)>,
        pos_logs: [Vec<f64>; 2],
    },
}

#[derive(Debug, Clone)]
pub struct DomainDescriptor {
    f: CubicPoly,
    emb: Embeddings,
    shape: Shape,
    /// Full-unit-group log basis, used for canonical associates.
    unit_logs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum DomainSummary {
    Annulus { w: RingElem, abs_w: f64 },
    Cones { cone1: [RingElem; 3], cone2: [RingElem; 3] },
}

fn invert3(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            out[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    out
}

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < BOUNDARY_TOL {
        r
    } else {
        x
    }
}

impl DomainDescriptor {
    pub fn new(f: &CubicPoly, units: &UnitGroup) -> Self {
        let emb = f.embeddings(EMBED_TOL);
        let shape = if units.rank() == 1 {
            let w = units.generators[0].clone();
            let log_w = emb.embed(&w)[0].norm().ln();
            Shape::Annulus { w, log_w }
        } else {
            let (p1, p2) = (&units.totally_positive[0], &units.totally_positive[1]);
            let p12 = f.mul(p1, p2);
            let spans = [
                [RingElem::one(), p1.clone(), p12.clone()],
                [RingElem::one(), p2.clone(), p12],
            ];
            let inverse = spans.clone().map(|gens| {
                let cols = gens.map(|g| emb.embed(&g).map(|z| z.re));
                invert3(std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i])))
            });
            let mut cosets: Vec<([bool; 3], RingElem)> = Vec::new();
            for neg in [false, true] {
                for a in 0..2 {
                    for b in 0..2 {
                        let mut u = f.mul(
                            &signed_pow(f, &units.generators[0], a),
                            &signed_pow(f, &units.generators[1], b),
                        );
                        if neg {
                            u = -&u;
                        }
                        let s = sign_vector(&emb, &u);
                        if !cosets.iter().any(|(t, _)| *t == s) {
                            cosets.push((s, u));
                        }
                    }
                }
            }
            Shape::Cones {
                spans,
                inverse,
                pos_logs: [log_vector(&emb, p1), log_vector(&emb, p2)],
                w_pos: [p1.clone(), p2.clone()],
                cosets,
            }
        };
        Self {
            f: f.clone(),
            emb,
            shape,
            unit_logs: units.log_basis.clone(),
        }
    }

    pub fn poly(&self) -> &CubicPoly {
        &self.f
    }

    pub fn is_annulus(&self) -> bool {
        matches!(self.shape, Shape::Annulus { .. })
    }

    pub fn summary(&self) -> DomainSummary {
        match &self.shape {
            Shape::Annulus { w, log_w } => DomainSummary::Annulus {
                w: w.clone(),
                abs_w: log_w.exp(),
            },
            Shape::Cones { spans, .. } => DomainSummary::Cones {
                cone1: spans[0].clone(),
                cone2: spans[1].clone(),
            },
        }
    }

    fn norm_f64(&self, a: &RingElem) -> f64 {
        self.f.norm(a).to_f64().unwrap()
    }

    /// `log(|σ(α)| / |N(α)|^{1/3}) / log|w|`, snapped to integers within tolerance.
    fn annulus_coordinate(&self, a: &RingElem, log_w: f64) -> f64 {
        let s = self.emb.embed(a)[0].norm().ln() - self.norm_f64(a).abs().ln() / 3.0;
        snap(s / log_w)
    }

    fn cone_coordinates(&self, inverse: &[[f64; 3]; 3], a: &RingElem) -> [f64; 3] {
        let v = self.emb.embed(a).map(|z| z.re);
        std::array::from_fn(|i| (0..3).map(|j| inverse[i][j] * v[j]).sum())
    }

    pub fn classify(&self, a: &RingElem) -> Membership {
        assert!(!a.is_zero(), "membership of 0 is undefined");
        match &self.shape {
            Shape::Annulus { log_w, .. } => {
                let s = self.annulus_coordinate(a, *log_w);
                if (0.0..1.0).contains(&s) {
                    Membership::Inside
                } else {
                    Membership::Outside
                }
            }
            Shape::Cones { inverse, .. } => {
                let mut boundary = false;
                for inv in inverse {
                    let x = self.cone_coordinates(inv, a);
                    let scale: f64 = x.iter().map(|v| v.abs()).sum();
                    let tol = BOUNDARY_TOL * scale;
                    if x.iter().all(|&v| v > tol) {
                        return Membership::Inside;
                    }
                    if x.iter().all(|&v| v > -tol) {
                        boundary = true;
                    }
                }
                if boundary {
                    Membership::Boundary
                } else {
                    Membership::Outside
                }
            }
        }
    }

    pub fn contains(&self, a: &RingElem) -> bool {
        self.classify(a) == Membership::Inside
    }

    /// Associates `uα` lying in `𝒟`, sorted, over a window of units around the
    /// predicted position.
    pub fn associates(&self, a: &RingElem) -> Vec<RingElem> {
        assert!(!a.is_zero());
        let f = &self.f;
        let mut out: Vec<RingElem> = Vec::new();
        match &self.shape {
            Shape::Annulus { w, log_w } => {
                let s = self.annulus_coordinate(a, *log_w);
                let k0 = -(s.floor() as i64);
                for k in k0 - 1..=k0 + 1 {
                    let b = f.mul(a, &signed_pow(f, w, k));
                    for c in [b.clone(), -&b] {
                        if self.contains(&c) {
                            out.push(c);
                        }
                    }
                }
            }
            Shape::Cones {
                cosets,
                w_pos,
                pos_logs,
                ..
            } => {
                let s = sign_vector(&self.emb, a);
                let Some((_, u0)) = cosets.iter().find(|(t, _)| *t == s) else {
                    return out;
                };
                let b = f.mul(a, u0);
                let n3 = self.norm_f64(&b).abs().ln() / 3.0;
                let l: Vec<f64> = log_vector(&self.emb, &b).iter().map(|x| x - n3).collect();
                let d = det2(&pos_logs[0], &pos_logs[1]);
                let x = det2(&l, &pos_logs[1]) / d;
                let y = det2(&pos_logs[0], &l) / d;
                let (i0, j0) = (-(x.round() as i64), -(y.round() as i64));
                for i in i0 - 3..=i0 + 3 {
                    for j in j0 - 3..=j0 + 3 {
                        let u = f.mul(&signed_pow(f, &w_pos[0], i), &signed_pow(f, &w_pos[1], j));
                        let c = f.mul(&b, &u);
                        if self.contains(&c) {
                            out.push(c);
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Whether `α` is the canonical generator of `(α)`: reduced log coordinates
    /// in `[0, 1)` against the unit lattice, and positive first embedding.
    pub fn is_canonical(&self, a: &RingElem) -> bool {
        let img = self.emb.embed(a);
        if img[0].re <= 0.0 && img[0].im == 0.0 {
            return false;
        }
        let n3 = self.norm_f64(a).abs().ln() / 3.0;
        let l: Vec<f64> = log_vector(&self.emb, a).iter().map(|x| x - n3).collect();
        let inside = |t: f64| (0.0..1.0).contains(&snap(t));
        match self.unit_logs.len() {
            1 => inside(l[0] / self.unit_logs[0][0]),
            _ => {
                let (u, v) = (&self.unit_logs[0], &self.unit_logs[1]);
                let d = det2(u, v);
                inside(det2(&l, v) / d) && inside(det2(u, &l) / d)
            }
        }
    }

    /// `c` with `|a_j| ≤ c·|N(α)|^{1/3}` for every `α ∈ 𝒟`. In the annulus case
    /// `𝒟` is the canonical set up to sign; in the cone case `α = Σ x_i v_i` with
    /// `x_i ≥ 0` and `N(α) ≥ Σ x_i³`, so `c = max_j Σ_i |v_i[j]|`.
    pub fn domain_box_constant(&self) -> f64 {
        match &self.shape {
            Shape::Annulus { .. } => self.canonical_box_constant(),
            Shape::Cones { spans, .. } => spans
                .iter()
                .flat_map(|gens| {
                    (0..3).map(move |j| {
                        gens.iter()
                            .map(|g| g.coords()[j].abs().to_f64().unwrap())
                            .sum::<f64>()
                    })
                })
                .fold(0.0, f64::max),
        }
    }

    /// `c` with `|a_j| ≤ c·|N(α)|^{1/3}` for every canonical `α`, from the
    /// inverse Vandermonde matrix and the extreme log coordinates.
    pub fn canonical_box_constant(&self) -> f64 {
        let roots = self.emb.roots;
        // per-embedding bound on |σ_i(α)| / |N|^{1/3}
        let corners: Vec<Vec<f64>> = match self.unit_logs.len() {
            1 => vec![vec![0.0], self.unit_logs[0].clone()],
            _ => {
                let (u, v) = (&self.unit_logs[0], &self.unit_logs[1]);
                vec![
                    vec![0.0, 0.0],
                    u.clone(),
                    v.clone(),
                    vec![u[0] + v[0], u[1] + v[1]],
                ]
            }
        };
        let bounds: [f64; 3] = if corners[0].len() == 1 {
            // real log in [0, log w]; the complex pair has |σ|² = N/|σ_real| ≤ N^{2/3}
            let top = corners.iter().map(|c| c[0]).fold(f64::MIN, f64::max);
            [top.exp(), 1.0, 1.0]
        } else {
            let third = |c: &Vec<f64>| -(c[0] + c[1]);
            let mx = |g: &dyn Fn(&Vec<f64>) -> f64| corners.iter().map(g).fold(f64::MIN, f64::max).exp();
            [mx(&|c| c[0]), mx(&|c| c[1]), mx(&third)]
        };
        // a = V⁻¹σ with V[i] = (1, ρ_i, ρ_i²)
        let v: Vec<[num_complex::Complex64; 3]> = roots.iter().map(|&z| [z * 0.0 + 1.0, z, z * z]).collect();
        let inv = invert3_complex([v[0], v[1], v[2]]);
        (0..3)
            .map(|j| (0..3).map(|i| inv[j][i].norm() * bounds[i]).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn invert3_complex(m: [[num_complex::Complex64; 3]; 3]) -> [[num_complex::Complex64; 3]; 3] {
    use num_complex::Complex64 as C;
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut out = [[C::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            out[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct NormBucket {
    /// Bucket covers `10^decade ≤ |N(α)| < 10^(decade+1)`.
    pub decade: u32,
    pub count: usize,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormaReport {
    /// Largest `max|a_i| / |N(α)|^{1/3}` over the sampled `α ∈ 𝒟`.
    pub constant: f64,
    pub samples: usize,
    /// Samples whose associates never land in `𝒟` (cone case, sign pattern
    /// outside the image of the units).
    pub skipped: usize,
    pub buckets: Vec<NormBucket>,
    /// Proven bound for canonical generators, for comparison.
    pub canonical_box_constant: f64,
}

fn ratio(f: &CubicPoly, a: &RingElem) -> f64 {
    let n = f.norm(a).abs().to_f64().unwrap();
    a.max_abs_coord().to_f64().unwrap() / n.cbrt()
}

/// Samples random `α` with coordinates in `[−coord_bound, coord_bound]`, moves
/// each into `𝒟`, and records the Lemma-norma ratio. `α = 1` is always included.
pub fn norm_size_constant(d: &DomainDescriptor, samples: usize, coord_bound: i64, seed: u64) -> NormaReport {
    let f = &d.f;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buckets: Vec<NormBucket> = Vec::new();
    let mut constant: f64 = 0.0;
    let mut skipped = 0;
    let mut record = |a: &RingElem, constant: &mut f64| {
        let q = ratio(f, a);
        *constant = constant.max(q);
        let n = f.norm(a).abs();
        let decade = n.to_string().len() as u32 - 1;
        match buckets.iter_mut().find(|b| b.decade == decade) {
            Some(b) => {
                b.count += 1;
                b.max_ratio = b.max_ratio.max(q);
            }
            None => buckets.push(NormBucket {
                decade,
                count: 1,
                max_ratio: q,
            }),
        }
    };
    record(&RingElem::one(), &mut constant);
    for _ in 1..samples {
        let a = loop {
            let a = RingElem::new(
                rng.gen_range(-coord_bound..=coord_bound),
                rng.gen_range(-coord_bound..=coord_bound),
                rng.gen_range(-coord_bound..=coord_bound),
            );
            if !a.is_zero() {
                break a;
            }
        };
        match d.associates(&a).first() {
            Some(b) => record(b, &mut constant),
            None => skipped += 1,
        }
    }
    buckets.sort_by_key(|b| b.decade);
    NormaReport {
        constant,
        samples,
        skipped,
        buckets,
        canonical_box_constant: d.canonical_box_constant(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HarmonicReport {
    pub x: u64,
    /// `Σ 1/N(α)` over principal ideals with `0 < N ≤ x`.
    pub value: f64,
    /// Exact value as `"num/den"`, for small `x` only.
    pub exact: Option<String>,
    pub ideals: u64,
    /// Least-squares fit of the partial sums against `log t`, `√x ≤ t ≤ x`.
    pub slope: f64,
    pub intercept: f64,
}

/// Ideal counts by norm: `counts[n]` principal ideals of norm `n`, `n ≤ x`.
pub fn principal_ideal_counts(d: &DomainDescriptor, x: u64) -> Vec<u64> {
    let small: SmallCubic = d.f.small().expect("small coefficients");
    let bound = (d.canonical_box_constant() * (x as f64).cbrt()).ceil() as i64 + 1;
    let mut counts = vec![0u64; x as usize + 1];
    for a0 in -bound..=bound {
        for a1 in -bound..=bound {
            for a2 in -bound..=bound {
                let n = small.norm([a0, a1, a2]).unsigned_abs();
                if n == 0 || n > x as u128 {
                    continue;
                }
                if d.is_canonical(&RingElem::new(a0, a1, a2)) {
                    counts[n as usize] += 1;
                }
            }
        }
    }
    counts
}

pub fn principal_norm_harmonic_sum(d: &DomainDescriptor, x: u64) -> HarmonicReport {
    let counts = principal_ideal_counts(d, x);
    let mut partial = vec![0.0f64; counts.len()];
    let mut acc = 0.0;
    for n in 1..counts.len() {
        acc += counts[n] as f64 / n as f64;
        partial[n] = acc;
    }
    let exact = (x <= 200).then(|| {
        let s: BigRational = (1..counts.len())
            .filter(|&n| counts[n] > 0)
            .map(|n| BigRational::new(BigInt::from(counts[n]), BigInt::from(n)))
            .fold(BigRational::zero(), |a, b| a + b);
        s.to_string()
    });
    const STEPS: usize = 64;
    let lo = (x as f64).sqrt().max(2.0);
    let pts: Vec<(f64, f64)> = (0..=STEPS)
        .map(|i| {
            let t = lo * ((x as f64) / lo).powf(i as f64 / STEPS as f64);
            let t = (t.floor() as usize).clamp(1, x as usize);
            ((t as f64).ln(), partial[t])
        })
        .collect();
    let (slope, intercept) = least_squares(&pts);
    HarmonicReport {
        x,
        value: acc,
        exact,
        ideals: counts.iter().sum(),
        slope,
        intercept,
    }
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

/// `|N(u)| = 1` for each generator.
pub fn all_units(f: &CubicPoly, g: &UnitGroup) -> bool {
    g.generators
        .iter()
        .chain(&g.totally_positive)
        .all(|u| f.norm(u).abs() == BigInt::from(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c2: i64, c1: i64, c0: i64) -> CubicPoly {
        CubicPoly::from_i64(c2, c1, c0).unwrap()
    }

    #[test]
    fn bound_check() {
        assert_eq!(find_units(&poly(0, 0, 2), 5).unwrap_err(), UnitError::BoundTooSmall(5));
    }

    #[test]
    fn plastic_field_unit_is_r() {
        let f = poly(0, -1, -1);
        let g = find_units(&f, 10).unwrap();
        assert_eq!(g.generators, vec![RingElem::r()]);
        assert!(g.explains_search);
        assert!((g.regulator - 1.324718f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn cube_root_two_unit() {
        let f = poly(0, 0, 2);
        assert_eq!(f.norm(&RingElem::new(1, 1, 0)), BigInt::from(-1));
        let g = find_units(&f, 10).unwrap();
        assert!(all_units(&f, &g));
        // 1/(1 + r) = −(1 − r + r²); normalised to positive real embedding
        assert_eq!(g.generators, vec![RingElem::new(1, -1, 1)]);
        assert!(g.explains_search);
    }

    #[test]
    fn totally_real_units() {
        let f = poly(1, -2, -1);
        let g = find_units(&f, 10).unwrap();
        assert_eq!(g.rank(), 2);
        assert!(all_units(&f, &g));
        assert!(g.explains_search);
        let emb = f.embeddings(1e-12);
        for u in &g.totally_positive {
            assert!(emb.embed(u).iter().all(|z| z.re > 0.0));
        }
        let idx = g.positive_index.unwrap();
        assert!(idx <= 8 && idx >= 2);
        // log vectors of the generators sum to zero across all three embeddings
        for u in &g.generators {
            let s: f64 = emb.embed(u).iter().map(|z| z.norm().ln()).sum();
            assert!(s.abs() < 1e-9);
        }
    }

    #[test]
    fn annulus_membership() {
        let f = poly(0, 0, 2);
        let g = find_units(&f, 10).unwrap();
        let d = DomainDescriptor::new(&f, &g);
        assert!(d.contains(&RingElem::one()));
        let w = &g.generators[0];
        assert!(!d.contains(w));
        assert!(!d.contains(&f.mul(w, w)));
        assert!(d.contains(&RingElem::r()) || d.contains(&-&RingElem::r()));
        let a = RingElem::new(5, -3, 7);
        let assoc = d.associates(&a);
        assert_eq!(assoc.len(), 2);
        assert_eq!(d.associates(&f.mul(&a, w)), assoc);
        assert_eq!(d.associates(&-&a), assoc);
    }

    #[test]
    fn cone_membership() {
        let f = poly(1, -2, -1);
        let g = find_units(&f, 10).unwrap();
        let d = DomainDescriptor::new(&f, &g);
        assert!(!d.is_annulus());
        // 1 is a cone generator, so it sits on the boundary of the open cones
        assert_eq!(d.classify(&RingElem::one()), Membership::Boundary);
        for a in [RingElem::new(3, 1, 1), RingElem::new(7, -2, 5), RingElem::new(2, 9, -4)] {
            assert_eq!(d.classify(&a), d.classify(&a.scale(&BigInt::from(2))));
            let assoc = d.associates(&a);
            for b in &assoc {
                assert!(d.contains(b));
                assert_eq!(f.norm(b).abs(), f.norm(&a).abs());
            }
            let u = &g.generators[0];
            assert_eq!(d.associates(&f.mul(&a, u)), assoc);
        }
    }

    #[test]
    fn norma_small_run() {
        let f = poly(0, 0, 2);
        let g = find_units(&f, 10).unwrap();
        let d = DomainDescriptor::new(&f, &g);
        let r = norm_size_constant(&d, 500, 1000, 7);
        assert!(r.constant >= 1.0);
        assert!(r.constant <= r.canonical_box_constant + 1e-9);
        assert!(r.constant <= d.domain_box_constant() + 1e-9);
        let again = norm_size_constant(&d, 500, 1000, 7);
        assert_eq!(r.constant, again.constant);
    }

    #[test]
    fn harmonic_small_x() {
        let f = poly(0, 0, 2);
        let g = find_units(&f, 10).unwrap();
        let d = DomainDescriptor::new(&f, &g);
        let h = principal_norm_harmonic_sum(&d, 2);
        // norms 1 and 2: (1) and (r)
        assert_eq!(h.ideals, 2);
        assert_eq!(h.exact.as_deref(), Some("3/2"));
    }

    #[test]
    fn harmonic_counts_match_ideal_counts() {
        // ℤ[∛2] is a PID: principal ideals of norm n = ideals of norm n
        let f = poly(0, 0, 2);
        let g = find_units(&f, 10).unwrap();
        let d = DomainDescriptor::new(&f, &g);
        let counts = principal_ideal_counts(&d, 400);
        for p in crate::arith::primes_up_to(400) {
            let expected = match crate::primeideals::splitting_type(&f, p).unwrap() {
                crate::primeideals::SplittingType::Split => 3,
                crate::primeideals::SplittingType::OneRoot => 1,
                crate::primeideals::SplittingType::Ramified => 1,
                crate::primeideals::SplittingType::Inert => 0,
            };
            assert_eq!(counts[p as usize], expected, "p = {p}");
        }
    }
}
