use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use cubic_lpf::cubicring::{CubicPoly, RingElem};
use cubic_lpf::expsums::{self, AlphaData};
use cubic_lpf::primeideals::{self, IdealFD};
use cubic_lpf::sieve::{self, ToyParams};
use cubic_lpf::sympoly::CofactorSystem;
use cubic_lpf::units::{self, DomainDescriptor};

use crate::{Cli, Command, ExpsumKind};

pub const SCHEMA: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit status 1.
    Validation(String),
    /// A checked property failed; exit status 2.
    Invariant(String),
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Output {
    pub command: String,
    pub json: Value,
    pub table: Option<Table>,
    /// Report is still written; exit status becomes 2.
    pub invariant_failure: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn big(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn parse_elem(s: &str) -> Result<RingElem, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(invalid(format!("expected a0,a1,a2, got {s:?}")));
    }
    let c: Result<Vec<BigInt>, _> = parts.iter().map(|p| p.parse::<BigInt>()).collect();
    let c = c.map_err(|_| invalid(format!("expected integers a0,a1,a2, got {s:?}")))?;
    Ok(RingElem::new(c[0].clone(), c[1].clone(), c[2].clone()))
}

fn parse_factor(s: &str) -> Result<(u64, u64, u32), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || invalid(format!("expected p:root[:e], got {s:?}"));
    match parts.as_slice() {
        [p, a] => Ok((p.parse().map_err(|_| bad())?, a.parse().map_err(|_| bad())?, 1)),
        [p, a, e] => Ok((
            p.parse().map_err(|_| bad())?,
            a.parse().map_err(|_| bad())?,
            e.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

struct Ctx {
    f: CubicPoly,
    seed: u64,
    threads: usize,
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    if g.threads == 0 {
        return Err(invalid("--threads must be at least 1"));
    }
    let f: CubicPoly = g.poly.parse().map_err(|e| invalid(format!("--poly {}: {e}", g.poly)))?;
    let ctx = Ctx {
        f,
        seed: g.seed,
        threads: g.threads,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.threads)
        .build()
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    let (name, result) = pool.install(|| dispatch(&ctx, &cli.command));
    let mut out = result?;
    let mut head = Map::new();
    head.insert("schema".into(), json!(SCHEMA));
    head.insert("command".into(), json!(name));
    let (c0, c1, c2) = ctx.f.coefficients();
    head.insert(
        "poly".into(),
        json!({ "coefficients": [big(c2), big(c1), big(c0)], "text": ctx.f.to_string(), "disc": big(ctx.f.disc()) }),
    );
    head.insert("seed".into(), json!(ctx.seed));
    head.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    if let Value::Object(body) = out.json {
        for (k, v) in body {
            head.insert(k, v);
        }
    }
    out.json = Value::Object(head);
    out.command = name.to_string();
    Ok(out)
}

fn plain(json: Value) -> Output {
    Output {
        command: String::new(),
        json,
        table: None,
        invariant_failure: None,
    }
}

fn dispatch(ctx: &Ctx, cmd: &Command) -> (&'static str, Result<Output, CliError>) {
    match cmd {
        Command::Identities { generic } => ("identities", identities(ctx, *generic)),
        Command::Roots { p } => ("roots", roots(ctx, *p)),
        Command::Lift { p, a, k } => ("lift", lift(ctx, *p, *a, *k)),
        Command::Kalpha { alpha, n } => ("kalpha", kalpha(ctx, alpha, n)),
        Command::Ideal {
            factors,
            alpha,
            check_upto,
        } => ("ideal", ideal(ctx, factors, alpha.as_deref(), *check_upto)),
        Command::Units {
            bound,
            samples,
            coord_bound,
            harmonic,
        } => ("units", units_cmd(ctx, *bound, *samples, *coord_bound, *harmonic)),
        Command::Scan { x, c } => ("scan", scan(ctx, *x, c)),
        Command::Weights { d, z, check_upto, list } => ("weights", weights(*d, *z, *check_upto, *list)),
        Command::Expsum { kind } => match kind {
            ExpsumKind::Sigma {
                alphas,
                count,
                coord_bound,
                n,
                j,
                x,
            } => ("expsum.sigma", sigma(ctx, alphas.as_deref(), *count, *coord_bound, *n, *j, *x)),
            ExpsumKind::Kloos {
                rows,
                coord_bound,
                floor,
            } => ("expsum.kloos", kloos(ctx, *rows, *coord_bound, *floor)),
            ExpsumKind::Psi { t, h, samples } => ("expsum.psi", psi(ctx, *t, *h, *samples)),
        },
        Command::S0s1 {
            x,
            delta,
            theta,
            q_constant,
            b13_constant,
            floor,
            no_windows,
            unit_bound,
        } => {
            let mut p = ToyParams::new(&ctx.f, *delta);
            if let Some(t) = theta {
                p.theta = *t;
            }
            p.q_constant = *q_constant;
            p.b13_constant = *b13_constant;
            if let Some(fl) = floor {
                p.small_prime_floor = *fl;
            }
            p.require_q_windows = !no_windows;
            ("s0s1", s0s1(ctx, *x, &p, *unit_bound))
        }
    }
}

fn identities(ctx: &Ctx, generic: bool) -> Result<Output, CliError> {
    let sys = if generic {
        CofactorSystem::generic()
    } else {
        let (c0, c1, c2) = ctx.f.coefficients();
        CofactorSystem::specialized(c0, c1, c2)
    }
    .map_err(|e| CliError::Invariant(e.to_string()))?;
    let report = sys.verify();
    let flags: Map<String, Value> = report.checks.iter().map(|c| (c.name.to_string(), json!(c.holds))).collect();
    let json = json!({
        "generic": generic,
        "identities": flags,
        "checks": report.checks,
        "informational": report.informational,
        "all_hold": report.all_hold(),
        "polynomials": {
            "q": sys.q.to_string(),
            "q0": sys.q0.to_string(),
            "U": sys.u.to_string(),
            "V": sys.v.to_string(),
            "B13": sys.b(1, 3).to_string(),
            "B22": sys.b(2, 2).to_string(),
            "B23": sys.b(2, 3).to_string(),
            "N": sys.norm.to_string(),
        },
    });
    let mut out = plain(json);
    if !report.all_hold() {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.holds).map(|c| c.name).collect();
        out.invariant_failure = Some(format!("identities failed: {}", failed.join(", ")));
    }
    Ok(out)
}

fn roots(ctx: &Ctx, p: u64) -> Result<Output, CliError> {
    let roots = primeideals::roots_mod_p(&ctx.f, p).map_err(invalid)?;
    let kind = primeideals::splitting_type(&ctx.f, p).map_err(invalid)?;
    let mut t = Table::new(&["p", "root"]);
    for r in &roots {
        t.push(vec![p.to_string(), r.to_string()]);
    }
    let mut out = plain(json!({ "p": p, "roots": roots, "splitting_type": kind }));
    out.table = Some(t);
    Ok(out)
}

fn lift(ctx: &Ctx, p: u64, a: u64, k: u32) -> Result<Output, CliError> {
    let v = primeideals::hensel_lift(&ctx.f, p, a, k).map_err(invalid)?;
    let m = BigInt::from(p).pow(k);
    let ok = (ctx.f.eval(&v) % &m).is_zero();
    let mut out = plain(json!({ "p": p, "a": a, "k": k, "lift": big(&v), "modulus": big(&m), "verified": ok }));
    if !ok {
        out.invariant_failure = Some("lift is not a root modulo p^k".into());
    }
    Ok(out)
}

fn kalpha(ctx: &Ctx, alpha: &str, ns: &[i64]) -> Result<Output, CliError> {
    let f = &ctx.f;
    let a = parse_elem(alpha)?;
    let by_cofactor = primeideals::k_alpha_cofactor(f, &a).map_err(invalid)?;
    let ideal = primeideals::factor_principal(f, &a).map_err(invalid)?;
    let by_ideal = primeideals::k_of_ideal(f, &ideal).map_err(invalid)?;
    let agree = by_cofactor == by_ideal;
    let mut checks = Vec::new();
    let mut mismatch = 0;
    for &n in ns {
        let nb = BigInt::from(n);
        let in_class = by_cofactor.contains(&nb);
        let divides = primeideals::divides(f, &a, &nb);
        mismatch += usize::from(in_class != divides);
        checks.push(json!({ "n": n, "in_class": in_class, "divides": divides }));
    }
    let mut out = plain(json!({
        "alpha": a,
        "norm": big(&f.norm(&a)),
        "ideal": ideal.to_string(),
        "k_cofactor": by_cofactor,
        "k_ideal": by_ideal,
        "agree": agree,
        "n_checks": checks,
    }));
    if !agree || mismatch > 0 {
        out.invariant_failure = Some(format!("k_alpha paths disagree ({mismatch} n mismatches)"));
    }
    Ok(out)
}

fn ideal(ctx: &Ctx, factors: &[String], alpha: Option<&str>, check_upto: Option<u64>) -> Result<Output, CliError> {
    let f = &ctx.f;
    let ideal: IdealFD = match alpha {
        Some(s) => primeideals::factor_principal(f, &parse_elem(s)?).map_err(invalid)?,
        None => {
            let fs: Result<Vec<_>, _> = factors.iter().map(|s| parse_factor(s)).collect();
            IdealFD::new(f, &fs?).map_err(invalid)?
        }
    };
    let rho = primeideals::rho(f, &ideal).map_err(invalid)?;
    let k = if rho == 1 {
        to_value(&primeideals::k_of_ideal(f, &ideal).map_err(invalid)?)
    } else {
        Value::Null
    };
    let mut body = json!({
        "ideal": ideal.to_string(),
        "factors": ideal,
        "norm": big(&ideal.norm),
        "rho": rho,
        "k_class": k,
    });
    let mut failure = None;
    if let Some(m_max) = check_upto {
        let mut mismatches = Vec::new();
        for m in 1..=m_max {
            let mb = BigInt::from(m);
            let contains = ideal.contains(f, &RingElem::new(mb.clone(), 0, 0)).map_err(invalid)?;
            let norm_divides = (&mb % &ideal.norm).is_zero();
            if contains != norm_divides {
                mismatches.push(m);
            }
        }
        if rho == 1 && !mismatches.is_empty() {
            failure = Some(format!("I | m and N(I) | m differ at m = {}", mismatches[0]));
        }
        mismatches.truncate(20);
        body["norm_divisibility"] = json!({ "upto": m_max, "first_mismatches": mismatches });
    }
    let mut out = plain(body);
    out.invariant_failure = failure;
    Ok(out)
}

fn units_cmd(ctx: &Ctx, bound: i64, samples: usize, coord_bound: i64, harmonic: Option<u64>) -> Result<Output, CliError> {
    let f = &ctx.f;
    if coord_bound < 1 {
        return Err(invalid("--coord-bound must be positive"));
    }
    let g = units::find_units(f, bound).map_err(invalid)?;
    let d = DomainDescriptor::new(f, &g);
    let norma = units::norm_size_constant(&d, samples, coord_bound, ctx.seed);
    let bad: Vec<String> = g
        .generators
        .iter()
        .chain(&g.totally_positive)
        .filter(|u| !f.norm(u).abs().is_one())
        .map(|u| u.to_string())
        .collect();
    let mut t = Table::new(&["decade", "count", "max_ratio"]);
    for b in &norma.buckets {
        t.push(vec![b.decade.to_string(), b.count.to_string(), format!("{:.12}", b.max_ratio)]);
    }
    let mut body = json!({
        "units": g,
        "rank": g.rank(),
        "domain": d.summary(),
        "norma": norma,
    });
    if let Some(x) = harmonic {
        if x < 2 {
            return Err(invalid("--harmonic must be at least 2"));
        }
        body["harmonic"] = to_value(&units::principal_norm_harmonic_sum(&d, x));
    }
    let mut out = plain(body);
    out.table = Some(t);
    if !bad.is_empty() {
        out.invariant_failure = Some(format!("non-units returned: {}", bad.join(" ")));
    }
    Ok(out)
}

fn scan(ctx: &Ctx, x: u64, cs: &[f64]) -> Result<Output, CliError> {
    let r = sieve::scan_density(&ctx.f, x, cs, ctx.threads).map_err(invalid)?;
    let mut t = Table::new(&["c", "count", "density"]);
    for row in &r.rows {
        t.push(vec![row.c.to_string(), row.count.to_string(), format!("{:.12}", row.density)]);
    }
    let mut sorted: Vec<_> = r.rows.iter().collect();
    sorted.sort_by(|a, b| a.c.total_cmp(&b.c));
    let monotone = sorted.windows(2).all(|w| w[0].count >= w[1].count);
    let mut out = plain(to_value(&r));
    out.table = Some(t);
    if !monotone {
        out.invariant_failure = Some("counts increase with c".into());
    }
    Ok(out)
}

fn weights(d: u64, z: u64, check_upto: Option<u64>, list: bool) -> Result<Output, CliError> {
    let w = sieve::rosser_weights(d, z).map_err(invalid)?;
    let plus = w.weights.values().filter(|&&v| v > 0).count();
    let mut body = json!({
        "D": d,
        "z": z,
        "support": w.weights.len(),
        "positive": plus,
        "negative": w.weights.len() - plus,
        "max_d": w.weights.keys().max(),
    });
    if list {
        body["weights"] = w.weights.iter().map(|(d, l)| json!([d, l])).collect();
    }
    let mut failure = None;
    if let Some(n) = check_upto {
        if n > 100_000_000 {
            return Err(invalid("--check-upto is limited to 10^8"));
        }
        let c = sieve::check_rosser(&w, n);
        if !c.holds {
            failure = Some(format!("weight property fails at n = {:?}", c.first_violation));
        }
        body["check"] = to_value(&c);
    }
    let mut t = Table::new(&["d", "lambda"]);
    for (d, l) in &w.weights {
        t.push(vec![d.to_string(), l.to_string()]);
    }
    let mut out = plain(body);
    out.table = Some(t);
    out.invariant_failure = failure;
    Ok(out)
}

fn sigma(ctx: &Ctx, alphas: Option<&str>, count: usize, coord_bound: i64, n: i64, j: i64, x: u64) -> Result<Output, CliError> {
    let f = &ctx.f;
    let data: Vec<AlphaData> = match alphas {
        Some(s) => {
            let set: Result<Vec<RingElem>, _> = s.split(';').filter(|p| !p.trim().is_empty()).map(parse_elem).collect();
            let set = set?;
            set.iter().map(|a| AlphaData::new(f, a)).collect::<Result<_, _>>().map_err(invalid)?
        }
        None => {
            if coord_bound < 1 {
                return Err(invalid("--coord-bound must be positive"));
            }
            let d = expsums::sample_admissible(f, count, coord_bound, ctx.seed);
            if d.len() < count {
                return Err(invalid(format!("only {} admissible elements found", d.len())));
            }
            d
        }
    };
    if data.is_empty() {
        return Err(invalid("empty element set"));
    }
    let s = expsums::sigma_from(&data, n, j, x);
    let e = expsums::e_from(&data, n, j, x);
    let bound = expsums::sigma_e_bound(&data, n);
    let diff = (s.value - e.value).norm();
    let max_residual = data.iter().map(|d| d.lemma_residual()).fold(0.0, f64::max);
    let mut t = Table::new(&["a0", "a1", "a2", "norm", "k", "q", "E", "residual"]);
    for d in &data {
        t.push(vec![
            d.alpha.a0.to_string(),
            d.alpha.a1.to_string(),
            d.alpha.a2.to_string(),
            d.norm.to_string(),
            d.k.to_string(),
            d.q.to_string(),
            format!("{:.6e}", d.error_term()),
            format!("{:.3e}", d.lemma_residual()),
        ]);
    }
    let mut out = plain(json!({
        "sigma": s,
        "e": e,
        "difference": diff,
        "bound": bound,
        "max_lemma_residual": max_residual,
    }));
    out.table = Some(t);
    if diff > bound + 1e-9 || max_residual > 1e-9 || s.abs > s.term_count as f64 + 1e-9 {
        out.invariant_failure = Some("exponential sum bounds violated".into());
    }
    Ok(out)
}

fn kloos(ctx: &Ctx, rows: usize, coord_bound: i64, floor: u64) -> Result<Output, CliError> {
    if coord_bound < 2 {
        return Err(invalid("--coord-bound must be at least 2"));
    }
    let s = expsums::kloosterman_sweep(&ctx.f, rows, coord_bound, floor, ctx.seed).map_err(invalid)?;
    let mut t = Table::new(&["a1", "a2", "q", "q0", "h", "terms", "abs", "envelope", "ratio"]);
    for r in &s.rows {
        t.push(vec![
            r.a1.to_string(),
            r.a2.to_string(),
            r.q.to_string(),
            r.q_parts[0].to_string(),
            r.h.to_string(),
            r.terms.to_string(),
            format!("{:.9}", r.abs),
            format!("{:.9}", r.envelope),
            format!("{:.9}", r.ratio),
        ]);
    }
    let mut out = plain(to_value(&s));
    out.table = Some(t);
    Ok(out)
}

fn psi(ctx: &Ctx, t: Option<f64>, h: u64, samples: usize) -> Result<Output, CliError> {
    if h == 0 {
        return Err(invalid("--H must be at least 1"));
    }
    match t {
        Some(t) => {
            if !t.is_finite() {
                return Err(invalid("--t must be finite"));
            }
            let residual = expsums::psi_residual(t, h).map_err(invalid)?;
            let envelope = expsums::psi_envelope(t, h);
            Ok(plain(json!({
                "t": t,
                "H": h,
                "psi": expsums::psi(t),
                "residual": residual,
                "envelope": envelope,
                "ratio": residual / envelope,
                "at_integer": t.fract() == 0.0,
            })))
        }
        None => {
            if samples < 2 {
                return Err(invalid("--samples must be at least 2"));
            }
            let s = expsums::psi_constant_sweep(samples, h, ctx.seed).map_err(invalid)?;
            Ok(plain(to_value(&s)))
        }
    }
}

fn s0s1(ctx: &Ctx, x: u64, p: &ToyParams, unit_bound: i64) -> Result<Output, CliError> {
    let f = &ctx.f;
    let g = units::find_units(f, unit_bound).map_err(invalid)?;
    let d = DomainDescriptor::new(f, &g);
    let r = sieve::s0_s1_toy(f, &d, x, p).map_err(invalid)?;
    let mut t = Table::new(&["k_prime", "a0", "a1", "a2", "norm", "k_alpha", "weight", "count"]);
    for term in &r.terms {
        t.push(vec![
            term.k_prime.to_string(),
            term.alpha.a0.to_string(),
            term.alpha.a1.to_string(),
            term.alpha.a2.to_string(),
            term.norm.to_string(),
            term.k_alpha.to_string(),
            term.weight.to_string(),
            term.count.to_string(),
        ]);
    }
    let log_ok = r.min_log1_ratio.map_or(true, |m| m >= 1.0 + p.delta);
    let identity = r.identity_holds;
    let empty = r.k_primes == 0;
    let mut body = to_value(&r);
    body["empty_k"] = json!(empty);
    let mut out = plain(body);
    out.table = Some(t);
    if !identity || !log_ok {
        out.invariant_failure = Some("S = X*S0 + S1 or the log bound failed".into());
    }
    Ok(out)
}
