//! Pipelines behind the subcommands.

use crate::report::{Check, Report};
use crate::scenario::{SchemaError, Scenario};
use cmpadic::arith;
use cmpadic::fixture::{CmSetup, SetupParams};
use cmpadic::heckechar::{inert_character, FiniteType, HeckeCharacter, PadicCtx};
use cmpadic::localint::{self, LocalKind, LocalRep};
use cmpadic::numfield::Q;
use cmpadic::padic::constants::{self as cst, NormalizationConstants};
use cmpadic::padic::family::{self, FamilyError, LambdaQExp};
use cmpadic::padic::{max_prec, specialize_p_m, working_prec, PadicError, PadicScalar};
use cmpadic::petersson::{default_instance, verify_identity, Identity, PeterssonError, PeterssonParams};
use cmpadic::qexp::{cm_form, cm_form_coprime, QExpansion, QexpError, Scalar};
use cmpadic::quadfield::QuadField;
use cmpadic::exec::Exec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CmForm,
    Stabilize,
    Petersson,
    VerifyEuler,
    LocalIntegral,
    Family,
    Constants,
    FullLedger,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::CmForm,
        Command::Stabilize,
        Command::Petersson,
        Command::VerifyEuler,
        Command::LocalIntegral,
        Command::Family,
        Command::Constants,
        Command::FullLedger,
    ];
    pub fn name(self) -> &'static str {
        match self {
            Command::CmForm => "cm-form",
            Command::Stabilize => "stabilize",
            Command::Petersson => "petersson",
            Command::VerifyEuler => "verify-euler",
            Command::LocalIntegral => "local-integral",
            Command::Family => "family",
            Command::Constants => "constants",
            Command::FullLedger => "full-ledger",
        }
    }
    fn needs_cm(self) -> bool {
        matches!(self, Command::CmForm | Command::Stabilize | Command::Family | Command::Constants | Command::FullLedger)
    }
}

#[derive(Debug)]
pub enum CliError {
    Schema(SchemaError),
    Hypothesis(Vec<String>),
    Budget(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(e) => write!(f, "schema error: {e}"),
            CliError::Hypothesis(v) => {
                writeln!(f, "hypotheses violated:")?;
                for x in v {
                    writeln!(f, "  - {x}")?;
                }
                Ok(())
            }
            CliError::Budget(m) => write!(f, "budget exhausted: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<PadicError> for CliError {
    fn from(e: PadicError) -> Self {
        match e {
            PadicError::Precision { .. } | PadicError::Budget { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Truncation { .. } | FamilyError::Precision { .. } => CliError::Budget(e.to_string()),
            FamilyError::Padic(p) => p.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<QexpError> for CliError {
    fn from(e: QexpError) -> Self {
        match e {
            QexpError::Truncation { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<PeterssonError> for CliError {
    fn from(e: PeterssonError) -> Self {
        match e {
            PeterssonError::Hypothesis(m) => CliError::Hypothesis(vec![m]),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn rt<E: fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Command-line overrides of the scenario budget.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub precision_digits: Option<u32>,
    pub padic_precision: Option<u32>,
    pub qexp_bound: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) {
        if let Some(x) = self.precision_digits {
            s.budget.precision_digits = x;
        }
        if let Some(x) = self.padic_precision {
            s.budget.padic_precision = x;
        }
        if let Some(x) = self.qexp_bound {
            s.budget.qexp_bound = x;
        }
    }
}

/// Every violated hypothesis of the CM construction, by clause.
pub fn hypotheses(s: &Scenario) -> Vec<String> {
    let mut bad = Vec::new();
    let p = s.p;
    if !(p > 2 && arith::is_prime(p)) {
        bad.push(format!("p = {p} must be an odd prime"));
    }
    let kf = match QuadField::new(s.d) {
        Ok(k) => Some(k),
        Err(e) => {
            bad.push(format!("d = {}: {e:?}", s.d));
            None
        }
    };
    if let Some(k) = &kf {
        if k.class_group().h != 1 {
            bad.push(format!("h_K = {} (the construction needs h_K = 1)", k.class_group().h));
        }
        if arith::is_prime(p) && !matches!(k.factor_rational_prime(p), Ok(cmpadic::quadfield::Splitting::Split(..))) {
            bad.push(format!("p = {p} must split in K"));
        }
        if arith::is_prime(s.lambda) && !matches!(k.factor_rational_prime(s.lambda), Ok(cmpadic::quadfield::Splitting::Inert(..))) {
            bad.push(format!("λ = {} must be inert in K", s.lambda));
        }
    }
    if !arith::is_prime(s.lambda) {
        bad.push(format!("λ = {} must be prime", s.lambda));
    }
    if s.c_lambda == 0 {
        bad.push("c_λ ≥ 1".into());
    }
    if s.nu_order < 2 || (p > 1 && (p - 1) % s.nu_order != 0) {
        bad.push(format!("ν has order {} which must be ≥ 2 and divide p − 1", s.nu_order));
    }
    if (s.a - 1) % 2 != 0 {
        bad.push(format!("a − 1 = {} must be even", s.a - 1));
    }
    if s.d == 3 && (s.a - 1) % 6 != 0 {
        bad.push("a − 1 ≡ 0 mod 6 for d = 3".into());
    }
    let f = match cmpadic::qexp::builtin_or_load(&s.form, s.budget.qexp_bound.max(s.lambda as usize + 1).max(p.max(2) as usize)) {
        Ok(f) => Some(f),
        Err(QexpError::Truncation { need, have }) => {
            bad.push(format!("newform file has {have} coefficients, {need} needed"));
            None
        }
        Err(e) => {
            bad.push(format!("form '{}': {e}", s.form));
            None
        }
    };
    if let Some(f) = &f {
        if !f.chi.is_trivial() {
            bad.push("f must have trivial character".into());
        }
        if f.weight % 2 != 0 {
            bad.push(format!("k = {} must be even", f.weight));
        }
        if arith::gcd(f.level, 2 * s.d) != 1 && arith::gcd(f.level, s.d) != 1 {
            bad.push(format!("d = {} must be prime to the level {}", s.d, f.level));
        }
        if (2 * p * s.d * f.level) % s.lambda == 0 {
            bad.push(format!("λ = {} must not divide 2pdN", s.lambda));
        }
        for &m in &s.weights {
            if m <= f.weight {
                bad.push(format!("m = {m} must exceed k = {}", f.weight));
            }
            if p > 1 && (m - s.a).rem_euclid(p - 1) != 0 {
                bad.push(format!("m = {m} must be ≡ a = {} mod p − 1", s.a));
            }
        }
        if arith::val(f.level, p) == 0 && p > 1 {
            match f.coef_rational(p as usize) {
                Some(a) if arith::is_prime(p) => {
                    let ap = PadicScalar::from_rational(p as u64, &a, 4);
                    if !ap.is_unit() {
                        bad.push(format!("f must be ordinary at p (a_p = {a})"));
                    }
                }
                None => bad.push("a_p(f) must be rational".into()),
                _ => {}
            }
        }
    }
    if bad.is_empty() {
        if let Err(e) = CmSetup::new(setup_params(s)) {
            bad.push(e.to_string());
        }
    }
    bad
}

fn budget_checks(s: &Scenario) -> Result<(), CliError> {
    let b = &s.budget;
    if b.qexp_bound > b.max_qexp_bound {
        return Err(CliError::Budget(format!("qexp_bound {} exceeds max_qexp_bound {}", b.qexp_bound, b.max_qexp_bound)));
    }
    if s.p > 2 && arith::is_prime(s.p) {
        let need = working_prec(s.p as u64, b.padic_precision, b.lambda_degree);
        let have = max_prec(s.p as u64);
        if need > have {
            return Err(CliError::Budget(format!("p-adic working precision {need} exceeds the {have} digits available for p = {}", s.p)));
        }
    }
    if b.lambda_degree > 256 {
        return Err(CliError::Budget(format!("Λ-series degree {} exceeds 256", b.lambda_degree)));
    }
    Ok(())
}

pub fn setup_params(s: &Scenario) -> SetupParams {
    let prec = if s.p > 2 && arith::is_prime(s.p) { working_prec(s.p as u64, s.budget.padic_precision, s.budget.lambda_degree) } else { 12 };
    SetupParams {
        d: s.d,
        p: s.p,
        form: s.form.clone(),
        a: s.a,
        lambda: s.lambda,
        c_lambda: s.c_lambda,
        nu_order: s.nu_order,
        nu_exp: s.nu_exp,
        prec,
        bound: s.budget.qexp_bound.max(s.lambda as usize + 1),
    }
}

fn environment(s: &Scenario) -> BTreeMap<String, Value> {
    let mut e = BTreeMap::new();
    e.insert("precision_digits".into(), json!(s.budget.precision_digits));
    e.insert("effective_float_digits".into(), json!(s.budget.precision_digits.min(15)));
    e.insert("padic_precision".into(), json!(s.budget.padic_precision));
    e.insert("qexp_bound".into(), json!(s.budget.qexp_bound));
    e.insert("lambda_degree".into(), json!(s.budget.lambda_degree));
    e.insert("seed".into(), json!(s.seed));
    e.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    e
}

/// Runs one subcommand; `only` keeps checks whose name starts with one of the given prefixes.
pub fn execute(cmd: Command, s: &Scenario, only: Option<&[String]>) -> Result<Report, CliError> {
    budget_checks(s)?;
    if cmd.needs_cm() {
        let bad = hypotheses(s);
        if !bad.is_empty() {
            return Err(CliError::Hypothesis(bad));
        }
    }
    let mut rep = Report::new(cmd.name(), s.echo(), environment(s));
    match cmd {
        Command::CmForm => cm_form_checks(s, &mut rep)?,
        Command::Stabilize => stabilize_checks(s, &mut rep)?,
        Command::Petersson => petersson_checks(s, &s.identities, &mut rep)?,
        Command::VerifyEuler => petersson_checks(s, &s.euler_identities, &mut rep)?,
        Command::LocalIntegral => local_checks(s, &mut rep)?,
        Command::Family => family_checks(s, &mut rep)?,
        Command::Constants => constants_checks(s, &mut rep, false)?,
        Command::FullLedger => constants_checks(s, &mut rep, true)?,
    }
    if let Some(prefixes) = only {
        for pre in prefixes {
            if !rep.checks.iter().any(|c| c.name.starts_with(pre.as_str())) {
                return Err(CliError::Schema(SchemaError { file: "--check".into(), line: None, section: None, key: Some(pre.clone()), msg: "no check of that name".into() }));
            }
        }
        rep.checks.retain(|c| prefixes.iter().any(|pre| c.name.starts_with(pre.as_str())));
    }
    rep.finish();
    Ok(rep)
}

fn setup(s: &Scenario) -> Result<CmSetup, CliError> {
    CmSetup::new(setup_params(s)).map_err(|e| CliError::Hypothesis(vec![e.to_string()]))
}

fn primes_upto(n: i64) -> Vec<i64> {
    (2..=n).filter(|&q| arith::is_prime(q)).collect()
}

fn hecke_records(g: &QExpansion, label: &str, inputs: &[(&str, Value)], rep: &mut Report) -> Result<(), CliError> {
    for q in primes_upto(50) {
        let t = g.hecke_t(q)?;
        let aq = g.coef(q as usize);
        let mism = t.proportional_to(g, &aq, t.bound());
        let mut c = Check::new(format!("{label}.T({q})"), "qexp.hecke_eigen").exact(
            format!("T({q})g to q^{}", t.bound()),
            match mism {
                None => "a_q·g".to_string(),
                Some(n) => format!("differs at n = {n}"),
            },
            mism.is_none(),
        );
        c = c.input("q", q).input("certified_to", t.bound());
        for (k, v) in inputs {
            c = c.input(k, v);
        }
        rep.push(c);
    }
    Ok(())
}

/// ψ of conductor (λ) for a field other than the scenario's.
fn generic_cm_character(d: i64) -> Result<HeckeCharacter, CliError> {
    let k = QuadField::new(d).map_err(|e| CliError::Hypothesis(vec![format!("d = {d}: {e:?}")]))?;
    let lam = (3..200)
        .filter(|&l| arith::is_prime(l) && d % l != 0)
        .find(|&l| matches!(k.factor_rational_prime(l), Ok(cmpadic::quadfield::Splitting::Inert(..))))
        .ok_or_else(|| CliError::Hypothesis(vec![format!("no small inert prime in Q(√−{d})")]))?;
    // order λ+1 is trivial on Z; the infinity type absorbs the units
    let nu = inert_character(&k, lam, lam + 1, 1).map_err(rt)?;
    for w in 1..13 {
        if let Ok(ch) = HeckeCharacter::new(k, FiniteType::single(nu.clone()), w, 0) {
            return Ok(ch);
        }
    }
    Err(CliError::Hypothesis(vec![format!("no weight ≤ 12 makes ν unit-compatible for d = {d}")]))
}

fn cm_form_checks(s: &Scenario, rep: &mut Report) -> Result<(), CliError> {
    let b = s.budget.qexp_bound;
    for &d in &s.cm_fields {
        let psi = generic_cm_character(d)?;
        let g = cm_form(&psi, b)?;
        let lvl = d * psi.conductor().norm();
        rep.push(Check::new(format!("cm-form.d={d}.level"), "qexp.cm_form").exact(g.level, lvl, g.level == lvl).input("d", d));
        hecke_records(&g, &format!("cm-form.d={d}"), &[("d", json!(d)), ("weight", json!(g.weight))], rep)?;
    }
    let su = setup(s)?;
    for &m in &s.weights {
        let pm = su.pp.psi_m(&su.ctx, m);
        let g = cm_form(&pm, b)?;
        rep.push(Check::new(format!("cm-form.psi_m.m={m}.weight"), "qexp.cm_form").exact(g.weight, m, g.weight == m).input("m", m));
        hecke_records(&g, &format!("cm-form.psi_m.m={m}"), &[("m", json!(m))], rep)?;
    }
    Ok(())
}

fn nf_string(g: &QExpansion, x: &Scalar) -> String {
    match x {
        Scalar::Exact(v) => g.field().map(|f| f.fmt(v)).unwrap_or_default(),
        Scalar::Complex(c) => format!("{c}"),
    }
}

fn stabilize_checks(s: &Scenario, rep: &mut Report) -> Result<(), CliError> {
    let su = setup(s)?;
    let b = s.budget.qexp_bound;
    let p = s.p;
    for &m in &s.weights {
        let pm = su.pp.psi_m(&su.ctx, m);
        let g = cm_form(&pm, b)?;
        let fld = g.field().unwrap().clone();
        let beta = Scalar::Exact(pm.eval(&su.ctx.frak_p).to_nf(&su.ctx.k, &fld).map_err(rt)?);
        let alpha = Scalar::Exact(pm.eval(&su.ctx.frak_pbar).to_nf(&su.ctx.k, &fld).map_err(rt)?);
        let gs = g.p_stabilize(p, &beta);
        let ap = gs.coef(p as usize);
        rep.push(Check::new(format!("stabilize.m={m}.a_p"), "qexp.p_stabilize").exact(nf_string(&gs, &ap), nf_string(&gs, &alpha), ap == alpha).input("m", m));
        let coprime = cm_form_coprime(&pm, &su.ctx.frak_p, b)?;
        let mism = gs.proportional_to(&coprime, &Scalar::Exact(fld.one()), b);
        rep.push(
            Check::new(format!("stabilize.m={m}.coprime-sum"), "qexp.p_stabilize")
                .exact(format!("g♯ to q^{b}"), mism.map_or("Σ over 𝔭-coprime ideals".into(), |n| format!("differs at n = {n}")), mism.is_none())
                .input("m", m),
        );
        let up = gs.hecke_t(p)?;
        let mism = up.proportional_to(&gs, &alpha, up.bound());
        rep.push(
            Check::new(format!("stabilize.m={m}.U_p"), "qexp.p_stabilize")
                .exact(format!("U_p g♯ to q^{}", up.bound()), mism.map_or("α·g♯".into(), |n| format!("differs at n = {n}")), mism.is_none())
                .input("m", m),
        );
    }
    Ok(())
}

fn petersson_checks(s: &Scenario, names: &[String], rep: &mut Report) -> Result<(), CliError> {
    let params = PeterssonParams { x_nodes: s.x_nodes, y_nodes: s.y_nodes, y_max: None, precision_digits: s.budget.precision_digits, exec: Exec::Parallel };
    let b = s.budget.qexp_bound.max(40);
    for name in names {
        let id = Identity::parse(name).ok_or_else(|| CliError::Runtime(format!("unknown identity {name}")))?;
        let inst = default_instance(id, b)?;
        let r = verify_identity(id, &inst, &params, s.tolerance.petersson)?;
        rep.push(
            Check::new(format!("petersson.{}", id.name()), &format!("petersson.{}", id.name()))
                .numeric(json!(r.lhs), json!(r.rhs), r.rel_error, s.tolerance.petersson)
                .input("p", inst.p)
                .input("f_weight", inst.f.weight)
                .input("f_level", inst.f.level)
                .input("quadrature_error", r.quad_error)
                .input("x_nodes", s.x_nodes)
                .input("y_nodes", s.y_nodes),
        );
    }
    Ok(())
}

fn c2j(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn local_checks(s: &Scenario, rep: &mut Report) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let tol = s.tolerance.local;
    let ss = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.3), Complex64::new(0.0, -0.3), Complex64::new(0.1, 0.0)];
    let one = Complex64::new(1.0, 0.0);
    for i in 0..s.local_draws {
        let qq = s.local_primes[rng.gen_range(0..s.local_primes.len())];
        if !(qq > 2 && arith::is_prime(qq)) {
            return Err(CliError::Hypothesis(vec![format!("local prime {qq} must be an odd prime")]));
        }
        let sv = ss[rng.gen_range(0..ss.len())];
        let (a, b): (f64, f64) = (rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.0..std::f64::consts::TAU));
        let j = 1 + rng.gen_range(0..qq - 2);
        let ps = |mu: Complex64, chi: i64| LocalRep { q: qq, kind: LocalKind::RamifiedPsC1 { mu, chi }, central: one };
        let (r2, r3) = (ps(Complex64::from_polar(1.0, a), j), ps(Complex64::from_polar(1.0, b), -j));
        let br = localint::rs_integral_brute(&r2, &r3, sv, s.local_vmax, one).map_err(rt)?;
        let (jc, js) = localint::rs_integral_closed(&r2, &r3, sv).map_err(rt)?;
        let norm = localint::rs_normalizer(&r2, &r3, sv).map_err(rt)?;
        let (istar, _) = localint::i_star_brute(&r2, &r3, sv, s.local_vmax).map_err(rt)?;
        let tw = localint::rs_integral_brute(&r2, &r3, sv, s.local_vmax, Complex64::from_polar(1.0, 1.1)).map_err(rt)?;
        let inp = |c: Check| c.input("draw", i).input("q", qq).input("s", c2j(sv)).input("mu2_arg", a).input("mu3_arg", b).input("chi", j).input("vmax", s.local_vmax);
        rep.push(inp(Check::new(format!("local.draw{i}.closed-form"), "localint.rs_integral").numeric(c2j(br.value()), c2j(jc), (br.value() - jc).norm(), tol)));
        rep.push(inp(Check::new(format!("local.draw{i}.normalized"), "localint.rs_integral").numeric(c2j(br.value() * norm), c2j(js), (br.value() * norm - js).norm(), tol)));
        let qi = Complex64::new(1.0 / qq as f64, 0.0);
        rep.push(inp(Check::new(format!("local.draw{i}.i-star"), "localint.i_star").numeric(c2j(istar), c2j(qi), (istar - qi).norm(), tol)));
        rep.push(inp(Check::new(format!("local.draw{i}.twist"), "localint.twist_invariance").numeric(c2j(tw.value()), c2j(br.value()), (tw.value() - br.value()).norm(), tol)));
    }
    Ok(())
}

fn padic_vec_check(name: String, spec: &[PadicScalar], classical: &[PadicScalar], p: u64, digits: u32) -> Check {
    let agree = spec.iter().zip(classical).map(|(x, y)| x.agreement(y)).min().unwrap_or(i32::MAX).min(digits as i32 + 64);
    let first = family::first_mismatch(spec, classical, digits as i32);
    Check::new(name, "padic.family.specialize").padic(
        format!("P_m(F) to q^{}", spec.len() - 1),
        first.map_or("classical stabilized form".into(), |n| format!("differs at n = {n}")),
        p,
        agree,
        digits,
    )
}

fn family_checks(s: &Scenario, rep: &mut Report) -> Result<(), CliError> {
    let su = setup(s)?;
    let (b, mm, dd) = (s.budget.qexp_bound, s.budget.padic_precision, s.budget.lambda_degree);
    let digits = s.tolerance.padic_digits;
    let ctx = &su.ctx;
    let psi = &su.pp.psi;
    let fam = family::bg_psi(ctx, psi, s.a, b, mm, dd)?;
    let fam_rho = family::bg_psi_rho(ctx, psi, s.a, b, mm, dd)?;
    let p = ctx.pu();
    for &m in &s.weights {
        let cl = family::qexp_to_padic(ctx, &family::classical_stabilized(ctx, psi, m, b)?)?;
        rep.push(padic_vec_check(format!("family.psi.m={m}"), &fam.specialize(m), &cl, p, digits).input("m", m).input("B", b).input("M", mm).input("D", dd));
        let cl = family::qexp_to_padic(ctx, &family::classical_rho_stabilized(ctx, psi, m, b)?)?;
        rep.push(padic_vec_check(format!("family.psi-rho.m={m}"), &fam_rho.specialize(m), &cl, p, digits).input("m", m).input("B", b).input("M", mm).input("D", dd));
    }
    // Hecke operators commute with specialization
    let m = s.weights[0];
    for q in [2i64, 3] {
        if arith::gcd(q, fam.level * s.p) != 1 || b / (q as usize) < 2 {
            continue;
        }
        let tf: LambdaQExp = family::lambda_hecke_t(&fam, q)?;
        let g = family::classical_stabilized(ctx, psi, m, b)?.hecke_t(q)?;
        let cl = family::qexp_to_padic(ctx, &g)?;
        rep.push(padic_vec_check(format!("family.T({q}).m={m}"), &tf.specialize(m), &cl, p, digits).input("m", m).input("q", q));
    }
    rep.data.insert("tame_level".into(), json!(fam.level));
    Ok(())
}

fn nc(x: &NormalizationConstants) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn rel_agreement(x: &PadicScalar, y: &PadicScalar) -> i32 {
    if y.is_zero() {
        return if x.is_zero() { i32::MAX } else { 0 };
    }
    x.div(y).agreement(&PadicScalar::one(x.p, (x.abs_prec() - x.val).max(1) as u32))
}

fn constants_checks(s: &Scenario, rep: &mut Report, full: bool) -> Result<(), CliError> {
    let su = setup(s)?;
    let p = su.ctx.pu();
    let digits = s.tolerance.padic_digits;
    let mut ledger = BTreeMap::new();

    // characters
    let ctx10 = PadicCtx::new(su.ctx.k, s.p, 10).map_err(rt)?;
    let ids: Vec<_> = (1..).filter(|n| n % s.p != 0).flat_map(|n| su.ctx.k.ideals_of_norm(n)).take(50).collect();
    let worst = ids
        .iter()
        .map(|id| {
            let lhs = ctx10.alpha(id).mul(&ctx10.alpha_c(id));
            let n = ctx10.int(id.norm() as i128);
            lhs.agreement(&n.div(&n.teichmuller()))
        })
        .min()
        .unwrap_or(0);
    rep.push(
        Check::new("characters.alpha-alpha-c", "heckechar.alpha")
            .padic("α(𝔞)α^c(𝔞)".into(), "ω⁻¹(N𝔞)N𝔞".into(), p, worst.min(10), 10)
            .input("ideals", ids.len()),
    );
    let bad = su.clause_failures(300);
    rep.push(Check::new("characters.phi-psi-clauses", "heckechar.build_phi_psi").exact(bad.len(), 0, bad.is_empty()).input("norm_bound", 300).input("failures", &bad));

    // (*)_{f,λ}
    let a_lam = su.a_lambda().ok_or_else(|| CliError::Runtime("a_λ(f) must be rational".into()))?;
    let star = cst::star_f_lambda_from_a(&a_lam, s.lambda, su.k, s.c_lambda);
    let t = cmpadic::fixture::q_to_f64(&a_lam) / (s.lambda as f64).powf((su.k - 1) as f64 / 2.0);
    let disc = Complex64::new(t * t - 4.0, 0.0).sqrt();
    let x = (Complex64::new(t, 0.0) + disc) / 2.0;
    let star_num = localint::star_f_lambda(x, s.lambda, s.c_lambda).re;
    let star_f = cmpadic::fixture::q_to_f64(&star);
    rep.push(
        Check::new("constants.star-f-lambda", "localint.star_f_lambda")
            .numeric(json!(star.to_string()), json!(star_num), (star_f - star_num).abs() / star_num.abs().max(1e-300), 1e-9)
            .input("a_lambda", a_lam.to_string())
            .input("lambda", s.lambda)
            .input("c_lambda", s.c_lambda),
    );
    let spot = localint::star_f_lambda_exact(&Q::from_integer(1.into()), 5, 1);
    let expected = Q::new(9.into(), 5.into());
    rep.push(
        Check::new("constants.star-spot", "localint.star_f_lambda")
            .exact(spot.to_string(), expected.to_string(), spot == expected)
            .input("c_lambda", 1)
            .input("ratio", 1)
            .input("lambda", 5)
            .input("variant_value", localint::star_f_lambda_variant(&Q::from_integer(1.into()), 5, 1).to_string()),
    );

    let eta = su.eta_pbar().map_err(rt)?;
    for &m in &s.weights {
        let cp = su.const_params(m);
        let mut entry = BTreeMap::new();
        let c3 = cst::c3(&cp).map_err(rt)?;
        let c4 = cst::c4(&cp).map_err(rt)?;
        let c4d = cst::c4_from_c3(&cp).map_err(rt)?;
        entry.insert("C1", nc(&cst::c1(&cp).map_err(rt)?));
        entry.insert("S", nc(&cst::explicit_ichino_scalar(&cp).map_err(rt)?));
        entry.insert("C2", nc(&cst::c2(&cp).map_err(rt)?));
        entry.insert("C3", nc(&c3));
        entry.insert("C4", nc(&c4));
        entry.insert("C4_from_C3", nc(&c4d));
        rep.push(Check::new(format!("constants.c4-bookkeeping.m={m}"), "padic.constants.c4").exact(c4d.to_string(), c4.to_string(), c4d == c4).input("m", m).input("r0", su.r0));
        let c2 = cst::c2(&cp).map_err(rt)?;
        let c2l = cst::c2_from_l_alg(&cp).map_err(rt)?;
        rep.push(Check::new(format!("constants.c2-l-alg.m={m}"), "padic.constants.c2").exact(c2l.to_string(), c2.to_string(), c2l == c2).input("m", m));
        if full {
            let chain = cst::c3_from_chain(&cp).map_err(rt)?;
            entry.insert("C1_S_over_C2", nc(&chain));
            let ratio = cst::rational_ratio(&chain, &c3).map(|r| r.to_string());
            rep.push(
                Check::new(format!("ledger.c3-chain.m={m}"), "padic.constants.c3")
                    .exact(chain.to_string(), c3.to_string(), chain == c3)
                    .input("m", m)
                    .input("ratio", ratio),
            );
        }
        // 𝒞
        let r = su.r0;
        let cc = cst::script_c(p, s.budget.padic_precision, s.budget.lambda_degree, su.n0, s.lambda, s.c_lambda, su.k, &eta, r, s.a).map_err(rt)?;
        let v = specialize_p_m(&cc, m);
        let wp = su.ctx.prec as i32;
        let n0 = PadicScalar::from_int(p, su.n0 as i128, wp);
        let lam = PadicScalar::from_int(p, s.lambda as i128, wp);
        let want = eta.pow(r as i64).mul(&PadicScalar::from_int(p, 4, wp)).mul(&lam.pow(2 * s.c_lambda as i64 * (su.k + 5))).div(&n0.pow(m + 3));
        let ag = v.div(&want).agreement(&PadicScalar::one(p, s.budget.padic_precision));
        rep.push(
            Check::new(format!("constants.script-c.m={m}"), "padic.constants.script_c")
                .padic(format!("{v}"), format!("{want}"), p, ag.min(s.budget.padic_precision as i32), digits.min(s.budget.padic_precision))
                .input("m", m)
                .input("r", r),
        );
        // e_p cross identity
        let tr = su.euler_triple(m).map_err(rt)?;
        let ag = rel_agreement(&tr.product(), &tr.l);
        rep.push(
            Check::new(format!("constants.e-p-cross.m={m}"), "padic.constants.euler")
                .padic(format!("{}", tr.product()), format!("{}", tr.l), p, ag.min(digits as i32 + 8), digits)
                .input("m", m)
                .input("r0", tr.r0),
        );
        if full {
            // the p | N cases, with level-p^{r₀} Hecke data at p
            for (r0, af) in [(1u32, (p as i128).pow((su.k / 2 - 1) as u32)), (2, 0)] {
                let a_f = PadicScalar::from_int(p, af, su.ctx.prec as i32);
                let tr = su.euler_triple_with(m, r0, &a_f).map_err(rt)?;
                let (psi_p, xi) = su.psi_p_xi_pbar(m).map_err(rt)?;
                let pp = PadicScalar::from_int(p, p as i128, su.ctx.prec as i32 + 2);
                let one = PadicScalar::one(p, su.ctx.prec + 2);
                let ratio = pp.mul(&pp).mul(&one.add(&pp.inv()).pow(2)).mul(&psi_p.pow(2)).mul(&xi.pow(r0 as i64)).div(&pp.pow(su.k * r0 as i64 / 2));
                let ag = rel_agreement(&tr.product(), &tr.l.mul(&ratio));
                rep.push(
                    Check::new(format!("ledger.e-p-ratio.r0={r0}.m={m}"), "padic.constants.euler")
                        .padic(format!("{}", tr.product()), format!("{}", tr.l.mul(&ratio)), p, ag.min(digits as i32 + 8), digits)
                        .input("m", m)
                        .input("r0", r0)
                        .input("a_f", af.to_string()),
                );
            }
        }
        ledger.insert(m.to_string(), serde_json::to_value(entry).unwrap_or(Value::Null));
    }
    rep.data.insert("ledger".into(), Value::Object(ledger.into_iter().collect()));
    rep.data.insert("star_f_lambda".into(), json!(star.to_string()));
    rep.data.insert("eta_pbar".into(), json!(format!("{eta}")));
    rep.data.insert("k".into(), json!(su.k));
    rep.data.insert("N0".into(), json!(su.n0));
    rep.data.insert("r0".into(), json!(su.r0));
    Ok(())
}
