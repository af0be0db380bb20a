//! Acceptance run: one line per criterion, then a check that the failures are exactly the known ones.

use cmpadic::fixture::{CmSetup, SetupParams};
use cmpadic::heckechar::{inert_character, FiniteType, HeckeCharacter, PadicCtx};
use cmpadic::localint;
use cmpadic::numfield::Q;
use cmpadic::padic::constants as cst;
use cmpadic::padic::{specialize_p_m, working_prec, PadicScalar};
use cmpadic::petersson::{default_instance, petersson_product, verify_identity, Identity, PeterssonParams};
use cmpadic::qexp::{builtin_or_load, cm_form, cm_form_coprime, Scalar};
use cmpadic::quadfield::QuadField;
use cmpadic_cli::{execute, Command, Scenario};
use std::time::{Duration, Instant};

/// Criteria expected to fail, with the reason recorded alongside the build.
const KNOWN_FAILURES: &[&str] = &["10c"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn params() -> PeterssonParams {
    PeterssonParams { precision_digits: 60, ..Default::default() }
}

fn rel(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn c1() -> Outcome {
    let t = Instant::now();
    let d = builtin_or_load("delta", 60).unwrap();
    let d2 = d.shift(2, 1);
    let a = petersson_product(&d2, &d2, Some(2), &params()).unwrap();
    let b = petersson_product(&d, &d, Some(2), &params()).unwrap();
    let r = rel(a.value(), b.value() * 2f64.powi(-12));
    let el = t.elapsed();
    Outcome { id: "1", pass: r < 1e-6 && el < Duration::from_secs(120), detail: format!("ratio rel. error {r:.2e}, {el:.1?}") }
}

fn c2() -> Outcome {
    let d = builtin_or_load("delta", 60).unwrap();
    // a_2 from the η-product expansion
    assert_eq!(d.coef_rational(2), Some(Q::from_integer((-24).into())));
    let a = petersson_product(&d, &d.shift(2, 1), None, &params()).unwrap();
    let b = petersson_product(&d, &d, Some(2), &params()).unwrap();
    let ratio = a.value() / b.value();
    let r = rel(ratio, num_complex::Complex64::new(-1.0 / 256.0, 0.0));
    Outcome { id: "2", pass: r < 1e-5, detail: format!("ratio {:.9}, rel. error {r:.2e}", ratio.re) }
}

fn identity(id: Identity, tol: f64) -> (bool, String) {
    let inst = default_instance(id, 60).unwrap();
    let r = verify_identity(id, &inst, &params(), tol).unwrap();
    (r.pass, format!("{} {:.2e}", id.name(), r.rel_error))
}

fn c3() -> Outcome {
    let (pass, d) = identity(Identity::EulerDenominator, 1e-4);
    Outcome { id: "3", pass, detail: d }
}

fn c4() -> Outcome {
    let rs: Vec<_> = [Identity::EulerPrimeToP, Identity::EulerPPart1, Identity::EulerPPartGe2].into_iter().map(|i| identity(i, 1e-4)).collect();
    Outcome { id: "4", pass: rs.iter().all(|r| r.0), detail: rs.iter().map(|r| r.1.clone()).collect::<Vec<_>>().join(", ") }
}

fn c5() -> Outcome {
    let mut ok = true;
    let mut det = Vec::new();
    // d = 3: ν of order 8 mod 5; d = 7: ν of order 4 mod 3 (both inert)
    for (d, lam, ord, w) in [(3i64, 5i64, 8i64, 3i64), (7, 3, 4, 2)] {
        let k = QuadField::new(d).unwrap();
        let nu = inert_character(&k, lam, ord, 1).unwrap();
        let psi = HeckeCharacter::new(k, FiniteType::single(nu), w, 0).unwrap();
        assert_eq!(psi.conductor(), k.int_ideal(lam));
        let g = cm_form(&psi, 200).unwrap();
        let mut n = 0;
        for q in (2..=50).filter(|&q| cmpadic::arith::is_prime(q)) {
            let t = g.hecke_t(q).unwrap();
            ok &= t.proportional_to(&g, &g.coef(q as usize), t.bound()).is_none();
            n += 1;
        }
        det.push(format!("d={d}: {n} primes"));
    }
    Outcome { id: "5", pass: ok, detail: det.join(", ") }
}

fn fixture(bound: usize, m: u32, d: usize) -> CmSetup {
    CmSetup::new(SetupParams { prec: working_prec(11, m, d), bound, ..Default::default() }).unwrap()
}

fn c6() -> Outcome {
    let su = fixture(150, 8, 8);
    let mut ok = true;
    for m in su.ms() {
        let pm = su.pp.psi_m(&su.ctx, m);
        let g = cm_form(&pm, 150).unwrap();
        let fld = g.field().unwrap().clone();
        let beta = Scalar::Exact(pm.eval(&su.ctx.frak_p).to_nf(&su.ctx.k, &fld).unwrap());
        let alpha = Scalar::Exact(pm.eval(&su.ctx.frak_pbar).to_nf(&su.ctx.k, &fld).unwrap());
        let gs = g.p_stabilize(11, &beta);
        ok &= gs.coef(11) == alpha;
        let direct = cm_form_coprime(&pm, &su.ctx.frak_p, 150).unwrap();
        ok &= gs.proportional_to(&direct, &Scalar::Exact(fld.one()), 150).is_none();
    }
    Outcome { id: "6", pass: ok, detail: format!("m ∈ {:?}, B = 150", su.ms()) }
}

fn scenario() -> Scenario {
    let mut s = Scenario::default();
    s.budget.qexp_bound = 150;
    s.budget.padic_precision = 8;
    s
}

fn c7() -> Outcome {
    let r = execute(Command::LocalIntegral, &scenario(), None).unwrap();
    let worst = r.checks.iter().map(|c| c.error).fold(0.0, f64::max);
    Outcome { id: "7", pass: r.all_pass() && r.checks.len() == 100, detail: format!("25 draws, worst error {worst:.2e}") }
}

fn c8() -> Outcome {
    let t = Instant::now();
    let r = execute(Command::Family, &scenario(), Some(&["family.psi".to_string()])).unwrap();
    let el = t.elapsed();
    let digits = r.checks.iter().map(|c| c.inputs["agreement_digits"].as_i64().unwrap()).min().unwrap();
    Outcome {
        id: "8",
        pass: r.all_pass() && r.checks.len() == 6 && el < Duration::from_secs(300),
        detail: format!("{} checks, ≥ {digits} digits, {el:.1?}", r.checks.len()),
    }
}

fn c9() -> Outcome {
    let k = QuadField::new(7).unwrap();
    let ctx = PadicCtx::new(k, 11, 10).unwrap();
    let ids: Vec<_> = (1..).filter(|n| n % 11 != 0).flat_map(|n| k.ideals_of_norm(n)).take(50).collect();
    let ok_alpha = ids.iter().all(|id| {
        let n = ctx.int(id.norm() as i128);
        ctx.alpha(id).mul(&ctx.alpha_c(id)).eq_mod(&n.div(&n.teichmuller()), 10)
    });
    let su = fixture(60, 8, 8);
    let bad = su.clause_failures(300);
    Outcome { id: "9", pass: ok_alpha && bad.is_empty(), detail: format!("α·α^c on {} ideals; clause failures {:?}", ids.len(), bad) }
}

fn c10() -> Vec<Outcome> {
    let su = fixture(60, 8, 10);
    let eta = su.eta_pbar().unwrap();
    let mut ok = true;
    for m in su.ms() {
        for r in [su.r0, su.r0.max(1)] {
            let cc = cst::script_c(11, 8, 10, su.n0, 19, 1, su.k, &eta, r, su.params.a).unwrap();
            let v = specialize_p_m(&cc, m);
            let n0 = PadicScalar::from_int(11, su.n0 as i128, 16);
            let norm = PadicScalar::from_int(11, 4 * 19i128.pow(2 * (su.k as u32 + 5)), 16).mul(&eta.pow(r as i64)).div(&n0.pow(m + 3));
            ok &= v.div(&norm).eq_mod(&PadicScalar::one(11, 8), 8);
        }
    }
    let a = Outcome { id: "10a", pass: ok, detail: format!("P_m(𝒞) at m ∈ {:?}", su.ms()) };
    let mut ok = true;
    for m in su.ms() {
        for r0 in 0..4 {
            let cp = cst::ConstParams { r0, ..su.const_params(m) };
            let want = if r0 == 0 { Q::from_integer(1.into()) } else { cst::qpow(&Q::from_integer(11.into()), su.k * r0 as i64 / 2) };
            ok &= cst::rational_ratio(&cst::c4_from_c3(&cp).unwrap(), &cst::c4(&cp).unwrap()) == Some(want);
        }
    }
    let b = Outcome { id: "10b", pass: ok, detail: "C₃ × e-ratio = C₄ exactly (r₀ = 0; p^{kr₀/2} apart for r₀ ≥ 1)".into() };
    let one = Q::from_integer(1.into());
    let v = localint::star_f_lambda_exact(&one, 5, 1);
    let want = Q::new(9.into(), 5.into());
    let c = Outcome { id: "10c", pass: v == want, detail: format!("(*) = {v} against the expected {want}") };
    vec![a, b, c]
}

fn c11() -> Outcome {
    let su = fixture(60, 8, 8);
    let mut ok = true;
    for m in su.ms() {
        let t = su.euler_triple(m).unwrap();
        ok &= t.product().div(&t.l).eq_mod(&PadicScalar::one(11, 8), 8);
        for (r0, af) in [(1u32, 121i128), (2, 0)] {
            let a_f = PadicScalar::from_int(11, af, 14);
            let t = su.euler_triple_with(m, r0, &a_f).unwrap();
            let (psi_p, xi) = su.psi_p_xi_pbar(m).unwrap();
            let p = PadicScalar::from_int(11, 11, 16);
            let one = PadicScalar::one(11, 16);
            let mut want = p.mul(&p).mul(&one.add(&p.inv()).pow(2)).mul(&psi_p.pow(2));
            if r0 == 1 {
                want = want.mul(&one.sub(&a_f.div(&xi)).pow(2));
            }
            ok &= t.product().div(&want).eq_mod(&PadicScalar::one(11, 8), 8);
        }
    }
    Outcome { id: "11", pass: ok, detail: "r₀ = 0 identity; r₀ = 1, ≥ 2 product formulas".into() }
}

fn main() {
    let mut all = vec![c1(), c2(), c3(), c4(), c5(), c6(), c7(), c8(), c9()];
    all.extend(c10());
    all.push(c11());
    for o in &all {
        println!("criterion {:>3}: {}  {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<&str> = all.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!("failing: {failed:?} (known: {KNOWN_FAILURES:?})");
    if failed != KNOWN_FAILURES {
        std::process::exit(1);
    }
}
