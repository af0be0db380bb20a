use cmpadic::exec::Exec;
use cmpadic::fixture::CmSetup;
use cmpadic::padic::family;
use cmpadic::petersson::{petersson_product, PeterssonParams};
use cmpadic::qexp::{builtin_or_load, cm_form_with, parse_newform};

#[test]
fn sequential_matches_parallel() {
    let su = CmSetup::default_fixture();
    let psi = su.pp.psi_m(&su.ctx, 17);
    assert_eq!(cm_form_with(&psi, 120, Exec::Sequential).unwrap(), cm_form_with(&psi, 120, Exec::Parallel).unwrap());

    let fam = family::bg_psi(&su.ctx, &su.pp.psi, 7, 60, 8, 8).unwrap();
    let f = family::qexp_to_padic(&su.ctx, &su.f).unwrap();
    let a = family::lambda_shift_multiply_with(&f, su.f.level, &fam, su.k, Exec::Sequential);
    let b = family::lambda_shift_multiply_with(&f, su.f.level, &fam, su.k, Exec::Parallel);
    assert_eq!(a, b);

    let d = builtin_or_load("delta", 40).unwrap();
    let run = |exec| petersson_product(&d, &d, None, &PeterssonParams { exec, ..Default::default() }).unwrap().value();
    let (s, p) = (run(Exec::Sequential), run(Exec::Parallel));
    assert!((s - p).norm() <= 1e-13 * s.norm());
}

#[test]
fn newform_file_matches_builtin() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/eta2_12.txt")).unwrap();
    let f = parse_newform(&text).unwrap();
    let g = builtin_or_load("eta2_12", 200).unwrap();
    assert_eq!((f.weight, f.level), (6, 4));
    for n in 1..=200 {
        assert_eq!(f.coef_rational(n), g.coef_rational(n), "n = {n}");
    }
    assert!(parse_newform("weight=6\nlevel=4\n1 2\n").is_err());
    assert!(parse_newform("level=4\n1 1\n").is_err());
}
