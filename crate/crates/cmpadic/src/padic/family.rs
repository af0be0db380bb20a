//! Λ-adic q-expansions: CM families, Hecke operators, shifted products.

use super::{one_unit_to_lambda, point, ppow, LambdaSeries, PadicError, PadicScalar};
use crate::arith;
use crate::exec::Exec;
use crate::heckechar::{build_cm_family, build_cm_family_rho, CharError, CharacterFamily, HeckeCharacter, PadicCtx};
use crate::qexp::{Coeffs, QExpansion};
use crate::quadfield::{Elem, QuadIdeal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("q-bound {have} too small, need {need}")]
    Truncation { need: usize, have: usize },
    #[error("context precision {have} below working precision {need}")]
    Precision { need: u32, have: u32 },
    #[error("coefficient at n = {0} is not p-integral")]
    NotIntegral(usize),
}

/// Σ A_n q^n with A_n ∈ Z_p[[X]]/(p^M, X^{D+1}).
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaQExp {
    pub p: u64,
    pub m: u32,
    pub d: usize,
    /// tame level N₀
    pub level: i64,
    /// tame character χ: specializations have character χω^{−m}.
    /// Tabulated on residues 0 ≤ r ≤ min(B, modulus − 1), which covers every T(n) divisor.
    pub chi_modulus: i64,
    pub chi: Vec<Option<PadicScalar>>,
    pub coeffs: Vec<LambdaSeries>,
}

impl LambdaQExp {
    pub fn bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn specialize(&self, m: i64) -> Vec<PadicScalar> {
        let x = point(self.p, m, self.m);
        self.coeffs.iter().map(|a| a.eval(&x)).collect()
    }

    pub fn chi_at(&self, n: i64) -> Option<PadicScalar> {
        *self.chi.get(n.rem_euclid(self.chi_modulus) as usize).expect("χ is tabulated up to the q-bound")
    }

    /// Σ A_n q^{Mn/L} needs L | n for all support; only M is supported here.
    pub fn shift(&self, mm: usize) -> LambdaQExp {
        let b = self.bound();
        let mut coeffs = vec![LambdaSeries::zero(self.p, self.m, self.d); b + 1];
        for n in 0..=b / mm {
            coeffs[n * mm] = self.coeffs[n].clone();
        }
        LambdaQExp { coeffs, level: self.level * mm as i64, ..self.clone() }
    }
}

/// ⟨d⟩_Λ = [d/ω(d)].
pub fn diamond_lambda(p: u64, d: i64, m: u32, deg: usize) -> Result<LambdaSeries, PadicError> {
    let prec = super::working_prec(p, m, deg) as i32;
    let x = PadicScalar::from_int(p, d as i128, prec);
    one_unit_to_lambda(&x.one_unit_part(), m, deg)
}

/// a(j, F|T(n)) = Σ_{e | (j,n), (e, N₀p) = 1} χ(e)⟨e⟩_Λ e⁻¹ a(jn/e², F); certified to ⌊B/n⌋.
pub fn lambda_hecke_t(f: &LambdaQExp, n: i64) -> Result<LambdaQExp, FamilyError> {
    let b = f.bound();
    let nb = b / n as usize;
    if nb == 0 {
        return Err(FamilyError::Truncation { need: n as usize, have: b });
    }
    let p = f.p;
    let mut facs = Vec::new();
    for e in arith::divisors(n) {
        if arith::gcd(e, f.level * p as i64) != 1 {
            continue;
        }
        let Some(c) = f.chi_at(e) else { continue };
        let s = diamond_lambda(p, e, f.m, f.d)?.scale(&c.mul(&PadicScalar::from_int(p, e as i128, f.m as i32).inv()));
        facs.push((e, s));
    }
    let coeffs = (0..=nb)
        .map(|j| {
            let mut acc = LambdaSeries::zero(p, f.m, f.d);
            for (e, s) in &facs {
                if j as i64 % e == 0 {
                    acc = acc.add(&s.mul(&f.coeffs[j * n as usize / (e * e) as usize]));
                }
            }
            acc
        })
        .collect();
    Ok(LambdaQExp { coeffs, ..f.clone() })
}

/// σ_{−k}: X ↦ (1+X)(1+p)^{−k} − 1, so P_m ∘ σ_{−k} = P_{m−k}.
pub fn sigma_shift(a: &LambdaSeries, k: i64) -> LambdaSeries {
    let c = PadicScalar::from_int(a.p, 1 + a.p as i128, a.m as i32 + 2).pow(-k);
    a.rescale(&c)
}

/// f · σ_{−k}(F) with f given by p-adic coefficients.
pub fn lambda_shift_multiply(f: &[PadicScalar], f_level: i64, fam: &LambdaQExp, k: i64) -> LambdaQExp {
    lambda_shift_multiply_with(f, f_level, fam, k, Exec::Parallel)
}

pub fn lambda_shift_multiply_with(f: &[PadicScalar], f_level: i64, fam: &LambdaQExp, k: i64, ex: Exec) -> LambdaQExp {
    let b = fam.bound().min(f.len() - 1);
    let (p, m, d) = (fam.p, fam.m, fam.d);
    let shifted: Vec<LambdaSeries> = ex.map(&fam.coeffs[..=b], |a| sigma_shift(a, k));
    let fr: Vec<u128> = f[..=b].iter().map(|c| c.residue(m).expect("integral form")).collect();
    let md = ppow(p, m);
    let coeffs = ex.map_range(0, b + 1, |n| {
        let mut acc = LambdaSeries::zero(p, m, d);
        for j in 0..=n {
            if fr[j] == 0 {
                continue;
            }
            let a = &shifted[n - j];
            for (t, c) in acc.coeffs.iter_mut().zip(&a.coeffs) {
                *t = (*t + fr[j] * c) % md;
            }
        }
        acc
    });
    LambdaQExp { coeffs, level: arith::lcm(fam.level, f_level), ..fam.clone() }
}

/// ι_p of every coefficient of a form with exact coefficients.
pub fn qexp_to_padic(ctx: &PadicCtx, f: &QExpansion) -> Result<Vec<PadicScalar>, FamilyError> {
    let Coeffs::Exact(fld, v) = &f.coeffs else {
        return Err(FamilyError::Char(CharError::NotAlgebraic));
    };
    assert_eq!(f.denom, 1);
    v.iter()
        .enumerate()
        .map(|(n, x)| {
            let y = ctx.iota_nf(fld, x)?;
            if y.val < 0 {
                return Err(FamilyError::NotIntegral(n));
            }
            Ok(y)
        })
        .collect()
}

/// Σ_{(𝔞, excl) = 1} Θ(𝔞) q^{N𝔞}.
pub fn lambda_adic_cm_form(
    ctx: &PadicCtx,
    fam: &CharacterFamily,
    excl: &QuadIdeal,
    b: usize,
    m: u32,
    d: usize,
    ex: Exec,
) -> Result<LambdaQExp, FamilyError> {
    let need = super::working_prec(ctx.pu(), m, d);
    if ctx.prec < need {
        return Err(FamilyError::Precision { need, have: ctx.prec });
    }
    let k = &ctx.k;
    let p = ctx.pu();
    let excl = k.mul_ideal(excl, &fam.base.modulus());
    let coeffs: Result<Vec<LambdaSeries>, CharError> = ex
        .map_range(0, b + 1, |n| {
            let mut acc = LambdaSeries::zero(p, m, d);
            if n == 0 {
                return Ok(acc);
            }
            for id in k.ideals_of_norm(n as i64) {
                if k.coprime(&id, &excl) {
                    acc = acc.add(&fam.eval_lambda(ctx, &id, m, d)?);
                }
            }
            Ok(acc)
        })
        .into_iter()
        .collect();
    let level = k.d * excl.norm() / ppow(p, arith::val(excl.norm(), ctx.p) as u32) as i64;
    let chi_modulus = level * ctx.p;
    let chi = (0..chi_modulus.min(b as i64 + 1)).map(|n| tame_character(ctx, fam, n, chi_modulus)).collect();
    Ok(LambdaQExp { p, m, d, level, chi_modulus, chi, coeffs: coeffs? })
}

/// χ(n) = χ_K(n) Θ_a((n)) n^{1−a} ω(n)^a, read off the specialization at m = a.
fn tame_character(ctx: &PadicCtx, fam: &CharacterFamily, n: i64, modulus: i64) -> Option<PadicScalar> {
    if arith::gcd(n, modulus) != 1 {
        return None;
    }
    let k = &ctx.k;
    let id = k.principal(Elem::int(n as i128));
    let v = fam.specialize_padic(ctx, &id, fam.a).ok()?;
    let (wa, wb) = fam.weight_at(fam.a);
    let nn = ctx.int(n as i128);
    let kr = arith::kronecker(-k.d, n);
    Some(v.mul(&nn.pow(-(wa + wb))).mul(&nn.teichmuller().pow(wa + wb + 1)).mul(&ctx.int(kr as i128)))
}

/// Bg_Ψ for Ψ = ψα⁻¹𝒜: sum over ideals prime to 𝔪𝔭.
pub fn bg_psi(ctx: &PadicCtx, psi: &HeckeCharacter, a: i64, b: usize, m: u32, d: usize) -> Result<LambdaQExp, FamilyError> {
    lambda_adic_cm_form(ctx, &build_cm_family(psi, a), &ctx.frak_p, b, m, d, Exec::Parallel)
}

/// Bg_{Ψ^ρ}: sum over ideals prime to 𝔪̄𝔭̄.
pub fn bg_psi_rho(ctx: &PadicCtx, psi: &HeckeCharacter, a: i64, b: usize, m: u32, d: usize) -> Result<LambdaQExp, FamilyError> {
    lambda_adic_cm_form(ctx, &build_cm_family_rho(ctx, psi, a), &ctx.frak_pbar, b, m, d, Exec::Parallel)
}

/// ψ_m = ψ α^{m−1} as a classical character.
pub fn psi_m(ctx: &PadicCtx, psi: &HeckeCharacter, m: i64) -> HeckeCharacter {
    psi.mul(&ctx.alpha_character().pow(m - 1))
}

/// Classical g♯_{ψ_m} = g − ψ_m(𝔭) g(pz), computed in qexp.
pub fn classical_stabilized(ctx: &PadicCtx, psi: &HeckeCharacter, m: i64, b: usize) -> Result<QExpansion, FamilyError> {
    let pm = psi_m(ctx, psi, m);
    let g = crate::qexp::cm_form(&pm, b).map_err(|_| FamilyError::Char(CharError::NotAlgebraic))?;
    let fld = g.field().unwrap().clone();
    let beta = pm.eval(&ctx.frak_p).to_nf(&ctx.k, &fld)?;
    Ok(g.p_stabilize(ctx.p, &crate::qexp::Scalar::Exact(beta)))
}

/// Classical (g^ρ_{ψ_m})♯ = g^ρ − conj(ψ_m(𝔭̄)) g^ρ(pz).
pub fn classical_rho_stabilized(ctx: &PadicCtx, psi: &HeckeCharacter, m: i64, b: usize) -> Result<QExpansion, FamilyError> {
    let pm = psi_m(ctx, psi, m);
    let g = crate::qexp::cm_form(&pm, b).map_err(|_| FamilyError::Char(CharError::NotAlgebraic))?.rho_conjugate();
    let fld = g.field().unwrap().clone();
    let beta = fld.conj(&pm.eval(&ctx.frak_pbar).to_nf(&ctx.k, &fld)?);
    Ok(g.p_stabilize(ctx.p, &crate::qexp::Scalar::Exact(beta)))
}

/// First n at which P_m(F) and the classical form differ mod p^prec.
pub fn first_mismatch(spec: &[PadicScalar], classical: &[PadicScalar], prec: i32) -> Option<usize> {
    spec.iter().zip(classical).position(|(x, y)| !x.eq_mod(y, prec))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::heckechar::{inert_character, FiniteType};
    use crate::quadfield::QuadField;

    pub(crate) const A: i64 = 13;

    /// d = 7, p = 11, ψ = ω_𝔭^{a−1}ν with ν quadratic mod 5.
    pub(crate) fn fixture(prec: u32) -> (PadicCtx, HeckeCharacter) {
        let k = QuadField::new(7).unwrap();
        let ctx = PadicCtx::new(k, 11, prec).unwrap();
        let nu = inert_character(&k, 5, 2, 1).unwrap();
        let ft = FiniteType::single(ctx.omega_comp(A - 1)).mul(&k, &FiniteType::single(nu));
        let psi = HeckeCharacter::new(k, ft, 0, 0).unwrap();
        (ctx, psi)
    }

    #[test]
    fn first_coefficients() {
        let (ctx, psi) = fixture(14);
        let f = bg_psi(&ctx, &psi, A, 30, 8, 8).unwrap();
        assert_eq!(f.coeffs[1], LambdaSeries::one(11, 8, 8));
        assert_eq!(f.level, 7 * 25);
        // 11 = N𝔭 = N𝔭̄: only 𝔭̄ survives
        let pb = ctx.k.primes_above(11).into_iter().find(|q| *q != ctx.frak_p).unwrap();
        let want = build_cm_family(&psi, A).eval_lambda(&ctx, &pb, 8, 8).unwrap();
        assert_eq!(f.coeffs[11], want);
    }

    #[test]
    fn specialization_matches_stabilized_forms() {
        let (ctx, psi) = fixture(14);
        let b = 60;
        let f = bg_psi(&ctx, &psi, A, b, 8, 8).unwrap();
        let fr = bg_psi_rho(&ctx, &psi, A, b, 8, 8).unwrap();
        for m in [A, A + 10] {
            let cl = qexp_to_padic(&ctx, &classical_stabilized(&ctx, &psi, m, b).unwrap()).unwrap();
            assert_eq!(first_mismatch(&f.specialize(m), &cl, 8), None, "m = {m}");
            let clr = qexp_to_padic(&ctx, &classical_rho_stabilized(&ctx, &psi, m, b).unwrap()).unwrap();
            assert_eq!(first_mismatch(&fr.specialize(m), &clr, 8), None, "ρ, m = {m}");
        }
    }

    #[test]
    fn hecke_commutes_with_specialization() {
        let (ctx, psi) = fixture(14);
        let b = 60;
        let f = bg_psi(&ctx, &psi, A, b, 8, 8).unwrap();
        let one = lambda_hecke_t(&f, 1).unwrap();
        assert_eq!(one.coeffs, f.coeffs);
        let t2 = lambda_hecke_t(&f, 2).unwrap();
        let cl = classical_stabilized(&ctx, &psi, A, b).unwrap().hecke_t(2).unwrap();
        let cl = qexp_to_padic(&ctx, &cl).unwrap();
        assert_eq!(first_mismatch(&t2.specialize(A), &cl, 8), None);
        // the ρ-family carries a different tame character
        let fr = bg_psi_rho(&ctx, &psi, A, b, 8, 8).unwrap();
        let t3 = lambda_hecke_t(&fr, 3).unwrap();
        let clr = classical_rho_stabilized(&ctx, &psi, A, b).unwrap().hecke_t(3).unwrap();
        assert_eq!(first_mismatch(&t3.specialize(A), &qexp_to_padic(&ctx, &clr).unwrap(), 8), None);
    }

    #[test]
    fn shifted_product() {
        let (ctx, psi) = fixture(14);
        let b = 40;
        let f = bg_psi(&ctx, &psi, A, b, 8, 8).unwrap();
        let delta = qexp_to_padic(&ctx, &crate::qexp::delta(b)).unwrap();
        let prod = lambda_shift_multiply(&delta, 1, &f, 12);
        let lhs = prod.specialize(A + 12);
        let g = f.specialize(A);
        for n in 0..=b {
            let mut acc = PadicScalar::zero(11, 8);
            for j in 0..=n {
                acc = acc.add(&delta[j].mul(&g[n - j]));
            }
            assert!(lhs[n].eq_mod(&acc, 8), "n = {n}");
        }
        let seq = lambda_shift_multiply_with(&delta, 1, &f, 12, Exec::Sequential);
        assert_eq!(seq, prod);
    }
}
