//! The CM parameter set shared by the family, constant and e_p checks.

use crate::heckechar::{build_phi_psi, inert_character, CharError, CharValue, Component, FiniteType, HeckeCharacter, PadicCtx, PhiPsi};
use crate::padic::constants::{e_p_l, euler_e_p, hecke_roots_padic, ConstError, ConstParams, EulerRoots};
use crate::padic::PadicScalar;
use crate::qexp::{builtin_or_load, QExpansion, QexpError};
use crate::quadfield::{QuadField, QuadIdeal};
use crate::{arith, numfield::Q};
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SetupError {
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Qexp(#[from] QexpError),
    #[error(transparent)]
    Const(#[from] ConstError),
    #[error("{0}")]
    Hypothesis(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct SetupParams {
    pub d: i64,
    pub p: i64,
    /// builtin name or newform file
    pub form: String,
    pub a: i64,
    pub lambda: i64,
    pub c_lambda: u32,
    pub nu_order: i64,
    pub nu_exp: i64,
    pub prec: u32,
    pub bound: usize,
}

impl Default for SetupParams {
    fn default() -> Self {
        SetupParams { d: 7, p: 11, form: "eta2_12".into(), a: 7, lambda: 19, c_lambda: 1, nu_order: 5, nu_exp: 1, prec: 12, bound: 60 }
    }
}

#[derive(Clone, Debug)]
pub struct CmSetup {
    pub params: SetupParams,
    pub ctx: PadicCtx,
    pub f: QExpansion,
    pub k: i64,
    pub n0: i64,
    pub r0: u32,
    pub xi_a: HeckeCharacter,
    pub nu: Component,
    pub pp: PhiPsi,
}

/// e_p(fg,h), e_p(f^ρg^ρ,h^ρ), e_p(f,ξ⁻¹) at one m.
#[derive(Clone, Debug)]
pub struct EulerTriple {
    pub m: i64,
    pub r0: u32,
    pub fgh: PadicScalar,
    pub fgh_rho: PadicScalar,
    pub l: PadicScalar,
}

impl EulerTriple {
    pub fn product(&self) -> PadicScalar {
        self.fgh.mul(&self.fgh_rho)
    }
}

impl CmSetup {
    pub fn new(params: SetupParams) -> Result<Self, SetupError> {
        let kf = QuadField::new(params.d).map_err(|e| SetupError::Hypothesis(format!("{e:?}")))?;
        let ctx = PadicCtx::new(kf, params.p, params.prec)?;
        let f = builtin_or_load(&params.form, params.bound)?;
        if !f.chi.is_trivial() {
            return Err(SetupError::Hypothesis("f must have trivial character".into()));
        }
        let k = f.weight;
        let r0 = arith::val(f.level, params.p);
        let n0 = f.level / params.p.pow(r0);
        let xi_a = HeckeCharacter::new(kf, FiniteType::trivial(), params.a - 1, k + 1 - params.a)?;
        let nu = inert_character(&kf, params.lambda.pow(params.c_lambda), params.nu_order, params.nu_exp)?;
        let pp = build_phi_psi(&ctx, &xi_a, params.a, k, params.lambda, params.c_lambda, &nu, f.level)?;
        Ok(CmSetup { params, ctx, f, k, n0, r0, xi_a, nu, pp })
    }

    pub fn default_fixture() -> Self {
        Self::new(SetupParams::default()).expect("default fixture")
    }

    pub fn ms(&self) -> [i64; 3] {
        let a = self.params.a;
        let s = self.params.p - 1;
        [a, a + s, a + 2 * s]
    }

    pub fn xi_m(&self, m: i64) -> HeckeCharacter {
        let a = self.params.a;
        self.xi_a.mul(&self.ctx.alpha_character().pow(m - a)).mul(&self.ctx.alpha_c_character().pow(a - m))
    }

    pub fn const_params(&self, m: i64) -> ConstParams {
        ConstParams {
            m,
            k: self.k,
            d: self.params.d,
            c: self.xi_a.conductor().g,
            n0: self.n0,
            p: self.params.p,
            r0: self.r0,
            lambda: self.params.lambda,
            c_lambda: self.params.c_lambda,
        }
    }

    fn val(&self, v: &CharValue) -> Result<PadicScalar, SetupError> {
        Ok(self.ctx.iota_value(v)?)
    }

    /// ι_p of the complex conjugate of a character value.
    fn conj_val(&self, v: &CharValue) -> Result<PadicScalar, SetupError> {
        match v {
            CharValue::Val { z, beta, a, b, class: None } => {
                let c = CharValue::Val { z: z.inv(), beta: self.ctx.k.conj(*beta), a: *a, b: *b, class: None };
                self.val(&c)
            }
            _ => self.val(v),
        }
    }

    pub fn eta_pbar(&self) -> Result<PadicScalar, SetupError> {
        self.val(&self.pp.eta.eval(&self.ctx.frak_pbar))
    }

    /// a_p(f) as a p-adic number.
    pub fn a_p(&self) -> Result<PadicScalar, SetupError> {
        let a: Q = self.f.coef_rational(self.params.p as usize).ok_or_else(|| SetupError::Hypothesis("a_p(f) not rational".into()))?;
        Ok(PadicScalar::from_rational(self.ctx.pu(), &a, self.ctx.prec))
    }

    pub fn a_lambda(&self) -> Option<Q> {
        self.f.coef_rational(self.params.lambda as usize)
    }

    /// The three removed Euler factors; `a_f` and `r0` override f's data at p.
    pub fn euler_triple_with(&self, m: i64, r0: u32, a_f: &PadicScalar) -> Result<EulerTriple, SetupError> {
        if m <= self.k {
            return Err(ConstError::Range(format!("m = {m} must exceed k = {}", self.k)).into());
        }
        let (pr, pb) = (&self.ctx.frak_p, &self.ctx.frak_pbar);
        let phi = self.pp.phi_m(&self.ctx, m - self.k);
        let psi = self.pp.psi_m(&self.ctx, m);
        let ev = |c: &HeckeCharacter, id: &QuadIdeal| c.eval(id);
        let alpha_g_bar = self.conj_val(&ev(&phi, pb))?;
        let beta_g = self.val(&ev(&phi, pr))?;
        let alpha_h = self.val(&ev(&psi, pb))?;
        let beta_h = self.val(&ev(&psi, pr))?;
        let alpha_h_bar = self.conj_val(&ev(&psi, pb))?;
        let beta_h_bar = self.conj_val(&ev(&psi, pr))?;
        let p = self.ctx.pu();
        let pk1 = PadicScalar::from_int(p, p as i128, self.ctx.prec as i32).pow(self.k - 1);
        let (alpha_f, beta_f) = if r0 == 0 { hecke_roots_padic(a_f, &pk1)? } else { (*a_f, PadicScalar::zero(p, self.ctx.prec as i32)) };
        let rd = EulerRoots { p, alpha_f, beta_f, a_f: *a_f, beta_g, alpha_h, alpha_h_bar };
        // α_{h^ρ} = conj β_h, β_{g^ρ} = conj α_g; f has real coefficients
        let rd_rho = EulerRoots { p, alpha_f, beta_f, a_f: *a_f, beta_g: alpha_g_bar, alpha_h: beta_h_bar, alpha_h_bar: beta_h };
        let xi = self.val(&self.xi_m(m).eval(pb))?;
        Ok(EulerTriple { m, r0, fgh: euler_e_p(r0, &rd), fgh_rho: euler_e_p(r0, &rd_rho), l: e_p_l(r0, self.k, a_f, &xi) })
    }

    pub fn euler_triple(&self, m: i64) -> Result<EulerTriple, SetupError> {
        self.euler_triple_with(m, self.r0, &self.a_p()?)
    }

    /// ψ_m(𝔭) and ξ_m(𝔭̄), the ingredients of the symbolic e-ratio.
    pub fn psi_p_xi_pbar(&self, m: i64) -> Result<(PadicScalar, PadicScalar), SetupError> {
        let psi = self.pp.psi_m(&self.ctx, m);
        Ok((self.val(&psi.eval(&self.ctx.frak_p))?, self.val(&self.xi_m(m).eval(&self.ctx.frak_pbar))?))
    }

    /// Four-clause check of the φ/ψ construction.
    pub fn clause_failures(&self, bound: i64) -> Vec<String> {
        self.pp.check_clauses(&self.ctx, &self.xi_a, self.params.lambda, self.params.c_lambda, &self.ms(), bound)
    }
}

/// f64 view of a rational, for reports.
pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_data() {
        let s = CmSetup::default_fixture();
        assert_eq!((s.k, s.n0, s.r0), (6, 4, 0));
        assert!(s.a_p().unwrap().is_unit());
        assert_eq!(s.a_lambda(), Some(Q::from_integer(836.into())));
        assert!(s.eta_pbar().unwrap().is_unit());
    }

    #[test]
    fn clauses_hold() {
        let s = CmSetup::default_fixture();
        let bad = s.clause_failures(300);
        assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn cross_identity_prime_to_p() {
        let s = CmSetup::default_fixture();
        for m in s.ms() {
            let t = s.euler_triple(m).unwrap();
            assert!(t.product().eq_mod(&t.l, 8), "m = {m}");
            // each side is the square root
            assert!(t.fgh.eq_mod(&t.fgh_rho, 8));
        }
    }

    #[test]
    fn cross_identity_p_in_level() {
        let s = CmSetup::default_fixture();
        let p = 11i128;
        for (r0, af) in [(1u32, p * p), (1, -p * p), (2, 0), (3, 0)] {
            let a_f = PadicScalar::from_int(11, af, 12);
            for m in s.ms() {
                let t = s.euler_triple_with(m, r0, &a_f).unwrap();
                let (psi_p, xi) = s.psi_p_xi_pbar(m).unwrap();
                let pp = PadicScalar::from_int(11, p, 14);
                let one = PadicScalar::one(11, 14);
                let mut want = pp.mul(&pp).mul(&one.add(&pp.inv()).pow(2)).mul(&psi_p.pow(2));
                if r0 == 1 {
                    want = want.mul(&one.sub(&a_f.div(&xi)).pow(2));
                }
                assert!(t.product().div(&want).eq_mod(&one, 8), "r0 = {r0}, m = {m}");
                let ratio = want.div(&t.l);
                let sym = pp.mul(&pp).mul(&one.add(&pp.inv()).pow(2)).mul(&psi_p.pow(2)).mul(&xi.pow(r0 as i64)).div(&pp.pow(6 * r0 as i64 / 2));
                assert!(ratio.div(&sym).eq_mod(&one, 8), "r0 = {r0}, m = {m}");
            }
        }
    }
}
