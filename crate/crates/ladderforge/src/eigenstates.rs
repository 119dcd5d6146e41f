//! Closed-form algebra eigenstates of the ladder families. Prefactors are applied
//! as matrix polynomials and terminating exponentials on |0,0⟩, then normalized
//! from the assembled vector.

use serde::{Deserialize, Serialize};

use crate::algebra::{classify, frozen_mode_ladder, Basic21Variant, CaseTag, Element, HamiltonianParams, LadderCoeffs, GATE_TOL};
use crate::error::{Error, Result};
use crate::fock::{build_generators, FockCutoff, GeneratorSet, OperatorMatrix, TwoModeState, C64, ONE};
use crate::transforms::{
    apply_chain, displace_away_linear, displace_state, exp_series, reduce_by_similarity, squeeze_from_tanh,
    squeeze_state, UnitarySpec,
};

/// Largest relative weight (norm²) tolerated on the outermost retained layer.
pub const TAIL_TOL: f64 = 1e-6;

/// Extra levels per mode used while assembling states in `construct`.
pub const WORK_PAD: usize = 12;

/// Coefficient magnitude below which a reduced ladder term counts as absent.
const TERM_TOL: f64 = 1e-9;

/// Which solution of the Fock–Bargmann equation to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// type 1: product of single-mode displacements and squeezes
    Separable,
    /// type 2: exponential prefactor times the lowest monomial
    NonSeparable,
    /// exponential prefactor times the κ-th power of the monomial
    Kappa,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenstateRequest {
    pub tag: CaseTag,
    #[serde(with = "crate::cplx", default)]
    pub lambda: C64,
    #[serde(default)]
    pub kappa: usize,
    pub branch: Branch,
    #[serde(default, with = "crate::cplx::opt")]
    pub c1: Option<C64>,
    #[serde(default, with = "crate::cplx::opt")]
    pub c2: Option<C64>,
    #[serde(default, with = "crate::cplx::opt")]
    pub lambda2: Option<C64>,
}

impl EigenstateRequest {
    pub fn new(tag: CaseTag, lambda: C64, branch: Branch) -> Self {
        Self {
            tag,
            lambda,
            kappa: 0,
            branch,
            c1: None,
            c2: None,
            lambda2: None,
        }
    }

    pub fn with_kappa(mut self, kappa: usize) -> Self {
        self.kappa = kappa;
        self
    }

    /// κ actually used by the branch (the non-separable branch is κ = 1).
    pub fn effective_kappa(&self) -> usize {
        match self.branch {
            Branch::Separable => 0,
            Branch::NonSeparable => 1,
            Branch::Kappa => self.kappa,
        }
    }
}

/// A constructed state together with the unitary chain that maps the reduced
/// family onto it and, for λ = 0, the energy the family formula predicts.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructedState {
    pub family: String,
    pub state: TwoModeState,
    pub chain: Vec<UnitarySpec>,
    pub expected_energy: Option<f64>,
}

// ---------------------------------------------------------------------------
// helpers

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn small(z: C64) -> bool {
    z.norm() <= GATE_TOL
}

fn check_degree(cut: FockCutoff, need1: usize, need2: usize) -> Result<()> {
    if need1 > cut.n1_max || need2 > cut.n2_max {
        return Err(Error::CutoffOverflow(format!(
            "prefactor reaches |{need1},{need2}> beyond cutoff ({},{})",
            cut.n1_max, cut.n2_max
        )));
    }
    Ok(())
}

fn poly_power(op: &OperatorMatrix, k: usize, v: &TwoModeState) -> Result<TwoModeState> {
    (0..k).try_fold(v.clone(), |acc, _| op.apply(&acc))
}

/// Relative weight on the layer n₁ = n1_max or n₂ = n2_max.
pub fn tail_weight(v: &TwoModeState) -> f64 {
    let cut = v.cutoff();
    let total = v.norm().powi(2);
    if total == 0.0 {
        return 0.0;
    }
    let edge: f64 = v
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let (n1, n2) = cut.occupation(*i);
            n1 == cut.n1_max || n2 == cut.n2_max
        })
        .map(|(_, a)| a.norm_sqr())
        .sum();
    edge / total
}

fn finish(v: TwoModeState) -> Result<TwoModeState> {
    let w = tail_weight(&v);
    if w > TAIL_TOL {
        let cut = v.cutoff();
        return Err(Error::CutoffOverflow(format!(
            "state keeps relative weight {w:.2e} on the edge of cutoff ({},{})",
            cut.n1_max, cut.n2_max
        )));
    }
    v.normalize()
}

/// |n₁,n₂⟩ ↦ |n₂,n₁⟩; the result lives on the transposed cutoff.
pub fn swap_modes(v: &TwoModeState) -> Result<TwoModeState> {
    let cut = v.cutoff();
    let mut out = TwoModeState::zeros(FockCutoff::new(cut.n2_max, cut.n1_max));
    for (i, a) in v.amplitudes().iter().enumerate() {
        let (n1, n2) = cut.occupation(i);
        out.set_amp(n2, n1, *a);
    }
    Ok(out)
}

/// ‖P(Av − λv)‖/‖v‖ with P the interior projector of the given degree.
pub fn verify_eigenstate(a: &OperatorMatrix, v: &TwoModeState, lambda: C64, degree: usize) -> Result<f64> {
    if a.cutoff() != v.cutoff() {
        return Err(Error::CutoffMismatch(a.cutoff(), v.cutoff()));
    }
    let w = a.apply(v)?.axpy(-lambda, v)?;
    let mask = v.cutoff().interior_mask(degree)?;
    let r: f64 = w
        .amplitudes()
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|(x, _)| x.norm_sqr())
        .sum();
    Ok(r.sqrt() / v.norm())
}

// ---------------------------------------------------------------------------
// linear (μ-type) ladders

/// exp(λξ₁/μ₁)(ξ₂ − (μ₂/μ₁)ξ₁)^κ, or exp(λξ₂/μ₂)ξ₁^κ when μ₁ = 0.
/// Eigenstates of μ₁a₁ + μ₂a₂.
pub fn linear_mu_state(mu1: C64, mu2: C64, lambda: C64, kappa: usize, g: &GeneratorSet) -> Result<TwoModeState> {
    let vac = TwoModeState::vacuum(g.cutoff);
    if !small(mu1) {
        let r = mu2 / mu1;
        check_degree(g.cutoff, if small(r) { 0 } else { kappa }, kappa)?;
        let op = g.a2_dag.axpy(-r, &g.a1_dag)?;
        let v = poly_power(&op, kappa, &vac)?;
        finish(exp_series(&g.a1_dag, lambda / mu1, &v)?)
    } else if !small(mu2) {
        check_degree(g.cutoff, kappa, 0)?;
        let v = poly_power(&g.a1_dag, kappa, &vac)?;
        finish(exp_series(&g.a2_dag, lambda / mu2, &v)?)
    } else {
        Err(Error::Domain("μ₁ = μ₂ = 0".into()))
    }
}

/// D₁(c₁λ/μ₁)·D₂((1−c₁)λ/μ₂)|0,0⟩.
pub fn separable_mu_state(mu1: C64, mu2: C64, lambda: C64, c1: C64, g: &GeneratorSet) -> Result<TwoModeState> {
    if small(mu1) || small(mu2) {
        return Err(Error::Domain("separable branch needs μ₁ ≠ 0 and μ₂ ≠ 0".into()));
    }
    let v = TwoModeState::vacuum(g.cutoff);
    let v = displace_state(&v, 2, (ONE - c1) * lambda / mu2, g)?;
    finish(displace_state(&v, 1, c1 * lambda / mu1, g)?)
}

fn require_class(p: &HamiltonianParams, want: &CaseTag) -> Result<()> {
    let got = classify(p);
    if &got != want {
        return Err(Error::Domain(format!("parameters classify as {got:?}, not {want:?}")));
    }
    Ok(())
}

/// μ₂/μ₁ = 2β₋/(2−β₀+β₃) for the fractional family.
pub fn fractional_ratio(p: &HamiltonianParams) -> Result<C64> {
    let d = 2.0 - p.beta0 + p.beta3;
    if d.abs() < GATE_TOL {
        return Err(Error::Domain("2 − β₀ + β₃ = 0: the ladder is μ₂a₂ alone".into()));
    }
    Ok(2.0 * p.beta_minus() / d)
}

pub fn fractional_ladder(p: &HamiltonianParams, mu1: C64) -> Result<LadderCoeffs> {
    Ok(LadderCoeffs {
        mu1,
        mu2: fractional_ratio(p)? * mu1,
        ..Default::default()
    })
}

/// exp[(λ/μ₁)a₁†](a₂† − 2β₋a₁†/(2−β₀+β₃))^κ|0,0⟩, normalized.
pub fn fractional_lambda_state(
    p: &HamiltonianParams,
    mu1: C64,
    lambda: C64,
    kappa: usize,
    g: &GeneratorSet,
) -> Result<TwoModeState> {
    require_class(p, &CaseTag::FractionalBneq1)?;
    linear_mu_state(mu1, fractional_ratio(p)? * mu1, lambda, kappa, g)
}

/// The ground state as the explicit binomial sum Σ√C(κ,k)(−x)^k|k,κ−k⟩/(1+|x|²)^{κ/2}.
pub fn fractional_ground_closed(p: &HamiltonianParams, kappa: usize, g: &GeneratorSet) -> Result<TwoModeState> {
    let x = fractional_ratio(p)?;
    check_degree(g.cutoff, kappa, kappa)?;
    let norm = (1.0 + x.norm_sqr()).powf(kappa as f64 / 2.0);
    let mut v = TwoModeState::zeros(g.cutoff);
    for k in 0..=kappa {
        v.set_amp(k, kappa - k, (-x).powu(k as u32) * (binomial(kappa, k).sqrt() / norm));
    }
    Ok(v)
}

/// T(ε,b,β₃,θ)·D(λ/m)|rotated κ-state⟩, with ε chosen so T removes β±, and m the
/// surviving coefficient of the rotated ladder.
pub fn fractional_t_form(
    p: &HamiltonianParams,
    mu1: C64,
    lambda: C64,
    kappa: usize,
    g: &GeneratorSet,
) -> Result<(TwoModeState, Vec<UnitarySpec>, C64)> {
    require_class(p, &CaseTag::FractionalBneq1)?;
    let eps = if p.beta0 < 2.0 { 1 } else { -1 };
    let red = reduce_by_similarity(p, &fractional_ladder(p, mu1)?, eps)?;
    let (m1, m2) = (red.coeffs.mu1, red.coeffs.mu2);
    let (base, m) = if m1.norm() >= m2.norm() {
        if m2.norm() > TERM_TOL * m1.norm() {
            return Err(Error::Domain("rotated ladder keeps both modes".into()));
        }
        let v = TwoModeState::basis(g.cutoff, 0, kappa)?;
        (displace_state(&v, 1, lambda / m1, g)?, m1)
    } else {
        if m1.norm() > TERM_TOL * m2.norm() {
            return Err(Error::Domain("rotated ladder keeps both modes".into()));
        }
        let v = TwoModeState::basis(g.cutoff, kappa, 0)?;
        (displace_state(&v, 2, lambda / m2, g)?, m2)
    };
    let v = finish(apply_chain(&red.chain, &base, g)?)?;
    Ok((v, red.chain, m))
}

/// D₁(c₁λ/μ₁)·D₂((λ/μ₁)(1−c₁)(2−β₀+β₃)/(2β₋))|0,0⟩.
pub fn fractional_separable_cs(
    p: &HamiltonianParams,
    mu1: C64,
    lambda: C64,
    c1: C64,
    g: &GeneratorSet,
) -> Result<TwoModeState> {
    require_class(p, &CaseTag::FractionalBneq1)?;
    if small(p.beta_minus()) {
        return Err(Error::Domain("separable fractional states need β₋ ≠ 0".into()));
    }
    separable_mu_state(mu1, fractional_ratio(p)? * mu1, lambda, c1, g)
}

/// Eigenstates of μ₁a₁ + μ₂a₂ in the isotropic family. The separable branch uses
/// c₂ (default μ₂*); the others use the displaced su(2) polynomial.
pub fn isotropic_states(
    mu1: C64,
    mu2: C64,
    lambda: C64,
    kappa: usize,
    branch: Branch,
    c2: Option<C64>,
    g: &GeneratorSet,
) -> Result<TwoModeState> {
    if small(mu1) {
        return Err(Error::Domain("isotropic states are written for μ₁ ≠ 0".into()));
    }
    match branch {
        Branch::Separable => {
            let c2 = c2.unwrap_or(mu2.conj());
            let v = TwoModeState::vacuum(g.cutoff);
            let v = displace_state(&v, 2, lambda * c2, g)?;
            finish(displace_state(&v, 1, lambda / mu1 * (ONE - c2 * mu2), g)?)
        }
        Branch::NonSeparable => linear_mu_state(mu1, mu2, lambda, 1, g),
        Branch::Kappa => linear_mu_state(mu1, mu2, lambda, kappa, g),
    }
}

/// Closed-form norm of the displaced su(2) polynomial state, before normalization.
pub fn isotropic_su2_norm_closed(mu1: C64, mu2: C64, lambda: C64, kappa: usize) -> f64 {
    let w2 = (lambda / mu1).norm_sqr();
    let s: f64 = (0..=kappa)
        .map(|k| {
            let inner: f64 = (0..=k)
                .map(|l| binomial(k, l) * w2.powi(l as i32) / (1..=l).product::<usize>() as f64)
                .sum();
            binomial(kappa, k) * mu1.norm_sqr().powi((kappa - k) as i32) * mu2.norm_sqr().powi(k as i32) * inner
        })
        .sum();
    s.sqrt()
}

/// D₁(λ/μ₁) Σ(−1)^k√C(κ,k)μ₁^{κ−k}μ₂^k(a₁† + λ*/μ₁*)^k/√k! |0,κ−k⟩, divided by the closed-form norm.
pub fn isotropic_su2_displayed(
    mu1: C64,
    mu2: C64,
    lambda: C64,
    kappa: usize,
    g: &GeneratorSet,
) -> Result<TwoModeState> {
    check_degree(g.cutoff, kappa, kappa)?;
    let w = (lambda / mu1).conj();
    let shifted = g.a1_dag.axpy(w, &g.identity)?;
    let mut v = TwoModeState::zeros(g.cutoff);
    for k in 0..=kappa {
        let c = mu1.powu((kappa - k) as u32) * mu2.powu(k as u32) * (-1f64).powi(k as i32)
            * (binomial(kappa, k) / (1..=k).product::<usize>() as f64).sqrt();
        let t = poly_power(&shifted, k, &TwoModeState::basis(g.cutoff, 0, kappa - k)?)?;
        v = v.axpy(c, &t)?;
    }
    let v = displace_state(&v, 1, lambda / mu1, g)?;
    Ok(v.scale(C64::new(1.0 / isotropic_su2_norm_closed(mu1, mu2, lambda, kappa), 0.0)))
}

// ---------------------------------------------------------------------------
// 2:1 family, A = μ₂a₂ + α₊J₋, H = 2n₁ + n₂

/// Branch 1: D₁(c₁λ)S₂(χ)D₂((λ/μ₂)cosh|χ|)|0⟩ with tanh|χ|·e^{i arg χ} = λc₁α₊/μ₂.
/// Branch 2 and κ: exp(λa₂†/μ₂)(a₂†²/2 − (μ₂/α₊)a₁†)^κ|0⟩.
pub fn basic21_states(
    mu2: C64,
    alpha_plus: C64,
    lambda: C64,
    branch: Branch,
    c1: Option<C64>,
    kappa: usize,
    g: &GeneratorSet,
) -> Result<TwoModeState> {
    if small(mu2) {
        return Err(Error::Domain("2:1 states need μ₂ ≠ 0".into()));
    }
    let kappa = match branch {
        Branch::Separable => {
            let c1 = c1.unwrap_or(ONE);
            squeeze_from_tanh(lambda * c1 * alpha_plus / mu2)?;
            return basic21_separable_exp(mu2, alpha_plus, lambda, c1, g);
        }
        Branch::NonSeparable => 1,
        Branch::Kappa => kappa,
    };
    if small(alpha_plus) {
        return Err(Error::Domain("non-separable 2:1 states need α₊ ≠ 0".into()));
    }
    check_degree(g.cutoff, kappa, 2 * kappa)?;
    let op = g.a2_dag.matmul(&g.a2_dag)?.scale_re(0.5).axpy(-mu2 / alpha_plus, &g.a1_dag)?;
    let v = poly_power(&op, kappa, &TwoModeState::vacuum(g.cutoff))?;
    finish(exp_series(&g.a2_dag, lambda / mu2, &v)?)
}

/// The separable 2:1 state as D₁(c₁λ)S₂(χ)D₂(λcosh|χ|/μ₂)|0⟩ with tanh-parametrized χ.
/// Built from dense exponentials, so it is only trusted well inside the cutoff.
pub fn basic21_separable_product(
    mu2: C64,
    alpha_plus: C64,
    lambda: C64,
    c1: C64,
    g: &GeneratorSet,
) -> Result<TwoModeState> {
    let chi = squeeze_from_tanh(lambda * c1 * alpha_plus / mu2)?;
    let v = TwoModeState::vacuum(g.cutoff);
    let v = displace_state(&v, 2, lambda / mu2 * chi.norm().cosh(), g)?;
    let v = squeeze_state(&v, 2, chi, g)?;
    finish(displace_state(&v, 1, c1 * lambda, g)?)
}

/// exp(c₁λa₁†)·exp[(λ/μ₂)(a₂† − ½c₁α₊a₂†²)]|0⟩, normalized.
pub fn basic21_separable_exp(mu2: C64, alpha_plus: C64, lambda: C64, c1: C64, g: &GeneratorSet) -> Result<TwoModeState> {
    if (lambda * c1 * alpha_plus / mu2).norm() >= 1.0 {
        return Err(Error::SqueezeDomain("|λc₁α₊/μ₂| ≥ 1".into()));
    }
    let x = g.a2_dag.axpy(-0.5 * c1 * alpha_plus, &g.a2_dag.matmul(&g.a2_dag)?)?;
    let v = exp_series(&x, lambda / mu2, &TwoModeState::vacuum(g.cutoff))?;
    finish(exp_series(&g.a1_dag, c1 * lambda, &v)?)
}

/// Closed-form norm of the displayed branch-2 state.
pub fn basic21_branch2_norm_closed(mu2: C64, alpha_plus: C64, lambda: C64) -> f64 {
    let w2 = (lambda / mu2).norm_sqr();
    (0.5 + (mu2 / alpha_plus).norm_sqr() + w2 + w2 * w2 / 4.0).sqrt()
}

/// D₂(λ/μ₂)[(a₂† + λ*/μ₂*)²/2|0,0⟩ − (μ₂/α₊)|1,0⟩] over the closed-form norm.
pub fn basic21_branch2_displayed(mu2: C64, alpha_plus: C64, lambda: C64, g: &GeneratorSet) -> Result<TwoModeState> {
    check_degree(g.cutoff, 1, 2)?;
    let shifted = g.a2_dag.axpy((lambda / mu2).conj(), &g.identity)?;
    let v = poly_power(&shifted, 2, &TwoModeState::vacuum(g.cutoff))?.scale(C64::new(0.5, 0.0));
    let v = v.axpy(-mu2 / alpha_plus, &TwoModeState::basis(g.cutoff, 1, 0)?)?;
    let v = displace_state(&v, 2, lambda / mu2, g)?;
    Ok(v.scale(C64::new(1.0 / basic21_branch2_norm_closed(mu2, alpha_plus, lambda), 0.0)))
}

// ---------------------------------------------------------------------------
// su(2) ground states

/// ((1+β₃)/2)^{κ/2} Σ(−1)^k√C(κ,k)(2β₋/(1+β₃))^k|k,κ−k⟩ with β₋ = R e^{−iθ}, b = 1.
pub fn su2_ground(beta3: f64, theta: f64, kappa: usize, g: &GeneratorSet) -> Result<TwoModeState> {
    if beta3.abs() >= 1.0 {
        return Err(Error::Domain(format!("su(2) ground needs |β₃| < 1, got {beta3}")));
    }
    check_degree(g.cutoff, kappa, kappa)?;
    let bm = HamiltonianParams::from_polar(0.0, 1.0, beta3, theta).beta_minus();
    let x = 2.0 * bm / (1.0 + beta3);
    let pref = ((1.0 + beta3) / 2.0).powf(kappa as f64 / 2.0);
    let mut v = TwoModeState::zeros(g.cutoff);
    for k in 0..=kappa {
        let c = (-x).powu(k as u32) * (pref * binomial(kappa, k).sqrt());
        v.set_amp(k, kappa - k, c);
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// linear ladders with creation terms (b = 2)

/// exp[((λ−λ₂)/μ₁)a₁† − ½(ν₁/μ₁)a₁†²]·exp[(λ₂/μ₂)a₂† − ½(ν₂/μ₂)a₂†²]|0⟩ for a
/// ladder μ·a + ν·a† + a₀; λ₂ defaults to λ/2.
pub fn separable_linear_state(
    cf: &LadderCoeffs,
    lambda: C64,
    lambda2: Option<C64>,
    g: &GeneratorSet,
) -> Result<TwoModeState> {
    let (s1, s2) = separable_squeeze_params(cf)?;
    let lam = lambda - cf.a0;
    let l2 = lambda2.unwrap_or(lam / 2.0);
    let vac = TwoModeState::vacuum(g.cutoff);
    let v = exp_series(&g.a1_dag.matmul(&g.a1_dag)?, -0.5 * s1, &vac)?;
    let v = exp_series(&g.a1_dag, (lam - l2) / cf.mu1, &v)?;
    let v = exp_series(&g.a2_dag.matmul(&g.a2_dag)?, -0.5 * s2, &v)?;
    let v = exp_series(&g.a2_dag, l2 / cf.mu2, &v)?;
    finish(v)
}

fn separable_squeeze_params(cf: &LadderCoeffs) -> Result<(C64, C64)> {
    if small(cf.mu1) || small(cf.mu2) {
        return Err(Error::Domain("separable branch needs μ₁ ≠ 0 and μ₂ ≠ 0".into()));
    }
    if cf.alpha_plus.norm() + cf.alpha_minus.norm() + cf.alpha3.norm() > GATE_TOL {
        return Err(Error::Domain("separable linear states need a ladder without J terms".into()));
    }
    let (s1, s2) = (cf.nu1 / cf.mu1, cf.nu2 / cf.mu2);
    for (k, s) in [(1, s1), (2, s2)] {
        if s.norm() >= 1.0 {
            return Err(Error::SqueezeDomain(format!("|ν{k}/μ{k}| = {} ≥ 1", s.norm())));
        }
    }
    Ok((s1, s2))
}

/// S₁(χ₁)S₂(χ₂)D₁(((λ−λ₂)/μ₁)cosh|χ₁|)D₂((λ₂/μ₂)cosh|χ₂|)|0⟩ with tanh|χᵢ|e^{i arg χᵢ} = νᵢ/μᵢ.
pub fn separable_linear_operator_form(
    cf: &LadderCoeffs,
    lambda: C64,
    lambda2: Option<C64>,
    g: &GeneratorSet,
) -> Result<TwoModeState> {
    let (s1, s2) = separable_squeeze_params(cf)?;
    let lam = lambda - cf.a0;
    let l2 = lambda2.unwrap_or(lam / 2.0);
    let (chi1, chi2) = (squeeze_from_tanh(s1)?, squeeze_from_tanh(s2)?);
    let v = TwoModeState::vacuum(g.cutoff);
    let v = displace_state(&v, 2, l2 / cf.mu2 * chi2.norm().cosh(), g)?;
    let v = displace_state(&v, 1, (lam - l2) / cf.mu1 * chi1.norm().cosh(), g)?;
    let v = squeeze_state(&v, 2, chi2, g)?;
    finish(squeeze_state(&v, 1, chi1, g)?)
}

/// (1−|r|²)Σ r^k√(k+1)|k,k+1⟩.
pub fn su11_ground_closed(r: C64, g: &GeneratorSet) -> Result<TwoModeState> {
    if r.norm() >= 1.0 {
        return Err(Error::SqueezeDomain(format!("|r| = {} ≥ 1", r.norm())));
    }
    let mut v = TwoModeState::zeros(g.cutoff);
    let pre = 1.0 - r.norm_sqr();
    for k in 0..g.cutoff.n1_max.min(g.cutoff.n2_max) {
        v.set_amp(k, k + 1, r.powu(k as u32) * (pre * ((k + 1) as f64).sqrt()));
    }
    finish(v)
}

/// Non-separable b = 2 states: rotate the ladder to m·a₁ + n·a₂† (or its mirror),
/// then exp(λξ₁/m − (n/m)ξ₁ξ₂)ξ₂^κ in the rotated frame. Returns the state, the
/// chain, and r = −n/m.
pub fn b2_nonseparable_state(
    p: &HamiltonianParams,
    cf: &LadderCoeffs,
    lambda: C64,
    kappa: usize,
    g: &GeneratorSet,
) -> Result<(TwoModeState, Vec<UnitarySpec>, C64)> {
    require_class(p, &CaseTag::LinearCoupledB2)?;
    if p.has_gamma() {
        return Err(Error::Domain("remove the linear coupling first".into()));
    }
    let red = reduce_by_similarity(p, cf, 1)?;
    let c = red.coeffs;
    let scale = c.max_abs().max(1.0);
    let tiny = |z: C64| z.norm() <= TERM_TOL * scale;
    let mirrored = if tiny(c.mu2) && tiny(c.nu1) && !tiny(c.mu1) {
        false
    } else if tiny(c.mu1) && tiny(c.nu2) && !tiny(c.mu2) {
        true
    } else {
        return Err(Error::Domain(format!("rotated ladder {c:?} is not of the form m·a + n·b†")));
    };
    let (m, n) = if mirrored { (c.mu2, c.nu1) } else { (c.mu1, c.nu2) };
    let r = -n / m;
    if r.norm() >= 1.0 {
        return Err(Error::SqueezeDomain(format!("|ν/μ| ratio {} ≥ 1 after rotation", r.norm())));
    }
    let lam = lambda - c.a0;
    let (lo, hi) = if mirrored { (&g.a2_dag, &g.a1_dag) } else { (&g.a1_dag, &g.a2_dag) };
    let (n_lo, n_hi) = if mirrored { (0, kappa) } else { (kappa, 0) };
    check_degree(g.cutoff, n_hi.max(n_lo), n_hi.max(n_lo))?;
    let v = poly_power(hi, kappa, &TwoModeState::vacuum(g.cutoff))?;
    let v = exp_series(&g.a1_dag.matmul(&g.a2_dag)?, r, &v)?;
    let v = exp_series(lo, lam / m, &v)?;
    let v = finish(apply_chain(&red.chain, &finish(v)?, g)?)?;
    Ok((v, red.chain, r))
}

// ---------------------------------------------------------------------------
// dispatcher

fn ladder_residual(p: &HamiltonianParams, cf: &LadderCoeffs) -> f64 {
    let a = Element::ladder(cf);
    Element::hamiltonian(p).commutator(&a).axpy(ONE, &a).norm()
}

fn energy_if_ground(req_lambda: C64, e: f64) -> Option<f64> {
    (req_lambda.norm() < 1e-14).then_some(e)
}

/// Drop the components that do not fit `cutoff`.
pub fn truncate(v: &TwoModeState, cutoff: FockCutoff) -> TwoModeState {
    let mut out = TwoModeState::zeros(cutoff);
    let cut = v.cutoff();
    for (i, a) in v.amplitudes().iter().enumerate() {
        let (n1, n2) = cut.occupation(i);
        if cutoff.contains(n1, n2) {
            out.set_amp(n1, n2, *a);
        }
    }
    out
}

/// Build the eigenstate a request describes for the ladder `cf` of `p`. Linear
/// couplings are displaced away first and the remaining family handled by its
/// closed form; the returned chain maps the reduced state to the answer.
/// Assembly runs on a cutoff padded by `WORK_PAD` so that displacing a reduced
/// state does not pull truncation error into the retained levels.
pub fn construct(
    p: &HamiltonianParams,
    cf: &LadderCoeffs,
    req: &EigenstateRequest,
    g: &GeneratorSet,
) -> Result<ConstructedState> {
    let cut = g.cutoff;
    if req.effective_kappa() > cut.n1_max.min(cut.n2_max) {
        return Err(Error::CutoffOverflow(format!("κ = {} exceeds the cutoff", req.effective_kappa())));
    }
    // T is exact only on complete total-number blocks, so a rotated state needs
    // every block the target cutoff touches
    let rotated = reduce_by_similarity(p, cf, 1)
        .map(|r| r.chain.iter().any(|s| matches!(s, UnitarySpec::MixT { .. })))
        .unwrap_or(false);
    let (mut w1, mut w2) = (cut.n1_max + WORK_PAD, cut.n2_max + WORK_PAD);
    if rotated {
        let side = w1.max(w2).max(cut.n1_max + cut.n2_max);
        (w1, w2) = (side, side);
    }
    let work = build_generators(FockCutoff::new(w1, w2));
    let mut c = construct_on(p, cf, req, &work)?;
    c.state = finish(truncate(&c.state, cut))?;
    Ok(c)
}

/// `construct` restricted to Hamiltonians with external linear coupling.
pub fn linear_coupled_states(
    p: &HamiltonianParams,
    cf: &LadderCoeffs,
    req: &EigenstateRequest,
    g: &GeneratorSet,
) -> Result<ConstructedState> {
    if !p.has_gamma() {
        return Err(Error::Domain("no linear coupling: use the uncoupled families".into()));
    }
    construct(p, cf, req, g)
}

fn construct_on(
    p: &HamiltonianParams,
    cf: &LadderCoeffs,
    req: &EigenstateRequest,
    g: &GeneratorSet,
) -> Result<ConstructedState> {
    let tag = classify(p);
    if tag == CaseTag::NoLadderExists {
        return Err(Error::NoLadderExists);
    }
    if req.tag != tag {
        return Err(Error::Config(format!("request tag {:?} does not match the parameters ({tag:?})", req.tag)));
    }
    if !cf.normalizable() {
        return Err(Error::NotNormalizable(format!("{tag:?}: ν-type ladder without μ terms")));
    }
    if frozen_mode_ladder(p, cf) {
        return Err(Error::NotNormalizable(format!("{tag:?}: one mode has zero frequency")));
    }
    let res = ladder_residual(p, cf);
    if res > 1e-9 * cf.max_abs().max(1.0) {
        return Err(Error::Domain(format!("coefficients are not a ladder of H (residual {res:.2e})")));
    }
    if !p.has_gamma() {
        return construct_free(p, cf, req, g);
    }
    let red = displace_away_linear(p, cf).or_else(|_| reduce_by_similarity(p, cf, 1))?;
    if red.params.has_gamma() {
        return Err(Error::NoDisplacementReduction(format!("{tag:?}: linear terms survive the reduction")));
    }
    let inner = construct_free(&red.params, &red.coeffs, req, g)?;
    let mut chain = red.chain.clone();
    chain.extend(inner.chain.iter().copied());
    let state = finish(apply_chain(&red.chain, &inner.state, g)?)?;
    Ok(ConstructedState {
        family: format!("{tag:?} via {}", inner.family),
        state,
        chain,
        expected_energy: inner.expected_energy,
    })
}

fn plain(family: String, state: TwoModeState, expected_energy: Option<f64>) -> ConstructedState {
    ConstructedState {
        family,
        state,
        chain: Vec::new(),
        expected_energy,
    }
}

fn construct_free(
    p: &HamiltonianParams,
    cf: &LadderCoeffs,
    req: &EigenstateRequest,
    g: &GeneratorSet,
) -> Result<ConstructedState> {
    let lam = req.lambda - cf.a0;
    let kappa = req.effective_kappa();
    let no_j = cf.alpha_plus.norm() + cf.alpha_minus.norm() + cf.alpha3.norm() <= GATE_TOL;
    let no_nu = cf.nu1.norm() + cf.nu2.norm() <= GATE_TOL;
    let tag = classify(p);
    match tag {
        CaseTag::FractionalBneq1 | CaseTag::IsotropicB0eq2 if no_j && no_nu => {
            let state = match req.branch {
                Branch::Separable => match tag {
                    CaseTag::IsotropicB0eq2 => isotropic_states(cf.mu1, cf.mu2, lam, 0, req.branch, req.c2, g)?,
                    _ => separable_mu_state(cf.mu1, cf.mu2, lam, req.c1.unwrap_or(ONE), g)?,
                },
                _ => linear_mu_state(cf.mu1, cf.mu2, lam, kappa, g)?,
            };
            let e = kappa as f64 * (p.beta0 - 1.0) + p.h0;
            Ok(plain(format!("{tag:?}"), state, energy_if_ground(req.lambda, e)))
        }
        CaseTag::Basic21family(v) => {
            let kappa_e = match req.branch {
                Branch::Separable => 0,
                _ => kappa,
            };
            let state = match v {
                Basic21Variant::TwoOne => basic21_states(cf.mu2, cf.alpha_plus, lam, req.branch, req.c1, kappa, g)?,
                Basic21Variant::OneTwo => {
                    let mirror = build_generators(FockCutoff::new(g.cutoff.n2_max, g.cutoff.n1_max));
                    swap_modes(&basic21_states(cf.mu1, cf.alpha_minus, lam, req.branch, req.c1, kappa, &mirror)?)?
                }
            };
            let e = 2.0 * kappa_e as f64 + p.h0;
            Ok(plain(format!("{tag:?}"), state, energy_if_ground(req.lambda, e)))
        }
        CaseTag::Su2PureLadder | CaseTag::Generalized21 { .. } | CaseTag::Extended21 { .. } => {
            let red = reduce_by_similarity(p, cf, 1)?;
            let rtag = classify(&red.params);
            let inner = if matches!(rtag, CaseTag::Basic21family(_)) {
                construct_free(&red.params, &red.coeffs, &EigenstateRequest { tag: rtag, ..req.clone() }, g)?
            } else {
                su2_reduced(&red.params, &red.coeffs, req, g)?
            };
            let mut chain = red.chain.clone();
            chain.extend(inner.chain.iter().copied());
            Ok(ConstructedState {
                family: format!("{tag:?} via {}", inner.family),
                state: finish(apply_chain(&red.chain, &inner.state, g)?)?,
                chain,
                expected_energy: inner.expected_energy,
            })
        }
        CaseTag::LinearCoupledB2 if no_j => {
            if req.branch == Branch::Separable {
                let state = separable_linear_state(cf, req.lambda, req.lambda2, g)?;
                return Ok(plain(format!("{tag:?} type 1"), state, None));
            }
            let red = reduce_by_similarity(p, cf, 1)?;
            let (state, chain, _) = b2_nonseparable_state(p, cf, req.lambda, kappa, g)?;
            let mirrored = red.coeffs.mu1.norm() < red.coeffs.mu2.norm();
            let j3 = if mirrored { kappa as f64 / 2.0 } else { -(kappa as f64) / 2.0 };
            let e = red.params.beta3 * j3 + red.params.h0;
            Ok(ConstructedState {
                family: format!("{tag:?} type 2"),
                state,
                chain,
                expected_energy: energy_if_ground(req.lambda, e),
            })
        }
        other => Err(Error::Domain(format!("no closed-form eigenstates for {other:?} with {cf:?}"))),
    }
}

/// After rotation the su(2) ladder is α·J₋ or α·J₊; its kernel holds |0,κ⟩ or |κ,0⟩.
fn su2_reduced(
    p: &HamiltonianParams,
    cf: &LadderCoeffs,
    req: &EigenstateRequest,
    g: &GeneratorSet,
) -> Result<ConstructedState> {
    if req.lambda.norm() > GATE_TOL {
        return Err(Error::Domain("the su(2) ladder is nilpotent on each block; only λ = 0 exists".into()));
    }
    let scale = cf.max_abs().max(1.0);
    let others = [cf.mu1, cf.mu2, cf.nu1, cf.nu2, cf.alpha3, cf.a0];
    if others.iter().any(|z| z.norm() > TERM_TOL * scale) {
        return Err(Error::Domain(format!("rotated ladder {cf:?} is not a pure J± ladder")));
    }
    let kappa = req.kappa;
    check_degree(g.cutoff, kappa, kappa)?;
    let (state, j3) = if cf.alpha_minus.norm() <= TERM_TOL * scale {
        (TwoModeState::basis(g.cutoff, 0, kappa)?, -(kappa as f64) / 2.0)
    } else if cf.alpha_plus.norm() <= TERM_TOL * scale {
        (TwoModeState::basis(g.cutoff, kappa, 0)?, kappa as f64 / 2.0)
    } else {
        return Err(Error::Domain("rotated ladder keeps both J₊ and J₋".into()));
    };
    let e = p.beta0 * kappa as f64 / 2.0 + p.beta3 * j3 + p.h0;
    Ok(plain("su(2) ground".into(), state, Some(e)))
}
