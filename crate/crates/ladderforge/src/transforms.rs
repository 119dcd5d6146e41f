//! Displacements, squeezes and the SU(2) mixing operator T, both as matrices
//! (exponentials of generator combinations) and as exact normal-ordered
//! actions on states. Similarity reductions act symbolically on algebra elements.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::algebra::{Element, Gen, HamiltonianParams, LadderCoeffs, GATE_TOL};
use crate::error::{Error, Result};
use crate::fock::{GeneratorSet, OperatorMatrix, TwoModeState, C64, ONE, ZERO};
use crate::linalg::{expm, hermitian_eigenvalues};

const DEGENERATE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum UnitarySpec {
    /// D₁(α) = exp(α a₁† − α* a₁)
    Displace1 {
        #[serde(with = "crate::cplx")]
        alpha: C64,
    },
    Displace2 {
        #[serde(with = "crate::cplx")]
        alpha: C64,
    },
    /// S₁(χ) = exp(−½(χ a₁†² − χ* a₁²))
    Squeeze1 {
        #[serde(with = "crate::cplx")]
        chi: C64,
    },
    /// S₂(χ) = exp(−½(χ a₂†² − χ* a₂²))
    Squeeze2 {
        #[serde(with = "crate::cplx")]
        chi: C64,
    },
    /// S(ϑ,φ) = exp[−ϑ/2 (e^{−iφ} a₁†a₂† − e^{iφ} a₁a₂)]
    SqueezeTwoMode { theta: f64, phi: f64 },
    /// T(ε,b,β₃,θ) = exp[−t (e^{−iθ}J₊ − e^{iθ}J₋)], tan t = ε√((b−εβ₃)/(b+εβ₃))
    MixT { eps: i8, b: f64, beta3: f64, theta: f64 },
}

impl UnitarySpec {
    pub fn mix(eps: i8, b: f64, beta3: f64, theta: f64) -> Self {
        UnitarySpec::MixT { eps, b, beta3, theta }
    }

    pub fn validate(&self) -> Result<()> {
        if let UnitarySpec::MixT { eps, b, beta3, .. } = *self {
            if eps != 1 && eps != -1 {
                return Err(Error::Domain(format!("ε must be ±1, got {eps}")));
            }
            if b <= 0.0 || beta3.abs() > b * (1.0 + 1e-12) {
                return Err(Error::Domain(format!("T needs b > 0 and |β₃| ≤ b (b={b}, β₃={beta3})")));
            }
        }
        Ok(())
    }

    /// Amplitude scale of the generator, used for the validity envelope.
    pub fn amplitude(&self) -> f64 {
        match *self {
            UnitarySpec::Displace1 { alpha } | UnitarySpec::Displace2 { alpha } => alpha.norm_sqr(),
            UnitarySpec::Squeeze1 { chi } | UnitarySpec::Squeeze2 { chi } => chi.norm().sinh().powi(2),
            UnitarySpec::SqueezeTwoMode { theta, .. } => (theta / 2.0).sinh().powi(2),
            UnitarySpec::MixT { .. } => 0.0,
        }
    }

    /// True when the truncated exponential cannot be trusted at this cutoff.
    pub fn truncation_dominated(&self, n_max: usize) -> bool {
        self.amplitude() > n_max as f64 / 3.0
    }
}

/// Rotation angle t of T with the degenerate limits resolved.
pub fn mix_angle(eps: i8, b: f64, beta3: f64) -> f64 {
    let e = eps as f64;
    let (num, den) = (b - e * beta3, b + e * beta3);
    if num.abs() < DEGENERATE {
        0.0
    } else if den.abs() < DEGENERATE {
        e * FRAC_PI_2
    } else {
        (e * (num / den).sqrt()).atan()
    }
}

/// Mode matrix M of T: T†a_iT = Σ_j M[i][j] a_j.
pub fn mix_mode_matrix(eps: i8, b: f64, beta3: f64, theta: f64) -> [[C64; 2]; 2] {
    let t = mix_angle(eps, b, beta3);
    let (s, c) = t.sin_cos();
    [
        [C64::new(c, 0.0), -C64::from_polar(s, -theta)],
        [C64::from_polar(s, theta), C64::new(c, 0.0)],
    ]
}

/// T built on complete number blocks and restricted to the box, so every
/// retained entry equals the untruncated matrix element.
fn mix_matrix(t: f64, theta: f64, g: &GeneratorSet) -> OperatorMatrix {
    let cut = g.cutoff;
    let mut trip = Vec::new();
    for total in 0..=(cut.n1_max + cut.n2_max) {
        // block basis |k, total−k⟩, k = 0..=total
        let m = total + 1;
        let mut gen = nalgebra::DMatrix::from_element(m, m, ZERO);
        for k in 0..m {
            let n2 = (total - k) as f64;
            let n1 = k as f64;
            // J₊ = a₁†a₂ : |k⟩ → |k+1⟩
            if k + 1 < m {
                gen[(k + 1, k)] += C64::from_polar(((n1 + 1.0) * n2).sqrt(), -theta);
            }
            // J₋ = a₂†a₁ : |k⟩ → |k−1⟩
            if k > 0 {
                gen[(k - 1, k)] -= C64::from_polar((n1 * (n2 + 1.0)).sqrt(), theta);
            }
        }
        let u = (gen * C64::new(-t, 0.0)).exp();
        for c in 0..m {
            if !cut.contains(c, total - c) {
                continue;
            }
            for r in 0..m {
                if cut.contains(r, total - r) && u[(r, c)] != ZERO {
                    trip.push((cut.index(r, total - r), cut.index(c, total - c), u[(r, c)]));
                }
            }
        }
    }
    OperatorMatrix::from_triplets(cut, trip).unwrap()
}

pub fn build_unitary(spec: &UnitarySpec, g: &GeneratorSet) -> Result<OperatorMatrix> {
    spec.validate()?;
    let gen = match *spec {
        UnitarySpec::Displace1 { alpha } => g.a1_dag.scale(alpha).axpy(-alpha.conj(), &g.a1)?,
        UnitarySpec::Displace2 { alpha } => g.a2_dag.scale(alpha).axpy(-alpha.conj(), &g.a2)?,
        UnitarySpec::Squeeze1 { chi } => {
            let up = g.a1_dag.matmul(&g.a1_dag)?;
            let dn = g.a1.matmul(&g.a1)?;
            up.scale(-chi / 2.0).axpy(chi.conj() / 2.0, &dn)?
        }
        UnitarySpec::Squeeze2 { chi } => {
            let up = g.a2_dag.matmul(&g.a2_dag)?;
            let dn = g.a2.matmul(&g.a2)?;
            up.scale(-chi / 2.0).axpy(chi.conj() / 2.0, &dn)?
        }
        UnitarySpec::SqueezeTwoMode { theta, phi } => {
            let up = g.a1_dag.matmul(&g.a2_dag)?;
            let dn = g.a1.matmul(&g.a2)?;
            up.scale(C64::from_polar(-theta / 2.0, -phi))
                .axpy(C64::from_polar(theta / 2.0, phi), &dn)?
        }
        UnitarySpec::MixT { eps, b, beta3, theta } => {
            let t = mix_angle(eps, b, beta3);
            if t == 0.0 {
                return Ok(g.identity.clone());
            }
            return Ok(mix_matrix(t, theta, g));
        }
    };
    Ok(expm(&gen))
}

/// U†·O·U
pub fn similarity(u: &OperatorMatrix, o: &OperatorMatrix) -> Result<OperatorMatrix> {
    u.adjoint().matmul(&o.matmul(u)?)
}

/// Product of unitaries in chain order: U = U₁·U₂·…
pub fn chain_unitary(chain: &[UnitarySpec], g: &GeneratorSet) -> Result<OperatorMatrix> {
    chain
        .iter()
        .try_fold(g.identity.clone(), |acc, s| acc.matmul(&build_unitary(s, g)?))
}

/// ‖exp-form − product-form‖_F of T over the complete number blocks.
pub fn verify_disentangled_t(eps: i8, b: f64, beta3: f64, theta: f64, g: &GeneratorSet) -> Result<f64> {
    let spec = UnitarySpec::mix(eps, b, beta3, theta);
    let exp_form = build_unitary(&spec, g)?;
    let e = eps as f64;
    let (num, den) = (b - e * beta3, b + e * beta3);
    if den <= 0.0 || num < 0.0 {
        return Err(Error::Domain("disentangled form needs b ± εβ₃ > 0".into()));
    }
    let tau = e * (num / den).sqrt();
    let lhs = expm(&g.jplus.scale(C64::from_polar(-tau, -theta)));
    let mid = expm(&g.j3.scale_re((2.0 * b / den).ln()));
    let rhs = expm(&g.jminus.scale(C64::from_polar(tau, theta)));
    let prod = lhs.matmul(&mid)?.matmul(&rhs)?;
    exp_form.masked_distance(&prod, &g.cutoff.block_mask(0)?)
}

// ---------------------------------------------------------------------------
// exact actions on states

/// exp(c·X)·v as a terminating series; X must be nilpotent on the truncated space.
pub(crate) fn exp_series(x: &OperatorMatrix, coeff: C64, v: &TwoModeState) -> Result<TwoModeState> {
    let mut out = v.clone();
    let mut term = v.clone();
    for k in 1..=(4 * x.cutoff().dim()) {
        term = x.apply(&term)?.scale(coeff / k as f64);
        if term.norm() == 0.0 {
            return Ok(out);
        }
        out = out.axpy(ONE, &term)?;
    }
    Err(Error::Domain("series did not terminate; operator is not nilpotent".into()))
}

fn diag_scale(v: &TwoModeState, f: impl Fn(usize, usize) -> C64) -> TwoModeState {
    let cut = v.cutoff();
    let amps = v
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let (n1, n2) = cut.occupation(i);
            a * f(n1, n2)
        })
        .collect();
    TwoModeState::from_amplitudes(cut, amps).unwrap()
}

/// D_i(z)·v = e^{−|z|²/2} e^{z a†} e^{−z* a} v, exact on every retained level.
pub fn displace_state(v: &TwoModeState, mode: u8, z: C64, g: &GeneratorSet) -> Result<TwoModeState> {
    let (a, ad) = if mode == 1 { (&g.a1, &g.a1_dag) } else { (&g.a2, &g.a2_dag) };
    let w = exp_series(a, -z.conj(), v)?;
    Ok(exp_series(ad, z, &w)?.scale(C64::new((-z.norm_sqr() / 2.0).exp(), 0.0)))
}

/// S_i(χ)·v through the normal-ordered disentangled form.
pub fn squeeze_state(v: &TwoModeState, mode: u8, chi: C64, g: &GeneratorSet) -> Result<TwoModeState> {
    let (a, ad) = if mode == 1 { (&g.a1, &g.a1_dag) } else { (&g.a2, &g.a2_dag) };
    let r = chi.norm();
    let e = if r > 0.0 { chi / r } else { ONE };
    let th = r.tanh();
    let ch = r.cosh();
    let a2 = a.matmul(a)?;
    let ad2 = ad.matmul(ad)?;
    let w = exp_series(&a2, e.conj() * (th / 2.0), v)?;
    let w = diag_scale(&w, |n1, n2| {
        let n = if mode == 1 { n1 } else { n2 };
        C64::new(ch.powf(-(n as f64 + 0.5)), 0.0)
    });
    exp_series(&ad2, -e * (th / 2.0), &w)
}

/// S(ϑ,φ)·v through the normal-ordered disentangled form.
pub fn two_mode_squeeze_state(v: &TwoModeState, theta: f64, phi: f64, g: &GeneratorSet) -> Result<TwoModeState> {
    let r = theta / 2.0;
    let th = r.tanh();
    let ch = r.cosh();
    let up = g.a1_dag.matmul(&g.a2_dag)?;
    let dn = g.a1.matmul(&g.a2)?;
    let w = exp_series(&dn, C64::from_polar(th, phi), v)?;
    let w = diag_scale(&w, |n1, n2| C64::new(ch.powf(-((n1 + n2) as f64 + 1.0)), 0.0));
    exp_series(&up, C64::from_polar(-th, -phi), &w)
}

pub fn apply_spec(spec: &UnitarySpec, v: &TwoModeState, g: &GeneratorSet) -> Result<TwoModeState> {
    match *spec {
        UnitarySpec::Displace1 { alpha } => displace_state(v, 1, alpha, g),
        UnitarySpec::Displace2 { alpha } => displace_state(v, 2, alpha, g),
        UnitarySpec::Squeeze1 { chi } => squeeze_state(v, 1, chi, g),
        UnitarySpec::Squeeze2 { chi } => squeeze_state(v, 2, chi, g),
        UnitarySpec::SqueezeTwoMode { theta, phi } => two_mode_squeeze_state(v, theta, phi, g),
        UnitarySpec::MixT { .. } => build_unitary(spec, g)?.apply(v),
    }
}

/// U·v for U = U₁·U₂·… (the last factor acts first).
pub fn apply_chain(chain: &[UnitarySpec], v: &TwoModeState, g: &GeneratorSet) -> Result<TwoModeState> {
    chain.iter().rev().try_fold(v.clone(), |acc, s| apply_spec(s, &acc, g))
}

/// χ with tanh|χ| = |x| and the phase of x; refuses |x| ≥ 1.
pub fn squeeze_from_tanh(x: C64) -> Result<C64> {
    if x.norm() >= 1.0 {
        return Err(Error::SqueezeDomain(format!("|tanh argument| = {} ≥ 1", x.norm())));
    }
    if x.norm() == 0.0 {
        return Ok(ZERO);
    }
    Ok(x / x.norm() * x.norm().atanh())
}

// ---------------------------------------------------------------------------
// symbolic similarity on algebra elements

/// U†·X·U for a mixing or displacement unitary, computed on the algebra.
pub fn conjugate_element(spec: &UnitarySpec, x: &Element) -> Result<Element> {
    let e = &x.0;
    // quadratic part as K with X₂ = Σ K_ij a_i† a_j
    let k = [
        [e[Gen::N as usize] / 2.0 + e[Gen::J3 as usize] / 2.0, e[Gen::Jp as usize]],
        [e[Gen::Jm as usize], e[Gen::N as usize] / 2.0 - e[Gen::J3 as usize] / 2.0],
    ];
    let u = [e[Gen::A1 as usize], e[Gen::A2 as usize]];
    let v = [e[Gen::A1d as usize], e[Gen::A2d as usize]];
    let mut id = e[Gen::I as usize];
    let (k2, u2, v2) = match *spec {
        UnitarySpec::MixT { eps, b, beta3, theta } => {
            spec.validate()?;
            let m = mix_mode_matrix(eps, b, beta3, theta);
            let mut k2 = [[ZERO; 2]; 2];
            for (kk, row) in k2.iter_mut().enumerate() {
                for (l, out) in row.iter_mut().enumerate() {
                    for i in 0..2 {
                        for j in 0..2 {
                            *out += m[i][kk].conj() * k[i][j] * m[j][l];
                        }
                    }
                }
            }
            let u2 = [0, 1].map(|j| u[0] * m[0][j] + u[1] * m[1][j]);
            let v2 = [0, 1].map(|j| v[0] * m[0][j].conj() + v[1] * m[1][j].conj());
            (k2, u2, v2)
        }
        UnitarySpec::Displace1 { .. } | UnitarySpec::Displace2 { .. } => {
            let z = match *spec {
                UnitarySpec::Displace1 { alpha } => [alpha, ZERO],
                UnitarySpec::Displace2 { alpha } => [ZERO, alpha],
                _ => unreachable!(),
            };
            // a → a + z, a† → a† + z*
            let mut u2 = u;
            let mut v2 = v;
            for i in 0..2 {
                for j in 0..2 {
                    v2[i] += k[i][j] * z[j];
                    u2[j] += k[i][j] * z[i].conj();
                    id += k[i][j] * z[i].conj() * z[j];
                }
                id += u[i] * z[i] + v[i] * z[i].conj();
            }
            (k, u2, v2)
        }
        _ => {
            return Err(Error::Domain(
                "squeezes leave the algebra; only T and displacements act symbolically".into(),
            ))
        }
    };
    let mut out = Element::zero();
    out.0[Gen::N as usize] = k2[0][0] + k2[1][1];
    out.0[Gen::J3 as usize] = k2[0][0] - k2[1][1];
    out.0[Gen::Jp as usize] = k2[0][1];
    out.0[Gen::Jm as usize] = k2[1][0];
    out.0[Gen::A1 as usize] = u2[0];
    out.0[Gen::A2 as usize] = u2[1];
    out.0[Gen::A1d as usize] = v2[0];
    out.0[Gen::A2d as usize] = v2[1];
    out.0[Gen::I as usize] = id;
    Ok(out)
}

pub fn conjugate_chain(chain: &[UnitarySpec], x: &Element) -> Result<Element> {
    chain.iter().try_fold(*x, |acc, s| conjugate_element(s, &acc))
}

fn element_to_params(h: &Element) -> HamiltonianParams {
    let e = &h.0;
    HamiltonianParams {
        beta0: e[Gen::N as usize].re,
        beta_plus: e[Gen::Jm as usize],
        beta3: e[Gen::J3 as usize].re,
        gamma1: e[Gen::A1d as usize],
        gamma2: e[Gen::A2d as usize],
        h0: e[Gen::I as usize].re,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub params: HamiltonianParams,
    pub coeffs: LadderCoeffs,
    /// U = chain[0]·chain[1]·…; reduced operators are U†·O·U.
    pub chain: Vec<UnitarySpec>,
}

/// Quadratic part of an element as K with X₂ = Σ K_ij a_i† a_j.
fn quadratic_part(h: &Element) -> [[C64; 2]; 2] {
    let e = &h.0;
    [
        [e[Gen::N as usize] / 2.0 + e[Gen::J3 as usize] / 2.0, e[Gen::Jp as usize]],
        [e[Gen::Jm as usize], e[Gen::N as usize] / 2.0 - e[Gen::J3 as usize] / 2.0],
    ]
}

fn finish_reduction(p: &HamiltonianParams, cf: &LadderCoeffs, chain: Vec<UnitarySpec>) -> Result<Reduction> {
    let h = conjugate_chain(&chain, &Element::hamiltonian(p))?;
    let a = conjugate_chain(&chain, &Element::ladder(cf))?;
    let mut params = element_to_params(&h);
    for z in [&mut params.gamma1, &mut params.gamma2, &mut params.beta_plus] {
        if z.norm() < 1e-13 {
            *z = ZERO;
        }
    }
    let mut coeffs = a.to_coeffs();
    if coeffs.a0.norm() < 1e-13 {
        coeffs.a0 = ZERO;
    }
    Ok(Reduction { params, coeffs, chain })
}

fn push_displacements(chain: &mut Vec<UnitarySpec>, z: [C64; 2]) {
    if z[0].norm() > 0.0 {
        chain.push(UnitarySpec::Displace1 { alpha: z[0] });
    }
    if z[1].norm() > 0.0 {
        chain.push(UnitarySpec::Displace2 { alpha: z[1] });
    }
}

/// Rotate with T(ε,b,β₃,θ) to β₀N + εbJ₃, then displace away the linear terms.
pub fn reduce_by_similarity(p: &HamiltonianParams, cf: &LadderCoeffs, eps: i8) -> Result<Reduction> {
    let mut chain = Vec::new();
    let b = p.b();
    if b > GATE_TOL {
        let spec = UnitarySpec::mix(eps, b, p.beta3, p.theta());
        spec.validate()?;
        if mix_angle(eps, b, p.beta3) != 0.0 {
            chain.push(spec);
        }
    }
    let h = conjugate_chain(&chain, &Element::hamiltonian(p))?;
    let w1 = (h.0[Gen::N as usize].re + h.0[Gen::J3 as usize].re) / 2.0;
    let w2 = (h.0[Gen::N as usize].re - h.0[Gen::J3 as usize].re) / 2.0;
    let mut z = [ZERO; 2];
    for (k, (w, g)) in [(w1, h.0[Gen::A1d as usize]), (w2, h.0[Gen::A2d as usize])].into_iter().enumerate() {
        if g.norm() <= GATE_TOL {
            continue;
        }
        if w.abs() <= GATE_TOL {
            return Err(Error::NoDisplacementReduction(format!(
                "mode {} frequency vanishes while its linear coupling is {g}",
                k + 1
            )));
        }
        z[k] = -g / w;
    }
    push_displacements(&mut chain, z);
    finish_reduction(p, cf, chain)
}

/// Remove the linear couplings with displacements alone: solve K·z = −γ, where K
/// is the quadratic part of H. Leaves the quadratic part untouched.
pub fn displace_away_linear(p: &HamiltonianParams, cf: &LadderCoeffs) -> Result<Reduction> {
    let mut chain = Vec::new();
    if p.has_gamma() {
        let k = quadratic_part(&Element::hamiltonian(p));
        let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
        if det.norm() <= GATE_TOL {
            return Err(Error::NoDisplacementReduction(
                "the quadratic part of H is singular; a rotation is needed first".into(),
            ));
        }
        let (g1, g2) = (p.gamma1, p.gamma2);
        let z = [-(k[1][1] * g1 - k[0][1] * g2) / det, -(k[0][0] * g2 - k[1][0] * g1) / det];
        push_displacements(&mut chain, z);
    }
    finish_reduction(p, cf, chain)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionCheck {
    /// ‖P(U†HU − H')P‖ and the same for A, over complete number blocks.
    pub h_residual: f64,
    pub a_residual: f64,
    pub block_depth: usize,
    /// max |λₖ(H) − λₖ(H')| over the lowest levels, when H' is bounded below.
    pub spectrum_deviation: Option<f64>,
}

/// Matrix check of a reduction at the cutoff of `g`. Chains with displacements
/// are compared deeper inside the cutoff, since exp(za† − z*a) leaks across it.
pub fn verify_reduction(
    p: &HamiltonianParams,
    cf: &LadderCoeffs,
    red: &Reduction,
    levels: usize,
    g: &GeneratorSet,
) -> Result<ReductionCheck> {
    let u = chain_unitary(&red.chain, g)?;
    let top = g.cutoff.n1_max.min(g.cutoff.n2_max);
    let displaced = red.chain.iter().any(|s| !matches!(s, UnitarySpec::MixT { .. }));
    let block_depth = if displaced { top.saturating_sub(2).max(2).min(12) } else { 2 };
    let mask = g.cutoff.block_mask(block_depth)?;
    let h = Element::hamiltonian(p).to_matrix(g);
    let h_red = Element::hamiltonian(&red.params).to_matrix(g);
    let h_residual = similarity(&u, &h)?.masked_distance(&h_red, &mask)?;
    let a_residual = similarity(&u, &Element::ladder(cf).to_matrix(g))?
        .masked_distance(&Element::ladder(&red.coeffs).to_matrix(g), &mask)?;
    let q = &red.params;
    let (w1, w2) = ((q.beta0 + q.beta3) / 2.0, (q.beta0 - q.beta3) / 2.0);
    let spectrum_deviation = if w1 > GATE_TOL && w2 > GATE_TOL && q.beta_plus == ZERO && !q.has_gamma() {
        let mut exact: Vec<f64> = (0..=levels)
            .flat_map(|k1| (0..=levels).map(move |k2| w1 * k1 as f64 + w2 * k2 as f64 + q.h0))
            .collect();
        exact.sort_by(f64::total_cmp);
        let numeric = hermitian_eigenvalues(&h, &vec![true; g.cutoff.dim()], 1e-10)?;
        Some(
            exact
                .iter()
                .zip(&numeric)
                .take(levels)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };
    Ok(ReductionCheck { h_residual, a_residual, block_depth, spectrum_deviation })
}
