//! The p:q commensurate oscillator: its special lowering operator 𝒜, Chen-type
//! grounds, the zero-eigenvalue sectors and the Louck level counting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockCutoff, GeneratorSet, OperatorMatrix, TwoModeState, C64, ZERO};
use crate::spectra::{diagonalize_oracle, raising_chain, SpectrumReport};

/// Energies are compared as multiples of 1/(pq) after rounding at this tolerance.
pub const RATIONAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PQParams {
    pub p: u32,
    pub q: u32,
    #[serde(with = "crate::cplx")]
    pub alpha_plus: C64,
    #[serde(with = "crate::cplx")]
    pub alpha_minus: C64,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl PQParams {
    pub fn new(p: u32, q: u32, alpha_plus: C64, alpha_minus: C64) -> Result<Self> {
        let pq = Self { p, q, alpha_plus, alpha_minus };
        pq.validate()?;
        Ok(pq)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.q == 0 {
            return Err(Error::Domain(format!("p and q must be positive, got {}:{}", self.p, self.q)));
        }
        if gcd(self.p, self.q) != 1 {
            return Err(Error::NotCoprime(self.p, self.q));
        }
        Ok(())
    }

    fn pf(&self) -> f64 {
        self.p as f64
    }

    fn qf(&self) -> f64 {
        self.q as f64
    }
}

fn ln_fact(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn fact(n: usize) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

/// diag(n₁/q + n₂/p).
pub fn build_h_pq(pq: &PQParams, g: &GeneratorSet) -> Result<OperatorMatrix> {
    pq.validate()?;
    let (p, q) = (pq.pf(), pq.qf());
    Ok(OperatorMatrix::diagonal(g.cutoff, |n1, n2| (p * n1 as f64 + q * n2 as f64) / (p * q)))
}

/// 𝒜 = (α₊* q a₂ᵖ − α₋* p a₁^q)/(pq).
pub fn build_cal_a_pq(pq: &PQParams, g: &GeneratorSet) -> Result<OperatorMatrix> {
    pq.validate()?;
    let (p, q) = (pq.pf(), pq.qf());
    let a2p = g.a2.pow(pq.p);
    let a1q = g.a1.pow(pq.q);
    a2p.scale(pq.alpha_plus.conj() / p).axpy(-pq.alpha_minus.conj() / q, &a1q)
}

/// A = α₋ (a₁†)^{q−1} a₂ + α₊ a₁ (a₂†)^{p−1}, with unconjugated α's.
pub fn build_a_pq_generalized(pq: &PQParams, g: &GeneratorSet) -> Result<OperatorMatrix> {
    pq.validate()?;
    let left = g.a1_dag.pow(pq.q - 1).matmul(&g.a2)?;
    let right = g.a1.matmul(&g.a2_dag.pow(pq.p - 1))?;
    left.scale(pq.alpha_minus).axpy(pq.alpha_plus, &right)
}

/// (p n₁ + q n₂)/(1 − (p−1)(q−1)).
pub fn alt_hamiltonian(pq: &PQParams, g: &GeneratorSet) -> Result<OperatorMatrix> {
    let den = alt_denominator(pq)?;
    let (p, q) = (pq.pf(), pq.qf());
    Ok(OperatorMatrix::diagonal(g.cutoff, |n1, n2| (p * n1 as f64 + q * n2 as f64) / den))
}

fn alt_denominator(pq: &PQParams) -> Result<f64> {
    pq.validate()?;
    let den = 1 - (pq.p as i64 - 1) * (pq.q as i64 - 1);
    if den == 0 {
        return Err(Error::Domain(format!("1 − (p−1)(q−1) vanishes for {}:{}", pq.p, pq.q)));
    }
    Ok(den as f64)
}

/// pqκ/(1 − (p−1)(q−1)), the alternative-Hamiltonian energy of the κ-th Chen ground.
pub fn alt_energy(pq: &PQParams, kappa: usize) -> Result<f64> {
    Ok(pq.pf() * pq.qf() * kappa as f64 / alt_denominator(pq)?)
}

/// Normalized Σₖ (−1)ᵏ √C(κ,k) √((p(κ−k))!/(κ−k)!) √((qk)!/k!) (α₋/q)ᵏ (α₊/p)^{κ−k} |qk, p(κ−k)⟩,
/// assembled in the log domain.
pub fn chen_ground(pq: &PQParams, kappa: usize, g: &GeneratorSet) -> Result<TwoModeState> {
    pq.validate()?;
    let (p, q) = (pq.p as usize, pq.q as usize);
    let cut = g.cutoff;
    if p * kappa > cut.n2_max || q * kappa > cut.n1_max {
        return Err(Error::CutoffOverflow(format!(
            "Chen ground κ = {kappa} of {p}:{q} needs cutoff ({}, {}), have {cut:?}",
            q * kappa,
            p * kappa
        )));
    }
    let (am, ap) = (pq.alpha_minus / pq.qf(), pq.alpha_plus / pq.pf());
    let terms: Vec<(usize, f64, f64)> = (0..=kappa)
        .filter(|&k| (k == 0 || am != ZERO) && (k == kappa || ap != ZERO))
        .map(|k| {
            let j = kappa - k;
            let mut l = 0.5 * (ln_fact(kappa) - ln_fact(k) - ln_fact(j));
            l += 0.5 * (ln_fact(p * j) - ln_fact(j) + ln_fact(q * k) - ln_fact(k));
            if k > 0 {
                l += k as f64 * am.norm().ln();
            }
            if j > 0 {
                l += j as f64 * ap.norm().ln();
            }
            let phase = k as f64 * (am.arg() + std::f64::consts::PI) + j as f64 * ap.arg();
            (k, l, phase)
        })
        .collect();
    let top = terms
        .iter()
        .map(|t| t.1)
        .fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::Domain("α₊ and α₋ both vanish".into()));
    }
    let mut v = TwoModeState::zeros(cut);
    for (k, l, phase) in terms {
        v.set_amp(q * k, p * (kappa - k), C64::from_polar((l - top).exp(), phase));
    }
    v.normalize()
}

/// normalize((𝒜†)^κ |0,0⟩) by repeated matrix application.
pub fn chen_ground_by_raising(pq: &PQParams, kappa: usize, g: &GeneratorSet) -> Result<TwoModeState> {
    let adag = build_cal_a_pq(pq, g)?.adjoint();
    let mut v = TwoModeState::vacuum(g.cutoff);
    for _ in 0..kappa {
        v = adag.apply(&v)?.normalize()?;
    }
    Ok(v)
}

/// |k₁,k₂⟩ for 0 ≤ k₁ < q, 0 ≤ k₂ < p, in row-major (k₁, k₂) order.
pub fn degenerate_zero_states(pq: &PQParams, g: &GeneratorSet) -> Result<Vec<TwoModeState>> {
    pq.validate()?;
    let mut out = Vec::new();
    for k1 in 0..pq.q as usize {
        for k2 in 0..pq.p as usize {
            out.push(TwoModeState::basis(g.cutoff, k1, k2)?);
        }
    }
    Ok(out)
}

/// n + k₁/q + k₂/p.
pub fn louck_spectrum(pq: &PQParams, n: usize, k1: usize, k2: usize) -> Result<f64> {
    pq.validate()?;
    if k1 >= pq.q as usize || k2 >= pq.p as usize {
        return Err(Error::Domain(format!(
            "need k₁ < {} and k₂ < {}, got ({k1}, {k2})",
            pq.q, pq.p
        )));
    }
    Ok(n as f64 + k1 as f64 / pq.qf() + k2 as f64 / pq.pf())
}

/// Zero-eigenvalue state of 𝒜 built from |0,p⟩ and |q,0⟩; H-eigenvalue 1.
/// Written with α₊*α₋* cleared from the denominators so either α may vanish.
pub fn tilde0_state(pq: &PQParams, g: &GeneratorSet) -> Result<TwoModeState> {
    pq.validate()?;
    let (p, q) = (pq.p as usize, pq.q as usize);
    let mut v = TwoModeState::zeros(g.cutoff);
    let c1 = pq.alpha_minus.conj() * pq.pf() / fact(p).sqrt();
    let c2 = pq.alpha_plus.conj() * pq.qf() / fact(q).sqrt();
    if !g.cutoff.contains(0, p) || !g.cutoff.contains(q, 0) {
        return Err(Error::CutoffOverflow(format!("|0,{p}⟩ and |{q},0⟩ must fit in {:?}", g.cutoff)));
    }
    v.set_amp(0, p, c1);
    v.set_amp(q, 0, c2);
    v.normalize().map_err(|_| Error::Domain("α₊ and α₋ both vanish".into()))
}

/// Raising chain of 𝒜† from |0̃⟩, energies n + 1.
pub fn tilde_chain(pq: &PQParams, n_max: usize, g: &GeneratorSet) -> Result<SpectrumReport> {
    let h = build_h_pq(pq, g)?;
    let a = build_cal_a_pq(pq, g)?;
    let degree = pq.p.max(pq.q) as usize;
    let mut rep = raising_chain(&h, &a, &tilde0_state(pq, g)?, 1, n_max, degree)?;
    rep.family = format!("tilde0-{}:{}", pq.p, pq.q);
    rep.fill_formula(|_, n| Some(n as f64 + 1.0));
    rep.attach_oracle(diagonalize_oracle(&h, degree)?, crate::spectra::MATCH_TOL);
    Ok(rep)
}

/// Raising chains of 𝒜† from the Chen grounds, energies κ + n.
pub fn chen_chains(pq: &PQParams, kappas: &[usize], n_max: usize, g: &GeneratorSet) -> Result<SpectrumReport> {
    let h = build_h_pq(pq, g)?;
    let a = build_cal_a_pq(pq, g)?;
    let degree = pq.p.max(pq.q) as usize;
    let mut rep = SpectrumReport::new(format!("chen-{}:{}", pq.p, pq.q));
    for &kappa in kappas {
        rep.extend(raising_chain(&h, &a, &chen_ground(pq, kappa, g)?, kappa, n_max, degree)?);
    }
    rep.fill_formula(|k, n| Some((k + n) as f64));
    rep.attach_oracle(diagonalize_oracle(&h, degree)?, crate::spectra::MATCH_TOL);
    Ok(rep)
}

/// Orthonormal basis of the Louck level n + k₁/q + k₂/p: the n+1 states
/// (𝒜†)^{n−m}(𝒜'†)^m|k₁,k₂⟩, where 𝒜' takes (α₊, α₋) → (α₋*, −α₊*) so that the
/// two raising operators are linearly independent in a₂†ᵖ and a₁†^q.
pub fn louck_level_basis(pq: &PQParams, k1: usize, k2: usize, n: usize, g: &GeneratorSet) -> Result<Vec<TwoModeState>> {
    louck_spectrum(pq, n, k1, k2)?;
    let other = PQParams { alpha_plus: pq.alpha_minus.conj(), alpha_minus: -pq.alpha_plus.conj(), ..*pq };
    let r1 = build_cal_a_pq(pq, g)?.adjoint();
    let r2 = build_cal_a_pq(&other, g)?.adjoint();
    let seed = TwoModeState::basis(g.cutoff, k1, k2)?;
    let mut basis: Vec<TwoModeState> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut v = seed.clone();
        for _ in 0..m {
            v = r2.apply(&v)?;
        }
        for _ in m..n {
            v = r1.apply(&v)?;
        }
        for b in &basis {
            v = v.axpy(-b.inner(&v)?, b)?;
        }
        if v.norm() < 1e-10 {
            return Err(Error::CutoffOverflow(format!(
                "level n = {n} of sector ({k1}, {k2}) does not fit in {:?}",
                g.cutoff
            )));
        }
        basis.push(v.normalize()?);
    }
    Ok(basis)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    /// Energy times pq.
    pub numerator: u64,
    pub degeneracy: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LouckCheck {
    pub p: u32,
    pub q: u32,
    /// Levels up to this energy are complete inside the cutoff.
    pub e_max: f64,
    pub formula: Vec<LevelCount>,
    pub oracle: Vec<LevelCount>,
    pub matches: bool,
}

fn to_numerator(e: f64, pq: f64) -> Result<u64> {
    let x = e * pq;
    let r = x.round();
    if (x - r).abs() > RATIONAL_TOL * pq.max(1.0) || r < 0.0 {
        return Err(Error::Domain(format!("energy {e} is not a multiple of 1/{pq}")));
    }
    Ok(r as u64)
}

fn count_levels(nums: impl IntoIterator<Item = u64>) -> Vec<LevelCount> {
    let mut map = std::collections::BTreeMap::new();
    for x in nums {
        *map.entry(x).or_insert(0usize) += 1;
    }
    map.into_iter().map(|(numerator, degeneracy)| LevelCount { numerator, degeneracy }).collect()
}

/// Compares the degree-0 oracle spectrum of H₍p,q₎ with the Louck multiset
/// {n + k₁/q + k₂/p, degeneracy n+1} on every level complete inside the cutoff.
pub fn louck_multiset_check(pq: &PQParams, cutoff: FockCutoff) -> Result<LouckCheck> {
    pq.validate()?;
    let g = crate::fock::build_generators(cutoff);
    let (p, q) = (pq.p as usize, pq.q as usize);
    let scale = (p * q) as f64;
    let e_max = (cutoff.n1_max / q).min(cutoff.n2_max / p) as f64;
    let top = (e_max * scale).round() as u64;
    let oracle: Vec<u64> = diagonalize_oracle(&build_h_pq(pq, &g)?, 0)?
        .into_iter()
        .map(|e| to_numerator(e, scale))
        .collect::<Result<Vec<_>>>()?;
    let oracle = count_levels(oracle.into_iter().filter(|&x| x <= top));
    let mut formula = Vec::new();
    for k1 in 0..q {
        for k2 in 0..p {
            for n in 0..=e_max as usize {
                let x = to_numerator(louck_spectrum(pq, n, k1, k2)?, scale)?;
                if x <= top {
                    formula.extend(std::iter::repeat_n(x, n + 1));
                }
            }
        }
    }
    let formula = count_levels(formula);
    let matches = formula == oracle;
    Ok(LouckCheck { p: pq.p, q: pq.q, e_max, formula, oracle, matches })
}

/// Coprime pairs with 1 ≤ p, q ≤ max, in lexicographic order.
pub fn coprime_pairs(max: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for p in 1..=max {
        for q in 1..=max {
            if gcd(p, q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}
