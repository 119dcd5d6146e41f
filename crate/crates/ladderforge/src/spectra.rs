//! Raising chains, the normal-ordered expansion of (A†)ⁿ, closed-form spectra
//! and a direct-diagonalization oracle.

use serde::{Deserialize, Serialize};

use crate::algebra::{build_hamiltonian, build_ladder, classify, CaseTag, HamiltonianParams, LadderCoeffs, GATE_TOL};
use crate::eigenstates::{construct, verify_eigenstate, Branch, EigenstateRequest};
use crate::error::{Error, Result};
use crate::fock::{GeneratorSet, OperatorMatrix, TwoModeState, C64, ZERO};
use crate::linalg::hermitian_eigenvalues;
use crate::transforms::{displace_away_linear, reduce_by_similarity};

/// Mass outside the degree-safe interior above which a chain state is not certified.
pub const FRONTIER_TOL: f64 = 1e-10;
/// Tolerance for matching chain energies against oracle eigenvalues.
pub const MATCH_TOL: f64 = 1e-7;

// ---------------------------------------------------------------------------
// normal ordering

/// n!/((n−2k)!·2ᵏ·k!), the weight of (μ₂*α₊*a₁†)ᵏ (A†)ⁿ⁻²ᵏ_◇ in (A†)ⁿ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalOrderCoeff {
    pub n: usize,
    pub k: usize,
    pub value: u128,
}

fn choose(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

/// Closed form: C(n,2k)·(2k−1)!!.
pub fn normal_order_coeffs(n: usize) -> Vec<NormalOrderCoeff> {
    (0..=n / 2)
        .map(|k| {
            let odd: u128 = (1..=k).map(|j| (2 * j - 1) as u128).product();
            NormalOrderCoeff {
                n,
                k,
                value: choose(n, 2 * k) * odd,
            }
        })
        .collect()
}

/// The same numbers from C⁽ⁿ⁾ₙ₋₂ₖ = (n+1−2k)·C⁽ⁿ⁻¹⁾ₙ₋₁₋₂₍ₖ₋₁₎ + C⁽ⁿ⁻¹⁾ₙ₋₁₋₂ₖ, C⁽ⁿ⁾ₙ = 1.
pub fn normal_order_coeffs_recurrence(n: usize) -> Vec<NormalOrderCoeff> {
    let mut row = vec![1u128];
    for m in 1..=n {
        let next = (0..=m / 2)
            .map(|k| {
                let carried = row.get(k).copied().unwrap_or(0);
                if k == 0 {
                    return 1;
                }
                (m + 1 - 2 * k) as u128 * row[k - 1] + carried
            })
            .collect();
        row = next;
    }
    row.into_iter()
        .enumerate()
        .map(|(k, value)| NormalOrderCoeff { n, k, value })
        .collect()
}

/// A† split as Δ₁ + Δ₂ with Δ₁ built from I, a₁†, a₂† and Δ₂ = (α₊*a₁† + ν₂*)a₂.
/// Their commutator [Δ₂, Δ₁] = μ₂*(α₊*a₁† + ν₂*) commutes with both.
pub struct RaisingSplit {
    pub delta1: OperatorMatrix,
    pub delta2: OperatorMatrix,
    pub central: OperatorMatrix,
}

pub fn raising_split(cf: &LadderCoeffs, g: &GeneratorSet) -> Result<RaisingSplit> {
    let stray = cf.nu1.norm() + cf.alpha_minus.norm() + cf.alpha3.norm();
    if stray > GATE_TOL {
        return Err(Error::Domain(
            "normal ordering needs A = μ₁a₁ + μ₂a₂ + ν₂a₂† + α₊J₋ + a₀".into(),
        ));
    }
    let delta1 = g
        .identity
        .scale(cf.a0.conj())
        .axpy(cf.mu1.conj(), &g.a1_dag)?
        .axpy(cf.mu2.conj(), &g.a2_dag)?;
    let shifted = g.a1_dag.scale(cf.alpha_plus.conj()).axpy(cf.nu2.conj(), &g.identity)?;
    let delta2 = shifted.matmul(&g.a2)?;
    let central = shifted.scale(cf.mu2.conj());
    Ok(RaisingSplit { delta1, delta2, central })
}

/// (A†)ᵐ_◇ = Σⱼ C(m,j) Δ₁ʲ Δ₂ᵐ⁻ʲ.
pub fn diamond_power(split: &RaisingSplit, m: usize) -> Result<OperatorMatrix> {
    let cut = split.delta1.cutoff();
    let mut p1 = vec![OperatorMatrix::identity(cut)];
    let mut p2 = vec![OperatorMatrix::identity(cut)];
    for j in 1..=m {
        p1.push(p1[j - 1].matmul(&split.delta1)?);
        p2.push(p2[j - 1].matmul(&split.delta2)?);
    }
    (0..=m).try_fold(OperatorMatrix::zeros(cut), |acc, j| {
        acc.axpy(C64::new(choose(m, j) as f64, 0.0), &p1[j].matmul(&p2[m - j])?)
    })
}

/// (A†)ⁿ = Σₖ n!/((n−2k)!2ᵏk!) · [Δ₂,Δ₁]ᵏ · (A†)ⁿ⁻²ᵏ_◇.
pub fn normal_order_power(cf: &LadderCoeffs, n: usize, g: &GeneratorSet) -> Result<OperatorMatrix> {
    let split = raising_split(cf, g)?;
    let mut out = OperatorMatrix::zeros(g.cutoff);
    let mut central_k = OperatorMatrix::identity(g.cutoff);
    for c in normal_order_coeffs(n) {
        if c.k > 0 {
            central_k = central_k.matmul(&split.central)?;
        }
        let term = central_k.matmul(&diamond_power(&split, n - 2 * c.k)?)?;
        out = out.axpy(C64::new(c.value as f64, 0.0), &term)?;
    }
    Ok(out)
}

/// The 2:1 chain state over |0,0⟩: Σₖ (α₊*/2μ₂*)ᵏ/√((n−2k)!k!) |k,n−2k⟩, normalized.
pub fn basic21_chain_closed(mu2: C64, alpha_plus: C64, n: usize, g: &GeneratorSet) -> Result<TwoModeState> {
    let x = alpha_plus.conj() / (2.0 * mu2.conj());
    let mut v = TwoModeState::zeros(g.cutoff);
    for k in 0..=n / 2 {
        let f = ((1..=n - 2 * k).product::<usize>() as f64 * (1..=k).product::<usize>() as f64).sqrt();
        let amp = x.powu(k as u32) / f;
        if !g.cutoff.contains(k, n - 2 * k) {
            return Err(Error::CutoffOverflow(format!("|{k},{}> outside the cutoff", n - 2 * k)));
        }
        v.set_amp(k, n - 2 * k, amp);
    }
    v.normalize()
}

/// 𝒩₁,ₙ = Σₖ (|α₊|/2|μ₂|)²ᵏ/((n−2k)!k!).
pub fn basic21_chain_norm_closed(mu2: C64, alpha_plus: C64, n: usize) -> f64 {
    let x2 = (alpha_plus.norm() / (2.0 * mu2.norm())).powi(2);
    (0..=n / 2)
        .map(|k| x2.powi(k as i32) / ((1..=n - 2 * k).product::<usize>() as f64 * (1..=k).product::<usize>() as f64))
        .sum()
}

// ---------------------------------------------------------------------------
// chains and reports

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub kappa: usize,
    pub n: usize,
    pub energy_formula: Option<f64>,
    pub energy_chain: f64,
    pub energy_oracle: Option<f64>,
    pub residual: f64,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub family: String,
    pub entries: Vec<SpectrumEntry>,
    pub oracle: Vec<f64>,
    /// (κ, n) pairs where ‖(A†)ⁿ·ground‖ vanished.
    pub collapses: Vec<(usize, usize)>,
    #[serde(skip)]
    pub states: Vec<TwoModeState>,
}

impl SpectrumReport {
    pub fn new(family: impl Into<String>) -> Self {
        Self {
            family: family.into(),
            entries: Vec::new(),
            oracle: Vec::new(),
            collapses: Vec::new(),
            states: Vec::new(),
        }
    }

    pub fn extend(&mut self, other: SpectrumReport) {
        self.entries.extend(other.entries);
        self.collapses.extend(other.collapses);
        self.states.extend(other.states);
    }

    pub fn fill_formula(&mut self, f: impl Fn(usize, usize) -> Option<f64>) {
        for e in &mut self.entries {
            e.energy_formula = f(e.kappa, e.n);
        }
    }

    /// Multiset matching: each certified chain energy claims the nearest unused
    /// oracle eigenvalue within `tol`.
    pub fn attach_oracle(&mut self, oracle: Vec<f64>, tol: f64) {
        let mut used = vec![false; oracle.len()];
        for e in self.entries.iter_mut().filter(|e| !e.truncated) {
            let best = oracle
                .iter()
                .enumerate()
                .filter(|(i, x)| !used[*i] && (*x - e.energy_chain).abs() <= tol)
                .min_by(|a, b| (a.1 - e.energy_chain).abs().total_cmp(&(b.1 - e.energy_chain).abs()));
            if let Some((i, x)) = best {
                used[i] = true;
                e.energy_oracle = Some(*x);
            }
        }
        self.oracle = oracle;
    }

    pub fn certified(&self) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries.iter().filter(|e| !e.truncated)
    }

    /// Largest |formula − oracle| and |chain − formula| over certified entries;
    /// `None` if some certified entry lacks a formula or an oracle match.
    pub fn max_deviation(&self) -> Option<f64> {
        let mut worst = 0.0f64;
        for e in self.certified() {
            let f = e.energy_formula?;
            let o = e.energy_oracle?;
            worst = worst.max((f - o).abs()).max((f - e.energy_chain).abs());
        }
        Some(worst)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.12e}")).unwrap_or_default();
        let mut out = String::from("family,kappa,n,energy_formula,energy_chain,energy_oracle,residual,truncated\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{:.12e},{},{:.3e},{}\n",
                self.family,
                e.kappa,
                e.n,
                opt(e.energy_formula),
                e.energy_chain,
                opt(e.energy_oracle),
                e.residual,
                e.truncated
            ));
        }
        out
    }
}

fn outside_mass(v: &TwoModeState, mask: &[bool]) -> f64 {
    let total = v.norm().powi(2);
    let out: f64 = v
        .amplitudes()
        .iter()
        .zip(mask)
        .filter(|(_, &m)| !m)
        .map(|(a, _)| a.norm_sqr())
        .sum();
    out / total
}

/// vₙ = normalize((A†)ⁿ·ground) for n ≤ n_max, each checked against H with
/// energy E₀ + n. A vanishing step is recorded as a collapse and ends the chain.
pub fn raising_chain(
    h: &OperatorMatrix,
    a: &OperatorMatrix,
    ground: &TwoModeState,
    kappa: usize,
    n_max: usize,
    degree: usize,
) -> Result<SpectrumReport> {
    let adag = a.adjoint();
    let mask = oracle_mask(h, degree)?;
    let mut v = ground.normalize()?;
    let e0 = v.inner(&h.apply(&v)?)?.re;
    let mut rep = SpectrumReport::new("chain");
    for n in 0..=n_max {
        let energy_chain = v.inner(&h.apply(&v)?)?.re;
        let residual = verify_eigenstate(h, &v, C64::new(e0 + n as f64, 0.0), degree)?;
        rep.entries.push(SpectrumEntry {
            kappa,
            n,
            energy_formula: None,
            energy_chain,
            energy_oracle: None,
            residual,
            truncated: outside_mass(&v, &mask) > FRONTIER_TOL,
        });
        rep.states.push(v.clone());
        if n == n_max {
            break;
        }
        let w = adag.apply(&v)?;
        if w.norm() < 1e-12 {
            rep.collapses.push((kappa, n + 1));
            break;
        }
        v = w.normalize()?;
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// closed forms and the oracle

/// Energy of the n-th chain state above the κ-th ground of a family.
pub fn closed_form_spectrum(tag: &CaseTag, p: &HamiltonianParams, kappa: usize, n: usize) -> Result<f64> {
    let (k, m) = (kappa as f64, n as f64);
    match tag {
        CaseTag::FractionalBneq1 => Ok(k * (p.beta0 - 1.0) + m + p.h0),
        CaseTag::IsotropicB0eq2 => Ok(k + m + p.h0),
        CaseTag::Su2PureLadder => {
            if n > kappa {
                return Err(Error::Domain(format!("the su(2) spectrum over κ = {kappa} stops at n = {kappa}")));
            }
            Ok(k * (p.beta0 - 1.0) / 2.0 + m + p.h0)
        }
        CaseTag::Basic21family(_) | CaseTag::Generalized21 { beta0: 3 } | CaseTag::Extended21 { beta0: 3 } => {
            Ok(2.0 * k + m + p.h0)
        }
        CaseTag::LinearCoupledIso | CaseTag::LinearCoupledFractional | CaseTag::AppendixA(_) | CaseTag::AppendixB(_) => {
            let red = displace_away_linear(p, &LadderCoeffs::default())?;
            let rtag = classify(&red.params);
            if &rtag == tag {
                return Err(Error::Domain(format!("{tag:?} does not reduce to a family with a closed spectrum")));
            }
            closed_form_spectrum(&rtag, &red.params, kappa, n)
        }
        other => Err(Error::Domain(format!("no closed-form spectrum for {other:?}"))),
    }
}

/// w₁k₁ + w₂k₂ + h₀' for the oscillator T and D reduce H to.
pub fn transformed_oscillator_level(p: &HamiltonianParams, k1: usize, k2: usize) -> Result<f64> {
    let red = reduce_by_similarity(p, &LadderCoeffs::default(), 1)?;
    let q = red.params;
    let (w1, w2) = ((q.beta0 + q.beta3) / 2.0, (q.beta0 - q.beta3) / 2.0);
    Ok(w1 * k1 as f64 + w2 * k2 as f64 + q.h0)
}

fn conserves_number(h: &OperatorMatrix) -> bool {
    let cut = h.cutoff();
    h.entries().all(|(r, c, _)| {
        let (a, b) = cut.occupation(r);
        let (x, y) = cut.occupation(c);
        a + b == x + y
    })
}

/// Degree-safe subspace for H. Number-conserving, non-diagonal H is restricted
/// to complete total-number blocks so that the truncated spectrum is exact.
pub fn oracle_mask(h: &OperatorMatrix, degree: usize) -> Result<Vec<bool>> {
    let cut = h.cutoff();
    let diagonal = h.entries().all(|(r, c, _)| r == c);
    if !diagonal && conserves_number(h) {
        cut.block_mask(degree)
    } else {
        cut.interior_mask(degree)
    }
}

/// Sorted eigenvalues of H on `oracle_mask`.
pub fn diagonalize_oracle(h: &OperatorMatrix, degree: usize) -> Result<Vec<f64>> {
    hermitian_eigenvalues(h, &oracle_mask(h, degree)?, 1e-10)
}

/// Grounds and chains for every requested κ of a family, with formulas and the
/// oracle attached. For the basic 2:1 family κ = 0 is the vacuum and κ = 1 the
/// branch-2 ground.
pub fn family_spectrum(
    p: &HamiltonianParams,
    cf: &LadderCoeffs,
    kappas: &[usize],
    n_max: usize,
    degree: usize,
    g: &GeneratorSet,
) -> Result<SpectrumReport> {
    let tag = classify(p);
    let h = build_hamiltonian(p, g);
    let a = build_ladder(cf, g);
    let mut rep = SpectrumReport::new(format!("{tag:?}"));
    for &kappa in kappas {
        let req = EigenstateRequest::new(tag.clone(), ZERO, Branch::Kappa).with_kappa(kappa);
        let ground = construct(p, cf, &req, g)?.state;
        rep.extend(raising_chain(&h, &a, &ground, kappa, n_max, degree)?);
    }
    rep.fill_formula(|k, n| closed_form_spectrum(&tag, p, k, n).ok());
    rep.attach_oracle(diagonalize_oracle(&h, degree)?, MATCH_TOL);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{compute_a0, Basic21Variant};
    use crate::fock::{build_generators, FockCutoff, ONE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cx(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn values(c: &[NormalOrderCoeff]) -> Vec<u128> {
        c.iter().map(|x| x.value).collect()
    }

    #[test]
    fn coefficient_rows() {
        assert_eq!(values(&normal_order_coeffs(4)), vec![1, 6, 3]);
        assert_eq!(values(&normal_order_coeffs(5)), vec![1, 10, 15]);
        assert_eq!(values(&normal_order_coeffs(0)), vec![1]);
        for n in 0..=20 {
            assert_eq!(normal_order_coeffs(n), normal_order_coeffs_recurrence(n), "n = {n}");
        }
    }

    #[test]
    fn normal_order_matches_matrix_power() {
        let g = build_generators(FockCutoff::square(16));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let mu2 = cx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let ap = cx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let cf = LadderCoeffs { mu2, alpha_plus: ap, ..Default::default() };
            let adag = build_ladder(&cf, &g).adjoint();
            assert!(normal_order_power(&cf, 1, &g).unwrap().interior_distance(&adag, 2).unwrap() < 1e-12);
            for n in [2, 5, 7] {
                let lhs = normal_order_power(&cf, n, &g).unwrap();
                let rhs = adag.pow(n as u32);
                let scale = 1.0 + rhs.project(&g.cutoff.interior_mask(n + 1).unwrap()).frobenius_norm();
                assert!(lhs.interior_distance(&rhs, n + 1).unwrap() < 1e-8 * scale, "n = {n}");
            }
        }
        // n = 2: (A†)²_◇ + μ₂*α₊*a₁†
        let cf = LadderCoeffs { mu2: cx(0.4, 0.3), alpha_plus: cx(-0.2, 0.9), ..Default::default() };
        let split = raising_split(&cf, &g).unwrap();
        let want = diamond_power(&split, 2)
            .unwrap()
            .axpy(cf.mu2.conj() * cf.alpha_plus.conj(), &g.a1_dag)
            .unwrap();
        assert!(normal_order_power(&cf, 2, &g).unwrap().interior_distance(&want, 3).unwrap() < 1e-12);
    }

    #[test]
    fn shifted_normal_order() {
        let g = build_generators(FockCutoff::square(14));
        let (g1, g2) = (cx(0.3, -0.2), cx(-0.25, 0.15));
        let p = HamiltonianParams::new(3.0, ZERO, 1.0).with_gamma(g1, g2);
        let (mu2, ap) = (cx(0.8, 0.1), cx(0.3, 0.2));
        let cf = LadderCoeffs { mu1: g2.conj() * ap, mu2, nu2: g1 * ap / 2.0, alpha_plus: ap, ..Default::default() };
        let cf = LadderCoeffs { a0: compute_a0(&p, &cf), ..cf };
        let adag = build_ladder(&cf, &g).adjoint();
        for n in [3, 6] {
            let lhs = normal_order_power(&cf, n, &g).unwrap();
            assert!(lhs.interior_distance(&adag.pow(n as u32), n + 1).unwrap() < 1e-8);
        }
        let bad = LadderCoeffs { alpha3: ONE, ..cf };
        assert!(normal_order_power(&bad, 2, &g).is_err());
    }

    #[test]
    fn two_to_one_chains() {
        let g = build_generators(FockCutoff::square(16));
        let p = HamiltonianParams::new(3.0, ZERO, 1.0);
        let (mu2, ap) = (cx(0.9, -0.3), cx(0.5, 0.4));
        let cf = LadderCoeffs { mu2, alpha_plus: ap, ..Default::default() };
        let (h, a) = (build_hamiltonian(&p, &g), build_ladder(&cf, &g));
        let vac = TwoModeState::vacuum(g.cutoff);
        let rep = raising_chain(&h, &a, &vac, 0, 6, 2).unwrap();
        for (e, v) in rep.entries.iter().zip(&rep.states) {
            assert!((e.energy_chain - e.n as f64).abs() < 1e-10);
            assert!(e.residual < 1e-10 && !e.truncated);
            let w = basic21_chain_closed(mu2, ap, e.n, &g).unwrap();
            assert!(v.phase_distance(&w).unwrap() < 1e-12);
            // ‖(A†)ⁿ|0⟩‖² = (n!)²|μ₂|²ⁿ𝒩₁,ₙ
            let raw = a.adjoint().pow(e.n as u32).apply(&vac).unwrap().norm().powi(2);
            let fact = (1..=e.n).product::<usize>() as f64;
            let want = fact * fact * mu2.norm_sqr().powi(e.n as i32) * basic21_chain_norm_closed(mu2, ap, e.n);
            assert!((raw - want).abs() < 1e-10 * want);
        }
        let req = EigenstateRequest::new(CaseTag::Basic21family(Basic21Variant::TwoOne), ZERO, Branch::NonSeparable);
        let ground = construct(&p, &cf, &req, &g).unwrap().state;
        let rep2 = raising_chain(&h, &a, &ground, 1, 5, 2).unwrap();
        for e in &rep2.entries {
            assert!((e.energy_chain - (e.n as f64 + 2.0)).abs() < 1e-10);
            assert!(e.residual < 1e-10);
        }
        // chain states of different energy are orthogonal
        for (x, ex) in rep.states.iter().zip(&rep.entries) {
            for (y, ey) in rep2.states.iter().zip(&rep2.entries) {
                if (ex.energy_chain - ey.energy_chain).abs() > 0.5 {
                    assert!(x.inner(y).unwrap().norm() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn su2_chain_collapses() {
        let g = build_generators(FockCutoff::square(10));
        let p = HamiltonianParams::from_polar(0.0, 1.0, 0.3, 0.9);
        let cf = crate::algebra::bind(&crate::algebra::solve_ladder(&p), &[ONE]);
        let rep = family_spectrum(&p, &cf, &[4], 8, 1, &g).unwrap();
        let energies: Vec<f64> = rep.entries.iter().map(|e| e.energy_chain).collect();
        assert_eq!(energies.len(), 5);
        for (n, e) in energies.iter().enumerate() {
            assert!((e - (-2.0 + n as f64)).abs() < 1e-10);
        }
        assert_eq!(rep.collapses, vec![(4, 5)]);
        assert!(rep.max_deviation().unwrap() < 1e-8);
    }

    #[test]
    fn closed_forms() {
        let p = HamiltonianParams::new(2.5, ZERO, -0.5);
        assert!((closed_form_spectrum(&CaseTag::FractionalBneq1, &p, 2, 3).unwrap() - 6.0).abs() < 1e-15);
        let s = HamiltonianParams::new(0.0, ZERO, 1.0);
        assert!((closed_form_spectrum(&CaseTag::Su2PureLadder, &s, 3, 0).unwrap() + 1.5).abs() < 1e-15);
        assert!(closed_form_spectrum(&CaseTag::Su2PureLadder, &s, 3, 4).is_err());
        let b = HamiltonianParams::new(3.0, ZERO, 1.0);
        assert_eq!(closed_form_spectrum(&CaseTag::Basic21family(Basic21Variant::TwoOne), &b, 0, 0).unwrap(), 0.0);
        let (g1, g2) = (cx(0.3, -0.2), cx(-0.25, 0.15));
        let shifted = b.with_gamma(g1, g2);
        let e = closed_form_spectrum(&classify(&shifted), &shifted, 1, 0).unwrap();
        assert!((e - (2.0 - g1.norm_sqr() / 2.0 - g2.norm_sqr())).abs() < 1e-14);
        assert!(closed_form_spectrum(&CaseTag::NoLadderExists, &b, 0, 0).is_err());
        let q = HamiltonianParams::from_polar(1.4, 0.6, 0.2, 0.5);
        assert!((transformed_oscillator_level(&q, 2, 3).unwrap() - (2.0 * 1.0 + 3.0 * 0.4)).abs() < 1e-12);
    }

    #[test]
    fn oracle_examples() {
        let g = build_generators(FockCutoff::square(2));
        let ev = diagonalize_oracle(&g.n, 0).unwrap();
        let want = [0.0, 0.5, 0.5, 1.0, 1.0, 1.0, 1.5, 1.5, 2.0];
        assert_eq!(ev.len(), want.len());
        assert!(ev.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-12));
        let g = build_generators(FockCutoff::square(8));
        let h = build_hamiltonian(&HamiltonianParams::new(3.0, ZERO, 1.0), &g);
        let ev = diagonalize_oracle(&h, 2).unwrap();
        assert!(ev[..5].iter().zip([0.0, 1.0, 2.0, 2.0, 3.0]).all(|(x, y)| (x - y).abs() < 1e-12));
        // a rotated 2:1 oscillator keeps its spectrum
        let gen = HamiltonianParams::from_polar(3.0, 1.0, 0.4, 1.2);
        let e1 = diagonalize_oracle(&build_hamiltonian(&gen, &g), 0).unwrap();
        let e2 = diagonalize_oracle(&build_hamiltonian(&HamiltonianParams::new(3.0, ZERO, 1.0), &g), 0).unwrap();
        let blocks: Vec<f64> = e2.iter().copied().filter(|&x| x <= 8.0 + 1e-9).collect();
        let e1: Vec<f64> = e1.iter().copied().filter(|&x| x <= 8.0 + 1e-9).collect();
        assert!(!e1.is_empty() && e1.len() <= blocks.len());
        for x in &e1 {
            assert!(blocks.iter().any(|y| (x - y).abs() < 1e-7));
        }
    }

    #[test]
    fn two_to_one_degeneracy_coverage() {
        let g = build_generators(FockCutoff::new(12, 24));
        let p = HamiltonianParams::new(3.0, ZERO, 1.0);
        let cf = LadderCoeffs { mu2: cx(0.8, 0.2), alpha_plus: cx(0.3, -0.4), ..Default::default() };
        let rep = family_spectrum(&p, &cf, &[0, 1, 2, 3, 4], 12, 2, &g).unwrap();
        let top = 9.0;
        let mut chain: Vec<f64> = rep.certified().map(|e| e.energy_chain).filter(|&e| e <= top + 0.5).collect();
        chain.sort_by(f64::total_cmp);
        let oracle: Vec<f64> = rep.oracle.iter().copied().filter(|&e| e <= top + 0.5).collect();
        assert_eq!(chain.len(), oracle.len());
        for (x, y) in chain.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-7);
        }
        assert!(rep.max_deviation().unwrap() < 1e-8);
    }

    #[test]
    fn fractional_family_spectrum() {
        let g = build_generators(FockCutoff::square(12));
        let mut p = HamiltonianParams::new(0.0, cx(0.2, -0.1), 0.3);
        p.beta0 = 2.0 + p.b();
        let cf = crate::eigenstates::fractional_ladder(&p, ONE).unwrap();
        let rep = family_spectrum(&p, &cf, &[0, 1, 2], 5, 1, &g).unwrap();
        assert!(rep.certified().count() > 10);
        assert!(rep.max_deviation().unwrap() < 1e-8);
        let csv = rep.to_csv();
        assert!(csv.starts_with("family,kappa,n,energy_formula"));
        assert_eq!(csv.lines().count(), rep.entries.len() + 1);
        let back: SpectrumReport = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
        assert_eq!(back.entries.len(), rep.entries.len());
        for (x, y) in back.entries.iter().zip(&rep.entries) {
            assert_eq!((x.kappa, x.n), (y.kappa, y.n));
            assert!((x.energy_chain - y.energy_chain).abs() < 1e-12);
        }
    }
}
