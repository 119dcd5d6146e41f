//! Hamiltonian/ladder parameter records, the solvability gates, the linear
//! solver for ladder coefficients and the case classifier.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::{commutator, GeneratorSet, OperatorMatrix, C64, ONE, ZERO};
use crate::linalg::{lstsq, null_space};

/// Relative tolerance for the algebraic gates (b² = 1, (2∓β₀)² = b², …).
pub const GATE_TOL: f64 = 1e-10;
/// Singular-value threshold for null spaces, relative to σ_max.
pub const SVD_TOL: f64 = 1e-11;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub beta0: f64,
    #[serde(with = "crate::cplx")]
    pub beta_plus: C64,
    pub beta3: f64,
    #[serde(with = "crate::cplx", default)]
    pub gamma1: C64,
    #[serde(with = "crate::cplx", default)]
    pub gamma2: C64,
    #[serde(default)]
    pub h0: f64,
}

impl HamiltonianParams {
    pub fn new(beta0: f64, beta_plus: C64, beta3: f64) -> Self {
        Self {
            beta0,
            beta_plus,
            beta3,
            gamma1: ZERO,
            gamma2: ZERO,
            h0: 0.0,
        }
    }

    /// β± = R e^{±iθ} with R = √((b²−β₃²)/4).
    pub fn from_polar(beta0: f64, b: f64, beta3: f64, theta: f64) -> Self {
        let r = ((b * b - beta3 * beta3).max(0.0)).sqrt() / 2.0;
        Self::new(beta0, C64::from_polar(r, theta), beta3)
    }

    pub fn with_gamma(mut self, gamma1: C64, gamma2: C64) -> Self {
        self.gamma1 = gamma1;
        self.gamma2 = gamma2;
        self
    }

    pub fn with_h0(mut self, h0: f64) -> Self {
        self.h0 = h0;
        self
    }

    pub fn beta_minus(&self) -> C64 {
        self.beta_plus.conj()
    }

    pub fn b2(&self) -> f64 {
        su2_invariant(self)
    }

    pub fn b(&self) -> f64 {
        self.b2().sqrt()
    }

    pub fn r(&self) -> f64 {
        self.beta_plus.norm()
    }

    pub fn theta(&self) -> f64 {
        self.beta_plus.arg()
    }

    pub fn has_gamma(&self) -> bool {
        self.gamma1.norm() > GATE_TOL || self.gamma2.norm() > GATE_TOL
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LadderCoeffs {
    #[serde(with = "crate::cplx", default)]
    pub mu1: C64,
    #[serde(with = "crate::cplx", default)]
    pub mu2: C64,
    #[serde(with = "crate::cplx", default)]
    pub nu1: C64,
    #[serde(with = "crate::cplx", default)]
    pub nu2: C64,
    #[serde(with = "crate::cplx", default)]
    pub alpha_plus: C64,
    #[serde(with = "crate::cplx", default)]
    pub alpha_minus: C64,
    #[serde(with = "crate::cplx", default)]
    pub alpha3: C64,
    #[serde(with = "crate::cplx", default)]
    pub a0: C64,
}

impl LadderCoeffs {
    pub fn as_array(&self) -> [C64; 8] {
        [
            self.mu1,
            self.mu2,
            self.nu1,
            self.nu2,
            self.alpha_plus,
            self.alpha_minus,
            self.alpha3,
            self.a0,
        ]
    }

    pub fn from_array(v: [C64; 8]) -> Self {
        Self {
            mu1: v[0],
            mu2: v[1],
            nu1: v[2],
            nu2: v[3],
            alpha_plus: v[4],
            alpha_minus: v[5],
            alpha3: v[6],
            a0: v[7],
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_array(self.as_array().map(|z| z * s))
    }

    pub fn add(&self, o: &Self) -> Self {
        let a = self.as_array();
        let b = o.as_array();
        Self::from_array(std::array::from_fn(|k| a[k] + b[k]))
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn has_mu(&self) -> bool {
        self.mu1.norm() > GATE_TOL || self.mu2.norm() > GATE_TOL
    }

    pub fn has_nu(&self) -> bool {
        self.nu1.norm() > GATE_TOL || self.nu2.norm() > GATE_TOL
    }

    /// ν-type terms without any μ-type term give non-normalizable algebra eigenstates.
    pub fn normalizable(&self) -> bool {
        !(self.has_nu() && !self.has_mu())
    }
}

/// One mode has zero frequency (H = n₁ or n₂ up to h₀) and the ladder carries
/// a J± term with no ν terms: the ladder's eigenstates are not normalizable.
pub fn frozen_mode_ladder(p: &HamiltonianParams, cf: &LadderCoeffs) -> bool {
    const T: f64 = 1e-12;
    let frozen = (p.beta0 - p.beta3).abs() < T || (p.beta0 + p.beta3).abs() < T;
    !p.has_gamma()
        && p.beta_plus.norm() < T
        && p.beta0.abs() > T
        && frozen
        && !cf.has_nu()
        && (cf.alpha_plus.norm() > T || cf.alpha_minus.norm() > T)
}

pub fn su2_invariant(p: &HamiltonianParams) -> f64 {
    4.0 * p.beta_plus.norm_sqr() + p.beta3 * p.beta3
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() < GATE_TOL * 1f64.max(x.abs()).max(y.abs())
}

pub fn alpha_gate(p: &HamiltonianParams) -> bool {
    near(p.b2(), 1.0)
}

pub fn mu_gate(p: &HamiltonianParams) -> bool {
    near((2.0 - p.beta0).powi(2), p.b2())
}

pub fn nu_gate(p: &HamiltonianParams) -> bool {
    near((2.0 + p.beta0).powi(2), p.b2())
}

// ---------------------------------------------------------------------------
// symbolic elements of {h(1)⊕h(1)}⋊u(2)

/// Basis order of [`Element`] coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    A1 = 0,
    A2 = 1,
    A1d = 2,
    A2d = 3,
    Jm = 4,
    Jp = 5,
    J3 = 6,
    I = 7,
    N = 8,
}

pub const GENS: [Gen; 9] = [
    Gen::A1,
    Gen::A2,
    Gen::A1d,
    Gen::A2d,
    Gen::Jm,
    Gen::Jp,
    Gen::J3,
    Gen::I,
    Gen::N,
];

/// Element of the algebra as a coefficient vector over [`GENS`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Element(pub [C64; 9]);

impl Element {
    pub fn zero() -> Self {
        Element([ZERO; 9])
    }

    pub fn single(g: Gen, v: C64) -> Self {
        let mut e = Self::zero();
        e.0[g as usize] = v;
        e
    }

    pub fn hamiltonian(p: &HamiltonianParams) -> Self {
        let mut e = Self::zero();
        e.0[Gen::N as usize] = c(p.beta0);
        e.0[Gen::Jm as usize] = p.beta_plus;
        e.0[Gen::Jp as usize] = p.beta_minus();
        e.0[Gen::J3 as usize] = c(p.beta3);
        e.0[Gen::A1d as usize] = p.gamma1;
        e.0[Gen::A1 as usize] = p.gamma1.conj();
        e.0[Gen::A2d as usize] = p.gamma2;
        e.0[Gen::A2 as usize] = p.gamma2.conj();
        e.0[Gen::I as usize] = c(p.h0);
        e
    }

    pub fn ladder(cf: &LadderCoeffs) -> Self {
        let mut e = Self::zero();
        e.0[..8].copy_from_slice(&cf.as_array());
        e
    }

    pub fn to_coeffs(&self) -> LadderCoeffs {
        LadderCoeffs::from_array(std::array::from_fn(|k| self.0[k]))
    }

    pub fn axpy(&self, s: C64, o: &Self) -> Self {
        Element(std::array::from_fn(|k| self.0[k] + s * o.0[k]))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn commutator(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (i, &x) in GENS.iter().enumerate() {
            if self.0[i] == ZERO {
                continue;
            }
            for (j, &y) in GENS.iter().enumerate() {
                if o.0[j] == ZERO {
                    continue;
                }
                let w = self.0[i] * o.0[j];
                for (g, v) in bracket(x, y) {
                    out.0[g as usize] += w * v;
                }
            }
        }
        out
    }

    pub fn to_matrix(&self, g: &GeneratorSet) -> OperatorMatrix {
        let mats = [&g.a1, &g.a2, &g.a1_dag, &g.a2_dag, &g.jminus, &g.jplus, &g.j3, &g.identity, &g.n];
        let mut out = OperatorMatrix::zeros(g.cutoff);
        for (k, m) in mats.iter().enumerate() {
            if self.0[k] != ZERO {
                out = out.axpy(self.0[k], m).expect("same cutoff");
            }
        }
        out
    }
}

/// Structure constants [x, y] of the two-mode Schwinger algebra.
fn bracket(x: Gen, y: Gen) -> Vec<(Gen, C64)> {
    use Gen::*;
    let h = c(0.5);
    match (x, y) {
        (A1, A1d) | (A2, A2d) => vec![(I, ONE)],
        (N, A1) => vec![(A1, -h)],
        (N, A2) => vec![(A2, -h)],
        (N, A1d) => vec![(A1d, h)],
        (N, A2d) => vec![(A2d, h)],
        (J3, A1) => vec![(A1, -h)],
        (J3, A2) => vec![(A2, h)],
        (J3, A1d) => vec![(A1d, h)],
        (J3, A2d) => vec![(A2d, -h)],
        (Jp, A1) => vec![(A2, -ONE)],
        (Jp, A2d) => vec![(A1d, ONE)],
        (Jm, A2) => vec![(A1, -ONE)],
        (Jm, A1d) => vec![(A2d, ONE)],
        (Jp, Jm) => vec![(J3, c(2.0))],
        (J3, Jp) => vec![(Jp, ONE)],
        (J3, Jm) => vec![(Jm, -ONE)],
        (A1d, A1) | (A2d, A2) | (A1, N) | (A2, N) | (A1d, N) | (A2d, N) | (A1, J3) | (A2, J3)
        | (A1d, J3) | (A2d, J3) | (A1, Jp) | (A2d, Jp) | (A2, Jm) | (A1d, Jm) | (Jm, Jp)
        | (Jp, J3) | (Jm, J3) => bracket(y, x).into_iter().map(|(g, v)| (g, -v)).collect(),
        _ => Vec::new(),
    }
}

/// The linear map (μ₁,μ₂,ν₁,ν₂,α₊,α₋,α₃,a₀) ↦ components of [H,A]+A, as a 9×8 matrix.
pub fn ladder_map(p: &HamiltonianParams) -> DMatrix<C64> {
    let h = Element::hamiltonian(p);
    let mut m = DMatrix::from_element(9, 8, ZERO);
    for k in 0..8 {
        let e = Element::single(GENS[k], ONE);
        let col = h.commutator(&e).axpy(ONE, &e);
        for r in 0..9 {
            m[(r, k)] = col.0[r];
        }
    }
    m
}

/// Basis of the full solution space of [H,A] = −A by brute-force SVD of the 9×8 map.
pub fn full_null_space(p: &HamiltonianParams) -> Vec<LadderCoeffs> {
    let (ns, _) = null_space(&ladder_map(p), SVD_TOL, 0);
    ns.into_iter()
        .map(|v| LadderCoeffs::from_array(std::array::from_fn(|k| v[k])))
        .collect()
}

// ---------------------------------------------------------------------------
// block solvers

/// Coefficient matrix of the α system acting on (α₊, α₋, α₃).
pub fn alpha_matrix(p: &HamiltonianParams) -> DMatrix<C64> {
    let (bp, bm, b3) = (p.beta_plus, p.beta_minus(), p.beta3);
    DMatrix::from_row_slice(
        3,
        3,
        &[
            bm * 2.0,
            -bp * 2.0,
            ONE,
            c(1.0 - b3),
            ZERO,
            bp,
            ZERO,
            c(1.0 + b3),
            -bm,
        ],
    )
}

/// Rescale so the first "free" component (α₃, then α₊, then α₋) equals one.
fn canonical_alpha(v: [C64; 3]) -> [C64; 3] {
    let pivot = [2usize, 0, 1]
        .into_iter()
        .find(|&k| v[k].norm() > 1e-8)
        .expect("nonzero vector");
    let s = ONE / v[pivot];
    let mut out = v.map(|z| z * s);
    for z in out.iter_mut() {
        if z.norm() < 1e-14 {
            *z = ZERO;
        }
    }
    out
}

/// Null space of the α block, empty unless b² = 1. Vectors are (α₊, α₋, α₃).
pub fn solve_alpha_block(p: &HamiltonianParams) -> Vec<[C64; 3]> {
    if !alpha_gate(p) {
        return Vec::new();
    }
    let (ns, _) = null_space(&alpha_matrix(p), SVD_TOL, 1);
    ns.into_iter()
        .map(|v| canonical_alpha([v[0], v[1], v[2]]))
        .collect()
}

pub fn mu_matrix(p: &HamiltonianParams) -> DMatrix<C64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            c(1.0 - (p.beta0 + p.beta3) / 2.0),
            -p.beta_plus,
            -p.beta_minus(),
            c(1.0 - (p.beta0 - p.beta3) / 2.0),
        ],
    )
}

pub fn nu_matrix(p: &HamiltonianParams) -> DMatrix<C64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            c(1.0 + (p.beta0 + p.beta3) / 2.0),
            p.beta_minus(),
            p.beta_plus,
            c(1.0 + (p.beta0 - p.beta3) / 2.0),
        ],
    )
}

/// Right-hand sides of the μ and ν equations for a given α = (α₊, α₋, α₃).
pub fn mu_nu_rhs(p: &HamiltonianParams, alpha: [C64; 3]) -> ([C64; 2], [C64; 2]) {
    let [ap, am, a3] = alpha;
    let (g1, g2) = (p.gamma1, p.gamma2);
    (
        [
            -g1.conj() * a3 / 2.0 - g2.conj() * ap,
            g2.conj() * a3 / 2.0 - g1.conj() * am,
        ],
        [g1 * a3 / 2.0 + g2 * am, -g2 * a3 / 2.0 + g1 * ap],
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuNuSolution {
    /// Null vectors of the μ block, as (μ₁, μ₂).
    pub mu: Vec<[C64; 2]>,
    /// Null vectors of the ν block, as (ν₁, ν₂).
    pub nu: Vec<[C64; 2]>,
    /// Minimum-norm particular solution (μ₁,μ₂,ν₁,ν₂) for the given α, or
    /// `None` when the right-hand side is inconsistent.
    pub particular: Option<[C64; 4]>,
}

fn canonical_pair(v: [C64; 2]) -> [C64; 2] {
    let pivot = if v[0].norm() > 1e-8 { 0 } else { 1 };
    let s = ONE / v[pivot];
    v.map(|z| {
        let w = z * s;
        if w.norm() < 1e-14 {
            ZERO
        } else {
            w
        }
    })
}

fn block_null(m: &DMatrix<C64>, gate: bool) -> Vec<[C64; 2]> {
    if !gate {
        return Vec::new();
    }
    let (ns, _) = null_space(m, 1e-9, 1);
    // both directions when the block vanishes (b = 0 isotropic case)
    if ns.len() == 2 {
        return vec![[ONE, ZERO], [ZERO, ONE]];
    }
    ns.into_iter().map(|v| canonical_pair([v[0], v[1]])).collect()
}

pub fn solve_mu_nu_block(p: &HamiltonianParams, alpha: [C64; 3]) -> MuNuSolution {
    let mu = block_null(&mu_matrix(p), mu_gate(p));
    let nu = block_null(&nu_matrix(p), nu_gate(p));
    let (rm, rn) = mu_nu_rhs(p, alpha);
    let solve = |m: &DMatrix<C64>, r: [C64; 2], singular: bool| -> Option<[C64; 2]> {
        let b = DVector::from_row_slice(&r);
        let tol = if singular { 1e-9 } else { 1e-14 };
        let (x, res) = lstsq(m, &b, tol);
        (res <= 1e-9 * (1.0 + b.norm())).then(|| [x[0], x[1]])
    };
    let particular = match (solve(&mu_matrix(p), rm, !mu.is_empty()), solve(&nu_matrix(p), rn, !nu.is_empty())) {
        (Some(m), Some(n)) => Some([m[0], m[1], n[0], n[1]]),
        _ => None,
    };
    MuNuSolution { mu, nu, particular }
}

pub fn compute_a0(p: &HamiltonianParams, cf: &LadderCoeffs) -> C64 {
    p.gamma1 * cf.mu1 + p.gamma2 * cf.mu2 - p.gamma1.conj() * cf.nu1 - p.gamma2.conj() * cf.nu2
}

// ---------------------------------------------------------------------------
// classification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basic21Variant {
    /// H = 2n₁ + n₂, A = μ₂a₂ + α₊J₋
    TwoOne,
    /// H = n₁ + 2n₂, A = μ₁a₁ + α₋J₊
    OneTwo,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    IsotropicB0eq2,
    FractionalBneq1,
    Su2PureLadder,
    Basic21family(Basic21Variant),
    Extended21 { beta0: i32 },
    Generalized21 { beta0: i32 },
    LinearCoupledIso,
    LinearCoupledB2,
    LinearCoupledFractional,
    AppendixA(String),
    AppendixB(String),
    NoLadderExists,
}

fn special_beta0(b0: f64) -> Option<i32> {
    [1, 3, -1, -3].into_iter().find(|&v| near(b0, v as f64))
}

fn b0_label(b0: f64) -> String {
    match special_beta0(b0) {
        Some(v) => format!("b0={v}"),
        None => "b0=gen".into(),
    }
}

/// Which γ-degeneracy section (4, 5 or 6) a b² = 1, β± ≠ 0 parameter set falls in.
pub fn gamma_section(p: &HamiltonianParams) -> u8 {
    let bm = p.beta_minus();
    let scale = 1.0 + p.gamma1.norm() + p.gamma2.norm();
    let d4 = p.gamma1 / 2.0 - p.gamma2 * bm / (1.0 - p.beta3);
    let d5 = p.gamma1 / 2.0 + p.gamma2 * bm / (1.0 + p.beta3);
    if d4.norm() < GATE_TOL * scale {
        4
    } else if d5.norm() < GATE_TOL * scale {
        5
    } else {
        6
    }
}

/// Deterministic decision tree over (b², β₀, β₃, β±, γ₁, γ₂).
pub fn classify(p: &HamiltonianParams) -> CaseTag {
    let gamma = p.has_gamma();
    if alpha_gate(p) {
        if p.r() < GATE_TOL {
            let sign = if p.beta3 > 0.0 { 1 } else { 2 };
            if !gamma && near(p.beta0, 3.0) {
                return CaseTag::Basic21family(if sign == 1 {
                    Basic21Variant::TwoOne
                } else {
                    Basic21Variant::OneTwo
                });
            }
            let item = match (p.gamma1.norm() > GATE_TOL, p.gamma2.norm() > GATE_TOL) {
                (false, false) => 1,
                (true, false) => 2,
                (false, true) => 3,
                (true, true) => 4,
            };
            return CaseTag::AppendixA(format!("A{sign}.{item}-{}", b0_label(p.beta0)));
        }
        if !gamma {
            return match special_beta0(p.beta0) {
                Some(v @ (1 | 3)) if p.beta3.abs() < GATE_TOL => CaseTag::Extended21 { beta0: v },
                Some(v @ (1 | 3)) => CaseTag::Generalized21 { beta0: v },
                Some(v) => CaseTag::AppendixB(format!("B3-b0={v}")),
                None => CaseTag::Su2PureLadder,
            };
        }
        return CaseTag::AppendixB(format!("B{}-{}", gamma_section(p), b0_label(p.beta0)));
    }
    let (mg, ng) = (mu_gate(p), nu_gate(p));
    if !mg && !ng {
        return CaseTag::NoLadderExists;
    }
    let iso = p.b2() < GATE_TOL && near(p.beta0, 2.0);
    let b2case = near(p.b2(), 4.0) && p.beta0.abs() < GATE_TOL;
    match (gamma, iso, b2case) {
        (_, _, true) => CaseTag::LinearCoupledB2,
        (false, true, _) => CaseTag::IsotropicB0eq2,
        (true, true, _) => CaseTag::LinearCoupledIso,
        (false, _, _) => CaseTag::FractionalBneq1,
        (true, _, _) => CaseTag::LinearCoupledFractional,
    }
}

// ---------------------------------------------------------------------------
// full solve

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub tag: CaseTag,
    pub coeffs: Vec<LadderCoeffs>,
    pub free_parameters: Vec<String>,
    pub normalizable: Vec<bool>,
}

/// Basis of ladder operators for `p`: μ-null directions, ν-null directions,
/// and the α branch with its particular (μ,ν). Every element has a₀ filled in.
pub fn solve_ladder(p: &HamiltonianParams) -> SolveReport {
    let tag = classify(p);
    let mut coeffs = Vec::new();
    let mut names = Vec::new();
    let zero_alpha = [ZERO; 3];
    let base = solve_mu_nu_block(p, zero_alpha);
    for m in &base.mu {
        coeffs.push(LadderCoeffs {
            mu1: m[0],
            mu2: m[1],
            ..Default::default()
        });
        names.push(if m[0] == ONE { "mu1" } else { "mu2" }.to_string());
    }
    for n in &base.nu {
        coeffs.push(LadderCoeffs {
            nu1: n[0],
            nu2: n[1],
            ..Default::default()
        });
        names.push(if n[0] == ONE { "nu1" } else { "nu2" }.to_string());
    }
    for a in solve_alpha_block(p) {
        let sol = solve_mu_nu_block(p, a);
        if let Some(x) = sol.particular {
            coeffs.push(LadderCoeffs {
                mu1: x[0],
                mu2: x[1],
                nu1: x[2],
                nu2: x[3],
                alpha_plus: a[0],
                alpha_minus: a[1],
                alpha3: a[2],
                a0: ZERO,
            });
            names.push(
                if a[2] == ONE {
                    "alpha3"
                } else if a[0] == ONE {
                    "alpha_plus"
                } else {
                    "alpha_minus"
                }
                .to_string(),
            );
        }
    }
    for cf in coeffs.iter_mut() {
        cf.a0 = compute_a0(p, cf);
    }
    let normalizable = coeffs.iter().map(LadderCoeffs::normalizable).collect();
    let tag = if coeffs.is_empty() { CaseTag::NoLadderExists } else { tag };
    SolveReport {
        tag,
        coeffs,
        free_parameters: names,
        normalizable,
    }
}

/// Linear combination of a report's basis with the caller's free-parameter values
/// (missing values default to 1).
pub fn bind(report: &SolveReport, values: &[C64]) -> LadderCoeffs {
    report
        .coeffs
        .iter()
        .enumerate()
        .fold(LadderCoeffs::default(), |acc, (k, cf)| {
            acc.add(&cf.scale(values.get(k).copied().unwrap_or(ONE)))
        })
}

// ---------------------------------------------------------------------------
// matrices

pub fn build_hamiltonian(p: &HamiltonianParams, g: &GeneratorSet) -> OperatorMatrix {
    Element::hamiltonian(p).to_matrix(g)
}

pub fn build_ladder(cf: &LadderCoeffs, g: &GeneratorSet) -> OperatorMatrix {
    Element::ladder(cf).to_matrix(g)
}

/// ‖P([H,A] + A)P‖_F on the degree-d interior.
pub fn verify_ladder(h: &OperatorMatrix, a: &OperatorMatrix, degree: usize) -> Result<f64> {
    let mask = h.cutoff().interior_mask(degree)?;
    Ok(commutator(h, a)?.add(a)?.project(&mask).frobenius_norm())
}

/// Companion relation [H, A†] = A† on the same interior.
pub fn verify_raising(h: &OperatorMatrix, a: &OperatorMatrix, degree: usize) -> Result<f64> {
    let ad = a.adjoint();
    let mask = h.cutoff().interior_mask(degree)?;
    Ok(commutator(h, &ad)?.sub(&ad)?.project(&mask).frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_generators, FockCutoff};

    fn cx(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn invariant_examples() {
        assert_eq!(su2_invariant(&HamiltonianParams::new(0.0, ZERO, 1.0)), 1.0);
        let p = HamiltonianParams::new(0.0, C64::from_polar(0.5, 0.7), 0.0);
        assert!((su2_invariant(&p) - 1.0).abs() < 1e-15);
        assert!((su2_invariant(&HamiltonianParams::new(0.0, c(0.3), 0.8)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_block_examples() {
        assert!(solve_alpha_block(&HamiltonianParams::new(0.0, c(0.3), 0.1)).is_empty());
        let a = solve_alpha_block(&HamiltonianParams::new(0.0, ZERO, 1.0));
        assert_eq!(a, vec![[ONE, ZERO, ZERO]]);
        let p = HamiltonianParams::from_polar(0.3, 1.0, 0.4, 1.2);
        let a = solve_alpha_block(&p);
        assert_eq!(a.len(), 1);
        let [ap, am, a3] = a[0];
        assert!((ap - (-p.beta_plus * a3 / (1.0 - p.beta3))).norm() < 1e-12);
        assert!((am - (p.beta_minus() * a3 / (1.0 + p.beta3))).norm() < 1e-12);
    }

    #[test]
    fn mu_nu_examples() {
        // β±=0, β₀ = 2+β₃: μ₂ free, μ₁ = 0
        let p = HamiltonianParams::new(2.7, ZERO, 0.7);
        let s = solve_mu_nu_block(&p, [ZERO; 3]);
        assert_eq!(s.mu, vec![[ZERO, ONE]]);
        assert!(s.nu.is_empty());
        // isotropic: both μ free
        let s = solve_mu_nu_block(&HamiltonianParams::new(2.0, ZERO, 0.0), [ZERO; 3]);
        assert_eq!(s.mu.len(), 2);
        // A-17 parameters
        let (g1, g2) = (cx(0.4, -0.2), cx(-0.3, 0.5));
        let p = HamiltonianParams::new(3.0, ZERO, 1.0).with_gamma(g1, g2);
        let s = solve_mu_nu_block(&p, [ONE, ZERO, ZERO]);
        let x = s.particular.unwrap();
        assert!((x[0] - g2.conj()).norm() < 1e-12);
        assert!((x[3] - g1 / 2.0).norm() < 1e-12);
        assert_eq!(s.mu, vec![[ZERO, ONE]]);
    }

    #[test]
    fn fractional_relation() {
        let p = HamiltonianParams::from_polar(0.5, 1.5, 0.4, 0.9);
        let s = solve_mu_nu_block(&p, [ZERO; 3]);
        assert_eq!(s.mu.len(), 1);
        let want = 2.0 * p.beta_minus() / (2.0 - p.beta0 + p.beta3);
        assert!((s.mu[0][1] - want).norm() < 1e-12);
    }

    #[test]
    fn a0_examples() {
        let p = HamiltonianParams::new(2.0, ZERO, 0.0);
        assert_eq!(compute_a0(&p, &LadderCoeffs { mu1: ONE, ..Default::default() }), ZERO);
        let p = p.with_gamma(ONE, ZERO);
        let cf = LadderCoeffs { nu1: c(2.0), ..Default::default() };
        assert_eq!(compute_a0(&p, &cf), c(-2.0));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&HamiltonianParams::new(2.0, ZERO, 0.0)), CaseTag::IsotropicB0eq2);
        assert_eq!(classify(&HamiltonianParams::from_polar(2.5, 1.0, 0.3, 0.2)), CaseTag::Su2PureLadder);
        let p = HamiltonianParams::new(3.0, ZERO, 1.0).with_gamma(cx(0.1, 0.0), cx(0.0, 0.2));
        assert_eq!(classify(&p), CaseTag::AppendixA("A1.4-b0=3".into()));
        let p = HamiltonianParams::from_polar(7.0, 0.5f64.sqrt(), 0.0, 0.0);
        assert_eq!(classify(&p), CaseTag::NoLadderExists);
        assert_eq!(solve_ladder(&p).coeffs.len(), 0);
    }

    #[test]
    fn hamiltonian_examples() {
        let g = build_generators(FockCutoff::square(4));
        let h = build_hamiltonian(&HamiltonianParams::new(3.0, ZERO, 1.0), &g);
        for i in 0..g.cutoff.dim() {
            let (a, b) = g.cutoff.occupation(i);
            assert!((h.get(i, i) - c((2 * a + b) as f64)).norm() < 1e-14);
        }
        assert_eq!(h.nnz(), g.cutoff.dim() - 1);
        let h = build_hamiltonian(&HamiltonianParams::new(0.0, ZERO, 2.0), &g);
        assert!(h.sub(&g.j3.scale_re(2.0)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn verify_examples() {
        let g = build_generators(FockCutoff::square(6));
        let h = g.n.clone();
        let r = verify_ladder(&h, &g.a1, 1).unwrap();
        let mask = g.cutoff.interior_mask(1).unwrap();
        assert!((r - g.a1.project(&mask).frobenius_norm() / 2.0).abs() < 1e-12);
        assert_eq!(verify_ladder(&h, &OperatorMatrix::zeros(g.cutoff), 1).unwrap(), 0.0);
    }

    #[test]
    fn symbolic_bracket_matches_matrices() {
        let g = build_generators(FockCutoff::square(7));
        let mask = g.cutoff.interior_mask(2).unwrap();
        for &x in &GENS {
            for &y in &GENS {
                let ex = Element::single(x, ONE);
                let ey = Element::single(y, ONE);
                let sym = ex.commutator(&ey).to_matrix(&g);
                let num = commutator(&ex.to_matrix(&g), &ey.to_matrix(&g)).unwrap();
                let d = sym.sub(&num).unwrap().project(&mask).frobenius_norm();
                assert!(d < 1e-12, "[{x:?},{y:?}] off by {d}");
            }
        }
    }
}
