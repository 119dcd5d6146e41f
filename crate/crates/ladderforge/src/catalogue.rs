//! The b² = 1 catalogue of (H, A) pairs: the β± = 0 rows (β₃ = ±1) and the
//! β± ≠ 0 families grouped by how the external couplings line up.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::algebra::{compute_a0, frozen_mode_ladder, Element, HamiltonianParams, LadderCoeffs};
use crate::fock::{C64, ONE, ZERO};

/// Values for every symbolic parameter that appears in a catalogue row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bindings {
    /// β₀ used by the "gen" rows; must avoid ±1 and ±3
    pub beta0_gen: f64,
    /// β₃ for the β± ≠ 0 families, |β₃| < 1
    pub beta3: f64,
    pub theta: f64,
    /// α₊ (β₃ = 1 rows), α₋ (β₃ = −1 rows) or α₃ (β± ≠ 0 rows)
    #[serde(with = "crate::cplx")]
    pub alpha: C64,
    /// the free μ or ν coefficient of a row
    #[serde(with = "crate::cplx")]
    pub free: C64,
    #[serde(with = "crate::cplx")]
    pub gamma1: C64,
    #[serde(with = "crate::cplx")]
    pub gamma2: C64,
}

impl Default for Bindings {
    /// Free parameters default to 1; the couplings and angles get fixed generic values.
    fn default() -> Self {
        Bindings {
            beta0_gen: 0.5,
            beta3: 0.3,
            theta: 0.7,
            alpha: ONE,
            free: ONE,
            gamma1: C64::new(0.4, -0.2),
            gamma2: C64::new(-0.3, 0.5),
        }
    }
}

impl Bindings {
    /// Random bindings with parameters kept away from the resonant values.
    pub fn random(rng: &mut impl Rng) -> Self {
        let cx = |rng: &mut dyn rand::RngCore| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let beta0_gen = loop {
            let x: f64 = rng.random_range(-4.5..4.5);
            if [-3.0, -1.0, 1.0, 3.0].iter().all(|s| (x - s).abs() > 0.25) {
                break x;
            }
        };
        let beta3 = loop {
            let x: f64 = rng.random_range(-0.85..0.85);
            if x.abs() > 0.05 {
                break x;
            }
        };
        Bindings {
            beta0_gen,
            beta3,
            theta: rng.random_range(0.0..TAU),
            alpha: cx(rng),
            free: cx(rng),
            gamma1: cx(rng),
            gamma2: cx(rng),
        }
    }

    pub fn random_set(seed: u64, count: usize) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| Self::random(&mut rng)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogueRow {
    pub label: String,
    pub params: HamiltonianParams,
    pub coeffs: LadderCoeffs,
    pub normalizable: bool,
    /// true for rows beyond the thirty β± = 0 entries (the pure-α operators)
    pub extra: bool,
}

// ---------------------------------------------------------------------------
// β± = 0 rows

#[derive(Clone, Copy)]
enum B0 {
    Fixed(i32),
    Gen,
}

impl B0 {
    fn value(self, b: &Bindings) -> f64 {
        match self {
            B0::Fixed(v) => v as f64,
            B0::Gen => b.beta0_gen,
        }
    }

    fn label(self) -> String {
        match self {
            B0::Fixed(v) => format!("b0={v}"),
            B0::Gen => "b0=gen".into(),
        }
    }
}

/// (μ₁, μ₂, ν₁, ν₂) for one row; `f` is the free coefficient, `a` the free α.
type MuNu = [C64; 4];

fn rows_plus(item: u8, b0: B0, f: C64, a: C64, g1: C64, g2: C64, beta0: f64) -> MuNu {
    let g2c = g2.conj();
    match (item, b0) {
        (1, B0::Fixed(1)) => [f, ZERO, ZERO, ZERO],
        (1, B0::Fixed(3)) => [ZERO, f, ZERO, ZERO],
        (1, B0::Fixed(-1)) => [ZERO, ZERO, ZERO, f],
        (1, B0::Fixed(-3)) => [ZERO, ZERO, f, ZERO],
        (1, B0::Gen) => [ZERO; 4],
        (2, B0::Fixed(1)) => [f, ZERO, ZERO, g1 * a],
        (2, B0::Fixed(3)) => [ZERO, f, ZERO, g1 * a / 2.0],
        (2, B0::Fixed(-3)) => [ZERO, ZERO, f, -g1 * a],
        (2, B0::Gen) => [ZERO, ZERO, ZERO, 2.0 * g1 * a / (1.0 + beta0)],
        (3, B0::Fixed(3)) => [g2c * a, f, ZERO, ZERO],
        (3, B0::Fixed(-1)) => [-g2c * a, ZERO, ZERO, f],
        (3, B0::Fixed(-3)) => [-g2c * a / 2.0, ZERO, f, ZERO],
        (3, B0::Gen) => [2.0 * g2c * a / (beta0 - 1.0), ZERO, ZERO, ZERO],
        (4, B0::Fixed(3)) => [g2c * a, f, ZERO, g1 * a / 2.0],
        (4, B0::Fixed(-3)) => [-g2c * a / 2.0, ZERO, f, -g1 * a],
        (4, B0::Gen) => [2.0 * g2c * a / (beta0 - 1.0), ZERO, ZERO, 2.0 * g1 * a / (1.0 + beta0)],
        _ => unreachable!("no such row"),
    }
}

fn rows_minus(item: u8, b0: B0, f: C64, a: C64, g1: C64, g2: C64, beta0: f64) -> MuNu {
    let g1c = g1.conj();
    match (item, b0) {
        (1, B0::Fixed(1)) => [ZERO, f, ZERO, ZERO],
        (1, B0::Fixed(3)) => [f, ZERO, ZERO, ZERO],
        (1, B0::Fixed(-1)) => [ZERO, ZERO, f, ZERO],
        (1, B0::Fixed(-3)) => [ZERO, ZERO, ZERO, f],
        (1, B0::Gen) => [ZERO; 4],
        (2, B0::Fixed(3)) => [f, g1c * a, ZERO, ZERO],
        (2, B0::Fixed(-1)) => [ZERO, -g1c * a, f, ZERO],
        (2, B0::Fixed(-3)) => [ZERO, -g1c * a / 2.0, ZERO, f],
        (2, B0::Gen) => [ZERO, 2.0 * g1c * a / (beta0 - 1.0), ZERO, ZERO],
        (3, B0::Fixed(1)) => [ZERO, f, g2 * a, ZERO],
        (3, B0::Fixed(3)) => [f, ZERO, g2 * a / 2.0, ZERO],
        (3, B0::Fixed(-3)) => [ZERO, ZERO, -g2 * a, f],
        (3, B0::Gen) => [ZERO, ZERO, 2.0 * g2 * a / (1.0 + beta0), ZERO],
        (4, B0::Fixed(3)) => [f, g1c * a, g2 * a / 2.0, ZERO],
        (4, B0::Fixed(-3)) => [ZERO, -g1c * a / 2.0, -g2 * a, f],
        (4, B0::Gen) => [ZERO, 2.0 * g1c * a / (beta0 - 1.0), 2.0 * g2 * a / (1.0 + beta0), ZERO],
        _ => unreachable!("no such row"),
    }
}

/// Row layout per (β₃ sign, item).
fn a_row_keys(sign: i8) -> Vec<(u8, B0)> {
    use B0::*;
    let (two, three) = if sign > 0 {
        ([Fixed(1), Fixed(3), Fixed(-3), Gen], [Fixed(3), Fixed(-1), Fixed(-3), Gen])
    } else {
        ([Fixed(3), Fixed(-1), Fixed(-3), Gen], [Fixed(1), Fixed(3), Fixed(-3), Gen])
    };
    let mut keys: Vec<(u8, B0)> = [Fixed(1), Fixed(3), Fixed(-1), Fixed(-3)].map(|b| (1, b)).to_vec();
    keys.extend(two.map(|b| (2, b)));
    keys.extend(three.map(|b| (3, b)));
    keys.extend([Fixed(3), Fixed(-3), Gen].map(|b| (4, b)));
    keys
}

/// The thirty β± = 0 rows plus the two pure-α rows (flagged `extra`).
pub fn appendix_a_rows(bd: &Bindings) -> Vec<CatalogueRow> {
    let mut out = Vec::new();
    for sign in [1i8, -1] {
        let mut keys = a_row_keys(sign);
        keys.push((1, B0::Gen));
        for (k, (item, b0)) in keys.into_iter().enumerate() {
            let beta0 = b0.value(bd);
            let (g1, g2) = match item {
                1 => (ZERO, ZERO),
                2 => (bd.gamma1, ZERO),
                3 => (ZERO, bd.gamma2),
                _ => (bd.gamma1, bd.gamma2),
            };
            let p = HamiltonianParams::new(beta0, ZERO, sign as f64).with_gamma(g1, g2);
            let mn = if sign > 0 {
                rows_plus(item, b0, bd.free, bd.alpha, g1, g2, beta0)
            } else {
                rows_minus(item, b0, bd.free, bd.alpha, g1, g2, beta0)
            };
            let mut cf = LadderCoeffs {
                mu1: mn[0],
                mu2: mn[1],
                nu1: mn[2],
                nu2: mn[3],
                ..Default::default()
            };
            if sign > 0 {
                cf.alpha_plus = bd.alpha;
            } else {
                cf.alpha_minus = bd.alpha;
            }
            cf.a0 = compute_a0(&p, &cf);
            out.push(CatalogueRow {
                label: format!("A{}.{item}-{}", if sign > 0 { 1 } else { 2 }, b0.label()),
                normalizable: cf.normalizable() && !frozen_mode_ladder(&p, &cf),
                params: p,
                coeffs: cf,
                extra: k == 15,
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// β± ≠ 0 families

fn su2_part(p: &HamiltonianParams, a3: C64) -> (C64, C64, C64) {
    let b3 = p.beta3;
    (
        -a3 * p.beta_plus / (1.0 - b3),
        a3 * p.beta_minus() / (1.0 + b3),
        a3,
    )
}

struct BTerms {
    mu1: C64,
    mu2: C64,
    nu1: C64,
    nu2: C64,
    a0: C64,
}

impl Default for BTerms {
    fn default() -> Self {
        BTerms { mu1: ZERO, mu2: ZERO, nu1: ZERO, nu2: ZERO, a0: ZERO }
    }
}

fn b_row(label: &str, p: HamiltonianParams, a3: C64, t: BTerms) -> CatalogueRow {
    let (ap, am, a3) = su2_part(&p, a3);
    let cf = LadderCoeffs {
        mu1: t.mu1,
        mu2: t.mu2,
        nu1: t.nu1,
        nu2: t.nu2,
        alpha_plus: ap,
        alpha_minus: am,
        alpha3: a3,
        a0: t.a0,
    };
    CatalogueRow {
        label: label.into(),
        normalizable: cf.normalizable(),
        params: p,
        coeffs: cf,
        extra: false,
    }
}

/// B1–B6 families evaluated at the given bindings, with the displayed constants.
pub fn appendix_b_rows(bd: &Bindings) -> Vec<CatalogueRow> {
    let b3 = bd.beta3;
    let base = |beta0: f64| HamiltonianParams::from_polar(beta0, 1.0, b3, bd.theta);
    let bp = base(0.0).beta_plus;
    let bm = bp.conj();
    let a3 = bd.alpha;
    let (m1, n1) = (bd.free, bd.free);
    let g = bd.beta0_gen;
    let one_m = 1.0 - b3;
    let one_p = 1.0 + b3;
    let d2 = 1.0 - b3 * b3;
    let mut rows = Vec::new();

    rows.push(b_row("B1", base(g), a3, BTerms::default()));
    for b0 in [1.0, 3.0] {
        let t = BTerms { mu1: m1, mu2: m1 * 2.0 * bm / (2.0 - b0 + b3), ..Default::default() };
        rows.push(b_row(&format!("B2-b0={b0}"), base(b0), a3, t));
    }
    for b0 in [-1.0, -3.0] {
        let t = BTerms { nu1: n1, nu2: -n1 * 2.0 * bp / (2.0 + b0 - b3), ..Default::default() };
        rows.push(b_row(&format!("B3-b0={b0}"), base(b0), a3, t));
    }

    // section 4: γ₁ = 2γ₂β₋/(1−β₃)
    let g2 = bd.gamma2;
    let g1 = 2.0 * g2 * bm / one_m;
    let p4 = |b0: f64| base(b0).with_gamma(g1, g2);
    rows.push(b_row(
        "B4-b0=1",
        p4(1.0),
        a3,
        BTerms {
            mu1: m1,
            mu2: m1 * 2.0 * bm / one_p,
            nu1: a3 * g2 * 2.0 * bm / d2,
            nu2: -a3 * g2 / one_m,
            a0: g2 * m1 / bp,
        },
    ));
    rows.push(b_row(
        "B4-b0=3",
        p4(3.0),
        a3,
        BTerms {
            mu1: m1,
            mu2: m1 * 2.0 * bm / (b3 - 1.0),
            nu1: a3 * g2 * bm / d2,
            nu2: -a3 * g2 / (2.0 * one_m),
            a0: ZERO,
        },
    ));
    rows.push(b_row(
        "B4-b0=-3",
        p4(-3.0),
        a3,
        BTerms {
            nu1: n1,
            nu2: 2.0 * (bp * n1 / one_p + g2 * a3 / d2),
            a0: -2.0 * g2.conj() * (2.0 * bp * n1 + g2 * a3) / d2,
            ..Default::default()
        },
    ));
    let k4 = 2.0 * a3 * g2 * (3.0 + g) / (d2 * ((2.0 + g).powi(2) - 1.0));
    rows.push(b_row(
        "B4-b0=gen",
        p4(g),
        a3,
        BTerms { nu1: k4 * 2.0 * bm, nu2: -k4 * one_p, ..Default::default() },
    ));

    // section 5: γ₁ = −2γ₂β₋/(1+β₃)
    let g1 = -2.0 * g2 * bm / one_p;
    let g2c = g2.conj();
    let p5 = |b0: f64| base(b0).with_gamma(g1, g2);
    rows.push(b_row(
        "B5-b0=-1",
        p5(-1.0),
        a3,
        BTerms {
            mu1: a3 * g2c * 2.0 * bp / d2,
            mu2: a3 * g2c / one_p,
            nu1: n1,
            nu2: -n1 * 2.0 * bp / one_m,
            a0: g2c * n1 / bm,
        },
    ));
    rows.push(b_row(
        "B5-b0=-3",
        p5(-3.0),
        a3,
        BTerms {
            mu1: a3 * g2c * bp / d2,
            mu2: a3 * g2c / (2.0 * one_p),
            nu1: n1,
            nu2: n1 * 2.0 * bp / one_p,
            a0: ZERO,
        },
    ));
    rows.push(b_row(
        "B5-b0=3",
        p5(3.0),
        a3,
        BTerms {
            mu1: m1,
            mu2: -2.0 * (bm * m1 / one_m + g2c * a3 / d2),
            a0: -2.0 * g2 * (2.0 * bm * m1 + g2c * a3) / d2,
            ..Default::default()
        },
    ));
    let k5 = 2.0 * a3 * g2c * (3.0 - g) / (d2 * ((2.0 - g).powi(2) - 1.0));
    rows.push(b_row(
        "B5-b0=gen",
        p5(g),
        a3,
        BTerms { mu1: k5 * 2.0 * bp, mu2: k5 * one_m, ..Default::default() },
    ));

    // section 6: generic γ
    let (g1, g2) = (bd.gamma1, bd.gamma2);
    let (g1c, g2c) = (g1.conj(), g2.conj());
    let p6 = |b0: f64| base(b0).with_gamma(g1, g2);
    let u = g2 / 2.0 + g1 * bp / one_m;
    let uc_m = g2c / 2.0 - g1c * bm / one_p;
    let w4 = g1c / 2.0 - g2c * bp / one_m;
    rows.push(b_row(
        "B6-b0=3",
        p6(3.0),
        a3,
        BTerms {
            mu1: m1,
            mu2: a3 / bp * w4 - 2.0 * m1 * bm / one_m,
            nu1: a3 / 2.0 * u * 2.0 * bm / one_p,
            nu2: -a3 / 2.0 * u,
            a0: 2.0 * m1 * (g1 / 2.0 - g2 * bm / one_m) + g2 * a3 / bp * w4 + a3 * u * uc_m,
        },
    ));
    let w5 = g1 / 2.0 + g2 * bm / one_p;
    let v6 = g2 / 2.0 + g1 * bp / one_m;
    rows.push(b_row(
        "B6-b0=-3",
        p6(-3.0),
        a3,
        BTerms {
            mu1: a3 / 2.0 * uc_m * 2.0 * bp / one_m,
            mu2: a3 / 2.0 * uc_m,
            nu1: n1,
            nu2: a3 / bm * w5 + 2.0 * n1 * bp / one_p,
            a0: -2.0 * n1 * (g1c / 2.0 + g2c * bp / one_p) - g2c * a3 / bm * w5 + a3 * uc_m * v6,
        },
    ));
    let cm = 2.0 * a3 / (1.0 - g) * uc_m;
    let cn = 2.0 * a3 / (1.0 + g) * u;
    rows.push(b_row(
        "B6-b0=gen",
        p6(g),
        a3,
        BTerms {
            mu1: cm * 2.0 * bp / one_m,
            mu2: cm,
            nu1: cn * 2.0 * bm / one_p,
            nu2: -cn,
            a0: 8.0 * a3 / (1.0 - g * g) * uc_m * u,
        },
    ));
    rows
}

/// Constant terms as printed for the two rows whose printed constant carries an
/// extra factor β₃ in the free-coefficient term; the rows above use the
/// identity-coefficient balance instead.
pub fn printed_constant(label: &str, bd: &Bindings) -> Option<C64> {
    let b3 = bd.beta3;
    let d2 = 1.0 - b3 * b3;
    let bp = C64::from_polar(0.5 * d2.sqrt(), bd.theta);
    let (a3, f, g2) = (bd.alpha, bd.free, bd.gamma2);
    match label {
        "B4-b0=-3" => Some(-2.0 * g2.conj() * (2.0 * bp * b3 * f + g2 * a3) / d2),
        "B5-b0=3" => Some(2.0 * g2 * (2.0 * bp.conj() * b3 * f - g2.conj() * a3) / d2),
        _ => None,
    }
}

/// Every catalogue row at one binding.
pub fn appendix_catalogue(bd: &Bindings) -> Vec<CatalogueRow> {
    let mut rows = appendix_a_rows(bd);
    rows.extend(appendix_b_rows(bd));
    rows
}

/// Symbolic residual ‖[H,A] + A‖ on the algebra; zero exactly for valid rows.
pub fn symbolic_residual(row: &CatalogueRow) -> f64 {
    let h = Element::hamiltonian(&row.params);
    let a = Element::ladder(&row.coeffs);
    h.commutator(&a).axpy(ONE, &a).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_hamiltonian, build_ladder, classify, verify_ladder, CaseTag};
    use crate::fock::{build_generators, FockCutoff};

    #[test]
    fn thirty_rows_plus_two_extras() {
        let rows = appendix_a_rows(&Bindings::default());
        assert_eq!(rows.iter().filter(|r| !r.extra).count(), 30);
        assert_eq!(rows.iter().filter(|r| r.extra).count(), 2);
        for sign in ["A1.", "A2."] {
            assert_eq!(rows.iter().filter(|r| !r.extra && r.label.starts_with(sign)).count(), 15);
        }
        let mut labels: Vec<_> = rows.iter().map(|r| r.label.clone()).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 32);
    }

    #[test]
    fn named_rows() {
        let bd = Bindings::default();
        let rows = appendix_a_rows(&bd);
        let get = |l: &str| rows.iter().find(|r| r.label == l).unwrap();
        let r = get("A1.1-b0=1");
        assert_eq!(r.coeffs.mu1, bd.free);
        assert_eq!(r.coeffs.alpha_plus, bd.alpha);
        assert!(!r.normalizable);
        let r = get("A1.2-b0=-3");
        assert_eq!(r.coeffs.nu1, bd.free);
        assert_eq!(r.coeffs.nu2, -bd.gamma1 * bd.alpha);
        assert_eq!(r.coeffs.a0, -bd.gamma1.conj() * bd.free);
        assert!(!r.normalizable);
        let r = get("A1.4-b0=3");
        assert_eq!(r.coeffs.mu1, bd.gamma2.conj() * bd.alpha);
        assert_eq!(r.coeffs.nu2, bd.gamma1 * bd.alpha / 2.0);
        assert!(matches!(classify(&r.params), CaseTag::AppendixA(ref s) if s == "A1.4-b0=3"));
    }

    #[test]
    fn printed_constants_fail_and_balance_holds() {
        let bd = Bindings::random_set(5, 1)[0];
        for row in appendix_b_rows(&bd) {
            assert!((row.coeffs.a0 - compute_a0(&row.params, &row.coeffs)).norm() < 1e-10, "{}", row.label);
            if let Some(c) = printed_constant(&row.label, &bd) {
                let mut bad = row.clone();
                bad.coeffs.a0 = c;
                assert!(symbolic_residual(&bad) > 1e-3, "{}", row.label);
            }
        }
    }

    #[test]
    fn every_row_is_a_ladder() {
        let g = build_generators(FockCutoff::square(10));
        let mut sets = vec![Bindings::default()];
        sets.extend(Bindings::random_set(11, 3));
        for bd in &sets {
            for row in appendix_catalogue(bd) {
                let s = symbolic_residual(&row);
                let m = verify_ladder(&build_hamiltonian(&row.params, &g), &build_ladder(&row.coeffs, &g), 3).unwrap();
                assert!(s < 1e-10 && m < 1e-10, "{}: symbolic {s:e}, matrix {m:e}", row.label);
            }
        }
    }

    #[test]
    fn flags_match_constructor_refusals() {
        for r in appendix_catalogue(&Bindings::default()) {
            let frozen = crate::algebra::frozen_mode_ladder(&r.params, &r.coeffs);
            assert_eq!(r.normalizable, r.coeffs.normalizable() && !frozen, "{}", r.label);
        }
    }
}
