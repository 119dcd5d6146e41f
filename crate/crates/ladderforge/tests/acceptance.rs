//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines print in order; exits non-zero if any criterion fails.

use std::process::Command;
use std::time::Instant;

use ladderforge::algebra::{
    alpha_gate, bind, build_hamiltonian, build_ladder, classify, ladder_map, mu_gate, solve_ladder, verify_ladder,
    CaseTag, HamiltonianParams, LadderCoeffs,
};
use ladderforge::catalogue::{appendix_catalogue, Bindings};
use ladderforge::chen::{build_h_pq, chen_ground, coprime_pairs, louck_multiset_check, PQParams};
use ladderforge::eigenstates::{construct, fractional_ladder, verify_eigenstate, Branch, EigenstateRequest};
use ladderforge::fock::{algebra_relations, build_generators, FockCutoff, GeneratorSet, C64, ONE, ZERO};
use ladderforge::spectra::{
    family_spectrum, normal_order_coeffs, normal_order_coeffs_recurrence, normal_order_power,
    SpectrumReport,
};
use ladderforge::transforms::{reduce_by_similarity, verify_reduction};
use ladderforge::Error;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rand_cx(rng: &mut impl Rng, r: f64) -> C64 {
    cx(rng.random_range(-r..r), rng.random_range(-r..r))
}

// 1 -----------------------------------------------------------------------

fn algebra_suite() -> Outcome {
    let g = build_generators(FockCutoff::square(14));
    let rel = algebra_relations(&g, 2).expect("relations");
    let worst = rel.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)).unwrap();
    outcome(
        worst.residual < 1e-12,
        format!("{} relations, worst {} = {:.2e} (tol 1e-12)", rel.len(), worst.relation, worst.residual),
    )
}

// 2 -----------------------------------------------------------------------

/// Null space of the symbolic ladder map by SVD, split into whether some
/// solution carries α terms and whether some solution carries μ terms.
fn null_space_support(p: &HamiltonianParams) -> (bool, bool) {
    let m: DMatrix<C64> = ladder_map(p);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("v_t");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut has_alpha = false;
    let mut has_mu = false;
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s > 1e-9 * smax {
            continue;
        }
        let v: Vec<C64> = vt.row(k).iter().map(|z| z.conj()).collect();
        // coefficient order: μ₁ μ₂ ν₁ ν₂ α₊ α₋ α₃ a₀
        has_mu |= v[0].norm() + v[1].norm() > 1e-6;
        has_alpha |= v[4].norm() + v[5].norm() + v[6].norm() > 1e-6;
    }
    // nullity from the 8 columns beyond the 8 singular values of a 9×8 map is zero
    (has_alpha, has_mu)
}

fn random_draw(rng: &mut impl Rng, kind: u32) -> HamiltonianParams {
    let theta = rng.random_range(-3.0..3.0);
    let beta0: f64 = rng.random_range(-4.0..4.0);
    let b: f64 = match kind {
        0 => rng.random_range(0.05..2.5),
        1 => 1.0,
        2 => (2.0 - beta0).abs(),
        _ => 1.0 + [1e-6, -1e-6, 1e-7][rng.random_range(0..3)],
    };
    let beta0 = if kind == 4 { [1.0, 3.0][rng.random_range(0..2)] } else { beta0 };
    let b = if kind == 4 { 1.0 } else { b };
    let beta3 = b * rng.random_range(-1.0..1.0);
    HamiltonianParams::from_polar(beta0, b, beta3, theta)
}

fn gate_reproduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = Vec::new();
    let (mut n_alpha, mut n_mu) = (0, 0);
    for i in 0..1000 {
        let p = random_draw(&mut rng, i % 5);
        let want_alpha = (p.b2() - 1.0).abs() < 1e-10;
        let want_mu = ((2.0 - p.beta0).powi(2) - p.b2()).abs() < 1e-10;
        let (svd_alpha, svd_mu) = null_space_support(&p);
        let report = solve_ladder(&p);
        let solver_alpha = report
            .coeffs
            .iter()
            .any(|c| c.alpha_plus.norm() + c.alpha_minus.norm() + c.alpha3.norm() > 1e-12);
        let solver_mu = report.coeffs.iter().any(|c| c.mu1.norm() + c.mu2.norm() > 1e-12);
        n_alpha += want_alpha as usize;
        n_mu += want_mu as usize;
        let row = [
            (want_alpha, svd_alpha, solver_alpha, alpha_gate(&p)),
            (want_mu, svd_mu, solver_mu, mu_gate(&p)),
        ];
        for (name, (w, s, v, gate)) in ["alpha", "mu"].into_iter().zip(row) {
            // with α present the μ block is driven by α, so the μ oracle is only
            // read for draws without an α solution
            if name == "mu" && want_alpha {
                continue;
            }
            if !(w == s && w == v && w == gate) {
                mismatches.push(format!("draw {i} {name}: gate {w} svd {s} solver {v}"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "1000 draws ({n_alpha} on the α gate, {n_mu} on the μ gate), {} mismatches{}",
            mismatches.len(),
            mismatches.first().map(|m| format!(", first: {m}")).unwrap_or_default()
        ),
    )
}

// 3 -----------------------------------------------------------------------

fn solver_cases(rng: &mut impl Rng) -> Vec<HamiltonianParams> {
    let mut out = vec![
        HamiltonianParams::new(2.0, ZERO, 0.0),
        HamiltonianParams::new(2.0, ZERO, 0.0).with_gamma(cx(0.3, -0.2), cx(-0.1, 0.4)),
        HamiltonianParams::new(3.0, ZERO, 1.0),
        HamiltonianParams::new(3.0, ZERO, -1.0),
        HamiltonianParams::from_polar(3.0, 1.0, 0.35, 1.1),
        HamiltonianParams::from_polar(1.0, 1.0, 0.0, 0.4),
        HamiltonianParams::from_polar(3.0, 1.0, 0.0, -0.7),
        HamiltonianParams::from_polar(0.7, 1.0, -0.2, 2.0),
        HamiltonianParams::from_polar(3.0, 1.0, 0.35, 1.1).with_gamma(cx(0.2, -0.1), cx(-0.15, 0.1)),
        HamiltonianParams::from_polar(0.0, 2.0, 0.5, -0.6),
        HamiltonianParams::from_polar(0.0, 2.0, -0.8, 0.4).with_gamma(cx(0.3, 0.1), cx(0.0, -0.2)),
        HamiltonianParams::from_polar(2.5, 0.5, 0.2, 0.3),
        HamiltonianParams::from_polar(2.5, 0.5, 0.2, 0.3).with_gamma(cx(0.1, 0.1), cx(0.2, 0.0)),
    ];
    for i in 0..40 {
        out.push(random_draw(rng, 1 + i % 2));
    }
    out
}

fn ladder_residuals() -> Outcome {
    let g = build_generators(FockCutoff::square(14));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = (0.0, String::new());
    let mut pairs = 0;
    let mut record = |r: f64, label: String| {
        if r > worst.0 || r.is_nan() {
            worst = (r, label);
        }
    };
    for p in solver_cases(&mut rng) {
        let rep = solve_ladder(&p);
        if rep.tag == CaseTag::NoLadderExists {
            continue;
        }
        let h = build_hamiltonian(&p, &g);
        let free: Vec<C64> = (0..rep.coeffs.len()).map(|_| rand_cx(&mut rng, 1.0)).collect();
        for cf in rep.coeffs.iter().cloned().chain([bind(&rep, &free)]) {
            record(verify_ladder(&h, &build_ladder(&cf, &g), 3).unwrap(), format!("solver {:?}", rep.tag));
            pairs += 1;
        }
    }
    let mut sets = vec![Bindings::default()];
    sets.extend(Bindings::random_set(31, 5));
    let mut rows = 0;
    for bd in &sets {
        for row in appendix_catalogue(bd) {
            let h = build_hamiltonian(&row.params, &g);
            record(verify_ladder(&h, &build_ladder(&row.coeffs, &g), 3).unwrap(), row.label.clone());
            rows += 1;
        }
    }
    outcome(
        worst.0 < 1e-10,
        format!("{pairs} solver pairs and {rows} catalogue rows over 6 bindings, worst {:.2e} at {} (tol 1e-10)", worst.0, worst.1),
    )
}

// 4 -----------------------------------------------------------------------

fn normal_ordering() -> Outcome {
    let rows_ok = (0..=10).all(|n| normal_order_coeffs(n) == normal_order_coeffs_recurrence(n));
    let vals = |n| normal_order_coeffs(n).iter().map(|c| c.value).collect::<Vec<_>>();
    let printed = vals(4) == [1, 6, 3] && vals(5) == [1, 10, 15];
    let g = build_generators(FockCutoff::square(14));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let cf = LadderCoeffs { mu2: rand_cx(&mut rng, 1.0), alpha_plus: rand_cx(&mut rng, 1.0), ..Default::default() };
        let n = 2 + i % 5;
        let lhs = normal_order_power(&cf, n, &g).unwrap();
        let rhs = build_ladder(&cf, &g).adjoint().pow(n as u32);
        worst = worst.max(lhs.interior_distance(&rhs, n + 1).unwrap());
    }
    outcome(
        rows_ok && printed && worst < 1e-8,
        format!(
            "closed form = recurrence for n ≤ 10: {rows_ok}; rows n=4,5 reproduced: {printed}; 50 draws worst {worst:.2e} (tol 1e-8)"
        ),
    )
}

// 5 -----------------------------------------------------------------------

/// Worst |chain − formula| and |chain − oracle| over certified entries.
fn spectrum_gaps(rep: &SpectrumReport) -> (usize, f64, f64, bool) {
    let mut n = 0;
    let (mut df, mut dor) = (0.0f64, 0.0f64);
    let mut complete = true;
    for e in rep.certified() {
        n += 1;
        match (e.energy_formula, e.energy_oracle) {
            (Some(f), Some(o)) => {
                df = df.max((f - e.energy_chain).abs());
                dor = dor.max((o - e.energy_chain).abs());
            }
            _ => complete = false,
        }
    }
    (n, df, dor, complete)
}

fn spectra() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut check = |name: String, rep: SpectrumReport, extra: bool| {
        let (n, df, dor, complete) = spectrum_gaps(&rep);
        let ok = n > 0 && complete && df < 1e-8 && dor < 1e-8 && extra;
        pass &= ok;
        lines.push(format!("{name}: {n} levels, formula {df:.1e}, oracle {dor:.1e}{}", if ok { "" } else { " FAIL" }));
    };
    let g = build_generators(FockCutoff::square(14));
    for beta0 in [0.5f64, 2.5, 7.0 / 3.0] {
        let b = (2.0 - beta0).abs();
        let p = HamiltonianParams::from_polar(beta0, b, 0.3 * b, 0.7);
        let cf = fractional_ladder(&p, ONE).unwrap();
        let rep = family_spectrum(&p, &cf, &[0, 1, 2, 3], 5, 2, &g).unwrap();
        check(format!("fractional β₀={beta0:.3}"), rep, true);
    }
    let g21 = build_generators(FockCutoff::new(12, 24));
    for p in [
        HamiltonianParams::new(3.0, ZERO, 1.0),
        HamiltonianParams::new(3.0, ZERO, -1.0),
        HamiltonianParams::from_polar(3.0, 1.0, 0.35, 1.1),
    ] {
        let g = if p.beta3 < 0.0 { build_generators(FockCutoff::new(24, 12)) } else { g21.clone() };
        let cf = bind(&solve_ladder(&p), &[cx(0.8, 0.2), cx(0.3, -0.4), ONE]);
        let rep = family_spectrum(&p, &cf, &[0, 1, 2, 3], 6, 2, &g).unwrap();
        check(format!("2:1 {:?}", classify(&p)), rep, true);
    }
    let gs = build_generators(FockCutoff::square(12));
    for kappa in 0..=5 {
        let p = HamiltonianParams::from_polar(0.0, 1.0, 0.4, -0.9);
        let cf = bind(&solve_ladder(&p), &[ONE]);
        let rep = family_spectrum(&p, &cf, &[kappa], kappa + 3, 2, &gs).unwrap();
        let stops = rep.entries.len() == kappa + 1 && rep.collapses == vec![(kappa, kappa + 1)];
        check(format!("su(2) κ={kappa}"), rep, stops);
    }
    outcome(pass, lines.join("; "))
}

// 6 -----------------------------------------------------------------------

fn similarity_reductions() -> Outcome {
    let g = build_generators(FockCutoff::square(14));
    let cases = [
        (HamiltonianParams::from_polar(2.5, 0.5, 0.2, 0.3), 1),
        (HamiltonianParams::from_polar(2.5, 0.5, 0.2, 0.3), -1),
        (HamiltonianParams::from_polar(3.0, 1.0, 0.35, 1.1), 1),
        (HamiltonianParams::from_polar(3.0, 1.0, -0.6, -2.0), -1),
        (HamiltonianParams::from_polar(4.0, 1.3, -0.6, 2.0), 1),
        (HamiltonianParams::from_polar(1.5, 0.7, 0.0, 0.9), 1),
        (HamiltonianParams::new(2.0, ZERO, 0.0).with_gamma(cx(0.3, -0.2), cx(-0.1, 0.4)), 1),
        (HamiltonianParams::from_polar(3.0, 1.0, 0.35, 1.1).with_gamma(cx(0.2, -0.1), cx(-0.15, 0.1)), 1),
        (HamiltonianParams::from_polar(2.5, 0.5, 0.2, 0.3).with_gamma(cx(0.1, 0.1), cx(0.2, 0.0)), 1),
        (HamiltonianParams::new(3.0, ZERO, 1.0).with_gamma(cx(0.3, -0.2), cx(-0.25, 0.15)), 1),
    ];
    let (mut wh, mut wa, mut ws) = (0.0f64, 0.0f64, 0.0f64);
    let mut with_spec = 0;
    let mut closed = true;
    for (p, eps) in &cases {
        let rep = solve_ladder(p);
        let cf = if rep.tag == CaseTag::NoLadderExists { LadderCoeffs::default() } else { bind(&rep, &[]) };
        let red = reduce_by_similarity(p, &cf, *eps).unwrap();
        // closed form of the reduced quadratic part: β₀N + εbJ₃ with β± = 0
        let q = &red.params;
        let b = p.b();
        let want_b3 = if b > 1e-10 { *eps as f64 * b } else { p.beta3 };
        closed &= (q.beta0 - p.beta0).abs() < 1e-12 && (q.beta3 - want_b3).abs() < 1e-12 && q.beta_plus.norm() < 1e-12;
        let chk = verify_reduction(p, &cf, &red, 8, &g).unwrap();
        wh = wh.max(chk.h_residual);
        wa = wa.max(chk.a_residual);
        if let Some(d) = chk.spectrum_deviation {
            ws = ws.max(d);
            with_spec += 1;
        }
    }
    outcome(
        closed && wh < 1e-8 && wa < 1e-8 && ws < 1e-7 && with_spec >= 5,
        format!(
            "{} reductions: reduced form closed {closed}; worst H {wh:.1e}, A {wa:.1e} (tol 1e-8); spectrum {ws:.1e} over {with_spec} cases (tol 1e-7)",
            cases.len()
        ),
    )
}

// 7 -----------------------------------------------------------------------

fn eigenstate_cases() -> Vec<(String, HamiltonianParams, LadderCoeffs, Vec<(Branch, usize)>)> {
    use Branch::*;
    let all = |k: usize| -> Vec<(Branch, usize)> {
        let mut v = vec![(Separable, 0), (NonSeparable, 1)];
        v.extend((0..=k).map(|x| (Kappa, x)));
        v
    };
    let kappas = |k: usize| -> Vec<(Branch, usize)> { (0..=k).map(|x| (Kappa, x)).collect() };
    let with_sep = |k: usize| -> Vec<(Branch, usize)> {
        let mut v = vec![(Separable, 0)];
        v.extend(kappas(k));
        v
    };
    let mut out = Vec::new();
    for below in [true, false] {
        let mut p = HamiltonianParams::new(0.0, cx(0.25, -0.1), 0.3);
        p.beta0 = if below { 2.0 - p.b() } else { 2.0 + p.b() };
        let cf = fractional_ladder(&p, cx(1.1, 0.2)).unwrap();
        out.push((format!("fractional β₀={:.3}", p.beta0), p, cf, with_sep(3)));
    }
    let iso = HamiltonianParams::new(2.0, ZERO, 0.0);
    out.push(("isotropic".into(), iso, LadderCoeffs { mu1: cx(0.8, 0.3), mu2: cx(-0.4, 0.6), ..Default::default() }, with_sep(3)));
    for p in [HamiltonianParams::new(3.0, ZERO, 1.0), HamiltonianParams::new(3.0, ZERO, -1.0)] {
        let cf = bind(&solve_ladder(&p), &[cx(0.9, 0.2), cx(0.4, -0.3)]);
        out.push((format!("{:?}", classify(&p)), p, cf, all(3)));
    }
    let gen = HamiltonianParams::from_polar(3.0, 1.0, 0.35, 1.1);
    out.push(("generalized 2:1".into(), gen, bind(&solve_ladder(&gen), &[cx(0.9, 0.1), ONE]), all(2)));
    let su2 = HamiltonianParams::from_polar(0.7, 1.0, -0.4, -2.0);
    out.push(("su(2)".into(), su2, bind(&solve_ladder(&su2), &[ONE]), kappas(4)));
    let b2 = HamiltonianParams::from_polar(0.0, 2.0, 0.5, -0.6);
    let b2_cf = |p: &HamiltonianParams, mu1: C64, nu1: C64| {
        let cf = LadderCoeffs {
            mu1,
            mu2: 2.0 * p.beta_minus() * mu1 / (2.0 + p.beta3),
            nu1,
            nu2: -2.0 * p.beta_plus * nu1 / (2.0 - p.beta3),
            ..Default::default()
        };
        LadderCoeffs { a0: ladderforge::algebra::compute_a0(p, &cf), ..cf }
    };
    out.push(("b=2".into(), b2, b2_cf(&b2, cx(1.0, 0.2), cx(0.12, -0.1)), vec![(Separable, 0), (NonSeparable, 1)]));
    let (g1, g2) = (cx(0.3, -0.2), cx(-0.25, 0.15));
    let lin21 = HamiltonianParams::new(3.0, ZERO, 1.0).with_gamma(g1, g2);
    out.push(("2:1 with γ".into(), lin21, bind(&solve_ladder(&lin21), &[cx(0.8, 0.1), cx(0.3, 0.2)]), all(2)));
    let lin_iso = HamiltonianParams::new(2.0, ZERO, 0.0).with_gamma(g1, g2);
    let cf = LadderCoeffs { mu1: cx(0.7, 0.1), mu2: cx(0.2, -0.5), ..Default::default() };
    let cf = LadderCoeffs { a0: ladderforge::algebra::compute_a0(&lin_iso, &cf), ..cf };
    out.push(("isotropic with γ".into(), lin_iso, cf, with_sep(2)));
    let lin_b2 = HamiltonianParams::from_polar(0.0, 2.0, -0.8, 0.4).with_gamma(g1, g2);
    out.push(("b=2 with γ".into(), lin_b2, b2_cf(&lin_b2, ONE, cx(0.2, 0.1)), vec![(Separable, 0), (NonSeparable, 1)]));
    out
}

fn eigenstate_residuals() -> Outcome {
    let g: GeneratorSet = build_generators(FockCutoff::square(20));
    let lambdas = [ZERO, cx(0.7, 0.3), cx(-1.2, 0.9), cx(2.0, 0.0), cx(-1.4, -1.4)];
    let (mut worst_a, mut worst_h) = (0.0f64, 0.0f64);
    let (mut built, mut energies) = (0, 0);
    // squeeze outside the unit disk, λ ≠ 0 for a nilpotent ladder, tail beyond the cutoff
    let mut refused = [0usize; 3];
    let mut errors = Vec::new();
    let mut worst_label = String::new();
    for (name, p, cf, branches) in eigenstate_cases() {
        let tag = classify(&p);
        let a = build_ladder(&cf, &g);
        let h = build_hamiltonian(&p, &g);
        for (branch, kappa) in branches {
            for lam in lambdas {
                let req = EigenstateRequest::new(tag.clone(), lam, branch).with_kappa(kappa);
                match construct(&p, &cf, &req, &g) {
                    Ok(c) => {
                        built += 1;
                        let r = verify_eigenstate(&a, &c.state, lam, 2).unwrap();
                        if r > worst_a {
                            worst_a = r;
                            worst_label = format!("{name} {branch:?} κ={kappa} λ={lam}");
                        }
                        if let (true, Some(e)) = (lam == ZERO, c.expected_energy) {
                            energies += 1;
                            worst_h = worst_h.max(verify_eigenstate(&h, &c.state, C64::new(e, 0.0), 2).unwrap());
                        }
                    }
                    Err(Error::SqueezeDomain(_)) => refused[0] += 1,
                    Err(Error::Domain(_)) => refused[1] += 1,
                    Err(Error::CutoffOverflow(_)) => refused[2] += 1,
                    Err(e) => errors.push(format!("{name} {branch:?} κ={kappa} λ={lam}: {e}")),
                }
            }
        }
    }
    outcome(
        errors.is_empty() && worst_a < 1e-8 && worst_h < 1e-8 && energies > 0,
        format!(
            "{built} states built, refused: {} squeeze domain, {} nilpotent λ ≠ 0, {} beyond cutoff; worst ‖Av−λv‖ {worst_a:.1e} at {worst_label}, worst ‖Hv−E₀v‖ {worst_h:.1e} over {energies} grounds (tol 1e-8){}",
            refused[0],
            refused[1],
            refused[2],
            errors.first().map(|e| format!("; error: {e}")).unwrap_or_default()
        ),
    )
}

// 8 -----------------------------------------------------------------------

fn chen_louck() -> Outcome {
    let cut = FockCutoff::square(20);
    let g = build_generators(cut);
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    let pairs = coprime_pairs(5);
    for &(p, q) in &pairs {
        let pq = PQParams::new(p, q, cx(0.8, 0.3), cx(-0.5, 0.6)).unwrap();
        let h = build_h_pq(&pq, &g).unwrap();
        for kappa in 0..=4 {
            let v = chen_ground(&pq, kappa, &g).unwrap();
            let r = h.apply(&v).unwrap().axpy(C64::new(-(kappa as f64), 0.0), &v).unwrap().norm();
            worst = worst.max(r);
        }
        let louck = louck_multiset_check(&pq, cut).unwrap();
        if !louck.matches {
            failed.push(format!("{p}:{q}"));
        }
    }
    outcome(
        worst < 1e-10 && failed.is_empty(),
        format!(
            "{} coprime pairs, grounds κ ≤ 4 worst {worst:.1e} (tol 1e-10), Louck multiset mismatches: {}",
            pairs.len(),
            if failed.is_empty() { "none".to_string() } else { failed.join(" ") }
        ),
    )
}

// 9 -----------------------------------------------------------------------

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, threads: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(sub);
        let o = Command::new(env!("CARGO_BIN_EXE_ladderforge"))
            .args(["catalogue-sweep", "--random", "3", "--seed", "9", "--out", out.to_str().unwrap()])
            .env("LADDERFORGE_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        if o.status.code() != Some(0) {
            return Err(format!("exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
        }
        std::fs::read(out.join("catalogue-sweep.json")).map_err(|e| e.to_string())
    };
    match (run("first", "1"), run("second", "4")) {
        (Ok(a), Ok(b)) => outcome(a == b, format!("two runs, {} bytes each, identical: {}", a.len(), a == b)),
        (Err(e), _) | (_, Err(e)) => outcome(false, e),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("algebra suite", algebra_suite),
        ("gate reproduction", gate_reproduction),
        ("ladder residual", ladder_residuals),
        ("normal ordering", normal_ordering),
        ("spectra", spectra),
        ("similarity reductions", similarity_reductions),
        ("eigenstate residuals", eigenstate_residuals),
        ("Chen/Louck", chen_louck),
        ("determinism", determinism),
    ];
    let only: Option<usize> = std::env::args().nth(1).and_then(|s| s.parse().ok());
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        failures += !o.pass as usize;
        println!(
            "criterion {}: {} {name} ({:.1}s): {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
