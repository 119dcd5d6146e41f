//! Scenario runner behind the `ladderforge` binary. Every scenario resolves a
//! config (JSON file, then flags on top), runs its checks and emits one report.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{
    alpha_gate, bind, build_hamiltonian, build_ladder, classify, mu_gate, nu_gate, solve_ladder, su2_invariant,
    verify_ladder, verify_raising, CaseTag, HamiltonianParams, LadderCoeffs,
};
use crate::catalogue::{appendix_catalogue, symbolic_residual, Bindings};
use crate::chen::{
    alt_energy, alt_hamiltonian, build_a_pq_generalized, build_cal_a_pq, build_h_pq, chen_chains, chen_ground,
    chen_ground_by_raising, degenerate_zero_states, louck_multiset_check, louck_spectrum, tilde0_state, PQParams,
};
use crate::cplx::parse_complex;
use crate::eigenstates::{construct, verify_eigenstate, Branch, EigenstateRequest};
use crate::error::Error;
use crate::fock::{algebra_relations, build_generators, commutator, FockCutoff, ToleranceConfig, C64, ONE, ZERO};
use crate::spectra::family_spectrum;
use crate::transforms::{reduce_by_similarity, verify_reduction};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_REFUSED: i32 = 2;
pub const EXIT_CONFIG: i32 = 64;
pub const EXIT_CUTOFF: i32 = 65;

pub fn version() -> String {
    match option_env!("LADDERFORGE_GIT_DESCRIBE") {
        Some(d) if !d.is_empty() => format!("{} ({d})", env!("CARGO_PKG_VERSION")),
        _ => env!("CARGO_PKG_VERSION").to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    VerifyAlgebra,
    SolveLadder,
    Spectrum,
    Eigenstate,
    Chen,
    CatalogueSweep,
    Reduce,
}

impl ScenarioKind {
    fn name(self) -> &'static str {
        match self {
            ScenarioKind::VerifyAlgebra => "verify-algebra",
            ScenarioKind::SolveLadder => "solve-ladder",
            ScenarioKind::Spectrum => "spectrum",
            ScenarioKind::Eigenstate => "eigenstate",
            ScenarioKind::Chen => "chen",
            ScenarioKind::CatalogueSweep => "catalogue-sweep",
            ScenarioKind::Reduce => "reduce",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cx(#[serde(with = "crate::cplx")] pub C64);

/// Everything a scenario can read. Absent fields take scenario defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<HamiltonianParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<LadderCoeffs>,
    /// values for the solver's free parameters, in report order
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free: Option<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request: Option<EigenstateRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pq: Option<PQParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappas: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_bindings: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// output routing; read from config files but left out of reports
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    /// output routing; read from config files but left out of reports
    #[serde(default, skip_serializing)]
    pub format: Option<Format>,
}

#[derive(Parser, Debug)]
#[command(name = "ladderforge", version, about = "Ladder operators, eigenstates and spectra of two-mode u(2) oscillators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// truncation as N1,N2 (or a single N for both modes)
    #[arg(long, global = true)]
    pub cutoff: Option<String>,
    #[arg(long, global = true)]
    pub tol_algebra: Option<f64>,
    #[arg(long, global = true)]
    pub tol_eigen: Option<f64>,
    /// JSON scenario config; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// directory for report files; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct HamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta0: Option<f64>,
    /// complex, e.g. 0.3-0.1j
    #[arg(long, allow_hyphen_values = true)]
    pub beta_plus: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub h0: Option<f64>,
    /// comma-separated complex values for the solver's free parameters
    #[arg(long, allow_hyphen_values = true)]
    pub free: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Commutation relations of the generators on the interior
    VerifyAlgebra,
    /// Classify H and solve [H,A] = −A
    SolveLadder(HamArgs),
    /// Raising chains over the κ-grounds, checked against the oracle
    Spectrum {
        #[command(flatten)]
        h: HamArgs,
        #[arg(long, value_delimiter = ',')]
        kappas: Option<Vec<usize>>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Build one eigenstate of A and check it
    Eigenstate {
        #[command(flatten)]
        h: HamArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long)]
        kappa: Option<usize>,
        #[arg(long, value_parser = parse_branch)]
        branch: Option<Branch>,
        #[arg(long, allow_hyphen_values = true)]
        c1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c2: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda2: Option<String>,
    },
    /// p:q oscillator: Chen grounds, zero sectors, Louck counting
    Chen {
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        alpha_plus: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        alpha_minus: Option<String>,
        /// largest κ for the Chen grounds
        #[arg(long)]
        kappa: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Ladder residual of every catalogue row
    CatalogueSweep {
        /// extra random bindings per row
        #[arg(long)]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Similarity reduction of H and A to a basic form
    Reduce {
        #[command(flatten)]
        h: HamArgs,
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<i8>,
    },
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    match s {
        "separable" => Ok(Branch::Separable),
        "non-separable" => Ok(Branch::NonSeparable),
        "kappa" => Ok(Branch::Kappa),
        _ => Err(format!("unknown branch {s:?} (separable | non-separable | kappa)")),
    }
}

pub fn parse_cutoff(s: &str) -> Result<FockCutoff, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<usize>().map_err(|_| format!("bad cutoff {s:?}"));
    match parts.as_slice() {
        [n] => Ok(FockCutoff::square(num(n)?)),
        [a, b] => Ok(FockCutoff::new(num(a)?, num(b)?)),
        _ => Err(format!("cutoff must be N or N1,N2, got {s:?}")),
    }
}

// ---------------------------------------------------------------------------
// outcome plumbing

/// Why a scenario stopped; each maps onto one exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Cutoff(String),
    Refused(String),
    Hard(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Cutoff(_) => EXIT_CUTOFF,
            Failure::Refused(_) => EXIT_REFUSED,
            Failure::Hard(_) => EXIT_FAIL,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            Failure::Config(_) => "config-error",
            Failure::Cutoff(_) => "cutoff-too-small",
            Failure::Refused(_) => "refused",
            Failure::Hard(_) => "error",
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Cutoff(m) | Failure::Refused(m) | Failure::Hard(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Config(m),
            Error::CutoffOverflow(_) | Error::DegreeTooLarge { .. } => Failure::Cutoff(e.to_string()),
            e if e.is_refusal() => Failure::Refused(e.to_string()),
            e => Failure::Hard(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value.is_finite() && value < tolerance }
    }

    fn truth(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 0.0 } else { 1.0 }, tolerance: 0.5, pass: ok }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub config: ScenarioConfig,
    pub status: String,
    pub message: Option<String>,
    pub checks: Vec<Check>,
    pub payload: Value,
}

struct Done {
    checks: Vec<Check>,
    payload: Value,
    csv: Option<String>,
}

// ---------------------------------------------------------------------------
// config resolution

fn cx_flag(name: &str, s: &Option<String>) -> Outcome<Option<C64>> {
    s.as_deref()
        .map(|v| parse_complex(v).map_err(|e| Failure::Config(format!("--{name}: {e}"))))
        .transpose()
}

fn merge_params(base: Option<HamiltonianParams>, h: &HamArgs) -> Outcome<Option<HamiltonianParams>> {
    let any = h.beta0.is_some()
        || h.beta_plus.is_some()
        || h.beta3.is_some()
        || h.gamma1.is_some()
        || h.gamma2.is_some()
        || h.h0.is_some();
    if base.is_none() && !any {
        return Ok(None);
    }
    let mut p = base.unwrap_or_else(|| HamiltonianParams::new(0.0, ZERO, 0.0));
    if let Some(x) = h.beta0 {
        p.beta0 = x;
    }
    if let Some(x) = cx_flag("beta-plus", &h.beta_plus)? {
        p.beta_plus = x;
    }
    if let Some(x) = h.beta3 {
        p.beta3 = x;
    }
    if let Some(x) = cx_flag("gamma1", &h.gamma1)? {
        p.gamma1 = x;
    }
    if let Some(x) = cx_flag("gamma2", &h.gamma2)? {
        p.gamma2 = x;
    }
    if let Some(x) = h.h0 {
        p.h0 = x;
    }
    Ok(Some(p))
}

fn merge_free(cfg: &mut ScenarioConfig, h: &HamArgs) -> Outcome<()> {
    if let Some(s) = &h.free {
        let vals = s
            .split(',')
            .map(|v| parse_complex(v).map(Cx))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Failure::Config(format!("--free: {e}")))?;
        cfg.free = Some(vals);
    }
    Ok(())
}

/// Reads the config file (if any) and applies the flags on top of it.
pub fn resolve(cli: &Cli) -> Outcome<ScenarioConfig> {
    let mut cfg: ScenarioConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => ScenarioConfig::default(),
    };
    let kind = match &cli.command {
        Command::VerifyAlgebra => ScenarioKind::VerifyAlgebra,
        Command::SolveLadder(_) => ScenarioKind::SolveLadder,
        Command::Spectrum { .. } => ScenarioKind::Spectrum,
        Command::Eigenstate { .. } => ScenarioKind::Eigenstate,
        Command::Chen { .. } => ScenarioKind::Chen,
        Command::CatalogueSweep { .. } => ScenarioKind::CatalogueSweep,
        Command::Reduce { .. } => ScenarioKind::Reduce,
    };
    if let Some(k) = cfg.scenario {
        if k != kind {
            return Err(Failure::Config(format!(
                "config is for {} but the subcommand is {}",
                k.name(),
                kind.name()
            )));
        }
    }
    cfg.scenario = Some(kind);
    if let Some(c) = &cli.cutoff {
        let c = parse_cutoff(c).map_err(Failure::Config)?;
        cfg.cutoff = Some([c.n1_max, c.n2_max]);
    }
    if cli.tol_algebra.is_some() || cli.tol_eigen.is_some() {
        let mut t = cfg.tolerances.unwrap_or_default();
        if let Some(x) = cli.tol_algebra {
            t.algebra = x;
            t.ladder = x;
        }
        if let Some(x) = cli.tol_eigen {
            t.eigen = x;
            t.state = x;
        }
        cfg.tolerances = Some(t);
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.format.is_some() {
        cfg.format = cli.format;
    }
    match &cli.command {
        Command::VerifyAlgebra => {}
        Command::SolveLadder(h) => {
            cfg.params = merge_params(cfg.params, h)?;
            merge_free(&mut cfg, h)?;
        }
        Command::Spectrum { h, kappas, n_max } => {
            cfg.params = merge_params(cfg.params, h)?;
            merge_free(&mut cfg, h)?;
            if kappas.is_some() {
                cfg.kappas = kappas.clone();
            }
            cfg.n_max = n_max.or(cfg.n_max);
        }
        Command::Eigenstate { h, lambda, kappa, branch, c1, c2, lambda2 } => {
            cfg.params = merge_params(cfg.params, h)?;
            merge_free(&mut cfg, h)?;
            let p = cfg.params.ok_or_else(|| Failure::Config("eigenstate needs Hamiltonian parameters".into()))?;
            let mut req = cfg
                .request
                .clone()
                .unwrap_or_else(|| EigenstateRequest::new(classify(&p), ZERO, Branch::Kappa));
            if let Some(x) = cx_flag("lambda", lambda)? {
                req.lambda = x;
            }
            if let Some(k) = kappa {
                req.kappa = *k;
            }
            if let Some(b) = branch {
                req.branch = *b;
            }
            if let Some(x) = cx_flag("c1", c1)? {
                req.c1 = Some(x);
            }
            if let Some(x) = cx_flag("c2", c2)? {
                req.c2 = Some(x);
            }
            if let Some(x) = cx_flag("lambda2", lambda2)? {
                req.lambda2 = Some(x);
            }
            cfg.request = Some(req);
        }
        Command::Chen { p, q, alpha_plus, alpha_minus, kappa, n_max } => {
            let mut pq = cfg.pq.unwrap_or(PQParams { p: 1, q: 1, alpha_plus: ONE, alpha_minus: ONE });
            if let Some(x) = p {
                pq.p = *x;
            }
            if let Some(x) = q {
                pq.q = *x;
            }
            if let Some(x) = cx_flag("alpha-plus", alpha_plus)? {
                pq.alpha_plus = x;
            }
            if let Some(x) = cx_flag("alpha-minus", alpha_minus)? {
                pq.alpha_minus = x;
            }
            cfg.pq = Some(pq);
            cfg.kappa = kappa.or(cfg.kappa);
            cfg.n_max = n_max.or(cfg.n_max);
        }
        Command::CatalogueSweep { random, seed } => {
            cfg.random_bindings = random.or(cfg.random_bindings);
            cfg.seed = seed.or(cfg.seed);
        }
        Command::Reduce { h, eps } => {
            cfg.params = merge_params(cfg.params, h)?;
            merge_free(&mut cfg, h)?;
            cfg.eps = eps.or(cfg.eps);
        }
    }
    Ok(cfg)
}

fn default_cutoff(cfg: &ScenarioConfig) -> FockCutoff {
    match cfg.scenario {
        Some(ScenarioKind::CatalogueSweep) => FockCutoff::square(12),
        Some(ScenarioKind::Eigenstate) | Some(ScenarioKind::Chen) => FockCutoff::square(20),
        _ => FockCutoff::square(14),
    }
}

/// Operator degree the scenario's residuals are measured at.
fn scenario_degree(cfg: &ScenarioConfig) -> usize {
    match cfg.scenario {
        Some(ScenarioKind::SolveLadder) | Some(ScenarioKind::CatalogueSweep) => 3,
        Some(ScenarioKind::Chen) => cfg.pq.map(|x| x.p.max(x.q) as usize).unwrap_or(1),
        _ => 2,
    }
}

fn cutoff_of(cfg: &ScenarioConfig) -> Outcome<FockCutoff> {
    let c = cfg.cutoff.map(|[a, b]| FockCutoff::new(a, b)).unwrap_or_else(|| default_cutoff(cfg));
    let need = 2 * scenario_degree(cfg);
    if c.n1_max.min(c.n2_max) < need {
        return Err(Failure::Cutoff(format!("cutoff {c:?} is below {need}, twice the operator degree")));
    }
    Ok(c)
}

fn ladder_of(p: &HamiltonianParams, cfg: &ScenarioConfig) -> Outcome<LadderCoeffs> {
    if let Some(cf) = cfg.coeffs {
        return Ok(cf);
    }
    let rep = solve_ladder(p);
    if rep.tag == CaseTag::NoLadderExists {
        return Err(Failure::Refused("no ladder operator exists for these parameters".into()));
    }
    let free: Vec<C64> = cfg.free.as_ref().map(|v| v.iter().map(|c| c.0).collect()).unwrap_or_default();
    Ok(bind(&rep, &free))
}

fn params_of(cfg: &ScenarioConfig) -> Outcome<HamiltonianParams> {
    cfg.params
        .ok_or_else(|| Failure::Config("Hamiltonian parameters are required (flags or config \"params\")".into()))
}

// ---------------------------------------------------------------------------
// scenarios

fn run_verify_algebra(cfg: &ScenarioConfig, tol: &ToleranceConfig) -> Outcome<Done> {
    let g = build_generators(cutoff_of(cfg)?);
    let rel = algebra_relations(&g, 2)?;
    let checks = rel.iter().map(|r| Check::below(&r.relation, r.residual, tol.algebra)).collect();
    let mut csv = String::from("relation,residual\n");
    for r in &rel {
        csv.push_str(&format!("{},{:.3e}\n", r.relation, r.residual));
    }
    Ok(Done { checks, payload: json!({ "degree": 2, "relations": rel }), csv: Some(csv) })
}

fn run_solve_ladder(cfg: &ScenarioConfig, tol: &ToleranceConfig) -> Outcome<Done> {
    let p = params_of(cfg)?;
    let rep = solve_ladder(&p);
    let gates = json!({
        "b2": su2_invariant(&p),
        "alpha": alpha_gate(&p),
        "mu": mu_gate(&p),
        "nu": nu_gate(&p),
    });
    if rep.tag == CaseTag::NoLadderExists {
        return Err(Failure::Refused(format!(
            "no ladder operator: NoLadderExists (b² = {}, β₀ = {})",
            su2_invariant(&p),
            p.beta0
        )));
    }
    let g = build_generators(cutoff_of(cfg)?);
    let h = build_hamiltonian(&p, &g);
    let mut checks = Vec::new();
    for (name, cf) in rep.free_parameters.iter().zip(&rep.coeffs) {
        let a = build_ladder(cf, &g);
        checks.push(Check::below(format!("ladder[{name}]"), verify_ladder(&h, &a, 3)?, tol.ladder));
    }
    let bound = ladder_of(&p, cfg)?;
    let a = build_ladder(&bound, &g);
    checks.push(Check::below("ladder[bound]", verify_ladder(&h, &a, 3)?, tol.ladder));
    checks.push(Check::below("raising[bound]", verify_raising(&h, &a, 3)?, tol.ladder));
    let payload = json!({ "classification": rep.tag, "gates": gates, "solution": rep, "bound": bound });
    Ok(Done { checks, payload, csv: None })
}

fn run_spectrum(cfg: &ScenarioConfig, tol: &ToleranceConfig) -> Outcome<Done> {
    let p = params_of(cfg)?;
    let cf = ladder_of(&p, cfg)?;
    let g = build_generators(cutoff_of(cfg)?);
    let kappas = cfg.kappas.clone().unwrap_or_else(|| vec![0, 1, 2]);
    let rep = family_spectrum(&p, &cf, &kappas, cfg.n_max.unwrap_or(4), 2, &g)?;
    let mut checks = Vec::new();
    let certified: Vec<_> = rep.certified().collect();
    checks.push(Check::truth("certified-entries", !certified.is_empty()));
    let worst_res = certified.iter().map(|e| e.residual).fold(0.0, f64::max);
    checks.push(Check::below("chain-residual", worst_res, tol.eigen.max(1e-8)));
    let unmatched = certified.iter().filter(|e| e.energy_oracle.is_none()).count();
    checks.push(Check::truth("oracle-matched", unmatched == 0));
    let dev = certified
        .iter()
        .filter_map(|e| e.energy_oracle.map(|o| (o - e.energy_chain).abs()))
        .fold(0.0, f64::max);
    checks.push(Check::below("chain-vs-oracle", dev, tol.spectrum));
    if certified.iter().all(|e| e.energy_formula.is_some()) {
        let f = certified
            .iter()
            .map(|e| (e.energy_formula.unwrap() - e.energy_chain).abs())
            .fold(0.0, f64::max);
        checks.push(Check::below("chain-vs-formula", f, tol.spectrum));
    }
    let csv = rep.to_csv();
    Ok(Done { checks, payload: json!({ "classification": classify(&p), "spectrum": rep }), csv: Some(csv) })
}

fn run_eigenstate(cfg: &ScenarioConfig, tol: &ToleranceConfig) -> Outcome<Done> {
    let p = params_of(cfg)?;
    let cf = ladder_of(&p, cfg)?;
    let g = build_generators(cutoff_of(cfg)?);
    let req = cfg.request.clone().expect("resolved");
    let c = construct(&p, &cf, &req, &g)?;
    let a = build_ladder(&cf, &g);
    let mut checks = vec![Check::below("ladder-residual", verify_eigenstate(&a, &c.state, req.lambda, 2)?, tol.state)];
    if let (Some(e), true) = (c.expected_energy, req.lambda == ZERO) {
        let h = build_hamiltonian(&p, &g);
        checks.push(Check::below("energy-residual", verify_eigenstate(&h, &c.state, C64::new(e, 0.0), 2)?, tol.state));
    }
    let payload = json!({
        "family": c.family,
        "chain": c.chain,
        "expected_energy": c.expected_energy,
        "state": c.state.to_json(),
    });
    Ok(Done { checks, payload, csv: Some(c.state.to_csv()) })
}

fn run_chen(cfg: &ScenarioConfig, tol: &ToleranceConfig) -> Outcome<Done> {
    let pq = cfg.pq.expect("resolved");
    pq.validate()?;
    let cut = cutoff_of(cfg)?;
    let g = build_generators(cut);
    let kmax = cfg.kappa.unwrap_or(2);
    let (p, q) = (pq.p as usize, pq.q as usize);
    if p * kmax > cut.n2_max || q * kmax > cut.n1_max {
        return Err(Failure::Cutoff(format!("κ = {kmax} of {p}:{q} needs cutoff ({}, {})", q * kmax, p * kmax)));
    }
    let h = build_h_pq(&pq, &g)?;
    let a = build_cal_a_pq(&pq, &g)?;
    let deg = p.max(q);
    let mut checks = vec![
        Check::below("[H,A]+A", verify_ladder(&h, &a, deg)?, tol.ladder),
        Check::below("[H,A+]-A+", verify_raising(&h, &a, deg)?, tol.ladder),
    ];
    let gen = build_a_pq_generalized(&pq, &g)?;
    if cut.n1_max.min(cut.n2_max) >= p + q {
        let c = commutator(&gen, &a.adjoint())?;
        let d = c.project(&cut.interior_mask(p + q)?).frobenius_norm();
        checks.push(Check::below("[Agen,A+]", d, tol.ladder));
    }
    let alt = alt_hamiltonian(&pq, &g).ok();
    let mut grounds = Vec::new();
    for kappa in 0..=kmax {
        let v = chen_ground(&pq, kappa, &g)?;
        let r = h.apply(&v)?.axpy(C64::new(-(kappa as f64), 0.0), &v)?.norm();
        checks.push(Check::below(format!("chen[{kappa}].energy"), r, tol.ladder));
        let w = chen_ground_by_raising(&pq, kappa, &g)?;
        checks.push(Check::below(format!("chen[{kappa}].raising-form"), v.phase_distance(&w)?, tol.state));
        if let Some(alt) = &alt {
            let e = alt_energy(&pq, kappa)?;
            let r = alt.apply(&v)?.axpy(C64::new(-e, 0.0), &v)?.norm();
            checks.push(Check::below(format!("chen[{kappa}].alt-energy"), r, tol.ladder));
        }
        grounds.push(json!({ "kappa": kappa, "energy": kappa, "alt_energy": alt_energy(&pq, kappa).ok(), "state": v.to_json() }));
    }
    let mut zero = Vec::new();
    for (i, z) in degenerate_zero_states(&pq, &g)?.iter().enumerate() {
        let (k1, k2) = (i / p, i % p);
        let e = louck_spectrum(&pq, 0, k1, k2)?;
        let r = h.apply(z)?.axpy(C64::new(-e, 0.0), z)?.norm() + a.apply(z)?.norm();
        checks.push(Check::below(format!("zero[{k1},{k2}]"), r, tol.ladder));
        zero.push(json!({ "k1": k1, "k2": k2, "energy": e }));
    }
    let t0 = tilde0_state(&pq, &g)?;
    let r = h.apply(&t0)?.axpy(-ONE, &t0)?.norm() + a.apply(&t0)?.norm();
    checks.push(Check::below("tilde0", r, tol.ladder));
    let louck = louck_multiset_check(&pq, cut)?;
    checks.push(Check::truth("louck-multiset", louck.matches));
    let chains = chen_chains(&pq, &(0..=kmax).collect::<Vec<_>>(), cfg.n_max.unwrap_or(3), &g)?;
    let dev = chains.max_deviation();
    checks.push(Check::below("chain-vs-oracle", dev.unwrap_or(f64::INFINITY), tol.spectrum));
    let csv = chains.to_csv();
    let payload = json!({
        "pq": pq,
        "grounds": grounds,
        "zero_sectors": zero,
        "tilde0": t0.to_json(),
        "louck": louck,
        "chains": chains,
    });
    Ok(Done { checks, payload, csv: Some(csv) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub label: String,
    pub binding: usize,
    pub classification: CaseTag,
    pub normalizable: bool,
    pub symbolic_residual: f64,
    pub matrix_residual: f64,
    /// outcome of an eigenstate request on a non-normalizable row
    pub eigenstate: Option<String>,
}

fn run_catalogue_sweep(cfg: &ScenarioConfig, tol: &ToleranceConfig) -> Outcome<Done> {
    let cut = cutoff_of(cfg)?;
    let g = build_generators(cut);
    let mut bindings = vec![Bindings::default()];
    bindings.extend(Bindings::random_set(cfg.seed.unwrap_or(7), cfg.random_bindings.unwrap_or(0)));
    let jobs: Vec<(usize, crate::catalogue::CatalogueRow)> = bindings
        .iter()
        .enumerate()
        .flat_map(|(k, b)| appendix_catalogue(b).into_iter().map(move |r| (k, r)))
        .collect();
    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|(k, row)| -> Outcome<SweepRow> {
            let h = build_hamiltonian(&row.params, &g);
            let a = build_ladder(&row.coeffs, &g);
            let tag = classify(&row.params);
            let eigenstate = (!row.normalizable).then(|| {
                let req = EigenstateRequest::new(tag.clone(), ZERO, Branch::Kappa);
                match construct(&row.params, &row.coeffs, &req, &g) {
                    Err(Error::NotNormalizable(_)) => "refused".to_string(),
                    Err(e) => format!("error: {e}"),
                    Ok(_) => "constructed".to_string(),
                }
            });
            Ok(SweepRow {
                label: row.label.clone(),
                binding: *k,
                classification: tag,
                normalizable: row.normalizable,
                symbolic_residual: symbolic_residual(row),
                matrix_residual: verify_ladder(&h, &a, 3)?,
                eigenstate,
            })
        })
        .collect::<Outcome<Vec<_>>>()?;
    let mut checks: Vec<Check> = rows
        .iter()
        .map(|r| Check::below(format!("{}#{}", r.label, r.binding), r.matrix_residual, tol.ladder))
        .collect();
    let unrefused = rows.iter().filter(|r| r.eigenstate.as_deref().is_some_and(|s| s != "refused")).count();
    checks.push(Check::truth("non-normalizable-rows-refused", unrefused == 0));
    let mut csv = String::from("label,binding,normalizable,symbolic_residual,matrix_residual,pass\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{:.3e},{:.3e},{}\n",
            r.label,
            r.binding,
            r.normalizable,
            r.symbolic_residual,
            r.matrix_residual,
            r.matrix_residual < tol.ladder
        ));
    }
    let payload = json!({ "bindings": bindings, "rows": rows });
    Ok(Done { checks, payload, csv: Some(csv) })
}

fn run_reduce(cfg: &ScenarioConfig, tol: &ToleranceConfig) -> Outcome<Done> {
    let p = params_of(cfg)?;
    let cf = ladder_of(&p, cfg)?;
    let g = build_generators(cutoff_of(cfg)?);
    let red = reduce_by_similarity(&p, &cf, cfg.eps.unwrap_or(1))?;
    let chk = verify_reduction(&p, &cf, &red, 8, &g)?;
    let mut checks = vec![
        Check::below("H-similarity", chk.h_residual, tol.state),
        Check::below("A-similarity", chk.a_residual, tol.state),
    ];
    if let Some(d) = chk.spectrum_deviation {
        checks.push(Check::below("spectrum-invariance", d, tol.spectrum));
    }
    let payload = json!({
        "classification": classify(&p),
        "reduced_classification": classify(&red.params),
        "reduction": red,
        "check": chk,
    });
    Ok(Done { checks, payload, csv: None })
}

fn dispatch(cfg: &ScenarioConfig) -> Outcome<Done> {
    let tol = cfg.tolerances.unwrap_or_default();
    match cfg.scenario.expect("resolved") {
        ScenarioKind::VerifyAlgebra => run_verify_algebra(cfg, &tol),
        ScenarioKind::SolveLadder => run_solve_ladder(cfg, &tol),
        ScenarioKind::Spectrum => run_spectrum(cfg, &tol),
        ScenarioKind::Eigenstate => run_eigenstate(cfg, &tol),
        ScenarioKind::Chen => run_chen(cfg, &tol),
        ScenarioKind::CatalogueSweep => run_catalogue_sweep(cfg, &tol),
        ScenarioKind::Reduce => run_reduce(cfg, &tol),
    }
}

/// Runs a resolved scenario; returns the report, the optional CSV table and the exit code.
pub fn run(cfg: &ScenarioConfig) -> (Report, Option<String>, i32) {
    let scenario = cfg.scenario.map(ScenarioKind::name).unwrap_or("unknown").to_string();
    let mut report = Report {
        tool: "ladderforge".into(),
        version: version(),
        scenario,
        config: cfg.clone(),
        status: String::new(),
        message: None,
        checks: Vec::new(),
        payload: Value::Null,
    };
    match dispatch(cfg) {
        Ok(done) => {
            let pass = done.checks.iter().all(|c| c.pass);
            report.status = if pass { "pass" } else { "fail" }.into();
            report.checks = done.checks;
            report.payload = done.payload;
            (report, done.csv, if pass { EXIT_OK } else { EXIT_FAIL })
        }
        Err(f) => {
            report.status = f.status().into();
            report.message = Some(f.message().to_string());
            (report, None, f.exit_code())
        }
    }
}

fn write_outputs(report: &Report, csv: Option<&str>, cfg: &ScenarioConfig) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    let csv_wanted = cfg.format == Some(Format::Csv);
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{}.json", report.scenario)), &json)?;
            if let (true, Some(c)) = (csv_wanted, csv) {
                std::fs::write(dir.join(format!("{}.csv", report.scenario)), c)?;
            }
        }
        None => match (csv_wanted, csv) {
            (true, Some(c)) => print!("{c}"),
            _ => print!("{json}"),
        },
    }
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var("LADDERFORGE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // a second call in the same process finds the pool already built; that is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Entry point used by the binary: parse, resolve, run, write, exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("ladderforge: {}", f.message());
            return f.exit_code();
        }
    };
    let (report, csv, code) = run(&cfg);
    if let Some(m) = &report.message {
        eprintln!("ladderforge: {} ({})", m, report.status);
    }
    if let Err(e) = write_outputs(&report, csv.as_deref(), &cfg) {
        eprintln!("ladderforge: cannot write report: {e}");
        return EXIT_FAIL;
    }
    code
}

/// Path of the JSON report a run with `--out dir` writes.
pub fn report_path(dir: &Path, scenario: ScenarioKind) -> PathBuf {
    dir.join(format!("{}.json", scenario.name()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> ScenarioConfig {
        let cli = Cli::try_parse_from(std::iter::once("ladderforge").chain(args.iter().copied())).unwrap();
        resolve(&cli).unwrap()
    }

    #[test]
    fn cutoff_parsing() {
        assert_eq!(parse_cutoff("14").unwrap(), FockCutoff::square(14));
        assert_eq!(parse_cutoff("12, 24").unwrap(), FockCutoff::new(12, 24));
        assert!(parse_cutoff("1,2,3").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"params": {"beta0": 7.0, "beta_plus": [0.25, 0.0], "beta3": 0.5}, "cutoff": [10, 10]}"#)
            .unwrap();
        let c = cfg(&["solve-ladder", "--config", path.to_str().unwrap(), "--beta0", "2.5", "--cutoff", "16,16"]);
        let p = c.params.unwrap();
        assert_eq!(p.beta0, 2.5);
        assert_eq!(p.beta3, 0.5);
        assert_eq!(c.cutoff, Some([16, 16]));
        assert_eq!(c.scenario, Some(ScenarioKind::SolveLadder));
    }

    #[test]
    fn negative_and_complex_flags() {
        let c = cfg(&["reduce", "--beta0", "-3", "--beta-plus", "0.1-0.2j", "--beta3", "-0.4", "--eps", "-1"]);
        let p = c.params.unwrap();
        assert_eq!((p.beta0, p.beta3), (-3.0, -0.4));
        assert_eq!(p.beta_plus, C64::new(0.1, -0.2));
        assert_eq!(c.eps, Some(-1));
    }

    #[test]
    fn refusal_and_exit_codes() {
        // b² = 0.5, β₀ = 7: no gate holds
        let c = cfg(&["solve-ladder", "--beta0", "7", "--beta-plus", "0.25", "--beta3", "0.5"]);
        let (rep, _, code) = run(&c);
        assert_eq!(code, EXIT_REFUSED);
        assert_eq!(rep.status, "refused");
        let c = cfg(&["verify-algebra", "--cutoff", "3"]);
        assert_eq!(run(&c).2, EXIT_CUTOFF);
        let c = cfg(&["solve-ladder"]);
        assert_eq!(run(&c).2, EXIT_CONFIG);
        let c = cfg(&["chen", "--p", "2", "--q", "4"]);
        assert_eq!(run(&c).2, EXIT_REFUSED);
        assert_eq!(main_with_args(["ladderforge", "no-such-command"]), EXIT_CONFIG);
    }

    #[test]
    fn scenarios_pass() {
        let (rep, _, code) = run(&cfg(&["verify-algebra", "--cutoff", "8"]));
        assert_eq!(code, EXIT_OK, "{rep:?}");
        let (rep, _, code) = run(&cfg(&["chen", "--p", "3", "--q", "2", "--kappa", "2"]));
        assert_eq!(code, EXIT_OK, "{:?}", rep.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        let (rep, _, code) = run(&cfg(&["solve-ladder", "--beta0", "3", "--beta3", "1", "--cutoff", "8"]));
        assert_eq!(code, EXIT_OK, "{rep:?}");
        let (rep, _, code) = run(&cfg(&["spectrum", "--beta0", "3", "--beta3", "1", "--cutoff", "12", "--kappas", "0,1"]));
        assert_eq!(code, EXIT_OK, "{:?}", rep.checks);
        let (rep, csv, code) = run(&cfg(&["eigenstate", "--beta0", "2", "--lambda", "0.3+0.1j", "--kappa", "1", "--cutoff", "16"]));
        assert_eq!(code, EXIT_OK, "{rep:?}");
        assert!(csv.unwrap().starts_with("n1,n2"));
        let (rep, _, code) = run(&cfg(&["reduce", "--beta0", "3", "--beta-plus", "0.3", "--beta3", "0.8", "--gamma1", "0.1"]));
        assert_eq!(code, EXIT_OK, "{rep:?}");
    }
}
