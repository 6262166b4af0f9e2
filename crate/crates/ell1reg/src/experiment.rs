//! Scenario-driven rate experiments: deterministic noise, parameter
//! selection, error recording, log-log rate fitting, and CSV emission.
//!
//! # Scenario files
//!
//! Scenarios are TOML with a `schema_version` field. Example:
//!
//! ```toml
//! schema_version = 1
//! n = 5000
//! p = 2.0
//! q = 2.0
//! c_budget = 4.0              # optional envelope budget, default 4
//!
//! [operator]
//! kind = "embedding"          # "cesaro" | "diagonal" | "embedding"
//! # zeta = 1.0                # diagonal only: sigma_k = k^{-zeta}
//!
//! [solution]
//! kind = "holder"             # "holder" | "exponential" | "sparse"
//! mu = 1.0
//! c = 0.048
//! # gamma = 1.0               # exponential
//! # support = { 1 = 2.0 }     # sparse, 1-based indices
//!
//! [delta_grid]
//! delta0 = 0.1
//! ratio = 0.25
//! count = 6
//!
//! [noise]
//! seed = 7
//! mode = "random_direction"   # | "alternating"
//!
//! [param_rule]
//! rule = "discrepancy"        # | "a_priori"
//! tau1 = 1.1
//! tau2 = 1.5
//! # c = 1.0                   # a_priori only
//! ```
//!
//! The embedding operator takes its exponent from the top-level `q`, so the
//! misfit norm and the image norm cannot drift apart. A scenario is rejected
//! at load time when its smallest noise level is under 10x the analytic
//! solution tail at N; below that, truncation error would contaminate the
//! measured rates.
//!
//! # Determinism
//!
//! Noise directions come from a 64-bit counter generator (SplitMix64): the
//! state advances by a fixed odd increment and each output is an avalanche
//! hash of the state. Each grid point derives its own seed from
//! `(scenario seed, grid index)`, so records are independent of evaluation
//! order. Two runs of the same scenario produce byte-identical CSVs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::operators::OperatorSpec;
use crate::param::{discrepancy_select, a_priori_alpha, DiscrepancyConfig};
use crate::rates::{RateModel, TailBound};
use crate::seq::{lq_norm, SolutionModel, TruncatedSequence};
use crate::solver::{solve_auto, FistaOptions, TikhonovProblem};

/// Version of the scenario schema this build reads.
pub const SCHEMA_VERSION: u32 = 1;

/// Default budget for the error/phi2 envelope constant.
pub const DEFAULT_C_BUDGET: f64 = 4.0;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// SplitMix64: `state += GOLDEN_GAMMA`, output = avalanche hash of state.
#[derive(Debug, Clone)]
pub struct CounterRng {
    state: u64,
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_unit() - 1.0
    }
}

/// Decorrelated per-record seed for grid index `j`.
pub fn derive_record_seed(seed: u64, j: usize) -> u64 {
    mix64(seed ^ mix64((j as u64 + 1).wrapping_mul(STREAM_SALT)))
}

/// How the noise direction is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// Entries uniform in `[-1, 1)` from the counter generator.
    RandomDirection,
    /// `u_k` proportional to `(-1)^k / k`.
    Alternating,
}

/// Returns `y + delta * u / ||u||_q`, so the q-norm of the perturbation is
/// exactly `delta` up to rounding.
pub fn generate_noise(
    y: &TruncatedSequence,
    delta: f64,
    q: f64,
    seed: u64,
    mode: NoiseMode,
) -> Result<TruncatedSequence> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise level must be positive and finite, got {delta}"
        )));
    }
    let n = y.dim();
    let raw: Vec<f64> = match mode {
        NoiseMode::RandomDirection => {
            let mut rng = CounterRng::new(seed);
            (0..n).map(|_| rng.next_symmetric()).collect()
        }
        NoiseMode::Alternating => (1..=n)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign / k as f64
            })
            .collect(),
    };
    let u = TruncatedSequence::new(raw)?;
    let norm = lq_norm(&u, q)?;
    if norm == 0.0 {
        // unreachable for the modes above; keep the contract total
        return generate_noise(y, delta, q, seed, NoiseMode::Alternating);
    }
    y.add_scaled(delta / norm, &u)
}

/// Parameter-selection rule for a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamRule {
    Discrepancy { tau1: f64, tau2: f64 },
    APriori { c: f64 },
}

/// Geometric noise-level grid `delta0 * ratio^j`, `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaGrid {
    pub delta0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl DeltaGrid {
    pub fn levels(&self) -> Vec<f64> {
        (0..self.count)
            .map(|j| self.delta0 * self.ratio.powi(j as i32))
            .collect()
    }
}

/// A validated experiment configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub operator: OperatorSpec,
    pub solution: SolutionModel,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub delta_grid: DeltaGrid,
    pub seed: u64,
    pub noise_mode: NoiseMode,
    pub param_rule: ParamRule,
    pub c_budget: f64,
}

// ---------------------------------------------------------------------------
// TOML schema
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    n: usize,
    p: f64,
    q: f64,
    operator: OperatorFile,
    solution: SolutionFile,
    delta_grid: DeltaGridFile,
    noise: NoiseFile,
    param_rule: ParamRuleFile,
    c_budget: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorFile {
    kind: String,
    zeta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionFile {
    kind: String,
    mu: Option<f64>,
    c: Option<f64>,
    gamma: Option<f64>,
    support: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeltaGridFile {
    delta0: f64,
    ratio: f64,
    count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseFile {
    seed: u64,
    mode: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamRuleFile {
    rule: String,
    tau1: Option<f64>,
    tau2: Option<f64>,
    c: Option<f64>,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parses and validates a scenario from TOML text.
pub fn scenario_from_str(text: &str) -> Result<Scenario> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| cfg_err(format!("scenario parse error: {e}")))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(cfg_err(format!(
            "unsupported schema_version {} (this build reads {SCHEMA_VERSION})",
            file.schema_version
        )));
    }

    let operator = match file.operator.kind.as_str() {
        "cesaro" => {
            if file.q != 2.0 {
                return Err(cfg_err("the Cesàro operator requires q = 2"));
            }
            OperatorSpec::cesaro(file.n)?
        }
        "diagonal" => {
            if file.q != 2.0 {
                return Err(cfg_err("diagonal operators require q = 2"));
            }
            let zeta = file
                .operator
                .zeta
                .ok_or_else(|| cfg_err("diagonal operator needs a zeta field"))?;
            OperatorSpec::diagonal_power(zeta, file.n)?
        }
        "embedding" => OperatorSpec::embedding(file.q, file.n)?,
        other => return Err(cfg_err(format!("unknown operator kind '{other}'"))),
    };

    let solution = match file.solution.kind.as_str() {
        "holder" => SolutionModel::holder(
            file.solution
                .mu
                .ok_or_else(|| cfg_err("holder solution needs mu"))?,
            file.solution
                .c
                .ok_or_else(|| cfg_err("holder solution needs c"))?,
        )?,
        "exponential" => SolutionModel::exponential(
            file.solution
                .gamma
                .ok_or_else(|| cfg_err("exponential solution needs gamma"))?,
            file.solution
                .c
                .ok_or_else(|| cfg_err("exponential solution needs c"))?,
        )?,
        "sparse" => {
            let raw = file
                .solution
                .support
                .ok_or_else(|| cfg_err("sparse solution needs a support table"))?;
            let mut support = BTreeMap::new();
            for (k, v) in raw {
                let idx: usize = k
                    .parse()
                    .map_err(|_| cfg_err(format!("sparse support index '{k}' is not an integer")))?;
                support.insert(idx, v);
            }
            SolutionModel::sparse(support)?
        }
        other => return Err(cfg_err(format!("unknown solution kind '{other}'"))),
    };

    let noise_mode = match file.noise.mode.as_str() {
        "random_direction" => NoiseMode::RandomDirection,
        "alternating" => NoiseMode::Alternating,
        other => return Err(cfg_err(format!("unknown noise mode '{other}'"))),
    };

    let param_rule = match file.param_rule.rule.as_str() {
        "discrepancy" => {
            let tau1 = file.param_rule.tau1.unwrap_or(1.1);
            let tau2 = file.param_rule.tau2.unwrap_or(1.5);
            DiscrepancyConfig::with_taus(tau1, tau2).map_err(|e| cfg_err(e.to_string()))?;
            ParamRule::Discrepancy { tau1, tau2 }
        }
        "a_priori" => ParamRule::APriori {
            c: file
                .param_rule
                .c
                .ok_or_else(|| cfg_err("a_priori rule needs a constant c"))?,
        },
        other => return Err(cfg_err(format!("unknown parameter rule '{other}'"))),
    };

    let scenario = Scenario {
        operator,
        solution,
        n: file.n,
        p: file.p,
        q: file.q,
        delta_grid: DeltaGrid {
            delta0: file.delta_grid.delta0,
            ratio: file.delta_grid.ratio,
            count: file.delta_grid.count,
        },
        seed: file.noise.seed,
        noise_mode,
        param_rule,
        c_budget: file.c_budget.unwrap_or(DEFAULT_C_BUDGET),
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Loads a scenario from a TOML file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path.as_ref())?;
    scenario_from_str(&text)
}

impl Scenario {
    /// Cross-field validation, including the truncation-error guard: the
    /// smallest noise level must be at least 10x the analytic solution tail
    /// at N, so the measured rates are noise-dominated.
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) || self.p.is_infinite() {
            return Err(cfg_err(format!("p must lie in (1, inf), got {}", self.p)));
        }
        let g = &self.delta_grid;
        if !(g.delta0 > 0.0) || !(g.ratio > 0.0 && g.ratio < 1.0) || g.count == 0 {
            return Err(cfg_err(format!(
                "delta grid must have delta0 > 0, 0 < ratio < 1, count >= 1; got delta0={}, ratio={}, count={}",
                g.delta0, g.ratio, g.count
            )));
        }
        let delta_min = g.delta0 * g.ratio.powi(g.count as i32 - 1);
        let tail = self.solution.analytic_tail(self.n)?;
        if delta_min < 10.0 * tail {
            return Err(cfg_err(format!(
                "smallest noise level {delta_min:.6e} is below 10x the analytic solution tail \
                 {tail:.6e} at N={}; shrink the grid or enlarge N so truncation error cannot \
                 contaminate the measured rates",
                self.n
            )));
        }
        if !(self.c_budget > 0.0) {
            return Err(cfg_err("c_budget must be positive"));
        }
        // fail early when no solver covers the (operator, p, q) combination
        let embedding = matches!(
            self.operator.kind(),
            crate::operators::OperatorKind::Embedding { .. }
        );
        let separable_ok = embedding && self.p == self.q && self.p.is_finite();
        let fista_ok = self.p == 2.0 && self.q == 2.0;
        if !separable_ok && !fista_ok {
            return Err(cfg_err(format!(
                "no solver covers operator {:?} with p={}, q={}",
                self.operator.kind(),
                self.p,
                self.q
            )));
        }
        Ok(())
    }
}

/// Outcome marker of one grid point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordStatus {
    /// Parameter rule and solver completed normally.
    Ok,
    /// The zero solution already satisfied the discrepancy principle.
    Degenerate,
    /// Parameter rule or solver failed; the message explains why.
    Failed(String),
}

impl RecordStatus {
    pub fn as_str(&self) -> &str {
        match self {
            Self::Ok => "ok",
            Self::Degenerate => "degenerate",
            Self::Failed(_) => "error",
        }
    }
}

/// One grid point of a rate experiment.
#[derive(Debug, Clone)]
pub struct RateRunRecord {
    pub delta: f64,
    pub alpha: f64,
    pub error_l1: f64,
    pub residual: f64,
    pub iterations: usize,
    pub phi2_at_delta: f64,
    pub status: RecordStatus,
}

/// Runs the full grid: data synthesis, exact-norm noise, parameter choice,
/// solve, and error measurement. Failures are recorded per grid point; the
/// grid always completes. Records are ordered by decreasing noise level.
pub fn run_rate_experiment(sc: &Scenario) -> Result<Vec<RateRunRecord>> {
    sc.validate()?;
    let x_dag = sc.solution.generate(sc.n)?;
    let y = sc.operator.apply(&x_dag)?;
    let phi2_model = RateModel::supremum(&sc.operator, TailBound::Analytic(&sc.solution), sc.n)?;
    let solver_opts = FistaOptions::default();

    let mut records = Vec::with_capacity(sc.delta_grid.count);
    for (j, delta) in sc.delta_grid.levels().into_iter().enumerate() {
        let phi2_at_delta = phi2_model.eval(delta)?.value;
        let seed_j = derive_record_seed(sc.seed, j);
        let y_delta = generate_noise(&y, delta, sc.q, seed_j, sc.noise_mode)?;

        let outcome = match sc.param_rule {
            ParamRule::Discrepancy { tau1, tau2 } => {
                let cfg = DiscrepancyConfig {
                    tau1,
                    tau2,
                    ..DiscrepancyConfig::default()
                };
                discrepancy_select(&sc.operator, &y_delta, sc.p, sc.q, delta, &cfg, solver_opts)
                    .map(|sel| (sel.alpha, sel.result, sel.degenerate))
            }
            ParamRule::APriori { c } => a_priori_alpha(delta, sc.p, c).and_then(|alpha| {
                let prob = TikhonovProblem::new(
                    sc.operator.clone(),
                    y_delta.clone(),
                    sc.p,
                    sc.q,
                    alpha,
                )?;
                solve_auto(&prob, solver_opts).map(|r| (alpha, r, false))
            }),
        };

        let record = match outcome {
            Ok((alpha, result, degenerate)) => RateRunRecord {
                delta,
                alpha,
                error_l1: result.x.l1_distance(&x_dag)?,
                residual: result.residual_norm,
                iterations: result.iterations,
                phi2_at_delta,
                status: if degenerate {
                    RecordStatus::Degenerate
                } else {
                    RecordStatus::Ok
                },
            },
            Err(e) => RateRunRecord {
                delta,
                alpha: f64::NAN,
                error_l1: f64::NAN,
                residual: f64::NAN,
                iterations: 0,
                phi2_at_delta,
                status: RecordStatus::Failed(e.to_string()),
            },
        };
        records.push(record);
    }
    Ok(records)
}

/// Least-squares fit of `log error` against `log delta`.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Number of records entering the fit.
    pub points: usize,
}

/// Fits the empirical rate exponent over the records with status `ok` and
/// positive error.
///
/// Degenerate records are excluded: there the rule returned the zero
/// solution because the data was within noise of zero, so the error equals
/// `||x_dag||_1` and measures the solution mass, not the solver. At least
/// four usable records are required.
pub fn fit_rate_exponent(records: &[RateRunRecord]) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.status == RecordStatus::Ok && r.error_l1 > 0.0 && r.delta > 0.0)
        .map(|r| (r.delta.ln(), r.error_l1.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "rate fitting needs at least 4 valid records, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "all records share the same delta; no slope to fit".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        points: pts.len(),
    })
}

/// Result of comparing measured errors against the rate envelope.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeCheck {
    /// `max over records of error / phi2(delta)`.
    pub c_fit: f64,
    pub pass: bool,
}

/// Checks `error <= c_budget * phi2(delta)` over all completed records
/// (normal and degenerate). A zero index-function value next to a nonzero
/// error is a contract violation and reported as an error.
pub fn phi_envelope_check(records: &[RateRunRecord], c_budget: f64) -> Result<EnvelopeCheck> {
    let usable: Vec<&RateRunRecord> = records
        .iter()
        .filter(|r| !matches!(r.status, RecordStatus::Failed(_)))
        .collect();
    if usable.is_empty() {
        return Err(Error::InvalidParameter(
            "envelope check needs at least one completed record".into(),
        ));
    }
    let mut c_fit = 0.0_f64;
    for r in usable {
        if r.phi2_at_delta == 0.0 {
            if r.error_l1 > 0.0 {
                return Err(Error::ContractViolation(format!(
                    "phi2({}) = 0 with nonzero error {}",
                    r.delta, r.error_l1
                )));
            }
            continue;
        }
        c_fit = c_fit.max(r.error_l1 / r.phi2_at_delta);
    }
    Ok(EnvelopeCheck {
        c_fit,
        pass: c_fit <= c_budget,
    })
}

/// Renders records as CSV with the fixed column order
/// `delta,alpha,error_l1,residual,iterations,phi2_at_delta,status`.
/// Floats carry 17 significant digits so the output is value-faithful.
pub fn records_to_csv(records: &[RateRunRecord]) -> String {
    let mut out = String::from("delta,alpha,error_l1,residual,iterations,phi2_at_delta,status\n");
    for r in records {
        let status = match &r.status {
            RecordStatus::Failed(msg) => {
                format!("error: {}", msg.replace([',', '\n'], ";"))
            }
            s => s.as_str().to_string(),
        };
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{}\n",
            r.delta, r.alpha, r.error_l1, r.residual, r.iterations, r.phi2_at_delta, status
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const DENOISING: &str = r#"
schema_version = 1
n = 400
p = 2.0
q = 2.0

[operator]
kind = "embedding"

[solution]
kind = "holder"
mu = 1.0
c = 0.2

[delta_grid]
delta0 = 0.1
ratio = 0.25
count = 3

[noise]
seed = 11
mode = "random_direction"

[param_rule]
rule = "discrepancy"
"#;

    #[test]
    fn parses_and_validates_scenario() {
        let sc = scenario_from_str(DENOISING).unwrap();
        assert_eq!(sc.n, 400);
        assert_eq!(sc.noise_mode, NoiseMode::RandomDirection);
        assert!(matches!(sc.param_rule, ParamRule::Discrepancy { tau1, tau2 }
            if tau1 == 1.1 && tau2 == 1.5));
        assert_eq!(sc.c_budget, DEFAULT_C_BUDGET);
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let text = DENOISING.replace("schema_version = 1", "schema_version = 2");
        assert!(matches!(scenario_from_str(&text), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_truncation_guard_violation() {
        // tail at N=400 is c/400; delta_min = 0.1/16 = 6.25e-3 needs c <= 0.25
        let text = DENOISING.replace("c = 0.2", "c = 40.0");
        let err = scenario_from_str(&text).unwrap_err();
        assert!(err.to_string().contains("analytic solution tail"));
    }

    #[test]
    fn rejects_unsolvable_combination() {
        let text = DENOISING
            .replace("kind = \"embedding\"", "kind = \"cesaro\"")
            .replace("p = 2.0", "p = 3.0");
        let err = scenario_from_str(&text).unwrap_err();
        assert!(err.to_string().contains("no solver"));
    }

    #[test]
    fn noise_norm_is_exact() {
        let y = TruncatedSequence::zeros(1000).unwrap();
        for &q in &[1.0, 2.0, 4.0, f64::INFINITY] {
            for &delta in &[1e-6, 0.1, 3.0] {
                let yd = generate_noise(&y, delta, q, 99, NoiseMode::RandomDirection).unwrap();
                let norm = lq_norm(&yd.add_scaled(-1.0, &y).unwrap(), q).unwrap();
                assert!(
                    (norm - delta).abs() <= 1e-14 * delta,
                    "q={q} delta={delta}: got {norm}"
                );
            }
        }
    }

    #[test]
    fn noise_is_deterministic_and_seed_sensitive() {
        let y = TruncatedSequence::zeros(64).unwrap();
        let a = generate_noise(&y, 0.5, 2.0, 7, NoiseMode::RandomDirection).unwrap();
        let b = generate_noise(&y, 0.5, 2.0, 7, NoiseMode::RandomDirection).unwrap();
        let c = generate_noise(&y, 0.5, 2.0, 8, NoiseMode::RandomDirection).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn alternating_noise_formula() {
        let y = TruncatedSequence::zeros(2).unwrap();
        let yd = generate_noise(&y, 1.0, 2.0, 0, NoiseMode::Alternating).unwrap();
        let norm = (1.0_f64 + 0.25).sqrt();
        assert!((yd.values()[0] - (-1.0 / norm)).abs() < 1e-15);
        assert!((yd.values()[1] - 0.5 / norm).abs() < 1e-15);
    }

    #[test]
    fn record_seeds_decorrelate_grid_points() {
        let s0 = derive_record_seed(7, 0);
        let s1 = derive_record_seed(7, 1);
        assert_ne!(s0, s1);
        assert_ne!(derive_record_seed(7, 0), derive_record_seed(8, 0));
    }

    #[test]
    fn run_produces_ordered_in_window_records() {
        let sc = scenario_from_str(DENOISING).unwrap();
        let records = run_rate_experiment(&sc).unwrap();
        assert_eq!(records.len(), 3);
        for w in records.windows(2) {
            assert!(w[0].delta > w[1].delta);
        }
        for r in &records {
            match r.status {
                RecordStatus::Ok => {
                    let ratio = r.residual / r.delta;
                    assert!((1.1..=1.5).contains(&ratio), "ratio {ratio}");
                }
                RecordStatus::Degenerate => {
                    assert!(r.residual <= 1.5 * r.delta);
                }
                RecordStatus::Failed(ref m) => panic!("record failed: {m}"),
            }
            assert!(r.error_l1.is_finite());
            assert!(r.phi2_at_delta > 0.0);
        }
    }

    #[test]
    fn sparse_truth_recovers_support_for_small_delta() {
        let text = r#"
schema_version = 1
n = 100
p = 2.0
q = 2.0

[operator]
kind = "embedding"

[solution]
kind = "sparse"
support = { 1 = 1.0, 5 = -0.7, 9 = 0.4 }

[delta_grid]
delta0 = 0.01
ratio = 0.25
count = 3

[noise]
seed = 3
mode = "random_direction"

[param_rule]
rule = "discrepancy"
"#;
        let sc = scenario_from_str(text).unwrap();
        let records = run_rate_experiment(&sc).unwrap();
        let x_dag = sc.solution.generate(sc.n).unwrap();
        let y = sc.operator.apply(&x_dag).unwrap();
        // rebuild the smallest-delta solve and check exact support recovery
        let j = records.len() - 1;
        let r = &records[j];
        assert_eq!(r.status, RecordStatus::Ok);
        let y_delta = generate_noise(
            &y,
            r.delta,
            sc.q,
            derive_record_seed(sc.seed, j),
            sc.noise_mode,
        )
        .unwrap();
        let prob =
            TikhonovProblem::new(sc.operator.clone(), y_delta, sc.p, sc.q, r.alpha).unwrap();
        let sol = crate::solver::solve_separable(&prob).unwrap();
        assert_eq!(crate::seq::l0_count(&sol.x, 0.0).unwrap(), 3);
    }

    #[test]
    fn zero_truth_degenerates_everywhere() {
        let text = r#"
schema_version = 1
n = 50
p = 2.0
q = 2.0

[operator]
kind = "embedding"

[solution]
kind = "sparse"
support = {}

[delta_grid]
delta0 = 0.1
ratio = 0.5
count = 4

[noise]
seed = 5
mode = "random_direction"

[param_rule]
rule = "discrepancy"
"#;
        let sc = scenario_from_str(text).unwrap();
        let records = run_rate_experiment(&sc).unwrap();
        for r in &records {
            assert_eq!(r.status, RecordStatus::Degenerate);
            assert_eq!(r.error_l1, 0.0);
            assert!((r.residual - r.delta).abs() <= 1e-14 * r.delta);
        }
    }

    #[test]
    fn fit_recovers_exact_power_laws() {
        let mk = |errs: &[(f64, f64)]| -> Vec<RateRunRecord> {
            errs.iter()
                .map(|&(d, e)| RateRunRecord {
                    delta: d,
                    alpha: 1.0,
                    error_l1: e,
                    residual: d,
                    iterations: 1,
                    phi2_at_delta: 1.0,
                    status: RecordStatus::Ok,
                })
                .collect()
        };
        let deltas = [0.1, 0.05, 0.01, 0.005, 0.001];
        let recs = mk(&deltas.map(|d: f64| (d, d.powf(2.0 / 3.0))));
        let fit = fit_rate_exponent(&recs).unwrap();
        assert!((fit.slope - 2.0 / 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let recs = mk(&deltas.map(|d: f64| (d, 3.0 * d)));
        let fit = fit_rate_exponent(&recs).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);

        let short = mk(&[(0.1, 0.1), (0.05, 0.05), (0.01, 0.01)]);
        assert!(fit_rate_exponent(&short).is_err());
    }

    #[test]
    fn envelope_check_ratios() {
        let mk = |e: f64, phi: f64| RateRunRecord {
            delta: 0.1,
            alpha: 1.0,
            error_l1: e,
            residual: 0.11,
            iterations: 0,
            phi2_at_delta: phi,
            status: RecordStatus::Ok,
        };
        let recs = vec![mk(1.0, 1.0), mk(0.5, 1.0)];
        let check = phi_envelope_check(&recs, 4.0).unwrap();
        assert_eq!(check.c_fit, 1.0);
        assert!(check.pass);

        let recs = vec![mk(0.5, 1.0)];
        assert_eq!(phi_envelope_check(&recs, 4.0).unwrap().c_fit, 0.5);

        let recs = vec![mk(0.5, 0.0)];
        assert!(matches!(
            phi_envelope_check(&recs, 4.0),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn csv_is_byte_deterministic() {
        let sc = scenario_from_str(DENOISING).unwrap();
        let a = records_to_csv(&run_rate_experiment(&sc).unwrap());
        let b = records_to_csv(&run_rate_experiment(&sc).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(
            "delta,alpha,error_l1,residual,iterations,phi2_at_delta,status\n"
        ));
    }
}
