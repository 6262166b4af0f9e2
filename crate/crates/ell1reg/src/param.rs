//! Regularization-parameter selection.
//!
//! The a-posteriori rule brackets the residual inside `[tau1*delta,
//! tau2*delta]` by bisection on `log alpha`, which is justified by the
//! monotone dependence of the residual norm on `alpha`. An a-priori rule
//! `alpha = c * delta^{p-1}` is provided for convergence (not rate) studies.

use crate::error::{Error, Result};
use crate::seq::{lq_norm, TruncatedSequence};
use crate::solver::{solve_auto, FistaOptions, SolverResult, TikhonovProblem};

/// Configuration of the residual-bracketing rule.
#[derive(Debug, Clone, Copy)]
pub struct DiscrepancyConfig {
    pub tau1: f64,
    pub tau2: f64,
    /// Search bracket for `alpha`; `None` selects
    /// `[1e-12, 2 * ||A* y||_inf]` (the upper end forces the zero solution).
    pub alpha_bracket: Option<(f64, f64)>,
    pub max_bisections: usize,
}

impl Default for DiscrepancyConfig {
    fn default() -> Self {
        Self {
            tau1: 1.1,
            tau2: 1.5,
            alpha_bracket: None,
            max_bisections: 60,
        }
    }
}

impl DiscrepancyConfig {
    pub fn with_taus(tau1: f64, tau2: f64) -> Result<Self> {
        let cfg = Self {
            tau1,
            tau2,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau1 > 1.0 && self.tau2 >= self.tau1 && self.tau2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "discrepancy factors must satisfy 1 < tau1 <= tau2 < inf, got tau1={}, tau2={}",
                self.tau1, self.tau2
            )));
        }
        if let Some((lo, hi)) = self.alpha_bracket {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::InvalidParameter(format!(
                    "alpha bracket must satisfy 0 < lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        if self.max_bisections == 0 {
            return Err(Error::InvalidParameter(
                "at least one bisection step is required".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a discrepancy-principle selection.
#[derive(Debug, Clone)]
pub struct DiscrepancySelection {
    pub alpha: f64,
    pub result: SolverResult,
    /// True when `||y||_q <= tau2 * delta` already, in which case the zero
    /// solution satisfies the principle and no bisection runs.
    pub degenerate: bool,
}

/// Selects `alpha` so that the residual lands in `[tau1*delta, tau2*delta]`.
///
/// Bisection on `log alpha` accepts the first in-window residual. If the
/// initial bracket does not straddle the window it is widened by a factor of
/// 1000 per side, at most three times, before giving up with a trace of all
/// `(alpha, residual)` evaluations.
pub fn discrepancy_select(
    op: &crate::operators::OperatorSpec,
    y_delta: &TruncatedSequence,
    p: f64,
    q: f64,
    delta: f64,
    cfg: &DiscrepancyConfig,
    solver_opts: FistaOptions,
) -> Result<DiscrepancySelection> {
    cfg.validate()?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise level must be positive and finite, got {delta}"
        )));
    }

    let data_norm = lq_norm(y_delta, q)?;
    let (mut lo, mut hi) = match cfg.alpha_bracket {
        Some(b) => b,
        None => {
            let dual_scale = lq_norm(&op.apply_adjoint(y_delta)?, f64::INFINITY)?;
            (1e-12, (2.0 * dual_scale).max(1e-6))
        }
    };

    // zero solution already satisfies the principle
    if data_norm <= cfg.tau2 * delta {
        let prob = TikhonovProblem::new(op.clone(), y_delta.clone(), p, q, hi)?;
        let x = TruncatedSequence::zeros(op.dim())?;
        let objective = crate::solver::objective(&prob, &x)?;
        return Ok(DiscrepancySelection {
            alpha: hi,
            result: SolverResult {
                x,
                objective,
                residual_norm: data_norm,
                iterations: 0,
                converged: true,
            },
            degenerate: true,
        });
    }

    let lower = cfg.tau1 * delta;
    let upper = cfg.tau2 * delta;
    let mut trace: Vec<(f64, f64)> = Vec::new();

    let solve_at = |alpha: f64, trace: &mut Vec<(f64, f64)>| -> Result<SolverResult> {
        let prob = TikhonovProblem::new(op.clone(), y_delta.clone(), p, q, alpha)?;
        let result = solve_auto(&prob, solver_opts)?;
        trace.push((alpha, result.residual_norm));
        Ok(result)
    };

    // make sure the bracket straddles the window
    for _ in 0..3 {
        let at_lo = solve_at(lo, &mut trace)?;
        if at_lo.residual_norm < upper {
            break;
        }
        lo /= 1e3;
    }
    for _ in 0..3 {
        let at_hi = solve_at(hi, &mut trace)?;
        if at_hi.residual_norm > lower {
            break;
        }
        hi *= 1e3;
    }

    let mut log_lo = lo.log10();
    let mut log_hi = hi.log10();
    for _ in 0..cfg.max_bisections {
        let alpha = 10f64.powf(0.5 * (log_lo + log_hi));
        let result = solve_at(alpha, &mut trace)?;
        let r = result.residual_norm;
        if r < lower {
            log_lo = alpha.log10();
        } else if r > upper {
            log_hi = alpha.log10();
        } else {
            return Ok(DiscrepancySelection {
                alpha,
                result,
                degenerate: false,
            });
        }
    }

    Err(Error::NoConvergence {
        context: format!(
            "no alpha with residual in [{lower:.6e}, {upper:.6e}] after {} bisections",
            cfg.max_bisections
        ),
        trace,
    })
}

/// A-priori rule `alpha = c * delta^{p-1}`, which satisfies `alpha -> 0`
/// and `delta^p / alpha = delta / c -> 0` as `delta -> 0`.
pub fn a_priori_alpha(delta: f64, p: f64, c: f64) -> Result<f64> {
    if !(delta > 0.0) || !(c > 0.0) || !(p > 1.0) || p.is_infinite() || p.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "a-priori rule requires delta > 0, c > 0, 1 < p < inf; got delta={delta}, c={c}, p={p}"
        )));
    }
    Ok(c * delta.powf(p - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::OperatorSpec;
    use crate::seq::SolutionModel;

    #[test]
    fn a_priori_examples() {
        assert_eq!(a_priori_alpha(0.01, 2.0, 1.0).unwrap(), 0.01);
        assert!((a_priori_alpha(0.1, 3.0, 2.0).unwrap() - 0.02).abs() < 1e-15);
        assert!(a_priori_alpha(0.0, 2.0, 1.0).is_err());
        assert!(a_priori_alpha(0.1, 1.0, 1.0).is_err());
        // alpha -> 0 and delta^p/alpha -> 0 along delta = 2^{-j}
        let mut prev_alpha = f64::INFINITY;
        let mut prev_ratio = f64::INFINITY;
        for j in 1..=20 {
            let d = 2.0_f64.powi(-j);
            let a = a_priori_alpha(d, 2.0, 1.0).unwrap();
            let ratio = d.powi(2) / a;
            assert!(a < prev_alpha && ratio < prev_ratio);
            prev_alpha = a;
            prev_ratio = ratio;
        }
    }

    #[test]
    fn config_validation() {
        assert!(DiscrepancyConfig::with_taus(1.1, 1.5).is_ok());
        assert!(DiscrepancyConfig::with_taus(1.0, 1.5).is_err());
        assert!(DiscrepancyConfig::with_taus(1.4, 1.2).is_err());
    }

    #[test]
    fn selection_lands_in_window_for_embedding() {
        let n = 500;
        let model = SolutionModel::holder(1.0, 1.0).unwrap();
        let x_dag = model.generate(n).unwrap();
        let op = OperatorSpec::embedding(2.0, n).unwrap();
        let y = op.apply(&x_dag).unwrap();
        // deterministic perturbation with exact l2 norm delta
        let delta = 0.01;
        let raw = TruncatedSequence::new(
            (1..=n)
                .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / k as f64)
                .collect(),
        )
        .unwrap();
        let scale = delta / lq_norm(&raw, 2.0).unwrap();
        let y_delta = y.add_scaled(scale, &raw).unwrap();

        let cfg = DiscrepancyConfig::default();
        let sel = discrepancy_select(
            &op,
            &y_delta,
            2.0,
            2.0,
            delta,
            &cfg,
            FistaOptions::default(),
        )
        .unwrap();
        assert!(!sel.degenerate);
        assert!(sel.result.residual_norm >= 1.1 * delta);
        assert!(sel.result.residual_norm <= 1.5 * delta);
    }

    #[test]
    fn selection_degenerates_for_large_delta() {
        let n = 50;
        let op = OperatorSpec::embedding(2.0, n).unwrap();
        let y = TruncatedSequence::unit(n, 1).unwrap();
        let delta = 2.0; // tau2 * delta exceeds ||y|| = 1
        let sel = discrepancy_select(
            &op,
            &y,
            2.0,
            2.0,
            delta,
            &DiscrepancyConfig::default(),
            FistaOptions::default(),
        )
        .unwrap();
        assert!(sel.degenerate);
        assert!(sel.result.x.values().iter().all(|&v| v == 0.0));
        assert_eq!(sel.result.residual_norm, 1.0);
    }

    #[test]
    fn residual_is_monotone_in_alpha() {
        let n = 120;
        let op = OperatorSpec::cesaro(n).unwrap();
        let model = SolutionModel::holder(1.0, 0.5).unwrap();
        let y = op.apply(&model.generate(n).unwrap()).unwrap();
        let mut prev = -1.0;
        for i in 0..20 {
            let alpha = 1e-8 * 10f64.powf(i as f64 * 0.4);
            let prob = TikhonovProblem::new(op.clone(), y.clone(), 2.0, 2.0, alpha).unwrap();
            let r = solve_auto(&prob, FistaOptions::default()).unwrap();
            assert!(
                r.residual_norm >= prev - 1e-10,
                "residual dropped at alpha={alpha}"
            );
            prev = r.residual_norm;
        }
    }

    #[test]
    fn selection_on_cesaro_lands_in_window() {
        let n = 200;
        let op = OperatorSpec::cesaro(n).unwrap();
        let model = SolutionModel::holder(1.0, 0.5).unwrap();
        let y = op.apply(&model.generate(n).unwrap()).unwrap();
        let delta = 0.02;
        let raw = TruncatedSequence::new(
            (1..=n)
                .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / k as f64)
                .collect(),
        )
        .unwrap();
        let scale = delta / lq_norm(&raw, 2.0).unwrap();
        let y_delta = y.add_scaled(scale, &raw).unwrap();
        let sel = discrepancy_select(
            &op,
            &y_delta,
            2.0,
            2.0,
            delta,
            &DiscrepancyConfig::default(),
            FistaOptions::default(),
        )
        .unwrap();
        assert!(!sel.degenerate);
        let ratio = sel.result.residual_norm / delta;
        assert!((1.1..=1.5).contains(&ratio), "residual ratio {ratio}");
    }
}
