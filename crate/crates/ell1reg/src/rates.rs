//! Convergence-rate index functions.
//!
//! A rate model pairs a nonincreasing solution-tail function with a
//! nondecreasing dual-growth function. Two growth choices matter:
//!
//! * the cumulative sum of the dual norms of the source elements, which
//!   yields the baseline index function (`phi1`), and
//! * the supremum of the dual norm over all sign combinations of source
//!   elements, which yields the improved index function (`phi2`).
//!
//! The supremum admits closed forms for all three operator families; a
//! brute-force enumeration over sign patterns serves as an independent
//! oracle for those formulas.

use crate::error::{Error, Result};
use crate::operators::{OperatorKind, OperatorSpec, SigmaRule};
use crate::seq::{compensated_sum, lq_norm, tail_sum, SolutionModel, TruncatedSequence};

/// Where the tail values of a rate model come from.
#[derive(Debug, Clone, Copy)]
pub enum TailBound<'a> {
    /// Closed-form tail bound of a solution model.
    Analytic(&'a SolutionModel),
    /// Exact partial tails of a concrete truncation.
    Exact(&'a TruncatedSequence),
}

impl TailBound<'_> {
    fn value(&self, n: usize) -> Result<f64> {
        match self {
            Self::Analytic(model) => model.analytic_tail(n),
            Self::Exact(x) => tail_sum(x, n),
        }
    }
}

/// Which dual-growth function a rate model carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthKind {
    CumulativeSum,
    Supremum,
}

/// Evaluation of an index function: the value and the minimizing cut index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEval {
    pub value: f64,
    pub n_star: usize,
}

/// Tabulated tail and dual-growth values for cut indices `1..=n_max`.
#[derive(Debug, Clone)]
pub struct RateModel {
    tail: Vec<f64>,
    growth: Vec<f64>,
    kind: GrowthKind,
}

impl RateModel {
    /// Builds a model from explicit tables. The tail must be nonincreasing
    /// and the growth nondecreasing, both nonnegative.
    pub fn from_tables(tail: Vec<f64>, growth: Vec<f64>, kind: GrowthKind) -> Result<Self> {
        if tail.is_empty() || tail.len() != growth.len() {
            return Err(Error::DimensionMismatch {
                expected: tail.len().max(1),
                got: growth.len(),
            });
        }
        let ok_tail = tail.iter().all(|v| v.is_finite() && *v >= 0.0)
            && tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300);
        let ok_growth = growth.iter().all(|v| v.is_finite() && *v >= 0.0)
            && growth.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12) - 1e-300);
        if !ok_tail {
            return Err(Error::InvalidParameter(
                "tail table must be nonnegative and nonincreasing".into(),
            ));
        }
        if !ok_growth {
            return Err(Error::InvalidParameter(
                "growth table must be nonnegative and nondecreasing".into(),
            ));
        }
        Ok(Self { tail, growth, kind })
    }

    /// Model whose growth is the cumulative sum of source-element dual norms.
    pub fn cumulative(op: &OperatorSpec, tail: TailBound<'_>, n_max: usize) -> Result<Self> {
        if n_max == 0 || n_max > op.dim() {
            return Err(Error::InvalidParameter(format!(
                "n_max must lie in 1..={}, got {n_max}",
                op.dim()
            )));
        }
        let tails = (1..=n_max).map(|n| tail.value(n)).collect::<Result<_>>()?;
        let mut growth = Vec::with_capacity(n_max);
        let mut acc = 0.0;
        for k in 1..=n_max {
            acc += op.source_element_norm(k)?;
            growth.push(acc);
        }
        Self::from_tables(tails, growth, GrowthKind::CumulativeSum)
    }

    /// Model whose growth is the sign-combination supremum, via the
    /// per-family closed forms.
    pub fn supremum(op: &OperatorSpec, tail: TailBound<'_>, n_max: usize) -> Result<Self> {
        if n_max == 0 || n_max > op.dim() {
            return Err(Error::InvalidParameter(format!(
                "n_max must lie in 1..={}, got {n_max}",
                op.dim()
            )));
        }
        let tails = (1..=n_max).map(|n| tail.value(n)).collect::<Result<_>>()?;
        let growth = (1..=n_max)
            .map(|n| sup_closed_form(op, n))
            .collect::<Result<_>>()?;
        Self::from_tables(tails, growth, GrowthKind::Supremum)
    }

    pub fn kind(&self) -> GrowthKind {
        self.kind
    }

    pub fn n_max(&self) -> usize {
        self.tail.len()
    }

    /// `2 * min over n in 1..=n_max of (tail(n) + t * growth(n))`.
    ///
    /// `t = 0` is admitted and returns the limit `2 * tail(n_max)`; negative
    /// or non-finite `t` is rejected. The full range is scanned; the
    /// objective is unimodal in practice but the scan is cheap and safe.
    pub fn eval(&self, t: f64) -> Result<PhiEval> {
        if t.is_nan() || t.is_infinite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "index functions are evaluated at finite t >= 0, got {t}"
            )));
        }
        let mut best = f64::INFINITY;
        let mut n_star = 1;
        for (i, (tail, growth)) in self.tail.iter().zip(&self.growth).enumerate() {
            let v = tail + t * growth;
            if v < best {
                best = v;
                n_star = i + 1;
            }
        }
        Ok(PhiEval {
            value: 2.0 * best,
            n_star,
        })
    }
}

/// Baseline index function (cumulative-sum growth).
pub fn phi1(t: f64, model: &RateModel) -> Result<PhiEval> {
    if model.kind() != GrowthKind::CumulativeSum {
        return Err(Error::Unsupported(
            "phi1 requires a cumulative-sum rate model".into(),
        ));
    }
    model.eval(t)
}

/// Improved index function (supremum growth).
pub fn phi2(t: f64, model: &RateModel) -> Result<PhiEval> {
    if model.kind() != GrowthKind::Supremum {
        return Err(Error::Unsupported(
            "phi2 requires a supremum rate model".into(),
        ));
    }
    model.eval(t)
}

/// Supremum growth for the Cesàro source elements:
/// `sqrt(4n^3/3 - n^2 + 2n/3)`, attained by the alternating sign pattern.
pub fn cesaro_sup_closed_form(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    // equivalently n^2 + 4 sum_{k<n} k^2; exact in integers, so small n
    // evaluate without rounding
    let n = n as u128;
    let sq = n * n + 2 * (n - 1) * n * (2 * n - 1) / 3;
    (sq as f64).sqrt()
}

/// Supremum growth for the embedding: `n^{1 - 1/q}` for finite `q >= 1`
/// and `n` when `q = inf`.
pub fn embedding_sup_closed_form(n: usize, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "embedding exponent must satisfy q >= 1 or q = inf, got {q}"
        )));
    }
    let theta = if q.is_infinite() { 1.0 } else { 1.0 - 1.0 / q };
    Ok((n as f64).powf(theta))
}

/// Supremum growth for a diagonal operator: `sqrt(sum_{k<=n} 1/sigma_k^2)`.
pub fn diagonal_sup_closed_form(n: usize, rule: &SigmaRule) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let terms = (1..=n)
        .map(|k| rule.sigma(k).map(|s| 1.0 / (s * s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(compensated_sum(terms.into_iter()).sqrt())
}

/// Dispatches to the closed form matching the operator family.
pub fn sup_closed_form(op: &OperatorSpec, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    match op.kind() {
        OperatorKind::Cesaro => Ok(cesaro_sup_closed_form(n)),
        OperatorKind::Embedding { q } => embedding_sup_closed_form(n, *q),
        OperatorKind::Diagonal(rule) => diagonal_sup_closed_form(n, rule),
    }
}

/// Exhaustive maximum of the dual combination norm over all `3^n` sign
/// patterns, with one attaining pattern (the first in enumeration order).
///
/// The enumeration budget caps `n` at 16. Deterministic.
pub fn sup_bruteforce(op: &OperatorSpec, n: usize) -> Result<(f64, Vec<i8>)> {
    if n == 0 || n > op.dim() {
        return Err(Error::InvalidParameter(format!(
            "n must lie in 1..={}, got {n}",
            op.dim()
        )));
    }
    if n > 16 {
        return Err(Error::BudgetExceeded(format!(
            "sign enumeration is limited to n <= 16 (3^n patterns), got {n}"
        )));
    }
    let mut signs = vec![-1_i8; n];
    let mut best = op.dual_combination_norm(&signs)?;
    let mut argmax = signs.clone();
    loop {
        // odometer over {-1, 0, 1}^n
        let mut pos = 0;
        while pos < n {
            if signs[pos] < 1 {
                signs[pos] += 1;
                break;
            }
            signs[pos] = -1;
            pos += 1;
        }
        if pos == n {
            break;
        }
        let v = op.dual_combination_norm(&signs)?;
        if v > best {
            best = v;
            argmax.copy_from_slice(&signs);
        }
    }
    Ok((best, argmax))
}

/// Predicted decay of the reconstruction error as the noise level shrinks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatePrediction {
    /// `O(delta^{mu/(mu+nu)})` for power-type tails against growth `n^nu`.
    Holder { mu: f64, nu: f64 },
    /// `O(delta * log(1/delta)^{nu/gamma})` for exponential tails.
    Exponential { gamma: f64, nu: f64 },
}

impl RatePrediction {
    /// The Holder exponent, when one exists.
    pub fn exponent(&self) -> Option<f64> {
        match self {
            Self::Holder { mu, nu } => Some(mu / (mu + nu)),
            Self::Exponential { .. } => None,
        }
    }

    /// Evaluates the rate function at a noise level `delta in (0, 1)`.
    pub fn evaluate(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rate functions are evaluated for 0 < delta < 1, got {delta}"
            )));
        }
        Ok(match self {
            Self::Holder { mu, nu } => delta.powf(mu / (mu + nu)),
            Self::Exponential { gamma, nu } => delta * (1.0 / delta).ln().powf(nu / gamma),
        })
    }
}

/// `mu / (mu + nu)`, the Holder rate exponent.
pub fn holder_exponent(mu: f64, nu: f64) -> Result<f64> {
    if !(mu > 0.0) || !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Holder exponent requires mu > 0 and nu > 0, got mu={mu}, nu={nu}"
        )));
    }
    Ok(mu / (mu + nu))
}

/// Slack of the variational inequality
/// `||x - xd||_1 <= ||x||_1 - ||xd||_1 + phi(||Ax - A xd||_Y)`:
/// returns RHS minus LHS, which the rate theory guarantees to be
/// nonnegative (up to rounding) for index functions built from valid
/// source elements.
pub fn verify_variational_inequality(
    op: &OperatorSpec,
    x: &TruncatedSequence,
    x_dag: &TruncatedSequence,
    phi: &RateModel,
) -> Result<f64> {
    if x.dim() != x_dag.dim() {
        return Err(Error::DimensionMismatch {
            expected: x_dag.dim(),
            got: x.dim(),
        });
    }
    let q = op.image_exponent();
    let residual = lq_norm(&op.apply(x)?.add_scaled(-1.0, &op.apply(x_dag)?)?, q)?;
    let lhs = x.l1_distance(x_dag)?;
    let rhs = lq_norm(x, 1.0)? - lq_norm(x_dag, 1.0)? + phi.eval(residual)?.value;
    Ok(rhs - lhs)
}

/// The three quantities chained in the derivation of the improved index
/// function, evaluated at cut index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProofChain {
    /// `||x - xd||_1 - ||x||_1 + ||xd||_1`
    pub lhs: f64,
    /// `2 (tail(n) + sum_{k<=n} |x_k - xd_k|)`
    pub pointwise_bound: f64,
    /// `2 (tail(n) + ||Ax - A xd||_Y * S(n))` with `S` the supremum growth
    pub supremum_bound: f64,
}

/// Evaluates the bound chain `lhs <= pointwise <= supremum` at cut `n`.
pub fn verify_proof_chain(
    op: &OperatorSpec,
    x: &TruncatedSequence,
    x_dag: &TruncatedSequence,
    n: usize,
) -> Result<ProofChain> {
    if x.dim() != x_dag.dim() {
        return Err(Error::DimensionMismatch {
            expected: x_dag.dim(),
            got: x.dim(),
        });
    }
    if n == 0 || n > x.dim() {
        return Err(Error::IndexOutOfRange {
            index: n,
            max: x.dim(),
        });
    }
    let tail = tail_sum(x_dag, n)?;
    let lhs = x.l1_distance(x_dag)? - lq_norm(x, 1.0)? + lq_norm(x_dag, 1.0)?;
    let head_diff = compensated_sum(
        x.values()[..n]
            .iter()
            .zip(&x_dag.values()[..n])
            .map(|(a, b)| (a - b).abs()),
    );
    let q = op.image_exponent();
    let residual = lq_norm(&op.apply(x)?.add_scaled(-1.0, &op.apply(x_dag)?)?, q)?;
    Ok(ProofChain {
        lhs,
        pointwise_bound: 2.0 * (tail + head_diff),
        supremum_bound: 2.0 * (tail + residual * sup_closed_form(op, n)?),
    })
}
