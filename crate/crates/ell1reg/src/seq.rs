//! Finite truncations of real sequences: norms, tails, sparsity counts,
//! and generators of exact solutions with known tail bounds.
//!
//! Indices are 1-based in the mathematical contracts; storage is a plain
//! `Vec<f64>` where entry `k` lives at `values()[k - 1]`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Compensated (Neumaier) summation. Keeps norm and tail computations
/// accurate to a few ulps even over 10^6-term sums.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// The first `n` entries of a real sequence, all finite, with `n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSequence {
    values: Vec<f64>,
}

impl TruncatedSequence {
    /// Wraps a nonempty vector of finite reals.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "truncation level must be at least 1".into(),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sequence entries must be finite, got {bad}"
            )));
        }
        Ok(Self { values })
    }

    /// The zero sequence of length `n`.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    /// The unit sequence with a single 1 at (1-based) position `k`.
    pub fn unit(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange { index: k, max: n });
        }
        let mut v = vec![0.0; n];
        v[k - 1] = 1.0;
        Self::new(v)
    }

    /// Truncation level N.
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entry at 1-based index `k`.
    pub fn entry(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.dim() {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.dim(),
            });
        }
        Ok(self.values[k - 1])
    }

    /// Componentwise `self + scale * other`.
    pub fn add_scaled(&self, scale: f64, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Self::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + scale * b)
                .collect(),
        )
    }

    /// `l1` distance to another sequence of the same length.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(compensated_sum(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs()),
        ))
    }
}

/// `l^q` norm of a truncation, `q` in `[1, inf]` (`f64::INFINITY` for the sup norm).
pub fn lq_norm(x: &TruncatedSequence, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "norm exponent must satisfy q >= 1 or q = inf, got {q}"
        )));
    }
    let vals = x.values();
    if q.is_infinite() {
        return Ok(vals.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    if q == 1.0 {
        return Ok(compensated_sum(vals.iter().map(|v| v.abs())));
    }
    if q == 2.0 {
        // scale to avoid overflow/underflow in squares
        let m = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return Ok(0.0);
        }
        let s = compensated_sum(vals.iter().map(|v| {
            let r = v / m;
            r * r
        }));
        return Ok(m * s.sqrt());
    }
    let m = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return Ok(0.0);
    }
    let s = compensated_sum(vals.iter().map(|v| (v.abs() / m).powf(q)));
    Ok(m * s.powf(1.0 / q))
}

/// Partial tail `sum_{k=n+1}^{N} |x_k|`; `tail_sum(x, 0)` is the full `l1` norm.
pub fn tail_sum(x: &TruncatedSequence, n: usize) -> Result<f64> {
    if n > x.dim() {
        return Err(Error::IndexOutOfRange {
            index: n,
            max: x.dim(),
        });
    }
    Ok(compensated_sum(x.values()[n..].iter().map(|v| v.abs())))
}

/// Number of entries with `|x_k| > zero_tol`; exact-zero semantics at `zero_tol = 0`.
pub fn l0_count(x: &TruncatedSequence, zero_tol: f64) -> Result<usize> {
    if zero_tol < 0.0 || zero_tol.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "zero tolerance must be nonnegative, got {zero_tol}"
        )));
    }
    Ok(x.values().iter().filter(|v| v.abs() > zero_tol).count())
}

/// Generator of exact solutions with an analytically known `l1` tail bound.
///
/// All generated entries are nonnegative for the tail models; signs play no
/// role in any `l1` or tail quantity, and nonnegative entries keep the
/// tail oracles exact.
#[derive(Debug, Clone, PartialEq)]
pub enum SolutionModel {
    /// `x_k = c * k^{-(mu+1)}`; tail bound `(c/mu) * n^{-mu}` by integral comparison.
    HolderTail { mu: f64, c: f64 },
    /// `x_k = c * exp(-k^gamma)` with `gamma >= 1`; tail bound `(c/gamma) * exp(-n^gamma)`.
    ///
    /// For `gamma < 1` no constant multiple of `exp(-n^gamma)` dominates the
    /// true tail (the ratio grows like `n^{1-gamma}`), so such models are
    /// rejected at construction.
    ExponentialTail { gamma: f64, c: f64 },
    /// Finitely many prescribed nonzeros (1-based index -> value); tail is
    /// exactly zero beyond the largest support index.
    Sparse { support: BTreeMap<usize, f64> },
}

impl SolutionModel {
    pub fn holder(mu: f64, c: f64) -> Result<Self> {
        if !(mu > 0.0) || !(c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Holder model requires mu > 0 and c > 0, got mu={mu}, c={c}"
            )));
        }
        Ok(Self::HolderTail { mu, c })
    }

    pub fn exponential(gamma: f64, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponential model requires c > 0, got {c}"
            )));
        }
        if !(gamma >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "exponential model requires gamma >= 1 so that a constant-times-exp(-n^gamma) tail bound exists, got {gamma}"
            )));
        }
        Ok(Self::ExponentialTail { gamma, c })
    }

    pub fn sparse(support: BTreeMap<usize, f64>) -> Result<Self> {
        if support.keys().any(|&k| k == 0) {
            return Err(Error::InvalidParameter(
                "sparse support indices are 1-based and must be positive".into(),
            ));
        }
        if let Some(bad) = support.values().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sparse support values must be finite, got {bad}"
            )));
        }
        Ok(Self::Sparse { support })
    }

    /// Deterministically generates the first `n` entries of the model.
    pub fn generate(&self, n: usize) -> Result<TruncatedSequence> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "truncation level must be at least 1".into(),
            ));
        }
        let values = match self {
            Self::HolderTail { mu, c } => (1..=n)
                .map(|k| c * (k as f64).powf(-(mu + 1.0)))
                .collect(),
            Self::ExponentialTail { gamma, c } => (1..=n)
                .map(|k| c * (-(k as f64).powf(*gamma)).exp())
                .collect(),
            Self::Sparse { support } => {
                let mut v = vec![0.0; n];
                for (&k, &val) in support {
                    if k <= n {
                        v[k - 1] = val;
                    }
                }
                v
            }
        };
        TruncatedSequence::new(values)
    }

    /// Closed-form upper bound on the infinite tail `sum_{k>n} |x_k|`.
    ///
    /// Dominates `tail_sum(generate(N), n)` for every `n <= N` (integral
    /// comparison for the decay models, exact emptiness for sparse ones).
    pub fn analytic_tail(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "tail bound is defined for n >= 1".into(),
            ));
        }
        Ok(match self {
            Self::HolderTail { mu, c } => (c / mu) * (n as f64).powf(-mu),
            Self::ExponentialTail { gamma, c } => {
                (c / gamma) * (-(n as f64).powf(*gamma)).exp()
            }
            Self::Sparse { support } => {
                let beyond: Vec<f64> = support
                    .iter()
                    .filter(|(&k, _)| k > n)
                    .map(|(_, &v)| v.abs())
                    .collect();
                compensated_sum(beyond.into_iter())
            }
        })
    }
}
