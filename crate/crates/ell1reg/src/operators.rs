//! The operator zoo on finite sections: the Cesàro averaging operator,
//! compact diagonal operators, and the embedding that underlies denoising.
//!
//! Each operator acts on the leading N coordinates of a sequence. The Cesàro
//! and diagonal sections are exact: row n of the Cesàro operator depends only
//! on entries 1..=n, so no truncation error enters the computed image.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::seq::{compensated_sum, lq_norm, TruncatedSequence};

/// Rule producing the singular values of a diagonal operator.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaRule {
    /// `sigma_k = k^{-zeta}` with `zeta > 0`.
    Power { zeta: f64 },
    /// Explicit positive, strictly decreasing list.
    Explicit(Vec<f64>),
}

impl SigmaRule {
    fn validate(&self) -> Result<()> {
        match self {
            Self::Power { zeta } => {
                if !(*zeta > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "power decay requires zeta > 0, got {zeta}"
                    )));
                }
            }
            Self::Explicit(sigmas) => {
                if sigmas.is_empty() {
                    return Err(Error::InvalidParameter(
                        "explicit sigma list must be nonempty".into(),
                    ));
                }
                for w in sigmas.windows(2) {
                    if !(w[1] < w[0]) {
                        return Err(Error::InvalidParameter(
                            "explicit sigma list must be strictly decreasing".into(),
                        ));
                    }
                }
                if !(sigmas[sigmas.len() - 1] > 0.0) {
                    return Err(Error::InvalidParameter(
                        "sigma values must be positive".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `sigma_k`, 1-based. Explicit lists are only defined up to their length.
    pub fn sigma(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::IndexOutOfRange { index: k, max: usize::MAX });
        }
        match self {
            Self::Power { zeta } => Ok((k as f64).powf(-zeta)),
            Self::Explicit(sigmas) => sigmas.get(k - 1).copied().ok_or(Error::IndexOutOfRange {
                index: k,
                max: sigmas.len(),
            }),
        }
    }
}

/// Which family the operator belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    /// `[Ax]_n = (1/n) sum_{k<=n} x_k`, image norm l2.
    Cesaro,
    /// `[Ax]_k = sigma_k x_k`, image norm l2.
    Diagonal(SigmaRule),
    /// Identity on entries; only the image norm index `q` changes.
    Embedding { q: f64 },
}

/// An operator together with its section size N.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    kind: OperatorKind,
    n: usize,
}

/// Representation of the dual-space element `f_k` with `A* f_k = e_k`.
///
/// `coeffs` is its sparse coefficient list (1-based index -> value) in the
/// image space coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceElement {
    pub index: usize,
    pub coeffs: BTreeMap<usize, f64>,
}

impl SourceElement {
    /// Densifies into the first `n` coordinates.
    pub fn to_dense(&self, n: usize) -> Result<TruncatedSequence> {
        let mut v = vec![0.0; n];
        for (&k, &val) in &self.coeffs {
            if k == 0 || k > n {
                return Err(Error::IndexOutOfRange { index: k, max: n });
            }
            v[k - 1] = val;
        }
        TruncatedSequence::new(v)
    }
}

impl OperatorSpec {
    pub fn cesaro(n: usize) -> Result<Self> {
        Self::build(OperatorKind::Cesaro, n)
    }

    pub fn diagonal_power(zeta: f64, n: usize) -> Result<Self> {
        Self::build(OperatorKind::Diagonal(SigmaRule::Power { zeta }), n)
    }

    pub fn diagonal_list(sigmas: Vec<f64>) -> Result<Self> {
        let n = sigmas.len();
        Self::build(OperatorKind::Diagonal(SigmaRule::Explicit(sigmas)), n)
    }

    pub fn embedding(q: f64, n: usize) -> Result<Self> {
        Self::build(OperatorKind::Embedding { q }, n)
    }

    fn build(kind: OperatorKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "section size must be at least 1".into(),
            ));
        }
        match &kind {
            OperatorKind::Diagonal(rule) => {
                rule.validate()?;
                if let SigmaRule::Explicit(s) = rule {
                    if s.len() < n {
                        return Err(Error::InvalidParameter(format!(
                            "explicit sigma list has {} entries but section size is {n}",
                            s.len()
                        )));
                    }
                }
            }
            OperatorKind::Embedding { q } => {
                if q.is_nan() || *q < 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "embedding exponent must satisfy q >= 1 or q = inf, got {q}"
                    )));
                }
            }
            OperatorKind::Cesaro => {}
        }
        Ok(Self { kind, n })
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    /// Section size N.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Norm index of the image space Y.
    pub fn image_exponent(&self) -> f64 {
        match &self.kind {
            OperatorKind::Cesaro | OperatorKind::Diagonal(_) => 2.0,
            OperatorKind::Embedding { q } => *q,
        }
    }

    /// Norm index of the dual space Y*. For `q = inf` the functionals are
    /// taken in l1, which yields the borderline growth exponent 1.
    pub fn dual_exponent(&self) -> f64 {
        let q = self.image_exponent();
        if q.is_infinite() {
            1.0
        } else if q == 1.0 {
            f64::INFINITY
        } else {
            q / (q - 1.0)
        }
    }

    fn check_dim(&self, x: &TruncatedSequence) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Applies the operator to the finite section.
    pub fn apply(&self, x: &TruncatedSequence) -> Result<TruncatedSequence> {
        self.check_dim(x)?;
        let v = x.values();
        let out = match &self.kind {
            OperatorKind::Cesaro => {
                let mut running = 0.0;
                v.iter()
                    .enumerate()
                    .map(|(i, &xi)| {
                        running += xi;
                        running / (i + 1) as f64
                    })
                    .collect()
            }
            OperatorKind::Diagonal(rule) => (1..=self.n)
                .map(|k| Ok(rule.sigma(k)? * v[k - 1]))
                .collect::<Result<Vec<_>>>()?,
            OperatorKind::Embedding { .. } => v.to_vec(),
        };
        TruncatedSequence::new(out)
    }

    /// Applies the adjoint of the finite section:
    /// `[A* w]_k = sum_{n=k}^{N} w_n / n` for Cesàro, `sigma_k w_k` for
    /// diagonal operators, identity for the embedding.
    pub fn apply_adjoint(&self, w: &TruncatedSequence) -> Result<TruncatedSequence> {
        self.check_dim(w)?;
        let v = w.values();
        let out = match &self.kind {
            OperatorKind::Cesaro => {
                let mut suffix = 0.0;
                let mut out = vec![0.0; self.n];
                for k in (0..self.n).rev() {
                    suffix += v[k] / (k + 1) as f64;
                    out[k] = suffix;
                }
                out
            }
            OperatorKind::Diagonal(rule) => (1..=self.n)
                .map(|k| Ok(rule.sigma(k)? * v[k - 1]))
                .collect::<Result<Vec<_>>>()?,
            OperatorKind::Embedding { .. } => v.to_vec(),
        };
        TruncatedSequence::new(out)
    }

    /// The dual element `f_k` solving the range condition `A* f_k = e_k`.
    pub fn source_element(&self, k: usize) -> Result<SourceElement> {
        if k == 0 || k > self.n {
            return Err(Error::IndexOutOfRange { index: k, max: self.n });
        }
        let mut coeffs = BTreeMap::new();
        match &self.kind {
            OperatorKind::Cesaro => {
                if k == 1 {
                    coeffs.insert(1, 1.0);
                } else {
                    coeffs.insert(k, k as f64);
                    coeffs.insert(k - 1, -((k - 1) as f64));
                }
            }
            OperatorKind::Diagonal(rule) => {
                coeffs.insert(k, 1.0 / rule.sigma(k)?);
            }
            OperatorKind::Embedding { .. } => {
                coeffs.insert(k, 1.0);
            }
        }
        Ok(SourceElement { index: k, coeffs })
    }

    /// Dual norm of `f_k`, computed from its coefficients.
    pub fn source_element_norm(&self, k: usize) -> Result<f64> {
        let f = self.source_element(k)?;
        let dense = f.to_dense(self.n)?;
        lq_norm(&dense, self.dual_exponent())
    }

    /// Checks `||A* f_k - e_k||_inf <= tol` on the finite section.
    pub fn verify_link_condition(&self, k: usize, tol: f64) -> Result<bool> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let f = self.source_element(k)?.to_dense(self.n)?;
        let image = self.apply_adjoint(&f)?;
        let unit = TruncatedSequence::unit(self.n, k)?;
        let max_dev = image
            .values()
            .iter()
            .zip(unit.values())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        Ok(max_dev <= tol)
    }

    /// `||A e_k||` in the image norm, independent of the section size.
    ///
    /// For the Cesàro operator the squared norm is the infinite sum
    /// `sum_{n>=k} 1/n^2`, evaluated as a 10^6-term partial sum plus the
    /// midpoint of the integral bracket `[1/(M+1), 1/M]` for the remainder;
    /// the result carries an error below 1e-12.
    pub fn column_norm(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::IndexOutOfRange { index: k, max: usize::MAX });
        }
        match &self.kind {
            OperatorKind::Embedding { .. } => Ok(1.0),
            OperatorKind::Diagonal(rule) => rule.sigma(k),
            OperatorKind::Cesaro => {
                const TERMS: usize = 1_000_000;
                let m = k - 1 + TERMS;
                // small terms first
                let partial = compensated_sum((k..=m).rev().map(|n| {
                    let nf = n as f64;
                    1.0 / (nf * nf)
                }));
                let tail_mid = 0.5 * (1.0 / m as f64 + 1.0 / (m + 1) as f64);
                Ok((partial + tail_mid).sqrt())
            }
        }
    }

    /// Exact dual norm of `sum_k a_k f_k` for a sign pattern
    /// `a in {-1, 0, 1}^n` with `n <= N`.
    pub fn dual_combination_norm(&self, signs: &[i8]) -> Result<f64> {
        if signs.is_empty() || signs.len() > self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: signs.len(),
            });
        }
        if signs.iter().any(|s| !matches!(s, -1 | 0 | 1)) {
            return Err(Error::InvalidParameter(
                "sign pattern entries must be -1, 0 or 1".into(),
            ));
        }
        let n = signs.len();
        let mut combo = vec![0.0; n];
        for (i, &s) in signs.iter().enumerate() {
            if s == 0 {
                continue;
            }
            let f = self.source_element(i + 1)?;
            for (&idx, &val) in &f.coeffs {
                combo[idx - 1] += f64::from(s) * val;
            }
        }
        lq_norm(&TruncatedSequence::new(combo)?, self.dual_exponent())
    }
}
