//! Numerical evidence for ill-posedness: column-norm decay and the smallest
//! singular values of growing finite sections.
//!
//! Nonclosed range is not decidable at finite truncation, so the report only
//! states whether the computed trends are consistent with it.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operators::OperatorSpec;
use crate::seq::TruncatedSequence;

/// Largest section size for the dense singular-value computation.
pub const MAX_SECTION: usize = 500;

/// Decay evidence for one operator.
#[derive(Debug, Clone)]
pub struct IllposednessReport {
    pub column_norms: Vec<(usize, f64)>,
    pub sigma_min_by_section: Vec<(usize, f64)>,
    pub notes: String,
}

/// `||A e_k||` for `k = 1..=k_max`.
pub fn column_norm_profile(op: &OperatorSpec, k_max: usize) -> Result<Vec<(usize, f64)>> {
    if k_max == 0 {
        return Err(Error::InvalidParameter(
            "column-norm profile needs k_max >= 1".into(),
        ));
    }
    (1..=k_max)
        .map(|k| Ok((k, op.column_norm(k)?)))
        .collect()
}

/// Dense matrix of the leading `n x n` section, assembled column by column.
fn section_matrix(op: &OperatorSpec, n: usize) -> Result<DMatrix<f64>> {
    let section = match op.kind() {
        crate::operators::OperatorKind::Cesaro => OperatorSpec::cesaro(n)?,
        crate::operators::OperatorKind::Diagonal(rule) => {
            let sigmas = (1..=n).map(|k| rule.sigma(k)).collect::<Result<Vec<_>>>()?;
            OperatorSpec::diagonal_list(sigmas)?
        }
        crate::operators::OperatorKind::Embedding { q } => OperatorSpec::embedding(*q, n)?,
    };
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        let col = section.apply(&TruncatedSequence::unit(n, k)?)?;
        for (i, &v) in col.values().iter().enumerate() {
            m[(i, k - 1)] = v;
        }
    }
    Ok(m)
}

/// Smallest singular value of each requested `N x N` section.
pub fn sigma_min_profile(op: &OperatorSpec, sections: &[usize]) -> Result<Vec<(usize, f64)>> {
    if sections.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one section size is required".into(),
        ));
    }
    let mut out = Vec::with_capacity(sections.len());
    for &n in sections {
        if n == 0 {
            return Err(Error::InvalidParameter("section sizes are >= 1".into()));
        }
        if n > MAX_SECTION {
            return Err(Error::BudgetExceeded(format!(
                "dense singular-value computation is limited to N <= {MAX_SECTION}, got {n}"
            )));
        }
        let m = section_matrix(op, n)?;
        let sv = m.svd(false, false).singular_values;
        let min = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        out.push((n, min));
    }
    Ok(out)
}

/// Builds the full report for an operator.
pub fn illposedness_report(
    op: &OperatorSpec,
    k_max: usize,
    sections: &[usize],
) -> Result<IllposednessReport> {
    let column_norms = column_norm_profile(op, k_max)?;
    let sigma_min_by_section = sigma_min_profile(op, sections)?;

    let first = sigma_min_by_section.first().map(|&(_, v)| v).unwrap_or(0.0);
    let last = sigma_min_by_section.last().map(|&(_, v)| v).unwrap_or(0.0);
    let decaying = sigma_min_by_section
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12))
        && last < 0.5 * first;
    let notes = if decaying {
        "smallest singular values decay across sections: consistent with nonclosed range"
            .to_string()
    } else {
        "smallest singular values show no decay across the tested sections".to_string()
    };

    Ok(IllposednessReport {
        column_norms,
        sigma_min_by_section,
        notes,
    })
}
