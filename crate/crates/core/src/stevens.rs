//! Random arcs on the unit circle: Stevens' coverage formula, the law of the
//! number of gaps, and the exact three-arc values.
//!
//! On the circle every cover by arcs shorter than 1/2 is good and the nerve
//! has χ equal to the number of uncovered gaps (0 when covered), so these
//! closed forms are ground truth for the nerve pipelines.

use std::sync::Arc;

use crate::coverage::{DistributionVector, Form};
use crate::error::{param, Result};
use crate::simplicial::SubcomplexFamily;

/// `n` arcs of length `alpha` with uniform independent midpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcModel {
    n: usize,
    alpha: f64,
}

impl ArcModel {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(param("need at least one arc"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(param(format!("arc length must lie in (0, 1), got {alpha}")));
        }
        Ok(ArcModel { n, alpha })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Ball radius on the unit circle.
    pub fn eps(&self) -> f64 {
        self.alpha / 2.0
    }

    /// `min(⌊1/α⌋, n)`.
    pub fn k(&self) -> usize {
        ((1.0 / self.alpha).floor() as usize).min(self.n)
    }

    /// Arcs shorter than half the circle always form a good cover.
    pub fn is_good_regime(&self) -> bool {
        self.alpha < 0.5
    }
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(1 − iα)_+^{n−1}`; terms with `iα ≥ 1` vanish.
fn term(m: &ArcModel, i: usize) -> f64 {
    let base = 1.0 - i as f64 * m.alpha;
    if base <= 0.0 {
        if m.n == 1 && base == 0.0 { 1.0 } else { 0.0 }
    } else {
        base.powi(m.n as i32 - 1)
    }
}

/// Probability that the arcs cover the circle:
/// `Σ_{j=0}^{k} (−1)^j C(n, j) (1 − jα)^{n−1}`.
pub fn stevens_coverage(m: &ArcModel) -> f64 {
    (0..=m.k())
        .map(|j| {
            let t = binom(m.n, j) * term(m, j);
            if j % 2 == 0 { t } else { -t }
        })
        .sum()
}

/// Probability of exactly `j` uncovered gaps:
/// `C(n, j) Σ_{i=j}^{k} (−1)^{i−j} C(n−j, i−j) (1 − iα)^{n−1}`, and 0 for `j > k`.
pub fn stevens_gap_dist(m: &ArcModel, j: usize) -> f64 {
    let k = m.k();
    if j > k {
        return 0.0;
    }
    let s: f64 = (j..=k)
        .map(|i| {
            let t = binom(m.n - j, i - j) * term(m, i);
            if (i - j).is_multiple_of(2) { t } else { -t }
        })
        .sum();
    binom(m.n, j) * s
}

/// The gap law as a vector over `j = 0..=n`.
pub fn stevens_gap_vector(m: &ArcModel) -> Vec<f64> {
    (0..=m.n).map(|j| stevens_gap_dist(m, j)).collect()
}

/// Cumulative law of the nerve of three arcs of length `alpha`, indexed by
/// the complexes on three vertices.
pub fn three_arc_p_vector(alpha: f64) -> Result<DistributionVector> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(param(format!(
            "three-arc values need 0 < alpha < 1/2 for a good cover, got {alpha}"
        )));
    }
    let family: Arc<SubcomplexFamily> = SubcomplexFamily::shared(3)?;
    let a2 = alpha * alpha;
    let values = family
        .all()
        .iter()
        .map(|s| match (s.face_count(1), s.face_count(2)) {
            (0, _) => 1.0,
            (1, _) => 2.0 * alpha,
            (2, _) => 4.0 * a2,
            (_, 1) => 3.0 * a2,
            _ if alpha <= 1.0 / 3.0 => 3.0 * a2,
            _ => 12.0 * a2 - 6.0 * alpha + 1.0,
        })
        .collect();
    DistributionVector::new(family, Form::Cumulative, values)
}

/// `E(G^k)` for three arcs, `k ∈ {1, 2, 3}`.
pub fn gap_moments(alpha: f64, k: u32) -> Result<f64> {
    let a = alpha;
    Ok(match k {
        1 => 3.0 - 6.0 * a + 3.0 * a * a,
        2 => 9.0 - 30.0 * a + 27.0 * a * a,
        3 if a <= 1.0 / 3.0 => 27.0 - 114.0 * a + 129.0 * a * a,
        3 => 21.0 - 78.0 * a + 75.0 * a * a,
        _ => return Err(param(format!("closed-form gap moments exist for k = 1, 2, 3, not {k}"))),
    })
}
