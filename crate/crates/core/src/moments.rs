//! Method of moments for integer random variables with a known finite range.
//!
//! If `X` takes values in `lo..=hi` (N = hi − lo) then its first N moments
//! determine its law: with `V[i][k] = x_i^k` the Vandermonde matrix on the
//! nodes `x_i = lo + i`, the probabilities are `p = μ V⁻¹`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{param, Error, Result};

/// Largest N accepted by the floating-point inverse.
pub const FLOAT_MAX_N: usize = 20;

/// Largest N for which recovery runs in exact rational arithmetic when exact
/// moments are available.
pub const EXACT_MAX_N: usize = 12;

/// Closed integer interval `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IntegerRange {
    lo: i64,
    hi: i64,
}

impl IntegerRange {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(param(format!("empty range [{lo}, {hi}]")));
        }
        Ok(IntegerRange { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// N = hi − lo.
    pub fn span(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn nodes(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Position of `v` among the nodes.
    pub fn position(&self, v: i64) -> Option<usize> {
        self.contains(v).then(|| (v - self.lo) as usize)
    }
}

/// Moments `μ_0..μ_N` of a variable supported on a range, optionally with
/// their exact rational values.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector {
    range: IntegerRange,
    mu: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl MomentVector {
    /// Checks the length and the unit mass `μ_0 = 1`.
    pub fn new(range: IntegerRange, mu: Vec<f64>) -> Result<Self> {
        if mu.len() != range.span() + 1 {
            return Err(param(format!(
                "range [{}, {}] needs {} moments, got {}",
                range.lo,
                range.hi,
                range.span() + 1,
                mu.len()
            )));
        }
        if (mu[0] - 1.0).abs() > 1e-9 {
            return Err(Error::Inconsistent(format!("zeroth moment {} is not 1", mu[0])));
        }
        Ok(MomentVector { range, mu, exact: None })
    }

    /// Exact moments; the float view is their rounding.
    pub fn from_exact(range: IntegerRange, exact: Vec<BigRational>) -> Result<Self> {
        let mu = exact.iter().map(rational_to_f64).collect();
        let mut m = MomentVector::new(range, mu)?;
        m.exact = Some(exact);
        Ok(m)
    }

    /// Moments of an explicit distribution on the range nodes, accumulated
    /// exactly from the given (binary floating-point) probabilities.
    pub fn from_distribution(range: IntegerRange, probs: &[f64]) -> Result<Self> {
        if probs.len() != range.span() + 1 {
            return Err(param("distribution length does not match the range"));
        }
        let q = probs.iter().map(|&p| float_to_rational(p)).collect::<Result<Vec<_>>>()?;
        let exact = (0..=range.span())
            .map(|k| {
                range.nodes().zip(&q).fold(BigRational::zero(), |acc, (x, p)| {
                    acc + p * BigRational::from_integer(BigInt::from(x).pow(k as u32))
                })
            })
            .collect();
        MomentVector::from_exact(range, exact)
    }

    pub fn range(&self) -> IntegerRange {
        self.range
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }
}

/// Exact value of a finite float.
pub fn float_to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| param(format!("non-finite value {x}")))
}

/// Nearest float to a rational (NaN only if the value is out of range).
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `i`-th elementary symmetric polynomial of `x` with `x_j` omitted.
pub fn elem_sym_omit(i: usize, j: usize, x: &[f64]) -> Result<f64> {
    if x.is_empty() || i >= x.len() || j >= x.len() {
        return Err(param(format!(
            "elem_sym_omit needs i, j < {} (got i={i}, j={j})",
            x.len()
        )));
    }
    let e = elem_sym_all(x.iter().enumerate().filter(|(t, _)| *t != j).map(|(_, v)| *v));
    Ok(e[i])
}

/// All elementary symmetric polynomials `e_0..e_m` of the given values.
fn elem_sym_all<T, I>(values: I) -> Vec<T>
where
    T: Clone + Zero + One + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
    I: IntoIterator<Item = T>,
{
    let mut e = vec![T::one()];
    for v in values {
        e.push(T::zero());
        for d in (1..e.len()).rev() {
            e[d] = e[d].clone() + e[d - 1].clone() * v.clone();
        }
    }
    e
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn binomial(n: usize, k: usize) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Exact inverse Vandermonde on integer nodes:
/// `v_{ki} = (−1)^{i+k} C(N, i) e_{N−k}(i) / N!`, where `e_{N−k}(i)` is the
/// elementary symmetric polynomial of the nodes with node `i` omitted.
pub fn inverse_vandermonde_exact(range: IntegerRange) -> Vec<Vec<BigRational>> {
    let n = range.span();
    let nodes: Vec<BigInt> = range.nodes().map(BigInt::from).collect();
    let nfact = factorial(n);
    let mut v = vec![vec![BigRational::zero(); n + 1]; n + 1];
    for i in 0..=n {
        let e = elem_sym_all(
            nodes.iter().enumerate().filter(|(t, _)| *t != i).map(|(_, x)| x.clone()),
        );
        let b = binomial(n, i);
        for (k, row) in v.iter_mut().enumerate() {
            let mut num = &b * &e[n - k];
            if (i + k) % 2 == 1 {
                num = -num;
            }
            row[i] = BigRational::new(num, nfact.clone());
        }
    }
    v
}

/// Inverse Vandermonde matrix `v[k][i]` on the nodes of a range.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseVandermonde {
    range: IntegerRange,
    v: Vec<Vec<f64>>,
}

impl InverseVandermonde {
    pub fn range(&self) -> IntegerRange {
        self.range
    }

    /// Row `k`, column `i`.
    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.v[k][i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.v
    }

    /// Column of coefficients `v_{k i}` for node `i`, indexed by `k`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.v.iter().map(|row| row[i]).collect()
    }

    /// Largest entry of `|V · v − I|`, evaluated exactly for the stored
    /// floating-point entries.
    pub fn identity_residual(&self) -> f64 {
        let v: Vec<Vec<BigRational>> = self
            .v
            .iter()
            .map(|row| row.iter().map(|&x| BigRational::from_float(x).unwrap_or_default()).collect())
            .collect();
        exact_identity_residual(self.range, &v)
    }
}

/// Largest entry of `|V · v − I|` for a rational candidate inverse.
pub fn exact_identity_residual(range: IntegerRange, v: &[Vec<BigRational>]) -> f64 {
    let n = range.span();
    let mut worst = 0.0f64;
    for (i, x) in range.nodes().enumerate() {
        let x = BigRational::from_integer(BigInt::from(x));
        for j in 0..=n {
            let mut s = BigRational::zero();
            let mut pw = BigRational::one();
            for row in v {
                s += &pw * &row[j];
                pw *= &x;
            }
            if i == j {
                s -= BigRational::one();
            }
            worst = worst.max(rational_to_f64(&s).abs());
        }
    }
    worst
}

/// Floating-point inverse Vandermonde, obtained by rounding the exact
/// rational inverse. Refuses N above [`FLOAT_MAX_N`].
pub fn inverse_vandermonde(range: IntegerRange) -> Result<InverseVandermonde> {
    if range.span() > FLOAT_MAX_N {
        return Err(param(format!(
            "range span {} exceeds the conditioning cap {FLOAT_MAX_N}",
            range.span()
        )));
    }
    let v = inverse_vandermonde_exact(range)
        .into_iter()
        .map(|row| row.iter().map(rational_to_f64).collect())
        .collect();
    Ok(InverseVandermonde { range, v })
}

/// Inverse Vandermonde on arbitrary distinct nodes:
/// `v_{ki} = (−1)^{N+k} e_{N−k}(i) / Π_{j≠i} (x_i − x_j)`.
pub fn inverse_vandermonde_general(x: &[f64]) -> Result<Vec<Vec<f64>>> {
    if x.is_empty() {
        return Err(param("no nodes"));
    }
    let n = x.len() - 1;
    let mut v = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        let denom: f64 = (0..=n).filter(|&j| j != i).map(|j| x[i] - x[j]).product();
        if denom == 0.0 {
            return Err(param("nodes must be distinct"));
        }
        for (k, row) in v.iter_mut().enumerate() {
            let sign = if (n + k).is_multiple_of(2) { 1.0 } else { -1.0 };
            row[i] = sign * elem_sym_omit(n - k, i, x)? / denom;
        }
    }
    Ok(v)
}

/// Sanity figures for a recovered distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryDiagnostics {
    /// Smallest recovered entry (negative values signal a wrong range or noisy moments).
    pub min_entry: f64,
    /// `Σ p − 1`.
    pub sum_deviation: f64,
}

/// Probabilities on the range nodes recovered from moments, unclipped.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveredDistribution {
    pub range: IntegerRange,
    pub probabilities: Vec<f64>,
    pub diagnostics: RecoveryDiagnostics,
}

impl RecoveredDistribution {
    /// Probability of the value `v` (0 outside the range).
    pub fn prob(&self, v: i64) -> f64 {
        self.range.position(v).map_or(0.0, |i| self.probabilities[i])
    }
}

/// `p_i = Σ_k v_{ki} μ_k`.
///
/// Runs in exact arithmetic (rounding only the result) when the moments
/// carry exact values and N ≤ [`EXACT_MAX_N`]; otherwise in floating point.
pub fn distribution_from_moments(m: &MomentVector) -> Result<RecoveredDistribution> {
    let n = m.range.span();
    let probabilities: Vec<f64> = match &m.exact {
        Some(mu) if n <= EXACT_MAX_N => {
            let v = inverse_vandermonde_exact(m.range);
            (0..=n)
                .map(|i| {
                    let p = (0..=n).fold(BigRational::zero(), |acc, k| acc + &v[k][i] * &mu[k]);
                    rational_to_f64(&p)
                })
                .collect()
        }
        _ => {
            let inv = inverse_vandermonde(m.range)?;
            (0..=n)
                .map(|i| (0..=n).map(|k| inv.v[k][i] * m.mu[k]).sum())
                .collect()
        }
    };
    let diagnostics = RecoveryDiagnostics {
        min_entry: probabilities.iter().copied().fold(f64::INFINITY, f64::min),
        sum_deviation: probabilities.iter().sum::<f64>() - 1.0,
    };
    Ok(RecoveredDistribution { range: m.range, probabilities, diagnostics })
}
