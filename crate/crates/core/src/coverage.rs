//! Coverage probabilities from the law of the random nerve.
//!
//! A random complex is described either atomically (`P_s`, the probability
//! that it equals `s`) or cumulatively (`p_s`, the probability that it
//! contains `s`). The law of χ follows either directly from `P`, or from the
//! moments `E(χ^k) = Σ_s c_{s,k} p_s` and the inverse Vandermonde matrix.
//! For a good cover of a closed connected graph the cover is complete
//! exactly when χ of the nerve equals χ(X); with a boundary, the relative
//! characteristic of (nerve, boundary nerve) is compared with χ_rel(X, ∂X).

use std::collections::HashMap;
use std::fmt;
use std::ops::{AddAssign, Sub};
use std::sync::Arc;
use std::thread;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeffs::{c_chi, c_chi_rel};
use crate::error::{param, Error, Result};
use crate::metric_graph::{GraphPoint, MetricGraph};
use crate::moments::{distribution_from_moments, float_to_rational, IntegerRange, MomentVector};
use crate::nerve::BallCoverRealization;
use crate::simplicial::{Subcomplex, SubcomplexFamily};

/// Default tolerance for agreement between computation paths.
pub const PIPELINE_TOL: f64 = 1e-8;

/// Atomic (`P_s`) or cumulative (`p_s`) description.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Atomic,
    Cumulative,
}

/// `p_s = Σ_{r ⊇ s} P_r` over the family.
pub fn cumulate<T: Clone + Zero + for<'a> AddAssign<&'a T>>(family: &SubcomplexFamily, atomic: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); family.len()];
    for (ri, val) in atomic.iter().enumerate() {
        if val.is_zero() {
            continue;
        }
        for s in family.get(ri).subcomplexes() {
            let si = family.index_of_set(s.face_set()).expect("family is downward closed");
            out[si] += val;
        }
    }
    out
}

/// Möbius inversion of [`cumulate`]: `P_s = Σ_A (−1)^{|A|} p_{s ∪ A}` over
/// sets `A` of faces that can each be added to `s`.
pub fn atomize<T>(family: &SubcomplexFamily, cumulative: &[T]) -> Vec<T>
where
    T: Clone + Zero + for<'a> AddAssign<&'a T> + for<'a> Sub<&'a T, Output = T>,
{
    family
        .all()
        .iter()
        .map(|s| {
            let slots = s.cover_slots();
            let mut plus = T::zero();
            let mut minus = T::zero();
            for a in 0u64..1 << slots.len() {
                let mut set = s.face_set();
                for (b, slot) in slots.iter().enumerate() {
                    if a & (1 << b) != 0 {
                        set |= slot;
                    }
                }
                let v = &cumulative[family.index_of_set(set).expect("covers stay in the family")];
                if a.count_ones() % 2 == 0 {
                    plus += v;
                } else {
                    minus += v;
                }
            }
            plus - &minus
        })
        .collect()
}

/// A probability law of a random labeled complex.
#[derive(Clone, Debug)]
pub struct DistributionVector {
    family: Arc<SubcomplexFamily>,
    form: Form,
    values: Vec<f64>,
}

impl DistributionVector {
    pub fn new(family: Arc<SubcomplexFamily>, form: Form, values: Vec<f64>) -> Result<Self> {
        if values.len() != family.len() {
            return Err(param(format!(
                "distribution has {} entries, family has {}",
                values.len(),
                family.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(param("distribution entries must be finite"));
        }
        Ok(DistributionVector { family, form, values })
    }

    /// Atomic point mass on `s`.
    pub fn point_mass(family: Arc<SubcomplexFamily>, s: &Subcomplex) -> Result<Self> {
        let mut values = vec![0.0; family.len()];
        values[family.index_or_err(s)?] = 1.0;
        DistributionVector::new(family, Form::Atomic, values)
    }

    /// Atomic empirical law from counts per family ordinal.
    pub fn from_counts(family: Arc<SubcomplexFamily>, counts: &HashMap<usize, u64>) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(param("no samples"));
        }
        let mut values = vec![0.0; family.len()];
        for (&i, &c) in counts {
            values[i] = c as f64 / total as f64;
        }
        DistributionVector::new(family, Form::Atomic, values)
    }

    pub fn family(&self) -> &Arc<SubcomplexFamily> {
        &self.family
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, s: &Subcomplex) -> Result<f64> {
        Ok(self.values[self.family.index_or_err(s)?])
    }

    /// Cumulative form (`p_from_P` when atomic).
    pub fn to_cumulative(&self) -> DistributionVector {
        match self.form {
            Form::Cumulative => self.clone(),
            Form::Atomic => DistributionVector {
                family: self.family.clone(),
                form: Form::Cumulative,
                values: cumulate(&self.family, &self.values),
            },
        }
    }

    /// Atomic form (`P_from_p` when cumulative); entries below `−tol`
    /// mean the input was not the law of a random complex.
    pub fn to_atomic(&self, tol: f64) -> Result<DistributionVector> {
        let out = match self.form {
            Form::Atomic => self.clone(),
            Form::Cumulative => DistributionVector {
                family: self.family.clone(),
                form: Form::Atomic,
                values: atomize(&self.family, &self.values),
            },
        };
        if let Some((i, v)) = out.values.iter().enumerate().find(|(_, v)| **v < -tol) {
            return Err(Error::Inconsistent(format!(
                "atomic probability of {} is {v:e}",
                self.family.get(i)
            )));
        }
        Ok(out)
    }

    /// Checks the invariants of the form at tolerance `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        match self.form {
            Form::Atomic => {
                if let Some(v) = self.values.iter().find(|v| **v < -tol) {
                    return Err(Error::Inconsistent(format!("negative atomic entry {v:e}")));
                }
                let sum: f64 = self.values.iter().sum();
                if (sum - 1.0).abs() > tol {
                    return Err(Error::Inconsistent(format!("atomic entries sum to {sum}")));
                }
            }
            Form::Cumulative => {
                let bottom = self.values[self.family.void_index()];
                if (bottom - 1.0).abs() > tol {
                    return Err(Error::Inconsistent(format!("bottom entry is {bottom}, not 1")));
                }
                for (i, s) in self.family.all().iter().enumerate() {
                    let mut below: Vec<Subcomplex> = s.antichain().into_iter().map(|f| strip_face(s, f)).collect();
                    if s.is_empty() && !s.is_void() {
                        below.push(Subcomplex::void(s.n())?);
                    }
                    for b in below {
                        let j = self.family.index_or_err(&b)?;
                        if self.values[j] < self.values[i] - tol {
                            return Err(Error::Inconsistent(format!("p({b}) < p({s}) breaks monotonicity")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `s` with the top face `f` removed.
fn strip_face(s: &Subcomplex, f: crate::simplicial::FaceMask) -> Subcomplex {
    let faces: Vec<_> = s.iter().filter(|g| *g != f).collect();
    Subcomplex::from_faces(s.n(), faces).expect("removing a top face keeps closure")
}

/// Atomic law of a random pair (complex, boundary complex), stored sparsely
/// by family ordinals.
#[derive(Clone, Debug)]
pub struct PairDistributionVector {
    family: Arc<SubcomplexFamily>,
    values: HashMap<(usize, usize), f64>,
}

impl PairDistributionVector {
    /// Rejects mass on pairs whose second component is not contained in the first.
    pub fn new(family: Arc<SubcomplexFamily>, values: HashMap<(usize, usize), f64>) -> Result<Self> {
        for (&(si, ri), &v) in &values {
            if si >= family.len() || ri >= family.len() {
                return Err(param("pair ordinal out of range"));
            }
            if v != 0.0 && !family.get(ri).is_subcomplex_of(&family.get(si)) {
                return Err(Error::Inconsistent(format!(
                    "mass {v} on pair ({}, {}) violates containment",
                    family.get(si),
                    family.get(ri)
                )));
            }
        }
        Ok(PairDistributionVector { family, values })
    }

    /// Pairs `(s, void)`: a law without boundary information.
    pub fn from_absolute(d: &DistributionVector, tol: f64) -> Result<Self> {
        let atomic = d.to_atomic(tol)?;
        let void = d.family.void_index();
        let values = atomic
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| ((i, void), *v))
            .collect();
        PairDistributionVector::new(d.family.clone(), values)
    }

    pub fn from_counts(family: Arc<SubcomplexFamily>, counts: &HashMap<(usize, usize), u64>) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(param("no samples"));
        }
        let values = counts.iter().map(|(&k, &c)| (k, c as f64 / total as f64)).collect();
        PairDistributionVector::new(family, values)
    }

    pub fn family(&self) -> &Arc<SubcomplexFamily> {
        &self.family
    }

    pub fn values(&self) -> &HashMap<(usize, usize), f64> {
        &self.values
    }

    /// Atomic law of the first component.
    pub fn marginal(&self) -> Result<DistributionVector> {
        let mut values = vec![0.0; self.family.len()];
        for ((si, _), v) in self.sorted() {
            values[si] += v;
        }
        DistributionVector::new(self.family.clone(), Form::Atomic, values)
    }

    /// Entries sorted by ordinal pair, for deterministic iteration.
    pub fn sorted(&self) -> Vec<((usize, usize), f64)> {
        let mut v: Vec<_> = self.values.iter().map(|(k, v)| (*k, *v)).collect();
        v.sort_by_key(|(k, _)| *k);
        v
    }

    /// Cumulative pair law `p_{s,r} = Σ_{(K,L) ≥ (s,r)} P_{K,L}` over pairs with `r ⊆ s`.
    pub fn cumulative<T>(&self, conv: impl Fn(f64) -> Result<T>) -> Result<Vec<((usize, usize), T)>>
    where
        T: Clone + Zero + for<'a> AddAssign<&'a T>,
    {
        let mut acc: HashMap<(usize, usize), T> = HashMap::new();
        for ((ki, li), v) in self.sorted() {
            if v == 0.0 {
                continue;
            }
            let v = conv(v)?;
            let k = self.family.get(ki);
            let ls = self.family.get(li).subcomplexes();
            for s in k.subcomplexes() {
                let si = self.family.index_of_set(s.face_set()).expect("family is downward closed");
                for r in ls.iter().filter(|r| r.is_subcomplex_of(&s)) {
                    let ri = self.family.index_of_set(r.face_set()).expect("family is downward closed");
                    *acc.entry((si, ri)).or_insert_with(T::zero) += &v;
                }
            }
        }
        let mut out: Vec<_> = acc.into_iter().collect();
        out.sort_by_key(|(k, _)| *k);
        Ok(out)
    }
}

/// Law of χ (or χ_rel) on a range, by two independent paths.
#[derive(Clone, Debug)]
pub struct ChiDistribution {
    pub range: IntegerRange,
    /// Summed atomic probabilities.
    pub direct: Vec<f64>,
    /// Recovered from moments through the inverse Vandermonde matrix.
    pub from_moments: Vec<f64>,
    /// `E(χ^k)`, k = 0..N.
    pub moments: Vec<f64>,
    /// Largest entrywise difference of the two paths.
    pub discrepancy: f64,
}

impl ChiDistribution {
    /// Probability of `v` by the moment path (0 outside the range).
    pub fn prob(&self, v: i64) -> f64 {
        self.range.position(v).map_or(0.0, |i| self.from_moments[i])
    }

    pub fn prob_direct(&self, v: i64) -> f64 {
        self.range.position(v).map_or(0.0, |i| self.direct[i])
    }

    pub fn mean(&self) -> f64 {
        self.moments.get(1).copied().unwrap_or_else(|| self.range.lo() as f64)
    }
}

fn finish(
    range: IntegerRange,
    direct: Vec<f64>,
    exact_moments: Vec<BigRational>,
    tol: f64,
) -> Result<ChiDistribution> {
    let m = MomentVector::from_exact(range, exact_moments)?;
    let rec = distribution_from_moments(&m)?;
    let discrepancy = direct
        .iter()
        .zip(&rec.probabilities)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if discrepancy.is_nan() || discrepancy > tol {
        return Err(Error::Consistency {
            what: "direct and moment paths of the Euler characteristic law".into(),
            discrepancy,
            tolerance: tol,
        });
    }
    Ok(ChiDistribution {
        range,
        direct,
        from_moments: rec.probabilities,
        moments: m.mu().to_vec(),
        discrepancy,
    })
}

/// Law of χ of the random complex on `range`, by the direct atomic sum and by
/// the moment path `μ_k = Σ_s c_{s,k}(χ) p_s` (accumulated exactly).
pub fn chi_distribution(d: &DistributionVector, range: IntegerRange, tol: f64) -> Result<ChiDistribution> {
    let family = d.family.clone();
    let atomic = d.to_atomic(tol)?;
    // a given cumulative law is used as is; an atomic one is cumulated exactly
    let cumulative: Vec<BigRational> = match d.form {
        Form::Cumulative => d.values.iter().map(|&p| float_to_rational(p)).collect::<Result<_>>()?,
        Form::Atomic => {
            let q = d.values.iter().map(|&p| float_to_rational(p)).collect::<Result<Vec<_>>>()?;
            cumulate(&family, &q)
        }
    };
    let n = range.span();
    let mut direct = vec![0.0; n + 1];
    for (s, &v) in family.all().iter().zip(&atomic.values) {
        if v == 0.0 {
            continue;
        }
        let x = s.euler_char();
        match range.position(x) {
            Some(i) => direct[i] += v,
            None if v.abs() <= tol => {}
            None => {
                return Err(Error::Inconsistent(format!(
                    "mass {v} at χ = {x} outside [{}, {}]",
                    range.lo(),
                    range.hi()
                )))
            }
        }
    }
    let mut moments = vec![BigRational::zero(); n + 1];
    for (s, p) in family.all().iter().zip(&cumulative) {
        if p.is_zero() {
            continue;
        }
        for (k, mu) in moments.iter_mut().enumerate() {
            let c = c_chi(s, k as u32)?;
            if c != 0 {
                *mu += p * BigRational::from_integer(BigInt::from(c));
            }
        }
    }
    finish(range, direct, moments, tol)
}

/// Law of χ_rel of a random pair on `range`, by the direct atomic sum and by
/// the moment path through the pair coefficients.
pub fn chi_rel_distribution(d: &PairDistributionVector, range: IntegerRange, tol: f64) -> Result<ChiDistribution> {
    let family = d.family.clone();
    let n = range.span();
    let mut direct = vec![0.0; n + 1];
    for ((si, ri), v) in d.sorted() {
        let x = family.get(si).relative_euler_char(&family.get(ri));
        match range.position(x) {
            Some(i) => direct[i] += v,
            None if v.abs() <= tol => {}
            None => {
                return Err(Error::Inconsistent(format!(
                    "mass {v} at χ_rel = {x} outside [{}, {}]",
                    range.lo(),
                    range.hi()
                )))
            }
        }
    }
    let mut moments = vec![BigRational::zero(); n + 1];
    for ((si, ri), p) in d.cumulative(float_to_rational)? {
        let (s, r) = (family.get(si), family.get(ri));
        for (k, mu) in moments.iter_mut().enumerate() {
            let c = c_chi_rel(&s, &r, k as u32)?;
            if c != 0 {
                *mu += &p * BigRational::from_integer(BigInt::from(c));
            }
        }
    }
    finish(range, direct, moments, tol)
}

/// Coefficients `a_s` with `P(χ = value) = Σ_s a_s p_s` on the given range.
pub fn chi_value_coefficients(family: &SubcomplexFamily, range: IntegerRange, value: i64) -> Result<Vec<f64>> {
    let j = range
        .position(value)
        .ok_or_else(|| param(format!("{value} outside [{}, {}]", range.lo(), range.hi())))?;
    let v = crate::moments::inverse_vandermonde_exact(range);
    family
        .all()
        .iter()
        .map(|s| {
            let mut a = BigRational::zero();
            for (k, row) in v.iter().enumerate() {
                let c = c_chi(s, k as u32)?;
                if c != 0 {
                    a += &row[j] * BigRational::from_integer(BigInt::from(c));
                }
            }
            Ok(crate::moments::rational_to_f64(&a))
        })
        .collect()
}

/// Which estimate a report carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ExactPipeline,
    McPipeline,
    McOracle,
    Stevens,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ExactPipeline => "exact_pipeline",
            Method::McPipeline => "mc_pipeline",
            Method::McOracle => "mc_oracle",
            Method::Stevens => "stevens",
        })
    }
}

/// A coverage probability with its provenance.
#[derive(Clone, Debug)]
pub struct CoverageReport {
    pub method: Method,
    pub probability: f64,
    pub stderr: Option<f64>,
    /// Range of χ (or χ_rel) used, when a pipeline produced the value.
    pub range: Option<IntegerRange>,
    /// Probability by the direct atomic path, when a pipeline produced the value.
    pub direct_probability: Option<f64>,
    pub discrepancy: Option<f64>,
    pub samples: u64,
    pub rejections: u64,
}

impl CoverageReport {
    fn pipeline(dist: &ChiDistribution, target: i64) -> Self {
        CoverageReport {
            method: Method::ExactPipeline,
            probability: dist.prob(target),
            stderr: None,
            range: Some(dist.range),
            direct_probability: Some(dist.prob_direct(target)),
            discrepancy: Some(dist.discrepancy),
            samples: 0,
            rejections: 0,
        }
    }

    /// Marks the report as derived from `samples` Monte Carlo draws, with the
    /// binomial standard error of the estimate.
    pub fn with_samples(mut self, samples: u64, rejections: u64) -> Self {
        self.method = Method::McPipeline;
        self.samples = samples;
        self.rejections = rejections;
        self.stderr = Some(binomial_stderr(self.probability, samples));
        self
    }
}

pub fn binomial_stderr(p: f64, samples: u64) -> f64 {
    if samples == 0 {
        return f64::NAN;
    }
    (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / samples as f64).sqrt()
}

/// Coverage probability of a closed graph: `P(χ(nerve) = χ(X))` on the range `[χ(X), n]`.
pub fn coverage_probability_closed(d: &DistributionVector, graph: &MetricGraph, tol: f64) -> Result<CoverageReport> {
    if !graph.boundary().is_empty() {
        return Err(param("graph has a boundary; use the relative pipeline"));
    }
    let lo = graph.euler_char();
    let range = IntegerRange::new(lo, d.family.n() as i64)?;
    let dist = chi_distribution(d, range, tol)?;
    Ok(CoverageReport::pipeline(&dist, lo))
}

/// Coverage probability with boundary: `P(χ_rel = χ_rel(X, ∂X))` on the
/// range `[χ_rel(X, ∂X), n]`.
pub fn coverage_probability_relative(d: &PairDistributionVector, graph: &MetricGraph, tol: f64) -> Result<CoverageReport> {
    let lo = graph.chi_rel();
    let range = IntegerRange::new(lo, d.family.n() as i64)?;
    let dist = chi_rel_distribution(d, range, tol)?;
    Ok(CoverageReport::pipeline(&dist, lo))
}

/// How ball centers are drawn.
#[derive(Clone, Debug, PartialEq)]
pub enum CenterSampler {
    /// Uniform with respect to length.
    UniformByLength,
    /// Edge chosen with the given (unnormalized) weights, then a uniform offset.
    EdgeMixture(Vec<f64>),
}

impl CenterSampler {
    fn check(&self, graph: &MetricGraph) -> Result<()> {
        if graph.edges().is_empty() {
            return Err(param("cannot sample points on a graph without edges"));
        }
        if let CenterSampler::EdgeMixture(w) = self {
            if w.len() != graph.edges().len() {
                return Err(param("mixture needs one weight per edge"));
            }
            if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
                return Err(param("mixture weights must be non-negative with positive sum"));
            }
        }
        Ok(())
    }

    /// Draws one center.
    pub fn sample<R: Rng>(&self, graph: &MetricGraph, rng: &mut R) -> Result<GraphPoint> {
        let pick = |weights: &mut dyn Iterator<Item = f64>, total: f64, rng: &mut R| {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = 0;
            for (i, w) in weights.enumerate() {
                chosen = i;
                if u < w {
                    break;
                }
                u -= w;
            }
            chosen
        };
        let edge = match self {
            CenterSampler::UniformByLength => pick(
                &mut graph.edges().iter().map(|e| e.length),
                graph.total_length(),
                rng,
            ),
            CenterSampler::EdgeMixture(w) => pick(&mut w.iter().copied(), w.iter().sum(), rng),
        };
        let len = graph.edges()[edge].length;
        graph.point(edge, rng.random::<f64>() * len)
    }
}

/// What to do with samples whose cover is not good.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoodCoverPolicy {
    /// Discard and redraw (counted as rejections).
    Reject,
    /// Keep for the oracle, exclude from the pipeline vectors.
    Keep,
}

/// Monte Carlo configuration.
#[derive(Clone, Debug)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub sampler: CenterSampler,
    pub policy: GoodCoverPolicy,
    /// Permit `eps ≥ C/4`; goodness is then checked sample by sample.
    pub allow_large_eps: bool,
    /// Compare nerve and Rips complexes on every sample below the Rips threshold.
    pub rips_cross_check: bool,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        McConfig {
            trials,
            seed,
            workers: 1,
            sampler: CenterSampler::UniformByLength,
            policy: GoodCoverPolicy::Reject,
            allow_large_eps: false,
            rips_cross_check: false,
        }
    }
}

/// Empirical laws and the direct coverage frequency from one Monte Carlo run.
#[derive(Clone, Debug)]
pub struct McEstimate {
    /// Empirical law of the nerve over good samples.
    pub atomic: DistributionVector,
    /// Empirical law of (nerve, boundary nerve) over good samples.
    pub pairs: PairDistributionVector,
    /// Frequency of complete coverage over all retained samples.
    pub oracle: CoverageReport,
    /// Samples feeding the pipeline vectors.
    pub good_samples: u64,
    /// Samples kept for the oracle only.
    pub excluded: u64,
    pub rejections: u64,
    /// Samples where the nerve and Rips complex differed below the Rips threshold.
    pub rips_mismatches: u64,
    pub workers: usize,
}

#[derive(Default)]
struct Tally {
    pairs: HashMap<(usize, usize), u64>,
    covered: u64,
    retained: u64,
    good: u64,
    excluded: u64,
    rejections: u64,
    rips_mismatches: u64,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        for (k, c) in other.pairs {
            *self.pairs.entry(k).or_default() += c;
        }
        self.covered += other.covered;
        self.retained += other.retained;
        self.good += other.good;
        self.excluded += other.excluded;
        self.rejections += other.rejections;
        self.rips_mismatches += other.rips_mismatches;
    }
}

/// Independent stream for a worker: the seed fixes the key, the worker index
/// the stream.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

#[allow(clippy::too_many_arguments)]
fn run_worker(
    graph: &MetricGraph,
    family: &SubcomplexFamily,
    n: usize,
    eps: f64,
    cfg: &McConfig,
    guaranteed: bool,
    trials: u64,
    worker: usize,
) -> Result<Tally> {
    let mut rng = worker_rng(cfg.seed, worker);
    let mut t = Tally::default();
    while t.retained < trials {
        let centers = (0..n).map(|_| cfg.sampler.sample(graph, &mut rng)).collect::<Result<Vec<_>>>()?;
        let r = BallCoverRealization::new(graph, eps, centers)?;
        let good = guaranteed || r.is_good_exact()?;
        if !good && cfg.policy == GoodCoverPolicy::Reject {
            t.rejections += 1;
            if t.rejections > trials.max(16) {
                return Err(Error::Parameter(format!(
                    "more than half of the samples give a bad cover at radius {eps}"
                )));
            }
            continue;
        }
        t.retained += 1;
        if r.covers_fully() {
            t.covered += 1;
        }
        if !good {
            t.excluded += 1;
            continue;
        }
        let nerve = r.build_nerve_unchecked()?;
        if cfg.rips_cross_check && nerve.is_rips_valid && r.build_rips()?.complex != nerve.complex {
            t.rips_mismatches += 1;
        }
        let boundary = r.boundary_nerve()?;
        let ki = family.index_or_err(&nerve.complex)?;
        let li = family.index_or_err(&boundary)?;
        *t.pairs.entry((ki, li)).or_default() += 1;
        t.good += 1;
    }
    Ok(t)
}

/// Samples `trials` covers by `n` closed `eps`-balls and tabulates the
/// realized nerves, boundary nerves and complete-coverage events.
///
/// Trials are split over `cfg.workers` threads, each with its own stream, so
/// the result depends only on `(seed, workers)`.
pub fn mc_estimate(graph: &MetricGraph, n: usize, eps: f64, cfg: &McConfig) -> Result<McEstimate> {
    if cfg.trials == 0 {
        return Err(param("trials must be positive"));
    }
    if cfg.workers == 0 {
        return Err(param("workers must be positive"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(param(format!("radius must be positive, got {eps}")));
    }
    cfg.sampler.check(graph)?;
    let family = SubcomplexFamily::shared(n)?;
    let guaranteed = eps < graph.shortest_cycle_length() / 4.0;
    if !guaranteed && !cfg.allow_large_eps {
        return Err(param(format!(
            "radius {eps} is not below a quarter of the girth {}; goodness is not guaranteed",
            graph.shortest_cycle_length()
        )));
    }
    let workers = cfg.workers;
    let share = |w: usize| cfg.trials / workers as u64 + u64::from((w as u64) < cfg.trials % workers as u64);
    let tallies: Vec<Result<Tally>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let family = &family;
                scope.spawn(move || run_worker(graph, family, n, eps, cfg, guaranteed, share(w), w))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut total = Tally::default();
    for t in tallies {
        total.merge(t?);
    }
    if total.rejections > total.retained {
        return Err(Error::Parameter(format!(
            "{} of {} samples rejected as bad covers",
            total.rejections,
            total.rejections + total.retained
        )));
    }
    let mut absolute: HashMap<usize, u64> = HashMap::new();
    for (&(ki, _), &c) in &total.pairs {
        *absolute.entry(ki).or_default() += c;
    }
    let freq = total.covered as f64 / total.retained as f64;
    let oracle = CoverageReport {
        method: Method::McOracle,
        probability: freq,
        stderr: Some(binomial_stderr(freq, total.retained)),
        range: None,
        direct_probability: None,
        discrepancy: None,
        samples: total.retained,
        rejections: total.rejections,
    };
    Ok(McEstimate {
        atomic: DistributionVector::from_counts(family.clone(), &absolute)?,
        pairs: PairDistributionVector::from_counts(family, &total.pairs)?,
        oracle,
        good_samples: total.good,
        excluded: total.excluded,
        rejections: total.rejections,
        rips_mismatches: total.rips_mismatches,
        workers,
    })
}

/// `exp(−μ0² / (2n(|χ_rel(X, ∂X)| + 2)²))`.
pub fn azuma_bound(mu0: f64, n: usize, graph: &MetricGraph) -> Result<f64> {
    if mu0.is_nan() || mu0 < 0.0 {
        return Err(param(format!("shifted mean must be non-negative, got {mu0}")));
    }
    if n == 0 {
        return Err(param("n must be at least 1"));
    }
    let c = graph.chi_rel().unsigned_abs() as f64 + 2.0;
    Ok((-mu0 * mu0 / (2.0 * n as f64 * c * c)).exp())
}

/// The Azuma bound under both readings of its mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AzumaReport {
    /// `E(χ_rel)`.
    pub mean: f64,
    /// `E(χ_rel) − χ_rel(X, ∂X)`.
    pub shifted_mean: f64,
    /// Bound with the shifted mean (the one used for coverage).
    pub bound: f64,
    /// Bound with the unshifted mean, when that mean is non-negative.
    pub bound_unshifted: Option<f64>,
}

/// Azuma bound from a law's first moment.
pub fn azuma_report(mean: f64, n: usize, graph: &MetricGraph) -> Result<AzumaReport> {
    let shifted_mean = mean - graph.chi_rel() as f64;
    Ok(AzumaReport {
        mean,
        shifted_mean,
        bound: azuma_bound(shifted_mean.max(0.0), n, graph)?,
        bound_unshifted: if mean >= 0.0 { Some(azuma_bound(mean, n, graph)?) } else { None },
    })
}
