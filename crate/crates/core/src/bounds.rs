//! Closed-form incidence bounds for designs and a harness that measures them.
//!
//! All constants are exact rationals. The only irrational quantity is the
//! square-root allowance of the two-sided incidence bound, and that inequality
//! is decided exactly by comparing squares; the float allowance is reported
//! for reading only.

use std::collections::BTreeMap;

use num_traits::{One, Signed};
use rand::Rng;
use serde::Serialize;

use crate::design::{Design, DesignParams, SubsetPair};
use crate::error::BoundError;
use crate::geometry::GeometryParams;
use crate::rational::{self, int, Rational};
use crate::spectral::BipartiteGraphView;
use crate::subsets::{
    all_subsets, binomial, random_sized_subset, random_subset, seeded_rng, KSubsets,
};

/// Richness threshold `t >= 2` and slack `epsilon > 0` of the rich-block and
/// rich-point theorems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RichnessQuery {
    epsilon: Rational,
    t: u64,
}

impl RichnessQuery {
    pub fn new(epsilon: Rational, t: u64) -> Result<Self, BoundError> {
        if !epsilon.is_positive() {
            return Err(BoundError::NonPositiveEpsilon);
        }
        if t < 2 {
            return Err(BoundError::ThresholdTooSmall(t));
        }
        Ok(RichnessQuery { epsilon, t })
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// (1 + ε)(t − 1), the factor in every size hypothesis.
    fn size_factor(&self) -> Rational {
        (int(1) + &self.epsilon) * int(self.t as i64 - 1)
    }
}

/// ε²(t−1) / (ε²(t−1) + weight·(1+ε)), the shape shared by every richness constant.
pub fn richness_constant(q: &RichnessQuery, weight: &Rational) -> Rational {
    let lead = &q.epsilon * &q.epsilon * int(q.t as i64 - 1);
    let tail = weight * (int(1) + &q.epsilon);
    &lead / (&lead + tail)
}

/// Expected incidence count and allowance of the two-sided incidence bound.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceBound {
    /// |P||L| r / |B|.
    pub expected: Rational,
    /// (r − λ)|P||L|, the square of the allowance.
    pub allowance_squared: Rational,
    pub allowance: f64,
}

impl IncidenceBound {
    /// |I − expected| <= sqrt(allowance_squared), exactly.
    pub fn admits(&self, incidences: usize) -> bool {
        let dev = int(incidences as i64) - &self.expected;
        rational::abs_le_sqrt(&dev, &self.allowance_squared)
    }
}

pub fn incidence_bound(
    p: &DesignParams,
    size_p: usize,
    size_l: usize,
) -> Result<IncidenceBound, BoundError> {
    if size_p > p.num_points {
        return Err(BoundError::SizeOutOfRange {
            size: size_p,
            limit: p.num_points,
        });
    }
    if size_l > p.num_blocks {
        return Err(BoundError::SizeOutOfRange {
            size: size_l,
            limit: p.num_blocks,
        });
    }
    let pl = int(size_p as i64) * int(size_l as i64);
    let expected = &pl * int(p.r as i64) / int(p.num_blocks as i64);
    let allowance_squared = pl * int((p.r - p.lambda) as i64);
    let allowance = rational::to_f64(&allowance_squared).sqrt();
    Ok(IncidenceBound {
        expected,
        allowance_squared,
        allowance,
    })
}

/// Size hypothesis and guaranteed count of a richness bound.
#[derive(Clone, Debug, PartialEq)]
pub struct RichBound {
    /// Smallest subset size the bound applies to.
    pub min_size: Rational,
    pub constant: Rational,
    /// constant × (number of candidate rich elements).
    pub guaranteed: Rational,
}

/// t-rich blocks determined by a point set: a = ε²(t−1)/(ε²(t−1) + (1 − λ/r)(1+ε)).
pub fn rich_block_bound(p: &DesignParams, q: &RichnessQuery) -> RichBound {
    let weight = int(1) - rational::frac(p.lambda as i64, p.r as i64);
    let constant = richness_constant(q, &weight);
    RichBound {
        min_size: q.size_factor() * rational::frac(p.num_points as i64, p.k as i64),
        guaranteed: &constant * int(p.num_blocks as i64),
        constant,
    }
}

/// t-rich points determined by a block set: b = ε²(t−1)/(ε²(t−1) + ((r−λ)/k)(1+ε)).
pub fn rich_point_bound(p: &DesignParams, q: &RichnessQuery) -> RichBound {
    let weight = rational::frac((p.r - p.lambda) as i64, p.k as i64);
    let constant = richness_constant(q, &weight);
    RichBound {
        min_size: q.size_factor() * rational::frac(p.num_points as i64, p.k as i64),
        guaranteed: &constant * int(p.num_points as i64),
        constant,
    }
}

/// Right vertices with at least t neighbours in a large left set S of a biregular
/// graph: c = ε²(t−1)/(ε²(t−1) + μ²Δ_R(1+ε)). μ is passed squared so the result stays exact.
pub fn graph_rich_bound(
    g: &BipartiteGraphView<'_>,
    mu_squared: &Rational,
    q: &RichnessQuery,
) -> RichBound {
    let weight = mu_squared * int(g.right_degree() as i64);
    let constant = richness_constant(q, &weight);
    RichBound {
        min_size: q.size_factor() * rational::frac(g.num_left() as i64, g.right_degree() as i64),
        guaranteed: &constant * int(g.num_right() as i64),
        constant,
    }
}

/// Which finite-geometry corollary to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorollaryKind {
    Incidence,
    RichFlats,
    RichPoints,
}

/// Corollary constants in both their asymptotic form (powers of q) and the exact
/// design-level form. Only the design-level values are guaranteed at finite q.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "corollary", rename_all = "kebab-case")]
pub enum CorollaryBounds {
    Incidence {
        /// q^{m−n} = r/|B|; expected incidences are density × |P||L|.
        density: String,
        /// r − λ; the exact allowance is sqrt(coefficient × |P||L|).
        design_allowance_coefficient: u64,
        /// q^{m(n−m)}, the leading-order replacement for r − λ.
        asymptotic_allowance_coefficient: u64,
    },
    RichFlats {
        min_points: String,
        asymptotic_constant: String,
        /// a_{ε,t} q^{(m+1)(n−m)}.
        asymptotic_guaranteed: f64,
        design_constant: String,
        /// a_{ε,t,D} |B|.
        design_guaranteed: String,
    },
    RichPoints {
        min_flats: String,
        asymptotic_constant: String,
        /// b_{ε,t,q} q^n.
        asymptotic_guaranteed: f64,
        design_constant: String,
        /// b_{ε,t,D} |X|.
        design_guaranteed: String,
    },
}

pub fn ff_corollary_bounds(
    g: &GeometryParams,
    which: CorollaryKind,
    query: Option<&RichnessQuery>,
) -> Result<CorollaryBounds, BoundError> {
    let p = DesignParams::affine(g)?;
    let q = g.q as i64;
    let qpow = |e: u32| -> Rational { int(q).pow(e as i32) };
    let (n, m) = (g.n, g.m);
    let need_query = || query.cloned().ok_or(BoundError::MissingQuery);
    Ok(match which {
        CorollaryKind::Incidence => CorollaryBounds::Incidence {
            density: rational::display(&(qpow(m) / qpow(n))),
            design_allowance_coefficient: (p.r - p.lambda) as u64,
            asymptotic_allowance_coefficient: (q as u64).pow(m * (n - m)),
        },
        CorollaryKind::RichFlats => {
            let query = need_query()?;
            let asym = richness_constant(&query, &int(1));
            let exact = rich_block_bound(&p, &query);
            CorollaryBounds::RichFlats {
                min_points: rational::display(&(query.size_factor() * qpow(n - m))),
                asymptotic_guaranteed: rational::to_f64(&(&asym * qpow((m + 1) * (n - m)))),
                asymptotic_constant: rational::display(&asym),
                design_constant: rational::display(&exact.constant),
                design_guaranteed: rational::display(&exact.guaranteed),
            }
        }
        CorollaryKind::RichPoints => {
            let query = need_query()?;
            let asym = richness_constant(&query, &qpow(m * (n - m - 1)));
            let exact = rich_point_bound(&p, &query);
            CorollaryBounds::RichPoints {
                min_flats: rational::display(&(query.size_factor() * qpow(n - m))),
                asymptotic_guaranteed: rational::to_f64(&(&asym * qpow(n))),
                asymptotic_constant: rational::display(&asym),
                design_constant: rational::display(&exact.constant),
                design_guaranteed: rational::display(&exact.guaranteed),
            }
        }
    })
}

/// Bound checked by the harness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Incidence,
    RichBlocks(RichnessQuery),
    RichPoints(RichnessQuery),
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::Incidence => "incidence",
            BoundKind::RichBlocks(_) => "rich-blocks",
            BoundKind::RichPoints(_) => "rich-points",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Satisfied,
    Violated,
    /// The subset is below the theorem's size threshold; nothing is claimed.
    HypothesisUnmet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    /// Exact value, or `sqrt(n)` for the incidence allowance.
    pub exact: String,
    pub approx: f64,
}

/// One measurement compared against one bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub parameters: BTreeMap<String, String>,
    /// Allowance for the incidence bound, guaranteed count for richness bounds.
    pub bound_value: BoundValue,
    /// |I − expected| for the incidence bound, Γ_t for richness bounds.
    pub measured: f64,
    pub status: BoundStatus,
    /// Whether the inequality holds on the measured value, hypothesis aside.
    pub satisfied: bool,
    /// measured / bound_value.
    pub slack_ratio: Option<f64>,
    /// How close the measurement came to the bound; above 1 means the
    /// inequality failed. Deviation over allowance for the two-sided bound,
    /// guaranteed over measured for lower bounds.
    pub tightness: Option<f64>,
    pub subset: Option<SubsetPair>,
}

impl BoundReport {
    pub fn is_violation(&self) -> bool {
        self.status == BoundStatus::Violated
    }
}

fn base_parameters(d: &Design) -> BTreeMap<String, String> {
    let p = d.params();
    [
        ("num_points", p.num_points),
        ("num_blocks", p.num_blocks),
        ("r", p.r),
        ("k", p.k),
        ("lambda", p.lambda),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if den > 0.0 {
        Some(num / den)
    } else if num == 0.0 {
        Some(0.0)
    } else {
        None
    }
}

/// Measures the named bound on one subset pair. Richness bounds read only the
/// side they are about: `points` for rich blocks, `blocks` for rich points.
pub fn verify_bound(d: &Design, kind: &BoundKind, s: &SubsetPair) -> BoundReport {
    let mut parameters = base_parameters(d);
    parameters.insert("size_p".into(), s.points.len().to_string());
    parameters.insert("size_l".into(), s.blocks.len().to_string());
    match kind {
        BoundKind::Incidence => {
            let bound = incidence_bound(d.params(), s.points.len(), s.blocks.len())
                .expect("subset sizes come from a validated subset pair");
            let incidences = d.incidence_count(s);
            let deviation = (int(incidences as i64) - &bound.expected).abs();
            let measured = rational::to_f64(&deviation);
            let satisfied = bound.admits(incidences);
            parameters.insert("incidences".into(), incidences.to_string());
            parameters.insert("expected".into(), rational::display(&bound.expected));
            let ratio = ratio(measured, bound.allowance);
            BoundReport {
                bound_name: kind.name().into(),
                parameters,
                bound_value: BoundValue {
                    exact: format!("sqrt({})", rational::display(&bound.allowance_squared)),
                    approx: bound.allowance,
                },
                measured,
                status: if satisfied {
                    BoundStatus::Satisfied
                } else {
                    BoundStatus::Violated
                },
                satisfied,
                slack_ratio: ratio,
                tightness: ratio,
                subset: None,
            }
        }
        BoundKind::RichBlocks(q) | BoundKind::RichPoints(q) => {
            let (bound, size, measured) = match kind {
                BoundKind::RichBlocks(_) => (
                    rich_block_bound(d.params(), q),
                    s.points.len(),
                    d.rich_blocks(&s.points, q.t as usize).len(),
                ),
                _ => (
                    rich_point_bound(d.params(), q),
                    s.blocks.len(),
                    d.rich_points(&s.blocks, q.t as usize).len(),
                ),
            };
            parameters.insert("epsilon".into(), rational::display(&q.epsilon));
            parameters.insert("t".into(), q.t.to_string());
            parameters.insert("min_size".into(), rational::display(&bound.min_size));
            parameters.insert("constant".into(), rational::display(&bound.constant));
            let satisfied = int(measured as i64) >= bound.guaranteed;
            let hypothesis = int(size as i64) >= bound.min_size;
            let guaranteed = rational::to_f64(&bound.guaranteed);
            BoundReport {
                bound_name: kind.name().into(),
                parameters,
                bound_value: BoundValue {
                    exact: rational::display(&bound.guaranteed),
                    approx: guaranteed,
                },
                measured: measured as f64,
                status: match (hypothesis, satisfied) {
                    (false, _) => BoundStatus::HypothesisUnmet,
                    (true, true) => BoundStatus::Satisfied,
                    (true, false) => BoundStatus::Violated,
                },
                satisfied,
                slack_ratio: ratio(measured as f64, guaranteed),
                tightness: ratio(guaranteed, measured as f64),
                subset: None,
            }
        }
    }
}

/// How the size of a sampled subset is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeSpec {
    Fixed(usize),
    /// Size uniform on 0..=n, then a uniform subset of that size.
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingSpec {
    pub count: usize,
    pub seed: u64,
    pub point_size: SizeSpec,
    pub block_size: SizeSpec,
}

/// Aggregate of many [`BoundReport`]s.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationSummary {
    pub bound_name: String,
    pub evaluated: usize,
    pub satisfied: usize,
    pub violated: usize,
    pub hypothesis_unmet: usize,
    /// Report with the largest tightness among those meeting the hypothesis.
    pub tightest: Option<BoundReport>,
    /// Every violating report, with its subset attached.
    pub violations: Vec<BoundReport>,
}

impl VerificationSummary {
    fn new(kind: &BoundKind) -> Self {
        VerificationSummary {
            bound_name: kind.name().into(),
            evaluated: 0,
            satisfied: 0,
            violated: 0,
            hypothesis_unmet: 0,
            tightest: None,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, mut report: BoundReport, subset: &SubsetPair) {
        self.evaluated += 1;
        match report.status {
            BoundStatus::Satisfied => self.satisfied += 1,
            BoundStatus::Violated => self.violated += 1,
            BoundStatus::HypothesisUnmet => {
                self.hypothesis_unmet += 1;
                return;
            }
        }
        let tight = report.tightness.unwrap_or(f64::INFINITY);
        let better = self
            .tightest
            .as_ref()
            .is_none_or(|best| tight > best.tightness.unwrap_or(f64::INFINITY));
        if report.is_violation() {
            report.subset = Some(subset.clone());
            self.violations.push(report.clone());
        }
        if better {
            report.subset = Some(subset.clone());
            self.tightest = Some(report);
        }
    }

    pub fn has_violation(&self) -> bool {
        self.violated > 0
    }
}

fn draw(rng: &mut impl Rng, n: usize, spec: SizeSpec) -> Result<Vec<usize>, BoundError> {
    match spec {
        SizeSpec::Fixed(k) if k > n => Err(BoundError::SizeOutOfRange { size: k, limit: n }),
        SizeSpec::Fixed(k) => Ok(random_subset(rng, n, k)),
        SizeSpec::Uniform => Ok(random_sized_subset(rng, n)),
    }
}

/// Seeded uniform sampling of subset pairs; sample i is always drawn i-th, so the
/// result depends only on the design, the bound and the spec.
pub fn verify_sampled(
    d: &Design,
    kind: &BoundKind,
    spec: &SamplingSpec,
) -> Result<VerificationSummary, BoundError> {
    let p = d.params();
    let mut rng = seeded_rng(spec.seed);
    let mut summary = VerificationSummary::new(kind);
    for _ in 0..spec.count {
        let points = match kind {
            BoundKind::RichPoints(_) => Vec::new(),
            _ => draw(&mut rng, p.num_points, spec.point_size)?,
        };
        let blocks = match kind {
            BoundKind::RichBlocks(_) => Vec::new(),
            _ => draw(&mut rng, p.num_blocks, spec.block_size)?,
        };
        let s = SubsetPair { points, blocks };
        summary.record(verify_bound(d, kind, &s), &s);
    }
    Ok(summary)
}

/// Largest number of subset pairs [`verify_exhaustive`] will walk.
pub const MAX_EXHAUSTIVE: u128 = 1 << 24;

/// Subsets of one side enumerated by [`verify_exhaustive`].
#[derive(Clone, Copy)]
enum Family {
    /// The side is ignored by the bound: just the empty set.
    Unused,
    Sized(usize, usize),
    All(usize),
}

impl Family {
    fn new(n: usize, size: Option<usize>, used: bool) -> Result<Self, BoundError> {
        match size {
            _ if !used => Ok(Family::Unused),
            Some(k) if k > n => Err(BoundError::SizeOutOfRange { size: k, limit: n }),
            Some(k) => Ok(Family::Sized(n, k)),
            None => Ok(Family::All(n)),
        }
    }

    fn count(self) -> u128 {
        match self {
            Family::Unused => 1,
            Family::Sized(n, k) => binomial(n, k),
            Family::All(n) => 1u128.checked_shl(n as u32).unwrap_or(u128::MAX),
        }
    }

    fn iter(self) -> Box<dyn Iterator<Item = Vec<usize>>> {
        match self {
            Family::Unused => Box::new(std::iter::once(Vec::new())),
            Family::Sized(n, k) => Box::new(KSubsets::new(n, k)),
            Family::All(n) => Box::new(all_subsets(n)),
        }
    }
}

/// Every subset of the given sizes (every subset of any size when `None`).
pub fn verify_exhaustive(
    d: &Design,
    kind: &BoundKind,
    point_size: Option<usize>,
    block_size: Option<usize>,
) -> Result<VerificationSummary, BoundError> {
    let p = d.params();
    let points = Family::new(
        p.num_points,
        point_size,
        !matches!(kind, BoundKind::RichPoints(_)),
    )?;
    let blocks = Family::new(
        p.num_blocks,
        block_size,
        !matches!(kind, BoundKind::RichBlocks(_)),
    )?;
    let count = points.count().saturating_mul(blocks.count());
    if count > MAX_EXHAUSTIVE {
        return Err(BoundError::TooManySubsets {
            count,
            limit: MAX_EXHAUSTIVE,
        });
    }
    let mut summary = VerificationSummary::new(kind);
    for points in points.iter() {
        for blocks in blocks.iter() {
            let s = SubsetPair {
                points: points.clone(),
                blocks,
            };
            summary.record(verify_bound(d, kind, &s), &s);
        }
    }
    Ok(summary)
}

/// Hill-climbing search for the subset pair that comes closest to the bound.
///
/// For the incidence bound each move toggles one point or block. For richness
/// bounds the subset size is pinned at the smallest size meeting the hypothesis
/// and each move swaps one member for one non-member. The climb restarts from a
/// fresh random subset after a run of proposals without strict improvement.
/// Exactly `budget` subset pairs are evaluated.
pub fn tightness_search(
    d: &Design,
    kind: &BoundKind,
    budget: usize,
    seed: u64,
) -> Result<BoundReport, BoundError> {
    if budget == 0 {
        return Err(BoundError::ZeroBudget);
    }
    let p = d.params();
    let mut rng = seeded_rng(seed);

    // side being searched: (universe size, fixed subset size)
    let (universe, fixed_size) = match kind {
        BoundKind::Incidence => (p.num_points + p.num_blocks, None),
        BoundKind::RichBlocks(q) => (p.num_points, Some(rich_block_bound(p, q).min_size)),
        BoundKind::RichPoints(q) => (p.num_blocks, Some(rich_point_bound(p, q).min_size)),
    };
    let fixed_size = match fixed_size {
        Some(min) => {
            let k = rational::ceil_usize(&min);
            if k > universe {
                // no subset meets the hypothesis; report on the full side
                let all: Vec<usize> = (0..universe).collect();
                let s = side_pair(kind, p.num_points, &all);
                let mut report = verify_bound(d, kind, &s);
                report.subset = Some(s);
                return Ok(report);
            }
            Some(k)
        }
        None => None,
    };

    let fresh = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<bool> {
        let chosen = match fixed_size {
            Some(k) => random_subset(rng, universe, k),
            None => random_sized_subset(rng, universe),
        };
        let mut mask = vec![false; universe];
        for i in chosen {
            mask[i] = true;
        }
        mask
    };
    let evaluate = |mask: &[bool]| -> (f64, BoundReport, SubsetPair) {
        let members: Vec<usize> = (0..universe).filter(|&i| mask[i]).collect();
        let s = side_pair(kind, p.num_points, &members);
        let report = verify_bound(d, kind, &s);
        (report.tightness.unwrap_or(f64::INFINITY), report, s)
    };

    let patience = 2 * universe;
    let mut current = fresh(&mut rng);
    let (mut current_score, mut best, mut best_subset) = evaluate(&current);
    let mut best_score = current_score;
    let mut stale = 0usize;
    for _ in 1..budget {
        if stale >= patience {
            current = fresh(&mut rng);
            let (score, report, s) = evaluate(&current);
            current_score = score;
            stale = 0;
            if score > best_score {
                (best_score, best, best_subset) = (score, report, s);
            }
            continue;
        }
        let mut proposal = current.clone();
        match fixed_size {
            None => {
                let i = rng.gen_range(0..universe);
                proposal[i] = !proposal[i];
            }
            Some(k) => {
                if k == 0 || k == universe {
                    stale = patience;
                    continue;
                }
                let inside: Vec<usize> = (0..universe).filter(|&i| proposal[i]).collect();
                let outside: Vec<usize> = (0..universe).filter(|&i| !proposal[i]).collect();
                proposal[inside[rng.gen_range(0..inside.len())]] = false;
                proposal[outside[rng.gen_range(0..outside.len())]] = true;
            }
        }
        let (score, report, s) = evaluate(&proposal);
        if score > current_score {
            stale = 0;
        } else {
            stale += 1;
        }
        if score >= current_score {
            current = proposal;
            current_score = score;
        }
        if score > best_score {
            (best_score, best, best_subset) = (score, report, s);
        }
    }
    best.subset = Some(best_subset);
    Ok(best)
}

/// Splits a combined index set into a subset pair for the bound being searched.
fn side_pair(kind: &BoundKind, num_points: usize, members: &[usize]) -> SubsetPair {
    match kind {
        BoundKind::Incidence => SubsetPair {
            points: members
                .iter()
                .copied()
                .filter(|&i| i < num_points)
                .collect(),
            blocks: members
                .iter()
                .filter(|&&i| i >= num_points)
                .map(|&i| i - num_points)
                .collect(),
        },
        BoundKind::RichBlocks(_) => SubsetPair {
            points: members.to_vec(),
            blocks: Vec::new(),
        },
        BoundKind::RichPoints(_) => SubsetPair {
            points: Vec::new(),
            blocks: members.to_vec(),
        },
    }
}

/// Whether a_{ε,t,D} computed from the graph side with μ² = (r−λ)/(rk) and
/// Δ_R = k agrees exactly with the design-side constant.
pub fn graph_and_design_constants_agree(d: &Design, q: &RichnessQuery) -> bool {
    let g = BipartiteGraphView::from_design(d);
    let mu2 = crate::spectral::mu_squared(d.params());
    let from_graph = graph_rich_bound(&g, &mu2, q);
    let from_design = rich_block_bound(d.params(), q);
    from_graph == from_design
}

/// The limit of every richness constant as ε grows.
pub fn richness_limit() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn ag(q: u32, n: u32, m: u32) -> Design {
        Design::from_affine_geometry(&GeometryParams::new(q, n, m).unwrap()).unwrap()
    }

    fn query(eps: Rational, t: u64) -> RichnessQuery {
        RichnessQuery::new(eps, t).unwrap()
    }

    #[test]
    fn query_validation() {
        assert_eq!(
            RichnessQuery::new(int(0), 2),
            Err(BoundError::NonPositiveEpsilon)
        );
        assert_eq!(
            RichnessQuery::new(int(1), 1),
            Err(BoundError::ThresholdTooSmall(1))
        );
    }

    #[test]
    fn incidence_examples() {
        let d = Design::fano();
        let p = d.params();
        let full = incidence_bound(p, 7, 7).unwrap();
        assert_eq!(full.expected, int(21));
        assert!(full.admits(21));
        let empty = incidence_bound(p, 0, 5).unwrap();
        assert_eq!(empty.expected, int(0));
        assert_eq!(empty.allowance, 0.0);
        let b = incidence_bound(p, 3, 1).unwrap();
        assert_eq!(b.expected, frac(9, 7));
        assert!((b.allowance - 6f64.sqrt()).abs() < 1e-15);
        assert!(b.admits(3));
        assert!(incidence_bound(p, 8, 1).is_err());
    }

    #[test]
    fn rich_block_examples() {
        let fano = Design::fano();
        let b = rich_block_bound(fano.params(), &query(int(2), 2));
        assert_eq!(b.min_size, int(7));
        assert_eq!(b.constant, frac(2, 3));
        assert_eq!(b.guaranteed, frac(14, 3));
        let all: Vec<usize> = (0..7).collect();
        assert_eq!(fano.rich_blocks(&all, 2).len(), 7);

        let d = ag(3, 2, 1);
        let b = rich_block_bound(d.params(), &query(int(1), 2));
        assert_eq!(b.min_size, int(6));
        assert_eq!(b.constant, frac(2, 5));
        assert_eq!(b.guaranteed, frac(24, 5));
    }

    #[test]
    fn rich_point_examples() {
        let fano = Design::fano();
        let b = rich_point_bound(fano.params(), &query(int(2), 2));
        assert_eq!(b.min_size, int(7));
        assert_eq!(b.constant, frac(2, 3));
        assert_eq!(b.guaranteed, frac(14, 3));
        let d = ag(3, 2, 1);
        let b = rich_point_bound(d.params(), &query(int(1), 2));
        assert_eq!(b.constant, frac(1, 3));
        assert_eq!(b.guaranteed, int(3));
    }

    #[test]
    fn large_epsilon_tends_to_one() {
        let d = ag(3, 2, 1);
        let q = query(int(1_000_000), 2);
        for c in [
            rich_block_bound(d.params(), &q).constant,
            rich_point_bound(d.params(), &q).constant,
        ] {
            assert!(richness_limit() - c < frac(1, 100_000));
        }
    }

    #[test]
    fn monotone_in_epsilon() {
        let d = ag(2, 3, 1);
        for t in 2..6 {
            let mut last = int(0);
            for i in 1..60 {
                let a = rich_block_bound(d.params(), &query(frac(i, 7), t)).constant;
                assert!(a > last);
                last = a;
            }
        }
    }

    #[test]
    fn graph_bound_matches_design_bounds() {
        for d in [Design::fano(), ag(3, 2, 1), ag(2, 3, 2), ag(2, 4, 1)] {
            for (e, t) in [(frac(1, 2), 2), (int(1), 3), (frac(7, 3), 4)] {
                let q = query(e, t);
                assert!(graph_and_design_constants_agree(&d, &q));
                // dual graph reproduces the rich-point constant
                let dual = BipartiteGraphView::dual_of_design(&d);
                let p = d.params();
                let mu2 = crate::spectral::mu_squared(p);
                let from_graph = graph_rich_bound(&dual, &mu2, &q);
                assert_eq!(from_graph.constant, rich_point_bound(p, &q).constant);
                assert_eq!(from_graph.guaranteed, rich_point_bound(p, &q).guaranteed);
            }
        }
    }

    #[test]
    fn complete_bipartite_graph() {
        let adj = vec![vec![0, 1], vec![0, 1]];
        let g = BipartiteGraphView::new(2, &adj).unwrap();
        let q = query(int(1), 2);
        let b = graph_rich_bound(&g, &int(0), &q);
        assert_eq!(b.constant, int(1));
        assert_eq!(b.min_size, int(2));
        assert_eq!(b.guaranteed, int(2));
        // with |S| = 2 both right vertices have 2 neighbours in S
        assert_eq!(g.right_degrees_into(&[0, 1]), vec![2, 2]);
    }

    #[test]
    fn corollaries() {
        let g = GeometryParams::new(3, 2, 1).unwrap();
        let q = query(int(1), 2);
        match ff_corollary_bounds(&g, CorollaryKind::RichFlats, Some(&q)).unwrap() {
            CorollaryBounds::RichFlats {
                asymptotic_constant,
                asymptotic_guaranteed,
                design_constant,
                design_guaranteed,
                min_points,
            } => {
                assert_eq!(asymptotic_constant, "1/3");
                assert_eq!(asymptotic_guaranteed, 3.0);
                assert_eq!(design_constant, "2/5");
                assert_eq!(design_guaranteed, "24/5");
                assert_eq!(min_points, "6");
            }
            other => panic!("{other:?}"),
        }
        let g = GeometryParams::new(3, 3, 1).unwrap();
        match ff_corollary_bounds(&g, CorollaryKind::RichPoints, Some(&q)).unwrap() {
            CorollaryBounds::RichPoints {
                asymptotic_constant,
                ..
            } => {
                assert_eq!(asymptotic_constant, "1/7")
            }
            other => panic!("{other:?}"),
        }
        // m = n - 1: the q-power weight is q^0 = 1
        let g = GeometryParams::new(5, 3, 2).unwrap();
        match ff_corollary_bounds(&g, CorollaryKind::RichPoints, Some(&q)).unwrap() {
            CorollaryBounds::RichPoints {
                asymptotic_constant,
                ..
            } => {
                assert_eq!(asymptotic_constant, "1/3")
            }
            other => panic!("{other:?}"),
        }
        let g = GeometryParams::new(3, 2, 1).unwrap();
        assert_eq!(
            ff_corollary_bounds(&g, CorollaryKind::Incidence, None).unwrap(),
            CorollaryBounds::Incidence {
                density: "1/3".into(),
                design_allowance_coefficient: 3,
                asymptotic_allowance_coefficient: 3,
            }
        );
    }

    #[test]
    fn reports_and_hypothesis() {
        let d = ag(3, 2, 1);
        let q = query(int(1), 2);
        let small = SubsetPair {
            points: vec![0, 1, 2],
            blocks: vec![],
        };
        let r = verify_bound(&d, &BoundKind::RichBlocks(q.clone()), &small);
        assert_eq!(r.status, BoundStatus::HypothesisUnmet);
        assert!(!r.is_violation());

        let fano = Design::fano();
        let s = SubsetPair::new(&fano, fano.block(0).to_vec(), vec![0]).unwrap();
        let r = verify_bound(&fano, &BoundKind::Incidence, &s);
        assert_eq!(r.status, BoundStatus::Satisfied);
        let expected = (3.0 - 9.0 / 7.0) / 6f64.sqrt();
        assert!((r.tightness.unwrap() - expected).abs() < 1e-12);
        assert!((r.tightness.unwrap() - 0.700).abs() < 1e-3);

        let full = verify_bound(&fano, &BoundKind::Incidence, &SubsetPair::full(&fano));
        assert_eq!(full.measured, 0.0);
        assert_eq!(full.tightness, Some(0.0));
    }

    #[test]
    fn sampled_fano_incidence() {
        let d = Design::fano();
        let spec = SamplingSpec {
            count: 1000,
            seed: 7,
            point_size: SizeSpec::Uniform,
            block_size: SizeSpec::Uniform,
        };
        let s = verify_sampled(&d, &BoundKind::Incidence, &spec).unwrap();
        assert_eq!(s.evaluated, 1000);
        assert_eq!(s.violated, 0);
        assert_eq!(s, verify_sampled(&d, &BoundKind::Incidence, &spec).unwrap());
    }

    #[test]
    fn exhaustive_ag23_rich() {
        let d = ag(3, 2, 1);
        let q = query(int(1), 2);
        let s = verify_exhaustive(&d, &BoundKind::RichBlocks(q.clone()), Some(6), None).unwrap();
        assert_eq!((s.evaluated, s.satisfied), (84, 84));
        let s = verify_exhaustive(&d, &BoundKind::RichPoints(q), None, Some(6)).unwrap();
        assert_eq!((s.evaluated, s.satisfied), (924, 924));
        let s = verify_exhaustive(&ag(2, 2, 1), &BoundKind::Incidence, None, None).unwrap();
        assert_eq!((s.evaluated, s.violated), (1024, 0));
    }

    #[test]
    fn tightness_search_finds_collinear_triple() {
        let d = Design::fano();
        let best = tightness_search(&d, &BoundKind::Incidence, 2000, 11).unwrap();
        assert!(best.tightness.unwrap() >= (3.0 - 9.0 / 7.0) / 6f64.sqrt() - 1e-12);
        assert!(best.tightness.unwrap() <= 1.0);
        assert_eq!(
            best,
            tightness_search(&d, &BoundKind::Incidence, 2000, 11).unwrap()
        );
        assert!(tightness_search(&d, &BoundKind::Incidence, 0, 1).is_err());
    }

    #[test]
    fn tightness_search_rich_points() {
        // two full pencils: every 2-rich point is one of the two centres or a
        // crossing of a line from each pencil
        let d = ag(3, 2, 1);
        let mut pencils: Vec<usize> = d.blocks_through(0).to_vec();
        pencils.extend_from_slice(d.blocks_through(8));
        let s = SubsetPair::new(&d, vec![], pencils).unwrap();
        let q = query(int(1), 2);
        let r = verify_bound(&d, &BoundKind::RichPoints(q.clone()), &s);
        assert_eq!(r.status, BoundStatus::Satisfied);
        let best = tightness_search(&d, &BoundKind::RichPoints(q), 3000, 5).unwrap();
        assert!(best.tightness.unwrap() >= r.tightness.unwrap() - 1e-12);
        assert!(!best.is_violation());
    }
}
