//! Triangle areas over F_q², dot-product multiplicities, rich lines through a
//! common vertex, and the distinct-areas experiment built on them.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use rand::Rng;
use serde::Serialize;

use crate::bounds::{richness_constant, RichnessQuery};
use crate::design::Design;
use crate::error::{BoundError, TriangleError};
use crate::field::{FieldElement, FiniteField};
use crate::geometry::{line_through_origin, GeometryParams, Point};
use crate::rational::{self, int, Rational};
use crate::subsets::{binomial, random_subset, seeded_rng, KSubsets};

/// Header keyword of the point-set text format.
const HEADER: &str = "fq2";

/// Distinct points of the affine plane F_q², kept in canonical (index) order.
#[derive(Clone, Debug)]
pub struct PlanePointSet {
    field: FiniteField,
    points: Vec<Point>,
}

impl PlanePointSet {
    pub fn new(field: &FiniteField, mut points: Vec<Point>) -> Result<Self, TriangleError> {
        let q = field.order();
        for p in &points {
            if p.dim() != 2 || p.coords().iter().any(|c| c.index() >= q) {
                return Err(TriangleError::NotPlanar);
            }
        }
        points.sort_by_key(|p| p.index(q));
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(TriangleError::RepeatedPoint);
        }
        Ok(PlanePointSet {
            field: field.clone(),
            points,
        })
    }

    /// Points given by their lexicographic indices in `0..q²`.
    pub fn from_indices(field: &FiniteField, indices: &[usize]) -> Result<Self, TriangleError> {
        let q = field.order();
        let total = (q as usize) * (q as usize);
        if indices.iter().any(|&i| i >= total) {
            return Err(TriangleError::NotPlanar);
        }
        let points = indices
            .iter()
            .map(|&i| Point::from_index(i, 2, q))
            .collect();
        Self::new(field, points)
    }

    pub fn full_plane(field: &FiniteField) -> Self {
        let total = (field.order() as usize).pow(2);
        Self::from_indices(field, &(0..total).collect::<Vec<_>>()).expect("indices are in range")
    }

    /// Uniformly random set of `size` points.
    pub fn random<R: Rng + ?Sized>(
        field: &FiniteField,
        size: usize,
        rng: &mut R,
    ) -> Result<Self, TriangleError> {
        let total = (field.order() as usize).pow(2);
        if size > total {
            return Err(TriangleError::BadSize);
        }
        Self::from_indices(field, &random_subset(rng, total, size))
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        let q = self.field.order();
        self.points.iter().map(|p| p.index(q)).collect()
    }

    pub fn contains(&self, x: &Point) -> bool {
        let q = self.field.order();
        self.points
            .binary_search_by_key(&x.index(q), |p| p.index(q))
            .is_ok()
    }

    /// `fq2 <p> <n>` followed by one point per line: the n coefficients of the
    /// x coordinate, then the n coefficients of the y coordinate.
    pub fn to_text(&self) -> String {
        let f = &self.field;
        let mut out = format!("{HEADER} {} {}\n", f.characteristic(), f.degree());
        for p in &self.points {
            let line: Vec<String> = p
                .coords()
                .iter()
                .flat_map(|&c| f.coeffs(c))
                .map(|c| c.to_string())
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses [`PlanePointSet::to_text`] output; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self, TriangleError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, message: &str| TriangleError::Parse {
            line,
            message: message.to_string(),
        };
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != HEADER {
            return Err(parse_err(hline, "expected `fq2 <p> <n>`"));
        }
        let p: u32 = fields[1]
            .parse()
            .map_err(|_| parse_err(hline, "bad characteristic"))?;
        let n: u32 = fields[2]
            .parse()
            .map_err(|_| parse_err(hline, "bad degree"))?;
        let field = FiniteField::new(p, n)?;
        let n = n as usize;
        let mut points = Vec::new();
        for (line, body) in lines {
            let coeffs: Vec<u32> = body
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(line, "bad coefficient")))
                .collect::<Result<_, _>>()?;
            if coeffs.len() != 2 * n {
                return Err(parse_err(line, &format!("expected {} coefficients", 2 * n)));
            }
            let x = field
                .from_coeffs(&coeffs[..n])
                .map_err(|e| parse_err(line, &e.to_string()))?;
            let y = field
                .from_coeffs(&coeffs[n..])
                .map_err(|e| parse_err(line, &e.to_string()))?;
            points.push(Point::new(vec![x, y]));
        }
        Self::new(&field, points)
    }
}

/// Determinant of the matrix with rows (1,1,1), (a_x,b_x,c_x), (a_y,b_y,c_y).
pub fn triangle_area(a: &Point, b: &Point, c: &Point, f: &FiniteField) -> FieldElement {
    let (a, b, c) = (a.coords(), b.coords(), c.coords());
    let bx = f.sub(b[0], a[0]);
    let by = f.sub(b[1], a[1]);
    let cx = f.sub(c[0], a[0]);
    let cy = f.sub(c[1], a[1]);
    f.sub(f.mul(bx, cy), f.mul(cx, by))
}

pub fn dot(a: &Point, b: &Point, f: &FiniteField) -> FieldElement {
    let (a, b) = (a.coords(), b.coords());
    f.add(f.mul(a[0], b[0]), f.mul(a[1], b[1]))
}

/// x⊥ = (−x_y, x_x).
pub fn perp(x: &Point, f: &FiniteField) -> Point {
    let c = x.coords();
    Point::new(vec![f.neg(c[1]), c[0]])
}

/// ν(d) = |{(a, b) ∈ F × G : a·b = d}| for every d in F_q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DotProductHistogram {
    /// counts[d.index()] = ν(d).
    pub counts: Vec<u64>,
}

impl DotProductHistogram {
    pub fn get(&self, d: FieldElement) -> u64 {
        self.counts[d.index() as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn sum_of_squares(&self) -> u128 {
        self.counts.iter().map(|&c| (c as u128) * (c as u128)).sum()
    }

    /// Number of d with ν(d) ≠ 0.
    pub fn support(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

fn same_field(a: &FiniteField, b: &FiniteField) -> bool {
    a.characteristic() == b.characteristic() && a.degree() == b.degree()
}

pub fn dot_product_histogram(
    f_set: &PlanePointSet,
    g_set: &PlanePointSet,
) -> Result<DotProductHistogram, TriangleError> {
    if !same_field(&f_set.field, &g_set.field) {
        return Err(TriangleError::NotPlanar);
    }
    if f_set.points.iter().any(Point::is_origin) {
        return Err(TriangleError::OriginInF);
    }
    let f = &f_set.field;
    let mut counts = vec![0u64; f.order() as usize];
    for a in &f_set.points {
        for b in &g_set.points {
            counts[dot(a, b, f).index() as usize] += 1;
        }
    }
    Ok(DotProductHistogram { counts })
}

/// max over x ≠ 0 of |F ∩ l_x|, where l_x is the line through the origin and x.
pub fn max_line_through_origin(set: &PlanePointSet) -> Result<usize, TriangleError> {
    let mut per_line: BTreeMap<_, usize> = BTreeMap::new();
    for x in set.points.iter().filter(|x| !x.is_origin()) {
        *per_line
            .entry(line_through_origin(x, &set.field)?)
            .or_default() += 1;
    }
    Ok(per_line.values().copied().max().unwrap_or(0))
}

/// Both sides of Σ_d ν(d)² ≤ |F|²|G|²/q + q|F||G|·max_x |F ∩ l_x|.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuSquareCheck {
    pub lhs: u128,
    /// Exact right-hand side.
    pub rhs_exact: String,
    pub rhs: f64,
    pub max_line: usize,
    pub holds: bool,
}

pub fn nu_square_check(
    f_set: &PlanePointSet,
    g_set: &PlanePointSet,
) -> Result<NuSquareCheck, TriangleError> {
    let hist = dot_product_histogram(f_set, g_set)?;
    let max_line = max_line_through_origin(f_set)?;
    let q = f_set.field.order() as i64;
    let (nf, ng) = (f_set.len() as i64, g_set.len() as i64);
    let product = int(nf) * int(ng);
    let rhs = &product * &product / int(q) + int(q) * &product * int(max_line as i64);
    let lhs = hist.sum_of_squares();
    let lhs_r = Rational::from_integer(lhs.into());
    Ok(NuSquareCheck {
        lhs,
        rhs_exact: rational::display(&rhs),
        rhs: rational::to_f64(&rhs),
        max_line,
        holds: lhs_r <= rhs,
    })
}

/// The plane AG(2, q) as a point/line design, with points indexed lexicographically.
fn plane_design(f: &FiniteField) -> Result<Design, TriangleError> {
    let g = GeometryParams::new(f.order(), 2, 1)?;
    Ok(Design::from_affine_geometry(&g)?)
}

/// Lower bound on the number of t-rich lines through the best point of a set of
/// `size` points, from the rich-line bound applied to every subset size that
/// meets its hypothesis: max over s of t·a_{ε_s,t}·|B|/s with ε_s = s/((t−1)q) − 1.
pub fn rich_lines_through_best_point(q: u32, size: usize, t: u64, min_size: usize) -> Rational {
    let qq = q as i64;
    // exact design constants of AG(2,q): r = q + 1, λ = 1, |B| = q² + q
    let weight = rational::frac(qq, qq + 1);
    let blocks = int(qq * qq + qq);
    let base = (t as usize - 1) * q as usize;
    let mut best = int(0);
    for s in min_size.max(base + 1)..=size {
        let eps = rational::frac(s as i64, base as i64) - int(1);
        let query = RichnessQuery::new(eps, t).expect("ε_s > 0 and t >= 2");
        let value = int(t as i64) * richness_constant(&query, &weight) * &blocks / int(s as i64);
        if value > best {
            best = value;
        }
    }
    best
}

/// tε² / ((1+ε)(ε²(t−1) + 1 + ε)): the rich-line count per unit q obtained by
/// averaging the leading-order rich-line bound over a set of exactly (1+ε)(t−1)q points.
pub fn rich_line_constant(q: &RichnessQuery) -> Rational {
    let e = q.epsilon();
    let t = int(q.t() as i64);
    let e2 = e * e;
    &t * &e2 / ((int(1) + e) * (&e2 * (&t - int(1)) + int(1) + e))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RichLineVertex {
    /// Coordinates of z as field element indices.
    pub z: Vec<u32>,
    pub t: u64,
    pub rich_line_count: usize,
    /// Indices of the t-rich lines through z in the plane design.
    #[serde(skip)]
    pub rich_lines: Vec<usize>,
    /// Guaranteed count, exact.
    pub guarantee_exact: String,
    pub guarantee: f64,
    /// Leading-order constant c'_{ε,t}: sets of (1+ε)(t−1)q points have a point on c'·q t-rich lines.
    pub rich_line_constant: String,
    pub satisfied: bool,
}

fn plane_index(set: &PlanePointSet) -> Vec<bool> {
    let q = set.field.order() as usize;
    let mut member = vec![false; q * q];
    for i in set.indices() {
        member[i] = true;
    }
    member
}

fn rich_vertex_in(d: &Design, set: &PlanePointSet, t: u64) -> (usize, Vec<usize>) {
    let member = plane_index(set);
    let rich: Vec<bool> = d
        .blocks()
        .iter()
        .map(|b| b.iter().filter(|&&x| member[x]).count() as u64 >= t)
        .collect();
    let mut best = (usize::MAX, Vec::new());
    for z in set.indices() {
        let lines: Vec<usize> = d
            .blocks_through(z)
            .iter()
            .copied()
            .filter(|&b| rich[b])
            .collect();
        if best.0 == usize::MAX || lines.len() > best.1.len() {
            best = (z, lines);
        }
    }
    best
}

fn coords(p: &Point) -> Vec<u32> {
    p.coords().iter().map(|c| c.index()).collect()
}

/// The point z of P on the most t-rich lines (smallest index on ties), with the
/// guaranteed count for sets of this size.
pub fn rich_line_vertex(
    set: &PlanePointSet,
    t: u64,
    epsilon: &Rational,
) -> Result<RichLineVertex, TriangleError> {
    let query = RichnessQuery::new(epsilon.clone(), t)?;
    let q = set.field.order();
    let required = (int(1) + epsilon) * int(t as i64 - 1) * int(q as i64);
    if int(set.len() as i64) < required {
        return Err(TriangleError::TooSmall {
            size: set.len(),
            required: rational::display(&required),
        });
    }
    let d = plane_design(&set.field)?;
    let (z, rich_lines) = rich_vertex_in(&d, set, t);
    let guarantee = rich_lines_through_best_point(q, set.len(), t, rational::ceil_usize(&required));
    Ok(RichLineVertex {
        z: coords(&Point::from_index(z, 2, q)),
        t,
        rich_line_count: rich_lines.len(),
        satisfied: int(rich_lines.len() as i64) >= guarantee,
        guarantee_exact: rational::display(&guarantee),
        guarantee: rational::to_f64(&guarantee),
        rich_line_constant: rational::display(&rich_line_constant(&query)),
        rich_lines,
    })
}

/// q(t−1)c'² / ((t−1)c'² + 1) for c' = rich_lines / q: the Cauchy–Schwarz lower
/// bound on distinct areas from t−1 points on each of c'q lines through z.
fn area_guarantee(q: u32, t: u64, rich_lines: &Rational) -> Rational {
    let c = rich_lines / int(q as i64);
    let w = int(t as i64 - 1) * &c * &c;
    int(q as i64) * &w / (&w + int(1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistinctAreasReport {
    pub q: u32,
    pub size: usize,
    pub epsilon: String,
    /// Common vertex, as field element indices.
    pub z: Vec<u32>,
    pub t: u64,
    /// Guaranteed number of t-rich lines through z.
    pub rich_line_guarantee: String,
    pub rich_line_count: usize,
    /// Lines through z used to build P′.
    pub lines_used: usize,
    pub p_prime_size: usize,
    pub num_distinct_areas: usize,
    pub guarantee_exact: String,
    pub guarantee: f64,
    pub satisfied: bool,
}

/// Runs the common-vertex pipeline: pick t, find z on many t-rich lines, keep
/// t−1 points on each of the guaranteed number of those lines, move z to the
/// origin and count distinct a⊥·b over ordered pairs (zero included).
pub fn distinct_areas_experiment(
    set: &PlanePointSet,
    epsilon: &Rational,
) -> Result<DistinctAreasReport, TriangleError> {
    let f = &set.field;
    let q = f.order();
    let qq = q as usize;
    if !epsilon.is_positive() {
        return Err(BoundError::NonPositiveEpsilon.into());
    }
    let required = (int(1) + epsilon) * int(q as i64);
    if int(set.len() as i64) < required {
        return Err(TriangleError::TooSmall {
            size: set.len(),
            required: rational::display(&required),
        });
    }

    // t with the best final guarantee; t is feasible while (t−1)q < |P|
    let mut choice: Option<(u64, Rational, Rational)> = None;
    let mut t = 2u64;
    while (t as usize - 1) * qq < set.len() {
        let lines = rich_lines_through_best_point(q, set.len(), t, 0);
        let g = area_guarantee(q, t, &lines);
        if choice.as_ref().is_none_or(|(_, _, best)| g > *best) {
            choice = Some((t, lines, g));
        }
        t += 1;
    }
    let (t, line_guarantee, guarantee) = choice.expect("t = 2 is feasible since |P| > q");

    let d = plane_design(f)?;
    let (z, rich_lines) = rich_vertex_in(&d, set, t);
    let member = plane_index(set);
    let wanted = rational::ceil_usize(&line_guarantee);
    let used: Vec<usize> = rich_lines.iter().copied().take(wanted).collect();
    let mut p_prime = Vec::new();
    for &b in &used {
        let mut on_line: Vec<usize> = d
            .block(b)
            .iter()
            .copied()
            .filter(|&x| member[x] && x != z)
            .collect();
        on_line.sort_unstable();
        p_prime.extend(on_line.into_iter().take(t as usize - 1));
    }
    let zp = Point::from_index(z, 2, q);
    let translated: Vec<Point> = p_prime
        .iter()
        .map(|&x| Point::from_index(x, 2, q).sub(&zp, f))
        .collect();
    let mut areas = vec![false; qq];
    for a in &translated {
        let ap = perp(a, f);
        for b in &translated {
            areas[dot(&ap, b, f).index() as usize] = true;
        }
    }
    let count = areas.iter().filter(|&&x| x).count();
    Ok(DistinctAreasReport {
        q,
        size: set.len(),
        epsilon: rational::display(epsilon),
        z: coords(&zp),
        t,
        rich_line_guarantee: rational::display(&line_guarantee),
        rich_line_count: rich_lines.len(),
        lines_used: used.len(),
        p_prime_size: translated.len(),
        num_distinct_areas: count,
        satisfied: used.len() >= wanted && int(count as i64) >= guarantee,
        guarantee_exact: rational::display(&guarantee),
        guarantee: rational::to_f64(&guarantee),
    })
}

/// Which areas the triangles of a point set realize, indexed by field element.
/// Triangles are ordered triples, so the realized set is closed under negation.
pub fn realized_areas(points: &[Point], f: &FiniteField) -> Vec<bool> {
    let mut seen = vec![false; f.order() as usize];
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate().skip(i + 1) {
            for c in &points[j + 1..] {
                let area = triangle_area(a, b, c, f);
                seen[area.index() as usize] = true;
                seen[f.neg(area).index() as usize] = true;
            }
        }
    }
    seen
}

/// Nonzero areas not realized by any triangle of the set.
pub fn missing_areas(points: &[Point], f: &FiniteField) -> Vec<u32> {
    let seen = realized_areas(points, f);
    (1..f.order()).filter(|&d| !seen[d as usize]).collect()
}

/// Point set whose triangles miss at least one nonzero area.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MissingAreaWitness {
    /// Points as lexicographic plane indices.
    pub points: Vec<usize>,
    /// Missing nonzero areas as field element indices.
    pub missing: Vec<u32>,
}

/// Largest number of witnesses a search keeps.
pub const MAX_WITNESSES: usize = 1000;

/// Looks for `size`-point sets that miss some nonzero area. When there are at
/// most `budget` sets of this size they are all checked; otherwise a seeded
/// annealing walk with one-point swaps spends exactly `budget` evaluations,
/// favouring sets that miss more areas. Witnesses are returned sorted and
/// deduplicated.
pub fn missing_area_search(
    q: u32,
    size: usize,
    budget: usize,
    seed: u64,
) -> Result<Vec<MissingAreaWitness>, TriangleError> {
    let f = FiniteField::with_order(q)?;
    let total = (q as usize) * (q as usize);
    if size < 3 || size > total {
        return Err(TriangleError::BadSize);
    }
    let points: Vec<Point> = (0..total).map(|i| Point::from_index(i, 2, q)).collect();
    let evaluate = |set: &[usize]| -> Vec<u32> {
        let chosen: Vec<Point> = set.iter().map(|&i| points[i].clone()).collect();
        missing_areas(&chosen, &f)
    };
    let mut found = BTreeSet::new();
    let mut keep = |set: &[usize], missing: Vec<u32>| {
        if !missing.is_empty() && found.len() < MAX_WITNESSES {
            found.insert(MissingAreaWitness {
                points: set.to_vec(),
                missing,
            });
        }
    };

    if binomial(total, size) <= budget as u128 {
        for set in KSubsets::new(total, size) {
            let missing = evaluate(&set);
            keep(&set, missing);
        }
        return Ok(found.into_iter().collect());
    }

    let mut rng = seeded_rng(seed);
    let mut current = random_subset(&mut rng, total, size);
    let mut score = evaluate(&current);
    keep(&current, score.clone());
    for step in 1..budget {
        let temperature = 1.0 - step as f64 / budget as f64;
        let mut proposal = current.clone();
        let out = rng.gen_range(0..size);
        let incoming = loop {
            let c = rng.gen_range(0..total);
            if !proposal.contains(&c) {
                break c;
            }
        };
        proposal[out] = incoming;
        proposal.sort_unstable();
        let missing = evaluate(&proposal);
        let gain = missing.len() as f64 - score.len() as f64;
        let accept = gain >= 0.0 || rng.gen::<f64>() < (gain / temperature.max(1e-9)).exp();
        keep(&proposal, missing.clone());
        if accept {
            current = proposal;
            score = missing;
        }
    }
    Ok(found.into_iter().collect())
}
