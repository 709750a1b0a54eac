//! Balanced incomplete block designs.
//!
//! A [`Design`] can only be obtained through validation: every point lies in
//! `r` blocks, every block has `k` points, every pair of distinct points lies
//! in `lambda` blocks, and no block contains every point. Points are
//! identified by index; geometric labels are optional.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::DesignError;
use crate::field::FiniteField;
use crate::geometry::{self, q_binomial, GeometryParams, Point};

/// Largest point count accepted by validation; pair coverage is tabulated densely.
pub const MAX_DESIGN_POINTS: usize = 4096;

/// The five parameters |X|, |B|, r, k, lambda of a BIBD.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignParams {
    pub num_points: usize,
    pub num_blocks: usize,
    pub r: usize,
    pub k: usize,
    pub lambda: usize,
}

impl DesignParams {
    /// Parameters of the design of points and m-flats of F_q^n, straight from the
    /// q-binomial formulas. For m = 0 the pair count is 0 (no block holds two points).
    pub fn affine(g: &GeometryParams) -> Result<Self, DesignError> {
        let (q, n, m) = (g.q as u64, g.n as i64, g.m as i64);
        let to_usize = |v: u128| usize::try_from(v).map_err(|_| geometry_overflow());
        let num_blocks = q_binomial(n + 1, m + 1, q)? - q_binomial(n, m + 1, q)?;
        let lambda = if m == 0 {
            0
        } else {
            q_binomial(n - 1, m - 1, q)?
        };
        Ok(DesignParams {
            num_points: to_usize(g.num_points()? as u128)?,
            num_blocks: to_usize(num_blocks)?,
            r: to_usize(q_binomial(n, m, q)?)?,
            k: to_usize((q as u128).pow(m as u32))?,
            lambda: to_usize(lambda)?,
        })
    }

    /// Whether r|X| = k|B| and lambda(|X| - 1) = r(k - 1).
    pub fn satisfies_counting_relations(&self) -> bool {
        self.r * self.num_points == self.k * self.num_blocks
            && self.lambda * (self.num_points - 1) == self.r * (self.k - 1)
    }
}

fn geometry_overflow() -> DesignError {
    DesignError::Geometry(crate::error::GeometryError::Overflow)
}

/// Subsets P of points and L of blocks, sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetPair {
    pub points: Vec<usize>,
    pub blocks: Vec<usize>,
}

impl SubsetPair {
    pub fn new(d: &Design, points: Vec<usize>, blocks: Vec<usize>) -> Result<Self, DesignError> {
        let points = normalize(points, d.params.num_points)?;
        let blocks = normalize(blocks, d.params.num_blocks)?;
        Ok(SubsetPair { points, blocks })
    }

    /// P = X and L = B.
    pub fn full(d: &Design) -> Self {
        SubsetPair {
            points: (0..d.params.num_points).collect(),
            blocks: (0..d.params.num_blocks).collect(),
        }
    }
}

fn normalize(mut v: Vec<usize>, limit: usize) -> Result<Vec<usize>, DesignError> {
    v.sort_unstable();
    v.dedup();
    match v.last() {
        Some(&index) if index >= limit => Err(DesignError::SubsetOutOfRange { index, limit }),
        _ => Ok(v),
    }
}

/// Validated (r, k, lambda)-BIBD.
#[derive(Clone, Debug)]
pub struct Design {
    params: DesignParams,
    blocks: Vec<Vec<usize>>,
    point_blocks: Vec<Vec<usize>>,
    bitsets: Vec<Vec<u64>>,
    point_labels: Option<Vec<Point>>,
    geometry: Option<GeometryParams>,
}

impl Design {
    /// Validates a block list and infers (r, k, lambda).
    pub fn from_block_list(
        num_points: usize,
        blocks: Vec<Vec<usize>>,
    ) -> Result<Self, DesignError> {
        if num_points < 2 || blocks.is_empty() || blocks.iter().all(|b| b.is_empty()) {
            return Err(DesignError::Empty);
        }
        if num_points > MAX_DESIGN_POINTS {
            return Err(DesignError::TooLarge(num_points));
        }
        let mut sorted = Vec::with_capacity(blocks.len());
        for (bi, mut block) in blocks.into_iter().enumerate() {
            block.sort_unstable();
            if let Some(&point) = block.iter().find(|&&x| x >= num_points) {
                return Err(DesignError::PointOutOfRange {
                    block: bi,
                    point,
                    num_points,
                });
            }
            if let Some(w) = block.windows(2).find(|w| w[0] == w[1]) {
                return Err(DesignError::RepeatedPoint {
                    block: bi,
                    point: w[0],
                });
            }
            sorted.push(block);
        }
        let blocks = sorted;

        let k = blocks[0].len();
        if let Some((bi, b)) = blocks.iter().enumerate().find(|(_, b)| b.len() != k) {
            return Err(DesignError::NotBlockUniform {
                block: bi,
                found: b.len(),
                expected: k,
            });
        }
        if k == 0 {
            return Err(DesignError::Empty);
        }
        if k == num_points {
            return Err(DesignError::DegenerateBlock(0));
        }

        let mut point_blocks = vec![Vec::new(); num_points];
        for (bi, b) in blocks.iter().enumerate() {
            for &x in b {
                point_blocks[x].push(bi);
            }
        }
        let r = point_blocks[0].len();
        if let Some((x, pb)) = point_blocks
            .iter()
            .enumerate()
            .find(|(_, pb)| pb.len() != r)
        {
            return Err(DesignError::NotPointRegular {
                point: x,
                found: pb.len(),
                expected: r,
            });
        }

        // pair coverage, upper triangle of a dense |X| x |X| table
        let mut cover = vec![0u32; num_points * num_points];
        for b in &blocks {
            for (i, &x) in b.iter().enumerate() {
                let row = x * num_points;
                for &y in &b[i + 1..] {
                    cover[row + y] += 1;
                }
            }
        }
        let lambda = cover[1] as usize;
        for a in 0..num_points {
            for b in a + 1..num_points {
                let found = cover[a * num_points + b] as usize;
                if found != lambda {
                    return Err(DesignError::NotPairBalanced {
                        a,
                        b,
                        found,
                        expected: lambda,
                    });
                }
            }
        }

        let params = DesignParams {
            num_points,
            num_blocks: blocks.len(),
            r,
            k,
            lambda,
        };
        debug_assert!(params.satisfies_counting_relations());
        let words = num_points.div_ceil(64);
        let bitsets = blocks
            .iter()
            .map(|b| {
                let mut bits = vec![0u64; words];
                for &x in b {
                    bits[x / 64] |= 1 << (x % 64);
                }
                bits
            })
            .collect();
        Ok(Design {
            params,
            blocks,
            point_blocks,
            bitsets,
            point_labels: None,
            geometry: None,
        })
    }

    /// The design of all points and all m-flats of F_q^n.
    pub fn from_affine_geometry(g: &GeometryParams) -> Result<Self, DesignError> {
        let f = FiniteField::with_order(g.q).map_err(crate::error::GeometryError::from)?;
        let points = geometry::enumerate_points(g.n, &f)?;
        if points.len() > MAX_DESIGN_POINTS {
            return Err(DesignError::TooLarge(points.len()));
        }
        let flats = geometry::enumerate_flats(g, &f)?;
        let blocks = flats
            .iter()
            .map(|fl| {
                let mut b: Vec<usize> = fl.points(&f).iter().map(|p| p.index(g.q)).collect();
                b.sort_unstable();
                b
            })
            .collect();
        let mut d = Design::from_block_list(points.len(), blocks)?;
        let expected = DesignParams::affine(g)?;
        for (field, declared, actual) in [
            ("num_blocks", expected.num_blocks, d.params.num_blocks),
            ("r", expected.r, d.params.r),
            ("k", expected.k, d.params.k),
            ("lambda", expected.lambda, d.params.lambda),
        ] {
            if declared != actual {
                return Err(DesignError::HeaderMismatch {
                    field,
                    declared,
                    actual,
                });
            }
        }
        d.point_labels = Some(points);
        d.geometry = Some(*g);
        Ok(d)
    }

    /// The Fano plane, a (3, 3, 1)-design on 7 points.
    pub fn fano() -> Self {
        let blocks = (0..7).map(|i| vec![i, (i + 1) % 7, (i + 3) % 7]).collect();
        Design::from_block_list(7, blocks).expect("Fano plane is a valid design")
    }

    pub fn params(&self) -> &DesignParams {
        &self.params
    }

    /// Blocks as sorted point-index lists.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    /// Sorted indices of the blocks through point `x`.
    pub fn blocks_through(&self, x: usize) -> &[usize] {
        &self.point_blocks[x]
    }

    /// For every point, the sorted blocks through it.
    pub fn point_block_lists(&self) -> &[Vec<usize>] {
        &self.point_blocks
    }

    pub fn point_labels(&self) -> Option<&[Point]> {
        self.point_labels.as_deref()
    }

    pub fn geometry(&self) -> Option<&GeometryParams> {
        self.geometry.as_ref()
    }

    pub fn contains(&self, block: usize, point: usize) -> bool {
        self.bitsets[block][point / 64] >> (point % 64) & 1 == 1
    }

    fn point_bitset(&self, points: &[usize]) -> Vec<u64> {
        let mut bits = vec![0u64; self.params.num_points.div_ceil(64)];
        for &x in points {
            bits[x / 64] |= 1 << (x % 64);
        }
        bits
    }

    /// |b ∩ P| for a single block.
    fn meet(&self, block: usize, pbits: &[u64]) -> usize {
        self.bitsets[block]
            .iter()
            .zip(pbits)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// |b ∩ P| for every block b.
    pub fn block_intersections(&self, points: &[usize]) -> Vec<usize> {
        let pbits = self.point_bitset(points);
        (0..self.params.num_blocks)
            .map(|b| self.meet(b, &pbits))
            .collect()
    }

    /// Number of blocks of L through each point.
    pub fn point_degrees(&self, blocks: &[usize]) -> Vec<usize> {
        let mut deg = vec![0usize; self.params.num_points];
        for &b in blocks {
            for &x in &self.blocks[b] {
                deg[x] += 1;
            }
        }
        deg
    }

    /// I(P, L): pairs (x, b) in P x L with x in b.
    pub fn incidence_count(&self, s: &SubsetPair) -> usize {
        let pbits = self.point_bitset(&s.points);
        s.blocks.iter().map(|&b| self.meet(b, &pbits)).sum()
    }

    /// Blocks containing at least `t` points of P.
    pub fn rich_blocks(&self, points: &[usize], t: usize) -> Vec<usize> {
        self.block_intersections(points)
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c >= t)
            .map(|(b, _)| b)
            .collect()
    }

    /// Points lying in at least `t` blocks of L.
    pub fn rich_points(&self, blocks: &[usize], t: usize) -> Vec<usize> {
        self.point_degrees(blocks)
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c >= t)
            .map(|(x, _)| x)
            .collect()
    }

    /// Text form: a `bibd` header line followed by one block per line.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        if let Some(g) = &self.geometry {
            let _ = writeln!(out, "# points and {}-flats of F_{}^{}", g.m, g.q, g.n);
        }
        let _ = writeln!(
            out,
            "bibd {} {} {} {} {}",
            p.num_points, p.num_blocks, p.r, p.k, p.lambda
        );
        for b in &self.blocks {
            let line: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Parses and re-validates the text form; the header must match the blocks.
    pub fn from_text(text: &str) -> Result<Self, DesignError> {
        let mut header: Option<[usize; 5]> = None;
        let mut blocks = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| DesignError::Parse {
                line: line_no,
                message,
            };
            if header.is_none() {
                let mut parts = line.split_whitespace();
                if parts.next() != Some("bibd") {
                    return Err(parse_err("expected `bibd` header".into()));
                }
                let nums: Vec<usize> = parts
                    .map(|s| s.parse().map_err(|e| parse_err(format!("{s:?}: {e}"))))
                    .collect::<Result<_, _>>()?;
                let nums: [usize; 5] = nums
                    .try_into()
                    .map_err(|_| parse_err("header needs five integers".into()))?;
                header = Some(nums);
                continue;
            }
            let block: Vec<usize> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|e| parse_err(format!("{s:?}: {e}"))))
                .collect::<Result<_, _>>()?;
            blocks.push(block);
        }
        let [num_points, num_blocks, r, k, lambda] = header.ok_or(DesignError::Parse {
            line: 0,
            message: "missing `bibd` header".into(),
        })?;
        if blocks.len() != num_blocks {
            return Err(DesignError::HeaderMismatch {
                field: "num_blocks",
                declared: num_blocks,
                actual: blocks.len(),
            });
        }
        let d = Design::from_block_list(num_points, blocks)?;
        for (field, declared, actual) in [
            ("r", r, d.params.r),
            ("k", k, d.params.k),
            ("lambda", lambda, d.params.lambda),
        ] {
            if declared != actual {
                return Err(DesignError::HeaderMismatch {
                    field,
                    declared,
                    actual,
                });
            }
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ag(q: u32, n: u32, m: u32) -> Design {
        Design::from_affine_geometry(&GeometryParams::new(q, n, m).unwrap()).unwrap()
    }

    fn params(x: usize, b: usize, r: usize, k: usize, l: usize) -> DesignParams {
        DesignParams {
            num_points: x,
            num_blocks: b,
            r,
            k,
            lambda: l,
        }
    }

    /// Counts pair coverage directly from the block list.
    fn brute_lambda(d: &Design, a: usize, b: usize) -> usize {
        d.blocks()
            .iter()
            .filter(|blk| blk.contains(&a) && blk.contains(&b))
            .count()
    }

    #[test]
    fn affine_examples() {
        let d = ag(2, 3, 2);
        assert_eq!(*d.params(), params(8, 14, 7, 4, 3));
        for a in 0..8 {
            for b in a + 1..8 {
                assert_eq!(brute_lambda(&d, a, b), 3);
            }
        }
        assert_eq!(*ag(3, 2, 1).params(), params(9, 12, 4, 3, 1));
        assert_eq!(*ag(2, 2, 1).params(), params(4, 6, 3, 2, 1));
        let d = ag(3, 2, 0);
        assert_eq!(*d.params(), params(9, 9, 1, 1, 0));
        assert_eq!(d.point_labels().unwrap().len(), 9);
    }

    #[test]
    fn fano_and_pairs() {
        assert_eq!(*Design::fano().params(), params(7, 7, 3, 3, 1));
        let mut pairs = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                pairs.push(vec![a, b]);
            }
        }
        let d = Design::from_block_list(4, pairs).unwrap();
        assert_eq!(*d.params(), params(4, 6, 3, 2, 1));
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Design::from_block_list(3, vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap_err(),
            DesignError::DegenerateBlock(0)
        );
        assert!(matches!(
            Design::from_block_list(4, vec![vec![0, 1], vec![2]]),
            Err(DesignError::NotBlockUniform { .. })
        ));
        assert!(matches!(
            Design::from_block_list(4, vec![vec![0, 1], vec![0, 2], vec![0, 3]]),
            Err(DesignError::NotPointRegular { .. })
        ));
        // 4-cycle: regular and uniform but pairs {0,2} never covered
        assert!(matches!(
            Design::from_block_list(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]),
            Err(DesignError::NotPairBalanced { .. })
        ));
        assert!(matches!(
            Design::from_block_list(3, vec![vec![0, 5]]),
            Err(DesignError::PointOutOfRange { .. })
        ));
        assert!(matches!(
            Design::from_block_list(3, vec![vec![0, 0]]),
            Err(DesignError::RepeatedPoint { .. })
        ));
        assert_eq!(
            Design::from_block_list(3, vec![]).unwrap_err(),
            DesignError::Empty
        );
    }

    #[test]
    fn incidence_examples() {
        let d = Design::fano();
        let full = SubsetPair::full(&d);
        assert_eq!(d.incidence_count(&full), 21);
        let empty = SubsetPair::new(&d, vec![], vec![0, 1]).unwrap();
        assert_eq!(d.incidence_count(&empty), 0);
        let one = SubsetPair::new(&d, d.block(2).to_vec(), vec![2]).unwrap();
        assert_eq!(d.incidence_count(&one), 3);
        assert!(SubsetPair::new(&d, vec![7], vec![]).is_err());
    }

    #[test]
    fn rich_examples() {
        let d = Design::fano();
        let all: Vec<usize> = (0..7).collect();
        assert_eq!(d.rich_blocks(&all, 3).len(), 7);
        assert!(d.rich_blocks(&all, 4).is_empty());
        assert_eq!(d.rich_blocks(d.block(4), 2), vec![4]);
        assert_eq!(d.rich_points(&all, 3).len(), 7);
        assert!(d.rich_points(&[], 1).is_empty());

        let d = ag(3, 2, 1);
        let pencil = d.blocks_through(4).to_vec();
        assert_eq!(pencil.len(), 4);
        assert_eq!(d.rich_points(&pencil, 2), vec![4]);
    }

    #[test]
    fn text_roundtrip_and_rejection() {
        let d = ag(3, 2, 1);
        let text = d.to_text();
        assert!(text.contains("bibd 9 12 4 3 1"));
        let back = Design::from_text(&text).unwrap();
        assert_eq!(back.params(), d.params());
        assert_eq!(back.blocks(), d.blocks());

        let bad = text.replace("bibd 9 12 4 3 1", "bibd 9 12 4 3 2");
        assert!(matches!(
            Design::from_text(&bad),
            Err(DesignError::HeaderMismatch {
                field: "lambda",
                ..
            })
        ));
        assert!(matches!(
            Design::from_text("bibd 4 2 1 2 0\n0 1\n"),
            Err(DesignError::HeaderMismatch {
                field: "num_blocks",
                ..
            })
        ));
        assert!(matches!(
            Design::from_text("bibd 4 1 1 2 x\n0 1\n"),
            Err(DesignError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Design::from_text("# nothing\n"),
            Err(DesignError::Parse { .. })
        ));
    }
}
