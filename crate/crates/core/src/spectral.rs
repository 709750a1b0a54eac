//! Spectrum of the point-block incidence graph and the expander mixing lemma.
//!
//! For an (r, k, lambda)-design the bipartite adjacency matrix has eigenvalues
//! ±sqrt(rk) once each, ±sqrt(r - lambda) with multiplicity |X| - 1 each, and
//! 0 with multiplicity |B| - |X|. The numeric path builds the dense matrix and
//! runs a symmetric eigensolver so the two can be compared.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::design::{Design, DesignParams};
use crate::error::SpectralError;
use crate::rational::{self, Rational};

/// Largest adjacency matrix order handed to the dense eigensolver.
pub const MAX_DENSE_ORDER: usize = 4000;

/// A (Δ_L, Δ_R)-biregular bipartite graph given by the left neighbourhoods of
/// its right vertices.
#[derive(Clone, Copy, Debug)]
pub struct BipartiteGraphView<'a> {
    num_left: usize,
    num_right: usize,
    left_degree: usize,
    right_degree: usize,
    right_adj: &'a [Vec<usize>],
}

impl<'a> BipartiteGraphView<'a> {
    /// Checks biregularity of the graph whose right vertex `j` is adjacent to `right_adj[j]`.
    pub fn new(num_left: usize, right_adj: &'a [Vec<usize>]) -> Result<Self, SpectralError> {
        let right_degree = right_adj.first().map_or(0, |a| a.len());
        let mut left_deg = vec![0usize; num_left];
        for (j, adj) in right_adj.iter().enumerate() {
            if adj.len() != right_degree {
                return Err(SpectralError::NotBiregular(format!(
                    "right vertex {j} has degree {}, expected {right_degree}",
                    adj.len()
                )));
            }
            for &i in adj {
                if i >= num_left {
                    return Err(SpectralError::OutOfRange {
                        index: i,
                        limit: num_left,
                    });
                }
                left_deg[i] += 1;
            }
        }
        let left_degree = left_deg.first().copied().unwrap_or(0);
        if let Some(i) = left_deg.iter().position(|&d| d != left_degree) {
            return Err(SpectralError::NotBiregular(format!(
                "left vertex {i} has degree {}, expected {left_degree}",
                left_deg[i]
            )));
        }
        Ok(BipartiteGraphView {
            num_left,
            num_right: right_adj.len(),
            left_degree,
            right_degree,
            right_adj,
        })
    }

    /// Points on the left, blocks on the right.
    pub fn from_design(d: &'a Design) -> Self {
        let p = d.params();
        BipartiteGraphView {
            num_left: p.num_points,
            num_right: p.num_blocks,
            left_degree: p.r,
            right_degree: p.k,
            right_adj: d.blocks(),
        }
    }

    /// Blocks on the left, points on the right.
    pub fn dual_of_design(d: &'a Design) -> Self {
        let p = d.params();
        BipartiteGraphView {
            num_left: p.num_blocks,
            num_right: p.num_points,
            left_degree: p.k,
            right_degree: p.r,
            right_adj: d.point_block_lists(),
        }
    }

    pub fn num_left(&self) -> usize {
        self.num_left
    }

    pub fn num_right(&self) -> usize {
        self.num_right
    }

    pub fn left_degree(&self) -> usize {
        self.left_degree
    }

    pub fn right_degree(&self) -> usize {
        self.right_degree
    }

    /// e(G) = Δ_L |L| = Δ_R |R|.
    pub fn edge_count(&self) -> usize {
        self.right_degree * self.num_right
    }

    /// e(S, T) for S on the left and T on the right.
    pub fn edges_between(&self, left: &[usize], right: &[usize]) -> usize {
        let mut in_s = vec![false; self.num_left];
        for &i in left {
            in_s[i] = true;
        }
        right
            .iter()
            .map(|&j| self.right_adj[j].iter().filter(|&&i| in_s[i]).count())
            .sum()
    }

    /// Number of left neighbours in S of every right vertex.
    pub fn right_degrees_into(&self, left: &[usize]) -> Vec<usize> {
        let mut in_s = vec![false; self.num_left];
        for &i in left {
            in_s[i] = true;
        }
        self.right_adj
            .iter()
            .map(|adj| adj.iter().filter(|&&i| in_s[i]).count())
            .collect()
    }
}

/// One distinct eigenvalue ±sqrt(squared) with its multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub value: f64,
    /// Exact square of the eigenvalue.
    pub squared: u64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// Distinct eigenvalues in decreasing order.
    pub theoretical: Vec<Eigenvalue>,
    /// All numeric eigenvalues in decreasing order, when computed.
    pub numeric: Option<Vec<f64>>,
    /// Normalized second eigenvalue sqrt((r - lambda)/(rk)).
    pub mu: f64,
    /// mu^2 as an exact fraction.
    pub mu_squared: String,
    /// mu_2 / mu_1 read off the numeric spectrum.
    pub numeric_mu: Option<f64>,
    /// Largest gap between sorted numeric and theoretical eigenvalues.
    pub max_abs_deviation: Option<f64>,
}

impl SpectrumReport {
    /// Theoretical eigenvalues with multiplicity, decreasing.
    pub fn theoretical_expanded(&self) -> Vec<f64> {
        self.theoretical
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
            .collect()
    }
}

/// mu^2 = (r - lambda)/(rk) exactly.
pub fn mu_squared(p: &DesignParams) -> Rational {
    rational::frac((p.r - p.lambda) as i64, (p.r * p.k) as i64)
}

/// Closed-form spectrum of the incidence graph of a design with parameters `p`.
pub fn theoretical_spectrum(p: &DesignParams) -> Result<SpectrumReport, SpectralError> {
    if p.num_blocks < p.num_points {
        return Err(SpectralError::FisherViolation {
            points: p.num_points,
            blocks: p.num_blocks,
        });
    }
    let top = (p.r * p.k) as u64;
    let second = (p.r - p.lambda) as u64;
    let entry = |sign: f64, squared: u64, multiplicity: usize| Eigenvalue {
        value: sign * (squared as f64).sqrt(),
        squared,
        multiplicity,
    };
    let theoretical = [
        entry(1.0, top, 1),
        entry(1.0, second, p.num_points - 1),
        entry(0.0, 0, p.num_blocks - p.num_points),
        entry(-1.0, second, p.num_points - 1),
        entry(-1.0, top, 1),
    ]
    .into_iter()
    .filter(|e| e.multiplicity > 0)
    .collect();
    let mu2 = mu_squared(p);
    Ok(SpectrumReport {
        theoretical,
        numeric: None,
        mu: rational::to_f64(&mu2).sqrt(),
        mu_squared: rational::display(&mu2),
        numeric_mu: None,
        max_abs_deviation: None,
    })
}

/// The (|X| + |B|)-order adjacency matrix [[0, N], [N^T, 0]].
pub fn adjacency_matrix(d: &Design) -> DMatrix<f64> {
    let p = d.params();
    let order = p.num_points + p.num_blocks;
    let mut a = DMatrix::zeros(order, order);
    for (b, block) in d.blocks().iter().enumerate() {
        let col = p.num_points + b;
        for &x in block {
            a[(x, col)] = 1.0;
            a[(col, x)] = 1.0;
        }
    }
    a
}

/// Both spectra and their largest sorted-pairing deviation.
pub fn numeric_spectrum(d: &Design) -> Result<SpectrumReport, SpectralError> {
    let p = d.params();
    let order = p.num_points + p.num_blocks;
    if order > MAX_DENSE_ORDER {
        return Err(SpectralError::TooLarge(order));
    }
    let mut report = theoretical_spectrum(p)?;
    let mut numeric: Vec<f64> = adjacency_matrix(d)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    numeric.sort_by(|a, b| b.total_cmp(a));
    let expected = report.theoretical_expanded();
    let deviation = max_sorted_deviation(&numeric, &expected);
    report.numeric_mu = Some(numeric[1] / numeric[0]);
    report.numeric = Some(numeric);
    report.max_abs_deviation = Some(deviation);
    Ok(report)
}

/// Bottleneck distance between two equal-length multisets, both sorted the same way.
pub fn max_sorted_deviation(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// N N^T as exact integers: entry (i, j) counts blocks through both i and j.
pub fn gram_matrix(d: &Design) -> Vec<Vec<u64>> {
    let n = d.params().num_points;
    let mut g = vec![vec![0u64; n]; n];
    for block in d.blocks() {
        for &i in block {
            for &j in block {
                g[i][j] += 1;
            }
        }
    }
    g
}

/// Whether N N^T = (r - lambda) I + lambda J holds entrywise.
pub fn gram_identity_holds(d: &Design) -> bool {
    let p = d.params();
    gram_matrix(d).iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, &v)| {
            let expected = if i == j { p.r } else { p.lambda };
            v == expected as u64
        })
    })
}

/// Both sides of the mixing inequality |e(S,T)/e(G) - αβ| <= μ sqrt(αβ(1-α)(1-β)).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MixingCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl MixingCheck {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + Self::TOLERANCE
    }
}

pub fn mixing_check(
    g: &BipartiteGraphView<'_>,
    left: &[usize],
    right: &[usize],
    mu: f64,
) -> MixingCheck {
    let alpha = left.len() as f64 / g.num_left() as f64;
    let beta = right.len() as f64 / g.num_right() as f64;
    let e = g.edges_between(left, right) as f64;
    let lhs = (e / g.edge_count() as f64 - alpha * beta).abs();
    let rhs = mu
        * (alpha * beta * (1.0 - alpha) * (1.0 - beta))
            .max(0.0)
            .sqrt();
    MixingCheck { lhs, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometryParams;
    use crate::subsets::all_subsets;

    fn ag(q: u32, n: u32, m: u32) -> Design {
        Design::from_affine_geometry(&GeometryParams::new(q, n, m).unwrap()).unwrap()
    }

    #[test]
    fn fano_theoretical() {
        let s = theoretical_spectrum(Design::fano().params()).unwrap();
        let vals: Vec<(f64, usize)> = s
            .theoretical
            .iter()
            .map(|e| (e.value, e.multiplicity))
            .collect();
        let r2 = 2f64.sqrt();
        assert_eq!(vals, vec![(3.0, 1), (r2, 6), (-r2, 6), (-3.0, 1)]);
        assert!((s.mu - r2 / 3.0).abs() < 1e-15);
        assert_eq!(s.mu_squared, "2/9");
    }

    #[test]
    fn ag23_theoretical() {
        let s = theoretical_spectrum(ag(3, 2, 1).params()).unwrap();
        let sq: Vec<(u64, usize)> = s
            .theoretical
            .iter()
            .map(|e| (e.squared, e.multiplicity))
            .collect();
        assert_eq!(sq, vec![(12, 1), (3, 8), (0, 3), (3, 8), (12, 1)]);
        assert_eq!(s.mu, 0.5);
    }

    #[test]
    fn fisher_violation() {
        let p = DesignParams {
            num_points: 7,
            num_blocks: 6,
            r: 3,
            k: 3,
            lambda: 1,
        };
        assert!(matches!(
            theoretical_spectrum(&p),
            Err(SpectralError::FisherViolation { .. })
        ));
    }

    #[test]
    fn numeric_matches_theory() {
        for d in [Design::fano(), ag(2, 2, 1), ag(3, 2, 1), ag(2, 3, 1)] {
            let s = numeric_spectrum(&d).unwrap();
            assert!(s.max_abs_deviation.unwrap() < 1e-9);
            assert!((s.numeric_mu.unwrap() - s.mu).abs() < 1e-9);
            let num = s.numeric.as_ref().unwrap();
            // symmetric about zero
            for (a, b) in num.iter().zip(num.iter().rev()) {
                assert!((a + b).abs() < 1e-8);
            }
            let p = d.params();
            assert!((num[0] - ((p.r * p.k) as f64).sqrt()).abs() < 1e-8);
        }
        let s = numeric_spectrum(&ag(2, 2, 1)).unwrap();
        let sq: Vec<(u64, usize)> = s
            .theoretical
            .iter()
            .map(|e| (e.squared, e.multiplicity))
            .collect();
        assert_eq!(sq, vec![(6, 1), (2, 3), (0, 2), (2, 3), (6, 1)]);
    }

    #[test]
    fn gram_and_svd_consequence() {
        for d in [Design::fano(), ag(3, 2, 1), ag(2, 3, 2)] {
            assert!(gram_identity_holds(&d));
            let p = d.params();
            let mut n = DMatrix::<f64>::zeros(p.num_points, p.num_blocks);
            for (b, block) in d.blocks().iter().enumerate() {
                for &x in block {
                    n[(x, b)] = 1.0;
                }
            }
            let mut left: Vec<f64> = (&n * n.transpose())
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect();
            let mut right: Vec<f64> = (n.transpose() * &n)
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .filter(|v| v.abs() > 1e-8)
                .collect();
            left.sort_by(|a, b| a.total_cmp(b));
            right.sort_by(|a, b| a.total_cmp(b));
            assert_eq!(left.len(), right.len());
            assert!(max_sorted_deviation(&left, &right) < 1e-8);
        }
        let pairs = Design::from_block_list(
            4,
            vec![
                vec![0, 1],
                vec![2, 3],
                vec![0, 2],
                vec![1, 3],
                vec![0, 3],
                vec![1, 2],
            ],
        )
        .unwrap();
        assert!(gram_identity_holds(&pairs));
    }

    #[test]
    fn mixing_examples() {
        let d = Design::fano();
        let g = BipartiteGraphView::from_design(&d);
        let mu = theoretical_spectrum(d.params()).unwrap().mu;
        let all_l: Vec<usize> = (0..7).collect();
        let c = mixing_check(&g, &all_l, &all_l, mu);
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        let c = mixing_check(&g, &[], &[1, 2], mu);
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        let c = mixing_check(&g, d.block(0), &[0], mu);
        assert!((c.lhs - 4.0 / 49.0).abs() < 1e-15);
        let rhs = (2f64.sqrt() / 3.0) * ((3.0f64 / 49.0) * (4.0 / 7.0) * (6.0 / 7.0)).sqrt();
        assert!((c.rhs - rhs).abs() < 1e-15);
        assert!(c.holds());
    }

    #[test]
    fn mixing_exhaustive_ag22() {
        let d = ag(2, 2, 1);
        let g = BipartiteGraphView::from_design(&d);
        let mu = theoretical_spectrum(d.params()).unwrap().mu;
        for s in all_subsets(4) {
            for t in all_subsets(6) {
                assert!(mixing_check(&g, &s, &t, mu).holds());
            }
        }
    }

    #[test]
    fn biregularity_check() {
        let adj = vec![vec![0, 1], vec![0, 1]];
        let g = BipartiteGraphView::new(2, &adj).unwrap();
        assert_eq!(
            (g.left_degree(), g.right_degree(), g.edge_count()),
            (2, 2, 4)
        );
        let bad = vec![vec![0, 1], vec![0]];
        assert!(BipartiteGraphView::new(2, &bad).is_err());
        let bad = vec![vec![0], vec![0]];
        assert!(BipartiteGraphView::new(2, &bad).is_err());
        let d = Design::fano();
        let dual = BipartiteGraphView::dual_of_design(&d);
        assert_eq!(dual.edges_between(&[0, 1], &[0, 1, 2, 3, 4, 5, 6]), 6);
    }

    #[test]
    fn size_ceiling() {
        // 256 points and 5440 lines
        let d = ag(4, 4, 1);
        assert!(d.params().num_points + d.params().num_blocks > MAX_DENSE_ORDER);
        assert!(matches!(
            numeric_spectrum(&d),
            Err(SpectralError::TooLarge(_))
        ));
    }
}
