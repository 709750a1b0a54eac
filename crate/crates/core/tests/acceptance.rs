//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use blockdesign::bounds::{
    graph_rich_bound, rich_block_bound, verify_exhaustive, verify_sampled, BoundKind,
    RichnessQuery, SamplingSpec, SizeSpec,
};
use blockdesign::rational::{frac, int};
use blockdesign::spectral::{gram_matrix, mixing_check, numeric_spectrum, BipartiteGraphView};
use blockdesign::subsets::{all_subsets, random_sized_subset, seeded_rng};
use blockdesign::triangles::{
    distinct_areas_experiment, dot, nu_square_check, perp, triangle_area, PlanePointSet,
};
use blockdesign::{Design, FiniteField, GeometryParams, Point};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ag(q: u32, n: u32, m: u32) -> Design {
    Design::from_affine_geometry(&GeometryParams::new(q, n, m).unwrap()).unwrap()
}

fn fixtures() -> Vec<(&'static str, Design)> {
    vec![
        ("Fano", Design::fano()),
        ("AG(2,2)", ag(2, 2, 1)),
        ("AG(2,3)", ag(3, 2, 1)),
        ("AG(3,2) m=1", ag(2, 3, 1)),
        ("AG(3,2) m=2", ag(2, 3, 2)),
    ]
}

/// Gaussian binomial from the q-Pascal recurrence [n,m] = [n-1,m-1] + q^m [n-1,m].
fn q_binomial_oracle(n: u32, m: u32, q: u128) -> u128 {
    if m == 0 || m == n {
        return 1;
    }
    if m > n {
        return 0;
    }
    q_binomial_oracle(n - 1, m - 1, q) + q.pow(m) * q_binomial_oracle(n - 1, m, q)
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for q in [2u32, 3, 4, 5] {
        for n in 1..=4u32 {
            if (q as u64).pow(n) > 1024 {
                continue;
            }
            for m in 0..n {
                let d = Design::from_affine_geometry(&GeometryParams::new(q, n, m).unwrap())
                    .map_err(|e| format!("AG({n},{q}) m={m}: {e}"))?;
                let qq = q as u128;
                let r = q_binomial_oracle(n, m, qq);
                let expected = [
                    qq.pow(n),
                    qq.pow(n - m) * r,
                    r,
                    qq.pow(m),
                    if m == 0 {
                        0
                    } else {
                        q_binomial_oracle(n - 1, m - 1, qq)
                    },
                ];
                let p = d.params();
                let got = [p.num_points, p.num_blocks, p.r, p.k, p.lambda].map(|v| v as u128);
                if got != expected {
                    return Err(format!(
                        "AG({n},{q}) m={m}: got {got:?}, expected {expected:?}"
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} geometries match"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, d) in fixtures() {
        let s = numeric_spectrum(&d).map_err(|e| format!("{name}: {e}"))?;
        let dev = s.max_abs_deviation.unwrap();
        let p = d.params();
        let mu = (((p.r - p.lambda) as f64) / ((p.r * p.k) as f64)).sqrt();
        let mu_err = (s.numeric_mu.unwrap() - mu).abs();
        if dev >= 1e-8 || mu_err >= 1e-10 {
            return Err(format!("{name}: deviation {dev:e}, mu error {mu_err:e}"));
        }
        worst = worst.max(dev);
    }
    Ok(format!("max eigenvalue deviation {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    for (name, d) in fixtures() {
        let p = d.params();
        let g = gram_matrix(&d);
        for (i, row) in g.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let expected = p.lambda as u64 + if i == j { (p.r - p.lambda) as u64 } else { 0 };
                if v != expected {
                    return Err(format!(
                        "{name}: entry ({i},{j}) = {v}, expected {expected}"
                    ));
                }
            }
        }
    }
    Ok("NN^T = (r-lambda)I + lambda J on all fixtures".into())
}

fn criterion_4() -> Outcome {
    let mut checked = 0usize;
    for (name, d) in fixtures() {
        let g = BipartiteGraphView::from_design(&d);
        let p = d.params();
        let mu = (((p.r - p.lambda) as f64) / ((p.r * p.k) as f64)).sqrt();
        let mut check = |s: &[usize], t: &[usize]| -> Result<(), String> {
            let c = mixing_check(&g, s, t, mu);
            checked += 1;
            if c.holds() {
                Ok(())
            } else {
                Err(format!(
                    "{name}: S={s:?} T={t:?} lhs={} rhs={}",
                    c.lhs, c.rhs
                ))
            }
        };
        if name == "AG(2,2)" {
            for s in all_subsets(p.num_points) {
                for t in all_subsets(p.num_blocks) {
                    check(&s, &t)?;
                }
            }
        } else {
            let mut rng = seeded_rng(4);
            for _ in 0..10_000 {
                let s = random_sized_subset(&mut rng, p.num_points);
                let t = random_sized_subset(&mut rng, p.num_blocks);
                check(&s, &t)?;
            }
        }
    }
    Ok(format!("{checked} pairs, zero violations"))
}

fn criterion_5() -> Outcome {
    let mut checked = 0usize;
    for (name, d) in fixtures() {
        let summary = if name == "AG(2,2)" {
            verify_exhaustive(&d, &BoundKind::Incidence, None, None)
        } else {
            let spec = SamplingSpec {
                count: 10_000,
                seed: 5,
                point_size: SizeSpec::Uniform,
                block_size: SizeSpec::Uniform,
            };
            verify_sampled(&d, &BoundKind::Incidence, &spec)
        }
        .map_err(|e| format!("{name}: {e}"))?;
        if summary.has_violation() {
            return Err(format!("{name}: {} violations", summary.violated));
        }
        checked += summary.evaluated;
    }
    Ok(format!("{checked} pairs, zero violations"))
}

fn criterion_6() -> Outcome {
    let d = ag(3, 2, 1);
    let q = RichnessQuery::new(int(1), 2).unwrap();
    let blocks = verify_exhaustive(&d, &BoundKind::RichBlocks(q.clone()), Some(6), None)
        .map_err(|e| e.to_string())?;
    let points = verify_exhaustive(&d, &BoundKind::RichPoints(q), None, Some(6))
        .map_err(|e| e.to_string())?;
    if blocks.evaluated != 84 || points.evaluated != 924 {
        return Err(format!(
            "evaluated {} and {}",
            blocks.evaluated, points.evaluated
        ));
    }
    if blocks.satisfied != 84 || points.satisfied != 924 {
        return Err(format!(
            "satisfied {} of 84 and {} of 924",
            blocks.satisfied, points.satisfied
        ));
    }
    Ok("84 point sets and 924 line sets meet the exact bounds".into())
}

fn criterion_7() -> Outcome {
    let pool: Vec<Design> = {
        let mut v = vec![Design::fano()];
        for (q, n) in [
            (2, 2),
            (2, 3),
            (2, 4),
            (3, 2),
            (3, 3),
            (4, 2),
            (4, 3),
            (5, 2),
            (7, 2),
        ] {
            for m in 1..n {
                v.push(ag(q, n, m));
            }
        }
        v
    };
    let mut rng = seeded_rng(7);
    for i in 0..100 {
        let d = &pool[rng.gen_range(0..pool.len())];
        let eps = frac(rng.gen_range(1..200), rng.gen_range(1..50));
        let t = rng.gen_range(2..12);
        let q = RichnessQuery::new(eps, t).unwrap();
        let g = BipartiteGraphView::from_design(d);
        let p = d.params();
        let mu2 = frac((p.r - p.lambda) as i64, (p.r * p.k) as i64);
        let from_graph = graph_rich_bound(&g, &mu2, &q);
        let from_design = rich_block_bound(p, &q);
        if from_graph.constant != from_design.constant
            || from_graph.guaranteed != from_design.guaranteed
        {
            return Err(format!(
                "triple {i}: {} vs {}",
                from_graph.constant, from_design.constant
            ));
        }
    }
    Ok("100 triples agree exactly".into())
}

fn criterion_8() -> Outcome {
    // (a) exact area cases
    let f5 = FiniteField::with_order(5).unwrap();
    let p = |x, y| Point::from_indices(&f5, &[x, y]).unwrap();
    if triangle_area(&p(0, 0), &p(1, 0), &p(0, 1), &f5).index() != 1
        || triangle_area(&p(0, 0), &p(2, 1), &p(1, 2), &f5).index() != 3
        || triangle_area(&p(1, 2), &p(2, 3), &p(3, 4), &f5).index() != 0
    {
        return Err("(a) area examples".into());
    }
    // (b) a⊥·b against the determinant after translation
    for q in [3u32, 5, 7] {
        let f = FiniteField::with_order(q).unwrap();
        let plane = PlanePointSet::full_plane(&f);
        let o = Point::origin(2);
        for a in plane.points() {
            for b in plane.points() {
                if dot(&perp(a, &f), b, &f) != triangle_area(&o, a, b, &f) {
                    return Err(format!("(b) q={q} a={a} b={b}"));
                }
            }
        }
    }
    // (c) squared dot-product multiplicities
    for q in [3u32, 5, 7, 11] {
        let f = FiniteField::with_order(q).unwrap();
        let total = (q * q) as usize;
        let mut rng = seeded_rng(8 + q as u64);
        for _ in 0..1000 {
            let fi: Vec<usize> = random_sized_subset(&mut rng, total - 1)
                .into_iter()
                .map(|i| i + 1)
                .collect();
            let gi = random_sized_subset(&mut rng, total);
            let fs = PlanePointSet::from_indices(&f, &fi).unwrap();
            let gs = PlanePointSet::from_indices(&f, &gi).unwrap();
            let c = nu_square_check(&fs, &gs).map_err(|e| e.to_string())?;
            if !c.holds {
                return Err(format!("(c) q={q}: {} > {}", c.lhs, c.rhs_exact));
            }
        }
    }
    // (d) distinct areas at a common vertex
    let mut runs = 0;
    let mut tightest = f64::INFINITY;
    for q in [7u32, 11, 13] {
        let f = FiniteField::with_order(q).unwrap();
        let mut rng = seeded_rng(80 + q as u64);
        for _ in 0..50 {
            let set = PlanePointSet::random(&f, 2 * q as usize, &mut rng).unwrap();
            let r = distinct_areas_experiment(&set, &int(1)).map_err(|e| e.to_string())?;
            if !r.satisfied {
                return Err(format!(
                    "(d) q={q}: {} areas < guarantee {}",
                    r.num_distinct_areas, r.guarantee
                ));
            }
            tightest = tightest.min(r.num_distinct_areas as f64 - r.guarantee);
            runs += 1;
        }
    }
    Ok(format!(
        "area checks pass; {runs} experiments, smallest margin {tightest:.3}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("design parameters", criterion_1),
        ("bipartite spectrum", criterion_2),
        ("Gram identity", criterion_3),
        ("expander mixing", criterion_4),
        ("incidence bound", criterion_5),
        ("rich blocks and rich points", criterion_6),
        ("graph/design constant identity", criterion_7),
        ("triangle pipeline", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
