use conehull_core::geometry::{
    affine_intersects_hull, convex_hull, f_vector, hull_volume, point_in_conv_lp, t_functional,
    FeasibilityLp, LpOutcome,
};
use conehull_core::Point;
use proptest::prelude::*;

fn cloud(d: usize, n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), n)
        .prop_map(|v| v.into_iter().map(Point::new).collect())
}

fn dim_and_cloud() -> impl Strategy<Value = (usize, Vec<Point>)> {
    (2usize..=4).prop_flat_map(|d| (Just(d), cloud(d, d + 2..61)))
}

/// Affine hull of `anchor, span...` meets `conv(points)`: feasibility of
/// `sum l_j p_j = anchor + sum m_i (s_i - anchor)`, `sum l_j = 1`, `l >= 0`.
fn brute_affine_meets(anchor: &Point, span: &[Point], points: &[Point]) -> bool {
    let d = anchor.dim();
    let m = points.len();
    let k = span.len();
    let mut rows = Vec::with_capacity(d + 1);
    let mut rhs = Vec::with_capacity(d + 1);
    for i in 0..d {
        let mut row: Vec<f64> = points.iter().map(|p| p[i]).collect();
        for s in span {
            row.push(-(s[i] - anchor[i]));
        }
        for s in span {
            row.push(s[i] - anchor[i]);
        }
        rows.push(row);
        rhs.push(anchor[i]);
    }
    let mut sum = vec![1.0; m];
    sum.extend(vec![0.0; 2 * k]);
    rows.push(sum);
    rhs.push(1.0);
    !matches!(FeasibilityLp::new(rows, rhs).solve(), LpOutcome::Infeasible)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn vertices_are_exactly_the_lp_extreme_points((d, pts) in dim_and_cloud()) {
        let h = convex_hull(&pts, d).unwrap();
        let mut extreme = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            let rest: Vec<Point> = pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q.clone()).collect();
            if !point_in_conv_lp(p, &rest) {
                extreme.push(i);
            }
        }
        prop_assert_eq!(h.input_indices().to_vec(), extreme);
    }

    #[test]
    fn euler_and_dehn_sommerville_hold((d, pts) in dim_and_cloud()) {
        let f = f_vector(&convex_hull(&pts, d).unwrap()).unwrap();
        prop_assert_eq!(f.euler_defect(), 0);
        prop_assert_eq!(f.dehn_sommerville_defect(), 0);
    }

    #[test]
    fn t00_counts_facets((d, pts) in dim_and_cloud()) {
        let h = convex_hull(&pts, d).unwrap();
        let f = f_vector(&h).unwrap();
        prop_assert_eq!(t_functional(&h, 0.0, 0.0).unwrap(), f.counts[d - 1] as f64);
    }

    #[test]
    fn f_vector_is_invariant_under_linear_maps(
        (d, pts) in dim_and_cloud(),
        entries in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        // Diagonally dominant, hence invertible.
        let a: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| entries[i * 4 + j] * 0.3 + if i == j { 1.5 } else { 0.0 }).collect())
            .collect();
        let mapped: Vec<Point> = pts
            .iter()
            .map(|p| Point::new(a.iter().map(|row| row.iter().zip(p.coords()).map(|(x, y)| x * y).sum()).collect()))
            .collect();
        let h = convex_hull(&pts, d).unwrap();
        let g = convex_hull(&mapped, d).unwrap();
        prop_assert_eq!(f_vector(&h).unwrap(), f_vector(&g).unwrap());
        prop_assert_eq!(h.input_indices(), g.input_indices());
    }

    #[test]
    fn origin_inside_gives_t11_as_d_volume((d, pts) in dim_and_cloud()) {
        let h = convex_hull(&pts, d).unwrap();
        prop_assume!(h.contains_origin());
        let t11 = t_functional(&h, 1.0, 1.0).unwrap();
        let vol = hull_volume(&h).unwrap();
        prop_assert!((t11 - d as f64 * vol).abs() <= 1e-9 * t11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn affine_intersection_matches_lp(
        (_d, k, pts, flat) in (2usize..=4).prop_flat_map(|d| {
            (Just(d), 1..=d, cloud(d, d + 1..20), prop::collection::vec(prop::collection::vec(-2.5f64..2.5, d), d))
        })
    ) {
        let flat: Vec<Point> = flat.into_iter().take(k).map(Point::new).collect();
        let fast = affine_intersects_hull(&flat[0], &flat[1..], &pts).unwrap();
        prop_assert_eq!(fast, brute_affine_meets(&flat[0], &flat[1..], &pts));
    }
}

#[test]
fn volume_of_unit_cube_and_cross_polytope() {
    let mut cube = Vec::new();
    for m in 0..8u32 {
        cube.push(Point::new((0..3).map(|i| f64::from((m >> i) & 1)).collect()));
    }
    assert!((hull_volume(&convex_hull(&cube, 3).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    let mut cross = Vec::new();
    for i in 0..4 {
        for s in [-1.0, 1.0] {
            let mut x = vec![0.0; 4];
            x[i] = s;
            cross.push(Point::new(x));
        }
    }
    // 2^d / d!
    let h = convex_hull(&cross, 4).unwrap();
    assert!((hull_volume(&h).unwrap() - 16.0 / 24.0).abs() < 1e-12);
    assert_eq!(f_vector(&h).unwrap().counts, vec![8, 24, 32, 16]);
}
