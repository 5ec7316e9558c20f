use super::*;
use crate::rng;
use approx::assert_relative_eq;
use rand::Rng;

fn unit_box(d: usize) -> Polytope {
    Polytope::from_box(&DVector::from_element(d, -1.0), &DVector::from_element(d, 1.0)).unwrap()
}

/// Random bounded polytope: random halfspaces plus a boundedness box.
fn random_polytope(d: usize, extra_rows: usize, seed: u64) -> Polytope {
    let mut r = rng::substream(seed, 0);
    let mut a = DMatrix::zeros(extra_rows, d);
    let mut b = DVector::zeros(extra_rows);
    for k in 0..extra_rows {
        let dir = rng::unit_direction(&mut r, d);
        a.row_mut(k).copy_from(&dir.transpose());
        b[k] = r.random_range(0.3..1.5);
    }
    let box_p = unit_box(d).scale_about_center(&DVector::zeros(d), 2.0).unwrap();
    Polytope::new(a, b).unwrap().intersect(&box_p).unwrap()
}

#[test]
fn contains_unit_box() {
    let p = unit_box(2);
    assert!(p.contains(&DVector::zeros(2)).unwrap());
    assert!(!p.contains(&DVector::from_vec(vec![2.0, 0.0])).unwrap());
}

#[test]
fn contains_disturbance_boundary_point() {
    // |d_1| <= 0.1, |d_2| <= 0.05
    let p = Polytope::symmetric_box(&DVector::from_vec(vec![0.1, 0.05])).unwrap();
    assert!(p.contains(&DVector::from_vec(vec![0.1, -0.05])).unwrap());
}

#[test]
fn intersect_with_whole_space_is_identity() {
    let p = unit_box(3);
    let q = p.intersect(&Polytope::whole_space(3)).unwrap();
    assert!(p.set_eq(&q).unwrap());
}

#[test]
fn intersect_shifted_boxes() {
    let p = unit_box(2);
    let q = Polytope::from_box(
        &DVector::from_vec(vec![0.0, -1.0]),
        &DVector::from_vec(vec![2.0, 1.0]),
    )
    .unwrap();
    let i = p.intersect(&q).unwrap();
    let want = Polytope::from_box(
        &DVector::from_vec(vec![0.0, -1.0]),
        &DVector::from_vec(vec![1.0, 1.0]),
    )
    .unwrap();
    assert!(i.set_eq(&want).unwrap());
    assert_eq!(i.nrows(), p.nrows() + q.nrows());
}

#[test]
fn scale_identity_and_growth() {
    let p = random_polytope(2, 5, 21);
    let c = p.chebyshev_center().unwrap().0;
    let same = p.scale_about_center(&c, 1.0).unwrap();
    assert!(p.set_eq(&same).unwrap());

    let grown = unit_box(2)
        .scale_about_center(&DVector::zeros(2), 2.0)
        .unwrap();
    let want = Polytope::from_box(
        &DVector::from_element(2, -2.0),
        &DVector::from_element(2, 2.0),
    )
    .unwrap();
    assert!(grown.set_eq(&want).unwrap());
}

#[test]
fn scale_to_zero_collapses_to_center() {
    let p = random_polytope(3, 6, 22);
    let c = p.chebyshev_center().unwrap().0;
    let collapsed = p.scale_about_center(&c, 0.0).unwrap();
    assert!(collapsed.contains(&c).unwrap());
    // any direction support equals c's coordinate
    let dir = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let (_, v) = collapsed.support(&dir).unwrap().optimal().unwrap();
    assert_relative_eq!(v, c[0], epsilon = 1e-7);
}

#[test]
fn scale_rejects_outside_center() {
    let p = unit_box(2);
    assert!(p
        .scale_about_center(&DVector::from_vec(vec![3.0, 0.0]), 0.5)
        .is_err());
}

#[test]
fn scale_monotone_in_sigma() {
    let p = random_polytope(2, 6, 23);
    let c = p.chebyshev_center().unwrap().0;
    let small = p.scale_about_center(&c, 0.4).unwrap();
    let large = p.scale_about_center(&c, 0.9).unwrap();
    assert!(small.included_in(&large, 1e-9).unwrap());
    let mut r = rng::substream(23, 1);
    for _ in 0..50 {
        let x = DVector::from_fn(2, |_, _| r.random_range(-2.0..2.0));
        if small.contains(&x).unwrap() {
            assert!(large.contains(&x).unwrap());
        }
    }
}

#[test]
fn erode_by_zero_is_identity() {
    let p = random_polytope(2, 4, 31);
    let e = DMatrix::identity(2, 2);
    let eroded = p.erode_by_image(&e, &VertexSet::origin(2)).unwrap();
    assert!(p.set_eq(&eroded).unwrap());
}

#[test]
fn erode_boxes_is_pontryagin_difference() {
    let p = unit_box(2);
    let d = Polytope::symmetric_box(&DVector::from_element(2, 0.25)).unwrap();
    let dv = d.exact_vertices().unwrap();
    let eroded = p.erode_by_image(&DMatrix::identity(2, 2), &dv).unwrap();
    let want = Polytope::from_box(
        &DVector::from_element(2, -0.75),
        &DVector::from_element(2, 0.75),
    )
    .unwrap();
    assert!(eroded.set_eq(&want).unwrap());
}

#[test]
fn erode_matches_vertex_bruteforce_membership() {
    let p = random_polytope(2, 6, 32);
    let e = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.2, 1.0]);
    let d = Polytope::symmetric_box(&DVector::from_vec(vec![0.15, 0.1])).unwrap();
    let dv = d.exact_vertices().unwrap();
    let eroded = p.erode_by_image(&e, &dv).unwrap();
    let mut r = rng::substream(32, 9);
    for _ in 0..200 {
        let x = DVector::from_fn(2, |_, _| r.random_range(-2.0..2.0));
        let in_eroded = eroded.violation(&x);
        let worst_translate = dv
            .vertices
            .iter()
            .map(|v| p.violation(&(&x + &e * v)))
            .fold(f64::NEG_INFINITY, f64::max);
        // same sign up to tolerance band
        if in_eroded < -1e-7 {
            assert!(worst_translate <= 1e-9, "eroded member fails translate");
        }
        if in_eroded > 1e-7 {
            assert!(worst_translate >= -1e-9, "non-member passes translates");
        }
    }
}

#[test]
fn chebyshev_of_unit_box() {
    let (c, r) = unit_box(2).chebyshev_center().unwrap();
    assert!(c.amax() < 1e-9);
    assert_relative_eq!(r, 1.0, epsilon = 1e-9);
}

#[test]
fn chebyshev_of_simplex_analytic() {
    // x >= 0, y >= 0, x + y <= 1: center (1 - 1/sqrt2)(1,1), r = 1 - 1/sqrt2
    let a = DMatrix::from_row_slice(3, 2, &[-1.0, 0.0, 0.0, -1.0, 1.0, 1.0]);
    let b = DVector::from_vec(vec![0.0, 0.0, 1.0]);
    let p = Polytope::new(a, b).unwrap();
    let (c, r) = p.chebyshev_center().unwrap();
    let want = 1.0 - 1.0 / 2.0f64.sqrt();
    assert_relative_eq!(r, want, epsilon = 1e-9);
    assert_relative_eq!(c[0], want, epsilon = 1e-9);
    assert_relative_eq!(c[1], want, epsilon = 1e-9);
}

#[test]
fn chebyshev_detects_empty() {
    let a = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
    let b = DVector::from_vec(vec![-1.0, -1.0]);
    let p = Polytope::new(a, b).unwrap();
    assert!(matches!(p.chebyshev_center(), Err(Error::EmptySet(_))));
    assert!(p.is_empty().unwrap());
}

#[test]
fn remove_redundant_drops_duplicate_facet() {
    let p = unit_box(2);
    let dup = p.intersect(&unit_box(2)).unwrap();
    let r = dup.remove_redundant().unwrap();
    assert_eq!(r.nrows(), 4);
    assert!(r.set_eq(&p).unwrap());
}

#[test]
fn remove_redundant_drops_inflated_rows() {
    let p = unit_box(3);
    let mut inflated = p.clone();
    inflated.b *= 10.0;
    let both = p.intersect(&inflated).unwrap();
    let r = both.remove_redundant().unwrap();
    assert_eq!(r.nrows(), 6);
    assert!(r.set_eq(&p).unwrap());
}

#[test]
fn remove_redundant_preserves_membership_on_probes() {
    let p = random_polytope(3, 20, 41);
    let r = p.remove_redundant().unwrap();
    assert!(r.nrows() <= p.nrows());
    let mut g = rng::substream(41, 5);
    for _ in 0..1000 {
        let x = DVector::from_fn(3, |_, _| g.random_range(-2.5..2.5));
        let in_p = p.violation(&x);
        let in_r = r.violation(&x);
        if in_p < -1e-9 {
            assert!(in_r <= 1e-9);
        }
        if in_p > 1e-7 {
            assert!(in_r > -1e-7, "removed a needed constraint");
        }
    }
}

#[test]
fn projection_matches_witness_lp_oracle() {
    let p = random_polytope(3, 10, 51);
    let proj = p.project(&[0, 1]).unwrap();
    let mut g = rng::substream(51, 3);
    for _ in 0..100 {
        let z = DVector::from_fn(2, |_, _| g.random_range(-2.2..2.2));
        // exists-witness: slice {x3 | a3 x3 <= b - a12 z} nonempty?
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let mut feasible = true;
        for row in 0..p.nrows() {
            let a3 = p.a[(row, 2)];
            let rest = p.b[row] - p.a[(row, 0)] * z[0] - p.a[(row, 1)] * z[1];
            if a3.abs() <= 1e-12 {
                if rest < -1e-9 {
                    feasible = false;
                }
            } else if a3 > 0.0 {
                hi = hi.min(rest / a3);
            } else {
                lo = lo.max(rest / a3);
            }
        }
        let witness = feasible && lo <= hi + 1e-9;
        let member = proj.violation(&z) <= 1e-9;
        // skip the knife edge
        if proj.violation(&z).abs() <= 1e-7 {
            continue;
        }
        assert_eq!(member, witness, "probe {z:?}");
    }
}

#[test]
fn projection_of_lifted_samples_lands_inside() {
    let p = random_polytope(3, 8, 52);
    let proj = p.project(&[0, 1]).unwrap();
    let (c, r) = p.chebyshev_center().unwrap();
    assert!(r > 0.0);
    let mut g = rng::substream(52, 4);
    for _ in 0..100 {
        // random point of P by ray scaling from the center
        let dir = rng::unit_direction(&mut g, 3);
        let mut t_max = f64::INFINITY;
        for row in 0..p.nrows() {
            let denom = p.a.row(row).transpose().dot(&dir);
            if denom > 1e-12 {
                t_max = t_max.min((p.b[row] - p.a.row(row).transpose().dot(&c)) / denom);
            }
        }
        let x = &c + dir * (0.9 * t_max * g.random_range(0.0..1.0));
        assert!(p.contains(&x).unwrap());
        let z = DVector::from_vec(vec![x[0], x[1]]);
        assert!(proj.contains(&z).unwrap());
    }
}

#[test]
fn box_hull_of_unit_box() {
    let vs = unit_box(2).box_hull_vertices().unwrap();
    assert_eq!(vs.len(), 4);
}

#[test]
fn box_hull_of_diamond() {
    // |x| + |y| <= 1 -> corners (+-1, +-1)
    let a = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]);
    let b = DVector::from_element(4, 1.0);
    let p = Polytope::new(a, b).unwrap();
    let vs = p.box_hull_vertices().unwrap();
    assert_eq!(vs.len(), 4);
    for v in &vs.vertices {
        assert_relative_eq!(v[0].abs(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(v[1].abs(), 1.0, epsilon = 1e-9);
    }
}

#[test]
fn box_hull_matches_lp_bounds_oracle() {
    let p = random_polytope(3, 12, 61);
    let (lo, hi) = p.bounding_box().unwrap();
    let vs = p.box_hull_vertices().unwrap();
    assert_eq!(vs.len(), 8);
    for v in &vs.vertices {
        for i in 0..3 {
            assert!(v[i] >= lo[i] - 1e-9 && v[i] <= hi[i] + 1e-9);
        }
    }
    // bounds are attained by some polytope point (supports)
    for i in 0..3 {
        let mut dir = DVector::zeros(3);
        dir[i] = 1.0;
        let (x, _) = p.support(&dir).unwrap().optimal().unwrap();
        assert_relative_eq!(x[i], hi[i], epsilon = 1e-7);
    }
}

#[test]
fn box_hull_rejects_unbounded() {
    let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
    let b = DVector::from_vec(vec![1.0]);
    let p = Polytope::new(a, b).unwrap();
    assert!(matches!(
        p.box_hull_vertices(),
        Err(Error::Unbounded(_))
    ));
}

#[test]
fn random_2d_hexagon_facet_vertex_duality() {
    // 6 irredundant facets in 2D -> 6 vertices
    let mut rows = Vec::new();
    let mut offs = Vec::new();
    let mut g = rng::substream(71, 0);
    for k in 0..6 {
        let ang = core::f64::consts::TAU * (k as f64 + 0.3 * g.random_range(-1.0..1.0)) / 6.0;
        rows.extend_from_slice(&[ang.cos(), ang.sin()]);
        offs.push(g.random_range(0.8..1.2));
    }
    let p = Polytope::new(DMatrix::from_row_slice(6, 2, &rows), DVector::from_vec(offs)).unwrap();
    let reduced = p.remove_redundant().unwrap();
    let vs = p.exact_vertices().unwrap();
    assert_eq!(vs.len(), reduced.nrows());
}

// --- invariant sets ---

#[test]
fn rci_loose_constraints_returns_state_interval() {
    // x+ = 0.5 x + v, |x| <= 1, |v| <= 10, no disturbance
    let a_cl = vec![DMatrix::from_row_slice(1, 1, &[0.5])];
    let b_v = vec![DMatrix::from_row_slice(1, 1, &[1.0])];
    let e = DMatrix::from_row_slice(1, 1, &[1.0]);
    let c_n = Polytope::from_box(
        &DVector::from_vec(vec![-1.0, -10.0]),
        &DVector::from_vec(vec![1.0, 10.0]),
    )
    .unwrap();
    let res =
        max_robust_control_invariant(&a_cl, &b_v, &e, &VertexSet::origin(1), &c_n).unwrap();
    assert!(res.certified);
    let want = unit_box(1);
    assert!(res.set.set_eq(&want).unwrap());
}

#[test]
fn rci_scalar_with_disturbance() {
    // x+ = 0.5 x + v + d, |v| <= 0.2, |d| <= 0.1, |x| <= 1 -> invariant [-1, 1]
    let a_cl = vec![DMatrix::from_row_slice(1, 1, &[0.5])];
    let b_v = vec![DMatrix::from_row_slice(1, 1, &[1.0])];
    let e = DMatrix::from_row_slice(1, 1, &[1.0]);
    let d = Polytope::symmetric_box(&DVector::from_vec(vec![0.1]))
        .unwrap()
        .exact_vertices()
        .unwrap();
    let c_n = Polytope::from_box(
        &DVector::from_vec(vec![-1.0, -0.2]),
        &DVector::from_vec(vec![1.0, 0.2]),
    )
    .unwrap();
    let res = max_robust_control_invariant(&a_cl, &b_v, &e, &d, &c_n).unwrap();
    assert!(res.certified);
    assert!(res.set.set_eq(&unit_box(1)).unwrap());
}

#[test]
fn rci_oversized_disturbance_is_empty() {
    let a_cl = vec![DMatrix::from_row_slice(1, 1, &[0.5])];
    let b_v = vec![DMatrix::from_row_slice(1, 1, &[1.0])];
    let e = DMatrix::from_row_slice(1, 1, &[1.0]);
    let d = Polytope::symmetric_box(&DVector::from_vec(vec![2.0]))
        .unwrap()
        .exact_vertices()
        .unwrap();
    let c_n = Polytope::from_box(
        &DVector::from_vec(vec![-1.0, -0.2]),
        &DVector::from_vec(vec![1.0, 0.2]),
    )
    .unwrap();
    let res = max_robust_control_invariant(&a_cl, &b_v, &e, &d, &c_n);
    assert!(matches!(res, Err(Error::EmptySet(_))));
}

#[test]
fn rpi_nilpotent_returns_constraints_with_input_rows() {
    // A_cl = 0, D = {0}: X itself plus K xi in U rows
    let a_cl = vec![DMatrix::zeros(2, 2)];
    let e = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
    let x = unit_box(2);
    let u = Polytope::symmetric_box(&DVector::from_vec(vec![0.5])).unwrap();
    let k = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
    let res = rpi_terminal_set(&a_cl, &e, &VertexSet::origin(1), &x, &u, &k).unwrap();
    assert!(res.certified);
    // {|x1| <= 0.5, |x2| <= 1}
    let want = Polytope::from_box(
        &DVector::from_vec(vec![-0.5, -1.0]),
        &DVector::from_vec(vec![0.5, 1.0]),
    )
    .unwrap();
    assert!(res.set.set_eq(&want).unwrap());
}

#[test]
fn rpi_scalar_hand_computation() {
    // a_cl = 0.5, |d| <= 0.1, |x| <= 1, K = 0: [-1,1] invariant (0.5 + 0.1 <= 1)
    let a_cl = vec![DMatrix::from_row_slice(1, 1, &[0.5])];
    let e = DMatrix::from_row_slice(1, 1, &[1.0]);
    let x = unit_box(1);
    let u = Polytope::symmetric_box(&DVector::from_vec(vec![1.0])).unwrap();
    let k = DMatrix::zeros(1, 1);
    let d = Polytope::symmetric_box(&DVector::from_vec(vec![0.1]))
        .unwrap()
        .exact_vertices()
        .unwrap();
    let res = rpi_terminal_set(&a_cl, &e, &d, &x, &u, &k).unwrap();
    assert!(res.certified);
    assert!(res.set.set_eq(&unit_box(1)).unwrap());
}

#[test]
fn rpi_output_is_invariant_on_vertices() {
    // two-vertex uncertain system, check the RPI property on the result
    let a_cl = vec![
        DMatrix::from_row_slice(2, 2, &[0.4, 0.1, -0.1, 0.5]),
        DMatrix::from_row_slice(2, 2, &[0.5, 0.05, 0.0, 0.45]),
    ];
    let e = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
    let x = unit_box(2);
    let u = Polytope::symmetric_box(&DVector::from_vec(vec![0.6])).unwrap();
    let k = DMatrix::from_row_slice(1, 2, &[-0.2, 0.1]);
    let d = Polytope::symmetric_box(&DVector::from_vec(vec![0.05]))
        .unwrap()
        .exact_vertices()
        .unwrap();
    let res = rpi_terminal_set(&a_cl, &e, &d, &x, &u, &k).unwrap();
    assert!(res.certified);
    let vs = res.set.exact_vertices().unwrap();
    for v in &vs.vertices {
        // input admissible
        assert!(u.contains(&(&k * v)).unwrap());
        for acl in &a_cl {
            for dv in &d.vertices {
                let next = acl * v + &e * dv;
                assert!(
                    res.set.violation(&next) <= 1e-6,
                    "vertex leaves the set: violation {}",
                    res.set.violation(&next)
                );
            }
        }
    }
}

#[test]
fn erosion_duality_on_boxes() {
    // erode(P (+) E*D, E, D) contains P; equality for boxes with E = I
    let p = unit_box(2);
    let d = Polytope::symmetric_box(&DVector::from_vec(vec![0.3, 0.2])).unwrap();
    let dv = d.exact_vertices().unwrap();
    // P (+) D for boxes: radii add
    let sum = Polytope::from_box(
        &DVector::from_vec(vec![-1.3, -1.2]),
        &DVector::from_vec(vec![1.3, 1.2]),
    )
    .unwrap();
    let eroded = sum.erode_by_image(&DMatrix::identity(2, 2), &dv).unwrap();
    assert!(eroded.set_eq(&p).unwrap());
}
