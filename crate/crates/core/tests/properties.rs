use std::f64::consts::PI;

use plcurv::flows::{rhs_at, run_flow, FlowConfig, FlowKind, RunOutcome};
use plcurv::geometry::{
    alpha_curvature, curvature, is_delaunay_all, jacobian_l, make_delaunay, scale_metric, surgery,
};
use plcurv::mesh::io::{load_lengths_json, write_lengths_json};
use plcurv::solver::{newton_solve, NewtonConfig, Target};
use plcurv::{fixtures, PLMetric, Triangulation};
use proptest::prelude::*;

fn mesh(i: usize) -> Triangulation {
    match i % 4 {
        0 => fixtures::tetrahedron(),
        1 => fixtures::torus9(),
        2 => fixtures::cube().0,
        _ => fixtures::genus2(),
    }
}

fn metric_from(t: &Triangulation, raw: &[f64]) -> PLMetric {
    let ids = t.edge_ids();
    PLMetric::from_fn(t, |e| {
        raw[ids.iter().position(|&x| x == e).unwrap() % raw.len()]
    })
    .unwrap()
}

fn inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flips_keep_counts_and_undo(which in 0usize..4, picks in prop::collection::vec(0usize..1000, 1..12)) {
        let mut t = mesh(which);
        let counts = (t.vertex_count(), t.edge_count(), t.face_count(), t.euler_characteristic());
        for p in picks {
            let ids = t.edge_ids();
            let e = ids[p % ids.len()];
            let before = t.canonical_faces();
            if let Ok(out) = t.flip(e) {
                prop_assert_eq!(counts, (t.vertex_count(), t.edge_count(), t.face_count(), t.euler_characteristic()));
                t.validate().unwrap();
                let (back, _) = t.flipped(out.created).unwrap();
                prop_assert_eq!(back.canonical_faces(), before);
            }
        }
    }

    #[test]
    fn relabeled_closed_surfaces_build(which in 0usize..3, perm_seed in any::<u64>(), rot in prop::collection::vec(0usize..3, 18)) {
        let (n, faces): (usize, Vec<[usize; 3]>) = match which {
            0 => (4, vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]]),
            1 => (9, fixtures::torus9_faces()),
            _ => (8, fixtures::CUBE_FACES.to_vec()),
        };
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = perm_seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let relabeled: Vec<[usize; 3]> = faces
            .iter()
            .enumerate()
            .map(|(k, f)| {
                let r = rot[k % rot.len()];
                [perm[f[r]], perm[f[(r + 1) % 3]], perm[f[(r + 2) % 3]]]
            })
            .collect();
        prop_assert!(Triangulation::from_faces(n, &relabeled).is_ok());
    }

    #[test]
    fn gauss_bonnet_even_when_degenerate(which in 0usize..4, raw in prop::collection::vec(0.05f64..3.0, 27)) {
        let t = mesh(which);
        let m = metric_from(&t, &raw);
        let s: f64 = curvature(&t, &m).iter().sum();
        prop_assert!((s - 2.0 * PI * t.euler_characteristic() as f64).abs() < 1e-9 * t.face_count() as f64);
    }

    #[test]
    fn delaunay_jacobian_is_psd(which in 0usize..4, raw in prop::collection::vec(1.0f64..1.5, 27), xs in prop::collection::vec(-1.0f64..1.0, 9)) {
        let t = mesh(which);
        let (t, m, _) = make_delaunay(&t, &metric_from(&t, &raw)).unwrap();
        let l = jacobian_l(&t, &m).unwrap();
        let n = t.vertex_count();
        let x: Vec<f64> = (0..n).map(|i| xs[i % xs.len()] + 0.01 * i as f64).collect();
        prop_assert!(l.quad_form(&x) > 0.0);
        prop_assert!(l.quad_form(&vec![1.0; n]).abs() < 1e-12);
    }

    #[test]
    fn scaling_equivariance(which in 0usize..4, raw in prop::collection::vec(1.0f64..1.5, 27), lam in 0.2f64..5.0, alpha in -3.0f64..3.0) {
        let t = mesh(which);
        let m = metric_from(&t, &raw);
        let n = t.vertex_count();
        let u0 = vec![0.0; n];
        let u1 = vec![lam.ln(); n];
        let chi = t.euler_characteristic();
        let r0 = alpha_curvature(&curvature(&t, &scale_metric(&t, &m, &u0).unwrap()), &u0, alpha, chi);
        let m1 = scale_metric(&t, &m, &u1).unwrap();
        let r1 = alpha_curvature(&curvature(&t, &m1), &u1, alpha, chi);
        for (a, b) in r0.r_alpha.iter().zip(&r1.r_alpha) {
            prop_assert!((b - a * lam.powf(-alpha)).abs() < 1e-10 * (1.0 + a.abs()));
        }
        prop_assert_eq!(is_delaunay_all(&t, &m), is_delaunay_all(&t, &m1));
    }

    #[test]
    fn surgery_is_an_isometry(which in 0usize..4, raw in prop::collection::vec(1.0f64..1.5, 27), us in prop::collection::vec(-0.4f64..0.4, 9)) {
        let t0 = mesh(which);
        let base0 = metric_from(&t0, &raw);
        let n = t0.vertex_count();
        let u: Vec<f64> = (0..n).map(|i| us[i % us.len()]).collect();
        let cur0 = scale_metric(&t0, &base0, &u).unwrap();
        prop_assume!(cur0.first_degenerate_face(&t0).is_none());
        let (mut t, mut base) = (t0.clone(), base0.clone());
        let log = surgery(&mut t, &mut base, &u).unwrap();
        let cur1 = scale_metric(&t, &base, &u).unwrap();
        prop_assert!(inf_dist(&curvature(&t0, &cur0), &curvature(&t, &cur1)) < 1e-9);
        for e in t0.edge_ids() {
            if t.contains_edge(e) && log.iter().all(|r| r.removed != e) {
                prop_assert!((cur0.length(e) - cur1.length(e)).abs() < 1e-9);
            }
        }
        prop_assert!(is_delaunay_all(&t, &cur1).is_empty());
    }

    #[test]
    fn lengths_json_round_trip(which in 0usize..4, raw in prop::collection::vec(1.0f64..1.5, 27), us in prop::collection::vec(-0.4f64..0.4, 9)) {
        let t = mesh(which);
        let n = t.vertex_count();
        let u: Vec<f64> = (0..n).map(|i| us[i % us.len()]).collect();
        let cur = scale_metric(&t, &metric_from(&t, &raw), &u).unwrap();
        prop_assume!(cur.first_degenerate_face(&t).is_none());
        let (t, m, _) = make_delaunay(&t, &cur).unwrap();
        let s = load_lengths_json(write_lengths_json(&t, &m).as_bytes()).unwrap();
        prop_assert_eq!(s.tri.canonical_faces(), t.canonical_faces());
        prop_assert_eq!(curvature(&s.tri, &s.metric), curvature(&t, &m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn flows_conserve_descend_and_agree_with_newton(
        torus in any::<bool>(),
        alpha_pick in 0usize..3,
        us in prop::collection::vec(-0.3f64..0.3, 9),
        calabi in any::<bool>(),
    ) {
        let (t, m, alpha) = if torus {
            let (t, m) = fixtures::equilateral_torus();
            (t, m, [-2.0, 0.0, 2.0][alpha_pick])
        } else {
            let t = fixtures::tetrahedron();
            let m = PLMetric::uniform(&t, 1.0).unwrap();
            (t, m, [-2.0, -1.0, 0.0][alpha_pick])
        };
        let n = t.vertex_count();
        let u0 = &us[..n];
        let kind = if calabi { FlowKind::Calabi } else { FlowKind::Yamabe };
        let r = run_flow(&t, &m, u0, alpha, &FlowConfig::new(kind)).unwrap();
        prop_assert_eq!(&r.outcome, &RunOutcome::Converged);
        let c0 = r.history.rows[0].conserved;
        for w in r.history.rows.windows(2) {
            prop_assert!((w[1].conserved - c0).abs() < 1e-9);
            prop_assert!(w[1].energy <= w[0].energy + 1e-12);
        }
        let nt = newton_solve(&t, &m, u0, alpha, &Target::Constant, &NewtonConfig::default()).unwrap();
        prop_assert!(inf_dist(&r.state.u, &nt.u) < 1e-6);
    }
}

#[test]
fn stationarity() {
    let (t, m) = fixtures::equilateral_torus();
    for kind in [FlowKind::Yamabe, FlowKind::Calabi] {
        let r = rhs_at(&t, &m, &[0.0; 9], 1.0, kind).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-13));
        let mut u = [0.0; 9];
        u[4] = 0.1;
        let r = rhs_at(&t, &m, &u, 1.0, kind).unwrap();
        assert!(r.iter().any(|x| x.abs() > 1e-6));
    }
}
