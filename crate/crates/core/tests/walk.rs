use harmonet::models::{BinaryTree, Lattice, LineNetwork};
use harmonet::network::{materialize_ball, ExplicitNetwork};
use harmonet::potential::{monopole, Exhaustion};
use harmonet::walk::*;
use harmonet::{Network, VertexId};

fn p(n: i64, j: i64) -> VertexId {
    VertexId::Pair(n, j)
}

fn small() -> McParams {
    McParams::new(20_000, 5_000, 7)
}

#[test]
fn sample_path_p3_and_reproducible() {
    let net = ExplicitNetwork::path(3);
    for seed in 0..20 {
        let path = sample_path(&net, VertexId::Int(0), &StopRule::Length(1), seed).unwrap();
        assert_eq!(path, vec![VertexId::Int(0), VertexId::Int(1)]);
    }
    let z = LineNetwork::z_unit();
    let a = sample_path(&z, VertexId::Int(0), &StopRule::Length(200), 3).unwrap();
    let b = sample_path(&z, VertexId::Int(0), &StopRule::Length(200), 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 201);
    let hit = sample_path(&z, VertexId::Int(0), &StopRule::HitSetCapped { targets: vec![VertexId::Int(1)], horizon: 50 }, 1).unwrap();
    assert!(hit.len() <= 51);
}

#[test]
fn tree_first_step_is_fair() {
    let t = BinaryTree::new(1.0).unwrap();
    let left = (0..4000).filter(|&s| sample_path(&t, BinaryTree::root(), &StopRule::Length(1), s).unwrap()[1] == p(1, 1)).count() as f64;
    let f = left / 4000.0;
    assert!((f - 0.5).abs() < 3.0 * (0.25f64 / 4000.0).sqrt());
}

#[test]
fn tree_hitting_probabilities() {
    let t = BinaryTree::new(1.0).unwrap();
    let f = estimate_f(&t, p(2, 1), p(1, 1), &small()).unwrap();
    assert!(f.within(0.5, 3.0), "{f:?}");
    let u = estimate_u(&t, BinaryTree::root(), &small()).unwrap();
    assert!(u.direct.within(0.5, 3.0), "{:?}", u.direct);
    assert!(u.via_identity.within(0.5, 3.0), "{:?}", u.via_identity);
    assert!(estimate_f(&t, p(1, 1), p(1, 1), &small()).is_err());
}

#[test]
fn finite_and_recurrent_hitting() {
    let tri = ExplicitNetwork::triangle();
    let f = estimate_f(&tri, VertexId::Int(0), VertexId::Int(2), &small()).unwrap();
    assert_eq!(f.point, 1.0);
    let two = ExplicitNetwork::path(2);
    assert_eq!(estimate_u(&two, VertexId::Int(0), &small()).unwrap().direct.point, 1.0);
    let z = LineNetwork::z_unit();
    let f = estimate_f(&z, VertexId::Int(0), VertexId::Int(1), &McParams::new(2000, 100_000, 1)).unwrap();
    assert!(f.point > 0.99, "{f:?}");
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let t = BinaryTree::new(1.0).unwrap();
    let a = estimate_u(&t, BinaryTree::root(), &small().workers(1)).unwrap();
    let b = estimate_u(&t, BinaryTree::root(), &small().workers(4)).unwrap();
    assert_eq!(a.direct, b.direct);
    assert_eq!(a.via_identity, b.via_identity);
}

#[test]
fn green_truncated_tree_and_line() {
    let t = BinaryTree::new(1.0).unwrap();
    let w = materialize_ball(&t, BinaryTree::root(), 16).unwrap();
    let g = green_truncated(&t, BinaryTree::root(), BinaryTree::root(), &w, 16).unwrap();
    assert_eq!(g.partial_sums[0], 1.0);
    assert_eq!(g.growth, Growth::Bounded);
    // level process: root → 1 surely, otherwise down 2/3, up 1/3
    let mut m = vec![0.0f64; 18];
    m[0] = 1.0;
    let mut s = 1.0;
    for _ in 0..16 {
        let mut nx = vec![0.0f64; 18];
        nx[1] += m[0];
        for k in 1..17 {
            nx[k + 1] += m[k] * 2.0 / 3.0;
            nx[k - 1] += m[k] / 3.0;
        }
        m = nx;
        s += m[0];
    }
    assert!((g.last() - s).abs() < 1e-14, "{} vs {s}", g.last());
    let err = green_truncated(&t, BinaryTree::root(), BinaryTree::root(), &w, 17).unwrap_err();
    assert!(err.to_string().contains("17"), "{err}");

    let z = LineNetwork::z_unit();
    let w = materialize_ball(&z, VertexId::Int(0), 256).unwrap();
    let g = green_truncated(&z, VertexId::Int(0), VertexId::Int(0), &w, 256).unwrap();
    assert_eq!(g.growth, Growth::Diverging);
    // Σ_{k≤128} C(2k,k)4^{-k} ≈ 2√(128/π)
    assert!((g.partial_sums[256] - 2.0 * (128.0 / std::f64::consts::PI).sqrt()).abs() < 0.1);
}

#[test]
fn identities_on_tree() {
    let t = BinaryTree::new(1.0).unwrap();
    let params = McParams::new(20_000, 2_000, 11);
    let r = green_identities_report(&t, p(1, 1), p(1, 2), &params).unwrap();
    for c in &r.checks {
        assert!(c.pass, "{c:?}");
    }
    let same = green_identities_report(&t, BinaryTree::root(), BinaryTree::root(), &params).unwrap();
    assert_eq!(same.checks.len(), 1);
}

#[test]
fn monopole_matches_closed_form_on_tree() {
    let t = BinaryTree::new(1.0).unwrap();
    let eval = materialize_ball(&t, BinaryTree::root(), 3).unwrap();
    let w = monopole_probabilistic(&t, BinaryTree::root(), &eval, &McParams::new(20_000, 2_000, 5)).unwrap();
    for (i, &a) in eval.vertices().iter().enumerate() {
        let depth = a.as_pair().unwrap().0;
        let exact = 0.5f64.powi(depth as i32);
        let z = (w.function.at(i) - exact).abs() / w.stderr.at(i).max(1e-12);
        assert!(z < 4.0, "{a}: {} vs {exact}", w.function.at(i));
    }
    assert!(w.residual_z < 5.0, "{}", w.residual_z);
    assert!(monopole_probabilistic(&LineNetwork::z_unit(), VertexId::Int(0), &eval, &McParams::new(2000, 20_000, 1)).is_err());
}

#[test]
fn monopole_agrees_with_potential_on_geometric_line() {
    let z = LineNetwork::z_geometric(2.0);
    let eval = materialize_ball(&z, VertexId::Int(0), 3).unwrap();
    let params = McParams::new(20_000, 5_000, 3);
    let w = monopole_probabilistic(&z, VertexId::Int(0), &eval, &params).unwrap();
    let det = monopole(&z, VertexId::Int(0), &Exhaustion::default()).unwrap();
    for (i, &a) in eval.vertices().iter().enumerate() {
        let d = det.function.get(a).unwrap();
        assert!((w.function.at(i) - d).abs() < 4.0 * w.stderr.at(i) + 1e-6, "{a}: {} vs {d}", w.function.at(i));
    }
}

#[test]
fn hitting_matrix_relations() {
    let t = BinaryTree::new(1.0).unwrap();
    let d = hitting_matrix_d(&t, p(1, 1), p(1, 2), &McParams::new(20_000, 2_000, 9)).unwrap();
    for r in &d.relations {
        assert!(r.pass, "{r:?}");
    }
    assert!((d.direct[0][1] - d.direct[1][0]).abs() < 4.0 * d.direct_stderr[0][1].hypot(d.direct_stderr[1][0]));
    assert!((d.det_factorized - d.det_green).abs() < 4.0 * d.det_green_stderr + 0.05, "{d:?}");
    assert!(!d.near_singular);
    assert!(hitting_matrix_d(&t, p(1, 1), p(1, 1), &small()).is_err());
}

#[test]
fn dipole_constructions() {
    let t = BinaryTree::new(1.0).unwrap();
    let eval = materialize_ball(&t, BinaryTree::root(), 2).unwrap();
    let r = dipole_probabilistic(&t, BinaryTree::root(), p(1, 1), &eval, &McParams::new(20_000, 2_000, 13)).unwrap();
    assert!(r.via_d.residual_z < 5.0, "{}", r.via_d.residual_z);
    assert!(r.via_monopoles.residual_z < 5.0, "{}", r.via_monopoles.residual_z);
    assert!(dipole_probabilistic(&t, p(1, 1), p(1, 1), &eval, &small()).is_err());
}

#[test]
fn harmonic_extension_examples() {
    let p3 = ExplicitNetwork::path(3);
    let eval = harmonet::FiniteWindow::from_vertices(&p3, &p3.vertices()).unwrap();
    let e = harmonic_extension(&p3, &[(VertexId::Int(0), 0.0), (VertexId::Int(2), 1.0)], &eval, &small()).unwrap();
    let v = e.estimate.function.get(VertexId::Int(1)).unwrap();
    assert!((v - 0.5).abs() < 3.0 * e.estimate.stderr.get(VertexId::Int(1)).unwrap());
    assert_eq!(e.estimate.function.get(VertexId::Int(2)).unwrap(), 1.0);

    let z = LineNetwork::z_unit();
    let eval = materialize_ball(&z, VertexId::Int(5), 5).unwrap();
    let e = harmonic_extension(&z, &[(VertexId::Int(0), 0.0), (VertexId::Int(10), 1.0)], &eval, &McParams::new(10_000, 10_000, 2)).unwrap();
    for k in 1..10 {
        let v = e.estimate.function.get(VertexId::Int(k)).unwrap();
        let se = e.estimate.stderr.get(VertexId::Int(k)).unwrap();
        assert!((v - k as f64 / 10.0).abs() < 4.0 * se, "{k}: {v}");
    }
    let ones = harmonic_extension(&z, &[(VertexId::Int(0), 1.0), (VertexId::Int(10), 1.0)], &eval, &McParams::new(2_000, 10_000, 2)).unwrap();
    assert!(ones.estimate.function.values().iter().all(|&v| v == 1.0));
}

#[test]
fn h_energy_bound() {
    let t = BinaryTree::new(1.0).unwrap();
    let eval = materialize_ball(&t, BinaryTree::root(), 3).unwrap();
    let r = h_energy_report(&t, BinaryTree::root(), &eval, &McParams::new(5_000, 2_000, 4)).unwrap();
    assert!(r.window_energy <= r.direct_form + 3.0 * r.direct_form_stderr, "{r:?}");
}

#[test]
fn transience_verdicts() {
    let params = McParams::new(4_000, 10_000, 1);
    let t = BinaryTree::new(1.0).unwrap();
    assert_eq!(transience_test(&t, BinaryTree::root(), &params).unwrap().classification, Classification::Transient);
    let z = LineNetwork::z_unit();
    assert_eq!(transience_test(&z, VertexId::Int(0), &params).unwrap().classification, Classification::Recurrent);
    let z3 = Lattice::new(3).unwrap();
    let r = transience_test(&z3, z3.origin().unwrap(), &params).unwrap();
    assert_eq!(r.classification, Classification::Transient, "{:?}", r.evidence);
}
