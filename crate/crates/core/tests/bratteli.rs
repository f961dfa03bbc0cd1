use harmonet::bratteli::*;
use harmonet::models::{pascal_h, stationary_family, tree_f_lambda, BinaryTree, Lattice};
use harmonet::network::ExplicitNetwork;
use harmonet::VertexId;
use nalgebra::DMatrix;

fn pascal(depth: usize) -> BratteliDiagram {
    BratteliDiagram::pascal(depth, &ConductanceRule::Unit).unwrap()
}

fn pascal_h_levels(d: &BratteliDiagram, last: usize) -> LevelFunction {
    LevelFunction::from_fn(d, 0..=last, |n, i| pascal_h(n as i64, i as i64) as f64)
}

#[test]
fn pascal_arrow_entries() {
    let lambda = 3.0;
    let d = BratteliDiagram::pascal(8, &ConductanceRule::LambdaPowN { lambda }).unwrap();
    let a0 = arrow_matrices(&d, 0).unwrap();
    assert_eq!(a0.left[(0, 0)], 0.5);
    assert!(a0.right.is_none());
    for n in 1..8 {
        let a = arrow_matrices(&d, n).unwrap();
        // ends: one parent, two children; inside: two of each
        let end = lambda / (1.0 + 2.0 * lambda);
        let inside = lambda / (2.0 + 2.0 * lambda);
        assert!((a.left[(0, 0)] - end).abs() < 1e-14);
        assert!((a.left[(n, n + 1)] - end).abs() < 1e-14);
        for i in 1..n {
            assert!((a.left[(i, i)] - inside).abs() < 1e-14);
        }
        assert!(a.row_sum_error() < 1e-14);
    }
}

#[test]
fn construction_rejects_bad_incidence() {
    let zero_col: Vec<Incidence> = vec![vec![vec![1, 0]]];
    assert!(build_diagram(&zero_col, &ConductanceRule::Unit, MultiEdge::Reject).is_err());
    let multi: Vec<Incidence> = vec![vec![vec![2]]];
    assert!(build_diagram(&multi, &ConductanceRule::Unit, MultiEdge::Reject).is_err());
    let merged = build_diagram(&multi, &ConductanceRule::Unit, MultiEdge::MergeParallel).unwrap();
    assert_eq!(merged.conductance_dense(0).unwrap()[(0, 0)], 2.0);
    let sub = subdivide_multi_edges(&multi).unwrap();
    let d = build_diagram(&sub, &ConductanceRule::Unit, MultiEdge::Reject).unwrap();
    assert_eq!(d.sizes(), &[1, 2, 1]);
}

#[test]
fn pascal_h_is_harmonic_and_antisymmetric() {
    let d = pascal(12);
    let h = pascal_h_levels(&d, 12);
    for (_, r) in level_harmonic_residuals(&d, &h).unwrap() {
        assert_eq!(r, 0.0);
    }
    assert_eq!(pascal_h(2, 0), 3);
    assert_eq!(pascal_h(2, 1), 0);
    assert_eq!(pascal_h(2, 2), -3);
    for n in 0..=8 {
        for i in 0..=n {
            assert_eq!(pascal_h(n, i) + pascal_h(n, n - i), 0);
        }
    }
}

#[test]
fn pascal_extension_is_one_dimensional_and_assemblies_agree() {
    let d = pascal(12);
    let h = pascal_h_levels(&d, 12);
    for n in 1..=10 {
        let prev = h.level(n - 1).unwrap();
        let cur = h.level(n).unwrap();
        let c = harmonic_extend(&d, n, Some(prev), cur, Assembly::Conductance).unwrap();
        let a = harmonic_extend(&d, n, Some(prev), cur, Assembly::Arrow).unwrap();
        assert_eq!(c.dimension(), 1, "level {n}");
        assert_eq!(a.dimension(), 1);
        assert!(c.feasible(1e-10) && a.feasible(1e-10));
        let (dp, dk) = c.compare(&a);
        assert!(dp < 1e-10 && dk < 1e-10, "level {n}: {dp:e} {dk:e}");
        // h_{n+1} lies in the affine solution set
        let next = nalgebra::DVector::from_column_slice(h.level(n + 1).unwrap());
        let diff = &next - &c.particular;
        let proj = &c.kernel * (c.kernel.transpose() * &diff);
        assert!((diff - proj).norm() < 1e-9);
    }
}

#[test]
fn stationary_constant_family() {
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
    let lambda = 2.0;
    let d = BratteliDiagram::stationary(&a, lambda, 14).unwrap();
    assert_eq!(d.harmonic_from(), 1);
    let f = LevelFunction::new(0, (0..=14).map(|n| stationary_family(&[1.0, 1.0], lambda, n)).collect());
    for (n, r) in level_harmonic_residuals(&d, &f).unwrap() {
        if n >= d.harmonic_from() {
            assert!(r < 1e-12 * lambda.powi(n as i32), "level {n}: {r:e}");
        }
    }
    // f₁ = (1, −1) is not carried by the same formula
    let g = LevelFunction::new(0, (0..=14).map(|n| stationary_family(&[1.0, -1.0], lambda, n)).collect());
    let worst = level_harmonic_residuals(&d, &g).unwrap().into_iter().map(|(_, r)| r).fold(0.0, f64::max);
    assert!(worst > 0.1);
    for n in 1..=10 {
        let c = harmonic_extend(&d, n, Some(f.level(n - 1).unwrap()), f.level(n).unwrap(), Assembly::Conductance).unwrap();
        let ar = harmonic_extend(&d, n, Some(f.level(n - 1).unwrap()), f.level(n).unwrap(), Assembly::Arrow).unwrap();
        let (dp, dk) = c.compare(&ar);
        assert!(dp < 1e-10 && dk < 1e-10);
        let expect = stationary_family(&[1.0, 1.0], lambda, n + 1);
        for (x, e) in c.particular.iter().zip(expect) {
            assert!((x - e).abs() < 1e-12);
        }
    }
}

#[test]
fn existence() {
    let p = pascal(8);
    let r = harmonic_exists(&p, 8).unwrap();
    assert!(r.exists);
    let w = r.witness.unwrap();
    for (_, res) in level_harmonic_residuals(&p, &w).unwrap() {
        assert!(res < 1e-9);
    }
    let t = BratteliDiagram::binary_tree(2.0, 6).unwrap();
    assert!(harmonic_exists(&t, 6).unwrap().exists);
    // 1 → 2 → 1: harmonic at the root and at V_1 forces f ≡ 0
    let inc: Vec<Incidence> = vec![vec![vec![1, 1]], vec![vec![1], vec![1]]];
    let d = build_diagram(&inc, &ConductanceRule::Unit, MultiEdge::Reject).unwrap();
    let r = harmonic_exists(&d, 2).unwrap();
    assert!(!r.exists);
    assert_eq!(r.failing_depth, Some(2));
}

#[test]
fn tree_f_lambda_on_diagram() {
    for lambda in [0.5, 1.0, 2.0, 3.0] {
        let d = BratteliDiagram::binary_tree(lambda, 10).unwrap();
        let f = LevelFunction::from_fn(&d, 0..=10, |n, i| tree_f_lambda(lambda, n as i64, i as i64 + 1));
        for (_, r) in level_harmonic_residuals(&d, &f).unwrap() {
            assert!(r < 1e-10 * (1.0 + lambda.powi(10)), "λ = {lambda}: residual {r:e}");
        }
        let ext = level_extrema(&d, &f, 1, 9).unwrap();
        assert!(ext.strictly_increasing && ext.strictly_decreasing);
    }
}

#[test]
fn currents_are_conserved() {
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
    let d = BratteliDiagram::stationary(&a, 2.0, 14).unwrap();
    let f = LevelFunction::new(0, (0..=14).map(|n| stationary_family(&[1.0, 1.0], 2.0, n)).collect());
    let i1 = currents(&d, &f, 1).unwrap().total;
    // out of V_0: Σ_{x,z} A_xz (f_1 − f_0) = 6
    assert!((i1 - 6.0).abs() < 1e-12);
    for n in 1..=10 {
        let c = currents(&d, &f, n).unwrap();
        assert!((c.total - i1).abs() < 1e-9, "I_{n} = {}", c.total);
        assert!(c.imbalance.iter().all(|x| x.abs() < 1e-9));
    }
    let p = pascal(12);
    let h = pascal_h_levels(&p, 12);
    for n in 1..=10 {
        assert!(currents(&p, &h, n).unwrap().total.abs() < 1e-9);
    }
}

#[test]
fn pascal_extrema() {
    let d = pascal(12);
    let h = pascal_h_levels(&d, 12);
    let e = level_extrema(&d, &h, 1, 10).unwrap();
    assert!(e.strictly_increasing && e.strictly_decreasing);
    for (k, &n) in e.levels.iter().enumerate() {
        assert_eq!(e.max[k], pascal_h(n as i64, 0) as f64);
        assert_eq!(e.min[k], -(pascal_h(n as i64, 0) as f64));
    }
}

#[test]
fn energy_bound_verdicts() {
    // Pascal: Σ 1/(n+1) diverges, so any I₁ ≠ 0 forces infinite energy
    let n = 40;
    let d = pascal(n + 1);
    let f = harmonic_sequence(&d, &[0.0], &[1.0, 1.0], n + 1, Assembly::Conductance, 1e-10).unwrap();
    let b = energy_lower_bound(&d, &f, n).unwrap();
    assert_eq!(b.i1, 2.0);
    assert!(b.bound_holds());
    assert_eq!(b.verdict, EnergyVerdict::InfiniteEnergy);

    // tree λ = 1: radial function harmonic off the root; series converges
    let t = BratteliDiagram::binary_tree(1.0, 8).unwrap();
    let g = harmonic_sequence(&t, &[0.0], &[1.0, 1.0], 8, Assembly::Conductance, 1e-10).unwrap();
    for m in 0..=8 {
        let expect = 2.0 * (1.0 - 0.5f64.powi(m as i32));
        assert!(g.level(m).unwrap().iter().all(|v| (v - expect).abs() < 1e-12));
    }
    let b = energy_lower_bound(&t, &g, 7).unwrap();
    assert!(b.bound_holds());
    assert_eq!(b.verdict, EnergyVerdict::Inconclusive);

    // antisymmetric h carries no current
    let p = pascal(12);
    let b = energy_lower_bound(&p, &pascal_h_levels(&p, 12), 10).unwrap();
    assert_eq!(b.verdict, EnergyVerdict::Vacuous);
}

#[test]
fn leveling() {
    let z2 = Lattice::new(2).unwrap();
    let r = graph_to_bratteli(&z2, VertexId::point(&[0, 0]), 5).unwrap();
    assert!(r.success(), "{:?}", r.violation);
    let sizes: Vec<usize> = r.levels.iter().map(|l| l.len()).collect();
    assert_eq!(sizes, vec![1, 4, 8, 12, 16, 20, 24]);
    let d = r.diagram.unwrap();
    assert_eq!(d.sizes(), &[1, 4, 8, 12, 16, 20, 24]);

    let tri = ExplicitNetwork::triangle();
    let r = graph_to_bratteli(&tri, VertexId::Int(0), 2).unwrap();
    assert!(matches!(r.violation, Some(LevelingViolation::IntraLevelEdge { level: 1, .. })));

    let tree = BinaryTree::new(2.0).unwrap();
    let r = graph_to_bratteli(&tree, BinaryTree::root(), 5).unwrap();
    assert!(r.success());
    let d = r.diagram.unwrap();
    assert_eq!(d.conductance_dense(3).unwrap().sum(), 16.0 * 8.0);
}
