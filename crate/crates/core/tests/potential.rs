use harmonet::linalg::Solver;
use harmonet::models::{z_unit_dipole, BinaryTree, Lattice, LineNetwork};
use harmonet::network::{materialize_ball, ExplicitNetwork, FiniteWindow, VertexId, Window};
use harmonet::operators::{energy, energy_form, harmonic_residual, laplacian_values, VertexFunction};
use harmonet::potential::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn int(n: i64) -> VertexId {
    VertexId::Int(n)
}

fn random_on(w: &Window, seed: u64) -> VertexFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    VertexFunction::new(w.clone(), (0..w.len()).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

/// Connected network on 0..n: a spanning path plus random chords.
fn random_network(seed: u64, n: i64) -> ExplicitNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(i64, i64, f64)> = (0..n - 1).map(|i| (i, i + 1, rng.random_range(0.2..3.0))).collect();
    for _ in 0..n {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        let (a, b) = (a.min(b), a.max(b));
        if b > a + 1 && !edges.iter().any(|e| e.0 == a && e.1 == b) {
            edges.push((a, b, rng.random_range(0.2..3.0)));
        }
    }
    ExplicitNetwork::from_edges(&edges, Some(0)).unwrap()
}

fn whole(net: &ExplicitNetwork) -> Window {
    FiniteWindow::from_vertices(net, &net.vertices()).unwrap()
}

fn finite() -> Exhaustion {
    Exhaustion::with_radii(&[64])
}

#[test]
fn dirichlet_examples() {
    let p3 = ExplicitNetwork::path(3);
    let p = DirichletProblem::new(&p3, &[int(1)], |_| 0.0, |v| if v == int(2) { 1.0 } else { 0.0 }).unwrap();
    let u = solve_dirichlet(&p, Solver::Auto).unwrap();
    assert!((u.get(int(1)).unwrap() - 0.5).abs() < 1e-15);

    let z = LineNetwork::z_unit();
    let interior: Vec<_> = (1..10).map(int).collect();
    let p = DirichletProblem::new(&z, &interior, |_| 0.0, |v| v.as_int().unwrap() as f64).unwrap();
    assert_eq!(p.boundary, vec![int(0), int(10)]);
    let u = solve_dirichlet(&p, Solver::Direct).unwrap();
    for k in 0..=10 {
        assert!((u.get(int(k)).unwrap() - k as f64).abs() < 1e-12);
    }
    assert!(dirichlet_residual(&p, &u).unwrap() < 1e-12);

    let p = DirichletProblem::new(&z, &interior, |_| 0.0, |_| 2.5).unwrap();
    let u = solve_dirichlet(&p, Solver::Auto).unwrap();
    assert!(u.values().iter().all(|&x| (x - 2.5).abs() < 1e-12));
    let r = maximum_principle_check(&u, &interior, 1e-10).unwrap();
    assert!(r.constant && r.holds());

    assert!(DirichletProblem::new(&z, &[], |_| 0.0, |_| 0.0).is_err());
}

#[test]
fn solvers_agree() {
    let z2 = Lattice::new(2).unwrap();
    let interior = materialize_ball(&z2, VertexId::point(&[0, 0]), 12).unwrap().vertices().to_vec();
    let p = DirichletProblem::new(&z2, &interior, |v| if v == VertexId::point(&[0, 0]) { 1.0 } else { 0.0 }, |v| v.coords().unwrap()[0] as f64).unwrap();
    let a = solve_dirichlet(&p, Solver::Direct).unwrap();
    let b = solve_dirichlet(&p, Solver::ConjugateGradient).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() < 1e-9);
    }
    assert!(dirichlet_residual(&p, &b).unwrap() < 1e-8);
}

#[test]
fn maximum_principle() {
    let z2 = Lattice::new(2).unwrap();
    let interior = materialize_ball(&z2, VertexId::point(&[0, 0]), 5).unwrap().vertices().to_vec();
    let p = DirichletProblem::new(
        &z2,
        &interior,
        |_| 0.0,
        |v| {
            let c = v.coords().unwrap();
            (c[0] * 3 + c[1] * c[1]) as f64
        },
    )
    .unwrap();
    let u = solve_dirichlet(&p, Solver::Auto).unwrap();
    let r = maximum_principle_check(&u, &interior, 1e-10).unwrap();
    assert!(!r.constant && r.holds());
    assert!(r.max_interior <= r.max_boundary && r.min_interior >= r.min_boundary);

    // a source breaks harmonicity and is refused
    let p = DirichletProblem::new(&z2, &interior, |_| 1.0, |_| 0.0).unwrap();
    let u = solve_dirichlet(&p, Solver::Auto).unwrap();
    assert!(maximum_principle_check(&u, &interior, 1e-10).is_err());
}

#[test]
fn dipoles_on_paths() {
    let p3 = ExplicitNetwork::path(3);
    let d = dipole(&p3, int(0), int(2), &finite()).unwrap();
    assert_eq!(d.verdict, Verdict::Converged);
    assert!((d.function.get(int(0)).unwrap() - d.function.get(int(2)).unwrap() - 2.0).abs() < 1e-12);
    assert!((d.energy() - 2.0).abs() < 1e-12);
    let z = dipole(&p3, int(1), int(1), &finite()).unwrap();
    assert!(z.function.values().iter().all(|&x| x == 0.0));

    let line = LineNetwork::z_unit();
    for n in [1i64, 3, -2] {
        let d = dipole_with(&line, int(n), int(0), &Exhaustion::with_radii(&[10]), Truncation::Free).unwrap();
        for (v, x) in d.function.iter() {
            let k = v.as_int().unwrap();
            assert!((x - z_unit_dipole(n, k) as f64).abs() < 1e-12, "n = {n}, k = {k}: {x}");
        }
    }
    // grounded energies approach 1 from below
    let g = dipole(&line, int(1), int(0), &Exhaustion::with_radii(&[4, 8, 16])).unwrap();
    let e: Vec<f64> = g.energy_by_radius.iter().map(|r| r.energy).collect();
    assert!(e.windows(2).all(|w| w[0] < w[1]) && e[2] < 1.0);
}

#[test]
fn reproducing_property() {
    let p3 = ExplicitNetwork::path(3);
    let d = dipole(&p3, int(0), int(2), &finite()).unwrap();
    let w = d.function.window().clone();
    for seed in 0..100 {
        let u = random_on(&w, seed);
        let lhs = energy_form(&p3, &d.function, &u).unwrap();
        let rhs = u.get(int(0)).unwrap() - u.get(int(2)).unwrap();
        assert!((lhs - rhs).abs() <= 1e-9 * energy(&u).sqrt());
    }
    let z = LineNetwork::z_unit();
    let d = dipole_with(&z, int(2), int(-1), &Exhaustion::with_radii(&[12]), Truncation::Free).unwrap();
    let w = d.function.window().clone();
    for seed in 0..100 {
        let u = random_on(&w, seed);
        let lhs = energy_form(&z, &d.function, &u).unwrap();
        let rhs = u.get(int(2)).unwrap() - u.get(int(-1)).unwrap();
        assert!((lhs - rhs).abs() <= 1e-9 * energy(&u).sqrt());
    }
}

#[test]
fn delta_pairs_with_the_laplacian() {
    let z2 = Lattice::new(2).unwrap();
    let w = materialize_ball(&z2, VertexId::point(&[0, 0]), 4).unwrap();
    let u = random_on(&w, 9);
    for &x in &w.interior() {
        let d = VertexFunction::delta(w.clone(), x).unwrap();
        let lap = laplacian_values(&u, &[x]).unwrap()[0];
        assert!((energy_form(&z2, &d, &u).unwrap() - lap).abs() < 1e-12);
    }
}

#[test]
fn tree_monopole_and_dipole() {
    let t = BinaryTree::new(1.0).unwrap();
    let w = monopole(&t, BinaryTree::root(), &Exhaustion::with_radii(&[4, 8, 16])).unwrap();
    assert_eq!(w.verdict, Verdict::TransientConsistent);
    for (v, x) in w.function.iter() {
        let n = v.as_pair().unwrap().0;
        if n <= 6 {
            assert!((x - 0.5f64.powi(n as i32)).abs() < 1e-3, "{v}: {x}");
        }
    }

    let t = BinaryTree::new(2.0).unwrap();
    let ex = Exhaustion::with_radii(&[3, 6]).rooted(BinaryTree::root());
    let (x, y) = (VertexId::Pair(1, 1), VertexId::Pair(2, 4));
    let v = dipole(&t, x, y, &ex).unwrap();
    let wx = monopole(&t, x, &ex).unwrap();
    let wy = monopole(&t, y, &ex).unwrap();
    for (z, val) in v.function.iter() {
        let diff = wx.function.get(z).unwrap() - wy.function.get(z).unwrap();
        assert!((val - diff).abs() < 1e-10, "{z}");
    }
}

#[test]
fn line_monopole_is_recurrent() {
    let z = LineNetwork::z_unit();
    let w = monopole(&z, int(0), &Exhaustion::with_radii(&[4, 8, 16, 32])).unwrap();
    assert_eq!(w.verdict, Verdict::RecurrentConsistent);
    // a finite network has no monopole
    let p3 = ExplicitNetwork::path(3);
    assert_eq!(monopole(&p3, int(0), &finite()).unwrap().verdict, Verdict::RecurrentConsistent);
}

#[test]
fn multipoles() {
    let p3 = ExplicitNetwork::path(3);
    let m = multipole(&p3, int(1), &[(int(0), 0.5), (int(2), 0.5)], &finite()).unwrap();
    let f = &m.function;
    assert!((f.get(int(0)).unwrap() - f.get(int(2)).unwrap()).abs() < 1e-12);
    assert!((f.get(int(1)).unwrap() - f.get(int(0)).unwrap() - 0.5).abs() < 1e-12);

    let z = LineNetwork::z_unit();
    let m = multipole(&z, int(0), &[(int(1), 0.3), (int(-1), 0.7)], &Exhaustion::with_radii(&[8])).unwrap();
    let w = m.function.window();
    let lap = laplacian_values(&m.function, &w.interior()).unwrap();
    for (v, l) in w.interior().into_iter().zip(lap) {
        let expect = match v.as_int().unwrap() {
            0 => 1.0,
            1 => -0.3,
            -1 => -0.7,
            _ => 0.0,
        };
        assert!((l - expect).abs() < 1e-12, "{v}: {l}");
    }
    assert!(multipole(&z, int(0), &[(int(1), 0.3)], &finite()).is_err());
    assert!(multipole(&z, int(0), &[(int(0), 1.0)], &finite()).is_err());
    assert!(multipole(&z, int(0), &[], &finite()).is_err());
}

#[test]
fn resistance_distances() {
    let p3 = ExplicitNetwork::path(3);
    assert!((resistance_distance(&p3, int(0), int(2), &finite()).unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(resistance_distance(&p3, int(1), int(1), &finite()).unwrap(), 0.0);
    let tri = ExplicitNetwork::triangle();
    assert!((resistance_distance(&tri, int(0), int(1), &finite()).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    // series resistors: 1/2 + 1/4
    let net = ExplicitNetwork::from_edges(&[(0, 1, 2.0), (1, 2, 4.0)], Some(0)).unwrap();
    assert!((resistance_distance(&net, int(0), int(2), &finite()).unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn normal_derivative_on_p3() {
    let p3 = ExplicitNetwork::path(3);
    let v = VertexFunction::new(whole(&p3), vec![0.0, 1.0, 3.0]).unwrap();
    assert_eq!(normal_derivative(&p3, &[int(0), int(1)], &v, int(2)).unwrap(), 2.0);
    assert!(normal_derivative(&p3, &[int(0), int(1)], &v, int(1)).is_err());
    assert!(normal_derivative(&p3, &[int(0)], &v, int(2)).is_err());
}

#[test]
fn gauss_green_on_finite_networks() {
    for net in [ExplicitNetwork::path(5), ExplicitNetwork::triangle(), random_network(4, 9)] {
        let w = whole(&net);
        let (u, v) = (random_on(&w, 1), random_on(&w, 2));
        let r = gauss_green_split(&net, &u, &v, &Exhaustion::with_radii(&[1, 32])).unwrap();
        let last = r.raw.last().unwrap();
        assert_eq!(last.boundary_sum, 0.0);
        assert!((last.interior_sum - energy_form(&net, &u, &v).unwrap()).abs() < 1e-10);
        for g in r.raw.iter().chain(&r.gauged) {
            assert!((g.interior_sum + g.boundary_sum - g.inner_product).abs() < 1e-10);
        }
    }
}

#[test]
fn royden_split_is_orthogonal() {
    let z2 = Lattice::new(2).unwrap();
    let w = materialize_ball(&z2, VertexId::point(&[0, 0]), 6).unwrap();
    let u = random_on(&w, 5);
    let s = royden_split(&z2, &w, &u).unwrap();
    for i in 0..w.len() {
        if !w.is_interior(i) {
            assert_eq!(s.fin.at(i), 0.0);
            assert_eq!(s.harm.at(i), u.at(i));
        }
        assert!((s.fin.at(i) + s.harm.at(i) - u.at(i)).abs() < 1e-12);
    }
    assert!(laplacian_values(&s.harm, &w.interior()).unwrap().iter().all(|x| x.abs() < 1e-10));
    assert!(energy_form(&z2, &s.fin, &s.harm).unwrap().abs() < 1e-10);
    let e = energy(&u);
    assert!((energy(&s.fin) + energy(&s.harm) - e).abs() < 1e-10 * e);
}

#[test]
fn harmonic_part_is_harmonic_on_trees() {
    let t = BinaryTree::new(2.0).unwrap();
    let w = materialize_ball(&t, BinaryTree::root(), 5).unwrap();
    let s = royden_split(&t, &w, &random_on(&w, 3)).unwrap();
    assert!(harmonic_residual(&s.harm) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dipoles_on_random_networks(seed in 0u64..10_000, n in 3i64..10) {
        let net = random_network(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let (x, y, z) = (int(rng.random_range(0..n)), int(rng.random_range(0..n)), int(rng.random_range(0..n)));
        let d = dipole(&net, x, y, &finite()).unwrap();
        let u = random_on(d.function.window(), seed);
        let lhs = energy_form(&net, &d.function, &u).unwrap();
        prop_assert!((lhs - (u.get(x).unwrap() - u.get(y).unwrap())).abs() <= 1e-9 * energy(&u).sqrt().max(1.0));

        let r = |a, b| resistance_distance(&net, a, b, &finite()).unwrap();
        let (rxy, ryx) = (r(x, y), r(y, x));
        prop_assert!((rxy - ryx).abs() <= 1e-10 * rxy.max(1.0));
        prop_assert!(rxy <= r(x, z) + r(z, y) + 1e-10);
        prop_assert!((x == y) == (rxy == 0.0));
    }

    #[test]
    fn dirichlet_obeys_the_maximum_principle(seed in 0u64..10_000, radius in 2usize..6) {
        let z2 = Lattice::new(2).unwrap();
        let interior = materialize_ball(&z2, VertexId::point(&[0, 0]), radius).unwrap().vertices().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals: Vec<f64> = (0..4 * radius + 4).map(|_| rng.random_range(-5.0..5.0)).collect();
        let p = DirichletProblem::new(&z2, &interior, |_| 0.0, |v| {
            let c = v.coords().unwrap();
            vals[((c[0] + c[1]).rem_euclid(vals.len() as i64)) as usize]
        })
        .unwrap();
        let u = solve_dirichlet(&p, Solver::Auto).unwrap();
        prop_assert!(dirichlet_residual(&p, &u).unwrap() < 1e-9);
        prop_assert!(maximum_principle_check(&u, &interior, 1e-9).unwrap().holds());
    }
}
