use proptest::prelude::*;

use enharmonic::enharmonic::{
    conductances_of, hessian, initial_point_with, log_objective, residual, solve_all, solve_enharmonic,
    solve_enharmonic_from, SolverOptions,
};
use enharmonic::gallery::{make_jacobi, make_path, make_small_graph, make_star, Fixture};
use enharmonic::grid::{pde_residual, square_problem, BoundarySpec, EnergyMode, Sampling};
use enharmonic::harmonic::{boundary_currents, psi, solve_dirichlet};
use enharmonic::jacobian::jlog_report;
use enharmonic::numtheory::{quadratic_discriminant, rat, star_energies, to_f64, RationalPolynomial};
use enharmonic::planar::smith_diagram;
use enharmonic::{
    chain_spaces, enumerate_compatible_orientations, is_compatible, orientation_from_function, validate_network,
    BoundaryValues, Conductances, ConstraintSet, Energies, Network, Orientation,
};

fn four_cycle() -> Fixture {
    let net = Network::from_ids(
        &["a", "b", "c", "d"],
        &[("ab", "a", "b"), ("bc", "b", "c"), ("cd", "c", "d"), ("da", "d", "a")],
        &["a", "c"],
    )
    .unwrap();
    let u = BoundaryValues::new(&net, vec![0.0, 1.0]).unwrap();
    let energies = Energies::uniform(&net, 1.0).unwrap();
    Fixture { name: "four-cycle".into(), net, u, energies, rotation: None, known: Vec::new() }
}

fn fixtures() -> Vec<Fixture> {
    vec![make_path(2).unwrap(), make_small_graph(), four_cycle(), make_jacobi(2, 1.0, 1.5).unwrap()]
}

fn fixture() -> impl Strategy<Value = Fixture> {
    (0..4usize).prop_map(|k| fixtures().swap_remove(k))
}

/// Conductances drawn log-uniformly from `[e^-2, e^2]`, one per edge of the
/// largest fixture; callers truncate.
fn log_weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 12).prop_map(|v| v.into_iter().map(f64::exp).collect())
}

/// A connected graph on `n` vertices: a spanning path plus extra chords,
/// with the first `b` vertices on the boundary.
fn random_network(n: usize, extra: &[(usize, usize)], b: usize) -> Network {
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    for &(x, y) in extra {
        let (x, y) = (x % n, y % n);
        if x != y && !pairs.contains(&(x, y)) && !pairs.contains(&(y, x)) && pairs.len() < 10 {
            pairs.push((x, y));
        }
    }
    let edges = pairs.iter().enumerate().map(|(k, &(x, y))| (format!("e{k}"), ids[x].clone(), ids[y].clone())).collect();
    Network::new(ids.clone(), edges, ids[..b].to_vec()).unwrap()
}

fn graph() -> impl Strategy<Value = Network> {
    (3..7usize, prop::collection::vec((0..7usize, 0..7usize), 0..8), 2..4usize)
        .prop_map(|(n, extra, b)| random_network(n, &extra, b.min(n)))
}

fn brute_force_count(net: &Network, u: &BoundaryValues) -> usize {
    let m = net.edge_count();
    (0u32..1 << m)
        .filter(|mask| {
            let signs = (0..m).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect();
            is_compatible(net, u, &Orientation::new(signs).unwrap())
        })
        .count()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_matches_brute_force(net in graph(), seed in 0..6usize) {
        let b = net.boundary().len();
        let values: Vec<f64> = (0..b).map(|k| ((k + seed) % b) as f64 * 1.5 - 1.0).collect();
        let u = BoundaryValues::new(&net, values).unwrap();
        let fast = enumerate_compatible_orientations(&net, &u).unwrap();
        prop_assert_eq!(fast.len(), brute_force_count(&net, &u));
        for sigma in &fast {
            prop_assert!(is_compatible(&net, &u, sigma));
        }
    }

    #[test]
    fn orientation_count_ignores_boundary_order(net in graph(), perm in Just([0usize, 1, 2]).prop_shuffle()) {
        prop_assume!(validate_network(&net).is_ok());
        let b = net.boundary().len();
        let base: Vec<f64> = (0..b).map(|k| k as f64).collect();
        let moved: Vec<f64> = (0..b).map(|k| 10.0 * perm[k % 3] as f64 + k as f64 * 0.1).collect();
        let count = |v: Vec<f64>| enumerate_compatible_orientations(&net, &BoundaryValues::new(&net, v).unwrap()).unwrap().len();
        prop_assert_eq!(count(base), count(moved));
    }

    #[test]
    fn chain_projectors_split_the_edge_space(net in graph()) {
        let cs = chain_spaces(&net);
        let m = net.edge_count();
        let (pc, py) = (cs.p_cob(), cs.p_cyc());
        let id = nalgebra::DMatrix::<f64>::identity(m, m);
        prop_assert!((&pc + &py - id).amax() <= 1e-12);
        prop_assert!((&pc * &py).amax() <= 1e-12);
        prop_assert!((&py * &cs.d).amax() <= 1e-12);
        prop_assert_eq!(cs.dim_cob() + cs.dim_cyc(), m);
    }

    #[test]
    fn harmonic_functions_induce_compatible_orientations(f in fixture(), w in log_weights()) {
        let c = Conductances::new(&f.net, w[..f.net.edge_count()].to_vec()).unwrap();
        let sol = solve_dirichlet(&f.net, &f.u, &c).unwrap();
        let d = f.net.differential(&sol.h);
        prop_assume!(d.iter().all(|x| x.abs() > 1e-12));
        let sigma = orientation_from_function(&f.net, &sol.h).unwrap();
        prop_assert!(is_compatible(&f.net, &f.u, &sigma));
    }

    #[test]
    fn dirichlet_energy_and_maximum_principle(f in fixture(), w in log_weights(), lambda in 0.1f64..10.0) {
        let c = Conductances::new(&f.net, w[..f.net.edge_count()].to_vec()).unwrap();
        let sol = solve_dirichlet(&f.net, &f.u, &c).unwrap();
        let e = psi(&f.net, &f.u, &c).unwrap();
        let currents = boundary_currents(&f.net, &sol.omega);
        let flux: f64 = f.net.boundary().iter().zip(&currents).map(|(&b, i)| sol.h[b] * i).sum();
        let total: f64 = e.iter().sum();
        prop_assert!(rel(flux, total) <= 1e-9, "flux {flux} energy {total}");
        let (lo, hi) = (f.u.min(), f.u.max());
        prop_assert!(sol.h.iter().all(|&x| x >= lo - 1e-12 && x <= hi + 1e-12));
        let scaled = psi(&f.net, &f.u, &c.scaled(lambda)).unwrap();
        for (a, b) in scaled.iter().zip(&e) {
            prop_assert!(rel(*a, lambda * b) <= 1e-10);
        }
    }

    #[test]
    fn conductances_and_energies_round_trip(f in fixture(), w in log_weights()) {
        let c = Conductances::new(&f.net, w[..f.net.edge_count()].to_vec()).unwrap();
        let e = psi(&f.net, &f.u, &c).unwrap();
        prop_assume!(e.iter().all(|&x| x > 1e-6));
        let energies = Energies::new(&f.net, e.clone()).unwrap();
        let sols = solve_all(&f.net, &f.u, &energies).unwrap();
        prop_assert_eq!(sols.len(), enumerate_compatible_orientations(&f.net, &f.u).unwrap().len());
        let matches = sols
            .iter()
            .filter(|s| s.conductances.iter().zip(c.values()).all(|(a, b)| rel(*a, *b) <= 1e-6))
            .count();
        prop_assert_eq!(matches, 1);
        for s in &sols {
            let back = psi(&f.net, &f.u, &Conductances::new(&f.net, s.conductances.clone()).unwrap()).unwrap();
            for (a, b) in back.iter().zip(&e) {
                prop_assert!(rel(*a, *b) <= 1e-8);
            }
            let (lo, hi) = (f.u.min(), f.u.max());
            prop_assert!(s.h.iter().enumerate().all(|(v, &x)| f.net.is_boundary(v) || (x > lo && x < hi)));
        }
    }
}

fn random_start(
    net: &Network,
    constraints: &ConstraintSet,
    sigma: &Orientation,
    lengths: &[f64],
    lambda: f64,
) -> Vec<f64> {
    initial_point_with(net, constraints, sigma, &lengths[..net.edge_count()], lambda).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn newton_limit_is_independent_of_the_start(
        f in fixture(),
        w in log_weights(),
        starts in prop::collection::vec((log_weights(), 0.05f64..0.95), 20),
    ) {
        let energies = Energies::new(&f.net, w[..f.net.edge_count()].to_vec()).unwrap();
        let constraints = ConstraintSet::from_boundary(&f.net, &f.u);
        for sigma in enumerate_compatible_orientations(&f.net, &f.u).unwrap() {
            let reference = solve_enharmonic(&f.net, &constraints, &energies, &sigma).unwrap();
            for (lengths, lambda) in &starts {
                let start = random_start(&f.net, &constraints, &sigma, lengths, *lambda);
                let sol = solve_enharmonic_from(&f.net, &constraints, &energies, &sigma, start, SolverOptions::default())
                    .unwrap();
                let gap = sol.h.iter().zip(&reference.h).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                prop_assert!(gap <= 1e-8, "{}: gap {gap:e}", f.name);
            }
        }
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences(f in fixture(), w in log_weights(), lengths in log_weights(), lambda in 0.05f64..0.95) {
        let energies = Energies::new(&f.net, w[..f.net.edge_count()].to_vec()).unwrap();
        let constraints = ConstraintSet::from_boundary(&f.net, &f.u);
        let sigma = enumerate_compatible_orientations(&f.net, &f.u).unwrap().swap_remove(0);
        let h = random_start(&f.net, &constraints, &sigma, &lengths, lambda);
        let free = constraints.free_vertices();
        let grad = residual(&f.net, &constraints, &energies, &h).unwrap();
        let hess = hessian(&f.net, &constraints, &energies, &h).unwrap();
        // keep the step well inside the polytope
        let slack = f.net.differential(&h).iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
        let step = 1e-4 * slack;
        for (k, &v) in free.iter().enumerate() {
            let shifted = |t: f64| {
                let mut g = h.clone();
                g[v] += t;
                g
            };
            let fd = (log_objective(&f.net, &energies, &shifted(step)).unwrap()
                - log_objective(&f.net, &energies, &shifted(-step)).unwrap())
                / (2.0 * step);
            prop_assert!((fd - grad[k]).abs() <= 1e-6 * grad[k].abs().max(1.0), "{fd} vs {}", grad[k]);
            let up = residual(&f.net, &constraints, &energies, &shifted(step)).unwrap();
            let down = residual(&f.net, &constraints, &energies, &shifted(-step)).unwrap();
            for j in 0..free.len() {
                let col = (up[j] - down[j]) / (2.0 * step);
                prop_assert!((col - hess[(j, k)]).abs() <= 1e-4 * hess[(j, k)].abs().max(1.0));
            }
        }
    }

    #[test]
    fn jacobian_is_an_involution_with_signed_determinant(f in fixture(), w in log_weights()) {
        let c = Conductances::new(&f.net, w[..f.net.edge_count()].to_vec()).unwrap();
        let e = psi(&f.net, &f.u, &c).unwrap();
        prop_assume!(e.iter().all(|&x| x > 1e-6));
        let r = jlog_report(&f.net, &f.u, &c).unwrap();
        let interior = f.net.vertex_count() - f.net.boundary().len();
        prop_assert!(r.max_deviation <= 1e-5);
        prop_assert!(r.involution_defect <= 1e-8);
        prop_assert_eq!(r.multiplicity_minus, interior);
        prop_assert_eq!(r.multiplicity_plus, f.net.edge_count() - interior);
        let sign = if interior % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(r.det_predicted * sign > 0.0);
    }

    #[test]
    fn smith_diagram_areas_are_energies(w in log_weights()) {
        let f = make_small_graph();
        let emb = f.embedding().unwrap().unwrap();
        let energies = Energies::new(&f.net, w[..5].to_vec()).unwrap();
        for sol in solve_all(&f.net, &f.u, &energies).unwrap() {
            let d = smith_diagram(&emb, &sol).unwrap();
            prop_assert!(rel(d.width * d.height, energies.total()) <= 1e-9);
            for (k, edge) in f.net.edges().iter().enumerate() {
                let r = d.rects.iter().find(|r| r.id == edge.id).unwrap();
                prop_assert!(rel(r.area(), energies.values()[k]) <= 1e-9);
            }
            prop_assert!(d.max_overlap() <= 1e-9 * energies.total());
        }
    }

    #[test]
    fn small_graph_values_solve_the_exact_quadratic(num in prop::collection::vec(1i64..40, 5), den in prop::collection::vec(1i64..12, 5)) {
        let q: Vec<_> = num.iter().zip(&den).map(|(&n, &d)| rat(n, d)).collect();
        let delta = to_f64(&quadratic_discriminant(&q[0], &q[1], &q[2], &q[3], &q[4]).unwrap());
        let e: Vec<f64> = q.iter().map(to_f64).collect();
        let f = make_small_graph();
        let energies = Energies::new(&f.net, e.clone()).unwrap();
        let x = f.net.vertex_index("x").unwrap();
        let v: Vec<f64> = solve_all(&f.net, &f.u, &energies).unwrap().iter().map(|s| s.h[x]).collect();
        prop_assert_eq!(v.len(), 2);
        // h(x) is a root of A t² + B t + C with B² - 4AC = δ
        let [a, b, c, d, ee] = [e[0], e[1], e[2], e[3], e[4]];
        let s = a + b + c + d + ee;
        let lead = (a + c + d) * s;
        let lin = -(a * c + 2.0 * a * d + a * ee + b * c + b * d + c * c + 3.0 * c * d + c * ee + 2.0 * d * d + 2.0 * d * ee);
        let cst = d * (c + d + ee);
        prop_assert!(rel(v[0] + v[1], -lin / lead) <= 1e-9);
        prop_assert!(rel(v[0] * v[1], cst / lead) <= 1e-9);
        prop_assert!(rel((v[0] - v[1]).powi(2) * lead * lead, delta) <= 1e-9);
    }

    #[test]
    fn star_centres_are_the_prescribed_roots(gaps in prop::collection::vec(2i64..6, 2..5), offsets in prop::collection::vec(1i64..100, 4)) {
        let mut anchors = vec![0i64];
        for g in &gaps {
            anchors.push(anchors.last().unwrap() + g);
        }
        // one rational root strictly inside each gap
        let roots: Vec<_> = anchors
            .windows(2)
            .zip(&offsets)
            .map(|(w, &o)| rat(w[0] * 101 + (w[1] - w[0]) * o, 101))
            .collect();
        let p = RationalPolynomial::from_roots(&roots);
        let exact: Vec<_> = anchors.iter().map(|&a| rat(a, 1)).collect();
        let star = star_energies(&p, &exact).unwrap();
        let fa: Vec<f64> = anchors.iter().map(|&a| a as f64).collect();
        let fe: Vec<f64> = star.energies.iter().map(to_f64).collect();
        let f = make_star(&fa, &fe).unwrap();
        let z = f.net.vertex_index("z").unwrap();
        let mut vals: Vec<f64> = solve_all(&f.net, &f.u, &f.energies).unwrap().iter().map(|s| s.h[z]).collect();
        vals.sort_by(f64::total_cmp);
        prop_assert_eq!(vals.len(), roots.len());
        for (k, (v, r)) in vals.iter().zip(&roots).enumerate() {
            prop_assert!((v - to_f64(r)).abs() <= 1e-10, "{v} vs {r}");
            prop_assert!(*v > fa[k] && *v < fa[k + 1]);
            let balance: f64 = fa.iter().zip(&fe).map(|(a, e)| e / (v - a)).sum();
            prop_assert!(balance.abs() <= 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn grid_solutions_fall_along_south_and_west_steps(n in 2..9usize, unit in any::<bool>()) {
        let energy = if unit { EnergyMode::Unit } else { EnergyMode::EpsSquared };
        let p = square_problem(n, &BoundarySpec::Corners, energy).unwrap();
        let sol = p.solve().unwrap();
        for (i, j) in p.grid.cells.iter().copied() {
            let v = p.grid.vertex_at(i, j).unwrap();
            for (di, dj) in [(-1, 0), (0, -1)] {
                if let Some(w) = p.grid.vertex_at(i + di, j + dj) {
                    prop_assert!(sol.h[v] > sol.h[w]);
                }
            }
        }
    }

    #[test]
    fn linear_boundary_data_is_reproduced(n in 2..12usize, a in 0.2f64..2.0, b in 0.2f64..2.0) {
        let spec = BoundarySpec::Full(std::sync::Arc::new(move |x, y| a * x + b * y));
        let p = square_problem(n, &spec, EnergyMode::EpsSquared).unwrap();
        let sol = p.solve().unwrap();
        for (v, &(x, y)) in p.grid.coords.iter().enumerate() {
            prop_assert!((sol.h[v] - (a * x + b * y)).abs() <= 1e-9);
        }
        prop_assert!(pde_residual(&p.grid, &sol.h, Sampling::AllNodes).unwrap() <= 1e-9);
    }
}

#[test]
fn every_fixture_validates() {
    for f in fixtures() {
        assert!(validate_network(&f.net).is_ok(), "{}", f.name);
    }
}

#[test]
fn conductances_of_inverts_psi_on_a_solution() {
    let f = make_small_graph();
    let constraints = ConstraintSet::from_boundary(&f.net, &f.u);
    for sigma in enumerate_compatible_orientations(&f.net, &f.u).unwrap() {
        let sol = solve_enharmonic(&f.net, &constraints, &f.energies, &sigma).unwrap();
        let c = conductances_of(&f.net, &f.energies, &sol.h).unwrap();
        for e in psi(&f.net, &f.u, &c).unwrap() {
            assert!((e - 1.0).abs() < 1e-9);
        }
    }
}
