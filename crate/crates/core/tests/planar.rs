use enharmonic::enharmonic::{solve_all, EnharmonicSolution};
use enharmonic::gallery::{make_path, make_small_graph, small_graph_tiling};
use enharmonic::planar::*;
use enharmonic::{Energies, Network};

fn small_graph_solutions() -> (PlanarEmbedding, Vec<EnharmonicSolution>) {
    let f = make_small_graph();
    let emb = f.embedding().unwrap().unwrap();
    let sols = solve_all(&f.net, &f.u, &f.energies).unwrap();
    (emb, sols)
}

#[test]
fn single_edge_dual_has_two_arcs_and_no_faces() {
    let net = Network::from_ids(&["a", "b"], &[("e", "a", "b")], &["a", "b"]).unwrap();
    let emb = PlanarEmbedding::new(&net, vec![vec![0], vec![0]]).unwrap();
    let dual = build_dual(&emb).unwrap();
    assert_eq!(dual.bounded_faces.len(), 0);
    assert_eq!(dual.arcs.len(), 2);
    assert_ne!(dual.left[0], dual.right[0]);
}

#[test]
fn path_dual_matches_single_edge_shape() {
    let f = make_path(2).unwrap();
    let dual = build_dual(&f.embedding().unwrap().unwrap()).unwrap();
    assert_eq!((dual.bounded_faces.len(), dual.arcs.len()), (0, 2));
    // both edges separate the same two arcs
    assert_eq!(dual.left[0], dual.left[1]);
    assert_eq!(dual.right[0], dual.right[1]);
}

#[test]
fn small_graph_dual() {
    let (emb, _) = small_graph_solutions();
    assert_eq!(emb.faces().len(), 3);
    let dual = build_dual(&emb).unwrap();
    assert_eq!((dual.bounded_faces.len(), dual.arcs.len()), (2, 2));
    assert_eq!(dual.vertex_label(0), "f0");
    assert_eq!(dual.vertex_label(3), "arc1");
    let c = emb.network().edge_index("c").unwrap();
    assert!(dual.left[c] < 2 && dual.right[c] < 2);
}

#[test]
fn boundary_off_the_outer_face_is_rejected() {
    // wheel-like: boundary vertex m sits inside the triangle a b c
    let net = Network::from_ids(
        &["a", "b", "c", "m"],
        &[("ab", "a", "b"), ("bc", "b", "c"), ("ca", "c", "a"), ("am", "a", "m"), ("bm", "b", "m"), ("cm", "c", "m")],
        &["a", "m"],
    )
    .unwrap();
    let coords = [(0.0, 0.0), (2.0, 0.0), (1.0, 2.0), (1.0, 0.7)];
    let err = PlanarEmbedding::from_coordinates(&net, &coords).unwrap_err();
    assert_eq!(err.name(), "BoundaryNotOnOuterFace");
}

#[test]
fn conjugate_jump_across_middle_edge_is_root_five() {
    let (emb, sols) = small_graph_solutions();
    let c = emb.network().edge_index("c").unwrap();
    for sol in &sols {
        let (dual, g) = conjugate(&emb, sol).unwrap();
        let jump = (g.g[dual.right[c]] - g.g[dual.left[c]]).abs();
        assert!((jump - 5f64.sqrt()).abs() < 1e-10, "{jump}");
        assert_eq!(g.g[g.base], 0.0);
        assert!(g.g.iter().all(|&x| x >= -1e-12));
    }
}

#[test]
fn perturbed_potential_is_not_integrable() {
    let (emb, sols) = small_graph_solutions();
    let dual = build_dual(&emb).unwrap();
    let mut h = sols[0].h.clone();
    let x = emb.network().vertex_index("x").unwrap();
    h[x] += 1e-3;
    let energies = Energies::uniform(emb.network(), 1.0).unwrap();
    let err = conjugate_with(&emb, &dual, &h, &energies, dual.arc_vertex(0)).unwrap_err();
    assert_eq!(err.name(), "NotIntegrable");
}

#[test]
fn smith_diagram_of_small_graph() {
    let (emb, sols) = small_graph_solutions();
    let s5 = 5f64.sqrt();
    for sol in &sols {
        let d = smith_diagram(&emb, sol).unwrap();
        assert_eq!(d.rects.len(), 5);
        assert!((d.width - 5.0).abs() < 1e-9 && (d.height - 1.0).abs() < 1e-12);
        for r in &d.rects {
            assert!((r.area() - 1.0).abs() < 1e-9, "{r:?}");
        }
        assert!(d.max_overlap() < 1e-9);
        let levels = d.horizontal_levels(1e-9);
        let expected = [0.0, 0.5 - s5 / 10.0, 0.5 + s5 / 10.0, 1.0];
        assert_eq!(levels.len(), 4);
        for (a, b) in levels.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn diagram_round_trips_through_tiling() {
    let (emb, sols) = small_graph_solutions();
    let mut sigs = Vec::new();
    for sol in &sols {
        let d = smith_diagram(&emb, sol).unwrap();
        let tn = tiling_to_network(&RectTiling::from_diagram(&d).unwrap(), CrossPolicy::Reject).unwrap();
        let sig = tn.signature();
        assert_eq!(sig, network_signature(emb.network(), &sol.h));
        sigs.push(sig);
    }
    assert_ne!(sigs[0], sigs[1]);
}

fn tile(id: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> Tile {
    Tile { id: id.into(), x0, y0, x1, y1 }
}

#[test]
fn single_tile_is_one_edge() {
    let t = RectTiling::new([0.0, 0.0, 2.0, 1.0], vec![tile("t", 0.0, 0.0, 2.0, 1.0)]).unwrap();
    let tn = tiling_to_network(&t, CrossPolicy::Reject).unwrap();
    assert_eq!((tn.net.vertex_count(), tn.net.edge_count()), (2, 1));
    assert_eq!(tn.energies.values(), &[2.0]);
}

#[test]
fn side_by_side_tiles_are_parallel_edges() {
    let t = RectTiling::new(
        [0.0, 0.0, 3.0, 1.0],
        vec![tile("l", 0.0, 0.0, 1.0, 1.0), tile("r", 1.0, 0.0, 3.0, 1.0)],
    )
    .unwrap();
    let tn = tiling_to_network(&t, CrossPolicy::Reject).unwrap();
    assert_eq!((tn.net.vertex_count(), tn.net.edge_count()), (2, 2));
    let d = retile_with_areas(&t, &[1.0, 1.0], CrossPolicy::Reject).unwrap();
    assert!((d.width - 2.0).abs() < 1e-9);
    for r in &d.rects {
        assert!((r.width() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn stacked_tiles_share_their_width() {
    let t = RectTiling::new(
        [0.0, 0.0, 1.0, 1.0],
        vec![tile("lo", 0.0, 0.0, 1.0, 0.5), tile("hi", 0.0, 0.5, 1.0, 1.0)],
    )
    .unwrap();
    let d = retile_with_areas(&t, &[1.0, 3.0], CrossPolicy::Reject).unwrap();
    assert!((d.width - 4.0).abs() < 1e-9);
    let lo = d.rects.iter().find(|r| r.id == "lo").unwrap();
    let hi = d.rects.iter().find(|r| r.id == "hi").unwrap();
    assert!((lo.height() - 0.25).abs() < 1e-9 && (hi.height() - 0.75).abs() < 1e-9);
    assert!((lo.y0 - 0.0).abs() < 1e-12);
}

#[test]
fn four_tiles_meeting_at_a_point() {
    let t = RectTiling::new(
        [0.0, 0.0, 2.0, 2.0],
        vec![
            tile("sw", 0.0, 0.0, 1.0, 1.0),
            tile("se", 1.0, 0.0, 2.0, 1.0),
            tile("nw", 0.0, 1.0, 1.0, 2.0),
            tile("ne", 1.0, 1.0, 2.0, 2.0),
        ],
    )
    .unwrap();
    let err = tiling_to_network(&t, CrossPolicy::Reject).unwrap_err();
    assert_eq!(err, enharmonic::Error::CrossPoint { x: 1.0, y: 1.0 });
    let split = tiling_to_network(&t, CrossPolicy::HorizontalSplit).unwrap();
    assert_eq!(split.net.vertex_count(), 4);
    let merged = tiling_to_network(&t, CrossPolicy::VerticalSplit).unwrap();
    assert_eq!(merged.net.vertex_count(), 3);
}

#[test]
fn invalid_tilings_are_rejected() {
    let overlap = RectTiling::new(
        [0.0, 0.0, 2.0, 1.0],
        vec![tile("a", 0.0, 0.0, 1.2, 1.0), tile("b", 0.8, 0.0, 2.0, 1.0)],
    );
    assert_eq!(overlap.unwrap_err().name(), "NotATiling");
    let gap = RectTiling::new([0.0, 0.0, 2.0, 1.0], vec![tile("a", 0.0, 0.0, 1.0, 1.0)]);
    assert_eq!(gap.unwrap_err().name(), "NotATiling");
}

#[test]
fn hand_drawn_tiling_retiles_to_the_solved_diagram() {
    let t = small_graph_tiling();
    let d = retile_with_areas(&t, &[1.0; 5], CrossPolicy::Reject).unwrap();
    let (emb, sols) = small_graph_solutions();
    let x = emb.network().vertex_index("x").unwrap();
    let sol = sols.iter().find(|s| s.h[x] > 0.5).unwrap();
    let target = smith_diagram(&emb, sol).unwrap();
    for r in &d.rects {
        let q = target.rects.iter().find(|q| q.id == r.id).unwrap();
        let nx = |v: f64, dd: &SmithDiagram| (v - dd.x0) / dd.width;
        let ny = |v: f64, dd: &SmithDiagram| (v - dd.y0) / dd.height;
        assert!((nx(r.x0, &d) - nx(q.x0, &target)).abs() < 1e-9, "{r:?} {q:?}");
        assert!((nx(r.x1, &d) - nx(q.x1, &target)).abs() < 1e-9);
        assert!((ny(r.y0, &d) - ny(q.y0, &target)).abs() < 1e-9);
        assert!((ny(r.y1, &d) - ny(q.y1, &target)).abs() < 1e-9);
    }
}

#[test]
fn svg_is_deterministic_and_flipped() {
    let (emb, sols) = small_graph_solutions();
    let d = smith_diagram(&emb, &sols[0]).unwrap();
    let opts = SvgOptions { unit_square: true, labels: true };
    let a = render_svg(&d, opts);
    assert_eq!(a, render_svg(&d.clone(), opts));
    assert!(a.starts_with("<?xml"));
    assert!(a.contains("version=\"1.1\""));
    assert_eq!(a.matches("<rect").count(), 5);
    // a tile touching the top of the diagram is drawn at y = 0
    let top = d.rects.iter().find(|r| (r.y1 - 1.0).abs() < 1e-12).unwrap();
    let line = a.lines().find(|l| l.contains(&format!("id=\"{}\"", top.id))).unwrap();
    assert!(line.contains("y=\"0\""), "{line}");
}
