//! Small reference complexes used by tests, examples, and the demo CLI data.
//!
//! All fixtures use a hexagonal (or `k`-gonal) fence labelled `v1..vk` and
//! interior hubs labelled `h`, `a`, `b`. They are built through the ordinary
//! graph pipeline so clique completion is exercised too.

use crate::complex::{build_rips_2skeleton, CommunicationGraph, SimplicialComplex2};

/// A bare fence cycle with no interior: never covered.
pub fn fence_only_graph(k: usize) -> CommunicationGraph {
    assert!(k >= 3);
    let mut g = CommunicationGraph::new();
    let labels: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
    for l in &labels {
        g.add_node(l, None, None).unwrap();
    }
    for i in 0..k {
        g.add_edge_by_labels(&labels[i], &labels[(i + 1) % k])
            .unwrap();
    }
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    g.set_fence_by_labels(&refs).unwrap();
    g
}

pub fn fence_only(k: usize) -> SimplicialComplex2 {
    build_rips_2skeleton(&fence_only_graph(k)).unwrap()
}

/// Fence cycle plus one hub `h` adjacent to every fence vertex: the minimal
/// covered configuration, lost exactly when `h` fails.
pub fn wheel_graph(k: usize) -> CommunicationGraph {
    let mut g = fence_only_graph(k);
    g.add_node("h", None, None).unwrap();
    for i in 1..=k {
        g.add_edge_by_labels(&format!("v{i}"), "h").unwrap();
    }
    g
}

pub fn wheel(k: usize) -> SimplicialComplex2 {
    build_rips_2skeleton(&wheel_graph(k)).unwrap()
}

/// Hexagonal fence with two hubs `a`, `b`, each adjacent to all fence
/// vertices and to each other. Either hub alone covers the domain; coverage
/// needs both to fail, and the two hub cones enclose a 2-sphere.
pub fn pair_graph() -> CommunicationGraph {
    let mut g = fence_only_graph(6);
    g.add_node("a", None, None).unwrap();
    g.add_node("b", None, None).unwrap();
    for i in 1..=6 {
        g.add_edge_by_labels(&format!("v{i}"), "a").unwrap();
        g.add_edge_by_labels(&format!("v{i}"), "b").unwrap();
    }
    g.add_edge_by_labels("a", "b").unwrap();
    g
}

pub fn pair() -> SimplicialComplex2 {
    build_rips_2skeleton(&pair_graph()).unwrap()
}

/// Hexagonal fence with two hubs splitting the disk: `a` sees `v1..v4`, `b`
/// sees `v4, v5, v6, v1`, and the hubs see each other. Both hubs are needed;
/// losing either one is fatal.
pub fn twin_graph() -> CommunicationGraph {
    let mut g = fence_only_graph(6);
    g.add_node("a", None, None).unwrap();
    g.add_node("b", None, None).unwrap();
    for i in [1, 2, 3, 4] {
        g.add_edge_by_labels(&format!("v{i}"), "a").unwrap();
    }
    for i in [4, 5, 6, 1] {
        g.add_edge_by_labels(&format!("v{i}"), "b").unwrap();
    }
    g.add_edge_by_labels("a", "b").unwrap();
    g
}

pub fn twin() -> SimplicialComplex2 {
    build_rips_2skeleton(&twin_graph()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_simplex_counts() {
        let w = wheel(6);
        assert_eq!(
            (w.vertex_count(), w.edge_count(), w.triangle_count()),
            (7, 12, 6)
        );
        let p = pair();
        assert_eq!(
            (p.vertex_count(), p.edge_count(), p.triangle_count()),
            (8, 19, 18)
        );
        let t = twin();
        assert_eq!(
            (t.vertex_count(), t.edge_count(), t.triangle_count()),
            (8, 15, 8)
        );
    }

    #[test]
    fn twin_hub_links_are_cycles() {
        use crate::complex::graph_betti;
        let t = twin();
        let lk_a = t.link(t.id_of("a").unwrap());
        // v1-v2-v3-v4-b-v1: a 5-cycle.
        assert_eq!(lk_a.vertices.len(), 5);
        assert_eq!(lk_a.edges.len(), 5);
        assert_eq!(graph_betti(&lk_a), (1, 1));
        let lk_b = t.link(t.id_of("b").unwrap());
        assert_eq!(graph_betti(&lk_b), (1, 1));
    }
}
