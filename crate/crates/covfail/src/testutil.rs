//! Random instance generators shared across the crate's unit tests.

use rand::Rng;

use crate::complex::CommunicationGraph;

/// Random abstract instance: a `k`-gonal fence ring `v1..vk`, `n` interior
/// vertices `u1..un`, and independent edges with probability `p` between
/// every interior-interior and interior-fence pair. Fence chords are added
/// with probability `p / 4` to exercise non-ring fence adjacencies.
pub fn random_fenced_graph<R: Rng>(rng: &mut R, k: usize, n: usize, p: f64) -> CommunicationGraph {
    let mut g = CommunicationGraph::new();
    let fence: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
    for l in &fence {
        g.add_node(l, None, None).unwrap();
    }
    let interior: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
    for l in &interior {
        g.add_node(l, None, None).unwrap();
    }
    for i in 0..k {
        g.add_edge_by_labels(&fence[i], &fence[(i + 1) % k])
            .unwrap();
    }
    for i in 0..k {
        for j in i + 2..k {
            if (i, j) != (0, k - 1) && rng.random_bool(p / 4.0) {
                g.add_edge_by_labels(&fence[i], &fence[j]).unwrap();
            }
        }
    }
    for (i, u) in interior.iter().enumerate() {
        for f in &fence {
            if rng.random_bool(p) {
                g.add_edge_by_labels(u, f).unwrap();
            }
        }
        for w in &interior[i + 1..] {
            if rng.random_bool(p) {
                g.add_edge_by_labels(u, w).unwrap();
            }
        }
    }
    let refs: Vec<&str> = fence.iter().map(|s| s.as_str()).collect();
    g.set_fence_by_labels(&refs).unwrap();
    g
}
