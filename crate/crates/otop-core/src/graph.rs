//! Travel-matrix builders and network transformations.
//!
//! Three input styles are supported: Euclidean point sets (complete graphs),
//! explicit matrices, and road-network edge lists (incomplete graphs with
//! [`UNREACHABLE`] marking absent arcs). [`metric_closure`] completes an
//! incomplete matrix with shortest-path costs so that routes may pass through
//! intermediate nodes; traversal of an intermediate node does not count as a
//! visit — only explicit route membership does.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::math;
use crate::model::{Point, PoiId, TravelMatrix, UNREACHABLE};

/// One arc of an edge list. Undirected edges fill both directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub cost: f64,
    pub directed: bool,
}

impl Edge {
    pub fn undirected(from: usize, to: usize, cost: f64) -> Self {
        Edge { from, to, cost, directed: false }
    }

    pub fn directed(from: usize, to: usize, cost: f64) -> Self {
        Edge { from, to, cost, directed: true }
    }
}

/// An arc that carries a reward, to be transferred onto an artificial
/// midpoint node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RewardArc {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Result of [`augment_arcs`]: the grown network plus per-node weights.
/// Original nodes keep weight zero; `arc_nodes[a]` is the id of the node
/// created for `reward_arcs[a]`.
#[derive(Clone, Debug)]
pub struct AugmentedNetwork {
    pub travel: TravelMatrix,
    pub weights: Vec<f64>,
    pub positions: Option<Vec<Point>>,
    pub arc_nodes: Vec<PoiId>,
}

/// Complete symmetric matrix of straight-line distances.
pub fn euclidean_matrix(points: &[Point]) -> TravelMatrix {
    let n = points.len();
    let mut m = TravelMatrix::filled(n, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = points[i][0] - points[j][0];
            let dy = points[i][1] - points[j][1];
            let d = math::sqrt(dx * dx + dy * dy);
            m.set(i, j, d);
            m.set(j, i, d);
        }
    }
    m
}

/// Matrix from an edge list: listed arcs get their cost, everything else is
/// [`UNREACHABLE`], the diagonal is zero. Listing the same arc twice with a
/// different cost is an error.
pub fn from_edge_list(n: usize, edges: &[Edge]) -> Result<TravelMatrix, GraphError> {
    let mut m = TravelMatrix::filled(n, UNREACHABLE);
    let mut apply = |from: usize, to: usize, cost: f64| -> Result<(), GraphError> {
        let existing = m.cost(from, to);
        if existing.is_finite() && existing != cost {
            return Err(GraphError::ConflictingArc { from, to, first: existing, second: cost });
        }
        m.set(from, to, cost);
        Ok(())
    };
    for edge in edges {
        if edge.from >= n || edge.to >= n {
            return Err(GraphError::NodeOutOfRange { from: edge.from, to: edge.to, nodes: n });
        }
        if edge.cost.is_nan() || edge.cost < 0.0 || edge.cost.is_infinite() {
            return Err(GraphError::BadCost { from: edge.from, to: edge.to, cost: edge.cost });
        }
        if edge.from == edge.to {
            if edge.cost != 0.0 {
                return Err(GraphError::SelfLoop { node: edge.from, cost: edge.cost });
            }
            continue;
        }
        apply(edge.from, edge.to, edge.cost)?;
        if !edge.directed {
            apply(edge.to, edge.from, edge.cost)?;
        }
    }
    Ok(m)
}

/// All-pairs shortest-path completion. Pairs with no connecting path stay
/// [`UNREACHABLE`]. Idempotent; never increases an entry.
pub fn metric_closure(matrix: &TravelMatrix) -> TravelMatrix {
    let n = matrix.n();
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && matrix.is_reachable(i, j) {
                adjacency[i].push((j, matrix.cost(i, j)));
            }
        }
    }

    let mut closed = TravelMatrix::filled(n, UNREACHABLE);
    let mut dist = vec![UNREACHABLE; n];
    for source in 0..n {
        dist.fill(UNREACHABLE);
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry { cost: 0.0, node: source });
        while let Some(HeapEntry { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            for &(next, leg) in &adjacency[node] {
                let candidate = cost + leg;
                if candidate < dist[next] {
                    dist[next] = candidate;
                    heap.push(HeapEntry { cost: candidate, node: next });
                }
            }
        }
        for (target, &d) in dist.iter().enumerate() {
            if target != source {
                closed.set(source, target, d);
            }
        }
    }
    closed
}

/// Min-heap entry for the label-setting search; costs are finite and never
/// NaN.
#[derive(Clone, Copy, Debug)]
struct HeapEntry {
    cost: f64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reverse for a min-heap; break ties on node id for determinism.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Moves arc rewards onto artificial midpoint nodes.
///
/// For every reward arc `(i, j)` a node `k` is appended with
/// `t(i,k) = t(k,j) = t(i,j)/2` and the arc's weight; if the network also has
/// the reverse arc at equal cost the split is mirrored, so undirected roads
/// stay traversable in both directions through `k`. With `keep_original` the
/// direct arc survives in parallel (same total cost), so routes that skip the
/// reward are unaffected; otherwise it is deleted.
pub fn augment_arcs(
    network: &TravelMatrix,
    positions: Option<&[Point]>,
    reward_arcs: &[RewardArc],
    keep_original: bool,
) -> Result<AugmentedNetwork, GraphError> {
    let n = network.n();
    if let Some(p) = positions {
        debug_assert_eq!(p.len(), n);
    }
    for arc in reward_arcs {
        if arc.from >= n || arc.to >= n {
            return Err(GraphError::NodeOutOfRange { from: arc.from, to: arc.to, nodes: n });
        }
        if !network.is_reachable(arc.from, arc.to) || arc.from == arc.to {
            return Err(GraphError::MissingArc { from: arc.from, to: arc.to });
        }
        if arc.weight.is_nan() || arc.weight < 0.0 {
            return Err(GraphError::BadWeight { from: arc.from, to: arc.to, weight: arc.weight });
        }
    }

    let total = n + reward_arcs.len();
    let mut grown = TravelMatrix::filled(total, UNREACHABLE);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                grown.set(i, j, network.cost(i, j));
            }
        }
    }

    let mut weights = vec![0.0; total];
    let mut new_positions = positions.map(|p| p.to_vec());
    let mut arc_nodes = Vec::with_capacity(reward_arcs.len());
    for (index, arc) in reward_arcs.iter().enumerate() {
        let k = n + index;
        let half = network.cost(arc.from, arc.to) / 2.0;
        grown.set(arc.from, k, half);
        grown.set(k, arc.to, half);
        let reverse = network.cost(arc.to, arc.from);
        let mirrored = reverse.is_finite() && reverse == network.cost(arc.from, arc.to);
        if mirrored {
            grown.set(arc.to, k, half);
            grown.set(k, arc.from, half);
        }
        if !keep_original {
            grown.set(arc.from, arc.to, UNREACHABLE);
            if mirrored {
                grown.set(arc.to, arc.from, UNREACHABLE);
            }
        }
        weights[k] = arc.weight;
        if let Some(pos) = new_positions.as_mut() {
            let a = pos[arc.from];
            let b = pos[arc.to];
            pos.push([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]);
        }
        arc_nodes.push(k);
    }

    Ok(AugmentedNetwork { travel: grown, weights, positions: new_positions, arc_nodes })
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    NodeOutOfRange { from: usize, to: usize, nodes: usize },
    BadCost { from: usize, to: usize, cost: f64 },
    SelfLoop { node: usize, cost: f64 },
    ConflictingArc { from: usize, to: usize, first: f64, second: f64 },
    MissingArc { from: usize, to: usize },
    BadWeight { from: usize, to: usize, weight: f64 },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::NodeOutOfRange { from, to, nodes } => {
                write!(f, "arc ({from},{to}) references a node outside 0..{nodes}")
            }
            GraphError::BadCost { from, to, cost } => {
                write!(f, "arc ({from},{to}) cost must be non-negative and finite, got {cost}")
            }
            GraphError::SelfLoop { node, cost } => {
                write!(f, "self-loop on node {node} with nonzero cost {cost}")
            }
            GraphError::ConflictingArc { from, to, first, second } => {
                write!(f, "arc ({from},{to}) listed twice with conflicting costs {first} and {second}")
            }
            GraphError::MissingArc { from, to } => {
                write!(f, "reward arc ({from},{to}) does not exist in the network")
            }
            GraphError::BadWeight { from, to, weight } => {
                write!(f, "reward arc ({from},{to}) weight must be non-negative, got {weight}")
            }
        }
    }
}

impl core::error::Error for GraphError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_345_triangle() {
        let m = euclidean_matrix(&[[0.0, 0.0], [3.0, 4.0]]);
        assert_eq!(m.cost(0, 1), 5.0);
        assert_eq!(m.cost(1, 0), 5.0);
        assert_eq!(m.cost(0, 0), 0.0);
    }

    #[test]
    fn euclidean_single_point() {
        let m = euclidean_matrix(&[[2.0, 3.0]]);
        assert_eq!(m.n(), 1);
        assert_eq!(m.cost(0, 0), 0.0);
    }

    #[test]
    fn euclidean_triangle_inequality() {
        let pts = [[0.0, 0.0], [7.0, 1.0], [3.0, 9.0]];
        let m = euclidean_matrix(&pts);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!(m.cost(i, j) <= m.cost(i, k) + m.cost(k, j) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn edge_list_examples() {
        let m = from_edge_list(3, &[Edge::undirected(0, 1, 2.0)]).unwrap();
        assert_eq!(m.cost(0, 1), 2.0);
        assert_eq!(m.cost(1, 0), 2.0);
        assert_eq!(m.cost(0, 2), UNREACHABLE);
        assert_eq!(m.cost(1, 2), UNREACHABLE);

        let empty = from_edge_list(2, &[]).unwrap();
        assert_eq!(empty.cost(0, 1), UNREACHABLE);
        assert_eq!(empty.cost(0, 0), 0.0);

        let directed = from_edge_list(2, &[Edge::directed(0, 1, 2.0)]).unwrap();
        assert_eq!(directed.cost(0, 1), 2.0);
        assert_eq!(directed.cost(1, 0), UNREACHABLE);
    }

    #[test]
    fn edge_list_rejects_conflicts() {
        let err = from_edge_list(2, &[Edge::directed(0, 1, 2.0), Edge::directed(0, 1, 3.0)]);
        assert!(matches!(err, Err(GraphError::ConflictingArc { .. })));
        // Same cost twice is fine.
        assert!(from_edge_list(2, &[Edge::directed(0, 1, 2.0), Edge::undirected(1, 0, 2.0)]).is_ok());
        assert!(matches!(
            from_edge_list(2, &[Edge::directed(0, 5, 1.0)]),
            Err(GraphError::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn closure_chain() {
        let m = from_edge_list(
            3,
            &[Edge::undirected(0, 1, 2.0), Edge::undirected(1, 2, 3.0)],
        )
        .unwrap();
        let closed = metric_closure(&m);
        assert_eq!(closed.cost(0, 2), 5.0);
        assert_eq!(closed.cost(2, 0), 5.0);
        assert_eq!(closed.cost(0, 1), 2.0);
    }

    #[test]
    fn closure_leaves_euclidean_unchanged() {
        let m = euclidean_matrix(&[[0.0, 0.0], [5.0, 1.0], [2.0, 8.0], [9.0, 9.0]]);
        let closed = metric_closure(&m);
        for i in 0..4 {
            for j in 0..4 {
                assert!((closed.cost(i, j) - m.cost(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closure_keeps_disconnected_pairs_unreachable() {
        let m = from_edge_list(4, &[Edge::undirected(0, 1, 1.0), Edge::undirected(2, 3, 1.0)]).unwrap();
        let closed = metric_closure(&m);
        assert_eq!(closed.cost(0, 2), UNREACHABLE);
        assert_eq!(closed.cost(3, 1), UNREACHABLE);
        assert_eq!(closed.cost(0, 1), 1.0);
    }

    #[test]
    fn closure_is_idempotent() {
        let m = from_edge_list(
            5,
            &[
                Edge::undirected(0, 1, 2.0),
                Edge::undirected(1, 2, 2.5),
                Edge::undirected(2, 3, 1.0),
                Edge::directed(3, 4, 4.0),
                Edge::undirected(0, 4, 9.0),
            ],
        )
        .unwrap();
        let once = metric_closure(&m);
        let twice = metric_closure(&once);
        for i in 0..5 {
            for j in 0..5 {
                assert!((twice.cost(i, j) - once.cost(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn augment_splits_arc_and_transfers_weight() {
        let m = from_edge_list(2, &[Edge::undirected(0, 1, 10.0)]).unwrap();
        let out = augment_arcs(&m, None, &[RewardArc { from: 0, to: 1, weight: 4.0 }], true).unwrap();
        let k = out.arc_nodes[0];
        assert_eq!(k, 2);
        assert_eq!(out.travel.cost(0, k), 5.0);
        assert_eq!(out.travel.cost(k, 1), 5.0);
        assert_eq!(out.travel.cost(1, k), 5.0);
        assert_eq!(out.travel.cost(k, 0), 5.0);
        assert_eq!(out.weights, vec![0.0, 0.0, 4.0]);
        // Original arc kept, and the split path matches its cost.
        assert_eq!(out.travel.cost(0, 1), 10.0);
        let closed = metric_closure(&out.travel);
        assert_eq!(closed.cost(0, 1), 10.0);
    }

    #[test]
    fn augment_without_arcs_only_zeroes_weights() {
        let m = from_edge_list(3, &[Edge::undirected(0, 1, 1.0), Edge::undirected(1, 2, 1.0)]).unwrap();
        let out = augment_arcs(&m, None, &[], true).unwrap();
        assert_eq!(out.travel, m);
        assert_eq!(out.weights, vec![0.0; 3]);
        assert!(out.arc_nodes.is_empty());
    }

    #[test]
    fn augment_rejects_unknown_arc() {
        let m = from_edge_list(3, &[Edge::undirected(0, 1, 1.0)]).unwrap();
        let err = augment_arcs(&m, None, &[RewardArc { from: 0, to: 2, weight: 1.0 }], true);
        assert_eq!(err.err(), Some(GraphError::MissingArc { from: 0, to: 2 }));
    }

    #[test]
    fn augment_can_drop_the_original_arc() {
        let m = from_edge_list(2, &[Edge::undirected(0, 1, 10.0)]).unwrap();
        let out = augment_arcs(&m, None, &[RewardArc { from: 0, to: 1, weight: 1.0 }], false).unwrap();
        assert_eq!(out.travel.cost(0, 1), UNREACHABLE);
        // Path through the midpoint still restores the distance.
        let closed = metric_closure(&out.travel);
        assert_eq!(closed.cost(0, 1), 10.0);
    }

    #[test]
    fn augment_directed_arc_splits_one_direction() {
        let m = from_edge_list(2, &[Edge::directed(0, 1, 8.0), Edge::directed(1, 0, 3.0)]).unwrap();
        let out = augment_arcs(&m, None, &[RewardArc { from: 0, to: 1, weight: 2.0 }], true).unwrap();
        let k = out.arc_nodes[0];
        assert_eq!(out.travel.cost(0, k), 4.0);
        assert_eq!(out.travel.cost(k, 1), 4.0);
        assert_eq!(out.travel.cost(1, k), UNREACHABLE);
        assert_eq!(out.travel.cost(k, 0), UNREACHABLE);
        assert_eq!(out.travel.cost(1, 0), 3.0);
    }

    #[test]
    fn augment_keeps_midpoint_positions() {
        let m = from_edge_list(2, &[Edge::undirected(0, 1, 10.0)]).unwrap();
        let pos = [[0.0, 0.0], [10.0, 4.0]];
        let out = augment_arcs(&m, Some(&pos), &[RewardArc { from: 0, to: 1, weight: 1.0 }], true).unwrap();
        assert_eq!(out.positions.unwrap()[2], [5.0, 2.0]);
    }
}
