//! DAG layering and the dummy-node reduction to a layered instance.

use super::{LayerAssignment, NodeMap};
use crate::diffusion::{node_mask, DirectedGraph, GtInstance};
use crate::error::{Error, Result};
use crate::setfn::{bits, SetFunction};

/// Peels in-degree-0 nodes repeatedly; the first peel is the deepest layer.
pub fn dag_layering(g: &DirectedGraph) -> Result<LayerAssignment> {
    let n = g.n();
    let mut remaining = node_mask(n);
    let mut peels: Vec<u64> = Vec::new();
    while remaining != 0 {
        let peel = bits(remaining).fold(0u64, |m, v| {
            if g.in_mask(v) & remaining == 0 {
                m | 1 << v
            } else {
                m
            }
        });
        if peel == 0 {
            return Err(Error::NotDag {
                cycle: find_cycle(g, remaining),
            });
        }
        peels.push(peel);
        remaining &= !peel;
    }
    let m = peels.len().max(1);
    let mut layers = vec![0; n];
    for (depth, peel) in peels.iter().enumerate() {
        for v in bits(*peel) {
            layers[v] = m - depth;
        }
    }
    LayerAssignment::new(layers, m)
}

/// Walks in-edges inside `remaining`, where every node has an in-neighbour,
/// until a node repeats; returns the cycle in edge direction.
fn find_cycle(g: &DirectedGraph, remaining: u64) -> Vec<usize> {
    let mut path = vec![remaining.trailing_zeros() as usize];
    loop {
        let cur = *path.last().expect("nonempty path");
        let prev = (g.in_mask(cur) & remaining).trailing_zeros() as usize;
        if let Some(pos) = path.iter().position(|&x| x == prev) {
            let mut cycle = path[pos..].to_vec();
            cycle.reverse();
            return cycle;
        }
        path.push(prev);
    }
}

/// Layered instance equivalent to a DAG instance.
///
/// Each edge spanning `q ≥ 2` layers is replaced by its own chain of `q−1`
/// dummy nodes with OR thresholds. Original nodes keep their indices and see
/// the last dummy of a chain in place of its source. Dummies are appended.
pub fn dag_to_layered(gt: &GtInstance) -> Result<(GtInstance, LayerAssignment, NodeMap)> {
    let g = gt.graph();
    let n = g.n();
    let layering = dag_layering(g)?;
    let mut labels: Vec<String> = g.labels().to_vec();
    let mut layer_of: Vec<usize> = layering.layers().to_vec();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // Per original node, the image in-neighbour standing in for each original in-neighbour.
    let mut stand_in: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (u, v) in g.edges() {
        let span = layering.layer(u) - layering.layer(v);
        let mut prev = u;
        for step in 1..span {
            let d = labels.len();
            labels.push(format!("{}~{}.{}", g.label(u), g.label(v), step));
            layer_of.push(layering.layer(u) - step);
            edges.push((prev, d));
            prev = d;
        }
        edges.push((prev, v));
        stand_in[v].push((u, prev));
    }
    let total = labels.len();
    let image_graph = DirectedGraph::new(labels)?.with_edges(&edges)?;
    let mut thresholds = Vec::with_capacity(total);
    for v in 0..total {
        let ground = image_graph.in_ground(v)?;
        let Some(sources) = stand_in.get(v) else {
            thresholds.push(SetFunction::or(ground));
            continue;
        };
        let f = gt.threshold(v);
        let table = SetFunction::from_fn(ground, |local| {
            let active = image_graph.global(v, local);
            let original = sources
                .iter()
                .filter(|(_, img)| active >> img & 1 == 1)
                .fold(0u64, |m, (u, _)| m | 1 << u);
            f.value(g.local(v, original)).clone()
        });
        thresholds.push(table);
    }
    let image = GtInstance::new(image_graph, thresholds)?;
    let layers = LayerAssignment::new(layer_of, layering.m())?;
    layers.check(image.graph())?;
    let map = NodeMap {
        forward: (0..n).collect(),
        bottom_copy: None,
        kept: node_mask(n),
    };
    Ok((image, layers, map))
}
