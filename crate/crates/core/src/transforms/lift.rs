//! Lift of a layered instance so that every seed set sits in the bottom layer.
//!
//! Row `i` of the image holds copies `V_{i,1}, …, V_{i,i}` of layers `1..=i`.
//! Copies of one node are chained upward by inner edges `v_{i,j} → v_{i−1,j}`,
//! and the diagonal copies `V_{i,i}` carry the original edges. A seed in layer
//! `j` is placed at `V_{m,j}` and climbs its chain to the diagonal copy.

use std::collections::HashMap;

use super::{LayerAssignment, NodeMap};
use crate::diffusion::{DirectedGraph, GtInstance};
use crate::error::{Error, Result};
use crate::rational::int;
use crate::setfn::{bits, SetFunction};

/// Builds the lifted instance, its layering and the node correspondence.
///
/// Threshold of copy `v_{i,j}` for `i < m`: 1 if the copy directly below is
/// active, otherwise `f_v` of the originals of the active diagonal copies in
/// row `i+1`. Bottom-row thresholds are identically 0.
pub fn lift_layered(
    gt: &GtInstance,
    layers: &LayerAssignment,
) -> Result<(GtInstance, LayerAssignment, NodeMap)> {
    let g = gt.graph();
    layers.check(g)?;
    let m = layers.m();
    if m < 2 {
        return Err(Error::InvalidLayering(format!(
            "lift needs at least 2 layers, got {m}"
        )));
    }
    let n = g.n();
    let mut labels = Vec::new();
    let mut row = Vec::new();
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for i in 1..=m {
        for j in 1..=i {
            for v in bits(layers.nodes_in(j)) {
                index.insert((i, j, v), labels.len());
                labels.push(format!("{}@{i}.{j}", g.label(v)));
                row.push(i);
            }
        }
    }
    let mut edges = Vec::new();
    for (&(i, j, v), &x) in &index {
        if i < m {
            edges.push((index[&(i + 1, j, v)], x));
        }
        if i == j && i < m {
            for u in bits(g.in_mask(v)) {
                edges.push((index[&(i + 1, i + 1, u)], x));
            }
        }
    }
    edges.sort_unstable();
    let image_graph = DirectedGraph::new(labels)?.with_edges(&edges)?;
    let mut origin = vec![(0, 0, 0); index.len()];
    for (&key, &x) in &index {
        origin[x] = key;
    }
    let thresholds = origin
        .iter()
        .enumerate()
        .map(|(x, &(i, j, v))| {
            let ground = image_graph.in_ground(x)?;
            if i == m {
                return Ok(SetFunction::zero(ground));
            }
            let below = index[&(i + 1, j, v)];
            let f = gt.threshold(v);
            Ok(SetFunction::from_fn(ground, |local| {
                let active = image_graph.global(x, local);
                if active >> below & 1 == 1 {
                    return int(1);
                }
                if i != j {
                    return int(0);
                }
                let original = bits(active).fold(0u64, |acc, y| {
                    let (iy, jy, u) = origin[y];
                    if iy == i + 1 && jy == i + 1 {
                        acc | 1 << u
                    } else {
                        acc
                    }
                });
                f.value(g.local(v, original)).clone()
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let image = GtInstance::new(image_graph, thresholds)?;
    let image_layers = LayerAssignment::new(row, m)?;
    image_layers.check(image.graph())?;
    let forward: Vec<usize> = (0..n)
        .map(|v| index[&(layers.layer(v), layers.layer(v), v)])
        .collect();
    let bottom_copy = (0..n).map(|v| index[&(m, layers.layer(v), v)]).collect();
    let kept = forward.iter().fold(0u64, |acc, &x| acc | 1 << x);
    Ok((
        image,
        image_layers,
        NodeMap {
            forward,
            bottom_copy: Some(bottom_copy),
            kept,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::super::{verify_transform, SpreadOracle};
    use super::*;
    use crate::diffusion::{layered_activation, DEFAULT_BUDGET};
    use crate::rational::ratio;
    use crate::setfn::Order;

    /// Layers: {0,1} top, {2} bottom.
    fn two_layer() -> (GtInstance, LayerAssignment) {
        let g = DirectedGraph::anonymous(3)
            .unwrap()
            .with_edges(&[(2, 0), (2, 1)])
            .unwrap();
        let th = vec![
            SetFunction::new(g.in_ground(0).unwrap(), vec![int(0), ratio(1, 3)]).unwrap(),
            SetFunction::new(g.in_ground(1).unwrap(), vec![int(0), ratio(3, 4)]).unwrap(),
            SetFunction::zero(g.in_ground(2).unwrap()),
        ];
        (
            GtInstance::new(g, th).unwrap(),
            LayerAssignment::new(vec![1, 1, 2], 2).unwrap(),
        )
    }

    #[test]
    fn row_sizes() {
        let (gt, layers) = two_layer();
        let (image, il, map) = lift_layered(&gt, &layers).unwrap();
        assert_eq!(il.nodes_in(1).count_ones(), 2);
        assert_eq!(il.nodes_in(2).count_ones(), 3);
        assert_eq!(image.n(), 5);
        assert_eq!(map.kept.count_ones(), 3);
        for v in 0..3 {
            assert_eq!(il.layer(map.bottom_copy.as_ref().unwrap()[v]), 2);
        }
    }

    #[test]
    fn off_diagonal_copy_follows_below() {
        let (gt, layers) = two_layer();
        let (image, _, _) = lift_layered(&gt, &layers).unwrap();
        assert!(image.thresholds().iter().all(SetFunction::is_threshold));
        let g = DirectedGraph::anonymous(3)
            .unwrap()
            .with_edges(&[(2, 1), (1, 0)])
            .unwrap();
        let th = vec![
            SetFunction::new(g.in_ground(0).unwrap(), vec![int(0), ratio(1, 2)]).unwrap(),
            SetFunction::new(g.in_ground(1).unwrap(), vec![int(0), ratio(2, 3)]).unwrap(),
            SetFunction::zero(g.in_ground(2).unwrap()),
        ];
        let gt = GtInstance::new(g, th).unwrap();
        let layers = LayerAssignment::new(vec![1, 2, 3], 3).unwrap();
        let (image, _, _) = lift_layered(&gt, &layers).unwrap();
        let x = image.graph().index_of("0@2.1").unwrap();
        assert_eq!(image.graph().in_degree(x), 1);
        assert_eq!(image.threshold(x).values(), &[int(0), int(1)]);
    }

    #[test]
    fn spread_identity_and_bottom_seeds() {
        let (gt, layers) = two_layer();
        let (image, il, map) = lift_layered(&gt, &layers).unwrap();
        let seeds: Vec<u64> = (0..8).collect();
        let r = verify_transform(
            &gt,
            &image,
            &map,
            &seeds,
            Order::Infinity,
            SpreadOracle::Breakpoint,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(r.spreads_agree(), "{r}");
        assert!(r.locally_adk());
        let s = map.map_seeds(0b011);
        assert_eq!(s & !il.nodes_in(2), 0);
        let total = (0..image.n())
            .filter(|&u| map.kept >> u & 1 == 1)
            .map(|u| layered_activation(&image, &il, s, u).unwrap())
            .fold(int(0), |a, b| a + b);
        assert_eq!(total, r.comparisons[3].original);
    }

    #[test]
    fn single_layer_rejected() {
        let g = DirectedGraph::anonymous(2).unwrap();
        let th = (0..2)
            .map(|v| SetFunction::zero(g.in_ground(v).unwrap()))
            .collect();
        let gt = GtInstance::new(g, th).unwrap();
        let layers = LayerAssignment::new(vec![1, 1], 1).unwrap();
        assert!(matches!(
            lift_layered(&gt, &layers),
            Err(Error::InvalidLayering(_))
        ));
    }
}
