//! Wall crossing, flop matrices, chambers and comparison maps.
//!
//! Flops act on [`Chart`]s: flopping the curve with label `c` sitting at node
//! `i` moves the label to the node `ι_{I+i}(i)`. Coordinates are always in
//! label order, so the flopped curve keeps its coordinate position and the
//! matrices take the shape `e_k ↦ e_k + λ_k e_i`, `e_i ↦ -e_i`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dynkin::{DynkinDiagram, NodeSubset, WeylElement};
use crate::error::{FlopError, Result};
use crate::linalg::IntMatrix;
use crate::restriction::{Chart, Curve};

pub const DEFAULT_CHAMBER_LIMIT: usize = 1_000_000;

/// The combinatorial part of a flop: `ω_i(I) = I + i - ι_{I+i}(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallCrossing {
    pub source: NodeSubset,
    pub node: usize,
    pub target: NodeSubset,
    /// `ι_{I+i}(i)`, the node of the flopped curve.
    pub new_node: usize,
}

pub fn omega(d: &DynkinDiagram, subset: &NodeSubset, i: usize) -> Result<WallCrossing> {
    d.check_subset(subset)?;
    d.check_node(i)?;
    if subset.contains(i) {
        return Err(FlopError::InvalidCurve(i));
    }
    let gamma = subset.with(i);
    let iota = d.dynkin_involution(&gamma)?;
    let new_node = iota[&i];
    Ok(WallCrossing {
        source: subset.clone(),
        node: i,
        target: gamma.without(new_node),
        new_node,
    })
}

/// `M_i` maps classes of the flopped side to classes of the original side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopMatrix {
    pub forward: IntMatrix,
    pub inverse: IntMatrix,
    /// `N_i`, the transpose of `M_i^{-1}`, acting on divisor coordinates.
    pub dual: IntMatrix,
}

/// A single flop between two charts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlopStep {
    pub label: usize,
    pub node: usize,
    pub new_node: usize,
    pub source: Chart,
    pub target: Chart,
    pub matrix: FlopMatrix,
    /// `λ_k` for every other label `k`.
    pub lambda: BTreeMap<usize, i64>,
}

impl FlopStep {
    pub fn wall_crossing(&self) -> WallCrossing {
        WallCrossing {
            source: self.source.subset().clone(),
            node: self.node,
            target: self.target.subset().clone(),
            new_node: self.new_node,
        }
    }

    /// Coordinate position of the flopped curve.
    pub fn position(&self) -> usize {
        self.source
            .position_of_label(self.label)
            .expect("a flop step carries its own label")
    }
}

pub(crate) fn node_column(w: &WeylElement, node: usize, rows: &[usize]) -> Vec<i64> {
    let col = w.image_of_simple(node);
    rows.iter().map(|&r| col.0[r - 1]).collect()
}

/// Flops `chart` at the curve with the given label.
pub fn flop(d: &DynkinDiagram, chart: &Chart, label: usize) -> Result<FlopStep> {
    let node = chart.node_of(label).ok_or(FlopError::InvalidCurve(label))?;
    let wc = omega(d, chart.subset(), node)?;
    let curves: Vec<Curve> = chart
        .curves()
        .iter()
        .map(|c| Curve {
            label: c.label,
            node: if c.label == label { wc.new_node } else { c.node },
        })
        .collect();
    let target = chart.with_curves(wc.target.clone(), curves);

    let gamma = chart.subset().with(node);
    let ell_i = d.longest_element(chart.subset())?;
    let ell_g = d.longest_element(&gamma)?;
    let ell_w = d.longest_element(&wc.target)?;
    let w = d.compose(&ell_i, &ell_g)?;
    let w_back = d.compose(&ell_w, &ell_g)?;

    let src_nodes = chart.nodes();
    let tgt_nodes = target.nodes();
    let forward = IntMatrix::from_columns(
        &tgt_nodes
            .iter()
            .map(|&t| node_column(&w, t, &src_nodes))
            .collect::<Vec<_>>(),
    );
    let inverse = IntMatrix::from_columns(
        &src_nodes
            .iter()
            .map(|&s| node_column(&w_back, s, &tgt_nodes))
            .collect::<Vec<_>>(),
    );
    if !forward.mul(&inverse).is_identity() {
        return Err(FlopError::CosetInconsistency(format!(
            "flop matrices at node {node} of {} are not mutually inverse",
            chart.subset()
        )));
    }
    let p = chart.position_of_label(label).expect("label resolved above");
    let lambda = chart
        .curves()
        .iter()
        .enumerate()
        .filter(|&(q, _)| q != p)
        .map(|(q, c)| (c.label, forward[(p, q)]))
        .collect();
    let dual = inverse.transpose();
    Ok(FlopStep {
        label,
        node,
        new_node: wc.new_node,
        source: chart.clone(),
        target,
        matrix: FlopMatrix { forward, inverse, dual },
        lambda,
    })
}

/// `M_i`, `M_i^{-1}` and `N_i` for the flop of `I` at node `i`, in the identity chart.
pub fn flop_matrix(d: &DynkinDiagram, subset: &NodeSubset, i: usize) -> Result<FlopMatrix> {
    Ok(flop_at(d, subset, i)?.matrix)
}

pub fn flop_at(d: &DynkinDiagram, subset: &NodeSubset, i: usize) -> Result<FlopStep> {
    let chart = Chart::identity(d, subset)?;
    if subset.contains(i) {
        return Err(FlopError::InvalidCurve(i));
    }
    d.check_node(i)?;
    flop(d, &chart, i)
}

/// Iterated flops, each curve named by its label in the then-current chart.
pub fn flop_path(d: &DynkinDiagram, start: &Chart, labels: &[usize]) -> Result<Vec<FlopStep>> {
    let mut chart = start.clone();
    let mut steps = Vec::with_capacity(labels.len());
    for &l in labels {
        let step = flop(d, &chart, l)?;
        chart = step.target.clone();
        steps.push(step);
    }
    Ok(steps)
}

/// The comparison map `N_1 ⋯ N_t : Θ_target → Θ_start` in chart coordinates.
pub fn comparison_map(start: &Chart, path: &[FlopStep]) -> Result<IntMatrix> {
    let mut n = IntMatrix::identity(start.rank());
    let mut current = start;
    for (t, step) in path.iter().enumerate() {
        if step.source != *current {
            return Err(FlopError::NonComposable { step: t });
        }
        n = n.mul(&step.matrix.dual);
        current = &step.target;
    }
    Ok(n)
}

/// Class map `M_1 ⋯ M_t : A_1(target) → A_1(start)` in chart coordinates.
pub fn class_map(start: &Chart, path: &[FlopStep]) -> Result<IntMatrix> {
    let mut m = IntMatrix::identity(start.rank());
    let mut current = start;
    for (t, step) in path.iter().enumerate() {
        if step.source != *current {
            return Err(FlopError::NonComposable { step: t });
        }
        m = m.mul(&step.matrix.forward);
        current = &step.target;
    }
    Ok(m)
}

/// Re-indexes the columns of a map out of `chart` by ascending node id.
pub fn to_node_basis(map: &IntMatrix, chart: &Chart) -> IntMatrix {
    map.select_columns(&chart.node_order())
}

/// `W_I x = x W_K`, checked on generators in both directions.
pub fn coset_consistent(d: &DynkinDiagram, subset: &NodeSubset, x: &WeylElement, k: &NodeSubset) -> Result<bool> {
    d.check_subset(subset)?;
    d.check_subset(k)?;
    if subset.len() != k.len() {
        return Ok(false);
    }
    let x_inv = d.inverse(x)?;
    for j in subset.iter() {
        let s = d.simple_reflection(j)?;
        let conj = d.compose(&d.compose(&x_inv, &s)?, x)?;
        if !d.in_parabolic(&conj, k) {
            return Ok(false);
        }
    }
    for j in k.iter() {
        let s = d.simple_reflection(j)?;
        let conj = d.compose(&d.compose(x, &s)?, &x_inv)?;
        if !d.in_parabolic(&conj, subset) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimal-length element of `x W_K` by greedy descent, smallest node first.
pub fn minimal_rep(d: &DynkinDiagram, x: &WeylElement, k: &NodeSubset) -> Result<WeylElement> {
    d.check_subset(k)?;
    let reflections: Vec<(usize, IntMatrix)> = k
        .iter()
        .map(|j| Ok((j, d.simple_reflection(j)?.into_matrix())))
        .collect::<Result<_>>()?;
    let mut m = x.matrix().clone();
    loop {
        let descent = reflections
            .iter()
            .find(|(j, _)| (0..m.rows()).any(|r| m[(r, j - 1)] < 0));
        match descent {
            Some((_, s)) => m = m.mul(s),
            None => break,
        }
    }
    Ok(d.element_unchecked(m))
}

/// Minimal representative of `w W_K`, after checking `W_I w = w W_K`.
pub fn coset_minimal_rep(
    d: &DynkinDiagram,
    subset: &NodeSubset,
    w: &WeylElement,
    k: &NodeSubset,
) -> Result<WeylElement> {
    if !coset_consistent(d, subset, w, k)? {
        return Err(FlopError::CosetInconsistency(format!(
            "W_{subset} w != w W_{k} for w = {}",
            w.matrix()
        )));
    }
    minimal_rep(d, w, k)
}

/// A chamber `(x, K)` of `Θ_I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber {
    pub rep: WeylElement,
    pub subset: NodeSubset,
}

/// Edge of the chamber graph: flop at `node` of the source chamber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChamberEdge {
    pub node: usize,
    pub new_node: usize,
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct ChamberGraph {
    pub diagram: DynkinDiagram,
    pub base: NodeSubset,
    pub chambers: Vec<Chamber>,
    /// Outgoing edges of each chamber, by ascending node.
    pub edges: Vec<Vec<ChamberEdge>>,
}

#[derive(Serialize, Deserialize)]
struct ChamberJson {
    id: usize,
    subset: NodeSubset,
    rep: IntMatrix,
    length: usize,
    edges: Vec<ChamberEdge>,
}

#[derive(Serialize, Deserialize)]
struct ChamberGraphJson {
    diagram: DynkinDiagram,
    subset: NodeSubset,
    chambers: Vec<ChamberJson>,
}

impl ChamberGraph {
    pub fn len(&self) -> usize {
        self.chambers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chambers.is_empty()
    }

    pub fn find(&self, rep: &IntMatrix, subset: &NodeSubset) -> Option<usize> {
        self.chambers
            .iter()
            .position(|c| c.rep.matrix() == rep && c.subset == *subset)
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }

    fn distances_from(&self, a: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        if self.is_empty() {
            return dist;
        }
        dist[a] = Some(0);
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for e in &self.edges[u] {
                if dist[e.target].is_none() {
                    dist[e.target] = Some(du + 1);
                    queue.push_back(e.target);
                }
            }
        }
        dist
    }

    /// All shortest paths from `a` to `b`, as edge lists.
    pub fn shortest_paths(&self, a: usize, b: usize) -> Vec<Vec<ChamberEdge>> {
        let dist = self.distances_from(b);
        let mut out = Vec::new();
        let mut stack: Vec<(usize, Vec<ChamberEdge>)> = vec![(a, Vec::new())];
        while let Some((u, path)) = stack.pop() {
            if u == b {
                out.push(path);
                continue;
            }
            let Some(du) = dist[u] else { continue };
            for e in self.edges[u].iter().rev() {
                if dist[e.target] == Some(du - 1) {
                    let mut p = path.clone();
                    p.push(*e);
                    stack.push((e.target, p));
                }
            }
        }
        out
    }

    /// Turns a path of chamber edges starting at chamber `from` into chart flops,
    /// starting from the identity chart of that chamber's subset.
    pub fn path_steps(&self, from: usize, path: &[ChamberEdge]) -> Result<Vec<FlopStep>> {
        let mut chart = Chart::identity(&self.diagram, &self.chambers[from].subset)?;
        let mut steps = Vec::with_capacity(path.len());
        for (t, e) in path.iter().enumerate() {
            let label = chart
                .curves()
                .iter()
                .find(|c| c.node == e.node)
                .map(|c| c.label)
                .ok_or(FlopError::NonComposable { step: t })?;
            let step = flop(&self.diagram, &chart, label)?;
            chart = step.target.clone();
            steps.push(step);
        }
        Ok(steps)
    }

    /// Class map `A_1(Y_c) → A_1(X)` induced by `x` in node coordinates:
    /// column `q` is `π_I(x α_{K^c[q]})`.
    pub fn class_map(&self, c: usize) -> IntMatrix {
        let ch = &self.chambers[c];
        let rows = self.diagram.complement(&self.base);
        let cols = self.diagram.complement(&ch.subset);
        IntMatrix::from_columns(&cols.iter().map(|&t| node_column(&ch.rep, t, &rows)).collect::<Vec<_>>())
    }

    /// Comparison map `Θ_{Y_c} → Θ_I` in node coordinates.
    pub fn comparison_map(&self, c: usize) -> IntMatrix {
        self.class_map(c)
            .inverse()
            .expect("class maps of chambers are unimodular")
            .transpose()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = ChamberGraphJson {
            diagram: self.diagram.clone(),
            subset: self.base.clone(),
            chambers: self
                .chambers
                .iter()
                .enumerate()
                .map(|(id, c)| ChamberJson {
                    id,
                    subset: c.subset.clone(),
                    rep: c.rep.matrix().clone(),
                    length: c.rep.length(),
                    edges: self.edges[id].clone(),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("chamber graphs serialize")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<ChamberGraph> {
        let doc: ChamberGraphJson = serde_json::from_value(v.clone())
            .map_err(|e| FlopError::InvalidInput(format!("chamber graph JSON: {e}")))?;
        let d = doc.diagram;
        let mut chambers = Vec::new();
        let mut edges = Vec::new();
        for (k, c) in doc.chambers.into_iter().enumerate() {
            if c.id != k {
                return Err(FlopError::InvalidInput("chamber ids must be 0, 1, 2, ...".into()));
            }
            chambers.push(Chamber {
                rep: d.element(c.rep)?,
                subset: c.subset,
            });
            edges.push(c.edges);
        }
        Ok(ChamberGraph {
            diagram: d,
            base: doc.subset,
            chambers,
            edges,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph chambers {\n");
        for (id, c) in self.chambers.iter().enumerate() {
            let _ = writeln!(s, "  c{id} [label=\"{id} {}\"];", c.subset);
        }
        for (a, es) in self.edges.iter().enumerate() {
            for e in es.iter().filter(|e| a < e.target) {
                let _ = writeln!(s, "  c{a} -- c{} [label=\"{}\"];", e.target, e.node);
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Breadth-first enumeration of `Cham(Δ, I)` from `(1, I)`.
pub fn enumerate_chambers(d: &DynkinDiagram, subset: &NodeSubset, limit: usize) -> Result<ChamberGraph> {
    d.check_subset(subset)?;
    if limit == 0 {
        return Err(FlopError::ChamberLimit { limit });
    }
    let mut index: HashMap<(IntMatrix, NodeSubset), usize> = HashMap::new();
    let mut chambers = vec![Chamber {
        rep: d.identity(),
        subset: subset.clone(),
    }];
    index.insert((d.identity().into_matrix(), subset.clone()), 0);
    let mut edges: Vec<Vec<ChamberEdge>> = vec![Vec::new()];
    let mut moves: HashMap<(u64, usize), (WallCrossing, WeylElement)> = HashMap::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let k = chambers[u].subset.clone();
        for node in d.complement(&k) {
            let key = (k.mask(), node);
            if let std::collections::hash_map::Entry::Vacant(e) = moves.entry(key) {
                let wc = omega(d, &k, node)?;
                let p = d.compose(&d.longest_element(&k)?, &d.longest_element(&k.with(node))?)?;
                e.insert((wc, p));
            }
            let (wc, p) = &moves[&key];
            let y = minimal_rep(d, &d.compose(&chambers[u].rep, p)?, &wc.target)?;
            let id_key = (y.matrix().clone(), wc.target.clone());
            let target = match index.get(&id_key) {
                Some(&t) => t,
                None => {
                    if chambers.len() >= limit {
                        return Err(FlopError::ChamberLimit { limit });
                    }
                    let t = chambers.len();
                    index.insert(id_key, t);
                    chambers.push(Chamber {
                        rep: y,
                        subset: wc.target.clone(),
                    });
                    edges.push(Vec::new());
                    queue.push_back(t);
                    t
                }
            };
            edges[u].push(ChamberEdge {
                node,
                new_node: wc.new_node,
                target,
            });
        }
    }
    Ok(ChamberGraph {
        diagram: d.clone(),
        base: subset.clone(),
        chambers,
        edges,
    })
}
