//! ADE Dynkin diagrams, their positive roots and Weyl groups.
//!
//! Nodes are 1-based and follow the Bourbaki labelling:
//!
//! * `A_n`: the chain `1 - 2 - … - n`;
//! * `D_n`: the chain `1 - … - (n-2)` with `n-1` and `n` both attached to `n-2`;
//! * `E_n`: the chain `1 - 3 - 4 - … - n` with node `2` attached to node `4`.
//!
//! Weyl group elements are integer matrices acting on `𝔥` in the basis of
//! simple roots. Column `j` of an element `w` is the root `w(α_j)`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{FlopError, Result};
use crate::linalg::IntMatrix;

/// Letter of an ADE diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DynkinType {
    A,
    D,
    E,
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            DynkinType::A => 'A',
            DynkinType::D => 'D',
            DynkinType::E => 'E',
        };
        write!(f, "{c}")
    }
}

/// Order of the Weyl group of a connected diagram of the given type.
pub fn classical_weyl_order(kind: DynkinType, rank: usize) -> u128 {
    let factorial = |n: usize| (1..=n as u128).product::<u128>();
    match kind {
        DynkinType::A => factorial(rank + 1),
        DynkinType::D => (1u128 << (rank - 1)) * factorial(rank),
        DynkinType::E => match rank {
            6 => 51_840,
            7 => 2_903_040,
            8 => 696_729_600,
            _ => unreachable!("E_{rank} is not a finite Weyl group"),
        },
    }
}

/// Number of positive roots of a connected diagram of the given type.
pub fn classical_root_count(kind: DynkinType, rank: usize) -> usize {
    match kind {
        DynkinType::A => rank * (rank + 1) / 2,
        DynkinType::D => rank * (rank - 1),
        DynkinType::E => match rank {
            6 => 36,
            7 => 63,
            8 => 120,
            _ => unreachable!("E_{rank} is not a finite root system"),
        },
    }
}

/// Integer coefficient vector over the simple roots.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootVector(pub Vec<i64>);

impl RootVector {
    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_nonpositive(&self) -> bool {
        self.0.iter().all(|&c| c <= 0)
    }

    pub fn neg(&self) -> RootVector {
        RootVector(self.0.iter().map(|c| -c).collect())
    }

    /// Simple root `α_i` (1-based `i`) in a diagram of rank `n`.
    pub fn simple(n: usize, i: usize) -> RootVector {
        let mut v = vec![0; n];
        v[i - 1] = 1;
        RootVector(v)
    }
}

impl fmt::Debug for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

pub(crate) fn write_tuple(f: &mut fmt::Formatter<'_>, v: &[i64]) -> fmt::Result {
    write!(f, "(")?;
    for (k, c) in v.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{c}")?;
    }
    write!(f, ")")
}

/// Ordering used for every root listing: by height, then lexicographically
/// descending, so that `α_1` precedes `α_2`.
pub(crate) fn root_order(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    let ha: i64 = a.iter().sum();
    let hb: i64 = b.iter().sum();
    ha.cmp(&hb).then_with(|| b.cmp(a))
}

/// A set of 1-based node ids.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSubset(BTreeSet<usize>);

impl NodeSubset {
    pub fn new() -> Self {
        NodeSubset(BTreeSet::new())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }

    /// `I + i`.
    pub fn with(&self, i: usize) -> NodeSubset {
        let mut s = self.clone();
        s.0.insert(i);
        s
    }

    /// `I - j`.
    pub fn without(&self, j: usize) -> NodeSubset {
        let mut s = self.clone();
        s.0.remove(&j);
        s
    }

    pub fn is_subset_of(&self, other: &NodeSubset) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Bit `i-1` set for each member.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | (1u64 << (i - 1)))
    }

    /// Parses `"1,2,4"`, `"[1,2,4]"`, `"{1,2,4}"` or the empty string.
    pub fn parse(s: &str) -> Result<NodeSubset> {
        let t = s.trim();
        let t = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .or_else(|| t.strip_prefix('{').and_then(|r| r.strip_suffix('}')))
            .unwrap_or(t)
            .trim();
        if t.is_empty() {
            return Ok(NodeSubset::new());
        }
        t.split(',')
            .map(|p| {
                let p = p.trim();
                p.parse::<usize>()
                    .ok()
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| FlopError::InvalidInput(format!("bad node id {p:?}")))
            })
            .collect()
    }
}

impl FromIterator<usize> for NodeSubset {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        NodeSubset(iter.into_iter().collect())
    }
}

impl fmt::Debug for NodeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_vec())
    }
}

impl fmt::Display for NodeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for NodeSubset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NodeSubset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if v.contains(&0) {
            return Err(serde::de::Error::custom("node ids are 1-based"));
        }
        Ok(v.into_iter().collect())
    }
}

/// An element of the Weyl group, as a matrix in the simple-root basis.
///
/// The length is computed on first use and cached.
#[derive(Clone)]
pub struct WeylElement {
    diagram: DynkinDiagram,
    matrix: IntMatrix,
    length: OnceLock<usize>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl Eq for WeylElement {}

impl std::hash::Hash for WeylElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.matrix.hash(state);
    }
}

impl WeylElement {
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }

    pub fn diagram(&self) -> &DynkinDiagram {
        &self.diagram
    }

    /// Number of positive roots sent to negative roots.
    pub fn length(&self) -> usize {
        *self.length.get_or_init(|| self.diagram.length_of(&self.matrix))
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn apply(&self, v: &RootVector) -> Result<RootVector> {
        if v.len() != self.rank() {
            return Err(FlopError::DimensionMismatch {
                expected: self.rank(),
                found: v.len(),
            });
        }
        Ok(RootVector(self.matrix.apply(&v.0)))
    }

    /// `w(α_j)` for 1-based `j`.
    pub fn image_of_simple(&self, j: usize) -> RootVector {
        RootVector(self.matrix.column(j - 1))
    }

    /// True iff `w(α_j)` is a negative root, i.e. `length(w s_j) < length(w)`.
    pub fn is_descent(&self, j: usize) -> bool {
        (0..self.rank()).any(|r| self.matrix[(r, j - 1)] < 0)
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElement({})", self.matrix)
    }
}

struct DiagramData {
    kind: DynkinType,
    rank: usize,
    neighbours: Vec<Vec<usize>>,
    roots: Vec<RootVector>,
    root_index: HashMap<Vec<i64>, usize>,
}

/// An ADE Dynkin diagram together with its positive roots.
///
/// Cloning is cheap; the root data is shared.
#[derive(Clone)]
pub struct DynkinDiagram {
    inner: Arc<DiagramData>,
}

impl PartialEq for DynkinDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.inner.kind == other.inner.kind && self.inner.rank == other.inner.rank
    }
}

impl Eq for DynkinDiagram {}

impl fmt::Debug for DynkinDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DynkinDiagram({self})")
    }
}

impl fmt::Display for DynkinDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.inner.kind, self.inner.rank)
    }
}

impl FromStr for DynkinDiagram {
    type Err = FlopError;

    fn from_str(s: &str) -> Result<Self> {
        parse_diagram(s)
    }
}

impl Serialize for DynkinDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DynkinDiagram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_diagram(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses a diagram spec such as `"A2"`, `"D4"` or `"E8"`.
pub fn parse_diagram(spec: &str) -> Result<DynkinDiagram> {
    let err = |reason: &str| FlopError::Parse {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let mut chars = spec.chars();
    let kind = match chars.next() {
        Some('A') => DynkinType::A,
        Some('D') => DynkinType::D,
        Some('E') => DynkinType::E,
        _ => return Err(err("expected one of the letters A, D, E followed by a rank")),
    };
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("rank must be a decimal number"));
    }
    if digits.starts_with('0') {
        return Err(err("rank must not have leading zeros"));
    }
    let rank: usize = digits.parse().map_err(|_| err("rank out of range"))?;
    match kind {
        DynkinType::A if rank < 1 => return Err(err("A_n needs n >= 1")),
        DynkinType::D if rank < 4 => return Err(err("D_n needs n >= 4")),
        DynkinType::E if !(6..=8).contains(&rank) => return Err(err("E_n needs n in {6, 7, 8}")),
        _ => {}
    }
    if rank > 63 {
        return Err(err("rank above 63 is not supported"));
    }
    Ok(DynkinDiagram::build(kind, rank))
}

impl DynkinDiagram {
    fn build(kind: DynkinType, rank: usize) -> DynkinDiagram {
        let mut edges = Vec::new();
        match kind {
            DynkinType::A => edges.extend((1..rank).map(|i| (i, i + 1))),
            DynkinType::D => {
                edges.extend((1..rank - 2).map(|i| (i, i + 1)));
                edges.push((rank - 2, rank - 1));
                edges.push((rank - 2, rank));
            }
            DynkinType::E => {
                edges.push((1, 3));
                edges.extend((3..rank).map(|i| (i, i + 1)));
                edges.push((2, 4));
            }
        }
        let mut neighbours = vec![Vec::new(); rank];
        for &(a, b) in &edges {
            neighbours[a - 1].push(b - 1);
            neighbours[b - 1].push(a - 1);
        }
        for n in &mut neighbours {
            n.sort_unstable();
        }
        let roots = enumerate_positive_roots(&neighbours);
        let root_index = roots.iter().enumerate().map(|(k, r)| (r.0.clone(), k)).collect();
        DynkinDiagram {
            inner: Arc::new(DiagramData {
                kind,
                rank,
                neighbours,
                roots,
                root_index,
            }),
        }
    }

    pub fn kind(&self) -> DynkinType {
        self.inner.kind
    }

    pub fn rank(&self) -> usize {
        self.inner.rank
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> {
        1..=self.inner.rank
    }

    pub fn all_nodes(&self) -> NodeSubset {
        self.nodes().collect()
    }

    /// Sorted edge list with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for (a, ns) in self.inner.neighbours.iter().enumerate() {
            for &b in ns {
                if a < b {
                    e.push((a + 1, b + 1));
                }
            }
        }
        e
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.inner.neighbours[i - 1].contains(&(j - 1))
    }

    pub fn check_node(&self, i: usize) -> Result<()> {
        if i >= 1 && i <= self.rank() {
            Ok(())
        } else {
            Err(FlopError::UnknownNode(i))
        }
    }

    pub fn check_subset(&self, s: &NodeSubset) -> Result<()> {
        s.iter().try_for_each(|i| self.check_node(i))
    }

    /// `Δ \ I`, ascending.
    pub fn complement(&self, s: &NodeSubset) -> Vec<usize> {
        self.nodes().filter(|&i| !s.contains(i)).collect()
    }

    /// All positive roots, ordered by height and then lexicographically descending.
    pub fn positive_roots(&self) -> &[RootVector] {
        &self.inner.roots
    }

    pub fn highest_root(&self) -> &RootVector {
        self.inner.roots.last().expect("a diagram has at least one root")
    }

    pub fn is_positive_root(&self, v: &RootVector) -> bool {
        self.inner.root_index.contains_key(&v.0)
    }

    pub fn root_index(&self, v: &RootVector) -> Option<usize> {
        self.inner.root_index.get(&v.0).copied()
    }

    /// True for `±` a positive root.
    pub fn is_root(&self, v: &RootVector) -> bool {
        self.is_positive_root(v) || self.is_positive_root(&v.neg())
    }

    /// Positive roots whose support lies inside `gamma`.
    pub fn roots_supported_on(&self, gamma: &NodeSubset) -> Vec<&RootVector> {
        self.positive_roots()
            .iter()
            .filter(|r| r.0.iter().enumerate().all(|(k, &c)| c == 0 || gamma.contains(k + 1)))
            .collect()
    }

    /// `s_i(v)`: negate coefficient `i`, then add the coefficients of its neighbours.
    pub fn reflect(&self, i: usize, v: &RootVector) -> Result<RootVector> {
        self.check_node(i)?;
        self.check_dim(v.len())?;
        Ok(reflect_raw(&self.inner.neighbours, i - 1, v))
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n == self.rank() {
            Ok(())
        } else {
            Err(FlopError::DimensionMismatch {
                expected: self.rank(),
                found: n,
            })
        }
    }

    pub(crate) fn length_of(&self, m: &IntMatrix) -> usize {
        self.positive_roots()
            .iter()
            .filter(|r| m.apply(&r.0).iter().any(|&c| c < 0))
            .count()
    }

    /// Wraps a matrix as a Weyl element, computing its length.
    ///
    /// Fails unless the matrix permutes `±` positive roots.
    pub fn element(&self, matrix: IntMatrix) -> Result<WeylElement> {
        if !matrix.is_square() {
            return Err(FlopError::DimensionMismatch {
                expected: self.rank(),
                found: matrix.cols(),
            });
        }
        self.check_dim(matrix.rows())?;
        for j in 1..=self.rank() {
            let img = RootVector(matrix.column(j - 1));
            if !self.is_root(&img) {
                return Err(FlopError::InvalidInput(format!(
                    "matrix sends alpha_{j} to {img}, which is not a root"
                )));
            }
        }
        Ok(self.element_unchecked(matrix))
    }

    pub(crate) fn element_unchecked(&self, matrix: IntMatrix) -> WeylElement {
        WeylElement {
            diagram: self.clone(),
            matrix,
            length: OnceLock::new(),
        }
    }

    fn element_with_length(&self, matrix: IntMatrix, length: usize) -> WeylElement {
        let cell = OnceLock::new();
        let _ = cell.set(length);
        WeylElement {
            diagram: self.clone(),
            matrix,
            length: cell,
        }
    }

    pub fn identity(&self) -> WeylElement {
        self.element_with_length(IntMatrix::identity(self.rank()), 0)
    }

    pub fn simple_reflection(&self, i: usize) -> Result<WeylElement> {
        self.check_node(i)?;
        let cols: Vec<Vec<i64>> = (1..=self.rank())
            .map(|j| reflect_raw(&self.inner.neighbours, i - 1, &RootVector::simple(self.rank(), j)).0)
            .collect();
        Ok(self.element_with_length(IntMatrix::from_columns(&cols), 1))
    }

    /// `w1 w2`, acting as `v ↦ w1(w2(v))`.
    pub fn compose(&self, w1: &WeylElement, w2: &WeylElement) -> Result<WeylElement> {
        self.check_dim(w1.rank())?;
        self.check_dim(w2.rank())?;
        Ok(self.element_unchecked(w1.matrix.mul(&w2.matrix)))
    }

    /// Right multiplication by a simple reflection, `w s_i`.
    pub fn times_simple(&self, w: &WeylElement, i: usize) -> Result<WeylElement> {
        let s = self.simple_reflection(i)?;
        self.compose(w, &s)
    }

    pub fn inverse(&self, w: &WeylElement) -> Result<WeylElement> {
        self.check_dim(w.rank())?;
        let inv = w
            .matrix
            .inverse()
            .ok_or_else(|| FlopError::InvalidInput("Weyl matrix is not invertible".into()))?;
        Ok(match w.length.get() {
            Some(&l) => self.element_with_length(inv, l),
            None => self.element_unchecked(inv),
        })
    }

    /// Product of simple reflections `s_{i_1} s_{i_2} …`.
    pub fn word(&self, word: &[usize]) -> Result<WeylElement> {
        let mut w = self.identity();
        for &i in word {
            w = self.times_simple(&w, i)?;
        }
        Ok(w)
    }

    /// True iff every column of `w` is `±` a root, i.e. `w` permutes the root system.
    pub fn permutes_roots(&self, w: &WeylElement) -> bool {
        self.positive_roots()
            .iter()
            .all(|r| self.is_root(&RootVector(w.matrix.apply(&r.0))))
    }

    /// Longest element `ℓ_Γ` of the parabolic subgroup `W_Γ`.
    ///
    /// Greedy ascent: right-multiply by the smallest `s_i` (`i ∈ Γ`) with
    /// `w(α_i) > 0` until none remains.
    pub fn longest_element(&self, gamma: &NodeSubset) -> Result<WeylElement> {
        self.check_subset(gamma)?;
        let mut m = IntMatrix::identity(self.rank());
        let reflections: Vec<(usize, IntMatrix)> = gamma
            .iter()
            .map(|i| Ok((i, self.simple_reflection(i)?.matrix)))
            .collect::<Result<_>>()?;
        loop {
            let ascent = reflections
                .iter()
                .find(|(i, _)| m.column(i - 1).iter().all(|&c| c >= 0));
            match ascent {
                Some((_, s)) => m = m.mul(s),
                None => break,
            }
        }
        Ok(self.element_unchecked(m))
    }

    /// The Dynkin involution `ι_Γ`, determined by `ℓ_Γ(α_j) = -α_{ι_Γ(j)}`.
    pub fn dynkin_involution(&self, gamma: &NodeSubset) -> Result<BTreeMap<usize, usize>> {
        let ell = self.longest_element(gamma)?;
        involution_from_longest(self, &ell, gamma)
    }

    /// Connected components of the induced subdiagram on `gamma`.
    pub fn components(&self, gamma: &NodeSubset) -> Vec<NodeSubset> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in gamma.iter() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(a) = queue.pop_front() {
                for &b0 in &self.inner.neighbours[a - 1] {
                    let b = b0 + 1;
                    if gamma.contains(b) && seen.insert(b) {
                        comp.push(b);
                        queue.push_back(b);
                    }
                }
            }
            out.push(comp.into_iter().collect());
        }
        out
    }

    /// ADE type of a connected induced subdiagram.
    pub fn component_type(&self, component: &NodeSubset) -> (DynkinType, usize) {
        let n = component.len();
        let degree = |a: usize| {
            self.inner.neighbours[a - 1]
                .iter()
                .filter(|&&b| component.contains(b + 1))
                .count()
        };
        let Some(branch) = component.iter().find(|&a| degree(a) == 3) else {
            return (DynkinType::A, n);
        };
        let mut arms: Vec<usize> = Vec::new();
        for &b0 in &self.inner.neighbours[branch - 1] {
            let mut prev = branch;
            let mut cur = b0 + 1;
            if !component.contains(cur) {
                continue;
            }
            let mut len = 1;
            loop {
                let next = self.inner.neighbours[cur - 1]
                    .iter()
                    .map(|b| b + 1)
                    .find(|&b| b != prev && component.contains(b));
                match next {
                    Some(nx) => {
                        prev = cur;
                        cur = nx;
                        len += 1;
                    }
                    None => break,
                }
            }
            arms.push(len);
        }
        arms.sort_unstable();
        match arms.as_slice() {
            [1, 1, _] => (DynkinType::D, n),
            [1, 2, 2] | [1, 2, 3] | [1, 2, 4] => (DynkinType::E, n),
            other => unreachable!("non-ADE subdiagram with arms {other:?}"),
        }
    }

    /// `|W_Γ|` as the product of the classical orders of the components.
    pub fn parabolic_order(&self, gamma: &NodeSubset) -> u128 {
        self.components(gamma)
            .iter()
            .map(|c| {
                let (k, r) = self.component_type(c);
                classical_weyl_order(k, r)
            })
            .product()
    }

    pub fn weyl_order(&self) -> u128 {
        classical_weyl_order(self.kind(), self.rank())
    }

    /// Membership `w ∈ W_J`: `w` must fix the dual vector which is 1 on `J^c`
    /// and 0 on `J` under the contragredient action.
    pub fn in_parabolic(&self, w: &WeylElement, j: &NodeSubset) -> bool {
        let m = &w.matrix;
        (1..=self.rank()).all(|col| {
            let s: i64 = (1..=self.rank())
                .filter(|&row| !j.contains(row))
                .map(|row| m[(row - 1, col - 1)])
                .sum();
            s == i64::from(!j.contains(col))
        })
    }
}

pub(crate) fn involution_from_longest(
    d: &DynkinDiagram,
    ell: &WeylElement,
    gamma: &NodeSubset,
) -> Result<BTreeMap<usize, usize>> {
    let mut map = BTreeMap::new();
    for j in gamma.iter() {
        let img = ell.image_of_simple(j).neg();
        let k = img
            .0
            .iter()
            .position(|&c| c == 1)
            .filter(|_| img.height() == 1 && img.is_nonnegative())
            .map(|p| p + 1)
            .filter(|&k| gamma.contains(k))
            .ok_or_else(|| {
                FlopError::InvalidInput(format!(
                    "longest element of {gamma} in {d} sends alpha_{j} to {}, not a negative simple root",
                    ell.image_of_simple(j)
                ))
            })?;
        map.insert(j, k);
    }
    Ok(map)
}

fn reflect_raw(neighbours: &[Vec<usize>], i: usize, v: &RootVector) -> RootVector {
    let mut out = v.0.clone();
    out[i] = -v.0[i] + neighbours[i].iter().map(|&j| v.0[j]).sum::<i64>();
    RootVector(out)
}

fn enumerate_positive_roots(neighbours: &[Vec<usize>]) -> Vec<RootVector> {
    let n = neighbours.len();
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut queue: VecDeque<RootVector> = VecDeque::new();
    for i in 1..=n {
        let r = RootVector::simple(n, i);
        seen.insert(r.0.clone());
        queue.push_back(r);
    }
    while let Some(r) = queue.pop_front() {
        for i in 0..n {
            let s = reflect_raw(neighbours, i, &r);
            if s.is_nonnegative() && !s.is_zero() && seen.insert(s.0.clone()) {
                queue.push_back(s);
            }
        }
    }
    let mut roots: Vec<RootVector> = seen.into_iter().map(RootVector).collect();
    roots.sort_by(|a, b| root_order(&a.0, &b.0));
    roots
}
