//! Restriction of roots to `I^c` and the hyperplane arrangements it induces.
//!
//! A [`Chart`] fixes which node of `I^c` each coordinate of a restricted class
//! refers to. The plain functions use the identity chart, whose coordinates
//! are the nodes of `I^c` in ascending order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dynkin::{root_order, write_tuple, DynkinDiagram, NodeSubset, RootVector};
use crate::error::{FlopError, Result};

/// Integer vector over the coordinates of a chart; a curve class.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RestrictedClass(pub Vec<i64>);

impl RestrictedClass {
    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Sum of the entries, `β·𝟙`.
    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn neg(&self) -> RestrictedClass {
        RestrictedClass(self.0.iter().map(|c| -c).collect())
    }

    pub fn abs(&self) -> RestrictedClass {
        if self.0.iter().all(|&c| c <= 0) {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, k: i64) -> RestrictedClass {
        RestrictedClass(self.0.iter().map(|c| c * k).collect())
    }

    /// Gcd of the entries; 0 for the zero class.
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &c| g.gcd(&c))
    }

    /// Divides out the content. The zero class is returned unchanged.
    pub fn primitive(&self) -> (RestrictedClass, i64) {
        let g = self.content();
        if g == 0 {
            return (self.clone(), 0);
        }
        (RestrictedClass(self.0.iter().map(|c| c / g).collect()), g)
    }

    /// `e_p`, the class with a single 1 at coordinate `p` (0-based).
    pub fn unit(n: usize, p: usize) -> RestrictedClass {
        let mut v = vec![0; n];
        v[p] = 1;
        RestrictedClass(v)
    }

    /// Pairing `Σ θ_i β_i` with a rational point.
    pub fn pair(&self, theta: &[BigRational]) -> BigRational {
        self.0
            .iter()
            .zip(theta)
            .map(|(&b, t)| t * BigInt::from(b))
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

impl Ord for RestrictedClass {
    fn cmp(&self, other: &Self) -> Ordering {
        root_order(&self.0, &other.0)
    }
}

impl PartialOrd for RestrictedClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for RestrictedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RestrictedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.0)
    }
}

/// Which node of `I^c` each coordinate refers to.
///
/// Coordinates carry persistent curve labels. After a flop at label `c` the
/// label stays, and only its node changes, so charts along a chain of flops
/// stay comparable coordinate by coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chart {
    subset: NodeSubset,
    curves: Vec<Curve>,
}

/// One coordinate of a chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Curve {
    pub label: usize,
    pub node: usize,
}

impl Chart {
    /// The identity chart of `I`: labels equal nodes.
    pub fn identity(d: &DynkinDiagram, subset: &NodeSubset) -> Result<Chart> {
        d.check_subset(subset)?;
        let curves = d
            .complement(subset)
            .into_iter()
            .map(|n| Curve { label: n, node: n })
            .collect();
        Ok(Chart {
            subset: subset.clone(),
            curves,
        })
    }

    /// A chart with explicit curves. Labels are sorted; the nodes must be exactly `I^c`.
    pub fn new(d: &DynkinDiagram, subset: &NodeSubset, mut curves: Vec<Curve>) -> Result<Chart> {
        d.check_subset(subset)?;
        curves.sort();
        let mut nodes: Vec<usize> = curves.iter().map(|c| c.node).collect();
        nodes.sort_unstable();
        if nodes != d.complement(subset) {
            return Err(FlopError::InvalidInput(format!(
                "chart nodes {nodes:?} are not the complement of {subset}"
            )));
        }
        if curves.windows(2).any(|w| w[0].label == w[1].label) {
            return Err(FlopError::InvalidInput("duplicate curve label".into()));
        }
        if curves.iter().any(|c| c.label == 0) {
            return Err(FlopError::InvalidInput("curve labels are 1-based".into()));
        }
        Ok(Chart {
            subset: subset.clone(),
            curves,
        })
    }

    pub fn subset(&self) -> &NodeSubset {
        &self.subset
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    /// Number of coordinates, `|I^c|`.
    pub fn rank(&self) -> usize {
        self.curves.len()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.curves.iter().map(|c| c.label).collect()
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.curves.iter().map(|c| c.node).collect()
    }

    pub fn position_of_label(&self, label: usize) -> Option<usize> {
        self.curves.iter().position(|c| c.label == label)
    }

    pub fn position_of_node(&self, node: usize) -> Option<usize> {
        self.curves.iter().position(|c| c.node == node)
    }

    pub fn node_of(&self, label: usize) -> Option<usize> {
        self.position_of_label(label).map(|p| self.curves[p].node)
    }

    /// True when every label equals its node.
    pub fn is_identity(&self) -> bool {
        self.curves.iter().all(|c| c.label == c.node)
    }

    /// Positions ordered by node id; maps this chart onto the identity chart of its subset.
    pub fn node_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.rank()).collect();
        order.sort_by_key(|&p| self.curves[p].node);
        order
    }

    /// `π(α)` in this chart's coordinates.
    pub fn restrict(&self, alpha: &RootVector) -> RestrictedClass {
        RestrictedClass(self.curves.iter().map(|c| alpha.0[c.node - 1]).collect())
    }

    pub(crate) fn with_curves(&self, subset: NodeSubset, curves: Vec<Curve>) -> Chart {
        Chart { subset, curves }
    }
}

/// `π_I(α)`: drops the coordinates indexed by `I`.
pub fn restrict(d: &DynkinDiagram, subset: &NodeSubset, alpha: &RootVector) -> Result<RestrictedClass> {
    d.check_subset(subset)?;
    if alpha.len() != d.rank() {
        return Err(FlopError::DimensionMismatch {
            expected: d.rank(),
            found: alpha.len(),
        });
    }
    Ok(RestrictedClass(
        d.complement(subset).iter().map(|&n| alpha.0[n - 1]).collect(),
    ))
}

/// Non-zero restrictions of positive roots, deduplicated, in root order.
pub fn restricted_positive_roots(d: &DynkinDiagram, subset: &NodeSubset) -> Result<Vec<RestrictedClass>> {
    Ok(restricted_roots_in(d, &Chart::identity(d, subset)?))
}

/// Restricted positive roots in the coordinates of `chart`.
pub fn restricted_roots_in(d: &DynkinDiagram, chart: &Chart) -> Vec<RestrictedClass> {
    let mut out: Vec<RestrictedClass> = d
        .positive_roots()
        .iter()
        .map(|a| chart.restrict(a))
        .filter(|b| !b.is_zero())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Positive roots restricting to `beta` in `chart`.
pub fn lifts<'a>(d: &'a DynkinDiagram, chart: &Chart, beta: &RestrictedClass) -> Vec<&'a RootVector> {
    d.positive_roots()
        .iter()
        .filter(|a| chart.restrict(a) == *beta)
        .collect()
}

/// A line of the finite arrangement, with the multiples of its primitive
/// direction that are restricted roots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnhancedRay {
    pub primitive: RestrictedClass,
    pub multiplicities: Vec<i64>,
}

impl EnhancedRay {
    pub fn top_multiplicity(&self) -> i64 {
        *self
            .multiplicities
            .last()
            .expect("rays carry at least one multiplicity")
    }
}

/// The enhanced finite arrangement of `(Δ, I)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnhancedArrangement {
    pub diagram: DynkinDiagram,
    pub subset: NodeSubset,
    /// Node of `I^c` behind each coordinate.
    pub coordinates: Vec<usize>,
    pub rays: Vec<EnhancedRay>,
}

impl EnhancedArrangement {
    pub fn ray_of(&self, primitive: &[i64]) -> Option<&EnhancedRay> {
        self.rays.iter().find(|r| r.primitive.0 == primitive)
    }

    /// Every `k·primitive`, in root order.
    pub fn classes(&self) -> Vec<RestrictedClass> {
        let mut v: Vec<RestrictedClass> = self
            .rays
            .iter()
            .flat_map(|r| r.multiplicities.iter().map(move |&k| r.primitive.scale(k)))
            .collect();
        v.sort();
        v
    }
}

pub fn enhanced_arrangement(d: &DynkinDiagram, subset: &NodeSubset) -> Result<EnhancedArrangement> {
    Ok(enhanced_arrangement_in(d, &Chart::identity(d, subset)?))
}

/// Groups the restricted roots of `chart` by direction. Rays are listed in
/// root order of their primitive vectors.
pub fn enhanced_arrangement_in(d: &DynkinDiagram, chart: &Chart) -> EnhancedArrangement {
    let mut groups: BTreeMap<RestrictedClass, Vec<i64>> = BTreeMap::new();
    for beta in restricted_roots_in(d, chart) {
        let (p, k) = beta.primitive();
        groups.entry(p).or_default().push(k);
    }
    let rays = groups
        .into_iter()
        .map(|(primitive, mut multiplicities)| {
            multiplicities.sort_unstable();
            EnhancedRay {
                primitive,
                multiplicities,
            }
        })
        .collect();
    EnhancedArrangement {
        diagram: d.clone(),
        subset: chart.subset().clone(),
        coordinates: chart.nodes(),
        rays,
    }
}

/// Restricted roots `β` with `Σ β_i θ_i ∈ ℤ`, paired with that integer.
pub fn on_affine_arrangement(
    d: &DynkinDiagram,
    subset: &NodeSubset,
    theta: &[BigRational],
) -> Result<Vec<(RestrictedClass, BigInt)>> {
    let chart = Chart::identity(d, subset)?;
    if theta.len() != chart.rank() {
        return Err(FlopError::DimensionMismatch {
            expected: chart.rank(),
            found: theta.len(),
        });
    }
    Ok(restricted_roots_in(d, &chart)
        .into_iter()
        .filter_map(|b| {
            let v = b.pair(theta);
            v.is_integer().then(|| (b, v.to_integer()))
        })
        .collect())
}
