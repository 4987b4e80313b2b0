//! Brute-force checks for the fast paths in [`restriction`](crate::restriction)
//! and [`wallcross`](crate::wallcross).
//!
//! Everything here works on root vectors or, for small Weyl groups, on the
//! whole group, and returns a structured report.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use crate::dynkin::{involution_from_longest, DynkinDiagram, NodeSubset, RootVector, WeylElement};
use crate::error::{FlopError, Result};
use crate::linalg::IntMatrix;
use crate::restriction::{restricted_roots_in, Chart, RestrictedClass};
use crate::wallcross::{enumerate_chambers, flop, omega};

/// Largest Weyl group the chamber oracle is willing to enumerate.
pub const BRUTE_FORCE_WEYL_LIMIT: u128 = 200_000;

fn reduce_root(d: &DynkinDiagram, subset: &NodeSubset, alpha: &RootVector) -> Result<()> {
    d.check_subset(subset)?;
    if !d.is_positive_root(alpha) {
        return Err(FlopError::NotARoot(alpha.to_string()));
    }
    if alpha
        .0
        .iter()
        .enumerate()
        .all(|(k, &c)| c == 0 || subset.contains(k + 1))
    {
        return Err(FlopError::ZeroRestriction(alpha.to_string()));
    }
    Ok(())
}

/// True iff `beta` is reached from `alpha` by simple reflections in `I`.
pub fn orbit_equivalent(d: &DynkinDiagram, subset: &NodeSubset, alpha: &RootVector, beta: &RootVector) -> Result<bool> {
    reduce_root(d, subset, alpha)?;
    reduce_root(d, subset, beta)?;
    Ok(orbit_of(d, subset, alpha).contains(beta))
}

fn orbit_of(d: &DynkinDiagram, subset: &NodeSubset, alpha: &RootVector) -> BTreeSet<RootVector> {
    let mut seen = BTreeSet::from([alpha.clone()]);
    let mut queue = VecDeque::from([alpha.clone()]);
    while let Some(r) = queue.pop_front() {
        for j in subset.iter() {
            let s = d.reflect(j, &r).expect("nodes of a checked subset");
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    seen
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaViolation {
    pub alpha: RootVector,
    pub beta: RootVector,
    pub same_restriction: bool,
    pub same_orbit: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub diagram: DynkinDiagram,
    pub subset: NodeSubset,
    pub roots: usize,
    pub pairs: usize,
    pub orbits: usize,
    pub parabolic_order: u128,
    pub violations: Vec<LemmaViolation>,
    /// Orbits whose size does not divide `|W_I|`.
    pub bad_orbit_sizes: Vec<usize>,
    pub passed: bool,
}

/// Checks `π_I(α) = π_I(α′) ⇔ α ~ α′ under W_I` over all pairs of positive
/// roots with non-zero restriction.
pub fn verify_restriction_lemma(d: &DynkinDiagram, subset: &NodeSubset) -> Result<LemmaReport> {
    let chart = Chart::identity(d, subset)?;
    let roots: Vec<&RootVector> = d
        .positive_roots()
        .iter()
        .filter(|a| !chart.restrict(a).is_zero())
        .collect();
    let mut orbit_id = vec![usize::MAX; roots.len()];
    let mut orbit_sizes = Vec::new();
    for k in 0..roots.len() {
        if orbit_id[k] != usize::MAX {
            continue;
        }
        let orbit = orbit_of(d, subset, roots[k]);
        let id = orbit_sizes.len();
        orbit_sizes.push(orbit.len());
        for (m, r) in roots.iter().enumerate() {
            if orbit.contains(*r) {
                orbit_id[m] = id;
            }
        }
    }
    let restrictions: Vec<RestrictedClass> = roots.iter().map(|a| chart.restrict(a)).collect();
    let mut violations = Vec::new();
    let mut pairs = 0;
    for a in 0..roots.len() {
        for b in a..roots.len() {
            pairs += 1;
            let same_restriction = restrictions[a] == restrictions[b];
            let same_orbit = orbit_id[a] == orbit_id[b];
            if same_restriction != same_orbit {
                violations.push(LemmaViolation {
                    alpha: roots[a].clone(),
                    beta: roots[b].clone(),
                    same_restriction,
                    same_orbit,
                });
            }
        }
    }
    let parabolic_order = d.parabolic_order(subset);
    let bad_orbit_sizes: Vec<usize> = orbit_sizes
        .iter()
        .copied()
        .filter(|&s| !parabolic_order.is_multiple_of(s as u128))
        .collect();
    let passed = violations.is_empty() && bad_orbit_sizes.is_empty();
    Ok(LemmaReport {
        diagram: d.clone(),
        subset: subset.clone(),
        roots: roots.len(),
        pairs,
        orbits: orbit_sizes.len(),
        parabolic_order,
        violations,
        bad_orbit_sizes,
        passed,
    })
}

/// Longest element of `W_Γ` by left multiplication, largest node first.
///
/// Deliberately a different traversal from [`DynkinDiagram::longest_element`].
pub fn longest_element_left(d: &DynkinDiagram, gamma: &NodeSubset) -> Result<WeylElement> {
    let mut w = d.identity();
    let mut nodes = gamma.to_vec();
    nodes.reverse();
    loop {
        let w_inv = d.inverse(&w)?;
        let next = nodes
            .iter()
            .copied()
            .find(|&i| w_inv.image_of_simple(i).is_nonnegative());
        match next {
            Some(i) => w = d.compose(&d.simple_reflection(i)?, &w)?,
            None => return Ok(w),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlopReport {
    pub diagram: DynkinDiagram,
    pub subset: NodeSubset,
    pub node: usize,
    pub target: NodeSubset,
    pub new_node: usize,
    pub forward: IntMatrix,
    pub inverse: IntMatrix,
    pub lambda: Vec<i64>,
    pub violations: Vec<String>,
    pub passed: bool,
}

/// Recomputes `M_i` and checks its column structure, the sign dichotomy and
/// the restricted-root bijection.
pub fn verify_flop_matrix(d: &DynkinDiagram, subset: &NodeSubset, i: usize) -> Result<FlopReport> {
    let wc = omega(d, subset, i)?;
    let gamma = subset.with(i);
    let mut violations = Vec::new();

    let ell_i = longest_element_left(d, subset)?;
    let ell_g = longest_element_left(d, &gamma)?;
    for (name, g, ell) in [("I", subset, &ell_i), ("I+i", &gamma, &ell_g)] {
        let all_negative = d
            .roots_supported_on(g)
            .iter()
            .all(|r| ell.apply(r).map(|v| v.is_nonpositive()).unwrap_or(false));
        if !all_negative || !d.in_parabolic(ell, g) {
            violations.push(format!("longest element of {name} is not the longest element"));
        }
    }
    let iota = involution_from_longest(d, &ell_g, &gamma)?;
    if iota[&i] != wc.new_node {
        violations.push(format!(
            "Dynkin involution sends {i} to {}, wall crossing reports {}",
            iota[&i], wc.new_node
        ));
    }

    let src = Chart::identity(d, subset)?;
    let step = flop(d, &src, i)?;
    let w = d.compose(&ell_i, &ell_g)?;
    let rows = src.nodes();
    let cols = step.target.nodes();
    let forward = IntMatrix::from_columns(
        &cols
            .iter()
            .map(|&t| rows.iter().map(|&r| w.image_of_simple(t).0[r - 1]).collect())
            .collect::<Vec<Vec<i64>>>(),
    );
    if forward != step.matrix.forward {
        violations.push(format!(
            "recomputed M = {forward}, wall crossing gives {}",
            step.matrix.forward
        ));
    }
    let inverse = forward.inverse();
    match &inverse {
        Some(inv) if *inv == step.matrix.inverse => {}
        _ => violations.push("M_i^{-1} does not invert M_i".into()),
    }
    let p = step.position();
    let n = rows.len();
    let mut lambda = vec![0; n];
    for q in 0..n {
        let col = forward.column(q);
        let ok = if q == p {
            col == RestrictedClass::unit(n, p).neg().0
        } else {
            lambda[q] = col[p];
            col.iter().enumerate().all(|(r, &v)| {
                if r == q {
                    v == 1
                } else if r == p {
                    v >= 0
                } else {
                    v == 0
                }
            })
        };
        if !ok {
            violations.push(format!("column {q} of M has the wrong shape: {col:?}"));
        }
    }
    let flopped = restricted_roots_in(d, &step.target);
    let original: BTreeSet<RestrictedClass> = restricted_roots_in(d, &src).into_iter().collect();
    let mut images = BTreeSet::new();
    for beta in &flopped {
        let img = RestrictedClass(forward.apply(&beta.0));
        let on_wall = beta.0.iter().enumerate().all(|(r, &v)| r == p || v == 0);
        let ok = if on_wall {
            img == beta.neg()
        } else {
            img.0.iter().all(|&v| v >= 0) && !img.is_zero()
        };
        if !ok {
            violations.push(format!("M sends {beta} to {img}, breaking the sign dichotomy"));
        }
        images.insert(img.abs());
    }
    if images != original || images.len() != flopped.len() {
        violations.push("|M β| is not a bijection onto the restricted roots of I".into());
    }
    let passed = violations.is_empty();
    Ok(FlopReport {
        diagram: d.clone(),
        subset: subset.clone(),
        node: i,
        target: wc.target,
        new_node: wc.new_node,
        forward,
        inverse: step.matrix.inverse,
        lambda,
        violations,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChamberReport {
    pub diagram: DynkinDiagram,
    pub subset: NodeSubset,
    pub count: usize,
    pub expected: Option<u128>,
    /// `"weyl_order"`, `"brute_force"`, `"rank_two_lines"`, `"rank_one"` or `"none"`.
    pub method: &'static str,
    pub regular: bool,
    pub connected: bool,
    pub passed: bool,
}

/// Every element of `W`, by breadth-first search over right multiplication.
pub fn weyl_group_elements(d: &DynkinDiagram) -> Result<Vec<IntMatrix>> {
    if d.weyl_order() > BRUTE_FORCE_WEYL_LIMIT {
        return Err(FlopError::InvalidInput(format!(
            "|W({d})| = {} is too large to enumerate",
            d.weyl_order()
        )));
    }
    let gens: Vec<IntMatrix> = d
        .nodes()
        .map(|i| d.simple_reflection(i).map(WeylElement::into_matrix))
        .collect::<Result<_>>()?;
    let id = IntMatrix::identity(d.rank());
    let mut seen = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(w) = queue.pop_front() {
        for s in &gens {
            let ws = w.mul(s);
            if seen.insert(ws.clone()) {
                out.push(ws.clone());
                queue.push_back(ws);
            }
        }
    }
    Ok(out)
}

/// Counts `y ∈ W` sending every `α_j`, `j ∈ I`, to a simple root. These
/// are the inverses of the minimal representatives `x` of `Cham(Δ, I)`.
pub fn brute_force_chamber_count(d: &DynkinDiagram, subset: &NodeSubset) -> Result<usize> {
    d.check_subset(subset)?;
    let elements = weyl_group_elements(d)?;
    Ok(elements
        .iter()
        .filter(|y| {
            subset.iter().all(|j| {
                let col = y.column(j - 1);
                col.iter().all(|&c| c == 0 || c == 1) && col.iter().sum::<i64>() == 1
            })
        })
        .count())
}

pub fn verify_chamber_count(d: &DynkinDiagram, subset: &NodeSubset, limit: usize) -> Result<ChamberReport> {
    let g = enumerate_chambers(d, subset, limit)?;
    let rank = d.complement(subset).len();
    let (expected, method) = if subset.is_empty() {
        (Some(d.weyl_order()), "weyl_order")
    } else if d.weyl_order() <= BRUTE_FORCE_WEYL_LIMIT {
        (Some(brute_force_chamber_count(d, subset)? as u128), "brute_force")
    } else if rank == 2 {
        // Distinct lines through the origin cut the plane into twice as many cones.
        let arr = crate::restriction::enhanced_arrangement(d, subset)?;
        (Some(2 * arr.rays.len() as u128), "rank_two_lines")
    } else if rank == 1 {
        (Some(2), "rank_one")
    } else if rank == 0 {
        (Some(1), "rank_one")
    } else {
        (None, "none")
    };
    let regular = g.edges.iter().all(|e| e.len() == rank);
    let connected = g.is_connected();
    let passed = regular && connected && expected.is_none_or(|e| e == g.len() as u128);
    Ok(ChamberReport {
        diagram: d.clone(),
        subset: subset.clone(),
        count: g.len(),
        expected,
        method,
        regular,
        connected,
        passed,
    })
}
