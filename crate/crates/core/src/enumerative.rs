//! Gopakumar–Vafa tables, their transport under flops, and the quantum potential.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dynkin::{DynkinDiagram, NodeSubset};
use crate::error::{FlopError, Result};
use crate::rational::pow;
use crate::restriction::{restricted_positive_roots, restricted_roots_in, Chart, Curve, RestrictedClass};
use crate::wallcross::{flop, FlopStep};

/// Genus-zero GV invariants `n_β` of one crepant resolution.
///
/// Keys are restricted positive roots in the coordinates of `chart`; zero
/// values are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GVTable {
    diagram: DynkinDiagram,
    chart: Chart,
    entries: BTreeMap<RestrictedClass, u64>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    class: Vec<i64>,
    n: u64,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    diagram: DynkinDiagram,
    subset: NodeSubset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curves: Option<Vec<Curve>>,
    entries: Vec<EntryJson>,
}

impl GVTable {
    pub fn new(
        d: &DynkinDiagram,
        chart: &Chart,
        entries: impl IntoIterator<Item = (RestrictedClass, u64)>,
    ) -> Result<GVTable> {
        let support = restricted_roots_in(d, chart);
        let mut map = BTreeMap::new();
        for (beta, n) in entries {
            if beta.len() != chart.rank() {
                return Err(FlopError::DimensionMismatch {
                    expected: chart.rank(),
                    found: beta.len(),
                });
            }
            if support.binary_search(&beta).is_err() {
                return Err(FlopError::InvalidTable(format!(
                    "{beta} is not a restricted positive root of {d} with subset {}",
                    chart.subset()
                )));
            }
            if map.contains_key(&beta) {
                return Err(FlopError::InvalidTable(format!("class {beta} listed twice")));
            }
            if n > 0 {
                map.insert(beta, n);
            }
        }
        Ok(GVTable {
            diagram: d.clone(),
            chart: chart.clone(),
            entries: map,
        })
    }

    /// Table in the identity chart of `subset`.
    pub fn from_classes(d: &DynkinDiagram, subset: &NodeSubset, entries: &[(&[i64], u64)]) -> Result<GVTable> {
        let chart = Chart::identity(d, subset)?;
        GVTable::new(
            d,
            &chart,
            entries.iter().map(|(c, n)| (RestrictedClass(c.to_vec()), *n)),
        )
    }

    /// Every restricted root with the same value.
    pub fn uniform(d: &DynkinDiagram, chart: &Chart, value: u64) -> Result<GVTable> {
        let support = restricted_roots_in(d, chart);
        GVTable::new(d, chart, support.into_iter().map(|b| (b, value)))
    }

    pub fn diagram(&self) -> &DynkinDiagram {
        &self.diagram
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn subset(&self) -> &NodeSubset {
        self.chart.subset()
    }

    pub fn rank(&self) -> usize {
        self.chart.rank()
    }

    pub fn entries(&self) -> &BTreeMap<RestrictedClass, u64> {
        &self.entries
    }

    pub fn get(&self, beta: &RestrictedClass) -> u64 {
        self.entries.get(beta).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = TableJson {
            diagram: self.diagram.clone(),
            subset: self.subset().clone(),
            curves: (!self.chart.is_identity()).then(|| self.chart.curves().to_vec()),
            entries: self
                .entries
                .iter()
                .map(|(b, &n)| EntryJson { class: b.0.clone(), n })
                .collect(),
        };
        serde_json::to_value(doc).expect("tables serialize")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("tables serialize")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<GVTable> {
        let doc: TableJson = serde_json::from_value(v.clone()).map_err(|e| FlopError::InvalidTable(e.to_string()))?;
        let d = doc.diagram;
        let chart = match doc.curves {
            Some(c) => Chart::new(&d, &doc.subset, c)?,
            None => Chart::identity(&d, &doc.subset)?,
        };
        GVTable::new(
            &d,
            &chart,
            doc.entries.into_iter().map(|e| (RestrictedClass(e.class), e.n)),
        )
    }

    pub fn from_json_str(s: &str) -> Result<GVTable> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| FlopError::InvalidTable(e.to_string()))?;
        GVTable::from_json(&v)
    }
}

/// Classes that can carry a non-zero GV invariant.
pub fn gv_support(d: &DynkinDiagram, subset: &NodeSubset) -> Result<Vec<RestrictedClass>> {
    restricted_positive_roots(d, subset)
}

/// GV table of the flop at the curve with the given label: `n⁺_β = n_{|M β|}`.
pub fn transform_gv(table: &GVTable, label: usize) -> Result<GVTable> {
    let step = flop(&table.diagram, &table.chart, label)?;
    transform_gv_along(table, &step)
}

pub fn transform_gv_along(table: &GVTable, step: &FlopStep) -> Result<GVTable> {
    if step.source != table.chart {
        return Err(FlopError::NonComposable { step: 0 });
    }
    let m = &step.matrix.forward;
    let entries: Vec<(RestrictedClass, u64)> = restricted_roots_in(&table.diagram, &step.target)
        .into_iter()
        .map(|b| {
            let image = RestrictedClass(m.apply(&b.0)).abs();
            let n = table.get(&image);
            (b, n)
        })
        .collect();
    GVTable::new(&table.diagram, &step.target, entries)
}

/// Transports a table along a chain of labels.
pub fn track_gv(table: &GVTable, labels: &[usize]) -> Result<Vec<GVTable>> {
    let mut out = Vec::with_capacity(labels.len());
    let mut current = table.clone();
    for &l in labels {
        current = transform_gv(&current, l)?;
        out.push(current.clone());
    }
    Ok(out)
}

/// Multiple cover formula `N_β = Σ_{d | β} n_{β/d} / d³`.
pub fn gw_number(table: &GVTable, beta: &RestrictedClass) -> Result<BigRational> {
    check_len(table, beta.len())?;
    if beta.is_zero() {
        return Err(FlopError::ZeroClass);
    }
    let g = beta.content().unsigned_abs();
    let mut total = BigRational::zero();
    for d in 1..=g {
        if !g.is_multiple_of(d) {
            continue;
        }
        let b = RestrictedClass(beta.0.iter().map(|c| c / d as i64).collect());
        let n = table.get(&b);
        if n > 0 {
            let d3 = BigInt::from(d).pow(3);
            total += BigRational::new(BigInt::from(n), d3);
        }
    }
    Ok(total)
}

fn check_len(table: &GVTable, n: usize) -> Result<()> {
    if n == table.rank() {
        Ok(())
    } else {
        Err(FlopError::DimensionMismatch {
            expected: table.rank(),
            found: n,
        })
    }
}

/// `q^β` as a Laurent monomial.
pub fn monomial(q: &[BigRational], beta: &RestrictedClass) -> BigRational {
    q.iter()
        .zip(&beta.0)
        .fold(BigRational::one(), |acc, (x, &e)| acc * pow(x, e))
}

fn check_point(table: &GVTable, q: &[BigRational]) -> Result<()> {
    check_len(table, q.len())?;
    match q.iter().position(Zero::is_zero) {
        Some(index) => Err(FlopError::ZeroCoordinate { index }),
        None => Ok(()),
    }
}

/// `Π_k (γ_k · β)`.
pub fn cubic_weight(gammas: &[&[BigRational]; 3], beta: &RestrictedClass) -> BigRational {
    gammas.iter().map(|g| beta.pair(g)).product()
}

/// Closed form `Φ = Σ_β n_β (γ1·β)(γ2·β)(γ3·β) q^β / (1 - q^β)`.
pub fn quantum_potential(table: &GVTable, gammas: [&[BigRational]; 3], q: &[BigRational]) -> Result<BigRational> {
    for g in &gammas {
        check_len(table, g.len())?;
    }
    check_point(table, q)?;
    let monomials: Vec<(&RestrictedClass, u64, BigRational)> =
        table.entries.iter().map(|(b, &n)| (b, n, monomial(q, b))).collect();
    if let Some((b, _, _)) = monomials.iter().find(|(_, _, x)| x.is_one()) {
        return Err(FlopError::Pole { class: b.to_string() });
    }
    let mut total = BigRational::zero();
    for (b, n, x) in monomials {
        let w = cubic_weight(&gammas, b);
        if w.is_zero() {
            continue;
        }
        total += w * BigInt::from(n) * &x / (BigRational::one() - &x);
    }
    Ok(total)
}

/// Supported classes with `Σ β_i p_i ∈ ℤ`, i.e. where `q^β = 1` for `q = exp(2π√-1 p)`.
pub fn pole_diagnostics(table: &GVTable, p: &[BigRational]) -> Result<Vec<RestrictedClass>> {
    check_len(table, p.len())?;
    Ok(table
        .entries
        .keys()
        .filter(|b| b.pair(p).is_integer())
        .cloned()
        .collect())
}

/// Novikov parameters on the unflopped side: `q^β = r^{M^{-1} β}`.
pub fn novikov_pullback(step: &FlopStep, r: &[BigRational]) -> Result<Vec<BigRational>> {
    let inv = &step.matrix.inverse;
    if r.len() != inv.rows() {
        return Err(FlopError::DimensionMismatch {
            expected: inv.rows(),
            found: r.len(),
        });
    }
    if let Some(index) = r.iter().position(Zero::is_zero) {
        return Err(FlopError::ZeroCoordinate { index });
    }
    Ok((0..inv.cols())
        .map(|j| (0..inv.rows()).fold(BigRational::one(), |acc, p| acc * pow(&r[p], inv[(p, j)])))
        .collect())
}

/// Both sides of the crepant transformation identity at one flop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtcResidual {
    #[serde(with = "crate::rational::serde_one")]
    pub lhs: BigRational,
    #[serde(with = "crate::rational::serde_one")]
    pub rhs: BigRational,
}

impl CtcResidual {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `Φ⁺_r(γ) - Φ_q(Nγ)` against `-Π_k (γ_k · C⁺) Σ_m m³ n_{m C}`.
///
/// The `γ`s and `r` live on the flopped side.
pub fn ctc_residual(
    table: &GVTable,
    label: usize,
    gammas: [&[BigRational]; 3],
    r: &[BigRational],
) -> Result<CtcResidual> {
    let step = flop(&table.diagram, &table.chart, label)?;
    let flopped = transform_gv_along(table, &step)?;
    let q = novikov_pullback(&step, r)?;
    let n = &step.matrix.dual;
    let pulled: Vec<Vec<BigRational>> = gammas.iter().map(|g| apply_rational(n, g)).collect();
    let plus = quantum_potential(&flopped, gammas, r)?;
    let minus = quantum_potential(table, [&pulled[0], &pulled[1], &pulled[2]], &q)?;
    let p = step.position();
    let along: BigInt = table
        .entries
        .iter()
        .filter(|(b, _)| b.0.iter().enumerate().all(|(k, &c)| k == p || c == 0))
        .map(|(b, &v)| BigInt::from(b.0[p]).pow(3) * BigInt::from(v))
        .sum();
    let gi: BigRational = gammas.iter().map(|g| g[p].clone()).product();
    Ok(CtcResidual {
        lhs: plus - minus,
        rhs: -(gi * along),
    })
}

pub(crate) fn apply_rational(m: &crate::linalg::IntMatrix, v: &[BigRational]) -> Vec<BigRational> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| &v[j] * BigInt::from(m[(i, j)]))
                .fold(BigRational::zero(), |a, b| a + b)
        })
        .collect()
}

/// `dim A_con = Σ n_β (β·𝟙)²`.
pub fn dim_contraction(table: &GVTable) -> BigUint {
    table
        .entries
        .iter()
        .map(|(b, &n)| {
            let s = BigUint::from(b.degree().unsigned_abs());
            &s * &s * BigUint::from(n)
        })
        .sum()
}

/// `Σ n_β ((M^{-1} β)·𝟙)²`, the dimension after mutation at the given curve.
pub fn dim_after_mutation(table: &GVTable, label: usize) -> Result<BigUint> {
    let step = flop(&table.diagram, &table.chart, label)?;
    let inv = &step.matrix.inverse;
    Ok(table
        .entries
        .iter()
        .map(|(b, &n)| {
            let s: i64 = inv.apply(&b.0).iter().sum();
            let s = BigUint::from(s.unsigned_abs());
            &s * &s * BigUint::from(n)
        })
        .sum())
}

/// Named example tables.
pub mod presets {
    use super::*;
    use crate::dynkin::parse_diagram;

    /// The two-curve `cA_2` family: `n_{10} = n_{01} = 1`, `n_{11} = k`.
    pub fn ca2(k: u64) -> GVTable {
        let a2 = parse_diagram("A2").expect("A2 parses");
        GVTable::from_classes(&a2, &NodeSubset::new(), &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], k)])
            .expect("cA2 classes are restricted roots")
    }

    /// Diagram and subset of a single-curve flop whose curve has length `ℓ ≤ 6`.
    pub fn single_curve_ambient(length: u32) -> Result<(DynkinDiagram, NodeSubset)> {
        let (spec, node) = match length {
            1 => ("A1", 1),
            2 => ("D4", 2),
            3 => ("E6", 4),
            4 => ("E7", 4),
            5 => ("E8", 5),
            6 => ("E8", 4),
            _ => {
                return Err(FlopError::InvalidInput(format!(
                    "single-curve flops have length 1 to 6, not {length}"
                )))
            }
        };
        let d = parse_diagram(spec)?;
        let subset = d.all_nodes().without(node);
        Ok((d, subset))
    }

    /// Support template for a single curve of the given length, every `n_{kC}` set to `value`.
    pub fn single_curve(length: u32, value: u64) -> Result<GVTable> {
        let (d, subset) = single_curve_ambient(length)?;
        GVTable::uniform(&d, &Chart::identity(&d, &subset)?, value)
    }
}
