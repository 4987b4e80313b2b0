use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use flopcalc::enumerative::{ctc_residual, dim_after_mutation, dim_contraction, gw_number, transform_gv, GVTable};
use flopcalc::oracle::longest_element_left;
use flopcalc::restriction::{restricted_positive_roots, restricted_roots_in, Chart, RestrictedClass};
use flopcalc::wallcross::{comparison_map, enumerate_chambers, flop, flop_path, ChamberGraph, FlopStep};
use flopcalc::{parse_diagram, DynkinDiagram, IntMatrix, NodeSubset, RootVector};

const CORPUS: &[&str] = &["A1", "A2", "A3", "A4", "A5", "D4", "D5", "E6", "E7", "E8"];

fn diagram() -> impl Strategy<Value = DynkinDiagram> {
    (0..CORPUS.len()).prop_map(|k| parse_diagram(CORPUS[k]).unwrap())
}

fn subset_of(d: &DynkinDiagram, mask: u64) -> NodeSubset {
    d.nodes().filter(|i| mask >> (i - 1) & 1 == 1).collect()
}

fn ambient() -> impl Strategy<Value = (DynkinDiagram, NodeSubset)> {
    (diagram(), any::<u64>()).prop_map(|(d, m)| {
        let s = subset_of(&d, m);
        (d, s)
    })
}

/// Ambient with at least one curve, plus a chosen curve.
fn flop_data() -> impl Strategy<Value = (DynkinDiagram, NodeSubset, usize)> {
    (ambient(), any::<prop::sample::Index>()).prop_filter_map("no curves", |((d, s), ix)| {
        let c = d.complement(&s);
        if c.is_empty() {
            None
        } else {
            let i = c[ix.index(c.len())];
            Some((d, s, i))
        }
    })
}

fn table_with(d: &DynkinDiagram, chart: &Chart, values: &[u64]) -> GVTable {
    let entries: Vec<(RestrictedClass, u64)> = restricted_roots_in(d, chart)
        .into_iter()
        .zip(values.iter().cycle())
        .map(|(b, &v)| (b, v))
        .collect();
    GVTable::new(d, chart, entries).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-7i64..=7, 1i64..=7).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    (1i64..=7, 1i64..=7, any::<bool>()).prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn positive_roots_closed_under_reflection(d in diagram()) {
        let roots = d.positive_roots();
        for r in roots {
            for i in d.nodes() {
                let s = d.reflect(i, r).unwrap();
                if s == RootVector::simple(d.rank(), i).neg() {
                    prop_assert_eq!(r, &RootVector::simple(d.rank(), i));
                } else {
                    prop_assert!(d.is_positive_root(&s));
                }
            }
        }
    }

    #[test]
    fn random_words_permute_roots(d in diagram(), word in prop::collection::vec(1usize..=8, 0..=20)) {
        let word: Vec<usize> = word.into_iter().map(|i| (i - 1) % d.rank() + 1).collect();
        let w = d.word(&word).unwrap();
        prop_assert!(d.permutes_roots(&w));
        prop_assert!(w.length() <= word.len());
        prop_assert_eq!(w.length() % 2, word.len() % 2);
        let inv = d.inverse(&w).unwrap();
        prop_assert!(d.compose(&w, &inv).unwrap().is_identity());
        prop_assert_eq!(inv.length(), w.length());
        for j in d.nodes() {
            let longer = d.times_simple(&w, j).unwrap();
            prop_assert_eq!(w.is_descent(j), longer.length() < w.length());
            prop_assert_eq!(longer.length().abs_diff(w.length()), 1);
        }
    }

    #[test]
    fn longest_element_is_an_involution((d, g) in ambient()) {
        let ell = d.longest_element(&g).unwrap();
        prop_assert!(d.compose(&ell, &ell).unwrap().is_identity());
        prop_assert_eq!(ell.length(), d.roots_supported_on(&g).len());
        prop_assert!(d.in_parabolic(&ell, &g));
        let left = longest_element_left(&d, &g).unwrap();
        prop_assert_eq!(left.matrix(), ell.matrix());
        for r in d.roots_supported_on(&g) {
            prop_assert!(ell.apply(r).unwrap().is_nonpositive());
        }
    }

    #[test]
    fn dynkin_involution_is_an_automorphism((d, g) in ambient()) {
        let iota = d.dynkin_involution(&g).unwrap();
        prop_assert_eq!(iota.keys().copied().collect::<Vec<_>>(), g.to_vec());
        for (&a, &b) in &iota {
            prop_assert!(g.contains(b));
            prop_assert_eq!(iota[&b], a);
            for (&c, &e) in &iota {
                prop_assert_eq!(d.adjacent(a, c), d.adjacent(b, e));
            }
        }
    }

    #[test]
    fn flop_twice_is_identity((d, s, i) in flop_data()) {
        let chart = Chart::identity(&d, &s).unwrap();
        let steps = flop_path(&d, &chart, &[i, i]).unwrap();
        prop_assert_eq!(&steps[1].target, &chart);
        prop_assert!(comparison_map(&chart, &steps).unwrap().is_identity());
        let m = steps[0].matrix.forward.mul(&steps[1].matrix.forward);
        prop_assert!(m.is_identity());
        prop_assert!(steps[0].matrix.forward.mul(&steps[0].matrix.inverse).is_identity());
        prop_assert_eq!(steps[0].matrix.dual.clone(), steps[0].matrix.inverse.transpose());
    }

    #[test]
    fn flop_matrix_sends_roots_to_roots((d, s, i) in flop_data()) {
        let chart = Chart::identity(&d, &s).unwrap();
        let step = flop(&d, &chart, i).unwrap();
        let p = step.position();
        let source: BTreeSet<RestrictedClass> = restricted_roots_in(&d, &chart).into_iter().collect();
        let mut images = BTreeSet::new();
        for b in restricted_roots_in(&d, &step.target) {
            let img = RestrictedClass(step.matrix.forward.apply(&b.0));
            let on_wall = b.0.iter().enumerate().all(|(k, &c)| k == p || c == 0);
            if on_wall {
                prop_assert!(img.abs() == b && img.0.iter().all(|&c| c <= 0));
            } else {
                prop_assert!(img.0.iter().all(|&c| c >= 0));
            }
            images.insert(img.abs());
        }
        prop_assert_eq!(images, source);
    }

    #[test]
    fn transform_round_trip((d, s, i) in flop_data(), values in prop::collection::vec(0u64..=9, 1..40)) {
        let t = table_with(&d, &Chart::identity(&d, &s).unwrap(), &values);
        let back = transform_gv(&transform_gv(&t, i).unwrap(), i).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn dim_law((d, s, i) in flop_data(), values in prop::collection::vec(0u64..=9, 1..40)) {
        let t = table_with(&d, &Chart::identity(&d, &s).unwrap(), &values);
        let after = dim_after_mutation(&t, i).unwrap();
        prop_assert_eq!(after, dim_contraction(&transform_gv(&t, i).unwrap()));
    }

    #[test]
    fn ctc_holds(
        (d, s, i) in flop_data(),
        values in prop::collection::vec(0u64..=9, 1..40),
        g in prop::collection::vec(rational(), 24),
        r in prop::collection::vec(nonzero_rational(), 8),
    ) {
        let chart = Chart::identity(&d, &s).unwrap();
        let t = table_with(&d, &chart, &values);
        let n = chart.rank();
        let gammas: Vec<&[BigRational]> = (0..3).map(|k| &g[k * n..(k + 1) * n]).collect();
        match ctc_residual(&t, i, [gammas[0], gammas[1], gammas[2]], &r[..n]) {
            Ok(res) => prop_assert!(res.holds(), "{:?}", res),
            Err(flopcalc::FlopError::Pole { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn gw_is_linear_and_local(
        (d, s) in ambient(),
        a in prop::collection::vec(0u64..=9, 1..40),
        b in prop::collection::vec(0u64..=9, 1..40),
    ) {
        prop_assume!(!d.complement(&s).is_empty());
        let chart = Chart::identity(&d, &s).unwrap();
        let ta = table_with(&d, &chart, &a);
        let tb = table_with(&d, &chart, &b);
        let sum: Vec<(RestrictedClass, u64)> = restricted_roots_in(&d, &chart)
            .into_iter()
            .map(|c| { let v = ta.get(&c) + tb.get(&c); (c, v) })
            .collect();
        let tsum = GVTable::new(&d, &chart, sum).unwrap();
        for beta in restricted_roots_in(&d, &chart) {
            for m in 1..=3 {
                let mb = beta.scale(m);
                let lhs = gw_number(&tsum, &mb).unwrap();
                prop_assert_eq!(lhs, gw_number(&ta, &mb).unwrap() + gw_number(&tb, &mb).unwrap());
                // only divisors of mb matter
                let divisors: Vec<(RestrictedClass, u64)> = ta
                    .entries()
                    .iter()
                    .filter(|(c, _)| (1..=mb.content()).any(|k| c.scale(k) == mb))
                    .map(|(c, &v)| (c.clone(), v))
                    .collect();
                let local = GVTable::new(&d, &chart, divisors).unwrap();
                prop_assert_eq!(gw_number(&local, &mb).unwrap(), gw_number(&ta, &mb).unwrap());
            }
        }
    }

    #[test]
    fn table_json_round_trip((d, s, i) in flop_data(), values in prop::collection::vec(0u64..=9, 1..40)) {
        let t = table_with(&d, &Chart::identity(&d, &s).unwrap(), &values);
        let flopped = transform_gv(&t, i).unwrap();
        for tb in [t, flopped] {
            prop_assert_eq!(GVTable::from_json_str(&tb.to_json_string()).unwrap(), tb.clone());
            prop_assert_eq!(GVTable::from_json(&tb.to_json()).unwrap(), tb);
        }
    }

    #[test]
    fn flop_step_json_round_trip((d, s, i) in flop_data()) {
        let step = flop(&d, &Chart::identity(&d, &s).unwrap(), i).unwrap();
        let text = serde_json::to_string(&step).unwrap();
        let back: FlopStep = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, step);
    }

    #[test]
    fn subset_and_matrix_json_round_trip((d, s) in ambient()) {
        let text = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<NodeSubset>(&text).unwrap(), s.clone());
        prop_assert_eq!(NodeSubset::parse(&s.to_string()).unwrap(), s.clone());
        let ell = d.longest_element(&s).unwrap();
        let text = serde_json::to_string(ell.matrix()).unwrap();
        prop_assert_eq!(&serde_json::from_str::<IntMatrix>(&text).unwrap(), ell.matrix());
        let dd: DynkinDiagram = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        prop_assert_eq!(dd.to_string(), d.to_string());
    }
}

fn small_graph(d: &DynkinDiagram, s: &NodeSubset) -> Option<ChamberGraph> {
    enumerate_chambers(d, s, 400).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Every chart reached through the chamber graph, flopped along every
    /// outgoing edge, transports an everywhere-positive table onto exactly the
    /// restricted roots of the target.
    #[test]
    fn support_law_on_chamber_edges((d, s) in ambient(), values in prop::collection::vec(1u64..=9, 1..40)) {
        let Some(g) = small_graph(&d, &s) else { return Ok(()); };
        prop_assert!(g.is_connected());
        let json = g.to_json();
        prop_assert_eq!(ChamberGraph::from_json(&json).unwrap().to_json(), json);
        let start = Chart::identity(&d, &s).unwrap();
        for c in 0..g.len() {
            let path = g.shortest_paths(0, c).into_iter().next().unwrap();
            let steps = g.path_steps(0, &path).unwrap();
            let chart = steps.last().map(|st| st.target.clone()).unwrap_or_else(|| start.clone());
            prop_assert_eq!(chart.subset(), &g.chambers[c].subset);
            let t = table_with(&d, &chart, &values);
            for e in &g.edges[c] {
                let label = chart.labels()[chart.position_of_node(e.node).unwrap()];
                let flopped = transform_gv(&t, label).unwrap();
                let target = flopped.chart().clone();
                prop_assert_eq!(target.subset(), &g.chambers[e.target].subset);
                let support: BTreeSet<RestrictedClass> = flopped.entries().keys().cloned().collect();
                let expected: BTreeSet<RestrictedClass> = restricted_roots_in(&d, &target).into_iter().collect();
                prop_assert_eq!(&support, &expected);
                // in node order it is the restricted-root set of the target subset
                let perm = target.node_order();
                let as_nodes: BTreeSet<RestrictedClass> = support
                    .iter()
                    .map(|b| RestrictedClass(perm.iter().map(|&k| b.0[k]).collect()))
                    .collect();
                let direct: BTreeSet<RestrictedClass> =
                    restricted_positive_roots(&d, target.subset()).unwrap().into_iter().collect();
                prop_assert_eq!(as_nodes, direct);
            }
        }
    }
}
