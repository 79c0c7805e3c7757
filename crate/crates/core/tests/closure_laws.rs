mod common;

use common::{arb_raw, Raw};
use graph_cstar::graph::{Graph, VertexId};
use graph_cstar::ideals::{self, VertexSet};
use proptest::prelude::*;

fn set(g: &Graph, mask: u32) -> VertexSet {
    VertexSet::new(g, (0..g.vertex_count()).filter(|i| mask & (1 << i) != 0).map(VertexId)).unwrap()
}

/// `sat ∘ her`: the saturated hereditary set generated by `s`.
fn closure(g: &Graph, s: &VertexSet) -> VertexSet {
    ideals::saturate(g, &ideals::hereditary_closure(g, s).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn hereditary_closure_laws(raw in arb_raw(7, false, true), a in 0u32..128, b in 0u32..128) {
        let g = raw.graph();
        let full = (1u32 << raw.n) - 1;
        let (small, large) = (set(&g, a & b & full), set(&g, a & full));
        let hs = ideals::hereditary_closure(&g, &small).unwrap();
        let hl = ideals::hereditary_closure(&g, &large).unwrap();
        prop_assert!(small.is_subset(&hs));
        prop_assert!(hs.is_subset(&hl));
        prop_assert_eq!(ideals::hereditary_closure(&g, &hs).unwrap(), hs.clone());
        prop_assert!(ideals::is_hereditary(&g, &hs).unwrap());
    }

    #[test]
    fn saturation_laws(raw in arb_raw(7, false, true), a in 0u32..128, b in 0u32..128) {
        let g = raw.graph();
        let full = (1u32 << raw.n) - 1;
        let small = ideals::hereditary_closure(&g, &set(&g, a & b & full)).unwrap();
        let large = ideals::hereditary_closure(&g, &set(&g, a & full)).unwrap();
        let ss = ideals::saturate(&g, &small).unwrap();
        let sl = ideals::saturate(&g, &large).unwrap();
        prop_assert!(small.is_subset(&ss));
        prop_assert!(ss.is_subset(&sl));
        prop_assert_eq!(ideals::saturate(&g, &ss).unwrap(), ss.clone());
        prop_assert!(ideals::is_saturated(&g, &ss).unwrap());
        // saturating a hereditary set keeps it hereditary
        prop_assert!(ideals::is_hereditary(&g, &ss).unwrap());
    }

    #[test]
    fn generated_set_is_least(raw in arb_raw(6, false, true), a in 0u32..64) {
        let g = raw.graph();
        let mask = a & ((1u32 << raw.n) - 1);
        let generated = closure(&g, &set(&g, mask));
        let least = raw
            .powerset_lattice()
            .into_iter()
            .filter(|h| (0..raw.n).all(|i| mask & (1 << i) == 0 || h.contains(&i)))
            .min_by_key(|h| h.len())
            .unwrap();
        let got: std::collections::BTreeSet<usize> = generated.members().iter().map(|v| v.0).collect();
        prop_assert_eq!(got, least);
    }

    #[test]
    fn downstream_is_hereditary_closure_of_a_point(raw in arb_raw(7, false, true), v in 0usize..7) {
        let g = raw.graph();
        let v = VertexId(v % raw.n);
        prop_assert_eq!(ideals::downstream(&g, v), ideals::hereditary_closure(&g, &VertexSet::new(&g, [v]).unwrap()).unwrap());
    }
}

#[test]
fn saturate_rejects_non_hereditary_sets() {
    let raw = Raw::singles(2, &[(0, 1)]);
    let g = raw.graph();
    assert!(ideals::saturate(&g, &set(&g, 0b01)).is_err());
}
