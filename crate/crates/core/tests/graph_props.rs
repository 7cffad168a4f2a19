use jdsp_core::graph::{execute_plan, run_graph, validate_and_plan, BlockInstance, Graph, Wire};
use proptest::prelude::*;
use serde_json::json;

/// A random DAG: one noise source feeding a tree of windows and AWGN
/// channels, with meters comparing random pairs. Ids are shuffled so
/// lexicographic order does not follow construction order.
fn random_graph() -> impl Strategy<Value = Graph> {
    (2usize..10, prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 9), prop::collection::vec(any::<prop::sample::Index>(), 6), any::<u64>())
        .prop_map(|(n, parents, meters, salt)| {
            let name = |i: usize| format!("b{:02}", (i as u64 * 7 + salt % 13) % 97);
            let mut blocks = vec![BlockInstance {
                id: name(0),
                type_name: "SignalGenerator".into(),
                params: [("kind".to_string(), json!("white_noise")), ("length".to_string(), json!(64))].into(),
            }];
            let mut wires = Vec::new();
            for (i, (parent, noisy)) in parents.iter().enumerate().take(n - 1) {
                let i = i + 1;
                let p = parent.index(i);
                let (ty, params) = if *noisy {
                    ("AwgnChannel", [("snr_db".to_string(), json!(10.0))].into())
                } else {
                    ("Window", Default::default())
                };
                blocks.push(BlockInstance { id: name(i), type_name: ty.into(), params });
                wires.push(Wire { from: format!("{}.out", name(p)), to: format!("{}.in", name(i)) });
            }
            for (m, pick) in meters.iter().enumerate().take(n / 2) {
                let id = format!("m{m}");
                let a = pick.index(n);
                let b = (a + 1) % n;
                blocks.push(BlockInstance { id: id.clone(), type_name: "SnrMeter".into(), params: Default::default() });
                wires.push(Wire { from: format!("{}.out", name(a)), to: format!("{id}.reference") });
                wires.push(Wire { from: format!("{}.out", name(b)), to: format!("{id}.estimate") });
            }
            Graph { version: 1, blocks, wires, ui: None }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planning_is_pure_and_respects_wires(g in random_graph(), rot in 0usize..20) {
        let plan = validate_and_plan(&g).unwrap();
        prop_assert_eq!(&plan, &validate_and_plan(&g).unwrap());
        let pos = |id: &str| plan.order.iter().position(|o| o == id).unwrap();
        for w in &g.wires {
            let (f, t) = (w.from.split('.').next().unwrap(), w.to.split('.').next().unwrap());
            prop_assert!(pos(f) < pos(t));
        }
        // the order does not depend on how blocks and wires are listed
        let mut shuffled = g.clone();
        let (nb, nw) = (shuffled.blocks.len(), shuffled.wires.len());
        shuffled.blocks.rotate_left(rot % nb);
        shuffled.wires.rotate_left(rot % nw.max(1));
        shuffled.wires.reverse();
        prop_assert_eq!(plan.order, validate_and_plan(&shuffled).unwrap().order);
    }

    #[test]
    fn execution_is_pure(g in random_graph(), seed in any::<u64>()) {
        let plan = validate_and_plan(&g).unwrap();
        let a = execute_plan(&plan, &g, seed).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&execute_plan(&plan, &g, seed).unwrap()).unwrap());
    }

    #[test]
    fn removing_a_sink_leaves_the_rest_alone(g in random_graph(), seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let sinks = g.sinks();
        let victim = &sinks[pick.index(sinks.len())];
        let full = run_graph(&g, seed).unwrap();
        let reduced = run_graph(&g.without_block(victim), seed).unwrap();
        prop_assert!(!reduced.contains_key(victim));
        for (id, outs) in &reduced {
            prop_assert_eq!(outs, &full[id]);
        }
    }
}
