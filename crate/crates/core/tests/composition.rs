//! End-to-end checks of module composition on the built-in benchmarks.

use agv_core::compose::compose_all;
use agv_core::generators::gen_tgc;
use agv_core::module::reachable;

/// The two-train system composes to a closed module (no free inputs) with
/// 27 declared product states of which exactly 16 are reachable, carrying
/// these `(x1, x2, s)` labels.
#[test]
fn tgc2_composite_has_sixteen_reachable_states() {
    let (sys, _) = gen_tgc(2);
    let modules: Vec<&agv_core::module::Module> =
        sys.agents.iter().map(|a| &a.module).collect();
    let (composite, coords) = compose_all(&modules).unwrap();
    assert!(composite.input_vars.is_empty());
    assert_eq!(composite.states.len(), 27);
    assert_eq!(coords.len(), 27);
    assert_eq!(composite.check_valid(), Ok(()));

    let (n_states, _, restricted) = reachable(&composite);
    assert_eq!(n_states, 16);

    let mut labels: Vec<(u32, u32, u32)> = restricted
        .states
        .iter()
        .map(|s| {
            (
                s.label.get("x1").unwrap(),
                s.label.get("x2").unwrap(),
                s.label.get("s").unwrap(),
            )
        })
        .collect();
    labels.sort_unstable();
    let expected = vec![
        (0, 0, 0),
        (0, 0, 1),
        (0, 0, 2),
        (0, 1, 2),
        (0, 2, 0),
        (0, 2, 1),
        (0, 2, 2),
        (1, 0, 1),
        (1, 2, 1),
        (2, 0, 0),
        (2, 0, 1),
        (2, 0, 2),
        (2, 1, 2),
        (2, 2, 0),
        (2, 2, 1),
        (2, 2, 2),
    ];
    assert_eq!(labels, expected);

    // The initial state is everyone waiting, controller ready.
    let init_label = composite.label(composite.init);
    assert_eq!(init_label.get("x1"), Some(0));
    assert_eq!(init_label.get("x2"), Some(0));
    assert_eq!(init_label.get("s"), Some(0));
}

/// Coordinates returned by `compose_all` decode composite indices back into
/// per-agent local states consistently with the composite labels.
#[test]
fn compose_all_coordinates_agree_with_labels() {
    let (sys, _) = gen_tgc(2);
    let modules: Vec<&agv_core::module::Module> =
        sys.agents.iter().map(|a| &a.module).collect();
    let (composite, coords) = compose_all(&modules).unwrap();
    for (idx, coord) in coords.iter().enumerate() {
        assert_eq!(coord.len(), 3);
        let mut expected = agv_core::values::Valuation::new();
        for (agent, &local) in sys.agents.iter().zip(coord.iter()) {
            expected = expected.union(agent.module.label(local)).unwrap();
        }
        assert_eq!(*composite.label(idx), expected, "state {idx}");
    }
}
