//! Stutter expansion of assumptions.
//!
//! An assumption constrains a trace only through its own variables and only
//! up to stuttering: the trace's letter sequence must admit a cut into
//! finite blocks, each constant on the assumption's state variables, such
//! that the block values form a run of the assumption module — each block
//! transition consuming the input read at the last position of the block it
//! ends — visiting the accepting set infinitely often.
//!
//! [`stutter_expand`] compiles this into a Büchi automaton over the
//! assumption's state and input variables that accepts exactly the words
//! admitting such a cut.

use super::{Acceptance, Alphabet, BuchiAutomaton, Edge, LetterSet};
use crate::system::Assumption;
use std::collections::BTreeSet;

/// Büchi automaton for the stutter-closed language of an assumption.
///
/// States mirror the assumption module's states. From state `p`, a *stay*
/// move loops on any letter whose state-variable part equals the label of
/// `p` (the word remains inside the current block), and an *advance* move
/// follows a module transition on the single letter combining the label of
/// `p` with the transition's input (the block ends here).
///
/// A cut is accepting when it advances infinitely often and infinitely
/// often into the accepting set; advances into the accepting set being
/// themselves advances, the two conditions collapse into the single mark
/// set carried by the returned transition-marked acceptance. Use
/// [`super::degeneralize`] to obtain state-based acceptance.
pub fn stutter_expand(a: &Assumption) -> BuchiAutomaton {
    let m = &a.module;
    let alphabet = Alphabet::new(
        m.state_vars.iter().chain(m.input_vars.iter()).cloned(),
        m.domain,
    );
    let mut edges = Vec::new();
    let mut marks: BTreeSet<usize> = BTreeSet::new();
    for (p, st) in m.states.iter().enumerate() {
        let letters: LetterSet = alphabet
            .letters()
            .filter(|&w| alphabet.decode(w).extends(&st.label))
            .collect();
        edges.push(Edge {
            from: p,
            letters,
            to: p,
        });
    }
    for t in &m.transitions {
        let letter = m
            .label(t.from)
            .union(&t.input)
            .expect("state and input variables are disjoint");
        let code = alphabet
            .encode(&letter)
            .expect("label and input cover the alphabet");
        if a.accepting.contains(&t.to) {
            marks.insert(edges.len());
        }
        edges.push(Edge {
            from: t.from,
            letters: [code].into(),
            to: t.to,
        });
    }
    BuchiAutomaton {
        alphabet,
        n_states: m.states.len(),
        edges,
        initial: [m.init].into(),
        acceptance: Acceptance::TransitionMarked(vec![marks]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_tgc;
    use crate::omega::{accepts_lasso, find_accepting_lasso, LassoWord};
    use crate::values::Valuation;

    fn letter(s: u32, x1: u32, x2: u32) -> Valuation {
        Valuation::from_pairs([("s", s), ("x1", x1), ("x2", x2)])
    }

    fn expansion(name: &str) -> BuchiAutomaton {
        let (_, assumptions) = gen_tgc(2);
        stutter_expand(&assumptions[name])
    }

    #[test]
    fn shape_mirrors_the_assumption_module() {
        let b = expansion("A_012");
        assert_eq!(b.n_states, 3);
        assert_eq!(
            b.alphabet.vars(),
            ["s".to_string(), "x1".to_string(), "x2".to_string()]
        );
        assert!(matches!(&b.acceptance, Acceptance::TransitionMarked(m) if m.len() == 1));
    }

    #[test]
    fn grant_alternation_with_matching_inputs_is_accepted() {
        let w = LassoWord {
            stem: vec![],
            cycle: vec![letter(0, 0, 1), letter(1, 2, 1)],
        };
        assert!(accepts_lasso(&expansion("A_012"), &w));
        // The run passes the first grant state infinitely often.
        assert!(accepts_lasso(&expansion("A_1"), &w));
        // ...but never the second.
        assert!(!accepts_lasso(&expansion("A_2"), &w));
    }

    #[test]
    fn stuttered_blocks_are_transparent_to_the_assumption() {
        // Same alternation, with the idle prefix repeated under unrelated
        // inputs: stay moves ignore the input part.
        let w = LassoWord {
            stem: vec![letter(0, 2, 2), letter(0, 1, 1)],
            cycle: vec![letter(0, 0, 0), letter(1, 2, 0)],
        };
        assert!(accepts_lasso(&expansion("A_012"), &w));
        assert!(accepts_lasso(&expansion("A_1"), &w));
    }

    #[test]
    fn advances_consume_the_input_of_the_last_block_position() {
        // r -> g1 needs x1=0 at the final idle position; here x1 is never 0
        // there, so no cut advances and the word is rejected.
        let w = LassoWord {
            stem: vec![],
            cycle: vec![letter(0, 1, 1), letter(1, 2, 1)],
        };
        // x1=1, x2=1 blocks both grant transitions, and the completion
        // self-loop never produces the grant value the next letter shows.
        assert!(!accepts_lasso(&expansion("A_1"), &w));
        assert!(!accepts_lasso(&expansion("A_2"), &w));
    }

    #[test]
    fn constant_word_can_ride_completion_loops_when_all_states_accept() {
        // The controller's completion loop at the idle state fires on
        // inputs blocking both grants, so an idle-forever word is a cut
        // with infinitely many (self-)advances.
        let w = LassoWord {
            stem: vec![],
            cycle: vec![letter(0, 1, 2)],
        };
        assert!(accepts_lasso(&expansion("A_012"), &w));
        // With acceptance on a grant state only, idling forever fails.
        assert!(!accepts_lasso(&expansion("A_1"), &w));
    }

    #[test]
    fn constant_word_without_an_enabled_transition_is_rejected() {
        // x1=0 enables the move to the first grant state (whose label the
        // word never shows) and disables the completion loop: no cut.
        let w = LassoWord {
            stem: vec![],
            cycle: vec![letter(0, 0, 0)],
        };
        assert!(!accepts_lasso(&expansion("A_012"), &w));
    }

    #[test]
    fn first_letter_must_match_the_initial_label() {
        // A rotation of an accepted word that starts on a grant value.
        let w = LassoWord {
            stem: vec![],
            cycle: vec![letter(1, 2, 1), letter(0, 0, 1)],
        };
        assert!(!accepts_lasso(&expansion("A_012"), &w));
    }

    #[test]
    fn empty_accepting_set_rejects_everything() {
        let (_, assumptions) = gen_tgc(2);
        let hollow = Assumption {
            name: "hollow".into(),
            module: assumptions["A_012"].module.clone(),
            accepting: BTreeSet::new(),
        };
        assert_eq!(find_accepting_lasso(&stutter_expand(&hollow)), None);
    }
}
