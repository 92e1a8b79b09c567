//! Büchi complementation via word profiles.
//!
//! The profile of a finite non-empty word records, for every pair of states
//! `(p, q)`, whether the automaton can read the word from `p` to `q` (and
//! if so, whether some such path visits the accepting set). Profiles
//! multiply like matrices and form a finite monoid. Every infinite word
//! admits a factorization `u · v₁ · v₂ · …` where `τ(u) = g`, `τ(vᵢ) = h`
//! for a pair with `g·h = g` and `h·h = h`, and acceptance of the word
//! depends only on `(g, h)`: the word is accepted iff some initial state
//! reaches, via `g`, a state with an accepting `h`-loop. The complement is
//! therefore the union, over the pairs certifying rejection, of the words
//! admitting such a factorization — recognized by tracking the profile of
//! the prefix read so far (phase one) and then of the current block
//! (phase two, one copy per certifying loop profile).

use super::{degeneralize, prune, Acceptance, BuchiAutomaton, Edge, LetterSet, OmegaError};
use std::collections::{BTreeMap, BTreeSet};

/// Default bound on the number of states a complement may use.
pub const DEFAULT_COMPLEMENT_CAP: usize = 100_000;

/// Entry `p·n + q` of a profile is 0 (no path), 1 (a path, none through
/// acceptance) or 2 (a path through acceptance).
type Profile = Vec<u8>;

fn multiply(n: usize, a: &Profile, b: &Profile) -> Profile {
    let mut c = vec![0u8; n * n];
    for p in 0..n {
        for q in 0..n {
            let x = a[p * n + q];
            if x == 0 {
                continue;
            }
            for r in 0..n {
                let y = b[q * n + r];
                if y == 0 {
                    continue;
                }
                let v = x.max(y);
                let cell = &mut c[p * n + r];
                if v > *cell {
                    *cell = v;
                }
            }
        }
    }
    c
}

/// Automaton accepting exactly the words `a` rejects.
///
/// `cap` bounds the number of states built before pruning; exceeding it
/// yields [`OmegaError::AssumptionTooLarge`]. Transition-marked input is
/// degeneralized first.
pub fn complement(a: &BuchiAutomaton, cap: usize) -> Result<BuchiAutomaton, OmegaError> {
    let normalized;
    let a = match &a.acceptance {
        Acceptance::StateBased(_) => a,
        Acceptance::TransitionMarked(_) => {
            normalized = degeneralize(a);
            &normalized
        }
    };
    let accepting = match &a.acceptance {
        Acceptance::StateBased(f) => f,
        Acceptance::TransitionMarked(_) => unreachable!(),
    };
    let n = a.n_states;
    let n_letters = a.alphabet.n_letters() as usize;

    // Profile of each single letter.
    let mut letter_profiles = vec![vec![0u8; n * n]; n_letters];
    for e in &a.edges {
        let v = if accepting.contains(&e.from) || accepting.contains(&e.to) {
            2
        } else {
            1
        };
        for &l in &e.letters {
            let cell = &mut letter_profiles[l as usize][e.from * n + e.to];
            if v > *cell {
                *cell = v;
            }
        }
    }

    // Monoid closure under right multiplication by letters, starting from
    // the identity (the empty word). Everything except possibly the
    // identity is realized by a non-empty word.
    let mut id = vec![0u8; n * n];
    for p in 0..n {
        id[p * n + p] = 1;
    }
    let mut elements: Vec<Profile> = vec![id.clone()];
    let mut index: BTreeMap<Profile, usize> = [(id.clone(), 0)].into();
    let mut realized: Vec<bool> = vec![false];
    let mut mul_letter: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    while next < elements.len() {
        let mut row = Vec::with_capacity(n_letters);
        for lp in &letter_profiles {
            let product = multiply(n, &elements[next], lp);
            let idx = match index.get(&product) {
                Some(&i) => i,
                None => {
                    let i = elements.len();
                    if i >= cap {
                        return Err(OmegaError::AssumptionTooLarge { cap });
                    }
                    elements.push(product.clone());
                    index.insert(product, i);
                    realized.push(false);
                    i
                }
            };
            realized[idx] = true;
            row.push(idx);
        }
        mul_letter.push(row);
        next += 1;
    }
    let m = elements.len();

    // A pair (g, h) certifies rejection when it is linked (g·h = g,
    // h·h = h, h realized by non-empty words) and no initial state reaches,
    // via g, a state carrying an accepting h-loop.
    let idempotents: Vec<usize> = (0..m)
        .filter(|&h| realized[h] && multiply(n, &elements[h], &elements[h]) == elements[h])
        .collect();
    let mut g_to_hs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut used_h: BTreeSet<usize> = BTreeSet::new();
    for g in 0..m {
        if g != 0 && !realized[g] {
            continue;
        }
        for &h in &idempotents {
            if multiply(n, &elements[g], &elements[h]) != elements[g] {
                continue;
            }
            let witnessed = a.initial.iter().any(|&q0| {
                (0..n).any(|q| elements[g][q0 * n + q] >= 1 && elements[h][q * n + q] == 2)
            });
            if !witnessed {
                g_to_hs.entry(g).or_default().push(h);
                used_h.insert(h);
            }
        }
    }

    // Phase-one states are monoid elements; each used loop profile h gets a
    // phase-two block of states (element, closed-flag).
    let h_order: Vec<usize> = used_h.iter().copied().collect();
    let h_base: BTreeMap<usize, usize> = h_order
        .iter()
        .enumerate()
        .map(|(i, &h)| (h, m + i * 2 * m))
        .collect();
    let total = m + 2 * m * h_order.len();
    if total > cap {
        return Err(OmegaError::AssumptionTooLarge { cap });
    }

    // Group single-letter moves into letter sets per (from, to).
    let mut grouped: BTreeMap<(usize, usize), LetterSet> = BTreeMap::new();
    let mut add = |from: usize, to: usize, l: u32| {
        grouped.entry((from, to)).or_default().insert(l);
    };
    for e in 0..m {
        for l in 0..n_letters {
            let t = mul_letter[e][l];
            // Continue tracking the prefix profile.
            add(e, t, l as u32);
            // If the prefix now has profile g, the next letter may instead
            // have opened the first block of a certifying pair.
            if let Some(hs) = g_to_hs.get(&t) {
                for h in hs {
                    add(e, h_base[h], l as u32);
                }
            }
            for (&h, &base) in &h_base {
                for star in 0..2 {
                    // Extend the current block...
                    add(base + e * 2 + star, base + t * 2, l as u32);
                    // ...or close it if its profile reached h.
                    if t == h {
                        add(base + e * 2 + star, base + 1, l as u32);
                    }
                }
            }
        }
    }
    let edges: Vec<Edge> = grouped
        .into_iter()
        .map(|((from, to), letters)| Edge { from, letters, to })
        .collect();

    let mut initial: BTreeSet<usize> = [0].into();
    // An empty prefix (g = identity) starts directly in phase two.
    if let Some(hs) = g_to_hs.get(&0) {
        for h in hs {
            initial.insert(h_base[h]);
        }
    }
    let acceptance: BTreeSet<usize> = h_base.values().map(|&base| base + 1).collect();
    Ok(prune(&BuchiAutomaton {
        alphabet: a.alphabet.clone(),
        n_states: total,
        edges,
        initial,
        acceptance: Acceptance::StateBased(acceptance),
    }))
}
