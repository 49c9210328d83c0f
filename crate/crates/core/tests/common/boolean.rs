//! Brute force over interpretations of actions as sets of events.

use dpl::syntax::ActionTerm;

/// Events of an interpretation as action-membership bit profiles; the
/// result is the set of events (bit `i` = event `i`) denoted by `t`.
pub fn eval(t: &ActionTerm, profiles: &[u32], names: &[String]) -> u32 {
    let all = (1u32 << profiles.len()) - 1;
    match t {
        ActionTerm::Prim(x) => {
            let i = names.iter().position(|n| n == x).unwrap();
            profiles
                .iter()
                .enumerate()
                .filter(|(_, p)| *p & (1 << i) != 0)
                .fold(0, |acc, (e, _)| acc | 1 << e)
        }
        ActionTerm::Meet(l, r) => eval(l, profiles, names) & eval(r, profiles, names),
        ActionTerm::Join(l, r) => eval(l, profiles, names) | eval(r, profiles, names),
        ActionTerm::Compl(x) => all & !eval(x, profiles, names),
        ActionTerm::Empty => 0,
        ActionTerm::Univ => all,
    }
}

/// The interpretation conditions: every event lies in some action, and no
/// two events lie in exactly the same actions.
pub fn conforms(profiles: &[u32]) -> bool {
    profiles.iter().all(|&p| p != 0)
        && profiles
            .iter()
            .enumerate()
            .all(|(i, p)| !profiles[..i].contains(p))
}

/// Every conforming interpretation over `n` actions. Up to three events
/// every profile tuple is tried; beyond that events are taken in increasing
/// profile order, since renaming events cannot change whether two terms
/// denote the same set.
pub fn interpretations(n: usize) -> Vec<Vec<u32>> {
    let patterns = 1u32 << n;
    let mut out = Vec::new();
    for size in 1..patterns as usize {
        if size <= 3 {
            let total = patterns.pow(size as u32);
            for code in 0..total {
                let profiles: Vec<u32> = (0..size)
                    .map(|i| (code / patterns.pow(i as u32)) % patterns)
                    .collect();
                if conforms(&profiles) {
                    out.push(profiles);
                }
            }
        } else {
            for set in 0u32..1 << (patterns - 1) {
                if set.count_ones() as usize == size {
                    out.push((1..patterns).filter(|p| set & 1 << (p - 1) != 0).collect());
                }
            }
        }
    }
    out
}

/// `Γ ⊨ t1 = t2` in every interpretation of `interps` satisfying `Γ`.
pub fn brute_force_equal(
    names: &[String],
    gamma: &[(ActionTerm, ActionTerm)],
    t1: &ActionTerm,
    t2: &ActionTerm,
    interps: &[Vec<u32>],
) -> bool {
    interps
        .iter()
        .filter(|p| gamma.iter().all(|(l, r)| eval(l, p, names) == eval(r, p, names)))
        .all(|p| eval(t1, p, names) == eval(t2, p, names))
}

