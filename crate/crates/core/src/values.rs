//! Finite value domains and variable valuations.
//!
//! Every variable of a system ranges over one shared finite domain
//! `{0, 1, ..., size-1}`. A [`Valuation`] is a finite partial assignment of
//! domain values to named variables; total valuations over a module's input
//! variables act as input letters, and total valuations over its state
//! variables act as state labels.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A single domain element.
pub type Value = u32;

/// The shared finite domain `{0, 1, ..., size-1}` of a system.
///
/// The canonical enumeration order is the numeric order of the values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Domain {
    size: u32,
}

impl Domain {
    /// Creates a domain with `size` values. Panics if `size` is zero.
    pub fn new(size: u32) -> Self {
        assert!(size > 0, "domain must be non-empty");
        Domain { size }
    }

    /// Number of values in the domain.
    pub fn size(&self) -> u32 {
        self.size
    }

    /// Whether `v` is a member of the domain.
    pub fn contains(&self, v: Value) -> bool {
        v < self.size
    }

    /// All values in canonical order.
    pub fn values(&self) -> impl Iterator<Item = Value> {
        0..self.size
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0..{}", self.size - 1)
    }
}

/// A finite partial assignment of values to named variables.
///
/// The scope of the valuation is exactly the set of assigned variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Valuation(BTreeMap<String, Value>);

impl Valuation {
    /// The empty valuation (empty scope).
    pub fn new() -> Self {
        Valuation(BTreeMap::new())
    }

    /// Builds a valuation from `(variable, value)` pairs.
    pub fn from_pairs<S: Into<String>, I: IntoIterator<Item = (S, Value)>>(pairs: I) -> Self {
        Valuation(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    /// Builder-style insertion.
    pub fn with<S: Into<String>>(mut self, var: S, val: Value) -> Self {
        self.0.insert(var.into(), val);
        self
    }

    /// Assigns `val` to `var`, replacing any previous assignment.
    pub fn set<S: Into<String>>(&mut self, var: S, val: Value) {
        self.0.insert(var.into(), val);
    }

    /// The value of `var`, if assigned.
    pub fn get(&self, var: &str) -> Option<Value> {
        self.0.get(var).copied()
    }

    /// Whether `var` is in scope.
    pub fn defines(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    /// The scope, in sorted order.
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(|s| s.as_str())
    }

    /// `(variable, value)` pairs in sorted variable order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Number of assigned variables.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether the scope is empty.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether the scope is exactly `vars`.
    pub fn covers_exactly(&self, vars: &BTreeSet<String>) -> bool {
        self.0.len() == vars.len() && self.0.keys().all(|k| vars.contains(k))
    }

    /// The restriction of this valuation to the variables in `vars`.
    pub fn restrict<'a, I: IntoIterator<Item = &'a str>>(&self, vars: I) -> Valuation {
        Valuation(
            vars.into_iter()
                .filter_map(|v| self.0.get(v).map(|x| (v.to_string(), *x)))
                .collect(),
        )
    }

    /// The restriction of this valuation to variables *not* in `vars`.
    pub fn without(&self, vars: &BTreeSet<String>) -> Valuation {
        Valuation(
            self.0
                .iter()
                .filter(|(k, _)| !vars.contains(*k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        )
    }

    /// Compatibility: the two valuations agree on every shared variable.
    pub fn compatible(&self, other: &Valuation) -> bool {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .0
            .iter()
            .all(|(k, v)| big.0.get(k).map_or(true, |w| w == v))
    }

    /// Union of two compatible valuations; `None` if they conflict.
    pub fn union(&self, other: &Valuation) -> Option<Valuation> {
        if !self.compatible(other) {
            return None;
        }
        let mut map = self.0.clone();
        for (k, v) in &other.0 {
            map.insert(k.clone(), *v);
        }
        Some(Valuation(map))
    }

    /// Whether `other` is a sub-assignment of this valuation
    /// (every variable of `other` is assigned the same value here).
    pub fn extends(&self, other: &Valuation) -> bool {
        other
            .0
            .iter()
            .all(|(k, v)| self.0.get(k).map_or(false, |w| w == v))
    }

    /// All total valuations over `vars` with values drawn from `domain`,
    /// enumerated in canonical order: earlier variables (in sorted order)
    /// are most significant, the last variable changes fastest.
    pub fn enumerate(vars: &BTreeSet<String>, domain: Domain) -> ValuationIter {
        ValuationIter {
            vars: vars.iter().cloned().collect(),
            domain,
            digits: Some(vec![0; vars.len()]),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.0 {
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Iterator over all total valuations over a fixed variable set.
pub struct ValuationIter {
    vars: Vec<String>,
    domain: Domain,
    digits: Option<Vec<Value>>,
}

impl Iterator for ValuationIter {
    type Item = Valuation;

    fn next(&mut self) -> Option<Valuation> {
        let digits = self.digits.as_mut()?;
        let item = Valuation(
            self.vars
                .iter()
                .cloned()
                .zip(digits.iter().copied())
                .collect(),
        );
        // Advance the odometer; the last variable is the fastest digit.
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                self.digits = None;
                break;
            }
            pos -= 1;
            if digits[pos] + 1 < self.domain.size() {
                digits[pos] += 1;
                for d in digits[pos + 1..].iter_mut() {
                    *d = 0;
                }
                break;
            }
        }
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn compatible_on_disjoint_scopes() {
        let a = Valuation::from_pairs([("s", 1)]);
        let b = Valuation::from_pairs([("x", 0)]);
        assert!(a.compatible(&b));
    }

    #[test]
    fn compatible_requires_agreement_on_shared_vars() {
        let a = Valuation::from_pairs([("s", 1)]);
        let b = Valuation::from_pairs([("s", 1), ("x", 0)]);
        let c = Valuation::from_pairs([("s", 2)]);
        assert!(a.compatible(&b));
        assert!(!a.compatible(&c));
    }

    #[test]
    fn union_of_disjoint_and_overlapping() {
        let a = Valuation::from_pairs([("s", 1)]);
        let b = Valuation::from_pairs([("x", 0)]);
        assert_eq!(
            a.union(&b).unwrap(),
            Valuation::from_pairs([("s", 1), ("x", 0)])
        );
        assert_eq!(a.union(&a).unwrap(), a);
        let c = Valuation::from_pairs([("s", 1), ("x", 0)]);
        let d = Valuation::from_pairs([("x", 0), ("y", 2)]);
        assert_eq!(
            c.union(&d).unwrap(),
            Valuation::from_pairs([("s", 1), ("x", 0), ("y", 2)])
        );
    }

    #[test]
    fn union_rejects_conflicts() {
        let a = Valuation::from_pairs([("s", 1)]);
        let c = Valuation::from_pairs([("s", 2)]);
        assert_eq!(a.union(&c), None);
    }

    #[test]
    fn enumerate_orders_last_variable_fastest() {
        let d = Domain::new(2);
        let all: Vec<Valuation> = Valuation::enumerate(&vars(&["a", "b"]), d).collect();
        assert_eq!(all.len(), 4);
        assert_eq!(all[0], Valuation::from_pairs([("a", 0), ("b", 0)]));
        assert_eq!(all[1], Valuation::from_pairs([("a", 0), ("b", 1)]));
        assert_eq!(all[2], Valuation::from_pairs([("a", 1), ("b", 0)]));
        assert_eq!(all[3], Valuation::from_pairs([("a", 1), ("b", 1)]));
    }

    #[test]
    fn enumerate_empty_scope_yields_single_empty_valuation() {
        let d = Domain::new(3);
        let all: Vec<Valuation> = Valuation::enumerate(&vars(&[]), d).collect();
        assert_eq!(all, vec![Valuation::new()]);
    }

    #[test]
    fn restrict_and_without_partition_the_scope() {
        let v = Valuation::from_pairs([("a", 0), ("b", 1), ("c", 2)]);
        let keep = v.restrict(["a", "c"]);
        assert_eq!(keep, Valuation::from_pairs([("a", 0), ("c", 2)]));
        let drop = v.without(&vars(&["a", "c"]));
        assert_eq!(drop, Valuation::from_pairs([("b", 1)]));
    }

    #[test]
    fn extends_checks_sub_assignment() {
        let v = Valuation::from_pairs([("a", 0), ("b", 1)]);
        assert!(v.extends(&Valuation::from_pairs([("a", 0)])));
        assert!(v.extends(&Valuation::new()));
        assert!(!v.extends(&Valuation::from_pairs([("a", 1)])));
        assert!(!v.extends(&Valuation::from_pairs([("c", 0)])));
    }
}
