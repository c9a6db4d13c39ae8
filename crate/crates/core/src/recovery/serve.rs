use serde::{Deserialize, Serialize};

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::gf2::Word;
use crate::recovery::encoder::Encoder;
use crate::recovery::sets::{minimal_sets_metered, Oracle, RecoverySet};

/// A sequence of requested data indices (repeats allowed).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Query(Vec<usize>);

impl Query {
    pub fn new(requests: Vec<usize>, k: usize) -> Result<Self> {
        if requests.is_empty() {
            return Err(Error::InvalidArgument(
                "a query needs at least one request".into(),
            ));
        }
        if let Some(&j) = requests.iter().find(|&&j| j == 0 || j > k) {
            return Err(Error::IndexOutOfRange { index: j, k });
        }
        Ok(Self(requests))
    }

    /// `j` repeated `t` times.
    pub fn constant(j: usize, t: usize, k: usize) -> Result<Self> {
        Self::new(vec![j; t], k)
    }

    pub fn requests(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One recovery set per request, with the measured width and multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServingPlan {
    pub sets: Vec<RecoverySet>,
    pub width: usize,
    pub multiplicity: usize,
}

impl ServingPlan {
    pub fn from_sets(sets: Vec<RecoverySet>) -> Self {
        let width = sets.iter().map(RecoverySet::len).max().unwrap_or(0);
        let mut counts = std::collections::HashMap::<usize, usize>::new();
        for s in &sets {
            for &p in s.positions() {
                *counts.entry(p).or_default() += 1;
            }
        }
        let multiplicity = counts.values().copied().max().unwrap_or(0);
        Self {
            sets,
            width,
            multiplicity,
        }
    }

    /// Re-checks the plan against the encoder: set `s` must recover request `s`.
    pub fn check(&self, e: &Encoder, q: &Query, w: Option<usize>, mu: usize) -> Result<()> {
        if self.sets.len() != q.len() {
            return Err(Error::InvalidArgument(format!(
                "plan has {} sets for {} requests",
                self.sets.len(),
                q.len()
            )));
        }
        let recomputed = ServingPlan::from_sets(self.sets.clone());
        if recomputed.width != self.width || recomputed.multiplicity != self.multiplicity {
            return Err(Error::InvalidArgument(
                "plan statistics do not match its sets".into(),
            ));
        }
        if w.is_some_and(|w| self.width > w) || self.multiplicity > mu {
            return Err(Error::InvalidArgument(format!(
                "plan has width {} and multiplicity {}, caps are {:?} and {mu}",
                self.width, self.multiplicity, w
            )));
        }
        let mut oracle = Oracle::new(e);
        for (s, &j) in self.sets.iter().zip(q.requests()) {
            let s = RecoverySet::new(s.positions().to_vec(), e.n())?;
            if !oracle.check(j, &s.mask(e.n())) {
                return Err(Error::InvalidArgument(format!(
                    "{:?} does not recover bit {j}",
                    s.positions()
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of [`serve_query`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ServeOutcome {
    Served(ServingPlan),
    /// Complete search: no plan within the caps exists.
    Unservable,
    BudgetExhausted,
}

/// Assigns recovery sets to the requests of `q` with width at most `w`
/// (`None` = unbounded) and every position used by at most `mu` sets.
///
/// Only minimal recovery sets are considered; shrinking any set of a valid
/// plan to a minimal subset keeps it valid, so this loses nothing.
pub fn serve_query(
    e: &Encoder,
    q: &Query,
    w: Option<usize>,
    mu: usize,
    budget: Budget,
) -> Result<(ServeOutcome, u64)> {
    if mu == 0 {
        return Err(Error::InvalidArgument(
            "multiplicity cap must be at least 1".into(),
        ));
    }
    if w == Some(0) {
        return Err(Error::InvalidArgument(
            "width cap must be at least 1".into(),
        ));
    }
    Query::new(q.requests().to_vec(), e.k())?;
    let n = e.n();
    let max_width = w.unwrap_or(n).min(n);
    let mut meter = budget.meter();

    let mut bits: Vec<usize> = q.requests().to_vec();
    bits.sort_unstable();
    bits.dedup();
    let mut candidates: Vec<(usize, Vec<RecoverySet>)> = Vec::with_capacity(bits.len());
    for &j in &bits {
        let sets = minimal_sets_metered(e, j, max_width, &mut meter);
        candidates.push((j, sets));
    }
    let enumeration_complete = !meter.exhausted();

    // most constrained bit first, identical requests adjacent
    let mut order: Vec<usize> = (0..q.len()).collect();
    let rank = |j: usize| candidates.iter().position(|(b, _)| *b == j).unwrap();
    order.sort_by_key(|&i| {
        let j = q.requests()[i];
        (candidates[rank(j)].1.len(), j, i)
    });
    let slots: Vec<Slot> = order
        .iter()
        .map(|&i| {
            let r = rank(q.requests()[i]);
            Slot {
                request: i,
                group: r,
            }
        })
        .collect();
    let masks: Vec<Vec<(Word, &RecoverySet)>> = candidates
        .iter()
        .map(|(_, sets)| sets.iter().map(|s| (s.mask(n), s)).collect())
        .collect();

    let mut search = Assign {
        slots: &slots,
        masks: &masks,
        usage: vec![0; n + 1],
        mu,
        choice: vec![0; slots.len()],
        meter: &mut meter,
    };
    let found = search.run(0);
    let outcome = if found {
        let mut sets = vec![RecoverySet::new(vec![1], n)?; q.len()];
        for (slot, &c) in slots.iter().zip(&search.choice) {
            sets[slot.request] = masks[slot.group][c].1.clone();
        }
        let plan = ServingPlan::from_sets(sets);
        plan.check(e, q, w, mu)?;
        ServeOutcome::Served(plan)
    } else if enumeration_complete && !meter.exhausted() {
        ServeOutcome::Unservable
    } else {
        ServeOutcome::BudgetExhausted
    };
    Ok((outcome, meter.used()))
}

struct Slot {
    request: usize,
    group: usize,
}

struct Assign<'a, 'm> {
    slots: &'a [Slot],
    masks: &'a [Vec<(Word, &'a RecoverySet)>],
    usage: Vec<usize>,
    mu: usize,
    choice: Vec<usize>,
    meter: &'m mut Meter,
}

impl Assign<'_, '_> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.slots.len() {
            return true;
        }
        let group = self.slots[depth].group;
        // symmetric requests take candidates in nondecreasing order
        let start = if depth > 0 && self.slots[depth - 1].group == group {
            self.choice[depth - 1] + usize::from(self.mu == 1)
        } else {
            0
        };
        let cands = self.masks[group].len();
        for c in start..cands {
            if !self.meter.tick() {
                return false;
            }
            let set = self.masks[group][c].1;
            if set.positions().iter().any(|&p| self.usage[p] >= self.mu) {
                continue;
            }
            for &p in set.positions() {
                self.usage[p] += 1;
            }
            self.choice[depth] = c;
            if self.run(depth + 1) {
                return true;
            }
            for &p in set.positions() {
                self.usage[p] -= 1;
            }
            if self.meter.exhausted() {
                return false;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{parse_matrix, BitMatrix};

    fn plan_sets(p: &ServingPlan) -> Vec<Vec<usize>> {
        p.sets.iter().map(|s| s.positions().to_vec()).collect()
    }

    #[test]
    fn identity_serves_distinct_requests() {
        let e = Encoder::linear(BitMatrix::identity(3)).unwrap();
        let q = Query::new(vec![1, 2, 3], 3).unwrap();
        let (out, _) = serve_query(&e, &q, Some(1), 1, Budget::UNLIMITED).unwrap();
        let ServeOutcome::Served(p) = out else {
            panic!("expected a plan")
        };
        assert_eq!(plan_sets(&p), vec![vec![1], vec![2], vec![3]]);
        assert_eq!((p.width, p.multiplicity), (1, 1));
    }

    #[test]
    fn constant_query_on_small_code() {
        let e = Encoder::linear(parse_matrix("10110\n01101").unwrap()).unwrap();
        let q = Query::constant(1, 3, 2).unwrap();
        let (out, _) = serve_query(&e, &q, None, 1, Budget::UNLIMITED).unwrap();
        let ServeOutcome::Served(p) = out else {
            panic!("expected a plan")
        };
        assert_eq!(plan_sets(&p), vec![vec![1], vec![4], vec![2, 3]]);
        assert_eq!(p.width, 2);
    }

    #[test]
    fn pigeonhole_unservable() {
        let e = Encoder::linear(parse_matrix("111").unwrap()).unwrap();
        let q = Query::constant(1, 4, 1).unwrap();
        let (out, _) = serve_query(&e, &q, None, 1, Budget::UNLIMITED).unwrap();
        assert_eq!(out, ServeOutcome::Unservable);
        let (out, _) = serve_query(&e, &q, None, 2, Budget::UNLIMITED).unwrap();
        assert!(matches!(out, ServeOutcome::Served(p) if p.multiplicity == 2));
    }

    #[test]
    fn width_cap_respected() {
        let e = Encoder::linear(parse_matrix("10110\n01101").unwrap()).unwrap();
        let q = Query::constant(1, 3, 2).unwrap();
        let (out, _) = serve_query(&e, &q, Some(1), 1, Budget::UNLIMITED).unwrap();
        assert_eq!(out, ServeOutcome::Unservable);
    }

    #[test]
    fn tiny_budget_is_not_a_proof() {
        let e = Encoder::linear(parse_matrix("10110\n01101").unwrap())
            .unwrap()
            .to_explicit()
            .unwrap();
        let q = Query::constant(1, 3, 2).unwrap();
        let (out, _) = serve_query(&e, &q, None, 1, Budget(2)).unwrap();
        assert_eq!(out, ServeOutcome::BudgetExhausted);
    }
}
