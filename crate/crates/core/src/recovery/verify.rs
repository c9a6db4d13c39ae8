use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::recovery::encoder::Encoder;
use crate::recovery::serve::{serve_query, Query, ServeOutcome, ServingPlan};
use crate::recovery::sets::{RecoveryFamily, RecoverySet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Pir,
    Batch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    /// Some query was neither served nor proven unservable within budget.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub t: usize,
    /// `None` means unbounded width.
    pub w: Option<usize>,
    pub mu: usize,
}

/// How one query of the verification ended.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum QueryResult {
    Served {
        /// Recovery sets, 1-based positions, one per request.
        sets: Vec<RecoverySet>,
        width: usize,
        multiplicity: usize,
        /// Taken from a supplied witness rather than found by search.
        from_witness: bool,
    },
    Unservable,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryEntry {
    pub query: Query,
    #[serde(flatten)]
    pub result: QueryResult,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_us: u64,
    pub witnesses_rejected: usize,
}

/// Machine-readable verification report; every positive verdict carries
/// witnesses that can be re-checked without trusting the search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub property: Property,
    pub parameters: Parameters,
    pub k: usize,
    pub n: usize,
    pub verdict: Verdict,
    pub complete: bool,
    pub queries: Vec<QueryEntry>,
    pub stats: SearchStats,
}

impl VerificationReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    /// Re-checks every witnessed plan in the report against the encoder.
    pub fn recheck(&self, e: &Encoder) -> Result<()> {
        for entry in &self.queries {
            if let QueryResult::Served {
                sets,
                width,
                multiplicity,
                ..
            } = &entry.result
            {
                let plan = ServingPlan {
                    sets: sets.clone(),
                    width: *width,
                    multiplicity: *multiplicity,
                };
                plan.check(e, &entry.query, self.parameters.w, self.parameters.mu)?;
            }
        }
        Ok(())
    }

    /// The serving plans, per query, as 1-based position lists.
    pub fn witness_sets(&self) -> Vec<Option<Vec<Vec<usize>>>> {
        self.queries
            .iter()
            .map(|q| match &q.result {
                QueryResult::Served { sets, .. } => {
                    Some(sets.iter().map(|s| s.positions().to_vec()).collect())
                }
                _ => None,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }
}

fn summarize(
    property: Property,
    parameters: Parameters,
    e: &Encoder,
    results: Vec<(QueryEntry, u64, bool)>,
    start: Instant,
) -> VerificationReport {
    let nodes = results.iter().map(|r| r.1).sum();
    let witnesses_rejected = results.iter().filter(|r| r.2).count();
    let queries: Vec<QueryEntry> = results.into_iter().map(|r| r.0).collect();
    let any_unservable = queries.iter().any(|q| q.result == QueryResult::Unservable);
    let any_exhausted = queries
        .iter()
        .any(|q| q.result == QueryResult::BudgetExhausted);
    let verdict = if any_unservable {
        Verdict::Fails
    } else if any_exhausted {
        Verdict::Unknown
    } else {
        Verdict::Holds
    };
    VerificationReport {
        property,
        parameters,
        k: e.k(),
        n: e.n(),
        verdict,
        complete: !any_exhausted,
        queries,
        stats: SearchStats {
            nodes,
            elapsed_us: start.elapsed().as_micros() as u64,
            witnesses_rejected,
        },
    }
}

fn serve_entry(
    e: &Encoder,
    q: Query,
    w: Option<usize>,
    mu: usize,
    budget: Budget,
) -> Result<(QueryEntry, u64)> {
    let (outcome, nodes) = serve_query(e, &q, w, mu, budget)?;
    let result = match outcome {
        ServeOutcome::Served(p) => QueryResult::Served {
            sets: p.sets,
            width: p.width,
            multiplicity: p.multiplicity,
            from_witness: false,
        },
        ServeOutcome::Unservable => QueryResult::Unservable,
        ServeOutcome::BudgetExhausted => QueryResult::BudgetExhausted,
    };
    Ok((QueryEntry { query: q, result }, nodes))
}

/// Checks the (t, w, μ)-PIR property: every constant query `j,…,j` (t times)
/// is servable. Supplied witness families are checked directly; a bit whose
/// witness is missing or invalid falls back to search.
pub fn verify_pir(
    e: &Encoder,
    t: usize,
    w: Option<usize>,
    mu: usize,
    witnesses: Option<&[RecoveryFamily]>,
    budget: Budget,
) -> Result<VerificationReport> {
    if t == 0 || mu == 0 {
        return Err(Error::InvalidArgument("t and mu must be at least 1".into()));
    }
    let start = Instant::now();
    let params = Parameters { t, w, mu };
    let k = e.k();
    let results: Result<Vec<_>> = (1..=k)
        .into_par_iter()
        .map(|j| {
            let q = Query::constant(j, t, k)?;
            let mut rejected = false;
            if let Some(family) = witnesses.and_then(|ws| ws.iter().find(|f| f.bit == j)) {
                if family.sets.len() >= t {
                    let plan = ServingPlan::from_sets(family.sets[..t].to_vec());
                    if plan.check(e, &q, w, mu).is_ok() {
                        let entry = QueryEntry {
                            query: q,
                            result: QueryResult::Served {
                                sets: plan.sets,
                                width: plan.width,
                                multiplicity: plan.multiplicity,
                                from_witness: true,
                            },
                        };
                        return Ok((entry, 0, false));
                    }
                }
                rejected = true;
            }
            let (entry, nodes) = serve_entry(e, q, w, mu, budget)?;
            Ok((entry, nodes, rejected))
        })
        .collect();
    Ok(summarize(Property::Pir, params, e, results?, start))
}

/// All multisets of size `t` over `1..=k`, as nondecreasing sequences in lexicographic order.
pub fn multisets(k: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![1; t];
    loop {
        out.push(cur.clone());
        let Some(i) = (0..t).rev().find(|&i| cur[i] < k) else {
            break;
        };
        let v = cur[i] + 1;
        for x in cur[i..].iter_mut() {
            *x = v;
        }
    }
    out
}

/// Checks the t-batch property: every multiset query of size `t` is servable
/// with disjoint sets of unbounded width. The budget applies per query.
pub fn verify_batch(e: &Encoder, t: usize, budget: Budget) -> Result<VerificationReport> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    let start = Instant::now();
    let params = Parameters { t, w: None, mu: 1 };
    let queries = multisets(e.k(), t);
    let results: Result<Vec<_>> = queries
        .into_par_iter()
        .map(|requests| {
            let q = Query::new(requests, e.k())?;
            let (entry, nodes) = serve_entry(e, q, None, 1, budget)?;
            Ok((entry, nodes, false))
        })
        .collect();
    Ok(summarize(Property::Batch, params, e, results?, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{parse_matrix, BitMatrix};

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(3, 2).len(), 6);
        assert_eq!(multisets(6, 3).len(), 56);
        assert_eq!(multisets(2, 2), vec![vec![1, 1], vec![1, 2], vec![2, 2]]);
    }

    #[test]
    fn repetition_is_3_pir() {
        let e = Encoder::linear(parse_matrix("111").unwrap()).unwrap();
        let r = verify_pir(&e, 3, None, 1, None, Budget::UNLIMITED).unwrap();
        assert!(r.holds());
        assert_eq!(r.witness_sets()[0], Some(vec![vec![1], vec![2], vec![3]]));
        let r = verify_pir(&e, 4, None, 1, None, Budget::UNLIMITED).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn identity_is_1_batch() {
        let e = Encoder::linear(BitMatrix::identity(4)).unwrap();
        assert!(verify_batch(&e, 1, Budget::UNLIMITED).unwrap().holds());
        assert_eq!(
            verify_batch(&e, 2, Budget::UNLIMITED).unwrap().verdict,
            Verdict::Fails
        );
    }

    #[test]
    fn bad_witness_falls_back_to_search() {
        let e = Encoder::linear(parse_matrix("111").unwrap()).unwrap();
        let bogus = RecoveryFamily {
            bit: 1,
            sets: vec![
                RecoverySet::new(vec![1], 3).unwrap(),
                RecoverySet::new(vec![1], 3).unwrap(),
                RecoverySet::new(vec![2], 3).unwrap(),
            ],
        };
        let r = verify_pir(&e, 3, None, 1, Some(&[bogus]), Budget::UNLIMITED).unwrap();
        assert!(r.holds());
        assert_eq!(r.stats.witnesses_rejected, 1);
    }

    #[test]
    fn report_json_round_trip() {
        let e = Encoder::linear(parse_matrix("10110\n01101").unwrap()).unwrap();
        let r = verify_pir(&e, 3, None, 1, None, Budget::UNLIMITED).unwrap();
        let json = r.to_json();
        let back = VerificationReport::from_json(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), json);
        back.recheck(&e).unwrap();
    }
}
