//! Pair packings: validity checks, the closed-form packing number for block
//! size 4, and greedy / exact constructors.
//!
//! Points are 1-based throughout. Constructors are specialized to strength 2
//! and λ = 1, where "packing" means any two blocks share at most one point.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::recovery::next_combination;

/// Largest point count handled by the constructors (blocks are stored as u64 point masks).
pub const MAX_POINTS: usize = 64;

/// A t-(v, blocksize, λ) packing: every t-subset of points lies in at most λ blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingDesign {
    pub v: usize,
    pub blocksize: usize,
    pub strength: usize,
    pub lambda: usize,
    /// Each block is an ascending list of 1-based points.
    pub blocks: Vec<Vec<usize>>,
}

/// Result of [`is_packing`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PackingCheck {
    Valid,
    /// Lexicographically first t-subset covered more than λ times.
    Violation {
        subset: Vec<usize>,
        count: usize,
    },
}

impl PackingCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, PackingCheck::Valid)
    }
}

impl PackingDesign {
    /// A pair packing (strength 2, λ = 1).
    pub fn pairs(v: usize, blocksize: usize, blocks: Vec<Vec<usize>>) -> Self {
        Self {
            v,
            blocksize,
            strength: 2,
            lambda: 1,
            blocks,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn check_shape(&self) -> Result<()> {
        if self.blocksize > self.v {
            return Err(Error::MalformedDesign(format!(
                "block size {} exceeds point count {}",
                self.blocksize, self.v
            )));
        }
        if self.strength == 0 || self.strength > self.blocksize {
            return Err(Error::MalformedDesign(format!(
                "strength {} must lie in 1..={}",
                self.strength, self.blocksize
            )));
        }
        for b in &self.blocks {
            if b.len() != self.blocksize {
                return Err(Error::MalformedDesign(format!(
                    "block {b:?} has size {}, expected {}",
                    b.len(),
                    self.blocksize
                )));
            }
            if b.iter().any(|&p| p == 0 || p > self.v) {
                return Err(Error::MalformedDesign(format!(
                    "block {b:?} has a point outside 1..={}",
                    self.v
                )));
            }
            if b.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::MalformedDesign(format!(
                    "block {b:?} is not strictly ascending"
                )));
            }
        }
        Ok(())
    }

    /// Parses the packing file format: header "v blocksize lambda", then one block per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        let nums = parse_numbers(header, hl)?;
        let [v, blocksize, lambda] = nums[..] else {
            return Err(Error::Parse {
                line: hl,
                msg: "header must be \"v blocksize lambda\"".into(),
            });
        };
        let mut blocks = Vec::new();
        for (i, l) in lines {
            blocks.push(parse_numbers(l, i)?);
        }
        let d = Self {
            v,
            blocksize,
            strength: 2,
            lambda,
            blocks,
        };
        d.check_shape()?;
        Ok(d)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.v, self.blocksize, self.lambda);
        for b in &self.blocks {
            let line: Vec<String> = b.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }
}

fn parse_numbers(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("{t:?}: {e}"),
            })
        })
        .collect()
}

/// Counts every t-subset over all blocks and reports the first one covered more than λ times.
pub fn is_packing(d: &PackingDesign) -> Result<PackingCheck> {
    d.check_shape()?;
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for b in &d.blocks {
        let mut idx: Vec<usize> = (1..=d.strength).collect();
        loop {
            let subset: Vec<usize> = idx.iter().map(|&i| b[i - 1]).collect();
            *counts.entry(subset).or_default() += 1;
            if !next_combination(&mut idx, d.blocksize) {
                break;
            }
        }
    }
    let worst = counts
        .into_iter()
        .filter(|(_, c)| *c > d.lambda)
        .min_by(|a, b| a.0.cmp(&b.0));
    Ok(match worst {
        None => PackingCheck::Valid,
        Some((subset, count)) => PackingCheck::Violation { subset, count },
    })
}

/// `⌊(r/4)·⌊(r−1)/3⌋⌋`, the Johnson-type upper bound for block size 4.
pub fn johnson_bound_4(r: usize) -> usize {
    r * ((r - 1) / 3) / 4
}

/// The packing number D(r, 4, 2) from the closed form: the Johnson bound,
/// reduced by one for r ≡ 7, 10 (mod 12), then by the correction ε for the
/// six exceptional orders.
pub fn packing_number_formula(r: usize) -> Result<usize> {
    if r < 4 {
        return Err(Error::InvalidArgument(format!(
            "packing number D(r,4,2) needs r >= 4, got {r}"
        )));
    }
    let u = johnson_bound_4(r);
    let j = if matches!(r % 12, 7 | 10) { u - 1 } else { u };
    let eps = match r {
        9 | 10 | 17 => 1,
        8 | 11 | 19 => 2,
        _ => 0,
    };
    Ok(j - eps)
}

#[inline]
fn block_mask(points: &[usize]) -> u64 {
    points.iter().fold(0u64, |m, &p| m | 1 << (p - 1))
}

fn mask_points(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize + 1);
        m &= m - 1;
    }
    out
}

fn all_blocks(v: usize, blocksize: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (1..=blocksize).collect();
    loop {
        out.push(block_mask(&idx));
        if !next_combination(&mut idx, v) {
            break;
        }
    }
    out
}

fn check_sizes(v: usize, blocksize: usize) -> Result<()> {
    if blocksize < 2 || blocksize > v {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= blocksize <= v, got blocksize {blocksize}, v {v}"
        )));
    }
    if v > MAX_POINTS {
        return Err(Error::InvalidArgument(format!("v limited to {MAX_POINTS}")));
    }
    Ok(())
}

/// Lexicographic greedy pair packing: scan blocks in lexicographic order and
/// keep each one that shares at most one point with every kept block.
pub fn greedy_packing(v: usize, blocksize: usize) -> Result<PackingDesign> {
    check_sizes(v, blocksize)?;
    let mut kept: Vec<u64> = Vec::new();
    for b in all_blocks(v, blocksize) {
        if kept.iter().all(|&c| (b & c).count_ones() <= 1) {
            kept.push(b);
        }
    }
    Ok(PackingDesign::pairs(
        v,
        blocksize,
        kept.into_iter().map(mask_points).collect(),
    ))
}

/// Outcome of [`exact_packing`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PackingSearch {
    Found(PackingDesign),
    ProvenImpossible,
    BudgetExhausted,
}

/// Backtracking search for a pair packing with `target` blocks.
///
/// The first block is fixed to `{1..blocksize}` (every packing is isomorphic
/// to one containing it) and blocks are added in lexicographic order. A
/// branch is cut when the remaining candidates cannot supply the missing
/// blocks, either by count or by per-point capacity.
pub fn exact_packing(
    v: usize,
    blocksize: usize,
    target: usize,
    budget: Budget,
) -> Result<(PackingSearch, u64)> {
    check_sizes(v, blocksize)?;
    if target == 0 {
        return Err(Error::InvalidArgument("target must be at least 1".into()));
    }
    let blocks = all_blocks(v, blocksize);
    let first = blocks[0];
    let candidates: Vec<u64> = blocks[1..]
        .iter()
        .copied()
        .filter(|&b| (b & first).count_ones() <= 1)
        .collect();
    let mut search = PackSearch {
        v,
        blocksize,
        target,
        degree: vec![0; v],
        chosen: vec![first],
        meter: budget.meter(),
    };
    for p in 0..blocksize {
        search.degree[p] = 1;
    }
    let found = target == 1 || search.extend(&candidates);
    let nodes = search.meter.used();
    let outcome = if found {
        let design = PackingDesign::pairs(
            v,
            blocksize,
            search.chosen[..target]
                .iter()
                .map(|&m| mask_points(m))
                .collect(),
        );
        debug_assert!(is_packing(&design)?.is_valid());
        PackingSearch::Found(design)
    } else if search.meter.exhausted() {
        PackingSearch::BudgetExhausted
    } else {
        PackingSearch::ProvenImpossible
    };
    Ok((outcome, nodes))
}

struct PackSearch {
    v: usize,
    blocksize: usize,
    target: usize,
    degree: Vec<usize>,
    chosen: Vec<u64>,
    meter: Meter,
}

impl PackSearch {
    /// Upper bound on how many of `cands` can still be added together.
    fn capacity_bound(&self, cands: &[u64]) -> usize {
        let k1 = self.blocksize - 1;
        let mut per_point = vec![0usize; self.v];
        for &b in cands {
            let mut m = b;
            while m != 0 {
                per_point[m.trailing_zeros() as usize] += 1;
                m &= m - 1;
            }
        }
        let total: usize = (0..self.v)
            .map(|p| {
                let free = (self.v - 1) - k1 * self.degree[p];
                (free / k1).min(per_point[p])
            })
            .sum();
        (total / self.blocksize).min(cands.len())
    }

    fn extend(&mut self, cands: &[u64]) -> bool {
        let need = self.target - self.chosen.len();
        if need == 0 {
            return true;
        }
        if !self.meter.tick() {
            return false;
        }
        if self.capacity_bound(cands) < need {
            return false;
        }
        for (i, &b) in cands.iter().enumerate() {
            if cands.len() - i < need {
                break;
            }
            let rest: Vec<u64> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&c| (c & b).count_ones() <= 1)
                .collect();
            self.push(b);
            if self.extend(&rest) {
                return true;
            }
            self.pop(b);
            if self.meter.exhausted() {
                return false;
            }
        }
        false
    }

    fn push(&mut self, b: u64) {
        self.chosen.push(b);
        for p in mask_points(b) {
            self.degree[p - 1] += 1;
        }
    }

    fn pop(&mut self, b: u64) {
        self.chosen.pop();
        for p in mask_points(b) {
            self.degree[p - 1] -= 1;
        }
    }
}

/// A pair packing with at least `k` blocks of the given size on as few points
/// as possible, trying greedy first and, for blocks of size 4, exact search
/// whenever the packing number allows `k` blocks.
pub fn packing_with_blocks(k: usize, blocksize: usize, budget: Budget) -> Result<PackingDesign> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    for v in blocksize.max(2)..=MAX_POINTS {
        let greedy = greedy_packing(v, blocksize)?;
        if greedy.num_blocks() >= k {
            return Ok(greedy);
        }
        if blocksize == 4 && v >= 4 && packing_number_formula(v)? >= k {
            if let (PackingSearch::Found(d), _) = exact_packing(v, blocksize, k, budget)? {
                return Ok(d);
            }
        }
    }
    Err(Error::InvalidArgument(format!(
        "no packing with {k} blocks of size {blocksize} found on up to {MAX_POINTS} points"
    )))
}
