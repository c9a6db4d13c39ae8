//! Searches over possibly nonlinear codes: which balanced functions are
//! recoverable from three disjoint position sets, whether a code admits any
//! 3-PIR encoder, and enumeration of codes up to equivalence.
//!
//! Two codes are equivalent when one is a coordinate permutation of a
//! translate of the other. [`canonical_form`] picks the representative whose
//! sorted word list is lexicographically smallest; it is exact for n ≤ 8.
//!
//! # Encoder existence
//!
//! A data bit of a 3-PIR encoder is a balanced function on the code that is
//! constant on every agreement class of three disjoint position sets, hence
//! on the components of the union of those partitions. Enlarging a set only
//! refines its partition, so triples covering every position already yield
//! every such function. An encoder is a choice of k functions whose joint
//! value is injective, which holds exactly when each function splits every
//! class cut out by the previous ones into halves.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::gf2::{Code, Word};
use crate::hamming::components;
use crate::recovery::{verify_pir, Encoder, RecoveryFamily, RecoverySet};

/// Largest code size handled by the function searches (functions are `u128` bitsets).
pub const MAX_FUNCTION_CODE_SIZE: usize = 128;
/// Default cap on components per triple before colourings are enumerated.
pub const DEFAULT_COMPONENT_CAP: usize = 20;
/// Largest length for which [`canonical_form`] is computed.
pub const MAX_CANONICAL_LENGTH: usize = 8;

/// Classes of codewords (indices into the sorted code) connected by agreement
/// on any of the three sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentPartition {
    pub triple: [Vec<usize>; 3],
    pub components: Vec<Vec<usize>>,
}

/// Balanced functions recoverable from one triple, as sets of codeword
/// indices where the function is 1. Functions are normalized to vanish on the
/// first codeword, so each function and its negation appear once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleFunctions {
    pub partition: ComponentPartition,
    pub colourings: Vec<u128>,
    /// More components than the cap: colourings were not enumerated.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoverableScan {
    pub triples: Vec<TripleFunctions>,
    /// All triples were examined and none was truncated.
    pub complete: bool,
    pub nodes: u64,
}

fn positions(mask: u64) -> Vec<usize> {
    (1..=64).filter(|&p| mask >> (p - 1) & 1 == 1).collect()
}

/// Unordered triples of disjoint nonempty position sets, ordered by total
/// size and then lexicographically on the sorted set lists.
pub fn disjoint_triples(n: usize, covering_only: bool) -> Vec<[Vec<usize>; 3]> {
    fn walk(
        p: usize,
        n: usize,
        covering: bool,
        next: usize,
        sets: &mut [u64; 3],
        out: &mut Vec<[u64; 3]>,
    ) {
        if p > n {
            if next == 4 {
                out.push(*sets);
            }
            return;
        }
        // labels must make their first appearance in order
        if !covering {
            walk(p + 1, n, covering, next, sets, out);
        }
        for label in 1..=next.min(3) {
            sets[label - 1] |= 1 << (p - 1);
            walk(p + 1, n, covering, next.max(label + 1), sets, out);
            sets[label - 1] &= !(1 << (p - 1));
        }
    }
    let mut raw = Vec::new();
    walk(1, n, covering_only, 1, &mut [0; 3], &mut raw);
    let mut out: Vec<(usize, [Vec<usize>; 3])> = raw
        .into_iter()
        .map(|t| {
            let mut sets = t.map(positions);
            sets.sort();
            (sets.iter().map(Vec::len).sum(), sets)
        })
        .collect();
    out.sort();
    out.into_iter().map(|(_, s)| s).collect()
}

fn code_masks(code: &Code) -> Result<(Vec<u64>, usize)> {
    let m = code.size();
    if !m.is_power_of_two() || !(2..=MAX_FUNCTION_CODE_SIZE).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "code size must be a power of two in 2..={MAX_FUNCTION_CODE_SIZE}, got {m}"
        )));
    }
    if code.len() > 64 {
        return Err(Error::InvalidArgument(
            "code length must be at most 64".into(),
        ));
    }
    Ok((
        code.words().iter().map(Word::to_mask).collect(),
        m.trailing_zeros() as usize,
    ))
}

fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0, |m, &p| m | 1 << (p - 1))
}

/// Balanced unions of components, normalized to exclude codeword 0.
fn balanced_colourings(of: &[usize], count: usize, meter: &mut Meter) -> Option<Vec<u128>> {
    let m = of.len();
    let mut size = vec![0usize; count];
    let mut members = vec![0u128; count];
    for (i, &c) in of.iter().enumerate() {
        size[c] += 1;
        members[c] |= 1 << i;
    }
    let free: Vec<usize> = (0..count).filter(|&c| c != of[0]).collect();
    let half = m / 2;
    // reach[i][s]: some subset of free[i..] sums to s
    let mut reach = vec![vec![false; half + 1]; free.len() + 1];
    reach[free.len()][0] = true;
    for i in (0..free.len()).rev() {
        let s = size[free[i]];
        for sum in 0..=half {
            reach[i][sum] = reach[i + 1][sum] || (sum >= s && reach[i + 1][sum - s]);
        }
    }
    let mut out = Vec::new();
    if !reach[0][half] {
        return Some(out);
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        left: usize,
        acc: u128,
        free: &[usize],
        size: &[usize],
        members: &[u128],
        reach: &[Vec<bool>],
        out: &mut Vec<u128>,
        meter: &mut Meter,
    ) -> bool {
        if left == 0 {
            out.push(acc);
            return meter.tick();
        }
        if i == free.len() {
            return true;
        }
        let c = free[i];
        if size[c] <= left
            && reach[i + 1][left - size[c]]
            && !rec(
                i + 1,
                left - size[c],
                acc | members[c],
                free,
                size,
                members,
                reach,
                out,
                meter,
            )
        {
            return false;
        }
        if reach[i + 1][left] {
            return rec(i + 1, left, acc, free, size, members, reach, out, meter);
        }
        true
    }
    rec(0, half, 0, &free, &size, &members, &reach, &mut out, meter).then_some(out)
}

fn scan_triple(
    words: &[u64],
    triple: &[Vec<usize>; 3],
    cap: usize,
    meter: &mut Meter,
) -> Option<TripleFunctions> {
    let masks = [
        mask_of(&triple[0]),
        mask_of(&triple[1]),
        mask_of(&triple[2]),
    ];
    let comp = components(words, &masks);
    let mut classes = vec![Vec::new(); comp.count];
    for (i, &c) in comp.of.iter().enumerate() {
        classes[c].push(i);
    }
    let partition = ComponentPartition {
        triple: triple.clone(),
        components: classes,
    };
    if comp.count > cap {
        return Some(TripleFunctions {
            partition,
            colourings: Vec::new(),
            truncated: true,
        });
    }
    let colourings = balanced_colourings(&comp.of, comp.count, meter)?;
    Some(TripleFunctions {
        partition,
        colourings,
        truncated: false,
    })
}

/// Every disjoint triple of `code` with its component partition and the
/// balanced functions it can recover.
pub fn recoverable_functions(code: &Code, cap: usize, budget: Budget) -> Result<RecoverableScan> {
    let (words, _) = code_masks(code)?;
    let mut meter = budget.meter();
    let mut triples = Vec::new();
    let mut complete = true;
    for triple in disjoint_triples(code.len(), false) {
        if !meter.tick() {
            complete = false;
            break;
        }
        match scan_triple(&words, &triple, cap, &mut meter) {
            Some(t) => {
                complete &= !t.truncated;
                triples.push(t);
            }
            None => {
                complete = false;
                break;
            }
        }
    }
    Ok(RecoverableScan {
        triples,
        complete,
        nodes: meter.used(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EncoderSearch {
    Found {
        encoder: Encoder,
        witnesses: Vec<RecoveryFamily>,
    },
    /// Complete enumeration: the code has no 3-PIR encoder.
    None,
    /// A cap or the budget cut the enumeration short.
    Unknown,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderSearchStats {
    pub triples: usize,
    pub truncated_triples: usize,
    pub functions: usize,
    /// Most data bits simultaneously realized during backtracking.
    pub max_depth: usize,
    pub nodes: u64,
    pub elapsed_us: u64,
}

struct Assemble<'a> {
    functions: &'a [u128],
    k: usize,
    chosen: Vec<usize>,
    max_depth: usize,
    meter: &'a mut Meter,
}

impl Assemble<'_> {
    fn run(&mut self, classes: &[u128], from: usize) -> Option<bool> {
        self.max_depth = self.max_depth.max(self.chosen.len());
        if self.chosen.len() == self.k {
            return Some(true);
        }
        for (i, &f) in self.functions.iter().enumerate().skip(from) {
            if !self.meter.tick() {
                return None;
            }
            if classes
                .iter()
                .any(|&c| 2 * (c & f).count_ones() != c.count_ones())
            {
                continue;
            }
            let next: Vec<u128> = classes.iter().flat_map(|&c| [c & f, c & !f]).collect();
            self.chosen.push(i);
            if self.run(&next, i + 1)? {
                return Some(true);
            }
            self.chosen.pop();
        }
        Some(false)
    }
}

/// Decides whether `code` (size 2^k) has a 3-PIR encoder of any kind.
///
/// On success the encoder is explicit and its witness triples have been
/// re-validated by the recovery module. `None` is only returned after every
/// covering triple was fully enumerated and backtracking finished.
pub fn encoder_exists_3pir(
    code: &Code,
    cap: usize,
    budget: Budget,
) -> Result<(EncoderSearch, EncoderSearchStats)> {
    let start = Instant::now();
    let (words, k) = code_masks(code)?;
    let m = words.len();
    let mut meter = budget.meter();
    let mut stats = EncoderSearchStats::default();
    let mut functions: Vec<u128> = Vec::new();
    let mut witness_of: HashMap<u128, usize> = HashMap::new();
    let triples = disjoint_triples(code.len(), true);
    let mut exhausted = false;
    for (ti, triple) in triples.iter().enumerate() {
        if !meter.tick() {
            exhausted = true;
            break;
        }
        stats.triples += 1;
        let Some(t) = scan_triple(&words, triple, cap, &mut meter) else {
            exhausted = true;
            break;
        };
        if t.truncated {
            stats.truncated_triples += 1;
        }
        for f in t.colourings {
            witness_of.entry(f).or_insert_with(|| {
                functions.push(f);
                ti
            });
        }
    }
    stats.functions = functions.len();
    let all: u128 = if m == 128 {
        u128::MAX
    } else {
        (1u128 << m) - 1
    };
    let mut found = None;
    if !exhausted {
        let mut search = Assemble {
            functions: &functions,
            k,
            chosen: Vec::new(),
            max_depth: 0,
            meter: &mut meter,
        };
        match search.run(&[all], 0) {
            Some(true) => found = Some(search.chosen.clone()),
            Some(false) => {}
            None => exhausted = true,
        }
        stats.max_depth = search.max_depth;
    }
    stats.nodes = meter.used();
    let outcome = match found {
        Some(chosen) => {
            let mut table = vec![Word::zeros(code.len()); m];
            for (i, w) in code.words().iter().enumerate() {
                let a = chosen
                    .iter()
                    .enumerate()
                    .filter(|(_, &f)| functions[f] >> i & 1 == 1)
                    .fold(0usize, |a, (j, _)| a | 1 << (k - 1 - j));
                table[a] = w.clone();
            }
            let encoder = Encoder::explicit(table)?;
            let witnesses = chosen
                .iter()
                .enumerate()
                .map(|(j, f)| {
                    let triple = &triples[witness_of[&functions[*f]]];
                    let sets = triple
                        .iter()
                        .map(|s| RecoverySet::new(s.clone(), code.len()))
                        .collect::<Result<Vec<_>>>()?;
                    RecoveryFamily::new(&encoder, j + 1, sets)
                })
                .collect::<Result<Vec<_>>>()?;
            EncoderSearch::Found { encoder, witnesses }
        }
        None if exhausted || stats.truncated_triples > 0 => EncoderSearch::Unknown,
        None => EncoderSearch::None,
    };
    stats.elapsed_us = start.elapsed().as_micros() as u64;
    Ok((outcome, stats))
}

/// Checks an encoder found by [`encoder_exists_3pir`] with the generic verifier.
pub fn confirm_3pir(encoder: &Encoder, witnesses: &[RecoveryFamily]) -> Result<bool> {
    Ok(verify_pir(encoder, 3, None, 1, Some(witnesses), Budget::UNLIMITED)?.holds())
}

fn perm_tables(n: usize) -> &'static [Vec<u8>] {
    static TABLES: [OnceLock<Vec<Vec<u8>>>; MAX_CANONICAL_LENGTH + 1] =
        [const { OnceLock::new() }; MAX_CANONICAL_LENGTH + 1];
    TABLES[n].get_or_init(|| {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut out = Vec::new();
        loop {
            let table = (0..1usize << n)
                .map(|x| (0..n).fold(0u8, |acc, b| acc | (((x >> b) & 1) as u8) << perm[b]))
                .collect();
            out.push(table);
            // next permutation in lexicographic order
            let Some(i) = (0..n.saturating_sub(1))
                .rev()
                .find(|&i| perm[i] < perm[i + 1])
            else {
                break;
            };
            let j = (i + 1..n)
                .rev()
                .find(|&j| perm[j] > perm[i])
                .expect("successor exists");
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        out
    })
}

type Bitmap = [u64; 4];

fn bitmap(words: impl Iterator<Item = u64>) -> Bitmap {
    let mut b = [0u64; 4];
    for w in words {
        b[(w / 64) as usize] |= 1 << (w % 64);
    }
    b
}

/// Equal-size sets compare like their sorted sequences: `a < b` exactly when
/// the smallest element of the symmetric difference lies in `a`.
fn bitmap_less(a: &Bitmap, b: &Bitmap) -> bool {
    for i in 0..4 {
        let d = a[i] ^ b[i];
        if d != 0 {
            return a[i] >> d.trailing_zeros() & 1 == 1;
        }
    }
    false
}

/// Canonical representative under coordinate permutations and translations.
/// The result contains the zero word.
pub fn canonical_form(code: &Code) -> Result<Code> {
    let n = code.len();
    if n == 0 || n > MAX_CANONICAL_LENGTH {
        return Err(Error::InvalidArgument(format!(
            "canonical forms are computed for 1 <= n <= {MAX_CANONICAL_LENGTH}, got {n}"
        )));
    }
    let words: Vec<u64> = code.words().iter().map(Word::to_int).collect();
    let tables = perm_tables(n);
    let mut best: Option<Bitmap> = None;
    for &s in &words {
        for table in tables {
            let image = bitmap(words.iter().map(|&w| table[(w ^ s) as usize] as u64));
            if best.as_ref().is_none_or(|b| bitmap_less(&image, b)) {
                best = Some(image);
            }
        }
    }
    let best = best.expect("codes are nonempty");
    let out = (0..1u64 << n)
        .filter(|&x| best[(x / 64) as usize] >> (x % 64) & 1 == 1)
        .map(|x| Word::from_int(x, n));
    Code::new(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SearchMode {
    /// Every equivalence class, for n ≤ 8.
    Exhaustive,
    /// Seeded random restarts from the lexicode.
    Heuristic { seed: u64, iterations: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub n: usize,
    pub size: usize,
    pub dmin: usize,
    pub mode: SearchMode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchRun {
    pub params: SearchParams,
    /// Canonical forms (n ≤ 8) or the raw codes, sorted and deduplicated.
    pub codes: Vec<Code>,
    pub complete: bool,
    /// Nodes over all runs that led here, including resumed ones.
    pub nodes: u64,
    pub resumed: bool,
}

const CHECKPOINT_MAGIC: &str = "pir-codes search checkpoint";
const CHECKPOINT_VERSION: u32 = 1;

/// Resumable position of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Frontier {
    /// Exhaustive: branch weight and the next-candidate index of each DFS frame.
    Exhaustive {
        branch: usize,
        path: Vec<usize>,
    },
    Heuristic {
        iteration: u64,
    },
    Done,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Checkpoint {
    params: SearchParams,
    nodes: u64,
    frontier: Frontier,
    results: BTreeSet<Vec<u64>>,
}

fn problem_line(p: &SearchParams) -> String {
    match p.mode {
        SearchMode::Exhaustive => format!(
            "problem n={} size={} dmin={} mode=exhaustive",
            p.n, p.size, p.dmin
        ),
        SearchMode::Heuristic { seed, iterations } => format!(
            "problem n={} size={} dmin={} mode=heuristic seed={seed} iterations={iterations}",
            p.n, p.size, p.dmin
        ),
    }
}

fn join(v: impl IntoIterator<Item = impl ToString>) -> String {
    v.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn split_ints<T: std::str::FromStr>(s: &str, line: usize) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad integer {x:?}"),
            })
        })
        .collect()
}

impl Checkpoint {
    fn to_text(&self) -> String {
        let mut s = format!("{CHECKPOINT_MAGIC}\nversion {CHECKPOINT_VERSION}\n");
        let _ = writeln!(s, "{}", problem_line(&self.params));
        let _ = writeln!(
            s,
            "stats nodes={} results={}",
            self.nodes,
            self.results.len()
        );
        let _ = match &self.frontier {
            Frontier::Exhaustive { branch, path } => {
                writeln!(s, "frontier branch={branch} path={}", join(path))
            }
            Frontier::Heuristic { iteration } => writeln!(s, "frontier iteration={iteration}"),
            Frontier::Done => writeln!(s, "frontier done"),
        };
        for r in &self.results {
            let _ = writeln!(s, "result {}", join(r));
        }
        s.push_str("end\n");
        s
    }

    fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Checkpoint(format!("missing {what}")))
        };
        let (_, magic) = next("header")?;
        if magic != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("not a search checkpoint".into()));
        }
        let (_, version) = next("version")?;
        if version != format!("version {CHECKPOINT_VERSION}") {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint {version:?}, expected version {CHECKPOINT_VERSION}"
            )));
        }
        let (line, problem) = next("problem")?;
        let field = |key: &str| -> Result<String> {
            problem
                .split_whitespace()
                .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
                .map(str::to_string)
                .ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("problem line lacks {key}"),
                })
        };
        let num = |key: &str| -> Result<u64> {
            field(key)?.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad value for {key}"),
            })
        };
        let mode = match field("mode")?.as_str() {
            "exhaustive" => SearchMode::Exhaustive,
            "heuristic" => SearchMode::Heuristic {
                seed: num("seed")?,
                iterations: num("iterations")?,
            },
            other => return Err(Error::Checkpoint(format!("unknown mode {other:?}"))),
        };
        let params = SearchParams {
            n: num("n")? as usize,
            size: num("size")? as usize,
            dmin: num("dmin")? as usize,
            mode,
        };
        let (line, stats) = next("stats")?;
        let nodes = stats
            .split_whitespace()
            .find_map(|kv| kv.strip_prefix("nodes="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse {
                line,
                msg: "bad stats line".into(),
            })?;
        let (line, frontier) = next("frontier")?;
        let frontier = match frontier.strip_prefix("frontier ") {
            Some("done") => Frontier::Done,
            Some(rest) if rest.starts_with("iteration=") => Frontier::Heuristic {
                iteration: rest["iteration=".len()..]
                    .parse()
                    .map_err(|_| Error::Parse {
                        line,
                        msg: "bad iteration".into(),
                    })?,
            },
            Some(rest) => {
                let mut branch = None;
                let mut path = None;
                for kv in rest.split_whitespace() {
                    if let Some(v) = kv.strip_prefix("branch=") {
                        branch = v.parse().ok();
                    } else if let Some(v) = kv.strip_prefix("path=") {
                        path = Some(split_ints(v, line)?);
                    }
                }
                match (branch, path) {
                    (Some(branch), Some(path)) => Frontier::Exhaustive { branch, path },
                    _ => {
                        return Err(Error::Parse {
                            line,
                            msg: "bad frontier line".into(),
                        })
                    }
                }
            }
            None => {
                return Err(Error::Parse {
                    line,
                    msg: "expected a frontier line".into(),
                })
            }
        };
        let mut results = BTreeSet::new();
        let mut ended = false;
        for (line, l) in lines {
            if l == "end" {
                ended = true;
                break;
            }
            let Some(r) = l.strip_prefix("result ") else {
                return Err(Error::Parse {
                    line,
                    msg: format!("unexpected record {l:?}"),
                });
            };
            results.insert(split_ints(r, line)?);
        }
        if !ended {
            return Err(Error::Checkpoint(
                "truncated checkpoint (no end record)".into(),
            ));
        }
        Ok(Self {
            params,
            nodes,
            frontier,
            results,
        })
    }
}

fn weight(x: u64) -> usize {
    x.count_ones() as usize
}

fn result_key(n: usize, words: &[u64]) -> Result<Vec<u64>> {
    if n <= MAX_CANONICAL_LENGTH {
        let code = Code::new(words.iter().map(|&w| Word::from_int(w, n)))?;
        Ok(canonical_form(&code)?
            .words()
            .iter()
            .map(Word::to_int)
            .collect())
    } else {
        let mut v = words.to_vec();
        v.sort_unstable();
        Ok(v)
    }
}

struct Frame {
    cands: Vec<u64>,
    next: usize,
}

/// Candidates after `v` in `cands` at distance ≥ dmin from `v`.
fn narrow(cands: &[u64], from: usize, v: u64, dmin: usize) -> Vec<u64> {
    cands[from..]
        .iter()
        .copied()
        .filter(|&x| weight(x ^ v) >= dmin)
        .collect()
}

/// Colouring bound on the largest clique among `cands`.
fn colour_bound(cands: &[u64], dmin: usize) -> usize {
    let mut classes: Vec<Vec<u64>> = Vec::new();
    for &x in cands {
        // a class is a set of pairwise close words
        match classes
            .iter_mut()
            .find(|c| c.iter().all(|&y| weight(x ^ y) < dmin))
        {
            Some(c) => c.push(x),
            None => classes.push(vec![x]),
        }
    }
    classes.len()
}

fn branch_root(n: usize, dmin: usize, w: usize) -> Vec<u64> {
    let u = (1u64 << w) - 1;
    let mut cands: Vec<u64> = (1u64..1 << n)
        .filter(|&x| x != u && weight(x) >= w && weight(x ^ u) >= dmin)
        .collect();
    cands.sort_by_key(|&x| (weight(x), x));
    cands
}

fn exhaustive(cp: &mut Checkpoint, meter: &mut Meter) -> Result<bool> {
    let SearchParams { n, size, dmin, .. } = cp.params;
    if size <= 1 {
        cp.results.insert(vec![0]);
        cp.frontier = Frontier::Done;
        return Ok(true);
    }
    let (mut branch, path) = match &cp.frontier {
        Frontier::Exhaustive { branch, path } => (*branch, path.clone()),
        Frontier::Done => return Ok(true),
        Frontier::Heuristic { .. } => {
            return Err(Error::Checkpoint("frontier does not match mode".into()))
        }
    };
    let mut stack: Vec<Frame> = Vec::new();
    let mut chosen: Vec<u64> = Vec::new();
    // rebuild the stack from the saved next-indices
    if branch <= n {
        let mut cands = branch_root(n, dmin, branch);
        for (d, &next) in path.iter().enumerate() {
            if next > cands.len() || (d + 1 < path.len() && next == 0) {
                return Err(Error::Checkpoint(
                    "frontier path does not fit the problem".into(),
                ));
            }
            stack.push(Frame { cands, next });
            if d + 1 < path.len() {
                let top = stack.last().expect("just pushed");
                let v = top.cands[next - 1];
                chosen.push(v);
                cands = narrow(&top.cands, next, v, dmin);
            } else {
                cands = Vec::new();
            }
        }
        if path.is_empty() {
            stack.push(Frame { cands, next: 0 });
        }
    }
    let save = |branch: usize, stack: &[Frame]| Frontier::Exhaustive {
        branch,
        path: stack.iter().map(|f| f.next).collect(),
    };
    while branch <= n {
        if size == 2 {
            cp.results
                .insert(result_key(n, &[0, (1u64 << branch) - 1])?);
            stack.clear();
        }
        while let Some(top) = stack.last_mut() {
            if top.next >= top.cands.len() {
                stack.pop();
                chosen.pop();
                continue;
            }
            if !meter.tick() {
                cp.frontier = save(branch, &stack);
                return Ok(false);
            }
            let v = top.cands[top.next];
            top.next += 1;
            let have = 2 + chosen.len() + 1;
            if have == size {
                let mut words = vec![0, (1u64 << branch) - 1];
                words.extend(&chosen);
                words.push(v);
                cp.results.insert(result_key(n, &words)?);
                continue;
            }
            let rest = narrow(&top.cands, top.next, v, dmin);
            if have + rest.len() < size || have + colour_bound(&rest, dmin) < size {
                continue;
            }
            chosen.push(v);
            stack.push(Frame {
                cands: rest,
                next: 0,
            });
        }
        branch += 1;
        chosen.clear();
        if branch <= n {
            stack.push(Frame {
                cands: branch_root(n, dmin, branch),
                next: 0,
            });
        }
    }
    cp.frontier = Frontier::Done;
    Ok(true)
}

fn greedy(order: &[u64], start: &[u64], dmin: usize, meter: &mut Meter) -> Vec<u64> {
    let mut code = start.to_vec();
    for &x in order {
        meter.tick();
        if code.iter().all(|&c| weight(c ^ x) >= dmin) {
            code.push(x);
        }
    }
    code
}

/// One heuristic iteration: iteration 0 is the lexicode, later ones permute
/// and translate it and then swap random words out and greedily refill.
fn heuristic_candidate(
    n: usize,
    dmin: usize,
    size: usize,
    seed: u64,
    iteration: u64,
    meter: &mut Meter,
) -> Option<Vec<u64>> {
    let all: Vec<u64> = (0..1u64 << n).collect();
    let lexicode = greedy(&all[1..], &[0], dmin, meter);
    if iteration == 0 {
        return (lexicode.len() >= size).then(|| lexicode[..size].to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let shift: u64 = rng.gen_range(0..1u64 << n);
    let mut code: Vec<u64> = lexicode
        .iter()
        .map(|&w| (0..n).fold(0u64, |acc, b| acc | ((w >> b) & 1) << perm[b]) ^ shift)
        .collect();
    for _ in 0..4 {
        let drop = rng.gen_range(1..=code.len().clamp(1, 8));
        code.shuffle(&mut rng);
        code.truncate(code.len().saturating_sub(drop));
        let mut order = all.clone();
        order.shuffle(&mut rng);
        let refill = greedy(&order, &code, dmin, meter);
        if refill.len() >= size {
            code = refill;
        } else {
            break;
        }
    }
    if code.len() < size {
        return None;
    }
    code.sort_unstable();
    code.truncate(size);
    Some(code)
}

fn heuristic(cp: &mut Checkpoint, meter: &mut Meter) -> Result<bool> {
    let SearchParams {
        n,
        size,
        dmin,
        mode,
    } = cp.params;
    let SearchMode::Heuristic { seed, iterations } = mode else {
        unreachable!("called for heuristic mode only");
    };
    let mut iteration = match cp.frontier {
        Frontier::Heuristic { iteration } => iteration,
        Frontier::Done => return Ok(true),
        Frontier::Exhaustive { .. } => {
            return Err(Error::Checkpoint("frontier does not match mode".into()))
        }
    };
    while iteration < iterations {
        if meter.exhausted() {
            cp.frontier = Frontier::Heuristic { iteration };
            return Ok(false);
        }
        if let Some(code) = heuristic_candidate(n, dmin, size, seed, iteration, meter) {
            cp.results.insert(result_key(n, &code)?);
        }
        iteration += 1;
    }
    cp.frontier = Frontier::Done;
    Ok(true)
}

/// Largest length accepted in heuristic mode.
pub const MAX_HEURISTIC_LENGTH: usize = 16;

/// Finds codes of length `n`, exactly `size` words and minimum distance
/// ≥ `dmin`.
///
/// Exhaustive mode returns one canonical code per equivalence class. It pins
/// the zero word and places the lightest nonzero word on the last positions,
/// then enumerates the remaining words in (weight, value) order with a
/// colouring bound. Heuristic mode is reproducible for a fixed seed.
///
/// With a checkpoint path, an existing file is resumed and the state is
/// written back when the run ends, whether complete or out of budget.
pub fn search_codes(
    params: SearchParams,
    checkpoint: Option<&Path>,
    budget: Budget,
) -> Result<SearchRun> {
    let SearchParams {
        n,
        size,
        dmin,
        mode,
    } = params;
    if size == 0 || dmin == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "n, size and dmin must be positive".into(),
        ));
    }
    match mode {
        SearchMode::Exhaustive if n > MAX_CANONICAL_LENGTH => {
            return Err(Error::InvalidArgument(format!(
                "exhaustive search is limited to n <= {MAX_CANONICAL_LENGTH}"
            )))
        }
        SearchMode::Heuristic { .. } if n > MAX_HEURISTIC_LENGTH => {
            return Err(Error::InvalidArgument(format!(
                "heuristic search is limited to n <= {MAX_HEURISTIC_LENGTH}"
            )))
        }
        _ => {}
    }
    let fresh = Checkpoint {
        params,
        nodes: 0,
        frontier: match mode {
            SearchMode::Exhaustive => Frontier::Exhaustive {
                branch: dmin,
                path: Vec::new(),
            },
            SearchMode::Heuristic { .. } => Frontier::Heuristic { iteration: 0 },
        },
        results: BTreeSet::new(),
    };
    let (mut cp, resumed) = match checkpoint {
        Some(path) if path.exists() => {
            let cp = Checkpoint::parse(&std::fs::read_to_string(path)?)?;
            if cp.params != params {
                return Err(Error::Checkpoint(format!(
                    "checkpoint is for {:?}, not {:?}",
                    problem_line(&cp.params),
                    problem_line(&params)
                )));
            }
            (cp, true)
        }
        _ => (fresh, false),
    };
    let mut meter = budget.meter();
    let complete = match mode {
        SearchMode::Exhaustive => exhaustive(&mut cp, &mut meter)?,
        SearchMode::Heuristic { .. } => heuristic(&mut cp, &mut meter)?,
    };
    cp.nodes += meter.used();
    if let Some(path) = checkpoint {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, cp.to_text())?;
        std::fs::rename(&tmp, path)?;
    }
    let codes = cp
        .results
        .iter()
        .map(|r| Code::new(r.iter().map(|&w| Word::from_int(w, n))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchRun {
        params,
        codes,
        complete,
        nodes: cp.nodes,
        resumed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuntConfig {
    pub n: usize,
    pub size: usize,
    pub dmin: usize,
    /// Candidate codes drawn from the heuristic search.
    pub codes: u64,
    pub per_code_budget: u64,
    pub component_cap: usize,
    /// Log codes whose backtracking realized at least this many data bits.
    pub depth_threshold: usize,
}

impl Default for HuntConfig {
    fn default() -> Self {
        Self {
            n: 11,
            size: 128,
            dmin: 3,
            codes: 16,
            per_code_budget: 200_000,
            component_cap: DEFAULT_COMPONENT_CAP,
            depth_threshold: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuntLog {
    pub code: Vec<String>,
    pub verdict: String,
    pub depth: usize,
}

/// Evidence gathered by [`open11_hunt`]. The hunt never exhausts the space,
/// so an empty `encoders` list says nothing about existence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuntReport {
    pub config: HuntConfig,
    pub seed: u64,
    pub examined: usize,
    pub no_encoder: usize,
    pub unknown: usize,
    /// Explicit encoder tables of codes found to be 3-PIR.
    pub encoders: Vec<Vec<String>>,
    pub logged: Vec<HuntLog>,
    pub search_complete: bool,
    pub nodes: u64,
    /// Facts quoted without re-verification.
    pub literature: Vec<String>,
}

impl HuntReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Draws candidate codes with the heuristic search and tests each for a
/// 3-PIR encoder under a per-code budget. Codes are tested in parallel.
pub fn open11_hunt(
    config: &HuntConfig,
    checkpoint: Option<&Path>,
    budget: Budget,
    seed: u64,
) -> Result<HuntReport> {
    let params = SearchParams {
        n: config.n,
        size: config.size,
        dmin: config.dmin,
        mode: SearchMode::Heuristic {
            seed,
            iterations: config.codes,
        },
    };
    let run = search_codes(params, checkpoint, budget)?;
    let outcomes = run
        .codes
        .par_iter()
        .map(|code| {
            let (outcome, stats) =
                encoder_exists_3pir(code, config.component_cap, Budget(config.per_code_budget))?;
            Ok((code, outcome, stats))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = HuntReport {
        config: config.clone(),
        seed,
        examined: outcomes.len(),
        no_encoder: 0,
        unknown: 0,
        encoders: Vec::new(),
        logged: Vec::new(),
        search_complete: run.complete,
        nodes: run.nodes + outcomes.iter().map(|o| o.2.nodes).sum::<u64>(),
        literature: Vec::new(),
    };
    if config.n == 11 && config.dmin == 3 {
        report.literature.push(
            "there are 7398 inequivalent (11,144,3) codes; the census is not re-verified here".into(),
        );
    }
    for (code, outcome, stats) in outcomes {
        let verdict = match &outcome {
            EncoderSearch::Found { encoder, .. } => {
                report
                    .encoders
                    .push(encoder.table().iter().map(Word::to_string).collect());
                "found"
            }
            EncoderSearch::None => {
                report.no_encoder += 1;
                "none"
            }
            EncoderSearch::Unknown => {
                report.unknown += 1;
                "unknown"
            }
        };
        if stats.max_depth >= config.depth_threshold
            || matches!(outcome, EncoderSearch::Found { .. })
        {
            report.logged.push(HuntLog {
                code: code.words().iter().map(Word::to_string).collect(),
                verdict: verdict.into(),
                depth: stats.max_depth,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_pir3;
    use crate::hamming::build_hamming;

    fn code(words: &[&str]) -> Code {
        Code::new(words.iter().map(|w| w.parse::<Word>().unwrap())).unwrap()
    }

    #[test]
    fn triple_counts() {
        assert_eq!(
            disjoint_triples(3, false),
            vec![[vec![1], vec![2], vec![3]]]
        );
        assert_eq!(disjoint_triples(7, false).len(), 1701);
        // (3^7 − 3·2^7 + 3) / 6
        assert_eq!(disjoint_triples(7, true).len(), 301);
        let t = disjoint_triples(5, false);
        assert!(t.windows(2).all(|w| {
            let s = |x: &[Vec<usize>; 3]| x.iter().map(Vec::len).sum::<usize>();
            s(&w[0]) <= s(&w[1])
        }));
    }

    #[test]
    fn repetition_functions() {
        let scan = recoverable_functions(
            &code(&["000", "111"]),
            DEFAULT_COMPONENT_CAP,
            Budget::UNLIMITED,
        )
        .unwrap();
        assert!(scan.complete);
        assert_eq!(scan.triples.len(), 1);
        assert_eq!(scan.triples[0].partition.components, vec![vec![0], vec![1]]);
        assert_eq!(scan.triples[0].colourings, vec![0b10]);
    }

    #[test]
    fn hamming_functions_are_complement_invariant() {
        let c = build_hamming(3).unwrap().linear().to_code().unwrap();
        let ones = Word::ones(7);
        let partner: Vec<usize> = c
            .words()
            .iter()
            .map(|w| c.words().iter().position(|x| *x == w.xor(&ones)).unwrap())
            .collect();
        let scan = recoverable_functions(&c, DEFAULT_COMPONENT_CAP, Budget::UNLIMITED).unwrap();
        assert!(scan.complete);
        for t in &scan.triples {
            for &f in &t.colourings {
                assert!((0..16).all(|i| (f >> i & 1) == (f >> partner[i] & 1)));
            }
        }
    }

    #[test]
    fn linear_bits_appear_among_functions() {
        let e = build_pir3(2).unwrap().encoder;
        let c = e.code();
        let scan = recoverable_functions(&c, DEFAULT_COMPONENT_CAP, Budget::UNLIMITED).unwrap();
        let all: BTreeSet<u128> = scan
            .triples
            .iter()
            .flat_map(|t| t.colourings.clone())
            .collect();
        for j in 1..=2 {
            let f: u128 = c
                .words()
                .iter()
                .enumerate()
                .filter(|(_, w)| e.decode(w).unwrap().get(j))
                .fold(0, |acc, (i, _)| acc | 1 << i);
            let normalized = if f & 1 == 1 { !f & 0b1111 } else { f };
            assert!(all.contains(&normalized), "bit {j}");
        }
    }

    #[test]
    fn encoder_existence_examples() {
        let (out, _) = encoder_exists_3pir(&code(&["000", "111"]), 20, Budget::UNLIMITED).unwrap();
        let EncoderSearch::Found { encoder, witnesses } = out else {
            panic!("expected an encoder")
        };
        let sets: Vec<Vec<usize>> = witnesses[0]
            .sets
            .iter()
            .map(|s| s.positions().to_vec())
            .collect();
        assert_eq!(sets, vec![vec![1], vec![2], vec![3]]);
        assert!(confirm_3pir(&encoder, &witnesses).unwrap());

        let c = build_pir3(2).unwrap().encoder.code();
        let (out, _) = encoder_exists_3pir(&c, 20, Budget::UNLIMITED).unwrap();
        let EncoderSearch::Found { encoder, witnesses } = out else {
            panic!("expected an encoder")
        };
        assert!(confirm_3pir(&encoder, &witnesses).unwrap());

        let h = build_hamming(3).unwrap().linear().to_code().unwrap();
        let (out, stats) = encoder_exists_3pir(&h, 20, Budget::UNLIMITED).unwrap();
        assert_eq!(out, EncoderSearch::None);
        assert_eq!(stats.truncated_triples, 0);
    }

    #[test]
    fn tiny_budget_gives_unknown() {
        let h = build_hamming(3).unwrap().linear().to_code().unwrap();
        let (out, _) = encoder_exists_3pir(&h, 20, Budget(10)).unwrap();
        assert_eq!(out, EncoderSearch::Unknown);
        let (out, _) = encoder_exists_3pir(&h, 1, Budget::UNLIMITED).unwrap();
        assert_eq!(out, EncoderSearch::Unknown);
    }

    #[test]
    fn canonical_form_examples() {
        let a = code(&["00000", "00111", "11001", "11110"]);
        let b = a
            .permute(&[5, 3, 1, 2, 4])
            .unwrap()
            .translate(&"10101".parse().unwrap());
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
        let c = canonical_form(&a).unwrap();
        assert_eq!(canonical_form(&c).unwrap(), c);
        assert!(c.contains(&Word::zeros(5)));
    }

    fn exhaustive_params(n: usize, size: usize) -> SearchParams {
        SearchParams {
            n,
            size,
            dmin: 3,
            mode: SearchMode::Exhaustive,
        }
    }

    #[test]
    fn exhaustive_examples() {
        let run = search_codes(exhaustive_params(4, 4), None, Budget::UNLIMITED).unwrap();
        assert!(run.complete && run.codes.is_empty());
        let run = search_codes(exhaustive_params(5, 4), None, Budget::UNLIMITED).unwrap();
        assert!(run.complete && !run.codes.is_empty());
        let expected = canonical_form(&code(&["00000", "00111", "11001", "11110"])).unwrap();
        assert!(run.codes.contains(&expected));
        let run = search_codes(exhaustive_params(7, 16), None, Budget::UNLIMITED).unwrap();
        assert!(run.complete);
        assert_eq!(run.codes.len(), 1);
        let h = build_hamming(3).unwrap().linear().to_code().unwrap();
        assert_eq!(run.codes[0], canonical_form(&h).unwrap());
    }

    #[test]
    fn checkpoint_resume_matches() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.txt");
        let full = search_codes(exhaustive_params(6, 8), None, Budget::UNLIMITED).unwrap();
        let mut rounds = 0;
        let run = loop {
            let run = search_codes(exhaustive_params(6, 8), Some(&path), Budget(25)).unwrap();
            rounds += 1;
            if run.complete {
                break run;
            }
        };
        assert!(rounds > 1);
        assert_eq!(run.codes, full.codes);
        assert_eq!(run.nodes, full.nodes);
    }

    #[test]
    fn checkpoint_version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.txt");
        search_codes(exhaustive_params(5, 4), Some(&path), Budget(3)).unwrap();
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replace("version 1", "version 9");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            search_codes(exhaustive_params(5, 4), Some(&path), Budget(3)),
            Err(Error::Checkpoint(_))
        ));
    }

    #[test]
    fn heuristic_is_reproducible() {
        let p = SearchParams {
            n: 7,
            size: 16,
            dmin: 3,
            mode: SearchMode::Heuristic {
                seed: 1,
                iterations: 6,
            },
        };
        let a = search_codes(p, None, Budget::UNLIMITED).unwrap();
        let b = search_codes(p, None, Budget::UNLIMITED).unwrap();
        assert_eq!(a, b);
        assert!(!a.codes.is_empty());
        assert!(a
            .codes
            .iter()
            .all(|c| c.min_distance().unwrap() >= 3 && c.size() == 16));
    }

    #[test]
    fn hunt_self_tests() {
        let small = HuntConfig {
            n: 5,
            size: 4,
            codes: 1,
            ..HuntConfig::default()
        };
        let r = open11_hunt(&small, None, Budget::UNLIMITED, 1).unwrap();
        assert_eq!(r.encoders.len(), 1);
        let hamming = HuntConfig {
            n: 7,
            size: 16,
            codes: 1,
            ..HuntConfig::default()
        };
        let r = open11_hunt(&hamming, None, Budget::UNLIMITED, 1).unwrap();
        assert_eq!((r.examined, r.no_encoder), (1, 1));
    }
}
