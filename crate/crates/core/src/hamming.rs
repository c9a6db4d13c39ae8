//! Binary Hamming codes, the lines of PG(r−1, 2), and an encoder-free proof
//! that the length-7 Hamming code admits no 3-PIR encoder.
//!
//! Position `p` of the order-r Hamming code corresponds to the nonzero vector
//! whose integer value is `p`, so points of the projective geometry and code
//! positions share one numbering and a line is a triple `{a, b, a ^ b}`.
//!
//! # The complement argument
//!
//! Suppose an encoder for a code `C` has data bit `f : C → {0,1}` recoverable
//! from three disjoint position sets. Then `f` is balanced and constant on
//! each agreement class (equal restriction to `I_i`) of all three sets, hence
//! on every connected component of the union of the three partitions.
//! If `C` is closed under complement, `c ↦ 1 + c` maps components to
//! components. When every balanced union of components is complement-closed,
//! every data bit satisfies `f(c) = f(1 + c)`, so the encoder cannot be
//! injective. [`complement_check`] enumerates every disjoint triple and
//! decides this with a subset-sum over the orbits of the complement map.
//! Only the geometric claims are spot-checked for larger orders, see
//! [`check_claims`].

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, Code, LinearCode, Word};
use crate::recovery::Encoder;

/// Largest order accepted by [`build_hamming`].
pub const MAX_ORDER: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HammingCode {
    pub r: usize,
    /// r × (2^r − 1); column `p` is the binary expansion of `p`, row 1 most significant.
    pub parity_check: BitMatrix,
    /// Identity on the positions that are not powers of two.
    pub generator: BitMatrix,
}

impl HammingCode {
    pub fn n(&self) -> usize {
        (1 << self.r) - 1
    }

    pub fn k(&self) -> usize {
        self.n() - self.r
    }

    pub fn linear(&self) -> LinearCode {
        LinearCode::new(self.generator.clone()).expect("Hamming generator has full rank")
    }

    pub fn encoder(&self) -> Encoder {
        Encoder::linear(self.generator.clone()).expect("Hamming generator has full rank")
    }

    pub fn is_codeword(&self, w: &Word) -> bool {
        w.len() == self.n() && self.parity_check.mul_vec(w).is_zero()
    }

    /// Positions carrying data under the generator, ascending.
    pub fn data_positions(&self) -> Vec<usize> {
        (1..=self.n()).filter(|p| !p.is_power_of_two()).collect()
    }
}

pub fn build_hamming(r: usize) -> Result<HammingCode> {
    if !(2..=MAX_ORDER).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "Hamming order must be in 2..={MAX_ORDER}, got {r}"
        )));
    }
    let n = (1usize << r) - 1;
    let columns: Vec<Word> = (1..=n).map(|p| Word::from_int(p as u64, r)).collect();
    let parity_check = BitMatrix::from_columns(&columns)?;
    let rows = (1..=n)
        .filter(|p| !p.is_power_of_two())
        .map(|d| {
            let mut w = Word::unit(n, d);
            for i in 0..r {
                if d >> i & 1 == 1 {
                    w.set(1 << i, true);
                }
            }
            w
        })
        .collect();
    Ok(HammingCode {
        r,
        parity_check,
        generator: BitMatrix::from_rows(rows)?,
    })
}

/// A line `{a, b, a ^ b}` of PG(r−1, 2), points ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Line(pub [usize; 3]);

impl Line {
    pub fn points(&self) -> [usize; 3] {
        self.0
    }

    pub fn characteristic(&self, n: usize) -> Word {
        Word::from_support(n, &self.0).expect("line points are positions")
    }

    fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &p| m | 1 << (p - 1))
    }
}

pub fn lines_pg(r: usize) -> Result<Vec<Line>> {
    if !(2..=MAX_ORDER).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "order must be in 2..={MAX_ORDER}, got {r}"
        )));
    }
    let n = (1usize << r) - 1;
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            let c = a ^ b;
            if c > b {
                out.push(Line([a, b, c]));
            }
        }
    }
    Ok(out)
}

/// Outcome of [`complement_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplementVerdict {
    /// Every balanced union of components is complement-closed for every triple.
    NoEncoder,
    /// Two codewords and a triple separating them: the triple itself is an encoder.
    EncoderExists,
    /// Some triple admits a balanced union that is not complement-closed.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub triple: [Vec<usize>; 3],
    /// Codewords of a balanced, component-constant set that is not complement-closed.
    pub balanced_union: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementCheck {
    pub n: usize,
    pub size: usize,
    pub verdict: ComplementVerdict,
    /// Unordered triples of disjoint nonempty position sets examined.
    pub triples: u64,
    /// Number of components → number of triples with that many.
    pub component_histogram: BTreeMap<usize, u64>,
    pub counterexample: Option<Counterexample>,
    pub elapsed_us: u64,
}

impl ComplementCheck {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Largest length for the exhaustive triple enumeration (4^n assignments).
pub const MAX_TRIPLE_LENGTH: usize = 12;

pub(crate) struct Components {
    pub(crate) of: Vec<usize>,
    pub(crate) count: usize,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub(crate) fn components(words: &[u64], triple: &[u64; 3]) -> Components {
    let m = words.len();
    let mut parent: Vec<usize> = (0..m).collect();
    let mut first: HashMap<u64, usize> = HashMap::with_capacity(m);
    for &set in triple {
        first.clear();
        for (i, &w) in words.iter().enumerate() {
            let key = w & set;
            let j = *first.entry(key).or_insert(i);
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut label = vec![usize::MAX; m];
    let mut count = 0;
    let of = (0..m)
        .map(|i| {
            let root = find(&mut parent, i);
            if label[root] == usize::MAX {
                label[root] = count;
                count += 1;
            }
            label[root]
        })
        .collect();
    Components { of, count }
}

/// Finds a union of components of total size `m / 2` that is not closed under
/// `partner` (the complement map on codeword indices), if one exists.
fn open_balanced_union(comp: &Components, partner: &[usize]) -> Option<Vec<usize>> {
    let m = comp.of.len();
    let mut size = vec![0usize; comp.count];
    let mut member = vec![0usize; comp.count];
    for (i, &c) in comp.of.iter().enumerate() {
        size[c] += 1;
        member[c] = i;
    }
    // items: fixed component (take or not) or a pair (none, both, one)
    let mut items: Vec<(usize, Option<usize>)> = Vec::new();
    let mut seen = vec![false; comp.count];
    for c in 0..comp.count {
        if seen[c] {
            continue;
        }
        let d = comp.of[partner[member[c]]];
        seen[c] = true;
        seen[d] = true;
        items.push((c, (d != c).then_some(d)));
    }
    let half = m / 2;
    // reach[i][s][broken]
    let mut reach = vec![vec![[false; 2]; half + 1]; items.len() + 1];
    reach[0][0][0] = true;
    for (i, &(c, pair)) in items.iter().enumerate() {
        let s = size[c];
        for sum in 0..=half {
            for broken in 0..2 {
                if !reach[i][sum][broken] {
                    continue;
                }
                reach[i + 1][sum][broken] = true;
                match pair {
                    None => {
                        if sum + s <= half {
                            reach[i + 1][sum + s][broken] = true;
                        }
                    }
                    Some(_) => {
                        if sum + 2 * s <= half {
                            reach[i + 1][sum + 2 * s][broken] = true;
                        }
                        if sum + s <= half {
                            reach[i + 1][sum + s][1] = true;
                        }
                    }
                }
            }
        }
    }
    if !reach[items.len()][half][1] {
        return None;
    }
    // walk back to recover one such union
    let mut chosen = Vec::new();
    let (mut sum, mut broken) = (half, 1);
    for i in (0..items.len()).rev() {
        let (c, pair) = items[i];
        let s = size[c];
        if reach[i][sum][broken] {
            continue;
        }
        match pair {
            None => {
                sum -= s;
                chosen.push(c);
            }
            Some(d) => {
                if sum >= 2 * s && reach[i][sum - 2 * s][broken] {
                    sum -= 2 * s;
                    chosen.extend([c, d]);
                } else if broken == 1 && sum >= s && (reach[i][sum - s][0] || reach[i][sum - s][1])
                {
                    broken = if reach[i][sum - s][0] { 0 } else { 1 };
                    sum -= s;
                    chosen.push(c);
                } else {
                    unreachable!("inconsistent subset-sum table");
                }
            }
        }
    }
    Some(
        comp.of
            .iter()
            .enumerate()
            .filter(|(_, c)| chosen.contains(c))
            .map(|(i, _)| i)
            .collect(),
    )
}

/// Canonical labelling: labels 1, 2, 3 first appear in that order and all appear.
fn decode_assignment(mut a: u64, n: usize) -> Option<[u64; 3]> {
    let mut sets = [0u64; 3];
    let mut next = 1;
    for p in (1..=n).rev() {
        let label = (a & 3) as usize;
        a >>= 2;
        if label > 0 {
            sets[label - 1] |= 1 << (p - 1);
        }
    }
    // scan positions in order to verify first appearances
    for p in 1..=n {
        let bit = 1u64 << (p - 1);
        if let Some(l) = (0..3).find(|&l| sets[l] & bit != 0) {
            if l + 1 > next {
                return None;
            }
            if l + 1 == next {
                next += 1;
            }
        }
    }
    (next == 4).then_some(sets)
}

fn mask_positions(mask: u64) -> Vec<usize> {
    (1..=64).filter(|&p| mask >> (p - 1) & 1 == 1).collect()
}

#[derive(Default)]
struct Tally {
    triples: u64,
    histogram: BTreeMap<usize, u64>,
    first_failure: Option<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.triples += other.triples;
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_default() += v;
        }
        self.first_failure = match (self.first_failure, other.first_failure) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Runs the complement argument over every unordered triple of disjoint
/// nonempty position sets of `code`, which must be closed under complement.
pub fn complement_check(code: &Code) -> Result<ComplementCheck> {
    let start = Instant::now();
    let n = code.len();
    if n == 0 || n > MAX_TRIPLE_LENGTH {
        return Err(Error::InvalidArgument(format!(
            "triple enumeration needs 1 <= n <= {MAX_TRIPLE_LENGTH}, got {n}"
        )));
    }
    let m = code.size();
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "code size must be a power of two at least 2, got {m}"
        )));
    }
    let ones = Word::ones(n);
    let index: HashMap<&Word, usize> = code
        .words()
        .iter()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    let partner = code
        .words()
        .iter()
        .map(|w| index.get(&w.xor(&ones)).copied())
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| Error::InvalidArgument("code is not closed under complement".into()))?;
    let words: Vec<u64> = code.words().iter().map(Word::to_mask).collect();

    let total = 1u64 << (2 * n);
    let tally = (0..total)
        .into_par_iter()
        .fold(Tally::default, |mut t, a| {
            if let Some(triple) = decode_assignment(a, n) {
                let comp = components(&words, &triple);
                t.triples += 1;
                *t.histogram.entry(comp.count).or_default() += 1;
                if t.first_failure.is_none() && open_balanced_union(&comp, &partner).is_some() {
                    t.first_failure = Some(a);
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);

    let counterexample = tally.first_failure.map(|a| {
        let triple = decode_assignment(a, n).expect("recorded assignments are canonical");
        let comp = components(&words, &triple);
        let union = open_balanced_union(&comp, &partner).expect("recorded triple fails");
        Counterexample {
            triple: triple.map(mask_positions),
            balanced_union: union.iter().map(|&i| code.words()[i].to_string()).collect(),
        }
    });
    let verdict = match (&counterexample, m) {
        (None, _) => ComplementVerdict::NoEncoder,
        (Some(_), 2) => ComplementVerdict::EncoderExists,
        (Some(_), _) => ComplementVerdict::Inconclusive,
    };
    Ok(ComplementCheck {
        n,
        size: m,
        verdict,
        triples: tally.triples,
        component_histogram: tally.histogram,
        counterexample,
        elapsed_us: start.elapsed().as_micros() as u64,
    })
}

/// [`complement_check`] on the order-r Hamming code; orders 2 and 3 only.
pub fn check_no_3pir_any_encoder(r: usize) -> Result<ComplementCheck> {
    if !(2..=3).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "exhaustive triple enumeration is limited to orders 2 and 3, got {r}"
        )));
    }
    complement_check(&build_hamming(r)?.linear().to_code()?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub r: usize,
    /// A line meeting two of the sets meets the third.
    pub lines_meet_all_three: bool,
    pub line_meeting_two: Option<Line>,
    /// No set contains a line.
    pub no_set_contains_line: bool,
    pub contained_line: Option<Line>,
    /// Unused points plus zero form a subspace H.
    pub unused_is_subspace: bool,
    /// Each set is a coset of H.
    pub sets_are_cosets: bool,
    pub sizes: [usize; 3],
    /// Every set has 2^(r−2) points.
    pub sizes_match: bool,
}

impl ClaimReport {
    pub fn all_hold(&self) -> bool {
        self.lines_meet_all_three
            && self.no_set_contains_line
            && self.unused_is_subspace
            && self.sets_are_cosets
            && self.sizes_match
    }
}

/// Evaluates the structural claims satisfied by three disjoint minimal
/// recovery sets of a common bit in the order-r Hamming code.
pub fn check_claims(r: usize, triple: &[Vec<usize>; 3]) -> Result<ClaimReport> {
    if !(2..=6).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "claims are checked for orders 2..=6, got {r}"
        )));
    }
    let n = (1usize << r) - 1;
    let mut masks = [0u64; 3];
    for (i, set) in triple.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::InvalidArgument(format!("set {} is empty", i + 1)));
        }
        for &p in set {
            if p == 0 || p > n {
                return Err(Error::PositionOutOfRange { pos: p, len: n });
            }
            let bit = 1u64 << (p - 1);
            if masks.iter().any(|m| m & bit != 0) {
                return Err(Error::InvalidArgument(format!("position {p} is repeated")));
            }
            masks[i] |= bit;
        }
    }
    let lines = lines_pg(r)?;
    let line_meeting_two = lines.iter().copied().find(|l| {
        let hits = masks.map(|m| m & l.mask() != 0);
        hits.iter().filter(|&&h| h).count() == 2
    });
    let contained_line = lines
        .iter()
        .copied()
        .find(|l| masks.iter().any(|&m| l.mask() & !m == 0));

    // H as a set of vectors including zero
    let used = masks[0] | masks[1] | masks[2];
    let mut h: Vec<usize> = vec![0];
    h.extend((1..=n).filter(|&p| used >> (p - 1) & 1 == 0));
    let h_set: std::collections::HashSet<usize> = h.iter().copied().collect();
    let unused_is_subspace = h
        .iter()
        .all(|&a| h.iter().all(|&b| h_set.contains(&(a ^ b))));
    let sets_are_cosets = unused_is_subspace
        && triple.iter().all(|set| {
            let a = set[0];
            let mut coset: Vec<usize> = h.iter().map(|&x| a ^ x).collect();
            let mut sorted = set.clone();
            coset.sort_unstable();
            sorted.sort_unstable();
            coset == sorted
        });
    let sizes = [triple[0].len(), triple[1].len(), triple[2].len()];
    let expected = 1usize << (r - 2);
    Ok(ClaimReport {
        r,
        lines_meet_all_three: line_meeting_two.is_none(),
        line_meeting_two,
        no_set_contains_line: contained_line.is_none(),
        contained_line,
        unused_is_subspace,
        sets_are_cosets,
        sizes,
        sizes_match: sizes.iter().all(|&s| s == expected),
    })
}

/// The three nonzero cosets of each codimension-2 subspace, one triple per
/// line `{a, b, a ^ b}` of the dual space.
pub fn coset_triples(r: usize) -> Result<Vec<[Vec<usize>; 3]>> {
    let n = (1usize << r) - 1;
    let dot = |x: usize, y: usize| (x & y).count_ones() & 1;
    Ok(lines_pg(r)?
        .into_iter()
        .map(|Line([a, b, _])| {
            let class = |va: u32, vb: u32| -> Vec<usize> {
                (1..=n)
                    .filter(|&x| dot(a, x) == va && dot(b, x) == vb)
                    .collect()
            };
            [class(1, 0), class(0, 1), class(1, 1)]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders() {
        let h2 = build_hamming(2).unwrap();
        assert_eq!(h2.linear().to_code().unwrap().to_text(), "000\n111\n");
        let h3 = build_hamming(3).unwrap();
        let code = h3.linear().to_code().unwrap();
        let mut enumerator = [0; 8];
        for w in code.words() {
            enumerator[w.weight()] += 1;
        }
        assert_eq!(enumerator, [1, 0, 0, 7, 7, 0, 0, 1]);
        let h4 = build_hamming(4).unwrap();
        assert_eq!((h4.n(), h4.k()), (15, 11));
        assert!(h4.is_codeword(&Word::ones(15)));
        assert!(build_hamming(1).is_err());
    }

    #[test]
    fn parity_check_annihilates_generator() {
        for r in 2..=6 {
            let h = build_hamming(r).unwrap();
            assert!(h
                .generator
                .mul_transpose(&h.parity_check)
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn line_counts() {
        assert_eq!(lines_pg(2).unwrap(), vec![Line([1, 2, 3])]);
        assert_eq!(lines_pg(3).unwrap().len(), 7);
        let h = build_hamming(4).unwrap();
        for l in lines_pg(4).unwrap() {
            assert!(h.is_codeword(&l.characteristic(15)));
        }
    }

    #[test]
    fn order_three_has_no_encoder() {
        let c = check_no_3pir_any_encoder(3).unwrap();
        assert_eq!(c.verdict, ComplementVerdict::NoEncoder);
        // (4^7 − 3·3^7 + 3·2^7 − 1) / 3!
        assert_eq!(c.triples, 1701);
        assert!(c.counterexample.is_none());
    }

    #[test]
    fn repetition_has_encoder() {
        let c = check_no_3pir_any_encoder(2).unwrap();
        assert_eq!(c.verdict, ComplementVerdict::EncoderExists);
        assert_eq!(c.triples, 1);
        let ce = c.counterexample.unwrap();
        assert_eq!(ce.triple, [vec![1], vec![2], vec![3]]);
        assert_eq!(ce.balanced_union.len(), 1);
    }

    #[test]
    fn coset_triples_satisfy_claims() {
        for r in 2..=5 {
            let triples = coset_triples(r).unwrap();
            assert_eq!(triples.len(), lines_pg(r).unwrap().len());
            for t in &triples {
                let rep = check_claims(r, t).unwrap();
                assert!(rep.all_hold(), "r = {r}, {t:?}: {rep:?}");
                assert_eq!(rep.sizes, [1 << (r - 2); 3]);
            }
        }
    }

    #[test]
    fn singletons_fail_claims_in_order_three() {
        let rep = check_claims(3, &[vec![1], vec![2], vec![3]]).unwrap();
        assert!(!rep.all_hold());
        assert!(rep.lines_meet_all_three);
        assert!(!rep.unused_is_subspace);
        assert!(!rep.sizes_match);
        assert!(check_claims(3, &[vec![1], vec![1], vec![3]]).is_err());
        assert!(check_claims(3, &[vec![], vec![2], vec![3]]).is_err());
    }
}
