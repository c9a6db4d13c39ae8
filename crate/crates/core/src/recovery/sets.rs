use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::gf2::{Echelon, Word};
use crate::recovery::encoder::{data_bit, Encoder};

/// Kernel dimension up to which linear minimal sets come from walking the
/// solution coset; larger kernels fall back to subset enumeration.
const MAX_COSET_DIMENSION: usize = 22;

/// A nonempty set of codeword positions (1-based, ascending).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RecoverySet(Vec<usize>);

impl RecoverySet {
    pub fn new(mut positions: Vec<usize>, n: usize) -> Result<Self> {
        positions.sort_unstable();
        positions.dedup();
        if positions.is_empty() {
            return Err(Error::InvalidArgument(
                "recovery set must be nonempty".into(),
            ));
        }
        if let Some(&p) = positions.iter().find(|&&p| p == 0 || p > n) {
            return Err(Error::PositionOutOfRange { pos: p, len: n });
        }
        Ok(Self(positions))
    }

    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mask(&self, n: usize) -> Word {
        Word::from_support(n, &self.0).expect("positions validated on construction")
    }

    pub(crate) fn from_mask(mask: &Word) -> Self {
        Self(mask.support())
    }
}

/// Orders sets by size, then lexicographically.
pub(crate) fn size_lex(a: &RecoverySet, b: &RecoverySet) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0))
}

/// Software parallel-bit-extract: gathers the bits of `x` selected by `mask`.
#[inline]
pub(crate) fn pext(x: u64, mut mask: u64) -> u64 {
    let mut out = 0u64;
    let mut bit = 0;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        if x & low != 0 {
            out |= 1 << bit;
        }
        bit += 1;
        mask ^= low;
    }
    out
}

/// Precomputed recovery-set test for one encoder.
pub(crate) struct Oracle<'a> {
    encoder: &'a Encoder,
    columns: Vec<Word>,
    scratch: Vec<u8>,
    map: HashMap<u64, bool>,
}

impl<'a> Oracle<'a> {
    pub(crate) fn new(encoder: &'a Encoder) -> Self {
        let columns = encoder.generator().map(|g| g.columns()).unwrap_or_default();
        Self {
            encoder,
            columns,
            scratch: Vec::new(),
            map: HashMap::new(),
        }
    }

    pub(crate) fn check(&mut self, j: usize, set: &Word) -> bool {
        match self.encoder {
            Encoder::Linear(_) => {
                let target = Word::unit(self.encoder.k(), j);
                in_span(&target, set.support().iter().map(|&p| &self.columns[p - 1]))
            }
            Encoder::Explicit(table) => {
                let m = set.to_mask();
                let width = m.count_ones();
                let k = table.k();
                if width <= 16 {
                    let size = 1usize << width;
                    self.scratch.clear();
                    self.scratch.resize(size, 2);
                    for (a, &cw) in table.masks().iter().enumerate() {
                        let key = pext(cw, m) as usize;
                        let bit = data_bit(a, k, j) as u8;
                        match self.scratch[key] {
                            2 => self.scratch[key] = bit,
                            b if b != bit => return false,
                            _ => {}
                        }
                    }
                    true
                } else {
                    self.map.clear();
                    for (a, &cw) in table.masks().iter().enumerate() {
                        let bit = data_bit(a, k, j);
                        if *self.map.entry(cw & m).or_insert(bit) != bit {
                            return false;
                        }
                    }
                    true
                }
            }
        }
    }
}

/// Whether `target` lies in the span of `vectors`.
pub(crate) fn in_span<'v>(target: &Word, vectors: impl Iterator<Item = &'v Word>) -> bool {
    let mut basis: Vec<(usize, Word)> = Vec::new();
    for v in vectors {
        let mut v = v.clone();
        for (p, b) in &basis {
            if v.get(*p) {
                v.xor_assign(b);
            }
        }
        if let Some(&p) = v.support().first() {
            basis.push((p, v));
        }
    }
    let mut t = target.clone();
    for (p, b) in &basis {
        if t.get(*p) {
            t.xor_assign(b);
        }
    }
    t.is_zero()
}

fn check_index(e: &Encoder, j: usize) -> Result<()> {
    if j == 0 || j > e.k() {
        return Err(Error::IndexOutOfRange { index: j, k: e.k() });
    }
    Ok(())
}

/// Whether the positions in `set` determine data bit `j` on every codeword.
pub fn is_recovery_set(e: &Encoder, j: usize, set: &[usize]) -> Result<bool> {
    check_index(e, j)?;
    let set = RecoverySet::new(set.to_vec(), e.n())?;
    Ok(Oracle::new(e).check(j, &set.mask(e.n())))
}

/// Inclusion-minimal recovery sets of one data bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalSets {
    /// Sorted by size, then lexicographically.
    pub sets: Vec<RecoverySet>,
    /// False iff the node budget ran out before enumeration finished.
    pub complete: bool,
    pub nodes: u64,
}

/// Enumerates all minimal recovery sets of bit `j` with at most `max_width` positions.
pub fn minimal_recovery_sets(
    e: &Encoder,
    j: usize,
    max_width: usize,
    budget: Budget,
) -> Result<MinimalSets> {
    check_index(e, j)?;
    if max_width == 0 {
        return Err(Error::InvalidArgument(
            "max_width must be at least 1".into(),
        ));
    }
    let mut meter = budget.meter();
    let sets = minimal_sets_metered(e, j, max_width.min(e.n()), &mut meter);
    Ok(MinimalSets {
        sets,
        complete: !meter.exhausted(),
        nodes: meter.used(),
    })
}

pub(crate) fn minimal_sets_metered(
    e: &Encoder,
    j: usize,
    max_width: usize,
    meter: &mut Meter,
) -> Vec<RecoverySet> {
    if let Encoder::Linear(code) = e {
        let ech = Echelon::new(code.generator());
        let nullity = e.n() - ech.rank();
        if nullity <= MAX_COSET_DIMENSION && (1u64 << nullity) <= meter.remaining() {
            return linear_minimal_sets(&ech, e.n(), e.k(), j, max_width, meter);
        }
    }
    subset_minimal_sets(e, j, max_width, meter)
}

/// Walks the coset `x0 + ker(G)` in Gray-code order and keeps minimal supports.
fn linear_minimal_sets(
    ech: &Echelon,
    n: usize,
    k: usize,
    j: usize,
    max_width: usize,
    meter: &mut Meter,
) -> Vec<RecoverySet> {
    let Some(mut x) = ech.solve(&Word::unit(k, j)) else {
        meter.tick();
        return Vec::new();
    };
    let kernel = ech.kernel();
    meter.charge(1u64 << kernel.len());
    let mut supports = Vec::new();
    if x.weight() <= max_width {
        supports.push(x.clone());
    }
    for i in 1u64..(1u64 << kernel.len()) {
        x.xor_assign(&kernel[i.trailing_zeros() as usize]);
        if x.weight() <= max_width {
            supports.push(x.clone());
        }
    }
    let mut candidates: Vec<RecoverySet> = supports.iter().map(RecoverySet::from_mask).collect();
    candidates.sort_by(size_lex);
    candidates.dedup();
    let mut kept: Vec<(RecoverySet, Word)> = Vec::new();
    for c in candidates {
        let w = c.mask(n);
        if kept.iter().all(|(_, m)| !m.is_subset_of(&w)) {
            kept.push((c, w));
        }
    }
    kept.into_iter().map(|(c, _)| c).collect()
}

/// Tests subsets in (size, lexicographic) order, skipping supersets of sets already found.
fn subset_minimal_sets(
    e: &Encoder,
    j: usize,
    max_width: usize,
    meter: &mut Meter,
) -> Vec<RecoverySet> {
    let n = e.n();
    let mut oracle = Oracle::new(e);
    let mut found: Vec<Word> = Vec::new();
    let mut out = Vec::new();
    for size in 1..=max_width {
        let mut idx: Vec<usize> = (1..=size).collect();
        loop {
            if !meter.tick() {
                return out;
            }
            let mask = Word::from_support(n, &idx).expect("indices in range");
            if found.iter().all(|f| !f.is_subset_of(&mask)) && oracle.check(j, &mask) {
                out.push(RecoverySet(idx.clone()));
                found.push(mask);
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    out
}

/// Advances a sorted combination of `1..=n` in lexicographic order.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let s = idx.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if idx[i] < n - (s - 1 - i) {
            idx[i] += 1;
            for t in i + 1..s {
                idx[t] = idx[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `t` mutually disjoint recovery sets for one data bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryFamily {
    pub bit: usize,
    pub sets: Vec<RecoverySet>,
}

impl RecoveryFamily {
    /// Validates disjointness and every set's recovery property.
    pub fn new(e: &Encoder, bit: usize, sets: Vec<RecoverySet>) -> Result<Self> {
        let family = Self { bit, sets };
        family.validate(e)?;
        Ok(family)
    }

    pub fn validate(&self, e: &Encoder) -> Result<()> {
        check_index(e, self.bit)?;
        let n = e.n();
        let mut used = Word::zeros(n);
        let mut oracle = Oracle::new(e);
        for s in &self.sets {
            RecoverySet::new(s.0.clone(), n)?;
            let m = s.mask(n);
            if !m.is_disjoint(&used) {
                return Err(Error::InvalidArgument(format!(
                    "recovery sets of bit {} overlap at {:?}",
                    self.bit,
                    m.and(&used).support()
                )));
            }
            if !oracle.check(self.bit, &m) {
                return Err(Error::InvalidArgument(format!(
                    "{:?} is not a recovery set of bit {}",
                    s.0, self.bit
                )));
            }
            used = used.or(&m);
        }
        Ok(())
    }

    pub fn t(&self) -> usize {
        self.sets.len()
    }
}

/// Outcome of a disjoint-family search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySearch {
    Found(RecoveryFamily),
    /// The node budget ran out; nothing is claimed.
    BudgetExhausted,
    /// Enumeration and search were both complete and found nothing.
    ProvenImpossible,
}

/// Backtracking search for `t` disjoint recovery sets of bit `j`, each of
/// size at most `max_width`.
pub fn find_disjoint_family(
    e: &Encoder,
    j: usize,
    t: usize,
    max_width: usize,
    budget: Budget,
) -> Result<(FamilySearch, u64)> {
    check_index(e, j)?;
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    let n = e.n();
    let mut meter = budget.meter();
    let sets = minimal_sets_metered(e, j, max_width.clamp(1, n), &mut meter);
    let enumeration_complete = !meter.exhausted();
    let masks: Vec<Word> = sets.iter().map(|s| s.mask(n)).collect();
    let mut chosen = Vec::with_capacity(t);
    let found = pick_disjoint(&masks, t, 0, &Word::zeros(n), &mut chosen, &mut meter);
    let result = if found {
        let family = RecoveryFamily {
            bit: j,
            sets: chosen.iter().map(|&i| sets[i].clone()).collect(),
        };
        family.validate(e)?;
        FamilySearch::Found(family)
    } else if enumeration_complete && !meter.exhausted() {
        FamilySearch::ProvenImpossible
    } else {
        FamilySearch::BudgetExhausted
    };
    Ok((result, meter.used()))
}

fn pick_disjoint(
    masks: &[Word],
    t: usize,
    start: usize,
    used: &Word,
    chosen: &mut Vec<usize>,
    meter: &mut Meter,
) -> bool {
    if chosen.len() == t {
        return true;
    }
    for i in start..masks.len() {
        if masks.len() - i < t - chosen.len() {
            break;
        }
        if !meter.tick() {
            return false;
        }
        if masks[i].is_disjoint(used) {
            chosen.push(i);
            if pick_disjoint(masks, t, i + 1, &used.or(&masks[i]), chosen, meter) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Decodes one data bit from the restriction of a codeword to a recovery set.
#[derive(Clone, Debug)]
pub struct RecoveryDecoder {
    set: Word,
    rule: DecodeRule,
}

#[derive(Clone, Debug)]
enum DecodeRule {
    /// Bit equals the inner product with a solution of `G·x = e_j` supported in the set.
    Linear(Word),
    Table(HashMap<u64, bool>),
}

impl RecoveryDecoder {
    /// `None` when `set` is not a recovery set for bit `j`.
    pub fn new(e: &Encoder, j: usize, set: &RecoverySet) -> Result<Option<Self>> {
        check_index(e, j)?;
        let n = e.n();
        let mask = set.mask(n);
        match e {
            Encoder::Linear(code) => {
                let g = code.generator();
                let cols: Vec<Word> = set.positions().iter().map(|&p| g.column(p)).collect();
                let sub = crate::gf2::BitMatrix::from_columns(&cols)?;
                let Some(y) = Echelon::new(&sub).solve(&Word::unit(e.k(), j)) else {
                    return Ok(None);
                };
                let mut x = Word::zeros(n);
                for (i, &p) in set.positions().iter().enumerate() {
                    if y.get(i + 1) {
                        x.set(p, true);
                    }
                }
                Ok(Some(Self {
                    set: mask,
                    rule: DecodeRule::Linear(x),
                }))
            }
            Encoder::Explicit(table) => {
                let m = mask.to_mask();
                let mut map = HashMap::new();
                for (a, &cw) in table.masks().iter().enumerate() {
                    let bit = data_bit(a, table.k(), j);
                    if *map.entry(cw & m).or_insert(bit) != bit {
                        return Ok(None);
                    }
                }
                Ok(Some(Self {
                    set: mask,
                    rule: DecodeRule::Table(map),
                }))
            }
        }
    }

    /// Reads only the positions of the recovery set.
    pub fn decode(&self, codeword: &Word) -> Option<bool> {
        let restricted = codeword.and(&self.set);
        match &self.rule {
            DecodeRule::Linear(x) => Some(restricted.dot(x)),
            DecodeRule::Table(map) => map.get(&restricted.to_mask()).copied(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{parse_matrix, BitMatrix};

    fn k2() -> Encoder {
        Encoder::linear(parse_matrix("10110\n01101").unwrap()).unwrap()
    }

    fn rep3() -> Encoder {
        Encoder::linear(parse_matrix("111").unwrap()).unwrap()
    }

    fn sets(v: &[&[usize]]) -> Vec<RecoverySet> {
        v.iter().map(|s| RecoverySet(s.to_vec())).collect()
    }

    #[test]
    fn recovery_set_examples() {
        let id = Encoder::linear(BitMatrix::identity(3)).unwrap();
        for j in 1..=3 {
            assert!(is_recovery_set(&id, j, &[j]).unwrap());
        }
        assert!(is_recovery_set(&k2(), 1, &[3, 5]).unwrap());
        assert!(!is_recovery_set(&k2(), 1, &[5]).unwrap());
        assert!(is_recovery_set(&k2(), 3, &[1]).is_err());
        assert!(is_recovery_set(&k2(), 1, &[6]).is_err());
    }

    #[test]
    fn explicit_variant_matches() {
        let e = k2().to_explicit().unwrap();
        assert!(is_recovery_set(&e, 1, &[3, 5]).unwrap());
        assert!(!is_recovery_set(&e, 1, &[5]).unwrap());
    }

    #[test]
    fn minimal_sets_examples() {
        let id = Encoder::linear(BitMatrix::identity(4)).unwrap();
        let m = minimal_recovery_sets(&id, 2, 4, Budget::UNLIMITED).unwrap();
        assert_eq!(m.sets, sets(&[&[2]]));
        assert!(m.complete);

        let expected = sets(&[&[1], &[4], &[2, 3], &[3, 5]]);
        let m = minimal_recovery_sets(&k2(), 1, 3, Budget::UNLIMITED).unwrap();
        assert_eq!(m.sets, expected);
        let m =
            minimal_recovery_sets(&k2().to_explicit().unwrap(), 1, 3, Budget::UNLIMITED).unwrap();
        assert_eq!(m.sets, expected);
    }

    #[test]
    fn budget_flags_incomplete() {
        let e = k2().to_explicit().unwrap();
        let m = minimal_recovery_sets(&e, 1, 5, Budget(3)).unwrap();
        assert!(!m.complete);
    }

    #[test]
    fn zero_column_never_used() {
        let e = Encoder::linear(parse_matrix("10010\n01001").unwrap()).unwrap();
        for j in 1..=2 {
            let m = minimal_recovery_sets(&e, j, 5, Budget::UNLIMITED).unwrap();
            assert!(m.sets.iter().all(|s| !s.positions().contains(&3)));
        }
    }

    #[test]
    fn family_examples() {
        let (r, _) = find_disjoint_family(&rep3(), 1, 3, 3, Budget::UNLIMITED).unwrap();
        assert_eq!(
            r,
            FamilySearch::Found(RecoveryFamily {
                bit: 1,
                sets: sets(&[&[1], &[2], &[3]])
            })
        );
        let (r, _) = find_disjoint_family(&k2(), 1, 3, 5, Budget::UNLIMITED).unwrap();
        // first disjoint triple in (size, lex) order; {1},{4},{3,5} is equally valid
        assert_eq!(
            r,
            FamilySearch::Found(RecoveryFamily {
                bit: 1,
                sets: sets(&[&[1], &[4], &[2, 3]])
            })
        );
        let (r, _) = find_disjoint_family(&rep3(), 1, 4, 3, Budget::UNLIMITED).unwrap();
        assert_eq!(r, FamilySearch::ProvenImpossible);
    }

    #[test]
    fn family_validation_rejects_overlap() {
        assert!(RecoveryFamily::new(&k2(), 1, sets(&[&[1], &[1, 4]])).is_err());
        assert!(RecoveryFamily::new(&k2(), 1, sets(&[&[5]])).is_err());
    }

    #[test]
    fn decoders_reproduce_bits() {
        for e in [k2(), k2().to_explicit().unwrap()] {
            for set in sets(&[&[1], &[4], &[2, 3], &[3, 5]]) {
                let dec = RecoveryDecoder::new(&e, 1, &set).unwrap().unwrap();
                for a in 0..4 {
                    let c = e.encode_index(a);
                    assert_eq!(dec.decode(&c), Some(data_bit(a, 2, 1)));
                }
            }
            assert!(RecoveryDecoder::new(&e, 1, &RecoverySet(vec![5]))
                .unwrap()
                .is_none());
        }
    }

    #[test]
    fn pext_gathers_bits() {
        assert_eq!(pext(0b1011_0110, 0b1111_0000), 0b1011);
        assert_eq!(pext(0b1010, 0b1010), 0b11);
    }
}
