use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, Word};

/// Largest dimension for which a linear code's span is enumerated.
pub const MAX_SPAN_DIMENSION: usize = 24;

/// An explicit binary code: a sorted set of distinct words of one length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Code {
    len: usize,
    words: Vec<Word>,
}

impl Code {
    /// Builds a code, sorting and deduplicating the words.
    pub fn new(words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut words: Vec<Word> = words.into_iter().collect();
        let Some(first) = words.first() else {
            return Err(Error::InvalidArgument(
                "a code needs at least one word".into(),
            ));
        };
        let len = first.len();
        if let Some(bad) = words.iter().find(|w| w.len() != len) {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: bad.len(),
            });
        }
        words.sort();
        words.dedup();
        Ok(Self { len, words })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.binary_search(w).is_ok()
    }

    /// `k` with `size = 2^k`, if the size is a power of two.
    pub fn combinatorial_dimension(&self) -> Option<usize> {
        let m = self.size();
        m.is_power_of_two().then(|| m.trailing_zeros() as usize)
    }

    /// Minimum pairwise distance; requires at least two words.
    pub fn min_distance(&self) -> Result<usize> {
        if self.size() < 2 {
            return Err(Error::InvalidArgument(
                "minimum distance needs at least two codewords".into(),
            ));
        }
        let mut best = usize::MAX;
        'outer: for (i, a) in self.words.iter().enumerate() {
            for b in &self.words[i + 1..] {
                let d = a.distance(b);
                if d < best {
                    best = d;
                    if best == 1 {
                        break 'outer;
                    }
                }
            }
        }
        Ok(best)
    }

    /// Appends an overall parity bit so every word has even weight.
    pub fn extend_even_parity(&self) -> Code {
        let words = self
            .words
            .iter()
            .map(|w| w.append(w.weight() % 2 == 1))
            .collect::<Vec<_>>();
        Code::new(words).expect("extension preserves lengths")
    }

    /// Deletes position `pos`; the flag reports whether words collapsed.
    pub fn puncture(&self, pos: usize) -> Result<(Code, bool)> {
        if pos == 0 || pos > self.len {
            return Err(Error::PositionOutOfRange { pos, len: self.len });
        }
        if self.len == 1 {
            return Err(Error::InvalidArgument(
                "cannot puncture a length-1 code".into(),
            ));
        }
        let punctured = Code::new(self.words.iter().map(|w| w.delete(pos)))?;
        let dropped = punctured.size() < self.size();
        Ok((punctured, dropped))
    }

    /// Translate every word by `u`.
    pub fn translate(&self, u: &Word) -> Code {
        Code::new(self.words.iter().map(|w| w.xor(u))).expect("translation preserves lengths")
    }

    /// Apply a coordinate permutation: new position `i` takes old position `perm[i-1]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Code> {
        if perm.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: perm.len(),
            });
        }
        let words = self.words.iter().map(|w| {
            let mut out = Word::zeros(self.len);
            for (i, &src) in perm.iter().enumerate() {
                if w.get(src) {
                    out.set(i + 1, true);
                }
            }
            out
        });
        Code::new(words.collect::<Vec<_>>())
    }

    /// Parses the code file format: one ASCII bit string per line, `#` comments.
    pub fn parse(text: &str) -> Result<Code> {
        let mut words = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let w: Word = line.parse().map_err(|e| relabel(e, i + 1))?;
            if !seen.insert(w.clone()) {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("duplicate codeword {w}"),
                });
            }
            words.push(w);
        }
        Code::new(words).map_err(|e| match e {
            Error::InvalidArgument(msg) => Error::Parse { line: 0, msg },
            Error::LengthMismatch { expected, actual } => Error::Parse {
                line: 0,
                msg: format!("codeword length {actual} differs from {expected}"),
            },
            other => other,
        })
    }

    /// Canonical text form: sorted words, one per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for w in &self.words {
            let _ = writeln!(s, "{w}");
        }
        s
    }
}

pub(crate) fn relabel(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { line, msg },
        other => other,
    }
}

/// A binary linear code given by a full-rank generator matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    generator: BitMatrix,
}

impl LinearCode {
    pub fn new(generator: BitMatrix) -> Result<Self> {
        let rank = generator.rank();
        if rank != generator.nrows() {
            return Err(Error::RankDeficient {
                rank,
                rows: generator.nrows(),
            });
        }
        Ok(Self { generator })
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn dimension(&self) -> usize {
        self.generator.nrows()
    }

    pub fn len(&self) -> usize {
        self.generator.ncols()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Codeword for a data word of length `k`.
    pub fn encode(&self, data: &Word) -> Word {
        self.generator.vec_mul(data)
    }

    /// Visits all `2^k` span elements in Gray-code order.
    pub fn for_each_codeword(&self, mut f: impl FnMut(&Word)) -> Result<()> {
        let k = self.dimension();
        if k > MAX_SPAN_DIMENSION {
            return Err(Error::InvalidArgument(format!(
                "span enumeration limited to dimension {MAX_SPAN_DIMENSION}, got {k}"
            )));
        }
        let mut cur = Word::zeros(self.len());
        f(&cur);
        for i in 1u64..(1u64 << k) {
            let row = i.trailing_zeros() as usize;
            cur.xor_assign(&self.generator.rows()[row]);
            f(&cur);
        }
        Ok(())
    }

    pub fn to_code(&self) -> Result<Code> {
        let mut words = Vec::with_capacity(1 << self.dimension());
        self.for_each_codeword(|w| words.push(w.clone()))?;
        Code::new(words)
    }

    /// Minimum nonzero weight of the span.
    pub fn min_distance(&self) -> Result<usize> {
        let mut best = usize::MAX;
        let mut first = true;
        self.for_each_codeword(|w| {
            if first {
                first = false;
                return;
            }
            best = best.min(w.weight());
        })?;
        Ok(best)
    }

    /// Generator of the even-parity extension.
    pub fn extend_even_parity(&self) -> LinearCode {
        let rows = self
            .generator
            .rows()
            .iter()
            .map(|r| r.append(r.weight() % 2 == 1))
            .collect();
        LinearCode {
            generator: BitMatrix::from_rows(rows).expect("rows share a length"),
        }
    }
}

/// Parses the matrix file format: lines of ASCII bits, row-major, `#` comments.
pub fn parse_matrix(text: &str) -> Result<BitMatrix> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let w: Word = line.parse().map_err(|e| relabel(e, i + 1))?;
        if let Some(first) = rows.first() {
            let first: &Word = first;
            if first.len() != w.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("row length {} differs from {}", w.len(), first.len()),
                });
            }
        }
        rows.push(w);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "matrix file has no rows".into(),
        });
    }
    BitMatrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(ws: &[&str]) -> Code {
        Code::new(ws.iter().map(|w| w.parse().unwrap())).unwrap()
    }

    fn k2() -> LinearCode {
        LinearCode::new(parse_matrix("10110\n01101\n").unwrap()).unwrap()
    }

    #[test]
    fn min_distance_examples() {
        assert_eq!(code(&["000", "111"]).min_distance().unwrap(), 3);
        assert_eq!(k2().min_distance().unwrap(), 3);
        let explicit = k2().to_code().unwrap();
        assert_eq!(
            explicit.to_text(),
            "00000\n01101\n10110\n11011\n",
            "span of the k=2 generator"
        );
        assert_eq!(explicit.min_distance().unwrap(), 3);
        assert!(code(&["01"]).min_distance().is_err());
    }

    #[test]
    fn extension_examples() {
        assert_eq!(
            code(&["000", "111"]).extend_even_parity(),
            code(&["0000", "1111"])
        );
        let even = code(&["000", "011", "101"]);
        assert_eq!(even.extend_even_parity(), code(&["0000", "0110", "1010"]));
        let ext = k2().to_code().unwrap().extend_even_parity();
        assert_eq!(ext.len(), 6);
        assert_eq!(ext.min_distance().unwrap(), 4);
        assert_eq!(k2().extend_even_parity().to_code().unwrap(), ext);
    }

    #[test]
    fn puncture_examples() {
        let (p, dropped) = code(&["0000", "1111"]).puncture(4).unwrap();
        assert_eq!(p, code(&["000", "111"]));
        assert!(!dropped);
        let (p, dropped) = code(&["00", "01"]).puncture(2).unwrap();
        assert_eq!(p, code(&["0"]));
        assert!(dropped);
        assert!(code(&["00"]).puncture(3).is_err());
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            Code::parse("010\n01x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Code::parse("010\n0101\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            Code::parse("010\n010\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        let c = Code::parse("# comment\n111\n000\n").unwrap();
        assert_eq!(c.to_text(), "000\n111\n");
    }

    #[test]
    fn rank_checked() {
        let g = parse_matrix("101\n101\n").unwrap();
        assert!(matches!(
            LinearCode::new(g),
            Err(Error::RankDeficient { rank: 1, rows: 2 })
        ));
    }
}
