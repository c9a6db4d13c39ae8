use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::{relabel, BitMatrix, Code, Echelon, LinearCode, Word};

/// Largest code length accepted for explicit (table) encoders.
pub const MAX_EXPLICIT_LENGTH: usize = 64;
/// Largest data length accepted for explicit (table) encoders.
pub const MAX_EXPLICIT_DIMENSION: usize = 20;

/// A one-to-one map from `k`-bit data words onto a binary code of length `n`.
///
/// Data words are indexed by integers `0..2^k` with data bit 1 as the most
/// significant bit, matching the ordering of [`Word`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Encoder {
    Linear(LinearCode),
    Explicit(ExplicitTable),
}

/// Codeword table of an explicit encoder, stored as position masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitTable {
    k: usize,
    n: usize,
    masks: Vec<u64>,
}

impl ExplicitTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Codeword masks indexed by data integer; position `p` is bit `p - 1`.
    pub fn masks(&self) -> &[u64] {
        &self.masks
    }
}

/// Value of data bit `j` (1-based) in the data word with integer index `a`.
#[inline]
pub fn data_bit(a: usize, k: usize, j: usize) -> bool {
    (a >> (k - j)) & 1 == 1
}

impl Encoder {
    pub fn linear(generator: BitMatrix) -> Result<Self> {
        Ok(Encoder::Linear(LinearCode::new(generator)?))
    }

    /// Builds an explicit encoder from codewords listed in data-word order.
    pub fn explicit(table: Vec<Word>) -> Result<Self> {
        let m = table.len();
        if m == 0 || !m.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "explicit table needs 2^k entries, got {m}"
            )));
        }
        let k = m.trailing_zeros() as usize;
        if k > MAX_EXPLICIT_DIMENSION {
            return Err(Error::InvalidArgument(format!(
                "explicit tables limited to k <= {MAX_EXPLICIT_DIMENSION}"
            )));
        }
        let n = table[0].len();
        if n > MAX_EXPLICIT_LENGTH {
            return Err(Error::InvalidArgument(format!(
                "explicit tables limited to n <= {MAX_EXPLICIT_LENGTH}"
            )));
        }
        let mut seen = HashSet::with_capacity(m);
        let mut masks = Vec::with_capacity(m);
        for w in &table {
            if w.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: w.len(),
                });
            }
            if !seen.insert(w.to_mask()) {
                return Err(Error::InvalidArgument(format!(
                    "codeword {w} appears twice; an encoder must be one-to-one"
                )));
            }
            masks.push(w.to_mask());
        }
        if k == 0 {
            return Err(Error::InvalidArgument("explicit table needs k >= 1".into()));
        }
        Ok(Encoder::Explicit(ExplicitTable { k, n, masks }))
    }

    pub fn k(&self) -> usize {
        match self {
            Encoder::Linear(c) => c.dimension(),
            Encoder::Explicit(t) => t.k,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Encoder::Linear(c) => c.len(),
            Encoder::Explicit(t) => t.n,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Encoder::Linear(_))
    }

    pub fn generator(&self) -> Option<&BitMatrix> {
        match self {
            Encoder::Linear(c) => Some(c.generator()),
            Encoder::Explicit(_) => None,
        }
    }

    /// Encodes the data word with integer index `a`.
    pub fn encode_index(&self, a: usize) -> Word {
        match self {
            Encoder::Linear(c) => c.encode(&Word::from_int(a as u64, c.dimension())),
            Encoder::Explicit(t) => Word::from_mask(t.masks[a], t.n),
        }
    }

    pub fn encode(&self, data: &Word) -> Result<Word> {
        if data.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: data.len(),
            });
        }
        Ok(match self {
            Encoder::Linear(c) => c.encode(data),
            Encoder::Explicit(t) => Word::from_mask(t.masks[data.to_int() as usize], t.n),
        })
    }

    /// All codewords in data-word order.
    pub fn table(&self) -> Vec<Word> {
        (0..1usize << self.k())
            .map(|a| self.encode_index(a))
            .collect()
    }

    /// The associated code.
    pub fn code(&self) -> Code {
        Code::new(self.table()).expect("encoder tables are nonempty")
    }

    /// The same map as an explicit table.
    pub fn to_explicit(&self) -> Result<Encoder> {
        match self {
            Encoder::Explicit(_) => Ok(self.clone()),
            Encoder::Linear(_) => Encoder::explicit(self.table()),
        }
    }

    /// Inverse of the encoder on its code; `None` for words outside the code.
    pub fn decode(&self, c: &Word) -> Option<Word> {
        match self {
            Encoder::Linear(code) => {
                let g = code.generator();
                let ech = Echelon::new(&g.transpose());
                let a = ech.solve(c)?;
                (code.encode(&a) == *c).then_some(a)
            }
            Encoder::Explicit(t) => {
                let m = c.to_mask();
                t.masks
                    .iter()
                    .position(|&x| x == m)
                    .map(|a| Word::from_int(a as u64, t.k))
            }
        }
    }

    /// Parses an explicit encoder file: `2^k` lines "dataword codeword", data ascending.
    pub fn parse_explicit(text: &str) -> Result<Encoder> {
        let mut table = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(d), Some(c), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "expected \"dataword codeword\"".into(),
                });
            };
            let d: Word = d.parse().map_err(|e| relabel(e, i + 1))?;
            let c: Word = c.parse().map_err(|e| relabel(e, i + 1))?;
            if d.len() > 63 || d.to_int() != table.len() as u64 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!(
                        "data words must ascend from 0; expected index {}",
                        table.len()
                    ),
                });
            }
            table.push((d, c));
        }
        if table.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "encoder file has no entries".into(),
            });
        }
        let k = table[0].0.len();
        if let Some((d, _)) = table.iter().find(|(d, _)| d.len() != k) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("data word {d} has length != {k}"),
            });
        }
        if table.len() != 1 << k {
            return Err(Error::Parse {
                line: 0,
                msg: format!(
                    "expected {} entries for k = {k}, got {}",
                    1usize << k,
                    table.len()
                ),
            });
        }
        Encoder::explicit(table.into_iter().map(|(_, c)| c).collect()).map_err(|e| Error::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }

    /// Explicit encoder file text.
    pub fn to_explicit_text(&self) -> String {
        let k = self.k();
        let mut s = String::new();
        for (a, c) in self.table().iter().enumerate() {
            let _ = writeln!(s, "{} {}", Word::from_int(a as u64, k), c);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::parse_matrix;

    #[test]
    fn linear_and_explicit_agree() {
        let lin = Encoder::linear(parse_matrix("10110\n01101").unwrap()).unwrap();
        let exp = lin.to_explicit().unwrap();
        assert_eq!(lin.table(), exp.table());
        assert_eq!(exp.encode_index(2).to_string(), "10110");
        for c in lin.table() {
            assert_eq!(lin.decode(&c), exp.decode(&c));
        }
        assert_eq!(lin.decode(&"11111".parse().unwrap()), None);
    }

    #[test]
    fn explicit_file_round_trip() {
        let text = "0 000\n1 111\n";
        let e = Encoder::parse_explicit(text).unwrap();
        assert_eq!(e.k(), 1);
        assert_eq!(e.to_explicit_text(), text);
    }

    #[test]
    fn explicit_rejects_non_injective_and_bad_order() {
        assert!(Encoder::explicit(vec!["01".parse().unwrap(), "01".parse().unwrap()]).is_err());
        assert!(Encoder::parse_explicit("1 111\n0 000\n").is_err());
        assert!(Encoder::parse_explicit("00 000\n01 111\n10 101\n").is_err());
    }
}
