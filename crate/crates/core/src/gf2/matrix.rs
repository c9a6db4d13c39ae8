use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::Word;

/// Dense matrix over GF(2), stored as bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<Word>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            cols,
            rows: vec![Word::zeros(cols); rows],
        }
    }

    pub fn identity(k: usize) -> Self {
        let rows = (1..=k).map(|i| Word::unit(k, i)).collect();
        Self { cols: k, rows }
    }

    pub fn from_rows(rows: Vec<Word>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidArgument(
                "matrix needs at least one row".into(),
            ));
        };
        let cols = first.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Builds a matrix from its columns (each a word of length `rows`).
    pub fn from_columns(columns: &[Word]) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::InvalidArgument(
                "matrix needs at least one column".into(),
            ));
        };
        let nrows = first.len();
        let mut m = Self::zeros(nrows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != nrows {
                return Err(Error::LengthMismatch {
                    expected: nrows,
                    actual: col.len(),
                });
            }
            for r in col.support() {
                m.rows[r - 1].set(c + 1, true);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Word] {
        &self.rows
    }

    /// Row `i`, 1-based.
    pub fn row(&self, i: usize) -> &Word {
        &self.rows[i - 1]
    }

    /// Column `j`, 1-based, as a word of length `nrows`.
    pub fn column(&self, j: usize) -> Word {
        let mut w = Word::zeros(self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.get(j) {
                w.set(i + 1, true);
            }
        }
        w
    }

    pub fn columns(&self) -> Vec<Word> {
        (1..=self.cols).map(|j| self.column(j)).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i - 1].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.rows[i - 1].set(j, v);
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix {
            cols: self.nrows(),
            rows: self.columns(),
        }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.nrows() != other.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.nrows(),
                actual: other.nrows(),
            });
        }
        let cols = self.cols + other.cols;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut w = Word::zeros(cols);
                for p in a.support() {
                    w.set(p, true);
                }
                for p in b.support() {
                    w.set(self.cols + p, true);
                }
                w
            })
            .collect();
        Ok(BitMatrix { cols, rows })
    }

    /// Matrix-vector product `M·x` (x indexed by columns).
    pub fn mul_vec(&self, x: &Word) -> Word {
        assert_eq!(x.len(), self.cols);
        let mut out = Word::zeros(self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(x) {
                out.set(i + 1, true);
            }
        }
        out
    }

    /// Vector-matrix product `a·M` (a indexed by rows): the XOR of selected rows.
    pub fn vec_mul(&self, a: &Word) -> Word {
        assert_eq!(a.len(), self.nrows());
        let mut out = Word::zeros(self.cols);
        for i in a.support() {
            out.xor_assign(&self.rows[i - 1]);
        }
        out
    }

    /// `self · otherᵀ`.
    pub fn mul_transpose(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                actual: other.cols,
            });
        }
        let mut out = BitMatrix::zeros(self.nrows(), other.nrows());
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in other.rows.iter().enumerate() {
                if a.dot(b) {
                    out.rows[i].set(j + 1, true);
                }
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        Echelon::new(self).rank()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Word::is_zero)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} [", self.nrows(), self.cols)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

/// Reduced row echelon form `R = T·M` together with the row transform `T`.
#[derive(Clone, Debug)]
pub struct Echelon {
    reduced: Vec<Word>,
    transform: Vec<Word>,
    pivots: Vec<usize>,
    cols: usize,
}

impl Echelon {
    pub fn new(m: &BitMatrix) -> Self {
        let nrows = m.nrows();
        let mut reduced = m.rows.clone();
        let mut transform: Vec<Word> = (1..=nrows).map(|i| Word::unit(nrows, i)).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 1..=m.cols {
            if r == nrows {
                break;
            }
            let Some(p) = (r..nrows).find(|&i| reduced[i].get(c)) else {
                continue;
            };
            reduced.swap(r, p);
            transform.swap(r, p);
            for i in 0..nrows {
                if i != r && reduced[i].get(c) {
                    let (src_r, src_t) = (reduced[r].clone(), transform[r].clone());
                    reduced[i].xor_assign(&src_r);
                    transform[i].xor_assign(&src_t);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Self {
            reduced,
            transform,
            pivots,
            cols: m.cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Pivot columns, 1-based.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// One solution of `M·x = b`, free variables set to zero.
    pub fn solve(&self, b: &Word) -> Option<Word> {
        assert_eq!(b.len(), self.reduced.len());
        let tb: Vec<bool> = self.transform.iter().map(|t| t.dot(b)).collect();
        if tb[self.rank()..].iter().any(|&v| v) {
            return None;
        }
        let mut x = Word::zeros(self.cols);
        for (i, &c) in self.pivots.iter().enumerate() {
            if tb[i] {
                x.set(c, true);
            }
        }
        Some(x)
    }

    /// Basis of `{x : M·x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Word> {
        let mut is_pivot = vec![false; self.cols + 1];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (1..=self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = Word::unit(self.cols, f);
                for (i, &c) in self.pivots.iter().enumerate() {
                    if self.reduced[i].get(f) {
                        x.set(c, true);
                    }
                }
                x
            })
            .collect()
    }
}

/// Particular solution and kernel of `G·x = e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSolution {
    pub particular: Word,
    pub kernel: Vec<Word>,
}

/// Solves `G·x = e_j` over the columns of `g`; `None` when `e_j` is outside the column span.
pub fn solve_unit(g: &BitMatrix, j: usize) -> Result<Option<UnitSolution>> {
    if j == 0 || j > g.nrows() {
        return Err(Error::IndexOutOfRange {
            index: j,
            k: g.nrows(),
        });
    }
    let ech = Echelon::new(g);
    Ok(ech
        .solve(&Word::unit(g.nrows(), j))
        .map(|particular| UnitSolution {
            particular,
            kernel: ech.kernel(),
        }))
}
