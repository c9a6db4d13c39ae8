//! Systematic linear PIR codes `(I_k | P)` with recovery witnesses emitted at
//! construction time.
//!
//! * [`build_pir3`]: rows of `P` are distinct weight-2 vectors (3-PIR).
//! * [`build_packing_pir`]: rows of `P` are incidence vectors of blocks of a
//!   2-(r, t−1, 1) packing (t-PIR).
//! * [`extend_for_even_t`]: appends an overall parity bit, turning odd t into t+1.
//!
//! For data bit `j` whose row of `P` is supported on the points `B_j`, the
//! witnesses are `{j}` and, for each `p ∈ B_j`, the set
//! `{k+p} ∪ {j' ≠ j : p ∈ B_{j'}}`. Column `k+p` equals the sum of `e_{j'}`
//! over all rows containing `p`, so each set sums to `e_j`. Two such sets are
//! disjoint because distinct rows share at most one point.

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::designs::{greedy_packing, is_packing, PackingDesign};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, Word};
use crate::recovery::{verify_pir, Encoder, RecoveryFamily, RecoverySet, VerificationReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub parameters: Vec<(String, usize)>,
}

/// A linear encoder together with one witness family per data bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructedCode {
    pub encoder: Encoder,
    pub witnesses: Vec<RecoveryFamily>,
    pub provenance: Provenance,
}

impl ConstructedCode {
    pub fn k(&self) -> usize {
        self.encoder.k()
    }

    pub fn n(&self) -> usize {
        self.encoder.n()
    }

    pub fn generator(&self) -> &BitMatrix {
        self.encoder.generator().expect("constructions are linear")
    }

    /// Number of disjoint recovery sets witnessed for every bit.
    pub fn t(&self) -> usize {
        self.witnesses
            .iter()
            .map(RecoveryFamily::t)
            .min()
            .unwrap_or(0)
    }

    /// Re-validates every witness family (disjointness and recovery).
    pub fn validate(&self) -> Result<()> {
        if self.witnesses.len() != self.k() {
            return Err(Error::Construction(format!(
                "{} witness families for k = {}",
                self.witnesses.len(),
                self.k()
            )));
        }
        for (j, f) in self.witnesses.iter().enumerate() {
            if f.bit != j + 1 {
                return Err(Error::Construction(format!(
                    "family {} is for bit {}",
                    j + 1,
                    f.bit
                )));
            }
            f.validate(&self.encoder)
                .map_err(|e| Error::Construction(e.to_string()))?;
        }
        Ok(())
    }

    /// t-PIR report using the stored witnesses.
    pub fn verify(&self, budget: Budget) -> Result<VerificationReport> {
        verify_pir(
            &self.encoder,
            self.t(),
            None,
            1,
            Some(&self.witnesses),
            budget,
        )
    }

    /// Whether the generator has the form `(I_k | P)`.
    pub fn is_systematic(&self) -> bool {
        let g = self.generator();
        (1..=self.k()).all(|i| (1..=self.k()).all(|j| g.get(i, j) == (i == j)))
    }
}

/// Smallest r with r(r−1)/2 ≥ k.
pub fn redundancy_3pir(k: usize) -> usize {
    (2..)
        .find(|&r| r * (r - 1) / 2 >= k)
        .expect("unbounded search")
}

/// `(k, n)` pairs with `n = k + min{r : r(r−1)/2 ≥ k}` for `k = 1..=kmax`.
pub fn linear_length_table(t: usize, kmax: usize) -> Result<Vec<(usize, usize)>> {
    if t != 3 {
        return Err(Error::InvalidArgument(format!(
            "linear length table is available for t = 3 only, got {t}"
        )));
    }
    if kmax == 0 {
        return Err(Error::InvalidArgument("kmax must be at least 1".into()));
    }
    Ok((1..=kmax).map(|k| (k, k + redundancy_3pir(k))).collect())
}

fn systematic(k: usize, rows_p: &[Vec<usize>], r: usize) -> Result<Encoder> {
    let n = k + r;
    let rows = rows_p
        .iter()
        .enumerate()
        .map(|(j, pts)| {
            let mut w = Word::unit(n, j + 1);
            for &p in pts {
                w.set(k + p, true);
            }
            w
        })
        .collect();
    Encoder::linear(BitMatrix::from_rows(rows)?)
}

fn point_witness(
    k: usize,
    j: usize,
    p: usize,
    rows_p: &[Vec<usize>],
    n: usize,
) -> Result<RecoverySet> {
    let mut positions = vec![k + p];
    positions.extend(
        rows_p
            .iter()
            .enumerate()
            .filter(|&(jj, pts)| jj + 1 != j && pts.contains(&p))
            .map(|(jj, _)| jj + 1),
    );
    RecoverySet::new(positions, n)
}

/// The 3-PIR code `(I_k | P)` whose rows of `P` are the first `k` weight-2
/// vectors of length r (supports in lexicographic order), r minimal.
pub fn build_pir3(k: usize) -> Result<ConstructedCode> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let r = redundancy_3pir(k);
    let mut pairs = Vec::with_capacity(k);
    'outer: for p in 1..=r {
        for q in p + 1..=r {
            if pairs.len() == k {
                break 'outer;
            }
            pairs.push(vec![p, q]);
        }
    }
    let n = k + r;
    let encoder = systematic(k, &pairs, r)?;
    let witnesses = pairs
        .iter()
        .enumerate()
        .map(|(i, pq)| {
            let j = i + 1;
            let sets = vec![
                RecoverySet::new(vec![j], n)?,
                point_witness(k, j, pq[0], &pairs, n)?,
                point_witness(k, j, pq[1], &pairs, n)?,
            ];
            Ok(RecoveryFamily { bit: j, sets })
        })
        .collect::<Result<Vec<_>>>()?;
    let code = ConstructedCode {
        encoder,
        witnesses,
        provenance: Provenance {
            construction: "pir3".into(),
            parameters: vec![("k".into(), k), ("r".into(), r)],
        },
    };
    code.validate()?;
    Ok(code)
}

/// The t-PIR code `(I_k | P)` whose rows of `P` are the incidence vectors of
/// the first `k` blocks (lexicographic) of a 2-(r, t−1, 1) packing.
pub fn build_packing_pir(k: usize, t: usize, d: &PackingDesign) -> Result<ConstructedCode> {
    if k == 0 || t < 2 {
        return Err(Error::InvalidArgument("need k >= 1 and t >= 2".into()));
    }
    if d.blocksize != t - 1 || d.strength != 2 || d.lambda != 1 {
        return Err(Error::InvalidArgument(format!(
            "need a 2-(r,{},1) packing, got {}-({},{},{})",
            t - 1,
            d.strength,
            d.v,
            d.blocksize,
            d.lambda
        )));
    }
    if !is_packing(d)?.is_valid() {
        return Err(Error::InvalidArgument(
            "design is not a valid packing".into(),
        ));
    }
    let mut blocks = d.blocks.clone();
    blocks.sort();
    blocks.dedup();
    if blocks.len() < k {
        return Err(Error::InvalidArgument(format!(
            "packing has {} distinct blocks, need {k}",
            blocks.len()
        )));
    }
    blocks.truncate(k);
    let r = d.v;
    let n = k + r;
    let encoder = systematic(k, &blocks, r)?;
    let witnesses = blocks
        .iter()
        .enumerate()
        .map(|(i, block)| {
            let j = i + 1;
            let mut sets = vec![RecoverySet::new(vec![j], n)?];
            for &p in block {
                sets.push(point_witness(k, j, p, &blocks, n)?);
            }
            Ok(RecoveryFamily { bit: j, sets })
        })
        .collect::<Result<Vec<_>>>()?;
    let code = ConstructedCode {
        encoder,
        witnesses,
        provenance: Provenance {
            construction: "packing-pir".into(),
            parameters: vec![("k".into(), k), ("t".into(), t), ("r".into(), r)],
        },
    };
    code.validate()?;
    Ok(code)
}

/// Shorthand for [`build_packing_pir`] with t = 3 over all pairs of `r` points.
pub fn build_pairs_pir(k: usize) -> Result<ConstructedCode> {
    build_packing_pir(k, 3, &greedy_packing(redundancy_3pir(k).max(2), 2)?)
}

/// Appends an overall parity position and adds, for each bit, the set of
/// positions not used by its existing witnesses.
///
/// When t is odd and each witness set sums to `e_j` column-wise, the
/// complement sums to `0 − t·e_j = e_j` because every column of the extended
/// generator sums to zero. The new family is re-validated regardless.
pub fn extend_for_even_t(c: &ConstructedCode) -> Result<ConstructedCode> {
    let g = c.generator();
    let n = c.n() + 1;
    let rows = g
        .rows()
        .iter()
        .map(|r| r.append(r.weight() % 2 == 1))
        .collect();
    let encoder = Encoder::linear(BitMatrix::from_rows(rows)?)?;
    let witnesses = c
        .witnesses
        .iter()
        .map(|f| {
            let mut used = Word::zeros(n);
            let mut sets = Vec::with_capacity(f.sets.len() + 1);
            for s in &f.sets {
                let moved = RecoverySet::new(s.positions().to_vec(), n)?;
                used = used.or(&moved.mask(n));
                sets.push(moved);
            }
            let rest = used.complement().support();
            if rest.is_empty() {
                return Err(Error::Construction(format!(
                    "no positions left for the extra set of bit {}",
                    f.bit
                )));
            }
            sets.push(RecoverySet::new(rest, n)?);
            RecoveryFamily::new(&encoder, f.bit, sets)
                .map_err(|e| Error::Construction(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut parameters = c.provenance.parameters.clone();
    parameters.push(("t".into(), c.t() + 1));
    let code = ConstructedCode {
        encoder,
        witnesses,
        provenance: Provenance {
            construction: format!("{}+parity", c.provenance.construction),
            parameters,
        },
    };
    code.validate()?;
    Ok(code)
}
