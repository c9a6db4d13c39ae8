//! Property suite shared by the `properties` and `acceptance` targets.
#![allow(dead_code)]

use std::collections::HashSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use pir_codes::constructions::{build_packing_pir, build_pir3, extend_for_even_t};
use pir_codes::designs::{exact_packing, greedy_packing, is_packing, PackingSearch};
use pir_codes::gf2::{solve_unit, BitMatrix, Code, LinearCode, Word};
use pir_codes::hamming::build_hamming;
use pir_codes::recovery::{
    data_bit, find_disjoint_family, is_recovery_set, minimal_recovery_sets, verify_batch,
    verify_pir, Encoder, FamilySearch, RecoveryDecoder,
};
use pir_codes::searchlab::{
    canonical_form, encoder_exists_3pir, search_codes, EncoderSearch, SearchMode, SearchParams,
};
use pir_codes::Budget;

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Full-rank k×n generator matrices.
fn generator(kmax: usize, nmax: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=kmax)
        .prop_flat_map(move |k| (Just(k), k..=nmax))
        .prop_flat_map(|(k, n)| (Just(n), prop::collection::vec(1u64..(1u64 << n), k)))
        .prop_map(|(n, rows)| {
            BitMatrix::from_rows(rows.into_iter().map(|r| Word::from_mask(r, n)).collect()).unwrap()
        })
        .prop_filter("full rank", |g| g.rank() == g.nrows())
}

/// Explicit codes of at least two distinct words.
fn code(nmax: usize, mmax: usize) -> impl Strategy<Value = Code> {
    (2..=nmax)
        .prop_flat_map(move |n| {
            (
                Just(n),
                prop::collection::btree_set(0u64..(1u64 << n), 2..=mmax.min(1 << n)),
            )
        })
        .prop_map(|(n, words)| Code::new(words.into_iter().map(|w| Word::from_int(w, n))).unwrap())
}

/// Explicit encoders with 2^k distinct random codewords.
fn explicit_encoder(kmax: usize, nmax: usize) -> impl Strategy<Value = Encoder> {
    (1..=kmax)
        .prop_flat_map(move |k| (Just(k), k.max(2)..=nmax))
        .prop_flat_map(|(k, n)| {
            (
                Just(n),
                prop::collection::hash_set(0u64..(1u64 << n), 1 << k),
            )
        })
        .prop_flat_map(|(n, words)| {
            let words: Vec<u64> = words.into_iter().collect();
            (Just(n), Just(words.clone()).prop_shuffle())
        })
        .prop_map(|(n, words)| {
            Encoder::explicit(words.into_iter().map(|w| Word::from_int(w, n)).collect()).unwrap()
        })
}

fn brute_min_distance(words: &[Word]) -> usize {
    let mut best = usize::MAX;
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            best = best.min(
                (0..a.len())
                    .filter(|&p| a.get(p + 1) != b.get(p + 1))
                    .count(),
            );
        }
    }
    best
}

/// Recovery by definition: codewords equal on the set carry the same bit.
fn brute_recovers(e: &Encoder, j: usize, set: &[usize]) -> bool {
    let table = e.table();
    for a in 0..table.len() {
        for b in a + 1..table.len() {
            let agree = set.iter().all(|&p| table[a].get(p) == table[b].get(p));
            if agree && data_bit(a, e.k(), j) != data_bit(b, e.k(), j) {
                return false;
            }
        }
    }
    true
}

fn subset(mask: u64) -> Vec<usize> {
    (1..=64).filter(|&p| mask >> (p - 1) & 1 == 1).collect()
}

pub fn linear_min_distance_matches_pairwise() {
    proptest!(config(48), |(g in generator(8, 14))| {
        let code = LinearCode::new(g).unwrap();
        let explicit = code.to_code().unwrap();
        prop_assert_eq!(code.min_distance().unwrap(), brute_min_distance(explicit.words()));
        prop_assert_eq!(explicit.min_distance().unwrap(), brute_min_distance(explicit.words()));
    });
}

pub fn parity_extension_and_puncturing() {
    proptest!(config(48), |(c in code(9, 12), pos_seed in 0usize..64)| {
        let d = c.min_distance().unwrap();
        let ext = c.extend_even_parity().min_distance().unwrap();
        if d % 2 == 1 {
            prop_assert_eq!(ext, d + 1);
        } else {
            prop_assert_eq!(ext, d);
        }
        let pos = pos_seed % c.len() + 1;
        let (p, merged) = c.puncture(pos).unwrap();
        if !merged && p.size() >= 2 {
            let dp = p.min_distance().unwrap();
            prop_assert!(dp + 1 >= d && dp <= d);
        }
    });
}

pub fn extend_then_puncture_round_trip() {
    proptest!(config(48), |(c in code(9, 12))| {
        let (back, merged) = c.extend_even_parity().puncture(c.len() + 1).unwrap();
        prop_assert!(!merged);
        prop_assert_eq!(back, c);
    });
}

pub fn unit_solutions_check_out() {
    proptest!(config(48), |(g in generator(8, 16), j_seed in 0usize..64)| {
        let j = j_seed % g.nrows() + 1;
        if let Some(sol) = solve_unit(&g, j).unwrap() {
            prop_assert_eq!(g.mul_vec(&sol.particular), Word::unit(g.nrows(), j));
            for b in &sol.kernel {
                prop_assert!(g.mul_vec(b).is_zero());
            }
            prop_assert_eq!(sol.kernel.len(), g.ncols() - g.rank());
        }
    });
}

pub fn word_order_matches_integers() {
    proptest!(config(48), |(mut xs in prop::collection::vec(0u64..1 << 20, 1..40))| {
        let mut words: Vec<Word> = xs.iter().map(|&x| Word::from_int(x, 20)).collect();
        words.sort();
        words.dedup();
        xs.sort_unstable();
        xs.dedup();
        let back: Vec<u64> = words.iter().map(Word::to_int).collect();
        prop_assert_eq!(&back, &xs);
        let mut again = words.clone();
        again.sort();
        again.dedup();
        prop_assert_eq!(again, words);
    });
}

pub fn supersets_of_recovery_sets_recover() {
    proptest!(config(48), |(g in generator(4, 9), extra in prop::collection::vec(any::<u64>(), 4))| {
        let e = Encoder::linear(g).unwrap();
        let n = e.n();
        for j in 1..=e.k() {
            let found = minimal_recovery_sets(&e, j, n, Budget::UNLIMITED).unwrap();
            prop_assert!(found.complete);
            for (s, &x) in found.sets.iter().zip(extra.iter().cycle()) {
                let grown = s.mask(n).to_mask() | (x & ((1u64 << n) - 1));
                prop_assert!(is_recovery_set(&e, j, &subset(grown)).unwrap());
            }
        }
    });
}

pub fn disjoint_families_validate() {
    proptest!(config(48), |(g in generator(4, 10), t in 1usize..4)| {
        let e = Encoder::linear(g).unwrap();
        for j in 1..=e.k() {
            if let (FamilySearch::Found(f), _) = find_disjoint_family(&e, j, t, e.n(), Budget::UNLIMITED).unwrap() {
                prop_assert_eq!(f.t(), t);
                prop_assert!(f.validate(&e).is_ok());
            }
        }
    });
}

pub fn explicit_recovery_matches_definition() {
    proptest!(config(48), |(e in explicit_encoder(3, 7))| {
        let n = e.n();
        for mask in 1u64..(1 << n) {
            let set = subset(mask);
            for j in 1..=e.k() {
                prop_assert_eq!(is_recovery_set(&e, j, &set).unwrap(), brute_recovers(&e, j, &set));
            }
        }
    });
}

pub fn explicit_decoders_reproduce_bits() {
    proptest!(config(48), |(e in explicit_encoder(3, 7))| {
        for j in 1..=e.k() {
            let sets = minimal_recovery_sets(&e, j, e.n(), Budget::UNLIMITED).unwrap();
            for s in &sets.sets {
                let dec = RecoveryDecoder::new(&e, j, s).unwrap().expect("minimal sets recover");
                for a in 0..1usize << e.k() {
                    prop_assert_eq!(dec.decode(&e.encode_index(a)), Some(data_bit(a, e.k(), j)));
                }
            }
        }
    });
}

pub fn batch_implies_pir() {
    proptest!(config(48), |(g in generator(3, 8), t in 1usize..4)| {
        let e = Encoder::linear(g).unwrap();
        if verify_batch(&e, t, Budget::UNLIMITED).unwrap().holds() {
            prop_assert!(verify_pir(&e, t, None, 1, None, Budget::UNLIMITED).unwrap().holds());
        }
    });
}

pub fn pir_codes_respect_distance_bound() {
    proptest!(config(48), |(e in explicit_encoder(3, 7), t in 1usize..5, mu in 1usize..3)| {
        let r = verify_pir(&e, t, None, mu, None, Budget::UNLIMITED).unwrap();
        if r.holds() {
            prop_assert!(e.code().min_distance().unwrap() >= t.div_ceil(mu));
        }
    });
}

pub fn linear_and_explicit_agree_on_all_subsets() {
    proptest!(config(16), |(g in generator(5, 10))| {
        let lin = Encoder::linear(g).unwrap();
        let exp = lin.to_explicit().unwrap();
        let n = lin.n();
        for mask in 1u64..(1 << n) {
            let set = subset(mask);
            for j in 1..=lin.k() {
                prop_assert_eq!(is_recovery_set(&lin, j, &set).unwrap(), is_recovery_set(&exp, j, &set).unwrap());
            }
        }
    });
}

pub fn canonical_form_is_a_class_invariant() {
    proptest!(config(16), |(c in code(6, 8), perm in Just((1..=6usize).collect::<Vec<_>>()).prop_shuffle(), shift in 0u64..64,)| {
        let n = c.len();
        let perm: Vec<usize> = perm.into_iter().filter(|&p| p <= n).collect();
        let moved = c.permute(&perm).unwrap().translate(&Word::from_int(shift % (1 << n), n));
        let a = canonical_form(&c).unwrap();
        prop_assert_eq!(canonical_form(&a).unwrap(), a.clone());
        prop_assert_eq!(canonical_form(&moved).unwrap(), a);
    });
}

pub fn complement_preserves_agreement() {
    proptest!(config(16), |(r in 2usize..=4, picks in prop::collection::vec((any::<u16>(), any::<u16>(), any::<u16>()), 8))| {
        let h = build_hamming(r).unwrap();
        let words = h.linear().to_code().unwrap();
        let n = h.n();
        let ones = Word::ones(n);
        for (a, b, s) in picks {
            let c = &words.words()[a as usize % words.size()];
            let d = &words.words()[b as usize % words.size()];
            let set = Word::from_mask(s as u64 & ((1u64 << n) - 1), n);
            let same = c.and(&set) == d.and(&set);
            let same_complemented = c.xor(&ones).and(&set) == d.xor(&ones).and(&set);
            prop_assert_eq!(same, same_complemented);
            prop_assert!(words.contains(&c.xor(&ones)));
        }
    });
}

pub fn checkpoint_resume_is_deterministic() {
    proptest!(config(16), |(step in 5u64..200, n in 5usize..=6, size in 4usize..=8)| {
        let params = SearchParams { n, size, dmin: 3, mode: SearchMode::Exhaustive };
        let full = search_codes(params, None, Budget::UNLIMITED).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("search.ckpt");
        let resumed = loop {
            let run = search_codes(params, Some(&path), Budget(step)).unwrap();
            if run.complete {
                break run;
            }
        };
        prop_assert_eq!(resumed.codes, full.codes);
    });
}

pub fn constructor_packings_are_valid() {
    for v in 2..=16 {
        let d = greedy_packing(v, 2).unwrap();
        assert_eq!(d.num_blocks(), v * (v - 1) / 2);
        assert!(is_packing(&d).unwrap().is_valid());
        for b in 3..=5.min(v) {
            assert!(is_packing(&greedy_packing(v, b).unwrap())
                .unwrap()
                .is_valid());
        }
    }
    for r in 4..=13 {
        let target = pir_codes::designs::packing_number_formula(r).unwrap();
        let (PackingSearch::Found(d), _) = exact_packing(r, 4, target, Budget(50_000_000)).unwrap()
        else {
            panic!("no packing for r = {r}");
        };
        assert!(is_packing(&d).unwrap().is_valid());
        assert_eq!(d.num_blocks(), target);
    }
}

pub fn constructed_families_validate() {
    for k in 1..=12 {
        let c = build_pir3(k).unwrap();
        c.validate().unwrap();
        assert!(c.is_systematic());
        assert_eq!(c.encoder.code().min_distance().unwrap(), 3, "k = {k}");
        let ext = extend_for_even_t(&c).unwrap();
        ext.validate().unwrap();
        assert_eq!(ext.encoder.code().min_distance().unwrap(), 4, "k = {k}");
        let pairs = build_packing_pir(k, 3, &greedy_packing(c.n() - k, 2).unwrap()).unwrap();
        assert_eq!(pairs.generator(), c.generator());
    }
}

pub fn hamming_invariants() {
    for r in 2..=6 {
        let h = build_hamming(r).unwrap();
        let n = h.n();
        assert!(h.is_codeword(&Word::ones(n)));
        if r <= 4 {
            assert_eq!(h.linear().min_distance().unwrap(), 3);
        }
        // distinct nonzero parity-check columns give d >= 3, any line gives d <= 3
        let cols: HashSet<Word> = h.parity_check.columns().into_iter().collect();
        assert!(cols.len() == n && !cols.contains(&Word::zeros(r)));
        let lines = pir_codes::hamming::lines_pg(r).unwrap();
        assert_eq!(lines.len() * 6, n * (n - 1));
        let mut on = vec![0usize; n + 1];
        for l in &lines {
            assert!(h.is_codeword(&l.characteristic(n)));
            for p in l.points() {
                on[p] += 1;
            }
        }
        assert!(on[1..].iter().all(|&c| c == (1 << (r - 1)) - 1));
    }
}

/// Every bijection from 2-bit data onto the code, checked by the generic verifier.
fn brute_force_3pir(code: &Code) -> bool {
    let words = code.words();
    let mut idx = [0usize, 1, 2, 3];
    let mut perms = Vec::new();
    permutations(&mut idx, 0, &mut perms);
    perms.iter().any(|p| {
        let e = Encoder::explicit(p.iter().map(|&i| words[i].clone()).collect()).unwrap();
        verify_pir(&e, 3, None, 1, None, Budget::UNLIMITED)
            .unwrap()
            .holds()
    })
}

fn permutations(a: &mut [usize; 4], i: usize, out: &mut Vec<[usize; 4]>) {
    if i == a.len() {
        out.push(*a);
        return;
    }
    for j in i..a.len() {
        a.swap(i, j);
        permutations(a, i + 1, out);
        a.swap(i, j);
    }
}

pub fn encoder_existence_matches_brute_force_on_four_word_codes() {
    for n in 2..=5usize {
        // PIR existence is invariant under permutation and translation, so
        // one code per class (containing zero) covers all codes.
        let mut classes = HashSet::new();
        let total = 1u64 << n;
        for a in 1..total {
            for b in a + 1..total {
                for c in b + 1..total {
                    let code = Code::new([0, a, b, c].map(|w| Word::from_int(w, n))).unwrap();
                    classes.insert(canonical_form(&code).unwrap());
                }
            }
        }
        for code in classes {
            let (out, _) = encoder_exists_3pir(&code, 20, Budget::UNLIMITED).unwrap();
            let found = match out {
                EncoderSearch::Found { .. } => true,
                EncoderSearch::None => false,
                EncoderSearch::Unknown => panic!("undecided on {code:?}"),
            };
            assert_eq!(found, brute_force_3pir(&code), "{}", code.to_text());
        }
    }
}

/// Every property, by name, for runners that report them one by one.
pub const SUITE: &[(&str, fn())] = &[
    (
        "linear_min_distance_matches_pairwise",
        linear_min_distance_matches_pairwise,
    ),
    (
        "parity_extension_and_puncturing",
        parity_extension_and_puncturing,
    ),
    (
        "extend_then_puncture_round_trip",
        extend_then_puncture_round_trip,
    ),
    ("unit_solutions_check_out", unit_solutions_check_out),
    ("word_order_matches_integers", word_order_matches_integers),
    (
        "supersets_of_recovery_sets_recover",
        supersets_of_recovery_sets_recover,
    ),
    ("disjoint_families_validate", disjoint_families_validate),
    (
        "explicit_recovery_matches_definition",
        explicit_recovery_matches_definition,
    ),
    (
        "explicit_decoders_reproduce_bits",
        explicit_decoders_reproduce_bits,
    ),
    ("batch_implies_pir", batch_implies_pir),
    (
        "pir_codes_respect_distance_bound",
        pir_codes_respect_distance_bound,
    ),
    (
        "linear_and_explicit_agree_on_all_subsets",
        linear_and_explicit_agree_on_all_subsets,
    ),
    (
        "canonical_form_is_a_class_invariant",
        canonical_form_is_a_class_invariant,
    ),
    (
        "complement_preserves_agreement",
        complement_preserves_agreement,
    ),
    (
        "checkpoint_resume_is_deterministic",
        checkpoint_resume_is_deterministic,
    ),
    (
        "constructor_packings_are_valid",
        constructor_packings_are_valid,
    ),
    (
        "constructed_families_validate",
        constructed_families_validate,
    ),
    ("hamming_invariants", hamming_invariants),
    (
        "encoder_existence_matches_brute_force_on_four_word_codes",
        encoder_existence_matches_brute_force_on_four_word_codes,
    ),
];
