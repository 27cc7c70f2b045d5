//! Invariants checked against independently computed values: a Leibniz
//! expansion of det(tI - G), minimal polynomials frozen from a computer
//! algebra run, and the printed polynomial lists for five points.

use gromov_core::census::reference_structures;
use gromov_core::equivalence::next_permutation;
use gromov_core::invariants::{char_poly, eval_at_matrix, min_poly, trace_powers};
use gromov_core::linalg::IntMatrix;
use gromov_core::structure::from_compact_triples;
use gromov_core::{fingerprint, matrix_rep, GromovStructure, IntegerPolynomial, StructureMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn sign(p: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1 } else { -1 }
}

/// det(tI - G) summed over all n! permutations.
fn leibniz(g: &StructureMatrix) -> IntegerPolynomial {
    let n = g.n();
    let mut total = vec![0i64; n + 1];
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        let mut term = vec![sign(&p)];
        for (i, &j) in p.iter().enumerate() {
            let entry = if i == j { vec![-i64::from(g.get(i, i)), 1] } else { vec![-i64::from(g.get(i, j))] };
            term = poly_mul(&term, &entry);
        }
        for (k, c) in term.iter().enumerate() {
            total[k] += c;
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    IntegerPolynomial::from_i64(&total)
}

fn s(triples: &str) -> GromovStructure {
    from_compact_triples(&triples.split(',').collect::<Vec<_>>()).unwrap()
}

fn poly(text: &str) -> IntegerPolynomial {
    IntegerPolynomial::parse(text).unwrap()
}

fn arbitrary_structure(max_n: usize) -> impl Strategy<Value = GromovStructure> {
    (3..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n - 1, 0..n - 2), n).prop_map(move |choices| {
            let pairs = choices
                .into_iter()
                .enumerate()
                .map(|(i, (x, y))| {
                    let others: Vec<usize> = (0..n).filter(|&v| v != i).collect();
                    let a = others[x];
                    let rest: Vec<usize> = others.into_iter().filter(|&v| v != a).collect();
                    (a, rest[y])
                })
                .collect();
            GromovStructure::new(pairs).unwrap()
        })
    })
}

#[test]
fn leibniz_matches_on_reference_structures() {
    for n in [4, 5, 6] {
        for r in reference_structures(n).unwrap() {
            let g = matrix_rep(&r.structure);
            assert_eq!(char_poly(&g), leibniz(&g), "{}", r.label);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn leibniz_matches_on_arbitrary_structures(st in arbitrary_structure(6)) {
        let g = matrix_rep(&st);
        prop_assert_eq!(char_poly(&g), leibniz(&g));
    }

    #[test]
    fn minimal_polynomial_is_minimal(st in arbitrary_structure(7)) {
        let g = matrix_rep(&st);
        let m = min_poly(&g).to_integer().expect("integer matrices have integer minimal polynomials");
        prop_assert!(m.is_monic());
        prop_assert!(eval_at_matrix(&m, &g).is_zero());
        prop_assert!(char_poly(&g).div_exact(&m).is_some());
        // deg m = dim span{I, G, G^2, ...}, computed as a matrix rank.
        let n = g.n();
        let mut power = IntMatrix::identity(n);
        let base = IntMatrix::from_binary(&g);
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for _ in 0..=n {
            rows.push(power.entries().to_vec());
            power = power.mul(&base);
        }
        let width = n * n;
        let mut entries = vec![BigInt::from(0); width * width];
        for (i, row) in rows.iter().enumerate() {
            entries[i * width..(i + 1) * width].clone_from_slice(row);
        }
        let square = IntMatrix::from_entries(width, entries);
        prop_assert_eq!(m.degree(), Some(square.rank()));
    }
}

#[test]
fn five_point_polynomials_as_printed() {
    let expected = [
        ("125,213,324,435,514", "(t-2)(t^2+t-1)^2", "(t-2)(t^2+t-1)"),
        ("125,213,325,425,514", "(t-2)(t+2)t^3", "(t-2)(t+2)t^2"),
        ("124,213,324,413,513", "(t-2)(t+2)t^3", "(t-2)(t+2)t"),
    ];
    for (triples, k, m) in expected {
        let fp = fingerprint(&s(triples));
        assert_eq!(fp.char_poly, poly(k), "{triples}");
        assert_eq!(fp.min_poly.to_integer().unwrap(), poly(m), "{triples}");
    }
}

#[test]
fn four_point_polynomials() {
    let fp = fingerprint(&s("124,213,324,413"));
    assert_eq!(fp.char_poly, poly("t^4-4t^2"));
    assert_eq!(fp.min_poly.to_integer().unwrap(), poly("t^3-4t"));
    assert_eq!(fp.rank, 2);
}

/// Minimal polynomials of the 26 six-point reference structures, from an
/// independent computer algebra computation.
const SIX_POINT_MINIMAL: [(&str, &str); 26] = [
    ("R1", "t(t-2)(t+2)"),
    ("R2", "t^2(t-2)(t+2)"),
    ("R3", "t(t-2)(t+2)"),
    ("R4", "t^2(t-2)(t+2)"),
    ("R5", "t^2(t-2)(t+2)"),
    ("R6", "t^2(t-2)(t+2)"),
    ("R7", "t(t-2)(t-1)(t+1)(t+2)"),
    ("R8", "t(t-2)(t^2+t-1)"),
    ("R9", "t(t-2)(t-1)(t+1)(t+2)"),
    ("I1", "t^2(t-2)(t+2)"),
    ("I2", "t(t-2)(t+1)^2"),
    ("I3", "t^2(t-2)(t+1)^2"),
    ("I4", "t(t-2)(t^2+2t+2)"),
    ("I5", "t^3(t-2)(t+2)"),
    ("I6", "t^2(t-2)(t+2)"),
    ("I7", "t(t-2)(t-1)(t+1)(t+2)"),
    ("I8", "t^2(t-2)(t-1)(t+1)(t+2)"),
    ("I9", "t(t-2)(t+1)(t^2+t-1)"),
    ("I10", "t(t-2)(t^4+2t^3-t+1)"),
    ("I11", "t^2(t-2)(t+1)(t^2+t-1)"),
    ("I12", "t^4(t-2)(t+2)"),
    ("I13", "t^3(t-2)(t+2)"),
    ("I14", "t(t-2)(t^2+t-1)^2"),
    ("I15", "t(t-2)(t^2+t-1)"),
    ("I16", "t(t-2)(t+1)"),
    ("I17", "(t-2)(t-1)(t+1)(t+2)"),
];

/// Ranks of the same structures from the same computation.
const SIX_POINT_RANKS: [usize; 26] = [2, 3, 2, 3, 3, 4, 4, 5, 4, 3, 3, 4, 3, 4, 4, 4, 5, 4, 5, 5, 5, 4, 5, 5, 3, 6];

#[test]
fn six_point_minimal_polynomials_and_ranks() {
    let refs = reference_structures(6).unwrap();
    for ((r, (label, m)), rank) in refs.iter().zip(SIX_POINT_MINIMAL).zip(SIX_POINT_RANKS) {
        assert_eq!(r.label, label);
        let fp = fingerprint(&r.structure);
        assert_eq!(fp.min_poly.to_integer().unwrap(), poly(m), "{label}");
        assert_eq!(fp.rank, rank, "{label}");
    }
}

#[test]
fn trace_powers_of_small_cases() {
    let tri = matrix_rep(&GromovStructure::triangle());
    let to_i64 = |v: Vec<BigInt>| v.into_iter().map(|b| i64::try_from(b).unwrap()).collect::<Vec<_>>();
    // Eigenvalues 2, -1, -1.
    assert_eq!(to_i64(trace_powers(&tri)), [0, 6, 6]);
    // Eigenvalues 2, -2, 0, 0.
    assert_eq!(to_i64(trace_powers(&matrix_rep(&s("124,213,324,413")))), [0, 8, 0, 32]);
}
