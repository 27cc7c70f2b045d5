//! Exact matrix invariants of a structure matrix `G`.
//!
//! Everything here is integer or rational arithmetic: rank by fraction-free
//! elimination, traces of powers, the characteristic polynomial by
//! Faddeev–LeVerrier, the minimal polynomial from the first linear dependence
//! among `I, G, G², …`, the ends count from the antisymmetric part of `G`,
//! and irreducibility from strong connectivity.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::IntMatrix;
use crate::poly::{bigint_list, IntegerPolynomial, RationalPolynomial};
use crate::rational::Rational;
use crate::structure::{matrix_rep, removed_edges, GromovStructure, StructureMatrix};

pub fn rank_rational(g: &StructureMatrix) -> usize {
    IntMatrix::from_binary(g).rank()
}

/// `G, G², …, Gⁿ` (n matrices).
fn powers(g: &StructureMatrix) -> Vec<IntMatrix> {
    let base = IntMatrix::from_binary(g);
    let mut out = Vec::with_capacity(g.n());
    let mut current = base.clone();
    for _ in 0..g.n() {
        let next = current.mul(&base);
        out.push(current);
        current = next;
    }
    out
}

/// `trace(G^k)` for `k = 1..=n`.
pub fn trace_powers(g: &StructureMatrix) -> Vec<BigInt> {
    powers(g).iter().map(IntMatrix::trace).collect()
}

/// `det(tI − G)` by Faddeev–LeVerrier. Every division is exact.
pub fn char_poly(g: &StructureMatrix) -> IntegerPolynomial {
    let n = g.n();
    let a = IntMatrix::from_binary(g);
    // coeffs[k] is the coefficient of t^k.
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = IntMatrix::zeros(n);
    for k in 1..=n {
        m = a.mul(&m).add_diagonal(&coeffs[n - k + 1]);
        let am = a.mul(&m);
        let tr = am.trace();
        let kk = BigInt::from(k);
        debug_assert!((&tr % &kk).is_zero(), "Faddeev–LeVerrier division must be exact");
        coeffs[n - k] = -(tr / kk);
    }
    IntegerPolynomial::new(coeffs)
}

/// Newton's identities: power sums `p_1..p_count` of the roots of a monic
/// polynomial, computed from its coefficients alone.
pub fn power_sums_from_char_poly(k: &IntegerPolynomial, count: usize) -> Vec<BigInt> {
    let n = k.degree().expect("nonzero polynomial");
    // a[i] is the coefficient of t^(n-i); a[0] = 1.
    let a: Vec<BigInt> = (0..=n).map(|i| k.coeffs()[n - i].clone()).collect();
    let mut p: Vec<BigInt> = Vec::with_capacity(count);
    for m in 1..=count {
        let mut value = if m <= n {
            -(BigInt::from(m) * &a[m])
        } else {
            BigInt::zero()
        };
        for i in 1..m.min(n + 1) {
            value -= &a[i] * &p[m - i - 1];
        }
        p.push(value);
    }
    p
}

/// Monic polynomial of least degree with `m(G) = 0`, found as the first
/// linear dependence among the vectorized powers `I, G, G², …`.
pub fn min_poly(g: &StructureMatrix) -> RationalPolynomial {
    let n = g.n();
    let base = IntMatrix::from_binary(g);
    // Echelon rows: (reduced vector, pivot column, combination of powers).
    let mut basis: Vec<(Vec<Rational>, usize, Vec<Rational>)> = Vec::new();
    let mut power = IntMatrix::identity(n);
    for d in 0..=n {
        let mut v: Vec<Rational> = power.entries().iter().cloned().map(Rational::from).collect();
        let mut combo = vec![Rational::zero(); d + 1];
        combo[d] = Rational::one();
        for (row, pivot, row_combo) in &basis {
            if v[*pivot].is_zero() {
                continue;
            }
            let factor = &v[*pivot] * &row[*pivot].recip();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = &*x - &(&factor * r);
                }
            }
            for (c, rc) in combo.iter_mut().zip(row_combo) {
                *c = &*c - &(&factor * rc);
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(pivot) => basis.push((v, pivot, combo)),
            None => {
                let m = RationalPolynomial::new(combo);
                debug_assert!(m.is_monic());
                return m;
            }
        }
        power = power.mul(&base);
    }
    unreachable!("Cayley–Hamilton bounds the degree by n")
}

/// Evaluates an integer polynomial at a square integer matrix.
pub fn eval_at_matrix(p: &IntegerPolynomial, g: &StructureMatrix) -> IntMatrix {
    let base = IntMatrix::from_binary(g);
    let mut acc = IntMatrix::zeros(g.n());
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(&base).add_diagonal(c);
    }
    acc
}

/// Number of ones in `D = G − ⌊(G + Gᵗ)/2⌋`, i.e. arrows that are not
/// reciprocated.
pub fn ends_count(g: &StructureMatrix) -> usize {
    let n = g.n();
    let mut ones = 0;
    for i in 0..n {
        for j in 0..n {
            let b = g.get(i, j) + g.get(j, i);
            let d = g.get(i, j) as i32 - (b / 2) as i32;
            if d == 1 {
                ones += 1;
            }
        }
    }
    ones
}

/// Strongly connected components of the digraph `i → j` iff `G(i, j) = 1`
/// (Tarjan). Components are returned in reverse topological order.
pub fn strongly_connected_components(g: &StructureMatrix) -> Vec<Vec<usize>> {
    struct State {
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }

    fn visit(v: usize, adj: &[Vec<usize>], st: &mut State) {
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in &adj[v] {
            match st.index[w] {
                None => {
                    visit(w, adj, st);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                _ => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("v is on the stack");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            st.out.push(comp);
        }
    }

    let n = g.n();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| g.get(i, j) == 1).collect())
        .collect();
    let mut st = State {
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if st.index[v].is_none() {
            visit(v, &adj, &mut st);
        }
    }
    st.out
}

/// `P_S = I + G + G² + … + Gⁿ`.
pub fn reachability_sum(g: &StructureMatrix) -> IntMatrix {
    powers(g)
        .iter()
        .fold(IntMatrix::identity(g.n()), |acc, p| acc.add(p))
}

/// Irreducible iff the arrow digraph is strongly connected. The result is
/// cross-checked against positivity of every entry of `P_S`.
pub fn is_irreducible(g: &StructureMatrix) -> bool {
    let by_scc = strongly_connected_components(g).len() == 1;
    let by_sum = reachability_sum(g).all_positive();
    assert_eq!(by_scc, by_sum, "SCC and P_S positivity disagree");
    by_scc
}

/// Every invariant of a structure, bundled for comparison. Equal
/// fingerprints are necessary (not sufficient) for equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantFingerprint {
    pub n: usize,
    pub rank: usize,
    pub removed_edge_count: usize,
    #[serde(with = "bigint_list")]
    pub trace_powers: Vec<BigInt>,
    pub char_poly: IntegerPolynomial,
    pub min_poly: RationalPolynomial,
    pub ends: usize,
    pub irreducible: bool,
}

impl InvariantFingerprint {
    /// Rank equals the number of removed edges. True for every realizable
    /// structure on at most six points; some metrics on seven or more points
    /// violate it, as do many arbitrary assignments.
    pub fn rank_matches_removed_edges(&self) -> bool {
        self.rank == self.removed_edge_count
    }

    /// Name of the first invariant on which two fingerprints differ. The
    /// spectral invariants are compared first.
    pub fn first_difference(&self, other: &Self) -> Option<&'static str> {
        if self.n != other.n {
            Some("n")
        } else if self.char_poly != other.char_poly {
            Some("char_poly")
        } else if self.min_poly != other.min_poly {
            Some("min_poly")
        } else if self.rank != other.rank {
            Some("rank")
        } else if self.removed_edge_count != other.removed_edge_count {
            Some("removed_edges")
        } else if self.ends != other.ends {
            Some("ends")
        } else if self.irreducible != other.irreducible {
            Some("irreducible")
        } else {
            None
        }
    }
}

pub fn fingerprint(s: &GromovStructure) -> InvariantFingerprint {
    let g = matrix_rep(s);
    let trace_powers = trace_powers(&g);
    let char_poly = char_poly(&g);
    assert_eq!(
        power_sums_from_char_poly(&char_poly, g.n()),
        trace_powers,
        "trace powers must follow from the characteristic polynomial"
    );
    let min_poly = min_poly(&g);
    debug_assert!(min_poly.divides(&char_poly.to_rational()));
    let ends = ends_count(&g);
    debug_assert!(ends % 2 == 0);
    InvariantFingerprint {
        n: s.n(),
        rank: rank_rational(&g),
        removed_edge_count: removed_edges(s).len(),
        trace_powers,
        char_poly,
        min_poly,
        ends,
        irreducible: is_irreducible(&g),
    }
}
