//! Equivalence of Gromov product structures under relabeling of vertices.
//!
//! Two structures are equivalent when some permutation `σ` maps one onto the
//! other; in matrix form `G·P = P·G'` with `P(i, σ(i)) = 1`. Three deciders
//! live here: a canonical form (lexicographically least relabeling), a
//! direct backtracking search pruned by invariants, and an exhaustive
//! `n!` enumeration used as the test oracle.

use serde::Serialize;
use thiserror::Error;

use crate::invariants::fingerprint;
use crate::structure::{
    apply_permutation, decompose_chains_cycles, matrix_rep, mutual_neighbours, ComponentKind,
    GromovStructure, Permutation, StructureMatrix,
};

/// Largest `n` accepted by the canonical labeling and the guided search.
pub const MAX_CANONICAL_N: usize = 12;
/// Largest `n` accepted by exhaustive enumeration.
pub const MAX_BRUTE_FORCE_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("size mismatch: {left} vs {right} points")]
    SizeMismatch { left: usize, right: usize },
    #[error("n = {n} exceeds the supported maximum {max}")]
    SizeLimitExceeded { n: usize, max: usize },
}

/// Lexicographically least relabeling of a structure, plus the permutation
/// that produces it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub structure: GromovStructure,
    /// `apply_permutation(input, witness) == structure`.
    pub witness: Permutation,
}

struct CanonSearch<'a> {
    s: &'a GromovStructure,
    n: usize,
    label: Vec<usize>,
    order: Vec<usize>,
    rows: Vec<(usize, usize)>,
    best_rows: Option<Vec<(usize, usize)>>,
    best_label: Vec<usize>,
}

const UNLABELED: usize = usize::MAX;

impl CanonSearch<'_> {
    fn assign(&mut self, v: usize) {
        self.label[v] = self.order.len();
        self.order.push(v);
    }

    fn unassign(&mut self, v: usize) {
        debug_assert_eq!(self.order.last(), Some(&v));
        self.order.pop();
        self.label[v] = UNLABELED;
    }

    /// Processes canonical row `k`; rows `0..k` are fixed.
    fn step(&mut self, k: usize) {
        if k == self.n {
            // Reaching here means the rows are strictly below the best.
            self.best_rows = Some(self.rows.clone());
            self.best_label = self.label.clone();
            return;
        }
        if self.order.len() == k {
            // Nothing left points into unlabeled territory: start a new root.
            for v in 0..self.n {
                if self.label[v] == UNLABELED {
                    self.assign(v);
                    self.step(k);
                    self.unassign(v);
                }
            }
            return;
        }
        let u = self.order[k];
        let (a, b) = self.s.pair(u);
        let next = self.order.len();
        match (self.label[a] == UNLABELED, self.label[b] == UNLABELED) {
            (false, false) => {
                let (x, y) = (self.label[a], self.label[b]);
                self.emit(k, (x.min(y), x.max(y)));
            }
            (false, true) | (true, false) => {
                let (known, fresh) = if self.label[a] == UNLABELED { (b, a) } else { (a, b) };
                let x = self.label[known];
                self.assign(fresh);
                self.emit(k, (x.min(next), x.max(next)));
                self.unassign(fresh);
            }
            (true, true) => {
                for (first, second) in [(a, b), (b, a)] {
                    self.assign(first);
                    self.assign(second);
                    self.emit(k, (next, next + 1));
                    self.unassign(second);
                    self.unassign(first);
                }
            }
        }
    }

    fn emit(&mut self, k: usize, row: (usize, usize)) {
        self.rows.push(row);
        let keep = match &self.best_rows {
            None => true,
            Some(best) => {
                let last = if k + 1 == self.n { std::cmp::Ordering::Less } else { std::cmp::Ordering::Equal };
                self.rows[..=k].cmp(&best[..=k]) <= last
            }
        };
        if keep {
            self.step(k + 1);
        }
        self.rows.pop();
    }
}

/// Canonical representative under relabeling: the relabeling whose
/// flattened pair sequence `(a_1, b_1, a_2, b_2, …)` is lexicographically
/// least.
///
/// The search builds rows in order. Unlabeled targets of the current row
/// always take the smallest free labels, since anything else makes that row
/// larger; the only branching is the order of two fresh targets and the
/// choice of a new root when the labeled set is closed.
pub fn canonical_form(s: &GromovStructure) -> Result<CanonicalForm, EquivalenceError> {
    let n = s.n();
    if n > MAX_CANONICAL_N {
        return Err(EquivalenceError::SizeLimitExceeded { n, max: MAX_CANONICAL_N });
    }
    let mut search = CanonSearch {
        s,
        n,
        label: vec![UNLABELED; n],
        order: Vec::with_capacity(n),
        rows: Vec::with_capacity(n),
        best_rows: None,
        best_label: Vec::new(),
    };
    search.step(0);
    let rows = search.best_rows.expect("search visits at least one labeling");
    let structure = GromovStructure::new(rows).expect("relabeling preserves validity");
    let witness = Permutation::new(search.best_label).expect("labels form a bijection");
    debug_assert_eq!(apply_permutation(s, &witness).as_ref(), Ok(&structure));
    Ok(CanonicalForm { structure, witness })
}

/// Checks `G·P = P·G'` entrywise, where `P(i, σ(i)) = 1`.
pub fn verify_similarity(
    g: &StructureMatrix,
    sigma: &Permutation,
    g_prime: &StructureMatrix,
) -> Result<bool, EquivalenceError> {
    let n = g.n();
    for m in [g_prime.n(), sigma.n()] {
        if m != n {
            return Err(EquivalenceError::SizeMismatch { left: n, right: m });
        }
    }
    let p = |i: usize, j: usize| u32::from(sigma.apply(i) == j);
    for i in 0..n {
        for j in 0..n {
            let lhs: u32 = (0..n).map(|k| u32::from(g.get(i, k)) * p(k, j)).sum();
            let rhs: u32 = (0..n).map(|k| p(i, k) * u32::from(g_prime.get(k, j))).sum();
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of an equivalence query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    /// 1-based image list of a permutation mapping the first structure onto
    /// the second.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "one_based")]
    pub permutation: Option<Permutation>,
    /// Invariant that already separates the two structures, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinguishing_invariant: Option<&'static str>,
    pub search_nodes: u64,
}

fn one_based<S: serde::Serializer>(p: &Option<Permutation>, serializer: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => p.one_based().serialize(serializer),
        None => serializer.serialize_none(),
    }
}

/// Per-vertex invariants preserved by any relabeling: out-pair mutual
/// degree, chain/cycle membership and component length, in-degree.
fn vertex_colors(s: &GromovStructure) -> Vec<(usize, ComponentKind, usize, usize)> {
    let n = s.n();
    let decomposition = decompose_chains_cycles(s);
    let membership = decomposition.membership(n);
    let mut in_degree = vec![0; n];
    for &(a, b) in s.pairs() {
        in_degree[a] += 1;
        in_degree[b] += 1;
    }
    (0..n)
        .map(|v| {
            let comp = &decomposition.components[membership[v]];
            (mutual_neighbours(s, v).len(), comp.kind, comp.vertices.len(), in_degree[v])
        })
        .collect()
}

struct MatchSearch<'a> {
    g: &'a StructureMatrix,
    h: &'a StructureMatrix,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    image: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
}

impl MatchSearch<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let u = self.order[depth];
        for ci in 0..self.candidates[u].len() {
            let v = self.candidates[u][ci];
            if self.used[v] {
                continue;
            }
            self.nodes += 1;
            let consistent = self.order[..depth].iter().all(|&w| {
                let x = self.image[w];
                self.g.get(u, w) == self.h.get(v, x) && self.g.get(w, u) == self.h.get(x, v)
            });
            if !consistent {
                continue;
            }
            self.image[u] = v;
            self.used[v] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.used[v] = false;
            self.image[u] = UNLABELED;
        }
        false
    }
}

/// Visit order that keeps each new vertex adjacent to already placed ones
/// where possible, starting from the rarest colour.
fn search_order<C: Ord + Clone>(s: &GromovStructure, colors: &[C]) -> Vec<usize> {
    let n = s.n();
    let mut freq = std::collections::BTreeMap::new();
    for c in colors {
        *freq.entry(c.clone()).or_insert(0usize) += 1;
    }
    let mut roots: Vec<usize> = (0..n).collect();
    roots.sort_by_key(|&v| (freq[&colors[v]], v));
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in roots {
        if placed[root] {
            continue;
        }
        placed[root] = true;
        order.push(root);
        let mut cursor = order.len() - 1;
        while cursor < order.len() {
            let v = order[cursor];
            cursor += 1;
            let (a, b) = s.pair(v);
            let sources = (0..n).filter(|&w| s.points_to(w, v));
            for w in [a, b].into_iter().chain(sources) {
                if !placed[w] {
                    placed[w] = true;
                    order.push(w);
                }
            }
        }
    }
    order
}

/// Decides equivalence and explains the answer. Unequal fingerprints
/// short-circuit the search; otherwise a backtracking search over
/// colour-compatible assignments runs, and any permutation found is checked
/// with [`verify_similarity`] before it is returned.
pub fn decide_equivalence(
    s: &GromovStructure,
    t: &GromovStructure,
) -> Result<EquivalenceVerdict, EquivalenceError> {
    let n = s.n();
    if t.n() != n {
        return Err(EquivalenceError::SizeMismatch { left: n, right: t.n() });
    }
    if n > MAX_CANONICAL_N {
        return Err(EquivalenceError::SizeLimitExceeded { n, max: MAX_CANONICAL_N });
    }
    let negative = |invariant, nodes| EquivalenceVerdict {
        equivalent: false,
        permutation: None,
        distinguishing_invariant: invariant,
        search_nodes: nodes,
    };
    if let Some(name) = fingerprint(s).first_difference(&fingerprint(t)) {
        return Ok(negative(Some(name), 0));
    }
    let (cs, ct) = (vertex_colors(s), vertex_colors(t));
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|u| (0..n).filter(|&v| cs[u] == ct[v]).collect())
        .collect();
    let (g, h) = (matrix_rep(s), matrix_rep(t));
    let mut search = MatchSearch {
        g: &g,
        h: &h,
        order: search_order(s, &cs),
        candidates,
        image: vec![UNLABELED; n],
        used: vec![false; n],
        nodes: 0,
    };
    if !search.extend(0) {
        return Ok(negative(None, search.nodes));
    }
    let sigma = Permutation::new(search.image).expect("search builds a bijection");
    assert!(verify_similarity(&g, &sigma, &h)?, "search returned a non-similarity");
    assert_eq!(apply_permutation(s, &sigma).as_ref(), Ok(t));
    Ok(EquivalenceVerdict {
        equivalent: true,
        permutation: Some(sigma),
        distinguishing_invariant: None,
        search_nodes: search.nodes,
    })
}

/// A permutation `σ` with `apply_permutation(s, σ) == t`, if one exists.
pub fn are_equivalent(
    s: &GromovStructure,
    t: &GromovStructure,
) -> Result<Option<Permutation>, EquivalenceError> {
    decide_equivalence(s, t).map(|v| v.permutation)
}

/// Exhaustive search over all `n!` permutations in lexicographic order.
pub fn brute_force_equiv(
    s: &GromovStructure,
    t: &GromovStructure,
) -> Result<Option<Permutation>, EquivalenceError> {
    let n = s.n();
    if t.n() != n {
        return Err(EquivalenceError::SizeMismatch { left: n, right: t.n() });
    }
    if n > MAX_BRUTE_FORCE_N {
        return Err(EquivalenceError::SizeLimitExceeded { n, max: MAX_BRUTE_FORCE_N });
    }
    let mut images: Vec<usize> = (0..n).collect();
    loop {
        let sigma = Permutation::new(images.clone()).expect("permutation");
        if apply_permutation(s, &sigma).as_ref() == Ok(t) {
            return Ok(Some(sigma));
        }
        if !next_permutation(&mut images) {
            return Ok(None);
        }
    }
}

/// Advances to the next permutation in lexicographic order; false after the
/// last one.
pub fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::from_compact_triples;

    fn s(triples: &str) -> GromovStructure {
        from_compact_triples(&triples.split(',').collect::<Vec<_>>()).unwrap()
    }

    const S1: &str = "125,213,324,435,514";
    const S2: &str = "125,213,325,425,514";
    const S3: &str = "124,213,324,413,513";
    const R1: &str = "124,213,324,413,513,613";
    const R3: &str = "124,213,324,413,513,624";

    fn all_perms(n: usize) -> Vec<Permutation> {
        let mut v: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation::new(v.clone()).unwrap()];
        while next_permutation(&mut v) {
            out.push(Permutation::new(v.clone()).unwrap());
        }
        out
    }

    /// Exhaustive minimum, the definition the search must reproduce.
    fn canonical_by_enumeration(st: &GromovStructure) -> GromovStructure {
        all_perms(st.n())
            .iter()
            .map(|p| apply_permutation(st, p).unwrap())
            .min_by_key(GromovStructure::flattened)
            .unwrap()
    }

    #[test]
    fn permutation_enumeration_counts() {
        assert_eq!(all_perms(4).len(), 24);
        assert_eq!(all_perms(5).len(), 120);
    }

    #[test]
    fn canonical_matches_enumeration() {
        for t in [S1, S2, S3, R1, R3, "124,213,324,413", "126,213,324,435,546,615", "156,213,324,456,513,624"] {
            let st = s(t);
            let cf = canonical_form(&st).unwrap();
            assert_eq!(cf.structure, canonical_by_enumeration(&st), "{t}");
            assert_eq!(apply_permutation(&st, &cf.witness).unwrap(), cf.structure);
        }
    }

    #[test]
    fn canonical_is_idempotent() {
        let cf = canonical_form(&s(S2)).unwrap();
        let again = canonical_form(&cf.structure).unwrap();
        assert_eq!(again.structure, cf.structure);
        assert!(again.witness.is_identity());
    }

    #[test]
    fn canonical_round_trip_through_permutation() {
        let base = canonical_form(&s(S1)).unwrap().structure;
        for p in all_perms(5).iter().step_by(7) {
            let moved = apply_permutation(&s(S1), p).unwrap();
            assert_eq!(canonical_form(&moved).unwrap().structure, base);
        }
    }

    #[test]
    fn five_point_classes_are_distinct() {
        let forms: Vec<_> = [S1, S2, S3].iter().map(|t| canonical_form(&s(t)).unwrap().structure).collect();
        assert_ne!(forms[0], forms[1]);
        assert_ne!(forms[1], forms[2]);
        assert_ne!(forms[0], forms[2]);
    }

    #[test]
    fn size_limits() {
        let big = GromovStructure::new((0..13).map(|i| ((i + 1) % 13, (i + 2) % 13)).collect()).unwrap();
        assert!(matches!(canonical_form(&big), Err(EquivalenceError::SizeLimitExceeded { .. })));
        let nine = GromovStructure::new((0..9).map(|i| ((i + 1) % 9, (i + 2) % 9)).collect()).unwrap();
        assert!(matches!(brute_force_equiv(&nine, &nine), Err(EquivalenceError::SizeLimitExceeded { .. })));
        assert!(matches!(
            are_equivalent(&s(S1), &s(R1)),
            Err(EquivalenceError::SizeMismatch { left: 5, right: 6 })
        ));
    }

    #[test]
    fn positive_case_returns_valid_permutation() {
        let p = Permutation::new(vec![3, 0, 4, 1, 2]).unwrap();
        let moved = apply_permutation(&s(S2), &p).unwrap();
        let verdict = decide_equivalence(&s(S2), &moved).unwrap();
        assert!(verdict.equivalent);
        let sigma = verdict.permutation.unwrap();
        assert_eq!(apply_permutation(&s(S2), &sigma).unwrap(), moved);
        assert!(verify_similarity(&matrix_rep(&s(S2)), &sigma, &matrix_rep(&moved)).unwrap());
    }

    #[test]
    fn isospectral_pair_named_by_min_poly() {
        let verdict = decide_equivalence(&s(S2), &s(S3)).unwrap();
        assert!(!verdict.equivalent);
        assert_eq!(verdict.distinguishing_invariant, Some("min_poly"));
        let json = serde_json::to_value(&verdict).unwrap();
        assert_eq!(json["distinguishing_invariant"], "min_poly");
        assert!(json.get("permutation").is_none());
    }

    #[test]
    fn identical_fingerprints_need_search() {
        assert_eq!(fingerprint(&s(R1)), fingerprint(&s(R3)));
        let verdict = decide_equivalence(&s(R1), &s(R3)).unwrap();
        assert!(!verdict.equivalent);
        assert_eq!(verdict.distinguishing_invariant, None);
        assert_eq!(brute_force_equiv(&s(R1), &s(R3)).unwrap(), None);
    }

    #[test]
    fn similarity_identity() {
        let g = matrix_rep(&s(S2));
        assert!(verify_similarity(&g, &Permutation::identity(5), &g).unwrap());
        let h = matrix_rep(&s(S3));
        for p in all_perms(5) {
            assert!(!verify_similarity(&g, &p, &h).unwrap());
        }
    }

    #[test]
    fn brute_force_basics() {
        let st = s(S1);
        assert!(brute_force_equiv(&st, &st).unwrap().unwrap().is_identity());
        for (a, b) in [(S1, S2), (S1, S3), (S2, S3)] {
            assert_eq!(brute_force_equiv(&s(a), &s(b)).unwrap(), None);
        }
    }
}
