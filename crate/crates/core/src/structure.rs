//! Gromov product structures, their 0/1 matrix representation, the
//! pendant-free reduction and the chain/cycle decomposition.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("vertex {}: pair ({}, {}) is invalid", .vertex + 1, .pair.0 + 1, .pair.1 + 1)]
    InvalidPair { vertex: usize, pair: (usize, usize) },
    #[error("a structure needs at least 3 vertices, got {0}")]
    TooSmall(usize),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("subset is not closed: vertex {} points outside it", .vertex + 1)]
    NotClosed { vertex: usize },
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),
    #[error("matrix row {} is not a valid structure row", .row + 1)]
    InvalidMatrixRow { row: usize },
    #[error("structure parse error (line {line}): {message}")]
    Parse { line: usize, message: String },
}

/// For every vertex `i`, the sorted pair `{a_i, b_i}` of its unique minimal
/// Gromov product.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct GromovStructure {
    pairs: Vec<(usize, usize)>,
}

impl GromovStructure {
    /// Pairs are 0-based; each is stored sorted.
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self, StructureError> {
        let n = pairs.len();
        if n < 3 {
            return Err(StructureError::TooSmall(n));
        }
        let pairs = pairs
            .into_iter()
            .enumerate()
            .map(|(vertex, (a, b))| {
                if a == b || a == vertex || b == vertex || a >= n || b >= n {
                    Err(StructureError::InvalidPair { vertex, pair: (a, b) })
                } else {
                    Ok((a.min(b), a.max(b)))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GromovStructure { pairs })
    }

    /// Unique structure on three points.
    pub fn triangle() -> Self {
        GromovStructure {
            pairs: vec![(1, 2), (0, 2), (0, 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self, vertex: usize) -> (usize, usize) {
        self.pairs[vertex]
    }

    /// True when `target` is one of the two vertices `vertex` points to.
    #[inline]
    pub fn points_to(&self, vertex: usize, target: usize) -> bool {
        let (a, b) = self.pairs[vertex];
        a == target || b == target
    }

    /// `(a_1, b_1, a_2, b_2, ...)`, the sequence whose lexicographic order
    /// defines canonical forms.
    pub fn flattened(&self) -> Vec<usize> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn matrix(&self) -> StructureMatrix {
        matrix_rep(self)
    }

    /// Line format: one `i: a b` row per vertex, 1-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            out.push_str(&format!("{}: {} {}\n", i + 1, a + 1, b + 1));
        }
        out
    }

    /// JSON alternative: `[[i, a, b], ...]`, 1-based.
    pub fn to_json_triples(&self) -> Vec<[usize; 3]> {
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| [i + 1, a + 1, b + 1])
            .collect()
    }

    /// Compact triple notation `Δ124, Δ213, ...` for reports (1-based).
    pub fn triples_label(&self) -> String {
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| format!("Δ{}{}{}", i + 1, a + 1, b + 1))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses either the line format or the JSON triple list; the format is
    /// chosen by the first non-blank byte.
    pub fn parse(text: &str) -> Result<Self, StructureError> {
        if text.trim_start().starts_with('[') {
            let triples: Vec<[usize; 3]> =
                serde_json::from_str(text).map_err(|e| StructureError::Parse {
                    line: e.line(),
                    message: e.to_string(),
                })?;
            let rows = triples.into_iter().map(|t| (0, t)).collect();
            Self::from_rows(rows)
        } else {
            let mut rows = Vec::new();
            for (no, line) in text.lines().enumerate() {
                let line_no = no + 1;
                let body = line.split('#').next().unwrap_or("").trim();
                if body.is_empty() {
                    continue;
                }
                let bad = |message: &str| StructureError::Parse {
                    line: line_no,
                    message: message.to_string(),
                };
                let (head, tail) = body.split_once(':').ok_or_else(|| bad("expected `i: a b`"))?;
                let nums: Vec<usize> = std::iter::once(head)
                    .chain(tail.split_whitespace())
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("expected three positive integers"))?;
                if nums.len() != 3 {
                    return Err(bad("expected `i: a b`"));
                }
                rows.push((line_no, [nums[0], nums[1], nums[2]]));
            }
            Self::from_rows(rows)
        }
    }

    fn from_rows(rows: Vec<(usize, [usize; 3])>) -> Result<Self, StructureError> {
        let n = rows.len();
        let mut pairs: Vec<Option<(usize, usize)>> = vec![None; n];
        for (line, [i, a, b]) in rows {
            let bad = |message: String| StructureError::Parse { line, message };
            for v in [i, a, b] {
                if v == 0 || v > n {
                    return Err(bad(format!("vertex {v} out of range 1..={n}")));
                }
            }
            if pairs[i - 1].is_some() {
                return Err(bad(format!("vertex {i} listed twice")));
            }
            pairs[i - 1] = Some((a - 1, b - 1));
        }
        let pairs = pairs
            .into_iter()
            .map(|p| p.expect("n rows with distinct in-range vertices cover 1..=n"))
            .collect();
        Self::new(pairs)
    }
}

impl TryFrom<Vec<(usize, usize)>> for GromovStructure {
    type Error = StructureError;
    fn try_from(pairs: Vec<(usize, usize)>) -> Result<Self, Self::Error> {
        GromovStructure::new(pairs)
    }
}

impl From<GromovStructure> for Vec<(usize, usize)> {
    fn from(s: GromovStructure) -> Self {
        s.pairs
    }
}

impl fmt::Debug for GromovStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GromovStructure[{}]", self.triples_label())
    }
}

impl fmt::Display for GromovStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.triples_label())
    }
}

/// Bijection on `0..n`, stored as the image list `images[i] = σ(i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, StructureError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(StructureError::InvalidPermutation(format!("{images:?}")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Exchanges `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Permutation { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Permutation { images }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation {
            images: other.images.iter().map(|&v| self.images[v]).collect(),
        }
    }

    /// 1-based image list as used in reports.
    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|v| v + 1).collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.one_based())
    }
}

/// Square 0/1 matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    n: usize,
    entries: Vec<u8>,
}

impl BinaryMatrix {
    pub fn zeros(n: usize) -> Self {
        BinaryMatrix {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let n = rows.len();
        let mut m = BinaryMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                assert!(v <= 1, "entries must be 0 or 1");
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: u8) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = BinaryMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn count_ones(&self) -> usize {
        self.entries.iter().filter(|&&v| v == 1).count()
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(u8::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| self.row(i).iter().map(u8::to_string).collect())
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// The matrix `G_S`: `G(i, j) = 1` iff `j ∈ {a_i, b_i}`. Every row has
/// exactly two ones and the diagonal is zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StructureMatrix(BinaryMatrix);

impl StructureMatrix {
    pub fn new(matrix: BinaryMatrix) -> Result<Self, StructureError> {
        for i in 0..matrix.n() {
            let ones = matrix.row(i).iter().filter(|&&v| v == 1).count();
            if ones != 2 || matrix.get(i, i) != 0 {
                return Err(StructureError::InvalidMatrixRow { row: i });
            }
        }
        Ok(StructureMatrix(matrix))
    }

    pub fn as_binary(&self) -> &BinaryMatrix {
        &self.0
    }

    /// Recovers the structure the matrix represents.
    pub fn to_structure(&self) -> GromovStructure {
        let pairs = (0..self.0.n())
            .map(|i| {
                let mut ones = (0..self.0.n()).filter(|&j| self.0.get(i, j) == 1);
                (ones.next().unwrap(), ones.next().unwrap())
            })
            .collect();
        GromovStructure::new(pairs).expect("validated matrix rows")
    }
}

impl std::ops::Deref for StructureMatrix {
    type Target = BinaryMatrix;
    fn deref(&self) -> &BinaryMatrix {
        &self.0
    }
}

impl fmt::Display for StructureMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

pub fn matrix_rep(s: &GromovStructure) -> StructureMatrix {
    let mut m = BinaryMatrix::zeros(s.n());
    for (i, &(a, b)) in s.pairs().iter().enumerate() {
        m.set(i, a, 1);
        m.set(i, b, 1);
    }
    StructureMatrix(m)
}

/// The distinct pairs `{a_i, b_i}`, i.e. the edges dropped from `K_n`.
pub fn removed_edges(s: &GromovStructure) -> BTreeSet<(usize, usize)> {
    s.pairs().iter().copied().collect()
}

/// Adjacency matrix of `K_n` minus the removed edges.
pub fn pendant_free_adjacency(s: &GromovStructure) -> BinaryMatrix {
    let n = s.n();
    let mut m = BinaryMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m.set(i, j, 1);
            }
        }
    }
    for (a, b) in removed_edges(s) {
        m.set(a, b, 0);
        m.set(b, a, 0);
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Chain,
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub kind: ComponentKind,
    /// Vertices in path or cycle order.
    pub vertices: Vec<usize>,
    /// Non-mutual arrows `(vertex, target)` leaving the component's ends.
    /// Empty for cycles; exactly two for chains.
    pub end_arrows: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainCycleDecomposition {
    pub components: Vec<Component>,
}

impl ChainCycleDecomposition {
    pub fn chain_count(&self) -> usize {
        self.components
            .iter()
            .filter(|c| c.kind == ComponentKind::Chain)
            .count()
    }

    pub fn cycle_count(&self) -> usize {
        self.components.len() - self.chain_count()
    }

    pub fn end_arrow_count(&self) -> usize {
        self.components.iter().map(|c| c.end_arrows.len()).sum()
    }

    /// Component index of every vertex.
    pub fn membership(&self, n: usize) -> Vec<usize> {
        let mut of = vec![usize::MAX; n];
        for (c, comp) in self.components.iter().enumerate() {
            for &v in &comp.vertices {
                of[v] = c;
            }
        }
        of
    }
}

impl fmt::Display for ChainCycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for comp in &self.components {
            let verts: Vec<String> = comp.vertices.iter().map(|v| (v + 1).to_string()).collect();
            match comp.kind {
                ComponentKind::Cycle => writeln!(f, "cycle  len {}: {}", verts.len(), verts.join("-"))?,
                ComponentKind::Chain => {
                    let ends: Vec<String> = comp
                        .end_arrows
                        .iter()
                        .map(|(v, t)| format!("{}->{}", v + 1, t + 1))
                        .collect();
                    writeln!(
                        f,
                        "chain  len {}: {}  ends [{}]",
                        verts.len(),
                        verts.join("-"),
                        ends.join(", ")
                    )?
                }
            }
        }
        Ok(())
    }
}

/// Neighbours of `v` in the mutual-link graph, where `i ~ j` iff each
/// appears in the other's minimal pair. Degree is at most 2.
pub fn mutual_neighbours(s: &GromovStructure, v: usize) -> Vec<usize> {
    let (a, b) = s.pair(v);
    [a, b].into_iter().filter(|&t| s.points_to(t, v)).collect()
}

pub fn decompose_chains_cycles(s: &GromovStructure) -> ChainCycleDecomposition {
    let n = s.n();
    let neighbours: Vec<Vec<usize>> = (0..n).map(|v| mutual_neighbours(s, v)).collect();
    let mut visited = vec![false; n];
    let mut components = Vec::new();

    for start in 0..n {
        if visited[start] {
            continue;
        }
        // Collect the component, then decide its kind.
        let mut members = vec![start];
        visited[start] = true;
        let mut cursor = 0;
        while cursor < members.len() {
            let v = members[cursor];
            cursor += 1;
            for &w in &neighbours[v] {
                if !visited[w] {
                    visited[w] = true;
                    members.push(w);
                }
            }
        }
        let is_cycle = members.len() >= 3 && members.iter().all(|&v| neighbours[v].len() == 2);
        let first = if is_cycle {
            *members.iter().min().unwrap()
        } else {
            *members
                .iter()
                .filter(|&&v| neighbours[v].len() <= 1)
                .min()
                .expect("a path has an endpoint")
        };
        let ordered = walk(&neighbours, first, members.len());
        let end_arrows = if is_cycle {
            Vec::new()
        } else {
            let mut ends: Vec<usize> = vec![ordered[0]];
            if ordered.len() > 1 {
                ends.push(*ordered.last().unwrap());
            }
            ends.into_iter()
                .flat_map(|v| {
                    let (a, b) = s.pair(v);
                    [a, b].into_iter().filter(move |&t| !s.points_to(t, v)).map(move |t| (v, t))
                })
                .collect()
        };
        components.push(Component {
            kind: if is_cycle { ComponentKind::Cycle } else { ComponentKind::Chain },
            vertices: ordered,
            end_arrows,
        });
    }
    ChainCycleDecomposition { components }
}

fn walk(neighbours: &[Vec<usize>], first: usize, len: usize) -> Vec<usize> {
    let mut order = vec![first];
    let mut prev = usize::MAX;
    let mut current = first;
    while order.len() < len {
        let next = neighbours[current]
            .iter()
            .copied()
            .filter(|&w| w != prev && !order.contains(&w))
            .min()
            .expect("connected component");
        prev = current;
        current = next;
        order.push(next);
    }
    order
}

/// Relabels `s` by `σ`: vertex `σ(i)` points to `{σ(a_i), σ(b_i)}`.
pub fn apply_permutation(
    s: &GromovStructure,
    sigma: &Permutation,
) -> Result<GromovStructure, StructureError> {
    if sigma.n() != s.n() {
        return Err(StructureError::SizeMismatch {
            expected: s.n(),
            found: sigma.n(),
        });
    }
    let mut pairs = vec![(0, 0); s.n()];
    for (i, &(a, b)) in s.pairs().iter().enumerate() {
        let (x, y) = (sigma.apply(a), sigma.apply(b));
        pairs[sigma.apply(i)] = (x.min(y), x.max(y));
    }
    Ok(GromovStructure { pairs })
}

/// Restriction to a closed vertex subset, relabelled by increasing original
/// index.
pub fn restrict(s: &GromovStructure, subset: &[usize]) -> Result<GromovStructure, StructureError> {
    let members: BTreeSet<usize> = subset.iter().copied().collect();
    if members.len() < 3 {
        return Err(StructureError::TooSmall(members.len()));
    }
    if let Some(&bad) = members.iter().find(|&&v| v >= s.n()) {
        return Err(StructureError::InvalidPair { vertex: bad, pair: (bad, bad) });
    }
    let mut label = vec![usize::MAX; s.n()];
    for (new, &old) in members.iter().enumerate() {
        label[old] = new;
    }
    let mut pairs = Vec::with_capacity(members.len());
    for &v in &members {
        let (a, b) = s.pair(v);
        if label[a] == usize::MAX || label[b] == usize::MAX {
            return Err(StructureError::NotClosed { vertex: v });
        }
        pairs.push((label[a], label[b]));
    }
    GromovStructure::new(pairs)
}

/// Builds a structure from 1-based compact triples such as `"124"`.
/// Intended for tables and tests where `n ≤ 9`.
pub fn from_compact_triples(triples: &[&str]) -> Result<GromovStructure, StructureError> {
    let mut rows = Vec::with_capacity(triples.len());
    for (no, t) in triples.iter().enumerate() {
        let digits: Vec<usize> = t
            .trim()
            .trim_start_matches('Δ')
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .filter(|d: &Vec<usize>| d.len() == 3)
            .ok_or_else(|| StructureError::Parse {
                line: no + 1,
                message: format!("bad triple {t:?}"),
            })?;
        rows.push((no + 1, [digits[0], digits[1], digits[2]]));
    }
    GromovStructure::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(triples: &str) -> GromovStructure {
        from_compact_triples(&triples.split(',').collect::<Vec<_>>()).unwrap()
    }

    fn four() -> GromovStructure {
        s("124,213,324,413")
    }

    #[test]
    fn validation() {
        assert!(matches!(
            GromovStructure::new(vec![(1, 2), (0, 2)]),
            Err(StructureError::TooSmall(2))
        ));
        assert!(matches!(
            GromovStructure::new(vec![(0, 2), (0, 2), (0, 1)]),
            Err(StructureError::InvalidPair { vertex: 0, .. })
        ));
        assert!(matches!(
            GromovStructure::new(vec![(1, 1), (0, 2), (0, 1)]),
            Err(StructureError::InvalidPair { vertex: 0, .. })
        ));
        assert!(GromovStructure::new(vec![(2, 1), (0, 2), (1, 0)]).is_ok());
    }

    #[test]
    fn four_point_matrix() {
        let g = matrix_rep(&four());
        let expected = BinaryMatrix::from_rows(&[&[0, 1, 0, 1], &[1, 0, 1, 0], &[0, 1, 0, 1], &[1, 0, 1, 0]]);
        assert_eq!(g.as_binary(), &expected);
        assert_eq!(pendant_free_adjacency(&four()), expected);
        assert_eq!(g.to_structure(), four());
    }

    #[test]
    fn five_point_matrix_s2() {
        let g = matrix_rep(&s("125,213,325,425,514"));
        let expected = BinaryMatrix::from_rows(&[
            &[0, 1, 0, 0, 1],
            &[1, 0, 1, 0, 0],
            &[0, 1, 0, 0, 1],
            &[0, 1, 0, 0, 1],
            &[1, 0, 0, 1, 0],
        ]);
        assert_eq!(g.as_binary(), &expected);
    }

    #[test]
    fn triangle_matrix_and_reduction() {
        let t = GromovStructure::triangle();
        let g = matrix_rep(&t);
        assert_eq!(g.as_binary(), &BinaryMatrix::from_rows(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]));
        assert_eq!(pendant_free_adjacency(&t), BinaryMatrix::zeros(3));
    }

    #[test]
    fn structure_matrix_rejects_bad_rows() {
        let bad = BinaryMatrix::from_rows(&[&[0, 1, 1], &[1, 1, 0], &[1, 1, 0]]);
        assert_eq!(StructureMatrix::new(bad), Err(StructureError::InvalidMatrixRow { row: 1 }));
    }

    #[test]
    fn removed_edge_examples() {
        assert_eq!(removed_edges(&four()), BTreeSet::from([(0, 2), (1, 3)]));
        assert_eq!(
            removed_edges(&s("125,213,325,425,514")),
            BTreeSet::from([(1, 4), (0, 2), (0, 3)])
        );
        assert_eq!(removed_edges(&s("124,213,324,413,513,613")).len(), 2);
    }

    #[test]
    fn pendant_free_s3() {
        let a = pendant_free_adjacency(&s("124,213,324,413,513"));
        let expected = BinaryMatrix::from_rows(&[
            &[0, 1, 0, 1, 1],
            &[1, 0, 1, 0, 1],
            &[0, 1, 0, 1, 1],
            &[1, 0, 1, 0, 1],
            &[1, 1, 1, 1, 0],
        ]);
        assert_eq!(a, expected);
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_chains_cycles(&four());
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components[0].kind, ComponentKind::Cycle);
        assert_eq!(d.components[0].vertices, vec![0, 1, 2, 3]);
        assert_eq!(d.end_arrow_count(), 0);

        let r1 = decompose_chains_cycles(&s("124,213,324,413,513,613"));
        assert_eq!(r1.cycle_count(), 1);
        assert_eq!(r1.chain_count(), 2);
        assert_eq!(r1.components[1].vertices, vec![4]);
        assert_eq!(r1.components[1].end_arrows, vec![(4, 0), (4, 2)]);
        assert_eq!(r1.end_arrow_count(), 4);

        let i17 = decompose_chains_cycles(&s("126,213,324,435,546,615"));
        assert_eq!(i17.chain_count(), 0);
        assert_eq!(i17.end_arrow_count(), 0);
    }

    #[test]
    fn chain_ends_point_outward() {
        // Mutual links 1-2, 2-4, 4-3 form a single chain.
        let st = s("123,214,324,423");
        let d = decompose_chains_cycles(&st);
        assert_eq!(d.components.len(), 1);
        let chain = &d.components[0];
        assert_eq!(chain.kind, ComponentKind::Chain);
        assert_eq!(chain.vertices, vec![0, 1, 3, 2]);
        assert_eq!(chain.end_arrows, vec![(0, 2), (2, 1)]);
    }

    #[test]
    fn permutation_examples() {
        let id = Permutation::identity(4);
        assert_eq!(apply_permutation(&four(), &id).unwrap(), four());
        let shift = Permutation::new(vec![1, 2, 3, 0]).unwrap();
        assert_eq!(apply_permutation(&four(), &shift).unwrap(), four());

        let swapped = apply_permutation(&s("125,213,325,425,514"), &Permutation::transposition(5, 2, 3)).unwrap();
        assert_eq!(swapped, s("125,214,325,425,513"));
        assert!(matches!(
            apply_permutation(&four(), &Permutation::identity(5)),
            Err(StructureError::SizeMismatch { expected: 4, found: 5 })
        ));
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
    }

    #[test]
    fn restrict_examples() {
        let r1 = s("124,213,324,413,513,613");
        assert_eq!(restrict(&r1, &[0, 1, 2, 3]).unwrap(), four());
        let i1 = s("124,213,324,456,524,624");
        assert_eq!(restrict(&i1, &[0, 1, 2, 3]), Err(StructureError::NotClosed { vertex: 3 }));
        assert_eq!(restrict(&i1, &[0, 1, 2, 3, 4, 5]).unwrap(), i1);
        assert_eq!(restrict(&i1, &[0, 1]), Err(StructureError::TooSmall(2)));
    }

    #[test]
    fn text_formats() {
        let st = s("125,213,325,425,514");
        assert_eq!(GromovStructure::parse(&st.to_text()).unwrap(), st);
        let json = serde_json::to_string(&st.to_json_triples()).unwrap();
        assert_eq!(json, "[[1,2,5],[2,1,3],[3,2,5],[4,2,5],[5,1,4]]");
        assert_eq!(GromovStructure::parse(&json).unwrap(), st);
        // Rows may come in any order and carry comments.
        let shuffled = "# five points\n3: 5 2\n1: 2 5\n2: 1 3\n5: 1 4\n4: 2 5\n";
        assert_eq!(GromovStructure::parse(shuffled).unwrap(), st);
        assert!(GromovStructure::parse("1: 2 3\n2: 1 3\n3: 1 3\n").is_err());
        assert!(GromovStructure::parse("1: 2 3\n1: 1 3\n3: 1 2\n").is_err());
        assert!(GromovStructure::parse("1: 2 4\n2: 1 3\n3: 1 2\n").is_err());
        assert!(GromovStructure::parse("1 2 3\n").is_err());
        assert!(GromovStructure::parse("[[1,2,3],[2,1,3],[3,1,1]]").is_err());
    }
}
