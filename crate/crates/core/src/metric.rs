//! Finite metric spaces with exact rational distances, Gromov products and
//! extraction of the Gromov product structure.
//!
//! Vertices are 0-based throughout the library API. All text formats and
//! `Display` output are 1-based.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::rational::Rational;
use crate::structure::GromovStructure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("parse error (line {line}): {message}")]
    Parse { line: usize, message: String },
    #[error("distance matrix is not symmetric at ({}, {})", .i + 1, .j + 1)]
    NotSymmetric { i: usize, j: usize },
    #[error("distance d({}, {}) is not positive", .i + 1, .j + 1)]
    NonPositiveDistance { i: usize, j: usize },
    #[error("triangle inequality violated at apex {a}: d({a},{b}) + d({a},{c}) < d({b},{c}) for triple {t}", a = .apex + 1, b = .j + 1, c = .k + 1, t = sorted_triple(*.apex, *.j, *.k))]
    TriangleViolation { apex: usize, j: usize, k: usize },
    #[error("vertex index {} out of range 1..={n}", .index + 1)]
    IndexOutOfRange { index: usize, n: usize },
    #[error("vertex indices must be pairwise distinct")]
    RepeatedIndex,
    #[error("metric is not generic: tied minimal Gromov products at vertices {}", one_based(.vertices))]
    NonGeneric { vertices: Vec<usize> },
    #[error("edge weight w({}, {}) is not positive", .i + 1, .j + 1)]
    NonPositiveWeight { i: usize, j: usize },
    #[error("a metric space needs at least 3 points, got {0}")]
    TooFewPoints(usize),
}

fn sorted_triple(a: usize, b: usize, c: usize) -> String {
    let mut t = [a + 1, b + 1, c + 1];
    t.sort_unstable();
    format!("({}, {}, {})", t[0], t[1], t[2])
}

fn one_based(vertices: &[usize]) -> String {
    let labels: Vec<String> = vertices.iter().map(|v| (v + 1).to_string()).collect();
    format!("[{}]", labels.join(", "))
}

/// Position of the unordered pair `{i, j}` (i != j) in the packed upper
/// triangle of an `n`-point space. Pairs are ordered (0,1), (0,2), ..., (1,2), ...
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(a != b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Number of unordered pairs of an `n`-point set.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// All unordered pairs in packed order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// A validated finite metric space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MetricSpace {
    n: usize,
    dist: Vec<Rational>,
}

impl MetricSpace {
    /// Builds a metric space from the packed upper triangle of distances and
    /// checks positivity and every triangle inequality. Saturated triangles
    /// (zero Gromov products) are accepted.
    pub fn from_packed(n: usize, dist: Vec<Rational>) -> Result<Self, MetricError> {
        if n < 3 {
            return Err(MetricError::TooFewPoints(n));
        }
        assert_eq!(dist.len(), pair_count(n), "packed distance vector has wrong length");
        let space = MetricSpace { n, dist };
        space.validate()?;
        Ok(space)
    }

    fn validate(&self) -> Result<(), MetricError> {
        for (i, j) in pairs(self.n) {
            if !self.d(i, j).is_positive() {
                return Err(MetricError::NonPositiveDistance { i, j });
            }
        }
        for apex in 0..self.n {
            for (j, k) in pairs(self.n) {
                if j == apex || k == apex {
                    continue;
                }
                if &(self.d(apex, j) + self.d(apex, k)) < self.d(j, k) {
                    return Err(MetricError::TriangleViolation { apex, j, k });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance between distinct vertices `i` and `j`.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &Rational {
        &self.dist[pair_index(self.n, i, j)]
    }

    pub fn packed(&self) -> &[Rational] {
        &self.dist
    }

    /// Multiplies every distance by a positive rational.
    pub fn scaled(&self, factor: &Rational) -> Result<Self, MetricError> {
        let dist = self.dist.iter().map(|d| d * factor).collect();
        MetricSpace::from_packed(self.n, dist)
    }

    fn check_vertex(&self, index: usize) -> Result<(), MetricError> {
        if index >= self.n {
            Err(MetricError::IndexOutOfRange { index, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Twice the Gromov product at `apex`: d(apex,j) + d(apex,k) - d(j,k).
    #[inline]
    fn doubled_product(&self, apex: usize, j: usize, k: usize) -> Rational {
        &(self.d(apex, j) + self.d(apex, k)) - self.d(j, k)
    }

    /// Serializes as csv-lower: line `i` (1-based, i >= 2) holds d(i, 1..i-1).
    pub fn to_csv_lower(&self) -> String {
        let mut out = String::new();
        for i in 1..self.n {
            let row: Vec<String> = (0..i).map(|j| self.d(i, j).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_csv_full(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| if i == j { "0".to_string() } else { self.d(i, j).to_string() })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetricSpace(n={}, lower=[{}])", self.n, self.to_csv_lower().trim_end().replace('\n', "; "))
    }
}

/// Gromov product `½(d(i,j) + d(i,k) − d(j,k))` at apex `i` for the pair `{j, k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GromovTriple {
    pub apex: usize,
    /// Sorted pair.
    pub pair: (usize, usize),
    pub value: Rational,
}

impl fmt::Display for GromovTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Δ{{{};{},{}}} = {}",
            self.apex + 1,
            self.pair.0 + 1,
            self.pair.1 + 1,
            self.value
        )
    }
}

pub fn gromov_product(
    space: &MetricSpace,
    i: usize,
    j: usize,
    k: usize,
) -> Result<GromovTriple, MetricError> {
    for v in [i, j, k] {
        space.check_vertex(v)?;
    }
    if i == j || i == k || j == k {
        return Err(MetricError::RepeatedIndex);
    }
    Ok(GromovTriple {
        apex: i,
        pair: (j.min(k), j.max(k)),
        value: space.doubled_product(i, j, k).halve(),
    })
}

/// Every Gromov product at `apex` that attains the minimum, sorted by pair.
pub fn minimal_products_at(
    space: &MetricSpace,
    apex: usize,
) -> Result<Vec<GromovTriple>, MetricError> {
    space.check_vertex(apex)?;
    let mut best: Option<Rational> = None;
    let mut winners = Vec::new();
    for (j, k) in pairs(space.n) {
        if j == apex || k == apex {
            continue;
        }
        let value = space.doubled_product(apex, j, k);
        match best.as_ref().map(|b| value.cmp(b)) {
            Some(std::cmp::Ordering::Greater) => {}
            Some(std::cmp::Ordering::Equal) => winners.push((j, k)),
            _ => {
                best = Some(value);
                winners.clear();
                winners.push((j, k));
            }
        }
    }
    let value = best.expect("n >= 3 guarantees a pair").halve();
    Ok(winners
        .into_iter()
        .map(|pair| GromovTriple {
            apex,
            pair,
            value: value.clone(),
        })
        .collect())
}

/// A Gromov product structure together with the minimal values that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub structure: GromovStructure,
    /// Minimal Gromov product at each vertex.
    pub minima: Vec<Rational>,
}

impl Extraction {
    /// Vertices whose unique minimal Gromov product is zero (a saturated
    /// triangle). These are accepted but worth reporting.
    pub fn zero_minimum_vertices(&self) -> Vec<usize> {
        self.minima
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_zero())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Extracts the Gromov product structure. Fails with `NonGeneric` listing
/// every vertex whose minimum is attained by more than one pair.
pub fn extract_structure(space: &MetricSpace) -> Result<Extraction, MetricError> {
    let mut pairs_out = Vec::with_capacity(space.n);
    let mut minima = Vec::with_capacity(space.n);
    let mut tied = Vec::new();
    for apex in 0..space.n {
        let mut winners = minimal_products_at(space, apex)?;
        if winners.len() > 1 {
            tied.push(apex);
            continue;
        }
        let triple = winners.pop().expect("at least one minimal product");
        pairs_out.push(triple.pair);
        minima.push(triple.value);
    }
    if !tied.is_empty() {
        return Err(MetricError::NonGeneric { vertices: tied });
    }
    let structure =
        GromovStructure::new(pairs_out).expect("minimal pairs always form a valid structure");
    Ok(Extraction { structure, minima })
}

/// Shortest-path metric of the complete graph on `n` vertices with the given
/// positive edge weights (packed pair order).
pub fn apsp_closure(n: usize, weights: &[Rational]) -> Result<MetricSpace, MetricError> {
    if n < 3 {
        return Err(MetricError::TooFewPoints(n));
    }
    assert_eq!(weights.len(), pair_count(n), "weight vector has wrong length");
    for (i, j) in pairs(n) {
        if !weights[pair_index(n, i, j)].is_positive() {
            return Err(MetricError::NonPositiveWeight { i, j });
        }
    }
    let mut dist = weights.to_vec();
    for via in 0..n {
        for (i, j) in pairs(n) {
            if i == via || j == via {
                continue;
            }
            let through = &dist[pair_index(n, i, via)] + &dist[pair_index(n, via, j)];
            let slot = &mut dist[pair_index(n, i, j)];
            if through < *slot {
                *slot = through;
            }
        }
    }
    MetricSpace::from_packed(n, dist)
}

/// Distance-matrix input formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricFormat {
    /// `n` lines of `n` comma-separated entries, zero diagonal, symmetric.
    CsvFull,
    /// Line `i` (for i = 2..n) holds d(i, 1..i-1).
    CsvLower,
    /// `{"n": .., "d": [[i, j, "value"], ..]}` with 1-based indices.
    Json,
}

impl FromStr for MetricFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv-full" => Ok(MetricFormat::CsvFull),
            "csv-lower" => Ok(MetricFormat::CsvLower),
            "json" => Ok(MetricFormat::Json),
            other => Err(format!("unknown metric format {other:?} (expected csv-full, csv-lower or json)")),
        }
    }
}

impl fmt::Display for MetricFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricFormat::CsvFull => "csv-full",
            MetricFormat::CsvLower => "csv-lower",
            MetricFormat::Json => "json",
        })
    }
}

fn parse_entry(text: &str, line: usize) -> Result<Rational, MetricError> {
    text.parse::<Rational>().map_err(|e| MetricError::Parse {
        line,
        message: e.to_string(),
    })
}

/// Non-blank lines with their 1-based line numbers, each split on commas.
fn csv_rows(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(no, l)| (no + 1, l.split(',').map(str::trim).collect()))
        .collect()
}

pub fn parse_metric(text: &str, format: MetricFormat) -> Result<MetricSpace, MetricError> {
    match format {
        MetricFormat::CsvFull => parse_csv_full(text),
        MetricFormat::CsvLower => parse_csv_lower(text),
        MetricFormat::Json => parse_json(text),
    }
}

fn parse_csv_full(text: &str) -> Result<MetricSpace, MetricError> {
    let rows = csv_rows(text);
    let n = rows.len();
    let mut matrix = Vec::with_capacity(n);
    for (line, cells) in &rows {
        if cells.len() != n {
            return Err(MetricError::Parse {
                line: *line,
                message: format!("expected {n} entries, found {}", cells.len()),
            });
        }
        let row = cells
            .iter()
            .map(|c| parse_entry(c, *line))
            .collect::<Result<Vec<_>, _>>()?;
        matrix.push(row);
    }
    if n < 3 {
        return Err(MetricError::TooFewPoints(n));
    }
    for (i, (line, _)) in rows.iter().enumerate() {
        if !matrix[i][i].is_zero() {
            return Err(MetricError::Parse {
                line: *line,
                message: format!("diagonal entry d({0},{0}) is not zero", i + 1),
            });
        }
    }
    for (i, j) in pairs(n) {
        if matrix[i][j] != matrix[j][i] {
            return Err(MetricError::NotSymmetric { i, j });
        }
    }
    let dist = pairs(n).map(|(i, j)| matrix[i][j].clone()).collect();
    MetricSpace::from_packed(n, dist)
}

fn parse_csv_lower(text: &str) -> Result<MetricSpace, MetricError> {
    let rows = csv_rows(text);
    let n = rows.len() + 1;
    if n < 3 {
        return Err(MetricError::TooFewPoints(n));
    }
    let mut dist = vec![Rational::zero(); pair_count(n)];
    for (offset, (line, cells)) in rows.iter().enumerate() {
        let i = offset + 1;
        if cells.len() != i {
            return Err(MetricError::Parse {
                line: *line,
                message: format!("row for vertex {} needs {i} entries, found {}", i + 1, cells.len()),
            });
        }
        for (j, cell) in cells.iter().enumerate() {
            dist[pair_index(n, i, j)] = parse_entry(cell, *line)?;
        }
    }
    MetricSpace::from_packed(n, dist)
}

#[derive(Deserialize)]
struct JsonMetric {
    n: usize,
    d: Vec<(usize, usize, JsonValue)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonValue {
    Text(String),
    Integer(i64),
}

fn parse_json(text: &str) -> Result<MetricSpace, MetricError> {
    let doc: JsonMetric = serde_json::from_str(text).map_err(|e| MetricError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let n = doc.n;
    if n < 3 {
        return Err(MetricError::TooFewPoints(n));
    }
    let mut dist: Vec<Option<Rational>> = vec![None; pair_count(n)];
    for (i, j, value) in doc.d {
        if i == 0 || j == 0 || i > n || j > n {
            let index = if i == 0 || i > n { i } else { j };
            return Err(MetricError::IndexOutOfRange {
                index: index.wrapping_sub(1),
                n,
            });
        }
        if i == j {
            return Err(MetricError::RepeatedIndex);
        }
        let value = match value {
            JsonValue::Text(s) => parse_entry(&s, 0)?,
            JsonValue::Integer(v) => Rational::from(v),
        };
        let slot = &mut dist[pair_index(n, i - 1, j - 1)];
        match slot {
            Some(existing) if *existing != value => {
                return Err(MetricError::NotSymmetric {
                    i: (i - 1).min(j - 1),
                    j: (i - 1).max(j - 1),
                })
            }
            _ => *slot = Some(value),
        }
    }
    let mut packed = Vec::with_capacity(dist.len());
    for ((i, j), value) in pairs(n).zip(dist) {
        packed.push(value.ok_or_else(|| MetricError::Parse {
            line: 0,
            message: format!("missing distance d({},{})", i + 1, j + 1),
        })?);
    }
    MetricSpace::from_packed(n, packed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn four_cycle() -> MetricSpace {
        parse_metric("2\n3,2\n2,3,2", MetricFormat::CsvLower).unwrap()
    }

    fn equilateral(n: usize) -> MetricSpace {
        MetricSpace::from_packed(n, vec![Rational::from(2i64); pair_count(n)]).unwrap()
    }

    #[test]
    fn pair_index_is_dense() {
        for n in 3..9 {
            let idx: Vec<usize> = pairs(n).map(|(i, j)| pair_index(n, i, j)).collect();
            assert_eq!(idx, (0..pair_count(n)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn four_cycle_accepted_in_every_format() {
        let m = four_cycle();
        assert_eq!(m.n(), 4);
        assert_eq!(m.d(0, 1), &q("2"));
        assert_eq!(m.d(0, 2), &q("3"));
        assert_eq!(m.d(1, 3), &q("3"));
        assert_eq!(m.d(2, 3), &q("2"));
        let full = parse_metric(&m.to_csv_full(), MetricFormat::CsvFull).unwrap();
        assert_eq!(full, m);
        let json = r#"{"n":4,"d":[[1,2,"2"],[1,3,"3"],[1,4,"2"],[2,3,"2"],[2,4,3],[3,4,"2"]]}"#;
        assert_eq!(parse_metric(json, MetricFormat::Json).unwrap(), m);
    }

    #[test]
    fn broken_triangle_reports_triple() {
        let err = parse_metric("1\n1,3", MetricFormat::CsvLower).unwrap_err();
        assert_eq!(err, MetricError::TriangleViolation { apex: 0, j: 1, k: 2 });
        assert!(err.to_string().contains("apex 1"));
    }

    #[test]
    fn json_equilateral() {
        let json = r#"{"n":3,"d":[[1,2,"2"],[1,3,"2"],[2,3,"2"]]}"#;
        let m = parse_metric(json, MetricFormat::Json).unwrap();
        assert!(m.packed().iter().all(|d| *d == q("2")));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_metric("0,1,1\n1,0,1\n1,2,0", MetricFormat::CsvFull),
            Err(MetricError::NotSymmetric { i: 1, j: 2 })
        ));
        assert!(matches!(
            parse_metric("1,1,1\n1,0,1\n1,1,0", MetricFormat::CsvFull),
            Err(MetricError::Parse { .. })
        ));
        assert!(matches!(
            parse_metric("0\n1,1", MetricFormat::CsvLower),
            Err(MetricError::NonPositiveDistance { i: 0, j: 1 })
        ));
        assert!(matches!(
            parse_metric("1\n1,x", MetricFormat::CsvLower),
            Err(MetricError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_metric("1\n1", MetricFormat::CsvLower),
            Err(MetricError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_metric(r#"{"n":3,"d":[[1,2,"2"],[1,3,"2"]]}"#, MetricFormat::Json),
            Err(MetricError::Parse { .. })
        ));
        assert!(matches!(
            parse_metric(r#"{"n":3,"d":[[1,2,"2"],[1,3,"2"],[2,3,1.5]]}"#, MetricFormat::Json),
            Err(MetricError::Parse { .. })
        ));
        assert!(matches!(
            parse_metric(r#"{"n":3,"d":[[1,4,"2"]]}"#, MetricFormat::Json),
            Err(MetricError::IndexOutOfRange { index: 3, n: 3 })
        ));
    }

    #[test]
    fn decimals_are_exact() {
        let m = parse_metric("1.5\n1.5,1.5", MetricFormat::CsvLower).unwrap();
        assert_eq!(m.d(0, 1), &Rational::new(3, 2));
    }

    #[test]
    fn gromov_product_examples() {
        let line = parse_metric("1\n3,2", MetricFormat::CsvLower).unwrap();
        assert_eq!(gromov_product(&line, 1, 0, 2).unwrap().value, q("0"));
        assert_eq!(gromov_product(&equilateral(3), 0, 1, 2).unwrap().value, q("1"));
        let g = gromov_product(&four_cycle(), 0, 1, 3).unwrap();
        assert_eq!(g.value, q("1/2"));
        assert_eq!(g.to_string(), "Δ{1;2,4} = 1/2");
        assert_eq!(gromov_product(&four_cycle(), 0, 3, 1).unwrap(), g);
        assert_eq!(
            gromov_product(&four_cycle(), 0, 0, 1),
            Err(MetricError::RepeatedIndex)
        );
        assert_eq!(
            gromov_product(&four_cycle(), 0, 1, 4),
            Err(MetricError::IndexOutOfRange { index: 4, n: 4 })
        );
    }

    #[test]
    fn minimal_products_examples() {
        let m = four_cycle();
        let values: Vec<Rational> = [(1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(j, k)| gromov_product(&m, 0, j, k).unwrap().value)
            .collect();
        assert_eq!(values, vec![q("3/2"), q("1/2"), q("3/2")]);
        let mins = minimal_products_at(&m, 0).unwrap();
        assert_eq!(mins.len(), 1);
        assert_eq!(mins[0].pair, (1, 3));

        let eq = minimal_products_at(&equilateral(4), 0).unwrap();
        assert_eq!(eq.len(), 3);
        assert!(eq.iter().all(|t| t.value == q("1")));

        let tri = minimal_products_at(&equilateral(3), 0).unwrap();
        assert_eq!(tri.len(), 1);
        assert_eq!(tri[0].pair, (1, 2));
    }

    #[test]
    fn extract_four_cycle() {
        let ex = extract_structure(&four_cycle()).unwrap();
        assert_eq!(ex.structure.pairs(), &[(1, 3), (0, 2), (1, 3), (0, 2)]);
        assert!(ex.zero_minimum_vertices().is_empty());
    }

    #[test]
    fn extract_equilateral_is_non_generic() {
        assert_eq!(
            extract_structure(&equilateral(4)),
            Err(MetricError::NonGeneric { vertices: vec![0, 1, 2, 3] })
        );
    }

    #[test]
    fn extract_three_points() {
        let m = parse_metric("1\n3,2", MetricFormat::CsvLower).unwrap();
        let ex = extract_structure(&m).unwrap();
        assert_eq!(ex.structure.pairs(), &[(1, 2), (0, 2), (0, 1)]);
        assert_eq!(ex.zero_minimum_vertices(), vec![1]);
    }

    #[test]
    fn closure_examples() {
        let w: Vec<Rational> = [5i64, 1, 1].iter().map(|&v| v.into()).collect();
        let m = apsp_closure(3, &w).unwrap();
        assert_eq!(m.packed(), &[q("2"), q("1"), q("1")]);
        let again = apsp_closure(3, m.packed()).unwrap();
        assert_eq!(again, m);
        let uniform = vec![Rational::from(7i64); 6];
        assert_eq!(apsp_closure(4, &uniform).unwrap().packed(), &uniform[..]);
        let bad: Vec<Rational> = [1i64, 0, 1].iter().map(|&v| v.into()).collect();
        assert_eq!(apsp_closure(3, &bad), Err(MetricError::NonPositiveWeight { i: 0, j: 2 }));
    }
}
