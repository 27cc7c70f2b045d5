//! Published reference structures and the table check.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{CensusError, ClassRegistry};
use crate::equivalence::decide_equivalence;
use crate::invariants::{fingerprint, InvariantFingerprint};
use crate::poly::IntegerPolynomial;
use crate::structure::{from_compact_triples, GromovStructure};

const REFERENCE_JSON: &str = include_str!("../../data/reference_v1.json");
pub const REFERENCE_DATA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Reducible,
    Irreducible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Convention {
    /// Printed as the full polynomial.
    Full,
    /// Printed as `-p(t)/(t-2)`.
    Quotient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Erratum {
    pub field: String,
    pub printed: String,
    pub corrected: String,
    pub note: String,
}

#[derive(Deserialize)]
struct RawRow {
    label: String,
    family: Option<Family>,
    triples: String,
    k_printed: String,
    m_printed: String,
    polynomial_convention: Convention,
    n_r: Option<usize>,
    n_e: Option<usize>,
    errata: Vec<Erratum>,
}

#[derive(Deserialize)]
struct RawData {
    version: u32,
    sets: std::collections::BTreeMap<String, Vec<RawRow>>,
}

/// One published structure with the values the check compares against.
/// Printed strings are kept verbatim; the `expected_*` fields have errata
/// applied and polynomials expanded to full monic form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceStructure {
    pub label: String,
    pub family: Option<Family>,
    pub structure: GromovStructure,
    pub printed_triples: String,
    pub printed_k: String,
    pub printed_m: String,
    pub printed_n_r: Option<usize>,
    pub printed_n_e: Option<usize>,
    pub expected_k: IntegerPolynomial,
    /// Published minimal polynomial; carried unverified.
    pub published_m: IntegerPolynomial,
    pub expected_n_r: Option<usize>,
    pub expected_n_e: Option<usize>,
    pub errata: Vec<Erratum>,
}

fn full_form(printed: &str, convention: Convention) -> IntegerPolynomial {
    let p = IntegerPolynomial::parse(printed)
        .unwrap_or_else(|e| panic!("embedded reference polynomial {printed:?} does not parse: {e}"));
    let p = match convention {
        Convention::Full => p,
        Convention::Quotient => p.mul(&IntegerPolynomial::linear(2)),
    };
    p.sign_normalized()
}

/// The embedded transcription for `n` in {4, 5, 6}: one structure for
/// `n = 4`, three for `n = 5`, and the 26 table rows for `n = 6`.
pub fn reference_structures(n: usize) -> Result<Vec<ReferenceStructure>, CensusError> {
    let data: RawData = serde_json::from_str(REFERENCE_JSON).expect("embedded reference data is valid JSON");
    assert_eq!(data.version, REFERENCE_DATA_VERSION);
    let rows = data.sets.get(&n.to_string()).ok_or(CensusError::UnsupportedN(n))?;
    Ok(rows
        .iter()
        .map(|row| {
            let triples: Vec<&str> = row.triples.split(',').collect();
            let structure = from_compact_triples(&triples).expect("embedded triples are valid");
            let corrected = |field: &str, printed: &str| {
                row.errata
                    .iter()
                    .find(|e| e.field == field)
                    .map_or_else(|| printed.to_string(), |e| e.corrected.clone())
            };
            let count = |field: &str, printed: Option<usize>| {
                printed.map(|v| corrected(field, &v.to_string()).parse().expect("corrected count is an integer"))
            };
            ReferenceStructure {
                label: row.label.clone(),
                family: row.family,
                structure,
                printed_triples: row.triples.clone(),
                printed_k: row.k_printed.clone(),
                printed_m: row.m_printed.clone(),
                printed_n_r: row.n_r,
                printed_n_e: row.n_e,
                expected_k: full_form(&corrected("k", &row.k_printed), row.polynomial_convention),
                published_m: full_form(&corrected("m", &row.m_printed), row.polynomial_convention),
                expected_n_r: count("n_r", row.n_r),
                expected_n_e: count("n_e", row.n_e),
                errata: row.errata.clone(),
            }
        })
        .collect())
}

/// A single disagreement between computed and published data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub row: String,
    pub field: String,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowReport {
    pub label: String,
    pub triples: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    pub k: String,
    pub m: String,
    pub published_k: String,
    pub published_m: String,
    pub n_r: usize,
    pub n_e: usize,
    pub rank: usize,
    pub irreducible: bool,
    pub fingerprint: InvariantFingerprint,
    pub hard_ok: bool,
    pub m_matches: bool,
    /// Hits of the matching census class, when a registry was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census_hits: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionSummary {
    pub registry_classes: usize,
    pub matched: usize,
    pub missing: Vec<String>,
    pub unmatched: Vec<String>,
    pub ambiguous: Vec<String>,
}

impl BijectionSummary {
    pub fn is_bijection(&self) -> bool {
        self.missing.is_empty() && self.unmatched.is_empty() && self.ambiguous.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub schema_version: u32,
    pub reference_data_version: u32,
    pub n: usize,
    pub rows: Vec<RowReport>,
    pub hard_failures: Vec<Finding>,
    pub soft_discrepancies: Vec<Finding>,
    pub errata_applied: Vec<Finding>,
    pub pairwise_inequivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bijection: Option<BijectionSummary>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.hard_failures.is_empty()
    }

    /// The first hard failure as an error.
    pub fn ensure_passed(&self) -> Result<(), CensusError> {
        match self.hard_failures.first() {
            None => Ok(()),
            Some(f) => Err(CensusError::ReferenceMismatch {
                row: f.row.clone(),
                field: f.field.clone(),
                expected: f.expected.clone(),
                found: f.found.clone(),
            }),
        }
    }

    /// Plain-text table with the published columns next to the computed ones.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let w_triples = self.rows.iter().map(|r| r.triples.chars().count()).max().unwrap_or(7).max(7);
        let w_k = self.rows.iter().map(|r| r.k.len()).max().unwrap_or(4).max(4);
        let w_m = self.rows.iter().map(|r| r.m.len()).max().unwrap_or(4).max(4);
        let _ = writeln!(
            out,
            "{:<5} {:<w_triples$} {:<w_k$} {:<w_m$} {:>3} {:>3}  result",
            "label", "triples", "k(t)", "m(t)", "N_r", "N_e"
        );
        for r in &self.rows {
            let pad = w_triples - r.triples.chars().count() + r.triples.len();
            let status = match (r.hard_ok, r.m_matches) {
                (true, true) => "ok",
                (true, false) => "ok (m differs from published)",
                (false, _) => "FAIL",
            };
            let _ = writeln!(
                out,
                "{:<5} {:<pad$} {:<w_k$} {:<w_m$} {:>3} {:>3}  {status}",
                r.label, r.triples, r.k, r.m, r.n_r, r.n_e
            );
        }
        let _ = writeln!(
            out,
            "rows={} hard_failures={} soft_discrepancies={} errata={} pairwise_inequivalent={}",
            self.rows.len(),
            self.hard_failures.len(),
            self.soft_discrepancies.len(),
            self.errata_applied.len(),
            self.pairwise_inequivalent
        );
        for f in &self.errata_applied {
            let _ = writeln!(out, "erratum {} {}: printed {} read as {}", f.row, f.field, f.found, f.expected);
        }
        for f in &self.hard_failures {
            let _ = writeln!(out, "FAIL {} {}: expected {} found {}", f.row, f.field, f.expected, f.found);
        }
        for f in &self.soft_discrepancies {
            let _ = writeln!(out, "note {} {}: published {} computed {}", f.row, f.field, f.expected, f.found);
        }
        if let Some(b) = &self.bijection {
            let _ = writeln!(
                out,
                "census classes={} matched={} missing=[{}] unmatched=[{}] ambiguous=[{}] bijection={}",
                b.registry_classes,
                b.matched,
                b.missing.join(","),
                b.unmatched.join(","),
                b.ambiguous.join(","),
                b.is_bijection()
            );
        }
        out
    }
}

fn display_m(fp: &InvariantFingerprint) -> String {
    fp.min_poly.factored_string()
}

/// Recomputes every reference row and compares it with the published
/// columns. Characteristic polynomial, `N_r`, `N_e`, family and pairwise
/// inequivalence are hard checks; the minimal polynomial column is compared
/// softly. With a registry, its classes must biject with the reference rows.
pub fn check_tables(n: usize, registry: Option<&ClassRegistry>) -> Result<TableReport, CensusError> {
    let refs = reference_structures(n)?;
    if let Some(reg) = registry {
        if reg.n != n {
            return Err(CensusError::SizeMismatch { left: n, right: reg.n });
        }
    }
    let mut hard = Vec::new();
    let mut soft = Vec::new();
    let mut errata = Vec::new();
    let mut rows = Vec::new();
    for r in &refs {
        let fp = fingerprint(&r.structure);
        let mut row_hard = Vec::new();
        let finding = |field: &str, expected: String, found: String| Finding {
            row: r.label.clone(),
            field: field.to_string(),
            expected,
            found,
        };
        if fp.char_poly.sign_normalized() != r.expected_k {
            row_hard.push(finding("k", r.expected_k.factored_string(), fp.char_poly.factored_string()));
        }
        if let Some(expected) = r.expected_n_r {
            if fp.removed_edge_count != expected {
                row_hard.push(finding("n_r", expected.to_string(), fp.removed_edge_count.to_string()));
            }
        }
        if let Some(expected) = r.expected_n_e {
            if fp.ends != expected {
                row_hard.push(finding("n_e", expected.to_string(), fp.ends.to_string()));
            }
        }
        if let Some(family) = r.family {
            let expected = family == Family::Irreducible;
            if fp.irreducible != expected {
                row_hard.push(finding("family", format!("{family:?}"), format!("irreducible={}", fp.irreducible)));
            }
        }
        let m_matches = fp.min_poly.to_integer().map(|m| m.sign_normalized()) == Some(r.published_m.clone());
        if !m_matches {
            soft.push(finding("m", r.published_m.factored_string(), display_m(&fp)));
        }
        for e in &r.errata {
            errata.push(finding(&e.field, e.corrected.clone(), e.printed.clone()));
        }
        rows.push(RowReport {
            label: r.label.clone(),
            triples: r.printed_triples.clone(),
            family: r.family,
            k: fp.char_poly.factored_string(),
            m: display_m(&fp),
            published_k: r.printed_k.clone(),
            published_m: r.printed_m.clone(),
            n_r: fp.removed_edge_count,
            n_e: fp.ends,
            rank: fp.rank,
            irreducible: fp.irreducible,
            fingerprint: fp,
            hard_ok: row_hard.is_empty(),
            m_matches,
            census_hits: None,
        });
        hard.extend(row_hard);
    }

    let mut pairwise_inequivalent = true;
    for i in 0..refs.len() {
        for j in i + 1..refs.len() {
            let verdict = decide_equivalence(&refs[i].structure, &refs[j].structure)
                .expect("reference structures share n");
            if verdict.equivalent {
                pairwise_inequivalent = false;
                hard.push(Finding {
                    row: refs[i].label.clone(),
                    field: "inequivalence".into(),
                    expected: format!("not equivalent to {}", refs[j].label),
                    found: "equivalent".into(),
                });
            }
        }
    }

    let bijection = registry.map(|reg| {
        let mut matched_by_ref: Vec<Vec<&GromovStructure>> = vec![Vec::new(); refs.len()];
        let mut unmatched = Vec::new();
        let mut ambiguous = Vec::new();
        for (key, record) in &reg.records {
            let hits: Vec<usize> = refs
                .iter()
                .enumerate()
                .filter(|(_, r)| {
                    decide_equivalence(&r.structure, key).map(|v| v.equivalent).unwrap_or(false)
                })
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [] => unmatched.push(key.triples_label()),
                [i] => {
                    matched_by_ref[*i].push(key);
                    rows[*i].census_hits = Some(record.hits);
                }
                _ => ambiguous.push(key.triples_label()),
            }
        }
        let mut missing = Vec::new();
        for (i, classes) in matched_by_ref.iter().enumerate() {
            match classes.len() {
                0 => missing.push(refs[i].label.clone()),
                1 => {}
                _ => ambiguous.push(refs[i].label.clone()),
            }
        }
        BijectionSummary {
            registry_classes: reg.class_count(),
            matched: matched_by_ref.iter().filter(|c| c.len() == 1).count(),
            missing,
            unmatched,
            ambiguous,
        }
    });
    if let Some(b) = &bijection {
        for label in &b.missing {
            hard.push(Finding {
                row: label.clone(),
                field: "census".into(),
                expected: "matching census class".into(),
                found: "missing".into(),
            });
        }
        for triples in &b.unmatched {
            hard.push(Finding {
                row: triples.clone(),
                field: "census".into(),
                expected: "a reference row".into(),
                found: "class without reference".into(),
            });
        }
        for item in &b.ambiguous {
            hard.push(Finding {
                row: item.clone(),
                field: "census".into(),
                expected: "one-to-one match".into(),
                found: "multiple matches".into(),
            });
        }
    }

    Ok(TableReport {
        schema_version: super::REGISTRY_SCHEMA_VERSION,
        reference_data_version: REFERENCE_DATA_VERSION,
        n,
        rows,
        hard_failures: hard,
        soft_discrepancies: soft,
        errata_applied: errata,
        pairwise_inequivalent,
        bijection,
    })
}
