//! Pairwise comparison matrix over a set of area author lists.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::ingest::AreaAuthorList;
use crate::{prob, Error, Result};

/// One pairwise comparison. `n` is always the smaller of the two list
/// sizes and `m` the larger; the probability estimate assumes that order.
/// A pair involving an empty list carries `p_hat = 0` with the `undefined`
/// flag set instead of failing the whole matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairOverlap {
    pub area_a: String,
    pub area_b: String,
    pub n: u64,
    pub m: u64,
    pub k: u64,
    pub p_hat: f64,
    pub undefined: bool,
}

/// Comparisons for every unordered pair of areas, diagonal excluded.
/// `cells` holds exactly `C(areas.len(), 2)` entries, in pair order
/// `(0,1), (0,2), ..., (1,2), ...` over `areas`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    pub areas: Vec<String>,
    pub cells: Vec<PairOverlap>,
}

impl OverlapMatrix {
    /// Looks up the cell for an unordered pair of area names.
    pub fn cell(&self, a: &str, b: &str) -> Option<&PairOverlap> {
        self.cells.iter().find(|c| {
            (c.area_a == a && c.area_b == b) || (c.area_a == b && c.area_b == a)
        })
    }

    /// Serializes as a flat pair list with a header row.
    pub fn to_pairs_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["area_a", "area_b", "n", "m", "k", "p_hat", "undefined"]).expect("in-memory write");
        for c in &self.cells {
            w.write_record([
                c.area_a.as_str(),
                c.area_b.as_str(),
                &c.n.to_string(),
                &c.m.to_string(),
                &c.k.to_string(),
                &c.p_hat.to_string(),
                &c.undefined.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Reads a matrix back from [`Self::to_pairs_csv`] output.
    pub fn from_pairs_csv(bytes: &[u8]) -> Result<OverlapMatrix> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
        let mut cells = Vec::new();
        let mut areas: Vec<String> = Vec::new();
        let mut seen = BTreeSet::new();
        for row in reader.records() {
            let row = row.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                Error::format(line, format!("unreadable pair row: {e}"))
            })?;
            let lineno = row.position().map(|p| p.line() as usize).unwrap_or(0);
            let field = |i: usize| {
                row.get(i).ok_or_else(|| Error::format(lineno, format!("missing column {i}")))
            };
            let cell = PairOverlap {
                area_a: field(0)?.to_string(),
                area_b: field(1)?.to_string(),
                n: parse_field(field(2)?, lineno)?,
                m: parse_field(field(3)?, lineno)?,
                k: parse_field(field(4)?, lineno)?,
                p_hat: parse_field(field(5)?, lineno)?,
                undefined: parse_field(field(6)?, lineno)?,
            };
            for name in [&cell.area_a, &cell.area_b] {
                if seen.insert(name.clone()) {
                    areas.push(name.clone());
                }
            }
            cells.push(cell);
        }
        let matrix = OverlapMatrix { areas, cells };
        let expected = matrix.areas.len() * matrix.areas.len().saturating_sub(1) / 2;
        if matrix.cells.len() != expected {
            return Err(Error::format(
                0,
                format!("{} pair rows do not cover {} areas (expected {expected})", matrix.cells.len(), matrix.areas.len()),
            ));
        }
        Ok(matrix)
    }

    /// Serializes as a square matrix of `p_hat` with area names as header
    /// row and column; diagonal cells are left empty.
    pub fn to_square_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::new()];
        header.extend(self.areas.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for a in &self.areas {
            let mut row = vec![a.clone()];
            for b in &self.areas {
                if a == b {
                    row.push(String::new());
                } else {
                    let cell = self.cell(a, b).expect("complete matrix");
                    row.push(cell.p_hat.to_string());
                }
            }
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| Error::format(line, format!("bad value {s:?}: {e}")))
}

/// Number of authors two lists have in common.
pub fn count_common(a: &AreaAuthorList, b: &AreaAuthorList) -> u64 {
    let (small, large) = if a.size() <= b.size() { (a, b) } else { (b, a) };
    small.authors().iter().filter(|k| large.authors().contains(*k)).count() as u64
}

/// Builds the full pairwise comparison matrix. Requires at least two lists
/// and unique area names. Cells are independent and evaluated in parallel;
/// the result is assembled in pair order regardless of scheduling.
pub fn overlap_matrix(lists: &[AreaAuthorList]) -> Result<OverlapMatrix> {
    if lists.len() < 2 {
        return Err(Error::Config(format!(
            "need at least two areas to compare, got {}",
            lists.len()
        )));
    }
    let mut names = BTreeSet::new();
    for list in lists {
        if !names.insert(list.area_name()) {
            return Err(Error::Config(format!("duplicate area name {:?}", list.area_name())));
        }
    }

    let pairs: Vec<(usize, usize)> = (0..lists.len())
        .flat_map(|i| ((i + 1)..lists.len()).map(move |j| (i, j)))
        .collect();
    let cells = pairs
        .into_par_iter()
        .map(|(i, j)| pair_overlap(&lists[i], &lists[j]))
        .collect::<Result<Vec<_>>>()?;

    Ok(OverlapMatrix {
        areas: lists.iter().map(|l| l.area_name().to_string()).collect(),
        cells,
    })
}

/// Builds the comparison cell for one pair of lists.
pub fn pair_overlap(a: &AreaAuthorList, b: &AreaAuthorList) -> Result<PairOverlap> {
    let k = count_common(a, b);
    let n = a.size().min(b.size());
    let m = a.size().max(b.size());
    let (p_hat, undefined) = if n == 0 {
        (0.0, true)
    } else {
        (prob::estimate_p(k as f64, n, m)?, false)
    };
    Ok(PairOverlap {
        area_a: a.area_name().to_string(),
        area_b: b.area_name().to_string(),
        n,
        m,
        k,
        p_hat,
        undefined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_area_list, parse_records, FormatSpec};

    fn area(name: &str, authors: &[&str]) -> AreaAuthorList {
        let text = authors.join("\n");
        let records = parse_records(text.as_bytes(), &FormatSpec::AuthorLines).unwrap();
        build_area_list(&records, name).unwrap().list
    }

    #[test]
    fn self_intersection_is_size() {
        let a = area("a", &["Alvarez, M.J.", "Brandt, K.L.", "Chen, L."]);
        assert_eq!(count_common(&a, &a), a.size());
    }

    #[test]
    fn disjoint_lists_share_nothing() {
        let a = area("a", &["Alvarez, M.J."]);
        let b = area("b", &["Brandt, K.L."]);
        assert_eq!(count_common(&a, &b), 0);
    }

    /// Brute-force double loop as the independent oracle.
    #[test]
    fn count_matches_brute_force() {
        let a = area("a", &["Alvarez, M.J.", "Brandt, K.L.", "Dupont, J.", "Egorov, V.", "Fischer, R."]);
        let b = area("b", &[
            "alvarez, MJ", // same key as Alvarez, M.J.
            "Brandt, K.L.",
            "Jensen, O.",
            "Hoffman, S.",
            "Ito, K.",
            "Garcia, P.T.",
            "Chen, L.",
        ]);
        let mut brute = 0;
        for x in a.authors() {
            for y in b.authors() {
                if x == y {
                    brute += 1;
                }
            }
        }
        assert_eq!(brute, 2);
        assert_eq!(count_common(&a, &b), 2);
        assert_eq!(count_common(&b, &a), 2);
    }

    #[test]
    fn three_lists_three_cells() {
        let lists = vec![area("x", &["A, B."]), area("y", &["C, D."]), area("z", &["E, F."])];
        let matrix = overlap_matrix(&lists).unwrap();
        assert_eq!(matrix.cells.len(), 3);
    }

    #[test]
    fn fifty_lists_give_1225_cells() {
        let lists: Vec<AreaAuthorList> = (0..50)
            .map(|i| area(&format!("area{i}"), &[&format!("Name{i}, A.")]))
            .collect();
        let matrix = overlap_matrix(&lists).unwrap();
        assert_eq!(matrix.cells.len(), 1225);
    }

    #[test]
    fn planted_pair_cell() {
        // sizes 10 and 20 sharing 4 authors -> p_hat = 1 - (0.6)^(1/20)
        let shared = ["S1, A.", "S2, B.", "S3, C.", "S4, D."];
        let mut a_names: Vec<String> = shared.iter().map(|s| s.to_string()).collect();
        a_names.extend((0..6).map(|i| format!("OnlyA{i}, X.")));
        let mut b_names: Vec<String> = shared.iter().map(|s| s.to_string()).collect();
        b_names.extend((0..16).map(|i| format!("OnlyB{i}, Y.")));
        let a = area("a", &a_names.iter().map(String::as_str).collect::<Vec<_>>());
        let b = area("b", &b_names.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!((a.size(), b.size()), (10, 20));

        let matrix = overlap_matrix(&[a, b]).unwrap();
        let cell = matrix.cell("a", "b").unwrap();
        assert_eq!(cell.k, 4);
        assert_eq!((cell.n, cell.m), (10, 20));
        assert!((cell.p_hat - 0.025217862029839777).abs() < 1e-15);
        assert!(!cell.undefined);
    }

    #[test]
    fn empty_list_pairs_are_flagged_not_fatal() {
        let lists = vec![area("a", &["A, B."]), AreaAuthorList::new("empty", Default::default()).unwrap()];
        let matrix = overlap_matrix(&lists).unwrap();
        let cell = matrix.cell("a", "empty").unwrap();
        assert!(cell.undefined);
        assert_eq!(cell.p_hat, 0.0);
    }

    #[test]
    fn duplicate_names_rejected() {
        let lists = vec![area("a", &["A, B."]), area("a", &["C, D."])];
        assert!(matches!(overlap_matrix(&lists), Err(Error::Config(_))));
    }

    #[test]
    fn symmetric_lookup() {
        let lists = vec![area("a", &["A, B.", "C, D."]), area("b", &["C, D."])];
        let matrix = overlap_matrix(&lists).unwrap();
        assert_eq!(matrix.cell("a", "b"), matrix.cell("b", "a"));
    }

    #[test]
    fn pairs_csv_round_trip() {
        let lists = vec![
            area("alpha", &["A, B.", "C, D.", "E, F."]),
            area("beta", &["C, D."]),
            area("gamma, with comma", &["E, F.", "G, H."]),
        ];
        let matrix = overlap_matrix(&lists).unwrap();
        let csv_text = matrix.to_pairs_csv();
        let back = OverlapMatrix::from_pairs_csv(csv_text.as_bytes()).unwrap();
        assert_eq!(matrix, back);
    }

    #[test]
    fn square_csv_shape() {
        let lists = vec![area("a", &["A, B."]), area("b", &["A, B."]), area("c", &["X, Y."])];
        let matrix = overlap_matrix(&lists).unwrap();
        let square = matrix.to_square_csv();
        let lines: Vec<&str> = square.trim_end().lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with(",a,b,c"));
    }
}
