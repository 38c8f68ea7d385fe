//! Text formats: edge lists, MatrixMarket patterns, feature and label CSVs.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, SparseGraph};
use crate::tensor::DenseMatrix;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("malformed node index `{tok}`")))
}

/// Parses a whitespace-separated `i j` edge list.
///
/// `#` lines are comments. The node count comes from `n`, else from a header
/// line `n=<int>` preceding the first edge, else from the largest index.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<SparseGraph> {
    let mut n = n;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(v) = line.strip_prefix("n=") {
            if !edges.is_empty() {
                return Err(parse_err(line_no, "`n=` header must precede the edges"));
            }
            let v = parse_index(v.trim(), line_no)?;
            match n {
                Some(existing) if existing != v => {
                    return Err(parse_err(line_no, format!("header n={v} conflicts with n={existing}")))
                }
                _ => n = Some(v),
            }
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(a), Some(b), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(parse_err(line_no, format!("expected `i j`, got `{line}`")));
        };
        let (i, j) = (parse_index(a, line_no)?, parse_index(b, line_no)?);
        if let Some(count) = n {
            if i >= count || j >= count {
                return Err(parse_err(line_no, format!("node index out of range 0..{count}")));
            }
        }
        edges.push((i, j));
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0));
    SparseGraph::from_edges(n, edges)
}

/// Parses a MatrixMarket coordinate pattern file (1-based indices).
pub fn parse_matrix_market(text: &str) -> Result<SparseGraph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format("empty MatrixMarket file".into()))?;
    let h: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if h.len() < 4 || h[0] != "%%matrixmarket" || h[1] != "matrix" || h[2] != "coordinate" {
        return Err(parse_err(1, "expected `%%MatrixMarket matrix coordinate ...` header"));
    }
    let mut size: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if toks.len() != 3 {
                    return Err(parse_err(line_no, "expected `rows cols entries` size line"));
                }
                let r = parse_index(toks[0], line_no)?;
                let c = parse_index(toks[1], line_no)?;
                if r != c {
                    return Err(parse_err(line_no, format!("adjacency must be square, got {r}x{c}")));
                }
                size = Some(r);
            }
            Some(n) => {
                if toks.len() < 2 {
                    return Err(parse_err(line_no, format!("expected `i j`, got `{line}`")));
                }
                let i = parse_index(toks[0], line_no)?;
                let j = parse_index(toks[1], line_no)?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(line_no, format!("index out of range 1..={n}")));
                }
                edges.push((i - 1, j - 1));
            }
        }
    }
    let n = size.ok_or_else(|| Error::Format("MatrixMarket file has no size line".into()))?;
    SparseGraph::from_edges(n, edges)
}

/// Reads either format, picking MatrixMarket when the banner is present.
pub fn read_graph(path: &Path, n: Option<usize>) -> Result<SparseGraph> {
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(&text)
    } else {
        parse_edge_list(&text, n)
    }
}

/// Parses a headerless, rectangular numeric CSV.
pub fn load_features_csv(text: &str) -> Result<FeatureMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(col, cell)| {
                let cell = cell.trim();
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(parse_err(line_no, format!("column {}: non-numeric cell `{cell}`", col + 1))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Format(format!(
                    "ragged rows: line {line_no} has {} columns, expected {}",
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("feature CSV has no rows".into()));
    }
    FeatureMatrix::new(DenseMatrix::from_rows(&rows)?)
}

/// One `0`/`1` per line.
pub fn load_labels(text: &str) -> Result<Vec<bool>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(idx, l)| match l.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(parse_err(idx + 1, format!("label must be 0 or 1, got `{other}`"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph() {
        let g = parse_edge_list("0 1\n1 2", Some(3)).unwrap();
        assert_eq!(g.degrees(), vec![1, 2, 1]);
    }

    #[test]
    fn no_edges() {
        let g = parse_edge_list("", Some(2)).unwrap();
        assert_eq!(g.row_offsets(), &[0, 0, 0]);
    }

    #[test]
    fn duplicate_and_reverse_edges_collapse() {
        let g = parse_edge_list("0 1\n1 0\n0 1", Some(2)).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.col_indices(), &[1, 0]);
    }

    #[test]
    fn header_and_comments() {
        let g = parse_edge_list("# triangle\nn=3\n0 1\n1 2\n# c\n2 0\n", None).unwrap();
        assert_eq!(g.degrees(), vec![2, 2, 2]);
        let inferred = parse_edge_list("0 1\n3 1", None).unwrap();
        assert_eq!(inferred.n(), 4);
        assert_eq!(parse_edge_list("", None).unwrap().n(), 0);
        assert!(matches!(parse_edge_list("0 1\nn=3\n", None), Err(Error::Parse { line: 2, .. })));
        assert!(parse_edge_list("n=3\n0 1", Some(4)).is_err());
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_edge_list("0 1\n1 5\n", Some(3)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_edge_list("0 1\n\nx 1\n", Some(3)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(parse_edge_list("0 1 2", Some(3)).is_err());
        assert!(parse_edge_list("-1 2", Some(3)).is_err());
    }

    #[test]
    fn matrix_market_one_based() {
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n% c\n3 3 2\n2 1\n3 2\n";
        let g = parse_matrix_market(text).unwrap();
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        assert!(parse_matrix_market("%%MatrixMarket matrix coordinate pattern symmetric\n3 3 1\n0 1\n").is_err());
        assert!(parse_matrix_market("0 1\n").is_err());
    }

    #[test]
    fn features_csv() {
        let x = load_features_csv("1,0\n0,1").unwrap();
        assert_eq!((x.n(), x.d()), (2, 2));
        assert_eq!(x.as_dense(), &DenseMatrix::identity(2));
        let x = load_features_csv("3.5").unwrap();
        assert_eq!(x.row(0), &[3.5]);
        assert!(matches!(load_features_csv("1,2\n3"), Err(Error::Format(_))));
        let err = load_features_csv("1,2\n3,abc").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(err.to_string().contains("column 2"));
        assert!(load_features_csv("1,NaN").is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(load_labels("0\n1\n1\n").unwrap(), vec![false, true, true]);
        assert!(load_labels("0\n2\n").is_err());
    }
}
