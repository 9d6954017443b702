//! Matrix input (CSV, JSON) and result output (JSON, TSV).
//!
//! CSV: `n` lines of `n` comma-separated decimals, no header. JSON:
//! `{"n": <int>, "rows": [[...], ...]}`. Negative or non-finite entries are
//! rejected with their position.
//!
//! Floats are written with 17 significant digits, enough to round-trip any
//! `f64` exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::solver::SolveResult;
use crate::stochastic::certify;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

impl FromStr for MatrixFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(MatrixFormat::Csv),
            "json" => Ok(MatrixFormat::Json),
            other => Err(format!("unknown matrix format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultFormat {
    Json,
    Tsv,
}

impl FromStr for ResultFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(ResultFormat::Json),
            "tsv" => Ok(ResultFormat::Tsv),
            other => Err(format!("unknown output format `{other}`")),
        }
    }
}

pub fn parse_matrix(text: &str, format: MatrixFormat) -> Result<Matrix> {
    match format {
        MatrixFormat::Csv => parse_csv(text),
        MatrixFormat::Json => parse_json(text),
    }
}

fn check_entry(value: f64, line: usize, column: usize) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::Validation {
            line,
            column,
            message: format!("entry {value} is not finite"),
        });
    }
    if value < 0.0 {
        return Err(Error::Validation {
            line,
            column,
            message: format!("entry {value} is negative"),
        });
    }
    Ok(value)
}

fn parse_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (c, field) in raw.split(',').enumerate() {
            let column = c + 1;
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                column,
                message: format!("`{field}` is not a number"),
            })?;
            row.push(check_entry(value, line, column)?);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line,
                    column: row.len().min(first.len()) + 1,
                    message: format!(
                        "ragged row {}: {} entries, expected {}",
                        rows.len() + 1,
                        row.len(),
                        first.len()
                    ),
                });
            }
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty matrix".into(),
        });
    }
    if rows[0].len() != n {
        return Err(Error::Parse {
            line: n,
            column: 1,
            message: format!("matrix is {n}x{}, expected square", rows[0].len()),
        });
    }
    Matrix::from_rows(&rows)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonMatrix {
    n: usize,
    rows: Vec<Vec<f64>>,
}

fn parse_json(text: &str) -> Result<Matrix> {
    let doc: JsonMatrix = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.n == 0 {
        return Err(Error::Validation {
            line: 1,
            column: 1,
            message: "n must be at least 1".into(),
        });
    }
    if doc.rows.len() != doc.n {
        return Err(Error::Validation {
            line: 1,
            column: 1,
            message: format!("n = {} but {} rows given", doc.n, doc.rows.len()),
        });
    }
    for (i, row) in doc.rows.iter().enumerate() {
        if row.len() != doc.n {
            return Err(Error::Validation {
                line: i + 1,
                column: 1,
                message: format!("ragged row {}: {} entries, expected {}", i + 1, row.len(), doc.n),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            check_entry(v, i + 1, j + 1)?;
        }
    }
    Matrix::from_rows(&doc.rows)
}

/// Formats a float with 17 significant digits as a JSON-compatible number.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{v:.16e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("scientific format has an exponent");
    if (-5..16).contains(&exp) {
        let decimals = (16 - exp) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

pub fn emit_matrix(m: &Matrix, format: MatrixFormat) -> String {
    let rows = m.rows().map(|r| r.iter().map(|&v| fmt_float(v)).collect::<Vec<_>>());
    match format {
        MatrixFormat::Csv => {
            let mut out = String::new();
            for r in rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
            out
        }
        MatrixFormat::Json => {
            let body: Vec<String> = rows.map(|r| format!("[{}]", r.join(","))).collect();
            format!("{{\"n\":{},\"rows\":[{}]}}\n", m.n(), body.join(","))
        }
    }
}

fn json_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|&v| fmt_float(v)).collect();
    format!("[{}]", items.join(","))
}

/// Serializes a result; `m` is needed for the row sums of the certificate.
pub fn emit_result(m: &Matrix, result: &SolveResult, format: ResultFormat) -> Result<String> {
    match format {
        ResultFormat::Json => emit_json(m, result),
        ResultFormat::Tsv => {
            let mut out = String::new();
            for &v in result.x.as_slice() {
                writeln!(out, "{}", fmt_float(v)).expect("write to String");
            }
            writeln!(out, "residual\t{}", fmt_float(result.residual)).expect("write to String");
            Ok(out)
        }
    }
}

fn emit_json(m: &Matrix, result: &SolveResult) -> Result<String> {
    let cert = certify(m, &result.x)?;
    let c = &result.classification;
    let constant = c
        .contraction_constant
        .map_or_else(|| "null".to_string(), fmt_float);
    let mut out = String::new();
    out.push('{');
    write!(out, "\"x\":{},", json_array(result.x.as_slice())).unwrap();
    write!(out, "\"residual\":{},", fmt_float(result.residual)).unwrap();
    write!(out, "\"iterations\":{},", result.iterations).unwrap();
    write!(out, "\"method\":\"{}\",", result.method_used).unwrap();
    write!(out, "\"converged\":{},", result.converged).unwrap();
    write!(
        out,
        "\"classification\":{{\"nonnegative\":{},\"positive_diagonal\":{},\"primitive\":{},\
         \"contraction_condition\":{},\"contraction_constant\":{},\"has_zero_row\":{}}},",
        c.nonnegative,
        c.positive_diagonal,
        c.primitive,
        c.contraction_condition,
        constant,
        c.has_zero_row
    )
    .unwrap();
    write!(out, "\"row_sums\":{}", json_array(&cert.row_sums)).unwrap();
    if let Some(trace) = &result.trace {
        write!(out, ",\"trace\":{}", json_array(trace)).unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve, SolverConfig};

    #[test]
    fn csv_examples() {
        let m = parse_matrix("1,0,0\n1,1,0\n1,1,1\n", MatrixFormat::Csv).unwrap();
        assert_eq!(
            m,
            Matrix::from_rows(&[[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 1.0, 1.0]]).unwrap()
        );
        let m = parse_matrix("1\n", MatrixFormat::Csv).unwrap();
        assert_eq!(m, Matrix::identity(1));
        match parse_matrix("1,2\n3\n", MatrixFormat::Csv) {
            Err(Error::Parse { line: 2, message, .. }) => assert!(message.contains("row 2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_tolerates_whitespace_and_crlf() {
        let m = parse_matrix(" 1 , 2\r\n3,4\r\n\n", MatrixFormat::Csv).unwrap();
        assert_eq!(m.entries(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn csv_rejections() {
        assert!(matches!(
            parse_matrix("1,-2\n3,4\n", MatrixFormat::Csv),
            Err(Error::Validation { line: 1, column: 2, .. })
        ));
        assert!(matches!(
            parse_matrix("1,2\nNaN,4\n", MatrixFormat::Csv),
            Err(Error::Validation { line: 2, column: 1, .. })
        ));
        assert!(matches!(
            parse_matrix("1,2\n3,x\n", MatrixFormat::Csv),
            Err(Error::Parse { line: 2, column: 2, .. })
        ));
        assert!(matches!(
            parse_matrix("1,2\n", MatrixFormat::Csv),
            Err(Error::Parse { .. })
        ));
        assert!(parse_matrix("", MatrixFormat::Csv).is_err());
    }

    #[test]
    fn json_examples() {
        let m = parse_matrix(r#"{"n": 2, "rows": [[1, 3], [5, 2]]}"#, MatrixFormat::Json).unwrap();
        assert_eq!(m.entries(), &[1.0, 3.0, 5.0, 2.0]);
        assert!(matches!(
            parse_matrix(r#"{"n": 2, "rows": [[1, 3], [5]]}"#, MatrixFormat::Json),
            Err(Error::Validation { line: 2, .. })
        ));
        assert!(matches!(
            parse_matrix(r#"{"n": 2, "rows": [[1, 3], [5, -2]]}"#, MatrixFormat::Json),
            Err(Error::Validation { line: 2, column: 2, .. })
        ));
        assert!(matches!(
            parse_matrix(r#"{"n": 2, "rows": [[1, 3]"#, MatrixFormat::Json),
            Err(Error::Parse { .. })
        ));
        assert!(parse_matrix(r#"{"n": 3, "rows": [[1]]}"#, MatrixFormat::Json).is_err());
    }

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000");
        assert_eq!(fmt_float(0.0), "0.0");
        assert_eq!(fmt_float(-2.5), "-2.5000000000000000");
        assert_eq!(fmt_float(0.5f64.powi(70)), "8.4703294725430034e-22");
        assert_eq!(fmt_float(1e-5), "0.000010000000000000001");
        for v in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e300, 5e-324, 123456789.123] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_result_schema() {
        let m = Matrix::identity(2);
        let res = solve(&m, &SolverConfig::default()).unwrap();
        let text = emit_result(&m, &res, ResultFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        let mut want = vec![
            "x",
            "residual",
            "iterations",
            "method",
            "converged",
            "classification",
            "row_sums",
        ];
        want.sort();
        let mut got = keys.clone();
        got.sort();
        assert_eq!(got, want);
        assert_eq!(v["x"], serde_json::json!([1.0, 1.0]));
        assert_eq!(v["residual"], 0.0);
        assert_eq!(v["converged"], true);
        assert_eq!(v["classification"]["contraction_constant"], 0.5);
        assert_eq!(v["row_sums"], serde_json::json!([1.0, 1.0]));
    }

    #[test]
    fn tsv_result() {
        let m = Matrix::identity(2);
        let res = solve(&m, &SolverConfig::default()).unwrap();
        let text = emit_result(&m, &res, ResultFormat::Tsv).unwrap();
        assert_eq!(
            text,
            "1.0000000000000000\n1.0000000000000000\nresidual\t0.0\n"
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix() -> impl Strategy<Value = Matrix> {
            (1usize..6).prop_flat_map(|n| {
                prop::collection::vec(
                    prop_oneof![Just(0.0), 0.0f64..1.0, 1e-300f64..1e300, any::<u32>().prop_map(f64::from)],
                    n * n,
                )
                .prop_map(move |e| Matrix::new(n, e).unwrap())
            })
        }

        proptest! {
            #[test]
            fn matrix_round_trip(m in matrix()) {
                for format in [MatrixFormat::Csv, MatrixFormat::Json] {
                    let back = parse_matrix(&emit_matrix(&m, format), format).unwrap();
                    prop_assert_eq!(&back, &m);
                }
            }
        }
    }
}
