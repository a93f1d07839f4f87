//! Design files and report serialization.
//!
//! A design file is a JSON document
//!
//! ```json
//! {"kind": "exact", "v": 2, "d": 3, "m": [2, 2, 4],
//!  "allocation": [[1, 1, 2], [1, 1, 0], [0, 0, 2]]}
//! ```
//!
//! Approximate designs use `"kind": "approximate"`, omit `m`, and write
//! entries as `"p/q"` strings (exact) or JSON numbers (real). A file whose
//! entries are all strings or integers loads as a rational design; any
//! non-integral number makes it a real design.

use std::io::Write;

use serde_json::{json, Map, Value as Json};

use crate::criteria::CriterionValue;
use crate::design::{AnyDesign, ApproximateDesign, ExactDesign};
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar, Value};

pub fn design_to_json(design: &AnyDesign) -> Json {
    match design {
        AnyDesign::Exact(x) => json!({
            "kind": "exact",
            "v": x.v(),
            "d": x.d(),
            "m": x.block_sizes(),
            "allocation": x.rows(),
        }),
        AnyDesign::Rational(a) => approx_json(a),
        AnyDesign::Real(a) => approx_json(a),
    }
}

fn approx_json<T: Scalar>(a: &ApproximateDesign<T>) -> Json {
    let rows: Vec<Json> = (0..=a.v()).map(|i| Json::Array(a.row(i).iter().map(Scalar::to_json).collect())).collect();
    json!({ "kind": "approximate", "v": a.v(), "d": a.d(), "allocation": rows })
}

fn field<'a>(obj: &'a Map<String, Json>, key: &str) -> Result<&'a Json> {
    obj.get(key).ok_or_else(|| Error::Parse(format!("missing field `{key}`")))
}

fn as_count(x: &Json, what: &str) -> Result<u64> {
    x.as_u64().ok_or_else(|| Error::Parse(format!("{what} must be a nonnegative integer, got {x}")))
}

fn rows_of(x: &Json) -> Result<&Vec<Json>> {
    x.as_array().ok_or_else(|| Error::Parse("`allocation` must be an array of rows".into()))
}

pub fn design_from_json(doc: &Json) -> Result<AnyDesign> {
    let obj = doc.as_object().ok_or_else(|| Error::Parse("design must be a JSON object".into()))?;
    let kind = field(obj, "kind")?.as_str().ok_or_else(|| Error::Parse("`kind` must be a string".into()))?;
    let rows = rows_of(field(obj, "allocation")?)?;
    let v = as_count(field(obj, "v")?, "`v`")? as usize;
    let d = as_count(field(obj, "d")?, "`d`")? as usize;
    if rows.len() != v + 1 {
        return Err(Error::Parse(format!("expected {} allocation rows for v = {v}, found {}", v + 1, rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        let len = row.as_array().map(Vec::len);
        if len != Some(d) {
            return Err(Error::Parse(format!("allocation row {i} must have {d} entries")));
        }
    }
    let cells = || rows.iter().map(|r| r.as_array().expect("checked above"));
    match kind {
        "exact" => {
            let m = field(obj, "m")?
                .as_array()
                .ok_or_else(|| Error::Parse("`m` must be an array".into()))?
                .iter()
                .map(|x| as_count(x, "block size"))
                .collect::<Result<Vec<_>>>()?;
            let allocation = cells()
                .map(|r| r.iter().map(|x| as_count(x, "exact allocation entry")).collect())
                .collect::<Result<Vec<Vec<u64>>>>()?;
            Ok(ExactDesign::new(m, allocation)?.into())
        }
        "approximate" => {
            let real = cells().flatten().any(|x| x.is_number() && !(x.is_i64() || x.is_u64()));
            if real {
                let allocation = cells()
                    .map(|r| r.iter().map(real_entry).collect())
                    .collect::<Result<Vec<Vec<f64>>>>()?;
                Ok(ApproximateDesign::new(allocation)?.into())
            } else {
                let allocation = cells()
                    .map(|r| r.iter().map(rational_entry).collect())
                    .collect::<Result<Vec<Vec<Rational>>>>()?;
                Ok(ApproximateDesign::new(allocation)?.into())
            }
        }
        other => Err(Error::Parse(format!("unknown design kind `{other}`"))),
    }
}

fn rational_entry(x: &Json) -> Result<Rational> {
    match x {
        Json::String(s) => parse_rational(s),
        Json::Number(n) => parse_rational(&n.to_string()),
        _ => Err(Error::Parse(format!("allocation entry {x} is not a number"))),
    }
}

fn real_entry(x: &Json) -> Result<f64> {
    match x {
        Json::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}"))),
        Json::String(s) => Ok(parse_rational(s)?.to_f64()),
        _ => Err(Error::Parse(format!("allocation entry {x} is not a number"))),
    }
}

pub fn read_design(path: &std::path::Path) -> Result<AnyDesign> {
    let text = std::fs::read_to_string(path)?;
    design_from_json(&serde_json::from_str(&text)?)
}

/// One row per treatment under the header `treatment,block_1,…,block_d`.
pub fn write_design_csv<W: Write>(design: &AnyDesign, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["treatment".to_string()];
    header.extend((1..=design.d()).map(|k| format!("block_{k}")));
    w.write_record(&header)?;
    for i in 0..=design.v() {
        let mut record = vec![i.to_string()];
        match design {
            AnyDesign::Exact(x) => record.extend(x.row(i).iter().map(u64::to_string)),
            AnyDesign::Rational(a) => record.extend(a.row(i).iter().map(format_rational)),
            AnyDesign::Real(a) => record.extend(a.row(i).iter().map(f64::to_string)),
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn design_to_csv(design: &AnyDesign) -> Result<String> {
    let mut buf = Vec::new();
    write_design_csv(design, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// `{"criterion", "value", "feasible", "n_lambda_min"}` where the last field
/// is the smallest eigenvalue of `N`.
pub fn evaluation_json(value: &CriterionValue, lambda_min: &Value) -> Json {
    json!({
        "criterion": value.criterion.name(),
        "value": value.value.to_json(),
        "feasible": value.feasible,
        "n_lambda_min": lambda_min.to_json(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn unequal_design() -> AnyDesign {
        ExactDesign::new(vec![2, 2, 4], vec![vec![1, 1, 2], vec![1, 0, 1], vec![0, 1, 1]]).unwrap().into()
    }

    #[test]
    fn exact_round_trip() {
        let d = unequal_design();
        let back = design_from_json(&design_to_json(&d)).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rational_round_trip_keeps_exact_entries() {
        let a = ApproximateDesign::new(vec![vec![rat(1, 4), rat(1, 4)], vec![rat(1, 4), rat(0, 1)], vec![rat(0, 1), rat(1, 4)]]).unwrap();
        let d = AnyDesign::from(a);
        let doc = design_to_json(&d);
        assert_eq!(doc["allocation"][0][0], "1/4");
        assert_eq!(design_from_json(&doc).unwrap(), d);
    }

    #[test]
    fn floats_load_as_real_design() {
        let doc = json!({"kind": "approximate", "v": 1, "d": 1, "allocation": [[0.5], [0.5]]});
        assert!(matches!(design_from_json(&doc).unwrap(), AnyDesign::Real(_)));
        let doc = json!({"kind": "approximate", "v": 1, "d": 1, "allocation": [["1/2"], ["1/2"]]});
        assert!(matches!(design_from_json(&doc).unwrap(), AnyDesign::Rational(_)));
    }

    #[test]
    fn malformed_documents_are_rejected() {
        for doc in [
            json!({"kind": "exact", "v": 1, "d": 1, "allocation": [[1], [1]]}),
            json!({"kind": "exact", "v": 1, "d": 1, "m": [3], "allocation": [[1], [1]]}),
            json!({"kind": "exact", "v": 2, "d": 1, "m": [2], "allocation": [[1], [1]]}),
            json!({"kind": "weird", "v": 1, "d": 1, "allocation": [[1], [1]]}),
            json!({"kind": "approximate", "v": 1, "d": 1, "allocation": [["1/0"], ["1"]]}),
            json!([1, 2]),
        ] {
            assert!(design_from_json(&doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn csv_layout() {
        let text = design_to_csv(&unequal_design()).unwrap();
        assert_eq!(text, "treatment,block_1,block_2,block_3\n0,1,1,2\n1,1,0,1\n2,0,1,1\n");
    }
}
