//! File formats: learning sets as CSV, models as JSON.
//!
//! CSV header is `id,<criterion names...>,class` with 1-based classes and
//! raw (as-measured) values. Model JSON carries `criteria`, `classes`,
//! `frontiers` (raw values, `null` for a threshold above every value) and
//! either `sufficient` (minimal coalitions as bit masks) or `weights` plus
//! `lambda`.

use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Alternative, Coalition, CriteriaSpec, Criterion, Direction, Frontier, LearningSet, MrSortModel, Threshold,
    UncsModel, UpSet, Value,
};

/// Parses a decimal, accepting scientific notation.
pub fn parse_value(s: &str) -> Result<Value> {
    let s = s.trim();
    let parsed = if s.contains(['e', 'E']) {
        Decimal::from_scientific(s)
    } else {
        Decimal::from_str(s)
    };
    parsed.map_err(|_| Error::Parse(format!("`{s}` is not a decimal number")))
}

fn parse_header(headers: &csv::StringRecord) -> Result<Vec<String>> {
    let cols: Vec<&str> = headers.iter().map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "id" || cols[cols.len() - 1] != "class" {
        return Err(Error::Parse("CSV header must be `id,<criteria...>,class`".into()));
    }
    Ok(cols[1..cols.len() - 1].iter().map(|s| s.to_string()).collect())
}

fn parse_rows(text: &str, criteria: &CriteriaSpec) -> Result<Vec<Alternative>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let n = criteria.len();
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        if record.len() != n + 2 {
            return Err(Error::Parse(format!("line {line}: expected {} fields, got {}", n + 2, record.len())));
        }
        let raw = (1..=n)
            .map(|j| parse_value(&record[j]).map_err(|e| Error::Parse(format!("line {line}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let class: usize = record[n + 1]
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}: bad class `{}`", &record[n + 1])))?;
        out.push(Alternative {
            id: record[0].to_string(),
            profile: criteria.profile_from_raw(&raw)?,
            class,
        });
    }
    Ok(out)
}

/// Reads a learning set, taking criterion names from the header. Columns
/// listed in `minimize` are minimized, the rest maximized. Without
/// `classes`, the largest observed class (at least 2) is used.
pub fn read_learning_set(text: &str, minimize: &[&str], classes: Option<usize>) -> Result<LearningSet> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let names = parse_header(reader.headers()?)?;
    for m in minimize {
        if !names.iter().any(|n| n == m) {
            return Err(Error::Input(format!("no criterion named `{m}` to minimize")));
        }
    }
    let criteria = CriteriaSpec::new(
        names
            .into_iter()
            .map(|n| {
                let dir = if minimize.contains(&n.as_str()) { Direction::Minimize } else { Direction::Maximize };
                Criterion::new(n, dir)
            })
            .collect(),
    )?;
    let alternatives = parse_rows(text, &criteria)?;
    let classes = classes.unwrap_or_else(|| alternatives.iter().map(|a| a.class).max().unwrap_or(2).max(2));
    LearningSet::new(criteria, classes, alternatives)
}

/// Reads a learning set whose header must list exactly the given criteria.
pub fn read_learning_set_for(text: &str, criteria: &CriteriaSpec, classes: usize) -> Result<LearningSet> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let names = parse_header(reader.headers()?)?;
    if !names.iter().map(String::as_str).eq(criteria.names()) {
        return Err(Error::Input(format!(
            "CSV criteria [{}] do not match model criteria [{}]",
            names.join(","),
            criteria.names().collect::<Vec<_>>().join(",")
        )));
    }
    LearningSet::new(criteria.clone(), classes, parse_rows(text, criteria)?)
}

pub fn write_learning_set(data: &LearningSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend(data.criteria().names().map(str::to_owned));
    header.push("class".into());
    w.write_record(&header).expect("in-memory write");
    for a in data.alternatives() {
        let mut rec = vec![a.id.clone()];
        rec.extend(data.criteria().raw_values(&a.profile).iter().map(|v| v.normalize().to_string()));
        rec.push(a.class.to_string());
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("CSV is UTF-8")
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(transparent)]
struct Num(#[serde(with = "rust_decimal::serde::arbitrary_precision")] Decimal);

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    criteria: Vec<Criterion>,
    classes: usize,
    frontiers: Vec<Vec<Option<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sufficient: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<Num>,
}

/// A model as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelFile {
    Uncs(UncsModel),
    MrSort(MrSortModel),
}

impl ModelFile {
    pub fn to_uncs(&self) -> UncsModel {
        match self {
            ModelFile::Uncs(m) => m.clone(),
            ModelFile::MrSort(m) => m.to_uncs(),
        }
    }

    pub fn criteria(&self) -> &CriteriaSpec {
        match self {
            ModelFile::Uncs(m) => m.criteria(),
            ModelFile::MrSort(m) => m.criteria(),
        }
    }

    pub fn classes(&self) -> usize {
        match self {
            ModelFile::Uncs(m) => m.classes(),
            ModelFile::MrSort(m) => m.classes(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            ModelFile::Uncs(m) => write_uncs_model(m),
            ModelFile::MrSort(m) => write_mrsort_model(m),
        }
    }
}

fn frontiers_to_raw(criteria: &CriteriaSpec, frontiers: &[Frontier]) -> Vec<Vec<Option<Num>>> {
    frontiers
        .iter()
        .map(|f| {
            f.thresholds()
                .iter()
                .enumerate()
                .map(|(i, t)| t.value().map(|v| Num(criteria.raw(i, v).normalize())))
                .collect()
        })
        .collect()
}

fn render(doc: &ModelDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("model serializes");
    s.push('\n');
    s
}

pub fn write_uncs_model(model: &UncsModel) -> String {
    render(&ModelDoc {
        criteria: model.criteria().criteria().to_vec(),
        classes: model.classes(),
        frontiers: frontiers_to_raw(model.criteria(), model.frontiers()),
        sufficient: Some(model.sufficient().minimal_members().iter().map(|c| c.0).collect()),
        weights: None,
        lambda: None,
    })
}

pub fn write_mrsort_model(model: &MrSortModel) -> String {
    render(&ModelDoc {
        criteria: model.criteria().criteria().to_vec(),
        classes: model.classes(),
        frontiers: frontiers_to_raw(model.criteria(), model.frontiers()),
        sufficient: None,
        weights: Some(model.weights().iter().map(|w| Num(w.normalize())).collect()),
        lambda: Some(Num(model.lambda().normalize())),
    })
}

pub fn read_model(text: &str) -> Result<ModelFile> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    let criteria = CriteriaSpec::new(doc.criteria)?;
    let n = criteria.len();
    let mut frontiers = Vec::with_capacity(doc.frontiers.len());
    for (h, raw) in doc.frontiers.iter().enumerate() {
        if raw.len() != n {
            return Err(Error::Model(format!("frontier {} has {} entries for {n} criteria", h + 1, raw.len())));
        }
        frontiers.push(Frontier::new(
            raw.iter()
                .enumerate()
                .map(|(i, v)| match v {
                    Some(Num(v)) => Threshold::At(criteria.orient(i, *v)),
                    None => Threshold::AboveAll,
                })
                .collect(),
        ));
    }
    match (doc.sufficient, doc.weights, doc.lambda) {
        (Some(masks), None, None) => {
            let mut gens = Vec::with_capacity(masks.len());
            for m in masks {
                if (m as u64) >> n != 0 {
                    return Err(Error::Model(format!("coalition mask {m} exceeds {n} criteria")));
                }
                gens.push(Coalition(m));
            }
            let upset = UpSet::generated_by(n, gens);
            Ok(ModelFile::Uncs(UncsModel::new(criteria, doc.classes, frontiers, upset)?))
        }
        (None, Some(w), Some(l)) => Ok(ModelFile::MrSort(MrSortModel::new(
            criteria,
            doc.classes,
            frontiers,
            w.into_iter().map(|n| n.0).collect(),
            l.0,
        )?)),
        _ => Err(Error::Model("a model needs either `sufficient` or both `weights` and `lambda`".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "id,cost,comfort,class\nx1,10,0.5,1\nx2,8,1.25,2\n";

    #[test]
    fn csv_round_trip() {
        let data = read_learning_set(CSV, &["cost"], None).unwrap();
        assert_eq!(data.classes(), 2);
        assert_eq!(data.criteria().direction(0), Direction::Minimize);
        assert_eq!(data.alternatives()[0].profile.values()[0], Decimal::from(-10));
        assert_eq!(write_learning_set(&data), CSV);
        let again = read_learning_set_for(CSV, data.criteria(), 2).unwrap();
        assert_eq!(again, data);
    }

    #[test]
    fn csv_errors() {
        assert!(read_learning_set("name,a,class\n", &[], None).is_err());
        assert!(read_learning_set(CSV, &["price"], None).is_err());
        assert!(read_learning_set("id,a,class\nx,abc,1\n", &[], None).is_err());
        assert!(read_learning_set("id,a,class\nx,1,3\n", &[], Some(2)).is_err());
        let other = CriteriaSpec::ascending(2).unwrap();
        assert!(read_learning_set_for(CSV, &other, 2).is_err());
    }

    #[test]
    fn scientific_values() {
        assert_eq!(parse_value("1.5e-3").unwrap(), "0.0015".parse::<Decimal>().unwrap());
    }

    #[test]
    fn model_json_round_trip() {
        let criteria = CriteriaSpec::new(vec![
            Criterion::new("cost", Direction::Minimize),
            Criterion::new("q", Direction::Maximize),
        ])
        .unwrap();
        let frontiers = vec![
            Frontier::new(vec![Threshold::At(Decimal::from(-20)), Threshold::At("0.5".parse().unwrap())]),
            Frontier::new(vec![Threshold::At(Decimal::from(-10)), Threshold::AboveAll]),
        ];
        let upset = UpSet::generated_by(2, [Coalition(1)]);
        let m = UncsModel::new(criteria.clone(), 3, frontiers.clone(), upset).unwrap();
        let json = write_uncs_model(&m);
        assert!(json.contains("null"));
        assert!(json.contains("20"));
        assert_eq!(read_model(&json).unwrap(), ModelFile::Uncs(m));

        let mr = MrSortModel::new(
            criteria,
            3,
            frontiers,
            vec!["0.25".parse().unwrap(), "0.75".parse().unwrap()],
            "0.6".parse().unwrap(),
        )
        .unwrap();
        let json = write_mrsort_model(&mr);
        assert!(json.contains("0.25"));
        assert_eq!(read_model(&json).unwrap(), ModelFile::MrSort(mr));
    }

    #[test]
    fn model_json_errors() {
        let base = r#"{"criteria":[{"name":"a","direction":"maximize"}],"classes":2,"frontiers":[[0.5]]"#;
        assert!(read_model(&format!("{base}}}")).is_err());
        assert!(read_model(&format!("{base},\"sufficient\":[2]}}")).is_err());
        assert!(read_model(&format!("{base},\"sufficient\":[1],\"lambda\":0.5}}")).is_err());
        assert!(read_model(&format!("{base},\"sufficient\":[1]}}")).is_ok());
        assert!(read_model(&format!("{base},\"weights\":[-1],\"lambda\":0.5}}")).is_err());
    }
}
