//! CSV schemas for series and fitted trends.
//!
//! Series: `timestamp,value,camera_id,metric,inlier`
//! Trend: `camera_id,metric,t0,degree,r_squared,inlier_count,outlier_count,t_start_days,t_end_days,coefficients`
//! where `coefficients` are `;`-separated ascending powers of days since `t0`.

use std::io::{Read, Write};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

pub const SERIES_HEADER: [&str; 5] = ["timestamp", "value", "camera_id", "metric", "inlier"];
pub const TREND_HEADER: [&str; 10] = [
    "camera_id",
    "metric",
    "t0",
    "degree",
    "r_squared",
    "inlier_count",
    "outlier_count",
    "t_start_days",
    "t_end_days",
    "coefficients",
];

fn ser_ts<S: Serializer>(t: &DateTime<Utc>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Secs, true))
}

fn de_ts<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DateTime<Utc>, D::Error> {
    let s = String::deserialize(d)?;
    DateTime::parse_from_rfc3339(&s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| serde::de::Error::custom(format!("bad timestamp `{s}`: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRow {
    #[serde(serialize_with = "ser_ts", deserialize_with = "de_ts")]
    pub timestamp: DateTime<Utc>,
    pub value: f64,
    pub camera_id: String,
    pub metric: String,
    /// Empty when no outlier rejection ran.
    pub inlier: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrendRow {
    pub camera_id: String,
    pub metric: String,
    #[serde(serialize_with = "ser_ts", deserialize_with = "de_ts")]
    pub t0: DateTime<Utc>,
    pub degree: usize,
    pub r_squared: f64,
    pub inlier_count: usize,
    pub outlier_count: usize,
    pub t_start_days: f64,
    pub t_end_days: f64,
    #[serde(serialize_with = "ser_coefs", deserialize_with = "de_coefs")]
    pub coefficients: Vec<f64>,
}

fn ser_coefs<S: Serializer>(c: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let joined: Vec<String> = c.iter().map(|v| v.to_string()).collect();
    s.serialize_str(&joined.join(";"))
}

fn de_coefs<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    let s = String::deserialize(d)?;
    s.split(';')
        .map(|v| v.trim().parse::<f64>().map_err(serde::de::Error::custom))
        .collect()
}

fn write_rows<T: Serialize>(out: impl Write, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub(crate) fn read_rows<T: for<'de> Deserialize<'de>>(input: impl Read, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if let Some(bad) = found.iter().find(|h| !header.contains(&h.as_str())) {
        return Err(Error::Record {
            line: 1,
            field: bad.clone(),
            message: "unknown column".into(),
        });
    }
    if let Some(missing) = header.iter().find(|h| !found.iter().any(|f| f == *h)) {
        return Err(Error::Record {
            line: 1,
            field: (*missing).to_owned(),
            message: "missing column".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize().enumerate() {
        rows.push(rec.map_err(|e: csv::Error| Error::Record {
            line: i + 2,
            field: String::new(),
            message: e.to_string(),
        })?);
    }
    Ok(rows)
}

pub fn write_series_csv(out: impl Write, rows: &[SeriesRow]) -> Result<()> {
    write_rows(out, &SERIES_HEADER, rows)
}

pub fn read_series_csv(input: impl Read) -> Result<Vec<SeriesRow>> {
    read_rows(input, &SERIES_HEADER)
}

pub fn write_trend_csv(out: impl Write, rows: &[TrendRow]) -> Result<()> {
    write_rows(out, &TREND_HEADER, rows)
}

pub fn read_trend_csv(input: impl Read) -> Result<Vec<TrendRow>> {
    read_rows(input, &TREND_HEADER)
}
