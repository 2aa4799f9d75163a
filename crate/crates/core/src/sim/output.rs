//! CSV emission and parsing for experiment results.
//!
//! Floats are written with 17 significant digits, so parsing a file back
//! reproduces the in-memory values exactly.

use std::io::{Read, Write};

use serde::Deserialize;

use super::experiment::{AttackerRow, ExperimentResult, MatchRow};
use crate::error::Result;

pub const ATTACKER_HEADER: [&str; 7] = [
    "round",
    "attacker_current",
    "attacker_true",
    "opponent_id",
    "opponent_current",
    "winner",
    "transfer",
];
pub const SERIES_HEADER: [&str; 5] = [
    "round",
    "attacker_current",
    "attacker_true",
    "pool_mean",
    "pool_variance",
];
pub const MATCH_HEADER: [&str; 5] = ["round", "player_a", "player_b", "winner", "transfer"];

/// `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_attacker_log<W: Write>(out: W, rows: &[AttackerRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ATTACKER_HEADER)?;
    for r in rows {
        w.write_record([
            r.round.to_string(),
            fmt_f64(r.attacker_current),
            fmt_f64(r.attacker_true),
            opt(r.opponent_id),
            r.opponent_current.map(fmt_f64).unwrap_or_default(),
            opt(r.winner),
            fmt_f64(r.transfer),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_attacker_log<R: Read>(input: R) -> Result<Vec<AttackerRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in rdr.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

pub fn write_series<W: Write>(out: W, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_HEADER)?;
    for i in 0..result.attacker_current.len() {
        w.write_record([
            i.to_string(),
            fmt_f64(result.attacker_current[i]),
            fmt_f64(result.attacker_true[i]),
            fmt_f64(result.pool_mean[i]),
            fmt_f64(result.pool_variance[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct SeriesRow {
    pub round: usize,
    pub attacker_current: f64,
    pub attacker_true: f64,
    pub pool_mean: f64,
    pub pool_variance: f64,
}

pub fn read_series<R: Read>(input: R) -> Result<Vec<SeriesRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in rdr.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

pub fn write_matches<W: Write>(out: W, rows: &[MatchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MATCH_HEADER)?;
    for r in rows {
        w.write_record([
            r.round.to_string(),
            r.player_a.to_string(),
            r.player_b.to_string(),
            r.winner.to_string(),
            fmt_f64(r.transfer),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matches<R: Read>(input: R) -> Result<Vec<MatchRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in rdr.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}
