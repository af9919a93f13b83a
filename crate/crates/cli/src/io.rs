//! Amplitude dumps and marked-set files.

use std::io::{BufRead, Write};

use qnr_core::statevector::StateVector;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One row of an amplitude dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRow {
    pub index: usize,
    pub real: f64,
    pub imag: f64,
    pub prob: f64,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn amplitude_rows(state: &StateVector) -> Vec<AmplitudeRow> {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(index, a)| AmplitudeRow {
            index,
            real: a.re,
            imag: a.im,
            prob: a.norm_sqr(),
        })
        .collect()
}

/// Writes `index,real,imag,prob` rows for every basis state.
pub fn write_amplitudes_csv<W: Write>(state: &StateVector, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "real", "imag", "prob"])?;
    for row in amplitude_rows(state) {
        w.write_record([
            row.index.to_string(),
            fmt_f64(row.real),
            fmt_f64(row.imag),
            fmt_f64(row.prob),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_amplitudes_csv<R: std::io::Read>(input: R) -> Result<Vec<AmplitudeRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Newline-separated basis indices. Blank lines and `#` comments are skipped.
pub fn read_marked<R: BufRead>(input: R) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let index = text.parse().map_err(|_| {
            CliError::InvalidInput(format!(
                "line {}: `{text}` is not a basis index",
                lineno + 1
            ))
        })?;
        out.push(index);
    }
    Ok(out)
}
