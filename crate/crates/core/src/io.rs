//! Plain-text input formats. `#` starts a comment; blank lines are skipped.
//!
//! | input | format |
//! |-------|--------|
//! | [`ProbVec`] | one probability per line, or comma-separated on one line |
//! | [`TimeSeries`] | one real per line, or CSV with a selected column |
//! | [`SymbolSeq`] | one integer per line |
//! | matrix | whitespace-separated rows, or inline `a,b;c,d` |
//! | [`MomentSpec`] | support row, one row per feature, target row |

use std::str::FromStr;

use crate::error::{validation, Error, Result};
use crate::maxent::MomentSpec;
use crate::prob::ProbVec;
use crate::series::TimeSeries;
use crate::symbolic::SymbolSeq;

/// Non-empty content lines with their 1-based line numbers, comments removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_token<T: FromStr>(line: usize, token: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    token.trim().parse::<T>().map_err(|e| Error::Parse {
        line,
        message: format!("{token:?}: {e}"),
    })
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
}

pub fn parse_prob_vec(text: &str) -> Result<ProbVec> {
    let mut probs = Vec::new();
    for (line, content) in content_lines(text) {
        for t in tokens(content) {
            probs.push(parse_token::<f64>(line, t)?);
        }
    }
    ProbVec::new(probs)
}

/// Which CSV column holds the series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_string()),
        })
    }
}

/// Reads a series. Without a column every line holds one value; with one,
/// lines are comma-separated and a non-numeric first line is a header.
pub fn parse_series(text: &str, column: Option<&Column>) -> Result<TimeSeries> {
    let Some(column) = column else {
        let values = content_lines(text)
            .map(|(line, content)| parse_token::<f64>(line, content))
            .collect::<Result<Vec<_>>>()?;
        return TimeSeries::new(values);
    };
    let mut lines = content_lines(text).peekable();
    let mut index = match column {
        Column::Index(i) => Some(*i),
        Column::Name(_) => None,
    };
    if let Some(&(line, first)) = lines.peek() {
        let fields: Vec<&str> = first.split(',').map(str::trim).collect();
        let header = fields.iter().any(|f| f.parse::<f64>().is_err());
        if header {
            if let Column::Name(name) = column {
                index =
                    Some(
                        fields
                            .iter()
                            .position(|f| f == name)
                            .ok_or_else(|| Error::Parse {
                                line,
                                message: format!("no column named {name:?}"),
                            })?,
                    );
            }
            lines.next();
        } else if index.is_none() {
            return Err(Error::Parse {
                line,
                message: "column selected by name but the file has no header".into(),
            });
        }
    }
    let index = index.ok_or_else(|| validation("series file is empty"))?;
    let values = lines
        .map(|(line, content)| {
            let field = content.split(',').nth(index).ok_or_else(|| Error::Parse {
                line,
                message: format!("no column {index}"),
            })?;
            parse_token::<f64>(line, field)
        })
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(values)
}

/// Symbols, one per line; the alphabet is the smallest that contains them
/// unless given.
pub fn parse_symbols(text: &str, alphabet: Option<usize>) -> Result<SymbolSeq> {
    let mut symbols = Vec::new();
    for (line, content) in content_lines(text) {
        for t in tokens(content) {
            symbols.push(parse_token::<usize>(line, t)?);
        }
    }
    match alphabet {
        Some(k) => SymbolSeq::new(symbols, k),
        None => SymbolSeq::from_symbols(symbols),
    }
}

/// A matrix from whitespace-separated rows, or from one inline
/// `r1c1,r1c2;r2c1,…` line.
pub fn parse_matrix<T: FromStr>(text: &str) -> Result<Vec<Vec<T>>>
where
    T::Err: std::fmt::Display,
{
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    let rows: Vec<Vec<T>> = if lines.len() == 1 && lines[0].1.contains(';') {
        let (line, content) = lines[0];
        content
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|t| parse_token(line, t))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<_>>()?
    } else {
        lines
            .iter()
            .map(|&(line, content)| {
                tokens(content)
                    .map(|t| parse_token(line, t))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<_>>()?
    };
    if rows.is_empty() {
        return Err(validation("matrix is empty"));
    }
    let width = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(validation(format!(
            "matrix row {i} has {} entries, expected {width}",
            rows[i].len()
        )));
    }
    Ok(rows)
}

/// Support row, then one row of feature values per constraint, then the row
/// of targets. A file with only the support row has no constraints.
pub fn parse_moment_spec(text: &str) -> Result<MomentSpec> {
    let rows: Vec<Vec<f64>> = content_lines(text)
        .map(|(line, content)| {
            tokens(content)
                .map(|t| parse_token(line, t))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    match rows.len() {
        0 => Err(validation("moment specification is empty")),
        1 => MomentSpec::new(rows[0].clone(), vec![], vec![]),
        2 => Err(validation("a target row needs at least one feature row")),
        n => MomentSpec::new(
            rows[0].clone(),
            rows[1..n - 1].to_vec(),
            rows[n - 1].clone(),
        ),
    }
}
