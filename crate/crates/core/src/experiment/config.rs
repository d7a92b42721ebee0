use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::FieldCtx;

/// Field realization: `poly` absent means the first primitive modulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub k: usize,
    pub poly: Option<String>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<FieldCtx> {
        match &self.poly {
            Some(text) => FieldCtx::from_text(self.p, self.k, text),
            None => FieldCtx::find_primitive(self.p, self.k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Single,
    Multi,
}

/// Everything a scan needs; a run is reproducible from this alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub field: FieldSpec,
    pub mode: ScanMode,
    pub s: usize,
    pub b1: u64,
    pub b2: u64,
    pub r: usize,
    pub dims: Vec<usize>,
    /// Box sides per grid entry; length 1 in single mode, `r` in multi mode.
    pub n_grid: Vec<Vec<u64>>,
    pub epsilons: Vec<f64>,
    pub workers: usize,
    pub seed: u64,
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn single(field: FieldSpec, s: usize) -> Self {
        Self {
            field,
            mode: ScanMode::Single,
            s,
            b1: 1,
            b2: 1,
            r: 1,
            dims: Vec::new(),
            n_grid: Vec::new(),
            epsilons: vec![0.25, 0.5],
            workers: 0,
            seed: 0,
            samples: None,
        }
    }

    /// The configured grid, or the default for the field size.
    pub fn effective_grid(&self, q: u64) -> Vec<Vec<u64>> {
        if !self.n_grid.is_empty() {
            return self.n_grid.clone();
        }
        match self.mode {
            ScanMode::Single => dyadic_grid(q - 1).into_iter().map(|n| vec![n]).collect(),
            ScanMode::Multi => diagonal_grid(q, self.r),
        }
    }
}

/// Powers of two from 4 below `max`, then `max` itself.
pub fn dyadic_grid(max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(4u64), |&n| n.checked_mul(2))
        .take_while(|&n| n < max)
        .collect();
    out.push(max);
    out
}

/// Cubes `(t, ..., t)` with `t ≥ 2` and `t^r ≤ q`.
pub fn diagonal_grid(q: u64, r: usize) -> Vec<Vec<u64>> {
    (2u64..)
        .take_while(|&t| t.checked_pow(r as u32).is_some_and(|v| v <= q))
        .map(|t| vec![t; r])
        .collect()
}

/// Flat `key = value` configuration text. Blank lines and `#` comments are
/// ignored; keys match the long CLI flag names.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", lineno + 1)))?;
            map.insert(
                key.trim().trim_start_matches("--").to_string(),
                value.trim().to_string(),
            );
        }
        Ok(Self(map))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

/// Parses `"a,b,c"` into numbers.
pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
        .collect()
}

/// Parses a grid such as `"4,8,16"` (scalars) or `"2x2,3x3"` (boxes).
pub fn parse_grid(text: &str) -> Result<Vec<Vec<u64>>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|entry| {
            entry
                .trim()
                .split('x')
                .map(|v| v.parse().map_err(|e| Error::Parse(format!("{entry:?}: {e}"))))
                .collect()
        })
        .collect()
}
