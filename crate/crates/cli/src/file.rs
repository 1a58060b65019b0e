//! JSON automaton files.
//!
//! ```json
//! { "kind": "dqta", "h": 1, "k": 2, "l": 2,
//!   "matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]],
//!   "labels": ["a", "b"] }
//! ```
//!
//! `matrix` is row-major with `[re, im]` entries. For a `qta` the rank is
//! stored in `k` and `l` is omitted. `labels` names the basis vectors of the
//! interfaces: one list shared by input and output when they coincide, or
//! inputs followed by outputs.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use qtm_core::dqta::{make_dqta, Dqta, UnitaryDqta};
use qtm_core::intcat::Qta;
use qtm_core::linalg::Operator;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Dqta,
    Qta,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    kind: Kind,
    h: usize,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    l: Option<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

/// Names of the input and output basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labels {
    pub input: Vec<String>,
    pub output: Vec<String>,
}

impl Labels {
    pub fn shared(names: Vec<String>) -> Self {
        Self {
            input: names.clone(),
            output: names,
        }
    }

    fn flatten(&self) -> Vec<String> {
        if self.input == self.output {
            self.input.clone()
        } else {
            self.input.iter().chain(&self.output).cloned().collect()
        }
    }

    fn split(names: Vec<String>, k: usize, l: usize) -> CliResult<Self> {
        if names.len() == k && k == l {
            Ok(Self::shared(names))
        } else if names.len() == k + l {
            let output = names[k..].to_vec();
            let mut input = names;
            input.truncate(k);
            Ok(Self { input, output })
        } else {
            Err(CliError::invalid(format!(
                "{} labels for interfaces of dimensions {k} and {l}",
                names.len()
            )))
        }
    }

    /// Position of `name` among the inputs.
    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.input.iter().position(|x| x == name)
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.output.iter().position(|x| x == name)
    }
}

/// Contents of an automaton file.
#[derive(Clone, Debug, PartialEq)]
pub enum Automaton {
    Dqta {
        t: Dqta,
        labels: Option<Labels>,
    },
    Qta {
        q: Qta,
        labels: Option<Vec<String>>,
    },
}

impl Automaton {
    pub fn kind(&self) -> Kind {
        match self {
            Automaton::Dqta { .. } => Kind::Dqta,
            Automaton::Qta { .. } => Kind::Qta,
        }
    }

    pub fn h(&self) -> usize {
        match self {
            Automaton::Dqta { t, .. } => t.h(),
            Automaton::Qta { q, .. } => q.h(),
        }
    }

    pub fn tau(&self) -> &Operator {
        match self {
            Automaton::Dqta { t, .. } => t.tau(),
            Automaton::Qta { q, .. } => q.tau(),
        }
    }

    /// A QTA read as the unitary automaton `N -> N`.
    pub fn as_dqta(&self) -> CliResult<(Dqta, Option<Labels>)> {
        match self {
            Automaton::Dqta { t, labels } => Ok((t.clone(), labels.clone())),
            Automaton::Qta { q, labels } => Ok((
                make_dqta(q.h(), q.n(), q.n(), q.tau().clone())?,
                labels.clone().map(Labels::shared),
            )),
        }
    }

    pub fn unitary(&self) -> CliResult<(UnitaryDqta, Option<Labels>)> {
        let (t, labels) = self.as_dqta()?;
        Ok((UnitaryDqta::new(t)?, labels))
    }

    pub fn labels(&self) -> Option<Labels> {
        match self {
            Automaton::Dqta { labels, .. } => labels.clone(),
            Automaton::Qta { labels, .. } => labels.clone().map(Labels::shared),
        }
    }
}

fn to_raw(a: &Automaton) -> RawFile {
    let tau = a.tau();
    let matrix = (0..tau.rows())
        .map(|i| {
            (0..tau.cols())
                .map(|j| {
                    let z = tau.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    match a {
        Automaton::Dqta { t, labels } => RawFile {
            kind: Kind::Dqta,
            h: t.h(),
            k: t.k(),
            l: Some(t.l()),
            matrix,
            labels: labels.as_ref().map(Labels::flatten),
        },
        Automaton::Qta { q, labels } => RawFile {
            kind: Kind::Qta,
            h: q.h(),
            k: q.n(),
            l: None,
            matrix,
            labels: labels.clone(),
        },
    }
}

fn from_raw(raw: RawFile) -> CliResult<Automaton> {
    let (rows, cols) = match raw.kind {
        Kind::Dqta => {
            let l = raw
                .l
                .ok_or_else(|| CliError::invalid("dqta file without field 'l'"))?;
            (raw.h * l, raw.h * raw.k)
        }
        Kind::Qta => {
            if raw.l.is_some() {
                return Err(CliError::invalid("qta file stores its rank in 'k' only"));
            }
            (raw.h * raw.k, raw.h * raw.k)
        }
    };
    if raw.matrix.len() != rows {
        return Err(CliError::invalid(format!(
            "matrix has {} rows, expected {rows}",
            raw.matrix.len()
        )));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in raw.matrix.iter().enumerate() {
        if row.len() != cols {
            return Err(CliError::invalid(format!(
                "matrix row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        entries.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
    }
    let tau = Operator::from_rows(rows, cols, entries)?;
    match raw.kind {
        Kind::Dqta => {
            let l = raw.l.unwrap_or_default();
            let labels = raw
                .labels
                .map(|names| Labels::split(names, raw.k, l))
                .transpose()?;
            Ok(Automaton::Dqta {
                t: make_dqta(raw.h, raw.k, l, tau)?,
                labels,
            })
        }
        Kind::Qta => {
            if let Some(names) = &raw.labels {
                if names.len() != raw.k {
                    return Err(CliError::invalid(format!(
                        "{} labels for a qta of rank {}",
                        names.len(),
                        raw.k
                    )));
                }
            }
            Ok(Automaton::Qta {
                q: Qta::new(raw.h, raw.k, tau)?,
                labels: raw.labels,
            })
        }
    }
}

pub fn from_json(text: &str, path: &Path) -> CliResult<Automaton> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| CliError::Malformed {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_raw(raw)
}

pub fn to_json(a: &Automaton) -> String {
    let mut s = serde_json::to_string(&to_raw(a)).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn parse_automaton(path: &Path) -> CliResult<Automaton> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json(&text, path)
}

pub fn write_automaton(a: &Automaton, path: &Path) -> CliResult<()> {
    fs::write(path, to_json(a)).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
