//! Turing cells: one tape cell as a unitary automaton, and tape segments built
//! by wiring copies of a cell together.
//!
//! A cell with `S` control states and `B` tape bits has state space
//! `H = C^(2^B)` (the tape symbol) and interfaces `K = L = C^(2S)`. Basis
//! vector `(L,i)` of `K` is the control arriving in state `i` while moving
//! left, `(R,i)` while moving right; outputs are read the same way. States are
//! numbered from 1 in labels.

use std::collections::HashMap;

use num_complex::Complex64;
use qtm_core::dqta::{feedback_dqta, make_dqta, turing_tensor, Dqta, UnitaryDqta};
use qtm_core::intcat::{name_of, Int0Morphism, Qta};
use qtm_core::linalg::Operator;
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::file::Labels;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    L,
    R,
}

impl Dir {
    fn flip(self) -> Dir {
        match self {
            Dir::L => Dir::R,
            Dir::R => Dir::L,
        }
    }
}

/// Interface labels `(L,1)..(L,S), (R,1)..(R,S)`.
pub fn cell_labels(states: usize) -> Vec<String> {
    [Dir::L, Dir::R]
        .into_iter()
        .flat_map(|d| (1..=states).map(move |i| port_label(d, i)))
        .collect()
}

fn port_label(d: Dir, i: usize) -> String {
    format!("({d:?},{i})")
}

/// Reads `(L,i)` or `(R,i)`.
pub fn parse_port(label: &str) -> Option<(Dir, usize)> {
    let inner = label.strip_prefix('(')?.strip_suffix(')')?;
    let (d, i) = inner.split_once(',')?;
    let dir = match d.trim() {
        "L" => Dir::L,
        "R" => Dir::R,
        _ => return None,
    };
    Some((dir, i.trim().parse().ok()?))
}

fn port_index(states: usize, label: &str) -> CliResult<usize> {
    match parse_port(label) {
        Some((d, i)) if (1..=states).contains(&i) => {
            Ok(if d == Dir::L { 0 } else { states } + i - 1)
        }
        _ => Err(CliError::invalid(format!(
            "'{label}' is not a port of a cell with {states} states"
        ))),
    }
}

/// One entry of a rule table: in configuration (`from`, `read`) the cell
/// writes `write` and the control leaves through `to`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transition {
    pub from: String,
    pub read: usize,
    pub to: String,
    pub write: usize,
}

/// A reversible rule table or an explicit transition matrix.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Transitions(Vec<Transition>),
    Matrix(Vec<Vec<[f64; 2]>>),
}

impl Rule {
    /// Every configuration left unchanged.
    pub fn identity() -> Self {
        Rule::Transitions(Vec::new())
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::invalid(format!("rule file: {e}")))
    }
}

/// A cell together with its interface labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub t: UnitaryDqta,
    pub labels: Labels,
}

/// Builds the one-cell automaton. Configurations absent from a rule table are
/// left unchanged; the completed table must be a bijection.
pub fn build_cell(states: usize, bits: u32, rule: &Rule) -> CliResult<Cell> {
    if states == 0 {
        return Err(CliError::invalid("a cell needs at least one control state"));
    }
    let h = 1usize
        .checked_shl(bits)
        .filter(|_| bits < 16)
        .ok_or_else(|| CliError::invalid(format!("{bits} tape bits is too many")))?;
    let k = 2 * states;
    let n = h * k;
    let tau = match rule {
        Rule::Transitions(table) => {
            let mut image: Vec<usize> = (0..n).collect();
            let mut seen = HashMap::new();
            for (idx, tr) in table.iter().enumerate() {
                for sym in [tr.read, tr.write] {
                    if sym >= h {
                        return Err(CliError::invalid(format!(
                            "rule entry {idx}: symbol {sym} needs more than {bits} bits"
                        )));
                    }
                }
                let src = tr.read * k + port_index(states, &tr.from)?;
                let dst = tr.write * k + port_index(states, &tr.to)?;
                if let Some(prev) = seen.insert(src, idx) {
                    return Err(CliError::invalid(format!(
                        "rule entries {prev} and {idx} both start from ({}, {})",
                        tr.from, tr.read
                    )));
                }
                image[src] = dst;
            }
            let mut hit = vec![None; n];
            for (src, &dst) in image.iter().enumerate() {
                if let Some(other) = hit[dst].replace(src) {
                    let name = |x: usize| format!("({}, {})", cell_labels(states)[x % k], x / k);
                    return Err(CliError::invalid(format!(
                        "rule is not a bijection: {} and {} both go to {}",
                        name(other),
                        name(src),
                        name(dst)
                    )));
                }
            }
            Operator::permutation(&image)?
        }
        Rule::Matrix(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(CliError::invalid(format!(
                    "rule matrix must be {n}x{n} for {states} states and {bits} bits"
                )));
            }
            let entries = rows
                .iter()
                .flatten()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect();
            Operator::from_rows(n, n, entries)?
        }
    };
    Ok(Cell {
        t: UnitaryDqta::new(make_dqta(h, k, k, tau)?)?,
        labels: Labels::shared(cell_labels(states)),
    })
}

/// Ports of a labeled automaton, split by direction and sorted by state.
struct Sides {
    /// Inputs arriving from the left neighbor, then from the right.
    from_left: Vec<usize>,
    from_right: Vec<usize>,
    /// Outputs leaving to the right neighbor, then to the left.
    to_right: Vec<usize>,
    to_left: Vec<usize>,
}

fn ports(names: &[String]) -> CliResult<Vec<(Dir, usize)>> {
    names
        .iter()
        .map(|x| {
            parse_port(x)
                .ok_or_else(|| CliError::invalid(format!("interface label '{x}' is not (L,i) or (R,i)")))
        })
        .collect()
}

impl Sides {
    fn of(labels: &Labels) -> CliResult<Self> {
        let pick = |names: &[String], d: Dir| -> CliResult<Vec<usize>> {
            let mut v: Vec<(usize, usize)> = ports(names)?
                .into_iter()
                .enumerate()
                .filter(|(_, p)| p.0 == d)
                .map(|(pos, p)| (p.1, pos))
                .collect();
            v.sort();
            Ok(v.into_iter().map(|x| x.1).collect())
        };
        let sides = Sides {
            from_left: pick(&labels.input, Dir::R)?,
            from_right: pick(&labels.input, Dir::L)?,
            to_right: pick(&labels.output, Dir::R)?,
            to_left: pick(&labels.output, Dir::L)?,
        };
        if sides.from_left.len() != sides.to_left.len()
            || sides.from_right.len() != sides.to_right.len()
        {
            return Err(CliError::invalid(
                "each side of the cell needs as many inputs as outputs",
            ));
        }
        Ok(sides)
    }
}

/// The cell as an Int₀ morphism from its left boundary to its right one.
///
/// The carrier takes `(R,·)` arrivals from the left followed by `(L,·)`
/// arrivals from the right, and emits `(R,·)` exits to the right followed by
/// `(L,·)` exits to the left.
pub fn undirected_morphism(t: &UnitaryDqta, labels: &Labels) -> CliResult<Int0Morphism> {
    let sides = Sides::of(labels)?;
    let pre: Vec<usize> = sides.from_left.iter().chain(&sides.from_right).copied().collect();
    let mut post = vec![0; t.l()];
    for (new, &old) in sides.to_right.iter().chain(&sides.to_left).enumerate() {
        post[old] = new;
    }
    let carrier = UnitaryDqta::new(t.route(&pre, &post)?)?;
    Ok(Int0Morphism::new(sides.from_left.len(), sides.from_right.len(), carrier)?)
}

/// Name of [`undirected_morphism`]: a QTA whose rank counts the wire pairs on
/// both boundaries.
pub fn undirected_qta(t: &UnitaryDqta, labels: &Labels) -> CliResult<(Qta, Vec<String>)> {
    let f = undirected_morphism(t, labels)?;
    let names = (1..=f.src())
        .map(|i| format!("left,{i}"))
        .chain((1..=f.dst()).map(|i| format!("right,{i}")))
        .collect();
    Ok((name_of(&f), names))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainOptions {
    /// Feed the outer ends back into each other.
    pub ring: bool,
    /// Wire `(L,·)` outputs to the right neighbor and `(R,·)` to the left.
    pub mirror: bool,
}

/// A wire end: copy index and port position within the copy.
type End = (usize, usize);

/// Open wire ends of an automaton under construction.
struct Wiring {
    t: Dqta,
    inputs: Vec<End>,
    outputs: Vec<End>,
}

impl Wiring {
    /// Feeds output `o` back into input `i`.
    fn connect(&mut self, o: End, i: End) -> CliResult<()> {
        let missing = || CliError::invalid("wire end already connected");
        let pi = self.inputs.iter().position(|&e| e == i).ok_or_else(missing)?;
        let po = self.outputs.iter().position(|&e| e == o).ok_or_else(missing)?;
        let pre: Vec<usize> = std::iter::once(pi)
            .chain((0..self.inputs.len()).filter(|&x| x != pi))
            .collect();
        let post: Vec<usize> = (0..self.outputs.len())
            .map(|x| match x.cmp(&po) {
                std::cmp::Ordering::Less => x + 1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => x,
            })
            .collect();
        self.t = feedback_dqta(&self.t.route(&pre, &post)?, 1)?;
        self.inputs.remove(pi);
        self.outputs.remove(po);
        Ok(())
    }

    /// Puts the open ends in the given order.
    fn arrange(&mut self, inputs: &[End], outputs: &[End]) -> CliResult<()> {
        let find = |set: &[End], e: &End| {
            set.iter()
                .position(|x| x == e)
                .ok_or_else(|| CliError::invalid("wire end is not open"))
        };
        let pre = inputs
            .iter()
            .map(|e| find(&self.inputs, e))
            .collect::<CliResult<Vec<_>>>()?;
        let mut post = vec![0; self.outputs.len()];
        for (new, e) in outputs.iter().enumerate() {
            post[find(&self.outputs, e)?] = new;
        }
        self.t = self.t.route(&pre, &post)?;
        self.inputs = inputs.to_vec();
        self.outputs = outputs.to_vec();
        Ok(())
    }
}

/// Chains `n` copies of a labeled cell into a tape segment.
///
/// Output `(R,i)` of copy `j` feeds input `(R,i)` of copy `j+1`, and output
/// `(L,i)` of copy `j+1` feeds input `(L,i)` of copy `j`. The segment keeps the
/// labels of one cell: `(R,·)` inputs enter copy 0 and `(L,·)` inputs enter
/// copy `n-1`; `(R,·)` outputs leave copy `n-1` and `(L,·)` outputs leave
/// copy 0. Copies are added one at a time and each wire is fed back on its
/// own, so the largest operator has state space `h^n` and twice the cell's
/// interface.
pub fn chain_cells(cell: &Cell, n: usize, opts: ChainOptions) -> CliResult<Cell> {
    if n == 0 {
        return Err(CliError::invalid("a chain needs at least one cell"));
    }
    let labels = &cell.labels;
    let moves = |names: &[String]| -> CliResult<Vec<(Dir, usize)>> {
        Ok(ports(names)?
            .into_iter()
            .map(|(d, i)| (if opts.mirror { d.flip() } else { d }, i))
            .collect())
    };
    let in_ports = moves(&labels.input)?;
    let out_ports = moves(&labels.output)?;
    let matching_input = |port: (Dir, usize)| -> CliResult<usize> {
        in_ports.iter().position(|&p| p == port).ok_or_else(|| {
            CliError::invalid(format!("no input matches output {}", port_label(port.0, port.1)))
        })
    };
    let wires: Vec<(Dir, usize, usize)> = out_ports
        .iter()
        .enumerate()
        .map(|(o, &p)| Ok((p.0, o, matching_input(p)?)))
        .collect::<CliResult<_>>()?;

    let (k, l) = (cell.t.k(), cell.t.l());
    let mut w = Wiring {
        t: cell.t.as_dqta().clone(),
        inputs: (0..k).map(|p| (0, p)).collect(),
        outputs: (0..l).map(|p| (0, p)).collect(),
    };
    for j in 1..n {
        w.t = turing_tensor(&w.t, cell.t.as_dqta())?;
        w.inputs.extend((0..k).map(|p| (j, p)));
        w.outputs.extend((0..l).map(|p| (j, p)));
        for &(d, o, i) in &wires {
            match d {
                Dir::R => w.connect((j - 1, o), (j, i))?,
                Dir::L => w.connect((j, o), (j - 1, i))?,
            }
        }
    }
    let last = n - 1;
    if opts.ring {
        for &(d, o, i) in &wires {
            match d {
                Dir::R => w.connect((last, o), (0, i))?,
                Dir::L => w.connect((0, o), (last, i))?,
            }
        }
        let t = UnitaryDqta::new(w.t)?;
        return Ok(Cell {
            t,
            labels: Labels::shared(Vec::new()),
        });
    }
    let inputs: Vec<End> = in_ports
        .iter()
        .enumerate()
        .map(|(p, &(d, _))| (if d == Dir::R { 0 } else { last }, p))
        .collect();
    let outputs: Vec<End> = out_ports
        .iter()
        .enumerate()
        .map(|(p, &(d, _))| (if d == Dir::R { last } else { 0 }, p))
        .collect();
    w.arrange(&inputs, &outputs)?;
    Ok(Cell {
        t: UnitaryDqta::new(w.t)?,
        labels: labels.clone(),
    })
}
