//! Repeated application of a QTA transition to a control-particle state.

use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use qtm_core::intcat::Qta;

use crate::error::{CliError, CliResult};

/// Largest admissible deviation of the initial norm from 1.
pub const NORM_TOL: f64 = 1e-9;

/// Probability mass on each interface basis vector, per step.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationTrace {
    pub steps: usize,
    pub labels: Vec<String>,
    /// `masses[s][i]`: squared norm of the projection onto interface vector
    /// `i` after `s` steps. Row 0 is the initial state.
    pub masses: Vec<Vec<f64>>,
    pub total_norm: Vec<f64>,
}

impl SimulationTrace {
    pub fn max_norm_deviation(&self) -> f64 {
        self.total_norm
            .iter()
            .fold(0.0f64, |acc, n| acc.max((n - 1.0).abs()))
    }
}

impl fmt::Display for SimulationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step\ttotal_norm")?;
        for l in &self.labels {
            write!(f, "\t{l}")?;
        }
        writeln!(f)?;
        for (s, (row, norm)) in self.masses.iter().zip(&self.total_norm).enumerate() {
            write!(f, "{s}\t{norm:.15}")?;
            for m in row {
                write!(f, "\t{m:.6}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Basis state with the control on interface vector `port` and the internal
/// state at basis vector 0.
pub fn basis_state(q: &Qta, port: usize) -> CliResult<DVector<Complex64>> {
    if port >= q.n() {
        return Err(CliError::invalid(format!(
            "start index {port} out of range for rank {}",
            q.n()
        )));
    }
    let mut v = DVector::zeros(q.h() * q.n());
    v[port] = Complex64::new(1.0, 0.0);
    Ok(v)
}

fn masses(v: &DVector<Complex64>, h: usize, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (0..h).map(|a| v[a * n + i].norm_sqr()).sum())
        .collect()
}

pub fn simulate(
    q: &Qta,
    initial: DVector<Complex64>,
    steps: usize,
    labels: Option<&[String]>,
) -> CliResult<SimulationTrace> {
    let (h, n) = (q.h(), q.n());
    if initial.len() != h * n {
        return Err(CliError::invalid(format!(
            "initial state of length {} for a {}-dimensional space",
            initial.len(),
            h * n
        )));
    }
    let norm0 = initial.norm();
    if (norm0 - 1.0).abs() > NORM_TOL {
        return Err(CliError::invalid(format!(
            "initial state has norm {norm0}, expected 1"
        )));
    }
    let labels = match labels {
        Some(l) => l.to_vec(),
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    let tau = q.tau().as_matrix();
    let mut v = initial;
    let mut trace = SimulationTrace {
        steps,
        labels,
        masses: vec![masses(&v, h, n)],
        total_norm: vec![norm0],
    };
    for _ in 0..steps {
        v = tau * &v;
        trace.masses.push(masses(&v, h, n));
        trace.total_norm.push(v.norm());
    }
    Ok(trace)
}
