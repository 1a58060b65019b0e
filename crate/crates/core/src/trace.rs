//! Feedback on isometries `U ⊕ K -> U ⊕ L`.
//!
//! With `τ = [[A, C], [B, D]]` (rows `U, L`, columns `U, K`) the reference
//! semantics is the Schur I-complement `D + B (I − A)⁺ C`. The Kleene limit
//! of Neumann partial sums and the kernel-image trace are provided as
//! independent routes to the same operator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, isometry_defect, kernel_on_top, mp_inverse_floored, Operator, RANK_TOL};

/// Isometry tolerance used when a caller-supplied tolerance is a convergence
/// threshold rather than a validation bound.
pub const PRECONDITION_TOL: f64 = 1e-9;

/// An operator `U ⊕ K -> U ⊕ L` with its biproduct split recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMap {
    op: Operator,
    u: usize,
    k: usize,
    l: usize,
}

/// The four blocks of a [`BlockMap`].
#[derive(Clone, Debug, PartialEq)]
pub struct Blocks {
    /// `U -> U`
    pub a: Operator,
    /// `U -> L`
    pub b: Operator,
    /// `K -> U`
    pub c: Operator,
    /// `K -> L`
    pub d: Operator,
}

impl BlockMap {
    pub fn new(op: Operator, u: usize, k: usize, l: usize) -> Result<Self> {
        if op.cols() != u + k || op.rows() != u + l {
            return Err(Error::Shape {
                context: "block map (expected (u+l) x (u+k))",
                left: op.shape(),
                right: (u + l, u + k),
            });
        }
        Ok(Self { op, u, k, l })
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn split(&self) -> Blocks {
        let (u, k, l) = (self.u, self.k, self.l);
        Blocks {
            a: self.op.block(0, u, 0, u),
            c: self.op.block(0, u, u, k),
            b: self.op.block(u, l, 0, u),
            d: self.op.block(u, l, u, k),
        }
    }

    fn require_isometry(&self, tol: f64) -> Result<()> {
        let defect = isometry_defect(&self.op);
        if defect > tol {
            return Err(Error::NotIsometry { defect });
        }
        Ok(())
    }
}

pub fn split_blocks(m: &BlockMap) -> Blocks {
    m.split()
}

/// `(I − A)⁺` with rank decisions relative to `max(σ_max, 1)`.
fn loop_inverse(a: &Operator) -> Operator {
    let i_minus_a = Operator::identity(a.rows()).sub(a).expect("square block");
    mp_inverse_floored(&i_minus_a, RANK_TOL, 1.0)
}

/// Schur I-complement without the isometry check.
pub(crate) fn schur_unchecked(m: &BlockMap) -> Operator {
    let Blocks { a, b, c, d } = m.split();
    let inner = loop_inverse(&a);
    let through = b
        .matmul(&inner)
        .and_then(|x| x.matmul(&c))
        .expect("blocks are conformable");
    d.add(&through).expect("same shape")
}

/// Feedback `D + B (I − A)⁺ C` of an isometry over its leading summand `U`.
///
/// Fails with [`Error::NotIsometry`] when the isometry defect of the operator
/// exceeds `tol`. The result is an isometry `K -> L`.
pub fn schur_feedback(m: &BlockMap, tol: f64) -> Result<Operator> {
    m.require_isometry(tol)?;
    Ok(schur_unchecked(m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KleeneMode {
    /// `fₙ = D + B (Σ_{i≤n} Aⁱ) C`
    PartialSums,
    /// Running means of the partial-sum iterates.
    Cesaro,
}

/// Numerical witness of the Kleene limit.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    /// Index `n` of the returned iterate.
    pub steps: usize,
    /// Partial sums: estimated max-norm distance of the returned iterate
    /// from the limit, zero once the remaining terms vanish exactly. Cesàro:
    /// distance between the last two means.
    pub residual: f64,
    pub converged: bool,
    pub mode: KleeneMode,
}

/// Window of the term envelope used to estimate the decay rate.
const DECAY_WINDOW: usize = 8;

/// Tail estimate `e/(1 − q)` from the last `2·DECAY_WINDOW` term norms, where
/// `e` is the largest of the newest window and `q` the per-step decay of the
/// window maxima. `None` while the history is short or not decaying.
fn tail_estimate(history: &std::collections::VecDeque<f64>) -> Option<f64> {
    if history.len() < 2 * DECAY_WINDOW {
        return None;
    }
    let (old, new) = history.iter().copied().enumerate().fold(
        (0.0f64, 0.0f64),
        |(o, n), (i, x)| if i < DECAY_WINDOW { (o.max(x), n) } else { (o, n.max(x)) },
    );
    if old == 0.0 {
        return (new == 0.0).then_some(0.0);
    }
    let q = (new / old).powf(1.0 / DECAY_WINDOW as f64);
    (q < 1.0).then(|| new / (1.0 - q))
}

/// Iterates the Kleene formula until the iterate is within `tol` of the limit
/// (partial sums) or successive means differ by at most `tol` (Cesàro), or
/// `n = max_n`.
///
/// Partial sums stop exactly at the first vanishing term after which `B` or
/// `AⁿC` vanishes. Otherwise the
/// distance to the limit is estimated from the decay of the terms `BAⁿC`
/// over the last `2·8` steps, so convergence is never declared earlier.
///
/// Non-convergence is reported, not raised. The isometry precondition is
/// checked at `max(tol, PRECONDITION_TOL)`.
pub fn kleene_feedback(
    m: &BlockMap,
    max_n: usize,
    tol: f64,
    mode: KleeneMode,
) -> Result<(Operator, ConvergenceReport)> {
    m.require_isometry(tol.max(PRECONDITION_TOL))?;
    let Blocks { a, b, c, d } = m.split();
    let mut power_c = c; // Aⁿ C
    let mut partial = d.clone(); // fₙ
    let mut running = Operator::zeros(d.rows(), d.cols()); // Σ_{j≤n} fⱼ
    let mut mean = d.clone(); // running mean, starts at D
    let mut history = std::collections::VecDeque::with_capacity(2 * DECAY_WINDOW + 1);
    let b_zero = b.max_abs() == 0.0;
    let mut n = 0;
    loop {
        let term = b.matmul(&power_c)?;
        let next = a.matmul(&power_c)?;
        partial = partial.add(&term)?;
        let residual = match mode {
            KleeneMode::PartialSums => {
                let size = term.max_abs();
                history.push_back(size);
                if history.len() > 2 * DECAY_WINDOW {
                    history.pop_front();
                }
                if size == 0.0 && (b_zero || next.max_abs() == 0.0) {
                    0.0
                } else {
                    tail_estimate(&history).unwrap_or(f64::INFINITY)
                }
            }
            KleeneMode::Cesaro => {
                running = running.add(&partial)?;
                let next = running.scale(Complex64::new(1.0 / (n as f64 + 1.0), 0.0));
                let r = next.max_diff(&mean);
                mean = next;
                r
            }
        };
        let converged = residual <= tol;
        if converged || n >= max_n {
            let out = match mode {
                KleeneMode::PartialSums => partial,
                KleeneMode::Cesaro => mean,
            };
            return Ok((
                out,
                ConvergenceReport {
                    steps: n,
                    residual,
                    converged,
                    mode,
                },
            ));
        }
        power_c = next;
        n += 1;
    }
}

/// Result of [`kernel_image_trace`], with the two factorizations.
#[derive(Clone, Debug)]
pub struct KernelImageTrace {
    pub trace: Operator,
    /// `i: K -> U` with `C = (I − A) i` (apply `i`, then `I − A`).
    pub i: Operator,
    /// `k: U -> L` with `B = k (I − A)` (apply `I − A`, then `k`).
    pub k: Operator,
}

/// Kernel-image trace `D + C∘k = D + i∘B`.
///
/// The factors are solved in the kernel-on-top basis of `I − A`, where the
/// complement block is inverted directly. Both factorization residuals and the
/// disagreement of the two expressions must stay within `100·tol`; the
/// returned trace is their average.
pub fn kernel_image_trace(m: &BlockMap, tol: f64) -> Result<KernelImageTrace> {
    m.require_isometry(tol)?;
    let Blocks { a, b, c, d } = m.split();
    let u = m.u();
    let bound = 100.0 * tol;
    let ko = kernel_on_top(&a, RANK_TOL)?;
    let r = ko.r;
    let s = &ko.s;
    let s_adj = linalg::adjoint(s);
    let moved = ko.transformed(&a); // s (I − A) s†
    let comp = moved.block(r, u - r, r, u - r);
    let comp_inv = comp
        .as_matrix()
        .clone()
        .try_inverse()
        .ok_or(Error::Factorization {
            residual: f64::INFINITY,
            bound,
        })?;
    let comp_inv = Operator::from_matrix(comp_inv)?;

    // k' (s M s†) = B s†  ->  k' = [0 | B'₀ M₀⁻¹]
    let b_moved = b.matmul(&s_adj)?;
    let k_tail = b_moved.block(0, m.l(), r, u - r).matmul(&comp_inv)?;
    let mut k_moved = DMatrix::zeros(m.l(), u);
    k_moved.view_mut((0, r), (m.l(), u - r)).copy_from(k_tail.as_matrix());
    let k_moved = Operator::from_matrix(k_moved)?;
    let k_matrix = k_moved.matmul(s)?;

    // (s M s†) i' = s C  ->  i' = [0 ; M₀⁻¹ C'₀]
    let c_moved = s.matmul(&c)?;
    let i_tail = comp_inv.matmul(&c_moved.block(r, u - r, 0, m.k()))?;
    let mut i_moved = DMatrix::zeros(u, m.k());
    i_moved.view_mut((r, 0), (u - r, m.k())).copy_from(i_tail.as_matrix());
    let i_moved = Operator::from_matrix(i_moved)?;
    let i_matrix = s_adj.matmul(&i_moved)?;

    let i_minus_a = Operator::identity(u).sub(&a)?;
    let k_residual = k_matrix.matmul(&i_minus_a)?.max_diff(&b);
    let i_residual = i_minus_a.matmul(&i_matrix)?.max_diff(&c);
    let residual = k_residual.max(i_residual);
    if residual > bound {
        return Err(Error::Factorization { residual, bound });
    }
    let via_k = d.add(&k_matrix.matmul(&c)?)?;
    let via_i = d.add(&b.matmul(&i_matrix)?)?;
    let gap = via_k.max_diff(&via_i);
    if gap > bound {
        return Err(Error::Factorization {
            residual: gap,
            bound,
        });
    }
    let trace = via_k.add(&via_i)?.scale(Complex64::new(0.5, 0.0));
    Ok(KernelImageTrace {
        trace,
        i: i_matrix,
        k: k_matrix,
    })
}

/// Scalar star `c* = (1 − c)⁺`: `(1 − c)⁻¹`, or 0 when `c = 1`.
pub fn scalar_star(c: Complex64) -> Complex64 {
    let gap = Complex64::new(1.0, 0.0) - c;
    if gap.norm() > 1e-12 {
        gap.inv()
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Spectral radius of a square operator.
pub fn spectral_radius(a: &Operator) -> f64 {
    if a.rows() == 0 {
        return 0.0;
    }
    a.as_matrix()
        .clone()
        .schur()
        .eigenvalues()
        .map(|ev| ev.iter().fold(0.0f64, |acc, z| acc.max(z.norm())))
        .expect("complex Schur form is triangular")
}
