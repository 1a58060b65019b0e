//! Directed quantum Turing automata `(H, K, L, τ)` with isometric
//! `τ: H ⊗ K -> H ⊗ L`.
//!
//! Automata are concrete representatives. Cascade and Turing tensor build the
//! state space `H₁ ⊗ H₂` with the `H₁` index outermost; isomorphisms between
//! representatives are checked against an explicit witness.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, distribute_map, is_zero, isometry_defect, kron, unitarity_defect, Operator, SpaceDims,
};
use crate::trace::{schur_unchecked, BlockMap};

/// Isometry tolerance for user-supplied transitions.
pub const CONSTRUCTION_TOL: f64 = 1e-9;
/// Isometry tolerance for the results of composite operations.
pub const COMPOSITE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Dqta {
    h: usize,
    k: usize,
    l: usize,
    tau: Operator,
}

/// Validates a transition operator and builds the automaton.
pub fn make_dqta(h: usize, k: usize, l: usize, tau: Operator) -> Result<Dqta> {
    Dqta::validated(h, k, l, tau, CONSTRUCTION_TOL)
}

impl Dqta {
    fn validated(h: usize, k: usize, l: usize, tau: Operator, tol: f64) -> Result<Self> {
        if tau.shape() != (h * l, h * k) {
            return Err(Error::Shape {
                context: "transition (expected (h*l) x (h*k))",
                left: tau.shape(),
                right: (h * l, h * k),
            });
        }
        let defect = isometry_defect(&tau);
        if defect > tol {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Self { h, k, l, tau })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn tau(&self) -> &Operator {
        &self.tau
    }

    pub fn into_tau(self) -> Operator {
        self.tau
    }

    /// Pre-composes with the interface permutation `pre: K' -> K` and
    /// post-composes with `post: L -> L'`, both given as index maps (basis `j`
    /// goes to `map[j]`).
    ///
    /// This is cascading with state-free permutation automata, done by
    /// relabeling.
    pub fn route(&self, pre: &[usize], post: &[usize]) -> Result<Dqta> {
        if pre.len() != self.k || post.len() != self.l {
            return Err(Error::Interface(format!(
                "routing maps of sizes ({}, {}) for interfaces ({}, {})",
                pre.len(),
                post.len(),
                self.k,
                self.l
            )));
        }
        let mut pre_inv = vec![0; pre.len()];
        for (j, &x) in pre.iter().enumerate() {
            pre_inv[x] = j;
        }
        let col_map = lift(self.h, &pre_inv);
        let row_map = lift(self.h, post);
        let tau = self.tau.relabel(&row_map, &col_map)?;
        Ok(Dqta {
            h: self.h,
            k: self.k,
            l: self.l,
            tau,
        })
    }
}

/// `I_h ⊗ P` as an index map.
fn lift(h: usize, map: &[usize]) -> Vec<usize> {
    let n = map.len();
    (0..h * n).map(|i| (i / n) * n + map[i % n]).collect()
}

/// An automaton whose transition is unitary; it has `h·k = h·l`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryDqta(Dqta);

impl UnitaryDqta {
    pub fn new(t: Dqta) -> Result<Self> {
        Self::checked(t, CONSTRUCTION_TOL)
    }

    pub(crate) fn checked(t: Dqta, tol: f64) -> Result<Self> {
        let defect = unitarity_defect(t.tau());
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self(t))
    }

    /// Wraps without checking; for composites of unitary automata.
    pub(crate) fn trusted(t: Dqta) -> Self {
        Self(t)
    }

    pub fn as_dqta(&self) -> &Dqta {
        &self.0
    }

    pub fn into_dqta(self) -> Dqta {
        self.0
    }
}

impl std::ops::Deref for UnitaryDqta {
    type Target = Dqta;

    fn deref(&self) -> &Dqta {
        &self.0
    }
}

impl TryFrom<Dqta> for UnitaryDqta {
    type Error = Error;

    fn try_from(t: Dqta) -> Result<Self> {
        Self::new(t)
    }
}

fn nonzeros(m: &DMatrix<Complex64>) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !is_zero(z) {
                out.push((i, j, z));
            }
        }
    }
    out
}

/// Cascade product: `t1` then `t2`, over the state space `H₁ ⊗ H₂`.
///
/// The transition is `(I_{H₁} ⊗ τ₂)(π_{H₂,H₁} ⊗ I)(I_{H₂} ⊗ τ₁)(π_{H₁,H₂} ⊗ I)`
/// in matrix order; it is assembled entrywise as
/// `τ[(a″,b″,n),(a,b,l)] = Σ_m τ₂[(b″,n),(b,m)] τ₁[(a″,m),(a,l)]`.
pub fn cascade(t1: &Dqta, t2: &Dqta) -> Result<Dqta> {
    if t1.l != t2.k {
        return Err(Error::Interface(format!(
            "cascade of output {} into input {}",
            t1.l, t2.k
        )));
    }
    let (h1, h2) = (t1.h, t2.h);
    let (k, m, n) = (t1.k, t1.l, t2.l);
    let mut by_mid: Vec<Vec<(usize, usize, usize, Complex64)>> = vec![Vec::new(); m];
    for (row, col, z) in nonzeros(t2.tau.as_matrix()) {
        let (b2, nn) = (row / n, row % n);
        let (b, mm) = (col / m, col % m);
        by_mid[mm].push((b2, nn, b, z));
    }
    let mut out = DMatrix::<Complex64>::zeros(h1 * h2 * n, h1 * h2 * k);
    for (row, col, z1) in nonzeros(t1.tau.as_matrix()) {
        let (a2, mm) = (row / m, row % m);
        let (a, ll) = (col / k, col % k);
        for &(b2, nn, b, z2) in &by_mid[mm] {
            let r = (a2 * h2 + b2) * n + nn;
            let c = (a * h2 + b) * k + ll;
            out[(r, c)] += z2 * z1;
        }
    }
    Dqta::validated(
        h1 * h2,
        k,
        n,
        Operator::from_matrix_unchecked(out),
        COMPOSITE_TOL,
    )
}

/// Turing tensor `t1 ⊞ t2` over `H₁ ⊗ H₂` with interfaces `K₁ ⊕ K₂ -> L₁ ⊕ L₂`.
///
/// On `H₁⊗H₂⊗K₁` the first automaton acts on its own state and leaves `H₂`
/// alone; on `H₁⊗H₂⊗K₂` the second acts on `H₂`.
pub fn turing_tensor(t1: &Dqta, t2: &Dqta) -> Result<Dqta> {
    let (h1, h2) = (t1.h, t2.h);
    let (k1, l1, k2, l2) = (t1.k, t1.l, t2.k, t2.l);
    let (k, l) = (k1 + k2, l1 + l2);
    let mut out = DMatrix::<Complex64>::zeros(h1 * h2 * l, h1 * h2 * k);
    for (row, col, z) in nonzeros(t1.tau.as_matrix()) {
        let (a2, y) = (row / l1, row % l1);
        let (a, x) = (col / k1, col % k1);
        for b in 0..h2 {
            out[((a2 * h2 + b) * l + y, (a * h2 + b) * k + x)] = z;
        }
    }
    for (row, col, z) in nonzeros(t2.tau.as_matrix()) {
        let (b2, y) = (row / l2, row % l2);
        let (b, x) = (col / k2, col % k2);
        for a in 0..h1 {
            out[((a * h2 + b2) * l + l1 + y, (a * h2 + b) * k + k1 + x)] = z;
        }
    }
    Dqta::validated(h1 * h2, k, l, Operator::from_matrix_unchecked(out), COMPOSITE_TOL)
}

/// Feedback over the leading summand `U` of both interfaces.
///
/// The transition is relabeled to `(H⊗U) ⊕ (H⊗K′) -> (H⊗U) ⊕ (H⊗L′)` and
/// the Schur I-complement over `H⊗U` is taken.
pub fn feedback_dqta(t: &Dqta, u: usize) -> Result<Dqta> {
    if u > t.k || u > t.l {
        return Err(Error::Interface(format!(
            "feedback over {u} on interfaces ({}, {})",
            t.k, t.l
        )));
    }
    if u == 0 {
        return Ok(t.clone());
    }
    let h = t.h;
    let (k2, l2) = (t.k - u, t.l - u);
    let col_map = distribute_map(h, &SpaceDims::new(vec![u, k2]));
    let row_map = distribute_map(h, &SpaceDims::new(vec![u, l2]));
    let op = t.tau.relabel(&row_map, &col_map)?;
    let bm = BlockMap::new(op, h * u, h * k2, h * l2)?;
    Dqta::validated(h, k2, l2, schur_unchecked(&bm), COMPOSITE_TOL)
}

/// The state-free identity automaton on a `k`-dimensional interface.
pub fn identity_automaton(k: usize) -> Dqta {
    Dqta {
        h: 1,
        k,
        l: k,
        tau: Operator::identity(k),
    }
}

/// The state-free symmetry `κ_{K,L}: K ⊕ L -> L ⊕ K`.
pub fn symmetry_automaton(k: usize, l: usize) -> Dqta {
    Dqta {
        h: 1,
        k: k + l,
        l: k + l,
        tau: linalg::sum_swap(k, l),
    }
}

/// Identity on `K ⊕ L` together with the symmetry `κ_{K,L}`.
pub fn unit_automata(k: usize, l: usize) -> (Dqta, Dqta) {
    (identity_automaton(k + l), symmetry_automaton(k, l))
}

/// State-free automaton permuting `⊕`-blocks (see
/// [`linalg::block_permutation`]).
pub fn permutation_automaton(parts: &[usize], order: &[usize]) -> Result<Dqta> {
    let tau = linalg::block_permutation(parts, order)?;
    let n = tau.rows();
    Ok(Dqta { h: 1, k: n, l: n, tau })
}

/// Max-norm of `τ₂ − (σ ⊗ I_L) τ₁ (σ† ⊗ I_K)`, or infinity when shapes do
/// not fit.
pub fn witness_violation(t1: &Dqta, t2: &Dqta, sigma: &Operator) -> f64 {
    if t1.k != t2.k || t1.l != t2.l || sigma.shape() != (t2.h, t1.h) {
        return f64::INFINITY;
    }
    let left = kron(sigma, &Operator::identity(t1.l));
    let right = kron(&linalg::adjoint(sigma), &Operator::identity(t1.k));
    match left.matmul(&t1.tau).and_then(|x| x.matmul(&right)) {
        Ok(conj) => conj.max_diff(&t2.tau),
        Err(_) => f64::INFINITY,
    }
}

/// Checks that `sigma: H₁ -> H₂` is unitary and carries `t1` to `t2`.
pub fn iso_witness_check(t1: &Dqta, t2: &Dqta, sigma: &Operator, tol: f64) -> Result<bool> {
    if t1.k != t2.k || t1.l != t2.l {
        return Err(Error::Interface(format!(
            "interfaces ({}, {}) vs ({}, {})",
            t1.k, t1.l, t2.k, t2.l
        )));
    }
    if sigma.shape() != (t2.h, t1.h) {
        return Err(Error::Shape {
            context: "witness (expected h2 x h1)",
            left: sigma.shape(),
            right: (t2.h, t1.h),
        });
    }
    Ok(unitarity_defect(sigma) <= tol && witness_violation(t1, t2, sigma) <= tol)
}

/// The automaton `L -> K` with transition `τ†`.
pub fn dagger_dqta(t: &UnitaryDqta) -> UnitaryDqta {
    UnitaryDqta(Dqta {
        h: t.h,
        k: t.l,
        l: t.k,
        tau: linalg::adjoint(&t.tau),
    })
}
