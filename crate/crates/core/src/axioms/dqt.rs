//! Trace laws for `(DQT, ⊞)` with feedback on automata.

use super::sample::Sampler;
use crate::dqta::{
    cascade, dagger_dqta, feedback_dqta, identity_automaton, make_dqta, symmetry_automaton,
    turing_tensor, Dqta,
};
use crate::error::Result;
use crate::linalg::{adjoint, isometry_defect, kron, Operator};
use crate::trace::schur_feedback;

fn distance(a: &Dqta, b: &Dqta) -> f64 {
    if (a.h(), a.k(), a.l()) != (b.h(), b.k(), b.l()) {
        return f64::INFINITY;
    }
    a.tau().max_diff(b.tau())
}

/// `1_U ⊞ f` for an automaton `f`.
fn beside(u: usize, f: &Dqta) -> Result<Dqta> {
    turing_tensor(&identity_automaton(u), f)
}

/// `Tr((1 ⊞ f) ; t ; (1 ⊞ g)) = f ; Tr(t) ; g` with stateful `f`, `g`.
pub(crate) fn naturality(s: &mut Sampler) -> Result<f64> {
    let u = s.dim(0);
    let a0 = s.dim(0);
    let a = a0 + s.extra(1);
    let b = a + s.extra(1);
    let b1 = b + s.extra(1);
    let (ht, hf, hg) = (s.dim(1), s.dim(1), s.dim(1));
    let t = s.dqta(ht, u + a, u + b);
    let f = s.dqta(hf, a0, a);
    let g = s.dqta(hg, b, b1);
    let lhs = feedback_dqta(&cascade(&cascade(&beside(u, &f)?, &t)?, &beside(u, &g)?)?, u)?;
    let rhs = cascade(&cascade(&f, &feedback_dqta(&t, u)?)?, &g)?;
    Ok(distance(&lhs, &rhs))
}

/// `Tr(t ; (σ ⊞ 1)) = Tr((σ ⊞ 1) ; t)` for a state-free unitary `σ` on `U`.
pub(crate) fn sliding(s: &mut Sampler) -> Result<f64> {
    let u = s.dim(0);
    let a = s.dim(0);
    let b = a + s.extra(1);
    let h = s.dim(1);
    let t = s.dqta(h, u + a, u + b);
    let sigma = make_dqta(1, u, u, s.unitary(u))?;
    let lhs = feedback_dqta(&cascade(&t, &turing_tensor(&sigma, &identity_automaton(b))?)?, u)?;
    let rhs = feedback_dqta(&cascade(&turing_tensor(&sigma, &identity_automaton(a))?, &t)?, u)?;
    Ok(distance(&lhs, &rhs))
}

pub(crate) fn vanishing_unit(s: &mut Sampler) -> Result<f64> {
    let a = s.dim(0);
    let b = a + s.extra(1);
    let h = s.dim(1);
    let t = s.dqta(h, a, b);
    Ok(distance(&feedback_dqta(&t, 0)?, &t))
}

pub(crate) fn vanishing_sum(s: &mut Sampler) -> Result<f64> {
    let (u, v, a) = (s.dim(0), s.dim(0), s.dim(0));
    let b = a + s.extra(1);
    let h = s.dim(1);
    let t = s.dqta(h, u + v + a, u + v + b);
    let joint = feedback_dqta(&t, u + v)?;
    let nested = feedback_dqta(&feedback_dqta(&t, u)?, v)?;
    Ok(distance(&joint, &nested))
}

/// `Tr^U(t ⊞ g) = Tr^U(t) ⊞ g`
pub(crate) fn superposing(s: &mut Sampler) -> Result<f64> {
    let (u, a, c) = (s.dim(0), s.dim(0), s.dim(0));
    let b = a + s.extra(1);
    let d = c + s.extra(1);
    let (ht, hg) = (s.dim(1), s.dim(1));
    let t = s.dqta(ht, u + a, u + b);
    let g = s.dqta(hg, c, d);
    let lhs = feedback_dqta(&turing_tensor(&t, &g)?, u)?;
    let rhs = turing_tensor(&feedback_dqta(&t, u)?, &g)?;
    Ok(distance(&lhs, &rhs))
}

pub(crate) fn yanking(s: &mut Sampler) -> Result<f64> {
    let u = s.dim(0);
    Ok(distance(
        &feedback_dqta(&symmetry_automaton(u, u), u)?,
        &identity_automaton(u),
    ))
}

/// Isometry defects of cascade and Turing tensor results.
pub(crate) fn isometry(s: &mut Sampler) -> Result<f64> {
    let k = s.dim(0);
    let m = k + s.extra(1);
    let l = m + s.extra(1);
    let (h1, h2) = (s.dim(1), s.dim(1));
    let t1 = s.dqta(h1, k, m);
    let t2 = s.dqta(h2, m, l);
    let c = cascade(&t1, &t2)?;
    let t = turing_tensor(&t1, &t2)?;
    Ok(isometry_defect(c.tau()).max(isometry_defect(t.tau())))
}

/// `(Tr^U τ) ⊗ I_M = Tr^{U⊗M}(τ ⊗ I_M)` with `M = H`: the state-free
/// isometry `τ` run with an idle state space `H` is fed back by the
/// automaton feedback.
pub(crate) fn tensor_compat(s: &mut Sampler) -> Result<f64> {
    let m = s.block_map();
    let h = s.dim(1);
    let idle = make_dqta(h, m.u() + m.k(), m.u() + m.l(), kron(&Operator::identity(h), m.op()))?;
    let lhs = feedback_dqta(&idle, m.u())?;
    let rhs = kron(&Operator::identity(h), &schur_feedback(&m, 1e-8)?);
    Ok(lhs.tau().max_diff(&rhs))
}

/// `Tr^U(t†) = Tr^U(t)†` on unitary automata.
pub(crate) fn dagger_trace(s: &mut Sampler) -> Result<f64> {
    let (u, k) = (s.dim(0), s.dim(0));
    let h = s.dim(1);
    let t = s.unitary_dqta(h, u + k);
    let lhs = feedback_dqta(&dagger_dqta(&t), u)?;
    let rhs = feedback_dqta(&t, u)?;
    Ok(lhs.tau().max_diff(&adjoint(rhs.tau())))
}
