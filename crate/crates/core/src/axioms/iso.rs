//! Trace laws and equivalences on isometries `U ⊕ A -> U ⊕ B`.

use nalgebra::DMatrix;

use super::sample::Sampler;
use crate::error::{Error, Result};
use crate::linalg::{
    adjoint, block_permutation_map, dsum, isometry_defect, kernel_on_top, kron, sum_swap,
    Operator, RANK_TOL,
};
use crate::trace::{
    kernel_image_trace, kleene_feedback, schur_feedback, spectral_radius, BlockMap, KleeneMode,
};

const TOL: f64 = 1e-8;

fn tr(op: Operator, u: usize, a: usize, b: usize) -> Result<Operator> {
    schur_feedback(&BlockMap::new(op, u, a, b)?, TOL)
}

fn tr_map(m: &BlockMap) -> Result<Operator> {
    schur_feedback(m, TOL)
}

pub(crate) fn schur_isometry(s: &mut Sampler) -> Result<f64> {
    let m = s.block_map();
    Ok(isometry_defect(&tr_map(&m)?))
}

/// `Tr((1 ⊕ g) τ (1 ⊕ f)) = g Tr(τ) f`
pub(crate) fn naturality(s: &mut Sampler) -> Result<f64> {
    let u = s.dim(0);
    let a0 = s.dim(0);
    let a = a0 + s.extra(2);
    let b = a + s.extra(2);
    let b1 = b + s.extra(2);
    let m = s.block_map_with(u, a, b);
    let f = s.isometry(a, a0);
    let g = s.isometry(b1, b);
    let wrapped = dsum(&Operator::identity(u), &g)
        .matmul(m.op())?
        .matmul(&dsum(&Operator::identity(u), &f))?;
    let lhs = tr(wrapped, u, a0, b1)?;
    let rhs = g.matmul(&tr_map(&m)?)?.matmul(&f)?;
    Ok(lhs.max_diff(&rhs))
}

/// `Tr((σ ⊕ 1) τ) = Tr(τ (σ ⊕ 1))` for unitary `σ`.
pub(crate) fn sliding(s: &mut Sampler) -> Result<f64> {
    let m = s.block_map();
    let (u, a, b) = (m.u(), m.k(), m.l());
    let sigma = s.unitary(u);
    let after = dsum(&sigma, &Operator::identity(b)).matmul(m.op())?;
    let before = m.op().matmul(&dsum(&sigma, &Operator::identity(a)))?;
    Ok(tr(after, u, a, b)?.max_diff(&tr(before, u, a, b)?))
}

/// `Tr^0(τ) = τ`
pub(crate) fn vanishing_unit(s: &mut Sampler) -> Result<f64> {
    let a = s.dim(0);
    let b = a + s.extra(2);
    let op = s.isometry(b, a);
    Ok(tr(op.clone(), 0, a, b)?.max_diff(&op))
}

fn nested_vs_joint(op: &Operator, u: usize, v: usize, a: usize, b: usize) -> Result<f64> {
    let joint = tr(op.clone(), u + v, a, b)?;
    let inner = tr(op.clone(), u, v + a, v + b)?;
    let nested = tr(inner, v, a, b)?;
    Ok(joint.max_diff(&nested))
}

/// `Tr^{U⊕V} = Tr^V ∘ Tr^U`
pub(crate) fn vanishing_sum(s: &mut Sampler) -> Result<f64> {
    let u = s.dim(0);
    let v = s.dim(0);
    let a = s.dim(0);
    let b = a + s.extra(2);
    let op = s.isometry(u + v + b, u + v + a);
    nested_vs_joint(&op, u, v, a, b)
}

/// Isometry on `(U ⊕ V) ⊕ K -> (U ⊕ V) ⊕ L` whose joint loop block has
/// eigenvalue exactly 1, with the split sizes `(u, v, k, l)`.
///
/// A unitary exchange `U₁ ⇄ N` through `X` and `X†` is summed with a random
/// isometry on the rest, then `U = U₁ ⊕ U₂` and `V = N ⊕ V₀` are conjugated
/// by random unitaries.
pub(crate) fn forced_kernel(s: &mut Sampler) -> Result<(Operator, usize, usize, usize, usize)> {
    let r = s.dim(1);
    let u2 = s.dim(0);
    let v0 = s.dim(0);
    let k = s.dim(0);
    let l = k + s.extra(2);
    let x = s.unitary(r);
    // rows (U₁, N), columns (U₁, N): U₁ -> N via X, N -> U₁ via X†
    let mut exchange = DMatrix::zeros(2 * r, 2 * r);
    exchange.view_mut((0, r), (r, r)).copy_from(adjoint(&x).as_matrix());
    exchange.view_mut((r, 0), (r, r)).copy_from(x.as_matrix());
    let exchange = Operator::from_matrix(exchange)?;
    let rest = s.isometry(u2 + v0 + l, u2 + v0 + k);
    let full = dsum(&exchange, &rest);
    let cols = block_permutation_map(&[r, r, u2, v0, k], &[0, 2, 1, 3, 4])?;
    let rows = block_permutation_map(&[r, r, u2, v0, l], &[0, 2, 1, 3, 4])?;
    let reordered = full.relabel(&rows, &cols)?;
    let (u, v) = (r + u2, r + v0);
    let su = s.unitary(u);
    let sv = s.unitary(v);
    let out = dsum(&dsum(&su, &sv), &Operator::identity(l));
    let inn = dsum(&dsum(&adjoint(&su), &adjoint(&sv)), &Operator::identity(k));
    let op = out.matmul(&reordered)?.matmul(&inn)?;
    let a = op.block(0, u + v, 0, u + v);
    if kernel_on_top(&a, RANK_TOL)?.r < 1 {
        return Err(Error::Invalid("forced-kernel instance without kernel".into()));
    }
    Ok((op, u, v, k, l))
}

pub(crate) fn vanishing_kernel(s: &mut Sampler) -> Result<f64> {
    let (op, u, v, k, l) = forced_kernel(s)?;
    nested_vs_joint(&op, u, v, k, l)
}

/// `Tr^U(τ ⊕ g) = Tr^U(τ) ⊕ g`
pub(crate) fn superposing(s: &mut Sampler) -> Result<f64> {
    let m = s.block_map();
    let c = s.dim(0);
    let d = c + s.extra(2);
    let g = s.isometry(d, c);
    let lhs = tr(dsum(m.op(), &g), m.u(), m.k() + c, m.l() + d)?;
    let rhs = dsum(&tr_map(&m)?, &g);
    Ok(lhs.max_diff(&rhs))
}

/// `Tr^U(κ_{U,U}) = 1_U`
pub(crate) fn yanking(s: &mut Sampler) -> Result<f64> {
    let u = s.dim(0);
    Ok(tr(sum_swap(u, u), u, u, u)?.max_diff(&Operator::identity(u)))
}

/// Kleene partial sums against the Schur complement on loops of spectral
/// radius at most 0.999.
pub(crate) fn kleene_schur(s: &mut Sampler) -> Result<f64> {
    const ATTEMPTS: usize = 10_000;
    for _ in 0..ATTEMPTS {
        let u = s.dim(0);
        let k = s.dim(0);
        let l = k + s.extra(2);
        if u > 0 && l == 0 {
            continue;
        }
        let m = s.block_map_with(u, k, l);
        if spectral_radius(&m.split().a) > 0.999 {
            continue;
        }
        let (limit, report) = kleene_feedback(&m, 5_000_000, 1e-14, KleeneMode::PartialSums)?;
        if !report.converged {
            return Ok(f64::INFINITY);
        }
        return Ok(limit.max_diff(&tr_map(&m)?));
    }
    Err(Error::Invalid("no loop with spectral radius <= 0.999 found".into()))
}

fn kit_vs_schur(m: &BlockMap) -> Result<f64> {
    let kit = kernel_image_trace(m, TOL)?;
    Ok(kit.trace.max_diff(&tr_map(m)?))
}

pub(crate) fn kit_schur(s: &mut Sampler) -> Result<f64> {
    kit_vs_schur(&s.block_map())
}

pub(crate) fn kit_kernel(s: &mut Sampler) -> Result<f64> {
    let (op, u, v, k, l) = forced_kernel(s)?;
    kit_vs_schur(&BlockMap::new(op, u + v, k, l)?)
}

/// `Tr^{U⊗M}(τ ⊗ I_M) = Tr^U(τ) ⊗ I_M`
pub(crate) fn tensor_compat(s: &mut Sampler) -> Result<f64> {
    let m = s.block_map();
    let d = s.dim(0);
    let id = Operator::identity(d);
    let lhs = tr(kron(m.op(), &id), m.u() * d, m.k() * d, m.l() * d)?;
    let rhs = kron(&tr_map(&m)?, &id);
    Ok(lhs.max_diff(&rhs))
}

/// `Tr^U(τ†) = Tr^U(τ)†` for unitary `τ`.
pub(crate) fn dagger_trace(s: &mut Sampler) -> Result<f64> {
    let u = s.dim(0);
    let k = s.dim(0);
    let op = s.unitary(u + k);
    let lhs = tr(adjoint(&op), u, k, k)?;
    let rhs = adjoint(&tr(op, u, k, k)?);
    Ok(lhs.max_diff(&rhs))
}
