//! Laws of Int₀ and of the bidirectionalizing functor `F(t) = t ⊞ t†`.

use super::sample::Sampler;
use crate::dqta::{
    cascade, dagger_dqta, feedback_dqta, identity_automaton, turing_tensor, witness_violation,
    UnitaryDqta,
};
use crate::error::Result;
use crate::intcat::{
    bidirectional_morphism, canonical_trace, int_compose, int_dagger, int_symmetry, int_tensor,
    int_units, middle_swap, Int0Morphism,
};
use crate::linalg::{tensor_swap, Operator};

fn morphism(s: &mut Sampler, src: usize, dst: usize) -> Result<Int0Morphism> {
    let h = s.dim(1);
    s.morphism(h, src, dst)
}

/// Distance up to the state-space witness `sigma: H_a -> H_b`.
fn up_to(a: &Int0Morphism, b: &Int0Morphism, sigma: &Operator) -> f64 {
    if (a.src(), a.dst()) != (b.src(), b.dst()) {
        return f64::INFINITY;
    }
    witness_violation(a.carrier(), b.carrier(), sigma)
}

pub(crate) fn unit_laws(s: &mut Sampler) -> Result<f64> {
    let (k, l) = (s.dim(0), s.dim(0));
    let f = morphism(s, k, l)?;
    let left = int_compose(&Int0Morphism::identity(k), &f)?;
    let right = int_compose(&f, &Int0Morphism::identity(l))?;
    Ok(left.distance(&f).max(right.distance(&f)))
}

pub(crate) fn associativity(s: &mut Sampler) -> Result<f64> {
    let (k, l, m, n) = (s.dim(0), s.dim(0), s.dim(0), s.dim(0));
    let f = morphism(s, k, l)?;
    let g = morphism(s, l, m)?;
    let h = morphism(s, m, n)?;
    let lhs = int_compose(&int_compose(&f, &g)?, &h)?;
    let rhs = int_compose(&f, &int_compose(&g, &h)?)?;
    Ok(lhs.distance(&rhs))
}

/// `(f ⊗ g) ; (f′ ⊗ g′) = (f ; f′) ⊗ (g ; g′)`
pub(crate) fn bifunctoriality(s: &mut Sampler) -> Result<f64> {
    let (k, l, m) = (s.dim(0), s.dim(0), s.dim(0));
    let (k2, l2, m2) = (s.dim(0), s.dim(0), s.dim(0));
    let (hf, hg, hf2, hg2) = (s.dim(1), s.dim(1), s.dim(1), s.dim(1));
    let f = s.morphism(hf, k, l)?;
    let g = s.morphism(hg, k2, l2)?;
    let f2 = s.morphism(hf2, l, m)?;
    let g2 = s.morphism(hg2, l2, m2)?;
    let lhs = int_compose(&int_tensor(&f, &g)?, &int_tensor(&f2, &g2)?)?;
    let rhs = int_tensor(&int_compose(&f, &f2)?, &int_compose(&g, &g2)?)?;
    // lhs state (f, g, f′, g′), rhs state (f, f′, g, g′)
    Ok(up_to(&lhs, &rhs, &middle_swap(hf, hg, hf2, hg2)))
}

/// Both triangle composites of the compact structure are identities.
pub(crate) fn triangles(s: &mut Sampler) -> Result<f64> {
    let a = s.dim(0);
    let (d, e) = int_units(a);
    let id = Int0Morphism::identity(a);
    let first = int_compose(&int_tensor(&d, &id)?, &int_tensor(&id, &e)?)?;
    let second = int_compose(&int_tensor(&id, &d)?, &int_tensor(&e, &id)?)?;
    Ok(first.distance(&id).max(second.distance(&id)))
}

/// Complete symmetry: `d_A = d_A ; c_{A,A}`,
/// `d_{A⊕B} = (d_A ⊗ d_B) ; (1_A ⊗ c_{A,B} ⊗ 1_B)`, `(f ⊗ g)* = f* ⊗ g*` and
/// `(c_{A,B})* = c_{B,A}`.
pub(crate) fn complete_symmetry(s: &mut Sampler) -> Result<f64> {
    let (a, b) = (s.dim(0), s.dim(0));
    let (da, _) = int_units(a);
    let (db, _) = int_units(b);
    let (dab, _) = int_units(a + b);
    let self_dual = int_compose(&da, &int_symmetry(a, a))?.distance(&da);

    let (ia, ib) = (Int0Morphism::identity(a), Int0Morphism::identity(b));
    let shuffle = int_tensor(&int_tensor(&ia, &int_symmetry(a, b))?, &ib)?;
    let sum_units = int_compose(&int_tensor(&da, &db)?, &shuffle)?.distance(&dab);

    let (k, l, k2, l2) = (s.dim(0), s.dim(0), s.dim(0), s.dim(0));
    let f = morphism(s, k, l)?;
    let g = morphism(s, k2, l2)?;
    let dual_tensor = int_dagger(&int_tensor(&f, &g)?)
        .distance(&int_tensor(&int_dagger(&f), &int_dagger(&g))?);

    let dual_symmetry = int_dagger(&int_symmetry(a, b)).distance(&int_symmetry(b, a));
    Ok(self_dual.max(sum_units).max(dual_tensor).max(dual_symmetry))
}

/// The dagger compact square: `d_A ; c_{A,A} = e_A*` and `e_A = c_{A,A} ; e_A`.
pub(crate) fn dagger_compact(s: &mut Sampler) -> Result<f64> {
    let a = s.dim(0);
    let (d, e) = int_units(a);
    let c = int_symmetry(a, a);
    let top = int_compose(&d, &c)?.distance(&int_dagger(&e));
    let bottom = int_compose(&c, &e)?.distance(&e);
    Ok(top.max(bottom))
}

/// `f** = f` and `(f ; g)* = g* ; f*`.
pub(crate) fn dagger_laws(s: &mut Sampler) -> Result<f64> {
    let (k, l, m) = (s.dim(0), s.dim(0), s.dim(0));
    let (hf, hg) = (s.dim(1), s.dim(1));
    let f = s.morphism(hf, k, l)?;
    let g = s.morphism(hg, l, m)?;
    let involution = int_dagger(&int_dagger(&f)).distance(&f);
    let lhs = int_dagger(&int_compose(&f, &g)?);
    let rhs = int_compose(&int_dagger(&g), &int_dagger(&f))?;
    // lhs state (f, g), rhs state (g, f)
    let contra = up_to(&lhs, &rhs, &tensor_swap(hf, hg));
    Ok(involution.max(contra))
}

fn automaton(s: &mut Sampler, k: usize) -> UnitaryDqta {
    let h = s.dim(1);
    s.unitary_dqta(h, k)
}

pub(crate) fn functor_identity(s: &mut Sampler) -> Result<f64> {
    let k = s.dim(0);
    let id = UnitaryDqta::new(identity_automaton(k))?;
    Ok(bidirectional_morphism(&id)?.distance(&Int0Morphism::identity(k)))
}

/// `F(t₁ ; t₂) = F(t₁) ; F(t₂)` up to reordering the four state factors.
pub(crate) fn functor_composition(s: &mut Sampler) -> Result<f64> {
    let k = s.dim(0);
    let t1 = automaton(s, k);
    let t2 = automaton(s, k);
    let (h1, h2) = (t1.h(), t2.h());
    let both = UnitaryDqta::new(cascade(&t1, &t2)?)?;
    let lhs = bidirectional_morphism(&both)?;
    let rhs = int_compose(&bidirectional_morphism(&t1)?, &bidirectional_morphism(&t2)?)?;
    // lhs state (a, b, a′, b′), rhs state (a, a′, b, b′)
    Ok(up_to(&lhs, &rhs, &middle_swap(h1, h2, h1, h2)))
}

/// `F(t†) = F(t)*` up to swapping the two copies of the state space.
pub(crate) fn functor_dagger(s: &mut Sampler) -> Result<f64> {
    let k = s.dim(0);
    let t = automaton(s, k);
    let lhs = bidirectional_morphism(&dagger_dqta(&t))?;
    let rhs = int_dagger(&bidirectional_morphism(&t)?);
    Ok(up_to(&lhs, &rhs, &tensor_swap(t.h(), t.h())))
}

/// `F(Tr^U t) = Tr^U F(t)` with the canonical trace of the compact structure.
pub(crate) fn functor_trace(s: &mut Sampler) -> Result<f64> {
    let (u, a) = (s.dim(0), s.dim(0));
    let t = automaton(s, u + a);
    let traced = UnitaryDqta::new(feedback_dqta(&t, u)?)?;
    let lhs = bidirectional_morphism(&traced)?;
    let rhs = canonical_trace(&bidirectional_morphism(&t)?, u)?;
    Ok(lhs.distance(&rhs))
}

/// `F(t₁ ⊞ t₂) = F(t₁) ⊗ F(t₂)` up to reordering the state factors.
pub(crate) fn functor_tensor(s: &mut Sampler) -> Result<f64> {
    let (k1, k2) = (s.dim(0), s.dim(0));
    let t1 = automaton(s, k1);
    let t2 = automaton(s, k2);
    let (h1, h2) = (t1.h(), t2.h());
    let both = UnitaryDqta::new(turing_tensor(&t1, &t2)?)?;
    let lhs = bidirectional_morphism(&both)?;
    let rhs = int_tensor(&bidirectional_morphism(&t1)?, &bidirectional_morphism(&t2)?)?;
    Ok(up_to(&lhs, &rhs, &middle_swap(h1, h2, h1, h2)))
}

/// `t` is read back from `F(t)`: the block of `t ⊞ t†` on the `K` input with
/// the second state factor at 0 is `τ` itself, so `F` is injective.
pub(crate) fn functor_injective(s: &mut Sampler) -> Result<f64> {
    let k = s.dim(0);
    let t = automaton(s, k);
    let f = bidirectional_morphism(&t)?;
    let (h, n) = (t.h(), 2 * k);
    let tau = f.carrier().tau();
    let read = Operator::from_matrix(nalgebra::DMatrix::from_fn(h * k, h * k, |i, j| {
        let (a2, y) = (i / k, i % k);
        let (a, x) = (j / k, j % k);
        tau.get(a2 * h * n + y, a * h * n + x)
    }))?;
    Ok(read.max_diff(t.tau()))
}
