//! Self-dual objects of the Int construction over unitary automata.
//!
//! An object is a rank `K` standing for the pair `(K, K)`. A morphism
//! `(K, K) -> (L, L)` is carried by a unitary automaton `K ⊕ L -> L ⊕ K`.
//! Composition feeds back both copies of the middle object; everything else
//! is permutation routing around the Turing tensor.

use crate::dqta::{
    dagger_dqta, feedback_dqta, identity_automaton, make_dqta, turing_tensor, Dqta, UnitaryDqta,
    COMPOSITE_TOL, CONSTRUCTION_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{self, block_permutation_map, kron, unitarity_defect, Operator};

/// A quantum Turing automaton: unitary `τ: H ⊗ N -> H ⊗ N` of rank `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Qta {
    h: usize,
    n: usize,
    tau: Operator,
}

impl Qta {
    pub fn new(h: usize, n: usize, tau: Operator) -> Result<Self> {
        Self::checked(h, n, tau, CONSTRUCTION_TOL)
    }

    fn checked(h: usize, n: usize, tau: Operator, tol: f64) -> Result<Self> {
        if tau.shape() != (h * n, h * n) {
            return Err(Error::Shape {
                context: "qta transition (expected (h*n) x (h*n))",
                left: tau.shape(),
                right: (h * n, h * n),
            });
        }
        let defect = unitarity_defect(&tau);
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { h, n, tau })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Rank, the dimension of the interface `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> &Operator {
        &self.tau
    }
}

/// A morphism `(src, src) -> (dst, dst)` of Int₀.
#[derive(Clone, Debug, PartialEq)]
pub struct Int0Morphism {
    src: usize,
    dst: usize,
    carrier: UnitaryDqta,
}

impl Int0Morphism {
    /// Checks that the carrier has input `src + dst` and output `dst + src`.
    pub fn new(src: usize, dst: usize, carrier: UnitaryDqta) -> Result<Self> {
        if carrier.k() != src + dst || carrier.l() != src + dst {
            return Err(Error::Interface(format!(
                "carrier with interfaces ({}, {}) for a morphism {src} -> {dst}",
                carrier.k(),
                carrier.l()
            )));
        }
        Ok(Self { src, dst, carrier })
    }

    pub fn identity(k: usize) -> Self {
        Self {
            src: k,
            dst: k,
            carrier: UnitaryDqta::trusted(identity_automaton(2 * k)),
        }
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn dst(&self) -> usize {
        self.dst
    }

    pub fn carrier(&self) -> &UnitaryDqta {
        &self.carrier
    }

    /// Max-norm distance between carriers; infinite unless the state space
    /// and both objects agree.
    pub fn distance(&self, other: &Int0Morphism) -> f64 {
        if self.src != other.src || self.dst != other.dst || self.carrier.h() != other.carrier.h()
        {
            return f64::INFINITY;
        }
        self.carrier.tau().max_diff(other.carrier.tau())
    }
}

/// Wraps a composite whose transition is unitary up to rounding.
fn composite(src: usize, dst: usize, t: Dqta) -> Result<Int0Morphism> {
    let carrier = UnitaryDqta::checked(t, COMPOSITE_TOL)?;
    Int0Morphism::new(src, dst, carrier)
}

/// Name of `f: (K,K) -> (L,L)`: the QTA of rank `K ⊕ L` obtained by
/// post-composing the carrier with `I_H ⊗ κ_{L,K}`.
pub fn name_of(f: &Int0Morphism) -> Qta {
    let post = block_permutation_map(&[f.dst, f.src], &[1, 0]).expect("two blocks");
    let ident: Vec<usize> = (0..f.src + f.dst).collect();
    let t = f.carrier.route(&ident, &post).expect("sizes match the carrier");
    Qta {
        h: t.h(),
        n: f.src + f.dst,
        tau: t.into_tau(),
    }
}

/// Inverse of [`name_of`] for the split `n = src + dst`.
pub fn unname(q: &Qta, src: usize, dst: usize) -> Result<Int0Morphism> {
    if src + dst != q.n {
        return Err(Error::Interface(format!(
            "rank {} does not split as {src} + {dst}",
            q.n
        )));
    }
    let t = make_dqta(q.h, q.n, q.n, q.tau.clone())?;
    let post = block_permutation_map(&[src, dst], &[1, 0])?;
    let ident: Vec<usize> = (0..q.n).collect();
    let t = t.route(&ident, &post)?;
    Int0Morphism::new(src, dst, UnitaryDqta::trusted(t))
}

/// Composite `f` then `g`.
///
/// Over `f.carrier ⊞ g.carrier`, with input blocks `[K, L_f, L_g, M]` and
/// output blocks `[L_f, K, M, L_g]`, both `L` wires are routed to the front
/// (`L_f` output into `L_g` input first, then `L_g` output back into `L_f`
/// input) and fed back.
pub fn int_compose(f: &Int0Morphism, g: &Int0Morphism) -> Result<Int0Morphism> {
    if f.dst != g.src {
        return Err(Error::Interface(format!(
            "composing into {} after {}",
            g.src, f.dst
        )));
    }
    let (k, l, m) = (f.src, f.dst, g.dst);
    let t = turing_tensor(&f.carrier, &g.carrier)?;
    // new input [L_g, L_f, K, M] -> tensor input [K, L_f, L_g, M]
    let pre = block_permutation_map(&[l, l, k, m], &[2, 1, 0, 3])?;
    // tensor output [L_f, K, M, L_g] -> [L_f, L_g, M, K]
    let post = block_permutation_map(&[l, k, m, l], &[0, 3, 2, 1])?;
    let routed = t.route(&pre, &post)?;
    composite(k, m, feedback_dqta(&routed, 2 * l)?)
}

/// Monoidal product with source `K ⊕ K′` and target `L ⊕ L′`.
pub fn int_tensor(f: &Int0Morphism, g: &Int0Morphism) -> Result<Int0Morphism> {
    let (k, l, k2, l2) = (f.src, f.dst, g.src, g.dst);
    let t = turing_tensor(&f.carrier, &g.carrier)?;
    let pre = block_permutation_map(&[k, k2, l, l2], &[0, 2, 1, 3])?;
    let post = block_permutation_map(&[l, k, l2, k2], &[0, 2, 1, 3])?;
    composite(k + k2, l + l2, t.route(&pre, &post)?)
}

/// Dagger `f* : (L,L) -> (K,K)`, the carrier conjugated by `κ_{L,K}`.
pub fn int_dagger(f: &Int0Morphism) -> Int0Morphism {
    let (k, l) = (f.src, f.dst);
    let pre = block_permutation_map(&[l, k], &[1, 0]).expect("two blocks");
    let post = block_permutation_map(&[l, k], &[1, 0]).expect("two blocks");
    let t = f.carrier.route(&pre, &post).expect("sizes match the carrier");
    Int0Morphism {
        src: l,
        dst: k,
        carrier: UnitaryDqta::trusted(t),
    }
}

/// Symmetry `c_{A,B}: A ⊕ B -> B ⊕ A`.
pub fn int_symmetry(a: usize, b: usize) -> Int0Morphism {
    let tau = linalg::block_permutation(&[a, b, b, a], &[1, 0, 3, 2]).expect("four blocks");
    let n = 2 * (a + b);
    Int0Morphism {
        src: a + b,
        dst: a + b,
        carrier: UnitaryDqta::trusted(make_dqta(1, n, n, tau).expect("permutation")),
    }
}

/// Unit `d: 0 -> A ⊕ A` and counit `e: A ⊕ A -> 0`, both carried by `κ_{A,A}`.
pub fn int_units(a: usize) -> (Int0Morphism, Int0Morphism) {
    let carrier =
        UnitaryDqta::trusted(make_dqta(1, 2 * a, 2 * a, linalg::sum_swap(a, a)).expect("swap"));
    let d = Int0Morphism {
        src: 0,
        dst: 2 * a,
        carrier: carrier.clone(),
    };
    let e = Int0Morphism {
        src: 2 * a,
        dst: 0,
        carrier,
    };
    (d, e)
}

/// Canonical trace of `f: U ⊕ A -> U ⊕ B` over the leading `U`:
/// `(d_U ⊗ 1_A) ; (1_U ⊗ f) ; (e_U ⊗ 1_B)`.
pub fn canonical_trace(f: &Int0Morphism, u: usize) -> Result<Int0Morphism> {
    if u > f.src || u > f.dst {
        return Err(Error::Interface(format!(
            "trace over {u} of a morphism {} -> {}",
            f.src, f.dst
        )));
    }
    if u == 0 {
        return Ok(f.clone());
    }
    let (a, b) = (f.src - u, f.dst - u);
    let (d, e) = int_units(u);
    let open = int_tensor(&d, &Int0Morphism::identity(a))?;
    let middle = int_tensor(&Int0Morphism::identity(u), f)?;
    let close = int_tensor(&e, &Int0Morphism::identity(b))?;
    int_compose(&int_compose(&open, &middle)?, &close)
}

/// `t ⊞ t†` as a morphism `(K,K) -> (L,L)`.
pub fn bidirectional_morphism(t: &UnitaryDqta) -> Result<Int0Morphism> {
    let both = turing_tensor(t, &dagger_dqta(t))?;
    composite(t.k(), t.l(), both)
}

/// The name of `t ⊞ t†`, a QTA of rank `K ⊕ L`.
pub fn bidirectionalize(t: &UnitaryDqta) -> Result<Qta> {
    Ok(name_of(&bidirectional_morphism(t)?))
}

/// `I_{h₁} ⊗ π_{h₂,h₃} ⊗ I_{h₄}`, swapping two middle state factors.
pub fn middle_swap(h1: usize, h2: usize, h3: usize, h4: usize) -> Operator {
    kron(
        &kron(&Operator::identity(h1), &linalg::tensor_swap(h2, h3)),
        &Operator::identity(h4),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dqta::{cascade, iso_witness_check, symmetry_automaton};
    use crate::linalg::random_unitary;

    fn rand_morphism(h: usize, src: usize, dst: usize, seed: u64) -> Int0Morphism {
        let n = src + dst;
        let t = make_dqta(h, n, n, random_unitary(h * n, seed)).unwrap();
        Int0Morphism::new(src, dst, UnitaryDqta::new(t).unwrap()).unwrap()
    }

    #[test]
    fn name_examples() {
        let id = Int0Morphism::identity(2);
        let q = name_of(&id);
        assert_eq!(q.tau(), &linalg::sum_swap(2, 2));
        for seed in 0..10 {
            let f = rand_morphism(2, 1, 2, seed);
            let back = unname(&name_of(&f), 1, 2).unwrap();
            assert_eq!(back, f);
        }
        assert!(unname(&q, 1, 2).is_err());
    }

    #[test]
    fn composition_units() {
        for seed in 0..10 {
            let f = rand_morphism(2, 1, 2, seed);
            let left = int_compose(&Int0Morphism::identity(1), &f).unwrap();
            let right = int_compose(&f, &Int0Morphism::identity(2)).unwrap();
            assert!(left.distance(&f) < 1e-8);
            assert!(right.distance(&f) < 1e-8);
        }
    }

    #[test]
    fn composition_associative() {
        for seed in 0..10 {
            let f = rand_morphism(2, 1, 2, seed);
            let g = rand_morphism(1, 2, 1, seed + 50);
            let h = rand_morphism(2, 1, 2, seed + 90);
            let fg_h = int_compose(&int_compose(&f, &g).unwrap(), &h).unwrap();
            let f_gh = int_compose(&f, &int_compose(&g, &h).unwrap()).unwrap();
            assert!(fg_h.distance(&f_gh) < 1e-8, "seed {seed}");
        }
    }

    #[test]
    fn composition_mismatch() {
        let f = rand_morphism(1, 1, 2, 0);
        assert!(int_compose(&f, &f).is_err());
    }

    #[test]
    fn tensor_examples() {
        let f = rand_morphism(2, 1, 2, 3);
        let out = int_tensor(&f, &Int0Morphism::identity(0)).unwrap();
        assert!(out.distance(&f) < 1e-15);
        let out = int_tensor(&Int0Morphism::identity(0), &f).unwrap();
        assert!(out.distance(&f) < 1e-15);
        let ids = int_tensor(&Int0Morphism::identity(1), &Int0Morphism::identity(2)).unwrap();
        assert_eq!(ids, Int0Morphism::identity(3));
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(int_dagger(&Int0Morphism::identity(2)), Int0Morphism::identity(2));
        let f = rand_morphism(2, 1, 2, 8);
        assert!(int_dagger(&int_dagger(&f)).distance(&f) < 1e-10);
    }

    #[test]
    fn units_examples() {
        let (d, e) = int_units(1);
        assert_eq!(d.carrier(), e.carrier());
        assert_eq!((d.src(), d.dst(), e.src(), e.dst()), (0, 2, 2, 0));
        // d_A = d_A ; c_{A,A}
        let dc = int_compose(&d, &int_symmetry(1, 1)).unwrap();
        assert!(dc.distance(&d) < 1e-10);
    }

    #[test]
    fn canonical_trace_examples() {
        let f = rand_morphism(2, 2, 1, 6);
        assert_eq!(canonical_trace(&f, 0).unwrap(), f);
        for a in 0..3 {
            let yank = canonical_trace(&int_symmetry(a, a), a).unwrap();
            assert!(yank.distance(&Int0Morphism::identity(a)) < 1e-8, "a = {a}");
        }
        assert!(canonical_trace(&f, 2).is_err());
    }

    #[test]
    fn bidirectionalize_examples() {
        let id = UnitaryDqta::new(identity_automaton(3)).unwrap();
        let q = bidirectionalize(&id).unwrap();
        assert_eq!(q.n(), 6);
        assert_eq!(q.tau(), &linalg::sum_swap(3, 3));
        let sym = UnitaryDqta::new(symmetry_automaton(1, 1)).unwrap();
        let q = bidirectionalize(&sym).unwrap();
        assert!(unitarity_defect(q.tau()) < 1e-15);
    }

    #[test]
    fn functor_preserves_composition_up_to_middle_swap() {
        for seed in 0..5 {
            let t1 = UnitaryDqta::new(make_dqta(2, 2, 2, random_unitary(4, seed)).unwrap()).unwrap();
            let t2 =
                UnitaryDqta::new(make_dqta(2, 2, 2, random_unitary(4, seed + 9)).unwrap()).unwrap();
            let lhs = bidirectional_morphism(
                &UnitaryDqta::new(cascade(&t1, &t2).unwrap()).unwrap(),
            )
            .unwrap();
            let rhs = int_compose(
                &bidirectional_morphism(&t1).unwrap(),
                &bidirectional_morphism(&t2).unwrap(),
            )
            .unwrap();
            // lhs state (a, b, a', b'), rhs state (a, a', b, b')
            let sigma = middle_swap(2, 2, 2, 2);
            assert!(iso_witness_check(&lhs.carrier, &rhs.carrier, &sigma, 1e-8).unwrap());
        }
    }
}
