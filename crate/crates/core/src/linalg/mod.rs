//! Dense complex-matrix kernel.
//!
//! Conventions used throughout the crate:
//!
//! * An operator `f: X -> Y` acts on column vectors and has `dim Y` rows and
//!   `dim X` columns.
//! * [`compose_then`]`(f, g)` applies `f` first and then `g`; its matrix is
//!   `M_g · M_f`.
//! * The basis of `H ⊗ K` is lexicographic with the `H` index outermost, so
//!   `(i, j)` sits at position `i·dim K + j`.
//! * The basis of `H ⊕ K` is the concatenation, `H` first.

mod operator;
mod pinv;
mod random;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use operator::Operator;
pub use pinv::{kernel_on_top, mp_inverse, mp_inverse_floored, KernelOnTop};
pub use random::{
    random_gaussian, random_isometry, random_isometry_with, random_unitary, random_unitary_with,
};

pub(crate) use operator::is_zero;

/// Default relative cutoff for rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Dimensions of the summands of an orthogonal sum `K₁ ⊕ … ⊕ Kₙ`.
///
/// A zero part is the zero space, the unit for `⊕`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SpaceDims {
    parts: Vec<usize>,
}

impl SpaceDims {
    pub fn new(parts: impl Into<Vec<usize>>) -> Self {
        Self {
            parts: parts.into(),
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Offset of each summand inside the concatenated basis.
    pub fn offsets(&self) -> Vec<usize> {
        self.parts
            .iter()
            .scan(0, |acc, &p| {
                let off = *acc;
                *acc += p;
                Some(off)
            })
            .collect()
    }
}

impl From<Vec<usize>> for SpaceDims {
    fn from(parts: Vec<usize>) -> Self {
        Self::new(parts)
    }
}

/// Left-to-right composite: apply `f`, then `g`.
pub fn compose_then(f: &Operator, g: &Operator) -> Result<Operator> {
    if f.rows() != g.cols() {
        return Err(Error::Shape {
            context: "compose_then",
            left: f.shape(),
            right: g.shape(),
        });
    }
    g.matmul(f)
}

/// Conjugate transpose.
pub fn adjoint(f: &Operator) -> Operator {
    Operator::from_matrix_unchecked(f.as_matrix().adjoint())
}

/// Kronecker product, `f`'s indices outermost.
pub fn kron(f: &Operator, g: &Operator) -> Operator {
    Operator::from_matrix_unchecked(f.as_matrix().kronecker(g.as_matrix()))
}

/// Block-diagonal sum `f ⊕ g`.
pub fn dsum(f: &Operator, g: &Operator) -> Operator {
    let (r1, c1) = f.shape();
    let (r2, c2) = g.shape();
    let mut m = DMatrix::zeros(r1 + r2, c1 + c2);
    m.view_mut((0, 0), (r1, c1)).copy_from(f.as_matrix());
    m.view_mut((r1, c1), (r2, c2)).copy_from(g.as_matrix());
    Operator::from_matrix_unchecked(m)
}

/// Index map of the symmetry `H_m ⊗ H_n -> H_n ⊗ H_m`.
pub fn tensor_swap_map(m: usize, n: usize) -> Vec<usize> {
    let mut map = vec![0; m * n];
    for i in 0..m {
        for j in 0..n {
            map[i * n + j] = j * m + i;
        }
    }
    map
}

/// The symmetry `π: H_m ⊗ H_n -> H_n ⊗ H_m`, sending `(i, j)` to `(j, i)`.
pub fn tensor_swap(m: usize, n: usize) -> Operator {
    Operator::permutation(&tensor_swap_map(m, n)).expect("swap map is a permutation")
}

/// The additive symmetry `κ: K ⊕ L -> L ⊕ K` with `dim K = m`, `dim L = n`.
pub fn sum_swap(m: usize, n: usize) -> Operator {
    block_permutation(&[m, n], &[1, 0]).expect("two-block swap is a permutation")
}

/// Index map of the distributivity isomorphism
/// `H ⊗ (K₁ ⊕ … ⊕ Kₙ) -> (H ⊗ K₁) ⊕ … ⊕ (H ⊗ Kₙ)`.
pub fn distribute_map(h: usize, parts: &SpaceDims) -> Vec<usize> {
    let total = parts.total();
    let offsets = parts.offsets();
    let mut map = vec![0; h * total];
    for (&kj, &off) in parts.parts().iter().zip(&offsets) {
        for i in 0..h {
            for x in 0..kj {
                map[i * total + off + x] = h * off + i * kj + x;
            }
        }
    }
    map
}

/// Distributivity `H ⊗ (K₁ ⊕ … ⊕ Kₙ) -> (H ⊗ K₁) ⊕ … ⊕ (H ⊗ Kₙ)` as a
/// permutation operator.
pub fn distribute(h: usize, parts: &SpaceDims) -> Operator {
    Operator::permutation(&distribute_map(h, parts)).expect("distribute map is a permutation")
}

/// Index map of [`block_permutation`].
pub fn block_permutation_map(parts: &[usize], order: &[usize]) -> Result<Vec<usize>> {
    if order.len() != parts.len() {
        return Err(Error::Invalid(format!(
            "block order {order:?} does not match {} blocks",
            parts.len()
        )));
    }
    operator::check_permutation(order)?;
    let in_off = SpaceDims::new(parts.to_vec()).offsets();
    let mut map = vec![0; parts.iter().sum()];
    let mut out_off = 0;
    for &b in order {
        for x in 0..parts[b] {
            map[in_off[b] + x] = out_off + x;
        }
        out_off += parts[b];
    }
    Ok(map)
}

/// Permutation of `⊕`-blocks: the input is the sum of blocks of sizes `parts`
/// and output block `i` is input block `order[i]`.
///
/// Every such operator is a composite of additive symmetries `κ`.
pub fn block_permutation(parts: &[usize], order: &[usize]) -> Result<Operator> {
    Operator::permutation(&block_permutation_map(parts, order)?)
}

/// Max-norm of `f†f − I`. Zero exactly for isometries.
pub fn isometry_defect(f: &Operator) -> f64 {
    let gram = adjoint(f)
        .matmul(f)
        .expect("adjoint product is always conformable");
    gram.max_diff(&Operator::identity(f.cols()))
}

/// Unitarity defect: infinite for non-square operators, otherwise the larger
/// of the isometry defects of `f` and `f†`.
pub fn unitarity_defect(f: &Operator) -> f64 {
    if !f.is_square() {
        return f64::INFINITY;
    }
    isometry_defect(f).max(isometry_defect(&adjoint(f)))
}

/// Neumann partial sum `Σ_{i=0}^{n} aⁱ`.
pub fn neumann_partial(a: &Operator, n: usize) -> Result<Operator> {
    if !a.is_square() {
        return Err(Error::Shape {
            context: "neumann_partial",
            left: a.shape(),
            right: (a.cols(), a.rows()),
        });
    }
    let mut power = Operator::identity(a.rows());
    let mut sum = power.clone();
    for _ in 0..n {
        power = a.matmul(&power)?;
        sum = sum.add(&power)?;
    }
    Ok(sum)
}

/// Complex helper: `re + i·im`.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
