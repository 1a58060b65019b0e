use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::{is_zero, Operator};
use crate::error::{Error, Result};

/// Singular value decomposition `m = u · diag(s) · v†`, thin when `thin`.
///
/// Computed with faer; the complex SVD of nalgebra loses accuracy on exactly
/// rank-deficient input, which is the case feedback cares about.
pub(crate) struct Svd {
    pub u: DMatrix<Complex64>,
    pub s: Vec<f64>,
    pub v: DMatrix<Complex64>,
}

pub(crate) fn svd(m: &DMatrix<Complex64>, thin: bool) -> Svd {
    let (rows, cols) = m.shape();
    let f = faer::Mat::<Complex64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let dec = if thin { f.thin_svd() } else { f.svd() }.expect("SVD of a finite matrix");
    let (u, v, d) = (dec.U(), dec.V(), dec.S().column_vector());
    Svd {
        u: DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        s: (0..d.nrows()).map(|i| d[i].re).collect(),
        v: DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    }
}

/// Moore-Penrose generalized inverse via singular value decomposition.
///
/// Singular values above `tol · σ_max` are inverted, the rest are zeroed. The
/// zero operator maps to the zero operator.
pub fn mp_inverse(f: &Operator, tol: f64) -> Operator {
    mp_inverse_floored(f, tol, 0.0)
}

/// As [`mp_inverse`], but with the cutoff `tol · max(σ_max, floor)`.
///
/// Feedback works with `I − A` for a contraction `A`, whose natural scale is 1;
/// a floor of 1 keeps an `A` equal to `I` up to rounding from being read as
/// full rank.
pub fn mp_inverse_floored(f: &Operator, tol: f64, floor: f64) -> Operator {
    let (m, n) = f.shape();
    if m == 0 || n == 0 {
        return Operator::zeros(n, m);
    }
    let a = f.as_matrix();
    // Block structure under row/column permutations is exploited exactly: the
    // pseudoinverse of a direct sum is the direct sum of pseudoinverses.
    let comps = components(a);
    let mut pieces = Vec::with_capacity(comps.len());
    let mut smax: f64 = 0.0;
    for (rows, cols) in comps {
        let sub = DMatrix::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])]);
        let dec = svd(&sub, true);
        smax = dec.s.iter().fold(smax, |acc, &s| acc.max(s));
        pieces.push((rows, cols, dec));
    }
    let cutoff = tol * smax.max(floor);
    let mut out = DMatrix::<Complex64>::zeros(n, m);
    if smax <= cutoff {
        return Operator::from_matrix_unchecked(out);
    }
    for (rows, cols, dec) in pieces {
        let (u, v) = (&dec.u, &dec.v);
        for (s_idx, &s) in dec.s.iter().enumerate() {
            if s <= cutoff {
                continue;
            }
            let inv = 1.0 / s;
            // out += v_s · (1/s) · u_s†
            for (ci, &col) in cols.iter().enumerate() {
                let vs = v[(ci, s_idx)] * inv;
                if is_zero(vs) {
                    continue;
                }
                for (ri, &row) in rows.iter().enumerate() {
                    out[(col, row)] += vs * u[(ri, s_idx)].conj();
                }
            }
        }
    }
    Operator::from_matrix_unchecked(out)
}

/// Row and column index sets of the connected components of the bipartite
/// nonzero pattern. Components without both rows and columns are dropped.
fn components(a: &DMatrix<Complex64>) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (m, n) = a.shape();
    let mut parent: Vec<usize> = (0..m + n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..m {
            if !is_zero(a[(i, j)]) {
                let ri = find(&mut parent, i);
                let rj = find(&mut parent, m + j);
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut slot = vec![usize::MAX; m + n];
    let mut out: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for x in 0..m + n {
        let r = find(&mut parent, x);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push((Vec::new(), Vec::new()));
        }
        let entry = &mut out[slot[r]];
        if x < m {
            entry.0.push(x);
        } else {
            entry.1.push(x - m);
        }
    }
    out.retain(|(r, c)| !r.is_empty() && !c.is_empty());
    out
}

/// Unitary similarity isolating the kernel of `I − a`.
#[derive(Clone, Debug)]
pub struct KernelOnTop {
    /// Unitary whose first `r` rows span `ker(I − a)` (as conjugated vectors).
    pub s: Operator,
    /// Dimension of `ker(I − a)`.
    pub r: usize,
}

impl KernelOnTop {
    /// `s (I − a) s†`, whose first `r` columns vanish.
    pub fn transformed(&self, a: &Operator) -> Operator {
        let n = a.rows();
        let m = Operator::identity(n).sub(a).expect("square");
        self.s
            .matmul(&m)
            .and_then(|x| x.matmul(&super::adjoint(&self.s)))
            .expect("square")
    }
}

/// Computes a unitary `s` and `r = dim ker(I − a)` such that `s (I − a) s†`
/// has its first `r` columns equal to zero.
///
/// The kernel comes from the singular value decomposition of `I − a`; singular
/// values at most `tol · max(σ_max, 1)` count as zero. When `a` is a
/// contraction the first `r` rows vanish as well, giving the block form
/// `diag(0, I − a₀)`.
pub fn kernel_on_top(a: &Operator, tol: f64) -> Result<KernelOnTop> {
    if !a.is_square() {
        return Err(Error::Shape {
            context: "kernel_on_top",
            left: a.shape(),
            right: (a.cols(), a.rows()),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(KernelOnTop {
            s: Operator::identity(0),
            r: 0,
        });
    }
    let m = DMatrix::identity(n, n) - a.as_matrix();
    let dec = svd(&m, false);
    let smax = dec.s.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let cutoff = tol * smax.max(1.0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| dec.s[i].partial_cmp(&dec.s[j]).expect("finite singular values"));
    let r = order.iter().filter(|&&i| dec.s[i] <= cutoff).count();
    // rows of s are the conjugated right singular vectors, kernel first
    let s = DMatrix::from_fn(n, n, |i, j| dec.v[(j, order[i])].conj());
    Ok(KernelOnTop {
        s: Operator::from_matrix_unchecked(s),
        r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{adjoint, c, isometry_defect, random_gaussian, unitarity_defect};

    fn penrose_violation(f: &Operator, p: &Operator) -> f64 {
        let fpf = f.matmul(p).unwrap().matmul(f).unwrap();
        let pfp = p.matmul(f).unwrap().matmul(p).unwrap();
        let fp = f.matmul(p).unwrap();
        let pf = p.matmul(f).unwrap();
        fpf.max_diff(f)
            .max(pfp.max_diff(p))
            .max(fp.max_diff(&adjoint(&fp)))
            .max(pf.max_diff(&adjoint(&pf)))
    }

    #[test]
    fn diagonal_and_identity() {
        let d = Operator::real(&[[0.0, 0.0], [0.0, 2.0]]);
        let p = mp_inverse(&d, 1e-10);
        assert!(p.max_diff(&Operator::real(&[[0.0, 0.0], [0.0, 0.5]])) < 1e-15);
        let i = Operator::identity(4);
        assert!(mp_inverse(&i, 1e-10).max_diff(&i) < 1e-15);
    }

    #[test]
    fn column_vector() {
        let v = Operator::real(&[[1.0], [1.0]]);
        let p = mp_inverse(&v, 1e-10);
        assert!(p.max_diff(&Operator::real(&[[0.5, 0.5]])) < 1e-15);
        assert!(penrose_violation(&v, &p) < 1e-15);
    }

    #[test]
    fn zero_and_empty() {
        let z = Operator::zeros(2, 3);
        assert_eq!(mp_inverse(&z, 1e-10), Operator::zeros(3, 2));
        assert_eq!(mp_inverse(&Operator::zeros(0, 2), 1e-10), Operator::zeros(2, 0));
    }

    #[test]
    fn block_structured_matches_dense_definition() {
        // a permuted direct sum of a singular 2x2 block and a 1x1 block
        let f = Operator::from_rows(
            3,
            3,
            vec![
                c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0),
                c(0.0, 0.0), c(0.0, 3.0), c(0.0, 0.0),
                c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0),
            ],
        )
        .unwrap();
        let p = mp_inverse(&f, 1e-10);
        assert!(penrose_violation(&f, &p) < 1e-14);
        assert!((p.get(1, 1) - c(0.0, -1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn floor_kills_rounding_noise() {
        let noise = Operator::real(&[[1e-17, 0.0], [0.0, 2e-17]]);
        assert!(mp_inverse(&noise, 1e-10).max_abs() > 1e15);
        assert_eq!(mp_inverse_floored(&noise, 1e-10, 1.0).max_abs(), 0.0);
    }

    #[test]
    fn random_rank_deficient() {
        for seed in 0..20 {
            let a = random_gaussian(5, 2, seed);
            let b = random_gaussian(2, 4, seed + 100);
            let f = a.matmul(&b).unwrap();
            let p = mp_inverse(&f, 1e-10);
            assert!(penrose_violation(&f, &p) < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn kernel_on_top_examples() {
        let k = kernel_on_top(&Operator::identity(3), 1e-10).unwrap();
        assert_eq!(k.r, 3);
        let k = kernel_on_top(&Operator::zeros(3, 3), 1e-10).unwrap();
        assert_eq!(k.r, 0);
        let a = Operator::real(&[[1.0, 0.0], [0.0, 0.5]]);
        let k = kernel_on_top(&a, 1e-10).unwrap();
        assert_eq!(k.r, 1);
        let t = k.transformed(&a);
        assert!(t.max_diff(&Operator::real(&[[0.0, 0.0], [0.0, 0.5]])) < 1e-14);
        assert!(unitarity_defect(&k.s) < 1e-12);
    }

    #[test]
    fn kernel_on_top_rejects_rectangular() {
        assert!(kernel_on_top(&Operator::zeros(2, 3), 1e-10).is_err());
    }

    #[test]
    fn kernel_on_top_non_normal() {
        // a = [[1, 1], [0, 0]]: I − a = [[0, −1], [0, 1]] has kernel e₀
        let a = Operator::real(&[[1.0, 1.0], [0.0, 0.0]]);
        let k = kernel_on_top(&a, 1e-10).unwrap();
        assert_eq!(k.r, 1);
        let t = k.transformed(&a);
        assert!(t.block(0, 2, 0, 1).max_abs() < 1e-14);
        assert!(isometry_defect(&k.s) < 1e-12);
    }
}
