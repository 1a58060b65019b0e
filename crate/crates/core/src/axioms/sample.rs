use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dqta::{make_dqta, Dqta, UnitaryDqta};
use crate::error::Result;
use crate::intcat::Int0Morphism;
use crate::linalg::{random_isometry_with, random_unitary_with, Operator};
use crate::trace::BlockMap;

/// Random instance generator for one law instance.
///
/// In edge mode every dimension takes its lower bound, which is zero
/// wherever the law allows it.
pub(crate) struct Sampler {
    rng: ChaCha8Rng,
    edge: bool,
    max_dim: usize,
}

impl Sampler {
    pub fn new(seed: u64, edge: bool, max_dim: usize) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            edge,
            max_dim,
        }
    }

    /// Uniform in `max(lo, 1)..=max_dim`, or `lo` in edge mode.
    pub fn dim(&mut self, lo: usize) -> usize {
        if self.edge {
            return lo;
        }
        let lo = lo.max(1);
        self.rng.random_range(lo..=self.max_dim.max(lo))
    }

    /// Extra dimensions in `0..=up_to` (0 in edge mode).
    pub fn extra(&mut self, up_to: usize) -> usize {
        if self.edge {
            0
        } else {
            self.rng.random_range(0..=up_to)
        }
    }

    pub fn isometry(&mut self, rows: usize, cols: usize) -> Operator {
        random_isometry_with(&mut self.rng, rows, cols).expect("rows >= cols")
    }

    pub fn unitary(&mut self, n: usize) -> Operator {
        random_unitary_with(&mut self.rng, n)
    }

    /// Random isometry `U ⊕ K -> U ⊕ L` with `L` at most two dimensions
    /// larger than `K`.
    pub fn block_map(&mut self) -> BlockMap {
        let u = self.dim(0);
        let k = self.dim(0);
        let l = k + self.extra(2);
        self.block_map_with(u, k, l)
    }

    pub fn block_map_with(&mut self, u: usize, k: usize, l: usize) -> BlockMap {
        let op = self.isometry(u + l, u + k);
        BlockMap::new(op, u, k, l).expect("shape by construction")
    }

    pub fn dqta(&mut self, h: usize, k: usize, l: usize) -> Dqta {
        make_dqta(h, k, l, self.isometry(h * l, h * k)).expect("random isometry")
    }

    pub fn unitary_dqta(&mut self, h: usize, k: usize) -> UnitaryDqta {
        UnitaryDqta::new(make_dqta(h, k, k, self.unitary(h * k)).expect("random unitary"))
            .expect("random unitary")
    }

    pub fn morphism(&mut self, h: usize, src: usize, dst: usize) -> Result<Int0Morphism> {
        let carrier = self.unitary_dqta(h, src + dst);
        Int0Morphism::new(src, dst, carrier)
    }
}
