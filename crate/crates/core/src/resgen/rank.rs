use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{slot_map, slot_names, Layout};
use crate::linalg::exact_rank;
use crate::linalg::field::primes_below;
use crate::poly::SystemTemplate;

/// Slot values over Z/p, including the hidden slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpInstance {
    pub p: u64,
    pub slots: BTreeMap<String, u64>,
}

/// Exact rank decisions by random instantiation over several primes.
/// A condition holds only if it holds in every trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankProtocol {
    pub primes: Vec<u64>,
    pub per_prime: usize,
    pub seed: u64,
}

impl RankProtocol {
    /// Three ~31-bit primes, two assignments each.
    pub fn standard(seed: u64) -> Self {
        RankProtocol {
            primes: primes_below(1 << 31, 3),
            per_prime: 2,
            seed,
        }
    }

    /// Three further primes, disjoint from the standard ones.
    pub fn fresh(seed: u64) -> Self {
        RankProtocol {
            primes: primes_below(1 << 31, 6).split_off(3),
            per_prime: 2,
            seed: seed ^ 0x9e37_79b9_7f4a_7c15,
        }
    }

    pub fn instances(&self, aug: &SystemTemplate) -> Vec<FpInstance> {
        let names = slot_names(aug);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(0x72616e6b);
        let mut out = Vec::new();
        for &p in &self.primes {
            for _ in 0..self.per_prime {
                let vals: Vec<u64> = names.iter().map(|_| rng.random_range(1..p)).collect();
                out.push(FpInstance {
                    p,
                    slots: slot_map(&names, &vals),
                });
            }
        }
        out
    }

    /// Full column rank of C(u0), and of A12 when `prop1` is set.
    pub fn check(&self, aug: &SystemTemplate, layout: &Layout, prop1: bool) -> bool {
        if layout.n_rows() < layout.n_cols() {
            return false;
        }
        let b2 = layout.b2_cols();
        if prop1 && layout.upper < b2.len() {
            return false;
        }
        let upper = layout.upper_rows();
        self.instances(aug).iter().all(|inst| {
            let m = layout.fp_matrix(aug, inst);
            if prop1 && exact_rank(&m.select(&upper, &b2)) != b2.len() {
                return false;
            }
            exact_rank(&m) == layout.n_cols()
        })
    }

    /// Rank of C(u0) in each trial.
    pub fn ranks(&self, aug: &SystemTemplate, layout: &Layout) -> Vec<usize> {
        self.instances(aug)
            .iter()
            .map(|inst| exact_rank(&layout.fp_matrix(aug, inst)))
            .collect()
    }
}
