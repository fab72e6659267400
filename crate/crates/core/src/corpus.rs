//! Seeded random instances for cross-checks.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{int, Rational};
use crate::generators::{subset_lattice, Atom, SetLattice};
use crate::lattice::FiniteLattice;
use crate::ultravaluation::KappaWeights;
use crate::valuation::{valuation_from_join_irreducible_weights, Valuation};

/// A deterministic source of random lattices and weights.
#[derive(Debug, Clone)]
pub struct Corpus {
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// `n / d` with `0 <= n <= max_num`, `1 <= d <= max_den`.
    pub fn rational(&mut self, max_num: u32, max_den: u32) -> Rational {
        let n = self.rng.gen_range(0..=max_num);
        let d = self.rng.gen_range(1..=max_den.max(1));
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn positive_rational(&mut self, max_num: u32, max_den: u32) -> Rational {
        let n = self.rng.gen_range(1..=max_num.max(1));
        let d = self.rng.gen_range(1..=max_den.max(1));
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn closure_of(&mut self, ground: Vec<Atom>, max_members: usize) -> SetLattice {
        loop {
            let k = ground.len();
            let count = self.rng.gen_range(1..=4);
            let generators: Vec<Vec<Atom>> = (0..count)
                .map(|_| ground.iter().filter(|_| self.rng.gen_bool(0.5)).cloned().collect::<Vec<_>>())
                .collect();
            let include_ground = k == 0 || self.rng.gen_bool(0.5);
            let s = subset_lattice(ground.clone(), &generators, include_ground).expect("ground atoms are distinct");
            if s.lattice().size() <= max_members {
                return s;
            }
        }
    }

    /// Closure of a few random subsets of `{1..k}`, `1 <= k <= max_atoms`,
    /// resampled until it has at most `max_members` members.
    pub fn set_lattice(&mut self, max_atoms: usize, max_members: usize) -> SetLattice {
        let k = self.rng.gen_range(1..=max_atoms.max(1));
        self.closure_of((1..=k as i64).map(Atom::Int).collect(), max_members)
    }

    /// Like [`Corpus::set_lattice`] over distinct naturals drawn from `1..=max_value`.
    pub fn natural_set_lattice(&mut self, max_atoms: usize, max_value: i64, max_members: usize) -> SetLattice {
        let mut pool: Vec<i64> = (1..=max_value).collect();
        pool.shuffle(&mut self.rng);
        let k = self.rng.gen_range(1..=max_atoms.clamp(1, pool.len()));
        let mut ground: Vec<i64> = pool[..k].to_vec();
        ground.sort_unstable();
        self.closure_of(ground.into_iter().map(Atom::Int).collect(), max_members)
    }

    /// Positive valuation on a distributive lattice: random base value and
    /// positive weights on the nonzero join-irreducibles.
    pub fn positive_valuation(&mut self, l: &FiniteLattice) -> Valuation {
        let base = self.rational(5, 3);
        let weights: Vec<Rational> =
            (0..l.join_irreducibles_nonzero().len()).map(|_| self.positive_rational(9, 4)).collect();
        valuation_from_join_irreducible_weights(l, &base, &weights)
    }

    /// Nonnegative weights, zero with probability about one in five.
    pub fn kappa(&mut self, len: usize) -> KappaWeights {
        let k = (0..len).map(|_| if self.rng.gen_bool(0.2) { int(0) } else { self.positive_rational(9, 4) }).collect();
        KappaWeights::new(k).expect("nonnegative")
    }

    pub fn op_samples(&mut self, n: usize) -> Vec<[Rational; 4]> {
        (0..n).map(|_| [(); 4].map(|_| self.rational(20, 7))).collect()
    }

    pub fn triples(&mut self, n: usize) -> Vec<[Rational; 3]> {
        (0..n)
            .map(|_| {
                [(); 3].map(|_| {
                    let r = self.rational(30, 7);
                    if self.rng.gen_bool(0.3) {
                        -r
                    } else {
                        r
                    }
                })
            })
            .collect()
    }

    pub fn gen_range(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }
}
