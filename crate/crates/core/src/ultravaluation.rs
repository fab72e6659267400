//! Ultravaluations: pair functions with `w = 0` on comparable pairs and the
//! max cut law `w(f, g) = w(f∧h, g) ∨ w(f, g∨h)`. They induce the
//! pseudo-ultrametric `d(f, g) = w(f, g) ∨ w(g, f)`.
//!
//! On a finite set lattice every ultravaluation comes from per-atom weights
//! `κ` via `w(A, B) = max κ(A \ B)`; [`extract_kappa`] recovers such weights.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{int, Rational};
use crate::generators::{Atom, SetLattice};
use crate::lattice::{Element, FiniteLattice};
use crate::metric::{MetricKind, MetricTable, PairTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UltravaluationError {
    #[error("expected {expected} entries, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("kappa({0}) is negative")]
    NegativeKappa(usize),
    #[error("identity kappa needs integer atoms, found {0}")]
    NonIntegerAtom(String),
    #[error("ultravaluation law fails: {0:?}")]
    UltraAxiomViolated(UltraViolation),
    #[error("reconstructed w differs from the input at ({f}, {g})")]
    ReconstructionMismatch { f: Element, g: Element },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UltraViolation {
    Negative {
        f: Element,
        g: Element,
    },
    /// `f <= g` but `w(f, g) > 0`.
    NonzeroBelow {
        f: Element,
        g: Element,
    },
    /// `w(f, g) ≠ w(f∧h, g) ∨ w(f, g∨h)`.
    MaxCut {
        f: Element,
        g: Element,
        h: Element,
    },
}

/// A pair table meant to satisfy the ultravaluation laws. Construction does
/// not check them; see [`check_ultravaluation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ultravaluation {
    w: PairTable,
}

impl Ultravaluation {
    pub fn new(w: PairTable) -> Self {
        Self { w }
    }

    pub fn table(&self) -> &PairTable {
        &self.w
    }

    pub fn get(&self, f: Element, g: Element) -> &Rational {
        self.w.get(f, g)
    }

    /// `w(f, g) = 0 ⟹ f <= g`.
    pub fn is_positive(&self, l: &FiniteLattice) -> bool {
        l.elements().all(|f| l.elements().all(|g| !self.w.get(f, g).is_zero() || l.leq(f, g)))
    }
}

/// Nonnegative weights on the ground atoms of a set lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaWeights {
    kappa: Vec<Rational>,
}

impl KappaWeights {
    pub fn new(kappa: Vec<Rational>) -> Result<Self, UltravaluationError> {
        if let Some(i) = kappa.iter().position(|k| k.is_negative()) {
            return Err(UltravaluationError::NegativeKappa(i));
        }
        Ok(Self { kappa })
    }

    /// `κ(n) = n` on integer atoms.
    pub fn identity(ground: &[Atom]) -> Result<Self, UltravaluationError> {
        let kappa = ground
            .iter()
            .map(|a| match a {
                Atom::Int(n) => Ok(int(*n)),
                Atom::Name(s) => Err(UltravaluationError::NonIntegerAtom(s.clone())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(kappa)
    }

    pub fn constant(len: usize, c: Rational) -> Result<Self, UltravaluationError> {
        Self::new(vec![c; len])
    }

    pub fn get(&self, atom: usize) -> &Rational {
        &self.kappa[atom]
    }

    pub fn values(&self) -> &[Rational] {
        &self.kappa
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }
}

/// `w(A, B) = max κ(A \ B)`, or `0` when `A ⊆ B`.
pub fn from_kappa(s: &SetLattice, kappa: &KappaWeights) -> Result<Ultravaluation, UltravaluationError> {
    if kappa.len() != s.ground().len() {
        return Err(UltravaluationError::SizeMismatch { expected: s.ground().len(), got: kappa.len() });
    }
    let w = PairTable::from_fn(s.lattice().size(), |a, b| {
        s.member(a).difference(s.member(b)).map(|i| kappa.get(i)).max().cloned().unwrap_or_else(Rational::zero)
    });
    Ok(Ultravaluation { w })
}

pub fn check_ultravaluation(l: &FiniteLattice, w: &PairTable) -> Vec<UltraViolation> {
    let n = l.size();
    let mut out = Vec::new();
    for f in 0..n {
        for g in 0..n {
            if w.get(f, g).is_negative() {
                out.push(UltraViolation::Negative { f, g });
            } else if l.leq(f, g) && !w.get(f, g).is_zero() {
                out.push(UltraViolation::NonzeroBelow { f, g });
            }
        }
    }
    let ranks = w.ranks();
    let r = |a: Element, b: Element| ranks[a * n + b];
    let cut: Vec<UltraViolation> = (0..n)
        .into_par_iter()
        .flat_map_iter(|f| {
            (0..n).flat_map(move |g| {
                (0..n).filter_map(move |h| {
                    (r(f, g) != r(l.meet(f, h), g).max(r(f, l.join(g, h)))).then_some(UltraViolation::MaxCut {
                        f,
                        g,
                        h,
                    })
                })
            })
        })
        .collect();
    out.extend(cut);
    out
}

/// `d(f, g) = w(f, g) ∨ w(g, f)`.
pub fn metric_from_ultravaluation(l: &FiniteLattice, w: &Ultravaluation) -> Result<MetricTable, UltravaluationError> {
    if w.w.size() != l.size() {
        return Err(UltravaluationError::SizeMismatch { expected: l.size(), got: w.w.size() });
    }
    if let Some(v) = check_ultravaluation(l, &w.w).into_iter().next() {
        return Err(UltravaluationError::UltraAxiomViolated(v));
    }
    let t = &w.w;
    let d = PairTable::from_fn(l.size(), |f, g| t.get(f, g).max(t.get(g, f)).clone());
    Ok(MetricTable::new(d, MetricKind::Ultravaluation))
}

/// `κ(x) = min { w(C, D) : x ∈ C, x ∉ D }`, `0` when no member pair
/// separates `x`. The weights are checked by rebuilding `w` from them.
pub fn extract_kappa(s: &SetLattice, w: &Ultravaluation) -> Result<KappaWeights, UltravaluationError> {
    let l = s.lattice();
    if w.w.size() != l.size() {
        return Err(UltravaluationError::SizeMismatch { expected: l.size(), got: w.w.size() });
    }
    if let Some(v) = check_ultravaluation(l, &w.w).into_iter().next() {
        return Err(UltravaluationError::UltraAxiomViolated(v));
    }
    let kappa: Vec<Rational> = (0..s.ground().len())
        .map(|x| {
            l.elements()
                .filter(|&c| s.member(c).contains(x))
                .flat_map(|c| l.elements().filter(move |&d| !s.member(d).contains(x)).map(move |d| (c, d)))
                .map(|(c, d)| w.get(c, d))
                .min()
                .cloned()
                .unwrap_or_else(Rational::zero)
        })
        .collect();
    let kappa = KappaWeights::new(kappa)?;
    let rebuilt = from_kappa(s, &kappa)?;
    for f in l.elements() {
        for g in l.elements() {
            if rebuilt.get(f, g) != w.get(f, g) {
                return Err(UltravaluationError::ReconstructionMismatch { f, g });
            }
        }
    }
    Ok(kappa)
}
