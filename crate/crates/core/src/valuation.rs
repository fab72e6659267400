//! Valuations, difference valuations and valuation metrics.
//!
//! A valuation `v` satisfies the modular law `v(f) + v(g) = v(f∧g) + v(f∨g)`.
//! Its difference valuation `w(f, g) = v(f) − v(f∧g)` satisfies the cut law
//! `w(f, g) = w(f, g∨h) + w(f∧h, g)`, and both induce the same distance
//! `d(f, g) = v(f∨g) − v(f∧g) = w(f, g) + w(g, f)`.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::Rational;
use crate::lattice::{Element, FiniteLattice};
use crate::metric::{MetricKind, MetricTable, PairTable};

/// Element-indexed exact values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    values: Vec<Rational>,
}

impl Valuation {
    pub fn new(values: Vec<Rational>) -> Self {
        Self { values }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn get(&self, e: Element) -> &Rational {
        &self.values[e]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        Self { values: self.values.iter().map(|v| v * k).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularViolation {
    pub f: Element,
    pub g: Element,
    /// `v(f) + v(g)`
    pub lhs: Rational,
    /// `v(f∧g) + v(f∨g)`
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutViolation {
    pub f: Element,
    pub g: Element,
    pub h: Element,
    /// `w(f, g)`
    pub lhs: Rational,
    /// `w(f, g∨h) + w(f∧h, g)`
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("modular law fails at ({}, {}): {} != {}", .0.f, .0.g, .0.lhs, .0.rhs)]
    NotModular(Box<ModularViolation>),
    #[error("not isotone: {f} < {g} but v({f}) > v({g})")]
    NotIsotone { f: Element, g: Element },
    #[error("cut law fails at ({}, {}, {}): {} != {}", .0.f, .0.g, .0.h, .0.lhs, .0.rhs)]
    CutLawViolated(Box<CutViolation>),
}

fn check_len(l: &FiniteLattice, len: usize) -> Result<(), ValuationError> {
    if l.size() == len {
        Ok(())
    } else {
        Err(ValuationError::SizeMismatch { expected: l.size(), got: len })
    }
}

pub fn check_modular_law(l: &FiniteLattice, v: &Valuation) -> Vec<ModularViolation> {
    let mut out = Vec::new();
    for f in l.elements() {
        for g in f + 1..l.size() {
            let lhs = v.get(f) + v.get(g);
            let rhs = v.get(l.meet(f, g)) + v.get(l.join(f, g));
            if lhs != rhs {
                out.push(ModularViolation { f, g, lhs, rhs });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValuationClass {
    pub isotone: bool,
    pub positive: bool,
}

pub fn classify_valuation(l: &FiniteLattice, v: &Valuation) -> ValuationClass {
    let mut class = ValuationClass { isotone: true, positive: true };
    for f in l.elements() {
        for g in l.elements() {
            if l.lt(f, g) {
                class.isotone &= v.get(f) <= v.get(g);
                class.positive &= v.get(f) < v.get(g);
            }
        }
    }
    class
}

fn first_non_isotone(l: &FiniteLattice, v: &Valuation) -> Option<(Element, Element)> {
    l.elements().flat_map(|f| l.elements().map(move |g| (f, g))).find(|&(f, g)| l.lt(f, g) && v.get(f) > v.get(g))
}

/// `d(f, g) = v(f∨g) − v(f∧g)`.
pub fn metric_from_valuation(l: &FiniteLattice, v: &Valuation) -> Result<MetricTable, ValuationError> {
    check_len(l, v.len())?;
    if let Some(violation) = check_modular_law(l, v).into_iter().next() {
        return Err(ValuationError::NotModular(Box::new(violation)));
    }
    if let Some((f, g)) = first_non_isotone(l, v) {
        return Err(ValuationError::NotIsotone { f, g });
    }
    let table = PairTable::from_fn(l.size(), |f, g| v.get(l.join(f, g)) - v.get(l.meet(f, g)));
    Ok(MetricTable::new(table, MetricKind::Valuation))
}

/// `w(f, g) = v(f) − v(f∧g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceValuation {
    w: PairTable,
}

impl DifferenceValuation {
    pub fn table(&self) -> &PairTable {
        &self.w
    }

    pub fn get(&self, f: Element, g: Element) -> &Rational {
        self.w.get(f, g)
    }

    /// All values nonnegative.
    pub fn is_isotone(&self) -> bool {
        let n = self.w.size();
        (0..n).all(|f| (0..n).all(|g| !self.w.get(f, g).is_negative()))
    }

    /// `w(f, g) = 0 ⟹ f <= g`.
    pub fn is_positive(&self, l: &FiniteLattice) -> bool {
        l.elements().all(|f| l.elements().all(|g| !self.w.get(f, g).is_zero() || l.leq(f, g)))
    }

    /// `d(f, g) = w(f, g) + w(g, f)`.
    pub fn metric(&self) -> MetricTable {
        let w = &self.w;
        MetricTable::new(PairTable::from_fn(w.size(), |f, g| w.get(f, g) + w.get(g, f)), MetricKind::Valuation)
    }
}

pub fn difference_valuation(l: &FiniteLattice, v: &Valuation) -> Result<DifferenceValuation, ValuationError> {
    check_len(l, v.len())?;
    if let Some(violation) = check_modular_law(l, v).into_iter().next() {
        return Err(ValuationError::NotModular(Box::new(violation)));
    }
    Ok(DifferenceValuation { w: PairTable::from_fn(l.size(), |f, g| v.get(f) - v.get(l.meet(f, g))) })
}

/// All triples `(f, g, h)` where `w(f, g) ≠ w(f, g∨h) + w(f∧h, g)`.
pub fn check_cut_law(l: &FiniteLattice, w: &PairTable) -> Vec<CutViolation> {
    let n = l.size();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|f| {
            (0..n).flat_map(move |g| {
                (0..n).filter_map(move |h| {
                    let rhs = w.get(f, l.join(g, h)) + w.get(l.meet(f, h), g);
                    (*w.get(f, g) != rhs).then(|| CutViolation { f, g, h, lhs: w.get(f, g).clone(), rhs })
                })
            })
        })
        .collect()
}

/// `v(f) = w(f, 0) + c`.
pub fn valuation_from_difference(l: &FiniteLattice, w: &PairTable, c: Rational) -> Result<Valuation, ValuationError> {
    check_len(l, w.size())?;
    if let Some(violation) = check_cut_law(l, w).into_iter().next() {
        return Err(ValuationError::CutLawViolated(Box::new(violation)));
    }
    let bottom = l.bottom();
    Ok(Valuation::new(l.elements().map(|f| w.get(f, bottom) + &c).collect()))
}

/// On a distributive lattice every valuation has the form
/// `v(f) = base + Σ weight(j)` over the nonzero join-irreducibles `j <= f`.
/// `weights` is indexed like [`FiniteLattice::join_irreducibles_nonzero`].
pub fn valuation_from_join_irreducible_weights(l: &FiniteLattice, base: &Rational, weights: &[Rational]) -> Valuation {
    let irreducibles: Vec<Element> = l.join_irreducibles_nonzero().into_iter().collect();
    assert_eq!(irreducibles.len(), weights.len(), "one weight per nonzero join-irreducible");
    Valuation::new(
        l.elements()
            .map(|f| {
                irreducibles.iter().zip(weights).filter(|(&j, _)| l.leq(j, f)).fold(base.clone(), |acc, (_, w)| acc + w)
            })
            .collect(),
    )
}
