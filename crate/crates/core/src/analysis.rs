//! Brute-force d-irreducibility and the characterizations checked against it.
//!
//! `p` is d-irreducible when `d(p, f) ∧ d(p, g) <= d(p, f∨g)` for all
//! `f, g`. On a finite lattice the same inequality for arbitrary nonempty
//! families follows by induction on the family size, so the pairwise test
//! also decides complete d-irreducibility; [`family_d_irreducible`] exists
//! to confirm that on small lattices.
//!
//! Distances are compared as stored (`d^exponent`), which preserves order.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{pow, Rational};
use crate::generators::{Atom, SetLattice};
use crate::intervaluation::CertifiedMetric;
use crate::lattice::{Element, ElementSet, FiniteLattice};
use crate::metric::MetricTable;
use crate::ultravaluation::{from_kappa, metric_from_ultravaluation, KappaWeights};
use crate::valuation::{check_modular_law, classify_valuation, metric_from_valuation, Valuation};

/// Largest lattice for which families are enumerated exhaustively.
pub const MAX_FAMILY_LATTICE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("metric has {got} elements, lattice has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("hypothesis not met: {0}")]
    HypothesisUnmet(String),
    #[error("family enumeration is limited to {MAX_FAMILY_LATTICE} elements, got {0}")]
    TooLargeForFamilies(usize),
    #[error("atom {0} is not a natural number")]
    NonNaturalAtom(String),
}

fn check_size(l: &FiniteLattice, d: &MetricTable) -> Result<(), AnalysisError> {
    if l.size() == d.size() {
        Ok(())
    } else {
        Err(AnalysisError::SizeMismatch { expected: l.size(), got: d.size() })
    }
}

/// First pair `(f, g)` in lexicographic order with `d(p, f) ∧ d(p, g) > d(p, f∨g)`.
pub fn d_irreducibility_witness(l: &FiniteLattice, d: &MetricTable, p: Element) -> Option<(Element, Element)> {
    l.elements()
        .flat_map(|f| l.elements().map(move |g| (f, g)))
        .find(|&(f, g)| d.get(p, f).min(d.get(p, g)) > d.get(p, l.join(f, g)))
}

pub fn is_d_irreducible(l: &FiniteLattice, d: &MetricTable, p: Element) -> bool {
    d_irreducibility_witness(l, d, p).is_none()
}

/// The inequality `⋀ d(p, f) <= d(p, ⋁ F)` over every nonempty family `F`.
pub fn family_d_irreducible(l: &FiniteLattice, d: &MetricTable, p: Element) -> Result<bool, AnalysisError> {
    let n = l.size();
    if n > MAX_FAMILY_LATTICE {
        return Err(AnalysisError::TooLargeForFamilies(n));
    }
    Ok((1u32..1 << n).all(|mask| {
        let family = (0..n).filter(|i| mask & (1 << i) != 0);
        let join = l.join_all(family.clone()).expect("nonempty");
        let least = family.map(|f| d.get(p, f)).min().expect("nonempty");
        least <= d.get(p, join)
    }))
}

/// Elements passing the pairwise test, i.e. the completely d-irreducible ones.
pub fn mli(l: &FiniteLattice, d: &MetricTable) -> ElementSet {
    assert_eq!(l.size(), d.size(), "metric and lattice sizes differ");
    let n = l.size();
    let ranks = d.table().ranks();
    let r = |a: Element, b: Element| ranks[a * n + b];
    (0..n)
        .into_par_iter()
        .filter(|&p| (0..n).all(|f| (0..n).all(|g| r(p, f).min(r(p, g)) <= r(p, l.join(f, g)))))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DownsetVerdict {
    pub irreducible: bool,
    /// Whether `d(p, f) ∧ d(p, g) = d(p, f∨g)` on every pair below `p`.
    pub equality: bool,
}

/// The test restricted to pairs from the strictly lower set of `p`.
pub fn is_d_irreducible_downset(l: &FiniteLattice, cert: &CertifiedMetric, p: Element) -> DownsetVerdict {
    let d = cert.metric();
    let below: Vec<Element> = l.elements().filter(|&f| l.lt(f, p)).collect();
    let mut verdict = DownsetVerdict { irreducible: true, equality: true };
    for &f in &below {
        for &g in &below {
            let lhs = d.get(p, f).min(d.get(p, g));
            let rhs = d.get(p, l.join(f, g));
            verdict.irreducible &= lhs <= rhs;
            verdict.equality &= lhs == rhs;
        }
    }
    verdict
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreducibilityReport {
    pub join_irreducible: Vec<bool>,
    pub d_irreducible: Vec<bool>,
    pub downset_chain: Vec<bool>,
    pub mli: ElementSet,
    /// A violating pair for each element that is not d-irreducible.
    pub witnesses: BTreeMap<Element, (Element, Element)>,
}

pub fn irreducibility_report(l: &FiniteLattice, d: &MetricTable) -> Result<IrreducibilityReport, AnalysisError> {
    check_size(l, d)?;
    let ji = l.join_irreducibles();
    let witnesses: BTreeMap<Element, (Element, Element)> =
        l.elements().filter_map(|p| d_irreducibility_witness(l, d, p).map(|w| (p, w))).collect();
    Ok(IrreducibilityReport {
        join_irreducible: l.elements().map(|p| ji.contains(&p)).collect(),
        d_irreducible: l.elements().map(|p| !witnesses.contains_key(&p)).collect(),
        downset_chain: l.elements().map(|p| l.is_chain(&strict_down_set(l, p))).collect(),
        mli: l.elements().filter(|p| !witnesses.contains_key(p)).collect(),
        witnesses,
    })
}

fn strict_down_set(l: &FiniteLattice, p: Element) -> Vec<Element> {
    l.elements().filter(|&f| l.lt(f, p)).collect()
}

/// An element where brute force and the down-set chain test disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discrepancy {
    pub element: Element,
    pub d_irreducible: bool,
    pub downset_chain: bool,
}

/// For a positive valuation on a distributive lattice, compares
/// d-irreducibility with the strictly lower set being a chain.
pub fn theorem_crosscheck(l: &FiniteLattice, v: &Valuation) -> Result<Vec<Discrepancy>, AnalysisError> {
    if v.len() != l.size() {
        return Err(AnalysisError::SizeMismatch { expected: l.size(), got: v.len() });
    }
    if !l.is_distributive() {
        return Err(AnalysisError::HypothesisUnmet("the lattice is not distributive".into()));
    }
    if !check_modular_law(l, v).is_empty() {
        return Err(AnalysisError::HypothesisUnmet("the valuation is not modular".into()));
    }
    if !classify_valuation(l, v).positive {
        return Err(AnalysisError::HypothesisUnmet("the valuation is not positive".into()));
    }
    let d = metric_from_valuation(l, v).expect("modular and isotone");
    let irreducible = mli(l, &d);
    Ok(l.elements()
        .map(|p| Discrepancy {
            element: p,
            d_irreducible: irreducible.contains(&p),
            downset_chain: l.is_chain(&strict_down_set(l, p)),
        })
        .filter(|x| x.d_irreducible != x.downset_chain)
        .collect())
}

/// Join-irreducible elements that are not d-irreducible.
pub fn find_join_irred_not_d_irred(l: &FiniteLattice, d: &MetricTable) -> Vec<Element> {
    let irreducible = mli(l, d);
    l.join_irreducibles().into_iter().filter(|p| !irreducible.contains(p)).collect()
}

fn natural_values(s: &SetLattice) -> Result<Vec<i64>, AnalysisError> {
    s.ground()
        .iter()
        .map(|a| match a {
            Atom::Int(n) if *n >= 0 => Ok(*n),
            other => Err(AnalysisError::NonNaturalAtom(other.to_string())),
        })
        .collect()
}

fn proper_subsets(s: &SetLattice, a: Element) -> Vec<Element> {
    let l = s.lattice();
    l.elements().filter(|&b| l.lt(b, a)).collect()
}

/// Largest atom value of `A \ (B ∪ C)`, `None` when that set is empty.
fn max_remaining(s: &SetLattice, values: &[i64], a: Element, b: Element, c: Element) -> Option<i64> {
    let mut rest = s.member(a).clone();
    rest.difference_with(s.member(b));
    rest.difference_with(s.member(c));
    rest.ones().map(|i| values[i]).max()
}

fn exceeds(values: &[i64], set: impl Iterator<Item = usize>, bound: Option<i64>) -> bool {
    set.map(|i| values[i]).any(|v| bound.is_none_or(|m| v > m))
}

/// The literal reading: `A` fails to be d-irreducible when there are proper
/// members `B, C ⊂ A` each containing a number larger than every number in
/// `A \ (B ∪ C)`. Returns the d-irreducibility verdict.
pub fn puzzle_criterion(s: &SetLattice, a: Element) -> Result<bool, AnalysisError> {
    let values = natural_values(s)?;
    let below = proper_subsets(s, a);
    let broken = below.iter().any(|&b| {
        below.iter().any(|&c| {
            let m = max_remaining(s, &values, a, b, c);
            exceeds(&values, s.member(b).ones(), m) && exceeds(&values, s.member(c).ones(), m)
        })
    });
    Ok(!broken)
}

/// Variant requiring the large numbers in `B \ C` and in `C \ B`.
pub fn puzzle_criterion_refined(s: &SetLattice, a: Element) -> Result<bool, AnalysisError> {
    let values = natural_values(s)?;
    let below = proper_subsets(s, a);
    let broken = below.iter().any(|&b| {
        below.iter().any(|&c| {
            let m = max_remaining(s, &values, a, b, c);
            exceeds(&values, s.member(b).difference(s.member(c)), m)
                && exceeds(&values, s.member(c).difference(s.member(b)), m)
        })
    });
    Ok(!broken)
}

/// The metric of `κ = identity` on a natural-number set lattice.
pub fn identity_kappa_metric(s: &SetLattice) -> Result<MetricTable, AnalysisError> {
    natural_values(s)?;
    let kappa = KappaWeights::identity(s.ground()).expect("natural atoms");
    let w = from_kappa(s, &kappa).expect("kappa matches the ground set");
    Ok(metric_from_ultravaluation(s.lattice(), &w).expect("kappa ultravaluations satisfy the laws"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PuzzleRow {
    pub element: Element,
    pub criterion: bool,
    pub refined: bool,
    pub oracle: bool,
}

impl PuzzleRow {
    pub fn agrees(&self) -> bool {
        self.criterion == self.oracle
    }
}

pub fn puzzle_report(s: &SetLattice) -> Result<Vec<PuzzleRow>, AnalysisError> {
    let d = identity_kappa_metric(s)?;
    let irreducible = mli(s.lattice(), &d);
    s.lattice()
        .elements()
        .map(|a| {
            Ok(PuzzleRow {
                element: a,
                criterion: puzzle_criterion(s, a)?,
                refined: puzzle_criterion_refined(s, a)?,
                oracle: irreducible.contains(&a),
            })
        })
        .collect()
}

/// Shrinks `s` while some row still satisfies `disagrees`: members are
/// dropped one at a time, highest index first, whenever the rest stays
/// closed under union and intersection. Atoms no member uses are dropped at
/// the end. The result has no single removable member.
pub fn minimal_puzzle_witness(
    s: &SetLattice,
    disagrees: impl Fn(&PuzzleRow) -> bool,
) -> Result<Option<SetLattice>, AnalysisError> {
    let has = |t: &SetLattice| -> Result<bool, AnalysisError> { Ok(puzzle_report(t)?.iter().any(&disagrees)) };
    if !has(s)? {
        return Ok(None);
    }
    let mut current = s.clone();
    'outer: loop {
        for i in (0..current.members().len()).rev() {
            let mut members = current.members().to_vec();
            members.remove(i);
            if members.is_empty() {
                continue;
            }
            if let Ok(t) = SetLattice::from_family(current.ground().to_vec(), members) {
                if has(&t)? {
                    current = t;
                    continue 'outer;
                }
            }
        }
        break;
    }
    let used: Vec<usize> =
        (0..current.ground().len()).filter(|&i| current.members().iter().any(|m| m.contains(i))).collect();
    let ground: Vec<Atom> = used.iter().map(|&i| current.ground()[i].clone()).collect();
    let members = current
        .members()
        .iter()
        .map(|m| {
            let mut bits = fixedbitset::FixedBitSet::with_capacity(used.len());
            for (j, &i) in used.iter().enumerate() {
                bits.set(j, m.contains(i));
            }
            bits
        })
        .collect();
    let pruned = SetLattice::from_family(ground, members).expect("relabeling keeps closure");
    Ok(Some(pruned))
}

/// Outcome of an R-base check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseReport {
    pub base: ElementSet,
    /// The radius as a plain distance.
    pub radius: Rational,
    pub covered: bool,
    /// Elements farther than `radius` from every join of base elements.
    pub uncovered: Vec<Element>,
    /// Joins of nonempty base families.
    pub closure: ElementSet,
    /// For each completely d-irreducible `p`, `min_{b ∈ B} d(p, b)` as stored.
    pub mli_distances: Vec<(Element, Rational)>,
    /// Whether every such distance is within the radius.
    pub mli_within_radius: bool,
}

/// Nonempty joins of `base`.
pub fn join_closure(l: &FiniteLattice, base: &ElementSet) -> ElementSet {
    let mut closure = base.clone();
    loop {
        let fresh: Vec<Element> = closure
            .iter()
            .flat_map(|&a| closure.iter().map(move |&b| l.join(a, b)))
            .filter(|j| !closure.contains(j))
            .collect();
        if fresh.is_empty() {
            return closure;
        }
        closure.extend(fresh);
    }
}

pub fn r_base_check(l: &FiniteLattice, d: &MetricTable, base: &ElementSet, radius: &Rational) -> BaseReport {
    assert_eq!(l.size(), d.size(), "metric and lattice sizes differ");
    let bound = pow(radius, d.exponent());
    let closure = join_closure(l, base);
    let uncovered: Vec<Element> = l.elements().filter(|&f| !closure.iter().any(|&c| *d.get(f, c) <= bound)).collect();
    let mli_distances: Vec<(Element, Rational)> = mli(l, d)
        .into_iter()
        .map(|p| (p, base.iter().map(|&b| d.get(p, b)).min().cloned().unwrap_or_else(Rational::zero)))
        .collect();
    let mli_within_radius = !base.is_empty() && mli_distances.iter().all(|(_, x)| *x <= bound);
    BaseReport {
        base: base.clone(),
        radius: radius.clone(),
        covered: uncovered.is_empty(),
        uncovered,
        closure,
        mli_distances,
        mli_within_radius,
    }
}

/// Greedy single pass from all of `L`, trying elements by descending index.
/// Being an R-base is preserved under supersets, so the result is
/// inclusion-minimal.
pub fn minimal_r_base(l: &FiniteLattice, d: &MetricTable, radius: &Rational) -> ElementSet {
    let mut base: ElementSet = l.elements().collect();
    for b in l.elements().rev() {
        base.remove(&b);
        if base.is_empty() || !r_base_check(l, d, &base, radius).covered {
            base.insert(b);
        }
    }
    base
}

pub fn minimal_zero_base(l: &FiniteLattice, d: &MetricTable) -> ElementSet {
    minimal_r_base(l, d, &Rational::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::generators::{
        chain_lattice, divisor_lattice, powerset_lattice, product_chain_lattice, sublattice, subset_lattice,
    };
    use crate::lattice::tests::{m3, n5};
    use crate::metric::MetricTable;

    fn example_sets() -> SetLattice {
        subset_lattice(vec![Atom::Int(1), Atom::Int(2), Atom::Int(3)], &[vec![2.into()], vec![3.into()]], true).unwrap()
    }

    fn five_element_grid() -> (FiniteLattice, MetricTable) {
        let g = product_chain_lattice(&[3, 2]).unwrap();
        let pick: ElementSet =
            [[0, 0], [1, 0], [0, 1], [1, 1], [2, 2]].iter().map(|c| g.element_of(c).unwrap()).collect();
        let sub = sublattice(g.lattice(), &pick).unwrap();
        let vals = g.function_values();
        let t = crate::metric::PairTable::from_fn(sub.lattice.size(), |a, b| {
            let (x, y) = (&vals[sub.embedding[a]], &vals[sub.embedding[b]]);
            x.iter().zip(y).map(|(u, v)| if u > v { u - v } else { v - u }).max().unwrap()
        });
        (sub.lattice, MetricTable::new(t, crate::metric::MetricKind::Raw))
    }

    #[test]
    fn example_element_is_not_d_irreducible() {
        let s = example_sets();
        let d = identity_kappa_metric(&s).unwrap();
        let l = s.lattice();
        let x = l.top();
        let (two, three) = (s.find_atoms(&[2.into()]).unwrap().unwrap(), s.find_atoms(&[3.into()]).unwrap().unwrap());
        assert_eq!(d_irreducibility_witness(l, &d, x), Some((two, three)));
        assert!(is_d_irreducible(l, &d, l.bottom()));
        assert_eq!(find_join_irred_not_d_irred(l, &d), vec![x]);
        assert!(!puzzle_criterion(&s, x).unwrap());
        assert!(!puzzle_criterion_refined(&s, x).unwrap());
    }

    #[test]
    fn grid_sublattice_mli_and_bases() {
        let (l, d) = five_element_grid();
        let labels = |set: &ElementSet| set.iter().map(|&e| l.label(e).to_string()).collect::<Vec<_>>();
        assert_eq!(labels(&mli(&l, &d)), ["(0,0)", "(0,1)", "(1,0)"]);
        let p = l.index_of("(2,2)").unwrap();
        let w = d_irreducibility_witness(&l, &d, p).unwrap();
        assert_eq!(*d.get(p, w.0).min(d.get(p, w.1)), int(2));
        assert_eq!(*d.get(p, l.join(w.0, w.1)), int(1));
        assert_eq!(labels(&minimal_zero_base(&l, &d)), ["(0,0)", "(0,1)", "(1,0)", "(2,2)"]);
        let report = r_base_check(&l, &d, &l.elements().collect(), &int(0));
        assert!(report.covered && report.mli_within_radius);
    }

    #[test]
    fn discrete_metric_gives_join_irreducibles() {
        for l in [m3(), n5(), divisor_lattice(36).unwrap().lattice().clone()] {
            assert_eq!(mli(&l, &MetricTable::discrete(l.size())), l.join_irreducibles());
        }
    }

    #[test]
    fn pairwise_matches_families() {
        let s = example_sets();
        let d = identity_kappa_metric(&s).unwrap();
        for p in s.lattice().elements() {
            assert_eq!(family_d_irreducible(s.lattice(), &d, p).unwrap(), is_d_irreducible(s.lattice(), &d, p));
        }
        let big = chain_lattice((0..17).map(|i| i.to_string()).collect()).unwrap();
        assert!(family_d_irreducible(&big, &MetricTable::discrete(17), 0).is_err());
    }

    #[test]
    fn theorem_on_divisors_and_hypotheses() {
        let d = divisor_lattice(12).unwrap();
        assert!(theorem_crosscheck(d.lattice(), &d.omega()).unwrap().is_empty());
        let v = Valuation::constant(5, int(1));
        assert!(matches!(theorem_crosscheck(&m3(), &v), Err(AnalysisError::HypothesisUnmet(_))));
        let c = chain_lattice(vec!["a".into(), "b".into()]).unwrap();
        assert!(matches!(
            theorem_crosscheck(&c, &Valuation::constant(2, int(1))),
            Err(AnalysisError::HypothesisUnmet(_))
        ));
    }

    #[test]
    fn downset_test_on_divisors() {
        let d = divisor_lattice(12).unwrap();
        let l = d.lattice();
        let m = metric_from_valuation(l, &d.omega()).unwrap();
        let cert = crate::intervaluation::certify_metric(l, &m).unwrap();
        let twelve = d.element_of(12).unwrap();
        assert!(!is_d_irreducible_downset(l, &cert, twelve).irreducible);
        let bottom = is_d_irreducible_downset(l, &cert, l.bottom());
        assert!(bottom.irreducible && bottom.equality);
        let four = is_d_irreducible_downset(l, &cert, d.element_of(4).unwrap());
        assert!(four.irreducible && four.equality);
    }

    #[test]
    fn bases() {
        let s = powerset_lattice(vec![Atom::Int(1), Atom::Int(2), Atom::Int(3)]).unwrap();
        let l = s.lattice();
        let d = MetricTable::discrete(l.size());
        let base = minimal_zero_base(l, &d);
        let expected: ElementSet =
            [l.bottom()].into_iter().chain((1..=3).map(|i| s.find_atoms(&[i.into()]).unwrap().unwrap())).collect();
        assert_eq!(base, expected);
        let c = chain_lattice(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        assert_eq!(minimal_zero_base(&c, &MetricTable::discrete(3)).len(), 3);
        assert!(minimal_r_base(&c, &MetricTable::discrete(3), &int(1)).len() == 1);
    }

    #[test]
    fn literal_criterion_fails_on_a_chain() {
        let s = subset_lattice(vec![Atom::Int(1), Atom::Int(2)], &[vec![2.into()]], true).unwrap();
        let top = s.lattice().top();
        assert!(!puzzle_criterion(&s, top).unwrap());
        assert!(puzzle_criterion_refined(&s, top).unwrap());
        let d = identity_kappa_metric(&s).unwrap();
        assert!(is_d_irreducible(s.lattice(), &d, top));
        let w = minimal_puzzle_witness(&s, |r| !r.agrees()).unwrap().unwrap();
        assert_eq!(w.lattice().size(), 2);
        let named = subset_lattice(vec![Atom::from("x")], &[], true).unwrap();
        assert!(puzzle_report(&named).is_err());
    }
}
