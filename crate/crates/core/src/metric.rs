//! Pair-indexed tables and (pseudo-)metric tables with their axiom checks.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::exact::{int, root_le_sum, Rational};
use crate::lattice::Element;

/// A dense `n × n` table of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTable {
    n: usize,
    data: Vec<Rational>,
}

impl PairTable {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Rational::zero(); n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(Element, Element) -> Rational + Sync + Send) -> Self {
        let data = (0..n * n).into_par_iter().map(|k| f(k / n, k % n)).collect();
        Self { n, data }
    }

    /// Builds from rows; `None` unless the rows form a square.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Option<Self> {
        let n = rows.len();
        rows.iter().all(|r| r.len() == n).then(|| Self { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: Element, b: Element) -> &Rational {
        &self.data[a * self.n + b]
    }

    pub fn set(&mut self, a: Element, b: Element, value: Rational) {
        self.data[a * self.n + b] = value;
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational + Sync + Send) -> Self {
        Self { n: self.n, data: self.data.par_iter().map(f).collect() }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.data.chunks(self.n.max(1))
    }

    /// Dense ranks of the entries. Comparisons and maxima of ranks agree
    /// with those of the underlying values.
    pub fn ranks(&self) -> Vec<u32> {
        let mut distinct: BTreeMap<&Rational, u32> = self.data.iter().map(|v| (v, 0)).collect();
        for (i, slot) in distinct.values_mut().enumerate() {
            *slot = i as u32;
        }
        self.data.iter().map(|v| distinct[v]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Valuation,
    Ultravaluation,
    Intervaluation,
    Raw,
}

/// A symmetric distance table. Entries hold `d^exponent`; the exponent is
/// `1` except for `ℓp` metrics, which keep their `p`-th powers so that
/// everything stays rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricTable {
    table: PairTable,
    exponent: u32,
    kind: MetricKind,
}

impl MetricTable {
    pub fn new(table: PairTable, kind: MetricKind) -> Self {
        Self { table, exponent: 1, kind }
    }

    pub fn with_exponent(table: PairTable, exponent: u32, kind: MetricKind) -> Self {
        assert!(exponent >= 1, "metric exponent must be positive");
        Self { table, exponent, kind }
    }

    /// `d(f, g) = 1` for `f ≠ g`.
    pub fn discrete(n: usize) -> Self {
        Self::new(PairTable::from_fn(n, |a, b| if a == b { int(0) } else { int(1) }), MetricKind::Raw)
    }

    pub fn size(&self) -> usize {
        self.table.size()
    }

    /// The stored value `d(a, b)^exponent`.
    #[inline]
    pub fn get(&self, a: Element, b: Element) -> &Rational {
        self.table.get(a, b)
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn table(&self) -> &PairTable {
        &self.table
    }

    /// Whether distinct elements are at positive distance.
    pub fn is_metric(&self) -> bool {
        let n = self.size();
        (0..n).all(|a| (0..n).all(|b| a == b || self.get(a, b).is_positive()))
    }

    /// The table re-expressed with `exponent`, when that is exact.
    pub fn powered(&self, exponent: u32) -> Option<PairTable> {
        if exponent == self.exponent {
            Some(self.table.clone())
        } else if self.exponent == 1 {
            Some(self.table.map(|x| crate::exact::pow(x, exponent)))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricViolation {
    NonzeroDiagonal(Element),
    Negative(Element, Element),
    Asymmetric(Element, Element),
    /// `d(a, b) > d(a, via) + d(via, b)`.
    Triangle {
        a: Element,
        b: Element,
        via: Element,
    },
    /// `d(a, b) > d(a, via) ∨ d(via, b)`.
    StrongTriangle {
        a: Element,
        b: Element,
        via: Element,
    },
}

/// Pseudo-metric axioms: zero diagonal, nonnegativity, symmetry, triangle.
pub fn check_metric_axioms(d: &MetricTable) -> Vec<MetricViolation> {
    let n = d.size();
    let p = d.exponent();
    let mut out = Vec::new();
    for a in 0..n {
        if !d.get(a, a).is_zero() {
            out.push(MetricViolation::NonzeroDiagonal(a));
        }
        for b in 0..n {
            if d.get(a, b).is_negative() {
                out.push(MetricViolation::Negative(a, b));
            }
            if a < b && d.get(a, b) != d.get(b, a) {
                out.push(MetricViolation::Asymmetric(a, b));
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            (a + 1..n).flat_map(move |b| {
                (0..n).filter_map(move |via| {
                    (!root_le_sum(d.get(a, b), d.get(a, via), d.get(via, b), p)).then_some(MetricViolation::Triangle {
                        a,
                        b,
                        via,
                    })
                })
            })
        })
        .collect()
}

/// `d(a, b) <= d(a, c) ∨ d(c, b)` over all triples.
pub fn check_strong_triangle(d: &MetricTable) -> Vec<MetricViolation> {
    let n = d.size();
    let ranks = d.table().ranks();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let ranks = &ranks;
            (a + 1..n).flat_map(move |b| {
                (0..n).filter_map(move |via| {
                    (ranks[a * n + b] > ranks[a * n + via].max(ranks[via * n + b]))
                        .then_some(MetricViolation::StrongTriangle { a, b, via })
                })
            })
        })
        .collect()
}
