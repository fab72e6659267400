//! Straightforward re-implementations used as independent references.

#![allow(dead_code)]

use metriclat_core::{Element, FiniteLattice, MetricTable, Rational};

pub fn d_irreducible(l: &FiniteLattice, d: &MetricTable, p: Element) -> bool {
    for f in l.elements() {
        for g in l.elements() {
            let a = d.get(p, f);
            let b = d.get(p, g);
            let least = if a < b { a } else { b };
            if least > d.get(p, l.join(f, g)) {
                return false;
            }
        }
    }
    true
}

pub fn strictly_below_is_chain(l: &FiniteLattice, p: Element) -> bool {
    let below: Vec<Element> = l.elements().filter(|&f| f != p && l.leq(f, p)).collect();
    below.iter().all(|&a| below.iter().all(|&b| l.leq(a, b) || l.leq(b, a)))
}

pub fn join_irreducible(l: &FiniteLattice, p: Element) -> bool {
    l.elements().all(|f| l.elements().all(|g| l.join(f, g) != p || f == p || g == p))
}

pub fn strong_triangle(d: &MetricTable) -> bool {
    let n = d.size();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| d.get(a, b) <= d.get(a, c).max(d.get(c, b)))))
}

/// Joins of every nonempty subfamily, by explicit enumeration.
pub fn family_joins(l: &FiniteLattice, base: &[Element]) -> Vec<Element> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << base.len()) {
        let mut it = base.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &b)| b);
        let first = it.next().unwrap();
        out.push(it.fold(first, |acc, b| l.join(acc, b)));
    }
    out
}

pub fn is_zero_base(l: &FiniteLattice, d: &MetricTable, base: &[Element]) -> bool {
    let joins = family_joins(l, base);
    l.elements().all(|f| joins.iter().any(|&j| *d.get(f, j) == Rational::from_integer(0.into())))
}
