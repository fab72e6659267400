//! Finite lattices as explicit order, join and meet tables.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use thiserror::Error;

/// Largest lattice for which tables are materialized.
pub const MAX_ELEMENTS: usize = 4096;

/// Elements are addressed by their index in the lattice tables.
pub type Element = usize;
pub type ElementSet = BTreeSet<Element>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Join,
    Meet,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Join => f.write_str("least upper bound"),
            Bound::Meet => f.write_str("greatest lower bound"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("{size} elements exceeds the limit of {MAX_ELEMENTS}")]
    TooLarge { size: usize },
    #[error("element index {index} out of range for {size} elements")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
    #[error("not a poset: {a} <= {b} and {b} <= {a} for distinct elements")]
    NotAPoset { a: Element, b: Element },
    #[error("not a lattice: {a} and {b} have no unique {which}")]
    NotALattice { a: Element, b: Element, which: Bound },
}

/// A lattice with every table precomputed. Immutable once built.
#[derive(Clone)]
pub struct FiniteLattice {
    labels: Vec<String>,
    index: HashMap<String, Element>,
    /// `up[a]` holds every `b` with `a <= b`.
    up: Vec<FixedBitSet>,
    join: Vec<Element>,
    meet: Vec<Element>,
    bottom: Element,
    top: Element,
    distributive: OnceLock<bool>,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteLattice")
            .field("labels", &self.labels)
            .field("bottom", &self.bottom)
            .field("top", &self.top)
            .finish()
    }
}

/// `n` elements labelled `"0"`, …, `"n-1"`; `pairs` lists `a <= b` relations
/// whose reflexive-transitive closure is the order.
pub fn build_from_leq(n: usize, pairs: &[(Element, Element)]) -> Result<FiniteLattice, LatticeError> {
    FiniteLattice::from_pairs((0..n).map(|i| i.to_string()).collect(), pairs)
}

impl FiniteLattice {
    pub fn from_pairs(labels: Vec<String>, pairs: &[(Element, Element)]) -> Result<Self, LatticeError> {
        let n = labels.len();
        check_size(n)?;
        let mut up = identity_rows(n);
        for &(a, b) in pairs {
            for index in [a, b] {
                if index >= n {
                    return Err(LatticeError::IndexOutOfRange { index, size: n });
                }
            }
            up[a].insert(b);
        }
        transitive_closure(&mut up);
        Self::from_up_rows(labels, up)
    }

    /// Builds from an order predicate. The predicate is closed reflexively
    /// and transitively before the lattice checks run.
    pub fn from_order_fn(labels: Vec<String>, leq: impl Fn(Element, Element) -> bool) -> Result<Self, LatticeError> {
        let n = labels.len();
        check_size(n)?;
        let mut up = identity_rows(n);
        for (a, row) in up.iter_mut().enumerate() {
            for b in 0..n {
                if leq(a, b) {
                    row.insert(b);
                }
            }
        }
        transitive_closure(&mut up);
        Self::from_up_rows(labels, up)
    }

    fn from_up_rows(labels: Vec<String>, up: Vec<FixedBitSet>) -> Result<Self, LatticeError> {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(LatticeError::DuplicateLabel(l.clone()));
            }
        }
        for a in 0..n {
            for b in up[a].ones() {
                if b != a && up[b].contains(a) {
                    return Err(LatticeError::NotAPoset { a: a.min(b), b: a.max(b) });
                }
            }
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (a, row) in up.iter().enumerate() {
            for b in row.ones() {
                down[b].insert(a);
            }
        }
        let join = bound_table(&up, Bound::Join)?;
        let meet = bound_table(&down, Bound::Meet)?;
        let bottom = (0..n).find(|&b| up[b].count_ones(..) == n).expect("finite lattice has a bottom");
        let top = (0..n).find(|&t| down[t].count_ones(..) == n).expect("finite lattice has a top");
        Ok(Self { labels, index, up, join, meet, bottom, top, distributive: OnceLock::new() })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.size()
    }

    pub fn label(&self, e: Element) -> &str {
        &self.labels[e]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<Element> {
        self.index.get(label).copied()
    }

    pub fn bottom(&self) -> Element {
        self.bottom
    }

    pub fn top(&self) -> Element {
        self.top
    }

    #[inline]
    pub fn leq(&self, a: Element, b: Element) -> bool {
        self.up[a].contains(b)
    }

    #[inline]
    pub fn lt(&self, a: Element, b: Element) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: Element, b: Element) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    #[inline]
    pub fn join(&self, a: Element, b: Element) -> Element {
        self.join[a * self.size() + b]
    }

    #[inline]
    pub fn meet(&self, a: Element, b: Element) -> Element {
        self.meet[a * self.size() + b]
    }

    /// Join of a nonempty family; `None` for an empty one.
    pub fn join_all(&self, family: impl IntoIterator<Item = Element>) -> Option<Element> {
        family.into_iter().reduce(|a, b| self.join(a, b))
    }

    pub fn meet_all(&self, family: impl IntoIterator<Item = Element>) -> Option<Element> {
        family.into_iter().reduce(|a, b| self.meet(a, b))
    }

    /// The strictly lower set `{f : f < p}`.
    pub fn down_set(&self, p: Element) -> ElementSet {
        self.elements().filter(|&f| self.lt(f, p)).collect()
    }

    pub fn is_chain<'a>(&self, set: impl IntoIterator<Item = &'a Element>) -> bool {
        let items: Vec<Element> = set.into_iter().copied().collect();
        items.iter().enumerate().all(|(i, &a)| items[i + 1..].iter().all(|&b| self.comparable(a, b)))
    }

    /// Elements `p` with `p = f ∨ g ⟹ p = f or p = g`. Bottom qualifies.
    pub fn join_irreducibles(&self) -> ElementSet {
        let n = self.size();
        let mut reducible = vec![false; n];
        for f in 0..n {
            for g in f + 1..n {
                let j = self.join(f, g);
                if j != f && j != g {
                    reducible[j] = true;
                }
            }
        }
        (0..n).filter(|&p| !reducible[p]).collect()
    }

    /// Join-irreducibles under the convention that excludes bottom.
    pub fn join_irreducibles_nonzero(&self) -> ElementSet {
        let mut set = self.join_irreducibles();
        set.remove(&self.bottom);
        set
    }

    /// Distributivity, cached. A finite lattice is distributive exactly when
    /// every nonzero join-irreducible `j` is join-prime
    /// (`j <= a ∨ b ⟹ j <= a or j <= b`).
    pub fn is_distributive(&self) -> bool {
        *self.distributive.get_or_init(|| {
            let n = self.size();
            self.join_irreducibles_nonzero().into_iter().all(|j| {
                (0..n).all(|a| (a..n).all(|b| !self.leq(j, self.join(a, b)) || self.leq(j, a) || self.leq(j, b)))
            })
        })
    }

    /// Length of the longest chain from bottom to each element.
    pub fn ranks(&self) -> Vec<usize> {
        let n = self.size();
        let mut order: Vec<Element> = (0..n).collect();
        order.sort_by_key(|&e| std::cmp::Reverse(self.up[e].count_ones(..)));
        let mut rank = vec![0usize; n];
        for &e in &order {
            rank[e] = order
                .iter()
                .take_while(|&&x| x != e)
                .filter(|&&x| self.lt(x, e))
                .map(|&x| rank[x] + 1)
                .max()
                .unwrap_or(0);
        }
        rank
    }

    /// Permutation listing elements bottom first, by rank then label.
    pub fn canonical_order(&self) -> Vec<Element> {
        let rank = self.ranks();
        let mut order: Vec<Element> = self.elements().collect();
        order.sort_by(|&a, &b| rank[a].cmp(&rank[b]).then_with(|| self.labels[a].cmp(&self.labels[b])));
        order
    }

    /// Exhaustive check of the lattice identities over the stored tables.
    pub fn axiom_violations(&self) -> Vec<AxiomViolation> {
        let n = self.size();
        let mut out = Vec::new();
        for a in 0..n {
            if self.join(a, a) != a || self.meet(a, a) != a {
                out.push(AxiomViolation::Idempotence(a));
            }
            for b in 0..n {
                if self.join(a, b) != self.join(b, a) || self.meet(a, b) != self.meet(b, a) {
                    out.push(AxiomViolation::Commutativity(a, b));
                }
                if self.join(a, self.meet(a, b)) != a || self.meet(a, self.join(a, b)) != a {
                    out.push(AxiomViolation::Absorption(a, b));
                }
                if self.leq(a, b) != (self.join(a, b) == b) {
                    out.push(AxiomViolation::OrderMismatch(a, b));
                }
                for c in 0..n {
                    if self.join(self.join(a, b), c) != self.join(a, self.join(b, c))
                        || self.meet(self.meet(a, b), c) != self.meet(a, self.meet(b, c))
                    {
                        out.push(AxiomViolation::Associativity(a, b, c));
                    }
                }
            }
        }
        out
    }
}

/// Equality of table structure after canonical renumbering.
impl PartialEq for FiniteLattice {
    fn eq(&self, other: &Self) -> bool {
        if self.size() != other.size() {
            return false;
        }
        let p = self.canonical_order();
        let q = other.canonical_order();
        p.iter().zip(&q).all(|(&a, &b)| self.labels[a] == other.labels[b])
            && p.iter()
                .zip(&q)
                .all(|(&a1, &b1)| p.iter().zip(&q).all(|(&a2, &b2)| self.leq(a1, a2) == other.leq(b1, b2)))
    }
}

impl Eq for FiniteLattice {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    Idempotence(Element),
    Commutativity(Element, Element),
    Absorption(Element, Element),
    OrderMismatch(Element, Element),
    Associativity(Element, Element, Element),
}

fn check_size(n: usize) -> Result<(), LatticeError> {
    match n {
        0 => Err(LatticeError::Empty),
        n if n > MAX_ELEMENTS => Err(LatticeError::TooLarge { size: n }),
        _ => Ok(()),
    }
}

fn identity_rows(n: usize) -> Vec<FixedBitSet> {
    (0..n)
        .map(|i| {
            let mut row = FixedBitSet::with_capacity(n);
            row.insert(i);
            row
        })
        .collect()
}

fn transitive_closure(up: &mut [FixedBitSet]) {
    for k in 0..up.len() {
        let via = up[k].clone();
        up.par_iter_mut().filter(|row| row.contains(k)).for_each(|row| row.union_with(&via));
    }
}

/// For `Bound::Join`, `toward[a]` is the up-set of `a`; for `Bound::Meet`
/// it is the down-set. In both cases the bound of `a` and `b` is the first
/// common member in an order listing larger `toward` rows first, provided it
/// lies below (resp. above) every other common member.
fn bound_table(toward: &[FixedBitSet], which: Bound) -> Result<Vec<Element>, LatticeError> {
    let n = toward.len();
    let mut order: Vec<Element> = (0..n).collect();
    order.sort_by_key(|&e| std::cmp::Reverse(toward[e].count_ones(..)));
    let mut position = vec![0; n];
    for (i, &e) in order.iter().enumerate() {
        position[e] = i;
    }
    let rows: Vec<FixedBitSet> = toward
        .iter()
        .map(|row| {
            let mut r = FixedBitSet::with_capacity(n);
            row.ones().for_each(|b| r.insert(position[b]));
            r
        })
        .collect();
    let per_row: Vec<Result<Vec<Element>, LatticeError>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let ra = rows[a].as_slice();
            (a..n)
                .map(|b| {
                    let rb = rows[b].as_slice();
                    let first = ra
                        .iter()
                        .zip(rb)
                        .enumerate()
                        .find(|(_, (x, y))| *x & *y != 0)
                        .map(|(k, (x, y))| k * 32 + (x & y).trailing_zeros() as usize);
                    let ok = first.filter(|&c| {
                        let rc = rows[order[c]].as_slice();
                        ra.iter().zip(rb).zip(rc).all(|((x, y), z)| x & y & !z == 0)
                    });
                    ok.map(|c| order[c]).ok_or(LatticeError::NotALattice { a, b, which })
                })
                .collect()
        })
        .collect();
    let mut table = vec![0; n * n];
    for (a, row) in per_row.into_iter().enumerate() {
        for (offset, bound) in row?.into_iter().enumerate() {
            let b = a + offset;
            table[a * n + b] = bound;
            table[b * n + a] = bound;
        }
    }
    Ok(table)
}
