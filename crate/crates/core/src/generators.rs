//! Constructors for the example lattice families: set lattices, divisor
//! lattices, products of chains, sublattices and subspace lattices.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::exact::{int, Rational};
use crate::lattice::{Bound, Element, ElementSet, FiniteLattice, LatticeError, MAX_ELEMENTS};
use crate::valuation::Valuation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("closure has more than {MAX_ELEMENTS} members")]
    ClosureTooLarge,
    #[error("atom {0} is not in the ground set")]
    UnknownAtom(String),
    #[error("atom {0} appears twice in the ground set")]
    DuplicateAtom(String),
    #[error("family is not closed: the {op} of members {a} and {b} is missing")]
    NotClosed { a: Element, b: Element, op: Bound },
    #[error("family lists the same set twice (members {0} and {1})")]
    DuplicateMember(Element, Element),
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("a sublattice needs at least one element")]
    EmptySelection,
}

/// A ground-set atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Int(i64),
    Name(String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Int(n) => write!(f, "{n}"),
            Atom::Name(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Atom {
    fn from(n: i64) -> Self {
        Atom::Int(n)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom::Name(s.to_string())
    }
}

/// A lattice of subsets of a finite ground set, ordered by inclusion.
#[derive(Debug, Clone)]
pub struct SetLattice {
    ground: Vec<Atom>,
    members: Vec<FixedBitSet>,
    lattice: FiniteLattice,
}

impl SetLattice {
    /// Wraps a family that is already closed under union and intersection,
    /// keeping the given member order as the element order.
    pub fn from_family(ground: Vec<Atom>, members: Vec<FixedBitSet>) -> Result<Self, GeneratorError> {
        check_ground(&ground)?;
        let mut seen = HashMap::with_capacity(members.len());
        for (i, m) in members.iter().enumerate() {
            if let Some(j) = seen.insert(m.clone(), i) {
                return Err(GeneratorError::DuplicateMember(j, i));
            }
        }
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                let mut u = members[a].clone();
                u.union_with(&members[b]);
                if !seen.contains_key(&u) {
                    return Err(GeneratorError::NotClosed { a, b, op: Bound::Join });
                }
                let mut i = members[a].clone();
                i.intersect_with(&members[b]);
                if !seen.contains_key(&i) {
                    return Err(GeneratorError::NotClosed { a, b, op: Bound::Meet });
                }
            }
        }
        let labels = members.iter().map(|m| set_label(&ground, m)).collect();
        let lattice = FiniteLattice::from_order_fn(labels, |a, b| members[a].is_subset(&members[b]))?;
        Ok(Self { ground, members, lattice })
    }

    pub fn ground(&self) -> &[Atom] {
        &self.ground
    }

    pub fn members(&self) -> &[FixedBitSet] {
        &self.members
    }

    pub fn member(&self, e: Element) -> &FixedBitSet {
        &self.members[e]
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn atom_index(&self, atom: &Atom) -> Option<usize> {
        self.ground.iter().position(|a| a == atom)
    }

    pub fn member_atoms(&self, e: Element) -> Vec<&Atom> {
        self.members[e].ones().map(|i| &self.ground[i]).collect()
    }

    pub fn find(&self, set: &FixedBitSet) -> Option<Element> {
        self.members.iter().position(|m| m == set)
    }

    pub fn find_atoms(&self, atoms: &[Atom]) -> Result<Option<Element>, GeneratorError> {
        Ok(self.find(&self.bits_of(atoms)?))
    }

    fn bits_of(&self, atoms: &[Atom]) -> Result<FixedBitSet, GeneratorError> {
        bits_of(&self.ground, atoms)
    }
}

fn check_ground(ground: &[Atom]) -> Result<(), GeneratorError> {
    let mut seen = HashSet::new();
    for a in ground {
        if !seen.insert(a) {
            return Err(GeneratorError::DuplicateAtom(a.to_string()));
        }
    }
    Ok(())
}

fn bits_of(ground: &[Atom], atoms: &[Atom]) -> Result<FixedBitSet, GeneratorError> {
    let mut bits = FixedBitSet::with_capacity(ground.len());
    for a in atoms {
        let i = ground.iter().position(|g| g == a).ok_or_else(|| GeneratorError::UnknownAtom(a.to_string()))?;
        bits.insert(i);
    }
    Ok(bits)
}

fn set_label(ground: &[Atom], set: &FixedBitSet) -> String {
    let items: Vec<String> = set.ones().map(|i| ground[i].to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Orders bit-vectors by population count, then by numeric value with atom
/// `i` weighted `2^i`.
fn popcount_then_value(a: &FixedBitSet, b: &FixedBitSet) -> Ordering {
    a.count_ones(..).cmp(&b.count_ones(..)).then_with(|| a.as_slice().iter().rev().cmp(b.as_slice().iter().rev()))
}

/// Closure of `generators` (plus ∅, plus the ground set if asked) under
/// union and intersection.
pub fn subset_lattice(
    ground: Vec<Atom>,
    generators: &[Vec<Atom>],
    include_ground: bool,
) -> Result<SetLattice, GeneratorError> {
    check_ground(&ground)?;
    let n = ground.len();
    let mut seeds = vec![FixedBitSet::with_capacity(n)];
    if include_ground {
        let mut all = FixedBitSet::with_capacity(n);
        all.insert_range(..);
        seeds.push(all);
    }
    for g in generators {
        seeds.push(bits_of(&ground, g)?);
    }
    let mut members: Vec<FixedBitSet> = Vec::new();
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut queue: VecDeque<FixedBitSet> = seeds.into_iter().collect();
    while let Some(x) = queue.pop_front() {
        if !seen.insert(x.clone()) {
            continue;
        }
        if seen.len() > MAX_ELEMENTS {
            return Err(GeneratorError::ClosureTooLarge);
        }
        for y in &members {
            let mut u = x.clone();
            u.union_with(y);
            if !seen.contains(&u) {
                queue.push_back(u);
            }
            let mut i = x.clone();
            i.intersect_with(y);
            if !seen.contains(&i) {
                queue.push_back(i);
            }
        }
        members.push(x);
    }
    members.sort_by(popcount_then_value);
    SetLattice::from_family(ground, members)
}

/// Full power set of the ground list.
pub fn powerset_lattice(ground: Vec<Atom>) -> Result<SetLattice, GeneratorError> {
    let singletons: Vec<Vec<Atom>> = ground.iter().map(|a| vec![a.clone()]).collect();
    subset_lattice(ground, &singletons, true)
}

/// Divisors of `n` under divisibility.
#[derive(Debug, Clone)]
pub struct DivisorLattice {
    n: u64,
    primes: Vec<u64>,
    divisors: Vec<u64>,
    exponents: Vec<Vec<u32>>,
    lattice: FiniteLattice,
}

pub fn divisor_lattice(n: u64) -> Result<DivisorLattice, GeneratorError> {
    if !(2..=1_000_000).contains(&n) {
        return Err(GeneratorError::OutOfRange { what: "n", value: n });
    }
    let factors = factorize(n);
    let primes: Vec<u64> = factors.iter().map(|&(p, _)| p).collect();
    let mut exponents: Vec<Vec<u32>> = vec![vec![]];
    for &(_, k) in &factors {
        exponents = exponents.into_iter().flat_map(|e| (0..=k).map(move |i| [e.as_slice(), &[i]].concat())).collect();
    }
    let value = |e: &[u32]| primes.iter().zip(e).map(|(&p, &k)| p.pow(k)).product::<u64>();
    exponents.sort_by_key(|e| value(e));
    let divisors: Vec<u64> = exponents.iter().map(|e| value(e)).collect();
    let labels = divisors.iter().map(u64::to_string).collect();
    let lattice = FiniteLattice::from_order_fn(labels, |a, b| divisors[b].is_multiple_of(divisors[a]))?;
    Ok(DivisorLattice { n, primes, divisors, exponents, lattice })
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl DivisorLattice {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn exponent_vector(&self, e: Element) -> &[u32] {
        &self.exponents[e]
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn element_of(&self, d: u64) -> Option<Element> {
        self.divisors.iter().position(|&x| x == d)
    }

    /// Ω: prime factors counted with multiplicity.
    pub fn omega(&self) -> Valuation {
        Valuation::new(self.exponents.iter().map(|e| int(e.iter().sum::<u32>() as i64)).collect())
    }

    /// Natural logarithms of the divisors, for display only.
    pub fn log_values(&self) -> Vec<f64> {
        self.divisors.iter().map(|&d| (d as f64).ln()).collect()
    }
}

/// Componentwise-ordered product of chains `{0..h}`.
#[derive(Debug, Clone)]
pub struct ProductChain {
    heights: Vec<u32>,
    coords: Vec<Vec<u32>>,
    lattice: FiniteLattice,
}

pub fn product_chain_lattice(heights: &[u32]) -> Result<ProductChain, GeneratorError> {
    if let Some(&h) = heights.iter().find(|&&h| h == 0) {
        return Err(GeneratorError::OutOfRange { what: "height", value: h as u64 });
    }
    let size = heights.iter().try_fold(1usize, |acc, &h| acc.checked_mul(h as usize + 1));
    match size {
        Some(s) if s <= MAX_ELEMENTS => {}
        _ => return Err(LatticeError::TooLarge { size: size.unwrap_or(usize::MAX) }.into()),
    }
    let mut coords: Vec<Vec<u32>> = vec![vec![]];
    for &h in heights {
        coords = coords.into_iter().flat_map(|c| (0..=h).map(move |i| [c.as_slice(), &[i]].concat())).collect();
    }
    coords.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then_with(|| a.cmp(b)));
    let labels = coords.iter().map(|c| tuple_label(c.iter())).collect();
    let lattice = FiniteLattice::from_order_fn(labels, |a, b| coords[a].iter().zip(&coords[b]).all(|(x, y)| x <= y))?;
    Ok(ProductChain { heights: heights.to_vec(), coords, lattice })
}

pub(crate) fn tuple_label<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    let parts: Vec<String> = items.map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

impl ProductChain {
    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    pub fn coords(&self, e: Element) -> &[u32] {
        &self.coords[e]
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn element_of(&self, coords: &[u32]) -> Option<Element> {
        self.coords.iter().position(|c| c == coords)
    }

    /// Coordinates as rational function values, one row per element.
    pub fn function_values(&self) -> Vec<Vec<Rational>> {
        self.coords.iter().map(|c| c.iter().map(|&x| int(x as i64)).collect()).collect()
    }
}

/// A sublattice together with the parent index of each of its elements.
#[derive(Debug, Clone)]
pub struct Sublattice {
    pub lattice: FiniteLattice,
    /// `embedding[i]` is the parent element numbered `i` here; ascending.
    pub embedding: Vec<Element>,
}

/// Restricts `parent` to `selection`, renumbering in ascending parent order.
pub fn sublattice(parent: &FiniteLattice, selection: &ElementSet) -> Result<Sublattice, GeneratorError> {
    if selection.is_empty() {
        return Err(GeneratorError::EmptySelection);
    }
    if let Some(&index) = selection.iter().find(|&&e| e >= parent.size()) {
        return Err(LatticeError::IndexOutOfRange { index, size: parent.size() }.into());
    }
    for &a in selection {
        for &b in selection.range(a..) {
            if !selection.contains(&parent.join(a, b)) {
                return Err(GeneratorError::NotClosed { a, b, op: Bound::Join });
            }
            if !selection.contains(&parent.meet(a, b)) {
                return Err(GeneratorError::NotClosed { a, b, op: Bound::Meet });
            }
        }
    }
    let embedding: Vec<Element> = selection.iter().copied().collect();
    let labels = embedding.iter().map(|&e| parent.label(e).to_string()).collect();
    let lattice = FiniteLattice::from_order_fn(labels, |a, b| parent.leq(embedding[a], embedding[b]))?;
    Ok(Sublattice { lattice, embedding })
}

/// A chain whose elements carry the given labels in increasing order.
pub fn chain_lattice(labels: Vec<String>) -> Result<FiniteLattice, GeneratorError> {
    Ok(FiniteLattice::from_order_fn(labels, |a, b| a <= b)?)
}

/// All subspaces of `GF(q)^n`, each stored by its reduced row-echelon basis.
#[derive(Debug, Clone)]
pub struct SubspaceLattice {
    q: u32,
    n: u32,
    subspaces: Vec<Vec<Vec<u32>>>,
    lattice: FiniteLattice,
}

pub fn subspace_lattice(q: u32, n: u32) -> Result<SubspaceLattice, GeneratorError> {
    if !is_prime(q as u64) {
        return Err(GeneratorError::NotPrime(q as u64));
    }
    if !(1..=4).contains(&n) {
        return Err(GeneratorError::OutOfRange { what: "dimension", value: n as u64 });
    }
    let field = PrimeField(q);
    let vectors: Vec<Vec<u32>> = (1..(q as u64).pow(n))
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = (k % q as u64) as u32;
                    k /= q as u64;
                    d
                })
                .collect()
        })
        .collect();
    let mut seen: HashSet<Vec<Vec<u32>>> = HashSet::new();
    let mut queue = VecDeque::from([Vec::new()]);
    let mut subspaces = Vec::new();
    while let Some(basis) = queue.pop_front() {
        if !seen.insert(basis.clone()) {
            continue;
        }
        if seen.len() > MAX_ELEMENTS {
            return Err(GeneratorError::ClosureTooLarge);
        }
        if basis.len() < n as usize {
            for v in &vectors {
                let mut rows = basis.clone();
                rows.push(v.clone());
                let span = field.rref(rows);
                if span.len() > basis.len() && !seen.contains(&span) {
                    queue.push_back(span);
                }
            }
        }
        subspaces.push(basis);
    }
    subspaces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let labels = subspaces.iter().map(|b| basis_label(b)).collect();
    let lattice = FiniteLattice::from_order_fn(labels, |a, b| {
        subspaces[a].len() <= subspaces[b].len()
            && field.rref([subspaces[a].clone(), subspaces[b].clone()].concat()).len() == subspaces[b].len()
    })?;
    Ok(SubspaceLattice { q, n, subspaces, lattice })
}

fn basis_label(basis: &[Vec<u32>]) -> String {
    let rows: Vec<String> = basis.iter().map(|r| r.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")).collect();
    format!("[{}]", rows.join(";"))
}

fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}

impl SubspaceLattice {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn basis(&self, e: Element) -> &[Vec<u32>] {
        &self.subspaces[e]
    }

    pub fn dim(&self, e: Element) -> usize {
        self.subspaces[e].len()
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    /// The dimension function as a valuation.
    pub fn dimension(&self) -> Valuation {
        Valuation::new(self.subspaces.iter().map(|b| int(b.len() as i64)).collect())
    }
}

#[derive(Clone, Copy)]
struct PrimeField(u32);

impl PrimeField {
    fn inv(self, a: u32) -> u32 {
        let p = self.0 as u64;
        let mut result = 1u64;
        let mut base = a as u64 % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        result as u32
    }

    /// Reduced row-echelon form with zero rows dropped.
    fn rref(self, mut rows: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
        let p = self.0 as u64;
        let width = rows.first().map_or(0, Vec::len);
        let mut lead = 0;
        for col in 0..width {
            let Some(pivot) = (lead..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
            rows.swap(lead, pivot);
            let inv = self.inv(rows[lead][col]) as u64;
            for x in rows[lead].iter_mut() {
                *x = (*x as u64 * inv % p) as u32;
            }
            let pivot_row = rows[lead].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != lead && row[col] != 0 {
                    let factor = row[col] as u64;
                    for (x, &y) in row.iter_mut().zip(&pivot_row) {
                        let sub = factor * y as u64 % p;
                        *x = ((*x as u64 + p - sub) % p) as u32;
                    }
                }
            }
            lead += 1;
        }
        rows.truncate(lead);
        rows
    }
}
