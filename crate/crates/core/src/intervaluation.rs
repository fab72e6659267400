//! Intervaluations: a pair function `w` with a combine operation `∘`
//! satisfying the sandwiched cut law
//! `w(f, g∨h) ∘ w(f∧h, g) <= w(f, g) <= w(f, g∨h) + w(f∧h, g)`.
//!
//! For `ℓp` the values `w` and `r ∘ s` are generally irrational, so tables
//! keep `p`-th powers ("representation power" of the operation) and every
//! comparison is made on those.

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exact::{perfect_root, pow, root_le_sum, Rational};
use crate::lattice::{Element, FiniteLattice};
use crate::metric::{MetricKind, MetricTable, PairTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombineOp {
    Add,
    Max,
    /// `(r^p + s^p)^(1/p)`.
    Lp(u32),
}

impl CombineOp {
    /// Built-in operations in classification order.
    pub const BUILTIN: [CombineOp; 4] = [CombineOp::Add, CombineOp::Max, CombineOp::Lp(2), CombineOp::Lp(3)];

    /// Power in which values of this operation are stored.
    pub fn power(self) -> u32 {
        match self {
            CombineOp::Add | CombineOp::Max => 1,
            CombineOp::Lp(p) => p,
        }
    }

    /// Lifts a plain value into the stored representation.
    pub fn lift(self, r: &Rational) -> Rational {
        pow(r, self.power())
    }

    /// `r ∘ s` on stored representations.
    pub fn combine(self, r: &Rational, s: &Rational) -> Rational {
        match self {
            CombineOp::Add | CombineOp::Lp(_) => r + s,
            CombineOp::Max => r.max(s).clone(),
        }
    }

    /// `r ∘ s` on plain values, when it is rational.
    pub fn apply(self, r: &Rational, s: &Rational) -> Option<Rational> {
        perfect_root(&self.combine(&self.lift(r), &self.lift(s)), self.power())
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "add" => Some(CombineOp::Add),
            "max" => Some(CombineOp::Max),
            _ => match s.strip_prefix("lp")?.parse::<u32>().ok()? {
                0 => None,
                1 => Some(CombineOp::Add),
                p => Some(CombineOp::Lp(p)),
            },
        }
    }
}

impl fmt::Display for CombineOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombineOp::Add => f.write_str("add"),
            CombineOp::Max => f.write_str("max"),
            CombineOp::Lp(p) => write!(f, "lp{p}"),
        }
    }
}

/// A failed operation law, with the plain sample values involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpViolation {
    /// `r ∘ 0 = 0 ∘ r = r` fails.
    Identity(Rational),
    Commutativity(Rational, Rational),
    Associativity(Rational, Rational, Rational),
    /// `r ∘ t <= (r + s) ∘ (t + u)` fails.
    LowerSandwich([Rational; 4]),
    /// `(r + s) ∘ (t + u) <= (r ∘ t) + (s ∘ u)` fails.
    UpperSandwich([Rational; 4]),
    /// `r ∨ s <= r ∘ s` fails.
    Domination(Rational, Rational),
    /// A closed-form law could not be proved.
    Symbolic(&'static str),
}

/// Operation axioms on every sample `[r, s, t, u]`, plus the closed-form
/// proof for `Add` and `Max`.
pub fn check_op_axioms(op: CombineOp, samples: &[[Rational; 4]]) -> Vec<OpViolation> {
    let mut out: Vec<OpViolation> = match op {
        CombineOp::Add | CombineOp::Max => symbolic::check(op).into_iter().map(OpViolation::Symbolic).collect(),
        CombineOp::Lp(_) => Vec::new(),
    };
    let k = op.power();
    let lifted_op = |r: &Rational, s: &Rational| op.combine(&op.lift(r), &op.lift(s));
    let sampled: Vec<Vec<OpViolation>> = samples
        .par_iter()
        .map(|[r, s, t, u]| {
            let mut v = Vec::new();
            let zero = Rational::zero();
            if lifted_op(r, &zero) != op.lift(r) || lifted_op(&zero, r) != op.lift(r) {
                v.push(OpViolation::Identity(r.clone()));
            }
            if lifted_op(r, s) != lifted_op(s, r) {
                v.push(OpViolation::Commutativity(r.clone(), s.clone()));
            }
            let left = op.combine(&lifted_op(r, s), &op.lift(t));
            let right = op.combine(&op.lift(r), &lifted_op(s, t));
            if left != right {
                v.push(OpViolation::Associativity(r.clone(), s.clone(), t.clone()));
            }
            let inner = lifted_op(r, t);
            let middle = lifted_op(&(r + s), &(t + u));
            let sample = || [r.clone(), s.clone(), t.clone(), u.clone()];
            if inner > middle {
                v.push(OpViolation::LowerSandwich(sample()));
            }
            if !root_le_sum(&middle, &inner, &lifted_op(s, u), k) {
                v.push(OpViolation::UpperSandwich(sample()));
            }
            if op.lift(r.max(s)) > lifted_op(r, s) {
                v.push(OpViolation::Domination(r.clone(), s.clone()));
            }
            v
        })
        .collect();
    out.extend(sampled.into_iter().flatten());
    out
}

/// Outcome for an operation given only as a function: sampling can refute
/// the laws but never establish them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpVerdict {
    NotFalsified { samples: usize },
    Falsified(Vec<OpViolation>),
}

impl fmt::Display for OpVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpVerdict::NotFalsified { samples } => write!(f, "not falsified at {samples} samples"),
            OpVerdict::Falsified(v) => write!(f, "falsified ({} violations)", v.len()),
        }
    }
}

/// Samples the operation laws for an arbitrary rational operation.
pub fn check_custom_op(op: impl Fn(&Rational, &Rational) -> Rational + Sync, samples: &[[Rational; 4]]) -> OpVerdict {
    let violations: Vec<OpViolation> = samples
        .par_iter()
        .flat_map_iter(|[r, s, t, u]| {
            let zero = Rational::zero();
            let sample = [r.clone(), s.clone(), t.clone(), u.clone()];
            let checks = [
                (op(r, &zero) != *r || op(&zero, r) != *r, OpViolation::Identity(r.clone())),
                (op(r, s) != op(s, r), OpViolation::Commutativity(r.clone(), s.clone())),
                (op(&op(r, s), t) != op(r, &op(s, t)), OpViolation::Associativity(r.clone(), s.clone(), t.clone())),
                (op(r, t) > op(&(r + s), &(t + u)), OpViolation::LowerSandwich(sample.clone())),
                (op(&(r + s), &(t + u)) > op(r, t) + op(s, u), OpViolation::UpperSandwich(sample)),
                (r.max(s) > &op(r, s), OpViolation::Domination(r.clone(), s.clone())),
            ];
            checks.into_iter().filter(|(bad, _)| *bad).map(|(_, v)| v)
        })
        .collect();
    if violations.is_empty() {
        OpVerdict::NotFalsified { samples: samples.len() }
    } else {
        OpVerdict::Falsified(violations)
    }
}

/// Closed-form proofs for `Add` and `Max` over nonnegative reals.
///
/// Every expression built from variables, `+` and `∨` equals a maximum of
/// linear forms with nonnegative integer coefficients. `A <= B` holds for
/// all nonnegative inputs when each form of `A` is dominated coefficientwise
/// by some form of `B`.
mod symbolic {
    use super::CombineOp;

    #[derive(Clone)]
    struct Expr(Vec<[u32; 4]>);

    impl Expr {
        fn var(i: usize) -> Self {
            let mut f = [0; 4];
            f[i] = 1;
            Expr(vec![f])
        }

        fn zero() -> Self {
            Expr(vec![[0; 4]])
        }

        fn add(&self, other: &Self) -> Self {
            let mut forms = Vec::new();
            for a in &self.0 {
                for b in &other.0 {
                    forms.push([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]);
                }
            }
            Expr(forms)
        }

        fn max(&self, other: &Self) -> Self {
            Expr(self.0.iter().chain(&other.0).copied().collect())
        }

        fn le(&self, other: &Self) -> bool {
            self.0.iter().all(|a| other.0.iter().any(|b| a.iter().zip(b).all(|(x, y)| x <= y)))
        }

        fn eq(&self, other: &Self) -> bool {
            self.le(other) && other.le(self)
        }
    }

    fn combine(op: CombineOp, a: &Expr, b: &Expr) -> Expr {
        match op {
            CombineOp::Add => a.add(b),
            CombineOp::Max => a.max(b),
            CombineOp::Lp(_) => unreachable!("no closed form for lp"),
        }
    }

    /// Names of the laws that could not be proved.
    pub(super) fn check(op: CombineOp) -> Vec<&'static str> {
        let [r, s, t, u] = [0, 1, 2, 3].map(Expr::var);
        let c = |a: &Expr, b: &Expr| combine(op, a, b);
        let laws = [
            ("identity", c(&r, &Expr::zero()).eq(&r) && c(&Expr::zero(), &r).eq(&r)),
            ("commutativity", c(&r, &s).eq(&c(&s, &r))),
            ("associativity", c(&c(&r, &s), &t).eq(&c(&r, &c(&s, &t)))),
            ("lower sandwich", c(&r, &t).le(&c(&r.add(&s), &t.add(&u)))),
            ("upper sandwich", c(&r.add(&s), &t.add(&u)).le(&c(&r, &t).add(&c(&s, &u)))),
            ("domination", r.max(&s).le(&c(&r, &s))),
        ];
        laws.into_iter().filter(|(_, ok)| !ok).map(|(name, _)| name).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervaluationError {
    #[error("expected a {expected}x{expected} table, got {got}x{got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("intervaluation law fails: {0:?}")]
    AxiomViolated(IntervaluationViolation),
    #[error("functions {f} and {g} do not have the pointwise {which} as their lattice {which}")]
    NotPointwise { f: Element, g: Element, which: &'static str },
    #[error("value vectors have the wrong shape")]
    ShapeMismatch,
    #[error("the lattice is not distributive")]
    NotDistributive,
    #[error("not positive: w({f}, {g}) = 0 although {f} is not below {g}")]
    NotPositive { f: Element, g: Element },
    #[error("no built-in operation turns this metric into an intervaluation metric")]
    NoQualifyingOp,
    #[error("entry d({f}, {g}) has no rational root of the stored power")]
    IrrationalEntry { f: Element, g: Element },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntervaluationViolation {
    Negative {
        f: Element,
        g: Element,
    },
    /// `f <= g` but `w(f, g) > 0`.
    NonzeroBelow {
        f: Element,
        g: Element,
    },
    /// `w(f, g∨h) ∘ w(f∧h, g) > w(f, g)`.
    LeftCut {
        f: Element,
        g: Element,
        h: Element,
    },
    /// `w(f, g) > w(f, g∨h) + w(f∧h, g)`.
    RightCut {
        f: Element,
        g: Element,
        h: Element,
    },
}

/// `w` stored in the operation's representation power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Intervaluation {
    w: PairTable,
    op: CombineOp,
}

impl Intervaluation {
    /// From plain values.
    pub fn new(w: &PairTable, op: CombineOp) -> Self {
        Self { w: w.map(|x| op.lift(x)), op }
    }

    /// From values already raised to `op.power()`.
    pub fn from_powered(w: PairTable, op: CombineOp) -> Self {
        Self { w, op }
    }

    pub fn op(&self) -> CombineOp {
        self.op
    }

    /// Stored entry `w(f, g)^power`.
    pub fn get(&self, f: Element, g: Element) -> &Rational {
        self.w.get(f, g)
    }

    pub fn table(&self) -> &PairTable {
        &self.w
    }

    pub fn size(&self) -> usize {
        self.w.size()
    }

    /// `w(f, g) = 0 ⟹ f <= g`.
    pub fn is_positive(&self, l: &FiniteLattice) -> bool {
        self.first_non_positive(l).is_none()
    }

    fn first_non_positive(&self, l: &FiniteLattice) -> Option<(Element, Element)> {
        l.elements()
            .flat_map(|f| l.elements().map(move |g| (f, g)))
            .find(|&(f, g)| self.w.get(f, g).is_zero() && !l.leq(f, g))
    }
}

/// Nonnegativity, the zero law on comparable pairs and both cut inequalities.
pub fn check_intervaluation(l: &FiniteLattice, iv: &Intervaluation) -> Vec<IntervaluationViolation> {
    let n = l.size();
    let mut out = Vec::new();
    for f in 0..n {
        for g in 0..n {
            if iv.get(f, g).is_negative() {
                out.push(IntervaluationViolation::Negative { f, g });
            } else if l.leq(f, g) && !iv.get(f, g).is_zero() {
                out.push(IntervaluationViolation::NonzeroBelow { f, g });
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    let (op, k) = (iv.op, iv.op.power());
    let cut: Vec<IntervaluationViolation> = (0..n)
        .into_par_iter()
        .flat_map_iter(|f| {
            (0..n).flat_map(move |g| {
                (0..n).flat_map(move |h| {
                    let whole = iv.get(f, g);
                    let upper = iv.get(f, l.join(g, h));
                    let lower = iv.get(l.meet(f, h), g);
                    let left =
                        (op.combine(upper, lower) > *whole).then_some(IntervaluationViolation::LeftCut { f, g, h });
                    let right =
                        (!root_le_sum(whole, upper, lower, k)).then_some(IntervaluationViolation::RightCut { f, g, h });
                    left.into_iter().chain(right)
                })
            })
        })
        .collect();
    out.extend(cut);
    out
}

/// `d(f, g) = w(f, g) ∘ w(g, f)`, stored in the operation's power.
pub fn metric_from_intervaluation(l: &FiniteLattice, iv: &Intervaluation) -> Result<MetricTable, IntervaluationError> {
    if iv.size() != l.size() {
        return Err(IntervaluationError::SizeMismatch { expected: l.size(), got: iv.size() });
    }
    if let Some(v) = check_intervaluation(l, iv).into_iter().next() {
        return Err(IntervaluationError::AxiomViolated(v));
    }
    Ok(derived_metric(iv))
}

fn derived_metric(iv: &Intervaluation) -> MetricTable {
    let table = PairTable::from_fn(iv.size(), |f, g| iv.op.combine(iv.get(f, g), iv.get(g, f)));
    MetricTable::with_exponent(table, iv.op.power(), MetricKind::Intervaluation)
}

/// Pairs where `w(f, g) = w(f∨g, g) = w(f, f∧g) = d(f∨g, g)` fails.
pub fn check_prop_intervaluation(l: &FiniteLattice, iv: &Intervaluation) -> Vec<(Element, Element)> {
    let d = derived_metric(iv);
    l.elements()
        .flat_map(|f| l.elements().map(move |g| (f, g)))
        .filter(|&(f, g)| {
            let w = iv.get(f, g);
            let j = l.join(f, g);
            w != iv.get(j, g) || w != iv.get(f, l.meet(f, g)) || w != d.get(j, g)
        })
        .collect()
}

/// `w_d(f, g) = d(f∨g, g)`, in the metric's own exponent.
pub fn w_from_metric(l: &FiniteLattice, d: &MetricTable) -> PairTable {
    PairTable::from_fn(l.size(), |f, g| d.get(l.join(f, g), g).clone())
}

/// How one operation fares against a metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpFit {
    pub op: CombineOp,
    /// `None` when `w_d` has no exact representation in this operation's power.
    pub violations: Option<Vec<IntervaluationViolation>>,
    /// Pairs where `d(f, g) ≠ w_d(f, g) ∘ w_d(g, f)`.
    pub recovery_failures: Vec<(Element, Element)>,
}

impl OpFit {
    pub fn qualifies(&self) -> bool {
        matches!(&self.violations, Some(v) if v.is_empty()) && self.recovery_failures.is_empty()
    }
}

/// Re-expresses a table of `x^from` values as `x^to`, when exact.
fn repower(t: &PairTable, from: u32, to: u32) -> Option<PairTable> {
    if from == to {
        return Some(t.clone());
    }
    let n = t.size();
    let mut out = PairTable::zeros(n);
    for f in 0..n {
        for g in 0..n {
            out.set(f, g, pow(&perfect_root(t.get(f, g), from)?, to));
        }
    }
    Some(out)
}

/// `a^(1/ka) == b^(1/kb)` for nonnegative `a, b`.
fn roots_equal(a: &Rational, ka: u32, b: &Rational, kb: u32) -> bool {
    let l = ka.lcm(&kb);
    pow(a, l / ka) == pow(b, l / kb)
}

/// Tests `w_d` against each built-in operation.
pub fn classify_metric(l: &FiniteLattice, d: &MetricTable) -> Vec<OpFit> {
    let wd = w_from_metric(l, d);
    let e = d.exponent();
    CombineOp::BUILTIN
        .iter()
        .map(|&op| match repower(&wd, e, op.power()) {
            None => OpFit { op, violations: None, recovery_failures: Vec::new() },
            Some(w) => {
                let iv = Intervaluation::from_powered(w, op);
                let recovery_failures = l
                    .elements()
                    .flat_map(|f| l.elements().map(move |g| (f, g)))
                    .filter(|&(f, g)| !roots_equal(&op.combine(iv.get(f, g), iv.get(g, f)), op.power(), d.get(f, g), e))
                    .collect();
                OpFit { op, violations: Some(check_intervaluation(l, &iv)), recovery_failures }
            }
        })
        .collect()
}

/// A metric known to come from a positive intervaluation on a distributive
/// lattice.
#[derive(Debug, Clone)]
pub struct CertifiedMetric {
    metric: MetricTable,
    intervaluation: Intervaluation,
}

impl CertifiedMetric {
    pub fn metric(&self) -> &MetricTable {
        &self.metric
    }

    pub fn intervaluation(&self) -> &Intervaluation {
        &self.intervaluation
    }

    pub fn from_intervaluation(l: &FiniteLattice, iv: Intervaluation) -> Result<Self, IntervaluationError> {
        if !l.is_distributive() {
            return Err(IntervaluationError::NotDistributive);
        }
        let metric = metric_from_intervaluation(l, &iv)?;
        if let Some((f, g)) = iv.first_non_positive(l) {
            return Err(IntervaluationError::NotPositive { f, g });
        }
        Ok(Self { metric, intervaluation: iv })
    }
}

/// Certifies `d` with the first built-in operation that qualifies.
pub fn certify_metric(l: &FiniteLattice, d: &MetricTable) -> Result<CertifiedMetric, IntervaluationError> {
    if d.size() != l.size() {
        return Err(IntervaluationError::SizeMismatch { expected: l.size(), got: d.size() });
    }
    if !l.is_distributive() {
        return Err(IntervaluationError::NotDistributive);
    }
    let wd = w_from_metric(l, d);
    let fit = classify_metric(l, d).into_iter().find(OpFit::qualifies).ok_or(IntervaluationError::NoQualifyingOp)?;
    let w = repower(&wd, d.exponent(), fit.op.power()).expect("qualifying fit has an exact table");
    let iv = Intervaluation::from_powered(w, fit.op);
    if let Some((f, g)) = iv.first_non_positive(l) {
        return Err(IntervaluationError::NotPositive { f, g });
    }
    Ok(CertifiedMetric { metric: d.clone(), intervaluation: iv })
}

/// `w(r, s) = 0 ∨ (r − s)` on a chain of reals listed in increasing order.
pub fn real_chain_intervaluation(values: &[Rational], op: CombineOp) -> Intervaluation {
    let w = PairTable::from_fn(values.len(), |a, b| (&values[a] - &values[b]).max(Rational::zero()));
    Intervaluation::new(&w, op)
}

/// `0 ∨ (r − s) = (0 ∨ (r − (s ∨ t))) + (0 ∨ ((r ∧ t) − s))`.
pub fn real_chain_cut_identity(r: &Rational, s: &Rational, t: &Rational) -> bool {
    let pos = |x: Rational| x.max(Rational::zero());
    pos(r - s) == pos(r - s.max(t)) + pos(r.min(t) - s)
}

/// `w(f, g) = max_x 0 ∨ (f(x) − g(x))` with `∘ = ∨`, for a lattice of
/// functions given by `values[element][point]`.
pub fn pointwise_sup_intervaluation(
    l: &FiniteLattice,
    values: &[Vec<Rational>],
) -> Result<Intervaluation, IntervaluationError> {
    if values.len() != l.size() {
        return Err(IntervaluationError::ShapeMismatch);
    }
    let width = values.first().map_or(0, Vec::len);
    if values.iter().any(|v| v.len() != width) {
        return Err(IntervaluationError::ShapeMismatch);
    }
    for f in l.elements() {
        for g in l.elements() {
            let pointwise = |pick: fn(&Rational, &Rational) -> bool| {
                values[f].iter().zip(&values[g]).map(move |(a, b)| if pick(a, b) { a.clone() } else { b.clone() })
            };
            if !pointwise(|a, b| a >= b).eq(values[l.join(f, g)].iter().cloned()) {
                return Err(IntervaluationError::NotPointwise { f, g, which: "join" });
            }
            if !pointwise(|a, b| a <= b).eq(values[l.meet(f, g)].iter().cloned()) {
                return Err(IntervaluationError::NotPointwise { f, g, which: "meet" });
            }
        }
    }
    let w = PairTable::from_fn(l.size(), |f, g| {
        values[f].iter().zip(&values[g]).map(|(a, b)| a - b).fold(Rational::zero(), |acc, x| acc.max(x))
    });
    Ok(Intervaluation::new(&w, CombineOp::Max))
}
