//! Discretized lattices of nonnegative 1-Lipschitz functions on a finite
//! metric space, with values on the grid `{0, δ, 2δ, …, M}`, and the
//! function-space metrics that live on them.

use fixedbitset::FixedBitSet;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::{int, pow, Rational};
use crate::generators::{tuple_label, Atom, GeneratorError, SetLattice};
use crate::intervaluation::{CombineOp, Intervaluation};
use crate::lattice::{Element, ElementSet, FiniteLattice, LatticeError, MAX_ELEMENTS};
use crate::metric::{MetricKind, MetricTable, PairTable};
use crate::ultravaluation::{
    from_kappa, metric_from_ultravaluation, KappaWeights, Ultravaluation, UltravaluationError,
};
use crate::valuation::Valuation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctionLatticeError {
    #[error("a metric space needs at least one point")]
    NoPoints,
    #[error("distance matrix is not {0}x{0}")]
    Shape(usize),
    #[error("point label {0} is used twice")]
    DuplicatePoint(String),
    #[error("distance axioms fail at points {a} and {b}")]
    NotAMetric { a: usize, b: usize },
    #[error("{0} is not a positive multiple of the step")]
    GridMismatch(String),
    #[error("{count} functions exceed the limit of {MAX_ELEMENTS}")]
    TooLarge { count: u128 },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight of point {0} is not positive")]
    NonPositiveWeight(usize),
    #[error("no basepoint is set")]
    NoBasepoint,
    #[error("level {level} is above the maximum level {max}")]
    LevelOutOfRange { level: u32, max: u32 },
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Ultravaluation(#[from] UltravaluationError),
}

/// Labeled points with an exact distance matrix and an optional basepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
    basepoint: Option<usize>,
}

impl FiniteMetricSpace {
    pub fn new(
        labels: Vec<String>,
        dist: Vec<Vec<Rational>>,
        basepoint: Option<usize>,
    ) -> Result<Self, FunctionLatticeError> {
        let n = labels.len();
        if n == 0 {
            return Err(FunctionLatticeError::NoPoints);
        }
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(FunctionLatticeError::Shape(n));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(FunctionLatticeError::DuplicatePoint(l.clone()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let d = &dist[a][b];
                let bad = if a == b { !d.is_zero() } else { !d.is_positive() || *d != dist[b][a] };
                if bad || (0..n).any(|c| *d > &dist[a][c] + &dist[c][b]) {
                    return Err(FunctionLatticeError::NotAMetric { a, b });
                }
            }
        }
        if let Some(b) = basepoint {
            if b >= n {
                return Err(LatticeError::IndexOutOfRange { index: b, size: n }.into());
            }
        }
        Ok(Self { labels, dist, basepoint })
    }

    /// Points `0..n` on a line with unit gaps.
    pub fn path(n: usize) -> Result<Self, FunctionLatticeError> {
        let labels = (0..n).map(|i| ((b'a' + (i % 26) as u8) as char).to_string()).collect();
        let dist = (0..n).map(|a| (0..n).map(|b| int((a as i64 - b as i64).abs())).collect()).collect();
        Self::new(labels, dist, None)
    }

    pub fn with_basepoint(mut self, basepoint: usize) -> Result<Self, FunctionLatticeError> {
        if basepoint >= self.len() {
            return Err(LatticeError::IndexOutOfRange { index: basepoint, size: self.len() }.into());
        }
        self.basepoint = Some(basepoint);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn dist(&self, x: usize, y: usize) -> &Rational {
        &self.dist[x][y]
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }
}

/// All grid-valued 1-Lipschitz functions, ordered pointwise.
#[derive(Debug, Clone)]
pub struct GridLipschitzLattice {
    space: FiniteMetricSpace,
    step: Rational,
    max_level: u32,
    weights: Vec<Rational>,
    /// Distances in units of the step.
    steps: Vec<Vec<u32>>,
    /// `levels[e][x]`: value of element `e` at `x`, in steps.
    levels: Vec<Vec<u32>>,
    lattice: FiniteLattice,
}

fn as_multiple(value: &Rational, step: &Rational, what: impl FnOnce() -> String) -> Result<u32, FunctionLatticeError> {
    let q = value / step;
    if !q.is_integer() || q.is_negative() {
        return Err(FunctionLatticeError::GridMismatch(what()));
    }
    q.to_integer().try_into().map_err(|_| FunctionLatticeError::GridMismatch(what()))
}

/// Enumerates the lattice; elements are sorted by level sum, then
/// lexicographically, so the zero function comes first.
pub fn build_lipschitz_lattice(
    space: FiniteMetricSpace,
    step: Rational,
    max: Rational,
    weights: Vec<Rational>,
) -> Result<GridLipschitzLattice, FunctionLatticeError> {
    let n = space.len();
    if !step.is_positive() {
        return Err(FunctionLatticeError::GridMismatch(format!("step {step}")));
    }
    let max_level = as_multiple(&max, &step, || format!("max {max}"))?;
    if max_level == 0 {
        return Err(FunctionLatticeError::GridMismatch(format!("max {max}")));
    }
    if weights.len() != n {
        return Err(FunctionLatticeError::WeightCount { expected: n, got: weights.len() });
    }
    if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
        return Err(FunctionLatticeError::NonPositiveWeight(i));
    }
    let mut steps = vec![vec![0; n]; n];
    for (x, row) in steps.iter_mut().enumerate() {
        for (y, slot) in row.iter_mut().enumerate() {
            *slot = as_multiple(space.dist(x, y), &step, || format!("distance {}", space.dist(x, y)))?;
        }
    }
    let count = (max_level as u128 + 1).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > MAX_ELEMENTS as u128 {
        return Err(FunctionLatticeError::TooLarge { count });
    }
    let mut levels: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        levels = levels.into_iter().flat_map(|f| (0..=max_level).map(move |v| [f.as_slice(), &[v]].concat())).collect();
    }
    levels.retain(|f| (0..n).all(|x| (0..n).all(|y| f[x].abs_diff(f[y]) <= steps[x][y])));
    levels.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then_with(|| a.cmp(b)));
    let labels = levels.iter().map(|f| tuple_label(f.iter().map(|&v| int(v as i64) * &step))).collect();
    let lattice = FiniteLattice::from_order_fn(labels, |a, b| levels[a].iter().zip(&levels[b]).all(|(x, y)| x <= y))?;
    let lat = GridLipschitzLattice { space, step, max_level, weights, steps, levels, lattice };
    lat.assert_pointwise();
    Ok(lat)
}

impl GridLipschitzLattice {
    /// Lattice operations coincide with pointwise max and min.
    fn assert_pointwise(&self) {
        for f in self.lattice.elements() {
            for g in self.lattice.elements() {
                let (j, m) = (self.lattice.join(f, g), self.lattice.meet(f, g));
                for x in 0..self.space.len() {
                    let (a, b) = (self.levels[f][x], self.levels[g][x]);
                    assert_eq!(self.levels[j][x], a.max(b), "join is not pointwise");
                    assert_eq!(self.levels[m][x], a.min(b), "meet is not pointwise");
                }
            }
        }
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn step(&self) -> &Rational {
        &self.step
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn level(&self, f: Element, x: usize) -> u32 {
        self.levels[f][x]
    }

    pub fn levels(&self, f: Element) -> &[u32] {
        &self.levels[f]
    }

    pub fn value(&self, f: Element, x: usize) -> Rational {
        int(self.levels[f][x] as i64) * &self.step
    }

    /// Function values, one row per element.
    pub fn function_values(&self) -> Vec<Vec<Rational>> {
        self.lattice.elements().map(|f| (0..self.space.len()).map(|x| self.value(f, x)).collect()).collect()
    }

    pub fn element_of_levels(&self, levels: &[u32]) -> Option<Element> {
        self.levels.iter().position(|f| f == levels)
    }

    fn diff(&self, f: Element, g: Element, x: usize) -> Rational {
        int(self.levels[f][x].abs_diff(self.levels[g][x]) as i64) * &self.step
    }
}

/// `Λ(x, r)(y) = 0 ∨ (r − d(x, y))` with `r = level · δ`.
pub fn lambda_cone(lat: &GridLipschitzLattice, x: usize, level: u32) -> Result<Element, FunctionLatticeError> {
    if level > lat.max_level {
        return Err(FunctionLatticeError::LevelOutOfRange { level, max: lat.max_level });
    }
    let cone: Vec<u32> = (0..lat.space.len()).map(|y| level.saturating_sub(lat.steps[x][y])).collect();
    Ok(lat.element_of_levels(&cone).expect("cones are 1-Lipschitz and grid-valued"))
}

/// Every `Λ(x, r)` over all points and grid levels, the zero function included.
pub fn lambda_cones(lat: &GridLipschitzLattice) -> ElementSet {
    (0..lat.space.len())
        .flat_map(|x| (0..=lat.max_level).map(move |r| (x, r)))
        .map(|(x, r)| lambda_cone(lat, x, r).expect("level in range"))
        .collect()
}

/// `d∞(f, g) = max_x |f(x) − g(x)|`.
pub fn sup_metric(lat: &GridLipschitzLattice) -> MetricTable {
    let n = lat.space.len();
    let t = PairTable::from_fn(lat.lattice.size(), |f, g| {
        (0..n).map(|x| lat.diff(f, g, x)).max().unwrap_or_else(Rational::zero)
    });
    MetricTable::new(t, MetricKind::Raw)
}

/// `d₁(f, g) = Σ μ(x) |f(x) − g(x)|`.
pub fn l1_metric(lat: &GridLipschitzLattice) -> MetricTable {
    lp_metric(lat, 1).expect("exponent 1 is valid")
}

/// `d_p(f, g)^p = Σ μ(x) |f(x) − g(x)|^p`, stored as the `p`-th power.
pub fn lp_metric(lat: &GridLipschitzLattice, p: u32) -> Result<MetricTable, FunctionLatticeError> {
    if p == 0 {
        return Err(FunctionLatticeError::ZeroExponent);
    }
    let n = lat.space.len();
    let t = PairTable::from_fn(lat.lattice.size(), |f, g| {
        (0..n).map(|x| &lat.weights[x] * pow(&lat.diff(f, g, x), p)).fold(Rational::zero(), |a, b| a + b)
    });
    Ok(MetricTable::with_exponent(t, p, MetricKind::Raw))
}

/// `w(f, g)^p = Σ μ(x) (f − f∧g)(x)^p` with the `ℓp` operation (addition for `p = 1`).
pub fn lp_intervaluation(lat: &GridLipschitzLattice, p: u32) -> Result<Intervaluation, FunctionLatticeError> {
    if p == 0 {
        return Err(FunctionLatticeError::ZeroExponent);
    }
    let n = lat.space.len();
    let w = PairTable::from_fn(lat.lattice.size(), |f, g| {
        (0..n)
            .map(|x| {
                let excess = lat.levels[f][x].saturating_sub(lat.levels[g][x]);
                &lat.weights[x] * pow(&(int(excess as i64) * &lat.step), p)
            })
            .fold(Rational::zero(), |a, b| a + b)
    });
    let op = if p == 1 { CombineOp::Add } else { CombineOp::Lp(p) };
    Ok(Intervaluation::from_powered(w, op))
}

/// `v(f) = Σ μ(x) f(x)`.
pub fn weighted_sum_valuation(lat: &GridLipschitzLattice) -> Valuation {
    Valuation::new(
        lat.lattice
            .elements()
            .map(|f| {
                (0..lat.space.len()).map(|x| &lat.weights[x] * lat.value(f, x)).fold(Rational::zero(), |a, b| a + b)
            })
            .collect(),
    )
}

/// Index of the hypograph atom `(x, level)`.
pub fn hypograph_atom(lat: &GridLipschitzLattice, x: usize, level: u32) -> usize {
    x * (lat.max_level as usize + 1) + level as usize
}

/// `{(x, r) : r <= f(x)}` over the atoms `X × grid`.
pub fn hypograph(lat: &GridLipschitzLattice, f: Element) -> FixedBitSet {
    let mut bits = FixedBitSet::with_capacity(lat.space.len() * (lat.max_level as usize + 1));
    for x in 0..lat.space.len() {
        for r in 0..=lat.levels[f][x] {
            bits.insert(hypograph_atom(lat, x, r));
        }
    }
    bits
}

/// The lattice as a family of hypographs, with matching element numbers.
/// Atoms are named `(point,value)`.
pub fn hypograph_set_lattice(lat: &GridLipschitzLattice) -> Result<SetLattice, FunctionLatticeError> {
    let ground = (0..lat.space.len())
        .flat_map(|x| (0..=lat.max_level).map(move |r| (x, r)))
        .map(|(x, r)| Atom::Name(format!("({},{})", lat.space.label(x), int(r as i64) * &lat.step)))
        .collect();
    let members = lat.lattice.elements().map(|f| hypograph(lat, f)).collect();
    Ok(SetLattice::from_family(ground, members)?)
}

fn hypograph_ultravaluation(
    lat: &GridLipschitzLattice,
    kappa: impl Fn(usize, u32) -> Rational,
) -> Result<Ultravaluation, FunctionLatticeError> {
    let s = hypograph_set_lattice(lat)?;
    let k = (0..lat.space.len()).flat_map(|x| (0..=lat.max_level).map(move |r| (x, r))).map(|(x, r)| kappa(x, r));
    Ok(from_kappa(&s, &KappaWeights::new(k.collect())?)?)
}

/// Hypograph ultravaluation with `κ(x, r) = r`.
pub fn peak_ultravaluation(lat: &GridLipschitzLattice) -> Result<Ultravaluation, FunctionLatticeError> {
    hypograph_ultravaluation(lat, |_, r| int(r as i64) * &lat.step)
}

/// `d(f, g) = 0 ∨ max { f(x) ∨ g(x) : f(x) ≠ g(x) }`.
pub fn peak_metric(lat: &GridLipschitzLattice) -> Result<MetricTable, FunctionLatticeError> {
    Ok(metric_from_ultravaluation(&lat.lattice, &peak_ultravaluation(lat)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasepointMode {
    /// `κ(x, r) = d(x, x₀)`.
    Outer,
    /// `κ(x, r) = 1 / (1 + d(x, x₀))`, a rational stand-in for `exp(−d(x, x₀))`.
    Inner,
}

pub fn basepoint_ultravaluation(
    lat: &GridLipschitzLattice,
    mode: BasepointMode,
) -> Result<Ultravaluation, FunctionLatticeError> {
    let x0 = lat.space.basepoint.ok_or(FunctionLatticeError::NoBasepoint)?;
    hypograph_ultravaluation(lat, |x, _| {
        let d = lat.space.dist(x, x0);
        match mode {
            BasepointMode::Outer => d.clone(),
            BasepointMode::Inner => (d + int(1)).recip(),
        }
    })
}

pub fn basepoint_metric(lat: &GridLipschitzLattice, mode: BasepointMode) -> Result<MetricTable, FunctionLatticeError> {
    Ok(metric_from_ultravaluation(&lat.lattice, &basepoint_ultravaluation(lat, mode)?)?)
}

/// `d(f, g) = max_{x≠y} |(f−g)(x) − (f−g)(y)| / d(x, y)`, zero on one point.
pub fn lipschitz_constant_metric(lat: &GridLipschitzLattice) -> MetricTable {
    let n = lat.space.len();
    let t = PairTable::from_fn(lat.lattice.size(), |f, g| {
        let h = |x: usize| lat.value(f, x) - lat.value(g, x);
        (0..n)
            .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
            .map(|(x, y)| (h(x) - h(y)).abs() / lat.space.dist(x, y))
            .max()
            .unwrap_or_else(Rational::zero)
    });
    MetricTable::new(t, MetricKind::Raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::metric::{check_metric_axioms, check_strong_triangle};
    use crate::ultravaluation::check_ultravaluation;
    use crate::valuation::metric_from_valuation;

    fn two_points(dist: i64, max: i64) -> GridLipschitzLattice {
        let space = FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![int(0), int(dist)], vec![int(dist), int(0)]],
            Some(0),
        )
        .unwrap();
        build_lipschitz_lattice(space, int(1), int(max), vec![int(1), int(1)]).unwrap()
    }

    fn at(lat: &GridLipschitzLattice, levels: &[u32]) -> Element {
        lat.element_of_levels(levels).unwrap()
    }

    #[test]
    fn small_grids() {
        let lat = two_points(1, 1);
        assert_eq!(lat.lattice().labels(), &["(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
        assert_eq!(lat.lattice().bottom(), at(&lat, &[0, 0]));
        assert_eq!(two_points(2, 1).lattice().size(), 4);
        // |f(a) − f(b)| <= 1 removes (0,2) and (2,0)
        assert_eq!(two_points(1, 2).lattice().size(), 7);
        let one = FiniteMetricSpace::path(1).unwrap();
        let chain = build_lipschitz_lattice(one, int(1), int(3), vec![int(1)]).unwrap();
        assert!(chain.lattice().is_chain(&chain.lattice().elements().collect::<Vec<_>>()));
        assert_eq!(chain.lattice().size(), 4);
    }

    #[test]
    fn rejects_bad_grids() {
        let space = FiniteMetricSpace::path(2).unwrap();
        assert!(matches!(
            build_lipschitz_lattice(space.clone(), int(2), int(4), vec![int(1), int(1)]),
            Err(FunctionLatticeError::GridMismatch(_))
        ));
        assert!(matches!(
            build_lipschitz_lattice(space.clone(), int(1), ratio(3, 2), vec![int(1), int(1)]),
            Err(FunctionLatticeError::GridMismatch(_))
        ));
        assert!(matches!(
            build_lipschitz_lattice(FiniteMetricSpace::path(6).unwrap(), int(1), int(4), vec![int(1); 6]),
            Err(FunctionLatticeError::TooLarge { .. })
        ));
        assert!(build_lipschitz_lattice(space, int(1), int(1), vec![int(1), int(0)]).is_err());
        let bad = vec![vec![int(0), int(1), int(5)], vec![int(1), int(0), int(1)], vec![int(5), int(1), int(0)]];
        assert!(matches!(
            FiniteMetricSpace::new(vec!["a".into(), "b".into(), "c".into()], bad, None),
            Err(FunctionLatticeError::NotAMetric { .. })
        ));
    }

    #[test]
    fn cones() {
        let lat = two_points(1, 1);
        assert_eq!(lambda_cone(&lat, 0, 0).unwrap(), lat.lattice().bottom());
        assert_eq!(lambda_cone(&lat, 0, 1).unwrap(), at(&lat, &[1, 0]));
        let path =
            build_lipschitz_lattice(FiniteMetricSpace::path(3).unwrap(), int(1), int(2), vec![int(1); 3]).unwrap();
        assert_eq!(lat_levels(&path, lambda_cone(&path, 1, 2).unwrap()), vec![1, 2, 1]);
        assert!(lambda_cone(&path, 1, 3).is_err());
        // every function is the join of its cones
        for f in path.lattice().elements() {
            let cones = (0..3).map(|x| lambda_cone(&path, x, path.level(f, x)).unwrap());
            assert_eq!(path.lattice().join_all(cones), Some(f));
        }
    }

    fn lat_levels(lat: &GridLipschitzLattice, f: Element) -> Vec<u32> {
        lat.levels(f).to_vec()
    }

    #[test]
    fn sup_l1_lp() {
        let lat = two_points(1, 1);
        let (p, q) = (at(&lat, &[1, 0]), at(&lat, &[0, 1]));
        assert_eq!(*sup_metric(&lat).get(p, q), int(1));
        let d1 = l1_metric(&lat);
        assert_eq!(*d1.get(p, q), int(2));
        let v = metric_from_valuation(lat.lattice(), &weighted_sum_valuation(&lat)).unwrap();
        assert_eq!(v.table(), d1.table());
        let d2 = lp_metric(&lat, 2).unwrap();
        assert_eq!(*d2.get(p, q), int(2));
        assert!(check_metric_axioms(&d2).is_empty());
        assert!(lp_metric(&lat, 0).is_err());
    }

    #[test]
    fn hypographs() {
        let lat = two_points(1, 1);
        let f = at(&lat, &[1, 0]);
        let h: Vec<usize> = hypograph(&lat, f).ones().collect();
        assert_eq!(h, vec![hypograph_atom(&lat, 0, 0), hypograph_atom(&lat, 0, 1), hypograph_atom(&lat, 1, 0)]);
        let s = hypograph_set_lattice(&lat).unwrap();
        for f in lat.lattice().elements() {
            for g in lat.lattice().elements() {
                assert_eq!(s.lattice().leq(f, g), lat.lattice().leq(f, g));
            }
        }
        assert_eq!(s.member_atoms(f).iter().map(|a| a.to_string()).collect::<Vec<_>>(), ["(a,0)", "(a,1)", "(b,0)"]);
    }

    #[test]
    fn peak_and_basepoint() {
        let lat = two_points(1, 1);
        let peak = peak_metric(&lat).unwrap();
        assert_eq!(*peak.get(at(&lat, &[1, 0]), at(&lat, &[1, 1])), int(1));
        assert_eq!(*peak.get(at(&lat, &[1, 0]), at(&lat, &[0, 1])), int(1));
        assert!(check_strong_triangle(&peak).is_empty());
        let outer = basepoint_metric(&lat, BasepointMode::Outer).unwrap();
        assert_eq!(*outer.get(at(&lat, &[0, 0]), at(&lat, &[0, 1])), int(1));
        assert_eq!(*outer.get(at(&lat, &[0, 0]), at(&lat, &[1, 0])), int(0));
        assert!(!outer.is_metric());
        let inner = basepoint_ultravaluation(&lat, BasepointMode::Inner).unwrap();
        assert!(check_ultravaluation(lat.lattice(), inner.table()).is_empty());
        assert!(basepoint_metric(&lat, BasepointMode::Inner).unwrap().is_metric());
        let nobase =
            build_lipschitz_lattice(FiniteMetricSpace::path(2).unwrap(), int(1), int(1), vec![int(1); 2]).unwrap();
        assert_eq!(basepoint_metric(&nobase, BasepointMode::Outer).unwrap_err(), FunctionLatticeError::NoBasepoint);
    }

    #[test]
    fn lipschitz_constant() {
        let lat = two_points(3, 3);
        let d = lipschitz_constant_metric(&lat);
        assert_eq!(*d.get(at(&lat, &[2, 2]), at(&lat, &[1, 1])), int(0));
        assert_eq!(*d.get(at(&lat, &[0, 3]), at(&lat, &[3, 0])), int(2));
        assert_eq!(*d.get(at(&lat, &[0, 2]), at(&lat, &[1, 1])), ratio(2, 3));
    }
}
