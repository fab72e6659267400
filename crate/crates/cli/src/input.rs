//! JSON lattice and metric descriptions and their conversion into core types.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use metriclat_core::exact::{parse_rational, pow};
use metriclat_core::function_lattices::{
    basepoint_metric, build_lipschitz_lattice, lipschitz_constant_metric, lp_metric, peak_metric, sup_metric,
    BasepointMode, FiniteMetricSpace, GridLipschitzLattice,
};
use metriclat_core::generators::{
    divisor_lattice, product_chain_lattice, sublattice, subset_lattice, subspace_lattice, Atom, SetLattice,
};
use metriclat_core::intervaluation::{CombineOp, Intervaluation};
use metriclat_core::ultravaluation::{from_kappa, metric_from_ultravaluation, KappaWeights, Ultravaluation};
use metriclat_core::valuation::Valuation;
use metriclat_core::{ElementSet, FiniteLattice, MetricKind, MetricTable, PairTable, Rational};
use num_traits::{Signed, Zero};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;

/// A rational given as an integer or a `"p/q"` string. Floats are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    fn value(&self) -> Result<Rational, CliError> {
        match self {
            Number::Int(n) => Ok(Rational::from_integer((*n).into())),
            Number::Text(s) => parse_rational(s).ok_or_else(|| CliError::Value(format!("{s:?} is not a rational"))),
        }
    }
}

fn values(xs: &[Number]) -> Result<Vec<Rational>, CliError> {
    xs.iter().map(Number::value).collect()
}

fn matrix(rows: &[Vec<Number>]) -> Result<Vec<Vec<Rational>>, CliError> {
    rows.iter().map(|r| values(r)).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AtomSpec {
    Int(i64),
    Name(String),
}

impl From<&AtomSpec> for Atom {
    fn from(a: &AtomSpec) -> Self {
        match a {
            AtomSpec::Int(n) => Atom::Int(*n),
            AtomSpec::Name(s) => Atom::Name(s.clone()),
        }
    }
}

/// An element named by label or by index.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LatticeSpec {
    Explicit {
        n: usize,
        leq: Vec<(usize, usize)>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
    Subsets {
        ground: Vec<AtomSpec>,
        generators: Vec<Vec<AtomSpec>>,
        #[serde(default)]
        include_ground: bool,
    },
    Divisors {
        n: u64,
    },
    Grid {
        heights: Vec<u32>,
    },
    Sublattice {
        of: Box<LatticeSpec>,
        elements: Vec<ElementRef>,
    },
    Subspaces {
        q: u32,
        n: u32,
    },
    Lipschitz {
        points: Vec<String>,
        dist: Vec<Vec<Number>>,
        step: Number,
        max: Number,
        #[serde(default)]
        weights: Option<Vec<Number>>,
        #[serde(default)]
        basepoint: Option<String>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ValueList {
    Map(BTreeMap<String, Number>),
    List(Vec<Number>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricSpec {
    Valuation {
        values: ValueList,
    },
    Ultravaluation {
        kappa: ValueList,
    },
    Intervaluation {
        op: String,
        w: Vec<Vec<Number>>,
    },
    Builtin {
        name: String,
        #[serde(default)]
        p: Option<u32>,
    },
    Metric {
        d: Vec<Vec<Number>>,
    },
}

/// A lattice together with whatever extra structure its description carried.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub lattice: FiniteLattice,
    pub description: String,
    /// Present for subset families, including sublattices of them.
    pub sets: Option<SetLattice>,
    /// Per-element function values, for grids and Lipschitz lattices.
    pub values: Option<Vec<Vec<Rational>>>,
    pub weights: Option<Vec<Rational>>,
    /// Only for a Lipschitz lattice loaded directly.
    pub lipschitz: Option<GridLipschitzLattice>,
}

impl Loaded {
    fn plain(lattice: FiniteLattice, description: String) -> Self {
        Loaded { lattice, description, sets: None, values: None, weights: None, lipschitz: None }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::InvalidLattice(e.to_string())
}

pub fn load_lattice(spec: &LatticeSpec) -> Result<Loaded, CliError> {
    match spec {
        LatticeSpec::Explicit { n, leq, labels } => {
            let labels = match labels {
                Some(ls) if ls.len() != *n => {
                    return Err(CliError::Value(format!("{} labels for {n} elements", ls.len())));
                }
                Some(ls) => ls.clone(),
                None => (0..*n).map(|i| i.to_string()).collect(),
            };
            let l = FiniteLattice::from_pairs(labels, leq).map_err(invalid)?;
            Ok(Loaded::plain(l, format!("explicit lattice on {n} elements")))
        }
        LatticeSpec::Subsets { ground, generators, include_ground } => {
            let ground: Vec<Atom> = ground.iter().map(Atom::from).collect();
            let gens: Vec<Vec<Atom>> = generators.iter().map(|g| g.iter().map(Atom::from).collect()).collect();
            let s = subset_lattice(ground, &gens, *include_ground).map_err(invalid)?;
            let mut out = Loaded::plain(s.lattice().clone(), format!("set lattice over {} atoms", s.ground().len()));
            out.sets = Some(s);
            Ok(out)
        }
        LatticeSpec::Divisors { n } => {
            let dl = divisor_lattice(*n).map_err(invalid)?;
            Ok(Loaded::plain(dl.lattice().clone(), format!("divisors of {n}")))
        }
        LatticeSpec::Grid { heights } => {
            let g = product_chain_lattice(heights).map_err(invalid)?;
            let mut out = Loaded::plain(g.lattice().clone(), format!("product of chains {heights:?}"));
            out.values = Some(g.function_values());
            Ok(out)
        }
        LatticeSpec::Subspaces { q, n } => {
            let s = subspace_lattice(*q, *n).map_err(invalid)?;
            Ok(Loaded::plain(s.lattice().clone(), format!("subspaces of GF({q})^{n}")))
        }
        LatticeSpec::Sublattice { of, elements } => load_sublattice(&load_lattice(of)?, elements),
        LatticeSpec::Lipschitz { points, dist, step, max, weights, basepoint } => {
            let basepoint = match basepoint {
                Some(b) => Some(
                    points
                        .iter()
                        .position(|p| p == b)
                        .ok_or_else(|| CliError::Value(format!("basepoint {b:?} is not a point")))?,
                ),
                None => None,
            };
            let space = FiniteMetricSpace::new(points.clone(), matrix(dist)?, basepoint).map_err(invalid)?;
            let weights = match weights {
                Some(w) => values(w)?,
                None => vec![Rational::from_integer(1.into()); points.len()],
            };
            let lat = build_lipschitz_lattice(space, step.value()?, max.value()?, weights).map_err(invalid)?;
            let mut out = Loaded::plain(
                lat.lattice().clone(),
                format!("Lipschitz functions on {} points, {} levels", points.len(), lat.max_level()),
            );
            out.values = Some(lat.function_values());
            out.weights = Some(lat.weights().to_vec());
            out.lipschitz = Some(lat);
            Ok(out)
        }
    }
}

fn load_sublattice(parent: &Loaded, elements: &[ElementRef]) -> Result<Loaded, CliError> {
    let pl = &parent.lattice;
    let mut pick = ElementSet::new();
    for e in elements {
        let idx = match e {
            ElementRef::Index(i) if *i < pl.size() => *i,
            ElementRef::Index(i) => return Err(CliError::Value(format!("element index {i} out of range"))),
            ElementRef::Label(s) => {
                pl.index_of(s).ok_or_else(|| CliError::Value(format!("no element labelled {s:?}")))?
            }
        };
        pick.insert(idx);
    }
    let sub = sublattice(pl, &pick).map_err(invalid)?;
    let sets = match &parent.sets {
        Some(s) => {
            let members = sub.embedding.iter().map(|&e| s.member(e).clone()).collect();
            Some(SetLattice::from_family(s.ground().to_vec(), members).map_err(invalid)?)
        }
        None => None,
    };
    let values = parent.values.as_ref().map(|v| sub.embedding.iter().map(|&e| v[e].clone()).collect());
    Ok(Loaded {
        description: format!("sublattice of {} ({} elements)", parent.description, sub.lattice.size()),
        lattice: sets.as_ref().map_or(sub.lattice, |s| s.lattice().clone()),
        sets,
        values,
        weights: parent.weights.clone(),
        lipschitz: None,
    })
}

/// What a metric file resolved to.
#[derive(Debug, Clone)]
pub enum MetricSource {
    Valuation(Valuation),
    Ultravaluation(Ultravaluation),
    Intervaluation(Intervaluation),
    Builtin(String),
    Table,
}

fn mismatch(msg: impl Into<String>) -> CliError {
    CliError::Mismatch(msg.into())
}

fn per_element(l: &FiniteLattice, list: &ValueList, what: &str) -> Result<Vec<Rational>, CliError> {
    match list {
        ValueList::List(xs) if xs.len() == l.size() => values(xs),
        ValueList::List(xs) => Err(mismatch(format!("{} {what} values for {} elements", xs.len(), l.size()))),
        ValueList::Map(m) => {
            if let Some(k) = m.keys().find(|k| l.index_of(k).is_none()) {
                return Err(mismatch(format!("{what} names unknown element {k:?}")));
            }
            l.labels()
                .iter()
                .map(|label| m.get(label).ok_or_else(|| mismatch(format!("{what} misses element {label:?}")))?.value())
                .collect()
        }
    }
}

fn per_atom(s: &SetLattice, list: &ValueList) -> Result<Vec<Rational>, CliError> {
    let names: Vec<String> = s.ground().iter().map(|a| a.to_string()).collect();
    match list {
        ValueList::List(xs) if xs.len() == names.len() => values(xs),
        ValueList::List(xs) => Err(mismatch(format!("{} kappa values for {} atoms", xs.len(), names.len()))),
        ValueList::Map(m) => {
            if let Some(k) = m.keys().find(|k| !names.contains(k)) {
                return Err(mismatch(format!("kappa names unknown atom {k:?}")));
            }
            names
                .iter()
                .map(|a| m.get(a).ok_or_else(|| mismatch(format!("kappa misses atom {a:?}")))?.value())
                .collect()
        }
    }
}

fn square(l: &FiniteLattice, rows: &[Vec<Number>], what: &str) -> Result<PairTable, CliError> {
    let n = l.size();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(mismatch(format!("{what} must be {n}x{n}")));
    }
    Ok(PairTable::from_rows(matrix(rows)?).expect("shape checked"))
}

/// Builds the distance table. Law violations are left for `check` to report;
/// only constructions that cannot produce a table fail here.
pub fn load_metric(lat: &Loaded, spec: &MetricSpec) -> Result<(MetricTable, MetricSource), CliError> {
    let l = &lat.lattice;
    match spec {
        MetricSpec::Valuation { values } => {
            let v = Valuation::new(per_element(l, values, "valuation")?);
            let t = PairTable::from_fn(l.size(), |f, g| v.get(l.join(f, g)) - v.get(l.meet(f, g)));
            Ok((MetricTable::new(t, MetricKind::Valuation), MetricSource::Valuation(v)))
        }
        MetricSpec::Ultravaluation { kappa } => {
            let s = lat.sets.as_ref().ok_or_else(|| mismatch("kappa weights need a set lattice"))?;
            let k = KappaWeights::new(per_atom(s, kappa)?).map_err(|e| CliError::Value(e.to_string()))?;
            let w = from_kappa(s, &k).map_err(|e| CliError::Value(e.to_string()))?;
            let d = metric_from_ultravaluation(l, &w).map_err(|e| CliError::Value(e.to_string()))?;
            Ok((d, MetricSource::Ultravaluation(w)))
        }
        MetricSpec::Intervaluation { op, w } => {
            let op = CombineOp::parse(op).ok_or_else(|| CliError::Value(format!("unknown operation {op:?}")))?;
            let w = square(l, w, "w")?;
            if w.rows().flatten().any(|x| x.is_negative()) {
                return Err(CliError::Value("w has negative entries".into()));
            }
            let iv = Intervaluation::new(&w, op);
            let t = PairTable::from_fn(l.size(), |f, g| op.combine(iv.get(f, g), iv.get(g, f)));
            Ok((
                MetricTable::with_exponent(t, op.power(), MetricKind::Intervaluation),
                MetricSource::Intervaluation(iv),
            ))
        }
        MetricSpec::Metric { d } => Ok((MetricTable::new(square(l, d, "d")?, MetricKind::Raw), MetricSource::Table)),
        MetricSpec::Builtin { name, p } => {
            let table = builtin(lat, name, *p)?;
            let label = match (name.as_str(), p) {
                ("lp", Some(p)) => format!("lp (p = {p})"),
                _ => name.clone(),
            };
            Ok((table, MetricSource::Builtin(label)))
        }
    }
}

fn builtin(lat: &Loaded, name: &str, p: Option<u32>) -> Result<MetricTable, CliError> {
    let l = &lat.lattice;
    if p.is_some() && name != "lp" {
        return Err(CliError::Value(format!("builtin {name:?} takes no exponent")));
    }
    let needs_lipschitz =
        || lat.lipschitz.as_ref().ok_or_else(|| mismatch(format!("{name} needs a Lipschitz lattice")));
    let needs_values = || lat.values.as_ref().ok_or_else(|| mismatch(format!("{name} needs a function lattice")));
    let lp = |p: u32| -> Result<MetricTable, CliError> {
        if p == 0 {
            return Err(CliError::Value("exponent must be at least 1".into()));
        }
        if let Some(lip) = &lat.lipschitz {
            return lp_metric(lip, p).map_err(|e| CliError::Value(e.to_string()));
        }
        let vals = needs_values()?;
        let one = Rational::from_integer(1.into());
        let t = PairTable::from_fn(l.size(), |f, g| {
            vals[f]
                .iter()
                .zip(&vals[g])
                .enumerate()
                .map(|(x, (a, b))| lat.weights.as_ref().map_or(&one, |w| &w[x]) * pow(&(a - b).abs(), p))
                .fold(Rational::zero(), |acc, t| acc + t)
        });
        Ok(MetricTable::with_exponent(t, p, MetricKind::Raw))
    };
    match name {
        "discrete" => Ok(MetricTable::discrete(l.size())),
        "sup" => match &lat.lipschitz {
            Some(lip) => Ok(sup_metric(lip)),
            None => {
                let vals = needs_values()?;
                let t = PairTable::from_fn(l.size(), |f, g| {
                    vals[f].iter().zip(&vals[g]).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Rational::zero)
                });
                Ok(MetricTable::new(t, MetricKind::Raw))
            }
        },
        "l1" => lp(1),
        "lp" => lp(p.ok_or_else(|| CliError::Value("builtin lp needs \"p\"".into()))?),
        "peak" => match &lat.lipschitz {
            Some(lip) => peak_metric(lip).map_err(|e| CliError::Value(e.to_string())),
            None => {
                let vals = needs_values()?;
                let t = PairTable::from_fn(l.size(), |f, g| {
                    vals[f]
                        .iter()
                        .zip(&vals[g])
                        .filter(|(a, b)| a != b)
                        .map(|(a, b)| a.max(b).clone())
                        .max()
                        .unwrap_or_else(Rational::zero)
                });
                Ok(MetricTable::new(t, MetricKind::Ultravaluation))
            }
        },
        "basepoint-outer" | "basepoint-inner" => {
            let mode = if name == "basepoint-outer" { BasepointMode::Outer } else { BasepointMode::Inner };
            basepoint_metric(needs_lipschitz()?, mode).map_err(|e| mismatch(e.to_string()))
        }
        "lipschitz-constant" => Ok(lipschitz_constant_metric(needs_lipschitz()?)),
        other => Err(CliError::Value(format!("unknown builtin metric {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(json: &str) -> Result<Loaded, CliError> {
        load_lattice(&serde_json::from_str::<LatticeSpec>(json).unwrap())
    }

    #[test]
    fn numbers_reject_floats() {
        assert!(serde_json::from_str::<Number>("1.5").is_err());
        assert_eq!(
            serde_json::from_str::<Number>("\"3/6\"").unwrap().value().unwrap(),
            Rational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<LatticeSpec>(r#"{"kind":"divisors","n":12,"extra":1}"#).is_err());
        assert!(serde_json::from_str::<MetricSpec>(r#"{"kind":"builtin","name":"sup","q":1}"#).is_err());
    }

    #[test]
    fn sublattices_keep_sets_and_values() {
        let s = lattice(
            r#"{"kind":"sublattice","of":{"kind":"subsets","ground":[1,2],"generators":[[1],[2]],"include_ground":true},
                "elements":["{}","{1}","{1,2}"]}"#,
        )
        .unwrap();
        assert_eq!(s.lattice.labels(), ["{}", "{1}", "{1,2}"]);
        assert!(s.sets.is_some());
        let g = lattice(r#"{"kind":"sublattice","of":{"kind":"grid","heights":[2,2]},"elements":[0,8]}"#).unwrap();
        assert_eq!(g.values.unwrap().len(), 2);
    }

    #[test]
    fn builtin_needs_matching_lattice() {
        let l = lattice(r#"{"kind":"divisors","n":12}"#).unwrap();
        let spec = MetricSpec::Builtin { name: "sup".into(), p: None };
        assert!(matches!(load_metric(&l, &spec), Err(CliError::Mismatch(_))));
    }
}
