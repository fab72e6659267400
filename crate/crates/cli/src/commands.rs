//! One function per subcommand. Each returns the rendered text, the same
//! content as JSON, and the exit code.

use std::fmt::Write as _;

use metriclat_core::analysis::{
    find_join_irred_not_d_irred, irreducibility_report, minimal_r_base, puzzle_report, r_base_check,
    theorem_crosscheck, AnalysisError,
};
use metriclat_core::corpus::Corpus;
use metriclat_core::exact::{parse_rational, render};
use metriclat_core::intervaluation::{
    check_intervaluation, check_prop_intervaluation, classify_metric, IntervaluationViolation,
};
use metriclat_core::metric::{check_metric_axioms, check_strong_triangle, MetricViolation};
use metriclat_core::ultravaluation::{check_ultravaluation, UltraViolation};
use metriclat_core::valuation::{check_cut_law, check_modular_law, classify_valuation, difference_valuation};
use metriclat_core::{Element, ElementSet, FiniteLattice, MetricTable, Rational};
use num_traits::Signed;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::input::{Loaded, MetricSource};

pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn names(l: &FiniteLattice, set: impl IntoIterator<Item = Element>) -> Vec<String> {
    set.into_iter().map(|e| l.label(e).to_string()).collect()
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        "(none)".into()
    } else {
        items.join(" ")
    }
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(headers.to_vec(), &mut out);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

pub fn validate(lat: &Loaded) -> Outcome {
    let l = &lat.lattice;
    let distributive = l.is_distributive();
    let ji = names(l, l.join_irreducibles_nonzero());
    let text = format!(
        "lattice: ok, distributive: {}, {} elements\n{}\njoin-irreducible (nonzero): {}\n",
        yes(distributive),
        l.size(),
        lat.description,
        list(&ji)
    );
    let json = json!({
        "lattice": "ok",
        "description": lat.description,
        "distributive": distributive,
        "elements": l.labels(),
        "join_irreducible": ji,
    });
    Outcome { text, json, code: 0 }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Info,
}

struct Check {
    name: String,
    status: Status,
    detail: String,
}

impl Check {
    fn law<T>(name: impl Into<String>, violations: &[T], show: impl Fn(&T) -> String) -> Self {
        let (status, detail) = match violations.first() {
            None => (Status::Pass, "ok".to_string()),
            Some(v) if violations.len() == 1 => (Status::Fail, show(v)),
            Some(v) => (Status::Fail, format!("{} violations, first: {}", violations.len(), show(v))),
        };
        Check { name: name.into(), status, detail }
    }

    fn info(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Info, detail: detail.into() }
    }
}

fn show_metric(l: &FiniteLattice, v: &MetricViolation) -> String {
    let n = |e: &Element| l.label(*e);
    match v {
        MetricViolation::NonzeroDiagonal(a) => format!("d({0}, {0}) is not zero", n(a)),
        MetricViolation::Negative(a, b) => format!("d({}, {}) is negative", n(a), n(b)),
        MetricViolation::Asymmetric(a, b) => format!("d({0}, {1}) differs from d({1}, {0})", n(a), n(b)),
        MetricViolation::Triangle { a, b, via } => {
            format!("triangle inequality fails for {} and {} via {}", n(a), n(b), n(via))
        }
        MetricViolation::StrongTriangle { a, b, via } => {
            format!("strong triangle inequality fails for {} and {} via {}", n(a), n(b), n(via))
        }
    }
}

fn show_iv(l: &FiniteLattice, v: &IntervaluationViolation) -> String {
    let n = |e: &Element| l.label(*e);
    match v {
        IntervaluationViolation::Negative { f, g } => format!("w({}, {}) is negative", n(f), n(g)),
        IntervaluationViolation::NonzeroBelow { f, g } => format!("{} <= {} but w is not zero", n(f), n(g)),
        IntervaluationViolation::LeftCut { f, g, h } => {
            format!("left cut law fails at f={} g={} h={}", n(f), n(g), n(h))
        }
        IntervaluationViolation::RightCut { f, g, h } => {
            format!("right cut law fails at f={} g={} h={}", n(f), n(g), n(h))
        }
    }
}

fn show_ultra(l: &FiniteLattice, v: &UltraViolation) -> String {
    let n = |e: &Element| l.label(*e);
    match v {
        UltraViolation::Negative { f, g } => format!("w({}, {}) is negative", n(f), n(g)),
        UltraViolation::NonzeroBelow { f, g } => format!("{} <= {} but w is not zero", n(f), n(g)),
        UltraViolation::MaxCut { f, g, h } => format!("max cut law fails at f={} g={} h={}", n(f), n(g), n(h)),
    }
}

fn show_pair(l: &FiniteLattice, &(f, g): &(Element, Element)) -> String {
    format!("({}, {})", l.label(f), l.label(g))
}

fn source_name(source: &MetricSource) -> String {
    match source {
        MetricSource::Valuation(_) => "valuation".into(),
        MetricSource::Ultravaluation(_) => "ultravaluation".into(),
        MetricSource::Intervaluation(iv) => format!("intervaluation ({})", iv.op()),
        MetricSource::Builtin(name) => format!("builtin {name}"),
        MetricSource::Table => "distance table".into(),
    }
}

fn metric_line(d: &MetricTable, source: &MetricSource) -> String {
    if d.exponent() == 1 {
        format!("metric: {}", source_name(source))
    } else {
        format!("metric: {} (distances shown as d^{})", source_name(source), d.exponent())
    }
}

pub fn check(lat: &Loaded, d: &MetricTable, source: &MetricSource) -> Outcome {
    let l = &lat.lattice;
    let mut checks = vec![Check::law("metric axioms", &check_metric_axioms(d), |v| show_metric(l, v))];
    checks.push(Check::info("distinct elements at positive distance", yes(d.is_metric())));
    match source {
        MetricSource::Valuation(v) => {
            let modular = check_modular_law(l, v);
            checks.push(Check::law("modular law", &modular, |m| {
                format!(
                    "v({0}) + v({1}) = {2} but v({0}∧{1}) + v({0}∨{1}) = {3}",
                    l.label(m.f),
                    l.label(m.g),
                    render(&m.lhs),
                    render(&m.rhs)
                )
            }));
            let class = classify_valuation(l, v);
            let isotone: Vec<()> = if class.isotone { vec![] } else { vec![()] };
            checks.push(Check::law("isotone", &isotone, |_| "a larger element has a smaller value".into()));
            checks.push(Check::info("positive", yes(class.positive)));
            if let Ok(w) = difference_valuation(l, v) {
                checks.push(Check::law("cut law", &check_cut_law(l, w.table()), |c| {
                    format!("fails at f={} g={} h={}", l.label(c.f), l.label(c.g), l.label(c.h))
                }));
            }
        }
        MetricSource::Ultravaluation(w) => {
            checks.push(Check::law("ultravaluation laws", &check_ultravaluation(l, w.table()), |v| show_ultra(l, v)));
            checks.push(Check::law("strong triangle inequality", &check_strong_triangle(d), |v| show_metric(l, v)));
        }
        MetricSource::Intervaluation(iv) => {
            let name = format!("intervaluation laws ({})", iv.op());
            checks.push(Check::law(name, &check_intervaluation(l, iv), |v| show_iv(l, v)));
            checks.push(Check::law(
                "w(f,g) = w(f∨g,g) = w(f,f∧g) = d(f∨g,g)",
                &check_prop_intervaluation(l, iv),
                |p| format!("fails at {}", show_pair(l, p)),
            ));
        }
        MetricSource::Builtin(_) | MetricSource::Table => {
            let strong = check_strong_triangle(d);
            checks.push(Check::info("ultrametric", yes(strong.is_empty())));
            let fits = classify_metric(l, d);
            let mut qualifying = Vec::new();
            for fit in &fits {
                let detail = match &fit.violations {
                    None => "no exact representation".to_string(),
                    Some(v) if v.is_empty() && fit.recovery_failures.is_empty() => "fits".to_string(),
                    Some(v) if v.is_empty() => {
                        format!("d is not recovered at {}", show_pair(l, &fit.recovery_failures[0]))
                    }
                    Some(v) if v.len() == 1 => show_iv(l, &v[0]),
                    Some(v) => format!("{} violations, first: {}", v.len(), show_iv(l, &v[0])),
                };
                if fit.qualifies() {
                    qualifying.push(fit.op.to_string());
                }
                checks.push(Check::info(format!("intervaluation with {}", fit.op), detail));
            }
            checks.push(if qualifying.is_empty() {
                let first = fits
                    .iter()
                    .find_map(|f| f.violations.as_ref().and_then(|v| v.first()))
                    .map_or("no operation fits".to_string(), |v| show_iv(l, v));
                Check { name: "intervaluation representation".into(), status: Status::Fail, detail: first }
            } else {
                Check {
                    name: "intervaluation representation".into(),
                    status: Status::Pass,
                    detail: format!("ok ({})", qualifying.join(", ")),
                }
            });
        }
    }
    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    let mut text = format!("{}\n", metric_line(d, source));
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Info => "info",
            };
            vec![status.to_string(), c.name.clone(), c.detail.clone()]
        })
        .collect();
    text.push_str(&table(&["status", "check", "detail"], &rows));
    let _ =
        writeln!(text, "{}", if failed == 0 { "all laws hold".to_string() } else { format!("{failed} checks failed") });
    let json = json!({
        "metric": source_name(source),
        "exponent": d.exponent(),
        "checks": checks.iter().map(|c| json!({
            "check": c.name,
            "status": match c.status { Status::Pass => "pass", Status::Fail => "fail", Status::Info => "info" },
            "detail": c.detail,
        })).collect::<Vec<_>>(),
        "failed": failed,
    });
    Outcome { text, json, code: if failed == 0 { 0 } else { 4 } }
}

fn analysis_error(e: AnalysisError) -> CliError {
    match e {
        AnalysisError::SizeMismatch { .. } | AnalysisError::NonNaturalAtom(_) => CliError::Mismatch(e.to_string()),
        other => CliError::Value(other.to_string()),
    }
}

pub fn analyze(lat: &Loaded, d: &MetricTable, source: &MetricSource) -> Result<Outcome, CliError> {
    let l = &lat.lattice;
    let report = irreducibility_report(l, d).map_err(analysis_error)?;
    let witness = |p: Element| report.witnesses.get(&p).map(|w| show_pair(l, w));
    let rows: Vec<Vec<String>> = l
        .elements()
        .map(|p| {
            vec![
                l.label(p).to_string(),
                yes(report.join_irreducible[p]).into(),
                yes(report.d_irreducible[p]).into(),
                yes(report.downset_chain[p]).into(),
                witness(p).unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    let mli = names(l, report.mli.iter().copied());
    let gap = names(l, find_join_irred_not_d_irred(l, d));
    let mut text = format!("{}\n", metric_line(d, source));
    text.push_str(&table(&["element", "join-irreducible", "d-irreducible", "chain below", "witness"], &rows));
    let _ = writeln!(text, "completely d-irreducible: {}", list(&mli));
    let _ = writeln!(text, "join-irreducible but not d-irreducible: {}", list(&gap));
    let json = json!({
        "metric": source_name(source),
        "elements": l.elements().map(|p| json!({
            "element": l.label(p),
            "join_irreducible": report.join_irreducible[p],
            "d_irreducible": report.d_irreducible[p],
            "chain_below": report.downset_chain[p],
            "witness": report.witnesses.get(&p).map(|&(f, g)| [l.label(f), l.label(g)]),
        })).collect::<Vec<_>>(),
        "mli": mli,
        "join_irreducible_not_d_irreducible": gap,
    });
    Ok(Outcome { text, json, code: 0 })
}

pub fn parse_radius(s: &str) -> Result<Rational, CliError> {
    match parse_rational(s) {
        Some(r) if !r.is_negative() => Ok(r),
        _ => Err(CliError::Value(format!("radius {s:?} is not a nonnegative rational"))),
    }
}

pub fn bases(lat: &Loaded, d: &MetricTable, source: &MetricSource, radius: &Rational) -> Outcome {
    let l = &lat.lattice;
    let base = minimal_r_base(l, d, radius);
    let report = r_base_check(l, d, &base, radius);
    let in_base = |p: &Element| report.base.contains(p);
    let rows: Vec<Vec<String>> = report
        .mli_distances
        .iter()
        .map(|(p, dist)| vec![l.label(*p).to_string(), yes(in_base(p)).into(), render(dist)])
        .collect();
    let closure: ElementSet = report.closure.clone();
    let mut text = format!("{}\nradius: {}\n", metric_line(d, source), render(radius));
    let _ = writeln!(text, "minimal base: {}", list(&names(l, base.iter().copied())));
    let _ = writeln!(text, "joins of the base: {} of {} elements", closure.len(), l.size());
    let _ = writeln!(text, "covers the lattice: {}", yes(report.covered));
    text.push_str(&table(&["completely d-irreducible", "in base", "distance to base"], &rows));
    let _ = writeln!(text, "all within the radius: {}", yes(report.mli_within_radius));
    let json = json!({
        "metric": source_name(source),
        "radius": render(radius),
        "base": names(l, base.iter().copied()),
        "covered": report.covered,
        "uncovered": names(l, report.uncovered.iter().copied()),
        "mli": report.mli_distances.iter().map(|(p, dist)| json!({
            "element": l.label(*p),
            "in_base": in_base(p),
            "distance": render(dist),
        })).collect::<Vec<_>>(),
        "mli_within_radius": report.mli_within_radius,
    });
    Outcome { text, json, code: 0 }
}

pub fn puzzle(lat: &Loaded) -> Result<Outcome, CliError> {
    let s = lat.sets.as_ref().ok_or_else(|| CliError::Mismatch("the puzzle needs a set lattice".into()))?;
    let report = puzzle_report(s).map_err(analysis_error)?;
    let l = s.lattice();
    let rows: Vec<Vec<String>> = report
        .iter()
        .map(|r| {
            vec![
                l.label(r.element).to_string(),
                yes(r.criterion).into(),
                yes(r.refined).into(),
                yes(r.oracle).into(),
                if r.agrees() { "yes".into() } else { "NO".into() },
            ]
        })
        .collect();
    let agree = report.iter().filter(|r| r.agrees()).count();
    let mut text = String::from("kappa: identity on the ground set; columns answer \"d-irreducible?\"\n");
    text.push_str(&table(&["member", "criterion", "refined", "brute force", "agree"], &rows));
    let _ = writeln!(text, "agreement: {agree} of {}", report.len());
    let json = json!({
        "rows": report.iter().map(|r| json!({
            "member": l.label(r.element),
            "criterion": r.criterion,
            "refined": r.refined,
            "brute_force": r.oracle,
            "agree": r.agrees(),
        })).collect::<Vec<_>>(),
        "agreement": agree,
        "members": report.len(),
    });
    Ok(Outcome { text, json, code: 0 })
}

/// Random distributive lattices: d-irreducibility against the chain-below
/// test, and the puzzle criterion against brute force.
pub fn crosscheck(seed: u64, count: usize) -> Result<Outcome, CliError> {
    let mut corpus = Corpus::new(seed);
    let (mut elements, mut discrepancies) = (0, Vec::new());
    for i in 0..count {
        let s = corpus.set_lattice(5, 12);
        let v = corpus.positive_valuation(s.lattice());
        for found in theorem_crosscheck(s.lattice(), &v).map_err(analysis_error)? {
            discrepancies.push(format!("lattice {i}, element {}", s.lattice().label(found.element)));
        }
        elements += s.lattice().size();
    }
    let (mut rows, mut agree) = (0, 0);
    for _ in 0..count {
        let s = corpus.natural_set_lattice(5, 9, 16);
        let report = puzzle_report(&s).map_err(analysis_error)?;
        rows += report.len();
        agree += report.iter().filter(|r| r.agrees()).count();
    }
    let mut text = format!("seed: {seed}\n");
    let _ = writeln!(
        text,
        "chain-below test vs brute force: {} discrepancies over {count} lattices, {elements} elements",
        discrepancies.len()
    );
    for d in &discrepancies {
        let _ = writeln!(text, "  {d}");
    }
    let _ = writeln!(text, "puzzle criterion vs brute force: {agree} of {rows} members agree");
    let json = json!({
        "seed": seed,
        "lattices": count,
        "elements": elements,
        "discrepancies": discrepancies,
        "puzzle_members": rows,
        "puzzle_agreement": agree,
    });
    Ok(Outcome { text, json, code: if discrepancies.is_empty() { 0 } else { 4 } })
}
