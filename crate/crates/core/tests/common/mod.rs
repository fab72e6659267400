#![allow(dead_code)]

pub mod oracle;

use metriclat_core::exact::{int, ratio};
use metriclat_core::function_lattices::{build_lipschitz_lattice, FiniteMetricSpace, GridLipschitzLattice};
use metriclat_core::generators::{subset_lattice, Atom, SetLattice};
use metriclat_core::Rational;

pub fn example_sets() -> SetLattice {
    subset_lattice(vec![Atom::Int(1), Atom::Int(2), Atom::Int(3)], &[vec![2.into()], vec![3.into()]], true).unwrap()
}

fn space(dist: &[&[Rational]]) -> FiniteMetricSpace {
    let n = dist.len();
    let labels = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    FiniteMetricSpace::new(labels, dist.iter().map(|r| r.to_vec()).collect(), None).unwrap()
}

fn two(d: Rational) -> FiniteMetricSpace {
    let z = int(0);
    space(&[&[z.clone(), d.clone()], &[d, z]])
}

fn three(ab: Rational, bc: Rational, ac: Rational) -> FiniteMetricSpace {
    let z = int(0);
    space(&[&[z.clone(), ab.clone(), ac.clone()], &[ab, z.clone(), bc.clone()], &[ac, bc, z]])
}

/// Spaces with at most three points, step-multiple distances and up to four
/// grid levels above zero, each with every choice of basepoint.
pub fn desk_lipschitz_lattices() -> Vec<GridLipschitzLattice> {
    let mut spaces: Vec<(FiniteMetricSpace, Rational)> = vec![
        (space(&[&[int(0)]]), int(1)),
        (two(int(1)), int(1)),
        (two(int(2)), int(1)),
        (two(int(3)), int(1)),
        (two(int(5)), int(1)),
        (two(ratio(1, 2)), ratio(1, 2)),
        (two(int(1)), ratio(1, 2)),
        (three(int(1), int(1), int(1)), int(1)),
        (three(int(1), int(1), int(2)), int(1)),
        (three(int(1), int(2), int(2)), int(1)),
        (three(int(1), int(2), int(3)), int(1)),
        (three(int(2), int(2), int(2)), int(1)),
        (three(int(2), int(3), int(4)), int(1)),
        (three(ratio(1, 2), int(1), int(1)), ratio(1, 2)),
    ];
    let mut out = Vec::new();
    for (s, step) in spaces.drain(..) {
        let weights: Vec<Rational> = (0..s.len()).map(|i| [int(1), int(2), ratio(1, 2)][i % 3].clone()).collect();
        for levels in 1..=4u32 {
            for x0 in 0..s.len() {
                let max = int(levels as i64) * &step;
                let sp = s.clone().with_basepoint(x0).unwrap();
                out.push(build_lipschitz_lattice(sp, step.clone(), max, weights.clone()).unwrap());
            }
        }
    }
    out
}

pub fn labels(l: &metriclat_core::FiniteLattice, set: &metriclat_core::ElementSet) -> Vec<String> {
    set.iter().map(|&e| l.label(e).to_string()).collect()
}
