//! Bundled example data: proportions of contaminated peanuts, 20 Phase I
//! observations followed by 14 Phase II observations.

const PHASE1: &str = include_str!("../data/peanut_phase1.txt");
const PHASE2: &str = include_str!("../data/peanut_phase2.txt");

fn parse(text: &str) -> Vec<f64> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.parse().expect("bundled data is numeric"))
        .collect()
}

pub fn peanut_phase1() -> Vec<f64> {
    parse(PHASE1)
}

pub fn peanut_phase2() -> Vec<f64> {
    parse(PHASE2)
}
