//! Bounded search for a "sorting" polynomial map.
//!
//! The question: is there an integer polynomial map F and two integer
//! points A, B such that, modulo every prime, sufficiently high iterates of
//! F send points with first coordinate ≡ 0 to A and everything else to B?
//! This module enumerates a finite candidate space — all maps whose
//! components use at most `max_terms` monomials of degree at most
//! `max_degree` with coefficients in a small range — and checks each
//! candidate in two stages:
//!
//! 1. exact arithmetic over Z: F must fix both A and B;
//! 2. per prime: the functional graph of F mod p must have exactly the
//!    cycles {A}, {B}, every point must land on the side its first
//!    coordinate dictates, and the deepest tail must fit the iteration
//!    budget.
//!
//! Enumeration order is part of the contract (verdict streams are
//! reproducible byte for byte): components are ordered by term count, then
//! by the monomial combination (ascending graded-lex universe, ascending
//! index combinations), then by a coefficient odometer whose rightmost slot
//! moves fastest; candidates are tuples of component indices with the first
//! component most significant.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{build_graph_with, point_of_index, DEFAULT_GRAPH_POINT_BUDGET};
use crate::error::{Error, Result};
use crate::modfield::is_prime;
use crate::poly::{grlex_cmp, Point, PolyMap, Polynomial};

/// Bounds of one search run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub num_vars: usize,
    pub max_degree: u32,
    pub coeff_min: i64,
    pub coeff_max: i64,
    /// Monomials per component, zero polynomial included as zero terms.
    pub max_terms: usize,
    pub primes: Vec<u64>,
    /// Where first-coordinate-zero points must land.
    pub point_a: Vec<i64>,
    /// Where everything else must land.
    pub point_b: Vec<i64>,
    /// Largest admissible tail depth ("sufficiently high iterate").
    pub iteration_budget: u64,
    /// Hard cap on enumerated candidates.
    pub candidate_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            num_vars: 2,
            max_degree: 4,
            coeff_min: -2,
            coeff_max: 2,
            max_terms: 2,
            primes: vec![2, 3, 5, 7, 11, 13],
            point_a: vec![0, 0],
            point_b: vec![1, 1],
            iteration_budget: 10_000,
            candidate_budget: 4_000_000,
        }
    }
}

const MAX_UNIVERSE: usize = 10_000;

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if self.num_vars == 0 {
            return fail("num_vars must be at least 1".into());
        }
        if self.coeff_min > self.coeff_max {
            return fail("coeff_min exceeds coeff_max".into());
        }
        if self.point_a.len() != self.num_vars || self.point_b.len() != self.num_vars {
            return fail("point_a/point_b must have num_vars coordinates".into());
        }
        if self.point_a == self.point_b {
            return fail("point_a and point_b must be distinct over Z".into());
        }
        if self.iteration_budget == 0 {
            return fail("iteration_budget must be at least 1".into());
        }
        if self.candidate_budget == 0 {
            return fail("candidate_budget must be at least 1".into());
        }
        let universe = count_monomials(self.num_vars, self.max_degree);
        if universe > MAX_UNIVERSE as u128 {
            return fail(format!(
                "monomial universe has {universe} entries, above the {MAX_UNIVERSE} cap"
            ));
        }
        if self.max_terms > universe as usize {
            return fail("max_terms exceeds the monomial universe".into());
        }
        for &p in &self.primes {
            if !is_prime(p) {
                return fail(format!("{p} is not prime"));
            }
            let space = (p as u128).checked_pow(self.num_vars as u32).unwrap_or(u128::MAX);
            if space > DEFAULT_GRAPH_POINT_BUDGET as u128 {
                return fail(format!("p = {p} is too large for exhaustive graphs"));
            }
        }
        Ok(())
    }

    /// Parses the `key = value` config format. Lines starting with `#` and
    /// blank lines are skipped; every key is optional and defaults apply;
    /// lists are comma-separated. Keys: num_vars, max_degree, coeff_min,
    /// coeff_max, max_terms, primes, point_a, point_b, iteration_budget,
    /// candidate_budget.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: String| Error::InvalidConfig(format!("line {}: {m}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value".into()))?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(bad(format!("duplicate key {key}")));
            }
            seen.push(key.to_string());
            match key {
                "num_vars" => cfg.num_vars = parse_num(key, value)?,
                "max_degree" => cfg.max_degree = parse_num(key, value)?,
                "coeff_min" => cfg.coeff_min = parse_num(key, value)?,
                "coeff_max" => cfg.coeff_max = parse_num(key, value)?,
                "max_terms" => cfg.max_terms = parse_num(key, value)?,
                "primes" => cfg.primes = parse_list(key, value)?,
                "point_a" => cfg.point_a = parse_list(key, value)?,
                "point_b" => cfg.point_b = parse_list(key, value)?,
                "iteration_budget" => cfg.iteration_budget = parse_num(key, value)?,
                "candidate_budget" => cfg.candidate_budget = parse_num(key, value)?,
                other => return Err(bad(format!("unknown key {other}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value for {key}: {value}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|part| parse_num(key, part.trim()))
        .collect()
}

fn count_monomials(num_vars: usize, max_degree: u32) -> u128 {
    // C(max_degree + num_vars, num_vars), computed without overflow drama.
    let mut acc: u128 = 1;
    for i in 1..=num_vars as u128 {
        acc = acc * (max_degree as u128 + i) / i;
    }
    acc
}

/// Exponent vectors of total degree ≤ `max_degree`, ascending graded-lex.
pub fn monomial_universe(num_vars: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn rec(slots: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 0 {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(slots - 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(num_vars, max_degree, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| grlex_cmp(a, b));
    out
}

/// All component polynomials of a config, in enumeration order.
pub fn component_candidates(cfg: &SearchConfig) -> Result<Vec<Polynomial>> {
    cfg.validate()?;
    let universe = monomial_universe(cfg.num_vars, cfg.max_degree);
    let coeffs: Vec<i64> = (cfg.coeff_min..=cfg.coeff_max).filter(|&c| c != 0).collect();
    let mut out = Vec::new();
    for t in 0..=cfg.max_terms {
        if t == 0 {
            out.push(Polynomial::zero(cfg.num_vars));
            continue;
        }
        if coeffs.is_empty() {
            break; // only the zero polynomial exists without nonzero coeffs
        }
        let mut combo: Vec<usize> = (0..t).collect();
        loop {
            // Coefficient odometer, rightmost slot fastest.
            let mut pick = vec![0usize; t];
            loop {
                let terms = combo
                    .iter()
                    .zip(&pick)
                    .map(|(&mi, &ci)| (universe[mi].clone(), coeffs[ci]));
                out.push(Polynomial::new(cfg.num_vars, terms)?);
                if !advance_odometer(&mut pick, coeffs.len()) {
                    break;
                }
            }
            if !advance_combination(&mut combo, universe.len()) {
                break;
            }
        }
    }
    Ok(out)
}

/// Steps `pick` to the next odometer state (rightmost slot fastest);
/// false after wrapping past the last state.
fn advance_odometer(pick: &mut [usize], base: usize) -> bool {
    let mut slot = pick.len();
    while slot > 0 {
        slot -= 1;
        pick[slot] += 1;
        if pick[slot] < base {
            return true;
        }
        pick[slot] = 0;
    }
    false
}

/// Steps an ascending index combination to its lexicographic successor;
/// false when `combo` was the last one.
fn advance_combination(combo: &mut [usize], n: usize) -> bool {
    let t = combo.len();
    let mut i = t;
    while i > 0 {
        i -= 1;
        if combo[i] < n - t + i {
            combo[i] += 1;
            for j in i + 1..t {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Iterator over `(index, map)` candidates in enumeration order, truncated
/// by the candidate budget.
pub struct CandidateIter {
    components: Vec<Polynomial>,
    num_vars: usize,
    next: u64,
    end: u64,
}

impl Iterator for CandidateIter {
    type Item = (u64, PolyMap);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let index = self.next;
        self.next += 1;
        Some((index, nth_candidate(&self.components, self.num_vars, index)))
    }
}

fn nth_candidate(components: &[Polynomial], num_vars: usize, index: u64) -> PolyMap {
    let m = components.len() as u64;
    let mut digits = vec![0u64; num_vars];
    let mut v = index;
    for d in digits.iter_mut().rev() {
        *d = v % m;
        v /= m;
    }
    let comps = digits.iter().map(|&d| components[d as usize].clone()).collect();
    PolyMap::new(comps, None).expect("components share num_vars")
}

/// Total candidate space |components|^n and its budget-truncated prefix.
pub fn candidate_space(cfg: &SearchConfig) -> Result<(u128, u64)> {
    let m = component_candidates(cfg)?.len() as u128;
    let space = m.pow(cfg.num_vars as u32);
    let enumerated = space.min(cfg.candidate_budget as u128) as u64;
    Ok((space, enumerated))
}

/// Budget-truncated enumeration of candidate maps.
pub fn candidates(cfg: &SearchConfig) -> Result<CandidateIter> {
    let components = component_candidates(cfg)?;
    let space = (components.len() as u128).pow(cfg.num_vars as u32);
    let end = space.min(cfg.candidate_budget as u128) as u64;
    Ok(CandidateIter { components, num_vars: cfg.num_vars, next: 0, end })
}

/// Exact check that F(point) = point over the integers.
pub fn is_fixed_over_z(map: &PolyMap, point: &[i64]) -> Result<bool> {
    let image = map.evaluate_int(point)?;
    Ok(image
        .iter()
        .zip(point)
        .all(|(&out, &coord)| out == coord as i128))
}

/// Verdict of one candidate at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeCheck {
    pub p: u64,
    pub sorts: bool,
    /// A ≡ B mod p: there is nothing to sort, recorded and not counted as
    /// evidence either way.
    pub degenerate: bool,
    /// Deepest tail = the iterate count after which every point has
    /// arrived (present when the check passed).
    pub required_iterate: Option<u64>,
    /// Coordinates of a point that breaks the claim.
    pub failure_witness: Option<Vec<u64>>,
}

impl PrimeCheck {
    fn degenerate_pass(p: u64) -> Self {
        Self { p, sorts: true, degenerate: true, required_iterate: None, failure_witness: None }
    }
}

fn reduce_point(coords: &[i64], p: u64) -> Point {
    Point::new(
        coords.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect(),
        p,
    )
}

/// Shared engine for the attractor checks: the graph's cycles must be
/// exactly the given fixed targets, every point must feed the target chosen
/// by `expected_of` (by target position), and no tail may exceed
/// `max_iterate`.
fn attractor_check(
    map: &PolyMap,
    p: u64,
    targets: &[&[i64]],
    expected_of: impl Fn(&[u64]) -> usize,
    max_iterate: u64,
) -> Result<PrimeCheck> {
    crate::modfield::check_prime(p)?;
    let reduced: Vec<Point> = targets.iter().map(|t| reduce_point(t, p)).collect();
    for (point, original) in reduced.iter().zip(targets) {
        if &map.evaluate(point)? != point {
            return Err(Error::NotFixedModP { point: original.to_vec(), p });
        }
    }
    let graph = build_graph_with(map, p, DEFAULT_GRAPH_POINT_BUDGET)?;
    let target_indices: Vec<u64> = reduced.iter().map(crate::dynamics::point_index).collect();

    let fail = |witness_index: u64| -> Result<PrimeCheck> {
        let point = point_of_index(witness_index, p, map.num_vars())?;
        Ok(PrimeCheck {
            p,
            sorts: false,
            degenerate: false,
            required_iterate: None,
            failure_witness: Some(point.coords().to_vec()),
        })
    };

    // Exactly the target 1-cycles, nothing else.
    for cycle in graph.cycles() {
        let is_target = cycle.len() == 1 && target_indices.contains(&(cycle[0] as u64));
        if !is_target {
            return fail(cycle[0] as u64);
        }
    }

    // Every point must feed the right target.
    let target_basins: Vec<u32> = target_indices
        .iter()
        .map(|&t| graph.basin_id()[t as usize])
        .collect();
    let mut coords = vec![0u64; map.num_vars()];
    for i in 0..graph.size() {
        let mut v = i;
        for c in coords.iter_mut().rev() {
            *c = v % p;
            v /= p;
        }
        let want = target_basins[expected_of(&coords)];
        if graph.basin_id()[i as usize] != want {
            return fail(i);
        }
    }

    let deepest = graph.max_tail_depth();
    if deepest > max_iterate {
        let witness = graph
            .tail_depth()
            .iter()
            .position(|&d| d as u64 == deepest)
            .expect("max depth attained");
        return fail(witness as u64);
    }

    Ok(PrimeCheck {
        p,
        sorts: true,
        degenerate: false,
        required_iterate: Some(deepest),
        failure_witness: None,
    })
}

/// Does F mod p send first-coordinate-zero points to A and the rest to B
/// within `max_iterate` steps? A ≡ B mod p short-circuits as a degenerate
/// pass. Errors with [`Error::NotFixedModP`] if either point moves.
pub fn sorts_by_first_coordinate(
    map: &PolyMap,
    p: u64,
    point_a: &[i64],
    point_b: &[i64],
    max_iterate: u64,
) -> Result<PrimeCheck> {
    if reduce_point(point_a, p) == reduce_point(point_b, p) {
        return Ok(PrimeCheck::degenerate_pass(p));
    }
    attractor_check(
        map,
        p,
        &[point_a, point_b],
        |coords| if coords[0] == 0 { 0 } else { 1 },
        max_iterate,
    )
}

/// Does every point of F_p^n fall into `target` within `max_iterate` steps?
pub fn single_attractor_check(
    map: &PolyMap,
    p: u64,
    target: &[i64],
    max_iterate: u64,
) -> Result<PrimeCheck> {
    attractor_check(map, p, &[target], |_| 0, max_iterate)
}

/// Everything recorded about one candidate that survived stage 1.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateVerdict {
    /// Position in the enumeration order.
    pub index: u64,
    /// Component polynomials in canonical text form.
    pub map: PolyMap,
    pub fixed_over_z: bool,
    /// Checks in config prime order, stopping at the first failure.
    pub per_prime: Vec<PrimeCheck>,
    /// Sorted at every configured prime, with at least one of them
    /// non-degenerate.
    pub overall: bool,
}

/// Aggregate counts of one run.
#[derive(Debug, Clone, Serialize)]
pub struct SearchSummary {
    /// |components|^num_vars, saturating at u64::MAX.
    pub candidate_space: u64,
    pub enumerated: u64,
    pub truncated_by_budget: bool,
    pub rejected_not_fixed: u64,
    /// Candidates whose exact evaluation left 128-bit range: rejected but
    /// tallied separately since they are not proven non-fixed.
    pub exact_overflows: u64,
    /// Survivors of the exact stage.
    pub fixed_over_z: u64,
    /// Prime -> candidates first rejected there.
    pub rejected_at_prime: BTreeMap<u64, u64>,
    pub passes: u64,
    /// Primes where A ≡ B mod p for this config.
    pub degenerate_primes: Vec<u64>,
    /// True when no configured prime can distinguish A from B.
    pub no_effective_primes: bool,
}

/// A full run: summary plus every stage-2 verdict in enumeration order.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub verdicts: Vec<CandidateVerdict>,
    pub summary: SearchSummary,
}

/// Runs the search, handing each stage-2 verdict to `sink` in enumeration
/// order as it is finalized.
pub fn run_search_streaming(
    cfg: &SearchConfig,
    mut sink: impl FnMut(&CandidateVerdict),
) -> Result<SearchOutcome> {
    cfg.validate()?;
    let components = component_candidates(cfg)?;
    let m = components.len() as u64;
    let space128 = (m as u128).pow(cfg.num_vars as u32);
    let enumerated = space128.min(cfg.candidate_budget as u128) as u64;

    let degenerate_primes: Vec<u64> = cfg
        .primes
        .iter()
        .copied()
        .filter(|&p| reduce_point(&cfg.point_a, p) == reduce_point(&cfg.point_b, p))
        .collect();
    let no_effective_primes = cfg.primes.len() == degenerate_primes.len();

    // Stage 1, per component and slot: does this component hold coordinate
    // s of both fixed points? Candidates multiply out of these tables.
    #[derive(Clone, Copy, PartialEq)]
    enum Slot {
        Pass,
        Reject,
        Overflow,
    }
    let slot_status: Vec<Vec<Slot>> = (0..cfg.num_vars)
        .map(|s| {
            components
                .iter()
                .map(|c| {
                    let at_a = c.evaluate_int(&cfg.point_a);
                    let at_b = c.evaluate_int(&cfg.point_b);
                    match (at_a, at_b) {
                        (Ok(a), Ok(b)) => {
                            if a == cfg.point_a[s] as i128 && b == cfg.point_b[s] as i128 {
                                Slot::Pass
                            } else {
                                Slot::Reject
                            }
                        }
                        _ => Slot::Overflow,
                    }
                })
                .collect()
        })
        .collect();

    let mut rejected_not_fixed = 0u64;
    let mut exact_overflows = 0u64;
    let mut survivors: Vec<u64> = Vec::new();
    let mut digits = vec![0u64; cfg.num_vars];
    for index in 0..enumerated {
        let mut rejected = false;
        let mut overflowed = false;
        for (s, &d) in digits.iter().enumerate() {
            match slot_status[s][d as usize] {
                Slot::Reject => {
                    rejected = true;
                    break;
                }
                Slot::Overflow => overflowed = true,
                Slot::Pass => {}
            }
        }
        if rejected {
            rejected_not_fixed += 1;
        } else if overflowed {
            exact_overflows += 1;
        } else {
            survivors.push(index);
        }
        // Odometer, last component fastest (= ascending index order).
        for slot in (0..cfg.num_vars).rev() {
            digits[slot] += 1;
            if digits[slot] < m {
                break;
            }
            digits[slot] = 0;
        }
    }

    // Stage 2 in parallel, order preserved by the indexed collect.
    let verdicts: Vec<CandidateVerdict> = survivors
        .par_iter()
        .map(|&index| {
            let map = nth_candidate(&components, cfg.num_vars, index);
            let mut per_prime = Vec::with_capacity(cfg.primes.len());
            let mut all_sort = true;
            for &p in &cfg.primes {
                let check = sorts_by_first_coordinate(
                    &map,
                    p,
                    &cfg.point_a,
                    &cfg.point_b,
                    cfg.iteration_budget,
                )?;
                let sorted = check.sorts;
                per_prime.push(check);
                if !sorted {
                    all_sort = false;
                    break;
                }
            }
            let overall = all_sort && !no_effective_primes && !cfg.primes.is_empty();
            Ok(CandidateVerdict { index, map, fixed_over_z: true, per_prime, overall })
        })
        .collect::<Result<_>>()?;

    let mut rejected_at_prime: BTreeMap<u64, u64> = BTreeMap::new();
    let mut passes = 0u64;
    for v in &verdicts {
        sink(v);
        if v.overall {
            passes += 1;
        }
        if let Some(last) = v.per_prime.last() {
            if !last.sorts {
                *rejected_at_prime.entry(last.p).or_insert(0) += 1;
            }
        }
    }

    let summary = SearchSummary {
        candidate_space: space128.min(u64::MAX as u128) as u64,
        enumerated,
        truncated_by_budget: (enumerated as u128) < space128,
        rejected_not_fixed,
        exact_overflows,
        fixed_over_z: survivors.len() as u64,
        rejected_at_prime,
        passes,
        degenerate_primes,
        no_effective_primes,
    };
    Ok(SearchOutcome { verdicts, summary })
}

/// [`run_search_streaming`] without a sink.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    run_search_streaming(cfg, |_| {})
}
