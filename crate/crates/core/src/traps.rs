//! Verification of the three trap claims modulo a prime.
//!
//! Every verifier returns a [`TrapReport`]: what was claimed, whether it
//! held, the nilpotency index when one exists, a witness point, and the
//! predicted vs observed count of untrapped points. Small primes are
//! checked exhaustively against the full functional graph; primes whose
//! plane does not fit the point budget fall back to seeded random sampling
//! with per-point predictions, so a run is reproducible bit for bit.
//!
//! The ratio view is what makes predictions possible. Writing r = y/x,
//! the additive trap sends r to r + 1, the multiplicative trap to 2r and
//! the power trap to r^2. The printed component order of the latter two is
//! also audited in the other orientation (u/v instead of v/u), because the
//! orientations genuinely disagree once p is large enough to distinguish
//! them; the reports record both outcomes.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::{
    build_graph_with, point_of_index, reaches_origin_within, FunctionalGraph,
    DEFAULT_GRAPH_POINT_BUDGET,
};
use crate::error::{Error, Result};
use crate::modfield::{check_prime, fermat_exponent, mod_inv, mod_pow, mult_order};
use crate::poly::{BuiltinMap, Point, PolyMap};

/// Default seed for sampled verification ("trap" in ASCII).
pub const DEFAULT_SAMPLE_SEED: u64 = 0x7472_6170;

/// Which statement a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// The ratio y/x steps as predicted under one application.
    RatioRecurrence,
    /// Additive trap: nilpotent mod p with index at most p.
    AdditiveTrap,
    /// Multiplicative trap: untrapped points are exactly the ratios
    /// outside the subgroup generated by 2.
    MultiplicativeTrap,
    /// Power trap: trapped points are exactly the two-primary ratios and
    /// the coordinate axes; on Fermat primes the map is nilpotent with
    /// index at most k+1.
    PowerTrap,
    /// Generic claim for user-supplied maps: every point falls into the
    /// origin.
    OriginAttractor,
}

impl Claim {
    pub fn as_str(self) -> &'static str {
        match self {
            Claim::RatioRecurrence => "ratio_recurrence",
            Claim::AdditiveTrap => "additive_trap",
            Claim::MultiplicativeTrap => "multiplicative_trap",
            Claim::PowerTrap => "power_trap",
            Claim::OriginAttractor => "origin_attractor",
        }
    }
}

/// How a report was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Exhaustive,
    Sampled,
}

/// The multiplicative class y/x of a point with x, y both nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatioClass(pub u64);

impl RatioClass {
    /// `None` when either coordinate vanishes (the ratio is undefined and
    /// the point dies in one step anyway).
    pub fn of(point: &Point) -> Result<Option<RatioClass>> {
        if point.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: point.dim() });
        }
        let p = point.modulus();
        let (x, y) = (point.coords()[0], point.coords()[1]);
        if x == 0 || y == 0 {
            return Ok(None);
        }
        Ok(Some(RatioClass(mul(y, mod_inv(x, p)?, p))))
    }
}

/// Result of checking the ratio step in both printed orientations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrientationAudit {
    /// v/u (second component over first) follows the predicted step.
    pub second_over_first: bool,
    /// u/v follows it, on the points where v is nonzero.
    pub first_over_second: bool,
}

/// Nilpotency bound bookkeeping for power-trap reports on Fermat primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FermatDetail {
    /// p = 2^k + 1.
    pub k: u32,
    /// Nilpotency index at most k+1 held on everything checked.
    pub bound_holds: bool,
    /// The exact index (exhaustive runs only).
    pub exact_index: Option<u64>,
    /// Whether k steps already sufficed for everything checked; the data
    /// says no, so k+1 is sharp.
    pub k_suffices: Option<bool>,
}

/// Outcome of one claim at one prime.
#[derive(Debug, Clone)]
pub struct TrapReport {
    pub map_name: String,
    pub p: u64,
    pub claim: Claim,
    pub holds: bool,
    /// Least N with F^N ≡ (0,0); present iff the graph has a single cycle,
    /// the fixed origin (exhaustive runs).
    pub nilpotency_index: Option<u64>,
    /// A counterexample when the claim fails; a representative untrapped
    /// point when it holds and untrapped points exist.
    pub witness: Option<Point>,
    pub predicted_untrapped: u64,
    pub observed_untrapped: u64,
    pub mode: VerifyMode,
    pub elapsed: Duration,
    /// Ratio-orientation audit (ratio reports only).
    pub orientation: Option<OrientationAudit>,
    /// Fermat-prime bound data (power-trap reports only).
    pub fermat: Option<FermatDetail>,
    /// p divides a structural coefficient and the claim collapses to a
    /// trivially true statement (multiplicative trap at p = 2).
    pub degenerate: bool,
    /// One-line human explanation of the numbers above.
    pub detail: String,
}

impl TrapReport {
    /// The stable JSON row. `reproducible` zeroes the timing field so two
    /// runs of the same command are byte-identical.
    pub fn to_json(&self, reproducible: bool) -> Value {
        json!({
            "map": self.map_name,
            "p": self.p,
            "claim": self.claim.as_str(),
            "holds": self.holds,
            "nilpotency_index": self.nilpotency_index,
            "witness": self.witness.as_ref().map(|w| w.coords().to_vec()),
            "predicted_untrapped": self.predicted_untrapped,
            "observed_untrapped": self.observed_untrapped,
            "mode": self.mode,
            "elapsed_ms": if reproducible { 0 } else { self.elapsed.as_millis() as u64 },
        })
    }
}

/// Knobs for the verifiers; the defaults verify exhaustively whenever the
/// plane fits the graph budget.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Sample even when exhaustive verification would fit.
    pub force_sampled: bool,
    pub seed: u64,
    pub samples: u64,
    pub graph_point_budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            force_sampled: false,
            seed: DEFAULT_SAMPLE_SEED,
            samples: 10_000,
            graph_point_budget: DEFAULT_GRAPH_POINT_BUDGET,
        }
    }
}

impl VerifyOptions {
    fn exhaustive_fits(&self, p: u64, n: u32) -> bool {
        if self.force_sampled {
            return false;
        }
        let size = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
        size <= self.graph_point_budget.min(u32::MAX as u64) as u128
    }

}

fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// One entry of a primes-sweep: a finished report or a hard failure for
/// that prime (non-prime input, blown budget).
#[derive(Debug, Clone)]
pub enum SuiteEntry {
    Report(TrapReport),
    Failure { p: u64, error: String },
}

impl SuiteEntry {
    pub fn to_json(&self, reproducible: bool) -> Value {
        match self {
            SuiteEntry::Report(r) => r.to_json(reproducible),
            SuiteEntry::Failure { p, error } => json!({ "p": p, "error": error }),
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, SuiteEntry::Report(r) if r.holds)
    }
}

/// The predicted one-step ratio map of a builtin.
fn ratio_step(builtin: BuiltinMap, r: u64, p: u64) -> u64 {
    match builtin {
        BuiltinMap::AdditiveTrap => (r + 1) % p,
        BuiltinMap::MultiplicativeTrap => mul(2 % p, r, p),
        BuiltinMap::PowerTrap => mul(r, r, p),
    }
}

/// Points where the ratio claim applies: both coordinates nonzero, and for
/// the two maps carrying an (x - y) factor, off the diagonal.
fn ratio_point_valid(builtin: BuiltinMap, x: u64, y: u64) -> bool {
    x != 0 && y != 0 && (builtin == BuiltinMap::AdditiveTrap || x != y)
}

/// Checks the one-step ratio law for `builtin` at p, in both orientations.
pub fn verify_ratio_recurrence(builtin: BuiltinMap, p: u64) -> Result<TrapReport> {
    verify_ratio_recurrence_with(builtin, p, &VerifyOptions::default())
}

pub fn verify_ratio_recurrence_with(
    builtin: BuiltinMap,
    p: u64,
    opts: &VerifyOptions,
) -> Result<TrapReport> {
    check_prime(p)?;
    let started = Instant::now();
    let map = builtin.map();
    let exhaustive = opts.exhaustive_fits(p, 2);

    let mut vu_ok = true;
    let mut uv_ok = true;
    let mut witness: Option<Point> = None;

    let mut check = |x: u64, y: u64| -> Result<()> {
        let point = Point::new(vec![x, y], p);
        let image = map.evaluate(&point)?;
        let (u, v) = (image.coords()[0], image.coords()[1]);
        let r = mul(y, mod_inv(x, p)?, p);
        let expected = ratio_step(builtin, r, p);
        let canonical = u != 0 && mul(v, mod_inv(u, p)?, p) == expected;
        if !canonical && vu_ok {
            vu_ok = false;
            witness = Some(point);
        }
        if v != 0 && mul(u, mod_inv(v, p)?, p) != expected {
            uv_ok = false;
        }
        Ok(())
    };

    if exhaustive {
        for x in 1..p {
            for y in 1..p {
                if ratio_point_valid(builtin, x, y) {
                    check(x, y)?;
                }
            }
        }
    } else {
        let mut rng = sample_rng(opts.seed, p, Claim::RatioRecurrence, builtin as u64);
        for _ in 0..opts.samples {
            let x = rng.gen_range(1..p);
            let y = rng.gen_range(1..p);
            if ratio_point_valid(builtin, x, y) {
                check(x, y)?;
            }
        }
    }

    let step_text = match builtin {
        BuiltinMap::AdditiveTrap => "r + 1",
        BuiltinMap::MultiplicativeTrap => "2r",
        BuiltinMap::PowerTrap => "r^2",
    };
    Ok(TrapReport {
        map_name: builtin.name().to_string(),
        p,
        claim: Claim::RatioRecurrence,
        holds: vu_ok,
        nilpotency_index: None,
        witness,
        predicted_untrapped: 0,
        observed_untrapped: 0,
        mode: if exhaustive { VerifyMode::Exhaustive } else { VerifyMode::Sampled },
        elapsed: started.elapsed(),
        orientation: Some(OrientationAudit {
            second_over_first: vu_ok,
            first_over_second: uv_ok,
        }),
        fermat: None,
        degenerate: false,
        detail: format!("new ratio v/u must equal {step_text}; u/v audited alongside"),
    })
}

/// Additive trap: F^p ≡ (0,0) and no smaller exponent pattern is claimed;
/// the report records the exact index, which equals p.
pub fn verify_additive_trap(p: u64) -> Result<TrapReport> {
    verify_additive_trap_with(p, &VerifyOptions::default())
}

pub fn verify_additive_trap_with(p: u64, opts: &VerifyOptions) -> Result<TrapReport> {
    check_prime(p)?;
    let started = Instant::now();
    let builtin = BuiltinMap::AdditiveTrap;
    let map = builtin.map();

    if opts.exhaustive_fits(p, 2) {
        let graph = build_graph_with(&map, p, opts.graph_point_budget)?;
        let origin = Point::origin(2, p);
        let nilpotency = graph.nilpotency_index(&origin)?;
        let holds = nilpotency.is_some_and(|n| n <= p);
        let witness = if holds { None } else { failure_witness(&graph, p) };
        let observed = graph.size() - graph.trapped_set(&origin)?.len() as u64;
        let detail = match nilpotency {
            Some(n) => format!("nilpotency index {n} against the bound p = {p}"),
            None => "no nilpotency index: some cycle avoids the origin".to_string(),
        };
        return Ok(TrapReport {
            map_name: builtin.name().to_string(),
            p,
            claim: Claim::AdditiveTrap,
            holds,
            nilpotency_index: nilpotency,
            witness,
            predicted_untrapped: 0,
            observed_untrapped: observed,
            mode: VerifyMode::Exhaustive,
            elapsed: started.elapsed(),
            orientation: None,
            fermat: None,
            degenerate: false,
            detail,
        });
    }

    // Sampled: every sampled point must reach the origin within p steps.
    // Points are drawn first so the stream stays seed-stable, then the
    // (long, independent) walks run in parallel.
    let mut rng = sample_rng(opts.seed, p, Claim::AdditiveTrap, 0);
    let points: Vec<Point> = (0..opts.samples)
        .map(|_| Point::new(vec![rng.gen_range(0..p), rng.gen_range(0..p)], p))
        .collect();
    let walks = points
        .par_iter()
        .map(|point| reaches_origin_within(&map, point, p))
        .collect::<Result<Vec<_>>>()?;
    let mut holds = true;
    let mut witness = None;
    let mut observed = 0u64;
    let mut max_steps_seen = 0u64;
    for (point, walk) in points.iter().zip(&walks) {
        match walk {
            Some(s) => max_steps_seen = max_steps_seen.max(*s),
            None => {
                observed += 1;
                if holds {
                    holds = false;
                    witness = Some(point.clone());
                }
            }
        }
    }
    Ok(TrapReport {
        map_name: builtin.name().to_string(),
        p,
        claim: Claim::AdditiveTrap,
        holds,
        nilpotency_index: None,
        witness,
        predicted_untrapped: 0,
        observed_untrapped: observed,
        mode: VerifyMode::Sampled,
        elapsed: started.elapsed(),
        orientation: None,
        fermat: None,
        degenerate: false,
        detail: format!(
            "{} samples reached the origin within p steps (deepest needed {max_steps_seen})",
            opts.samples
        ),
    })
}

/// First point that breaks nilpotency: deepest tail if the origin is the
/// only cycle, otherwise the smallest point on a cycle that avoids it.
fn failure_witness(graph: &FunctionalGraph, p: u64) -> Option<Point> {
    for cycle in graph.cycles() {
        if cycle != &[0u32] {
            return point_of_index(cycle[0] as u64, p, graph.n()).ok();
        }
    }
    let deepest = graph
        .tail_depth()
        .iter()
        .enumerate()
        .max_by_key(|&(i, &d)| (d, std::cmp::Reverse(i)))?
        .0;
    point_of_index(deepest as u64, p, graph.n()).ok()
}

/// Multiplicative trap: the untrapped points are exactly those whose ratio
/// lies outside the subgroup generated by 2 — so the map is nilpotent iff
/// 2 generates F_p^* (and trivially at p = 2 where the map collapses).
pub fn verify_multiplicative_trap(p: u64) -> Result<TrapReport> {
    verify_multiplicative_trap_with(p, &VerifyOptions::default())
}

pub fn verify_multiplicative_trap_with(p: u64, opts: &VerifyOptions) -> Result<TrapReport> {
    check_prime(p)?;
    let started = Instant::now();
    let builtin = BuiltinMap::MultiplicativeTrap;
    let map = builtin.map();

    if p == 2 {
        // 2 ≡ 0 kills the second component and (x - y) the first: the map
        // is identically (0,0), so the claim degenerates to a true one.
        let graph = build_graph_with(&map, p, opts.graph_point_budget)?;
        let origin = Point::origin(2, p);
        let nilpotency = graph.nilpotency_index(&origin)?;
        return Ok(TrapReport {
            map_name: builtin.name().to_string(),
            p,
            claim: Claim::MultiplicativeTrap,
            holds: nilpotency.is_some(),
            nilpotency_index: nilpotency,
            witness: None,
            predicted_untrapped: 0,
            observed_untrapped: 0,
            mode: VerifyMode::Exhaustive,
            elapsed: started.elapsed(),
            orientation: None,
            fermat: None,
            degenerate: true,
            detail: "p = 2 degenerate: both components vanish identically".to_string(),
        });
    }

    let ord = mult_order(2, p)?;
    let generates = ord == p - 1;
    let predicted = (p - 1) * (p - 1 - ord);

    if opts.exhaustive_fits(p, 2) {
        // Subgroup membership table for <2>.
        let mut in_subgroup = vec![false; p as usize];
        let mut cur = 1u64;
        loop {
            in_subgroup[cur as usize] = true;
            cur = mul(cur, 2, p);
            if cur == 1 {
                break;
            }
        }
        let graph = build_graph_with(&map, p, opts.graph_point_budget)?;
        let origin_basin = graph.basin_id()[0];
        let mut observed = 0u64;
        let mut mismatch: Option<Point> = None;
        let mut first_untrapped: Option<Point> = None;
        for x in 0..p {
            for y in 0..p {
                let idx = (x * p + y) as usize;
                let trapped = graph.basin_id()[idx] == origin_basin;
                let expect_trapped =
                    x == 0 || y == 0 || in_subgroup[mul(y, mod_inv(x, p)?, p) as usize];
                if !trapped {
                    observed += 1;
                    if first_untrapped.is_none() {
                        first_untrapped = Some(Point::new(vec![x, y], p));
                    }
                }
                if trapped != expect_trapped && mismatch.is_none() {
                    mismatch = Some(Point::new(vec![x, y], p));
                }
            }
        }
        let nilpotency = graph.nilpotency_index(&Point::origin(2, p))?;
        let holds = mismatch.is_none()
            && observed == predicted
            && (!generates || observed == 0)
            && (generates == nilpotency.is_some());
        let witness = if holds { first_untrapped } else { mismatch.or(first_untrapped) };
        return Ok(TrapReport {
            map_name: builtin.name().to_string(),
            p,
            claim: Claim::MultiplicativeTrap,
            holds,
            nilpotency_index: nilpotency,
            witness,
            predicted_untrapped: predicted,
            observed_untrapped: observed,
            mode: VerifyMode::Exhaustive,
            elapsed: started.elapsed(),
            orientation: None,
            fermat: None,
            degenerate: false,
            detail: format!(
                "ord(2) = {ord} so (p-1)(p-1-ord) = {predicted} points should escape"
            ),
        });
    }

    // Sampled: per-point prediction (ratio in <2> iff r^ord = 1) against a
    // bounded walk. A trapped ratio 2^j reaches ratio 1 within ord steps
    // and the origin one step later, so ord + 2 steps decide trapping.
    // Walks can take up to ord steps each, so they run in parallel over a
    // pre-drawn (seed-stable) point list.
    let mut rng = sample_rng(opts.seed, p, Claim::MultiplicativeTrap, 0);
    let points: Vec<Point> = (0..opts.samples)
        .map(|_| Point::new(vec![rng.gen_range(0..p), rng.gen_range(0..p)], p))
        .collect();
    let walks = points
        .par_iter()
        .map(|point| Ok(reaches_origin_within(&map, point, ord + 2)?.is_some()))
        .collect::<Result<Vec<bool>>>()?;
    let mut predicted_sample = 0u64;
    let mut observed_sample = 0u64;
    let mut mismatch = None;
    for (point, &trapped) in points.iter().zip(&walks) {
        let (x, y) = (point.coords()[0], point.coords()[1]);
        let expect_trapped = x == 0 || y == 0 || mod_pow(mul(y, mod_inv(x, p)?, p), ord, p) == 1;
        if !expect_trapped {
            predicted_sample += 1;
        }
        if !trapped {
            observed_sample += 1;
        }
        if trapped != expect_trapped && mismatch.is_none() {
            mismatch = Some(point.clone());
        }
    }
    Ok(TrapReport {
        map_name: builtin.name().to_string(),
        p,
        claim: Claim::MultiplicativeTrap,
        holds: mismatch.is_none(),
        nilpotency_index: None,
        witness: mismatch,
        predicted_untrapped: predicted_sample,
        observed_untrapped: observed_sample,
        mode: VerifyMode::Sampled,
        elapsed: started.elapsed(),
        orientation: None,
        fermat: None,
        degenerate: false,
        detail: format!(
            "ord(2) = {ord}; sampled counts are over the {} sampled points",
            opts.samples
        ),
    })
}

/// Power trap: trapped points are the axes plus the ratios of two-power
/// order; on a Fermat prime p = 2^k + 1 the map is nilpotent with index at
/// most k + 1 (and the data shows k alone never suffices).
pub fn verify_power_trap(p: u64) -> Result<TrapReport> {
    verify_power_trap_with(p, &VerifyOptions::default())
}

pub fn verify_power_trap_with(p: u64, opts: &VerifyOptions) -> Result<TrapReport> {
    check_prime(p)?;
    if p == 2 {
        return Err(Error::InvalidInput(
            "power trap claims concern odd primes".to_string(),
        ));
    }
    let started = Instant::now();
    let builtin = BuiltinMap::PowerTrap;
    let map = builtin.map();

    let v2 = (p - 1).trailing_zeros();
    let s2 = 1u64 << v2; // size of the 2-Sylow subgroup of F_p^*
    let predicted = (p - 1) * (p - 1 - s2);
    let fermat_k = fermat_exponent(p)?;

    if opts.exhaustive_fits(p, 2) {
        let graph = build_graph_with(&map, p, opts.graph_point_budget)?;
        let origin = Point::origin(2, p);
        let origin_basin = graph.basin_id()[0];
        let mut observed = 0u64;
        let mut mismatch: Option<Point> = None;
        let mut first_untrapped: Option<Point> = None;
        for x in 0..p {
            for y in 0..p {
                let idx = (x * p + y) as usize;
                let trapped = graph.basin_id()[idx] == origin_basin;
                // ord(r) is a power of two iff r^(2^v2) = 1.
                let expect_trapped = x == 0
                    || y == 0
                    || mod_pow(mul(y, mod_inv(x, p)?, p), s2, p) == 1;
                if !trapped {
                    observed += 1;
                    if first_untrapped.is_none() {
                        first_untrapped = Some(Point::new(vec![x, y], p));
                    }
                }
                if trapped != expect_trapped && mismatch.is_none() {
                    mismatch = Some(Point::new(vec![x, y], p));
                }
            }
        }
        let nilpotency = graph.nilpotency_index(&origin)?;
        let mut holds = mismatch.is_none() && observed == predicted;
        let fermat = fermat_k.map(|k| {
            let bound_holds = nilpotency.is_some_and(|n| n <= (k as u64) + 1);
            FermatDetail {
                k,
                bound_holds,
                exact_index: nilpotency,
                k_suffices: nilpotency.map(|n| n <= k as u64),
            }
        });
        if let Some(f) = &fermat {
            holds = holds && f.bound_holds;
        }
        let witness = if holds { first_untrapped } else { mismatch.or(first_untrapped) };
        let detail = match fermat_k {
            Some(k) => format!(
                "2-Sylow size {s2}; Fermat prime 2^{k}+1, nilpotency bound k+1 = {}",
                k + 1
            ),
            None => format!("2-Sylow size {s2}; (p-1)(p-1-s2) = {predicted} points escape"),
        };
        return Ok(TrapReport {
            map_name: builtin.name().to_string(),
            p,
            claim: Claim::PowerTrap,
            holds,
            nilpotency_index: nilpotency,
            witness,
            predicted_untrapped: predicted,
            observed_untrapped: observed,
            mode: VerifyMode::Exhaustive,
            elapsed: started.elapsed(),
            orientation: None,
            fermat,
            degenerate: false,
            detail,
        });
    }

    // Sampled. A trapped ratio of order 2^a reaches ratio 1 after a ≤ v2
    // squarings, so v2 + 2 steps decide trapping.
    let mut rng = sample_rng(opts.seed, p, Claim::PowerTrap, 0);
    let mut predicted_sample = 0u64;
    let mut observed_sample = 0u64;
    let mut mismatch = None;
    let mut k_ok = true;
    let mut bound_ok = true;
    for _ in 0..opts.samples {
        let x = rng.gen_range(0..p);
        let y = rng.gen_range(0..p);
        let point = Point::new(vec![x, y], p);
        let expect_trapped =
            x == 0 || y == 0 || mod_pow(mul(y, mod_inv(x, p)?, p), s2, p) == 1;
        let steps = reaches_origin_within(&map, &point, v2 as u64 + 2)?;
        if !expect_trapped {
            predicted_sample += 1;
        }
        if steps.is_none() {
            observed_sample += 1;
        }
        if steps.is_some() != expect_trapped && mismatch.is_none() {
            mismatch = Some(point.clone());
        }
        if let (Some(k), Some(s)) = (fermat_k, steps) {
            if s > k as u64 {
                k_ok = false;
            }
            if s > k as u64 + 1 {
                bound_ok = false;
                if mismatch.is_none() {
                    mismatch = Some(point);
                }
            }
        }
    }
    let fermat = fermat_k.map(|k| FermatDetail {
        k,
        bound_holds: bound_ok,
        exact_index: None,
        k_suffices: Some(k_ok),
    });
    let holds = mismatch.is_none() && fermat.is_none_or(|f| f.bound_holds);
    Ok(TrapReport {
        map_name: builtin.name().to_string(),
        p,
        claim: Claim::PowerTrap,
        holds,
        nilpotency_index: None,
        witness: mismatch,
        predicted_untrapped: predicted_sample,
        observed_untrapped: observed_sample,
        mode: VerifyMode::Sampled,
        elapsed: started.elapsed(),
        orientation: None,
        fermat,
        degenerate: false,
        detail: format!(
            "2-Sylow size {s2}; sampled counts are over the {} sampled points",
            opts.samples
        ),
    })
}

/// Generic claim for a user-supplied map: every point of F_p^n falls into
/// the fixed origin. Exhaustive only.
pub fn verify_origin_attractor(map: &PolyMap, p: u64) -> Result<TrapReport> {
    verify_origin_attractor_with(map, p, &VerifyOptions::default())
}

pub fn verify_origin_attractor_with(
    map: &PolyMap,
    p: u64,
    opts: &VerifyOptions,
) -> Result<TrapReport> {
    check_prime(p)?;
    let started = Instant::now();
    let origin = Point::origin(map.num_vars(), p);
    if map.evaluate(&origin)? != origin {
        return Ok(TrapReport {
            map_name: map.display_name(),
            p,
            claim: Claim::OriginAttractor,
            holds: false,
            nilpotency_index: None,
            witness: Some(origin),
            predicted_untrapped: 0,
            observed_untrapped: 0,
            mode: VerifyMode::Exhaustive,
            elapsed: started.elapsed(),
            orientation: None,
            fermat: None,
            degenerate: false,
            detail: "the origin itself moves under the map".to_string(),
        });
    }
    let graph = build_graph_with(map, p, opts.graph_point_budget)?;
    let nilpotency = graph.nilpotency_index(&origin)?;
    let observed = graph.size() - graph.trapped_set(&origin)?.len() as u64;
    let holds = nilpotency.is_some();
    let witness = if holds { None } else { failure_witness(&graph, p) };
    let detail = match nilpotency {
        Some(n) => format!("every point reaches the origin; deepest needs {n} steps"),
        None => format!("{observed} points never reach the origin"),
    };
    Ok(TrapReport {
        map_name: map.display_name(),
        p,
        claim: Claim::OriginAttractor,
        holds,
        nilpotency_index: nilpotency,
        witness,
        predicted_untrapped: 0,
        observed_untrapped: observed,
        mode: VerifyMode::Exhaustive,
        elapsed: started.elapsed(),
        orientation: None,
        fermat: None,
        degenerate: false,
        detail,
    })
}

/// All claims relevant to one builtin at one prime, ratio first.
pub fn verify_builtin_with(
    builtin: BuiltinMap,
    p: u64,
    opts: &VerifyOptions,
) -> Result<Vec<TrapReport>> {
    let mut reports = vec![verify_ratio_recurrence_with(builtin, p, opts)?];
    match builtin {
        BuiltinMap::AdditiveTrap => reports.push(verify_additive_trap_with(p, opts)?),
        BuiltinMap::MultiplicativeTrap => {
            reports.push(verify_multiplicative_trap_with(p, opts)?)
        }
        BuiltinMap::PowerTrap => {
            if p != 2 {
                reports.push(verify_power_trap_with(p, opts)?);
            }
        }
    }
    Ok(reports)
}

/// Sweeps the full suite over `primes` (kept in input order; primes are
/// processed in parallel). A non-prime entry or an internal failure turns
/// into a [`SuiteEntry::Failure`] instead of aborting the sweep.
pub fn verify_all(primes: &[u64]) -> Vec<SuiteEntry> {
    verify_all_with(primes, &VerifyOptions::default())
}

pub fn verify_all_with(primes: &[u64], opts: &VerifyOptions) -> Vec<SuiteEntry> {
    let per_prime: Vec<Vec<SuiteEntry>> = primes
        .par_iter()
        .map(|&p| {
            let mut entries = Vec::new();
            for builtin in BuiltinMap::ALL {
                match verify_builtin_with(builtin, p, opts) {
                    Ok(reports) => entries.extend(reports.into_iter().map(SuiteEntry::Report)),
                    Err(e) => {
                        entries.push(SuiteEntry::Failure { p, error: e.to_string() });
                        return entries; // a bad prime fails once, not six times
                    }
                }
            }
            entries
        })
        .collect();
    per_prime.into_iter().flatten().collect()
}

/// Deterministic per-(seed, p, claim) RNG stream.
fn sample_rng(seed: u64, p: u64, claim: Claim, salt: u64) -> ChaCha8Rng {
    let tag = match claim {
        Claim::RatioRecurrence => 1u64,
        Claim::AdditiveTrap => 2,
        Claim::MultiplicativeTrap => 3,
        Claim::PowerTrap => 4,
        Claim::OriginAttractor => 5,
    };
    ChaCha8Rng::seed_from_u64(
        seed ^ p.rotate_left(24) ^ tag.rotate_left(48) ^ salt.rotate_left(56),
    )
}
