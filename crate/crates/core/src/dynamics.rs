//! Orbits and full functional graphs of a polynomial map on F_p^n.
//!
//! Points are identified with indices in `[0, p^n)` — first coordinate most
//! significant — so a graph is just a successor array. On top of that we
//! peel leaves to find the cycle nodes, walk each cycle starting from its
//! smallest index, and run one reverse BFS from all cycles at once to label
//! every point with its distance to the cycle (`tail_depth`) and the cycle
//! it feeds (`basin_id`). Everything downstream — nilpotency indices,
//! trapped sets, cycle spectra — is a lookup into those tables.

use std::collections::VecDeque;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modfield::{check_prime, mod_pow, mul_mod, ExtElement, ExtField};
use crate::poly::{Point, PolyMap};

/// Largest graph built by default: 2^28 points (~6 GB transient memory).
/// Raise explicitly via [`build_graph_with`] at your own risk; the hard
/// ceiling is `u32::MAX` because successors are stored as u32.
pub const DEFAULT_GRAPH_POINT_BUDGET: u64 = 1 << 28;

/// Extension-field point enumeration cap (q^n).
pub const DEFAULT_EXT_POINT_BUDGET: u64 = 1 << 20;

const CHUNK: usize = 1 << 14;

/// Index of a point in row-major order: `(c1, .., cn) -> ((c1*p + c2)*p + ..)`.
pub fn point_index(point: &Point) -> u64 {
    let p = point.modulus();
    point.coords().iter().fold(0u64, |acc, &c| acc * p + c)
}

/// Inverse of [`point_index`] for the space F_p^n.
pub fn point_of_index(index: u64, p: u64, n: usize) -> Result<Point> {
    let size = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if (index as u128) >= size {
        return Err(Error::IndexOutOfRange {
            index,
            size: size.min(u64::MAX as u128) as u64,
        });
    }
    let mut coords = vec![0u64; n];
    let mut v = index;
    for c in coords.iter_mut().rev() {
        *c = v % p;
        v /= p;
    }
    Ok(Point::new(coords, p))
}

/// A map with coefficients pre-reduced mod p; the evaluation hot path.
struct ReducedMap {
    p: u64,
    n: usize,
    comps: Vec<Vec<(u64, Vec<u32>)>>,
}

impl ReducedMap {
    fn new(map: &PolyMap, p: u64) -> Self {
        let comps = map
            .components()
            .iter()
            .map(|c| {
                c.terms()
                    .iter()
                    .filter_map(|t| {
                        let coeff = t.coefficient.rem_euclid(p as i64) as u64;
                        (coeff != 0).then(|| (coeff, t.exponents.clone()))
                    })
                    .collect()
            })
            .collect();
        Self { p, n: map.num_vars(), comps }
    }

    fn eval(&self, coords: &[u64], out: &mut [u64]) {
        for (o, terms) in out.iter_mut().zip(&self.comps) {
            let mut acc = 0u64;
            for (coeff, exps) in terms {
                let mut v = *coeff;
                for (&c, &e) in coords.iter().zip(exps) {
                    if v == 0 {
                        break;
                    }
                    v = mul_mod(v, mod_pow(c, e as u64, self.p), self.p);
                }
                acc = (acc + v) % self.p;
            }
            *o = acc;
        }
    }

    fn decode(&self, index: u64, coords: &mut [u64]) {
        let mut v = index;
        for c in coords.iter_mut().rev() {
            *c = v % self.p;
            v /= self.p;
        }
    }

    fn encode(&self, coords: &[u64]) -> u64 {
        coords.iter().fold(0u64, |acc, &c| acc * self.p + c)
    }

    fn step(&self, index: u64, cin: &mut [u64], cout: &mut [u64]) -> u64 {
        self.decode(index, cin);
        self.eval(cin, cout);
        self.encode(cout)
    }
}

/// `map^k(point)` by k straight applications.
pub fn iterate_k(map: &PolyMap, point: &Point, k: u64) -> Result<Point> {
    if point.dim() != map.num_vars() {
        return Err(Error::DimensionMismatch { expected: map.num_vars(), got: point.dim() });
    }
    let rm = ReducedMap::new(map, point.modulus());
    let mut cur: Vec<u64> = point.coords().to_vec();
    let mut next = vec![0u64; rm.n];
    for _ in 0..k {
        rm.eval(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(Point::new(cur, point.modulus()))
}

/// Walks at most `steps` applications; `Some(s)` if the origin shows up at
/// step s (0 when the start already is the origin).
pub fn reaches_origin_within(map: &PolyMap, start: &Point, steps: u64) -> Result<Option<u64>> {
    if start.dim() != map.num_vars() {
        return Err(Error::DimensionMismatch { expected: map.num_vars(), got: start.dim() });
    }
    let rm = ReducedMap::new(map, start.modulus());
    let mut cur: Vec<u64> = start.coords().to_vec();
    let mut next = vec![0u64; rm.n];
    for s in 0..=steps {
        if cur.iter().all(|&c| c == 0) {
            return Ok(Some(s));
        }
        if s == steps {
            break;
        }
        rm.eval(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(None)
}

/// Tail and cycle structure of one forward orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSummary {
    pub start: Point,
    /// Steps before the orbit enters its cycle.
    pub tail_length: u64,
    /// Length of the cycle the orbit falls into.
    pub cycle_length: u64,
    /// Step at which the orbit first sits at the origin, if ever.
    pub steps_to_origin: Option<u64>,
}

impl OrbitSummary {
    pub fn hits_origin(&self) -> bool {
        self.steps_to_origin.is_some()
    }
}

/// Brent cycle detection from `start` in O(1) memory.
///
/// `max_steps` bounds the orbit length: the call fails with
/// [`Error::BudgetExceeded`] iff tail + cycle would exceed it. Internally up
/// to roughly five times that many map applications are spent (detection,
/// tail location, origin scan).
pub fn orbit(map: &PolyMap, start: &Point, max_steps: u64) -> Result<OrbitSummary> {
    check_prime(start.modulus())?;
    if start.dim() != map.num_vars() {
        return Err(Error::DimensionMismatch { expected: map.num_vars(), got: start.dim() });
    }
    if max_steps == 0 {
        return Err(Error::BudgetExceeded(0));
    }
    let rm = ReducedMap::new(map, start.modulus());
    let mut cin = vec![0u64; rm.n];
    let mut cout = vec![0u64; rm.n];
    let mut step = |i: u64| rm.step(i, &mut cin, &mut cout);
    let start_index = point_index(start);

    // Phase 1: cycle length. Brent needs at most ~2(tail+cycle) steps, so
    // the 2*max_steps cap cannot fire on orbits within budget.
    let cap = max_steps.saturating_mul(2).saturating_add(4);
    let mut apps: u64 = 0;
    let mut power: u64 = 1;
    let mut lam: u64 = 1;
    let mut tortoise = start_index;
    let mut hare = step(start_index);
    apps += 1;
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power = power.saturating_mul(2);
            lam = 0;
        }
        hare = step(hare);
        lam += 1;
        apps += 1;
        if apps > cap {
            return Err(Error::BudgetExceeded(max_steps));
        }
    }

    // Phase 2: tail length, two aligned pointers.
    let mut mu: u64 = 0;
    let mut tortoise = start_index;
    let mut hare = start_index;
    for _ in 0..lam {
        hare = step(hare);
    }
    while tortoise != hare {
        tortoise = step(tortoise);
        hare = step(hare);
        mu += 1;
    }

    if mu.saturating_add(lam) > max_steps {
        return Err(Error::BudgetExceeded(max_steps));
    }

    // The whole orbit is the first mu + lam states; scan them for the origin.
    let mut steps_to_origin = None;
    let mut cur = start_index;
    for s in 0..=(mu + lam) {
        if cur == 0 {
            steps_to_origin = Some(s);
            break;
        }
        cur = step(cur);
    }

    Ok(OrbitSummary {
        start: start.clone(),
        tail_length: mu,
        cycle_length: lam,
        steps_to_origin,
    })
}

/// The complete functional graph of a map on F_p^n.
#[derive(Debug, Clone)]
pub struct FunctionalGraph {
    p: u64,
    n: usize,
    size: u64,
    successor: Vec<u32>,
    /// Each cycle listed starting from its smallest point index; cycles
    /// ordered by that smallest index.
    cycles: Vec<Vec<u32>>,
    /// Distance to the orbit's cycle; 0 exactly on cycle nodes.
    tail_depth: Vec<u32>,
    /// Index into `cycles` of the cycle this point eventually feeds.
    basin_id: Vec<u32>,
}

/// [`build_graph_with`] under [`DEFAULT_GRAPH_POINT_BUDGET`].
pub fn build_graph(map: &PolyMap, p: u64) -> Result<FunctionalGraph> {
    build_graph_with(map, p, DEFAULT_GRAPH_POINT_BUDGET)
}

/// Enumerates all p^n points in parallel and labels the graph structure.
pub fn build_graph_with(map: &PolyMap, p: u64, point_budget: u64) -> Result<FunctionalGraph> {
    check_prime(p)?;
    let n = map.num_vars();
    let size128 = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let budget = point_budget.min(u32::MAX as u64) as u128;
    if size128 > budget {
        return Err(Error::SizeBoundExceeded { size: size128, bound: budget });
    }
    let size = size128 as u64;
    let rm = ReducedMap::new(map, p);

    let mut successor = vec![0u32; size as usize];
    successor
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let mut cin = vec![0u64; n];
            let mut cout = vec![0u64; n];
            let base = (ci * CHUNK) as u64;
            for (j, slot) in chunk.iter_mut().enumerate() {
                *slot = rm.step(base + j as u64, &mut cin, &mut cout) as u32;
            }
        });

    let (_, cycles) = peel_cycles(&successor);

    // Reverse adjacency in CSR form for the multi-source BFS.
    let usize_size = size as usize;
    let mut rev_start = vec![0u32; usize_size + 1];
    for &s in &successor {
        rev_start[s as usize + 1] += 1;
    }
    for i in 0..usize_size {
        rev_start[i + 1] += rev_start[i];
    }
    let mut cursor: Vec<u32> = rev_start[..usize_size].to_vec();
    let mut rev_list = vec![0u32; usize_size];
    for (i, &s) in successor.iter().enumerate() {
        rev_list[cursor[s as usize] as usize] = i as u32;
        cursor[s as usize] += 1;
    }
    drop(cursor);

    let mut tail_depth = vec![0u32; usize_size];
    let mut basin_id = vec![u32::MAX; usize_size];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for (cid, cycle) in cycles.iter().enumerate() {
        for &node in cycle {
            basin_id[node as usize] = cid as u32;
            queue.push_back(node);
        }
    }
    while let Some(u) = queue.pop_front() {
        let lo = rev_start[u as usize] as usize;
        let hi = rev_start[u as usize + 1] as usize;
        for &v in &rev_list[lo..hi] {
            if basin_id[v as usize] == u32::MAX {
                basin_id[v as usize] = basin_id[u as usize];
                tail_depth[v as usize] = tail_depth[u as usize] + 1;
                queue.push_back(v);
            }
        }
    }
    debug_assert!(basin_id.iter().all(|&b| b != u32::MAX));

    Ok(FunctionalGraph { p, n, size, successor, cycles, tail_depth, basin_id })
}

/// Kahn-style leaf peeling; returns the on-cycle mask and the cycles,
/// each starting at its smallest index, ordered by that index.
fn peel_cycles(successor: &[u32]) -> (Vec<bool>, Vec<Vec<u32>>) {
    let size = successor.len();
    let mut indeg = vec![0u32; size];
    for &s in successor {
        indeg[s as usize] += 1;
    }
    let mut stack: Vec<u32> = (0..size as u32).filter(|&i| indeg[i as usize] == 0).collect();
    while let Some(v) = stack.pop() {
        let s = successor[v as usize];
        indeg[s as usize] -= 1;
        if indeg[s as usize] == 0 {
            stack.push(s);
        }
    }
    let on_cycle: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
    let mut cycles = Vec::new();
    let mut visited = vec![false; size];
    for i in 0..size {
        if !on_cycle[i] || visited[i] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = i as u32;
        loop {
            visited[cur as usize] = true;
            cycle.push(cur);
            cur = successor[cur as usize];
            if cur as usize == i {
                break;
            }
        }
        cycles.push(cycle);
    }
    (on_cycle, cycles)
}

/// Shape summary suitable for serialization.
#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub p: u64,
    pub n: usize,
    pub size: u64,
    pub num_cycles: usize,
    /// Cycle lengths, ascending.
    pub cycle_spectrum: Vec<u64>,
    pub max_tail_depth: u64,
    /// Points feeding each cycle (cycle nodes included), by cycle id.
    pub basin_sizes: Vec<u64>,
}

impl FunctionalGraph {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn successor(&self) -> &[u32] {
        &self.successor
    }

    pub fn cycles(&self) -> &[Vec<u32>] {
        &self.cycles
    }

    pub fn tail_depth(&self) -> &[u32] {
        &self.tail_depth
    }

    pub fn basin_id(&self) -> &[u32] {
        &self.basin_id
    }

    pub fn point_at(&self, index: u64) -> Result<Point> {
        point_of_index(index, self.p, self.n)
    }

    pub fn index_of(&self, point: &Point) -> Result<u64> {
        if point.dim() != self.n || point.modulus() != self.p {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.dim() });
        }
        Ok(point_index(point))
    }

    /// Multiset of cycle lengths, ascending.
    pub fn cycle_spectrum(&self) -> Vec<u64> {
        let mut spectrum: Vec<u64> = self.cycles.iter().map(|c| c.len() as u64).collect();
        spectrum.sort_unstable();
        spectrum
    }

    pub fn max_tail_depth(&self) -> u64 {
        self.tail_depth.iter().copied().max().unwrap_or(0) as u64
    }

    /// Least N with `map^N == const target` — `Some` iff the single cycle
    /// of the graph is the fixed point `target`, in which case N is the
    /// deepest tail. Errors if `target` moves.
    pub fn nilpotency_index(&self, target: &Point) -> Result<Option<u64>> {
        let ti = self.index_of(target)?;
        if self.successor[ti as usize] != ti as u32 {
            return Err(Error::TargetNotFixed);
        }
        let single = self.cycles.len() == 1 && self.cycles[0] == vec![ti as u32];
        Ok(single.then(|| self.max_tail_depth()))
    }

    /// Indices (ascending) of all points whose orbit ends at the fixed
    /// point `target`.
    pub fn trapped_set(&self, target: &Point) -> Result<Vec<u64>> {
        let ti = self.index_of(target)?;
        if self.successor[ti as usize] != ti as u32 {
            return Err(Error::TargetNotFixed);
        }
        let tb = self.basin_id[ti as usize];
        Ok((0..self.size)
            .filter(|&i| self.basin_id[i as usize] == tb)
            .collect())
    }

    pub fn summary(&self) -> GraphSummary {
        let mut basin_sizes = vec![0u64; self.cycles.len()];
        for &b in &self.basin_id {
            basin_sizes[b as usize] += 1;
        }
        GraphSummary {
            p: self.p,
            n: self.n,
            size: self.size,
            num_cycles: self.cycles.len(),
            cycle_spectrum: self.cycle_spectrum(),
            max_tail_depth: self.max_tail_depth(),
            basin_sizes,
        }
    }

    /// One `x1,..,xn -> y1,..,yn` line per point, ascending by index.
    pub fn write_edges<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let mut cur = vec![0u64; self.n];
        let mut next = vec![0u64; self.n];
        for i in 0..self.size {
            decode_coords(i, self.p, &mut cur);
            decode_coords(self.successor[i as usize] as u64, self.p, &mut next);
            writeln!(w, "{} -> {}", join_coords(&cur), join_coords(&next))?;
        }
        Ok(())
    }
}

fn decode_coords(index: u64, p: u64, coords: &mut [u64]) {
    let mut v = index;
    for c in coords.iter_mut().rev() {
        *c = v % p;
        v /= p;
    }
}

fn join_coords(coords: &[u64]) -> String {
    coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// All periodic points of the map over an extension field, with their
/// periods, ascending by point index ([`ExtField::value`] per coordinate,
/// first coordinate most significant).
pub fn periodic_points_ext(
    map: &PolyMap,
    field: &ExtField,
) -> Result<Vec<(Vec<ExtElement>, u64)>> {
    periodic_points_ext_with(map, field, DEFAULT_EXT_POINT_BUDGET)
}

/// [`periodic_points_ext`] with an explicit q^n bound.
pub fn periodic_points_ext_with(
    map: &PolyMap,
    field: &ExtField,
    point_budget: u64,
) -> Result<Vec<(Vec<ExtElement>, u64)>> {
    let n = map.num_vars();
    let q = field.size();
    let size128 = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let budget = point_budget.min(u32::MAX as u64) as u128;
    if size128 > budget {
        return Err(Error::SizeBoundExceeded { size: size128, bound: budget });
    }
    let size = size128 as u64;

    let decode = |index: u64| -> Result<Vec<ExtElement>> {
        let mut v = index;
        let mut out = vec![field.zero(); n];
        for slot in out.iter_mut().rev() {
            *slot = field.from_value(v % q)?;
            v /= q;
        }
        Ok(out)
    };

    let mut successor = vec![0u32; size as usize];
    for i in 0..size {
        let point = decode(i)?;
        let mut image_index = 0u64;
        for comp in map.components() {
            let out = field.eval_poly(comp, &point)?;
            image_index = image_index * q + field.value(&out)?;
        }
        successor[i as usize] = image_index as u32;
    }

    let (_, cycles) = peel_cycles(&successor);
    let mut result = Vec::new();
    for cycle in &cycles {
        let period = cycle.len() as u64;
        for &node in cycle {
            result.push((node, period));
        }
    }
    result.sort_unstable_by_key(|&(node, _)| node);
    result
        .into_iter()
        .map(|(node, period)| Ok((decode(node as u64)?, period)))
        .collect()
}
