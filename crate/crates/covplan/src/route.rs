//! Joint candidate selection and visitation ordering.
//!
//! Given one candidate list per partition, the router minimizes the sum of
//! per-candidate local costs (length plus a turn penalty) and the straight
//! connector distances between consecutive exits and entries, over all
//! visitation permutations and candidate choices. The tour is open: there is
//! no return leg and no depot term.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dedup_consecutive, Point};
use crate::grid::CellRegion;
use crate::sweep::SweepCandidate;

/// Turn penalty in meters per turn vertex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub rho: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams { rho: 0.15 }
    }
}

/// Local cost of one candidate: length plus `rho` per turn.
pub fn local_cost(candidate: &SweepCandidate, params: &CostParams) -> f64 {
    candidate.length + params.rho * candidate.turns as f64
}

/// Straight-line connector cost between an exit and the next entry. The
/// vehicle may briefly leave the region, so obstacles are ignored.
pub fn connector_cost(exit: Point, entry: Point) -> f64 {
    exit.distance(entry)
}

/// A complete stitched coverage route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalPlan {
    /// Partition ids in visitation order.
    pub order: Vec<usize>,
    /// Chosen candidate index per partition id.
    pub choices: Vec<usize>,
    pub total_cost: f64,
    pub stitched: Vec<Point>,
    pub connectors: Vec<(Point, Point)>,
}

/// Default cap on the exact solver; beyond this the genetic router applies.
pub const DEFAULT_DP_LIMIT: usize = 15;

/// Counters from one exact-solver run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpStats {
    pub states: u64,
}

/// Concatenates chosen candidates in visitation order, joining consecutive
/// exit/entry pairs with straight connectors; duplicate consecutive points
/// are dropped.
pub fn stitch(ordered: &[&SweepCandidate]) -> Vec<Point> {
    stitch_with_connectors(ordered).0
}

pub fn stitch_with_connectors(ordered: &[&SweepCandidate]) -> (Vec<Point>, Vec<(Point, Point)>) {
    let mut waypoints = Vec::new();
    let mut connectors = Vec::new();
    for (i, cand) in ordered.iter().enumerate() {
        if i > 0 {
            let prev_exit = ordered[i - 1].exit;
            if prev_exit != cand.entry {
                connectors.push((prev_exit, cand.entry));
            }
        }
        waypoints.extend(cand.waypoints.iter().copied());
    }
    (dedup_consecutive(waypoints), connectors)
}

/// Recomputes a plan's objective from its components.
pub fn recompute_cost(plan: &GlobalPlan, candidates: &[Vec<SweepCandidate>], params: &CostParams) -> f64 {
    let mut total = 0.0;
    for (t, &pid) in plan.order.iter().enumerate() {
        let cand = &candidates[pid][plan.choices[pid]];
        total += local_cost(cand, params);
        if t > 0 {
            let prev = plan.order[t - 1];
            total += connector_cost(candidates[prev][plan.choices[prev]].exit, cand.entry);
        }
    }
    total
}

fn assemble_plan(order: Vec<usize>, choices: Vec<usize>, total_cost: f64, candidates: &[Vec<SweepCandidate>]) -> GlobalPlan {
    let ordered: Vec<&SweepCandidate> = order.iter().map(|&pid| &candidates[pid][choices[pid]]).collect();
    let (stitched, connectors) = stitch_with_connectors(&ordered);
    GlobalPlan {
        order,
        choices,
        total_cost,
        stitched,
        connectors,
    }
}

fn check_candidates(candidates: &[Vec<SweepCandidate>]) -> Result<()> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, list) in candidates.iter().enumerate() {
        if list.is_empty() {
            return Err(Error::NoCandidates(i));
        }
    }
    Ok(())
}

/// Exact minimizer of the joint objective over all permutations and
/// candidate choices.
///
/// The table holds suffix costs `F(S, i, j)`: the cheapest way to cover
/// subset `S` starting at partition `i` with candidate `j`. Building
/// suffixes instead of prefixes lets the tour be reconstructed front to
/// back, picking the smallest `(partition, candidate)` whenever costs tie,
/// so equal-cost optima resolve to the lexicographically smallest plan.
pub fn held_karp(candidates: &[Vec<SweepCandidate>], params: &CostParams, limit: usize) -> Result<GlobalPlan> {
    held_karp_with_stats(candidates, params, limit).map(|(plan, _)| plan)
}

pub fn held_karp_with_stats(
    candidates: &[Vec<SweepCandidate>],
    params: &CostParams,
    limit: usize,
) -> Result<(GlobalPlan, DpStats)> {
    check_candidates(candidates)?;
    let n = candidates.len();
    if n > limit {
        return Err(Error::SolverLimit { n, limit });
    }

    // Flat layout: state (S, i, j) lives at S * width + offset[i] + j.
    let offsets: Vec<usize> = candidates
        .iter()
        .scan(0usize, |acc, list| {
            let off = *acc;
            *acc += list.len();
            Some(off)
        })
        .collect();
    let width: usize = candidates.iter().map(Vec::len).sum();
    let local: Vec<f64> = candidates
        .iter()
        .flat_map(|list| list.iter().map(|c| local_cost(c, params)))
        .collect();
    let full: usize = (1usize << n) - 1;

    let mut cost = vec![f64::INFINITY; (full + 1) * width];
    let mut next = vec![u32::MAX; (full + 1) * width];
    let mut stats = DpStats::default();

    for i in 0..n {
        let mask = 1usize << i;
        for j in 0..candidates[i].len() {
            cost[mask * width + offsets[i] + j] = local[offsets[i] + j];
            stats.states += 1;
        }
    }

    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        for i in 0..n {
            if mask & (1 << i) == 0 {
                continue;
            }
            let rest = mask & !(1 << i);
            for j in 0..candidates[i].len() {
                let exit = candidates[i][j].exit;
                let mut best = f64::INFINITY;
                let mut best_next = u32::MAX;
                for k in 0..n {
                    if rest & (1 << k) == 0 {
                        continue;
                    }
                    for l in 0..candidates[k].len() {
                        let flat = offsets[k] + l;
                        let sub = cost[rest * width + flat];
                        let c = sub + connector_cost(exit, candidates[k][l].entry);
                        if c < best {
                            best = c;
                            best_next = flat as u32;
                        }
                    }
                }
                let flat = offsets[i] + j;
                cost[mask * width + flat] = local[flat] + best;
                next[mask * width + flat] = best_next;
                stats.states += 1;
            }
        }
    }

    // Smallest (partition, candidate) among optimal starts.
    let mut best = f64::INFINITY;
    let mut start = 0usize;
    for i in 0..n {
        for j in 0..candidates[i].len() {
            let flat = offsets[i] + j;
            let c = cost[full * width + flat];
            if c < best {
                best = c;
                start = flat;
            }
        }
    }

    let flat_to_pair = |flat: usize| -> (usize, usize) {
        let i = offsets.partition_point(|&o| o <= flat) - 1;
        (i, flat - offsets[i])
    };

    let mut order = Vec::with_capacity(n);
    let mut choices = vec![0usize; n];
    let mut mask = full;
    let mut flat = start;
    loop {
        let (i, j) = flat_to_pair(flat);
        order.push(i);
        choices[i] = j;
        let nxt = next[mask * width + flat];
        mask &= !(1 << i);
        if nxt == u32::MAX {
            break;
        }
        flat = nxt as usize;
    }
    debug_assert_eq!(order.len(), n);
    debug_assert_eq!(mask, 0);

    let plan = assemble_plan(order, choices, best, candidates);
    debug_assert!((recompute_cost(&plan, candidates, params) - plan.total_cost).abs() <= 1e-9 * plan.total_cost.max(1.0));
    Ok((plan, stats))
}

/// Deterministic greedy chaining over candidate sets: start at the candidate
/// with the lowest-leftmost entry, then repeatedly append the unvisited
/// partition minimizing connector-plus-local cost.
pub fn greedy_route(candidates: &[Vec<SweepCandidate>], params: &CostParams) -> Result<GlobalPlan> {
    check_candidates(candidates)?;
    let n = candidates.len();
    let mut order = Vec::with_capacity(n);
    let mut choices = vec![0usize; n];
    let mut visited = vec![false; n];

    let (mut cur_i, mut cur_j) = (0usize, 0usize);
    let mut best_key = (f64::INFINITY, f64::INFINITY, usize::MAX, usize::MAX);
    for (i, list) in candidates.iter().enumerate() {
        for (j, c) in list.iter().enumerate() {
            let key = (c.entry.y, c.entry.x, i, j);
            if key < best_key {
                best_key = key;
                cur_i = i;
                cur_j = j;
            }
        }
    }
    let mut total = local_cost(&candidates[cur_i][cur_j], params);
    order.push(cur_i);
    choices[cur_i] = cur_j;
    visited[cur_i] = true;

    for _ in 1..n {
        let exit = candidates[cur_i][cur_j].exit;
        let mut best = (f64::INFINITY, usize::MAX, usize::MAX);
        for (k, list) in candidates.iter().enumerate() {
            if visited[k] {
                continue;
            }
            for (l, c) in list.iter().enumerate() {
                let step = connector_cost(exit, c.entry) + local_cost(c, params);
                if (step, k, l) < best {
                    best = (step, k, l);
                }
            }
        }
        let (step, k, l) = best;
        total += step;
        order.push(k);
        choices[k] = l;
        visited[k] = true;
        cur_i = k;
        cur_j = l;
    }
    Ok(assemble_plan(order, choices, total, candidates))
}

/// Settings of the genetic router. The seed is part of the configuration:
/// identical settings reproduce identical plans.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub lambda_turns: f64,
    pub population: usize,
    pub generations: usize,
    pub elite_fraction: f64,
    pub tournament_size: usize,
    pub p_mut_order: f64,
    pub p_mut_choice: f64,
    pub seed: u64,
}

impl GaConfig {
    /// Reference settings used throughout the benchmark.
    pub fn benchmark_defaults(seed: u64) -> Self {
        GaConfig {
            lambda_turns: 0.15,
            population: 450,
            generations: 350,
            elite_fraction: 0.05,
            tournament_size: 4,
            p_mut_order: 0.30,
            p_mut_choice: 0.40,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64, name: &str| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0,1], got {p}")));
            }
            Ok(())
        };
        prob(self.elite_fraction, "elite_fraction")?;
        prob(self.p_mut_order, "p_mut_order")?;
        prob(self.p_mut_choice, "p_mut_choice")?;
        if self.population == 0 || self.generations == 0 {
            return Err(Error::InvalidConfig(
                "population and generations must be at least 1".into(),
            ));
        }
        if self.tournament_size == 0 {
            return Err(Error::InvalidConfig("tournament_size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Individual {
    perm: Vec<usize>,
    choice: Vec<usize>,
    fitness: f64,
}

/// Genetic router over (permutation, candidate-choice) chromosomes.
/// Mutation-only evolution with elitism and tournament selection; the
/// fitness is the same open-tour objective the exact solver minimizes, with
/// `lambda_turns` as the turn penalty. The deterministic greedy plan seeds
/// the initial population, so the result never falls behind it.
pub fn ga_route(candidates: &[Vec<SweepCandidate>], config: &GaConfig) -> Result<GlobalPlan> {
    check_candidates(candidates)?;
    config.validate()?;
    let n = candidates.len();
    let params = CostParams {
        rho: config.lambda_turns,
    };

    let evaluate = |perm: &[usize], choice: &[usize]| -> f64 {
        let mut total = 0.0;
        for (t, &pid) in perm.iter().enumerate() {
            let cand = &candidates[pid][choice[pid]];
            total += local_cost(cand, &params);
            if t > 0 {
                let prev = perm[t - 1];
                total += connector_cost(candidates[prev][choice[prev]].exit, cand.entry);
            }
        }
        total
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population: Vec<Individual> = Vec::with_capacity(config.population);

    let seed_plan = greedy_route(candidates, &params)?;
    population.push(Individual {
        fitness: evaluate(&seed_plan.order, &seed_plan.choices),
        perm: seed_plan.order,
        choice: seed_plan.choices,
    });
    while population.len() < config.population {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let choice: Vec<usize> = (0..n).map(|i| rng.gen_range(0..candidates[i].len())).collect();
        let fitness = evaluate(&perm, &choice);
        population.push(Individual { perm, choice, fitness });
    }

    let sort_pop = |pop: &mut Vec<Individual>| {
        pop.sort_by(|a, b| {
            a.fitness
                .total_cmp(&b.fitness)
                .then_with(|| a.perm.cmp(&b.perm))
                .then_with(|| a.choice.cmp(&b.choice))
        });
    };
    sort_pop(&mut population);

    let elites = ((config.elite_fraction * config.population as f64).round() as usize)
        .clamp(1, config.population);

    for _ in 0..config.generations {
        let mut next: Vec<Individual> = population[..elites].to_vec();
        while next.len() < config.population {
            let mut winner = rng.gen_range(0..population.len());
            for _ in 1..config.tournament_size {
                let challenger = rng.gen_range(0..population.len());
                if challenger < winner {
                    // Population is sorted by fitness, so the lower index wins.
                    winner = challenger;
                }
            }
            let mut child = population[winner].clone();
            // Mutation rates are per gene: each tour position may swap with
            // a random partner, each partition may resample its candidate.
            // A child that drew no mutation gets one forced, since an
            // unmutated clone adds nothing to a mutation-only population.
            let swap_at = |child: &mut Individual, a: usize, rng: &mut ChaCha8Rng| {
                let b = (a + rng.gen_range(1..n)) % n;
                child.perm.swap(a, b);
            };
            let resample_at = |child: &mut Individual, pid: usize, rng: &mut ChaCha8Rng| {
                let m = candidates[pid].len();
                if m >= 2 {
                    let shift = rng.gen_range(1..m);
                    child.choice[pid] = (child.choice[pid] + shift) % m;
                }
            };
            let mut mutated = false;
            if n >= 2 {
                for a in 0..n {
                    if rng.gen::<f64>() < config.p_mut_order {
                        swap_at(&mut child, a, &mut rng);
                        mutated = true;
                    }
                }
            }
            for pid in 0..n {
                if rng.gen::<f64>() < config.p_mut_choice {
                    resample_at(&mut child, pid, &mut rng);
                    mutated = true;
                }
            }
            if !mutated {
                if n >= 2 && rng.gen::<f64>() < 0.5 {
                    let a = rng.gen_range(0..n);
                    swap_at(&mut child, a, &mut rng);
                } else {
                    let pid = rng.gen_range(0..n);
                    resample_at(&mut child, pid, &mut rng);
                }
            }
            child.fitness = evaluate(&child.perm, &child.choice);
            next.push(child);
        }
        population = next;
        sort_pop(&mut population);
    }

    let best = &population[0];
    Ok(assemble_plan(
        best.perm.clone(),
        best.choice.clone(),
        best.fitness,
        candidates,
    ))
}

/// Decomposition-free baseline: one horizontal track per occupied row run of
/// the whole region, greedily chained from the lowest-leftmost endpoint to
/// the nearest endpoint of any unvisited track.
pub fn nn_baseline(region: &CellRegion, params: &CostParams) -> Result<GlobalPlan> {
    if region.is_empty() {
        return Err(Error::EmptyInput);
    }
    let _ = params; // straight tracks carry no turn penalty
    let grid = region.grid();
    let mut segments: Vec<(Point, Point)> = Vec::new();
    for (row, cols) in region.rows_map() {
        let y = (grid.y_line(row) + grid.y_line(row + 1)) / 2.0;
        for (a, b) in CellRegion::runs(&cols) {
            segments.push((
                Point::new(grid.x_line(a), y),
                Point::new(grid.x_line(b + 1), y),
            ));
        }
    }

    let n = segments.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut choices = vec![0usize; n];
    let mut connectors = Vec::new();
    let mut waypoints: Vec<Point> = Vec::new();
    let mut total = 0.0;

    // Globally lowest-leftmost endpoint starts the chain.
    let mut current = (0usize, 0usize);
    let mut best_key = (f64::INFINITY, f64::INFINITY);
    for (i, &(a, b)) in segments.iter().enumerate() {
        for (side, p) in [(0usize, a), (1usize, b)] {
            if (p.y, p.x) < best_key {
                best_key = (p.y, p.x);
                current = (i, side);
            }
        }
    }

    let mut position: Option<Point> = None;
    loop {
        let (idx, side) = current;
        let (a, b) = segments[idx];
        let (enter, exit) = if side == 0 { (a, b) } else { (b, a) };
        if let Some(pos) = position {
            let jump = connector_cost(pos, enter);
            if jump > 0.0 {
                connectors.push((pos, enter));
            }
            total += jump;
        }
        waypoints.push(enter);
        waypoints.push(exit);
        total += enter.distance(exit);
        visited[idx] = true;
        order.push(idx);
        choices[idx] = side;
        position = Some(exit);

        // Nearest unvisited endpoint; ties by (y, x), then segment index.
        let pos = exit;
        let mut best: Option<((f64, f64, f64, usize, usize), (usize, usize))> = None;
        for (i, &(a, b)) in segments.iter().enumerate() {
            if visited[i] {
                continue;
            }
            for (s, p) in [(0usize, a), (1usize, b)] {
                let key = (pos.distance(p), p.y, p.x, i, s);
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, (i, s)));
                }
            }
        }
        match best {
            Some((_, nxt)) => current = nxt,
            None => break,
        }
    }

    Ok(GlobalPlan {
        order,
        choices,
        total_cost: total,
        stitched: dedup_consecutive(waypoints),
        connectors,
    })
}
