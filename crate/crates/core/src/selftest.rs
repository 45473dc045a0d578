//! Randomized cross-checks of every enumeration path against the oracle.
//!
//! Used by the `selftest` CLI command and the test suite. Instances are
//! sampled small enough for the exhaustive oracle, then every path to the
//! result — the sequential stream, pools of several widths, the modulo skip
//! in both modes — must reproduce the oracle's set exactly, while the
//! per-state invariants of the stream hold at every step along the way.

use std::cmp::Ordering;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::consumers::Collector;
use crate::lexstream::{
    lex_compare, modulo_skip_step, Instance, ModuloMode, StreamConfig, WorkerState,
};
use crate::oracle::{brute_force, OracleResult};
use crate::partition::{
    apply_split, run_pool, run_sequential, split_work, BarrierStage, PoolConfig, PoolMonitor,
    SlotView, WorkPool,
};

/// Shape of a selftest run.
#[derive(Debug, Clone)]
pub struct SelftestConfig {
    /// Random instances to sample (fixed edge cases always run in addition).
    pub instances: usize,
    /// RNG seed; equal seeds reproduce the exact same instances.
    pub seed: u64,
    /// Largest sampled dimension.
    pub max_dimension: usize,
    /// Largest sampled generator.
    pub max_generator: u64,
    /// Largest sampled element.
    pub max_element: u64,
    /// Pool widths every instance is run at.
    pub worker_counts: Vec<usize>,
    /// Oracle work ceiling; sampled instances exceeding it are redrawn.
    pub oracle_node_limit: u64,
}

impl Default for SelftestConfig {
    fn default() -> SelftestConfig {
        SelftestConfig {
            instances: 100,
            seed: 42,
            max_dimension: 5,
            max_generator: 50,
            max_element: 2000,
            worker_counts: vec![1, 4, 16],
            oracle_node_limit: 100_000,
        }
    }
}

/// One failed check, with enough context to reproduce it.
#[derive(Debug, Clone)]
pub struct Failure {
    pub element: u64,
    pub generators: Vec<u64>,
    pub detail: String,
}

/// Outcome of a selftest run.
#[derive(Debug, Clone)]
pub struct Report {
    /// Instances checked: fixed edge cases plus random samples.
    pub instances: usize,
    /// Pool widths exercised.
    pub worker_counts: Vec<usize>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples an instance whose oracle search fits the work ceiling, returning
/// it with its ground-truth result set.
pub fn sample_instance<R: Rng>(rng: &mut R, config: &SelftestConfig) -> (Instance, OracleResult) {
    loop {
        let dimension = rng.gen_range(1..=config.max_dimension);
        let generators: Vec<u64> = (0..dimension)
            .map(|_| rng.gen_range(1..=config.max_generator))
            .collect();
        let element = rng.gen_range(0..=config.max_element);
        let instance = Instance::new(element, generators).expect("sampled instances are valid");
        if let Ok(oracle) = brute_force(&instance, config.oracle_node_limit) {
            return (instance, oracle);
        }
    }
}

fn sorted_set(mut items: Vec<Vec<u64>>) -> Result<Vec<Vec<u64>>, String> {
    items.sort_unstable_by(|a, b| b.cmp(a));
    for pair in items.windows(2) {
        if pair[0] == pair[1] {
            return Err(format!("duplicate factorization {:?}", pair[0]));
        }
    }
    Ok(items)
}

fn oracle_sorted(oracle: &OracleResult) -> Vec<Vec<u64>> {
    let mut items: Vec<Vec<u64>> = oracle.factorizations().iter().cloned().collect();
    items.sort_unstable_by(|a, b| b.cmp(a));
    items
}

/// Sequential and pooled runs must reproduce the oracle set exactly — no
/// misses, no duplicates — at every requested pool width.
pub fn check_matches_oracle(
    instance: &Instance,
    oracle: &OracleResult,
    worker_counts: &[usize],
    stream: &StreamConfig,
) -> Result<(), String> {
    let expected = oracle_sorted(oracle);
    let sequential = run_sequential(instance, stream, Collector::new(true)).expect("in-memory run");
    let sequential = sorted_set(sequential).map_err(|e| format!("sequential: {e}"))?;
    if sequential != expected {
        return Err(format!(
            "sequential found {} factorizations, oracle found {}",
            sequential.len(),
            expected.len()
        ));
    }
    for &workers in worker_counts {
        let config = PoolConfig {
            workers,
            stream: *stream,
            ..PoolConfig::default()
        };
        let pooled = run_pool(instance, config, Collector::new(true)).expect("in-memory run");
        let pooled = sorted_set(pooled).map_err(|e| format!("pool W={workers}: {e}"))?;
        if pooled != expected {
            return Err(format!(
                "pool W={workers} found {} factorizations, oracle found {}",
                pooled.len(),
                expected.len()
            ));
        }
    }
    Ok(())
}

/// Walks a zero-bound stream collecting every candidate visited.
pub fn candidate_walk(instance: &Instance, stream: &StreamConfig) -> Vec<Vec<u64>> {
    let mut state = WorkerState::first(instance, vec![0; instance.dimension()]);
    let mut candidates = Vec::new();
    if !state.end_of_stream() {
        candidates.push(state.previous_candidate().to_vec());
    }
    while !state.end_of_stream() {
        state.next_candidate(instance, stream);
        if !state.end_of_stream() {
            candidates.push(state.previous_candidate().to_vec());
        }
    }
    candidates
}

/// The modulo skip must change only the number of candidates visited: the
/// emitted set is identical in both modes, and every skip-produced candidate
/// is itself a factorization (the point of skipping).
pub fn check_modulo_modes(instance: &Instance, oracle: &OracleResult) -> Result<(), String> {
    let on = StreamConfig {
        modulo: ModuloMode::On,
    };
    let off = StreamConfig {
        modulo: ModuloMode::Off,
    };
    for stream in [on, off] {
        check_matches_oracle(instance, oracle, &[], &stream)
            .map_err(|e| format!("modulo {:?}: {e}", stream.modulo))?;
    }
    let dimension = instance.dimension();
    if dimension < 2 {
        return Ok(());
    }
    let on_candidates = candidate_walk(instance, &on);
    let off_candidates = candidate_walk(instance, &off);
    if on_candidates.len() > off_candidates.len() {
        return Err(format!(
            "skip visited more candidates ({}) than single-stepping ({})",
            on_candidates.len(),
            off_candidates.len()
        ));
    }
    // A step that moved the penultimate coordinate by more than one was a
    // skip; skips land exactly on factorizations.
    for pair in on_candidates.windows(2) {
        let pivot = (0..dimension)
            .find(|&i| pair[0][i] != pair[1][i])
            .expect("consecutive candidates differ");
        if pivot == dimension - 2 && pair[0][pivot] - pair[1][pivot] > 1 {
            let skipped_to = &pair[1];
            if instance.phi(skipped_to) != instance.element() {
                return Err(format!(
                    "skip landed on non-factorization {skipped_to:?} from {:?}",
                    pair[0]
                ));
            }
            let width = modulo_skip_step(instance);
            if pair[0][pivot] - pair[1][pivot] != width {
                return Err(format!(
                    "skip moved the penultimate coordinate by {} instead of {width}",
                    pair[0][pivot] - pair[1][pivot]
                ));
            }
        }
    }
    Ok(())
}

/// Per-state invariants along a full zero-bound walk.
///
/// At every state: validity flags match recomputation; the candidate's value
/// overshoots the element by less than the rightmost nonzero coordinate's
/// generator; no coordinate exceeds its greedy ceiling; candidates descend
/// strictly; the walk is a pure function of the state record; the deficit
/// fed to the solver is strictly positive; and the total number of
/// candidates respects the coordinate-range product bound.
pub fn check_stream_invariants(instance: &Instance, stream: &StreamConfig) -> Result<(), String> {
    let element = instance.element();
    let generators = instance.generators();
    let dimension = instance.dimension();
    let enabled = stream.modulo_enabled(dimension);

    let state_invariants = |state: &WorkerState| -> Result<(), String> {
        let candidate = state.previous_candidate();
        let value = instance.phi(candidate);
        if state.was_valid() != (value == element) {
            return Err(format!(
                "stale validity flag at {candidate:?}: flag {} value {value}",
                state.was_valid()
            ));
        }
        if value < element {
            return Err(format!(
                "candidate {candidate:?} undershoots: {value} < {element}"
            ));
        }
        match (0..dimension).rev().find(|&i| candidate[i] > 0) {
            Some(rightmost) => {
                let overshoot = value - element;
                if overshoot >= generators[rightmost] {
                    return Err(format!(
                        "candidate {candidate:?} overshoots by {overshoot}, \
                         not less than g[{rightmost}] = {}",
                        generators[rightmost]
                    ));
                }
            }
            None => {
                if element != 0 {
                    return Err(format!("zero candidate on element {element}"));
                }
            }
        }
        for (position, (&coordinate, &generator)) in candidate.iter().zip(generators).enumerate() {
            if coordinate > element.div_ceil(generator) {
                return Err(format!(
                    "coordinate {position} of {candidate:?} exceeds its greedy ceiling"
                ));
            }
        }
        Ok(())
    };

    let mut state = WorkerState::first(instance, vec![0; dimension]);
    let mut steps: u128 = 0;
    // Every coordinate stays within its greedy ceiling and candidates
    // strictly descend, so the walk can never outlast the coordinate-range
    // product.
    let ceiling: u128 = generators
        .iter()
        .map(|&g| u128::from(element.div_ceil(g)) + 1)
        .fold(1u128, |acc, r| acc.saturating_mul(r));

    while !state.end_of_stream() {
        state_invariants(&state)?;
        let candidate = state.previous_candidate();
        // Predict the solver's deficit for the step about to happen and
        // require it strictly positive: the defensive floor in the solver
        // must be unreachable from stream states.
        let pivot = (0..dimension - 1).rev().find(|&i| candidate[i] > 0);
        if let Some(pivot) = pivot {
            let step = if enabled && state.was_valid() && pivot == dimension - 2 {
                let width = modulo_skip_step(instance);
                if candidate[pivot] >= width {
                    width
                } else {
                    1
                }
            } else {
                1
            };
            let value_after = instance.phi(candidate)
                - candidate[dimension - 1] * generators[dimension - 1]
                - step * generators[pivot];
            if value_after >= element {
                return Err(format!(
                    "solver deficit not positive stepping from {candidate:?}"
                ));
            }
        }
        let before = state.previous_candidate().to_vec();
        let mut replay = state.clone();
        state.next_candidate(instance, stream);
        replay.next_candidate(instance, stream);
        if state != replay {
            return Err(format!("stepping from {before:?} is not reproducible"));
        }
        steps += 1;
        if steps > ceiling {
            return Err(format!("walk exceeded the {ceiling}-candidate range bound"));
        }
        if !state.end_of_stream()
            && lex_compare(state.previous_candidate(), &before) != Ordering::Less
        {
            return Err(format!(
                "candidate {:?} does not descend from {before:?}",
                state.previous_candidate()
            ));
        }
    }
    // Ended streams must ignore further stepping.
    let frozen = state.clone();
    state.next_candidate(instance, stream);
    if state != frozen {
        return Err("an ended stream changed when stepped".to_string());
    }
    Ok(())
}

/// Emissions from this state onward; the state's current candidate counts
/// only when `include_current` is set.
fn collect_rest(
    instance: &Instance,
    stream: &StreamConfig,
    mut state: WorkerState,
    include_current: bool,
) -> Vec<Vec<u64>> {
    let mut emitted = Vec::new();
    if include_current && state.emits() {
        emitted.push(state.previous_candidate().to_vec());
    }
    while !state.end_of_stream() {
        state.next_candidate(instance, stream);
        if state.emits() {
            emitted.push(state.previous_candidate().to_vec());
        }
    }
    emitted
}

/// Splitting a stream mid-walk must conserve its remaining output exactly:
/// donor plus recipient plus the recorded cut point together emit precisely
/// what the unsplit stream would have, once each.
pub fn check_split_invariants(instance: &Instance, stream: &StreamConfig) -> Result<(), String> {
    let dimension = instance.dimension();
    // Each check re-walks the remainder twice, so budget the number of
    // checked split points by the walk length.
    let walk_length = candidate_walk(instance, stream).len();
    let max_checks = (60_000 / (2 * walk_length + 1)).clamp(1, 12);
    let mut state = WorkerState::first(instance, vec![0; dimension]);
    let mut checked = 0usize;
    loop {
        if state.end_of_stream() {
            break;
        }
        if let Some(cut) = split_work(instance, &state) {
            if lex_compare(state.bound(), &cut) != Ordering::Less
                || lex_compare(&cut, state.previous_candidate()) != Ordering::Less
            {
                return Err(format!(
                    "cut {cut:?} escapes the slice ({:?}, {:?}]",
                    state.bound(),
                    state.previous_candidate()
                ));
            }
            let unsplit = collect_rest(instance, stream, state.clone(), true);
            let mut donor = state.clone();
            let (recipient, saved) = apply_split(instance, &mut donor, cut);
            let mut split_total = collect_rest(instance, stream, donor, true);
            if let Some(f) = saved {
                split_total.push(f);
            }
            split_total.extend(collect_rest(instance, stream, recipient, false));
            let unsplit = sorted_set(unsplit)?;
            let split_total = sorted_set(split_total).map_err(|e| format!("after split: {e}"))?;
            if unsplit != split_total {
                return Err(format!(
                    "split at {:?} changed the remainder: {} vs {} factorizations",
                    state.previous_candidate(),
                    split_total.len(),
                    unsplit.len()
                ));
            }
            checked += 1;
            if checked >= max_checks {
                break;
            }
        }
        state.next_candidate(instance, stream);
    }
    Ok(())
}

/// Monitor that checks slice disjointness at every barrier and accounts for
/// every emission, attributing buffered output and split points.
struct CoverageMonitor<'a> {
    instance: &'a Instance,
    emitted: Vec<Vec<u64>>,
    violations: Vec<String>,
}

impl CoverageMonitor<'_> {
    fn live_slices_are_disjoint(&mut self, slots: &[SlotView<'_>]) {
        let live: Vec<&SlotView<'_>> = slots.iter().filter(|s| !s.end_of_stream).collect();
        for slot in &live {
            // A live slot's slice is nonempty: bound strictly below the
            // candidate — except the zero-element stream, which holds its
            // zero vector open against the zero bound until it is yielded.
            let zero_element_exception = self.instance.element() == 0
                && slot.previous_candidate.iter().all(|&a| a == 0)
                && slot.bound.iter().all(|&b| b == 0);
            if lex_compare(slot.bound, slot.previous_candidate) != Ordering::Less
                && !zero_element_exception
            {
                self.violations.push(format!(
                    "live slot bound {:?} not below its candidate {:?}",
                    slot.bound, slot.previous_candidate
                ));
            }
        }
        for (index, first) in live.iter().enumerate() {
            for second in &live[index + 1..] {
                // Slices (bound, candidate] overlap exactly when the larger
                // bound is below the smaller candidate.
                let larger_bound = if lex_compare(first.bound, second.bound) == Ordering::Less {
                    second.bound
                } else {
                    first.bound
                };
                let smaller_candidate =
                    if lex_compare(first.previous_candidate, second.previous_candidate)
                        == Ordering::Less
                    {
                        first.previous_candidate
                    } else {
                        second.previous_candidate
                    };
                if lex_compare(larger_bound, smaller_candidate) == Ordering::Less {
                    self.violations.push(format!(
                        "slices overlap: ({:?}, {:?}] and ({:?}, {:?}]",
                        first.bound,
                        first.previous_candidate,
                        second.bound,
                        second.previous_candidate
                    ));
                }
            }
        }
    }
}

impl PoolMonitor for CoverageMonitor<'_> {
    fn barrier(&mut self, _barrier: usize, stage: BarrierStage, slots: &[SlotView<'_>]) {
        self.live_slices_are_disjoint(slots);
        let dimension = self.instance.dimension();
        match stage {
            BarrierStage::AfterAdvance => {
                for slot in slots {
                    for factorization in slot.buffered.chunks_exact(dimension) {
                        self.emitted.push(factorization.to_vec());
                    }
                }
            }
            BarrierStage::AfterRedistribute => {
                for slot in slots {
                    if !slot.buffered.is_empty() {
                        self.violations
                            .push("unflushed buffer after redistribution".to_string());
                    }
                }
            }
        }
    }

    fn split(
        &mut self,
        donor_previous: &[u64],
        new_bound: &[u64],
        recipient_bound: &[u64],
        saved: Option<&[u64]>,
    ) {
        if lex_compare(recipient_bound, new_bound) != Ordering::Less
            || lex_compare(new_bound, donor_previous) != Ordering::Less
        {
            self.violations.push(format!(
                "split bound {new_bound:?} escapes ({recipient_bound:?}, {donor_previous:?}]"
            ));
        }
        let is_factorization = self.instance.phi(new_bound) == self.instance.element();
        if is_factorization != saved.is_some() {
            self.violations.push(format!(
                "split point {new_bound:?} validity {is_factorization} but saved {}",
                saved.is_some()
            ));
        }
        if let Some(f) = saved {
            self.emitted.push(f.to_vec());
        }
    }
}

/// Runs an instrumented pool and requires: disjoint live slices at every
/// barrier, every emission accounted to exactly one slot or split, and the
/// accounted total equal to the oracle set.
pub fn check_pool_coverage(
    instance: &Instance,
    oracle: &OracleResult,
    config: PoolConfig,
) -> Result<(), String> {
    let mut monitor = CoverageMonitor {
        instance,
        emitted: Vec::new(),
        violations: Vec::new(),
    };
    let consumed = WorkPool::new(instance, config)
        .run_monitored(Collector::new(true), &mut monitor)
        .expect("in-memory run");
    if let Some(first) = monitor.violations.first() {
        return Err(format!(
            "{first} ({} violations in total)",
            monitor.violations.len()
        ));
    }
    let accounted = sorted_set(monitor.emitted).map_err(|e| format!("accounted: {e}"))?;
    let consumed = sorted_set(consumed).map_err(|e| format!("consumed: {e}"))?;
    if accounted != consumed {
        return Err(format!(
            "monitor accounted {} emissions, consumer received {}",
            accounted.len(),
            consumed.len()
        ));
    }
    let expected = oracle_sorted(oracle);
    if accounted != expected {
        return Err(format!(
            "pool covered {} factorizations, oracle found {}",
            accounted.len(),
            expected.len()
        ));
    }
    Ok(())
}

/// Edge instances that always run, whatever the sampling says.
fn fixed_edge_instances() -> Vec<Instance> {
    vec![
        Instance::new(0, vec![5, 7]).unwrap(),
        Instance::new(1, vec![2, 3]).unwrap(),
        Instance::new(6, vec![3]).unwrap(),
        Instance::new(7, vec![3]).unwrap(),
        Instance::new(0, vec![9]).unwrap(),
        Instance::new(4, vec![2, 2]).unwrap(),
        Instance::new(30, vec![3, 5]).unwrap(),
        Instance::new(12, vec![2, 5]).unwrap(),
        Instance::new(24, vec![6, 2, 6]).unwrap(),
        Instance::new(100, vec![13, 37, 38, 40]).unwrap(),
    ]
}

fn check_instance(
    instance: &Instance,
    oracle: &OracleResult,
    config: &SelftestConfig,
    failures: &mut Vec<Failure>,
) {
    let mut record = |result: Result<(), String>, check: &str| {
        if let Err(detail) = result {
            failures.push(Failure {
                element: instance.element(),
                generators: instance.generators().to_vec(),
                detail: format!("{check}: {detail}"),
            });
        }
    };
    let auto = StreamConfig::default();
    record(
        check_matches_oracle(instance, oracle, &config.worker_counts, &auto),
        "oracle equivalence",
    );
    record(check_modulo_modes(instance, oracle), "modulo modes");
    for modulo in [ModuloMode::On, ModuloMode::Off] {
        let stream = StreamConfig { modulo };
        record(
            check_stream_invariants(instance, &stream),
            "stream invariants",
        );
        record(
            check_split_invariants(instance, &stream),
            "split invariants",
        );
    }
    // Tight buffers and step counts maximize barrier and refill churn, but
    // cost one barrier (with its thread spawns) every few candidates; keep
    // them for walks short enough to afford it.
    let walk_length = candidate_walk(instance, &auto).len();
    let mut coverage_configs = if walk_length <= 10_000 {
        vec![(4, 3, 5)]
    } else {
        vec![(4, 100, 200)]
    };
    if walk_length <= 1500 {
        coverage_configs.push((3, 1, 1));
    }
    for (workers, buffer, steps) in coverage_configs {
        record(
            check_pool_coverage(
                instance,
                oracle,
                PoolConfig {
                    workers,
                    buffer_capacity: buffer,
                    steps_between_splits: steps,
                    stream: auto,
                },
            ),
            "pool coverage",
        );
    }
}

/// Runs the whole suite: fixed edge instances, then `config.instances`
/// random samples.
pub fn run(config: &SelftestConfig) -> Report {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for instance in fixed_edge_instances() {
        let oracle =
            brute_force(&instance, config.oracle_node_limit).expect("edge instances are small");
        check_instance(&instance, &oracle, config, &mut failures);
        checked += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.instances {
        let (instance, oracle) = sample_instance(&mut rng, config);
        check_instance(&instance, &oracle, config, &mut failures);
        checked += 1;
    }
    Report {
        instances: checked,
        worker_counts: config.worker_counts.clone(),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_reproducible() {
        let config = SelftestConfig::default();
        let mut first = ChaCha8Rng::seed_from_u64(7);
        let mut second = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let (a, _) = sample_instance(&mut first, &config);
            let (b, _) = sample_instance(&mut second, &config);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sampled_instances_fit_the_ceilings() {
        let config = SelftestConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (instance, oracle) = sample_instance(&mut rng, &config);
            assert!(instance.dimension() <= config.max_dimension);
            assert!(instance.element() <= config.max_element);
            assert!(instance
                .generators()
                .iter()
                .all(|&g| g >= 1 && g <= config.max_generator));
            // The oracle result is usable ground truth for this instance.
            let again = brute_force(&instance, config.oracle_node_limit).unwrap();
            assert_eq!(again.count(), oracle.count());
        }
    }

    #[test]
    fn a_small_run_passes() {
        let config = SelftestConfig {
            instances: 10,
            seed: 1,
            ..SelftestConfig::default()
        };
        let report = run(&config);
        assert!(
            report.passed(),
            "failures: {:?}",
            report
                .failures
                .iter()
                .map(|f| format!("n={} gens={:?}: {}", f.element, f.generators, f.detail))
                .collect::<Vec<_>>()
        );
        assert_eq!(report.instances, 10 + fixed_edge_instances().len());
    }
}
