//! Work splitting and the barrier-phased worker pool.
//!
//! A live stream owns the slice of candidates strictly between its bound and
//! its previous candidate. Because the stream order is total, that slice can
//! be cut at any candidate `c` inside it: the donor keeps the upper part by
//! raising its bound to `c`, and a new stream takes the lower part starting
//! at `c` with the donor's old bound. [`split_work`] proposes the cut,
//! [`apply_split`] performs it, and [`WorkPool`] uses the pair to keep a
//! fixed roster of worker slots busy until the whole enumeration is done.

use std::cmp::Ordering;
use std::io;
use std::thread;

use crate::consumers::Consumer;
use crate::lexstream::{decrement_and_solve, lex_compare, Instance, StreamConfig, WorkerState};

/// Default per-slot buffer capacity, in factorizations.
pub const DEFAULT_BUFFER_CAPACITY: usize = 1000;

/// Default number of candidate steps between redistribution barriers.
pub const DEFAULT_STEPS_BETWEEN_SPLITS: usize = 1024;

/// Sizing and cadence of a [`WorkPool`].
#[derive(Debug, Clone)]
pub struct PoolConfig {
    /// Worker slots; every slot gets its own thread during advance phases.
    pub workers: usize,
    /// Factorizations a slot may buffer before pausing until the barrier.
    pub buffer_capacity: usize,
    /// Candidate steps a slot takes per advance phase.
    pub steps_between_splits: usize,
    /// Stepping options shared by all slots.
    pub stream: StreamConfig,
}

impl Default for PoolConfig {
    fn default() -> PoolConfig {
        PoolConfig {
            workers: thread::available_parallelism().map_or(1, |n| n.get()),
            buffer_capacity: DEFAULT_BUFFER_CAPACITY,
            steps_between_splits: DEFAULT_STEPS_BETWEEN_SPLITS,
            stream: StreamConfig::default(),
        }
    }
}

/// Proposes a bound to cut the donor's remaining slice at, or `None` when the
/// donor has too little left to share.
///
/// The cut point comes from the leftmost coordinate that is nonzero and not
/// yet pinned to the bound: decrementing there keeps the pieces as large as
/// possible. The proposal is returned only if it lies strictly between the
/// donor's bound and its previous candidate; anything else means the slice
/// was already too thin.
pub fn split_work(instance: &Instance, donor: &WorkerState) -> Option<Vec<u64>> {
    if donor.end_of_stream() {
        return None;
    }
    let dimension = instance.dimension();
    let previous = donor.previous_candidate();
    let bound = donor.bound();
    let pivot = (0..dimension - 1).find(|&i| previous[i] > 0 && previous[i] != bound[i])?;
    let mut cut = previous.to_vec();
    for coordinate in &mut cut[pivot + 1..] {
        *coordinate = 0;
    }
    decrement_and_solve(instance, &mut cut, pivot);
    let inside_slice =
        lex_compare(bound, &cut) == Ordering::Less && lex_compare(&cut, previous) == Ordering::Less;
    inside_slice.then_some(cut)
}

/// Cuts the donor's slice at `cut` (a proposal from [`split_work`] on the
/// same state): the donor keeps candidates above `cut`, and the returned
/// recipient stream owns `cut` and everything down to the donor's old bound.
///
/// The recipient never re-yields its initial candidate: if `cut` is itself a
/// factorization it belongs to the run's output exactly once and is returned
/// as the second element, to be recorded by the caller at split time.
///
/// Panics if `cut` does not lie strictly inside the donor's slice.
pub fn apply_split(
    instance: &Instance,
    donor: &mut WorkerState,
    cut: Vec<u64>,
) -> (WorkerState, Option<Vec<u64>>) {
    assert!(
        lex_compare(donor.bound(), &cut) == Ordering::Less
            && lex_compare(&cut, donor.previous_candidate()) == Ordering::Less,
        "split point must lie strictly between the donor's bound and its candidate"
    );
    let was_valid = instance.phi(&cut) == instance.element();
    let recipient = WorkerState::from_parts(cut.clone(), donor.bound().to_vec(), was_valid, false);
    let saved = was_valid.then(|| cut.clone());
    donor.set_bound(cut);
    (recipient, saved)
}

/// Enumerates with a single unbounded stream, feeding each factorization to
/// the consumer in stream order (strictly decreasing lexicographic).
pub fn run_sequential<C: Consumer>(
    instance: &Instance,
    config: &StreamConfig,
    mut consumer: C,
) -> io::Result<C::Output> {
    let mut state = WorkerState::first(instance, vec![0; instance.dimension()]);
    if state.emits() {
        consumer.accept(state.previous_candidate())?;
    }
    while !state.end_of_stream() {
        state.next_candidate(instance, config);
        if state.emits() {
            consumer.accept(state.previous_candidate())?;
        }
    }
    consumer.finish()
}

/// Enumerates on a worker pool. The factorization set is identical to
/// [`run_sequential`] for every pool configuration; arrival order at the
/// consumer is not.
pub fn run_pool<C: Consumer>(
    instance: &Instance,
    config: PoolConfig,
    consumer: C,
) -> io::Result<C::Output> {
    WorkPool::new(instance, config).run(consumer)
}

/// Position of a [`PoolMonitor`] callback within a barrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierStage {
    /// All slots have paused; buffered factorizations are still in the slots.
    AfterAdvance,
    /// Buffers are flushed and ended slots have been refilled where possible.
    AfterRedistribute,
}

/// Read-only snapshot of one pool slot, for monitoring.
#[derive(Debug, Clone, Copy)]
pub struct SlotView<'a> {
    /// The slot's current candidate.
    pub previous_candidate: &'a [u64],
    /// The slot's exclusive lower bound.
    pub bound: &'a [u64],
    /// Whether the slot's stream is exhausted.
    pub end_of_stream: bool,
    /// Factorizations buffered since the last flush, `dimension` values each
    /// (empty after flushing, so always empty at `AfterRedistribute`).
    pub buffered: &'a [u64],
}

/// Observer of pool barriers and splits. All callbacks run on the
/// orchestrating thread while every worker is paused, so a monitor sees each
/// barrier as one consistent snapshot.
pub trait PoolMonitor {
    /// Called twice per barrier, once per [`BarrierStage`], with a view of
    /// every slot in slot order.
    fn barrier(&mut self, barrier: usize, stage: BarrierStage, slots: &[SlotView<'_>]) {
        let _ = (barrier, stage, slots);
    }

    /// Called for each accepted split: the donor kept `(new_bound, donor_previous]`,
    /// the recipient took `(recipient_bound, new_bound]`, and `saved` is the
    /// split point if it was itself a factorization (recorded by the pool at
    /// this moment, attributed to neither slot).
    fn split(
        &mut self,
        donor_previous: &[u64],
        new_bound: &[u64],
        recipient_bound: &[u64],
        saved: Option<&[u64]>,
    ) {
        let _ = (donor_previous, new_bound, recipient_bound, saved);
    }
}

/// Monitor that observes nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoMonitor;

impl PoolMonitor for NoMonitor {}

/// One worker slot: a stream plus its flat emission buffer.
struct Slot {
    state: WorkerState,
    /// Buffered factorizations, `dimension` values per entry.
    buffer: Vec<u64>,
    buffered: usize,
}

impl Slot {
    /// A slot with nothing to do, eligible for refilling.
    fn idle(dimension: usize) -> Slot {
        Slot {
            state: WorkerState::from_parts(vec![0; dimension], vec![0; dimension], false, true),
            buffer: Vec::new(),
            buffered: 0,
        }
    }

    /// Takes up to `max_steps` candidate steps, buffering emitted
    /// factorizations, pausing early when the stream ends or the buffer
    /// fills. This is the only pool work that runs off the orchestrating
    /// thread, and it touches nothing but the slot itself.
    fn advance(
        &mut self,
        instance: &Instance,
        config: &StreamConfig,
        max_steps: usize,
        capacity: usize,
    ) {
        for _ in 0..max_steps {
            if self.state.end_of_stream() || self.buffered == capacity {
                return;
            }
            self.state.next_candidate(instance, config);
            if self.state.emits() {
                self.buffer
                    .extend_from_slice(self.state.previous_candidate());
                self.buffered += 1;
            }
        }
    }
}

/// A fixed roster of worker slots enumerating one instance together.
///
/// The pool starts with the full enumeration in the tail slot and every
/// other slot idle. It then loops through barrier-separated phases: advance
/// every live slot in parallel, flush buffered factorizations to the
/// consumer serially in slot order, and refill ended slots by splitting live
/// ones, scanning donors from the tail backwards. The run finishes when
/// every slot has ended.
pub struct WorkPool<'a> {
    instance: &'a Instance,
    config: PoolConfig,
    slots: Vec<Slot>,
}

impl<'a> WorkPool<'a> {
    /// Builds the pool with the full-range stream in the tail slot.
    ///
    /// Panics if any of `workers`, `buffer_capacity`, or
    /// `steps_between_splits` is zero.
    pub fn new(instance: &'a Instance, config: PoolConfig) -> WorkPool<'a> {
        assert!(config.workers >= 1, "a pool needs at least one worker slot");
        assert!(
            config.buffer_capacity >= 1,
            "buffer capacity must be positive"
        );
        assert!(
            config.steps_between_splits >= 1,
            "steps between splits must be positive"
        );
        let dimension = instance.dimension();
        let mut slots: Vec<Slot> = (0..config.workers).map(|_| Slot::idle(dimension)).collect();
        let tail = slots.last_mut().expect("at least one slot");
        tail.state = WorkerState::first(instance, vec![0; dimension]);
        if tail.state.emits() {
            tail.buffer
                .extend_from_slice(tail.state.previous_candidate());
            tail.buffered = 1;
        }
        WorkPool {
            instance,
            config,
            slots,
        }
    }

    /// Runs the enumeration to completion, returning the consumer's result.
    pub fn run<C: Consumer>(self, consumer: C) -> io::Result<C::Output> {
        self.run_monitored(consumer, &mut NoMonitor)
    }

    /// [`WorkPool::run`] with a monitor receiving barrier and split events.
    pub fn run_monitored<C: Consumer, M: PoolMonitor>(
        mut self,
        mut consumer: C,
        monitor: &mut M,
    ) -> io::Result<C::Output> {
        let mut barrier = 0;
        loop {
            self.advance_phase();
            let views = Self::views(&self.slots);
            monitor.barrier(barrier, BarrierStage::AfterAdvance, &views);
            drop(views);
            self.flush(&mut consumer)?;
            self.redistribute(&mut consumer, monitor)?;
            let views = Self::views(&self.slots);
            monitor.barrier(barrier, BarrierStage::AfterRedistribute, &views);
            drop(views);
            barrier += 1;
            if self.slots.iter().all(|slot| slot.state.end_of_stream()) {
                return consumer.finish();
            }
        }
    }

    /// Advances every live slot, each on its own thread. Slots share nothing,
    /// and the phase joins all threads before returning, so the barrier that
    /// follows sees quiescent state.
    fn advance_phase(&mut self) {
        let instance = self.instance;
        let config = self.config.stream;
        let max_steps = self.config.steps_between_splits;
        let capacity = self.config.buffer_capacity;
        let mut live: Vec<&mut Slot> = self
            .slots
            .iter_mut()
            .filter(|slot| !slot.state.end_of_stream())
            .collect();
        match live.len() {
            0 => {}
            1 => live[0].advance(instance, &config, max_steps, capacity),
            _ => thread::scope(|scope| {
                for slot in live {
                    scope.spawn(move || slot.advance(instance, &config, max_steps, capacity));
                }
            }),
        }
    }

    /// Delivers buffered factorizations to the consumer, serially in slot
    /// order, and empties the buffers.
    fn flush<C: Consumer>(&mut self, consumer: &mut C) -> io::Result<()> {
        let dimension = self.instance.dimension();
        for slot in &mut self.slots {
            for factorization in slot.buffer.chunks_exact(dimension) {
                consumer.accept(factorization)?;
            }
            slot.buffer.clear();
            slot.buffered = 0;
        }
        Ok(())
    }

    /// Refills ended slots by splitting live ones. Idle slots are served from
    /// the tail backwards, and each probes donors at higher indices only, so
    /// the tail slot (home of the original full range) is refilled never and
    /// drained first.
    fn redistribute<C: Consumer, M: PoolMonitor>(
        &mut self,
        consumer: &mut C,
        monitor: &mut M,
    ) -> io::Result<()> {
        for idle in (0..self.slots.len()).rev() {
            if !self.slots[idle].state.end_of_stream() {
                continue;
            }
            for donor in idle + 1..self.slots.len() {
                if self.slots[donor].state.end_of_stream() {
                    continue;
                }
                let Some(cut) = split_work(self.instance, &self.slots[donor].state) else {
                    continue;
                };
                let (recipient, saved) =
                    apply_split(self.instance, &mut self.slots[donor].state, cut);
                monitor.split(
                    self.slots[donor].state.previous_candidate(),
                    self.slots[donor].state.bound(),
                    recipient.bound(),
                    saved.as_deref(),
                );
                debug_assert!(
                    self.slots[idle].buffer.is_empty(),
                    "refilling an unflushed slot"
                );
                self.slots[idle].state = recipient;
                if let Some(factorization) = saved {
                    consumer.accept(&factorization)?;
                }
                break;
            }
        }
        Ok(())
    }

    fn views(slots: &[Slot]) -> Vec<SlotView<'_>> {
        slots
            .iter()
            .map(|slot| SlotView {
                previous_candidate: slot.state.previous_candidate(),
                bound: slot.state.bound(),
                end_of_stream: slot.state.end_of_stream(),
                buffered: &slot.buffer,
            })
            .collect()
    }
}
