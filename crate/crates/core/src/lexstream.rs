//! Bounded lexicographic candidate streams.
//!
//! A stream walks candidate vectors in strictly decreasing lexicographic
//! order, starting from the greedy first candidate `(ceil(n/g1), 0, ..., 0)`.
//! Every factorization of `n` appears as a candidate, and every candidate is
//! either a factorization or overshoots `n` by less than one generator, so
//! filtering candidates for validity enumerates the factorization set with no
//! duplicates. Each stream carries an exclusive lower bound: stepping onto or
//! below the bound ends the stream. Disjoint bound intervals over the same
//! instance partition the enumeration, which is what the worker pool exploits.

use std::cmp::Ordering;
use std::error::Error;
use std::fmt;

/// Bit width of every value in play: coordinates, generators, the element,
/// and every intermediate product. [`Instance::new`] rejects inputs whose
/// intermediate values could exceed this width.
pub const PRECISION_BITS: u32 = 64;

/// An enumeration problem: the element `n` and the generator tuple
/// `(g1, ..., gd)`.
///
/// Generators are used exactly as given. They do not need to be sorted,
/// distinct, coprime, or minimal; changing their order changes the
/// enumeration path but never the set of factorizations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    element: u64,
    generators: Vec<u64>,
}

/// Rejected [`Instance`] constructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    /// The generator tuple was empty.
    NoGenerators,
    /// A generator was zero (position is zero-based).
    ZeroGenerator { position: usize },
    /// `element + max(generators)` does not fit in [`PRECISION_BITS`] bits,
    /// so intermediate values of the stream could wrap.
    PrecisionOverflow { element: u64, max_generator: u64 },
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::NoGenerators => write!(f, "at least one generator is required"),
            InstanceError::ZeroGenerator { position } => {
                write!(
                    f,
                    "generator at position {position} is zero; generators must be positive"
                )
            }
            InstanceError::PrecisionOverflow {
                element,
                max_generator,
            } => write!(
                f,
                "element {element} plus largest generator {max_generator} must be \
                 below 2^{PRECISION_BITS}"
            ),
        }
    }
}

impl Error for InstanceError {}

impl Instance {
    /// Validates and builds an instance.
    ///
    /// Requires at least one generator, all generators positive, and
    /// `element + max(generators) < 2^64` so that no step of the enumeration
    /// can overflow.
    pub fn new(element: u64, generators: Vec<u64>) -> Result<Instance, InstanceError> {
        if generators.is_empty() {
            return Err(InstanceError::NoGenerators);
        }
        if let Some(position) = generators.iter().position(|&g| g == 0) {
            return Err(InstanceError::ZeroGenerator { position });
        }
        let max_generator = *generators.iter().max().expect("nonempty");
        if element.checked_add(max_generator).is_none() {
            return Err(InstanceError::PrecisionOverflow {
                element,
                max_generator,
            });
        }
        Ok(Instance {
            element,
            generators,
        })
    }

    /// The element `n` being factored.
    pub fn element(&self) -> u64 {
        self.element
    }

    /// The generator tuple `(g1, ..., gd)`.
    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Number of generators `d`, which is also the candidate vector length.
    pub fn dimension(&self) -> usize {
        self.generators.len()
    }

    /// The linear form `phi(a) = a1*g1 + ... + ad*gd`.
    ///
    /// Panics if the candidate length does not match the dimension.
    pub fn phi(&self, candidate: &[u64]) -> u64 {
        assert_eq!(
            candidate.len(),
            self.generators.len(),
            "candidate length must equal the instance dimension"
        );
        candidate
            .iter()
            .zip(&self.generators)
            .map(|(&a, &g)| a * g)
            .sum()
    }
}

/// Whether the penultimate-coordinate modulo skip is applied while stepping.
///
/// The skip jumps from one factorization towards the next without visiting
/// invalid candidates in between, at the price of a divisibility computation
/// per skip. `Auto` enables it only where it pays off in practice: dimensions
/// of four or more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModuloMode {
    /// Enabled for dimension >= 4, disabled otherwise.
    #[default]
    Auto,
    /// Always enabled.
    On,
    /// Always disabled.
    Off,
}

/// Per-stream stepping options, shared by all streams of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StreamConfig {
    /// Modulo skip selection; see [`ModuloMode`].
    pub modulo: ModuloMode,
}

impl StreamConfig {
    /// Resolves [`ModuloMode`] against a concrete dimension.
    pub fn modulo_enabled(&self, dimension: usize) -> bool {
        match self.modulo {
            ModuloMode::Auto => dimension >= 4,
            ModuloMode::On => true,
            ModuloMode::Off => false,
        }
    }
}

/// Compares equal-length vectors lexicographically, leftmost coordinate most
/// significant.
///
/// Panics if the lengths differ.
pub fn lex_compare(a: &[u64], b: &[u64]) -> Ordering {
    assert_eq!(
        a.len(),
        b.len(),
        "lexicographic comparison requires equal lengths"
    );
    a.cmp(b)
}

/// Decrements `candidate[index]` by one, then greedily solves coordinate
/// `index + 1`: the smallest value whose contribution brings the total to at
/// least `n`. Returns whether the resulting candidate is a factorization.
///
/// Preconditions, enforced by panics: `index` lies strictly below the final
/// coordinate, `candidate[index]` is positive, and (debug builds) every
/// coordinate right of `index` is zero.
pub fn decrement_and_solve(instance: &Instance, candidate: &mut [u64], index: usize) -> bool {
    decrement_by_and_solve(instance, candidate, index, 1)
}

/// Shared body of the single decrement and the modulo skip: decrement
/// `candidate[index]` by `step`, then solve coordinate `index + 1`.
fn decrement_by_and_solve(
    instance: &Instance,
    candidate: &mut [u64],
    index: usize,
    step: u64,
) -> bool {
    let dimension = instance.dimension();
    assert!(
        index + 1 < dimension,
        "decrement index {index} must lie below the final coordinate of a \
         dimension-{dimension} candidate"
    );
    assert!(
        candidate[index] >= step,
        "coordinate {index} is {}, cannot decrement by {step}",
        candidate[index]
    );
    debug_assert!(
        candidate[index + 1..].iter().all(|&a| a == 0),
        "coordinates right of {index} must be zero before solving"
    );
    candidate[index] -= step;
    // With the prefix fixed, the deficit decides the solved coordinate. The
    // total is computed before subtracting so an overshoot cannot wrap.
    let total = instance.phi(candidate);
    let element = instance.element();
    if total > element {
        // Unreachable from stream-produced states, where the deficit is
        // always positive; kept as a safe floor for direct callers.
        candidate[index + 1] = 0;
        return false;
    }
    let deficit = element - total;
    if deficit == 0 {
        candidate[index + 1] = 0;
        return true;
    }
    let generator = instance.generators()[index + 1];
    let solved = deficit.div_ceil(generator);
    candidate[index + 1] = solved;
    solved * generator == deficit
}

/// The skip width for the penultimate coordinate: the smallest positive `t`
/// such that `t * g(d-1)` is divisible by `g(d)`. Decrementing the
/// penultimate coordinate of a factorization by `t` lands on a candidate that
/// is again a factorization.
///
/// Panics for one-dimensional instances, which have no penultimate
/// coordinate.
pub fn modulo_skip_step(instance: &Instance) -> u64 {
    let dimension = instance.dimension();
    assert!(
        dimension >= 2,
        "the modulo skip needs at least two generators"
    );
    let penultimate = instance.generators()[dimension - 2];
    let last = instance.generators()[dimension - 1];
    last / gcd(penultimate, last)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// One stream of the enumeration: the complete record a step needs.
///
/// The stream yields `previous_candidate` whenever [`WorkerState::emits`] is
/// true, walks strictly downward in lexicographic order with each
/// [`WorkerState::next_candidate`], and ends once the candidate is at or
/// below `bound` (the bound itself is never yielded). A state is
/// self-contained: stepping reads nothing but this record, the instance, and
/// the stream options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerState {
    previous: Vec<u64>,
    bound: Vec<u64>,
    was_valid: bool,
    end_of_stream: bool,
}

impl WorkerState {
    /// Builds the stream at the greedy first candidate
    /// `(ceil(n/g1), 0, ..., 0)`, the lexicographically greatest vector whose
    /// value reaches `n`.
    ///
    /// The stream ends immediately if the first candidate is already at or
    /// below `bound` — except for `n = 0` with the zero bound, whose sole
    /// factorization IS the zero vector: there the stream stays open exactly
    /// long enough to yield it.
    ///
    /// Panics if the bound length does not match the instance dimension.
    pub fn first(instance: &Instance, bound: Vec<u64>) -> WorkerState {
        let dimension = instance.dimension();
        assert_eq!(
            bound.len(),
            dimension,
            "bound length must equal the instance dimension"
        );
        let element = instance.element();
        let first_coordinate = element.div_ceil(instance.generators()[0]);
        let mut previous = vec![0u64; dimension];
        previous[0] = first_coordinate;
        let was_valid = first_coordinate * instance.generators()[0] == element;
        let zero_element_on_zero_bound = element == 0 && bound.iter().all(|&b| b == 0);
        let end_of_stream =
            lex_compare(&previous, &bound) != Ordering::Greater && !zero_element_on_zero_bound;
        WorkerState {
            previous,
            bound,
            was_valid,
            end_of_stream,
        }
    }

    /// Reassembles a state from parts; used by splitting, which transplants a
    /// freshly solved candidate and an inherited bound into a new stream.
    pub(crate) fn from_parts(
        previous: Vec<u64>,
        bound: Vec<u64>,
        was_valid: bool,
        end_of_stream: bool,
    ) -> WorkerState {
        debug_assert_eq!(previous.len(), bound.len());
        WorkerState {
            previous,
            bound,
            was_valid,
            end_of_stream,
        }
    }

    /// Tightens the exclusive lower bound; used on the donor side of a split.
    pub(crate) fn set_bound(&mut self, bound: Vec<u64>) {
        debug_assert_eq!(bound.len(), self.bound.len());
        self.bound = bound;
    }

    /// The candidate most recently produced (the greedy first candidate until
    /// the first step).
    pub fn previous_candidate(&self) -> &[u64] {
        &self.previous
    }

    /// The exclusive lower bound of this stream's range.
    pub fn bound(&self) -> &[u64] {
        &self.bound
    }

    /// Whether `previous_candidate` is a factorization of the element.
    pub fn was_valid(&self) -> bool {
        self.was_valid
    }

    /// Whether the stream is exhausted. An ended stream yields nothing and
    /// stepping it is a no-op.
    pub fn end_of_stream(&self) -> bool {
        self.end_of_stream
    }

    /// Whether the current candidate belongs to this stream's output: it is a
    /// factorization and the stream has not run past its bound.
    pub fn emits(&self) -> bool {
        self.was_valid && !self.end_of_stream
    }

    /// Steps to the next candidate in decreasing lexicographic order, or ends
    /// the stream when none remains above the bound. No-op once ended.
    ///
    /// The pivot is the rightmost nonzero coordinate below the final one;
    /// everything right of it resets and the coordinate after the pivot is
    /// solved greedily. When the modulo skip is enabled and the previous
    /// candidate was a factorization whose pivot is the penultimate
    /// coordinate, the pivot drops by the skip width instead of one whenever
    /// it is large enough, landing directly on the next factorization of that
    /// suffix family.
    pub fn next_candidate(&mut self, instance: &Instance, config: &StreamConfig) {
        if self.end_of_stream {
            return;
        }
        let dimension = instance.dimension();
        debug_assert_eq!(self.previous.len(), dimension);
        let mut pivot = None;
        for position in 0..dimension - 1 {
            if self.previous[position] > 0 {
                pivot = Some(position);
            }
        }
        let Some(pivot) = pivot else {
            // Only the final coordinate is nonzero (or the candidate is all
            // zeros): nothing lexicographically smaller can reach n.
            self.end_of_stream = true;
            return;
        };
        self.previous[dimension - 1] = 0;
        let step = if config.modulo_enabled(dimension) && self.was_valid && pivot == dimension - 2 {
            let skip = modulo_skip_step(instance);
            if self.previous[pivot] >= skip {
                skip
            } else {
                1
            }
        } else {
            1
        };
        self.was_valid = decrement_by_and_solve(instance, &mut self.previous, pivot, step);
        if lex_compare(&self.previous, &self.bound) != Ordering::Greater {
            self.end_of_stream = true;
        }
    }

    /// Steps until the candidate is a factorization to emit, or the stream
    /// ends. Afterwards either `emits()` holds or `end_of_stream()` does.
    pub fn next_factorization(&mut self, instance: &Instance, config: &StreamConfig) {
        loop {
            self.next_candidate(instance, config);
            if self.was_valid || self.end_of_stream {
                return;
            }
        }
    }
}
