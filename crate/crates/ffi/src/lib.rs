//! C interface to the enumerator: opaque handles, status codes, explicit
//! ownership.
//!
//! Conventions: every fallible function returns [`LexfactStatus`] and writes
//! results through out-pointers; handles are created and freed by this
//! library only; a stream owns its own copy of the instance, so the instance
//! handle may be freed while streams created from it live on. No panic ever
//! crosses the boundary — contract violations surface as
//! `LEXFACT_STATUS_PANIC`.

use std::ffi::c_void;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use lexfact::{
    run_pool, Consumer, Counter, Instance, ModuloMode, PoolConfig, StreamConfig, WorkerState,
    DEFAULT_BUFFER_CAPACITY, DEFAULT_STEPS_BETWEEN_SPLITS,
};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexfactStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Instance construction failed: no generators, a zero generator, or
    /// `element + max(generator)` does not fit in 64 bits.
    InvalidInstance = 2,
    /// A vector length did not match the instance dimension.
    BadLength = 3,
    /// A pool configuration field that must be positive was zero.
    InvalidConfig = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// Modulo-skip selection for candidate stepping.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexfactModulo {
    /// Enabled for dimension >= 4, disabled otherwise.
    Auto = 0,
    /// Always enabled.
    On = 1,
    /// Always disabled.
    Off = 2,
}

/// Worker pool sizing; take `lexfact_pool_config_default()` and adjust.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LexfactPoolConfig {
    /// Worker slots; 0 means available hardware parallelism.
    pub workers: usize,
    /// Per-worker buffer capacity in factorizations; must be positive.
    pub buffer_capacity: usize,
    /// Candidate steps between redistribution barriers; must be positive.
    pub steps_between_splits: usize,
    /// Modulo-skip selection.
    pub modulo: LexfactModulo,
}

/// Opaque problem instance: the element and its generators.
pub struct LexfactInstance {
    inner: Instance,
}

/// Opaque bounded candidate stream. Owns a copy of its instance.
pub struct LexfactStream {
    instance: Instance,
    config: StreamConfig,
    state: WorkerState,
}

/// Per-factorization callback for `lexfact_for_each`: receives the
/// coordinates (valid only during the call), their length, and the caller's
/// context pointer. Called from the thread that called `lexfact_for_each`.
pub type LexfactVisitor = Option<
    unsafe extern "C" fn(factorization: *const u64, dimension: usize, user_data: *mut c_void),
>;

fn modulo_mode(modulo: LexfactModulo) -> ModuloMode {
    match modulo {
        LexfactModulo::Auto => ModuloMode::Auto,
        LexfactModulo::On => ModuloMode::On,
        LexfactModulo::Off => ModuloMode::Off,
    }
}

fn build_pool_config(config: &LexfactPoolConfig) -> Result<PoolConfig, LexfactStatus> {
    if config.buffer_capacity == 0 || config.steps_between_splits == 0 {
        return Err(LexfactStatus::InvalidConfig);
    }
    let mut pool = PoolConfig {
        buffer_capacity: config.buffer_capacity,
        steps_between_splits: config.steps_between_splits,
        stream: StreamConfig {
            modulo: modulo_mode(config.modulo),
        },
        ..PoolConfig::default()
    };
    if config.workers > 0 {
        pool.workers = config.workers;
    }
    Ok(pool)
}

/// Creates an instance for element `element` over `generator_count`
/// generators read from `generators`. On success writes the new handle to
/// `out_instance`; free it with `lexfact_instance_free`.
///
/// # Safety
/// `generators` must point to `generator_count` readable values (it may be
/// null only when `generator_count` is 0, which is itself rejected as an
/// invalid instance); `out_instance` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lexfact_instance_new(
    element: u64,
    generators: *const u64,
    generator_count: usize,
    out_instance: *mut *mut LexfactInstance,
) -> LexfactStatus {
    if out_instance.is_null() {
        return LexfactStatus::NullArgument;
    }
    ptr::write(out_instance, ptr::null_mut());
    if generators.is_null() && generator_count > 0 {
        return LexfactStatus::NullArgument;
    }
    let generators = if generator_count == 0 {
        Vec::new()
    } else {
        slice::from_raw_parts(generators, generator_count).to_vec()
    };
    match catch_unwind(move || Instance::new(element, generators)) {
        Ok(Ok(inner)) => {
            ptr::write(
                out_instance,
                Box::into_raw(Box::new(LexfactInstance { inner })),
            );
            LexfactStatus::Ok
        }
        Ok(Err(_)) => LexfactStatus::InvalidInstance,
        Err(_) => LexfactStatus::Panic,
    }
}

/// Frees an instance handle. Null is a no-op. Streams created from the
/// instance stay valid.
///
/// # Safety
/// `instance` must be a handle from `lexfact_instance_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lexfact_instance_free(instance: *mut LexfactInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Number of generators (and candidate coordinates); 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle from `lexfact_instance_new`.
#[no_mangle]
pub unsafe extern "C" fn lexfact_instance_dimension(instance: *const LexfactInstance) -> usize {
    if instance.is_null() {
        return 0;
    }
    (*instance).inner.dimension()
}

/// The element being factored; 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle from `lexfact_instance_new`.
#[no_mangle]
pub unsafe extern "C" fn lexfact_instance_element(instance: *const LexfactInstance) -> u64 {
    if instance.is_null() {
        return 0;
    }
    (*instance).inner.element()
}

/// The default pool configuration: hardware parallelism, buffers of
/// 1000 factorizations, 1024 steps between barriers, automatic modulo skip.
#[no_mangle]
pub extern "C" fn lexfact_pool_config_default() -> LexfactPoolConfig {
    LexfactPoolConfig {
        workers: 0,
        buffer_capacity: DEFAULT_BUFFER_CAPACITY,
        steps_between_splits: DEFAULT_STEPS_BETWEEN_SPLITS,
        modulo: LexfactModulo::Auto,
    }
}

/// Counts all factorizations on a worker pool and writes the total to
/// `out_count`. Memory use is independent of the count.
///
/// # Safety
/// `instance` must be a live handle; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexfact_count(
    instance: *const LexfactInstance,
    config: LexfactPoolConfig,
    out_count: *mut u64,
) -> LexfactStatus {
    if instance.is_null() || out_count.is_null() {
        return LexfactStatus::NullArgument;
    }
    let pool = match build_pool_config(&config) {
        Ok(pool) => pool,
        Err(status) => return status,
    };
    let inner = &(*instance).inner;
    match catch_unwind(AssertUnwindSafe(|| run_pool(inner, pool, Counter::new()))) {
        Ok(Ok(count)) => {
            ptr::write(out_count, count);
            LexfactStatus::Ok
        }
        // In-memory counting cannot fail with an I/O error; treat a report
        // of one as the internal fault it would be.
        Ok(Err(_)) | Err(_) => LexfactStatus::Panic,
    }
}

struct VisitorConsumer {
    visitor: unsafe extern "C" fn(*const u64, usize, *mut c_void),
    user_data: *mut c_void,
    dimension: usize,
}

impl Consumer for VisitorConsumer {
    type Output = ();

    fn accept(&mut self, factorization: &[u64]) -> std::io::Result<()> {
        unsafe { (self.visitor)(factorization.as_ptr(), self.dimension, self.user_data) };
        Ok(())
    }

    fn finish(self) -> std::io::Result<()> {
        Ok(())
    }
}

/// Enumerates all factorizations on a worker pool, calling `visitor` once
/// per factorization from the calling thread. Arrival order depends on the
/// pool configuration; only the set is guaranteed.
///
/// # Safety
/// `instance` must be a live handle; `visitor` must be a valid function
/// pointer; `user_data` is passed through untouched.
#[no_mangle]
pub unsafe extern "C" fn lexfact_for_each(
    instance: *const LexfactInstance,
    config: LexfactPoolConfig,
    visitor: LexfactVisitor,
    user_data: *mut c_void,
) -> LexfactStatus {
    if instance.is_null() {
        return LexfactStatus::NullArgument;
    }
    let Some(visitor) = visitor else {
        return LexfactStatus::NullArgument;
    };
    let pool = match build_pool_config(&config) {
        Ok(pool) => pool,
        Err(status) => return status,
    };
    let inner = &(*instance).inner;
    let consumer = VisitorConsumer {
        visitor,
        user_data,
        dimension: inner.dimension(),
    };
    match catch_unwind(AssertUnwindSafe(|| run_pool(inner, pool, consumer))) {
        Ok(Ok(())) => LexfactStatus::Ok,
        Ok(Err(_)) | Err(_) => LexfactStatus::Panic,
    }
}

/// Creates a candidate stream over `instance`, walking candidates in
/// strictly decreasing lexicographic order from the greedy first candidate
/// down to the exclusive lower bound.
///
/// `bound` is the bound vector of length `bound_count`, which must equal the
/// instance dimension; pass null with `bound_count` 0 for the zero bound
/// (the full enumeration). On success writes the handle to `out_stream`;
/// free it with `lexfact_stream_free`. The stream copies what it needs, so
/// freeing the instance later does not invalidate it.
///
/// # Safety
/// `instance` must be a live handle; `bound` must point to `bound_count`
/// readable values or be null with `bound_count` 0; `out_stream` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lexfact_stream_new(
    instance: *const LexfactInstance,
    bound: *const u64,
    bound_count: usize,
    modulo: LexfactModulo,
    out_stream: *mut *mut LexfactStream,
) -> LexfactStatus {
    if out_stream.is_null() {
        return LexfactStatus::NullArgument;
    }
    ptr::write(out_stream, ptr::null_mut());
    if instance.is_null() {
        return LexfactStatus::NullArgument;
    }
    let inner = &(*instance).inner;
    let bound = if bound.is_null() {
        if bound_count != 0 {
            return LexfactStatus::NullArgument;
        }
        vec![0; inner.dimension()]
    } else {
        if bound_count != inner.dimension() {
            return LexfactStatus::BadLength;
        }
        slice::from_raw_parts(bound, bound_count).to_vec()
    };
    let config = StreamConfig {
        modulo: modulo_mode(modulo),
    };
    match catch_unwind(AssertUnwindSafe(|| WorkerState::first(inner, bound))) {
        Ok(state) => {
            let stream = LexfactStream {
                instance: inner.clone(),
                config,
                state,
            };
            ptr::write(out_stream, Box::into_raw(Box::new(stream)));
            LexfactStatus::Ok
        }
        Err(_) => LexfactStatus::Panic,
    }
}

/// Frees a stream handle. Null is a no-op.
///
/// # Safety
/// `stream` must be a handle from `lexfact_stream_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lexfact_stream_free(stream: *mut LexfactStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}

/// Copies the stream's current candidate into `out` (`out_count` must equal
/// the instance dimension). The candidate is meaningful while the stream has
/// not ended; afterwards it is the final candidate visited.
///
/// # Safety
/// `stream` must be a live handle; `out` must point to `out_count` writable
/// values.
#[no_mangle]
pub unsafe extern "C" fn lexfact_stream_candidate(
    stream: *const LexfactStream,
    out: *mut u64,
    out_count: usize,
) -> LexfactStatus {
    if stream.is_null() || out.is_null() {
        return LexfactStatus::NullArgument;
    }
    let candidate = (*stream).state.previous_candidate();
    if out_count != candidate.len() {
        return LexfactStatus::BadLength;
    }
    ptr::copy_nonoverlapping(candidate.as_ptr(), out, out_count);
    LexfactStatus::Ok
}

/// Whether the current candidate is a factorization this stream yields
/// (false once the stream has ended, and for a null handle).
///
/// # Safety
/// `stream` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lexfact_stream_emits(stream: *const LexfactStream) -> bool {
    if stream.is_null() {
        return false;
    }
    (*stream).state.emits()
}

/// Whether the stream is exhausted (true for a null handle).
///
/// # Safety
/// `stream` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lexfact_stream_ended(stream: *const LexfactStream) -> bool {
    if stream.is_null() {
        return true;
    }
    (*stream).state.end_of_stream()
}

/// Steps to the next candidate in decreasing lexicographic order. A no-op
/// once the stream has ended.
///
/// # Safety
/// `stream` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lexfact_stream_advance(stream: *mut LexfactStream) -> LexfactStatus {
    if stream.is_null() {
        return LexfactStatus::NullArgument;
    }
    let stream = &mut *stream;
    match catch_unwind(AssertUnwindSafe(|| {
        stream
            .state
            .next_candidate(&stream.instance, &stream.config)
    })) {
        Ok(()) => LexfactStatus::Ok,
        Err(_) => LexfactStatus::Panic,
    }
}

/// Steps until the candidate is a factorization to yield, or the stream
/// ends; afterwards either `lexfact_stream_emits` or `lexfact_stream_ended`
/// is true.
///
/// # Safety
/// `stream` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lexfact_stream_advance_to_factorization(
    stream: *mut LexfactStream,
) -> LexfactStatus {
    if stream.is_null() {
        return LexfactStatus::NullArgument;
    }
    let stream = &mut *stream;
    match catch_unwind(AssertUnwindSafe(|| {
        stream
            .state
            .next_factorization(&stream.instance, &stream.config)
    })) {
        Ok(()) => LexfactStatus::Ok,
        Err(_) => LexfactStatus::Panic,
    }
}
