//! Consumers of the factorizations a run emits.
//!
//! A run hands every emitted factorization to one [`Consumer`], always from
//! the orchestrating thread, never concurrently. The consumer decides what
//! the run's result is: a count, the collected set, a predicate verdict, or
//! bytes on a sink.

use std::io::{self, Write as IoWrite};

/// Receives emitted factorizations one at a time; [`Consumer::finish`]
/// produces the run's result.
pub trait Consumer {
    /// What the run returns.
    type Output;

    /// Accept one factorization. The slice is only valid for the duration of
    /// the call; implementations that keep it must copy it.
    fn accept(&mut self, factorization: &[u64]) -> io::Result<()>;

    /// Finalize and produce the result.
    fn finish(self) -> io::Result<Self::Output>;
}

/// Counts factorizations without storing them. Its memory use is independent
/// of the result count, which makes counting runs viable at sizes where the
/// set itself would not fit.
#[derive(Debug, Clone, Copy, Default)]
pub struct Counter {
    count: u64,
}

impl Counter {
    pub fn new() -> Counter {
        Counter::default()
    }
}

impl Consumer for Counter {
    type Output = u64;

    fn accept(&mut self, _factorization: &[u64]) -> io::Result<()> {
        self.count += 1;
        Ok(())
    }

    fn finish(self) -> io::Result<u64> {
        Ok(self.count)
    }
}

/// Collects factorizations in memory. With `sort` set, the result is in
/// descending lexicographic order — the canonical order shared by every
/// run of the same instance, whatever the worker count.
#[derive(Debug, Clone, Default)]
pub struct Collector {
    items: Vec<Vec<u64>>,
    sort: bool,
}

impl Collector {
    pub fn new(sort: bool) -> Collector {
        Collector {
            items: Vec::new(),
            sort,
        }
    }
}

impl Consumer for Collector {
    type Output = Vec<Vec<u64>>;

    fn accept(&mut self, factorization: &[u64]) -> io::Result<()> {
        self.items.push(factorization.to_vec());
        Ok(())
    }

    fn finish(mut self) -> io::Result<Vec<Vec<u64>>> {
        if self.sort {
            self.items.sort_unstable_by(|a, b| b.cmp(a));
        }
        Ok(self.items)
    }
}

/// Latches to `true` as soon as any factorization satisfies the predicate.
#[derive(Debug, Clone)]
pub struct Exists<P> {
    predicate: P,
    found: bool,
}

impl<P: FnMut(&[u64]) -> bool> Exists<P> {
    pub fn new(predicate: P) -> Exists<P> {
        Exists {
            predicate,
            found: false,
        }
    }
}

impl<P: FnMut(&[u64]) -> bool> Consumer for Exists<P> {
    type Output = bool;

    fn accept(&mut self, factorization: &[u64]) -> io::Result<()> {
        self.found = self.found || (self.predicate)(factorization);
        Ok(())
    }

    fn finish(self) -> io::Result<bool> {
        Ok(self.found)
    }
}

/// Serialization formats for [`Writer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// One factorization per line, coordinates separated by single spaces.
    Text,
    /// A header line `a1,...,ad`, then one comma-separated row per
    /// factorization.
    Csv,
}

/// Streams factorizations to a byte sink, one per line.
///
/// Unsorted, rows leave in arrival order with constant memory; with `sort`
/// set, rows are buffered and written in descending lexicographic order at
/// [`Consumer::finish`]. The sink is returned from `finish` after a flush.
#[derive(Debug)]
pub struct Writer<W: IoWrite> {
    sink: W,
    dimension: usize,
    format: OutputFormat,
    sort: bool,
    pending: Vec<Vec<u64>>,
    header_written: bool,
}

impl<W: IoWrite> Writer<W> {
    pub fn new(sink: W, dimension: usize, format: OutputFormat, sort: bool) -> Writer<W> {
        assert!(dimension > 0, "writer dimension must be positive");
        Writer {
            sink,
            dimension,
            format,
            sort,
            pending: Vec::new(),
            header_written: false,
        }
    }

    fn write_header(&mut self) -> io::Result<()> {
        if self.format != OutputFormat::Csv || self.header_written {
            return Ok(());
        }
        self.header_written = true;
        for position in 1..=self.dimension {
            if position > 1 {
                write!(self.sink, ",")?;
            }
            write!(self.sink, "a{position}")?;
        }
        writeln!(self.sink)
    }

    fn write_row(&mut self, factorization: &[u64]) -> io::Result<()> {
        debug_assert_eq!(factorization.len(), self.dimension);
        let separator = match self.format {
            OutputFormat::Text => ' ',
            OutputFormat::Csv => ',',
        };
        for (position, coordinate) in factorization.iter().enumerate() {
            if position > 0 {
                write!(self.sink, "{separator}")?;
            }
            write!(self.sink, "{coordinate}")?;
        }
        writeln!(self.sink)
    }
}

impl<W: IoWrite> Consumer for Writer<W> {
    type Output = W;

    fn accept(&mut self, factorization: &[u64]) -> io::Result<()> {
        if self.sort {
            self.pending.push(factorization.to_vec());
            Ok(())
        } else {
            self.write_header()?;
            self.write_row(factorization)
        }
    }

    fn finish(mut self) -> io::Result<W> {
        self.write_header()?;
        if self.sort {
            self.pending.sort_unstable_by(|a, b| b.cmp(a));
            let pending = std::mem::take(&mut self.pending);
            for row in &pending {
                self.write_row(row)?;
            }
        }
        self.sink.flush()?;
        Ok(self.sink)
    }
}
