//! Exhaustive reference enumeration, used as ground truth in tests.
//!
//! The oracle searches nested coordinate ranges in ascending order and solves
//! only the final coordinate by divisibility. It deliberately shares no code
//! with the stream walker — no lexicographic stepping, no greedy ceilings —
//! so agreement between the two is meaningful evidence, not an echo.

use std::collections::BTreeSet;
use std::error::Error;
use std::fmt;

use crate::lexstream::Instance;

/// Default work ceiling for [`brute_force`], in recursion nodes.
pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;

/// The complete factorization set of an instance, as found by the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    factorizations: BTreeSet<Vec<u64>>,
}

impl OracleResult {
    /// The set itself, ordered ascending by the set's own comparison.
    pub fn factorizations(&self) -> &BTreeSet<Vec<u64>> {
        &self.factorizations
    }

    /// Number of factorizations; always equals the set's size.
    pub fn count(&self) -> u64 {
        self.factorizations.len() as u64
    }

    /// Membership test.
    pub fn contains(&self, candidate: &[u64]) -> bool {
        self.factorizations.contains(candidate)
    }
}

/// The search tree exceeded the node ceiling before completing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleTooLarge {
    /// The ceiling that was exceeded.
    pub node_limit: u64,
}

impl fmt::Display for OracleTooLarge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "oracle search exceeded its work ceiling of {} nodes",
            self.node_limit
        )
    }
}

impl Error for OracleTooLarge {}

/// Enumerates the factorization set by exhaustive search, refusing instances
/// whose search tree exceeds `node_limit` nodes.
///
/// Coordinates `a1 ... a(d-1)` range over everything the remaining element
/// allows, in ascending order; the final coordinate exists only when the
/// remainder is divisible by the last generator.
pub fn brute_force(instance: &Instance, node_limit: u64) -> Result<OracleResult, OracleTooLarge> {
    let mut search = Search {
        instance,
        node_limit,
        nodes: 0,
        prefix: vec![0; instance.dimension()],
        found: BTreeSet::new(),
    };
    search.descend(0, instance.element())?;
    Ok(OracleResult {
        factorizations: search.found,
    })
}

struct Search<'a> {
    instance: &'a Instance,
    node_limit: u64,
    nodes: u64,
    prefix: Vec<u64>,
    found: BTreeSet<Vec<u64>>,
}

impl Search<'_> {
    fn descend(&mut self, position: usize, remaining: u64) -> Result<(), OracleTooLarge> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(OracleTooLarge {
                node_limit: self.node_limit,
            });
        }
        let generators = self.instance.generators();
        let generator = generators[position];
        if position == generators.len() - 1 {
            if remaining.is_multiple_of(generator) {
                self.prefix[position] = remaining / generator;
                self.found.insert(self.prefix.clone());
            }
            return Ok(());
        }
        for value in 0..=remaining / generator {
            self.prefix[position] = value;
            self.descend(position + 1, remaining - value * generator)?;
        }
        self.prefix[position] = 0;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(element: u64, generators: &[u64]) -> Instance {
        Instance::new(element, generators.to_vec()).expect("valid instance")
    }

    fn set(vectors: &[&[u64]]) -> BTreeSet<Vec<u64>> {
        vectors.iter().map(|v| v.to_vec()).collect()
    }

    #[test]
    fn enumerates_small_sets() {
        let result = brute_force(&instance(10, &[2, 3]), 1_000).unwrap();
        assert_eq!(result.factorizations(), &set(&[&[5, 0], &[2, 2]]));
        assert_eq!(result.count(), 2);

        let result = brute_force(&instance(4, &[2, 2]), 1_000).unwrap();
        assert_eq!(
            result.factorizations(),
            &set(&[&[2, 0], &[1, 1], &[0, 2]]),
            "duplicate generators yield distinct coordinate vectors"
        );
    }

    #[test]
    fn finds_empty_sets() {
        let result = brute_force(&instance(7, &[2, 4]), 1_000).unwrap();
        assert_eq!(result.count(), 0);
        let result = brute_force(&instance(1, &[2, 3]), 1_000).unwrap();
        assert_eq!(result.count(), 0);
    }

    #[test]
    fn zero_element_has_exactly_the_zero_vector() {
        let result = brute_force(&instance(0, &[5, 7]), 1_000).unwrap();
        assert_eq!(result.factorizations(), &set(&[&[0, 0]]));
    }

    #[test]
    fn one_dimensional_cases() {
        let result = brute_force(&instance(6, &[3]), 1_000).unwrap();
        assert_eq!(result.factorizations(), &set(&[&[2]]));
        let result = brute_force(&instance(7, &[3]), 1_000).unwrap();
        assert_eq!(result.count(), 0);
    }

    #[test]
    fn counts_a_three_generator_instance() {
        let result = brute_force(&instance(1000, &[13, 37, 38]), 1_000_000).unwrap();
        assert_eq!(result.count(), 30);
        assert!(result.contains(&[74, 0, 1])); // 74*13 + 38 = 1000
        assert!(!result.contains(&[74, 1, 0]));
    }

    #[test]
    fn refuses_oversized_searches() {
        assert_eq!(
            brute_force(&instance(1000, &[13, 37, 38]), 10),
            Err(OracleTooLarge { node_limit: 10 })
        );
    }
}
