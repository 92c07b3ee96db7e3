use std::fmt;

use crate::error::{Error, Result};

/// An `(n,k)` MDS erasure code: `k` information symbols spread over `n` disks,
/// tolerating any `n - k` simultaneous erasures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParams {
    n: usize,
    k: usize,
}

impl CodeParams {
    /// Largest block length supported; disk sets are tracked as `u64` bitmasks.
    pub const MAX_N: usize = 64;

    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k < 1 || k >= n || n > Self::MAX_N {
            return Err(Error::InvalidCode { n, k });
        }
        Ok(CodeParams { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Erasure-correcting capability `n - k`.
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    /// Number of distinct failed disks that constitutes data loss, `n - k + 1`.
    pub fn loss_threshold(&self) -> usize {
        self.n - self.k + 1
    }

    /// Checks that a failure-count vector has one entry per disk.
    pub(crate) fn check_counts(&self, m: &[u64]) -> Result<()> {
        if m.len() != self.n {
            return Err(Error::CountLength {
                expected: self.n,
                got: m.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_codes() {
        assert!(CodeParams::new(4, 0).is_err());
        assert!(CodeParams::new(4, 4).is_err());
        assert!(CodeParams::new(3, 5).is_err());
        let c = CodeParams::new(8, 5).unwrap();
        assert_eq!(c.redundancy(), 3);
        assert_eq!(c.loss_threshold(), 4);
        assert_eq!(c.to_string(), "(8,5)");
    }
}
