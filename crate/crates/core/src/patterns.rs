//! Failure patterns and their cluster structure.
//!
//! A failure pattern is the sequence of disk labels obtained by sorting all
//! failure instants in `[0, t]`. For an `(n,k)` code an index interval `[a,b]`
//! of the pattern is a *cluster* when it covers exactly `n-k+1` distinct disks,
//! *tight* when in addition both endpoint labels occur only once inside it,
//! and *minimal* when its length `b - a` equals `n - k`. Positions are 1-based
//! throughout, as are disk labels.
//!
//! A gap vector marks each of the `s - 1` gaps between successive failures as
//! short (`1`, under `t_rep`) or long (`0`). It is an error vector for a pattern
//! when some tight cluster has only short gaps inside it; those are exactly the
//! gap configurations in which `n-k+1` disks are down at once.

use std::fmt;

use num_bigint::BigInt;

use crate::code::CodeParams;
use crate::combinatorics::{binomial, multinomial};
use crate::error::{Error, Result};
use crate::volume::{VolumePolynomial, VolumeTable};

/// Largest pattern length accepted by exhaustive enumeration.
pub const MAX_ENUM_S: u64 = 14;
/// Largest number of distinct patterns accepted by exhaustive enumeration.
pub const MAX_ENUM_PATTERNS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FailurePattern {
    n: usize,
    labels: Vec<usize>,
}

impl FailurePattern {
    pub fn new(n: usize, labels: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > n) {
            return Err(Error::arg(format!("disk label {bad} outside 1..={n}")));
        }
        Ok(FailurePattern { n, labels })
    }

    /// Pattern induced by per-disk failure instants (`instants[d]` lists the
    /// failures of disk `d + 1`). Equal instants are ordered by disk index; under
    /// continuous laws ties have probability zero.
    pub fn from_instants(instants: &[Vec<f64>]) -> Self {
        let mut events: Vec<(f64, usize)> = instants
            .iter()
            .enumerate()
            .flat_map(|(d, xs)| xs.iter().map(move |&x| (x, d + 1)))
            .collect();
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        FailurePattern {
            n: instants.len(),
            labels: events.into_iter().map(|(_, d)| d).collect(),
        }
    }

    pub fn disks(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Failure-count vector `m`.
    pub fn counts(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.n];
        for &l in &self.labels {
            m[l - 1] += 1;
        }
        m
    }
}

impl fmt::Display for FailurePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n < 10 { "" } else { "," };
        let parts: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

/// Number of distinct patterns for `m`, after checking the enumeration guard.
pub fn check_enumeration_guard(m: &[u64]) -> Result<BigInt> {
    let s: u64 = m.iter().sum();
    let guard = |what: String| Error::GuardExceeded {
        what,
        max_s: MAX_ENUM_S,
        max_patterns: MAX_ENUM_PATTERNS,
    };
    if s > MAX_ENUM_S {
        return Err(guard(format!("s = {s} failures")));
    }
    let total = multinomial(s, m)?;
    if total > BigInt::from(MAX_ENUM_PATTERNS) {
        return Err(guard(format!("{total} distinct patterns")));
    }
    Ok(total)
}

/// Every distinct pattern with count vector `m`, in lexicographic order.
pub fn enumerate_patterns(m: &[u64]) -> Result<PatternIter> {
    let total = check_enumeration_guard(m)?;
    let labels = m
        .iter()
        .enumerate()
        .flat_map(|(d, &c)| std::iter::repeat_n(d + 1, c as usize))
        .collect();
    Ok(PatternIter {
        n: m.len(),
        next: Some(labels),
        total,
    })
}

/// Iterator produced by [`enumerate_patterns`].
#[derive(Debug, Clone)]
pub struct PatternIter {
    n: usize,
    next: Option<Vec<usize>>,
    total: BigInt,
}

impl PatternIter {
    /// Number of patterns the iterator yields in total.
    pub fn total(&self) -> BigInt {
        self.total.clone()
    }
}

impl Iterator for PatternIter {
    type Item = FailurePattern;

    fn next(&mut self) -> Option<FailurePattern> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(FailurePattern {
            n: self.n,
            labels: current,
        })
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let pivot = i - 1;
    let j = (i..v.len()).rev().find(|&j| v[j] > v[pivot]).expect("exists");
    v.swap(pivot, j);
    v[i..].reverse();
    true
}

/// A cluster `[start, end]` (1-based, inclusive) of a failure pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cluster {
    pub start: usize,
    pub end: usize,
    pub tight: bool,
    pub minimal: bool,
}

impl Cluster {
    /// Number of gaps spanned, `end - start`.
    pub fn length(&self) -> usize {
        self.end - self.start
    }
}

/// All clusters of one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSet {
    pattern_len: usize,
    clusters: Vec<Cluster>,
}

impl ClusterSet {
    pub fn pattern_len(&self) -> usize {
        self.pattern_len
    }

    /// Clusters ordered by start, then end.
    pub fn all(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn tight(&self) -> impl Iterator<Item = &Cluster> + '_ {
        self.clusters.iter().filter(|c| c.tight)
    }

    pub fn minimal(&self) -> impl Iterator<Item = &Cluster> + '_ {
        self.clusters.iter().filter(|c| c.minimal)
    }

    /// `(start, end)` pairs of the tight clusters.
    pub fn tight_spans(&self) -> Vec<(usize, usize)> {
        self.tight().map(|c| (c.start, c.end)).collect()
    }
}

/// Finds every cluster of `f` for `code`.
pub fn find_clusters(f: &FailurePattern, code: CodeParams) -> ClusterSet {
    let labels = &f.labels;
    let need = code.loss_threshold();
    let mut clusters = Vec::new();
    let mut seen = vec![0usize; f.n + 1];
    for a in 0..labels.len() {
        seen.iter_mut().for_each(|c| *c = 0);
        let mut distinct = 0;
        for b in a..labels.len() {
            let l = labels[b];
            if seen[l] == 0 {
                distinct += 1;
            }
            seen[l] += 1;
            if distinct > need {
                break;
            }
            if distinct == need {
                let tight = seen[labels[a]] == 1 && seen[labels[b]] == 1;
                clusters.push(Cluster {
                    start: a + 1,
                    end: b + 1,
                    tight,
                    minimal: b - a == code.redundancy(),
                });
            }
        }
    }
    ClusterSet {
        pattern_len: labels.len(),
        clusters,
    }
}

/// `j_{f,n-k}`: the number of minimal clusters of `f`.
pub fn count_minimal_clusters(f: &FailurePattern, code: CodeParams) -> usize {
    find_clusters(f, code).minimal().count()
}

/// Short (`true`) / long (`false`) flags for the `s - 1` gaps of a pattern;
/// `bits[i]` refers to the gap between positions `i + 1` and `i + 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GapVector(pub Vec<bool>);

impl GapVector {
    /// The vector whose bits are the binary digits of `code`, lowest gap first.
    pub fn from_index(len: usize, code: u64) -> Self {
        GapVector((0..len).map(|i| code >> i & 1 == 1).collect())
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl std::str::FromStr for GapVector {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parse(text, format!("unexpected character '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(GapVector)
    }
}

impl fmt::Display for GapVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Whether `b` has only short gaps inside some tight cluster.
pub fn is_error_vector(b: &GapVector, clusters: &ClusterSet) -> Result<bool> {
    let expected = clusters.pattern_len.saturating_sub(1);
    if b.0.len() != expected {
        return Err(Error::GapLength {
            expected,
            got: b.0.len(),
        });
    }
    Ok(clusters
        .tight()
        .any(|c| b.0[c.start - 1..c.end - 1].iter().all(|&bit| bit)))
}

/// Number of error vectors of each weight `w = 0..=s-1` for pattern `f`.
///
/// A gap vector splits the pattern into maximal short-gap segments; it is free
/// of errors exactly when no segment contains a tight cluster. The count of
/// error-free vectors is accumulated by a left-to-right scan whose state is the
/// start of the current segment, and subtracted from `C(s-1, w)`.
pub fn error_vector_counts(f: &FailurePattern, code: CodeParams) -> Vec<u128> {
    let s = f.len();
    if s < 2 {
        return vec![0; s];
    }
    // reach[q]: largest start of a tight cluster ending at or before q (0 = none)
    let mut reach = vec![0usize; s + 1];
    for c in find_clusters(f, code).tight() {
        reach[c.end] = reach[c.end].max(c.start);
    }
    for q in 1..=s {
        reach[q] = reach[q].max(reach[q - 1]);
    }
    // clean[p][w]: error-free prefixes whose current segment starts at p, weight w
    let mut clean = vec![vec![0u128; s]; s + 1];
    clean[1][0] = 1;
    for q in 2..=s {
        let mut next = vec![vec![0u128; s]; s + 1];
        for p in 1..q {
            for w in 0..q - 1 {
                let c = clean[p][w];
                if c == 0 {
                    continue;
                }
                // long gap before q: new segment
                next[q][w] += c;
                // short gap: segment [p, q] must stay free of tight clusters
                if reach[q] < p {
                    next[p][w + 1] += c;
                }
            }
        }
        clean = next;
    }
    (0..s)
        .map(|w| {
            let free: u128 = (1..=s).map(|p| clean[p][w]).sum();
            let all = binomial(s as u64 - 1, w as i64);
            u128::try_from(all).expect("fits") - free
        })
        .collect()
}

/// Scaled error-region volume of one pattern, `sum_w E_w v_{s-1-w, w}(rho)`,
/// where `E_w` counts error vectors of weight `w`.
pub fn pattern_loss_polynomial(
    f: &FailurePattern,
    code: CodeParams,
    table: &VolumeTable,
) -> Result<VolumePolynomial> {
    let s = f.len();
    if s == 0 {
        return Ok(VolumePolynomial::zero(0));
    }
    if table.dimension() != s {
        return Err(Error::arg(format!(
            "volume table has dimension {}, pattern has {s} failures",
            table.dimension()
        )));
    }
    Ok(error_vector_counts(f, code)
        .into_iter()
        .enumerate()
        .filter(|&(_, e)| e > 0)
        .map(|(w, e)| table.full(w).scale(&BigInt::from(e)))
        .sum())
}
