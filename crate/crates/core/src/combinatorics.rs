//! Exact integer combinatorics: binomials, multinomials, Stirling numbers of
//! the second kind, run-distinct-disk probabilities, run-free string counts
//! and average tight-cluster counts.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::code::CodeParams;
use crate::error::{Error, Result};
use crate::patterns::{enumerate_patterns, find_clusters};

/// `C(n, r)`, zero outside `0 <= r <= n`.
pub fn binomial(n: u64, r: i64) -> BigInt {
    if r < 0 || r as u64 > n {
        return BigInt::zero();
    }
    let r = (r as u64).min(n - r as u64);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, r)` for a possibly negative upper index, zero when `n < 0`.
pub(crate) fn binomial_signed(n: i64, r: i64) -> BigInt {
    if n < 0 {
        BigInt::zero()
    } else {
        binomial(n as u64, r)
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Falling factorial `n (n-1) ... (n-r+1)`.
pub fn falling_factorial(n: u64, r: u64) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    (0..r).fold(BigInt::one(), |acc, i| acc * (n - i))
}

/// Multinomial coefficient `s! / (p_1! p_2! ...)`.
pub fn multinomial(s: u64, parts: &[u64]) -> Result<BigInt> {
    let sum: u64 = parts.iter().sum();
    if sum != s {
        return Err(Error::PartSum { total: s, sum });
    }
    // product of binomials avoids the large intermediate s!
    let mut acc = BigInt::one();
    let mut placed = 0u64;
    for &p in parts {
        placed += p;
        acc *= binomial(placed, p as i64);
    }
    Ok(acc)
}

fn stirling_table() -> &'static Mutex<Vec<Vec<BigInt>>> {
    static TABLE: OnceLock<Mutex<Vec<Vec<BigInt>>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![vec![BigInt::one()]]))
}

/// Stirling number of the second kind `S2(u, l)`: the number of partitions of
/// a `u`-set into `l` non-empty blocks.
///
/// Rows of the triangle `S2(u,l) = l S2(u-1,l) + S2(u-1,l-1)` are memoized in a
/// process-wide table.
pub fn stirling2(u: u64, l: u64) -> BigInt {
    if l > u {
        return BigInt::zero();
    }
    let mut table = stirling_table().lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= u as usize {
        let prev = table.last().expect("row 0 is seeded");
        let row_len = prev.len() + 1;
        let mut row = vec![BigInt::zero(); row_len];
        for (l, cell) in row.iter_mut().enumerate().skip(1) {
            let stay = prev.get(l).map(|v| v * l).unwrap_or_default();
            *cell = stay + &prev[l - 1];
        }
        table.push(row);
    }
    table[u as usize][l as usize].clone()
}

/// Probability that exactly `l` distinct labels appear among `run_len`
/// independent labels drawn uniformly from `{1..n}`:
/// `C(n,l) l! S2(run_len,l) / n^run_len`.
pub fn pi_n(n: u64, run_len: u64, l: u64) -> Result<BigRational> {
    if n == 0 || run_len == 0 {
        return Err(Error::arg("pi_n needs n >= 1 and run_len >= 1"));
    }
    let num = binomial(n, l as i64) * factorial(l) * stirling2(run_len, l);
    let den = num_traits::pow(BigInt::from(n), run_len as usize);
    Ok(BigRational::new(num, den))
}

fn check_weight(code: CodeParams, j: usize) -> Result<()> {
    if j >= code.n() {
        return Err(Error::arg(format!(
            "weight j = {j} out of range for strings of length n - 1 = {}",
            code.n() - 1
        )));
    }
    Ok(())
}

/// Number of binary strings of length `n-1` and weight `j` with no run of
/// `n-k` or more ones (the no-error graphs of weight `j`), via the alternating
/// sum for `C_{n-k}(n-j, j)`.
pub fn beta_j(code: CodeParams, j: usize) -> Result<BigInt> {
    check_weight(code, j)?;
    let n = code.n() as i64;
    let j = j as i64;
    let run = code.redundancy() as i64;
    let upper = (n - j).min(j / run);
    let mut acc = BigInt::zero();
    for i in 0..=upper {
        let term = binomial_signed(n - j, i) * binomial_signed(n - 1 - run * i, n - j - 1);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Number of error graphs of weight `j`: `C(n-1, j) - beta_j`.
pub fn alpha_j(code: CodeParams, j: usize) -> Result<BigInt> {
    Ok(binomial(code.n() as u64 - 1, j as i64) - beta_j(code, j)?)
}

/// Elementary symmetric polynomial `e_r(m)`: the sum over unordered
/// `r`-subsets of indices of the product of the selected entries.
pub fn subset_product_sum(m: &[u64], r: usize) -> BigInt {
    let mut e = vec![BigInt::zero(); r + 1];
    e[0] = BigInt::one();
    for &x in m {
        for d in (1..=r).rev() {
            let add = &e[d - 1] * x;
            e[d] += add;
        }
    }
    e.swap_remove(r)
}

/// Number of two-label failure patterns with `m1` ones and `m2` twos that have
/// exactly `j` transitions, indexed by `j = 0..=s-1`.
pub fn transition_counts(m1: u64, m2: u64) -> Vec<BigInt> {
    let s = (m1 + m2) as usize;
    let mut counts = vec![BigInt::zero(); s.max(1)];
    if m1 == 0 || m2 == 0 {
        counts[0] = BigInt::one();
        return counts;
    }
    let (a, b) = (m1 as i64 - 1, m2 as i64 - 1);
    for (j, slot) in counts.iter_mut().enumerate().skip(1) {
        let runs = j as i64 + 1;
        let r = runs / 2;
        *slot = if runs % 2 == 0 {
            binomial_signed(a, r - 1) * binomial_signed(b, r - 1) * 2
        } else {
            binomial_signed(a, r) * binomial_signed(b, r - 1)
                + binomial_signed(a, r - 1) * binomial_signed(b, r)
        };
    }
    counts
}

/// Average number of tight clusters of length `l` over all failure patterns
/// with count vector `m`, by exhaustive enumeration.
pub fn avg_tight_clusters(code: CodeParams, m: &[u64], l: usize) -> Result<BigRational> {
    code.check_counts(m)?;
    if l < code.redundancy() {
        return Err(Error::arg(format!(
            "tight clusters have length >= n - k = {}",
            code.redundancy()
        )));
    }
    let s: u64 = m.iter().sum();
    if s < l as u64 + 1 {
        return Ok(BigRational::zero());
    }
    let patterns = enumerate_patterns(m)?;
    let total = patterns.total();
    let mut hits = 0u64;
    for f in patterns {
        hits += find_clusters(&f, code)
            .tight()
            .filter(|c| c.length() == l)
            .count() as u64;
    }
    Ok(BigRational::new(BigInt::from(hits), total))
}

/// Closed form for the average tight-cluster count, read with the sum over
/// *unordered* index combinations `i_1 < ... < i_{n-k+1}`, endpoints `i_1` and
/// `i_{n-k+1}`, and the multiplicity product over the `n-k-1` interior indices:
///
/// `A_l = (s-l)/C(s,l+1) * sum m_{i_1} m_{i_{n-k+1}} prod_j C(m_{i_j}, q_j)`
/// with interior multiplicities `q_j >= 1` summing to `l - 1`.
///
/// This agrees with [`avg_tight_clusters`] for `l = n-k`; for longer clusters
/// it omits interior orderings and endpoint choices, and the two differ.
/// Use [`check_tight_cluster_formula`] to see both values side by side.
pub fn avg_tight_clusters_closed(code: CodeParams, m: &[u64], l: usize) -> Result<BigRational> {
    code.check_counts(m)?;
    let r = code.loss_threshold();
    if l < code.redundancy() {
        return Err(Error::arg("cluster length below n - k"));
    }
    let s: u64 = m.iter().sum();
    if s < l as u64 + 1 {
        return Ok(BigRational::zero());
    }
    let mut total = BigInt::zero();
    for combo in combinations(m.len(), r) {
        let ends = BigInt::from(m[combo[0]]) * m[combo[r - 1]];
        if ends.is_zero() {
            continue;
        }
        let interior: Vec<u64> = combo[1..r - 1].iter().map(|&i| m[i]).collect();
        total += ends * interior_multiplicity_sum(&interior, l as u64 - 1);
    }
    let windows = BigInt::from(s - l as u64);
    Ok(BigRational::new(
        windows * total,
        binomial(s, l as i64 + 1),
    ))
}

/// Sum over `q_j >= 1` with `sum q_j = budget` of `prod C(m_j, q_j)`.
fn interior_multiplicity_sum(interior: &[u64], budget: u64) -> BigInt {
    // polynomial product of (sum_{q>=1} C(m,q) x^q), coefficient of x^budget
    let mut poly = vec![BigInt::zero(); budget as usize + 1];
    poly[0] = BigInt::one();
    for &mj in interior {
        let mut next = vec![BigInt::zero(); poly.len()];
        for (deg, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for q in 1..=mj {
                let d = deg + q as usize;
                if d >= next.len() {
                    break;
                }
                next[d] += c * binomial(mj, q as i64);
            }
        }
        poly = next;
    }
    poly.swap_remove(budget as usize)
}

/// All `r`-element index combinations of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..r).rev().find(|&i| idx[i] != i + n - r) else {
            return out;
        };
        idx[pos] += 1;
        for i in pos + 1..r {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

/// Enumerated and closed-form average tight-cluster counts for one `(m, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TightClusterCheck {
    pub length: usize,
    pub enumerated: BigRational,
    pub closed_form: BigRational,
}

impl TightClusterCheck {
    pub fn agrees(&self) -> bool {
        self.enumerated == self.closed_form
    }

    /// `closed_form - enumerated`.
    pub fn discrepancy(&self) -> BigRational {
        &self.closed_form - &self.enumerated
    }
}

/// Compares [`avg_tight_clusters`] with [`avg_tight_clusters_closed`].
pub fn check_tight_cluster_formula(
    code: CodeParams,
    m: &[u64],
    l: usize,
) -> Result<TightClusterCheck> {
    Ok(TightClusterCheck {
        length: l,
        enumerated: avg_tight_clusters(code, m, l)?,
        closed_form: avg_tight_clusters_closed(code, m, l)?,
    })
}

/// Right-hand side of the minimal-cluster identity,
/// `(n-k+1)! (s-(n-k))! / s! * e_{n-k+1}(m)`.
pub fn minimal_cluster_average_formula(code: CodeParams, m: &[u64]) -> Result<BigRational> {
    code.check_counts(m)?;
    let s: u64 = m.iter().sum();
    let red = code.redundancy() as u64;
    if s <= red {
        return Ok(BigRational::zero());
    }
    let num = factorial(red + 1) * factorial(s - red) * subset_product_sum(m, code.loss_threshold());
    Ok(BigRational::new(num, factorial(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn code(n: usize, k: usize) -> CodeParams {
        CodeParams::new(n, k).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn binomial_cases() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(9, 0), BigInt::one());
        assert_eq!(binomial(4, 5), BigInt::zero());
        assert_eq!(binomial(4, -1), BigInt::zero());
        assert_eq!(binomial(60, 30), "118264581564861424".parse::<BigInt>().unwrap());
    }

    #[test]
    fn multinomial_cases() {
        assert_eq!(multinomial(4, &[1, 1, 1, 1]).unwrap(), BigInt::from(24));
        // 6! / (2! 2! 1! 1!) = 720 / 4
        assert_eq!(multinomial(6, &[2, 2, 1, 1]).unwrap(), BigInt::from(180));
        assert_eq!(multinomial(3, &[3]).unwrap(), BigInt::one());
        assert_eq!(
            multinomial(5, &[2, 2]),
            Err(Error::PartSum { total: 5, sum: 4 })
        );
    }

    /// Counts set partitions of {0..u} into exactly l blocks by assigning each
    /// element a block label in restricted-growth form.
    fn brute_stirling2(u: usize, l: usize) -> u64 {
        fn rec(i: usize, u: usize, used: usize, l: usize) -> u64 {
            if i == u {
                return (used == l) as u64;
            }
            let mut total = 0;
            for b in 0..=used {
                if b < l {
                    total += rec(i + 1, u, used.max(b + 1), l);
                }
            }
            total
        }
        rec(0, u, 0, l)
    }

    #[test]
    fn stirling_matches_partition_enumeration() {
        assert_eq!(stirling2(4, 2), BigInt::from(7));
        assert_eq!(stirling2(3, 2), BigInt::from(3));
        assert_eq!(stirling2(0, 0), BigInt::one());
        assert_eq!(stirling2(3, 5), BigInt::zero());
        for u in 0..=9 {
            assert_eq!(stirling2(u as u64, u as u64), BigInt::one());
            for l in 0..=u {
                assert_eq!(
                    stirling2(u as u64, l as u64),
                    BigInt::from(brute_stirling2(u, l)),
                    "S2({u},{l})"
                );
            }
        }
    }

    #[test]
    fn pi_n_cases() {
        // (n-1)! / (n^{n-k} (k-1)!) for (4,2): 6 / 16
        assert_eq!(pi_n(4, 3, 3).unwrap(), q(3, 8));
        for n in 1..6 {
            assert_eq!(pi_n(n, 1, 1).unwrap(), q(1, 1));
        }
        let total: BigRational = (0..=3).map(|l| pi_n(3, 2, l).unwrap()).sum();
        assert_eq!(total, q(1, 1));
        assert!(pi_n(0, 1, 1).is_err());
    }

    #[test]
    fn pi_n_matches_label_enumeration() {
        for n in 1..=4u64 {
            for r in 1..=5u32 {
                let mut hist = vec![0u64; n as usize + 1];
                for code in 0..n.pow(r) {
                    let mut mask = 0u32;
                    let mut c = code;
                    for _ in 0..r {
                        mask |= 1 << (c % n);
                        c /= n;
                    }
                    hist[mask.count_ones() as usize] += 1;
                }
                for (l, &h) in hist.iter().enumerate() {
                    assert_eq!(
                        pi_n(n, r as u64, l as u64).unwrap(),
                        BigRational::new(h.into(), n.pow(r).into())
                    );
                }
            }
        }
    }

    #[test]
    fn beta_and_alpha_for_42() {
        let c = code(4, 2);
        assert_eq!(beta_j(c, 2).unwrap(), BigInt::one()); // "101"
        assert_eq!(beta_j(c, 0).unwrap(), BigInt::one());
        assert_eq!(beta_j(c, 3).unwrap(), BigInt::zero());
        assert_eq!(alpha_j(c, 1).unwrap(), BigInt::zero());
        assert_eq!(alpha_j(c, 2).unwrap(), BigInt::from(2));
        assert_eq!(alpha_j(c, 3).unwrap(), BigInt::one());
        assert!(beta_j(c, 4).is_err());
    }

    #[test]
    fn subset_products() {
        assert_eq!(subset_product_sum(&[1, 1, 1, 1], 3), BigInt::from(4));
        assert_eq!(subset_product_sum(&[2, 2, 1, 1], 3), BigInt::from(12));
        assert_eq!(subset_product_sum(&[3, 5], 2), BigInt::from(15));
        assert_eq!(subset_product_sum(&[3, 0, 0], 2), BigInt::zero());
    }

    #[test]
    fn transition_counts_match_enumeration() {
        for m1 in 0..=4u64 {
            for m2 in 0..=4u64 {
                if m1 + m2 == 0 {
                    continue;
                }
                let closed = transition_counts(m1, m2);
                let mut hist = vec![BigInt::zero(); closed.len()];
                for f in enumerate_patterns(&[m1, m2]).unwrap() {
                    let j = f.labels().windows(2).filter(|w| w[0] != w[1]).count();
                    hist[j] += 1;
                }
                assert_eq!(closed, hist, "m = ({m1},{m2})");
            }
        }
    }

    #[test]
    fn tight_cluster_average_for_21() {
        let c = code(2, 1);
        for m1 in 0..=4u64 {
            for m2 in 0..=4u64 {
                let s = m1 + m2;
                if s < 2 {
                    continue;
                }
                let a = avg_tight_clusters(c, &[m1, m2], 1).unwrap();
                assert_eq!(a, q((2 * m1 * m2) as i64, s as i64));
            }
        }
        assert_eq!(avg_tight_clusters(c, &[5, 0], 1).unwrap(), q(0, 1));
    }

    #[test]
    fn tight_cluster_average_for_42_distinct() {
        // each permutation of 1234 has the two minimal clusters [1,3] and [2,4]
        let a = avg_tight_clusters(code(4, 2), &[1, 1, 1, 1], 2).unwrap();
        assert_eq!(a, q(2, 1));
        let check = check_tight_cluster_formula(code(4, 2), &[1, 1, 1, 1], 2).unwrap();
        assert!(check.agrees());
    }

    #[test]
    fn closed_form_departs_for_longer_clusters() {
        // (4,2) with m = (2,2,1,1): length-3 tight clusters
        let check = check_tight_cluster_formula(code(4, 2), &[2, 2, 1, 1], 3).unwrap();
        assert!(!check.agrees(), "{check:?}");
        assert!(!check.enumerated.is_negative());
    }

    #[test]
    fn combinations_are_complete() {
        let c = combinations(5, 3);
        assert_eq!(c.len(), 10);
        assert_eq!(c[0], vec![0, 1, 2]);
        assert_eq!(c[9], vec![2, 3, 4]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
