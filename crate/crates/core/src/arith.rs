//! Exact integer helpers: divisor power sums and the partition oracle.

use rug::ops::Pow;
use rug::Integer;

use crate::error::{Error, Result};

/// Divisor-sum exponents used by the series in this crate.
pub const SIGMA_ORDERS: [u32; 4] = [1, 3, 7, 11];

fn check_order(k: u32) -> Result<()> {
    if SIGMA_ORDERS.contains(&k) {
        Ok(())
    } else {
        Err(Error::arg(format!(
            "sigma order must be one of {SIGMA_ORDERS:?}, got {k}"
        )))
    }
}

/// σ_k(n) = Σ_{d | n} d^k.
pub fn sigma_pow(k: u32, n: u64) -> Result<Integer> {
    check_order(k)?;
    if n == 0 {
        return Err(Error::arg("sigma is undefined at n = 0"));
    }
    let mut total = Integer::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += Integer::from(d).pow(k);
            let other = n / d;
            if other != d {
                total += Integer::from(other).pow(k);
            }
        }
        d += 1;
    }
    Ok(total)
}

/// `[σ_k(1), …, σ_k(count)]` by a divisor sieve.
pub fn sigma_table(k: u32, count: usize) -> Result<Vec<Integer>> {
    check_order(k)?;
    sieve(k, count)
}

pub(crate) fn sieve(k: u32, count: usize) -> Result<Vec<Integer>> {
    let mut table = vec![Integer::new(); count];
    for d in 1..=count {
        let dk = Integer::from(d).pow(k);
        for multiple in (d..=count).step_by(d) {
            table[multiple - 1] += &dk;
        }
    }
    Ok(table)
}

/// Exact `p(0), …, p(n)` from Euler's pentagonal-number recurrence
/// p(n) = Σ_{k≥1} (−1)^{k+1} [p(n − k(3k−1)/2) + p(n − k(3k+1)/2)].
pub fn partition_oracle(n: usize) -> Vec<Integer> {
    let mut p: Vec<Integer> = Vec::with_capacity(n + 1);
    p.push(Integer::from(1));
    for m in 1..=n {
        let mut acc = Integer::new();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let positive = k % 2 == 1;
            let g2 = k * (3 * k + 1) / 2;
            for g in [g1, g2] {
                if g <= m {
                    if positive {
                        acc += &p[m - g];
                    } else {
                        acc -= &p[m - g];
                    }
                }
            }
        }
        p.push(acc);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_sigma(k: u32, n: u64) -> Integer {
        (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .map(|d| Integer::from(d).pow(k))
            .sum()
    }

    #[test]
    fn sigma_small_values() {
        assert_eq!(sigma_pow(1, 1).unwrap(), 1);
        assert_eq!(sigma_pow(1, 6).unwrap(), 12);
        assert_eq!(sigma_pow(3, 2).unwrap(), 9);
        assert!(sigma_pow(1, 0).is_err());
        assert!(sigma_pow(2, 5).is_err());
    }

    #[test]
    fn sigma_tables() {
        assert_eq!(sigma_table(3, 4).unwrap(), [1, 9, 28, 73]);
        assert_eq!(sigma_table(1, 5).unwrap(), [1, 3, 4, 7, 6]);
    }

    #[test]
    fn sieve_agrees_with_direct_divisor_sums() {
        for k in SIGMA_ORDERS {
            let table = sigma_table(k, 10_000).unwrap();
            for (i, v) in table.iter().enumerate() {
                assert_eq!(*v, sigma_pow(k, i as u64 + 1).unwrap());
            }
            for n in 1..200u64 {
                assert_eq!(table[n as usize - 1], brute_sigma(k, n));
            }
        }
    }

    #[test]
    fn small_partitions() {
        assert_eq!(partition_oracle(5), [1, 1, 2, 3, 5, 7]);
        assert_eq!(partition_oracle(0), [1]);
        assert_eq!(partition_oracle(200)[200], 3972999029388u64);
    }

    /// p(n) counted by brute force: partitions of n into parts ≤ m.
    fn count(n: usize, m: usize) -> u64 {
        if n == 0 {
            return 1;
        }
        (1..=m.min(n)).map(|part| count(n - part, part)).sum()
    }

    #[test]
    fn oracle_matches_enumeration() {
        let p = partition_oracle(30);
        for (n, pn) in p.iter().enumerate() {
            assert_eq!(*pn, count(n, n), "p({n})");
        }
    }

    #[test]
    fn oracle_satisfies_generating_function_exactly() {
        // Σ_k (−1)^k p(n − k(3k−1)/2) over all generalized pentagonals is 0 for n ≥ 1.
        let p = partition_oracle(400);
        for n in 1..=400i64 {
            let mut residual = Integer::new();
            for k in -40i64..=40 {
                let g = k * (3 * k - 1) / 2;
                if g <= n {
                    let term = &p[(n - g) as usize];
                    if k.rem_euclid(2) == 0 {
                        residual += term;
                    } else {
                        residual -= term;
                    }
                }
            }
            assert_eq!(residual, 0, "n = {n}");
        }
    }
}
