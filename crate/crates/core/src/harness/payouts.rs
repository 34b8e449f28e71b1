use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prize pool in cents.
pub const POOL_CENTS: i64 = 10_000_000;
/// Guaranteed minimum per player in cents.
pub const FLOOR_CENTS: i64 = 1_000_000;
const SHARED_CENTS: i64 = 6_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoutResult {
    /// Profits, highest first.
    pub profits: [i64; 4],
    /// Payouts in cents, in the same order.
    pub cents: [i64; 4],
}

impl PayoutResult {
    pub fn dollars(&self) -> [f64; 4] {
        self.cents.map(|c| c as f64 / 100.0)
    }
}

/// Exact payouts before rounding, in cents.
pub fn exact_payouts(x: [i64; 4]) -> Result<[Ratio<i128>; 4]> {
    if x.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::UnsortedProfits);
    }
    if x[0] == x[3] {
        return Ok([Ratio::from_integer((POOL_CENTS / 4) as i128); 4]);
    }
    let x = x.map(|v| v as i128);
    let denom = x[0] + x[1] + x[2] - 3 * x[3];
    let share = |xi: i128| Ratio::from_integer(FLOOR_CENTS as i128) + Ratio::new(SHARED_CENTS as i128 * (xi - x[3]), denom);
    Ok([share(x[0]), share(x[1]), share(x[2]), Ratio::from_integer(FLOOR_CENTS as i128)])
}

/// Splits the pool among four players by profit. Amounts are rounded to
/// cents by largest remainder, so they always total the pool; leftover
/// cents go to the largest fractional parts, lower positions first on ties.
pub fn compute_payouts(x1: i64, x2: i64, x3: i64, x4: i64) -> Result<PayoutResult> {
    let x = [x1, x2, x3, x4];
    let exact = exact_payouts(x)?;
    let mut cents: [i64; 4] = exact.map(|r| r.floor().to_integer() as i64);
    let short = POOL_CENTS - cents.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    for &i in order.iter().take(short as usize) {
        cents[i] += 1;
    }
    Ok(PayoutResult { profits: x, cents })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_cases() {
        assert_eq!(compute_payouts(5, 5, 5, 5).unwrap().cents, [2_500_000; 4]);
        assert_eq!(compute_payouts(1, 0, 0, 0).unwrap().cents, [7_000_000, 1_000_000, 1_000_000, 1_000_000]);
        let p = compute_payouts(100, 50, 20, 0).unwrap();
        assert_eq!(p.cents, [4_529_412, 2_764_706, 1_705_882, 1_000_000]);
        assert_eq!(p.cents.iter().sum::<i64>(), POOL_CENTS);
        assert!(matches!(compute_payouts(0, 1, 0, 0), Err(Error::UnsortedProfits)));
    }

    #[test]
    fn sevenths_round_to_the_pool() {
        // sevenths leave two cents; the tied leaders split them by position
        let p = compute_payouts(3, 3, 1, 0).unwrap();
        assert_eq!(p.cents, [3_571_429, 3_571_428, 1_857_143, 1_000_000]);
    }
}
