//! Unsigned Stirling numbers of the first kind, rising factorials and
//! binomial coefficients, all in arbitrary precision.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Scalar;
use crate::error::{Error, Result};

/// Triangular table of unsigned Stirling numbers of the first kind.
///
/// Entry `(m, j)` is the coefficient `c(m, j)` in the rising-factorial
/// expansion `y(y+1)···(y+m−1) = Σ_j c(m, j) y^j`. Rows are built once with
/// the recurrence `c(m+1, j) = c(m, j−1) + m·c(m, j)` and are immutable
/// afterwards, so a table can be shared freely across threads.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    /// Build the table up to and including `max_order` (≥ 1).
    pub fn new(max_order: u32) -> Self {
        let order = max_order.max(1) as usize;
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(order + 1);
        rows.push(vec![BigInt::one()]); // c(0, 0) = 1
        for m in 1..=order {
            let prev = &rows[m - 1];
            let mut row = vec![BigInt::zero(); m + 1];
            for j in 1..=m {
                let carry = if j < m { &prev[j] * (m - 1) } else { BigInt::zero() };
                row[j] = &prev[j - 1] + carry;
            }
            rows.push(row);
        }
        StirlingTable { rows }
    }

    pub fn max_order(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    /// `c(m, j)` for `1 ≤ m ≤ max_order`, `0 ≤ j ≤ m`.
    pub fn unsigned(&self, m: u32, j: u32) -> Result<&BigInt> {
        if m == 0 || m > self.max_order() {
            return Err(Error::Domain(format!(
                "Stirling order {m} outside table range 1..={}",
                self.max_order()
            )));
        }
        if j > m {
            return Err(Error::Domain(format!("Stirling index {j} exceeds order {m}")));
        }
        Ok(&self.rows[m as usize][j as usize])
    }
}

/// Unsigned Stirling number of the first kind `c(m, j)`, `m ≥ 1`, `0 ≤ j ≤ m`.
pub fn stirling1_unsigned(m: u32, j: u32) -> Result<BigInt> {
    if m == 0 {
        return Err(Error::Domain("Stirling order must be ≥ 1".into()));
    }
    Ok(StirlingTable::new(m).unsigned(m, j)?.clone())
}

/// Rising factorial `y(y+1)···(y+m−1)`; `1` for `m = 0`.
pub fn rising_factorial<T: Scalar>(y: &T, m: u32) -> T {
    let mut acc = T::one();
    for i in 0..m {
        acc = acc * (y.clone() + T::from_u64(i as u64));
    }
    acc
}

/// Binomial coefficient `C(a, b)`; zero when `b < 0` or `b > a`.
pub fn binomial(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let b = (b as u64).min(a - b as u64);
    let mut acc = BigInt::one();
    for i in 1..=b {
        // every prefix product is itself a binomial, so division is exact
        acc = acc * BigInt::from(a - b + i) / BigInt::from(i);
    }
    acc
}

/// `n!` in arbitrary precision.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ExactRational;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    #[test]
    fn stirling_row_three_and_four() {
        // expansion coefficients of (y)(y+1)(y+2) and (y)(y+1)(y+2)(y+3)
        let want3 = [(1u32, 2i64), (2, 3), (3, 1)];
        let want4 = [(1u32, 6i64), (2, 11), (3, 6), (4, 1)];
        for (j, v) in want3 {
            assert_eq!(stirling1_unsigned(3, j).unwrap(), BigInt::from(v));
        }
        for (j, v) in want4 {
            assert_eq!(stirling1_unsigned(4, j).unwrap(), BigInt::from(v));
        }
        assert_eq!(stirling1_unsigned(1, 1).unwrap(), BigInt::one());
    }

    #[test]
    fn stirling_edges_and_errors() {
        let table = StirlingTable::new(8);
        for m in 1..=8 {
            assert_eq!(table.unsigned(m, m).unwrap(), &BigInt::one());
            assert_eq!(table.unsigned(m, 0).unwrap(), &BigInt::zero());
        }
        assert!(table.unsigned(9, 1).is_err());
        assert!(table.unsigned(3, 4).is_err());
        assert!(stirling1_unsigned(0, 0).is_err());
    }

    #[test]
    fn stirling_row_recurrence_holds() {
        let table = StirlingTable::new(20);
        for m in 1..20u32 {
            for j in 1..=m {
                let lhs = table.unsigned(m + 1, j).unwrap().clone();
                let rhs =
                    table.unsigned(m, j - 1).unwrap() + table.unsigned(m, j).unwrap() * BigInt::from(m);
                assert_eq!(lhs, rhs, "recurrence failed at ({}, {})", m + 1, j);
            }
        }
    }

    #[test]
    fn stirling_values_exceed_u64_at_order_22() {
        let c = stirling1_unsigned(22, 1).unwrap(); // 21!
        assert!(c.to_u64().is_none());
        assert_eq!(c, factorial(21));
    }

    #[test]
    fn rising_factorial_small_values() {
        assert_eq!(rising_factorial(&3.0f64, 2), 12.0);
        assert_eq!(rising_factorial(&2.0f64, 3), 24.0);
        assert_eq!(rising_factorial(&7.5f64, 0), 1.0);
        let q = ExactRational::new(BigInt::from(1), BigInt::from(2));
        // (1/2)(3/2)(5/2) = 15/8
        assert_eq!(
            rising_factorial(&q, 3),
            ExactRational::new(BigInt::from(15), BigInt::from(8))
        );
    }

    /// Independent oracle: expand y(y+1)···(y+m−1) by polynomial convolution
    /// and compare coefficient-by-coefficient against the table.
    fn rising_factorial_coeffs(m: u32) -> Vec<BigInt> {
        let mut coeffs = vec![BigInt::one()]; // polynomial 1
        for i in 0..m {
            // multiply by (y + i)
            let mut next = vec![BigInt::zero(); coeffs.len() + 1];
            for (p, c) in coeffs.iter().enumerate() {
                next[p + 1] += c;
                next[p] += c * BigInt::from(i);
            }
            coeffs = next;
        }
        coeffs
    }

    #[test]
    fn table_matches_polynomial_expansion_oracle() {
        let table = StirlingTable::new(12);
        for m in 1..=12u32 {
            let coeffs = rising_factorial_coeffs(m);
            for j in 0..=m {
                assert_eq!(table.unsigned(m, j).unwrap(), &coeffs[j as usize], "({m},{j})");
            }
        }
    }

    #[test]
    fn rising_factorial_equals_stirling_expansion_on_integer_grid() {
        // y in 0..=10, m ≤ 8, exact integers on both sides
        let table = StirlingTable::new(8);
        for m in 1..=8u32 {
            for y in 0..=10u64 {
                let lhs = rising_factorial(&ExactRational::from_u64(y), m);
                let mut rhs = ExactRational::zero();
                for j in 0..=m {
                    let c = ExactRational::from_big(table.unsigned(m, j).unwrap());
                    rhs += c * ExactRational::from_u64(y).powu(j);
                }
                assert_eq!(lhs, rhs, "mismatch at m={m} y={y}");
            }
        }
    }

    #[test]
    fn binomial_values_and_conventions() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 0), BigInt::one());
        assert_eq!(binomial(2, 5), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::one());
        assert_eq!(binomial(2, -1), BigInt::zero());
        assert_eq!(binomial(60, 30), "118264581564861424".parse::<BigInt>().unwrap());
    }

    proptest! {
        #[test]
        fn binomial_pascal_rule(a in 1u64..80, b in 0i64..80) {
            let lhs = binomial(a, b);
            let rhs = binomial(a - 1, b - 1) + binomial(a - 1, b);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn stirling_row_sums_to_factorial(m in 1u32..15) {
            // rising factorial at y = 1 is m!
            let table = StirlingTable::new(m);
            let mut sum = BigInt::zero();
            for j in 0..=m {
                sum += table.unsigned(m, j).unwrap();
            }
            prop_assert_eq!(sum, factorial(m as u64));
        }
    }
}
