//! Exact tower values `Δ_k(0) = k`, `Δ_k(m+1) = k^{Δ_k(m)}`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Largest integer size, in bits, that the workbench materialises.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// `Δ_k(m)`, refusing with [`Error::TowerOverflow`] once a value would
/// exceed `budget_bits`.
pub fn delta_k(k: u32, m: u32, budget_bits: u64) -> Result<BigUint> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("tower base must be >= 2, got {k}")));
    }
    let mut value = BigUint::from(k);
    let log2_k = f64::from(k).log2();
    for level in 1..=m {
        let exponent = value
            .to_u64()
            .filter(|&e| (e as f64) * log2_k <= budget_bits as f64)
            .ok_or_else(|| {
                Error::TowerOverflow(format!("Δ_{k}({level}) exceeds the {budget_bits}-bit budget"))
            })?;
        value = BigUint::from(k).pow(exponent as u32);
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_towers() {
        assert_eq!(delta_k(2, 0, DEFAULT_BIT_BUDGET).unwrap(), BigUint::from(2u32));
        assert_eq!(delta_k(2, 1, DEFAULT_BIT_BUDGET).unwrap(), BigUint::from(4u32));
        assert_eq!(delta_k(2, 2, DEFAULT_BIT_BUDGET).unwrap(), BigUint::from(16u32));
        assert_eq!(delta_k(2, 3, DEFAULT_BIT_BUDGET).unwrap(), BigUint::from(65536u32));
        assert_eq!(delta_k(3, 1, DEFAULT_BIT_BUDGET).unwrap(), BigUint::from(27u32));
        assert_eq!(delta_k(3, 2, DEFAULT_BIT_BUDGET).unwrap(), BigUint::from(7_625_597_484_987u64));
    }

    #[test]
    fn delta_2_4_fits_default_budget() {
        let v = delta_k(2, 4, DEFAULT_BIT_BUDGET).unwrap();
        assert_eq!(v.bits(), 65537);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(delta_k(2, 5, DEFAULT_BIT_BUDGET), Err(Error::TowerOverflow(_))));
        assert!(matches!(delta_k(3, 3, DEFAULT_BIT_BUDGET), Err(Error::TowerOverflow(_))));
        assert!(matches!(delta_k(2, 3, 8), Err(Error::TowerOverflow(_))));
        assert!(delta_k(1, 0, DEFAULT_BIT_BUDGET).is_err());
    }
}
