//! Process-wide numerical tolerances.
//!
//! Exact algebraic identities (zero total mass, orthogonality) are checked
//! against [`Tolerances::exact`]; everything else uses
//! [`Tolerances::relative`]. Both can be overridden for a whole run with
//! [`set_tolerances`].

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

const DEFAULT_EXACT: f64 = 1e-12;
const DEFAULT_RELATIVE: f64 = 1e-10;

static EXACT_BITS: AtomicU64 = AtomicU64::new(0x3D71_9799_812D_EA11); // 1e-12
static RELATIVE_BITS: AtomicU64 = AtomicU64::new(0x3DDB_7CDF_D9D7_BDBB); // 1e-10

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub exact: f64,
    pub relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exact: DEFAULT_EXACT,
            relative: DEFAULT_RELATIVE,
        }
    }
}

/// Current global tolerances.
pub fn tolerances() -> Tolerances {
    Tolerances {
        exact: f64::from_bits(EXACT_BITS.load(Ordering::Relaxed)),
        relative: f64::from_bits(RELATIVE_BITS.load(Ordering::Relaxed)),
    }
}

/// Override the global tolerances. Non-positive or non-finite values are ignored.
pub fn set_tolerances(tol: Tolerances) {
    if tol.exact.is_finite() && tol.exact > 0.0 {
        EXACT_BITS.store(tol.exact.to_bits(), Ordering::Relaxed);
    }
    if tol.relative.is_finite() && tol.relative > 0.0 {
        RELATIVE_BITS.store(tol.relative.to_bits(), Ordering::Relaxed);
    }
}

/// Restore the built-in defaults.
pub fn reset_tolerances() {
    set_tolerances(Tolerances::default());
}
