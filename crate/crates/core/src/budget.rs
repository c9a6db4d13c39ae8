//! Decision-node budgets for the exhaustive searches.

use serde::{Deserialize, Serialize};

/// Maximum number of decision nodes a search may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget(pub u64);

impl Budget {
    pub const UNLIMITED: Budget = Budget(u64::MAX);

    pub fn meter(self) -> Meter {
        Meter {
            limit: self.0,
            used: 0,
            exhausted: false,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget(50_000_000)
    }
}

/// Running node count against a [`Budget`].
#[derive(Clone, Debug)]
pub struct Meter {
    limit: u64,
    used: u64,
    exhausted: bool,
}

impl Meter {
    /// Charges one node; returns false once the budget is spent.
    #[inline]
    pub fn tick(&mut self) -> bool {
        self.charge(1)
    }

    #[inline]
    pub fn charge(&mut self, nodes: u64) -> bool {
        if self.exhausted {
            return false;
        }
        if self.limit - self.used < nodes {
            self.used = self.limit;
            self.exhausted = true;
            return false;
        }
        self.used += nodes;
        true
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }
}
