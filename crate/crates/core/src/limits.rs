//! Resource caps for the enumerative parts of the crate.
//!
//! Tree posets and graph bases grow super-exponentially, so every
//! enumeration entry point takes a [`Limits`] value and fails with a
//! cap error instead of silently grinding.

/// Enumeration and size caps. `Default` gives caps that keep every
/// operation comfortably inside commodity-hardware budgets.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Largest leaf count for non-planar tree-poset enumeration.
    pub max_psi_nonplanar: u32,
    /// Largest leaf count for half-planar tree enumeration.
    pub max_psi_planar: u32,
    /// Largest number of monomials a single graph-module cell may hold.
    pub max_cell_monomials: usize,
    /// Column bound above which Smith normal forms are refused
    /// (field ranks remain available at any size).
    pub snf_max_cols: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_psi_nonplanar: 8,
            max_psi_planar: 10,
            max_cell_monomials: 2_000_000,
            snf_max_cols: 2000,
        }
    }
}
