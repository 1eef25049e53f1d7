/// Numerical thresholds shared by the analyses.
///
/// Every verdict in the crate is a comparison of a residual against one of
/// these fields, and reports record both numbers.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Max entrywise `|M - M*|` accepted as self-adjoint.
    pub herm: f64,
    /// Smallest eigenvalue that still counts as faithful.
    pub faithful: f64,
    /// SSA gap (nats) below which equality is declared.
    pub equality: f64,
    /// Relative projection residual accepted as subalgebra membership.
    pub member: f64,
    /// Relative singular-value threshold for numerical rank decisions.
    pub rank: f64,
    /// Eigenvalue gap separating minimal central projections.
    pub center_gap: f64,
    /// Max attempts when a random central element fails to separate blocks.
    pub center_retries: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            faithful: 1e-12,
            equality: 1e-8,
            member: 1e-9,
            rank: 1e-9,
            center_gap: 1e-8,
            center_retries: 5,
        }
    }
}
