/// Relative thresholds for the genericity checks.
///
/// An eigenvalue is simple when its distance to both neighbours exceeds
/// `gap_rel · max(1, scale)`, where `scale` is `‖H‖_F` for matrices and
/// `|λ|` for metric graphs. An eigenfunction vanishes at a vertex when its
/// value there is at most `vanish_rel · ‖ψ‖∞`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub gap_rel: f64,
    pub vanish_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gap_rel: 1e-8,
            vanish_rel: 1e-8,
        }
    }
}
