//! Numerical thresholds, calibrated for f64. Generic code rescales them with
//! [`Real::tol`](crate::scalar::Real::tol).

use serde::Serialize;

/// Max-abs deviation from Hermiticity accepted for states and eigen-inputs.
pub const TOL_HERM: f64 = 1e-10;
/// Most negative eigenvalue accepted for a density operator.
pub const TOL_PSD: f64 = 1e-10;
/// Allowed deviation of a density operator's trace from 1.
pub const TOL_TRACE: f64 = 1e-10;
/// Relative eigenvalue cutoff: λ counts toward the rank when λ > EPS_RANK·dim·λ_max.
pub const EPS_RANK: f64 = 1e-10;
/// Support threshold for characteristic and Wigner tables.
pub const EPS_SUPP: f64 = 1e-10;
/// `|Ξ(x)| ≥ 1 − EPS_GRP` puts `x` in the stabilizer group.
pub const EPS_GRP: f64 = 1e-8;
/// Frobenius distance to the mean state below which a state is a stabilizer state.
pub const STAB_FROBENIUS: f64 = 1e-7;
/// Slack for closed-form inequality checks (log units).
pub const SLACK_EXACT: f64 = 1e-7;
/// Slack for inequality checks involving the conditional-entropy optimizer.
pub const SLACK_OPTIMIZER: f64 = 1e-5;
/// Entropy monotonicity slack along convolution trajectories.
pub const SLACK_MONOTONE: f64 = 1e-8;
/// Cap on `d^{2n}` for enumerations over phase space and coupling unitaries.
pub const PHASE_SPACE_CAP: usize = 1 << 16;
/// Cap on `d^n` for operations that materialise a full phase-space table.
pub const TABLE_DIM_CAP: usize = 128;

/// Snapshot of every threshold, printed into report headers.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Tolerances {
    pub tol_herm: f64,
    pub tol_psd: f64,
    pub tol_trace: f64,
    pub eps_rank: f64,
    pub eps_supp: f64,
    pub eps_grp: f64,
    pub stab_frobenius: f64,
    pub slack_exact: f64,
    pub slack_optimizer: f64,
    pub slack_monotone: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_herm: TOL_HERM,
            tol_psd: TOL_PSD,
            tol_trace: TOL_TRACE,
            eps_rank: EPS_RANK,
            eps_supp: EPS_SUPP,
            eps_grp: EPS_GRP,
            stab_frobenius: STAB_FROBENIUS,
            slack_exact: SLACK_EXACT,
            slack_optimizer: SLACK_OPTIMIZER,
            slack_monotone: SLACK_MONOTONE,
        }
    }
}
