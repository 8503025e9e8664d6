//! Sweeps over `H`, audits of the sign and monotonicity patterns, root and
//! maximum searches, extrapolated limits at `H = 1`, and the table and
//! figure data.

mod audits;
mod figures;
mod montecarlo;
mod search;
mod tables;

pub use audits::{
    check_conjectures, delta_audit, hat_rho_audit, shape_audit, AuditId, AuditStatus,
    ConjectureReport, DeltaAudit, GridFailure, HatRhoAudit, Shape, ShapeFact, Violation,
};
pub use figures::{emit_figure_data, FigureId, FigureSeries};
pub use montecarlo::{mc_residual_check, McReport};
pub use search::{
    d32_minimum, find_max, find_q2_root, limit_at_one, D32Minimum, LimitEstimate, LimitSelector,
    MaxResult, RootResult, LIMIT_GRID_SCALE, SEARCH_CAP,
};
pub use tables::{
    compare_tables, emit_tables, golden_table, parse_table_csv, parse_table_json, verify_table,
    Mismatch, Table, TableFormat, TableId, TableRow, VerifyReport,
};

use crate::error::{FgnError, Result};

/// Evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| {
                if i + 1 == points {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

/// Grid `a, a + h, ...` up to `b`, where `b` is included when it lies within `h/2`
/// of the last step.
pub fn step_grid(a: f64, b: f64, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(FgnError::Domain(format!("bad grid {a}:{b}:{h}")));
    }
    let steps = ((b - a) / h + 0.5).floor() as usize;
    if steps > 10_000_000 {
        return Err(FgnError::Domain(format!("grid {a}:{b}:{h} is too large")));
    }
    Ok((0..=steps).map(|i| a + h * i as f64).collect())
}

/// Default `H` grid of the figure data.
pub fn figure_grid() -> Vec<f64> {
    linspace(0.501, 0.9999, 512)
}

/// `{0.55, 0.60, ..., 0.95, 0.99}`.
pub fn audit_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (11..=19).map(|i| i as f64 * 0.05).collect();
    g.push(0.99);
    g
}
