use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::linspace;
use crate::autocov::HurstIndex;
use crate::bilateral::{bilateral_determinants, d32_derivative_profile, q_solve, BilateralLadder};
use crate::error::{FgnError, Result};
use crate::format::fmt_raw;
use crate::onesided::norm_one_sided_ladder;
use crate::parallel::par_map;

const H_LO: f64 = 0.501;
const H_HI: f64 = 0.9999;
const NORM_CURVES: [f64; 4] = [0.6, 0.7, 0.8, 0.9];
const NORM_N_MAX: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FigureId {
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    QSecond,
    D31D33,
    D32,
    D32D1,
    D32D2,
    NormsVsN,
    NormsVsH,
}

impl FigureId {
    pub const ALL: [FigureId; 12] = [
        FigureId::Q1,
        FigureId::Q2,
        FigureId::Q3,
        FigureId::Q4,
        FigureId::Q5,
        FigureId::QSecond,
        FigureId::D31D33,
        FigureId::D32,
        FigureId::D32D1,
        FigureId::D32D2,
        FigureId::NormsVsN,
        FigureId::NormsVsH,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FigureId::Q1 => "Q1",
            FigureId::Q2 => "Q2",
            FigureId::Q3 => "Q3",
            FigureId::Q4 => "Q4",
            FigureId::Q5 => "Q5",
            FigureId::QSecond => "QSECOND",
            FigureId::D31D33 => "D31_D33",
            FigureId::D32 => "D32",
            FigureId::D32D1 => "D32_D1",
            FigureId::D32D2 => "D32_D2",
            FigureId::NormsVsN => "NORMS_VS_N",
            FigureId::NormsVsH => "NORMS_VS_H",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FigureId {
    type Err = FgnError;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        FigureId::ALL
            .into_iter()
            .find(|f| f.label() == upper)
            .ok_or_else(|| FgnError::UnknownFigure(s.to_string()))
    }
}

/// One x column and several y columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureSeries {
    pub id: FigureId,
    pub x_label: String,
    pub columns: Vec<String>,
    pub x: Vec<f64>,
    /// `rows[i][c]` is column `c` at `x[i]`.
    pub rows: Vec<Vec<f64>>,
}

impl FigureSeries {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|x| x == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = std::iter::once(self.x_label.as_str())
            .chain(self.columns.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for (x, row) in self.x.iter().zip(&self.rows) {
            let cells: Vec<String> = std::iter::once(*x)
                .chain(row.iter().copied())
                .map(fmt_raw)
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({
            "meta": {"figure": self.id.label(), "x": self.x_label, "columns": self.columns},
            "rows": self.x.iter().zip(&self.rows).map(|(x, r)| {
                let mut v = vec![*x];
                v.extend(r);
                v
            }).collect::<Vec<_>>(),
        }))
        .expect("figure serializes")
    }
}

fn over_h(
    grid: &[f64],
    f: impl Fn(HurstIndex) -> Result<Vec<f64>> + Sync + Send,
) -> Result<Vec<Vec<f64>>> {
    par_map(grid, |&v| f(HurstIndex::new(v)?))
        .into_iter()
        .collect()
}

fn q_window(grid: &[f64], j: usize) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let columns = (1..=j).map(|k| format!("Q{j}^{k}")).collect();
    let rows = over_h(grid, |h| Ok(q_solve(h, j)?.as_slice().to_vec()))?;
    Ok((columns, rows))
}

/// Series behind each figure. `H`-grids have `points` evenly spaced nodes on
/// `[0.501, 0.9999]`; `NORMS_VS_N` runs over `n = 2..=500`.
pub fn emit_figure_data(id: FigureId, points: usize) -> Result<FigureSeries> {
    if points < 2 {
        return Err(FgnError::Domain(format!(
            "need at least two points, got {points}"
        )));
    }
    let grid = linspace(H_LO, H_HI, points);
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let (x_label, x, columns, rows) = match id {
        FigureId::Q1 | FigureId::Q2 | FigureId::Q3 | FigureId::Q4 | FigureId::Q5 => {
            let j = FigureId::ALL.iter().position(|f| *f == id).expect("listed") + 1;
            let (c, r) = q_window(&grid, j)?;
            ("H", grid, c, r)
        }
        FigureId::QSecond => {
            let rows = over_h(&grid, |h| {
                (2..=6).map(|j| Ok(q_solve(h, j)?.get(2))).collect()
            })?;
            (
                "H",
                grid,
                (2..=6).map(|j| format!("Q{j}^2")).collect(),
                rows,
            )
        }
        FigureId::D31D33 => {
            let rows = over_h(&grid, |h| {
                let d = bilateral_determinants(h)?;
                Ok(vec![d.d31, d.d33])
            })?;
            ("H", grid, names(&["D31", "D33"]), rows)
        }
        FigureId::D32 | FigureId::D32D1 | FigureId::D32D2 => {
            let profile = d32_derivative_profile(&grid)?;
            let (name, pick): (&str, fn(&crate::bilateral::D32ProfileRow) -> f64) = match id {
                FigureId::D32 => ("D32", |r| r.d32),
                FigureId::D32D1 => ("dD32/dH", |r| r.d1),
                _ => ("d2D32/dH2", |r| r.d2),
            };
            let rows = profile.iter().map(|r| vec![pick(r)]).collect();
            ("H", grid, names(&[name]), rows)
        }
        FigureId::NormsVsN => {
            let curves = par_map(&NORM_CURVES, |&v| -> Result<(Vec<f64>, BilateralLadder)> {
                let h = HurstIndex::new(v)?;
                Ok((
                    norm_one_sided_ladder(h, NORM_N_MAX)?,
                    BilateralLadder::new(h, NORM_N_MAX - 1)?,
                ))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let ns: Vec<f64> = (2..=NORM_N_MAX).map(|n| n as f64).collect();
            let rows = (2..=NORM_N_MAX)
                .map(|n| {
                    curves
                        .iter()
                        .flat_map(|(r1, q)| [r1[n - 2], q.norm(n - 1)])
                        .collect()
                })
                .collect();
            let columns = NORM_CURVES
                .iter()
                .flat_map(|h| [format!("R1@{h}"), format!("R2@{h}")])
                .collect();
            ("n", ns, columns, rows)
        }
        FigureId::NormsVsH => {
            let rows = over_h(&grid, |h| {
                let r1 = norm_one_sided_ladder(h, NORM_N_MAX)?;
                let q = BilateralLadder::new(h, NORM_N_MAX - 1)?;
                Ok(vec![r1[NORM_N_MAX - 2], q.norm(NORM_N_MAX - 1)])
            })?;
            ("H", grid, names(&["R1", "R2"]), rows)
        }
    };
    Ok(FigureSeries {
        id,
        x_label: x_label.to_string(),
        columns,
        x,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilateral::norm_bilateral;

    #[test]
    fn ids_parse() {
        for id in FigureId::ALL {
            assert_eq!(id.label().parse::<FigureId>().unwrap(), id);
        }
        assert!("Q6".parse::<FigureId>().is_err());
    }

    #[test]
    fn q1_starts_near_zero_and_rises() {
        let s = emit_figure_data(FigureId::Q1, 64).unwrap();
        let y = s.column("Q1^1").unwrap();
        assert!(y[0] > 0.0 && y[0] < 2e-3);
        assert!(y.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(s.to_csv().lines().count(), 65);
    }

    #[test]
    fn d32_turns_negative_near_one() {
        let s = emit_figure_data(FigureId::D32, 512).unwrap();
        let y = s.column("D32").unwrap();
        for (h, v) in s.x.iter().zip(&y) {
            if *h > 0.9935 {
                assert!(*v < 0.0, "{h} {v}");
            } else if *h < 0.9925 {
                assert!(*v > 0.0, "{h} {v}");
            }
        }
    }

    #[test]
    fn norm_curves_use_the_ladder_faithfully() {
        let s = emit_figure_data(FigureId::NormsVsH, 8).unwrap();
        let r2 = s.column("R2").unwrap();
        assert!(r2.windows(2).all(|w| w[1] > w[0]));
        let h = HurstIndex::new(s.x[3]).unwrap();
        assert!((r2[3] - norm_bilateral(h, NORM_N_MAX).unwrap()).abs() < 1e-8);
    }
}
