//! Grid audits of the open conjectures and of the observed coefficient
//! patterns. Everything here reports what was seen on the grid; nothing is
//! asserted as a theorem.

use serde::Serialize;

use crate::autocov::{hat_rho, HurstIndex};
use crate::bilateral::{q_solve, BilateralCoefficients};
use crate::error::{FgnError, Result};
use crate::gramians::{build_gram, cholesky, GramKind};
use crate::onesided::{delta_n, gamma_solve, OneSidedCoefficients};
use crate::parallel::par_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AuditId {
    /// Rows of the fBm Cholesky triangle strictly decrease.
    A1,
    /// `l_{j,k} > l_{j+1,k+1}` for the fGn triangle.
    A2,
    /// `Gamma_n^k > 0`.
    A3,
    /// Bilateral coefficients positive except possibly `Q_j^2`, `j >= 3`.
    #[serde(rename = "Q2SIGN")]
    Q2Sign,
    /// `Q_j^1 > Q_j^k` for `k >= 2`.
    #[serde(rename = "QDOMINANCE")]
    QDominance,
    /// `Q_j^k > Q_{j+1}^k`.
    #[serde(rename = "QCOLUMN")]
    QColumn,
    /// Positive `Gamma_n` implies `Gamma_{n+1}^{n+1} > 0` and `delta_n < 0`.
    #[serde(rename = "PROP22")]
    Prop22,
}

impl AuditId {
    pub const ALL: [AuditId; 7] = [
        AuditId::A1,
        AuditId::A2,
        AuditId::A3,
        AuditId::Q2Sign,
        AuditId::QDominance,
        AuditId::QColumn,
        AuditId::Prop22,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AuditId::A1 => "A1",
            AuditId::A2 => "A2",
            AuditId::A3 => "A3",
            AuditId::Q2Sign => "Q2SIGN",
            AuditId::QDominance => "QDOMINANCE",
            AuditId::QColumn => "QCOLUMN",
            AuditId::Prop22 => "PROP22",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditStatus {
    HoldsOnGrid,
    Violated,
    /// No violation seen, but some grid points failed numerically.
    Incomplete,
}

impl AuditStatus {
    pub fn label(self) -> &'static str {
        match self {
            AuditStatus::HoldsOnGrid => "holds-on-grid",
            AuditStatus::Violated => "violated",
            AuditStatus::Incomplete => "incomplete",
        }
    }
}

/// Location of a failed inequality; `value` is the signed margin or the
/// offending coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub hurst: f64,
    pub n: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFailure {
    pub hurst: f64,
    pub n: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub id: AuditId,
    pub grid: Vec<f64>,
    pub n_max: usize,
    pub status: AuditStatus,
    /// Number of inequalities evaluated.
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<Violation>,
    pub failures: Vec<GridFailure>,
    /// Negative `Q_j^2`, `j >= 3` (Q2SIGN only).
    pub sightings: Vec<Violation>,
}

#[derive(Default)]
struct Tally {
    checked: usize,
    violations: usize,
    first: Option<Violation>,
    failures: Vec<GridFailure>,
    sightings: Vec<Violation>,
}

impl Tally {
    fn check(&mut self, ok: bool, v: Violation) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            self.first.get_or_insert(v);
        }
    }

    fn fail(&mut self, hurst: f64, n: usize, e: &FgnError) {
        self.failures.push(GridFailure {
            hurst,
            n,
            message: e.to_string(),
        });
    }

    fn absorb(&mut self, other: Tally) {
        self.checked += other.checked;
        self.violations += other.violations;
        if self.first.is_none() {
            self.first = other.first;
        }
        self.failures.extend(other.failures);
        self.sightings.extend(other.sightings);
    }
}

fn audit_a1(h: HurstIndex, n_max: usize) -> Tally {
    let mut t = Tally::default();
    match build_gram(h, GramKind::Fbm, n_max).and_then(|g| cholesky(&g)) {
        Ok(tri) => {
            for r in 2..=n_max {
                for j in 1..r {
                    let margin = tri.entry(j, r) - tri.entry(j + 1, r);
                    t.check(
                        margin > 0.0,
                        Violation {
                            hurst: h.value(),
                            n: r,
                            k: j,
                            value: margin,
                        },
                    );
                }
            }
        }
        Err(e) => t.fail(h.value(), n_max, &e),
    }
    t
}

fn audit_a2(h: HurstIndex, n_max: usize) -> Tally {
    let mut t = Tally::default();
    match build_gram(h, GramKind::Fgn, n_max).and_then(|g| cholesky(&g)) {
        Ok(tri) => {
            for k in 1..n_max {
                for j in 1..=k {
                    let margin = tri.entry(j, k) - tri.entry(j + 1, k + 1);
                    t.check(
                        margin > 0.0,
                        Violation {
                            hurst: h.value(),
                            n: k,
                            k: j,
                            value: margin,
                        },
                    );
                }
            }
        }
        Err(e) => t.fail(h.value(), n_max, &e),
    }
    t
}

fn audit_gamma(h: HurstIndex, n_max: usize) -> (Tally, Tally) {
    let mut a3 = Tally::default();
    let mut chain = Tally::default();
    let v = h.value();
    let gammas: Vec<Option<OneSidedCoefficients>> = (2..=n_max)
        .map(|n| match gamma_solve(h, n) {
            Ok(g) => Some(g),
            Err(e) => {
                a3.fail(v, n, &e);
                None
            }
        })
        .collect();
    for g in gammas.iter().flatten() {
        for (k, x) in g.iter() {
            a3.check(
                x > 0.0,
                Violation {
                    hurst: v,
                    n: g.n,
                    k,
                    value: x,
                },
            );
        }
    }
    for n in 2..n_max {
        let (Some(cur), Some(next)) = (&gammas[n - 2], &gammas[n - 1]) else {
            continue;
        };
        if cur.iter().any(|(_, x)| x <= 0.0) {
            continue;
        }
        let last = next.get(n + 1);
        chain.check(
            last > 0.0,
            Violation {
                hurst: v,
                n: n + 1,
                k: n + 1,
                value: last,
            },
        );
        match delta_n(h, n) {
            Ok(d) => chain.check(
                d < 0.0,
                Violation {
                    hurst: v,
                    n,
                    k: 0,
                    value: d,
                },
            ),
            Err(e) => chain.fail(v, n, &e),
        }
    }
    (a3, chain)
}

fn audit_bilateral(h: HurstIndex, n_max: usize) -> [Tally; 3] {
    let mut sign = Tally::default();
    let mut dom = Tally::default();
    let mut col = Tally::default();
    let v = h.value();
    let windows: Vec<Option<BilateralCoefficients>> = (1..=n_max)
        .map(|j| match q_solve(h, j) {
            Ok(q) => Some(q),
            Err(e) => {
                sign.fail(v, j, &e);
                None
            }
        })
        .collect();
    for q in windows.iter().flatten() {
        let j = q.window;
        for k in 1..=j {
            let x = q.get(k);
            let at = Violation {
                hurst: v,
                n: j,
                k,
                value: x,
            };
            if k == 2 && j >= 3 {
                sign.checked += 1;
                if x <= 0.0 {
                    sign.sightings.push(at);
                }
            } else {
                sign.check(x > 0.0, at);
            }
            if k >= 2 {
                let margin = q.get(1) - x;
                dom.check(
                    margin > 0.0,
                    Violation {
                        value: margin,
                        ..at
                    },
                );
            }
        }
    }
    for pair in windows.windows(2) {
        if let [Some(a), Some(b)] = pair {
            for k in 1..=a.window {
                let margin = a.get(k) - b.get(k);
                col.check(
                    margin > 0.0,
                    Violation {
                        hurst: v,
                        n: a.window,
                        k,
                        value: margin,
                    },
                );
            }
        }
    }
    [sign, dom, col]
}

fn report(id: AuditId, grid: &[f64], n_max: usize, t: Tally) -> ConjectureReport {
    let status = if t.violations > 0 {
        AuditStatus::Violated
    } else if !t.failures.is_empty() {
        AuditStatus::Incomplete
    } else {
        AuditStatus::HoldsOnGrid
    };
    ConjectureReport {
        id,
        grid: grid.to_vec(),
        n_max,
        status,
        checked: t.checked,
        violations: t.violations,
        first_violation: t.first,
        failures: t.failures,
        sightings: t.sightings,
    }
}

/// Runs every audit in [`AuditId::ALL`] for each `H` in `grid` and sizes up to
/// `n_max`. Grid points are processed in parallel; violations are reported in
/// grid order.
pub fn check_conjectures(grid: &[f64], n_max: usize) -> Result<Vec<ConjectureReport>> {
    if n_max < 2 {
        return Err(FgnError::Domain(format!(
            "n_max must be at least 2, got {n_max}"
        )));
    }
    let hs = grid
        .iter()
        .map(|&v| {
            if v > 0.5 && v < 1.0 {
                HurstIndex::new(v)
            } else {
                Err(FgnError::Domain(format!(
                    "audit grid point {v} outside (0.5, 1)"
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let per_point = par_map(&hs, |&h| {
        let (a3, chain) = audit_gamma(h, n_max);
        let [sign, dom, col] = audit_bilateral(h, n_max);
        [
            audit_a1(h, n_max),
            audit_a2(h, n_max),
            a3,
            sign,
            dom,
            col,
            chain,
        ]
    });
    let mut totals: [Tally; 7] = Default::default();
    for point in per_point {
        for (acc, t) in totals.iter_mut().zip(point) {
            acc.absorb(t);
        }
    }
    Ok(AuditId::ALL
        .iter()
        .zip(totals)
        .map(|(&id, t)| report(id, grid, n_max, t))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HatRhoAudit {
    pub points: usize,
    pub all_positive: bool,
    pub min_value: f64,
    pub argmin: f64,
    pub at_half: f64,
    pub at_one: f64,
}

/// `hat_rho` on the interior points of `(0.5, 1)` with spacing `step`, plus
/// both endpoints.
pub fn hat_rho_audit(step: f64) -> Result<HatRhoAudit> {
    if !(step > 0.0 && step < 0.5) {
        return Err(FgnError::Domain(format!("step {step} outside (0, 0.5)")));
    }
    let count = (0.5 / step).round() as usize;
    let interior: Vec<f64> = (1..count)
        .map(|i| 0.5 + step * i as f64)
        .filter(|&v| v < 1.0)
        .collect();
    let values = par_map(&interior, |&v| hat_rho(HurstIndex::new(v)?));
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    let (mut min_value, mut argmin) = (f64::INFINITY, f64::NAN);
    for (&h, &v) in interior.iter().zip(&values) {
        if v < min_value {
            min_value = v;
            argmin = h;
        }
    }
    Ok(HatRhoAudit {
        points: interior.len(),
        all_positive: values.iter().all(|&v| v > 0.0),
        min_value,
        argmin,
        at_half: hat_rho(HurstIndex::new(0.5)?)?,
        at_one: hat_rho(HurstIndex::one())?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaAudit {
    pub checked: usize,
    pub max_value: f64,
    pub first_nonnegative: Option<Violation>,
}

/// `delta_n < 0` for `n = 2..=n_max` on the grid.
pub fn delta_audit(grid: &[f64], n_max: usize) -> Result<DeltaAudit> {
    let cells: Vec<(f64, usize)> = grid
        .iter()
        .flat_map(|&h| (2..=n_max).map(move |n| (h, n)))
        .collect();
    let values = par_map(&cells, |&(h, n)| delta_n(HurstIndex::new(h)?, n));
    let mut out = DeltaAudit {
        checked: 0,
        max_value: f64::NEG_INFINITY,
        first_nonnegative: None,
    };
    for (&(h, n), v) in cells.iter().zip(values) {
        let v = v?;
        out.checked += 1;
        out.max_value = out.max_value.max(v);
        if v >= 0.0 && out.first_nonnegative.is_none() {
            out.first_nonnegative = Some(Violation {
                hurst: h,
                n,
                k: 0,
                value: v,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Increasing,
    Unimodal,
}

/// Whether `Q_j^k(H)` has the expected shape on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeFact {
    pub window: usize,
    pub k: usize,
    pub expected: Shape,
    pub holds: bool,
    /// `H` at the maximum on the grid.
    pub peak: f64,
    /// First grid point where the expected shape breaks.
    pub break_at: Option<f64>,
}

fn shape_fact(window: usize, k: usize, grid: &[f64], ys: &[f64]) -> ShapeFact {
    let expected = if k == 1 {
        Shape::Increasing
    } else {
        Shape::Unimodal
    };
    let peak_idx = ys
        .iter()
        .enumerate()
        .fold(0, |best, (i, &y)| if y > ys[best] { i } else { best });
    let limit = if expected == Shape::Increasing {
        ys.len() - 1
    } else {
        peak_idx
    };
    let mut break_at = None;
    for i in 1..ys.len() {
        let ok = if i <= limit {
            ys[i] > ys[i - 1]
        } else {
            ys[i] < ys[i - 1]
        };
        if !ok {
            break_at = Some(grid[i]);
            break;
        }
    }
    ShapeFact {
        window,
        k,
        expected,
        holds: break_at.is_none(),
        peak: grid[peak_idx],
        break_at,
    }
}

/// Shape of every `Q_j^k(H)`, `j <= j_max`, along `grid` (sorted ascending).
pub fn shape_audit(grid: &[f64], j_max: usize) -> Result<Vec<ShapeFact>> {
    if grid.len() < 2 {
        return Err(FgnError::Domain(
            "shape audit needs at least two grid points".into(),
        ));
    }
    let rows = par_map(grid, |&v| {
        let h = HurstIndex::new(v)?;
        (1..=j_max)
            .map(|j| q_solve(h, j))
            .collect::<Result<Vec<_>>>()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut facts = Vec::new();
    for j in 1..=j_max {
        for k in 1..=j {
            let ys: Vec<f64> = rows.iter().map(|r| r[j - 1].get(k)).collect();
            facts.push(shape_fact(j, k, grid, &ys));
        }
    }
    Ok(facts)
}
