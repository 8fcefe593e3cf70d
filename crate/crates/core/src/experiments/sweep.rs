//! Predicted against searched displacements over a parameter grid.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::flow::{step_minimize, RectExtents, StepSolver, Thresholds};
use crate::lattice::{Params, Rect, RectState, Regime};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub params: Params,
    /// Horizontal side.
    #[serde(with = "crate::rational::exact")]
    pub l1: Rational,
    /// Vertical side; the displacement `h` of the vertical sides is a function of it.
    #[serde(with = "crate::rational::exact")]
    pub l2: Rational,
}

/// The cartesian grid of parameters and vertical side lengths. The horizontal side equals
/// the vertical one when `other` is `None` (squares).
pub fn sweep_grid(
    alphas: &[Rational],
    betas: &[Rational],
    gammas: &[Rational],
    lengths: &[Rational],
    other: Option<&Rational>,
    eps: &Rational,
) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::new();
    for a in alphas {
        for b in betas {
            for g in gammas {
                let params = Params::with_gamma(a.clone(), b.clone(), eps.clone(), g.clone())?;
                for l in lengths {
                    out.push(SweepPoint {
                        params: params.clone(),
                        l1: other.unwrap_or(l).clone(),
                        l2: l.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub regime: Regime,
    /// Weak islands are kept (`4 alpha gamma < 1`).
    pub islands_retained: bool,
    pub predicted: Vec<(u64, u64)>,
    pub searched: Vec<(u64, u64)>,
    pub chosen: (u64, u64),
    pub agree: bool,
    pub pinned: bool,
    /// Position of the vertical side length among the thresholds.
    pub bracket: String,
}

/// Where `l` sits among the thresholds of the regime.
pub fn bracket(l: &Rational, th: &Thresholds) -> String {
    let named: Vec<(&str, &Rational)> = match th.regime {
        Regime::WeakDissolve => [
            ("lambda_c*", th.lambda_c_star.as_ref()),
            ("lambda-", th.lambda_minus.as_ref()),
            ("lambda+", th.lambda_plus.as_ref()),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.map(|v| (n, v)))
        .collect(),
        _ => th.lambda_c.iter().map(|v| ("lambda_c", v)).collect(),
    };
    if let Some((name, _)) = named.iter().find(|(_, v)| *v == l) {
        return format!("= {name}");
    }
    let below = named.iter().position(|(_, v)| l < *v);
    match below {
        Some(0) => format!("< {}", named[0].0),
        Some(i) => format!("({}, {})", named[i - 1].0, named[i].0),
        None => format!("> {}", named.last().map_or("", |n| n.0)),
    }
}

pub fn regime_sweep(points: &[SweepPoint], solver: &dyn StepSolver) -> Result<Vec<SweepRow>> {
    points
        .par_iter()
        .map(|pt| {
            let p = &pt.params;
            let ext = RectExtents::from_lengths(&pt.l1, &pt.l2, &p.eps)?;
            let state = RectState::from_rect(Rect::origin(ext.n1 as i64, ext.n2 as i64)?);
            let out = step_minimize(&state, &ext, p, solver)?;
            let th = Thresholds::new(p);
            Ok(SweepRow {
                point: pt.clone(),
                regime: th.regime,
                islands_retained: th.regime == Regime::WeakRetain,
                bracket: bracket(&pt.l2, &th),
                predicted: out.predicted,
                searched: out.ties,
                chosen: out.hk,
                agree: out.agree,
                pinned: out.pinned,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneSummary {
    /// The displacement of the vertical sides never grows with their opposite length.
    pub nonincreasing_in_l: bool,
    /// Nor does it shrink as `beta` grows at fixed `alpha`, `gamma` and lengths.
    pub nondecreasing_in_beta: bool,
    pub violations: Vec<String>,
}

pub fn monotonicity(rows: &[SweepRow]) -> MonotoneSummary {
    let key = |q: &Rational| rational::display(q);
    let mut violations = Vec::new();
    let mut by_params: BTreeMap<(String, String, String, String, bool), Vec<&SweepRow>> = BTreeMap::new();
    let mut by_lengths: BTreeMap<(String, String, String, String, String), Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        let p = &r.point.params;
        let square = r.point.l1 == r.point.l2;
        by_params
            .entry((key(&p.alpha), key(&p.beta), key(&p.gamma), key(&p.eps), square))
            .or_default()
            .push(r);
        by_lengths
            .entry((key(&p.alpha), key(&p.gamma), key(&p.eps), key(&r.point.l1), key(&r.point.l2)))
            .or_default()
            .push(r);
    }
    let mut in_l = true;
    for group in by_params.values_mut() {
        group.sort_by(|a, b| a.point.l2.cmp(&b.point.l2));
        for w in group.windows(2) {
            if w[1].chosen.0 > w[0].chosen.0 {
                in_l = false;
                violations.push(format!(
                    "h grows from {} to {} as L2 goes from {} to {}",
                    w[0].chosen.0,
                    w[1].chosen.0,
                    key(&w[0].point.l2),
                    key(&w[1].point.l2)
                ));
            }
        }
    }
    let mut in_beta = true;
    for group in by_lengths.values_mut() {
        group.sort_by(|a, b| a.point.params.beta.cmp(&b.point.params.beta));
        for w in group.windows(2) {
            if w[1].chosen.0 < w[0].chosen.0 {
                in_beta = false;
                violations.push(format!(
                    "h drops from {} to {} as beta goes from {} to {}",
                    w[0].chosen.0,
                    w[1].chosen.0,
                    key(&w[0].point.params.beta),
                    key(&w[1].point.params.beta)
                ));
            }
        }
    }
    MonotoneSummary { nonincreasing_in_l: in_l, nondecreasing_in_beta: in_beta, violations }
}
