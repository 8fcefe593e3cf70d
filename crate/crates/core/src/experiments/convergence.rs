//! Discrete-to-continuum comparison of side lengths at fixed probe times.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{evolve, EvolveConfig, StepSolver};
use crate::lattice::Params;
use crate::limit::{integrate, FloorBranch, FloorLaw, IntegrateConfig, LimitParams, LimitTrace, SideLengths};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(with = "crate::rational::exact")]
    pub eps: Rational,
    #[serde(with = "crate::rational::exact")]
    pub tau: Rational,
    pub t_probe: f64,
    pub l1_discrete: f64,
    pub l1_limit: f64,
    pub l2_discrete: f64,
    pub l2_limit: f64,
    /// Larger of the two side errors.
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub t_end: f64,
    /// Probe times are `t_end * i / (probes + 1)`.
    pub probes: usize,
    /// Probes closer than this to a limit event are skipped; defaults to `dt`.
    pub event_gap: Option<f64>,
    /// Integrator step of the limit trace.
    pub dt: f64,
}

impl ConvergenceConfig {
    pub fn new(t_end: f64) -> Self {
        Self { t_end, probes: 200, event_gap: None, dt: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    #[serde(with = "crate::rational::exact")]
    pub gamma: Rational,
    pub rows: Vec<ConvergenceRow>,
    /// `(eps, sup err)` per run, in the order of the input list.
    pub sup_errors: Vec<(f64, f64)>,
    /// Ratios of consecutive sup errors, coarse over fine.
    pub ratios: Vec<f64>,
    /// Probe times kept after removing the neighbourhoods of limit events.
    pub probe_times: Vec<f64>,
}

impl ConvergenceStudy {
    /// Sup errors never increase as `eps` decreases.
    pub fn monotone(&self) -> bool {
        self.sup_errors.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["eps", "tau", "t_probe", "L1_discrete", "L1_limit", "L2_discrete", "L2_limit", "err"])?;
        for r in &self.rows {
            w.write_record([
                rational::display(&r.eps),
                rational::display(&r.tau),
                r.t_probe.to_string(),
                r.l1_discrete.to_string(),
                r.l1_limit.to_string(),
                r.l2_discrete.to_string(),
                r.l2_limit.to_string(),
                r.err.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Probe times of `cfg` that stay at least the event gap away from every limit event.
pub fn probe_times(limit: &LimitTrace, cfg: &ConvergenceConfig, gap: f64) -> Vec<f64> {
    (1..=cfg.probes)
        .map(|i| cfg.t_end * i as f64 / (cfg.probes + 1) as f64)
        .filter(|&t| limit.event_times().all(|e| (t - e).abs() >= gap))
        .collect()
}

/// Runs the discrete flow for each `eps` (with `tau = gamma eps`) and compares its
/// piecewise-constant interpolation `eps * n_{floor(t / tau)}` with the limit trace.
pub fn convergence_run(
    l1: &Rational,
    l2: &Rational,
    alpha: &Rational,
    beta: &Rational,
    gamma: &Rational,
    eps_list: &[Rational],
    solver: &dyn StepSolver,
    cfg: &ConvergenceConfig,
) -> Result<ConvergenceStudy> {
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParams("eps list must be strictly decreasing".into()));
    }
    let params: Vec<Params> = eps_list
        .iter()
        .map(|e| Params::with_gamma(alpha.clone(), beta.clone(), e.clone(), gamma.clone()))
        .collect::<Result<_>>()?;
    let first = params.first().ok_or_else(|| Error::InvalidParams("empty eps list".into()))?;
    let law = FloorLaw::new(LimitParams::from_params(first), FloorBranch::for_regime(first.regime()));
    let limit = integrate(
        SideLengths::new(rational::to_f64(l1), rational::to_f64(l2)),
        &law,
        &IntegrateConfig::new(cfg.t_end, cfg.dt),
    )?;
    let gap = cfg.event_gap.unwrap_or(cfg.dt);
    let probes = probe_times(&limit, cfg, gap);
    let runs: Vec<Vec<ConvergenceRow>> = params
        .par_iter()
        .map(|p| {
            let tau = rational::to_f64(&p.tau);
            let steps = (cfg.t_end / tau).ceil() as usize + 1;
            let trace = evolve(l1, l2, p, solver, &EvolveConfig { max_steps: steps, ..EvolveConfig::default() })?;
            Ok(probes
                .iter()
                .map(|&t| {
                    let (d1, d2) = trace.lengths_after((t / tau).floor() as usize);
                    let lim = limit.at(t);
                    ConvergenceRow {
                        eps: p.eps.clone(),
                        tau: p.tau.clone(),
                        t_probe: t,
                        l1_discrete: d1,
                        l1_limit: lim.l1,
                        l2_discrete: d2,
                        l2_limit: lim.l2,
                        err: (d1 - lim.l1).abs().max((d2 - lim.l2).abs()),
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let sup_errors: Vec<(f64, f64)> = eps_list
        .iter()
        .zip(&runs)
        .map(|(e, rows)| (rational::to_f64(e), rows.iter().map(|r| r.err).fold(0.0, f64::max)))
        .collect();
    let ratios = sup_errors.windows(2).map(|w| w[0].1 / w[1].1).collect();
    Ok(ConvergenceStudy {
        gamma: gamma.clone(),
        rows: runs.into_iter().flatten().collect(),
        sup_errors,
        ratios,
        probe_times: probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::ClosedFormSolver;
    use crate::rational::{int, rat};

    #[test]
    fn pinned_datum_has_no_error() {
        let s = convergence_run(
            &int(1),
            &int(1),
            &rat(1, 8),
            &int(1),
            &int(1),
            &[rat(1, 20), rat(1, 40)],
            &ClosedFormSolver,
            &ConvergenceConfig::new(0.5),
        )
        .unwrap();
        assert!(s.rows.iter().all(|r| r.err == 0.0));
        assert_eq!(s.sup_errors.len(), 2);
    }

    #[test]
    fn rejects_unsorted_eps() {
        let e = convergence_run(
            &int(1),
            &int(1),
            &rat(1, 8),
            &int(1),
            &int(1),
            &[rat(1, 40), rat(1, 20)],
            &ClosedFormSolver,
            &ConvergenceConfig::new(0.5),
        );
        assert!(e.is_err());
    }
}
