use std::path::Path;

use anyhow::{bail, Context};
use serde::Serialize;

use mushy::experiments::{
    algebra_check, convergence_run, markdown_report, monotonicity, regime_sweep, sweep_grid, AlgebraCase,
    AlgebraReport, ConvergenceConfig, Fault, ReportInput, SweepRow,
};
use mushy::flow::{evolve, EvolveConfig, SolverRegistry, Thresholds};
use mushy::limit::{integrate, IntegrateConfig, LawRegistry, SideLengths};
use mushy::oracle::{exhaustive_minimize, search_sites, OracleConfig, MAX_SITES};
use mushy::rational::{display, int};
use mushy::{DiscreteSet, Params, Rational};

use crate::args::{
    AlgebraArgs, Command, Condo, ConvergenceArgs, DiscreteArgs, FaultArg, LimitArgs, OracleArgs, ParamArgs,
    ReportArgs, SweepArgs, ThresholdsArgs,
};
use crate::output::{Format, Sink};
use crate::{Usage, Violation};

/// Branch and bound handles collared rectangles up to one machine word of sites.
const PRUNED_MAX_SITES: usize = 63;

pub fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Thresholds(a) => thresholds(a),
        Command::SimulateDiscrete(a) => simulate_discrete(a),
        Command::SimulateLimit(a) => simulate_limit(a),
        Command::Oracle(a) => oracle(a),
        Command::AlgebraCheck(a) => algebra(a),
        Command::Convergence(a) => convergence(a),
        Command::Sweep(a) => sweep(a),
        Command::Report(a) => report(a),
    }
}

/// Resolves `eps`, `tau` and `gamma`. Commands that never look at the lattice pass
/// `need_eps = false` and get `eps = 1` when it is absent.
fn resolve_params(a: &ParamArgs, need_eps: bool) -> anyhow::Result<Params> {
    let (alpha, beta) = (a.alpha.clone(), a.beta.clone());
    let p = match (&a.eps, &a.tau, &a.gamma) {
        (Some(eps), Some(tau), gamma) => {
            let p = Params::new(alpha, beta, eps.clone(), tau.clone())?;
            if let Some(g) = gamma {
                if *g != p.gamma {
                    bail!(Usage(format!(
                        "gamma {} differs from tau / eps = {}",
                        display(g),
                        display(&p.gamma)
                    )));
                }
            }
            p
        }
        (Some(eps), None, Some(g)) => Params::with_gamma(alpha, beta, eps.clone(), g.clone())?,
        (None, Some(tau), Some(g)) if !need_eps => {
            Params::with_gamma(alpha, beta, tau / g, g.clone())?
        }
        (None, None, Some(g)) if !need_eps => Params::with_gamma(alpha, beta, int(1), g.clone())?,
        _ if need_eps => bail!(Usage("give --eps together with --gamma or --tau".into())),
        _ => bail!(Usage("give --gamma, or --eps and --tau".into())),
    };
    Ok(p)
}

fn to_json(value: &impl Serialize) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

#[derive(Serialize)]
struct ThresholdsOut<'a> {
    #[serde(with = "mushy::rational::exact")]
    alpha: Rational,
    #[serde(with = "mushy::rational::exact")]
    beta: Rational,
    #[serde(with = "mushy::rational::exact")]
    gamma: Rational,
    #[serde(with = "mushy::rational::exact")]
    four_alpha_gamma: Rational,
    #[serde(flatten)]
    thresholds: &'a Thresholds,
}

fn thresholds(a: ThresholdsArgs) -> anyhow::Result<()> {
    let p = resolve_params(&a.params, false)?;
    let th = Thresholds::new(&p);
    let sink = Sink::new(a.output.out.as_deref(), Format::Json, &[Format::Json, Format::Csv])?;
    let named = [
        ("lambda_c", &th.lambda_c),
        ("lambda_c_star", &th.lambda_c_star),
        ("lambda_minus", &th.lambda_minus),
        ("lambda_plus", &th.lambda_plus),
    ];
    match sink.format {
        Format::Csv => {
            let mut text = String::from("name,value\n");
            text.push_str(&format!("regime,{}\n", th.regime.name()));
            text.push_str(&format!("four_alpha_gamma,{}\n", display(&p.four_alpha_gamma())));
            for (name, v) in named {
                text.push_str(&format!("{name},{}\n", v.as_ref().map_or(String::new(), display)));
            }
            text.push_str(&format!("n_ag,{}\n", th.n_ag.map_or(String::new(), |n| n.to_string())));
            sink.write_str(&text)?;
        }
        _ => sink.write_str(&to_json(&ThresholdsOut {
            alpha: p.alpha.clone(),
            beta: p.beta.clone(),
            gamma: p.gamma.clone(),
            four_alpha_gamma: p.four_alpha_gamma(),
            thresholds: &th,
        })?)?,
    }
    let mut line = format!("regime {}", th.regime.name());
    for (name, v) in named {
        if let Some(v) = v {
            line.push_str(&format!(" {name} = {}", display(v)));
        }
    }
    if let Some(n) = th.n_ag {
        line.push_str(&format!(" N = {n}"));
    }
    eprintln!("{line}");
    Ok(())
}

fn simulate_discrete(a: DiscreteArgs) -> anyhow::Result<()> {
    let p = resolve_params(&a.params, true)?;
    let sink = Sink::new(a.output.out.as_deref(), Format::Json, &[Format::Json, Format::Csv])?;
    let registry = SolverRegistry::with_defaults();
    let solver = registry.get(&a.solver)?;
    let cfg = EvolveConfig {
        max_steps: a.steps,
        strict_condo: a.condo == Condo::Strict,
        check_agreement: a.check,
    };
    let trace = evolve(&a.l1, &a.l2, &p, solver, &cfg)?;
    match sink.format {
        Format::Csv => sink.write(|w| Ok(trace.write_csv(w)?))?,
        _ => sink.write_str(&trace.to_json()?)?,
    }
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    let (l1, l2) = trace.lengths_after(trace.steps.len());
    eprintln!(
        "steps={} L1={l1} L2={l2} pinned={} vanished={}",
        trace.steps.len(),
        trace.pinned(),
        trace.vanished()
    );
    let disagreements: Vec<usize> = trace
        .steps
        .iter()
        .filter(|s| s.solvers_agree == Some(false))
        .map(|s| s.step)
        .collect();
    if !disagreements.is_empty() {
        bail!(Violation(format!("solvers disagree at steps {disagreements:?}")));
    }
    Ok(())
}

fn simulate_limit(a: LimitArgs) -> anyhow::Result<()> {
    let p = resolve_params(&a.params, false)?;
    let sink = Sink::new(a.output.out.as_deref(), Format::Json, &[Format::Json, Format::Csv])?;
    let law = LawRegistry::with_defaults().build(&a.law, &p)?;
    let mut cfg = IntegrateConfig::new(a.t_end, a.dt);
    cfg.vanish_tol = a.vanish_tol;
    let trace = integrate(SideLengths::new(a.l1, a.l2), law.as_ref(), &cfg)?;
    match sink.format {
        Format::Csv => sink.write(|w| Ok(trace.write_csv(w)?))?,
        _ => sink.write_str(&trace.to_json()?)?,
    }
    let last = trace.states.last().expect("traces start with the initial state");
    eprintln!(
        "law={} events={} L1={} L2={} pinned={} vanished_at={}",
        law.name(),
        trace.events.len(),
        last.l1,
        last.l2,
        trace.pinned(),
        trace.vanished_at().map_or("-".into(), |t| t.to_string())
    );
    Ok(())
}

fn read_sites(path: &Path) -> anyhow::Result<DiscreteSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let set = if path.extension().is_some_and(|e| e == "json") {
        DiscreteSet::from_json(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?
    } else {
        DiscreteSet::from_text(&text)?
    };
    Ok(set)
}

fn oracle(a: OracleArgs) -> anyhow::Result<()> {
    let p = resolve_params(&a.params, true)?;
    let sink = Sink::new(a.output.out.as_deref(), Format::Json, &[Format::Json, Format::Csv])?;
    let prev = match (a.width, a.height, &a.sites) {
        (Some(w), Some(h), None) => {
            if w < 0 || h < 0 {
                bail!(Usage("--width and --height must be nonnegative".into()));
            }
            DiscreteSet::rect(0, w, 0, h)
        }
        (None, None, Some(path)) => read_sites(path)?,
        _ => bail!(Usage("give --width and --height, or --sites".into())),
    };
    let sites = search_sites(&prev, a.collar).len();
    let prune = a.prune || sites > MAX_SITES;
    if prune && !a.prune {
        eprintln!("note: {sites} sites exceed the enumeration limit {MAX_SITES}; using branch and bound");
    }
    let cfg = OracleConfig {
        collar: a.collar,
        prune,
        max_sites: if prune { PRUNED_MAX_SITES } else { MAX_SITES },
        max_listed: a.max_listed,
    };
    let report = exhaustive_minimize(&prev, &p, &cfg)?;
    match sink.format {
        Format::Csv => {
            let mut text = String::from("minimizer,i1,i2\n");
            for (n, m) in report.minimizers.iter().enumerate() {
                for s in m.iter() {
                    text.push_str(&format!("{n},{},{}\n", s.i1, s.i2));
                }
            }
            sink.write_str(&text)?;
        }
        _ => sink.write_str(&report.to_json()?)?,
    }
    eprintln!("{}", report.summary());
    let mut failed = Vec::new();
    if !report.subset_ok {
        failed.push("a minimizer leaves the previous set");
    }
    if !report.structure_ok {
        failed.push("a minimizer is not a rectangle plus weak islands");
    }
    if report.matches_structured == Some(false) {
        failed.push("the structured candidates miss the global minimum");
    }
    if !failed.is_empty() {
        bail!(Violation(format!("eps too large for the structure theorem: {}", failed.join("; "))));
    }
    Ok(())
}

fn algebra(a: AlgebraArgs) -> anyhow::Result<()> {
    let p = resolve_params(&a.params, true)?;
    let sink = Sink::new(a.output.out.as_deref(), Format::Json, &[Format::Json, Format::Csv])?;
    let fault = match a.fault {
        FaultArg::None => Fault::None,
        FaultArg::OmitRho1 => Fault::OmitRho1,
    };
    let case = AlgebraCase { params: p, l1: a.l1, l2: a.l2, max_hk: (a.max_index, a.max_index) };
    let r = algebra_check(&case, fault)?;
    match sink.format {
        Format::Csv => sink.write_str(&format!(
            "regime,condo,n1,n2,checked,max_discrepancy,worst_h,worst_k\n{},{},{},{},{},{},{},{}\n",
            r.regime.name(),
            r.condo,
            r.n1,
            r.n2,
            r.checked,
            display(&r.max_discrepancy),
            r.worst.map_or(String::new(), |w| w.0.to_string()),
            r.worst.map_or(String::new(), |w| w.1.to_string()),
        ))?,
        _ => sink.write_str(&to_json(&r)?)?,
    }
    eprintln!(
        "checked={} max_discrepancy={} regime={} condo={}",
        r.checked,
        display(&r.max_discrepancy),
        r.regime.name(),
        r.condo
    );
    algebra_verdict(&r, fault)
}

fn algebra_verdict(r: &AlgebraReport, fault: Fault) -> anyhow::Result<()> {
    match fault {
        Fault::None if r.max_discrepancy != int(0) => {
            bail!(Violation("closed forms and lattice evaluation differ".into()))
        }
        Fault::OmitRho1 if r.fault_accounted == Some(false) => {
            bail!(Violation("the injected fault does not explain the discrepancy".into()))
        }
        _ => Ok(()),
    }
}

fn convergence(a: ConvergenceArgs) -> anyhow::Result<()> {
    let sink = Sink::new(a.output.out.as_deref(), Format::Json, &[Format::Json, Format::Csv])?;
    let registry = SolverRegistry::with_defaults();
    let solver = registry.get(&a.solver)?;
    let cfg = ConvergenceConfig { t_end: a.t_end, probes: a.probes, event_gap: None, dt: a.dt };
    let study = convergence_run(&a.l1, &a.l2, &a.alpha, &a.beta, &a.gamma, &a.eps_list, solver, &cfg)?;
    match sink.format {
        Format::Csv => sink.write(|w| Ok(study.write_csv(w)?))?,
        _ => sink.write_str(&to_json(&study)?)?,
    }
    let errors: Vec<String> = study.sup_errors.iter().map(|(e, err)| format!("{e}:{err:.3e}")).collect();
    let ratios: Vec<String> = study.ratios.iter().map(|r| format!("{r:.3}")).collect();
    eprintln!(
        "sup_errors=[{}] ratios=[{}] probes={} monotone={}",
        errors.join(" "),
        ratios.join(" "),
        study.probe_times.len(),
        study.monotone()
    );
    Ok(())
}

fn sweep_rows(a: &SweepArgs) -> anyhow::Result<Vec<SweepRow>> {
    let points = sweep_grid(&a.alphas, &a.betas, &a.gammas, &a.lengths, a.other.as_ref(), &a.eps)?;
    if points.is_empty() {
        bail!(Usage("the sweep grid is empty".into()));
    }
    let registry = SolverRegistry::with_defaults();
    Ok(regime_sweep(&points, registry.get(&a.solver)?)?)
}

fn pairs(v: &[(u64, u64)]) -> String {
    v.iter().map(|(h, k)| format!("{h}:{k}")).collect::<Vec<_>>().join(" ")
}

fn sweep(a: SweepArgs) -> anyhow::Result<()> {
    let sink = Sink::new(a.output.out.as_deref(), Format::Json, &[Format::Json, Format::Csv])?;
    let rows = sweep_rows(&a)?;
    match sink.format {
        Format::Csv => {
            let mut text = String::from(
                "alpha,beta,gamma,eps,L1,L2,regime,bracket,islands_retained,predicted,searched,h,k,agree,pinned\n",
            );
            for r in &rows {
                let p = &r.point.params;
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    display(&p.alpha),
                    display(&p.beta),
                    display(&p.gamma),
                    display(&p.eps),
                    display(&r.point.l1),
                    display(&r.point.l2),
                    r.regime.name(),
                    r.bracket,
                    r.islands_retained,
                    pairs(&r.predicted),
                    pairs(&r.searched),
                    r.chosen.0,
                    r.chosen.1,
                    r.agree,
                    r.pinned
                ));
            }
            sink.write_str(&text)?;
        }
        _ => sink.write_str(&to_json(&rows)?)?,
    }
    let m = monotonicity(&rows);
    eprintln!(
        "points={} agree={} nonincreasing_in_l={} nondecreasing_in_beta={}",
        rows.len(),
        rows.iter().filter(|r| r.agree).count(),
        m.nonincreasing_in_l,
        m.nondecreasing_in_beta
    );
    Ok(())
}

fn report(a: ReportArgs) -> anyhow::Result<()> {
    let sink = Sink::new(a.sweep.output.out.as_deref(), Format::Markdown, &[Format::Markdown])?;
    let rows = sweep_rows(&a.sweep)?;
    let mut thresholds: Vec<Params> = Vec::new();
    for r in &rows {
        if !thresholds.contains(&r.point.params) {
            thresholds.push(r.point.params.clone());
        }
    }
    let algebra = thresholds
        .iter()
        .map(|p| {
            let l = &a.sweep.lengths[0];
            let case = AlgebraCase {
                params: p.clone(),
                l1: a.sweep.other.clone().unwrap_or_else(|| l.clone()),
                l2: l.clone(),
                max_hk: (4, 4),
            };
            algebra_check(&case, Fault::None)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let convergence = match (&a.l0, &a.eps_list) {
        (Some(l0), Some(eps_list)) => {
            let p = &thresholds[0];
            let registry = SolverRegistry::with_defaults();
            let study = convergence_run(
                l0,
                l0,
                &p.alpha,
                &p.beta,
                &p.gamma,
                eps_list,
                registry.get(&a.sweep.solver)?,
                &ConvergenceConfig::new(a.t_end),
            )?;
            Some(study)
        }
        _ => None,
    };
    let text = markdown_report(&ReportInput { thresholds, sweep: rows, convergence, algebra });
    sink.write_str(&text)?;
    eprintln!("report sections written");
    Ok(())
}
