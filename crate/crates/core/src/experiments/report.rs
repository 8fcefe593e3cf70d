//! Markdown summary of experiment outputs.

use std::fmt::Write;

use super::algebra::AlgebraReport;
use super::convergence::ConvergenceStudy;
use super::sweep::{monotonicity, SweepRow};
use crate::flow::Thresholds;
use crate::lattice::Params;
use crate::rational::display;

fn opt(q: &Option<crate::Rational>) -> String {
    q.as_ref().map_or("-".into(), display)
}

/// Everything a report can show; empty sections are left out.
#[derive(Debug, Clone, Default)]
pub struct ReportInput {
    pub thresholds: Vec<Params>,
    pub sweep: Vec<SweepRow>,
    pub convergence: Option<ConvergenceStudy>,
    pub algebra: Vec<AlgebraReport>,
}

pub fn markdown_report(input: &ReportInput) -> String {
    let mut s = String::from("# Experiment report\n");
    if !input.thresholds.is_empty() {
        s.push_str("\n## Thresholds\n\n| alpha | beta | gamma | 4 alpha gamma | regime | lambda_c | lambda_c* | lambda- | lambda+ | N |\n|---|---|---|---|---|---|---|---|---|---|\n");
        for p in &input.thresholds {
            let th = Thresholds::new(p);
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                display(&p.alpha),
                display(&p.beta),
                display(&p.gamma),
                display(&p.four_alpha_gamma()),
                th.regime.name(),
                opt(&th.lambda_c),
                opt(&th.lambda_c_star),
                opt(&th.lambda_minus),
                opt(&th.lambda_plus),
                th.n_ag.map_or("-".into(), |n| n.to_string()),
            );
        }
    }
    if !input.sweep.is_empty() {
        s.push_str("\n## Displacements\n\n| alpha | beta | gamma | eps | L1 | L2 | bracket | predicted | searched | agree |\n|---|---|---|---|---|---|---|---|---|---|\n");
        for r in &input.sweep {
            let p = &r.point.params;
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} | {:?} | {:?} | {} |",
                display(&p.alpha),
                display(&p.beta),
                display(&p.gamma),
                display(&p.eps),
                display(&r.point.l1),
                display(&r.point.l2),
                r.bracket,
                r.predicted,
                r.searched,
                r.agree
            );
        }
        let m = monotonicity(&input.sweep);
        let agree = input.sweep.iter().filter(|r| r.agree).count();
        let _ = writeln!(
            s,
            "\n{agree} of {} points agree with the prediction. Nonincreasing in L: {}. Nondecreasing in beta: {}.",
            input.sweep.len(),
            m.nonincreasing_in_l,
            m.nondecreasing_in_beta
        );
    }
    if let Some(c) = &input.convergence {
        let _ = write!(
            s,
            "\n## Convergence (gamma = {})\n\n| eps | sup error | ratio to previous |\n|---|---|---|\n",
            display(&c.gamma)
        );
        for (i, (eps, err)) in c.sup_errors.iter().enumerate() {
            let ratio = if i == 0 { "-".to_string() } else { format!("{:.3}", c.ratios[i - 1]) };
            let _ = writeln!(s, "| {eps} | {err:.6} | {ratio} |");
        }
        let _ = writeln!(s, "\n{} probe times; monotone: {}.", c.probe_times.len(), c.monotone());
    }
    if !input.algebra.is_empty() {
        let worst = input.algebra.iter().map(|a| &a.max_discrepancy).max().cloned().unwrap_or_default();
        let checked: usize = input.algebra.iter().map(|a| a.checked).sum();
        let _ = writeln!(
            s,
            "\n## Algebra check\n\n{} configurations, {checked} index pairs, largest discrepancy {}.",
            input.algebra.len(),
            display(&worst)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn threshold_table() {
        let p = Params::with_gamma(rat(1, 8), int(1), rat(1, 100), int(1)).unwrap();
        let md = markdown_report(&ReportInput { thresholds: vec![p], ..ReportInput::default() });
        assert!(md.contains("| 1/8 | 1 | 1 | 1/2 | WeakRetain | 8/11 | - | - | - | - |"), "{md}");
        assert!(!md.contains("## Convergence"));
    }
}
