//! Event-aware forward integration of the coupled side-length system
//! `L1' = v(L2)`, `L2' = v(L1)`.
//!
//! Velocities are frozen over each step. For piecewise-constant laws this is exact: a step
//! never crosses a jump, because the first crossing inside it is located by bisection and the
//! step is cut there. Continuous laws get a first-order explicit scheme.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::law::VelocityLaw;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideLengths {
    /// Horizontal side.
    pub l1: f64,
    /// Vertical side.
    pub l2: f64,
}

impl SideLengths {
    pub const VANISHED: Self = Self { l1: 0.0, l2: 0.0 };

    pub fn new(l1: f64, l2: f64) -> Self {
        Self { l1, l2 }
    }

    fn advance(self, v: (f64, f64), dt: f64) -> Self {
        Self { l1: self.l1 + v.0 * dt, l2: self.l2 + v.1 * dt }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    /// A velocity changed value.
    FloorJump,
    /// Both velocities are zero; the state no longer changes.
    Pinned,
    /// A side reached zero length.
    Vanished,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::FloorJump => "FloorJump",
            Self::Pinned => "Pinned",
            Self::Vanished => "Vanished",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEvent {
    pub t: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrateConfig {
    pub t_end: f64,
    pub dt: f64,
    /// Lengths at or below this count as zero. Defaults to `1e-3` times the longer initial side;
    /// floor jumps accumulate as a side shrinks, so the tolerance bounds their number.
    pub vanish_tol: Option<f64>,
    pub max_events: usize,
}

impl IntegrateConfig {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self { t_end, dt, vanish_tol: None, max_events: 1_000_000 }
    }
}

/// Piecewise-linear trajectory: states at increasing times, linear in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitTrace {
    pub law: String,
    pub times: Vec<f64>,
    pub states: Vec<SideLengths>,
    pub events: Vec<LimitEvent>,
}

impl LimitTrace {
    pub fn vanished_at(&self) -> Option<f64> {
        self.events.iter().find(|e| e.kind == EventKind::Vanished).map(|e| e.t)
    }

    pub fn pinned(&self) -> bool {
        self.events.iter().any(|e| e.kind == EventKind::Pinned)
    }

    /// State at time `t >= 0`: linear interpolation of the recorded states, `(0, 0)` after
    /// vanishing and the last state past the end of the trace.
    pub fn at(&self, t: f64) -> SideLengths {
        if self.vanished_at().is_some_and(|tv| t > tv) {
            return SideLengths::VANISHED;
        }
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            return self.states[0];
        }
        if i == self.times.len() {
            return *self.states.last().expect("nonempty");
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (a, b) = (self.states[i - 1], self.states[i]);
        let w = (t - t0) / (t1 - t0);
        SideLengths::new(a.l1 + w * (b.l1 - a.l1), a.l2 + w * (b.l2 - a.l2))
    }

    pub fn event_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().map(|e| e.t)
    }

    /// CSV with columns `t,L1,L2,event`; the event column names the event recorded at that
    /// row's time, if any.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "L1", "L2", "event"])?;
        let mut events = self.events.iter().peekable();
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut names = Vec::new();
            while let Some(e) = events.next_if(|e| e.t <= *t) {
                names.push(e.kind.name());
            }
            w.write_record([t.to_string(), s.l1.to_string(), s.l2.to_string(), names.join(";")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Bisection steps used to localize a jump inside a step.
const BISECT_ITERS: usize = 80;

fn velocities(law: &dyn VelocityLaw, s: SideLengths) -> (f64, f64) {
    (law.velocity(s.l2), law.velocity(s.l1))
}

fn clamp(s: SideLengths) -> SideLengths {
    SideLengths::new(s.l1.max(f64::MIN_POSITIVE), s.l2.max(f64::MIN_POSITIVE))
}

fn levels(law: &dyn VelocityLaw, s: SideLengths) -> Option<(i64, i64)> {
    Some((law.level(s.l2)?, law.level(s.l1)?))
}

/// Integrates from `l0` up to `cfg.t_end` or until a side vanishes.
pub fn integrate(l0: SideLengths, law: &dyn VelocityLaw, cfg: &IntegrateConfig) -> Result<LimitTrace> {
    if !(l0.l1 > 0.0 && l0.l2 > 0.0 && l0.l1.is_finite() && l0.l2.is_finite()) {
        return Err(Error::NonPositive("initial side length"));
    }
    if !(cfg.dt > 0.0) {
        return Err(Error::NonPositive("dt"));
    }
    if !(cfg.t_end > 0.0) {
        return Err(Error::NonPositive("end time"));
    }
    let tol = cfg.vanish_tol.unwrap_or(1e-3 * l0.l1.max(l0.l2));
    let mut trace = LimitTrace { law: law.name().to_string(), times: vec![0.0], states: vec![l0], events: Vec::new() };
    let (mut t, mut s) = (0.0, l0);
    while t < cfg.t_end {
        let v = velocities(law, s);
        if v == (0.0, 0.0) {
            trace.events.push(LimitEvent { t, kind: EventKind::Pinned });
            trace.times.push(cfg.t_end);
            trace.states.push(s);
            break;
        }
        let mut step = cfg.dt.min(cfg.t_end - t);
        let mut jump = false;
        if let Some(start) = levels(law, s) {
            // a side may pass below zero within the step, so the level is read at a clamped state
            if levels(law, clamp(s.advance(v, step))) != Some(start) {
                // levels are monotone in time, so the first change is found by bisection
                let (mut lo, mut hi) = (0.0, step);
                for _ in 0..BISECT_ITERS {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if levels(law, clamp(s.advance(v, mid))) == Some(start) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                step = hi;
                jump = true;
            }
        }
        let reach = |l: f64, v: f64| if v < 0.0 { ((l - tol) / -v).max(0.0) } else { f64::INFINITY };
        let vanish = reach(s.l1, v.0).min(reach(s.l2, v.1));
        if vanish <= step {
            let mut e = s.advance(v, vanish);
            if e.l1 <= tol {
                e.l1 = 0.0;
            }
            if e.l2 <= tol {
                e.l2 = 0.0;
            }
            t += vanish;
            trace.times.push(t);
            trace.states.push(e);
            trace.events.push(LimitEvent { t, kind: EventKind::Vanished });
            break;
        }
        s = s.advance(v, step);
        t += step;
        trace.times.push(t);
        trace.states.push(s);
        if jump {
            trace.events.push(LimitEvent { t, kind: EventKind::FloorJump });
            if trace.events.len() > cfg.max_events {
                return Err(Error::EventLimit(cfg.max_events));
            }
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::law::{pinning_threshold, CrystallineLaw, FloorBranch, FloorLaw, LimitParams};

    fn retain() -> FloorLaw {
        FloorLaw::new(LimitParams::new(0.125, 1.0, 1.0).unwrap(), FloorBranch::Retain)
    }

    #[test]
    fn pinned_datum_is_constant() {
        let tr = integrate(SideLengths::new(1.0, 2.0), &retain(), &IntegrateConfig::new(1.0, 0.01)).unwrap();
        assert!(tr.pinned());
        assert_eq!(tr.states, vec![SideLengths::new(1.0, 2.0); 2]);
        assert_eq!(tr.at(0.7), SideLengths::new(1.0, 2.0));
    }

    #[test]
    fn square_first_region() {
        let law = retain();
        let tr = integrate(SideLengths::new(0.4, 0.4), &law, &IntegrateConfig::new(1.0, 1e-3)).unwrap();
        // the argument 2/(3L) + 1/12 reaches 2 at L = 8/23
        let first = tr.events.iter().find(|e| e.kind == EventKind::FloorJump).unwrap();
        let expect = (0.4 - 8.0 / 23.0) / 4.0;
        assert!((first.t - expect).abs() < 1e-9, "{} vs {expect}", first.t);
        assert!((tr.at(0.5 * expect).l1 - (0.4 - 2.0 * expect)).abs() < 1e-12);
        let tv = tr.vanished_at().expect("square vanishes");
        assert!(tv < 0.1);
        assert_eq!(tr.at(tv + 1e-9), SideLengths::VANISHED);
        for w in tr.states.windows(2) {
            assert!(w[1].l1 <= w[0].l1 && w[1].l2 <= w[0].l2);
            assert_eq!(w[0].l1, w[0].l2);
        }
    }

    #[test]
    fn long_side_waits_for_the_short_one() {
        let law = retain();
        let lc = pinning_threshold(&law.params, FloorBranch::Retain);
        let tr = integrate(SideLengths::new(1.0, 0.3), &law, &IntegrateConfig::new(1.0, 1e-3)).unwrap();
        // the vertical side stays until the horizontal one drops below the threshold
        let t_release = tr.states.iter().position(|s| s.l2 < 0.3).unwrap();
        assert!(tr.states[t_release - 1].l1 <= lc + 1e-12);
        assert!(tr.vanished_at().is_some());
    }

    #[test]
    fn refinement_is_stable() {
        let law = retain();
        let a = integrate(SideLengths::new(0.5, 0.4), &law, &IntegrateConfig::new(0.05, 1e-2)).unwrap();
        let b = integrate(SideLengths::new(0.5, 0.4), &law, &IntegrateConfig::new(0.05, 5e-3)).unwrap();
        for i in 0..50 {
            let t = i as f64 * 1e-3;
            let (x, y) = (a.at(t), b.at(t));
            assert!((x.l1 - y.l1).abs() < 1e-9 && (x.l2 - y.l2).abs() < 1e-9, "{t} {x:?} {y:?} {:?}", a.vanished_at());
        }
    }

    #[test]
    fn continuous_law_is_first_order() {
        // L' = -2/L for a square: L(t)^2 = L0^2 - 4t
        let law = CrystallineLaw(LimitParams::new(0.0, 1.0, 1.0).unwrap());
        let err = |dt: f64| {
            let tr = integrate(SideLengths::new(1.0, 1.0), &law, &IntegrateConfig::new(0.1, dt)).unwrap();
            (tr.at(0.1).l1 - (1.0f64 - 0.4).sqrt()).abs()
        };
        let ratio = err(1e-3) / err(5e-4);
        assert!((1.8..2.2).contains(&ratio), "{ratio}");
    }

    #[test]
    fn csv_layout() {
        let tr = integrate(SideLengths::new(1.0, 1.0), &retain(), &IntegrateConfig::new(1.0, 0.5)).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,L1,L2,event\n0,1,1,Pinned\n1,1,1,\n");
    }

    #[test]
    fn rejects_bad_input() {
        let law = retain();
        assert!(integrate(SideLengths::new(0.0, 1.0), &law, &IntegrateConfig::new(1.0, 0.1)).is_err());
        assert!(integrate(SideLengths::new(1.0, 1.0), &law, &IntegrateConfig::new(1.0, 0.0)).is_err());
        assert!(integrate(SideLengths::new(1.0, 1.0), &law, &IntegrateConfig::new(-1.0, 0.1)).is_err());
    }
}
