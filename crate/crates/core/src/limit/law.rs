//! Side-length velocities of the continuum rectangle flow.
//!
//! Every law gives `dL/dt` for one pair of opposite sides as a function of the length of the
//! *other* pair. The floor laws are piecewise constant; at a jump the slower velocity is
//! taken, so a side that sits exactly on a threshold does not move faster than just above it.

use crate::error::{Error, Result};
use crate::lattice::{Params, Regime};
use crate::rational;

/// Relative distance to an integer under which a floor argument counts as sitting on the jump.
const SNAP: f64 = 1e-9;

/// `f64` copies of the parameters the continuum laws need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl LimitParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha must be finite and nonnegative, got {alpha}")));
        }
        for (name, v) in [("beta", beta), ("gamma", gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be finite and positive, got {v}")));
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn from_params(p: &Params) -> Self {
        Self {
            alpha: rational::to_f64(&p.alpha),
            beta: rational::to_f64(&p.beta),
            gamma: rational::to_f64(&p.gamma),
        }
    }
}

/// Which branch of the floor law applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FloorBranch {
    /// Islands are kept (`4 alpha gamma < 1`).
    Retain,
    /// Islands dissolve (`4 alpha gamma > 1`); the displacement is the larger of two counts.
    Dissolve,
}

impl FloorBranch {
    /// The branch of the regime; at `4 alpha gamma = 1` the two coincide and `Retain` is used.
    pub fn for_regime(regime: Regime) -> Self {
        match regime {
            Regime::WeakDissolve => Self::Dissolve,
            _ => Self::Retain,
        }
    }
}

/// `floor(x)` except that values within [`SNAP`] of an integer `m` give `m - 1`, and negative
/// results are clamped to 0.
pub fn slow_floor(x: f64) -> i64 {
    let m = x.round();
    let f = if (x - m).abs() <= SNAP * x.abs().max(1.0) { m - 1.0 } else { x.floor() };
    f.max(0.0) as i64
}

/// The argument of the floor written in terms of the crystalline curvature `kappa = 2 / L` of
/// the opposite edge.
fn floor_argument(kappa: f64, lp: &LimitParams, branch: FloorBranch) -> f64 {
    let (a, b, g) = (lp.alpha, lp.beta, lp.gamma);
    let retain = b * g * kappa / 3.0 - 2.0 * a * g / 3.0 + 1.0 / 6.0;
    match branch {
        FloorBranch::Retain => retain,
        FloorBranch::Dissolve => retain.max(b * g * kappa / 4.0 + 0.25),
    }
}

/// Displacement per step, `max(0, floor(argument))` with the slow convention at jumps.
pub fn displacement_count(l_other: f64, lp: &LimitParams, branch: FloorBranch) -> i64 {
    slow_floor(floor_argument(2.0 / l_other, lp, branch))
}

/// Normal velocity `(2 / gamma) floor(...)` of an edge with crystalline curvature `kappa`.
pub fn curvature_velocity(kappa: f64, lp: &LimitParams, branch: FloorBranch) -> f64 {
    2.0 / lp.gamma * slow_floor(floor_argument(kappa, lp, branch)) as f64
}

/// `dL/dt = -(4 / gamma) floor(...)`, never positive.
pub fn rhs(l_other: f64, lp: &LimitParams, branch: FloorBranch) -> Result<f64> {
    if !(l_other > 0.0) {
        return Err(Error::NonPositive("opposite side length"));
    }
    Ok(-2.0 * curvature_velocity(2.0 / l_other, lp, branch))
}

/// Side length above which the side does not move.
pub fn pinning_threshold(lp: &LimitParams, branch: FloorBranch) -> f64 {
    let (a, b, g) = (lp.alpha, lp.beta, lp.gamma);
    match branch {
        FloorBranch::Retain => 4.0 * b * g / (4.0 * a * g + 5.0),
        FloorBranch::Dissolve => 2.0 * b * g / 3.0,
    }
}

/// The law without floors reached as `gamma` grows: `-max{(8/3)(beta/L - alpha), 2 beta/L}`.
pub fn rhs_infinite_gamma(l_other: f64, lp: &LimitParams) -> Result<f64> {
    if !(l_other > 0.0) {
        return Err(Error::NonPositive("opposite side length"));
    }
    let b = lp.beta / l_other;
    Ok(-(8.0 / 3.0 * (b - lp.alpha)).max(2.0 * b))
}

/// Crystalline curvature flow of the limit perimeter alone: `-2 beta / L`.
pub fn crystalline_reference(l_other: f64, lp: &LimitParams) -> Result<f64> {
    if !(l_other > 0.0) {
        return Err(Error::NonPositive("opposite side length"));
    }
    Ok(-2.0 * lp.beta / l_other)
}

/// A side-length velocity law, looked up by name in a [`LawRegistry`].
pub trait VelocityLaw: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// `dL/dt` of a side pair whose opposite pair has length `l_other > 0`.
    fn velocity(&self, l_other: f64) -> f64;

    /// Label of the constant-velocity region containing `l_other`; `None` for laws that vary
    /// continuously.
    fn level(&self, l_other: f64) -> Option<i64>;
}

pub struct FloorLaw {
    pub params: LimitParams,
    pub branch: FloorBranch,
    name: &'static str,
}

impl FloorLaw {
    pub fn new(params: LimitParams, branch: FloorBranch) -> Self {
        let name = match branch {
            FloorBranch::Retain => "floor-retain",
            FloorBranch::Dissolve => "floor-dissolve",
        };
        Self { params, branch, name }
    }
}

impl VelocityLaw for FloorLaw {
    fn name(&self) -> &'static str {
        self.name
    }

    fn description(&self) -> &'static str {
        match self.branch {
            FloorBranch::Retain => "-(4/gamma) floor(2 beta gamma/(3L) - 2 alpha gamma/3 + 1/6)",
            FloorBranch::Dissolve => "-(4/gamma) floor(max{retain argument, beta gamma/(2L) + 1/4})",
        }
    }

    fn velocity(&self, l_other: f64) -> f64 {
        -4.0 / self.params.gamma * displacement_count(l_other, &self.params, self.branch) as f64
    }

    fn level(&self, l_other: f64) -> Option<i64> {
        Some(displacement_count(l_other, &self.params, self.branch))
    }
}

pub struct InfiniteGammaLaw(pub LimitParams);

impl VelocityLaw for InfiniteGammaLaw {
    fn name(&self) -> &'static str {
        "infinite-gamma"
    }

    fn description(&self) -> &'static str {
        "-max{(8/3)(beta/L - alpha), 2 beta/L}"
    }

    fn velocity(&self, l_other: f64) -> f64 {
        rhs_infinite_gamma(l_other, &self.0).unwrap_or(f64::NEG_INFINITY)
    }

    fn level(&self, _: f64) -> Option<i64> {
        None
    }
}

pub struct CrystallineLaw(pub LimitParams);

impl VelocityLaw for CrystallineLaw {
    fn name(&self) -> &'static str {
        "crystalline"
    }

    fn description(&self) -> &'static str {
        "-2 beta/L, the crystalline flow of the limit perimeter"
    }

    fn velocity(&self, l_other: f64) -> f64 {
        crystalline_reference(l_other, &self.0).unwrap_or(f64::NEG_INFINITY)
    }

    fn level(&self, _: f64) -> Option<i64> {
        None
    }
}

type LawBuilder = fn(&Params) -> Box<dyn VelocityLaw>;

/// Named constructors of velocity laws.
pub struct LawRegistry {
    entries: Vec<(&'static str, LawBuilder)>,
}

impl LawRegistry {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    /// `auto` (the floor branch of the regime), `floor-retain`, `floor-dissolve`,
    /// `infinite-gamma` and `crystalline`.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register("auto", |p| {
            Box::new(FloorLaw::new(LimitParams::from_params(p), FloorBranch::for_regime(p.regime())))
        });
        r.register("floor-retain", |p| Box::new(FloorLaw::new(LimitParams::from_params(p), FloorBranch::Retain)));
        r.register("floor-dissolve", |p| {
            Box::new(FloorLaw::new(LimitParams::from_params(p), FloorBranch::Dissolve))
        });
        r.register("infinite-gamma", |p| Box::new(InfiniteGammaLaw(LimitParams::from_params(p))));
        r.register("crystalline", |p| Box::new(CrystallineLaw(LimitParams::from_params(p))));
        r
    }

    /// Adds or replaces the builder registered under `name`.
    pub fn register(&mut self, name: &'static str, build: LawBuilder) {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(e) => e.1 = build,
            None => self.entries.push((name, build)),
        }
    }

    pub fn build(&self, name: &str, p: &Params) -> Result<Box<dyn VelocityLaw>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, b)| b(p))
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "velocity law",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }
}

impl Default for LawRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lp(alpha: f64, beta: f64, gamma: f64) -> LimitParams {
        LimitParams::new(alpha, beta, gamma).unwrap()
    }

    #[test]
    fn retain_examples() {
        let p = lp(0.125, 1.0, 1.0);
        assert_eq!(rhs(0.4, &p, FloorBranch::Retain).unwrap(), -4.0);
        assert_eq!(rhs(1.0, &p, FloorBranch::Retain).unwrap(), 0.0);
        assert_eq!(rhs(1e9, &p, FloorBranch::Retain).unwrap(), 0.0);
        assert!(matches!(rhs(0.0, &p, FloorBranch::Retain), Err(Error::NonPositive(_))));
        assert_eq!(curvature_velocity(5.0, &p, FloorBranch::Retain), 2.0);
        assert_eq!(curvature_velocity(1e-12, &p, FloorBranch::Retain), 0.0);
    }

    #[test]
    fn thresholds() {
        assert!((pinning_threshold(&lp(0.125, 1.0, 1.0), FloorBranch::Retain) - 8.0 / 11.0).abs() < 1e-15);
        assert!((pinning_threshold(&lp(1.0, 1.0, 1.0), FloorBranch::Dissolve) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn slow_convention_at_the_threshold() {
        let p = lp(0.125, 1.0, 1.0);
        let lc = pinning_threshold(&p, FloorBranch::Retain);
        assert_eq!(rhs(lc, &p, FloorBranch::Retain).unwrap(), 0.0);
        assert_eq!(rhs(lc * (1.0 - 1e-6), &p, FloorBranch::Retain).unwrap(), -4.0);
        assert_eq!(slow_floor(2.0), 1);
        assert_eq!(slow_floor(2.0 - 1e-15), 1);
        assert_eq!(slow_floor(1.75), 1);
        assert_eq!(slow_floor(-3.5), 0);
    }

    #[test]
    fn infinite_gamma_and_crystalline() {
        let p = lp(1.0, 1.0, 1.0);
        assert!((rhs_infinite_gamma(0.25, &p).unwrap() + 8.0).abs() < 1e-12);
        assert!((crystalline_reference(0.25, &p).unwrap() + 8.0).abs() < 1e-12);
        assert_eq!(crystalline_reference(1.0, &p).unwrap(), -2.0);
        let p0 = lp(0.0, 1.0, 1.0);
        assert!((rhs_infinite_gamma(0.5, &p0).unwrap() + 16.0 / 3.0).abs() < 1e-12);
        // below the crossover the forced law is faster
        assert!(rhs_infinite_gamma(0.2, &p).unwrap() < crystalline_reference(0.2, &p).unwrap());
    }

    #[test]
    fn registry() {
        let reg = LawRegistry::with_defaults();
        assert_eq!(reg.names(), vec!["auto", "floor-retain", "floor-dissolve", "infinite-gamma", "crystalline"]);
        let p = Params::with_gamma(rational::int(1), rational::int(1), rational::rat(1, 10), rational::int(1)).unwrap();
        assert_eq!(reg.build("auto", &p).unwrap().name(), "floor-dissolve");
        assert!(matches!(reg.build("euler", &p), Err(Error::UnknownStrategy { .. })));
    }

    proptest! {
        #[test]
        fn curvature_identity(l in 1e-3f64..10.0, a in 0.0f64..2.0, g in 0.1f64..100.0, dissolve: bool) {
            let p = lp(a, 1.0, g);
            let b = if dissolve { FloorBranch::Dissolve } else { FloorBranch::Retain };
            prop_assert_eq!(2.0 * curvature_velocity(2.0 / l, &p, b), rhs(l, &p, b).unwrap().abs());
        }

        #[test]
        fn velocities_never_positive_and_monotone(l in 1e-3f64..10.0, dl in 0.0f64..1.0, a in 0.0f64..2.0, g in 0.1f64..100.0) {
            let p = lp(a, 1.0, g);
            for b in [FloorBranch::Retain, FloorBranch::Dissolve] {
                let v = rhs(l, &p, b).unwrap();
                prop_assert!(v <= 0.0);
                // longer opposite sides never move faster
                prop_assert!(rhs(l + dl, &p, b).unwrap() >= v);
            }
            prop_assert!(rhs_infinite_gamma(l, &p).unwrap().abs() >= crystalline_reference(l, &p).unwrap().abs());
        }

        #[test]
        fn retain_branch_dominates_below_one(l in 1e-3f64..10.0, fag in 0.0f64..0.999, g in 0.1f64..100.0) {
            let p = lp(fag / (4.0 * g), 1.0, g);
            if l <= pinning_threshold(&p, FloorBranch::Retain) {
                let diff = p.beta * p.gamma / (6.0 * l) - 2.0 * p.alpha * p.gamma / 3.0 - 1.0 / 12.0;
                prop_assert!(diff > 0.0);
                prop_assert_eq!(rhs(l, &p, FloorBranch::Retain).unwrap(), rhs(l, &p, FloorBranch::Dissolve).unwrap());
            }
        }
    }
}
