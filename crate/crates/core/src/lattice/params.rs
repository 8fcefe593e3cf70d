use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// Model constants and scales. `gamma = tau / eps` is derived and kept exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    /// Weak coupling.
    #[serde(with = "crate::rational::exact")]
    pub alpha: Rational,
    /// Strong coupling.
    #[serde(with = "crate::rational::exact")]
    pub beta: Rational,
    /// Space scale.
    #[serde(with = "crate::rational::exact")]
    pub eps: Rational,
    /// Time scale.
    #[serde(with = "crate::rational::exact")]
    pub tau: Rational,
    #[serde(with = "crate::rational::exact")]
    pub gamma: Rational,
}

impl Params {
    pub fn new(alpha: Rational, beta: Rational, eps: Rational, tau: Rational) -> Result<Self> {
        for (name, v) in [("alpha", &alpha), ("beta", &beta), ("eps", &eps), ("tau", &tau)] {
            if !v.is_positive() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be > 0, got {}",
                    rational::display(v)
                )));
            }
        }
        let gamma = &tau / &eps;
        Ok(Self { alpha, beta, eps, tau, gamma })
    }

    /// Builds the parameters from the ratio `gamma`, setting `tau = gamma * eps`.
    pub fn with_gamma(alpha: Rational, beta: Rational, eps: Rational, gamma: Rational) -> Result<Self> {
        if !gamma.is_positive() {
            return Err(Error::InvalidParams("gamma must be > 0".into()));
        }
        let tau = &gamma * &eps;
        Self::new(alpha, beta, eps, tau)
    }

    /// Same model constants and ratio, different space scale.
    pub fn rescaled(&self, eps: Rational) -> Result<Self> {
        Self::with_gamma(self.alpha.clone(), self.beta.clone(), eps, self.gamma.clone())
    }

    /// `4 alpha gamma`, the quantity that selects the island regime.
    pub fn four_alpha_gamma(&self) -> Rational {
        int(4) * &self.alpha * &self.gamma
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(&self.four_alpha_gamma())
    }

    pub fn is_valid(&self) -> bool {
        self.alpha.is_positive()
            && self.beta.is_positive()
            && self.eps.is_positive()
            && self.tau.is_positive()
            && self.gamma == &self.tau / &self.eps
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={} beta={} eps={} tau={} gamma={}",
            rational::display(&self.alpha),
            rational::display(&self.beta),
            rational::display(&self.eps),
            rational::display(&self.tau),
            rational::display(&self.gamma)
        )
    }
}

/// Island regime, decided by the sign of `4 alpha gamma - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `4 alpha gamma < 1`: weak sites are never worth removing; the mushy layer persists.
    WeakRetain,
    /// `4 alpha gamma = 1`: keeping or dropping an exposed weak site costs the same.
    Boundary,
    /// `4 alpha gamma > 1`: exposed weak sites dissolve at the next step.
    WeakDissolve,
}

impl Regime {
    pub fn classify(four_alpha_gamma: &Rational) -> Regime {
        match four_alpha_gamma.cmp(&Rational::one()) {
            Ordering::Less => Regime::WeakRetain,
            Ordering::Equal => Regime::Boundary,
            Ordering::Greater => Regime::WeakDissolve,
        }
    }

    /// Whether the evolution keeps exposed weak sites. The boundary case keeps them.
    pub fn retains_islands(self) -> bool {
        !matches!(self, Regime::WeakDissolve)
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::WeakRetain => "WeakRetain",
            Regime::Boundary => "Boundary",
            Regime::WeakDissolve => "WeakDissolve",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use num_traits::Zero;

    #[test]
    fn gamma_is_exact_ratio() {
        let p = Params::new(rat(1, 8), int(1), rat(1, 3), rat(1, 7)).unwrap();
        assert_eq!(p.gamma, rat(3, 7));
        assert!(p.is_valid());
        let q = Params::with_gamma(rat(1, 8), int(1), rat(1, 100), int(2)).unwrap();
        assert_eq!(q.tau, rat(1, 50));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(Params::new(int(0), int(1), int(1), int(1)).is_err());
        assert!(Params::new(int(1), int(-1), int(1), int(1)).is_err());
        assert!(Params::with_gamma(int(1), int(1), int(1), Rational::zero()).is_err());
    }

    #[test]
    fn regimes() {
        let mk = |a: Rational| Params::with_gamma(a, int(1), rat(1, 10), int(1)).unwrap();
        assert_eq!(mk(rat(1, 8)).regime(), Regime::WeakRetain);
        assert_eq!(mk(rat(1, 4)).regime(), Regime::Boundary);
        assert_eq!(mk(int(1)).regime(), Regime::WeakDissolve);
        assert!(Regime::Boundary.retains_islands());
    }
}
