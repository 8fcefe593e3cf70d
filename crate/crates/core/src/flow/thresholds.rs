use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Params, Regime};
use crate::rational::{self, int, Rational};

/// `N = floor((floor(4 alpha gamma) + 1) / 2)`, the island depth index for `4 alpha gamma >= 1`.
pub fn n_alpha_gamma(alpha: &Rational, gamma: &Rational) -> Result<u64> {
    let fag = int(4) * alpha * gamma;
    if fag < Rational::one() {
        return Err(Error::Regime(format!(
            "island depth needs 4 alpha gamma >= 1, got {}",
            rational::display(&fag)
        )));
    }
    let inner: num_bigint::BigInt = rational::floor(&fag) + 1u32;
    (inner / 2u32)
        .to_u64()
        .ok_or_else(|| Error::InvalidParams("4 alpha gamma too large".into()))
}

/// `4 alpha gamma` is an odd integer.
pub fn is_odd_integer(q: &Rational) -> bool {
    rational::is_integer(q) && (q.numer() % 2u32).abs().is_one()
}

/// Critical side lengths. Values that do not apply to the regime are `None`: `lambda_c`
/// exists for `4 alpha gamma <= 1`, the others (and `n_ag`) for `4 alpha gamma >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `4 beta gamma / (4 alpha gamma + 5)`.
    #[serde(with = "crate::rational::exact_opt")]
    pub lambda_c: Option<Rational>,
    /// `4 beta gamma / (4 alpha gamma + 5 + 6N)`.
    #[serde(with = "crate::rational::exact_opt")]
    pub lambda_c_star: Option<Rational>,
    /// `2 beta gamma / (4N - 1)`.
    #[serde(with = "crate::rational::exact_opt")]
    pub lambda_minus: Option<Rational>,
    /// `2 beta gamma / 3`.
    #[serde(with = "crate::rational::exact_opt")]
    pub lambda_plus: Option<Rational>,
    pub n_ag: Option<u64>,
    pub regime: Regime,
    pub odd_integer_flag: bool,
}

impl Thresholds {
    pub fn new(p: &Params) -> Self {
        let fag = p.four_alpha_gamma();
        let regime = p.regime();
        let bg = &p.beta * &p.gamma;
        let lambda_c = (regime != Regime::WeakDissolve).then(|| int(4) * &bg / (&fag + int(5)));
        let n_ag = n_alpha_gamma(&p.alpha, &p.gamma).ok();
        let (lambda_c_star, lambda_minus, lambda_plus) = match n_ag {
            Some(n) => {
                let n = int(n as i64);
                (
                    Some(int(4) * &bg / (&fag + int(5) + int(6) * &n)),
                    Some(int(2) * &bg / (int(4) * &n - int(1))),
                    Some(int(2) * &bg / int(3)),
                )
            }
            None => (None, None, None),
        };
        Self {
            lambda_c,
            lambda_c_star,
            lambda_minus,
            lambda_plus,
            n_ag,
            regime,
            odd_integer_flag: is_odd_integer(&fag),
        }
    }

    /// Side length above which a side does not move: `lambda_c` when islands are retained,
    /// `lambda_plus` when they dissolve.
    pub fn pinning(&self) -> &Rational {
        match self.regime {
            Regime::WeakDissolve => self.lambda_plus.as_ref(),
            _ => self.lambda_c.as_ref(),
        }
        .expect("regime threshold is always present")
    }

    pub fn is_consistent(&self) -> bool {
        [&self.lambda_c, &self.lambda_c_star, &self.lambda_minus, &self.lambda_plus]
            .into_iter()
            .flatten()
            .all(|v| v.is_positive())
            && self.lambda_c.is_some() != (self.regime == Regime::WeakDissolve)
            && self.n_ag.is_some() != (self.regime == Regime::WeakRetain)
            && !self.pinning().is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p(alpha: Rational, beta: Rational, gamma: Rational) -> Params {
        Params::with_gamma(alpha, beta, rat(1, 100), gamma).unwrap()
    }

    #[test]
    fn island_depth() {
        let g = int(1);
        assert_eq!(n_alpha_gamma(&rat(1, 2), &g).unwrap(), 1);
        assert_eq!(n_alpha_gamma(&int(1), &g).unwrap(), 2);
        assert_eq!(n_alpha_gamma(&rat(8, 5), &g).unwrap(), 3);
        assert_eq!(n_alpha_gamma(&rat(1, 4), &g).unwrap(), 1);
        assert!(matches!(n_alpha_gamma(&rat(1, 8), &g), Err(Error::Regime(_))));
    }

    #[test]
    fn retain_thresholds() {
        let t = Thresholds::new(&p(rat(1, 8), int(1), int(1)));
        assert_eq!(t.lambda_c, Some(rat(8, 11)));
        assert_eq!(t.regime, Regime::WeakRetain);
        assert_eq!(t.n_ag, None);
        assert!(t.is_consistent());
    }

    #[test]
    fn dissolve_thresholds() {
        let t = Thresholds::new(&p(int(1), int(1), int(1)));
        assert_eq!(t.n_ag, Some(2));
        assert_eq!(t.lambda_c_star, Some(rat(4, 21)));
        assert_eq!(t.lambda_minus, Some(rat(2, 7)));
        assert_eq!(t.lambda_plus, Some(rat(2, 3)));
        assert_eq!(t.pinning(), &rat(2, 3));
        assert!(!t.odd_integer_flag);
        assert!(t.is_consistent());
        assert!(Thresholds::new(&p(rat(3, 4), int(1), int(1))).odd_integer_flag);
        let boundary = Thresholds::new(&p(rat(1, 4), int(1), int(1)));
        assert_eq!(boundary.regime, Regime::Boundary);
        assert!(boundary.odd_integer_flag && boundary.is_consistent());
        assert_eq!(boundary.lambda_c, Some(rat(2, 3)));
    }
}
