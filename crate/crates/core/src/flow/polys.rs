//! The polynomials entering the normalized step energies.
//!
//! Every function is generic over [`Scalar`] so the same expressions serve the exact
//! evaluation (`Rational`) and the `f64` prefilter used to scan large index boxes.
//!
//! Notation: `ag = alpha * gamma`, `c = 2 ag + 1`, `N` the island depth index.

use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};
use crate::flow::thresholds::n_alpha_gamma;
use crate::lattice::Params;
use crate::rational::Rational;

pub trait Scalar: Clone + Num + FromPrimitive + PartialOrd {}

impl<T: Clone + Num + FromPrimitive + PartialOrd> Scalar for T {}

#[inline]
pub(crate) fn c<T: Scalar>(v: i64) -> T {
    T::from_i64(v).expect("small integer constant")
}

/// Orders a symmetric pair descending.
fn desc<T: Scalar>(a: T, b: T) -> (T, T) {
    if a >= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// `pi(x) = 3x^2 + 2(2ag + 1)x`.
pub fn pi<T: Scalar>(x: T, ag: &T) -> T {
    c::<T>(3) * x.clone() * x.clone() + c::<T>(2) * (c::<T>(2) * ag.clone() + c(1)) * x
}

/// `P_l(x) = (l / gamma) pi(x) - 4 beta x`.
pub fn big_p<T: Scalar>(l: &T, x: T, ag: &T, beta: &T, gamma: &T) -> T {
    l.clone() / gamma.clone() * pi(x.clone(), ag) - c::<T>(4) * beta.clone() * x
}

/// Symmetric `R(h, k)`, given for `h >= k` by
/// `2h^2 + 2c h + 2k^2 + 2c k - 8c hk - 12hk^2 - 4h^3`.
pub fn big_r<T: Scalar>(h: T, k: T, ag: &T) -> T {
    let (h, k) = desc(h, k);
    let cc = c::<T>(2) * ag.clone() + c(1);
    c::<T>(2) * h.clone() * h.clone()
        + c::<T>(2) * cc.clone() * h.clone()
        + c::<T>(2) * k.clone() * k.clone()
        + c::<T>(2) * cc.clone() * k.clone()
        - c::<T>(8) * cc * h.clone() * k.clone()
        - c::<T>(12) * h.clone() * k.clone() * k
        - c::<T>(4) * h.clone() * h.clone() * h
}

/// `p(x) = 2x(2x + 1)`.
pub fn small_p<T: Scalar>(x: T) -> T {
    c::<T>(2) * x.clone() * (c::<T>(2) * x + c(1))
}

/// `Q_l(x) = (l / gamma) p(x) - 4 beta x`.
pub fn big_q<T: Scalar>(l: &T, x: T, beta: &T, gamma: &T) -> T {
    l.clone() / gamma.clone() * small_p(x.clone()) - c::<T>(4) * beta.clone() * x
}

/// Symmetric `r(s, t)`, given for `s >= t` by
/// `(2/3)(1 + 4s) p(s) + (1 - 4s)(p(s) + p(t)) - 4ag(s + t)`.
pub fn small_r<T: Scalar>(s: T, t: T, ag: &T) -> T {
    let (s, t) = desc(s, t);
    let four_s = c::<T>(4) * s.clone();
    c::<T>(2) * (c::<T>(1) + four_s.clone()) * small_p(s.clone()) / c(3)
        + (c::<T>(1) - four_s) * (small_p(s.clone()) + small_p(t.clone()))
        - c::<T>(4) * ag.clone() * (s + t)
}

/// `R_ag(h, k) = R(h, k) + 4N(1 - 6N)(h + k) - 24N hk - 12N(h^2 + k^2) - 8N(2ag + 1)(h + k)`.
pub fn big_r_ag<T: Scalar>(h: T, k: T, ag: &T, n: &T) -> T {
    let sum = h.clone() + k.clone();
    big_r(h.clone(), k.clone(), ag)
        + c::<T>(4) * n.clone() * (c::<T>(1) - c::<T>(6) * n.clone()) * sum.clone()
        - c::<T>(24) * n.clone() * h.clone() * k.clone()
        - c::<T>(12) * n.clone() * (h.clone() * h + k.clone() * k)
        - c::<T>(8) * n.clone() * (c::<T>(2) * ag.clone() + c(1)) * sum
}

/// `pi_ag(k) = 3k^2 + 2(3N + 2ag + 1)k + p(N)`.
pub fn pi_ag<T: Scalar>(k: T, ag: &T, n: &T) -> T {
    c::<T>(3) * k.clone() * k.clone()
        + c::<T>(2) * (c::<T>(3) * n.clone() + c::<T>(2) * ag.clone() + c(1)) * k
        + small_p(n.clone())
}

/// `r_ag(h, t) = r(N, t) + 8h(N - t)(2N + 2t + 1) + R_ag(h, 0)`.
pub fn small_r_ag<T: Scalar>(h: T, t: T, ag: &T, n: &T) -> T {
    small_r(n.clone(), t.clone(), ag)
        + c::<T>(8) * h.clone() * (n.clone() - t.clone())
            * (c::<T>(2) * n.clone() + c::<T>(2) * t + c(1))
        + big_r_ag(h, c(0), ag, n)
}

/// Identifiers accepted by [`poly_eval`].
pub const POLY_NAMES: [&str; 9] = ["pi", "P", "R", "p", "Q", "r", "R_ag", "pi_ag", "r_ag"];

/// Evaluates a polynomial by name. `P` and `Q` take `(l, x)`; `R`, `r`, `R_ag`, `r_ag` take two
/// indices; the rest one. The `_ag` variants need `4 alpha gamma >= 1`.
pub fn poly_eval(name: &str, args: &[Rational], p: &Params) -> Result<Rational> {
    let ag = &p.alpha * &p.gamma;
    let canonical = match name {
        "π" => "pi",
        "P_l" => "P",
        "Q_l" => "Q",
        "R_αγ" => "R_ag",
        "π_αγ" => "pi_ag",
        "r_αγ" => "r_ag",
        other => other,
    };
    let arity = match canonical {
        "pi" | "p" | "pi_ag" => 1,
        "P" | "Q" | "R" | "r" | "R_ag" | "r_ag" => 2,
        _ => return Err(Error::UnknownPolynomial(name.to_string())),
    };
    if args.len() != arity {
        return Err(Error::InvalidParams(format!(
            "`{name}` takes {arity} argument(s), got {}",
            args.len()
        )));
    }
    let n = || -> Result<Rational> {
        Ok(crate::rational::from_u64(n_alpha_gamma(&p.alpha, &p.gamma)?))
    };
    let a = |i: usize| args[i].clone();
    Ok(match canonical {
        "pi" => pi(a(0), &ag),
        "p" => small_p(a(0)),
        "P" => big_p(&args[0], a(1), &ag, &p.beta, &p.gamma),
        "Q" => big_q(&args[0], a(1), &p.beta, &p.gamma),
        "R" => big_r(a(0), a(1), &ag),
        "r" => small_r(a(0), a(1), &ag),
        "R_ag" => big_r_ag(a(0), a(1), &ag, &n()?),
        "pi_ag" => pi_ag(a(0), &ag, &n()?),
        "r_ag" => small_r_ag(a(0), a(1), &ag, &n()?),
        _ => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn params(alpha: Rational) -> Params {
        Params::with_gamma(alpha, int(1), rat(1, 100), int(1)).unwrap()
    }

    #[test]
    fn named_values() {
        let p = params(rat(1, 8));
        let ag = rat(1, 8);
        assert_eq!(poly_eval("R", &[int(1), int(0)], &p).unwrap(), int(4) * &ag);
        assert_eq!(poly_eval("R", &[int(0), int(1)], &p).unwrap(), int(4) * &ag);
        for name in ["pi", "p"] {
            assert_eq!(poly_eval(name, &[int(0)], &p).unwrap(), int(0));
        }
        for name in ["R", "r"] {
            assert_eq!(poly_eval(name, &[int(0), int(0)], &p).unwrap(), int(0));
        }
        assert_eq!(poly_eval("r", &[int(1), int(0)], &p).unwrap(), int(2) - int(4) * &ag);
        assert_eq!(poly_eval("r", &[int(0), int(1)], &p).unwrap(), int(2) - int(4) * &ag);
        // Q_l(1) with beta = gamma = l = 1: 6 - 4, which also equals 4l/gamma - 2(2 beta - l/gamma).
        assert_eq!(poly_eval("Q", &[int(1), int(1)], &p).unwrap(), int(2));
        assert!(matches!(poly_eval("zeta", &[int(1)], &p), Err(Error::UnknownPolynomial(_))));
        assert!(poly_eval("R", &[int(1)], &p).is_err());
        assert!(matches!(poly_eval("pi_ag", &[int(1)], &p), Err(Error::Regime(_))));
        assert_eq!(poly_eval("π_αγ", &[int(0)], &params(int(1))).unwrap(), int(20));
    }

    proptest! {
        #[test]
        fn float_and_exact_agree(h in 0i64..40, k in 0i64..40, a in 1i64..40) {
            let ag = rat(a, 8);
            let agf = a as f64 / 8.0;
            let n = int(2);
            let exact = big_r_ag(int(h), int(k), &ag, &n) + small_r_ag(int(h), int(k), &ag, &n);
            let float = big_r_ag(h as f64, k as f64, &agf, &2.0) + small_r_ag(h as f64, k as f64, &agf, &2.0);
            let e = crate::rational::to_f64(&exact);
            prop_assert!((e - float).abs() <= 1e-9 * (1.0 + e.abs()));
        }

        #[test]
        fn symmetric_ones_are_symmetric(h in 0i64..30, k in 0i64..30, a in 1i64..40) {
            let ag = rat(a, 8);
            prop_assert_eq!(big_r(int(h), int(k), &ag), big_r(int(k), int(h), &ag));
            prop_assert_eq!(small_r(int(h), int(k), &ag), small_r(int(k), int(h), &ag));
            prop_assert_eq!(big_r_ag(int(h), int(k), &ag, &int(3)), big_r_ag(int(k), int(h), &ag, &int(3)));
        }
    }
}
