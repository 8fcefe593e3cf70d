//! Closed-form normalized step energies and the displacement predictors.
//!
//! With `I0 = [0, n1] x [0, n2]` the normalized energy of a candidate `I` is
//! `(E(I, I0) - F(I0)) / eps`. For the island-retaining family it equals
//!
//! ```text
//! f(h, k) = P_{L2}(h) + P_{L1}(k) + (eps/gamma) R(h, k)
//!           - (eps/gamma) rho1 pi(k) - (eps/gamma) rho2 pi(h)
//! ```
//!
//! on the square `[0, min(n1, n2)/4]^2`, and the island-dissolving family has the piecewise
//! expression implemented in [`FormCoeffs::g`].

use num_traits::{Signed, Zero};

use super::extents::RectExtents;
use super::polys::{big_p, big_q, big_r, big_r_ag, c, pi, pi_ag, small_p, small_r, small_r_ag, Scalar};
use super::thresholds::Thresholds;
use crate::error::{Error, Result};
use crate::lattice::{Params, Regime};
use crate::rational::{self, from_u64, int, rat, Rational};

/// Everything the closed forms need, in one numeric type.
#[derive(Debug, Clone)]
pub struct FormCoeffs<T> {
    pub ag: T,
    pub beta: T,
    pub gamma: T,
    /// `eps / gamma`.
    pub eg: T,
    pub l1: T,
    pub l2: T,
    pub rho1: T,
    pub rho2: T,
    /// Island depth index; zero when islands are retained.
    pub n: T,
}

impl FormCoeffs<Rational> {
    pub fn new(ext: &RectExtents, p: &Params) -> Self {
        let (l1, l2) = ext.lengths(&p.eps);
        let n = Thresholds::new(p).n_ag.unwrap_or(0);
        Self {
            ag: &p.alpha * &p.gamma,
            beta: p.beta.clone(),
            gamma: p.gamma.clone(),
            eg: &p.eps / &p.gamma,
            l1,
            l2,
            rho1: ext.rho1.clone(),
            rho2: ext.rho2.clone(),
            n: from_u64(n),
        }
    }

    pub fn to_f64(&self) -> FormCoeffs<f64> {
        let f = rational::to_f64;
        FormCoeffs {
            ag: f(&self.ag),
            beta: f(&self.beta),
            gamma: f(&self.gamma),
            eg: f(&self.eg),
            l1: f(&self.l1),
            l2: f(&self.l2),
            rho1: f(&self.rho1),
            rho2: f(&self.rho2),
            n: f(&self.n),
        }
    }
}

impl<T: Scalar> FormCoeffs<T> {
    fn idx(v: u64) -> T {
        T::from_u64(v).expect("index fits")
    }

    /// Island-retaining normalized energy.
    pub fn f(&self, h: u64, k: u64) -> T {
        let (h, k) = (Self::idx(h), Self::idx(k));
        big_p(&self.l2, h.clone(), &self.ag, &self.beta, &self.gamma)
            + big_p(&self.l1, k.clone(), &self.ag, &self.beta, &self.gamma)
            + self.eg.clone() * big_r(h.clone(), k.clone(), &self.ag)
            - self.eg.clone() * self.rho1.clone() * pi(k, &self.ag)
            - self.eg.clone() * self.rho2.clone() * pi(h, &self.ag)
    }

    /// Island-dissolving normalized energy; `s` moves the vertical sides, `t` the horizontal.
    pub fn g(&self, s: u64, t: u64) -> T {
        self.g_uncorrected(s, t)
            - self.eg.clone() * self.rho_correction(s, &self.rho2)
            - self.eg.clone() * self.rho_correction(t, &self.rho1)
    }

    /// The horizontal-side correction `(eps / gamma) rho1 pi(k)` contained in [`Self::f`].
    pub fn f_rho1_term(&self, k: u64) -> T {
        self.eg.clone() * self.rho1.clone() * pi(Self::idx(k), &self.ag)
    }

    /// The horizontal-side correction contained in [`Self::g`].
    pub fn g_rho1_term(&self, t: u64) -> T {
        self.eg.clone() * self.rho_correction(t, &self.rho1)
    }

    fn rho_correction(&self, x: u64, rho: &T) -> T {
        let n = &self.n;
        let xv = Self::idx(x);
        if xv <= *n {
            rho.clone() * small_p(xv)
        } else {
            rho.clone() * pi_ag(xv - n.clone(), &self.ag, n)
        }
    }

    /// One side's share past the island depth: `P_l(x - N) + (6 l N / gamma)(x - N) + Q_l(N)`.
    fn deep_side(&self, l: &T, x: T) -> T {
        let n = &self.n;
        let d = x - n.clone();
        big_p(l, d.clone(), &self.ag, &self.beta, &self.gamma)
            + c::<T>(6) * l.clone() * n.clone() / self.gamma.clone() * d
            + big_q(l, n.clone(), &self.beta, &self.gamma)
    }

    fn g_uncorrected(&self, s: u64, t: u64) -> T {
        let n = &self.n;
        let (sv, tv) = (Self::idx(s), Self::idx(t));
        let eg = self.eg.clone();
        let ag = &self.ag;
        let (beta, gamma) = (&self.beta, &self.gamma);
        match (sv <= *n, tv <= *n) {
            (true, true) => {
                big_q(&self.l2, sv.clone(), beta, gamma)
                    + big_q(&self.l1, tv.clone(), beta, gamma)
                    + eg * small_r(sv, tv, ag)
            }
            (false, false) => {
                self.deep_side(&self.l2, sv.clone())
                    + self.deep_side(&self.l1, tv.clone())
                    + eg.clone() * small_r(n.clone(), n.clone(), ag)
                    + eg * big_r_ag(sv - n.clone(), tv - n.clone(), ag, n)
            }
            (false, true) => {
                self.deep_side(&self.l2, sv.clone())
                    + big_q(&self.l1, tv.clone(), beta, gamma)
                    + eg * small_r_ag(sv - n.clone(), tv, ag, n)
            }
            (true, false) => {
                big_q(&self.l2, sv.clone(), beta, gamma)
                    + self.deep_side(&self.l1, tv.clone())
                    + eg * small_r_ag(tv - n.clone(), sv, ag, n)
            }
        }
    }
}

/// Closed-form island-retaining energy at `(h, k)`.
pub fn f_eps(h: u64, k: u64, ext: &RectExtents, p: &Params) -> Result<Rational> {
    ext.check_index(h, k)?;
    Ok(FormCoeffs::new(ext, p).f(h, k))
}

/// Closed-form island-dissolving energy at `(s, t)`; needs `4 alpha gamma >= 1`.
pub fn g_eps(s: u64, t: u64, ext: &RectExtents, p: &Params) -> Result<Rational> {
    ext.check_index(s, t)?;
    if p.regime() == Regime::WeakRetain {
        return Err(Error::Regime("island-dissolving energy needs 4 alpha gamma >= 1".into()));
    }
    Ok(FormCoeffs::new(ext, p).g(s, t))
}

/// Continuous minimizer locations `m(l) = (2 beta gamma - (2 ag + 1) l) / (3l)` and
/// `mu(l) = (2 beta gamma - l) / (4l)`.
pub fn closed_form_centers(l: &Rational, p: &Params) -> Result<(Rational, Rational)> {
    if !l.is_positive() {
        return Err(Error::NonPositive("side length"));
    }
    let bg2 = int(2) * &p.beta * &p.gamma;
    let ag = &p.alpha * &p.gamma;
    let m = (&bg2 - (int(2) * ag + int(1)) * l) / (int(3) * l);
    let mu = (bg2 - l) / (int(4) * l);
    Ok((m, mu))
}

/// `floor(2 beta gamma / (3l) - 2 ag / 3 + 1/6)`, clamped at zero.
fn bulk_branch(l: &Rational, p: &Params) -> u64 {
    let ag = &p.alpha * &p.gamma;
    let v = int(2) * &p.beta * &p.gamma / (int(3) * l) - int(2) * ag / int(3) + rat(1, 6);
    clamp_floor(&v)
}

fn clamp_floor(v: &Rational) -> u64 {
    if v.is_negative() {
        0
    } else {
        rational::floor_i64(v) as u64
    }
}

/// Predicted displacement index of the two sides of length `l`: `n(l)` when islands are
/// retained, the four-branch `phi(l)` when they dissolve. Declines (regime error) when
/// `4 alpha gamma` is an odd integer above one, where the minimizer is not unique.
pub fn predict_displacement(l: &Rational, p: &Params) -> Result<u64> {
    if !l.is_positive() {
        return Err(Error::NonPositive("side length"));
    }
    let th = Thresholds::new(p);
    match th.regime {
        Regime::WeakRetain | Regime::Boundary => {
            let lc = th.lambda_c.as_ref().expect("present below the dissolve regime");
            Ok(if l > lc { 0 } else { bulk_branch(l, p) })
        }
        Regime::WeakDissolve => {
            if th.odd_integer_flag {
                return Err(Error::Regime(format!(
                    "4 alpha gamma = {} is an odd integer; the step minimizer is not unique",
                    rational::display(&p.four_alpha_gamma())
                )));
            }
            let (Some(lcs), Some(lm), Some(lp), Some(n)) =
                (&th.lambda_c_star, &th.lambda_minus, &th.lambda_plus, th.n_ag)
            else {
                unreachable!("dissolve thresholds are present")
            };
            Ok(if l > lp {
                0
            } else if l > lm {
                clamp_floor(&(&p.beta * &p.gamma / (int(2) * l) + rat(1, 4)))
            } else if l > lcs {
                n
            } else {
                bulk_branch(l, p)
            })
        }
    }
}

/// Predicted co-minimal index pairs `(h, k)` for a rectangle with sides `(L1, L2)`: `h` moves
/// the sides of length `L2`, `k` those of length `L1`. Besides the per-side predictors this
/// covers the exact-threshold cases where the coupling term decides.
pub fn predict_pair(l1: &Rational, l2: &Rational, p: &Params) -> Result<Vec<(u64, u64)>> {
    let th = Thresholds::new(p);
    let h = predict_displacement(l2, p)?;
    let k = predict_displacement(l1, p)?;
    let (short, long) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
    let short_is_l2 = l2 < l1;
    let one_step = if short_is_l2 { (1, 0) } else { (0, 1) };
    match th.regime {
        Regime::WeakRetain | Regime::Boundary => {
            let lc = th.lambda_c.as_ref().expect("present");
            if short == lc && long > lc {
                return Ok(vec![(0, 0)]);
            }
        }
        Regime::WeakDissolve => {
            let lp = th.lambda_plus.as_ref().expect("present");
            if short == lp && long > lp {
                let fag = p.four_alpha_gamma();
                if fag < int(2) {
                    return Ok(vec![(0, 0)]);
                }
                if fag == int(2) {
                    return Ok(vec![(0, 0), one_step]);
                }
            }
        }
    }
    Ok(vec![(h, k)])
}

/// `(ceil(max(m, mu, N)), ...)` style localization radius: the largest continuous minimizer
/// location over both sides, rounded up. Zero when all centers are negative.
pub fn localization_center(l1: &Rational, l2: &Rational, p: &Params) -> Result<u64> {
    let short = if l1 <= l2 { l1 } else { l2 };
    let (m, mu) = closed_form_centers(short, p)?;
    let mut x = m;
    if p.regime() == Regime::WeakDissolve {
        x = x.max(mu);
        if let Some(n) = Thresholds::new(p).n_ag {
            x = x.max(from_u64(n));
        }
    }
    if x.is_negative() || x.is_zero() {
        return Ok(0);
    }
    Ok(rational::ceil(&x).try_into().unwrap_or(u64::MAX))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::to_f64;

    fn retain() -> Params {
        Params::with_gamma(rat(1, 8), int(1), rat(1, 100), int(1)).unwrap()
    }

    fn dissolve(alpha: Rational) -> Params {
        Params::with_gamma(alpha, int(1), rat(1, 100), int(1)).unwrap()
    }

    #[test]
    fn centers() {
        let p = retain();
        assert_eq!(closed_form_centers(&rat(2, 5), &p).unwrap().0, rat(5, 4));
        assert_eq!(closed_form_centers(&int(2), &dissolve(int(1))).unwrap().1, int(0));
        let zero = int(2) / (int(2) * rat(1, 8) + int(1));
        assert_eq!(closed_form_centers(&zero, &p).unwrap().0, int(0));
    }

    #[test]
    fn displacement_examples() {
        let p = retain();
        assert_eq!(predict_displacement(&rat(2, 5), &p).unwrap(), 1);
        assert_eq!(predict_displacement(&int(1), &p).unwrap(), 0);
        let q = dissolve(int(1));
        assert_eq!(predict_displacement(&rat(1, 2), &q).unwrap(), 1);
        assert_eq!(predict_displacement(&rat(1, 4), &q).unwrap(), 2);
        assert_eq!(predict_displacement(&int(1), &q).unwrap(), 0);
        assert!(predict_displacement(&rat(1, 2), &dissolve(rat(3, 4))).is_err());
    }

    #[test]
    fn exact_threshold_pairs() {
        let p = retain();
        let lc = rat(8, 11);
        assert_eq!(predict_pair(&int(1), &lc, &p).unwrap(), vec![(0, 0)]);
        assert_eq!(predict_pair(&lc, &lc, &p).unwrap(), vec![(1, 1)]);
        let q = dissolve(rat(1, 2));
        let lp = rat(2, 3);
        assert_eq!(predict_pair(&int(1), &lp, &q).unwrap(), vec![(0, 0), (1, 0)]);
        assert_eq!(predict_pair(&lp, &int(1), &q).unwrap(), vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn worked_value() {
        // L = L' = 0.4, eps = 0.01 on an exact lattice: f(1, 0) = 5L + 4 alpha L - 4 beta + 4 alpha eps.
        let p = retain();
        let ext = RectExtents::from_lengths(&rat(2, 5), &rat(2, 5), &p.eps).unwrap();
        assert_eq!(f_eps(1, 0, &ext, &p).unwrap(), rat(-1795, 1000));
        assert_eq!(f_eps(0, 0, &ext, &p).unwrap(), int(0));
        assert!(f_eps(11, 0, &ext, &p).is_err());
        let coeffs = FormCoeffs::new(&ext, &p);
        assert!((coeffs.to_f64().f(3, 2) - to_f64(&coeffs.f(3, 2))).abs() < 1e-12);
    }

    #[test]
    fn dissolve_value_at_depth_index() {
        let p = dissolve(int(1));
        let ext = RectExtents::from_lengths(&rat(1, 2), &rat(53, 100), &p.eps).unwrap();
        let co = FormCoeffs::new(&ext, &p);
        let n = int(2);
        let expect = big_q(&co.l2, n.clone(), &co.beta, &co.gamma)
            + big_q(&co.l1, n.clone(), &co.beta, &co.gamma)
            + &co.eg * small_r(n.clone(), n.clone(), &co.ag)
            - &co.eg * &co.rho2 * small_p(n.clone())
            - &co.eg * &co.rho1 * small_p(n);
        assert_eq!(g_eps(2, 2, &ext, &p).unwrap(), expect);
        assert_eq!(g_eps(0, 0, &ext, &p).unwrap(), int(0));
        assert!(g_eps(0, 0, &ext, &retain()).is_err());
    }
}
