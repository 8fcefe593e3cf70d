use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Rect;
use crate::rational::{self, from_u64, Rational};

/// `2 * floor(floor(x / eps) / 2)`: the largest even integer not above `floor(x / eps)`.
pub fn i_floor_even(x: &Rational, eps: &Rational) -> Result<u64> {
    if !x.is_positive() {
        return Err(Error::NonPositive("length"));
    }
    if !eps.is_positive() {
        return Err(Error::NonPositive("eps"));
    }
    let cells = rational::floor(&(x / eps))
        .to_u64()
        .ok_or_else(|| Error::InvalidParams("length / eps exceeds u64".into()))?;
    Ok(cells - cells % 2)
}

/// Index extents of the current rectangle `[0, n1] x [0, n2]` together with the fractional
/// parts `rho` lost when the continuum lengths were snapped to even lattice extents.
///
/// `n1` is the horizontal extent (side length `L1 = eps (n1 + rho1)`), `n2` the vertical one.
/// The first displacement index `h` moves the two vertical sides (length `L2`) and so shrinks
/// `n1`; the second index `k` moves the horizontal sides and shrinks `n2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectExtents {
    pub n1: u64,
    pub n2: u64,
    #[serde(with = "crate::rational::exact")]
    pub rho1: Rational,
    #[serde(with = "crate::rational::exact")]
    pub rho2: Rational,
    /// The shorter side is an exact even multiple of `eps`.
    pub condo: bool,
}

impl RectExtents {
    pub fn from_lengths(l1: &Rational, l2: &Rational, eps: &Rational) -> Result<Self> {
        let n1 = i_floor_even(l1, eps)?;
        let n2 = i_floor_even(l2, eps)?;
        let rho1 = l1 / eps - from_u64(n1);
        let rho2 = l2 / eps - from_u64(n2);
        let condo = match l1.cmp(l2) {
            std::cmp::Ordering::Less => rho1.is_zero(),
            std::cmp::Ordering::Greater => rho2.is_zero(),
            std::cmp::Ordering::Equal => rho1.is_zero(),
        };
        Ok(Self { n1, n2, rho1, rho2, condo })
    }

    /// Like [`from_lengths`](Self::from_lengths) but rejects an `eps` that does not divide the
    /// shorter side into an even number of cells.
    pub fn from_lengths_strict(l1: &Rational, l2: &Rational, eps: &Rational) -> Result<Self> {
        let ext = Self::from_lengths(l1, l2, eps)?;
        if !ext.condo {
            return Err(Error::InvalidParams(format!(
                "eps = {} does not split the shorter side into an even number of cells",
                rational::display(eps)
            )));
        }
        Ok(ext)
    }

    /// Exact extents of a lattice rectangle.
    pub fn from_rect(rect: &Rect) -> Self {
        Self::exact(rect.n1() as u64, rect.n2() as u64)
    }

    pub fn exact(n1: u64, n2: u64) -> Self {
        Self {
            n1,
            n2,
            rho1: Rational::zero(),
            rho2: Rational::zero(),
            condo: true,
        }
    }

    /// Continuum side lengths `(L1, L2)`.
    pub fn lengths(&self, eps: &Rational) -> (Rational, Rational) {
        (
            eps * (from_u64(self.n1) + &self.rho1),
            eps * (from_u64(self.n2) + &self.rho2),
        )
    }

    /// Admissible index box `[0, n1/4] x [0, n2/4]`.
    pub fn index_box(&self) -> (u64, u64) {
        (self.n1 / 4, self.n2 / 4)
    }

    /// Largest `x` such that both indices may range over `[0, x]` with the closed forms valid.
    pub fn square_bound(&self) -> u64 {
        self.n1.min(self.n2) / 4
    }

    pub fn check_index(&self, h: u64, k: u64) -> Result<()> {
        let (max_h, max_k) = self.index_box();
        if h > max_h || k > max_k {
            return Err(Error::IndexOutOfRange { h, k, max_h, max_k });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn floor_even_examples() {
        assert_eq!(i_floor_even(&int(1), &rat(3, 10)).unwrap(), 2);
        assert_eq!(i_floor_even(&int(4), &int(1)).unwrap(), 4);
        assert_eq!(i_floor_even(&int(5), &int(1)).unwrap(), 4);
        assert!(i_floor_even(&int(0), &int(1)).is_err());
    }

    #[test]
    fn extents_and_rho() {
        let e = rat(1, 10);
        let ext = RectExtents::from_lengths(&rat(2, 5), &rat(43, 100), &e).unwrap();
        assert_eq!((ext.n1, ext.n2), (4, 4));
        assert_eq!(ext.rho1, int(0));
        assert_eq!(ext.rho2, rat(3, 10));
        assert!(ext.condo);
        assert_eq!(ext.lengths(&e), (rat(2, 5), rat(43, 100)));
        let loose = RectExtents::from_lengths(&rat(43, 100), &rat(9, 20), &rat(1, 10)).unwrap();
        assert!(!loose.condo);
        assert!(RectExtents::from_lengths_strict(&rat(43, 100), &rat(9, 20), &rat(1, 10)).is_err());
        assert!(ext.check_index(1, 1).is_ok());
        assert!(matches!(ext.check_index(2, 0), Err(Error::IndexOutOfRange { .. })));
    }
}
