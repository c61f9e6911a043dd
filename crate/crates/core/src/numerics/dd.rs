//! Floating types usable for closed-form evaluation, including accurate
//! double-double division, `exp` and `ln`. The versions shipped with
//! `twofloat` are only good to about f64 precision, which ruins high-order
//! differences.

use num_traits::{Float, FloatConst};
use twofloat::TwoFloat;

pub trait Real: Float + FloatConst {
    fn exp_acc(self) -> Self;
    fn ln_acc(self) -> Self;

    fn div_acc(self, rhs: Self) -> Self {
        self / rhs
    }

    fn cosh_acc(self) -> Self {
        let e = self.abs().exp_acc();
        let two = Self::from(2.0).unwrap();
        (e + Self::one().div_acc(e)).div_acc(two)
    }

    /// `self^y` for `self ≥ 0`.
    fn powf_acc(self, y: Self) -> Self {
        if self == Self::zero() {
            return if y > Self::zero() { Self::zero() } else { Self::one() };
        }
        (y * self.ln_acc()).exp_acc()
    }
}

impl Real for f64 {
    fn exp_acc(self) -> f64 {
        self.exp()
    }

    fn ln_acc(self) -> f64 {
        self.ln()
    }

    fn cosh_acc(self) -> f64 {
        self.cosh()
    }

    fn powf_acc(self, y: f64) -> f64 {
        self.powf(y)
    }
}

fn ln2() -> TwoFloat {
    TwoFloat::try_from((std::f64::consts::LN_2, 2.3190468138462996e-17)).expect("normalized constant")
}

impl Real for TwoFloat {
    fn div_acc(self, rhs: TwoFloat) -> TwoFloat {
        let q = self / rhs;
        q + (self - rhs * q) / rhs
    }

    fn exp_acc(self) -> TwoFloat {
        let x = self.hi();
        if !x.is_finite() || x.abs() > 700.0 {
            return TwoFloat::from(x.exp());
        }
        let k = (x / std::f64::consts::LN_2).round();
        // r in [-ln2/2, ln2/2], then scaled down so the series converges fast.
        const SQUARINGS: i32 = 8;
        let r = (self - ln2() * k) / 2f64.powi(SQUARINGS);
        let mut term = TwoFloat::from(1.0);
        let mut sum = TwoFloat::from(1.0);
        for n in 1..=14 {
            term = term * r / n as f64;
            sum += term;
        }
        for _ in 0..SQUARINGS {
            sum = sum * sum;
        }
        sum * 2f64.powi(k as i32)
    }

    fn ln_acc(self) -> TwoFloat {
        let mut y = TwoFloat::from(self.hi().ln());
        for _ in 0..2 {
            let e = y.exp_acc();
            y += ((self - e) * 2.0).div_acc(self + e);
        }
        y
    }
}
