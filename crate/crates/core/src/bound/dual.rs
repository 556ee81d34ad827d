use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// First-order dual number carrying a value and its derivative with respect
/// to the event-counting variable, evaluated at 1. Products follow
/// `(a, a') (b, b') = (ab, a b' + a' b)`, so propagating `Dual`s through the
/// generating-function algebra yields the exact derivative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub val: f64,
    pub der: f64,
}

impl Dual {
    pub const ZERO: Dual = Dual { val: 0.0, der: 0.0 };
    pub const ONE: Dual = Dual { val: 1.0, der: 0.0 };

    pub fn new(val: f64, der: f64) -> Self {
        Self { val, der }
    }

    pub fn constant(val: f64) -> Self {
        Self { val, der: 0.0 }
    }

    /// The counting variable raised to an integer weight, at the evaluation
    /// point 1: value 1, derivative `w`.
    pub fn var_pow(w: u32) -> Self {
        Self {
            val: 1.0,
            der: w as f64,
        }
    }

    pub fn abs_val(&self) -> f64 {
        self.val.abs()
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual::new(self.val + rhs.val, self.der + rhs.der)
    }
}

impl AddAssign for Dual {
    fn add_assign(&mut self, rhs: Dual) {
        self.val += rhs.val;
        self.der += rhs.der;
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self.val - rhs.val, self.der - rhs.der)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.val, -self.der)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual::new(self.val * rhs.val, self.val * rhs.der + self.der * rhs.val)
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, rhs: f64) -> Dual {
        Dual::new(self.val * rhs, self.der * rhs)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let val = self.val / rhs.val;
        Dual::new(val, (self.der - val * rhs.der) / rhs.val)
    }
}

impl Sum for Dual {
    fn sum<I: Iterator<Item = Dual>>(iter: I) -> Dual {
        iter.fold(Dual::ZERO, |acc, x| acc + x)
    }
}
