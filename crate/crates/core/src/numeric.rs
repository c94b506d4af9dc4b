//! Shared numerical kernels: overflow-safe log-sum-exp, an error function
//! accurate to better than 1e-12, and a small double-double arithmetic used
//! where plain f64 rounding would swamp a tight finite-difference tolerance.

// Rational-approximation tables and double-double reference values are
// written at their published precision; the compiler rounds them once.
#![allow(clippy::excessive_precision)]

/// ln(sum_i exp(x_i)) computed with a max shift so no intermediate overflows.
///
/// The accumulation order is the slice order, so results are deterministic.
/// Returns negative infinity for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for &x in xs {
        if x > m {
            m = x;
        }
    }
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for &x in xs {
        acc += (x - m).exp();
    }
    m + acc.ln()
}

/// Streaming log-sum-exp accumulator with the same max-shift stabilization.
///
/// Merging two accumulators is exact in the same sense as the batch form;
/// merge order must be fixed by the caller for bitwise determinism.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl LogSumExp {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    pub fn push(&mut self, x: f64) {
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if self.max == f64::NEG_INFINITY {
            *self = *other;
            return;
        }
        if other.max <= self.max {
            self.sum += other.sum * (other.max - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - other.max).exp() + other.sum;
            self.max = other.max;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

// Rational-approximation coefficients for erf/erfc (Cody's three-interval
// scheme); relative accuracy is a few ulps, far inside the 1e-12 target.
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const ERF_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];
const INV_SQRT_PI: f64 = 5.6418958354775628695e-1;

/// Complement of the error function for y in (0.46875, inf).
///
/// exp(-y^2) is split as exp(-t^2)*exp(-(y-t)(y+t)) with t on a 1/16 grid so
/// the argument of each exponential is exactly representable enough to keep
/// full relative accuracy in the tail.
fn erfc_tail(y: f64) -> f64 {
    let result = if y <= 4.0 {
        let mut num = ERF_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERF_C[i]) * y;
            den = (den + ERF_D[i]) * y;
        }
        (num + ERF_C[7]) / (den + ERF_D[7])
    } else {
        let z = 1.0 / (y * y);
        let mut num = ERF_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + ERF_P[i]) * z;
            den = (den + ERF_Q[i]) * z;
        }
        let r = z * (num + ERF_P[4]) / (den + ERF_Q[4]);
        (INV_SQRT_PI - r) / y
    };
    let t = (y * 16.0).floor() / 16.0;
    let del = (y - t) * (y + t);
    (-t * t).exp() * (-del).exp() * result
}

/// Error function, accurate to a few ulps over the whole real line.
///
/// Saturates exactly to +/-1 for |x| >= 6, where erfc is below 2.2e-17;
/// this also absorbs infinite arguments coming from unbounded cutoffs.
pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y >= 6.0 {
        return if x > 0.0 { 1.0 } else { -1.0 };
    }
    if y <= 0.46875 {
        let z = if y > 1e-300 { y * y } else { 0.0 };
        let mut num = ERF_A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + ERF_A[i]) * z;
            den = (den + ERF_B[i]) * z;
        }
        return x * (num + ERF_A[3]) / (den + ERF_B[3]);
    }
    let result = 1.0 - erfc_tail(y);
    if x < 0.0 {
        -result
    } else {
        result
    }
}

/// Double-double value: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
///
/// Gives roughly 31 significant decimal digits; used for the potential-ODE
/// finite differences whose tolerance sits below the f64 rounding floor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// ln 2 to double-double precision.
    pub const LN2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two f64 values as a double-double.
    pub fn from_sum(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, o: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, o);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * o);
        Dd { hi, lo }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// exp(x) by ln-2 range reduction and a Taylor tail summed to below
    /// the double-double noise floor.
    pub fn exp(self) -> Dd {
        if self.hi.abs() > 700.0 {
            // Out of the range this crate ever uses; fall back to f64 scale.
            return Dd::from_f64(self.hi.exp());
        }
        let k = (self.hi / Dd::LN2.hi).round();
        let r = self - Dd::LN2.mul_f64(k);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        let mut n = 1.0;
        loop {
            // Divide by the exact integer; a precomputed f64 reciprocal
            // would cap the whole expansion at ~1e-22.
            term = term * r / Dd::from_f64(n);
            sum = sum + term;
            if term.hi.abs() < 1e-35 * sum.hi.abs() || n > 40.0 {
                break;
            }
            n += 1.0;
        }
        let scale = (k as i32).clamp(-1000, 1000);
        sum.mul_f64(f64::powi(2.0, scale))
    }

    /// Natural logarithm: f64 seed refined by one Newton step carried in
    /// double-double (y + z - z^2/2 with z = x*exp(-y) - 1).
    pub fn ln(self) -> Dd {
        let y = self.hi.ln();
        let z = self * Dd::from_f64(-y).exp() - Dd::ONE;
        let corr = z - z.sqr().mul_f64(0.5);
        Dd::from_f64(y) + corr
    }

    /// Hyperbolic sine; a Taylor branch keeps full relative accuracy
    /// through the cancellation near zero.
    pub fn sinh(self) -> Dd {
        if self.hi.abs() < 0.25 {
            let x2 = self.sqr();
            let mut term = self;
            let mut sum = self;
            let mut n = 1.0;
            loop {
                let denom = (2.0 * n) * (2.0 * n + 1.0);
                term = term * x2 / Dd::from_f64(denom);
                sum = sum + term;
                if term.hi.abs() < 1e-35 * sum.hi.abs().max(1e-300) || n > 20.0 {
                    break;
                }
                n += 1.0;
            }
            return sum;
        }
        let e = self.exp();
        (e - e.recip()).mul_f64(0.5)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;

    fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;

    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;

    fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let mut r = self - o.mul_f64(q1);
        let q2 = r.hi / o.hi;
        r = r - o.mul_f64(q2);
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + Dd::from_f64(q3)
    }
}
