//! Shared test utilities: a double-double (~31 significant digits)
//! evaluation of the decay signal-variance closed form
//! `g(alpha) = (1 - e^(-2 alpha))/(2 alpha) - ((1 - e^(-alpha))/alpha)^2`.
//!
//! For small `alpha` the two closed-form terms agree to `O(alpha^2)`, so a
//! plain f64 evaluation loses most of its digits to cancellation — that is
//! exactly why the library switches to a series there. This oracle instead
//! performs the cancellation in double-double arithmetic, keeping ~18
//! significant digits even at `alpha = 1e-6`, and is deliberately built
//! from nothing but error-free transformations and a Taylor `expm1`, so it
//! shares no code path with the implementation under test.

/// Double-double value: the unevaluated sum `hi + lo` with `|lo|` below
/// half an ulp of `hi`.
#[derive(Debug, Clone, Copy)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

/// Error-free sum of two floats: `a + b = s + e` exactly (Knuth).
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|` (Dekker).
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Error-free product via fused multiply-add: `a * b = p + e` exactly.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    /// Accurate double-double addition; the leading-component cancellation
    /// is exact, which is the case this oracle exists for.
    pub fn add(self, y: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, y.hi);
        let (t1, t2) = two_sum(self.lo, y.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        let e = e + self.hi * y.lo + self.lo * y.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, d: f64) -> Dd {
        let (p, e) = two_prod(self.hi, d);
        let (hi, lo) = quick_two_sum(p, e + self.lo * d);
        Dd { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let q2 = ((self.hi - p) + (self.lo - e)) / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }
}

/// `e^(-x) - 1` in double-double from the Taylor series, for `0 < x <= 1`
/// (28 terms leave the truncation below 1e-29 even at the upper end).
pub fn expm1_neg_dd(x: f64) -> Dd {
    assert!(x > 0.0 && x <= 1.0, "oracle domain: 0 < x <= 1, got {x}");
    let mut sum = Dd::ZERO;
    let mut term = Dd::from_f64(1.0);
    for k in 1..=28 {
        term = term.mul_f64(-x).div_f64(k as f64);
        sum = sum.add(term);
    }
    sum
}

/// The closed form of `g(alpha)` evaluated in double-double and rounded to
/// f64 at the very end.
pub fn g_closed_form_dd(alpha: f64) -> f64 {
    let em1_a = expm1_neg_dd(alpha);
    let em1_2a = expm1_neg_dd(2.0 * alpha);
    // (1 - e^(-2a))/(2a) - ((1 - e^(-a))/a)^2, with 1 - e^(-x) = -expm1(-x).
    let t1 = em1_2a.neg().div_f64(2.0 * alpha);
    let r = em1_a.neg().div_f64(alpha);
    t1.add(r.mul(r).neg()).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_keeps_bits_f64_drops() {
        // 1 + 1e-20 is indistinguishable from 1 in f64 but not in dd.
        let x = Dd::from_f64(1.0).add(Dd::from_f64(1e-20));
        let diff = x.add(Dd::from_f64(-1.0));
        assert_eq!(diff.to_f64(), 1e-20);
    }

    #[test]
    fn taylor_expm1_matches_std_where_f64_is_accurate() {
        for &x in &[1e-6, 1e-3, 0.1, 0.5] {
            let dd = expm1_neg_dd(x).to_f64();
            let std = (-x).exp_m1();
            assert!(
                (dd / std - 1.0).abs() < 1e-15,
                "x = {x}: dd {dd} vs std {std}"
            );
        }
    }

    #[test]
    fn oracle_matches_plain_closed_form_where_no_cancellation_occurs() {
        // At alpha = 0.5 the two closed-form terms differ by ~2%, so plain
        // f64 evaluation is good to ~1e-14 and must agree with the oracle.
        let alpha = 0.5f64;
        let plain = (-2.0 * alpha).exp_m1() / (-2.0 * alpha)
            - ((-alpha).exp_m1() / alpha).powi(2);
        let dd = g_closed_form_dd(alpha);
        assert!((dd / plain - 1.0).abs() < 1e-13, "dd {dd} vs plain {plain}");
    }

    #[test]
    fn oracle_matches_leading_series_term_at_tiny_argument() {
        // g(alpha) -> alpha^2 / 12 as alpha -> 0; at 1e-8 the next term is
        // a 1e-8 relative correction.
        let g = g_closed_form_dd(1e-8);
        assert!((g / (1e-16 / 12.0) - 1.0).abs() < 1e-7, "g = {g}");
    }
}
