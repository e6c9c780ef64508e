//! Decimal text for reals at 12 significant digits.

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to 12 significant digits. Negative zero becomes zero.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest decimal text of `round_sig(x)`; exponent form outside `[1e-6, 1e15)`.
pub fn format_real(x: f64) -> String {
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 {
        "0".to_string()
    } else if (1e-6..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(format_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_real(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(1.0 - 1e-16), "1");
        assert_eq!(format_real(-0.0), "0");
        assert_eq!(format_real(1.5e-17), "1.5e-17");
        assert_eq!(format_real(8100.0), "8100");
        assert_eq!(format_real(123_456_789.123_456_78), "123456789.123");
    }

    #[test]
    fn rounding_error_is_bounded() {
        for &x in &[
            0.1234567890123456,
            0.9999999999999,
            3.0e-9,
            std::f64::consts::FRAC_1_SQRT_2,
        ] {
            assert!((round_sig(x) - x).abs() <= 5e-12 * x.abs());
            let back: f64 = format_real(x).parse().unwrap();
            assert_eq!(back, round_sig(x));
        }
    }
}
