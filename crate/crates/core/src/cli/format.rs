/// Formats `x` with `digits` significant digits in the style of C's `%g`:
/// fixed notation for decimal exponents in [-5, digits), scientific
/// otherwise, trailing zeros removed.
pub fn significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn like_percent_g() {
        assert_eq!(significant(0.999_666_4, 6), "0.999666");
        assert_eq!(significant(0.5, 6), "0.5");
        assert_eq!(significant(0.999_999_7, 6), "1");
        assert_eq!(significant(1483.0, 6), "1483");
        assert_eq!(significant(1.234_567e-7, 6), "1.23457e-7");
        assert_eq!(significant(-2.5e9, 6), "-2.5e9");
        assert_eq!(significant(123_456.7, 6), "123457");
        assert_eq!(significant(0.0001234, 3), "0.000123");
        assert_eq!(significant(0.0, 6), "0");
    }
}
