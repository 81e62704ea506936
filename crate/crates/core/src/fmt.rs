//! Number formatting shared by every report writer.

/// Formats `x` with 10 significant digits, trimming trailing zeros.
/// Magnitudes below `1e-5` or from `1e10` up use exponent notation.
pub fn sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::sig10;

    #[test]
    fn formats() {
        assert_eq!(sig10(0.0), "0");
        assert_eq!(sig10(1.0), "1");
        assert_eq!(sig10(-2.5), "-2.5");
        assert_eq!(sig10(1.0 / 3.0), "0.3333333333");
        assert_eq!(sig10(540.333_333_333_333), "540.3333333");
        assert_eq!(sig10(1_234_567_890.0), "1234567890");
        assert_eq!(sig10(123_456_789_012.0), "1.23456789e11");
        assert_eq!(sig10(1.5e-7), "1.5e-7");
        assert_eq!(sig10(2.0e20), "2e20");
        assert_eq!(sig10(-1e-12), "-1e-12");
    }
}
