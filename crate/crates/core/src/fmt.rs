//! Locale-independent numeric rendering with 17 significant digits.

/// Renders `v` like C's `%.17g`: shortest of fixed or exponent notation,
/// trailing zeros trimmed, `.` as decimal separator.
pub fn sig17(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        let mantissa = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", mantissa, sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g17() {
        assert_eq!(sig17(0.0), "0");
        assert_eq!(sig17(1.0), "1");
        assert_eq!(sig17(-2.5), "-2.5");
        assert_eq!(sig17(0.1), "0.10000000000000001");
        assert_eq!(sig17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(sig17(1e-7), "9.9999999999999995e-08");
        assert_eq!(sig17(1e20), "1e+20");
        assert_eq!(sig17(123456.0), "123456");
    }

    #[test]
    fn round_trips_exactly() {
        for &v in &[std::f64::consts::PI, -1e-300, 6.02214076e23, 0.292_893_218_813_452_5] {
            assert_eq!(sig17(v).parse::<f64>().unwrap(), v);
        }
    }
}
