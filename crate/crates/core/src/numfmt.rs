//! Deterministic decimal formatting for CSV and JSON output.

/// `x` with `digits` significant digits in plain decimal notation.
///
/// Scientific notation is used only when the decimal exponent falls outside
/// `-7..=20`. With `trim` set, trailing fractional zeros are dropped.
pub fn format_significant(x: f64, digits: usize, trim: bool) -> String {
    assert!(digits >= 1);
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return if trim {
            "0".into()
        } else {
            format!("0.{}", "0".repeat(digits - 1))
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let mant_digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if !(-7..=20).contains(&exp) {
        let (lead, rest) = mant_digits.split_at(1);
        let rest = if trim { rest.trim_end_matches('0') } else { rest };
        out.push_str(lead);
        if !rest.is_empty() {
            out.push('.');
            out.push_str(rest);
        }
        out.push('e');
        out.push_str(&exp.to_string());
        return out;
    }

    let point = exp + 1;
    let (int_part, frac_part) = if point <= 0 {
        (
            "0".to_string(),
            format!("{}{}", "0".repeat((-point) as usize), mant_digits),
        )
    } else if point as usize >= mant_digits.len() {
        let pad = point as usize - mant_digits.len();
        (format!("{}{}", mant_digits, "0".repeat(pad)), String::new())
    } else {
        let (a, b) = mant_digits.split_at(point as usize);
        (a.to_string(), b.to_string())
    };
    let frac = if trim {
        frac_part.trim_end_matches('0').to_string()
    } else {
        frac_part
    };
    out.push_str(&int_part);
    if !frac.is_empty() {
        out.push('.');
        out.push_str(&frac);
    }
    out
}

/// CSV cell formatting: nine significant digits, trailing zeros trimmed.
pub fn csv_number(x: f64) -> String {
    format_significant(x, 9, true)
}

/// JSON number formatting: seventeen significant digits, exact round trip.
pub fn json_number(x: f64) -> String {
    format_significant(x, 17, false)
}
