//! Fixed six-significant-digit number rendering for tables and CSV.

/// Six significant digits with trailing zeros dropped.
///
/// Magnitudes at or above `1e6` or below `1e-3` switch to scientific form with
/// an uppercase `E` and a signed exponent of at least two digits.
///
/// ```
/// use apo_cli::numfmt::format_number;
/// assert_eq!(format_number(901_000_000.0), "9.01E+08");
/// assert_eq!(format_number(0.924789), "0.924789");
/// assert_eq!(format_number(430.0), "430");
/// ```
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Let the formatter do the rounding, then read the exponent back.
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-3..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}E{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Ratio shown with exactly two decimals.
pub fn format_speedup(v: f64) -> String {
    format!("{v:.2}")
}
