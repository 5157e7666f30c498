//! Fixed-precision decimal rendering.

/// Significant digits in every serialized number.
pub const SIG_DIGITS: usize = 12;

/// Plain decimal with exactly [`SIG_DIGITS`] significant digits.
/// Non-finite values render as an empty string.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    if x == 0.0 {
        return "0".into();
    }
    // scientific formatting does the rounding, carries included
    let s = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let n = digits.len() as i32;
    let body = if exp >= n - 1 {
        format!("{digits}{}", "0".repeat((exp - n + 1) as usize))
    } else if exp >= 0 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `x` rounded to [`SIG_DIGITS`] significant digits. Parsing
/// [`fmt_sig`]'s output gives back exactly this value.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    fmt_sig(x).parse().expect("decimal literal")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}
