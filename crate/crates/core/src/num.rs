//! Exact decimal parsing and formatting for money, distances and hours.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::Rational;

/// Parses `12`, `-3.25`, `0.05` or `7/3` without going through floats.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty number".into());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| format!("bad numerator in {t:?}"))?;
        let d: i64 = d.trim().parse().map_err(|_| format!("bad denominator in {t:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(format!("not a number: {t:?}"));
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("not a number: {t:?}"));
    }
    if frac.len() > 15 {
        return Err(format!("too many decimal places in {t:?}"));
    }
    let scale = 10i64.pow(frac.len() as u32);
    let w: i64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| format!("number too large: {t:?}"))? };
    let f: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| format!("not a number: {t:?}"))? };
    let n = w
        .checked_mul(scale)
        .and_then(|v| v.checked_add(f))
        .ok_or_else(|| format!("number too large: {t:?}"))?;
    Ok(Rational::new(if neg { -n } else { n }, scale))
}

/// Inverse of [`parse_rational`]: integers plainly, terminating fractions as
/// decimals, everything else as `n/d`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.to_integer().to_string();
    }
    let mut d = *r.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    let scaled = r * Rational::from_integer(10i64.pow(places));
    let n = scaled.to_integer();
    let sign = if n < 0 { "-" } else { "" };
    let n = n.abs();
    let scale = 10i64.pow(places);
    format!("{sign}{}.{:0width$}", n / scale, n % scale, width = places as usize)
}

/// Smallest integer not below `r`.
pub fn ceil(r: &Rational) -> i64 {
    Integer::div_ceil(r.numer(), r.denom())
}

/// Ceiling of `a / b` for positive integers.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    Integer::div_ceil(&a, &b)
}

/// Nearest integer, halves rounded away from zero.
pub fn round(r: &Rational) -> i64 {
    r.round().to_integer()
}

/// Rounded amount with thousands separators, e.g. `1,821`.
pub fn grouped(r: &Rational) -> String {
    let v = round(r);
    let digits = v.abs().to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    if v < 0 {
        format!("-{out}")
    } else {
        out
    }
}

/// `HH:MM` when the hour value falls on a whole minute, otherwise the exact
/// rational hour.
pub fn clock(hours: &Rational) -> String {
    let minutes = hours * Rational::from_integer(60);
    if minutes.is_integer() && !minutes.is_negative() {
        let m = minutes.to_integer();
        format!("{:02}:{:02}", m / 60, m % 60)
    } else {
        format_rational(hours)
    }
}

/// Reads back what [`clock`] writes.
pub fn parse_clock(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((h, m)) = t.split_once(':') {
        let h: i64 = h.parse().ok()?;
        let m: i64 = m.parse().ok()?;
        if !(0..60).contains(&m) || h < 0 {
            return None;
        }
        return Some(Rational::new(h * 60 + m, 60));
    }
    parse_rational(t).ok()
}

/// `16 hours 26 mins` style text for a duration in hours.
pub fn hours_text(hours: &Rational) -> String {
    let total = round(&(hours * Rational::from_integer(60)));
    format!("{} hours {} mins", total / 60, total % 60)
}

/// Reads `16 hours 26 mins`, `1 hour`, `45 mins` into exact hours.
pub fn parse_hours_text(text: &str) -> Option<Rational> {
    let words: Vec<&str> = text.split_whitespace().collect();
    if words.is_empty() || words.len() % 2 != 0 {
        return None;
    }
    let mut total = Rational::zero();
    for pair in words.chunks(2) {
        let v = parse_rational(pair[0]).ok()?;
        let unit = pair[1].trim_end_matches(',').to_ascii_lowercase();
        total += match unit.as_str() {
            "hour" | "hours" | "hr" | "hrs" | "h" => v,
            "min" | "mins" | "minute" | "minutes" => v / Rational::from_integer(60),
            _ => return None,
        };
    }
    Some(total)
}

/// Lossy conversion for reports that want a plain number.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_round_trip() {
        for text in ["0", "12", "-3.25", "0.05", "7/3", "1821", "0.125"] {
            let r = parse_rational(text).unwrap();
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r, "{text}");
        }
        assert_eq!(parse_rational("0.05").unwrap(), Rational::new(1, 20));
        assert_eq!(format_rational(&Rational::new(1, 3)), "1/3");
        assert!(parse_rational("1e5").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(ceil(&Rational::new(5, 2)), 3);
        assert_eq!(ceil(&Rational::from_integer(4)), 4);
        assert_eq!(ceil_div(5, 4), 2);
        assert_eq!(grouped(&Rational::from_integer(1821)), "1,821");
        assert_eq!(grouped(&Rational::new(999, 2)), "500");
        assert_eq!(clock(&Rational::new(49, 6)), "08:10");
        assert_eq!(parse_clock("08:10"), Some(Rational::new(49, 6)));
        assert_eq!(clock(&Rational::new(1, 7)), "1/7");
    }

    #[test]
    fn duration_text() {
        let h = parse_hours_text("16 hours 26 mins").unwrap();
        assert_eq!(h, Rational::new(16 * 60 + 26, 60));
        assert_eq!(hours_text(&h), "16 hours 26 mins");
        assert_eq!(parse_hours_text("45 mins"), Some(Rational::new(3, 4)));
        assert_eq!(parse_hours_text("soon"), None);
    }
}
