//! Number rounding and formatting shared by serialization and prompts.

/// Rounds to one decimal place, half away from zero.
///
/// Values produced by products of one-decimal coordinates (e.g. `36.55`) can
/// land a few ulps below the half-way point, so the scaled value is nudged
/// before rounding.
pub fn round1(v: f64) -> f64 {
    let scaled = v * 10.0;
    let nudge = 1e-9 * scaled.abs().max(1.0);
    let r = if scaled >= 0.0 {
        (scaled + nudge).round()
    } else {
        (scaled - nudge).round()
    };
    let out = r / 10.0;
    if out == 0.0 {
        0.0
    } else {
        out
    }
}

/// Renders a number the way the floorplan documents print them: integral
/// values without a fractional part, everything else in shortest round-trip
/// form.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Converts to a JSON number, keeping integral values integral.
pub fn json_number(v: f64) -> serde_json::Value {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        serde_json::Value::from(v as i64)
    } else {
        serde_json::Number::from_f64(v)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

/// Compares strings with embedded digit runs by numeric value, so that
/// `room|4` sorts before `room|10`.
pub fn natural_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let (mut a, mut b) = (a.as_bytes(), b.as_bytes());
    loop {
        match (a.first(), b.first()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let da = a.iter().take_while(|c| c.is_ascii_digit()).count();
                let db = b.iter().take_while(|c| c.is_ascii_digit()).count();
                let na = trim_zeros(&a[..da]);
                let nb = trim_zeros(&b[..db]);
                let ord = na.len().cmp(&nb.len()).then_with(|| na.cmp(nb));
                if ord != Ordering::Equal {
                    return ord;
                }
                let ord = da.cmp(&db);
                if ord != Ordering::Equal {
                    return ord;
                }
                a = &a[da..];
                b = &b[db..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(y);
                }
                a = &a[1..];
                b = &b[1..];
            }
        }
    }
}

fn trim_zeros(s: &[u8]) -> &[u8] {
    let n = s.iter().take_while(|&&c| c == b'0').count();
    &s[n..]
}
