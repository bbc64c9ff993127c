//! Deterministic number formatting and table/JSON emission.

use serde_json::Value;

pub const SIG_DIGITS: usize = 9;

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `%.9g`-style rendering: fixed notation for exponents in `[-5, 9)`, otherwise
/// scientific, trailing zeros dropped. Negative zero prints as `0`.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

/// `v` rounded to [`SIG_DIGITS`] significant digits, negative zero folded to 0.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().expect("round trip")
}

/// Rounds every float in a JSON tree in place.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let rounded = round_sig(n.as_f64().expect("f64"));
            *value = serde_json::Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with a trailing newline, floats rounded.
pub fn render_json(mut value: Value) -> String {
    round_json(&mut value);
    let mut text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    text.push('\n');
    text
}

/// Comma-separated table with a header row.
pub fn render_csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_like_printf_g() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-13.979400086720377), "-13.9794001");
        assert_eq!(fmt_sig(0.8105694691387022), "0.810569469");
        assert_eq!(fmt_sig(180.0), "180");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(2.5e-5), "0.000025");
        assert_eq!(fmt_sig(123456789.0), "123456789");
        assert_eq!(fmt_sig(1234567890.0), "1.23456789e9");
        assert_eq!(fmt_sig(9.9999999999), "10");
        assert_eq!(fmt_sig(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn json_rounding_nulls_non_finite() {
        let mut v = serde_json::json!({"a": 0.1234567891234, "b": [1, f64::NAN], "c": "x"});
        round_json(&mut v);
        assert_eq!(v["a"], serde_json::json!(0.123456789));
        assert_eq!(v["b"], serde_json::json!([1, null]));
        assert_eq!(v["c"], "x");
        let mut z = serde_json::json!(-0.0);
        round_json(&mut z);
        assert_eq!(serde_json::to_string(&z).unwrap(), "0.0");
    }

    proptest! {
        #[test]
        fn formatted_value_keeps_nine_digits(v in -1e12f64..1e12) {
            let parsed: f64 = fmt_sig(v).parse().unwrap();
            prop_assert!((parsed - v).abs() <= 5e-9 * v.abs());
            prop_assert_eq!(parsed, round_sig(v));
        }
    }
}
