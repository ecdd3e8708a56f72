//! Deterministic JSON reports.
//!
//! Reports are rendered by a dedicated writer rather than a generic
//! serializer so that the byte output is reproducible: keys keep insertion
//! order, and every number is printed with 12 significant digits in the
//! style of printf's `%.12g`. Non-finite values become the strings "inf",
//! "-inf", and "nan" (JSON has no literals for them).

/// Ordered JSON value tree.
#[derive(Debug, Clone)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Array(Vec<Value>),
    Object(Vec<(&'static str, Value)>),
}

impl Value {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Value::Null => out.push_str("null"),
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::Int(i) => out.push_str(&i.to_string()),
            Value::Num(x) => {
                if x.is_finite() {
                    out.push_str(&format_g(*x, 12));
                } else if x.is_nan() {
                    out.push_str("\"nan\"");
                } else if *x > 0.0 {
                    out.push_str("\"inf\"");
                } else {
                    out.push_str("\"-inf\"");
                }
            }
            Value::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c if (c as u32) < 0x20 => {
                            out.push_str(&format!("\\u{:04x}", c as u32))
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Value::Array(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    item.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push(']');
            }
            Value::Object(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(out, indent + 1);
                    out.push('"');
                    out.push_str(key);
                    out.push_str("\": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                push_indent(out, indent);
                out.push('}');
            }
        }
    }

    pub fn num_array(values: impl IntoIterator<Item = f64>) -> Value {
        Value::Array(values.into_iter().map(Value::Num).collect())
    }
}

fn push_indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

/// Top-level report: fixed key order `command`, `version`, `input_digest`,
/// `tolerances`, `results`.
pub fn report(
    command: &'static str,
    digest: String,
    tolerances: Value,
    results: Value,
) -> String {
    let value = Value::Object(vec![
        ("command", Value::Str(command.to_string())),
        ("version", Value::Str(env!("CARGO_PKG_VERSION").to_string())),
        ("input_digest", Value::Str(digest)),
        ("tolerances", tolerances),
        ("results", results),
    ]);
    let mut text = value.render();
    text.push('\n');
    text
}

/// Echo of the effective tolerance settings; absent overrides report the
/// scale-relative rule in force.
pub fn tolerance_echo(psd_tol: Option<f64>, rank_tol: Option<f64>) -> Value {
    let rule = |name: &str, v: Option<f64>| match v {
        Some(x) => Value::Num(x),
        None => Value::Str(format!("auto ({name})")),
    };
    Value::Object(vec![
        ("psd_tol", rule("1e-9 * max(1, |lambda|_max)", psd_tol)),
        ("rank_tol", rule("n * eps * |lambda|_max", rank_tol)),
    ])
}

/// printf-style `%.<sig>g` formatting: fixed notation when the decimal
/// exponent of the rounded value lies in `[-4, sig)`, scientific notation
/// otherwise, trailing zeros trimmed, exponent written with a sign and at
/// least two digits.
pub fn format_g(x: f64, sig: usize) -> String {
    debug_assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exponent.parse().expect("exponent digits");
    if exp >= -4 && exp < sig as i32 {
        let precision = (sig as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{:.*}", precision, x);
        trim_zeros(&fixed)
    } else {
        let mantissa = trim_zeros(mantissa);
        format!("{}e{}{:02}", mantissa, if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}
