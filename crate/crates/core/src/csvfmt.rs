//! Number formatting shared by the CSV writers.

/// Twelve decimals; values that round to zero print without a sign so the
/// output does not depend on rounding noise.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}
