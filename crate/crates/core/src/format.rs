//! Number rendering shared by the CSV writers and the CLI.

/// 17 significant digits in scientific notation (exact round trip).
pub fn fmt_raw(v: f64) -> String {
    format!("{v:.16e}")
}

/// Fixed `dp` decimals; a rounded negative zero prints without its sign.
pub fn fmt_fixed(v: f64, dp: usize) -> String {
    let s = format!("{v:.dp$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

/// Fixed `dp` decimals with trailing zeros (and a bare point) removed.
pub fn fmt_trimmed(v: f64, dp: usize) -> String {
    let s = fmt_fixed(v, dp);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_and_trimmed() {
        assert_eq!(fmt_fixed(0.1307391, 6), "0.130739");
        assert_eq!(fmt_fixed(-1e-9, 6), "0.000000");
        assert_eq!(fmt_fixed(-0.0014951, 6), "-0.001495");
        assert_eq!(fmt_trimmed(1.0, 6), "1");
        assert_eq!(fmt_trimmed(1e-17, 6), "0");
        assert_eq!(fmt_trimmed(0.68324, 6), "0.68324");
    }

    #[test]
    fn raw_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123456.789] {
            assert_eq!(fmt_raw(v).parse::<f64>().unwrap(), v);
        }
    }
}
