//! Number formatting shared by every CSV writer.

/// Scientific notation with 17 significant digits, enough to round-trip
/// any f64.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            let s = float17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(float17(1.0), "1.0000000000000000e0");
    }
}
