//! Parsing of complex flag values in the shell-safe `a+bi` form
//! (no spaces), e.g. `0+2i`, `1.5-0.3i`, `-0.25+1i`.

use num_complex::Complex64;

/// Parse `a+bi` / `a-bi`. The imaginary part is mandatory and must end in `i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    if !t.ends_with('i') {
        return Err(format!("expected a+bi form ending in 'i', got '{s}'"));
    }
    let body = &t[..t.len() - 1];
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let ch = bytes[k] as char;
        if (ch == '+' || ch == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let k = split.ok_or_else(|| format!("missing sign between real and imaginary part in '{s}'"))?;
    let re: f64 = body[..k]
        .parse()
        .map_err(|_| format!("bad real part '{}' in '{s}'", &body[..k]))?;
    let im_str = &body[k..];
    let im: f64 = if im_str == "+" {
        1.0
    } else if im_str == "-" {
        -1.0
    } else {
        im_str.parse().map_err(|_| format!("bad imaginary part '{im_str}' in '{s}'"))?
    };
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_forms() {
        assert_eq!(parse_complex("0+2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("1.5-0.3i").unwrap(), Complex64::new(1.5, -0.3));
        assert_eq!(parse_complex("-0.25+1i").unwrap(), Complex64::new(-0.25, 1.0));
        assert_eq!(parse_complex("0+1i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("2e-3+1e1i").unwrap(), Complex64::new(2e-3, 10.0));
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_complex("1.5").is_err());
        assert!(parse_complex("i").is_err());
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("1 + 2i").is_err());
    }
}
