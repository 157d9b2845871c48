//! Plain-text amplitude tables.
//!
//! ```text
//! # free-form comment
//! # identical_nucleons: true
//! theta_rad A_re A_im B_re B_im C_re C_im D_re D_im E_re E_im F_re F_im
//! 0.0 1.0 0.0 ...
//! ```
//!
//! Lines starting with `#` are comments; the single directive comment
//! `# identical_nucleons: true|false` marks the table. The first other line
//! must be the header, and every remaining non-blank line holds 13
//! whitespace-separated numbers with strictly increasing angles in `[0, π]`.

use num_complex::Complex64;

use crate::scattering::{AmplitudeTable, InvariantAmplitudes};

use super::output::fmt_f64;

pub const HEADER: [&str; 13] = [
    "theta_rad", "A_re", "A_im", "B_re", "B_im", "C_re", "C_im", "D_re", "D_im", "E_re", "E_im", "F_re", "F_im",
];

const DIRECTIVE: &str = "identical_nucleons:";

/// A parse failure with its 1-based line number (0 for whole-file problems).
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

pub fn parse(text: &str) -> Result<AmplitudeTable, ParseError> {
    let mut identical = false;
    let mut saw_header = false;
    let mut rows: Vec<(f64, InvariantAmplitudes)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix(DIRECTIVE) {
                identical = match value.trim() {
                    "true" => true,
                    "false" => false,
                    other => return fail(line_no, format!("identical_nucleons must be true or false, got `{other}`")),
                };
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !saw_header {
            if fields != HEADER {
                return fail(line_no, format!("expected header `{}`", HEADER.join(" ")));
            }
            saw_header = true;
            continue;
        }
        if fields.len() != HEADER.len() {
            return fail(line_no, format!("expected {} fields, found {}", HEADER.len(), fields.len()));
        }
        let mut v = [0.0f64; 13];
        for (slot, (field, name)) in v.iter_mut().zip(fields.iter().zip(HEADER)) {
            *slot = match field.parse::<f64>() {
                Ok(x) if x.is_finite() => x,
                _ => return fail(line_no, format!("{name}: `{field}` is not a finite number")),
            };
        }
        let theta = v[0];
        if !(0.0..=std::f64::consts::PI + 1e-12).contains(&theta) {
            return fail(line_no, format!("theta_rad {theta} outside [0, π]"));
        }
        if let Some((prev, _)) = rows.last() {
            if theta <= *prev {
                return fail(line_no, "theta_rad must be strictly increasing");
            }
        }
        let amps = InvariantAmplitudes::from_array(std::array::from_fn(|i| Complex64::new(v[1 + 2 * i], v[2 + 2 * i])));
        rows.push((theta, amps));
    }
    if !saw_header {
        return fail(0, "missing header line");
    }
    if rows.is_empty() {
        return fail(0, "no data rows");
    }
    AmplitudeTable::new(rows, identical).map_err(|e| ParseError { line: 0, message: e.to_string() })
}

/// Renders a table in the format accepted by [`parse`].
pub fn render(table: &AmplitudeTable) -> String {
    let mut out = format!("# {DIRECTIVE} {}\n{}\n", table.identical_nucleons(), HEADER.join(" "));
    for (theta, amps) in table.rows() {
        let mut fields = vec![fmt_f64(*theta)];
        for c in amps.as_array() {
            fields.push(fmt_f64(c.re));
            fields.push(fmt_f64(c.im));
        }
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn round_trip() {
        let mut rng = stream(3, 0, 0);
        let rows = (0..5).map(|i| (0.5 * i as f64, InvariantAmplitudes::random(&mut rng))).collect();
        let table = AmplitudeTable::new(rows, false).unwrap();
        let back = parse(&render(&table)).unwrap();
        for ((t1, a1), (t2, a2)) in table.rows().iter().zip(back.rows()) {
            assert!((t1 - t2).abs() < 1e-13);
            for (x, y) in a1.as_array().iter().zip(a2.as_array()) {
                assert!((x - y).norm() < 1e-13 * (1.0 + x.norm()));
            }
        }
    }

    #[test]
    fn directive_and_comments() {
        let text = format!("# a table\n# identical_nucleons: true\n\n{}\n1.0 1 0 0 0 0 0 0 0 0 0 0 0\n", HEADER.join(" "));
        let t = parse(&text).unwrap();
        assert!(t.identical_nucleons());
        assert_eq!(t.rows().len(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let h = HEADER.join(" ");
        let e = parse(&format!("{h}\n0.1 1 0\n")).unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse(&format!("# c\n{h}\n0.1 1 0 0 0 0 0 0 0 0 0 0 0\n0.1 1 0 0 0 0 0 0 0 0 0 0 0\n")).unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse(&format!("{h}\n0.1 1 0 0 0 x 0 0 0 0 0 0 0\n")).unwrap_err();
        assert!(e.message.contains("C_re"));
        assert_eq!(parse("theta A\n").unwrap_err().line, 1);
        assert_eq!(parse("# only comments\n").unwrap_err().line, 0);
    }
}
