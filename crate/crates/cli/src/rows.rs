//! Result rows and their CSV rendering.
//!
//! Column conventions: floats carry 12 significant digits in scientific
//! notation with a `.` decimal separator; missing fields are empty, never
//! zero-filled; a spread that the circular moment cannot resolve is the
//! literal `unbounded`; the slope cell of a localized combination is the
//! literal `loc`. Fit rows carry their window in the experiment id.

use phasewalk_core::Sigma;

pub const CSV_HEADER: &str =
    "experiment,coin,init,kappa_over_chi,gamma_over_chi,n,sigma,afd,slope,slope_stderr";

/// One CSV row; `None`/empty fields render as empty cells.
#[derive(Debug, Clone, Default)]
pub struct ResultRow {
    pub experiment: String,
    pub coin: String,
    pub init: String,
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub n: Option<usize>,
    pub sigma: SigmaField,
    pub afd: Option<f64>,
    pub slope: SlopeField,
    pub slope_stderr: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum SigmaField {
    #[default]
    Empty,
    Value(f64),
    /// The first circular moment vanished; the wrapped spread is undefined.
    Unbounded,
}

impl From<Sigma> for SigmaField {
    fn from(sigma: Sigma) -> Self {
        match sigma {
            Sigma::Bounded(v) => SigmaField::Value(v),
            Sigma::Unbounded => SigmaField::Unbounded,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum SlopeField {
    #[default]
    Empty,
    Value(f64),
    /// Localized combination: no growth exponent exists.
    Localized,
}

/// `x` with 12 significant digits, locale-independent.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.11e}")
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

impl ResultRow {
    fn to_csv_line(&self) -> String {
        let sigma = match self.sigma {
            SigmaField::Empty => String::new(),
            SigmaField::Value(v) => format_sig(v),
            SigmaField::Unbounded => "unbounded".to_string(),
        };
        let slope = match self.slope {
            SlopeField::Empty => String::new(),
            SlopeField::Value(v) => format_sig(v),
            SlopeField::Localized => "loc".to_string(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.coin,
            self.init,
            opt_f64(self.kappa),
            opt_f64(self.gamma),
            self.n.map(|n| n.to_string()).unwrap_or_default(),
            sigma,
            opt_f64(self.afd),
            slope,
            opt_f64(self.slope_stderr),
        )
    }
}

/// Renders header plus rows, one line each, with a trailing newline.
pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_csv_line());
        text.push('\n');
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits_survive_a_round_trip() {
        for &x in &[0.8, 1.0 / 3.0, 9.401e-3, -2.5e6, 1.234567890123e-7] {
            let shown = format_sig(x);
            let back: f64 = shown.parse().unwrap();
            assert!(
                ((back - x) / x).abs() < 1e-11,
                "{x} rendered as {shown}, reparsed as {back}"
            );
            assert!(!shown.contains(','));
        }
        assert_eq!(format_sig(0.0), "0");
    }

    #[test]
    fn missing_fields_render_as_empty_cells() {
        let row = ResultRow { experiment: "x".into(), ..Default::default() };
        assert_eq!(row.to_csv_line(), "x,,,,,,,,,");
    }

    #[test]
    fn markers_render_literally() {
        let row = ResultRow {
            experiment: "x".into(),
            sigma: SigmaField::Unbounded,
            slope: SlopeField::Localized,
            ..Default::default()
        };
        let line = row.to_csv_line();
        assert!(line.contains("unbounded"));
        assert!(line.contains("loc"));
    }

    #[test]
    fn csv_has_header_and_trailing_newline() {
        let text = to_csv(&[ResultRow::default()]);
        assert!(text.starts_with(CSV_HEADER));
        assert!(text.ends_with('\n'));
        assert_eq!(text.lines().count(), 2);
    }
}
