//! Long-format CSV for metric series.

use std::fmt::Write as _;
use std::path::Path;

pub const HEADER: &str = "t,learner,metric,value,seed,adversary_eta";

/// One metric series of one run. `points` pairs a 1-based round with a value.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSeries {
    pub learner: String,
    pub metric: String,
    pub seed: u64,
    pub adversary_eta: Option<f64>,
    pub points: Vec<(usize, f64)>,
}

impl NamedSeries {
    /// Keeps round 1, every round divisible by `stride`, and the last round.
    pub fn from_values(
        learner: impl Into<String>,
        metric: impl Into<String>,
        seed: u64,
        adversary_eta: Option<f64>,
        values: &[f64],
        stride: usize,
    ) -> Self {
        let stride = stride.max(1);
        let last = values.len();
        let points = values
            .iter()
            .enumerate()
            .map(|(i, v)| (i + 1, *v))
            .filter(|(t, _)| *t == 1 || t % stride == 0 || *t == last)
            .collect();
        NamedSeries { learner: learner.into(), metric: metric.into(), seed, adversary_eta, points }
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed,
/// exponent notation outside `[1e-4, 1e12)`.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders rows ordered by learner, metric, seed and round, with the
/// adversary rate as the final tie-break.
pub fn render_csv(series: &[NamedSeries]) -> String {
    let mut rows: Vec<(&NamedSeries, usize, f64)> =
        series.iter().flat_map(|s| s.points.iter().map(move |&(t, v)| (s, t, v))).collect();
    rows.sort_by(|a, b| {
        a.0.learner
            .cmp(&b.0.learner)
            .then_with(|| a.0.metric.cmp(&b.0.metric))
            .then_with(|| a.0.seed.cmp(&b.0.seed))
            .then_with(|| a.1.cmp(&b.1))
            .then_with(|| a.0.adversary_eta.unwrap_or(f64::NEG_INFINITY).total_cmp(&b.0.adversary_eta.unwrap_or(f64::NEG_INFINITY)))
    });
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for (s, t, v) in rows {
        let eta = s.adversary_eta.map(format_value).unwrap_or_default();
        let _ = writeln!(out, "{t},{},{},{},{},{eta}", s.learner, s.metric, format_value(v), s.seed);
    }
    out
}

pub fn emit_csv(series: &[NamedSeries], path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_csv(series))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_value(0.5), "0.5");
        assert_eq!(format_value(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_value(2.0 / 3.0 * 1000.0), "666.666666667");
        assert_eq!(format_value(-1.25e-7), "-1.25e-07");
        assert_eq!(format_value(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_value(100.0), "100");
        assert_eq!(format_value(0.0001), "0.0001");
        assert_eq!(format_value(0.0), "0");
    }

    #[test]
    fn empty_and_small_outputs() {
        assert_eq!(render_csv(&[]), format!("{HEADER}\n"));
        let s = NamedSeries::from_values("MWU", "average_loss", 3, Some(0.5), &[0.1, 0.2, 0.3], 1);
        let text = render_csv(std::slice::from_ref(&s));
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().nth(1).unwrap(), "1,MWU,average_loss,0.1,3,0.5");
        assert_eq!(render_csv(&[s]), text);
    }

    #[test]
    fn rows_are_sorted() {
        let a = NamedSeries::from_values("OMWU", "x", 0, None, &[1.0, 2.0], 1);
        let b = NamedSeries::from_values("AMWU", "x", 1, None, &[3.0, 4.0], 1);
        let c = NamedSeries::from_values("AMWU", "x", 0, None, &[5.0, 6.0], 1);
        let text = render_csv(&[a, b, c]);
        let firsts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
        assert_eq!(firsts, vec!["5", "6", "3", "4", "1", "2"]);
    }

    #[test]
    fn stride_keeps_first_and_last() {
        let s = NamedSeries::from_values("A", "m", 0, None, &[0.0; 25], 10);
        let ts: Vec<usize> = s.points.iter().map(|p| p.0).collect();
        assert_eq!(ts, vec![1, 10, 20, 25]);
    }
}
