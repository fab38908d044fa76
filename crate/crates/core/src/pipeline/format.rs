//! Numeric formatting and in-memory CSV tables.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Precision {
    /// Six significant digits, ties to even.
    #[default]
    Sig6,
    /// Shortest representation that round-trips.
    Full,
}

impl Precision {
    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Sig6 => "6",
            Precision::Full => "full",
        }
    }

    pub fn format(self, x: f64) -> String {
        if !x.is_finite() {
            return if x.is_nan() {
                "NaN".into()
            } else if x > 0.0 {
                "inf".into()
            } else {
                "-inf".into()
            };
        }
        if x == 0.0 {
            return "0".into();
        }
        match self {
            Precision::Full => format!("{x}"),
            Precision::Sig6 => significant(x, 6),
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "6" | "sig6" | "default" => Ok(Precision::Sig6),
            "full" => Ok(Precision::Full),
            other => Err(Error::Config(format!(
                "precision must be `full` or `6`, got `{other}`"
            ))),
        }
    }
}

/// `%g`-style rendering with `digits` significant digits: fixed notation for
/// decimal exponents in `-5..digits`, scientific otherwise, trailing zeros
/// dropped. Rounding is the formatter's exact decimal rounding, ties to even.
fn significant(x: f64, digits: usize) -> String {
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A headed table rendered to CSV bytes with `\n` line endings.
#[derive(Debug, Clone)]
pub(crate) struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    precision: Precision,
}

impl Table {
    pub(crate) fn new(header: &[&'static str], precision: Precision) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
            precision,
        }
    }

    pub(crate) fn row(&mut self) -> RowBuilder<'_> {
        let precision = self.precision;
        self.rows.push(Vec::with_capacity(self.header.len()));
        RowBuilder {
            cells: self.rows.last_mut().expect("just pushed"),
            precision,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn to_bytes(&self) -> Vec<u8> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            debug_assert_eq!(
                row.len(),
                self.header.len(),
                "row width for {:?}",
                self.header
            );
            writer.write_record(row).expect("in-memory write");
        }
        writer.into_inner().expect("in-memory flush")
    }
}

pub(crate) struct RowBuilder<'a> {
    cells: &'a mut Vec<String>,
    precision: Precision,
}

impl RowBuilder<'_> {
    pub(crate) fn text(self, value: impl std::fmt::Display) -> Self {
        self.cells.push(value.to_string());
        self
    }

    pub(crate) fn num(self, value: f64) -> Self {
        let s = self.precision.format(value);
        self.cells.push(s);
        self
    }

    pub(crate) fn opt(self, value: Option<f64>) -> Self {
        let s = value.map(|v| self.precision.format(v)).unwrap_or_default();
        self.cells.push(s);
        self
    }
}
