use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::Mode;
use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    ExactSupport,
    WrongSupport,
    AngularError,
    RecoveryFailed,
    ConfusablePair,
    AdversaryFailed,
    ConstructionFailed,
    BudgetExceeded,
}

impl Outcome {
    const ALL: [Outcome; 8] = [
        Outcome::ExactSupport,
        Outcome::WrongSupport,
        Outcome::AngularError,
        Outcome::RecoveryFailed,
        Outcome::ConfusablePair,
        Outcome::AdversaryFailed,
        Outcome::ConstructionFailed,
        Outcome::BudgetExceeded,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::ExactSupport => "exact-support",
            Outcome::WrongSupport => "wrong-support",
            Outcome::AngularError => "angular-error",
            Outcome::RecoveryFailed => "recovery-failed",
            Outcome::ConfusablePair => "confusable-pair",
            Outcome::AdversaryFailed => "adversary-failed",
            Outcome::ConstructionFailed => "construction-failed",
            Outcome::BudgetExceeded => "budget-exceeded",
        }
    }

    pub fn parse(s: &str) -> Option<Outcome> {
        Self::ALL.into_iter().find(|o| o.as_str() == s)
    }
}

/// One trial of a sweep, or a marker for a grid point that produced no trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub mode: Mode,
    pub grid_index: usize,
    pub n: usize,
    pub k: usize,
    pub m: Option<usize>,
    pub d: Option<usize>,
    pub alpha: Option<String>,
    pub epsilon: Option<f64>,
    pub m2: Option<usize>,
    pub trial: Option<usize>,
    pub seed: Option<u64>,
    pub value_model: Option<String>,
    pub outcome: Outcome,
    pub angular_error: Option<f64>,
    pub true_support: Vec<usize>,
    pub recovered_support: Vec<usize>,
    /// Smallest majority count over the true support.
    pub min_count_in: Option<usize>,
    /// Largest majority count off the true support.
    pub max_count_out: Option<usize>,
    pub ties: Option<usize>,
    pub verification: Option<String>,
    pub attempts: Option<u32>,
}

pub const CSV_HEADER: [&str; 21] = [
    "mode",
    "grid_index",
    "n",
    "k",
    "m",
    "d",
    "alpha",
    "epsilon",
    "m2",
    "trial",
    "seed",
    "value_model",
    "outcome",
    "angular_error",
    "true_support",
    "recovered_support",
    "min_count_in",
    "max_count_out",
    "ties",
    "verification",
    "attempts",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn opt_float(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn join(indices: &[usize]) -> String {
    indices.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

impl TrialRecord {
    fn to_row(&self) -> Vec<String> {
        vec![
            self.mode.as_str().to_string(),
            self.grid_index.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            opt(&self.m),
            opt(&self.d),
            opt(&self.alpha),
            opt_float(self.epsilon),
            opt(&self.m2),
            opt(&self.trial),
            opt(&self.seed),
            opt(&self.value_model),
            self.outcome.as_str().to_string(),
            opt_float(self.angular_error),
            join(&self.true_support),
            join(&self.recovered_support),
            opt(&self.min_count_in),
            opt(&self.max_count_out),
            opt(&self.ties),
            opt(&self.verification),
            opt(&self.attempts),
        ]
    }

    fn from_row(row: &csv::StringRecord) -> Result<Self, HarnessError> {
        let field = |i: usize| row.get(i).unwrap_or("");
        let bad = |i: usize| HarnessError::Parse(format!("bad value `{}` in column {}", field(i), CSV_HEADER[i]));
        fn parse_opt<T: std::str::FromStr>(s: &str) -> Result<Option<T>, ()> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| ())
            }
        }
        let text = |i: usize| (!field(i).is_empty()).then(|| field(i).to_string());
        let indices = |i: usize| -> Result<Vec<usize>, HarnessError> {
            if field(i).is_empty() {
                return Ok(Vec::new());
            }
            field(i).split(';').map(|s| s.parse().map_err(|_| bad(i))).collect()
        };
        if row.len() != CSV_HEADER.len() {
            return Err(HarnessError::Parse(format!(
                "expected {} columns, found {}",
                CSV_HEADER.len(),
                row.len()
            )));
        }
        Ok(TrialRecord {
            mode: Mode::parse(field(0)).ok_or_else(|| bad(0))?,
            grid_index: field(1).parse().map_err(|_| bad(1))?,
            n: field(2).parse().map_err(|_| bad(2))?,
            k: field(3).parse().map_err(|_| bad(3))?,
            m: parse_opt(field(4)).map_err(|_| bad(4))?,
            d: parse_opt(field(5)).map_err(|_| bad(5))?,
            alpha: text(6),
            epsilon: parse_opt(field(7)).map_err(|_| bad(7))?,
            m2: parse_opt(field(8)).map_err(|_| bad(8))?,
            trial: parse_opt(field(9)).map_err(|_| bad(9))?,
            seed: parse_opt(field(10)).map_err(|_| bad(10))?,
            value_model: text(11),
            outcome: Outcome::parse(field(12)).ok_or_else(|| bad(12))?,
            angular_error: parse_opt(field(13)).map_err(|_| bad(13))?,
            true_support: indices(14)?,
            recovered_support: indices(15)?,
            min_count_in: parse_opt(field(16)).map_err(|_| bad(16))?,
            max_count_out: parse_opt(field(17)).map_err(|_| bad(17))?,
            ties: parse_opt(field(18)).map_err(|_| bad(18))?,
            verification: text(19),
            attempts: parse_opt(field(20)).map_err(|_| bad(20))?,
        })
    }
}

/// Streams records as RFC 4180 CSV with a fixed header.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(sink: W) -> Result<Self, HarnessError> {
        let mut inner = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(sink);
        inner.write_record(CSV_HEADER)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, record: &TrialRecord) -> Result<(), HarnessError> {
        self.inner.write_record(record.to_row())?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), HarnessError> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_csv<W: Write>(records: &[TrialRecord], sink: W) -> Result<(), HarnessError> {
    let mut writer = RecordWriter::new(sink)?;
    for record in records {
        writer.write(record)?;
    }
    writer.flush()
}

/// Writes `records` to `path`; identical inputs give byte-identical files.
pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<(), HarnessError> {
    write_csv(records, File::create(path)?)
}

pub fn read_csv_from<R: Read>(source: R) -> Result<Vec<TrialRecord>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(HarnessError::Parse("unexpected CSV header".into()));
    }
    reader.records().map(|row| TrialRecord::from_row(&row?)).collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<TrialRecord>, HarnessError> {
    read_csv_from(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample(trial: usize, err: Option<f64>) -> TrialRecord {
        TrialRecord {
            mode: Mode::ApproxSweep,
            grid_index: 0,
            n: 50,
            k: 2,
            m: Some(1000),
            d: Some(40),
            alpha: Some("1/2".into()),
            epsilon: Some(0.1),
            m2: Some(64),
            trial: Some(trial),
            seed: Some(u64::MAX),
            value_model: Some("condition-number:1000000".into()),
            outcome: Outcome::AngularError,
            angular_error: err,
            true_support: vec![3, 17],
            recovered_support: vec![3, 17],
            min_count_in: Some(30),
            max_count_out: Some(4),
            ties: Some(0),
            verification: Some("brute-force".into()),
            attempts: Some(1),
        }
    }

    #[test]
    fn empty_list_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, format!("{}\r\n", CSV_HEADER.join(",")));
        assert!(read_csv_from(text.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        let v = std::f64::consts::PI / 7.0;
        assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn records_survive_a_round_trip() {
        let records = vec![sample(0, Some(0.123456789)), sample(1, None)];
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let back = read_csv_from(buf.as_slice()).unwrap();
        assert_eq!(back, records);
        let mut again = Vec::new();
        write_csv(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(read_csv_from("a,b\r\n1,2\r\n".as_bytes()).is_err());
    }
}
