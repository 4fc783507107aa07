use std::fs;
use std::io::Write;
use std::path::PathBuf;

use opstrata::matcore::{ComplexMatrix, GaugeNorm, ToleranceConfig};
use opstrata::Error;
use rand_chacha::ChaCha8Rng;

pub const MAX_DIM: usize = 64;

/// Process exit status with a message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, message: msg.into() }
    }

    pub fn inconsistent(msg: impl Into<String>) -> Self {
        Failure { code: 4, message: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) | Error::Shape(_) => 2,
            Error::Precondition(_)
            | Error::Hypothesis(_)
            | Error::OutOfRange(_)
            | Error::Geometry(_)
            | Error::Obstruction(_)
            | Error::Domain(_)
            | Error::Truncation { .. }
            | Error::GapTooLarge { .. }
            | Error::Radius { .. } => 3,
            Error::NonConvergence { .. } | Error::Singular | Error::Quadrature { .. } | Error::Inconsistent(_) => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::usage(format!("csv: {e}"))
    }
}

pub type CmdResult<T = ()> = std::result::Result<T, Failure>;

/// Settings shared by every experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub dimension: usize,
    pub trials: usize,
    pub gauge: GaugeNorm,
    pub tolerances: ToleranceConfig,
    pub output_path: Option<PathBuf>,
    pub json: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> CmdResult {
        if self.dimension == 0 || self.dimension > MAX_DIM {
            return Err(Failure::usage(format!("--dim must lie in 1..={MAX_DIM}, got {}", self.dimension)));
        }
        if self.trials == 0 {
            return Err(Failure::usage("--trials must be at least 1"));
        }
        self.tolerances.validate()?;
        Ok(())
    }

    /// Independent stream per trial, so rows do not depend on evaluation order.
    pub fn trial_rng(&self, trial: usize) -> ChaCha8Rng {
        let mut r = opstrata::random::rng(self.seed);
        r.set_stream(trial as u64);
        r
    }

    /// Writes `body` to `--out`, or stdout when unset.
    pub fn emit(&self, body: &str) -> CmdResult {
        match &self.output_path {
            Some(p) => fs::write(p, body)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(body.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }
}

pub fn read_matrix(path: &PathBuf) -> CmdResult<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    ComplexMatrix::from_json(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// 17 significant digits, enough for a lossless round trip.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// In-memory CSV table with a fixed header.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> CmdResult<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Table { writer })
    }

    pub fn row(&mut self, fields: &[String]) -> CmdResult {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(self) -> CmdResult<String> {
        let bytes = self.writer.into_inner().map_err(|e| Failure::usage(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
    }
}
