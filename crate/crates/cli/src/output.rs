//! CSV artifacts with a commented header block.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use nervecov::Result;

/// Buffered CSV body plus header metadata, written in one go at the end so
/// the header can carry the wall time and late diagnostics.
pub struct Report {
    command: &'static str,
    config: Vec<(String, String)>,
    notes: Vec<(String, String)>,
    seed: Option<u64>,
    workers: Option<usize>,
    body: csv::Writer<Vec<u8>>,
    started: Instant,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            config: Vec::new(),
            notes: Vec::new(),
            seed: None,
            workers: None,
            body: csv::WriterBuilder::new().flexible(true).from_writer(Vec::new()),
            started: Instant::now(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn note(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.notes.push((key.to_string(), value.to_string()));
        self
    }

    pub fn run(&mut self, seed: u64, workers: usize) -> &mut Self {
        self.seed = Some(seed);
        self.workers = Some(workers);
        self
    }

    pub fn row<I, T>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.body.write_record(fields).map_err(csv_error)
    }

    /// Writes header and body to `path`, or to stdout.
    pub fn finish(self, path: Option<&Path>, wall_time: bool) -> Result<()> {
        let mut out = Vec::new();
        writeln!(out, "# nervecov {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# command: {}", self.command)?;
        let echo: Vec<String> = self.config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(out, "# config: {}", echo.join(" "))?;
        match self.seed {
            Some(seed) => writeln!(out, "# seed: {seed}")?,
            None => writeln!(out, "# seed: none")?,
        }
        writeln!(out, "# workers: {}", self.workers.unwrap_or(1))?;
        for (k, v) in &self.notes {
            writeln!(out, "# {k}: {v}")?;
        }
        if wall_time {
            writeln!(out, "# wall_time_s: {:.3}", self.started.elapsed().as_secs_f64())?;
        } else {
            writeln!(out, "# wall_time_s: omitted")?;
        }
        out.extend(self.body.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?);
        match path {
            Some(p) => fs::write(p, out)?,
            None => std::io::stdout().write_all(&out)?,
        }
        Ok(())
    }
}

pub fn csv_error(e: csv::Error) -> nervecov::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => nervecov::Error::Io(io),
        other => nervecov::Error::Parameter(format!("csv: {other:?}")),
    }
}

/// Shortest round-trip representation of a float; exponent form below 1e-4.
pub fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}
