//! CSV output with a `#` comment header echoing the resolved configuration.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use chirp_tls::analysis::{p_x, BlochSiegertScan, LzPoint};
use chirp_tls::{ChirpDrive, StroboscopicTrace, TlsParams};

use crate::config::RunConfig;
use crate::CliError;

pub struct Output {
    inner: BufWriter<Box<dyn Write>>,
    path: Option<String>,
}

impl Output {
    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush().map_err(|e| self.io_error(e))
    }

    fn io_error(&self, e: io::Error) -> CliError {
        match &self.path {
            Some(p) => CliError::Io(format!("{p}: {e}")),
            None => CliError::Io(e.to_string()),
        }
    }
}

pub fn open(cfg: &RunConfig) -> Result<Output, CliError> {
    let sink: Box<dyn Write> = match &cfg.output_path {
        Some(path) => {
            Box::new(File::create(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    Ok(Output {
        inner: BufWriter::new(sink),
        path: cfg.output_path.clone(),
    })
}

/// 17 significant digits: enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_header(
    out: &mut Output,
    command: &str,
    cfg: &RunConfig,
    derived: &[String],
) -> Result<(), CliError> {
    let mut text = format!("# chirp-tls {command}\n");
    text.push_str("# units: t in ns; omega, delta in rad/ns; alpha in rad/ns^2 (config values below are in GHz, GHz/ns)\n");
    for line in cfg.to_toml().lines() {
        text.push_str(&format!("# {line}\n"));
    }
    for line in derived {
        text.push_str(&format!("# derived: {line}\n"));
    }
    out.inner
        .write_all(text.as_bytes())
        .map_err(|e| out.io_error(e))
}

fn write_rows<I>(out: &mut Output, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let result = (|| -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(&mut out.inner);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    })();
    result.map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => out.io_error(io),
        other => CliError::Io(format!("{other:?}")),
    })
}

pub fn write_traces(
    out: &mut Output,
    tls: &TlsParams,
    drive: &ChirpDrive,
    traces: &[StroboscopicTrace],
) -> Result<(), CliError> {
    let rows = traces.iter().flat_map(|tr| {
        tr.records.iter().map(move |rec| {
            let r = rec.r.vector();
            vec![
                tr.method.name().to_string(),
                rec.j.to_string(),
                num(rec.t),
                num(drive.omega_at(rec.t)),
                num(drive.detuning_at(tls, rec.t)),
                num(r.x),
                num(r.y),
                num(r.z),
                num(p_x(&rec.r)),
            ]
        })
    });
    write_rows(
        out,
        &[
            "method", "j", "t", "omega_t", "delta_t", "r_x", "r_y", "r_z", "p_x",
        ],
        rows,
    )
}

pub fn write_lz(out: &mut Output, points: &[LzPoint]) -> Result<(), CliError> {
    let rows = points.iter().map(|p| {
        vec![
            num(p.alpha),
            num(p.p_exact),
            num(p.p_formula),
            num(p.abs_err()),
        ]
    });
    write_rows(out, &["alpha", "p_exact", "p_formula", "abs_err"], rows)
}

pub fn write_peaks(
    out: &mut Output,
    tls: &TlsParams,
    predicted: f64,
    scan: &BlochSiegertScan,
) -> Result<(), CliError> {
    let rows = scan.peaks.iter().map(|(m, peak)| {
        vec![
            m.name().to_string(),
            num(*peak),
            num(tls.splitting() - peak),
            num(predicted),
        ]
    });
    write_rows(
        out,
        &["method", "omega0_peak", "shift", "predicted_shift"],
        rows,
    )
}
