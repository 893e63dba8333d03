use std::fs;
use std::io::Write;
use std::path::PathBuf;

use cvcomp::{generate_sweep, stepped_range, Quantity, SweepAxis, SweepGrid64, SweepRow64};
use serde::Serialize;

use crate::args::{CutoffArgs, Format, SweepArgs};
use crate::error::{CliError, CliResult};

pub const CONVENTIONS: &str =
    "vacuum VM = identity; x = (a + a^dag)/sqrt2, p = -i(a - a^dag)/sqrt2; xi = tanh r";

/// Grid description echoed into the output metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub quantity: Quantity,
    pub figure: Option<u8>,
    pub axis: &'static str,
    pub axis_min: f64,
    pub axis_max: f64,
    pub axis_step: f64,
    pub axis_points: usize,
    pub t_values: Vec<usize>,
}

impl CutoffArgs {
    pub fn resolve(&self) -> CliResult<Vec<usize>> {
        if let Some(list) = &self.t_list {
            if list.is_empty() {
                return Err(CliError::Usage("--t-list is empty".into()));
            }
            return Ok(list.clone());
        }
        let (lo, hi) = (self.t_min.unwrap_or(1), self.t_max.unwrap_or(50));
        if lo > hi {
            return Err(CliError::Usage(format!("empty cut-off range {lo}..={hi}")));
        }
        Ok((lo..=hi).collect())
    }
}

impl SweepArgs {
    pub fn grid(&self) -> CliResult<(SweepGrid64, GridSpec)> {
        let grid = match self.figure {
            Some(n) => SweepGrid64::figure(n)?,
            None => {
                let quantity = self
                    .quantity
                    .ok_or_else(|| CliError::Usage("--quantity or --figure is required".into()))?;
                let xi_axis =
                    self.xi_min.is_some() || self.xi_max.is_some() || self.xi_step.is_some();
                let axis = if xi_axis {
                    SweepAxis::Xi(stepped_range(
                        self.xi_min.unwrap_or(0.0),
                        self.xi_max.unwrap_or(0.99),
                        self.xi_step.unwrap_or(0.01),
                    )?)
                } else {
                    SweepAxis::Squeezing(stepped_range(
                        self.r_min.unwrap_or(0.0),
                        self.r_max.unwrap_or(3.0),
                        self.r_step.unwrap_or(0.05),
                    )?)
                };
                SweepGrid64::new(axis, self.cutoffs.resolve()?, quantity)?
            }
        };
        let values = grid.axis().values();
        let step = if values.len() > 1 {
            values[1] - values[0]
        } else {
            0.0
        };
        let spec = GridSpec {
            quantity: grid.quantity(),
            figure: self.figure,
            axis: grid.axis().name(),
            axis_min: values[0],
            axis_max: values[values.len() - 1],
            axis_step: step,
            axis_points: values.len(),
            t_values: grid.t_values().to_vec(),
        };
        Ok((grid, spec))
    }

    /// `None` means stdout.
    pub fn destination(&self) -> Option<PathBuf> {
        match &self.output {
            Some(p) if p.as_os_str() == "-" => None,
            Some(p) => Some(p.clone()),
            None => self.out_dir.as_ref().map(|dir| {
                let stem = match self.figure {
                    Some(n) => format!("figure{n}"),
                    None => self.quantity.map_or("sweep", Quantity::name).to_string(),
                };
                dir.join(format!("{stem}.{}", self.format.extension()))
            }),
        }
    }
}

/// 17 significant digits: round-trips every f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn t_summary(t: &[usize]) -> String {
    let contiguous = t.windows(2).all(|w| w[1] == w[0] + 1);
    if contiguous && t.len() > 2 {
        format!("{}..={}", t[0], t[t.len() - 1])
    } else {
        t.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }
}

pub fn render_csv(spec: &GridSpec, rows: &[SweepRow64]) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    let q = spec.quantity;
    let (col1, col2) = q.columns();
    writeln!(out, "# cvcomp {}", env!("CARGO_PKG_VERSION"))?;
    match spec.figure {
        Some(n) => writeln!(out, "# quantity: {q} (figure {n})")?,
        None => writeln!(out, "# quantity: {q}")?,
    }
    writeln!(
        out,
        "# grid: {} = {}..={} step {} ({} points); t = {}",
        spec.axis,
        spec.axis_min,
        spec.axis_max,
        spec.axis_step,
        spec.axis_points,
        t_summary(&spec.t_values)
    )?;
    match col2 {
        Some(c2) => writeln!(out, "# value = {col1}; value2 = {c2}")?,
        None => writeln!(out, "# value = {col1}")?,
    }
    writeln!(out, "# conventions: {CONVENTIONS}")?;

    let mut w = csv::Writer::from_writer(out);
    if q.has_second_value() {
        w.write_record(["r", "t", "xi", "value", "value2"])?;
    } else {
        w.write_record(["r", "t", "xi", "value"])?;
    }
    for row in rows {
        let mut record = vec![
            fmt_float(row.r),
            row.t.to_string(),
            fmt_float(row.xi),
            fmt_float(row.value),
        ];
        if let Some(v2) = row.value2 {
            record.push(fmt_float(v2));
        }
        w.write_record(&record)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

#[derive(Serialize)]
struct JsonMetadata<'a> {
    tool: &'static str,
    version: &'static str,
    conventions: &'static str,
    value: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    value2: Option<&'static str>,
    grid: &'a GridSpec,
}

#[derive(Serialize)]
struct JsonSweep<'a> {
    metadata: JsonMetadata<'a>,
    rows: &'a [SweepRow64],
}

pub fn render_json(spec: &GridSpec, rows: &[SweepRow64]) -> CliResult<Vec<u8>> {
    let (value, value2) = spec.quantity.columns();
    let doc = JsonSweep {
        metadata: JsonMetadata {
            tool: "cvcomp",
            version: env!("CARGO_PKG_VERSION"),
            conventions: CONVENTIONS,
            value,
            value2,
            grid: spec,
        },
        rows,
    };
    let mut out = serde_json::to_vec_pretty(&doc)?;
    out.push(b'\n');
    Ok(out)
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let (grid, spec) = args.grid()?;
    let rows = generate_sweep(&grid);
    let bytes = match args.format {
        Format::Csv => render_csv(&spec, &rows)?,
        Format::Json => render_json(&spec, &rows)?,
    };
    match args.destination() {
        None => stdout.write_all(&bytes)?,
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(&path, &bytes)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
    }
    Ok(())
}
