//! Figures from previously written CSVs.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use phenotrap_core::series::{read_series_csv, read_trend_csv};
use phenotrap_core::visits::read_daily_csv;

use super::{note, write_output};
use crate::plot::{series_svg, visits_svg};

pub const SERIES_SVG: &str = "series.svg";
pub const VISITS_SVG: &str = "visits.svg";

#[derive(Debug, Clone, Default)]
pub struct PlotArgs {
    pub series: Option<PathBuf>,
    pub trend: Option<PathBuf>,
    /// A daily-counts CSV.
    pub visits: Option<PathBuf>,
    pub out: PathBuf,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

pub fn run(args: &PlotArgs, diag: &mut dyn Write) -> Result<()> {
    if args.series.is_none() && args.trend.is_none() && args.visits.is_none() {
        bail!("nothing to plot: pass --series, --trend or --visits");
    }
    if args.series.is_some() || args.trend.is_some() {
        let series = match &args.series {
            Some(p) => read_series_csv(open(p)?).with_context(|| format!("in {}", p.display()))?,
            None => Vec::new(),
        };
        let trends = match &args.trend {
            Some(p) => read_trend_csv(open(p)?).with_context(|| format!("in {}", p.display()))?,
            None => Vec::new(),
        };
        let path = write_output(&args.out, SERIES_SVG, |b| Ok(b.write_all(series_svg(&series, &trends).as_bytes())?))?;
        note(diag, format_args!("wrote {}", path.display()));
    }
    if let Some(p) = &args.visits {
        let daily = read_daily_csv(open(p)?).with_context(|| format!("in {}", p.display()))?;
        let path = write_output(&args.out, VISITS_SVG, |b| Ok(b.write_all(visits_svg(&daily).as_bytes())?))?;
        note(diag, format_args!("wrote {}", path.display()));
    }
    Ok(())
}
