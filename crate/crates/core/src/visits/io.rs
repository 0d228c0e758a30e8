use std::io::{Read, Write};

use chrono::SecondsFormat;

use super::stitch::{DailyCount, Visit};
use crate::series::io::read_rows;
use crate::{Error, Result};

pub const DAILY_HEADER: [&str; 4] = ["date", "camera_id", "species", "visits"];

/// `camera_id,species,start,end,n_frames`
pub fn write_visits_csv(out: impl Write, visits: &[Visit]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["camera_id", "species", "start", "end", "n_frames"])?;
    for v in visits {
        w.write_record([
            v.camera_id.clone(),
            v.species.clone(),
            v.start.to_rfc3339_opts(SecondsFormat::Secs, true),
            v.end.to_rfc3339_opts(SecondsFormat::Secs, true),
            v.n_frames.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))
}

/// `date,camera_id,species,visits`
pub fn write_daily_csv(out: impl Write, counts: &[DailyCount]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DAILY_HEADER)?;
    for c in counts {
        w.write_record([
            c.date.format("%Y-%m-%d").to_string(),
            c.camera_id.clone(),
            c.species.clone(),
            c.visits.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))
}

/// Reads what [`write_daily_csv`] writes; unknown or missing columns are
/// errors.
pub fn read_daily_csv(input: impl Read) -> Result<Vec<DailyCount>> {
    read_rows(input, &DAILY_HEADER)
}
