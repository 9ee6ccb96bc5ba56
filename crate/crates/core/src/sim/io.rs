//! Event-log files: a CSV of `arm,timestamp_s` rows in time order, plus a
//! JSON sidecar holding the [`RunMetadata`]. Timestamps are written in
//! shortest round-trip decimal form, so reading back is bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{EventLog, RunMetadata};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 2] = ["arm", "timestamp_s"];

pub fn write_events_csv<W: Write>(log: &EventLog, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    let (a, b) = (&log.arm1, &log.arm2);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_first = j >= b.len() || (i < a.len() && a[i] <= b[j]);
        let (arm, t) = if take_first {
            i += 1;
            ("1", a[i - 1])
        } else {
            j += 1;
            ("2", b[j - 1])
        };
        w.write_record([arm, &t.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Parse the CSV body into the two arm streams.
pub fn read_events_csv<R: Read>(reader: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::MalformedLog(format!(
            "expected header `arm,timestamp_s`, got `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut arm1, mut arm2) = (Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::MalformedLog(format!("row {}: {what}", line + 2));
        let t: f64 = rec
            .get(1)
            .ok_or_else(|| bad("missing timestamp"))?
            .parse()
            .map_err(|_| bad("timestamp is not a number"))?;
        match rec.get(0) {
            Some("1") => arm1.push(t),
            Some("2") => arm2.push(t),
            _ => return Err(bad("arm must be 1 or 2")),
        }
    }
    Ok((arm1, arm2))
}

pub fn write_event_log(log: &EventLog, csv_path: &Path, meta_path: &Path) -> Result<()> {
    write_events_csv(log, BufWriter::new(File::create(csv_path)?))?;
    let mut meta = BufWriter::new(File::create(meta_path)?);
    serde_json::to_writer_pretty(&mut meta, &log.meta)?;
    meta.write_all(b"\n")?;
    meta.flush()?;
    Ok(())
}

pub fn read_event_log(csv_path: &Path, meta_path: &Path) -> Result<EventLog> {
    let (arm1, arm2) = read_events_csv(BufReader::new(File::open(csv_path)?))?;
    let meta: RunMetadata = serde_json::from_reader(BufReader::new(File::open(meta_path)?))?;
    Ok(EventLog { arm1, arm2, meta })
}
