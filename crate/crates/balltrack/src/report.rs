//! Per-frame CSV run report.

use std::io;

use serde::Serialize;

/// Report column order.
pub const HEADER: [&str; 14] = [
    "frame",
    "cx",
    "cy",
    "cr",
    "qc",
    "x_m",
    "y_m",
    "z_m",
    "status",
    "t_classify_us",
    "t_components_us",
    "t_vote_us",
    "t_refine_us",
    "t_total_us",
];

/// Columns that vary between otherwise identical runs.
pub const TIMING_COLUMNS: std::ops::Range<usize> = 9..14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameRecord {
    pub frame: String,
    pub cx: Option<f64>,
    pub cy: Option<f64>,
    pub cr: Option<f64>,
    pub qc: Option<f64>,
    pub x_m: Option<f64>,
    pub y_m: Option<f64>,
    pub z_m: Option<f64>,
    pub status: String,
    pub t_classify_us: Option<u64>,
    pub t_components_us: Option<u64>,
    pub t_vote_us: Option<u64>,
    pub t_refine_us: Option<u64>,
    pub t_total_us: Option<u64>,
}

impl FrameRecord {
    pub fn error(frame: String) -> Self {
        Self {
            frame,
            cx: None,
            cy: None,
            cr: None,
            qc: None,
            x_m: None,
            y_m: None,
            z_m: None,
            status: "ERROR".to_owned(),
            t_classify_us: None,
            t_components_us: None,
            t_vote_us: None,
            t_refine_us: None,
            t_total_us: None,
        }
    }
}

/// Writes the header and one row per record; the header is written even
/// when `records` is empty.
pub fn write_report<W: io::Write>(out: W, records: &[FrameRecord]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Report rows with the timing columns blanked, for run-to-run comparison.
pub fn mask_timings(csv_text: &str) -> csv::Result<Vec<Vec<String>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(csv_text.as_bytes());
    rdr.records()
        .map(|row| {
            let row = row?;
            Ok(row
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if TIMING_COLUMNS.contains(&i) {
                        String::new()
                    } else {
                        v.to_owned()
                    }
                })
                .collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_has_header_only() {
        let mut buf = Vec::new();
        write_report(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), HEADER.join(",") + "\n");
    }

    #[test]
    fn error_rows_leave_measurements_blank() {
        let mut buf = Vec::new();
        write_report(&mut buf, &[FrameRecord::error("f.ppm".into())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1), Some("f.ppm,,,,,,,,ERROR,,,,,"));
    }
}
