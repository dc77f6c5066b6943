use std::io::Write;

use serde::Serialize;

/// One experiment run. Retrieval runs leave the positioning columns empty and
/// vice versa.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub run_id: u64,
    pub seed: u64,
    pub kind: &'static str,
    pub encoding: Option<String>,
    pub layout: Option<String>,
    /// Retrievers per cluster, or bacteria released in a positioning run.
    pub n_retrievers: usize,
    #[serde(rename = "D")]
    pub rotational_diffusion: f64,
    pub total_plasmids: Option<usize>,
    pub completion_time_s: Option<f64>,
    pub pct_retrieved: Option<f64>,
    /// `;`-separated, one entry per cluster.
    pub per_cluster_conjugations: Option<String>,
    /// `;`-separated fraction of each cluster's plasmids delivered.
    pub per_cluster_retrieved: Option<String>,
    pub dest_radius_cm: Option<f64>,
    pub start_radius_cm: Option<f64>,
    pub dest_x_cm: Option<f64>,
    pub dest_y_cm: Option<f64>,
    pub start_x_cm: Option<f64>,
    pub start_y_cm: Option<f64>,
    pub positioning_error_cm: Option<f64>,
    pub positioning_std_cm: Option<f64>,
}

pub const METRICS_HEADER: &str = "run_id,seed,kind,encoding,layout,n_retrievers,D,total_plasmids,\
completion_time_s,pct_retrieved,per_cluster_conjugations,per_cluster_retrieved,dest_radius_cm,\
start_radius_cm,dest_x_cm,dest_y_cm,start_x_cm,start_y_cm,positioning_error_cm,positioning_std_cm";

impl MetricsRecord {
    pub(crate) fn blank(run_id: u64, seed: u64, kind: &'static str, n: usize, d: f64) -> MetricsRecord {
        MetricsRecord {
            run_id,
            seed,
            kind,
            encoding: None,
            layout: None,
            n_retrievers: n,
            rotational_diffusion: d,
            total_plasmids: None,
            completion_time_s: None,
            pct_retrieved: None,
            per_cluster_conjugations: None,
            per_cluster_retrieved: None,
            dest_radius_cm: None,
            start_radius_cm: None,
            dest_x_cm: None,
            dest_y_cm: None,
            start_x_cm: None,
            start_y_cm: None,
            positioning_error_cm: None,
            positioning_std_cm: None,
        }
    }
}

pub(crate) fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

/// Writes the header and one row per record.
pub fn write_metrics_csv<W: Write>(out: W, records: &[MetricsRecord]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(METRICS_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Agent state sampled at an event tick.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub mode: &'static str,
}

pub fn write_trajectory_csv<W: Write>(out: W, rows: &[TrajectoryRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_fields() {
        let mut r = MetricsRecord::blank(3, 7, "retrieval", 10, 5.0);
        r.per_cluster_conjugations = Some(join(&[1, 2, 3, 4]));
        r.pct_retrieved = Some(0.25);
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], METRICS_HEADER);
        assert_eq!(lines[1], "3,7,retrieval,,,10,5.0,,,0.25,1;2;3;4,,,,,,,,,");
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
        assert!(!text.contains('\r'));
    }

    #[test]
    fn empty_record_list_still_has_header() {
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{METRICS_HEADER}\n"));
    }
}
