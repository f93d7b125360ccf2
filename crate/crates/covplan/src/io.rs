//! External document formats: polygon files, partition dumps, plan files,
//! and the benchmark records CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decompose::{Axis, PartitionSet};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::roi::PolygonROI;
use crate::route::GlobalPlan;

/// Loads a polygon file: a JSON array of `{id, outer, holes}` objects with
/// `[x, y]` coordinate pairs in meters.
pub fn load_polygons(path: &Path) -> Result<Vec<PolygonROI>> {
    let text = std::fs::read_to_string(path)?;
    let mut polygons: Vec<PolygonROI> = serde_json::from_str(&text)?;
    for p in &mut polygons {
        // Accept rings that repeat the closing vertex.
        if p.outer.len() > 1 && p.outer.first() == p.outer.last() {
            p.outer.pop();
        }
        for h in &mut p.holes {
            if h.len() > 1 && h.first() == h.last() {
                h.pop();
            }
        }
        p.validate()?;
    }
    Ok(polygons)
}

pub fn save_polygons(path: &Path, polygons: &[PolygonROI]) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(polygons)?)?;
    Ok(())
}

/// One partition in the polygon document format, with its sweepable axes
/// and edge-adjacent neighbors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionDocument {
    pub id: String,
    pub outer: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
    pub feasible_axes: Vec<Axis>,
    pub neighbors: Vec<String>,
}

pub fn partition_documents(set: &PartitionSet) -> Vec<PartitionDocument> {
    set.partitions
        .iter()
        .map(|p| {
            let (outer, holes) = p.region.boundary_rings();
            PartitionDocument {
                id: format!("p{}", p.id),
                outer,
                holes,
                feasible_axes: p.feasible_axes.iter().collect(),
                neighbors: p.neighbors.iter().map(|n| format!("p{n}")).collect(),
            }
        })
        .collect()
}

pub fn save_partitions(path: &Path, sets: &[PartitionSet]) -> Result<()> {
    let docs: Vec<PartitionDocument> = sets.iter().flat_map(partition_documents).collect();
    std::fs::write(path, serde_json::to_string_pretty(&docs)?)?;
    Ok(())
}

/// A stitched plan in the waypoint-list document format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub id: String,
    pub pipeline: String,
    pub order: Vec<usize>,
    pub choices: Vec<usize>,
    pub total_cost: f64,
    pub waypoints: Vec<Point>,
    pub connectors: Vec<(Point, Point)>,
}

impl PlanDocument {
    pub fn new(id: impl Into<String>, pipeline: impl Into<String>, plan: &GlobalPlan) -> Self {
        PlanDocument {
            id: id.into(),
            pipeline: pipeline.into(),
            order: plan.order.clone(),
            choices: plan.choices.clone(),
            total_cost: plan.total_cost,
            waypoints: plan.stitched.clone(),
            connectors: plan.connectors.clone(),
        }
    }
}

pub fn save_plan(path: &Path, doc: &PlanDocument) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(doc)?)?;
    Ok(())
}

pub fn load_plan(path: &Path) -> Result<PlanDocument> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// One benchmark run of a pipeline on a polygon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub polygon_id: String,
    pub pipeline_id: String,
    /// Stitched path length in meters.
    pub length: f64,
    /// Turn vertices of the stitched path.
    pub turns: usize,
    /// Estimated execution time in seconds.
    pub exec_time: f64,
    pub partitions: usize,
    /// Wall-clock planning time in seconds.
    pub planning_secs: f64,
    pub coverage: f64,
}

pub const RECORD_CSV_HEADER: &str =
    "polygon_id,pipeline,length_m,turns,exec_time_s,partitions,planning_s,coverage";

pub fn records_to_csv(records: &[BenchmarkRecord]) -> String {
    let mut out = String::from(RECORD_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.polygon_id,
            r.pipeline_id,
            r.length,
            r.turns,
            r.exec_time,
            r.partitions,
            r.planning_secs,
            r.coverage
        ));
    }
    out
}

pub fn records_from_csv(text: &str) -> Result<Vec<BenchmarkRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RECORD_CSV_HEADER => {}
        _ => {
            return Err(Error::MalformedRecord {
                line: 1,
                reason: "missing or unexpected header".into(),
            })
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::MalformedRecord {
                line: i + 1,
                reason: format!("expected 8 fields, got {}", fields.len()),
            });
        }
        let parse_f = |s: &str, line: usize| -> Result<f64> {
            s.parse().map_err(|_| Error::MalformedRecord {
                line,
                reason: format!("bad float `{s}`"),
            })
        };
        let parse_u = |s: &str, line: usize| -> Result<usize> {
            s.parse().map_err(|_| Error::MalformedRecord {
                line,
                reason: format!("bad count `{s}`"),
            })
        };
        records.push(BenchmarkRecord {
            polygon_id: fields[0].to_string(),
            pipeline_id: fields[1].to_string(),
            length: parse_f(fields[2], i + 1)?,
            turns: parse_u(fields[3], i + 1)?,
            exec_time: parse_f(fields[4], i + 1)?,
            partitions: parse_u(fields[5], i + 1)?,
            planning_secs: parse_f(fields[6], i + 1)?,
            coverage: parse_f(fields[7], i + 1)?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::decompose;
    use crate::testutil::ring_3x3;

    #[test]
    fn csv_round_trips_byte_identically() {
        let records = vec![
            BenchmarkRecord {
                polygon_id: "ring-000".into(),
                pipeline_id: "ours-dp".into(),
                length: 123.456789,
                turns: 14,
                exec_time: 56.5,
                partitions: 2,
                planning_secs: 0.0123,
                coverage: 1.0,
            },
            BenchmarkRecord {
                polygon_id: "rect-001".into(),
                pipeline_id: "nn".into(),
                length: 10.0 / 3.0,
                turns: 0,
                exec_time: 4.0,
                partitions: 0,
                planning_secs: 0.5,
                coverage: 0.995,
            },
        ];
        let csv = records_to_csv(&records);
        let parsed = records_from_csv(&csv).unwrap();
        assert_eq!(parsed, records);
        assert_eq!(records_to_csv(&parsed), csv);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(records_from_csv("nope\n").is_err());
        let bad = format!("{RECORD_CSV_HEADER}\na,b,c\n");
        assert!(records_from_csv(&bad).is_err());
    }

    #[test]
    fn partition_documents_carry_axes_and_neighbors() {
        let set = decompose(&ring_3x3()).unwrap();
        let docs = partition_documents(&set);
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].id, "p0");
        assert_eq!(docs[0].neighbors, vec!["p1"]);
        assert!(!docs[0].feasible_axes.is_empty());
        assert!(!docs[0].outer.is_empty());
    }

    #[test]
    fn polygon_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("polys.json");
        let polys = vec![PolygonROI {
            id: "a".into(),
            outer: vec![
                Point::new(0.0, 0.0),
                Point::new(4.0, 0.0),
                Point::new(4.0, 4.0),
                Point::new(0.0, 4.0),
            ],
            holes: vec![],
        }];
        save_polygons(&path, &polys).unwrap();
        let back = load_polygons(&path).unwrap();
        assert_eq!(back, polys);
    }

    #[test]
    fn closed_rings_are_normalized_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("closed.json");
        std::fs::write(
            &path,
            r#"[{"id":"sq","outer":[[0,0],[2,0],[2,2],[0,2],[0,0]],"holes":[]}]"#,
        )
        .unwrap();
        let polys = load_polygons(&path).unwrap();
        assert_eq!(polys[0].outer.len(), 4);
    }
}
