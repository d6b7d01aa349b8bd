//! JSON file formats: point sets with exact rational coordinates, and partitions.
//!
//! Coordinates travel as `"p/q"` strings so that no precision is lost; the
//! canonical form always has a reduced fraction with positive denominator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{format_rational, parse_rational, PointSet, RationalPoint};
use crate::partition::Partition;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub id: u32,
    pub x: String,
    pub y: String,
    #[serde(default)]
    pub path: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSetFile {
    pub schema_version: u32,
    pub n: usize,
    pub points: Vec<PointRecord>,
}

impl PointSetFile {
    pub fn from_set(s: &PointSet) -> Self {
        PointSetFile {
            schema_version: SCHEMA_VERSION,
            n: s.len(),
            points: s
                .points()
                .iter()
                .map(|p| PointRecord {
                    id: p.id,
                    x: format_rational(&p.x),
                    y: format_rational(&p.y),
                    path: p.path.clone(),
                })
                .collect(),
        }
    }

    pub fn to_set(&self) -> Result<PointSet> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        if self.n != self.points.len() {
            return Err(Error::Parse(format!(
                "n = {} but {} points listed",
                self.n,
                self.points.len()
            )));
        }
        let points = self
            .points
            .iter()
            .map(|r| {
                Ok(RationalPoint::new(r.id, parse_rational(&r.x)?, parse_rational(&r.y)?)
                    .with_path(r.path.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(points)
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn point_set_to_json(s: &PointSet) -> String {
    let mut out = serde_json::to_string_pretty(&PointSetFile::from_set(s)).expect("plain data");
    out.push('\n');
    out
}

pub fn point_set_from_json(text: &str) -> Result<PointSet> {
    let file: PointSetFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_set()
}

/// A list of id lists.
pub fn partition_to_json(p: &Partition) -> String {
    let mut out = serde_json::to_string(p.parts()).expect("plain data");
    out.push('\n');
    out
}

pub fn partition_from_json(text: &str) -> Result<Partition> {
    let parts: Vec<Vec<u32>> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Partition::new(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_s, ConstructionParams};

    #[test]
    fn constructed_sets_round_trip() {
        let (s, _) = build_s(9, &ConstructionParams::default()).unwrap();
        let text = point_set_to_json(&s);
        let back = point_set_from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(point_set_to_json(&back), text);
    }

    #[test]
    fn non_canonical_input_is_normalized() {
        let text = r#"{"schema_version":1,"n":2,"points":[
            {"id":0,"x":"2/4","y":"3"},{"id":1,"x":"-1/-2","y":"0/7","path":[1,2]}]}"#;
        let s = point_set_from_json(text).unwrap();
        let file = PointSetFile::from_set(&s);
        assert_eq!(file.points[0].x, "1/2");
        assert_eq!(file.points[0].y, "3/1");
        assert_eq!(file.points[1].x, "1/2");
        assert_eq!(file.points[1].y, "0/1");
        assert_eq!(file.points[1].path, vec![1, 2]);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(point_set_from_json("{").is_err());
        let wrong_n = r#"{"schema_version":1,"n":3,"points":[{"id":0,"x":"0","y":"0"}]}"#;
        assert!(point_set_from_json(wrong_n).is_err());
        let wrong_version = r#"{"schema_version":2,"n":0,"points":[]}"#;
        assert!(point_set_from_json(wrong_version).is_err());
        let dup = r#"{"schema_version":1,"n":2,"points":[{"id":0,"x":"0","y":"0"},{"id":0,"x":"1","y":"0"}]}"#;
        assert!(matches!(point_set_from_json(dup), Err(Error::DuplicateId(0))));
        let bad_rational = r#"{"schema_version":1,"n":1,"points":[{"id":0,"x":"0.5","y":"0"}]}"#;
        assert!(point_set_from_json(bad_rational).is_err());
    }

    #[test]
    fn partitions_round_trip() {
        let p = partition_from_json("[[0, 1, 2], [3]]").unwrap();
        assert_eq!(p.sizes(), vec![3, 1]);
        assert_eq!(partition_to_json(&p), "[[0,1,2],[3]]\n");
        assert!(partition_from_json("[[0], [0]]").is_err());
    }
}
