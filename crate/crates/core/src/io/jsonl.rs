//! One trajectory per line: `{"id": "...", "points": [[x, y, heading], ...]}`.
//!
//! `id` may be omitted (the reader synthesizes `<source>#<line>`), and each
//! point may be `[x, y]` with heading 0. Coordinates may be given as JSON
//! numbers or as numeric strings; non-finite values are rejected with the
//! trajectory id and field named.

use std::fmt;
use std::io::{BufRead, Write};

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{normalize_heading, Trajectory, Waypoint};

#[derive(Deserialize)]
struct RecordIn {
    #[serde(default)]
    id: Option<String>,
    points: Vec<PointIn>,
}

struct PointIn([f64; 3]);

struct Coord(f64);

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Coord;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number")
            }
            fn visit_f64<E>(self, v: f64) -> Result<Coord, E> {
                Ok(Coord(v))
            }
            fn visit_i64<E>(self, v: i64) -> Result<Coord, E> {
                Ok(Coord(v as f64))
            }
            fn visit_u64<E>(self, v: u64) -> Result<Coord, E> {
                Ok(Coord(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Coord, E> {
                v.trim()
                    .parse::<f64>()
                    .map(Coord)
                    .map_err(|_| E::custom(format!("invalid number {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

impl<'de> Deserialize<'de> for PointIn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = PointIn;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a point [x, y] or [x, y, heading]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<PointIn, A::Error> {
                let mut xyz = [0.0; 3];
                let mut len = 0;
                while let Some(Coord(v)) = seq.next_element()? {
                    if len == 3 {
                        return Err(de::Error::invalid_length(4, &self));
                    }
                    xyz[len] = v;
                    len += 1;
                }
                if len < 2 {
                    return Err(de::Error::invalid_length(len, &self));
                }
                Ok(PointIn(xyz))
            }
        }
        d.deserialize_seq(V)
    }
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    points: Vec<[f64; 3]>,
}

/// Parses one record. `source` and `line` (1-based) locate errors and build
/// the fallback id.
pub fn parse_record(text: &str, source: &str, line: usize) -> Result<Trajectory> {
    let parse_err = |message: String| Error::Parse {
        source_name: source.to_owned(),
        line,
        message,
    };
    let record: RecordIn =
        serde_json::from_str(text).map_err(|e| parse_err(format!("malformed record: {e}")))?;
    let id = record.id.unwrap_or_else(|| format!("{source}#{line}"));
    if record.points.is_empty() {
        return Err(parse_err(format!("trajectory `{id}` has no points")));
    }
    let mut points = Vec::with_capacity(record.points.len());
    for (i, PointIn([x, y, h])) in record.points.into_iter().enumerate() {
        for (name, v) in [("x", x), ("y", y), ("heading", h)] {
            if !v.is_finite() {
                return Err(parse_err(format!(
                    "trajectory `{id}` point {i}: field `{name}` is not finite"
                )));
            }
        }
        points.push(Waypoint {
            x,
            y,
            heading: normalize_heading(h),
        });
    }
    Trajectory::new(id, points).map_err(|e| parse_err(e.to_string()))
}

/// Serializes a trajectory as a single JSON line (no trailing newline).
/// Floats use the shortest representation that parses back bit-exactly.
pub fn format_record(t: &Trajectory) -> String {
    let record = RecordOut {
        id: t.id(),
        points: t.points().iter().map(|p| [p.x, p.y, p.heading]).collect(),
    };
    serde_json::to_string(&record).expect("finite floats always serialize")
}

/// Reads every non-blank line of `reader`.
pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Vec<Trajectory>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record(&line, source, i + 1)?);
    }
    Ok(out)
}

pub fn write<W: Write>(mut writer: W, trajectories: &[Trajectory]) -> std::io::Result<()> {
    for t in trajectories {
        writer.write_all(format_record(t).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_waypoint_record() {
        let t = parse_record(
            r#"{"id":"a","points":[[0,0,0],[1.5,0.25,0.1],[3,0.5]]}"#,
            "f",
            1,
        )
        .unwrap();
        assert_eq!(t.id(), "a");
        assert_eq!(t.len(), 3);
        assert_eq!(t.points()[2].heading, 0.0);
        assert_eq!(t.points()[1].y, 0.25);
    }

    #[test]
    fn missing_id_is_synthesized() {
        let t = parse_record(r#"{"points":[[0,0]]}"#, "drive.jsonl", 7).unwrap();
        assert_eq!(t.id(), "drive.jsonl#7");
    }

    #[test]
    fn nan_string_names_id_and_field() {
        let err =
            parse_record(r#"{"id":"t9","points":[[0,0,0],[1,"NaN",0]]}"#, "f", 3).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("t9") && msg.contains("`y`") && msg.contains(":3:"),
            "{msg}"
        );
    }

    #[test]
    fn malformed_lines_carry_line_numbers() {
        let data = "{\"id\":\"a\",\"points\":[[0,0]]}\n\n{\"id\":\"b\",\"points\":[[0]]}\n";
        let err = read(data.as_bytes(), "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_record("{not json", "f", 2).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_record(r#"{"id":"e","points":[]}"#, "f", 1).unwrap_err();
        assert!(err.to_string().contains("`e`"));
    }

    #[test]
    fn headings_are_normalized_on_read() {
        let t = parse_record(r#"{"id":"a","points":[[0,0,4.0]]}"#, "f", 1).unwrap();
        assert!((t.points()[0].heading - (4.0 - 2.0 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn record_round_trip_is_exact() {
        let pts = vec![
            Waypoint::new(0.1 + 0.2, -1e-300, std::f64::consts::PI - 1e-15).unwrap(),
            Waypoint::new(123456.789012345, 2.0 / 3.0, -std::f64::consts::PI).unwrap(),
        ];
        let t = Trajectory::new("x\"quoted\"", pts).unwrap();
        let back = parse_record(&format_record(&t), "f", 1).unwrap();
        assert_eq!(back, t);
    }
}
