//! Deterministic CSV/JSON artifact writers shared by the command-line
//! front end: byte-identical output for identical inputs, 17 significant
//! digits in CSV, stable key order in JSON.

use serde::Serialize;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// Schema tag embedded in every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

/// Formats a float with 17 significant digits (round-trip exact for f64).
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.16e}")
}

/// Optional float cell: empty when absent.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g17).unwrap_or_default()
}

/// Buffered CSV writer with a fixed header row.
pub struct CsvWriter {
    out: io::BufWriter<fs::File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> io::Result<Self> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut out = io::BufWriter::new(fs::File::create(path)?);
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out })
    }

    pub fn row(&mut self, cells: &[String]) -> io::Result<()> {
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// Serializes `value` as pretty JSON wrapped with the schema version and the
/// resolved configuration that produced it.
pub fn write_json<T: Serialize, C: Serialize>(
    path: &Path,
    config: &C,
    value: &T,
) -> io::Result<()> {
    #[derive(Serialize)]
    struct Artifact<'a, T, C> {
        schema_version: u32,
        config: &'a C,
        report: &'a T,
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let doc = Artifact {
        schema_version: SCHEMA_VERSION,
        config,
        report: value,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable report");
    text.push('\n');
    fs::write(path, text)
}

/// Writes a flat row-major array of doubles as little-endian binary next to
/// a small JSON sidecar describing the grid.
pub fn write_field_binary<M: Serialize>(
    base: &Path,
    values: &[f64],
    sidecar: &M,
) -> io::Result<()> {
    if let Some(dir) = base.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(base.with_extension("bin"), bytes)?;
    let mut text = serde_json::to_string_pretty(sidecar).expect("serializable sidecar");
    text.push('\n');
    fs::write(base.with_extension("json"), text)
}

#[derive(Serialize)]
struct InterfaceSidecar {
    n: usize,
    m: usize,
    spacing: f64,
}

#[derive(Serialize)]
struct BulkSidecar {
    n: usize,
    m: usize,
    y_levels: Vec<f64>,
}

/// Interface field as binary + sidecar.
pub fn write_scalar_field(base: &Path, f: &crate::grid::ScalarField) -> io::Result<()> {
    write_field_binary(
        base,
        f.values(),
        &InterfaceSidecar {
            n: f.dim(),
            m: f.points_per_axis(),
            spacing: f.spacing(),
        },
    )
}

/// Interface field as CSV (one row per point), for small grids.
pub fn write_scalar_field_csv(path: &Path, f: &crate::grid::ScalarField) -> io::Result<()> {
    let m = f.points_per_axis();
    let h = f.spacing();
    if f.dim() == 1 {
        let mut w = CsvWriter::create(path, &["x", "value"])?;
        for (i, &v) in f.values().iter().enumerate() {
            w.row(&[fmt_g17(i as f64 * h), fmt_g17(v)])?;
        }
        w.finish()
    } else {
        let mut w = CsvWriter::create(path, &["x", "y", "value"])?;
        for (i, &v) in f.values().iter().enumerate() {
            w.row(&[
                fmt_g17((i % m) as f64 * h),
                fmt_g17((i / m) as f64 * h),
                fmt_g17(v),
            ])?;
        }
        w.finish()
    }
}

/// Bulk two-phase field as binary (upper stack then lower stack) + sidecar
/// listing the signed level heights.
pub fn write_bulk_field(base: &Path, f: &crate::grid::BulkScalar) -> io::Result<()> {
    let mut values = Vec::with_capacity(f.upper().len() + f.lower().len());
    values.extend_from_slice(f.upper());
    values.extend_from_slice(f.lower());
    let mut y_levels: Vec<f64> = (1..=f.level_count())
        .map(|j| j as f64 * f.y_spacing())
        .collect();
    y_levels.extend((1..=f.level_count()).map(|j| -(j as f64) * f.y_spacing()));
    write_field_binary(
        base,
        &values,
        &BulkSidecar {
            n: f.dim(),
            m: f.points_per_axis(),
            y_levels,
        },
    )
}

#[derive(Serialize)]
struct PartitionSidecar {
    members: usize,
    n: usize,
    m: usize,
    epsilon: f64,
    centers: Vec<Vec<f64>>,
}

/// Partition family as one stacked binary array (member-major) + sidecar.
pub fn write_partition(base: &Path, fam: &crate::spaces::PartitionFamily) -> io::Result<()> {
    let mut values = Vec::new();
    for member in &fam.members {
        values.extend_from_slice(&member.values);
    }
    let (n, m) = fam
        .members
        .first()
        .map(|f| (f.n, f.m))
        .unwrap_or((1, 0));
    write_field_binary(
        base,
        &values,
        &PartitionSidecar {
            members: fam.members.len(),
            n,
            m,
            epsilon: fam.epsilon,
            centers: fam.centers.clone(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_round_trips() {
        for &x in &[1.0, -0.125, 3.141592653589793, 1e-300, 2.5e17] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn field_binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = crate::grid::ScalarField::from_fn(1, 16, |x, _| x.sin());
        let base = dir.path().join("field");
        write_scalar_field(&base, &f).unwrap();
        let bytes = std::fs::read(base.with_extension("bin")).unwrap();
        assert_eq!(bytes.len(), 16 * 8);
        let first = f64::from_le_bytes(bytes[..8].try_into().unwrap());
        assert_eq!(first, f.values()[0]);
        let sidecar: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(base.with_extension("json")).unwrap())
                .unwrap();
        assert_eq!(sidecar["m"], 16);
        write_scalar_field_csv(&dir.path().join("field.csv"), &f).unwrap();
        let bulk = crate::grid::BulkScalar::from_fn(1, 8, 5, 0.1, |x, _, y| x.cos() * y);
        write_bulk_field(&dir.path().join("bulk"), &bulk).unwrap();
        let fam = crate::spaces::partition_of_unity(1.0, &[-1.0], &[1.0], 33).unwrap();
        write_partition(&dir.path().join("partition"), &fam).unwrap();
    }

    #[test]
    fn csv_and_json_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let write_once = |name: &str| -> Vec<u8> {
            let path = dir.path().join(name);
            let mut w = CsvWriter::create(&path, &["a", "b"]).unwrap();
            w.row(&[fmt_g17(1.5), fmt_g17(-2.25)]).unwrap();
            w.finish().unwrap();
            std::fs::read(&path).unwrap()
        };
        assert_eq!(write_once("x.csv"), write_once("y.csv"));
        let j1 = dir.path().join("a.json");
        let j2 = dir.path().join("b.json");
        #[derive(serde::Serialize)]
        struct R {
            v: f64,
        }
        write_json(&j1, &"cfg", &R { v: 0.1 }).unwrap();
        write_json(&j2, &"cfg", &R { v: 0.1 }).unwrap();
        assert_eq!(std::fs::read(&j1).unwrap(), std::fs::read(&j2).unwrap());
    }
}
