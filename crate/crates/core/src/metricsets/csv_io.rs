//! Cloud files: one point per row, comma-separated coordinates, `#` comment
//! lines, no header. Coordinates are written in shortest round-trip form.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, Trim, WriterBuilder};

use super::{format_coord, PointCloud};
use crate::error::{Error, Result};

pub fn read_cloud<R: Read>(reader: R) -> Result<PointCloud> {
    let mut rdr =
        ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(Trim::All).flexible(true).from_reader(reader);
    let mut dim = None;
    let mut coords = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let d = *dim.get_or_insert(rec.len());
        if rec.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: rec.len() });
        }
        for field in rec.iter() {
            let v: f64 =
                field.parse().map_err(|_| Error::Parse(format!("row {}: bad coordinate `{field}`", row + 1)))?;
            coords.push(v);
        }
    }
    PointCloud::new(dim.ok_or(Error::EmptyCloud)?, coords)
}

pub fn read_cloud_file(path: &Path) -> Result<PointCloud> {
    read_cloud(File::open(path)?)
}

pub fn write_cloud<W: Write>(writer: W, cloud: &PointCloud) -> Result<()> {
    let mut wtr = WriterBuilder::new().has_headers(false).from_writer(writer);
    for p in cloud.points() {
        wtr.write_record(p.iter().map(|&v| format_coord(v)))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_cloud_file(path: &Path, cloud: &PointCloud) -> Result<()> {
    write_cloud(File::create(path)?, cloud)
}
