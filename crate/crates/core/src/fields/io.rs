//! Flat binary and CSV layouts for field snapshots.
//!
//! Binary record (little endian):
//!
//! ```text
//! offset  size  content
//!      0     4  magic "NSVF"
//!      4     4  u32 format version (1)
//!      8     4  u32 component count (1 scalar, 3 vector)
//!     12     1  u8 boundary (0 periodic, 1 no-slip box)
//!     13     1  u8 scheme (0 spectral, 1 finite difference)
//!     14     2  reserved, zero
//!     16    24  u64 nx, ny, nz
//!     40    24  f64 lx, ly, lz
//!     64     -  f64 samples, component-major, x fastest within a component
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::fields::{Boundary, GridSpec, ScalarField, Scheme, VectorField};

pub const MAGIC: &[u8; 4] = b"NSVF";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldRecord {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl FieldRecord {
    pub fn grid(&self) -> &GridSpec {
        match self {
            FieldRecord::Scalar(s) => s.grid(),
            FieldRecord::Vector(v) => v.grid(),
        }
    }
}

/// Size in bytes of a record with `components` components on `grid`.
pub fn record_len(grid: &GridSpec, components: usize) -> usize {
    HEADER_LEN + 8 * components * grid.len()
}

fn write_header<W: Write>(w: &mut W, grid: &GridSpec, components: u32) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&components.to_le_bytes())?;
    let bc = match grid.bc {
        Boundary::Periodic => 0u8,
        Boundary::NoSlipBox => 1,
    };
    let scheme = match grid.scheme {
        Scheme::Spectral => 0u8,
        Scheme::FiniteDifference => 1,
    };
    w.write_all(&[bc, scheme, 0, 0])?;
    for n in grid.dims() {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    for l in grid.lengths() {
        w.write_all(&l.to_le_bytes())?;
    }
    Ok(())
}

fn write_values<W: Write>(w: &mut W, values: &[f64]) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(values.len() * 8);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)
}

pub fn write_scalar<W: Write>(w: &mut W, s: &ScalarField) -> std::io::Result<()> {
    write_header(w, s.grid(), 1)?;
    write_values(w, s.values())
}

pub fn write_vector<W: Write>(w: &mut W, v: &VectorField) -> std::io::Result<()> {
    write_header(w, v.grid(), 3)?;
    for c in v.components() {
        write_values(w, c.values())?;
    }
    Ok(())
}

fn read_exact<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated record: {e}")))?;
    Ok(buf)
}

pub fn read_record<R: Read>(r: &mut R) -> Result<FieldRecord> {
    let magic: [u8; 4] = read_exact(r)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_exact(r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let components = u32::from_le_bytes(read_exact(r)?);
    let [bc, scheme, _, _] = read_exact::<_, 4>(r)?;
    let bc = match bc {
        0 => Boundary::Periodic,
        1 => Boundary::NoSlipBox,
        other => return Err(Error::Format(format!("unknown boundary tag {other}"))),
    };
    let scheme = match scheme {
        0 => Scheme::Spectral,
        1 => Scheme::FiniteDifference,
        other => return Err(Error::Format(format!("unknown scheme tag {other}"))),
    };
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = u64::from_le_bytes(read_exact(r)?) as usize;
    }
    let mut lengths = [0f64; 3];
    for l in &mut lengths {
        *l = f64::from_le_bytes(read_exact(r)?);
    }
    let grid = GridSpec::new(dims, lengths, bc, scheme)?;
    let mut read_component = || -> Result<ScalarField> {
        let mut bytes = vec![0u8; 8 * grid.len()];
        r.read_exact(&mut bytes)
            .map_err(|e| Error::Format(format!("truncated samples: {e}")))?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        ScalarField::new(grid, values)
    };
    match components {
        1 => Ok(FieldRecord::Scalar(read_component()?)),
        3 => {
            let x = read_component()?;
            let y = read_component()?;
            let z = read_component()?;
            Ok(FieldRecord::Vector(VectorField::new(x, y, z)?))
        }
        n => Err(Error::Format(format!("unsupported component count {n}"))),
    }
}

pub fn save_vector(path: &std::path::Path, v: &VectorField) -> Result<()> {
    let mut f =
        std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    write_vector(&mut f, v)
        .and_then(|_| f.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_record(path: &std::path::Path) -> Result<FieldRecord> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path).map_err(|e| Error::io(path, e))?);
    read_record(&mut f)
}

/// Writes named columns as CSV with node indices and coordinates.
pub fn write_csv<W: Write>(w: W, columns: &[(&str, &ScalarField)]) -> Result<()> {
    let Some((_, first)) = columns.first() else {
        return Ok(());
    };
    let grid = *first.grid();
    for (_, c) in columns {
        first.check_grid(c)?;
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["i", "j", "k", "x", "y", "z"];
    header.extend(columns.iter().map(|(name, _)| *name));
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    out.write_record(&header).map_err(csv_err)?;
    for idx in 0..grid.len() {
        let ijk = grid.unravel(idx);
        let xyz = grid.coords(ijk);
        let mut row: Vec<String> = ijk.iter().map(|v| v.to_string()).collect();
        row.extend(xyz.iter().map(|v| v.to_string()));
        row.extend(columns.iter().map(|(_, c)| c.values()[idx].to_string()));
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_fixed() {
        let g = GridSpec::new(
            [4, 5, 6],
            [1.0, 2.0, 3.0],
            Boundary::NoSlipBox,
            Scheme::FiniteDifference,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_scalar(&mut buf, &ScalarField::constant(g, 1.5)).unwrap();
        assert_eq!(buf.len(), record_len(&g, 1));
        assert_eq!(&buf[0..4], b"NSVF");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 1);
        assert_eq!(&buf[12..16], &[1, 1, 0, 0]);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 4);
        assert_eq!(u64::from_le_bytes(buf[32..40].try_into().unwrap()), 6);
        assert_eq!(f64::from_le_bytes(buf[56..64].try_into().unwrap()), 3.0);
        assert_eq!(f64::from_le_bytes(buf[64..72].try_into().unwrap()), 1.5);
    }

    #[test]
    fn vector_roundtrip() {
        let g = GridSpec::periodic([4, 4, 1], [1.0, 2.0, 1.0]).unwrap();
        let v = VectorField::from_fn(g, |[x, y, _]| [x, y, x * y]);
        let mut buf = Vec::new();
        write_vector(&mut buf, &v).unwrap();
        assert_eq!(
            read_record(&mut buf.as_slice()).unwrap(),
            FieldRecord::Vector(v)
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(
            read_record(&mut &b"XXXX0000"[..]),
            Err(Error::Format(_))
        ));
        let g = GridSpec::periodic([4, 4, 1], [1.0; 3]).unwrap();
        let mut buf = Vec::new();
        write_scalar(&mut buf, &ScalarField::zeros(g)).unwrap();
        buf.truncate(100);
        assert!(read_record(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn csv_has_one_row_per_node() {
        let g = GridSpec::periodic([4, 4, 1], [1.0; 3]).unwrap();
        let s = ScalarField::constant(g, 2.0);
        let mut buf = Vec::new();
        write_csv(&mut buf, &[("e", &s)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 17);
        assert!(text.starts_with("i,j,k,x,y,z,e\n"));
    }
}
