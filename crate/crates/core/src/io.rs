//! Segment input and voxel output formats.
//!
//! Segments are read from CSV, one `sx,sy,sz,ex,ey,ez` record per line;
//! blank lines and lines starting with `#` are skipped.
//!
//! Voxels are written either as `xyz` text (one `x y z` triple per line, a
//! `# segment i` line before each chain of a batch) or as little-endian
//! `VOX3` binary:
//!
//! ```text
//! version 1: "VOX3" | u32 version | u64 count | count x (i32 x, i32 y, i32 z)
//! version 2: "VOX3" | u32 version | u64 count | u64 segments
//!            | segments x u64 voxel count | count x (i32 x, i32 y, i32 z)
//! ```

use std::io::{BufRead, Read, Write};

use crate::chain::VoxelChain;
use crate::error::{Error, Result};
use crate::geometry::{Point3, Segment, Voxel};

pub const VOX3_MAGIC: [u8; 4] = *b"VOX3";
pub const VOX3_SINGLE: u32 = 1;
pub const VOX3_BATCH: u32 = 2;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_segments_csv<R: BufRead>(reader: R) -> Result<Vec<Segment>> {
    let mut segments = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(parse_error(
                line_no,
                format!("expected 6 fields, found {}", fields.len()),
            ));
        }
        let mut values = [0.0f64; 6];
        for (value, field) in values.iter_mut().zip(&fields) {
            *value = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_error(line_no, format!("invalid coordinate {field:?}")))?;
        }
        let [sx, sy, sz, ex, ey, ez] = values;
        segments.push(Segment::new(
            Point3::new(sx, sy, sz),
            Point3::new(ex, ey, ez),
        )?);
    }
    Ok(segments)
}

pub fn write_xyz<W: Write>(mut w: W, voxels: &[Voxel]) -> Result<()> {
    for v in voxels {
        writeln!(w, "{} {} {}", v.x, v.y, v.z)?;
    }
    Ok(())
}

pub fn write_xyz_batch<W: Write>(mut w: W, chains: &[VoxelChain]) -> Result<()> {
    for (i, chain) in chains.iter().enumerate() {
        writeln!(w, "# segment {i}")?;
        write_xyz(&mut w, chain.voxels())?;
    }
    Ok(())
}

/// Reads `xyz` text. A file without `# segment` separators is one chain.
pub fn read_xyz<R: BufRead>(reader: R) -> Result<Vec<Vec<Voxel>>> {
    let mut chains: Vec<Vec<Voxel>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if trimmed.starts_with("# segment") {
                chains.push(Vec::new());
            }
            continue;
        }
        let mut coords = [0i32; 3];
        let mut parts = trimmed.split_whitespace();
        for c in coords.iter_mut() {
            *c = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| parse_error(line_no, "expected three integers"))?;
        }
        if parts.next().is_some() {
            return Err(parse_error(line_no, "expected three integers"));
        }
        if chains.is_empty() {
            chains.push(Vec::new());
        }
        if let Some(chain) = chains.last_mut() {
            chain.push(Voxel::new(coords[0], coords[1], coords[2]));
        }
    }
    Ok(chains)
}

fn write_records<W: Write>(w: &mut W, voxels: &[Voxel]) -> Result<()> {
    for v in voxels {
        w.write_all(&v.x.to_le_bytes())?;
        w.write_all(&v.y.to_le_bytes())?;
        w.write_all(&v.z.to_le_bytes())?;
    }
    Ok(())
}

fn write_header<W: Write>(w: &mut W, version: u32, count: u64) -> Result<()> {
    w.write_all(&VOX3_MAGIC)?;
    w.write_all(&version.to_le_bytes())?;
    w.write_all(&count.to_le_bytes())?;
    Ok(())
}

/// Version 1 file holding a single chain.
pub fn write_vox3<W: Write>(mut w: W, voxels: &[Voxel]) -> Result<()> {
    write_header(&mut w, VOX3_SINGLE, voxels.len() as u64)?;
    write_records(&mut w, voxels)
}

/// Version 2 file: header, segment count, per-segment voxel counts, then all
/// voxels in segment order.
pub fn write_vox3_batch<W: Write>(mut w: W, chains: &[VoxelChain]) -> Result<()> {
    let total: u64 = chains.iter().map(|c| c.len() as u64).sum();
    write_header(&mut w, VOX3_BATCH, total)?;
    w.write_all(&(chains.len() as u64).to_le_bytes())?;
    for chain in chains {
        w.write_all(&(chain.len() as u64).to_le_bytes())?;
    }
    for chain in chains {
        write_records(&mut w, chain.voxels())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vox3File {
    pub version: u32,
    /// One entry for a version 1 file, one per segment for version 2.
    pub chains: Vec<Vec<Voxel>>,
}

impl Vox3File {
    pub fn voxels(&self) -> impl Iterator<Item = &Voxel> {
        self.chains.iter().flatten()
    }
}

fn read_array<const N: usize, R: Read>(r: &mut R, what: &str) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format(format!("truncated {what}")),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

fn read_u64<R: Read>(r: &mut R, what: &str) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r, what)?))
}

fn read_voxels<R: Read>(r: &mut R, count: u64) -> Result<Vec<Voxel>> {
    let mut voxels = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        let rec: [u8; 12] = read_array(r, "voxel record")?;
        let word = |i: usize| i32::from_le_bytes([rec[i], rec[i + 1], rec[i + 2], rec[i + 3]]);
        voxels.push(Voxel::new(word(0), word(4), word(8)));
    }
    Ok(voxels)
}

pub fn read_vox3<R: Read>(mut r: R) -> Result<Vox3File> {
    let magic: [u8; 4] = read_array(&mut r, "magic")?;
    if magic != VOX3_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = u32::from_le_bytes(read_array(&mut r, "version")?);
    let count = read_u64(&mut r, "voxel count")?;
    let chains = match version {
        VOX3_SINGLE => vec![read_voxels(&mut r, count)?],
        VOX3_BATCH => {
            let segments = read_u64(&mut r, "segment count")?;
            let mut lengths = Vec::with_capacity(segments.min(1 << 20) as usize);
            for _ in 0..segments {
                lengths.push(read_u64(&mut r, "segment table")?);
            }
            if lengths.iter().sum::<u64>() != count {
                return Err(Error::Format(
                    "segment table does not sum to voxel count".into(),
                ));
            }
            lengths
                .into_iter()
                .map(|n| read_voxels(&mut r, n))
                .collect::<Result<_>>()?
        }
        other => return Err(Error::Format(format!("unsupported version {other}"))),
    };
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after voxel records".into()));
    }
    Ok(Vox3File { version, chains })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: i32, y: i32, z: i32) -> Voxel {
        Voxel::new(x, y, z)
    }

    #[test]
    fn csv_skips_comments_and_blanks() {
        let text = "# header\n0,0,0,5,0,0\n\n  1.5, -2, 3e1, 4,5,6\n";
        let segs = read_segments_csv(text.as_bytes()).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[1].start(), Point3::new(1.5, -2.0, 30.0));
    }

    #[test]
    fn csv_reports_line_of_short_record() {
        let text = "0,0,0,5,0,0\n# c\n1,2,3,4,5\n";
        match read_segments_csv(text.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("5"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_rejects_non_numeric_and_non_finite() {
        assert!(read_segments_csv("a,0,0,1,1,1\n".as_bytes()).is_err());
        assert!(read_segments_csv("0,0,0,1,inf,1\n".as_bytes()).is_err());
        assert!(read_segments_csv("0,0,0,1,NaN,1\n".as_bytes()).is_err());
    }

    #[test]
    fn xyz_layout() {
        let mut out = Vec::new();
        write_xyz(&mut out, &[v(0, 0, 0), v(-1, 2, 3)]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 0 0\n-1 2 3\n");
    }

    #[test]
    fn vox3_single_layout_is_bit_exact() {
        let mut out = Vec::new();
        write_vox3(&mut out, &[v(1, -1, 256)]).unwrap();
        let mut expected = b"VOX3".to_vec();
        expected.extend_from_slice(&[1, 0, 0, 0]);
        expected.extend_from_slice(&[1, 0, 0, 0, 0, 0, 0, 0]);
        expected.extend_from_slice(&[1, 0, 0, 0, 0xff, 0xff, 0xff, 0xff, 0, 1, 0, 0]);
        assert_eq!(out, expected);
    }

    #[test]
    fn vox3_batch_layout() {
        let seg = Segment::from_coords([0.0; 3], [1.0, 0.0, 0.0]).unwrap();
        let chains = vec![
            VoxelChain::from_parts(seg, vec![v(0, 0, 0), v(1, 0, 0)]),
            VoxelChain::from_parts(seg, vec![v(7, 7, 7)]),
        ];
        let mut out = Vec::new();
        write_vox3_batch(&mut out, &chains).unwrap();
        assert_eq!(out.len(), 4 + 4 + 8 + 8 + 2 * 8 + 3 * 12);
        assert_eq!(&out[4..8], &2u32.to_le_bytes());
        assert_eq!(&out[8..16], &3u64.to_le_bytes());
        assert_eq!(&out[16..24], &2u64.to_le_bytes());
        assert_eq!(&out[24..32], &2u64.to_le_bytes());
        assert_eq!(&out[32..40], &1u64.to_le_bytes());
        let back = read_vox3(out.as_slice()).unwrap();
        assert_eq!(back.version, 2);
        assert_eq!(
            back.chains,
            vec![vec![v(0, 0, 0), v(1, 0, 0)], vec![v(7, 7, 7)]]
        );

        let mut text = Vec::new();
        write_xyz_batch(&mut text, &chains).unwrap();
        assert_eq!(read_xyz(text.as_slice()).unwrap(), back.chains);
    }

    #[test]
    fn vox3_rejects_malformed_input() {
        assert!(matches!(read_vox3(&b"VOX2"[..]), Err(Error::Format(_))));
        let mut out = Vec::new();
        write_vox3(&mut out, &[v(1, 2, 3)]).unwrap();
        assert!(matches!(
            read_vox3(&out[..out.len() - 1]),
            Err(Error::Format(_))
        ));
        let mut extra = out.clone();
        extra.push(0);
        assert!(matches!(read_vox3(extra.as_slice()), Err(Error::Format(_))));
        let mut bad_version = out;
        bad_version[4] = 9;
        assert!(matches!(
            read_vox3(bad_version.as_slice()),
            Err(Error::Format(_))
        ));
    }

    fn voxel() -> impl Strategy<Value = Voxel> {
        (any::<i32>(), any::<i32>(), any::<i32>()).prop_map(|(x, y, z)| Voxel::new(x, y, z))
    }

    proptest! {
        #[test]
        fn vox3_round_trip(voxels in proptest::collection::vec(voxel(), 0..200)) {
            let mut out = Vec::new();
            write_vox3(&mut out, &voxels).unwrap();
            let back = read_vox3(out.as_slice()).unwrap();
            prop_assert_eq!(back.version, 1);
            prop_assert_eq!(&back.chains[0], &voxels);

            let mut text = Vec::new();
            write_xyz(&mut text, &voxels).unwrap();
            let parsed = read_xyz(text.as_slice()).unwrap();
            let flat: Vec<Voxel> = parsed.into_iter().flatten().collect();
            prop_assert_eq!(flat, voxels);
        }
    }
}
