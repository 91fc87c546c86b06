use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::PhaseField;
use crate::error::{ArtError, Result};
use crate::geometry::{Grid3, Point3};
use crate::tensor::{component_count, SymTensorGridField, MAX_RANK};

pub const MAGIC: [u8; 4] = *b"ARTK";
pub const VERSION: u32 = 1;
/// magic + 6 u32 + 7 f64
pub const HEADER_LEN: usize = 4 + 6 * 4 + 7 * 8;

/// Complex tensor data on a node grid, optionally with a time axis t_j = j·dt.
///
/// Layout: `[frame][component][z][y][x]`, so a stationary field (`nt == 0`)
/// is a single frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub rank: usize,
    pub grid: Grid3,
    pub nt: usize,
    pub dt: f64,
    pub data: Vec<Complex64>,
}

impl GridField {
    pub fn new(rank: usize, grid: Grid3, nt: usize, dt: f64, data: Vec<Complex64>) -> Result<Self> {
        if rank > MAX_RANK {
            return Err(ArtError::arg(format!("rank {rank} exceeds {MAX_RANK}")));
        }
        if nt > 0 && !(dt > 0.0 && dt.is_finite()) {
            return Err(ArtError::arg(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let want = nt.max(1) * grid.len() * component_count(rank);
        if data.len() != want {
            return Err(ArtError::arg(format!(
                "expected {want} values, got {}",
                data.len()
            )));
        }
        if let Some(i) = data
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(ArtError::arg(format!("non-finite value at position {i}")));
        }
        Ok(GridField {
            rank,
            grid,
            nt,
            dt: if nt == 0 { 0.0 } else { dt },
            data,
        })
    }

    pub fn stationary(field: SymTensorGridField) -> Self {
        GridField {
            rank: field.rank,
            grid: field.grid,
            nt: 0,
            dt: 0.0,
            data: field.data,
        }
    }

    pub fn frames(&self) -> usize {
        self.nt.max(1)
    }

    pub fn frame_len(&self) -> usize {
        self.grid.len() * component_count(self.rank)
    }

    pub fn frame(&self, j: usize) -> SymTensorGridField {
        let n = self.frame_len();
        SymTensorGridField {
            rank: self.rank,
            grid: self.grid,
            data: self.data[j * n..(j + 1) * n].to_vec(),
        }
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }
}

/// Sample the generating tensor of `f` at grid nodes; `time` = (nt, dt).
pub fn sample_grid(f: &PhaseField, grid: Grid3, time: Option<(usize, f64)>) -> Result<GridField> {
    let grid = Grid3::new(grid.dims, grid.min, grid.max)?;
    let (nt, dt) = time.unwrap_or((0, 0.0));
    if time.is_some() && nt == 0 {
        return Err(ArtError::arg("time axis needs at least one step"));
    }
    let mut data = Vec::with_capacity(nt.max(1) * grid.len() * component_count(f.rank()));
    for j in 0..nt.max(1) {
        let t = j as f64 * dt;
        let frame = SymTensorGridField::from_fn(f.rank(), grid, |idx| {
            f.generating_tensor(t, &grid.node_at(idx))
        });
        data.extend(frame.data);
    }
    GridField::new(f.rank(), grid, nt, dt, data)
}

pub fn write_grid<W: Write>(gf: &GridField, mut w: W) -> Result<()> {
    let mut head = Vec::with_capacity(HEADER_LEN);
    head.extend_from_slice(&MAGIC);
    for v in [VERSION, gf.rank as u32, gf.nt as u32] {
        head.extend_from_slice(&v.to_le_bytes());
    }
    for d in gf.grid.dims {
        head.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in gf
        .grid
        .min
        .0
        .iter()
        .chain(gf.grid.max.0.iter())
        .chain(std::iter::once(&gf.dt))
    {
        head.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&head)?;
    let mut buf = Vec::with_capacity(16 * 4096);
    for chunk in gf.data.chunks(4096) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_grid(gf: &GridField, path: impl AsRef<Path>) -> Result<()> {
    write_grid(gf, BufWriter::new(File::create(path)?))
}

fn read_exact_at<R: Read>(r: &mut R, buf: &mut [u8], offset: u64, what: &str) -> Result<()> {
    let mut got = 0;
    while got < buf.len() {
        match r.read(&mut buf[got..]) {
            Ok(0) => {
                return Err(ArtError::format(
                    offset + got as u64,
                    format!("file truncated while reading {what}"),
                ))
            }
            Ok(n) => got += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

pub fn read_grid<R: Read>(mut r: R) -> Result<GridField> {
    let mut head = [0u8; HEADER_LEN];
    read_exact_at(&mut r, &mut head[..4], 0, "magic")?;
    if head[..4] != MAGIC {
        return Err(ArtError::format(
            0,
            format!(
                "bad magic {:02X?}, expected \"ARTK\" (41 52 54 4B)",
                &head[..4]
            ),
        ));
    }
    read_exact_at(&mut r, &mut head[4..], 4, "header")?;
    let u32_at = |o: usize| u32::from_le_bytes(head[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(head[o..o + 8].try_into().unwrap());

    let version = u32_at(4);
    if version != VERSION {
        return Err(ArtError::format(
            4,
            format!("unsupported version {version}, expected {VERSION}"),
        ));
    }
    let rank = u32_at(8) as usize;
    if rank > MAX_RANK {
        return Err(ArtError::format(
            8,
            format!("rank {rank} exceeds {MAX_RANK}"),
        ));
    }
    let nt = u32_at(12) as usize;
    let dims = [
        u32_at(16) as usize,
        u32_at(20) as usize,
        u32_at(24) as usize,
    ];
    let mut bbox = [0.0; 6];
    for (i, b) in bbox.iter_mut().enumerate() {
        *b = f64_at(28 + 8 * i);
    }
    let dt = f64_at(76);
    let grid = Grid3::new(
        dims,
        Point3::new(bbox[0], bbox[1], bbox[2]),
        Point3::new(bbox[3], bbox[4], bbox[5]),
    )
    .map_err(|e| ArtError::format(16, e.to_string()))?;
    if nt > 0 && !(dt > 0.0 && dt.is_finite()) {
        return Err(ArtError::format(
            76,
            format!("time step {dt} must be positive when nt > 0"),
        ));
    }

    let count = nt
        .max(1)
        .checked_mul(grid.len())
        .and_then(|v| v.checked_mul(component_count(rank)))
        .ok_or_else(|| ArtError::format(12, "data size overflows"))?;
    let mut data = Vec::with_capacity(count);
    let mut buf = vec![0u8; 16 * 4096];
    let mut offset = HEADER_LEN as u64;
    let mut left = count;
    while left > 0 {
        let n = left.min(4096);
        let bytes = &mut buf[..16 * n];
        read_exact_at(&mut r, bytes, offset, "data")?;
        for pair in bytes.chunks_exact(16) {
            let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
            let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
            data.push(Complex64::new(re, im));
        }
        offset += 16 * n as u64;
        left -= n;
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(ArtError::format(
            offset,
            "trailing bytes after data section",
        ));
    }
    GridField::new(rank, grid, nt, dt, data)
        .map_err(|e| ArtError::format(HEADER_LEN as u64, e.to_string()))
}

pub fn load_grid(path: impl AsRef<Path>) -> Result<GridField> {
    read_grid(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ScalarProfile, TensorFieldSpec};
    use crate::tensor::SymTensor;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_one_on_4_cube() {
        let f = PhaseField::tensor_generated(TensorFieldSpec::constant(SymTensor::scalar(c(1.0))));
        let g = sample_grid(&f, Grid3::cube(Point3::ORIGIN, 1.0, 4).unwrap(), None).unwrap();
        assert_eq!(g.data.len(), 64);
        assert!(g.data.iter().all(|v| *v == c(1.0)));
    }

    #[test]
    fn gaussian_peaks_at_centre_node() {
        let f = PhaseField::gaussian(Point3::ORIGIN, 0.3, c(1.0)).unwrap();
        let grid = Grid3::cube(Point3::ORIGIN, 1.0, 9).unwrap();
        let g = sample_grid(&f, grid, None).unwrap();
        let imax = (0..g.data.len())
            .max_by(|&a, &b| g.data[a].re.total_cmp(&g.data[b].re))
            .unwrap();
        assert_eq!(imax, grid.index(4, 4, 4));
    }

    #[test]
    fn sampling_is_evaluation() {
        let w = TensorFieldSpec::single(
            SymTensor::from_real(1, &[0.3, -1.0, 2.0]).unwrap(),
            ScalarProfile::Gaussian {
                center: Point3::new(0.1, 0.0, 0.0),
                width: 0.4,
            },
        )
        .unwrap();
        let f = PhaseField::tensor_generated(w.clone());
        let grid = Grid3::new(
            [5, 6, 7],
            Point3::new(0.13, -0.4, 0.2),
            Point3::new(0.7, 0.3, 0.9),
        )
        .unwrap();
        let g = sample_grid(&f, grid, None).unwrap();
        let frame = g.frame(0);
        for idx in 0..grid.len() {
            let exact = w.eval(&grid.node_at(idx));
            for cc in 0..3 {
                assert!((frame.value(cc, idx) - exact.components()[cc]).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn degenerate_box_is_rejected() {
        let f = PhaseField::zero();
        let bad = Grid3 {
            dims: [3, 3, 3],
            min: Point3::ORIGIN,
            max: Point3::new(1.0, 0.0, 1.0),
        };
        assert!(sample_grid(&f, bad, None).is_err());
    }

    #[test]
    fn header_layout() {
        let f = PhaseField::gaussian(Point3::ORIGIN, 0.2, c(1.0)).unwrap();
        let g = sample_grid(
            &f,
            Grid3::cube(Point3::ORIGIN, 1.0, 3).unwrap(),
            Some((2, 0.5)),
        )
        .unwrap();
        let mut bytes = Vec::new();
        write_grid(&g, &mut bytes).unwrap();
        assert_eq!(&bytes[..4], &[0x41, 0x52, 0x54, 0x4B]);
        assert_eq!(bytes.len(), HEADER_LEN + 16 * 2 * 27);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(bytes[76..84].try_into().unwrap()), 0.5);
    }

    #[test]
    fn format_errors_carry_offsets() {
        let g = GridField::stationary(SymTensorGridField::zeros(
            1,
            Grid3::cube(Point3::ORIGIN, 1.0, 2).unwrap(),
        ));
        let mut bytes = Vec::new();
        write_grid(&g, &mut bytes).unwrap();

        let err = read_grid(&bytes[..bytes.len() - 5]).unwrap_err();
        assert!(
            matches!(err, ArtError::Format { offset, .. } if offset == (bytes.len() - 16) as u64 + 11)
        );

        let mut bad = bytes.clone();
        bad[0] = b'X';
        let msg = read_grid(&bad[..]).unwrap_err().to_string();
        assert!(msg.contains("ARTK") && msg.contains("byte 0"));

        let mut v2 = bytes.clone();
        v2[4] = 2;
        assert!(matches!(
            read_grid(&v2[..]).unwrap_err(),
            ArtError::Format { offset: 4, .. }
        ));
    }
}
