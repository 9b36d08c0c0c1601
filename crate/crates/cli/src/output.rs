//! On-disk artifacts: moment tables (CSV), binary grid dumps (MBGD) and
//! 8-bit heatmaps (binary PGM with a min/max sidecar).

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use quasibeam_core::QuasiDistribution;

pub const CSV_HEADER: [&str; 10] = [
    "z",
    "mean_x",
    "mean_p",
    "sigma_x",
    "sigma_p",
    "sigma_xp",
    "emittance",
    "uncertainty_product",
    "negativity_volume",
    "r3",
];

pub const MBGD_MAGIC: &[u8; 4] = b"MBGD";
pub const MBGD_VERSION: u32 = 1;
pub const MBGD_HEADER_BYTES: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, message: impl Into<String>) -> OutputError {
    OutputError::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// One line of the moment table; missing diagnostics are `NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow(pub [f64; 10]);

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<(), OutputError> {
    let mut out = String::with_capacity(rows.len() * 256);
    out.push_str(&CSV_HEADER.join(","));
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.0.iter().map(|v| fmt_value(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>, OutputError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| format_err(path, "empty file"))?
        .map_err(io_err(path))?;
    if header != CSV_HEADER.join(",") {
        return Err(format_err(path, format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(io_err(path))?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != CSV_HEADER.len() {
            return Err(format_err(path, format!("line {}: expected 10 fields", n + 2)));
        }
        let mut row = [0.0; 10];
        for (slot, f) in row.iter_mut().zip(fields) {
            *slot = f
                .parse()
                .map_err(|_| format_err(path, format!("line {}: bad number {f:?}", n + 2)))?;
        }
        rows.push(CsvRow(row));
    }
    Ok(rows)
}

/// Header and values of a binary grid dump.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDump {
    pub version: u32,
    pub nx: u32,
    pub np: u32,
    pub x_length: f64,
    pub p_length: f64,
    pub x_center: f64,
    pub p_center: f64,
    pub z: f64,
    pub epsilon: f64,
    /// Row-major with x as the slow index: `values[i * np + j]`.
    pub values: Vec<f64>,
}

impl GridDump {
    pub fn cell_area(&self) -> f64 {
        self.x_length / self.nx as f64 * self.p_length / self.np as f64
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }
}

/// Layout: `"MBGD"`, u32 version, u32 nx, u32 np, then f64 x_length,
/// p_length, x_center, p_center, z, epsilon (64 header bytes in total),
/// followed by `nx * np` f64 values; all little-endian.
pub fn write_grid_dump(path: &Path, rho: &QuasiDistribution<f64>, epsilon: f64) -> Result<(), OutputError> {
    let (gx, gp) = (rho.grid.x, rho.grid.p);
    let mut buf = Vec::with_capacity(MBGD_HEADER_BYTES + rho.values.len() * 8);
    buf.extend_from_slice(MBGD_MAGIC);
    buf.extend_from_slice(&MBGD_VERSION.to_le_bytes());
    buf.extend_from_slice(&(gx.len() as u32).to_le_bytes());
    buf.extend_from_slice(&(gp.len() as u32).to_le_bytes());
    for v in [gx.length(), gp.length(), gx.center(), gp.center(), rho.z, epsilon] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    debug_assert_eq!(buf.len(), MBGD_HEADER_BYTES);
    for v in &rho.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf).map_err(io_err(path))
}

pub fn read_grid_dump(path: &Path) -> Result<GridDump, OutputError> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(io_err(path))?;
    if bytes.len() < MBGD_HEADER_BYTES || &bytes[..4] != MBGD_MAGIC {
        return Err(format_err(path, "not an MBGD grid dump"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != MBGD_VERSION {
        return Err(format_err(path, format!("unsupported version {version}")));
    }
    let (nx, np) = (u32_at(8), u32_at(12));
    let count = nx as usize * np as usize;
    if bytes.len() != MBGD_HEADER_BYTES + 8 * count {
        return Err(format_err(
            path,
            format!("expected {} bytes, found {}", MBGD_HEADER_BYTES + 8 * count, bytes.len()),
        ));
    }
    let values = bytes[MBGD_HEADER_BYTES..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(GridDump {
        version,
        nx,
        np,
        x_length: f64_at(16),
        p_length: f64_at(24),
        x_center: f64_at(32),
        p_center: f64_at(40),
        z: f64_at(48),
        epsilon: f64_at(56),
        values,
    })
}

/// Writes a binary PGM (width nx, height np, p increasing upwards) and a
/// `.txt` sidecar with the value range mapped onto 0..=255. Returns
/// `(min, max)`.
pub fn write_heatmap(path: &Path, rho: &QuasiDistribution<f64>) -> Result<(f64, f64), OutputError> {
    let (nx, np) = (rho.grid.x.len(), rho.grid.p.len());
    let min = rho.values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = rho.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    let mut buf = format!("P5\n{nx} {np}\n255\n").into_bytes();
    for row in (0..np).rev() {
        for i in 0..nx {
            let v = rho.values[i * np + row];
            let level = if span > 0.0 {
                ((v - min) / span * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                0
            };
            buf.push(level);
        }
    }
    fs::write(path, buf).map_err(io_err(path))?;
    let sidecar = path.with_extension("txt");
    let mut f = fs::File::create(&sidecar).map_err(io_err(&sidecar))?;
    writeln!(f, "min {}\nmax {}", fmt_value(min), fmt_value(max)).map_err(io_err(&sidecar))?;
    Ok((min, max))
}
