//! Per-cell `(ε_r, μ_r)` files, k-fastest cell order.

use std::path::Path;

use crate::config::VoxelFormat;
use crate::error::CliError;

/// Read `cells` pairs of relative permittivity and permeability.
pub fn load_voxels(path: &Path, format: VoxelFormat, cells: usize) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let (eps, mu) = match format {
        VoxelFormat::Csv => read_csv(path)?,
        VoxelFormat::Bin => read_bin(path)?,
    };
    if eps.len() != cells {
        return Err(CliError::Voxel(format!("{}: expected {cells} cells, found {}", path.display(), eps.len())));
    }
    Ok((eps, mu))
}

fn read_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Voxel(format!("{}: {e}", path.display())))?;
    let (mut eps, mut mu) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Voxel(e.to_string()))?;
        if rec.len() != 2 {
            return Err(CliError::Voxel(format!("record {}: expected 2 fields, got {}", i + 1, rec.len())));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| CliError::Voxel(format!("record {}: '{s}': {e}", i + 1)));
        eps.push(parse(&rec[0])?);
        mu.push(parse(&rec[1])?);
    }
    Ok((eps, mu))
}

/// Little-endian `f64` pairs.
fn read_bin(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let bytes = std::fs::read(path)?;
    if bytes.len() % 16 != 0 {
        return Err(CliError::Voxel(format!("{}: length {} is not a multiple of 16", path.display(), bytes.len())));
    }
    let (mut eps, mut mu) = (Vec::new(), Vec::new());
    for pair in bytes.chunks_exact(16) {
        eps.push(f64::from_le_bytes(pair[..8].try_into().unwrap()));
        mu.push(f64::from_le_bytes(pair[8..].try_into().unwrap()));
    }
    Ok((eps, mu))
}
