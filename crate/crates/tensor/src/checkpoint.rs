//! Parameter checkpoints: a flat binary file of little-endian f64 values plus
//! a plain-text manifest with one `name shape byte_offset` line per parameter.
//! Shapes are written as `x`-separated extents (`392x512`, `512`, `1` for a
//! scalar).

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Result, TensorError};
use crate::tensor::Tensor;

fn shape_string(shape: &[usize]) -> String {
    if shape.is_empty() {
        "1".to_string()
    } else {
        shape
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }
}

fn parse_shape(s: &str) -> Option<Vec<usize>> {
    s.split('x').map(|p| p.parse::<usize>().ok()).collect()
}

/// Write `<stem>.bin` and `<stem>.manifest` under `dir`.
pub fn save_params(dir: &Path, stem: &str, named: &[(String, &Tensor)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut bin = Vec::new();
    let mut manifest = String::new();
    for (name, t) in named {
        let offset = bin.len();
        for v in t.data() {
            bin.extend_from_slice(&v.to_le_bytes());
        }
        manifest.push_str(&format!(
            "{} {} {}\n",
            name,
            shape_string(t.shape()),
            offset
        ));
    }
    let mut f = fs::File::create(dir.join(format!("{stem}.bin")))?;
    f.write_all(&bin)?;
    fs::write(dir.join(format!("{stem}.manifest")), manifest)?;
    Ok(())
}

/// Read a checkpoint written by [`save_params`], preserving manifest order.
pub fn load_params(dir: &Path, stem: &str) -> Result<Vec<(String, Tensor)>> {
    let manifest_path = dir.join(format!("{stem}.manifest"));
    let bin = fs::read(dir.join(format!("{stem}.bin")))?;
    let text = fs::read_to_string(&manifest_path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| TensorError::Manifest {
            path: manifest_path.display().to_string(),
            reason: format!("line {}: {}", lineno + 1, reason),
        };
        let mut parts = line.split_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| bad("missing name".into()))?
            .to_string();
        let shape = parts
            .next()
            .and_then(parse_shape)
            .ok_or_else(|| bad("missing or malformed shape".into()))?;
        let offset: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad("missing or malformed offset".into()))?;
        let n: usize = shape.iter().product();
        let end = offset + 8 * n;
        if end > bin.len() {
            return Err(bad(format!(
                "entry `{name}` spans bytes {offset}..{end} but file has {}",
                bin.len()
            )));
        }
        let data: Vec<f64> = bin[offset..end]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        out.push((name, Tensor::new(shape, data)?));
    }
    Ok(out)
}
