//! Dataset export: a CSV with header `view,row_index,c0..c{d-1}` listing the
//! X rows then the Y rows, plus a JSON sidecar carrying seeds and projection
//! checksums.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::multiview::MultiViewDataset;
use crate::toy::ToyProjections;

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct DatasetSidecar {
    pub split: String,
    pub n: usize,
    pub dim_x: usize,
    pub dim_y: usize,
    pub sample_seed: Option<u64>,
    pub projection_seed: Option<u64>,
    pub w1_sha256: Option<String>,
    pub w2_sha256: Option<String>,
}

pub fn tensor_checksum(t: &ccalign_tensor::Tensor) -> String {
    let mut hasher = Sha256::new();
    for v in t.data() {
        hasher.update(v.to_le_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Write `<stem>.csv` (and `<stem>.labels.csv` when labels are present) plus
/// `<stem>.json`.
pub fn export_dataset(
    dir: &Path,
    stem: &str,
    ds: &MultiViewDataset,
    sample_seed: Option<u64>,
    proj: Option<&ToyProjections>,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let d = ds.dim_x().max(ds.dim_y());
    let mut csv = String::from("view,row_index");
    for j in 0..d {
        write!(csv, ",c{j}").unwrap();
    }
    csv.push('\n');
    for (tag, t) in [("x", ds.x()), ("y", ds.y())] {
        for i in 0..t.rows() {
            write!(csv, "{tag},{i}").unwrap();
            for v in t.row(i) {
                write!(csv, ",{v}").unwrap();
            }
            for _ in t.cols()..d {
                csv.push(',');
            }
            csv.push('\n');
        }
    }
    std::fs::write(dir.join(format!("{stem}.csv")), csv)?;

    if let Some(labels) = ds.labels() {
        let mut lcsv = String::from("row_index,label\n");
        for (i, l) in labels.iter().enumerate() {
            writeln!(lcsv, "{i},{l}").unwrap();
        }
        std::fs::write(dir.join(format!("{stem}.labels.csv")), lcsv)?;
    }

    let sidecar = DatasetSidecar {
        split: ds.split().to_string(),
        n: ds.n(),
        dim_x: ds.dim_x(),
        dim_y: ds.dim_y(),
        sample_seed,
        projection_seed: proj.map(|p| p.seed),
        w1_sha256: proj.map(|p| tensor_checksum(&p.w1)),
        w2_sha256: proj.map(|p| tensor_checksum(&p.w2)),
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    std::fs::write(dir.join(format!("{stem}.json")), json)?;
    Ok(())
}
