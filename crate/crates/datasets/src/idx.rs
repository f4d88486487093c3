//! IDX binary format: big-endian u32 magic and dimension header followed by
//! raw unsigned bytes. Magic 0x00000803 marks a rank-3 image file and
//! 0x00000801 a rank-1 label file.

use std::path::Path;

use crate::error::{DataError, Result};

pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABEL_MAGIC: u32 = 0x0000_0801;

/// A stack of grayscale images with pixels scaled to [0, 1].
#[derive(Clone, Debug)]
pub struct ImageSet {
    pub n: usize,
    pub h: usize,
    pub w: usize,
    /// Row-major, image-major: pixel (i, r, c) at `i*h*w + r*w + c`.
    pub pixels: Vec<f64>,
}

impl ImageSet {
    pub fn image(&self, i: usize) -> &[f64] {
        let px = self.h * self.w;
        &self.pixels[i * px..(i + 1) * px]
    }
}

fn read_u32(bytes: &[u8], offset: usize, path: &str) -> Result<u32> {
    let end = offset + 4;
    if end > bytes.len() {
        return Err(DataError::Truncated {
            path: path.into(),
            offset: bytes.len(),
            need: end - bytes.len(),
        });
    }
    Ok(u32::from_be_bytes(bytes[offset..end].try_into().unwrap()))
}

/// Parse a rank-3 image file from raw bytes.
pub fn parse_idx_images(bytes: &[u8], path: &str) -> Result<ImageSet> {
    let magic = read_u32(bytes, 0, path)?;
    if magic != IDX_IMAGE_MAGIC {
        return Err(DataError::BadMagic {
            path: path.into(),
            offset: 0,
            expected: IDX_IMAGE_MAGIC,
            got: magic,
        });
    }
    let n = read_u32(bytes, 4, path)? as usize;
    let h = read_u32(bytes, 8, path)? as usize;
    let w = read_u32(bytes, 12, path)? as usize;
    let need = 16 + n * h * w;
    if bytes.len() < need {
        return Err(DataError::Truncated {
            path: path.into(),
            offset: bytes.len(),
            need: need - bytes.len(),
        });
    }
    let pixels = bytes[16..need].iter().map(|b| *b as f64 / 255.0).collect();
    Ok(ImageSet { n, h, w, pixels })
}

/// Parse a rank-1 label file from raw bytes.
pub fn parse_idx_labels(bytes: &[u8], path: &str) -> Result<Vec<u8>> {
    let magic = read_u32(bytes, 0, path)?;
    if magic != IDX_LABEL_MAGIC {
        return Err(DataError::BadMagic {
            path: path.into(),
            offset: 0,
            expected: IDX_LABEL_MAGIC,
            got: magic,
        });
    }
    let n = read_u32(bytes, 4, path)? as usize;
    let need = 8 + n;
    if bytes.len() < need {
        return Err(DataError::Truncated {
            path: path.into(),
            offset: bytes.len(),
            need: need - bytes.len(),
        });
    }
    Ok(bytes[8..need].to_vec())
}

/// Load paired image/label files, checking that the counts agree.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<(ImageSet, Vec<u8>)> {
    let img_bytes = std::fs::read(images_path)?;
    let images = parse_idx_images(&img_bytes, &images_path.display().to_string())?;
    let lbl_bytes = std::fs::read(labels_path)?;
    let labels = parse_idx_labels(&lbl_bytes, &labels_path.display().to_string())?;
    if images.n != labels.len() {
        return Err(DataError::CountMismatch {
            images: images.n,
            labels: labels.len(),
        });
    }
    Ok((images, labels))
}

/// Write images (quantized to u8 over [0,1]) in IDX format.
pub fn write_idx_images(path: &Path, images: &ImageSet) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + images.pixels.len());
    bytes.extend_from_slice(&IDX_IMAGE_MAGIC.to_be_bytes());
    bytes.extend_from_slice(&(images.n as u32).to_be_bytes());
    bytes.extend_from_slice(&(images.h as u32).to_be_bytes());
    bytes.extend_from_slice(&(images.w as u32).to_be_bytes());
    bytes.extend(
        images
            .pixels
            .iter()
            .map(|p| (p.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 + labels.len());
    bytes.extend_from_slice(&IDX_LABEL_MAGIC.to_be_bytes());
    bytes.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    bytes.extend_from_slice(labels);
    std::fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrong_magic_names_expected_and_actual() {
        let mut bytes = vec![0u8; 20];
        bytes[..4].copy_from_slice(&0x0000_0802u32.to_be_bytes());
        let err = parse_idx_images(&bytes, "x").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("0x00000803") && msg.contains("0x00000802"), "{msg}");
    }

    #[test]
    fn truncated_file_reports_offset() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&IDX_IMAGE_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&2u32.to_be_bytes());
        bytes.extend_from_slice(&4u32.to_be_bytes());
        bytes.extend_from_slice(&4u32.to_be_bytes());
        bytes.extend_from_slice(&[7u8; 10]); // needs 32 pixel bytes
        let err = parse_idx_images(&bytes, "t").unwrap_err();
        assert!(matches!(err, DataError::Truncated { offset: 26, .. }), "{err}");
    }

    #[test]
    fn roundtrip_preserves_quantized_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let images = ImageSet {
            n: 2,
            h: 2,
            w: 2,
            pixels: vec![0.0, 1.0, 0.5, 0.25, 1.0, 0.0, 0.75, 0.1],
        };
        let ip = dir.path().join("img");
        let lp = dir.path().join("lbl");
        write_idx_images(&ip, &images).unwrap();
        write_idx_labels(&lp, &[3, 9]).unwrap();
        let (back, labels) = load_idx(&ip, &lp).unwrap();
        assert_eq!(labels, vec![3, 9]);
        assert_eq!((back.n, back.h, back.w), (2, 2, 2));
        for (a, b) in back.pixels.iter().zip(&images.pixels) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let images = ImageSet {
            n: 2,
            h: 1,
            w: 1,
            pixels: vec![0.0, 1.0],
        };
        let ip = dir.path().join("img");
        let lp = dir.path().join("lbl");
        write_idx_images(&ip, &images).unwrap();
        write_idx_labels(&lp, &[1, 2, 3]).unwrap();
        assert!(matches!(
            load_idx(&ip, &lp),
            Err(DataError::CountMismatch { images: 2, labels: 3 })
        ));
    }
}
