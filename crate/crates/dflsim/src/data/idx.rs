//! MNIST IDX ingestion (magic 0x00000803 image files, 0x00000801 label
//! files, big-endian headers). Failures report the byte offset at which the
//! file stopped conforming.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::LabeledImage;

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let start = self.pos as usize;
        let end = start.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                self.pos = end as u64;
                Ok(&self.bytes[start..end])
            }
            None => Err(Error::Format {
                offset: self.pos,
                message: format!(
                    "truncated while reading {what}: need {n} bytes, {} remain",
                    self.bytes.len() - start
                ),
            }),
        }
    }

    fn u32_be(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }
}

pub(super) fn parse_idx_images(bytes: &[u8]) -> Result<Vec<(Vec<f64>, usize, usize)>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.u32_be("image magic")?;
    if magic != IMAGE_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!("image file magic {magic:#010x}, expected {IMAGE_MAGIC:#010x}"),
        });
    }
    let count = cur.u32_be("image count")? as usize;
    let rows = cur.u32_be("row count")? as usize;
    let cols = cur.u32_be("col count")? as usize;
    let mut images = Vec::with_capacity(count);
    for _ in 0..count {
        let raw = cur.take(rows * cols, "image pixels")?;
        let pixels: Vec<f64> = raw.iter().map(|&b| b as f64 / 255.0).collect();
        images.push((pixels, rows, cols));
    }
    if (cur.pos as usize) != bytes.len() {
        return Err(Error::Format {
            offset: cur.pos,
            message: format!("{} trailing bytes after {count} images", bytes.len() as u64 - cur.pos),
        });
    }
    Ok(images)
}

pub(super) fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<usize>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.u32_be("label magic")?;
    if magic != LABEL_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!("label file magic {magic:#010x}, expected {LABEL_MAGIC:#010x}"),
        });
    }
    let count = cur.u32_be("label count")? as usize;
    let raw = cur.take(count, "labels")?;
    for (i, &b) in raw.iter().enumerate() {
        if b > 9 {
            return Err(Error::Format {
                offset: 8 + i as u64,
                message: format!("label byte {b} out of range 0..=9"),
            });
        }
    }
    if (cur.pos as usize) != bytes.len() {
        return Err(Error::Format {
            offset: cur.pos,
            message: format!("{} trailing bytes after {count} labels", bytes.len() as u64 - cur.pos),
        });
    }
    Ok(raw.iter().map(|&b| b as usize).collect())
}

/// Load an MNIST-style image/label file pair into labeled images with
/// pixels scaled to `[0, 1]`.
pub fn load_mnist_idx(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<Vec<LabeledImage>> {
    let images = parse_idx_images(&fs::read(images_path.as_ref())?)?;
    let labels = parse_idx_labels(&fs::read(labels_path.as_ref())?)?;
    if images.len() != labels.len() {
        return Err(Error::Format {
            offset: 4,
            message: format!(
                "image count {} does not match label count {}",
                images.len(),
                labels.len()
            ),
        });
    }
    Ok(images
        .into_iter()
        .zip(labels)
        .map(|((pixels, height, width), label)| LabeledImage {
            pixels,
            height,
            width,
            label,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn image_bytes(images: &[[u8; 4]]) -> Vec<u8> {
        let mut buf = Vec::new();
        buf.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
        buf.extend_from_slice(&(images.len() as u32).to_be_bytes());
        buf.extend_from_slice(&2u32.to_be_bytes());
        buf.extend_from_slice(&2u32.to_be_bytes());
        for img in images {
            buf.extend_from_slice(img);
        }
        buf
    }

    fn label_bytes(labels: &[u8]) -> Vec<u8> {
        let mut buf = Vec::new();
        buf.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
        buf.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        buf.extend_from_slice(labels);
        buf
    }

    #[test]
    fn parses_hand_built_pair() {
        let imgs = image_bytes(&[[0, 128, 255, 64], [255, 255, 0, 0]]);
        let labels = label_bytes(&[7, 3]);
        let dir = tempfile::tempdir().unwrap();
        let ip = dir.path().join("imgs.idx");
        let lp = dir.path().join("labels.idx");
        fs::File::create(&ip).unwrap().write_all(&imgs).unwrap();
        fs::File::create(&lp).unwrap().write_all(&labels).unwrap();

        let data = load_mnist_idx(&ip, &lp).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data[0].label, 7);
        assert_eq!((data[0].height, data[0].width), (2, 2));
        assert_eq!(data[0].pixels[2], 1.0); // byte 255 scales to exactly 1.0
        assert_eq!(data[0].pixels[0], 0.0);
        assert!((data[0].pixels[1] - 128.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn wrong_magic_is_rejected_at_offset_zero() {
        // An image file passed where labels are expected.
        let imgs = image_bytes(&[[0, 0, 0, 0]]);
        match parse_idx_labels(&imgs) {
            Err(Error::Format { offset: 0, message }) => {
                assert!(message.contains("0x00000803"), "{message}");
            }
            other => panic!("expected format error, got {other:?}"),
        }
        let labels = label_bytes(&[1]);
        assert!(matches!(
            parse_idx_images(&labels),
            Err(Error::Format { offset: 0, .. })
        ));
    }

    #[test]
    fn truncation_reports_offset() {
        let mut imgs = image_bytes(&[[0, 1, 2, 3], [4, 5, 6, 7]]);
        imgs.truncate(imgs.len() - 2);
        match parse_idx_images(&imgs) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 20),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn count_mismatch_rejected() {
        let imgs = image_bytes(&[[0, 1, 2, 3]]);
        let labels = label_bytes(&[1, 2]);
        let dir = tempfile::tempdir().unwrap();
        let ip = dir.path().join("imgs.idx");
        let lp = dir.path().join("labels.idx");
        fs::write(&ip, &imgs).unwrap();
        fs::write(&lp, &labels).unwrap();
        assert!(matches!(
            load_mnist_idx(&ip, &lp),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn out_of_range_label_rejected() {
        let labels = label_bytes(&[3, 11]);
        match parse_idx_labels(&labels) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 9),
            other => panic!("expected format error, got {other:?}"),
        }
    }
}
