//! Backdoor trigger patterns: construction, stamping, and even decomposition
//! into local triggers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::LabeledImage;

/// A global trigger: a set of pixel stamps plus the label the attacker wants
/// stamped inputs classified as.
///
/// Stamps are stored in construction order — block-major for block patterns —
/// and [`decompose`](TriggerSpec::decompose) splits that order contiguously,
/// so an m-block pattern decomposed m ways yields one block per part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerSpec {
    pattern: Vec<(usize, usize, f64)>,
    pub size: usize,
    pub gap: usize,
    pub shift: (usize, usize),
    pub target_label: usize,
    pub pixel_value: f64,
}

impl TriggerSpec {
    /// `num_blocks` square blocks of edge `size` in a row along the top edge,
    /// separated by `gap` pixels and offset by `shift`, all stamped with
    /// `pixel_value`. The paper-style default is
    /// `blocks(4, 2, 2, (0, 0), τ, 1.0, bounds)`.
    pub fn blocks(
        num_blocks: usize,
        size: usize,
        gap: usize,
        shift: (usize, usize),
        target_label: usize,
        pixel_value: f64,
        image_bounds: (usize, usize),
    ) -> Result<Self> {
        if num_blocks == 0 || size == 0 {
            return Err(Error::invalid("trigger needs num_blocks >= 1 and size >= 1"));
        }
        let mut pattern = Vec::with_capacity(num_blocks * size * size);
        for b in 0..num_blocks {
            let col0 = shift.1 + b * (size + gap);
            for dr in 0..size {
                for dc in 0..size {
                    pattern.push((shift.0 + dr, col0 + dc, pixel_value));
                }
            }
        }
        Self::from_stamps(pattern, size, gap, shift, target_label, pixel_value, image_bounds)
    }

    /// Build from an explicit stamp list (kept in the given order).
    #[allow(clippy::too_many_arguments)]
    pub fn from_stamps(
        pattern: Vec<(usize, usize, f64)>,
        size: usize,
        gap: usize,
        shift: (usize, usize),
        target_label: usize,
        pixel_value: f64,
        image_bounds: (usize, usize),
    ) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::invalid("trigger pattern must be nonempty"));
        }
        let (h, w) = image_bounds;
        for &(r, c, v) in &pattern {
            if r >= h || c >= w {
                return Err(Error::invalid(format!(
                    "stamp ({r}, {c}) outside {h}x{w} image bounds"
                )));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("stamp value {v} outside [0, 1]")));
            }
        }
        if !(0.0..=1.0).contains(&pixel_value) {
            return Err(Error::invalid(format!(
                "pixel_value {pixel_value} outside [0, 1]"
            )));
        }
        Ok(TriggerSpec {
            pattern,
            size,
            gap,
            shift,
            target_label,
            pixel_value,
        })
    }

    pub fn stamps(&self) -> &[(usize, usize, f64)] {
        &self.pattern
    }

    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }

    /// Fraction of an `h x w` image covered by the pattern (distinct pixels).
    pub fn pixel_fraction(&self, h: usize, w: usize) -> f64 {
        let mut distinct: Vec<(usize, usize)> = self.pattern.iter().map(|&(r, c, _)| (r, c)).collect();
        distinct.sort_unstable();
        distinct.dedup();
        distinct.len() as f64 / (h * w) as f64
    }

    /// Split the stamp list into `m` contiguous parts with sizes differing by
    /// at most one; parts are disjoint and union back to the full pattern.
    pub fn decompose(&self, m: usize) -> Result<Vec<LocalTrigger>> {
        if m == 0 || m > self.pattern.len() {
            return Err(Error::invalid(format!(
                "cannot decompose {} stamps into {m} parts",
                self.pattern.len()
            )));
        }
        let base = self.pattern.len() / m;
        let extra = self.pattern.len() % m;
        let mut out = Vec::with_capacity(m);
        let mut start = 0;
        for k in 0..m {
            let take = base + usize::from(k < extra);
            out.push(LocalTrigger {
                target_label: self.target_label,
                stamps: self.pattern[start..start + take].to_vec(),
            });
            start += take;
        }
        Ok(out)
    }
}

/// One part of a decomposed global trigger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTrigger {
    pub target_label: usize,
    stamps: Vec<(usize, usize, f64)>,
}

impl LocalTrigger {
    pub fn stamps(&self) -> &[(usize, usize, f64)] {
        &self.stamps
    }
}

fn stamp_into(image: &mut LabeledImage, stamps: &[(usize, usize, f64)]) -> Result<()> {
    for &(r, c, v) in stamps {
        if r >= image.height || c >= image.width {
            return Err(Error::invalid(format!(
                "stamp ({r}, {c}) outside {}x{} image",
                image.height, image.width
            )));
        }
        image.pixels[r * image.width + c] = v;
    }
    Ok(())
}

/// Stamp the pattern onto a copy of the image. The label is left unchanged;
/// relabeling toward the target class happens at poisoned-batch construction.
pub fn apply_trigger(x: &LabeledImage, t: &TriggerSpec) -> Result<LabeledImage> {
    let mut out = x.clone();
    stamp_into(&mut out, &t.pattern)?;
    Ok(out)
}

/// Stamp one local trigger onto a copy of the image.
pub fn apply_local_trigger(x: &LabeledImage, t: &LocalTrigger) -> Result<LabeledImage> {
    let mut out = x.clone();
    stamp_into(&mut out, &t.stamps)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn blank(h: usize, w: usize) -> LabeledImage {
        LabeledImage {
            pixels: vec![0.2; h * w],
            height: h,
            width: w,
            label: 5,
        }
    }

    fn default_trigger() -> TriggerSpec {
        TriggerSpec::blocks(4, 2, 2, (0, 0), 0, 1.0, (28, 28)).unwrap()
    }

    #[test]
    fn default_pattern_geometry() {
        let t = default_trigger();
        assert_eq!(t.len(), 16);
        // Block b occupies rows 0..2, cols 4b..4b+2.
        for b in 0..4 {
            for (idx, &(r, c, v)) in t.stamps()[b * 4..(b + 1) * 4].iter().enumerate() {
                assert_eq!(r, idx / 2);
                assert_eq!(c, 4 * b + idx % 2);
                assert_eq!(v, 1.0);
            }
        }
        assert!((t.pixel_fraction(28, 28) - 16.0 / 784.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_bounds_pattern_rejected() {
        assert!(TriggerSpec::blocks(4, 2, 2, (0, 16), 0, 1.0, (28, 28)).is_err());
        assert!(TriggerSpec::blocks(4, 2, 2, (27, 0), 0, 1.0, (28, 28)).is_err());
        assert!(TriggerSpec::blocks(4, 2, 2, (0, 0), 0, 1.5, (28, 28)).is_err());
    }

    #[test]
    fn apply_changes_only_stamped_pixels_and_is_idempotent() {
        let t = default_trigger();
        let x = blank(28, 28);
        let once = apply_trigger(&x, &t).unwrap();
        let twice = apply_trigger(&once, &t).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once.label, x.label);
        let stamped: std::collections::BTreeSet<(usize, usize)> =
            t.stamps().iter().map(|&(r, c, _)| (r, c)).collect();
        for r in 0..28 {
            for c in 0..28 {
                let expect = if stamped.contains(&(r, c)) { 1.0 } else { 0.2 };
                assert_eq!(once.pixels[r * 28 + c], expect);
            }
        }
    }

    #[test]
    fn local_triggers_compose_to_global() {
        let t = default_trigger();
        let locals = t.decompose(4).unwrap();
        let x = blank(28, 28);
        let mut seq = x.clone();
        for lt in &locals {
            seq = apply_local_trigger(&seq, lt).unwrap();
        }
        assert_eq!(seq, apply_trigger(&x, &t).unwrap());
    }

    #[test]
    fn decompose_identity_and_block_split() {
        let t = default_trigger();
        let one = t.decompose(1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].stamps(), t.stamps());

        // Four 2x2 blocks, m = 4: one block each.
        let four = t.decompose(4).unwrap();
        for (b, lt) in four.iter().enumerate() {
            assert_eq!(lt.stamps().len(), 4);
            assert!(lt.stamps().iter().all(|&(_, c, _)| c / 4 == b));
        }
    }

    #[test]
    fn decompose_balanced_sizes() {
        let stamps: Vec<(usize, usize, f64)> = (0..10).map(|i| (0, i, 1.0)).collect();
        let t = TriggerSpec::from_stamps(stamps, 1, 0, (0, 0), 0, 1.0, (8, 16)).unwrap();
        let sizes: Vec<usize> = t
            .decompose(3)
            .unwrap()
            .iter()
            .map(|l| l.stamps().len())
            .collect();
        assert_eq!(sizes, vec![4, 3, 3]);
        assert!(t.decompose(11).is_err());
        assert!(t.decompose(0).is_err());
    }

    proptest! {
        #[test]
        fn decomposition_is_a_partition(
            n_stamps in 1usize..40,
            m_raw in 1usize..40,
            seed in 0u64..1000,
        ) {
            let m = m_raw.min(n_stamps);
            // Distinct seeded coordinates in a 16x16 image.
            let mut rng = crate::rng::stream(seed, "test.trigger.prop", &[]);
            use rand::seq::SliceRandom;
            let mut coords: Vec<(usize, usize)> =
                (0..256).map(|i| (i / 16, i % 16)).collect();
            coords.shuffle(&mut rng);
            let stamps: Vec<(usize, usize, f64)> = coords[..n_stamps]
                .iter()
                .map(|&(r, c)| (r, c, 0.9))
                .collect();
            let t = TriggerSpec::from_stamps(stamps.clone(), 1, 0, (0, 0), 0, 0.9, (16, 16)).unwrap();
            let parts = t.decompose(m).unwrap();

            prop_assert_eq!(parts.len(), m);
            let mut sizes: Vec<usize> = parts.iter().map(|p| p.stamps().len()).collect();
            sizes.sort_unstable();
            prop_assert!(sizes[sizes.len() - 1] - sizes[0] <= 1);
            prop_assert!(sizes[0] >= 1);

            let union: Vec<(usize, usize, f64)> =
                parts.iter().flat_map(|p| p.stamps().iter().copied()).collect();
            prop_assert_eq!(union, stamps); // exact union, disjoint, order-preserving
        }
    }
}
