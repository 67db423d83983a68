use async_trait::async_trait;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recomb_core::blob::sha256_hex;
use recomb_core::{BBox, ScoredSegment, ScoredSegmentF64};

use super::seed_of;
use crate::imaging::decode;
use crate::{Captioner, ProviderResult, Segmenter};

/// Captions every decodable image as `stub caption <first 8 hex digits of
/// its SHA-256>`.
#[derive(Debug, Clone, Default)]
pub struct StubCaptioner;

#[async_trait]
impl Captioner for StubCaptioner {
    async fn caption(&self, image: &[u8]) -> ProviderResult<String> {
        decode(image)?;
        Ok(format!("stub caption {}", &sha256_hex(image)[..8]))
    }

    fn id(&self) -> String {
        "stub-captioner".into()
    }
}

/// Returns four boxes derived from the image hash, one per quadrant, or
/// nothing at all when built with [`StubSegmenter::empty`].
#[derive(Debug, Clone, Default)]
pub struct StubSegmenter {
    empty: bool,
}

impl StubSegmenter {
    pub fn empty() -> Self {
        Self { empty: true }
    }
}

fn thousandths(v: u32) -> f64 {
    v as f64 / 1000.0
}

#[async_trait]
impl Segmenter for StubSegmenter {
    async fn segment(&self, image: &[u8]) -> ProviderResult<Vec<ScoredSegmentF64>> {
        decode(image)?;
        if self.empty {
            return Ok(Vec::new());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed_of(&[b"segment", image]));
        let segments = (0..4)
            .map(|q| {
                let (col, row) = ((q % 2) as f64 * 0.5, (q / 2) as f64 * 0.5);
                let w = thousandths(rng.random_range(150..=400));
                let h = thousandths(rng.random_range(150..=400));
                let x = col + thousandths(rng.random_range(0..=((0.5 - w) * 1000.0) as u32));
                let y = row + thousandths(rng.random_range(0..=((0.5 - h) * 1000.0) as u32));
                let stability = thousandths(rng.random_range(500..=1000));
                let bbox = BBox::new(x, y, w, h);
                ScoredSegment::from_mask(bbox, w * h, Some(stability))
                    .expect("quadrant boxes are valid")
            })
            .collect();
        Ok(segments)
    }

    fn id(&self) -> String {
        if self.empty { "stub-segmenter-empty" } else { "stub-segmenter" }.into()
    }
}
