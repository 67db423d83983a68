use async_trait::async_trait;
use image::{DynamicImage, GrayImage, Luma, RgbImage};
use recomb_core::bbox::frac_to_px;
use recomb_core::{LayoutSlot, DEFAULT_CANVAS_PX};

use super::seed_of;
use crate::imaging::{decode, draw_text, encode_png, fill_rect, stroke_rect};
use crate::{check_layout_input, ImageBytes, LayoutImageGenerator, ProviderResult, SketchStylizer};

/// Paints each layout box as a filled, outlined and labelled rectangle on a
/// square canvas. Colours come from hashes of the caption and object names.
#[derive(Debug, Clone)]
pub struct StubGenerator {
    pub canvas_px: u32,
}

impl Default for StubGenerator {
    fn default() -> Self {
        Self { canvas_px: DEFAULT_CANVAS_PX }
    }
}

fn tone(seed: u64, lo: u8, hi: u8) -> [u8; 3] {
    let span = (hi - lo) as u64 + 1;
    [0, 16, 32].map(|shift| lo + ((seed >> shift) % span) as u8)
}

#[async_trait]
impl LayoutImageGenerator for StubGenerator {
    async fn generate_image(&self, caption: &str, layout: &[LayoutSlot]) -> ProviderResult<ImageBytes> {
        check_layout_input(layout)?;
        let side = self.canvas_px;
        let background = tone(seed_of(&[b"caption", caption.as_bytes()]), 225, 255);
        let mut img = RgbImage::from_pixel(side, side, image::Rgb(background));
        let stroke = (side as i64 / 170).max(1);
        for slot in layout {
            let r = frac_to_px(&slot.bbox, side);
            let fill = tone(seed_of(&[b"object", slot.object_name.as_bytes()]), 70, 200);
            fill_rect(&mut img, r, fill);
            stroke_rect(&mut img, r, stroke, [20, 20, 20]);
            let label: String = slot.object_name.chars().take(12).collect();
            draw_text(&mut img, r.x + 2 * stroke, r.y + 2 * stroke, stroke, &label, [0, 0, 0]);
        }
        Ok(encode_png(&DynamicImage::ImageRgb8(img)))
    }

    fn id(&self) -> String {
        format!("stub-generator-{}px", self.canvas_px)
    }
}

/// Marks pixels whose luma differs from a right or lower neighbour by more
/// than the threshold. Output is black lines on white, values 0 and 255
/// only, same dimensions as the input. Running it twice does not give the
/// same image (lines become double edges).
#[derive(Debug, Clone)]
pub struct StubStylizer {
    pub threshold: u8,
}

impl Default for StubStylizer {
    fn default() -> Self {
        Self { threshold: 24 }
    }
}

#[async_trait]
impl SketchStylizer for StubStylizer {
    async fn stylize_sketch(&self, image: &[u8]) -> ProviderResult<ImageBytes> {
        let luma = decode(image)?.to_luma8();
        let (w, h) = luma.dimensions();
        let at = |x: u32, y: u32| luma.get_pixel(x.min(w - 1), y.min(h - 1))[0] as i16;
        let out = GrayImage::from_fn(w, h, |x, y| {
            let c = at(x, y);
            let edge = (c - at(x + 1, y)).abs().max((c - at(x, y + 1)).abs());
            Luma([if edge > self.threshold as i16 { 0 } else { 255 }])
        });
        Ok(encode_png(&DynamicImage::ImageLuma8(out)))
    }

    fn id(&self) -> String {
        format!("stub-stylizer-t{}", self.threshold)
    }
}

