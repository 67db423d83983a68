//! Decoding, cropping and encoding helpers shared by the stubs and the
//! orchestrator.

use std::io::Cursor;

use image::{DynamicImage, GenericImageView, ImageFormat, ImageReader};
use recomb_core::PixelRect;

use crate::{ImageBytes, ProviderError, ProviderResult};

/// Decodes a PNG or JPEG.
pub fn decode(bytes: &[u8]) -> ProviderResult<DynamicImage> {
    let reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| ProviderError::UndecodableImage(e.to_string()))?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Jpeg) => {}
        Some(other) => {
            return Err(ProviderError::UndecodableImage(format!(
                "unsupported format {other:?}"
            )))
        }
        None => return Err(ProviderError::UndecodableImage("unknown format".into())),
    }
    reader
        .decode()
        .map_err(|e| ProviderError::UndecodableImage(e.to_string()))
}

/// Width and height of an encoded image.
pub fn dimensions(bytes: &[u8]) -> ProviderResult<(u32, u32)> {
    Ok(decode(bytes)?.dimensions())
}

pub fn encode_png(img: &DynamicImage) -> ImageBytes {
    let mut out = Vec::new();
    img.write_to(&mut Cursor::new(&mut out), ImageFormat::Png)
        .expect("PNG encoding into memory does not fail");
    out
}

/// Cuts the given pixel rectangles out of an image and re-encodes each as
/// PNG.
pub fn crop_regions(bytes: &[u8], regions: &[PixelRect]) -> ProviderResult<Vec<ImageBytes>> {
    let img = decode(bytes)?;
    let (w, h) = img.dimensions();
    regions
        .iter()
        .map(|r| {
            let fits = r.x >= 0 && r.y >= 0 && r.w > 0 && r.h > 0
                && r.x + r.w <= w as i64 && r.y + r.h <= h as i64;
            if !fits {
                return Err(ProviderError::InvalidInput(format!(
                    "crop {r:?} outside {w}x{h} image"
                )));
            }
            let region = img.crop_imm(r.x as u32, r.y as u32, r.w as u32, r.h as u32);
            Ok(encode_png(&region))
        })
        .collect()
}

/// 3x5 bitmap glyphs for labelling stub renders. Bit 14 is the top-left
/// pixel, rows run top to bottom.
fn glyph(c: char) -> u16 {
    match c.to_ascii_lowercase() {
        'a' => 0b010_101_111_101_101,
        'b' => 0b110_101_110_101_110,
        'c' => 0b011_100_100_100_011,
        'd' => 0b110_101_101_101_110,
        'e' => 0b111_100_110_100_111,
        'f' => 0b111_100_110_100_100,
        'g' => 0b011_100_101_101_011,
        'h' => 0b101_101_111_101_101,
        'i' => 0b111_010_010_010_111,
        'j' => 0b001_001_001_101_010,
        'k' => 0b101_101_110_101_101,
        'l' => 0b100_100_100_100_111,
        'm' => 0b101_111_111_101_101,
        'n' => 0b110_101_101_101_101,
        'o' => 0b010_101_101_101_010,
        'p' => 0b110_101_110_100_100,
        'q' => 0b010_101_101_110_011,
        'r' => 0b110_101_110_101_101,
        's' => 0b011_100_010_001_110,
        't' => 0b111_010_010_010_010,
        'u' => 0b101_101_101_101_111,
        'v' => 0b101_101_101_101_010,
        'w' => 0b101_101_111_111_101,
        'x' => 0b101_101_010_101_101,
        'y' => 0b101_101_010_010_010,
        'z' => 0b111_001_010_100_111,
        '0' => 0b111_101_101_101_111,
        '1' => 0b010_110_010_010_111,
        '2' => 0b110_001_010_100_111,
        '3' => 0b110_001_010_001_110,
        '4' => 0b101_101_111_001_001,
        '5' => 0b111_100_110_001_110,
        '6' => 0b011_100_111_101_111,
        '7' => 0b111_001_010_010_010,
        '8' => 0b111_101_111_101_111,
        '9' => 0b111_101_111_001_110,
        '-' => 0b000_000_111_000_000,
        _ => 0,
    }
}

/// Draws `text` with its top-left corner at `(x, y)`, each glyph pixel
/// `scale` wide. Pixels off the image are skipped.
pub fn draw_text(img: &mut image::RgbImage, x: i64, y: i64, scale: i64, text: &str, color: [u8; 3]) {
    let (w, h) = (img.width() as i64, img.height() as i64);
    for (i, c) in text.chars().enumerate() {
        let bits = glyph(c);
        let gx = x + i as i64 * 4 * scale;
        for row in 0..5 {
            for col in 0..3 {
                if bits >> (14 - (row * 3 + col)) & 1 == 0 {
                    continue;
                }
                for dy in 0..scale {
                    for dx in 0..scale {
                        let (px, py) = (gx + col * scale + dx, y + row * scale + dy);
                        if (0..w).contains(&px) && (0..h).contains(&py) {
                            img.put_pixel(px as u32, py as u32, image::Rgb(color));
                        }
                    }
                }
            }
        }
    }
}

/// Fills a rectangle given in pixels, clipped to the image.
pub fn fill_rect(img: &mut image::RgbImage, r: PixelRect, color: [u8; 3]) {
    let x0 = r.x.max(0);
    let y0 = r.y.max(0);
    let x1 = (r.x + r.w).min(img.width() as i64);
    let y1 = (r.y + r.h).min(img.height() as i64);
    for y in y0..y1 {
        for x in x0..x1 {
            img.put_pixel(x as u32, y as u32, image::Rgb(color));
        }
    }
}

/// Draws a rectangle outline `t` pixels thick, clipped to the image.
pub fn stroke_rect(img: &mut image::RgbImage, r: PixelRect, t: i64, color: [u8; 3]) {
    let t = t.min(r.w).min(r.h).max(1);
    fill_rect(img, PixelRect { x: r.x, y: r.y, w: r.w, h: t }, color);
    fill_rect(img, PixelRect { x: r.x, y: r.y + r.h - t, w: r.w, h: t }, color);
    fill_rect(img, PixelRect { x: r.x, y: r.y, w: t, h: r.h }, color);
    fill_rect(img, PixelRect { x: r.x + r.w - t, y: r.y, w: t, h: r.h }, color);
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::RgbImage;

    fn png(w: u32, h: u32) -> ImageBytes {
        encode_png(&DynamicImage::ImageRgb8(RgbImage::from_fn(w, h, |x, y| {
            image::Rgb([x as u8, y as u8, 0])
        })))
    }

    #[test]
    fn crops_keep_requested_sizes() {
        let bytes = png(30, 20);
        let crops = crop_regions(
            &bytes,
            &[PixelRect { x: 0, y: 0, w: 10, h: 5 }, PixelRect { x: 20, y: 15, w: 10, h: 5 }],
        )
        .unwrap();
        assert_eq!(dimensions(&crops[0]).unwrap(), (10, 5));
        let second = decode(&crops[1]).unwrap().to_rgb8();
        assert_eq!(second.get_pixel(0, 0).0, [20, 15, 0]);
        assert!(crop_regions(&bytes, &[PixelRect { x: 25, y: 0, w: 10, h: 5 }]).is_err());
    }

    #[test]
    fn rejects_truncated_and_foreign_bytes() {
        let bytes = png(8, 8);
        assert!(matches!(decode(&bytes[..bytes.len() / 2]), Err(ProviderError::UndecodableImage(_))));
        assert!(matches!(decode(b"GIF89a......"), Err(ProviderError::UndecodableImage(_))));
        assert!(matches!(decode(b""), Err(ProviderError::UndecodableImage(_))));
    }

    #[test]
    fn text_and_rects_are_clipped() {
        let mut img = RgbImage::new(10, 10);
        draw_text(&mut img, 8, 8, 2, "hello", [255, 255, 255]);
        stroke_rect(&mut img, PixelRect { x: -5, y: -5, w: 30, h: 30 }, 2, [1, 2, 3]);
        fill_rect(&mut img, PixelRect { x: 2, y: 2, w: 2, h: 2 }, [9, 9, 9]);
        assert_eq!(img.get_pixel(3, 3).0, [9, 9, 9]);
    }
}
