use serde::{Deserialize, Serialize};

use crate::bbox::PixelRect;
use crate::error::{CoreError, Result};

/// Regions to caption: the nine cells of a 3x3 grid in row-major order, then
/// the whole image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropPlan {
    pub regions: Vec<PixelRect>,
}

impl CropPlan {
    pub fn cells(&self) -> &[PixelRect] {
        &self.regions[..9]
    }

    pub fn full_frame(&self) -> PixelRect {
        self.regions[9]
    }
}

/// Cells are `floor(W/3)` wide (`floor(H/3)` tall); the last column and row
/// absorb the remainder.
pub fn plan_grid_crops(width_px: u32, height_px: u32) -> Result<CropPlan> {
    if width_px < 3 || height_px < 3 {
        return Err(CoreError::invalid(format!(
            "image must be at least 3x3 pixels, got {width_px}x{height_px}"
        )));
    }
    let spans = |total: u32| -> [(i64, i64); 3] {
        let step = (total / 3) as i64;
        let total = total as i64;
        [(0, step), (step, step), (2 * step, total - 2 * step)]
    };
    let cols = spans(width_px);
    let rows = spans(height_px);
    let mut regions = Vec::with_capacity(10);
    for &(y, h) in &rows {
        for &(x, w) in &cols {
            regions.push(PixelRect { x, y, w, h });
        }
    }
    regions.push(PixelRect {
        x: 0,
        y: 0,
        w: width_px as i64,
        h: height_px as i64,
    });
    Ok(CropPlan { regions })
}
