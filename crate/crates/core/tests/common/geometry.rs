//! Geometry oracles: Monte-Carlo IoU and random layout generators.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use recomb_core::BBox;

pub fn random_box(rng: &mut ChaCha8Rng) -> BBox {
    let w = rng.random_range(0.05..0.9);
    let h = rng.random_range(0.05..0.9);
    let x = rng.random_range(0.0..1.0 - w);
    let y = rng.random_range(0.0..1.0 - h);
    BBox::new(x, y, w, h)
}

pub fn inside(b: &BBox, px: f64, py: f64) -> bool {
    px >= b.x && px < b.x + b.w && py >= b.y && py < b.y + b.h
}

/// Estimates IoU by sampling points uniformly over the unit square.
pub fn monte_carlo_iou(a: &BBox, b: &BBox, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let (mut both, mut either) = (0u64, 0u64);
    for _ in 0..samples {
        let (px, py) = (rng.random::<f64>(), rng.random::<f64>());
        let (ia, ib) = (inside(a, px, py), inside(b, px, py));
        both += (ia && ib) as u64;
        either += (ia || ib) as u64;
    }
    if either == 0 {
        0.0
    } else {
        both as f64 / either as f64
    }
}

/// Boxes placed in distinct cells of a grid, so no two share a centroid.
pub fn separated_layout(rng: &mut ChaCha8Rng) -> Vec<BBox> {
    let n = rng.random_range(1..=10);
    let mut cells: Vec<usize> = (0..16).collect();
    for i in (1..cells.len()).rev() {
        cells.swap(i, rng.random_range(0..=i));
    }
    cells[..n]
        .iter()
        .map(|&c| {
            let (col, row) = ((c % 4) as f64, (c / 4) as f64);
            let w = rng.random_range(0.02..0.25);
            let h = rng.random_range(0.02..0.25);
            let x = col * 0.25 + rng.random_range(0.0..0.25 - w);
            let y = row * 0.25 + rng.random_range(0.0..0.25 - h);
            BBox::new(x, y, w, h)
        })
        .collect()
}

