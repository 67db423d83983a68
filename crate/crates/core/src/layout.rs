//! Bounding-box layout math: overlap and distance measures, the layout
//! similarity score, the layout variator and arrangement selection.

use std::cmp::Ordering;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bbox::BBox;
use crate::error::{CoreError, Result};
use crate::scalar::Scalar;
use crate::DEFAULT_CANVAS_PX;

/// Most boxes kept from one reference image.
pub const MAX_ARRANGEMENT_BOXES: usize = 10;

/// Compositional structure of one reference image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arrangement<T = f64> {
    pub id: String,
    pub source_image: String,
    pub canvas_px: u32,
    pub boxes: Vec<BBox<T>>,
}

impl<T: Scalar> Arrangement<T> {
    pub fn new(
        id: impl Into<String>,
        source_image: impl Into<String>,
        canvas_px: u32,
        boxes: Vec<BBox<T>>,
    ) -> Result<Self> {
        if boxes.is_empty() || boxes.len() > MAX_ARRANGEMENT_BOXES {
            return Err(CoreError::invalid(format!(
                "an arrangement holds 1..={MAX_ARRANGEMENT_BOXES} boxes, got {}",
                boxes.len()
            )));
        }
        if canvas_px == 0 {
            return Err(CoreError::invalid("canvas_px must be positive"));
        }
        for (i, b) in boxes.iter().enumerate() {
            b.validate()
                .map_err(|v| CoreError::invalid(format!("box {i}: {v}")))?;
        }
        Ok(Self {
            id: id.into(),
            source_image: source_image.into(),
            canvas_px,
            boxes,
        })
    }
}

/// A segment box with its prominence score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredSegment<T = f64> {
    pub bbox: BBox<T>,
    pub score: T,
}

impl<T: Scalar> ScoredSegment<T> {
    pub fn new(bbox: BBox<T>, score: T) -> Result<Self> {
        if !score.is_finite() || score < T::zero() {
            return Err(CoreError::invalid(format!(
                "segment score must be finite and non-negative, got {score}"
            )));
        }
        bbox.validate()
            .map_err(|v| CoreError::invalid(format!("segment box: {v}")))?;
        Ok(Self { bbox, score })
    }

    /// Score for segmenters that only report masks: mask area scaled by the
    /// reported stability or confidence, 1 when absent.
    pub fn from_mask(bbox: BBox<T>, mask_area: T, stability: Option<T>) -> Result<Self> {
        Self::new(bbox, mask_area * stability.unwrap_or_else(T::one))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariatorParams {
    pub jitter_px: u32,
    pub canvas_px: u32,
    pub n_candidates: usize,
    pub top_k: usize,
    #[serde(default)]
    pub rng_seed: Option<u64>,
}

impl Default for VariatorParams {
    fn default() -> Self {
        Self {
            jitter_px: 50,
            canvas_px: DEFAULT_CANVAS_PX,
            n_candidates: 100,
            top_k: 5,
            rng_seed: None,
        }
    }
}

impl VariatorParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.canvas_px == 0 {
            return Err(CoreError::invalid("canvas_px must be positive"));
        }
        if self.top_k == 0 || self.n_candidates < self.top_k {
            return Err(CoreError::invalid(format!(
                "need n_candidates >= top_k >= 1, got {} and {}",
                self.n_candidates, self.top_k
            )));
        }
        Ok(())
    }
}

/// A candidate layout and its similarity to the layout it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedLayout<T = f64> {
    pub boxes: Vec<BBox<T>>,
    pub similarity: T,
}

/// Intersection over union; 0 for disjoint boxes.
pub fn iou<T: Scalar>(a: &BBox<T>, b: &BBox<T>) -> T {
    let iw = a.right().min(b.right()) - a.x.max(b.x);
    let ih = a.bottom().min(b.bottom()) - a.y.max(b.y);
    if iw <= T::zero() || ih <= T::zero() {
        return T::zero();
    }
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= T::zero() {
        return T::zero();
    }
    (inter / union).min(T::one())
}

/// Euclidean distance between box centers.
pub fn centroid_distance<T: Scalar>(a: &BBox<T>, b: &BBox<T>) -> T {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    (ax - bx).hypot(ay - by)
}

/// Pairs each candidate box with its nearest original box by centroid
/// distance (originals may be reused), min-max normalizes those distances
/// within this comparison and returns `sum(IoU) + sum(1 - normalized
/// distance)`. When all distances are equal every normalized distance is 0.
/// Range `[0, 2 * candidate.len()]`; higher is more similar.
pub fn layout_similarity<T: Scalar>(candidate: &[BBox<T>], original: &[BBox<T>]) -> Result<T> {
    if candidate.is_empty() || original.is_empty() {
        return Err(CoreError::invalid("layout_similarity needs two non-empty layouts"));
    }
    let pairs: Vec<(T, T)> = candidate
        .iter()
        .map(|c| {
            let (nearest, dist) = original
                .iter()
                .map(|o| (o, centroid_distance(c, o)))
                .fold(None::<(&BBox<T>, T)>, |best, (o, d)| match best {
                    Some((_, bd)) if bd <= d => best,
                    _ => Some((o, d)),
                })
                .expect("original is non-empty");
            (iou(c, nearest), dist)
        })
        .collect();

    let (lo, hi) = pairs.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &(_, d)| {
        (lo.min(d), hi.max(d))
    });
    let span = hi - lo;
    let total = pairs.iter().fold(T::zero(), |acc, &(overlap, d)| {
        let normalized = if span > T::zero() { (d - lo) / span } else { T::zero() };
        acc + overlap + (T::one() - normalized)
    });
    Ok(total)
}

/// Generates jittered, subsampled variants of an arrangement and returns the
/// `top_k` most similar to it, best first.
pub fn vary_arrangement<T: Scalar>(
    original: &Arrangement<T>,
    n_objects: usize,
    params: &VariatorParams,
) -> Result<Vec<RankedLayout<T>>> {
    vary_boxes(&original.boxes, n_objects, params)
}

/// [`vary_arrangement`] over a bare box list.
///
/// Each candidate jitters every component of every original box by an
/// integer pixel offset in `[-jitter_px, jitter_px]`, clamps the result back
/// onto the canvas and draws `n_objects` boxes: without replacement when
/// there are enough, with replacement otherwise (repeat draws get a second
/// jitter so they do not sit on top of each other).
pub fn vary_boxes<T: Scalar>(
    original: &[BBox<T>],
    n_objects: usize,
    params: &VariatorParams,
) -> Result<Vec<RankedLayout<T>>> {
    if n_objects == 0 {
        return Err(CoreError::invalid("n_objects must be at least 1"));
    }
    if original.is_empty() {
        return Err(CoreError::invalid("original layout is empty"));
    }
    params.validate()?;

    let mut rng = match params.rng_seed {
        Some(seed) => ChaCha8Rng::seed_from_u64(seed),
        None => ChaCha8Rng::from_rng(&mut rand::rng()),
    };
    let jitter = params.jitter_px as i64;
    let side = T::from_px(params.canvas_px as i64);

    let mut candidates = Vec::with_capacity(params.n_candidates);
    for _ in 0..params.n_candidates {
        let jittered: Vec<BBox<T>> = original
            .iter()
            .map(|b| jitter_box(b, jitter, side, &mut rng))
            .collect();
        let boxes = if n_objects <= jittered.len() {
            index::sample(&mut rng, jittered.len(), n_objects)
                .into_iter()
                .map(|i| jittered[i])
                .collect::<Vec<_>>()
        } else {
            let mut seen = vec![false; jittered.len()];
            (0..n_objects)
                .map(|_| {
                    let i = rng.random_range(0..jittered.len());
                    if std::mem::replace(&mut seen[i], true) {
                        jitter_box(&jittered[i], jitter, side, &mut rng)
                    } else {
                        jittered[i]
                    }
                })
                .collect()
        };
        let similarity = layout_similarity(&boxes, original)?;
        candidates.push(RankedLayout { boxes, similarity });
    }

    candidates.sort_by(|a, b| {
        b.similarity
            .partial_cmp(&a.similarity)
            .unwrap_or(Ordering::Equal)
    });
    candidates.truncate(params.top_k);
    Ok(candidates)
}

fn jitter_box<T: Scalar>(b: &BBox<T>, jitter: i64, side: T, rng: &mut ChaCha8Rng) -> BBox<T> {
    let mut offset = || {
        if jitter == 0 {
            T::zero()
        } else {
            T::from_px(rng.random_range(-jitter..=jitter)) / side
        }
    };
    let (dx, dy, dw, dh) = (offset(), offset(), offset(), offset());
    BBox::new(b.x + dx, b.y + dy, b.w + dw, b.h + dh).clamp_shift()
}

/// Keeps the ten most prominent segments: score descending, ties broken by
/// larger area, then input order.
pub fn select_arrangement<T: Scalar>(
    source_image: &str,
    canvas_px: u32,
    segments: &[ScoredSegment<T>],
) -> Result<Arrangement<T>> {
    if segments.is_empty() {
        return Err(CoreError::NoArrangement);
    }
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&segments[i], &segments[j]);
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                b.bbox
                    .area()
                    .partial_cmp(&a.bbox.area())
                    .unwrap_or(Ordering::Equal)
            })
            .then(i.cmp(&j))
    });
    let boxes = order
        .into_iter()
        .take(MAX_ARRANGEMENT_BOXES)
        .map(|i| segments[i].bbox)
        .collect();
    Arrangement::new(format!("arr-{source_image}"), source_image, canvas_px, boxes)
}
