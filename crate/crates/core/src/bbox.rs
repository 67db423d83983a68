//! Axis-aligned boxes in fractional canvas units (top-left origin).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

/// Smallest width/height a clamped box may shrink to.
pub const MIN_EXTENT: f64 = 1e-3;

/// Box as fractions of the canvas side: `x`, `y` are the top-left corner,
/// `w`, `h` the extent.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BBox<T = f64> {
    pub x: T,
    pub y: T,
    pub w: T,
    pub h: T,
}

/// Integer pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelRect {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

/// The first box predicate that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BBoxViolation {
    NonFinite,
    NegativeX,
    NegativeY,
    NonPositiveWidth,
    NonPositiveHeight,
    OverflowX,
    OverflowY,
}

impl BBoxViolation {
    pub fn predicate(self) -> &'static str {
        match self {
            BBoxViolation::NonFinite => "non-finite component",
            BBoxViolation::NegativeX => "x<0",
            BBoxViolation::NegativeY => "y<0",
            BBoxViolation::NonPositiveWidth => "w<=0",
            BBoxViolation::NonPositiveHeight => "h<=0",
            BBoxViolation::OverflowX => "x+w>1",
            BBoxViolation::OverflowY => "y+h>1",
        }
    }
}

impl fmt::Display for BBoxViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.predicate())
    }
}

impl std::error::Error for BBoxViolation {}

impl<T: Scalar> BBox<T> {
    pub fn new(x: T, y: T, w: T, h: T) -> Self {
        Self { x, y, w, h }
    }

    /// Full-canvas box.
    pub fn unit() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::one())
    }

    pub fn from_array([x, y, w, h]: [T; 4]) -> Self {
        Self { x, y, w, h }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.x, self.y, self.w, self.h]
    }

    pub fn right(&self) -> T {
        self.x + self.w
    }

    pub fn bottom(&self) -> T {
        self.y + self.h
    }

    /// Area from the corner coordinates, so that a box intersected with itself
    /// yields exactly its own area.
    pub fn area(&self) -> T {
        (self.right() - self.x) * (self.bottom() - self.y)
    }

    pub fn center(&self) -> (T, T) {
        let two = T::lit(2.0);
        (self.x + self.w / two, self.y + self.h / two)
    }

    /// Checks the box invariants in a fixed order and reports the first
    /// failing predicate.
    pub fn validate(&self) -> Result<(), BBoxViolation> {
        let slack = T::boundary_slack();
        if !(self.x.is_finite() && self.y.is_finite() && self.w.is_finite() && self.h.is_finite())
        {
            return Err(BBoxViolation::NonFinite);
        }
        if self.x < T::zero() {
            return Err(BBoxViolation::NegativeX);
        }
        if self.y < T::zero() {
            return Err(BBoxViolation::NegativeY);
        }
        if self.w <= T::zero() {
            return Err(BBoxViolation::NonPositiveWidth);
        }
        if self.h <= T::zero() {
            return Err(BBoxViolation::NonPositiveHeight);
        }
        if self.x + self.w > T::one() + slack {
            return Err(BBoxViolation::OverflowX);
        }
        if self.y + self.h > T::one() + slack {
            return Err(BBoxViolation::OverflowY);
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Clamps the extent into `[MIN_EXTENT, 1]` and then shifts the corner
    /// into `[0, 1 - extent]`. Size is preserved whenever it fits; used by the
    /// layout variator after jittering.
    pub fn clamp_shift(self) -> Self {
        let min = T::lit(MIN_EXTENT);
        let w = clamp(self.w, min, T::one());
        let h = clamp(self.h, min, T::one());
        let x = clamp(self.x, T::zero(), T::one() - w);
        let y = clamp(self.y, T::zero(), T::one() - h);
        Self { x, y, w, h }
    }

    /// Fits a box that may hang off the canvas. Parts outside the canvas are
    /// cropped away; a box lying entirely past the far edge keeps its size
    /// and is shifted back inside instead. Returns the fitted box and whether
    /// anything changed, or `None` for non-finite input.
    pub fn fit_to_canvas(self) -> Option<(Self, bool)> {
        if !(self.x.is_finite() && self.y.is_finite() && self.w.is_finite() && self.h.is_finite())
        {
            return None;
        }
        let (x, w) = fit_axis(self.x, self.w);
        let (y, h) = fit_axis(self.y, self.h);
        let fitted = Self { x, y, w, h };
        Some((fitted, fitted != self))
    }
}

fn clamp<T: Scalar>(v: T, lo: T, hi: T) -> T {
    if v < lo {
        lo
    } else if v > hi {
        hi
    } else {
        v
    }
}

fn fit_axis<T: Scalar>(pos: T, extent: T) -> (T, T) {
    let min = T::lit(MIN_EXTENT);
    let one = T::one();
    let slack = T::boundary_slack();
    let mut ext = clamp(extent, min, one);
    let mut pos = pos;
    if pos < T::zero() {
        let visible = ext + pos;
        if visible >= min {
            ext = visible;
        }
        pos = T::zero();
    }
    if pos + ext > one + slack {
        if pos <= one - min {
            ext = one - pos;
        } else {
            pos = one - ext;
        }
    }
    (pos, ext)
}

/// Converts a pixel rectangle to fractions of a square canvas, then fits it
/// to the canvas (see [`BBox::fit_to_canvas`]).
pub fn px_to_frac<T: Scalar>(rect: PixelRect, canvas_px: u32) -> Result<BBox<T>> {
    px_to_frac_flagged(rect, canvas_px).map(|(b, _)| b)
}

/// As [`px_to_frac`], also reporting whether fitting changed the box.
pub fn px_to_frac_flagged<T: Scalar>(rect: PixelRect, canvas_px: u32) -> Result<(BBox<T>, bool)> {
    if canvas_px == 0 {
        return Err(CoreError::invalid("canvas_px must be positive"));
    }
    let side = T::from_px(canvas_px as i64);
    let raw = BBox::new(
        T::from_px(rect.x) / side,
        T::from_px(rect.y) / side,
        T::from_px(rect.w) / side,
        T::from_px(rect.h) / side,
    );
    raw.fit_to_canvas()
        .ok_or_else(|| CoreError::invalid("pixel box is not finite"))
}

/// Rounds each fractional component to the nearest pixel.
pub fn frac_to_px<T: Scalar>(b: &BBox<T>, canvas_px: u32) -> PixelRect {
    let side = canvas_px as f64;
    let px = |v: T| (v.as_f64() * side).round() as i64;
    PixelRect {
        x: px(b.x),
        y: px(b.y),
        w: px(b.w),
        h: px(b.h),
    }
}
