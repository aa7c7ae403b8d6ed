use serde::{Deserialize, Serialize};

use super::{BodyError, ConvexBody};

/// The gauge blend `F_s = (1 - s)(|x|² - 1) + s F₁` joining the unit ball
/// (`s = 0`) to `end` (`s = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyPath {
    pub end: ConvexBody,
}

impl BodyPath {
    /// Builds the path and certifies convexity at `s = 0, 0.1, …, 1`.
    pub fn new(end: ConvexBody) -> Result<Self, BodyError> {
        for k in 0..=10 {
            let s = k as f64 / 10.0;
            if !end.blended(s).is_strictly_convex() {
                return Err(BodyError::PathConvexityFailure(s));
            }
        }
        Ok(BodyPath { end })
    }

    pub fn start(&self) -> ConvexBody {
        ConvexBody::ball()
    }

    pub fn eval(&self, s: f64) -> ConvexBody {
        if s == 0.0 {
            self.start()
        } else {
            self.end.blended(s)
        }
    }
}
