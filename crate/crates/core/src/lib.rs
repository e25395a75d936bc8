//! Maximal spacelike hypersurfaces in Robertson-Walker spacetimes with flat fiber.
//!
//! * [`expr`]: warping-function expressions and second-order jets.
//! * [`warp`]: the spacetime `I ×_f ℝⁿ`, energy conditions, criterion infima and classification.
//! * [`hypersurface`]: discrete geometry of spacelike graphs `t = u(x)`.
//! * [`catalog`]: named spacetimes with their expected classification.

pub mod catalog;
pub mod expr;
pub mod hypersurface;
pub mod warp;
