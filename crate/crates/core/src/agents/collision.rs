use crate::error::{Error, Result};
use crate::model::{Arena, Vec2};

/// Specular reflection of a direction about the plane with unit normal `nu`:
/// `theta - 2 (theta . nu) nu`.
pub fn elastic_collision(theta: Vec2, nu: Vec2) -> Result<Vec2> {
    let norm = nu.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitNormal { norm });
    }
    Ok(theta - nu * (2.0 * theta.dot(nu)))
}

/// Mirrors a position that overshot a wall of `bounds` back inside and
/// negates the matching heading component. Corners flip both components.
pub fn reflect_wall(pos: Vec2, heading: Vec2, bounds: &Arena) -> (Vec2, Vec2) {
    let (x, hx) = reflect_axis(pos.x, heading.x, bounds.x_min, bounds.x_max);
    let (y, hy) = reflect_axis(pos.y, heading.y, bounds.y_min, bounds.y_max);
    (Vec2::new(x, y), Vec2::new(hx, hy))
}

fn reflect_axis(mut x: f64, mut h: f64, lo: f64, hi: f64) -> (f64, f64) {
    // overshoots longer than the box width fold repeatedly
    for _ in 0..64 {
        if x > hi {
            x = 2.0 * hi - x;
            h = -h;
        } else if x < lo {
            x = 2.0 * lo - x;
            h = -h;
        } else {
            break;
        }
    }
    (x.clamp(lo, hi), h)
}
