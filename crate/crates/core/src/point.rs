use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when testing membership of the closed cylinder.
pub const DOMAIN_TOL: f64 = 1e-12;

/// A point of the rectangular cylinder `D x [-1, 1]`.
///
/// One- and two-dimensional meshes embed into this type with the unused
/// coordinates set to zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Point given in cylindrical coordinates; `r` may be negative.
    pub fn cylindrical(r: f64, theta: f64, z: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(r * c, r * s, z)
    }

    pub fn radius_squared(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn in_cylinder(&self) -> bool {
        self.radius_squared() <= 1.0 + DOMAIN_TOL && self.z.abs() <= 1.0 + DOMAIN_TOL
    }

    pub fn check_in_cylinder(&self) -> Result<()> {
        if self.in_cylinder() {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                x: self.x,
                y: self.y,
                z: self.z,
            })
        }
    }
}

impl From<[f64; 3]> for Point3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Self::new(x, y, z)
    }
}
