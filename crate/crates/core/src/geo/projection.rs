use serde::{Deserialize, Serialize};

/// Sphere radius used by the local equirectangular frame (WGS84 semi-major axis).
pub const EARTH_RADIUS_M: f64 = 6_378_137.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Self {
        LatLon { lat, lon }
    }

    pub fn is_valid(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }
}

/// Planar coordinates in meters, relative to a region origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Xy {
    pub x: f64,
    pub y: f64,
}

impl Xy {
    pub fn new(x: f64, y: f64) -> Self {
        Xy { x, y }
    }

    pub fn dist2(&self, other: &Xy) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Xy) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// Equirectangular projection about `origin`.
pub fn project(lat: f64, lon: f64, origin: LatLon) -> Xy {
    let k = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
    Xy {
        x: k * (lon - origin.lon) * origin.lat.to_radians().cos(),
        y: k * (lat - origin.lat),
    }
}

/// Inverse of [`project`]. Undefined at the poles.
pub fn unproject(p: Xy, origin: LatLon) -> LatLon {
    let k = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
    LatLon {
        lat: origin.lat + p.y / k,
        lon: origin.lon + p.x / (k * origin.lat.to_radians().cos()),
    }
}
