//! Asset footprints: identified ground polygons delimiting one asset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Optional descriptive attributes of an asset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AssetMetadata {
    pub length_m: Option<f64>,
    pub width_m: Option<f64>,
    pub asset_type: Option<String>,
}

/// A single asset delimited by one closed outer ring of (lon, lat) vertices.
///
/// Construction validates the ring: at least 4 vertices, first equals last,
/// finite coordinates, no zero-length edges and no intersection between
/// non-adjacent edges.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetFootprint {
    asset_id: String,
    ring: Vec<(f64, f64)>,
    metadata: Option<AssetMetadata>,
}

impl AssetFootprint {
    pub fn new(asset_id: impl Into<String>, ring: Vec<(f64, f64)>) -> Result<Self> {
        let asset_id = asset_id.into();
        validate_ring(&ring).map_err(|reason| Error::InvalidPolygon {
            asset_id: Some(asset_id.clone()),
            reason,
        })?;
        Ok(Self {
            asset_id,
            ring,
            metadata: None,
        })
    }

    pub fn with_metadata(mut self, metadata: AssetMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    /// Closed ring; the last vertex repeats the first.
    pub fn ring(&self) -> &[(f64, f64)] {
        &self.ring
    }

    pub fn metadata(&self) -> Option<&AssetMetadata> {
        self.metadata.as_ref()
    }

    /// Axis-aligned bounds as (min_lon, min_lat, max_lon, max_lat).
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let mut min_lon = f64::INFINITY;
        let mut min_lat = f64::INFINITY;
        let mut max_lon = f64::NEG_INFINITY;
        let mut max_lat = f64::NEG_INFINITY;
        for &(lon, lat) in &self.ring {
            min_lon = min_lon.min(lon);
            min_lat = min_lat.min(lat);
            max_lon = max_lon.max(lon);
            max_lat = max_lat.max(lat);
        }
        (min_lon, min_lat, max_lon, max_lat)
    }
}

fn validate_ring(ring: &[(f64, f64)]) -> std::result::Result<(), String> {
    if ring.len() < 4 {
        return Err(format!(
            "ring has {} vertices; a closed ring needs at least 4",
            ring.len()
        ));
    }
    if ring
        .iter()
        .any(|(lon, lat)| !lon.is_finite() || !lat.is_finite())
    {
        return Err("ring contains non-finite coordinates".to_string());
    }
    if ring[0] != ring[ring.len() - 1] {
        return Err("ring is not closed (first vertex must equal the last)".to_string());
    }
    let n = ring.len() - 1; // number of edges
    for i in 0..n {
        if ring[i] == ring[i + 1] {
            return Err(format!("zero-length edge at vertex {i}"));
        }
    }
    // Pairwise check on non-adjacent edges; adjacent edges legitimately share
    // a vertex. The first and last edges are adjacent through the closure
    // vertex.
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let a = (ring[i], ring[i + 1]);
            let b = (ring[j], ring[j + 1]);
            if segments_touch(a.0, a.1, b.0, b.1) {
                return Err(format!("edges {i} and {j} intersect"));
            }
        }
    }
    Ok(())
}

fn orientation(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> bool {
    orientation(a, b, p) == 0.0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

/// Any contact between two segments, proper crossing or collinear touch.
fn segments_touch(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let o1 = orientation(p1, p2, q1);
    let o2 = orientation(p1, p2, q2);
    let o3 = orientation(q1, q2, p1);
    let o4 = orientation(q1, q2, p2);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    on_segment(p1, p2, q1)
        || on_segment(p1, p2, q2)
        || on_segment(q1, q2, p1)
        || on_segment(q1, q2, p2)
}
