//! Content quality from object-detector confidences, gated on image
//! brightness.

use serde::{Deserialize, Serialize};

use crate::ingest::{DetectedObject, ImageRecord, StoredRecord};

pub const DEFAULT_BRIGHTNESS_THRESHOLD: f64 = 0.15;

/// Anything carrying a measured (or missing) mean brightness.
pub trait Brightness {
    fn brightness(&self) -> Option<f64>;

    /// Unmeasured images pass.
    fn passes_brightness(&self, threshold: f64) -> bool {
        self.brightness().is_none_or(|b| b >= threshold)
    }
}

impl Brightness for ImageRecord {
    fn brightness(&self) -> Option<f64> {
        self.brightness
    }
}

impl Brightness for StoredRecord {
    fn brightness(&self) -> Option<f64> {
        self.brightness
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContentScore {
    pub image_id: String,
    pub c: f64,
    pub object_count: usize,
    pub passed_brightness: bool,
}

/// Split into (kept, dropped) by measured brightness.
pub fn brightness_filter<T: Brightness>(records: &[T], threshold: f64) -> (Vec<&T>, Vec<&T>) {
    records.iter().partition(|r| r.passes_brightness(threshold))
}

/// Mean confidence of the detected objects; 0 for an image with none.
pub fn image_content_score(image_id: &str, objects: &[DetectedObject], passed_brightness: bool) -> ContentScore {
    let c = if objects.is_empty() {
        0.0
    } else {
        objects.iter().map(|o| o.confidence).sum::<f64>() / objects.len() as f64
    };
    ContentScore {
        image_id: image_id.to_string(),
        c,
        object_count: objects.len(),
        passed_brightness,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ContentAggregate {
    pub c_raw: f64,
    /// Images that passed the brightness gate and have detector output.
    pub n: usize,
}

/// Sum of per-image mean confidences over bright-enough images that have
/// detector output, accumulated in image-id order.
pub fn content_raw<'a, I>(records: I, threshold: f64) -> ContentAggregate
where
    I: IntoIterator<Item = &'a StoredRecord>,
{
    let mut scored: Vec<(&str, f64)> = records
        .into_iter()
        .filter(|r| r.passes_brightness(threshold))
        .filter_map(|r| {
            let objects = r.detections.as_deref()?;
            Some((r.id.as_str(), image_content_score(&r.id, objects, true).c))
        })
        .collect();
    scored.sort_unstable_by(|a, b| a.0.cmp(b.0));
    ContentAggregate {
        c_raw: scored.iter().map(|s| s.1).sum(),
        n: scored.len(),
    }
}
