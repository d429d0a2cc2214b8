//! Sketch input container and grayscale raster codec.

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::ExtractError;
use crate::Point;

/// Grayscale image, row-major, 0 = black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gray {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Gray {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        Self {
            width,
            height,
            data: vec![fill; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }

    /// Binary PGM (P5) bytes.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_pgm(bytes: &[u8]) -> Result<Self, ExtractError> {
        let bad = |m: &str| ExtractError::Bundle(format!("bad PGM: {m}"));
        // header: magic, width, height, maxval separated by whitespace, with
        // optional # comments, then one whitespace byte
        let mut fields = Vec::new();
        let mut i = 0;
        while fields.len() < 4 {
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            let start = i;
            while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if start == i {
                return Err(bad("truncated header"));
            }
            fields.push(std::str::from_utf8(&bytes[start..i]).map_err(|_| bad("header is not text"))?.to_string());
        }
        i += 1;
        if fields[0] != "P5" {
            return Err(bad("not P5"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad("non-numeric header"));
        let (w, h, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
        if maxval == 0 || maxval > 255 {
            return Err(bad("only 8-bit images are supported"));
        }
        let data = bytes.get(i..i + w * h).ok_or_else(|| bad("pixel data truncated"))?;
        let data = if maxval == 255 {
            data.to_vec()
        } else {
            data.iter().map(|&v| ((v as usize * 255) / maxval) as u8).collect()
        };
        Ok(Self {
            width: w,
            height: h,
            data,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterDoc {
    pub width: usize,
    pub height: usize,
    pub encoding: String,
    pub data: String,
}

impl RasterDoc {
    pub const ENCODING: &'static str = "pgm-p5-base64";

    pub fn encode(img: &Gray) -> Self {
        Self {
            width: img.width,
            height: img.height,
            encoding: Self::ENCODING.into(),
            data: B64.encode(img.to_pgm()),
        }
    }

    pub fn decode(&self) -> Result<Gray, ExtractError> {
        if self.encoding != Self::ENCODING {
            return Err(ExtractError::Bundle(format!("unsupported raster encoding {:?}", self.encoding)));
        }
        if self.width == 0 || self.height == 0 {
            return Err(ExtractError::Bundle("raster width and height must be positive".into()));
        }
        let bytes = B64
            .decode(self.data.as_bytes())
            .map_err(|e| ExtractError::Bundle(format!("raster data is not base64: {e}")))?;
        let img = Gray::from_pgm(&bytes)?;
        if img.width != self.width || img.height != self.height {
            return Err(ExtractError::Bundle(format!(
                "raster header says {}x{}, image is {}x{}",
                self.width, self.height, img.width, img.height
            )));
        }
        Ok(img)
    }
}

/// A dimension line: the pixel distance between `p1` and `p2` is `length` feet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionCallout {
    pub p1: Point,
    pub p2: Point,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelClass {
    Door,
    Window,
    Room,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMark {
    pub p: Point,
    pub class: LabelClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width_hint: Option<f64>,
}

/// Everything the extractor reads. Pixel coordinates have x to the right
/// and y down.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SketchBundle {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raster: Option<RasterDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strokes: Option<Vec<Vec<Point>>>,
    #[serde(default)]
    pub callouts: Vec<DimensionCallout>,
    #[serde(default)]
    pub labels: Vec<LabelMark>,
    #[serde(default)]
    pub swings: Vec<Vec<Point>>,
    /// Pixel that maps to world (0, 0). Defaults to the bottom-left corner
    /// of the raster, or of the stroke extents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Point>,
}

impl SketchBundle {
    pub fn from_json(text: &str) -> Result<Self, ExtractError> {
        serde_json::from_str(text).map_err(|e| ExtractError::Bundle(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundles serialize")
    }
}
