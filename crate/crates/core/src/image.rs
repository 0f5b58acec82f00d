//! 8-bit grayscale images and their plain-text file formats.
//!
//! Two formats are supported for both reading and writing: plain PGM (`P2`)
//! and CSV with one image row per line and no header.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, QebError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Csv,
}

impl ImageFormat {
    /// Picks the format from a file extension (`.pgm` or `.csv`).
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("pgm") => Ok(ImageFormat::Pgm),
            Some("csv") => Ok(ImageFormat::Csv),
            _ => arg_err(format!("cannot infer image format of {}", path.display())),
        }
    }
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return arg_err(format!("image dimensions {rows}x{cols} must be positive"));
        }
        if pixels.len() != rows * cols {
            return arg_err(format!("{} pixels for a {rows}x{cols} image", pixels.len()));
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn filled(rows: usize, cols: usize, value: u8) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    /// Uniform random pixels in [0, 255], reproducible for a given seed.
    pub fn random(rows: usize, cols: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pixels = (0..rows * cols).map(|_| rng.random::<u8>()).collect();
        Self::new(rows, cols, pixels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Row-major pixel values.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.cols + col]
    }

    /// 255 - p for every pixel.
    pub fn inverted(&self) -> GrayImage {
        GrayImage {
            rows: self.rows,
            cols: self.cols,
            pixels: self.pixels.iter().map(|p| 255 - p).collect(),
        }
    }

    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n255\n", self.cols, self.rows);
        for row in self.pixels.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_pgm(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        if tokens.next() != Some("P2") {
            return Err(QebError::Parse("missing P2 magic".into()));
        }
        let mut header = [0usize; 3];
        for (slot, name) in header.iter_mut().zip(["width", "height", "maxval"]) {
            let tok = tokens
                .next()
                .ok_or_else(|| QebError::Parse(format!("missing {name}")))?;
            *slot = tok
                .parse()
                .map_err(|_| QebError::Parse(format!("bad {name} {tok:?}")))?;
        }
        let [cols, rows, maxval] = header;
        if maxval == 0 || maxval > 255 {
            return Err(QebError::Parse(format!("unsupported maxval {maxval}")));
        }
        let mut pixels = Vec::with_capacity(rows * cols);
        for tok in tokens {
            let v: usize = tok
                .parse()
                .map_err(|_| QebError::Parse(format!("bad pixel {tok:?}")))?;
            if v > maxval {
                return Err(QebError::Parse(format!(
                    "pixel {v} exceeds maxval {maxval}"
                )));
            }
            // rescale to the full 8-bit range
            pixels.push(((v * 255 + maxval / 2) / maxval) as u8);
        }
        if pixels.len() != rows * cols {
            return Err(QebError::Parse(format!(
                "expected {} pixels, found {}",
                rows * cols,
                pixels.len()
            )));
        }
        Self::new(rows, cols, pixels)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.pixels.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut pixels = Vec::new();
        let mut rows = 0;
        let mut cols = None;
        for record in reader.records() {
            let record = record?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            if *cols.get_or_insert(record.len()) != record.len() {
                return Err(QebError::Parse(format!(
                    "row {rows} has {} values",
                    record.len()
                )));
            }
            for field in record.iter() {
                let v: u8 = field
                    .parse()
                    .map_err(|_| QebError::Parse(format!("bad pixel {field:?}")))?;
                pixels.push(v);
            }
            rows += 1;
        }
        Self::new(rows, cols.unwrap_or(0), pixels)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        match ImageFormat::from_path(path) {
            Ok(ImageFormat::Pgm) => Self::parse_pgm(&text),
            Ok(ImageFormat::Csv) => Self::parse_csv(&text),
            Err(_) if text.trim_start().starts_with("P2") => Self::parse_pgm(&text),
            Err(_) => Self::parse_csv(&text),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let body = match ImageFormat::from_path(path)? {
            ImageFormat::Pgm => self.to_pgm(),
            ImageFormat::Csv => self.to_csv(),
        };
        fs::write(path, body)?;
        Ok(())
    }
}
