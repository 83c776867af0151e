//! Netpbm grayscale/color reading and grayscale writing (maxval 255 only).

use std::fmt;

use super::{GrayImage, ImageError};

/// Output encoding for [`write_pgm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmFormat {
    /// ASCII `P2`.
    Plain,
    /// Binary `P5`.
    #[default]
    Raw,
}

impl fmt::Display for PgmFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PgmFormat::Plain => "p2",
            PgmFormat::Raw => "p5",
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, offset: usize, message: impl Into<String>) -> ImageError {
        ImageError::Parse {
            offset,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next decimal token and the offset it starts at.
    fn number(&mut self, what: &str) -> Result<(u32, usize), ImageError> {
        self.skip_separators();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.bytes.get(self.pos) {
                None => self.err(start, format!("unexpected end of file, expected {what}")),
                Some(_) => self.err(start, format!("expected {what}")),
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map(|v| (v, start))
            .ok_or_else(|| self.err(start, format!("{what} is too large")))
    }
}

/// Parses a `P2`, `P3`, `P5` or `P6` file.
///
/// Color images are reduced to luminance `0.299 R + 0.587 G + 0.114 B`,
/// rounded half up.
pub fn load_image(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let mut r = Reader { bytes, pos: 0 };
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(r.err(0, "missing Netpbm magic number"));
    }
    let (binary, channels) = match bytes[1] {
        b'2' => (false, 1),
        b'3' => (false, 3),
        b'5' => (true, 1),
        b'6' => (true, 3),
        _ => return Err(r.err(1, "unsupported Netpbm variant (expected P2, P3, P5 or P6)")),
    };
    r.pos = 2;

    let (width, width_at) = r.number("width")?;
    let (height, _) = r.number("height")?;
    if width == 0 || height == 0 {
        return Err(r.err(width_at, "image dimensions must be positive"));
    }
    let (maxval, maxval_at) = r.number("maxval")?;
    if maxval != 255 {
        return Err(r.err(maxval_at, format!("maxval must be 255, got {maxval}")));
    }

    let pixels = width as usize * height as usize;
    let samples = pixels * channels;
    let raw: Vec<u8> = if binary {
        match bytes.get(r.pos) {
            Some(b) if b.is_ascii_whitespace() => r.pos += 1,
            Some(_) => return Err(r.err(r.pos, "expected whitespace after maxval")),
            None => return Err(r.err(r.pos, "unexpected end of file before raster")),
        }
        let end = r.pos + samples;
        if bytes.len() < end {
            return Err(r.err(
                bytes.len(),
                format!(
                    "truncated raster: expected {samples} bytes, found {}",
                    bytes.len() - r.pos
                ),
            ));
        }
        bytes[r.pos..end].to_vec()
    } else {
        let mut out = Vec::with_capacity(samples);
        for _ in 0..samples {
            let (v, at) = r.number("sample")?;
            if v > 255 {
                return Err(r.err(at, format!("sample {v} exceeds maxval 255")));
            }
            out.push(v as u8);
        }
        out
    };

    let pixels = if channels == 1 {
        raw
    } else {
        raw.chunks_exact(3)
            .map(|c| luminance(c[0], c[1], c[2]))
            .collect()
    };
    GrayImage::new(width as usize, height as usize, pixels)
}

/// BT.601 luma in integer thousandths, rounded half up.
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    let weighted = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((weighted + 500) / 1000).min(255) as u8
}

/// Serializes `img` as PGM with maxval 255.
pub fn write_pgm(img: &GrayImage, format: PgmFormat) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    match format {
        PgmFormat::Raw => {
            let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
            out.extend_from_slice(img.pixels());
            out
        }
        PgmFormat::Plain => {
            let mut out = format!("P2\n{w} {h}\n255\n");
            // Plain PNM lines must stay within 70 characters.
            for row in img.pixels().chunks(w) {
                let mut line_len = 0;
                for &p in row {
                    let token = p.to_string();
                    if line_len > 0 && line_len + 1 + token.len() > 70 {
                        out.push('\n');
                        line_len = 0;
                    }
                    if line_len > 0 {
                        out.push(' ');
                        line_len += 1;
                    }
                    out.push_str(&token);
                    line_len += token.len();
                }
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}
