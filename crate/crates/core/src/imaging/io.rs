//! Lossless codecs: 8-bit PNG (gray / RGB) and binary PGM (P5) / PPM (P6).

use std::fs;
use std::io::Cursor;
use std::path::Path;

use super::ImageBuffer;
use crate::error::{Error, Result};

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    /// PGM for gray images, PPM for RGB.
    Pnm,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "png" => Ok(ImageFormat::Png),
            "ppm" | "pgm" | "pnm" => Ok(ImageFormat::Pnm),
            _ => Err(Error::Unsupported(format!("file extension of {}", path.display()))),
        }
    }
}

/// Whether `path` has an extension this module can read.
pub fn is_image_path(path: &Path) -> bool {
    ImageFormat::from_path(path).is_ok()
}

/// Reads an image, detecting the format from the file contents.
pub fn read_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes, path)
}

/// Decodes an in-memory image; `origin` is only used in error messages.
pub fn decode_image(bytes: &[u8], origin: &Path) -> Result<ImageBuffer> {
    if bytes.starts_with(PNG_SIGNATURE) {
        decode_png(bytes, origin)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        decode_pnm(bytes, origin)
    } else if bytes.len() < PNG_SIGNATURE.len() && PNG_SIGNATURE.starts_with(bytes) {
        Err(Error::corrupt(origin, "truncated PNG signature"))
    } else {
        Err(Error::Unsupported(format!("unrecognized image data in {}", origin.display())))
    }
}

/// Writes `img` in the format implied by the extension of `path`.
pub fn write_image(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext_is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let bytes = match ImageFormat::from_path(path)? {
        ImageFormat::Png => encode_png(img)?,
        ImageFormat::Pnm => {
            if ext_is_pgm && img.channels() != 1 {
                return Err(Error::Unsupported(format!(
                    "{} is PGM but the image has {} channels",
                    path.display(),
                    img.channels()
                )));
            }
            encode_pnm(img)
        }
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn encode_png(img: &ImageBuffer) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        encoder.set_color(match img.channels() {
            1 => png::ColorType::Grayscale,
            _ => png::ColorType::Rgb,
        });
        encoder.set_depth(png::BitDepth::Eight);
        let encode_err = |e: png::EncodingError| Error::Unsupported(format!("PNG encoding failed: {e}"));
        let mut writer = encoder.write_header().map_err(encode_err)?;
        writer.write_image_data(img.data()).map_err(encode_err)?;
        writer.finish().map_err(encode_err)?;
    }
    Ok(out)
}

fn decode_png(bytes: &[u8], origin: &Path) -> Result<ImageBuffer> {
    let decode_err = |e: png::DecodingError| match e {
        png::DecodingError::LimitsExceeded => Error::Unsupported(format!("{}: PNG too large", origin.display())),
        other => Error::corrupt(origin, other.to_string()),
    };
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(decode_err)?;
    let (color, depth) = reader.output_color_type();
    if depth != png::BitDepth::Eight {
        return Err(Error::Unsupported(format!(
            "{}: {depth:?} PNG, only 8-bit is supported",
            origin.display()
        )));
    }
    let channels = match color {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => {
            return Err(Error::Unsupported(format!(
                "{}: {other:?} PNG, only gray and RGB are supported",
                origin.display()
            )))
        }
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Unsupported(format!("{}: PNG too large", origin.display())))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(decode_err)?;
    buf.truncate(info.buffer_size());
    ImageBuffer::new(info.width as usize, info.height as usize, channels, buf)
}

pub fn encode_pnm(img: &ImageBuffer) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Option<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).ok()?.parse().ok()
    }
}

fn decode_pnm(bytes: &[u8], origin: &Path) -> Result<ImageBuffer> {
    let channels = if bytes[1] == b'5' { 1 } else { 3 };
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let bad_header = || Error::corrupt(origin, "malformed PNM header");
    let width = cur.number().ok_or_else(bad_header)?;
    let height = cur.number().ok_or_else(bad_header)?;
    let maxval = cur.number().ok_or_else(bad_header)?;
    if maxval != 255 {
        return Err(Error::Unsupported(format!(
            "{}: PNM maxval {maxval}, only 8-bit (255) is supported",
            origin.display()
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(bad_header()),
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(bad_header)?;
    let raster = &bytes[cur.pos..];
    if raster.len() < expected {
        return Err(Error::corrupt(
            origin,
            format!("raster has {} of {expected} bytes", raster.len()),
        ));
    }
    ImageBuffer::new(width, height, channels, raster[..expected].to_vec())
        .map_err(|e| Error::corrupt(origin, e.to_string()))
}
