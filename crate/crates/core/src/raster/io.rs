use std::fs::File;
use std::io::{BufWriter, ErrorKind};
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageError, ImageFormat, ImageReader};

use super::{BinaryImage, GrayImage};
use crate::error::{Error, Result};

/// Loads an image as 8-bit gray.
///
/// Color inputs are converted with BT.601 luma weights and rounded half-up.
/// 8-bit gray inputs pass through unchanged.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let reader = ImageReader::open(path)?
        .with_guessed_format()
        .map_err(Error::Io)?;
    if reader.format().is_none() {
        return Err(Error::UnsupportedFormat(path.display().to_string()));
    }
    let decoded = reader.decode().map_err(|e| map_decode_error(e, path))?;
    to_gray(decoded)
}

fn to_gray(decoded: DynamicImage) -> Result<GrayImage> {
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let data = match decoded {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0]).collect(),
        img @ (DynamicImage::ImageLuma16(_) | DynamicImage::ImageLumaA16(_)) => img.to_luma8().into_raw(),
        img => img.to_rgb8().pixels().map(|p| luma(p.0)).collect(),
    };
    GrayImage::new(width, height, data)
}

/// `0.299 R + 0.587 G + 0.114 B`, rounded half-up, in exact integer arithmetic.
#[inline]
pub(crate) fn luma([r, g, b]: [u8; 3]) -> u8 {
    let weighted = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((weighted + 500) / 1000) as u8
}

fn map_decode_error(err: ImageError, path: &Path) -> Error {
    match err {
        ImageError::Unsupported(e) => Error::UnsupportedFormat(format!("{}: {e}", path.display())),
        ImageError::IoError(e) if e.kind() == ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        ImageError::IoError(e) if e.kind() != ErrorKind::UnexpectedEof => Error::Io(e),
        other => Error::CorruptImage(format!("{}: {other}", path.display())),
    }
}

/// Writes a binary image with foreground as 0 and background as 255.
/// The format follows the file extension.
pub fn save_binary(img: &BinaryImage, path: impl AsRef<Path>) -> Result<()> {
    save_gray(&img.to_gray(), path)
}

pub fn save_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = ImageFormat::from_path(path)
        .map_err(|_| Error::UnsupportedFormat(path.display().to_string()))?;
    let (w, h) = (img.width() as u32, img.height() as u32);
    let mut out = BufWriter::new(File::create(path)?);
    let result = match format {
        ImageFormat::Png => PngEncoder::new(&mut out).write_image(img.as_raw(), w, h, ExtendedColorType::L8),
        ImageFormat::Pnm => PnmEncoder::new(&mut out)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(img.as_raw(), w, h, ExtendedColorType::L8),
        ImageFormat::Bmp | ImageFormat::Tiff => {
            drop(out);
            image::save_buffer_with_format(path, img.as_raw(), w, h, ExtendedColorType::L8, format)
        }
        other => return Err(Error::UnsupportedFormat(format!("{other:?}"))),
    };
    result.map_err(|e| match e {
        ImageError::IoError(io) => Error::Io(io),
        other => Error::UnsupportedFormat(other.to_string()),
    })
}
