//! 8-bit RGB image files.

use std::path::Path;

use anyhow::{Context, Result};
use ganilla_core::image::RawImage;

pub const EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

pub fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

pub fn read_image(path: &Path) -> Result<RawImage> {
    let img = image::open(path)
        .with_context(|| format!("cannot read image {}", path.display()))?
        .into_rgb8();
    let (w, h) = img.dimensions();
    RawImage::new(w as usize, h as usize, img.into_raw())
        .with_context(|| format!("degenerate image {}", path.display()))
}

pub fn write_png(path: &Path, img: &RawImage) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    image::save_buffer_with_format(
        path,
        img.pixels(),
        img.width() as u32,
        img.height() as u32,
        image::ExtendedColorType::Rgb8,
        image::ImageFormat::Png,
    )
    .with_context(|| format!("cannot write {}", path.display()))
}

/// Images placed side by side in rows; rows are padded with black.
pub fn grid(rows: &[Vec<RawImage>]) -> Option<RawImage> {
    let first = rows.iter().flatten().next()?;
    let (tw, th) = (first.width(), first.height());
    let cols = rows.iter().map(Vec::len).max()?;
    let (w, h) = (cols * tw, rows.len() * th);
    let mut px = vec![0u8; w * h * 3];
    for (r, row) in rows.iter().enumerate() {
        for (c, img) in row.iter().enumerate() {
            for y in 0..img.height().min(th) {
                for x in 0..img.width().min(tw) {
                    let o = ((r * th + y) * w + c * tw + x) * 3;
                    px[o..o + 3].copy_from_slice(&img.get(x, y));
                }
            }
        }
    }
    RawImage::new(w, h, px).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let img = RawImage::from_fn(5, 3, |x, y| [x as u8 * 40, y as u8 * 70, 9]);
        let p = dir.path().join("a/b.png");
        write_png(&p, &img).unwrap();
        assert_eq!(read_image(&p).unwrap(), img);
    }

    #[test]
    fn grid_places_tiles() {
        let a = RawImage::from_fn(2, 2, |_, _| [1, 1, 1]);
        let b = RawImage::from_fn(2, 2, |_, _| [2, 2, 2]);
        let g = grid(&[vec![a.clone(), b], vec![a]]).unwrap();
        assert_eq!((g.width(), g.height()), (4, 4));
        assert_eq!(g.get(3, 0), [2, 2, 2]);
        assert_eq!(g.get(3, 3), [0, 0, 0]);
    }

    #[test]
    fn extension_filter() {
        assert!(is_image(Path::new("x/y.PNG")));
        assert!(is_image(Path::new("y.jpeg")));
        assert!(!is_image(Path::new("labels.csv")));
    }
}
