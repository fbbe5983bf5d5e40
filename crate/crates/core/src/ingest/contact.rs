//! Labeled thumbnail grids of consecutive slides.

use font8x8::{UnicodeFonts, BASIC_FONTS};
use image::imageops::{self, FilterType};
use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use super::{ExtractedSlide, IngestError};
use crate::windowing::WindowSpec;

pub const DEFAULT_CONTACT_COLUMNS: u32 = 4;
pub const DEFAULT_CELL_WIDTH: u32 = 320;

const GLYPH: u32 = 8;
const LABEL_PAD: u32 = 4;
const LABEL_SCALE: u32 = 2;
/// Height of the label band drawn beneath every cell.
pub const LABEL_BAND_HEIGHT: u32 = GLYPH * LABEL_SCALE + 2 * LABEL_PAD;

const BACKGROUND: Rgb<u8> = Rgb([255, 255, 255]);
const BAND: Rgb<u8> = Rgb([232, 232, 232]);
const INK: Rgb<u8> = Rgb([0, 0, 0]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellPlacement {
    pub slide_number: u32,
    pub row: u32,
    pub column: u32,
}

#[derive(Debug, Clone)]
pub struct ContactSheet {
    pub image: RgbImage,
    pub window: WindowSpec,
    pub cell_map: Vec<CellPlacement>,
    /// Height of the thumbnail area of every row, excluding the label band.
    pub thumb_height: u32,
    pub cell_width: u32,
}

impl ContactSheet {
    pub fn row_height(&self) -> u32 {
        self.thumb_height + LABEL_BAND_HEIGHT
    }

    /// Pixel rectangle `(x, y, w, h)` of the label band for a cell.
    pub fn label_rect(&self, cell: &CellPlacement) -> (u32, u32, u32, u32) {
        (
            cell.column * self.cell_width,
            cell.row * self.row_height() + self.thumb_height,
            self.cell_width,
            LABEL_BAND_HEIGHT,
        )
    }
}

pub fn label_text(slide_number: u32) -> String {
    format!("Slide {slide_number}")
}

/// Renders `text` into a fresh band image of `width` using the built-in
/// 8x8 bitmap font, centered horizontally. Falls back to a smaller scale or
/// to the bare number when the text does not fit.
pub fn render_label(slide_number: u32, width: u32) -> RgbImage {
    let mut band = RgbImage::from_pixel(width, LABEL_BAND_HEIGHT, BAND);
    let full = label_text(slide_number);
    let short = slide_number.to_string();
    let (text, scale) = [
        (full.as_str(), LABEL_SCALE),
        (full.as_str(), 1),
        (short.as_str(), 1),
    ]
    .into_iter()
    .find(|(t, s)| t.chars().count() as u32 * GLYPH * s <= width)
    .unwrap_or((short.as_str(), 1));
    let text_width = text.chars().count() as u32 * GLYPH * scale;
    let x0 = width.saturating_sub(text_width) / 2;
    let y0 = (LABEL_BAND_HEIGHT - GLYPH * scale) / 2;
    for (i, ch) in text.chars().enumerate() {
        let Some(rows) = BASIC_FONTS.get(ch) else {
            continue;
        };
        let gx = x0 + i as u32 * GLYPH * scale;
        for (ry, bits) in rows.iter().enumerate() {
            for rx in 0..GLYPH {
                if bits >> rx & 1 == 0 {
                    continue;
                }
                for dy in 0..scale {
                    for dx in 0..scale {
                        let x = gx + rx * scale + dx;
                        let y = y0 + ry as u32 * scale + dy;
                        if x < width {
                            band.put_pixel(x, y, INK);
                        }
                    }
                }
            }
        }
    }
    band
}

/// Scales `image` to `width` preserving aspect ratio (height at least 1).
pub fn thumbnail(image: &RgbImage, width: u32) -> RgbImage {
    let (w, h) = image.dimensions();
    let height = ((h as f64 * width as f64 / w as f64).round() as u32).max(1);
    if (w, h) == (width, height) {
        return image.clone();
    }
    if width < w {
        // Area-averaging downscale; much cheaper than a filtered resize.
        imageops::thumbnail(image, width, height)
    } else {
        imageops::resize(image, width, height, FilterType::Triangle)
    }
}

/// Stitches the slides of one window into a grid in reading order, each
/// thumbnail `cell_width` wide with its slide number drawn beneath it.
pub fn build_contact_sheet(
    window: WindowSpec,
    slides: &[&ExtractedSlide],
    columns: u32,
    cell_width: u32,
) -> Result<ContactSheet, IngestError> {
    if slides.is_empty() || columns == 0 || cell_width == 0 {
        return Err(IngestError::InvalidContactSheet {
            slides: slides.len(),
            columns,
            cell_width,
        });
    }
    let mut ordered: Vec<&ExtractedSlide> = slides.to_vec();
    ordered.sort_by_key(|s| s.slide_number);

    let thumbs: Vec<RgbImage> = ordered
        .iter()
        .map(|s| thumbnail(&s.image, cell_width))
        .collect();
    let thumb_height = thumbs.iter().map(|t| t.height()).max().unwrap_or(1);
    let n = ordered.len() as u32;
    let used_columns = n.min(columns);
    let rows = n.div_ceil(columns);
    let row_height = thumb_height + LABEL_BAND_HEIGHT;
    let mut sheet = RgbImage::from_pixel(used_columns * cell_width, rows * row_height, BACKGROUND);

    let mut cell_map = Vec::with_capacity(ordered.len());
    for (i, (slide, thumb)) in ordered.iter().zip(&thumbs).enumerate() {
        let row = i as u32 / columns;
        let column = i as u32 % columns;
        let x = column * cell_width;
        let y = row * row_height;
        imageops::replace(&mut sheet, thumb, x as i64, y as i64);
        let label = render_label(slide.slide_number, cell_width);
        imageops::replace(&mut sheet, &label, x as i64, (y + thumb_height) as i64);
        cell_map.push(CellPlacement {
            slide_number: slide.slide_number,
            row,
            column,
        });
    }
    Ok(ContactSheet {
        image: sheet,
        window,
        cell_map,
        thumb_height,
        cell_width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slide(n: u32, w: u32, h: u32) -> ExtractedSlide {
        ExtractedSlide {
            slide_number: n,
            native_text: String::new(),
            image: RgbImage::from_pixel(w, h, Rgb([(n * 20) as u8, 40, 90])),
        }
    }

    fn window(start: u32, end: u32) -> WindowSpec {
        WindowSpec {
            index: 0,
            start_slide: start,
            end_slide: end,
        }
    }

    fn sheet(n: u32, columns: u32, cell_width: u32) -> ContactSheet {
        let slides: Vec<ExtractedSlide> = (1..=n).map(|i| slide(i, 612, 792)).collect();
        let refs: Vec<&ExtractedSlide> = slides.iter().collect();
        build_contact_sheet(window(1, n), &refs, columns, cell_width).unwrap()
    }

    #[test]
    fn five_slides_three_columns() {
        let s = sheet(5, 3, 100);
        assert_eq!(s.cell_map.len(), 5);
        assert_eq!(s.cell_map.iter().map(|c| c.row).max(), Some(1));
        assert_eq!(s.image.height(), 2 * s.row_height());
        assert_eq!(s.image.width(), 300);
    }

    #[test]
    fn one_slide_four_columns() {
        let s = sheet(1, 4, 100);
        assert_eq!(
            s.cell_map,
            vec![CellPlacement {
                slide_number: 1,
                row: 0,
                column: 0
            }]
        );
        assert_eq!(s.image.height(), s.row_height());
    }

    #[test]
    fn eight_slides_four_columns_width() {
        let s = sheet(8, 4, 320);
        assert_eq!(s.image.width(), 1280);
        // 612x792 scaled to 320 wide
        assert_eq!(s.thumb_height, 414);
    }

    #[test]
    fn reading_order_and_labels() {
        let s = sheet(6, 4, 200);
        for (i, cell) in s.cell_map.iter().enumerate() {
            assert_eq!(cell.slide_number, i as u32 + 1);
            assert_eq!((cell.row, cell.column), (i as u32 / 4, i as u32 % 4));
            let (x, y, w, h) = s.label_rect(cell);
            let expected = render_label(cell.slide_number, w);
            let crop = imageops::crop_imm(&s.image, x, y, w, h).to_image();
            assert_eq!(crop, expected, "label for slide {}", cell.slide_number);
            assert!(crop.pixels().any(|p| *p == INK));
        }
        assert_ne!(render_label(1, 200), render_label(2, 200));
    }

    #[test]
    fn narrow_cells_fall_back_to_number() {
        let band = render_label(123, 30);
        assert_eq!(band.width(), 30);
        assert!(band.pixels().any(|p| *p == INK));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(build_contact_sheet(window(1, 1), &[], 4, 320).is_err());
    }
}
