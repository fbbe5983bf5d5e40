//! PDF ingestion: native text per page, page rasters, contact sheets.
//!
//! Text comes from the PDF's own text layer (no OCR). Pages are rasterized
//! on the CPU at `render_scale` pixels per page unit.

mod contact;
mod text;

use hayro::hayro_interpret::InterpreterSettings;
use hayro::hayro_syntax::{LoadPdfError, Pdf};
use hayro::vello_cpu::color::palette::css::WHITE;
use hayro::vello_cpu::{Pixmap, RasterizerSettings, RenderContext, Resources, TargetInit};
use hayro::{render_into, RenderCache, RenderSettings};
use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ExtendedColorType, ImageEncoder, RgbImage};

pub use contact::{
    build_contact_sheet, label_text, render_label, thumbnail, CellPlacement, ContactSheet,
    DEFAULT_CELL_WIDTH, DEFAULT_CONTACT_COLUMNS, LABEL_BAND_HEIGHT,
};
pub use text::normalize_slide_text;

pub const DEFAULT_RENDER_SCALE: f64 = 2.0;

/// Largest raster edge the renderer supports.
const MAX_RASTER_EDGE: f64 = u16::MAX as f64;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("input is not a PDF: {0}")]
    NotAPdf(String),
    #[error("PDF is encrypted and requires a password")]
    EncryptedPdf,
    #[error("PDF has no pages")]
    EmptyPdf,
    #[error("render_scale must be a positive finite number, got {0}")]
    InvalidScale(f64),
    #[error("page {page} cannot be rasterized: {reason}")]
    Render { page: u32, reason: String },
    #[error("contact sheet needs at least one slide, columns >= 1 and cell_width >= 1 (got {slides} slides, {columns} columns, width {cell_width})")]
    InvalidContactSheet {
        slides: usize,
        columns: u32,
        cell_width: u32,
    },
    #[error("PNG encoding failed: {0}")]
    Encode(String),
}

#[derive(Debug, Clone)]
pub struct ExtractedSlide {
    pub slide_number: u32,
    pub native_text: String,
    pub image: RgbImage,
}

impl ExtractedSlide {
    pub fn png(&self) -> Result<Vec<u8>, IngestError> {
        encode_png(&self.image)
    }
}

#[derive(Debug, Clone)]
pub struct ExtractedDeck {
    pub source_file: String,
    pub slides: Vec<ExtractedSlide>,
    pub render_scale: f64,
}

impl ExtractedDeck {
    pub fn total_slides(&self) -> u32 {
        self.slides.len() as u32
    }

    pub fn slide(&self, slide_number: u32) -> Option<&ExtractedSlide> {
        slide_number
            .checked_sub(1)
            .and_then(|i| self.slides.get(i as usize))
    }
}

/// PNG with fast compression; these are sent to a model, not archived.
pub fn encode_png(image: &RgbImage) -> Result<Vec<u8>, IngestError> {
    let mut out = Vec::new();
    PngEncoder::new_with_quality(&mut out, CompressionType::Fast, FilterType::Adaptive)
        .write_image(
            image.as_raw(),
            image.width(),
            image.height(),
            ExtendedColorType::Rgb8,
        )
        .map_err(|e| IngestError::Encode(e.to_string()))?;
    Ok(out)
}

fn looks_like_pdf(bytes: &[u8]) -> bool {
    // Header may be preceded by junk bytes; readers accept it within 1 KiB.
    let head = &bytes[..bytes.len().min(1024)];
    head.windows(5).any(|w| w == b"%PDF-")
}

/// Reads every page of a PDF: its native text and a raster at
/// `render_scale` (page size in PDF units times scale, rounded).
pub fn extract_deck(
    source_file: &str,
    pdf_bytes: &[u8],
    render_scale: f64,
) -> Result<ExtractedDeck, IngestError> {
    if !(render_scale.is_finite() && render_scale > 0.0) {
        return Err(IngestError::InvalidScale(render_scale));
    }
    if pdf_bytes.is_empty() {
        return Err(IngestError::NotAPdf("empty input".into()));
    }
    if !looks_like_pdf(pdf_bytes) {
        return Err(IngestError::NotAPdf("missing %PDF- header".into()));
    }

    let texts = extract_texts(pdf_bytes)?;
    if texts.is_empty() {
        return Err(IngestError::EmptyPdf);
    }
    let images = rasterize(pdf_bytes, render_scale)?;
    if images.len() != texts.len() {
        return Err(IngestError::NotAPdf(format!(
            "page tree is inconsistent: {} text pages vs {} renderable pages",
            texts.len(),
            images.len()
        )));
    }

    let slides = texts
        .into_iter()
        .zip(images)
        .enumerate()
        .map(|(i, (native_text, image))| ExtractedSlide {
            slide_number: i as u32 + 1,
            native_text,
            image,
        })
        .collect();
    Ok(ExtractedDeck {
        source_file: source_file.to_string(),
        slides,
        render_scale,
    })
}

fn extract_texts(pdf_bytes: &[u8]) -> Result<Vec<String>, IngestError> {
    let doc = match lopdf::Document::load_mem(pdf_bytes) {
        Ok(doc) => doc,
        Err(lopdf::Error::Decryption(_) | lopdf::Error::InvalidPassword) => {
            return Err(IngestError::EncryptedPdf)
        }
        Err(e) => return Err(IngestError::NotAPdf(e.to_string())),
    };
    // Documents that open with the empty user password are decrypted in
    // place; anything still flagged needs a real password.
    if doc.is_encrypted() {
        return Err(IngestError::EncryptedPdf);
    }
    let pages = doc.get_pages();
    let mut texts = Vec::with_capacity(pages.len());
    for &page in pages.keys() {
        let text = match doc.extract_text(&[page]) {
            Ok(t) => t,
            Err(e) => {
                tracing::debug!(page, error = %e, "no extractable text layer");
                String::new()
            }
        };
        texts.push(text);
    }
    Ok(texts)
}

fn rasterize(pdf_bytes: &[u8], render_scale: f64) -> Result<Vec<RgbImage>, IngestError> {
    let pdf = Pdf::new(pdf_bytes.to_vec()).map_err(|e| match e {
        LoadPdfError::Decryption(_) => IngestError::EncryptedPdf,
        LoadPdfError::Invalid => IngestError::NotAPdf("unparseable document structure".into()),
    })?;
    let cache = RenderCache::new();
    let interpreter = InterpreterSettings::default();
    let settings = RenderSettings::default();
    let mut resources = Resources::default();

    let mut images = Vec::new();
    for (i, page) in pdf.pages().iter().enumerate() {
        let page_number = i as u32 + 1;
        let (w, h) = page.render_dimensions();
        let width = (w as f64 * render_scale).round();
        let height = (h as f64 * render_scale).round();
        if !(1.0..=MAX_RASTER_EDGE).contains(&width) || !(1.0..=MAX_RASTER_EDGE).contains(&height) {
            return Err(IngestError::Render {
                page: page_number,
                reason: format!("raster size {width}x{height} out of range"),
            });
        }
        let (width, height) = (width as u16, height as u16);
        let mut ctx = RenderContext::new(width, height);
        let transform = hayro::kurbo::Affine::scale_non_uniform(
            width as f64 / w as f64,
            height as f64 / h as f64,
        ) * hayro::kurbo::Affine::new(page.initial_transform(true).as_coeffs());
        render_into(page, &cache, &interpreter, &settings, &mut ctx, transform);
        ctx.flush();
        let mut pixmap = Pixmap::new(width, height);
        ctx.render_with(
            &mut pixmap,
            &mut resources,
            RasterizerSettings {
                target_init: TargetInit::Clear(WHITE),
                ..Default::default()
            },
        );
        images.push(pixmap_to_rgb(&pixmap));
    }
    Ok(images)
}

fn pixmap_to_rgb(pixmap: &Pixmap) -> RgbImage {
    // Cleared to opaque white first, so premultiplied == straight RGB.
    let rgb: Vec<u8> = pixmap
        .data_as_u8_slice()
        .chunks_exact(4)
        .flat_map(|px| [px[0], px[1], px[2]])
        .collect();
    RgbImage::from_raw(pixmap.width() as u32, pixmap.height() as u32, rgb)
        .expect("pixmap buffer matches its dimensions")
}
