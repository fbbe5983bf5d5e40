//! Synthetic slide decks for fixtures, demos and offline runs.
//!
//! Pages carry a real text layer (Helvetica, WinAnsi) plus a few filled
//! boxes so the rasters are not blank.

use lopdf::content::{Content, Operation};
use lopdf::{dictionary, Document, Object, Stream};

pub const LETTER_WIDTH: u32 = 612;
pub const LETTER_HEIGHT: u32 = 792;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticPage {
    pub lines: Vec<String>,
    /// Number of decorative boxes drawn under the text.
    pub boxes: u32,
}

impl SyntheticPage {
    pub fn new<S: AsRef<str>>(lines: &[S]) -> Self {
        Self {
            lines: lines.iter().map(|l| l.as_ref().to_string()).collect(),
            boxes: 0,
        }
    }

    pub fn with_boxes(mut self, boxes: u32) -> Self {
        self.boxes = boxes;
        self
    }

    pub fn blank() -> Self {
        Self {
            lines: Vec::new(),
            boxes: 1,
        }
    }
}

/// Writes a PDF with one page per entry, all `width` x `height` units.
pub fn build_pdf(pages: &[SyntheticPage], width: u32, height: u32) -> Vec<u8> {
    let mut doc = Document::with_version("1.5");
    let pages_id = doc.new_object_id();
    let font_id = doc.add_object(dictionary! {
        "Type" => "Font",
        "Subtype" => "Type1",
        "BaseFont" => "Helvetica",
        "Encoding" => "WinAnsiEncoding",
    });
    let resources_id = doc.add_object(dictionary! {
        "Font" => dictionary! { "F1" => font_id },
    });

    let mut kids: Vec<Object> = Vec::with_capacity(pages.len());
    for page in pages {
        let content = Content {
            operations: page_operations(page, width as i64, height as i64),
        };
        let content_id = doc.add_object(Stream::new(
            dictionary! {},
            content.encode().expect("content operations encode"),
        ));
        let page_id = doc.add_object(dictionary! {
            "Type" => "Page",
            "Parent" => pages_id,
            "Contents" => content_id,
        });
        kids.push(page_id.into());
    }
    let count = kids.len() as i64;
    doc.objects.insert(
        pages_id,
        Object::Dictionary(dictionary! {
            "Type" => "Pages",
            "Kids" => kids,
            "Count" => count,
            "Resources" => resources_id,
            "MediaBox" => vec![0.into(), 0.into(), (width as i64).into(), (height as i64).into()],
        }),
    );
    let catalog_id = doc.add_object(dictionary! {
        "Type" => "Catalog",
        "Pages" => pages_id,
    });
    doc.trailer.set("Root", catalog_id);
    let mut out = Vec::new();
    doc.save_to(&mut out).expect("in-memory PDF write");
    out
}

fn page_operations(page: &SyntheticPage, width: i64, height: i64) -> Vec<Operation> {
    let mut ops = Vec::new();
    for b in 0..page.boxes as i64 {
        let bw = (width - 144) / page.boxes.max(1) as i64 - 12;
        let x = 72 + b * (bw + 12);
        ops.push(Operation::new(
            "rg",
            vec![0.75.into(), 0.85.into(), 0.95.into()],
        ));
        ops.push(Operation::new(
            "re",
            vec![x.into(), 96.into(), bw.into(), (height / 4).into()],
        ));
        ops.push(Operation::new("f", vec![]));
    }
    ops.push(Operation::new("rg", vec![0.into(), 0.into(), 0.into()]));
    let mut y = height - 96;
    for (i, line) in page.lines.iter().enumerate() {
        let size: i64 = if i == 0 { 32 } else { 20 };
        ops.push(Operation::new("BT", vec![]));
        ops.push(Operation::new("Tf", vec!["F1".into(), size.into()]));
        ops.push(Operation::new("Td", vec![72.into(), y.into()]));
        ops.push(Operation::new(
            "Tj",
            vec![Object::string_literal(line.as_str())],
        ));
        ops.push(Operation::new("ET", vec![]));
        y -= size + 12;
    }
    ops
}

/// A twenty-slide lecture on attention with a title slide (1), an agenda
/// (2) and an exact duplicate (14 repeats 6).
pub fn sample_lecture() -> Vec<SyntheticPage> {
    let p = |lines: &[&str], boxes: u32| SyntheticPage::new(lines).with_boxes(boxes);
    let recap = p(
        &[
            "Recap: Recurrent Encoders",
            "An RNN reads tokens left to right",
            "Each hidden state summarizes the prefix",
            "Long-range dependencies decay over many steps",
        ],
        0,
    );
    vec![
        p(&["Self-Attention and Transformers", "Lecture 8"], 0),
        p(
            &[
                "Agenda",
                "From recurrence to attention",
                "Self-attention building blocks",
                "The Transformer encoder",
            ],
            0,
        ),
        p(
            &[
                "Why Move Beyond Recurrence",
                "Sequential computation blocks parallelism",
                "Linear interaction distance between words",
                "Gradients vanish across long spans",
            ],
            0,
        ),
        p(
            &[
                "Sentence Encoding by Pooling",
                "Take the element-wise max or mean of all hidden states",
                "Pooling ignores word order",
                "A stepping stone toward attention",
            ],
            2,
        ),
        p(
            &[
                "Attention as Soft Lookup",
                "A query is compared with every key",
                "Weights come from a softmax over similarities",
                "The output is a weighted sum of values",
            ],
            3,
        ),
        recap.clone(),
        p(
            &[
                "Queries, Keys and Values",
                "Each token embedding is projected three ways",
                "Q = XW_q, K = XW_k, V = XW_v",
                "Projections are learned jointly",
            ],
            3,
        ),
        p(
            &[
                "Scaled Dot-Product Attention",
                "Scores are QK^T divided by sqrt(d_k)",
                "Scaling keeps softmax gradients healthy",
                "Masking hides future positions in decoders",
            ],
            2,
        ),
        p(
            &[
                "Position Representations",
                "Self-attention is order invariant",
                "Sinusoidal or learned position vectors are added",
                "Relative schemes encode pairwise offsets",
            ],
            1,
        ),
        p(
            &[
                "Adding Nonlinearity",
                "A feed-forward network follows each attention layer",
                "Applied independently at every position",
            ],
            2,
        ),
        p(
            &[
                "Multi-Head Attention",
                "Several heads attend in parallel subspaces",
                "Head outputs are concatenated and projected",
                "Different heads capture different relations",
            ],
            4,
        ),
        p(
            &[
                "Residual Connections and Layer Norm",
                "Residual paths ease optimization of deep stacks",
                "Layer normalization rescales each position",
            ],
            2,
        ),
        p(
            &[
                "The Transformer Encoder Block",
                "Attention, add and norm, feed-forward, add and norm",
                "Blocks are stacked N times",
            ],
            4,
        ),
        recap,
        p(
            &[
                "Transformer Decoder",
                "Masked self-attention over generated tokens",
                "Cross-attention reads encoder outputs",
            ],
            3,
        ),
        p(
            &[
                "Results on Machine Translation",
                "Transformers matched recurrent BLEU scores",
                "Training was several times faster",
            ],
            2,
        ),
        p(
            &[
                "Quadratic Cost of Self-Attention",
                "Compute grows with the square of sequence length",
                "Sparse and linear variants reduce the cost",
            ],
            1,
        ),
        p(
            &[
                "Comparison: RNN versus Transformer",
                "RNN: sequential, linear memory",
                "Transformer: parallel, quadratic memory",
            ],
            2,
        ),
        p(
            &[
                "Summary",
                "Attention replaces recurrence for context gathering",
                "Multi-head attention plus feed-forward layers form a block",
            ],
            0,
        ),
        p(
            &[
                "Questions and Course Logistics",
                "Assignment 4 is due next week",
            ],
            0,
        ),
    ]
}

pub fn sample_lecture_pdf() -> Vec<u8> {
    build_pdf(&sample_lecture(), LETTER_WIDTH, LETTER_HEIGHT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_lecture_shape() {
        let deck = sample_lecture();
        assert_eq!(deck.len(), 20);
        assert_eq!(deck[5], deck[13]);
        assert_eq!(deck[1].lines[0], "Agenda");
    }

    #[test]
    fn build_is_deterministic() {
        assert_eq!(sample_lecture_pdf(), sample_lecture_pdf());
    }
}
