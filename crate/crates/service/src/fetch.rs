//! Remote PDF download with a size cap and format sniffing.

use reqwest::header::CONTENT_TYPE;
use reqwest::Url;

pub const DEFAULT_MAX_UPLOAD: usize = 50 * 1024 * 1024;

/// Readers accept the header anywhere in the first kilobyte.
const MAGIC_WINDOW: usize = 1024;
const PDF_MAGIC: &[u8] = b"%PDF-";

#[derive(Debug, thiserror::Error)]
pub enum FetchError {
    #[error("invalid URL {url:?}: {reason}")]
    BadUrl { url: String, reason: String },
    #[error("fetching {url} failed: {reason}")]
    Request { url: String, reason: String },
    #[error("fetching {url} returned HTTP {status}")]
    Status { url: String, status: u16 },
    #[error("document exceeds the {limit}-byte limit")]
    TooLarge { limit: usize },
    #[error("{url} did not return a PDF (content-type {content_type:?})")]
    NotPdf { url: String, content_type: String },
}

pub fn has_pdf_magic(bytes: &[u8]) -> bool {
    let head = &bytes[..bytes.len().min(MAGIC_WINDOW)];
    head.windows(PDF_MAGIC.len()).any(|w| w == PDF_MAGIC)
}

pub fn parse_http_url(url: &str) -> Result<Url, FetchError> {
    let parsed = Url::parse(url.trim()).map_err(|e| FetchError::BadUrl {
        url: url.to_string(),
        reason: e.to_string(),
    })?;
    if !matches!(parsed.scheme(), "http" | "https") {
        return Err(FetchError::BadUrl {
            url: url.to_string(),
            reason: format!("scheme {} is not http or https", parsed.scheme()),
        });
    }
    Ok(parsed)
}

/// Last non-empty path segment, or `download.pdf`.
pub fn file_name_from_url(url: &Url) -> String {
    url.path_segments()
        .and_then(|mut s| s.rfind(|seg| !seg.is_empty()).map(str::to_string))
        .unwrap_or_else(|| "download.pdf".to_string())
}

/// Downloads `url`, stopping as soon as the body passes `limit` bytes.
/// The body must carry a PDF content type or the PDF header.
pub async fn fetch_pdf(
    client: &reqwest::Client,
    url: &Url,
    limit: usize,
) -> Result<Vec<u8>, FetchError> {
    let request_failed = |e: reqwest::Error| FetchError::Request {
        url: url.to_string(),
        reason: e.to_string(),
    };
    let mut response = client
        .get(url.clone())
        .send()
        .await
        .map_err(request_failed)?;
    let status = response.status();
    if !status.is_success() {
        return Err(FetchError::Status {
            url: url.to_string(),
            status: status.as_u16(),
        });
    }
    if response.content_length().is_some_and(|n| n > limit as u64) {
        return Err(FetchError::TooLarge { limit });
    }
    let content_type = response
        .headers()
        .get(CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("")
        .to_ascii_lowercase();

    let mut body = Vec::new();
    while let Some(chunk) = response.chunk().await.map_err(request_failed)? {
        if body.len() + chunk.len() > limit {
            return Err(FetchError::TooLarge { limit });
        }
        body.extend_from_slice(&chunk);
    }
    if !content_type.starts_with("application/pdf") && !has_pdf_magic(&body) {
        return Err(FetchError::NotPdf {
            url: url.to_string(),
            content_type,
        });
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magic_sniffing() {
        assert!(has_pdf_magic(b"%PDF-1.7\n..."));
        assert!(has_pdf_magic(b"\xef\xbb\xbf%PDF-1.4"));
        assert!(!has_pdf_magic(b"<html>"));
        let mut late = vec![b' '; MAGIC_WINDOW];
        late.extend_from_slice(PDF_MAGIC);
        assert!(!has_pdf_magic(&late));
    }

    #[test]
    fn url_rules() {
        assert!(parse_http_url("ftp://x/y.pdf").is_err());
        assert!(parse_http_url("not a url").is_err());
        let u = parse_http_url("https://example.org/decks/week1.pdf?x=1").unwrap();
        assert_eq!(file_name_from_url(&u), "week1.pdf");
        let root = parse_http_url("https://example.org/").unwrap();
        assert_eq!(file_name_from_url(&root), "download.pdf");
    }
}
