//! Paginated client for a dataset hub listing API.
//!
//! The client speaks plain `GET {endpoint}?limit=N&offset=K`. When the
//! server answers with a `Link: <...>; rel="next"` header the client follows
//! that cursor instead of computing offsets, which is how the Hugging Face
//! listing endpoint paginates.

use std::thread;
use std::time::{Duration, Instant};

use reqwest::blocking::Client;
use reqwest::header::{HeaderMap, AUTHORIZATION, LINK};
use reqwest::{StatusCode, Url};
use tracing::{debug, warn};

use super::load::{accept, dedup_keep_last, LoadReport, Location};
use super::IngestError;

/// Environment variable holding a bearer token for the hub.
pub const TOKEN_ENV: &str = "HF_TOKEN";

pub const DEFAULT_ENDPOINT: &str = "https://huggingface.co/api/datasets";

#[derive(Debug, Clone)]
pub struct HubClient {
    endpoint: Url,
    page_size: usize,
    token: Option<String>,
    max_retries: u32,
    backoff: Duration,
    min_interval: Duration,
    http: Client,
}

impl HubClient {
    pub fn new(endpoint: &str, page_size: usize) -> Result<Self, IngestError> {
        if page_size == 0 {
            return Err(IngestError::Config("page size must be positive".into()));
        }
        let endpoint = Url::parse(endpoint)
            .map_err(|e| IngestError::Config(format!("invalid endpoint {endpoint:?}: {e}")))?;
        let http = Client::builder()
            .timeout(Duration::from_secs(60))
            .user_agent(concat!("facetnet/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| IngestError::Config(e.to_string()))?;
        Ok(Self {
            endpoint,
            page_size,
            token: None,
            max_retries: 3,
            backoff: Duration::from_millis(500),
            min_interval: Duration::from_millis(250),
            http,
        })
    }

    pub fn with_token(mut self, token: Option<String>) -> Self {
        self.token = token.filter(|t| !t.is_empty());
        self
    }

    /// Picks up the bearer token from [`TOKEN_ENV`] if set.
    pub fn with_env_token(self) -> Self {
        self.with_token(std::env::var(TOKEN_ENV).ok())
    }

    pub fn with_retries(mut self, max_retries: u32, backoff: Duration) -> Self {
        self.max_retries = max_retries;
        self.backoff = backoff;
        self
    }

    /// Minimum spacing between two requests.
    pub fn with_min_interval(mut self, min_interval: Duration) -> Self {
        self.min_interval = min_interval;
        self
    }

    /// Fetches cards page by page until `max_records` cards are collected or
    /// the listing is exhausted. Cards keep listing order; when an id repeats
    /// the last occurrence wins.
    pub fn fetch_catalog(&self, max_records: Option<usize>) -> Result<LoadReport, IngestError> {
        let mut report = LoadReport::default();
        let mut limit = self.limit_for(0, max_records);
        let mut next = Some(self.page_url(0, limit));
        let mut offset = 0;
        let mut cursor_mode = false;
        let mut last_request: Option<Instant> = None;
        let mut page = 0;

        while let Some(url) = next.take() {
            page += 1;
            let (headers, body) = self.get_with_retries(&url, page, &mut last_request)?;
            let elements: Vec<serde_json::Value> =
                serde_json::from_str(&body).map_err(|e| IngestError::Malformed {
                    location: format!("page {page} ({url})"),
                    message: e.to_string(),
                })?;
            let received = elements.len();
            debug!(page, received, "fetched page");
            for (element, value) in elements.into_iter().enumerate() {
                accept(
                    &mut report,
                    Location::Page { page, element },
                    serde_json::from_value(value),
                );
            }
            offset += received;

            if let Some(max) = max_records {
                if report.cards.len() >= max {
                    break;
                }
            }
            if received == 0 {
                break;
            }
            let link_next = next_link(&headers, &url);
            cursor_mode |= link_next.is_some();
            next = if cursor_mode {
                link_next
            } else if received < limit {
                None
            } else {
                limit = self.limit_for(report.cards.len(), max_records);
                Some(self.page_url(offset, limit))
            };
        }

        report.cards = dedup_keep_last(report.cards);
        if let Some(max) = max_records {
            report.cards.truncate(max);
        }
        Ok(report)
    }

    fn limit_for(&self, collected: usize, max_records: Option<usize>) -> usize {
        match max_records {
            Some(max) => self.page_size.min(max.saturating_sub(collected)).max(1),
            None => self.page_size,
        }
    }

    fn page_url(&self, offset: usize, limit: usize) -> Url {
        let mut url = self.endpoint.clone();
        let kept: Vec<(String, String)> = url
            .query_pairs()
            .filter(|(k, _)| k != "limit" && k != "offset")
            .map(|(k, v)| (k.into_owned(), v.into_owned()))
            .collect();
        {
            let mut pairs = url.query_pairs_mut();
            pairs.clear();
            for (k, v) in &kept {
                pairs.append_pair(k, v);
            }
            pairs.append_pair("limit", &limit.to_string());
            pairs.append_pair("offset", &offset.to_string());
        }
        url
    }

    fn get_with_retries(
        &self,
        url: &Url,
        page: usize,
        last_request: &mut Option<Instant>,
    ) -> Result<(HeaderMap, String), IngestError> {
        let mut attempt = 0;
        loop {
            if let Some(prev) = *last_request {
                let elapsed = prev.elapsed();
                if elapsed < self.min_interval {
                    thread::sleep(self.min_interval - elapsed);
                }
            }
            *last_request = Some(Instant::now());

            let mut req = self.http.get(url.clone());
            if let Some(token) = &self.token {
                req = req.header(AUTHORIZATION, format!("Bearer {token}"));
            }
            let failure = match req.send() {
                Ok(resp) if resp.status().is_success() => {
                    let headers = resp.headers().clone();
                    let body = resp.text().map_err(|e| IngestError::Http {
                        page,
                        url: url.to_string(),
                        status: None,
                        message: e.to_string(),
                    })?;
                    return Ok((headers, body));
                }
                Ok(resp) => {
                    let status = resp.status();
                    if !retryable(status) {
                        return Err(IngestError::Http {
                            page,
                            url: url.to_string(),
                            status: Some(status.as_u16()),
                            message: status.to_string(),
                        });
                    }
                    (Some(status.as_u16()), status.to_string())
                }
                Err(e) => (None, e.to_string()),
            };
            if attempt >= self.max_retries {
                return Err(IngestError::Http {
                    page,
                    url: url.to_string(),
                    status: failure.0,
                    message: format!("{} (after {} retries)", failure.1, self.max_retries),
                });
            }
            warn!(page, attempt, error = %failure.1, "retrying page");
            thread::sleep(self.backoff * 2u32.saturating_pow(attempt));
            attempt += 1;
        }
    }
}

fn retryable(status: StatusCode) -> bool {
    status == StatusCode::TOO_MANY_REQUESTS || status.is_server_error()
}

/// Extracts the `rel="next"` target of an RFC 8288 `Link` header.
fn next_link(headers: &HeaderMap, base: &Url) -> Option<Url> {
    headers
        .get_all(LINK)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .flat_map(|v| v.split(','))
        .find_map(|part| {
            let (target, params) = part.split_once(';')?;
            let is_next = params
                .split(';')
                .any(|p| p.trim().replace(' ', "") == "rel=\"next\"" || p.trim() == "rel=next");
            if !is_next {
                return None;
            }
            let target = target.trim().strip_prefix('<')?.strip_suffix('>')?;
            base.join(target).ok()
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use reqwest::header::HeaderValue;

    #[test]
    fn zero_page_size_rejected() {
        assert!(matches!(
            HubClient::new("http://localhost/api", 0),
            Err(IngestError::Config(_))
        ));
    }

    #[test]
    fn page_url_replaces_paging_params() {
        let client = HubClient::new("http://h/api/datasets?full=true&limit=7", 10).unwrap();
        let url = client.page_url(20, 10);
        assert_eq!(url.as_str(), "http://h/api/datasets?full=true&limit=10&offset=20");
    }

    #[test]
    fn parses_link_header() {
        let base = Url::parse("https://hub/api/datasets?limit=2").unwrap();
        let mut headers = HeaderMap::new();
        headers.insert(
            LINK,
            HeaderValue::from_static("<https://hub/api/datasets?cursor=abc>; rel=\"next\""),
        );
        assert_eq!(
            next_link(&headers, &base).unwrap().as_str(),
            "https://hub/api/datasets?cursor=abc"
        );

        let mut prev_only = HeaderMap::new();
        prev_only.insert(LINK, HeaderValue::from_static("</p1>; rel=\"prev\""));
        assert!(next_link(&prev_only, &base).is_none());
    }
}
