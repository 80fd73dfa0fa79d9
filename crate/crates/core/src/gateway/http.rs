//! OpenAI-compatible HTTP backends (chat completions and embeddings) and
//! image resolution for vision requests.

use std::io::Cursor;

use base64::Engine as _;
use serde_json::{json, Value};

use super::{CallError, ChatBackend, ChatMessage, ContentPart, EmbedBackend, GatewayError};

const MAX_IMAGE_EDGE: u32 = 1024;

/// Resolves an artwork image reference into an image_url content value:
/// http(s) URLs pass through; local files are downscaled to at most
/// 1024 px on the long edge and inlined as a base64 PNG data URL.
pub fn resolve_image(image_ref: &str) -> Result<String, GatewayError> {
    if image_ref.starts_with("http://") || image_ref.starts_with("https://") {
        return Ok(image_ref.to_string());
    }
    let bytes = std::fs::read(image_ref)
        .map_err(|e| GatewayError::ImageUnreadable(format!("{image_ref}: {e}")))?;
    let img = image::load_from_memory(&bytes)
        .map_err(|e| GatewayError::ImageUnreadable(format!("{image_ref}: {e}")))?;
    let (w, h) = (img.width(), img.height());
    let img = if w.max(h) > MAX_IMAGE_EDGE {
        img.resize(MAX_IMAGE_EDGE, MAX_IMAGE_EDGE, image::imageops::FilterType::Lanczos3)
    } else {
        img
    };
    let mut png = Vec::new();
    img.write_to(&mut Cursor::new(&mut png), image::ImageFormat::Png)
        .map_err(|e| GatewayError::ImageUnreadable(format!("{image_ref}: {e}")))?;
    let b64 = base64::engine::general_purpose::STANDARD.encode(&png);
    Ok(format!("data:image/png;base64,{b64}"))
}

fn classify_status(status: u16, body: &str) -> CallError {
    match status {
        408 | 429 | 500..=599 => CallError::Transient(format!("http {status}: {body}")),
        _ => CallError::Terminal(format!("http {status}: {body}")),
    }
}

fn classify_reqwest(e: reqwest::Error) -> CallError {
    if e.is_timeout() || e.is_connect() {
        CallError::Transient(e.to_string())
    } else {
        CallError::Terminal(e.to_string())
    }
}

fn message_json(msg: &ChatMessage) -> Value {
    let only_text = msg
        .parts
        .iter()
        .all(|p| matches!(p, ContentPart::Text(_)));
    let content = if only_text {
        Value::String(msg.text())
    } else {
        Value::Array(
            msg.parts
                .iter()
                .map(|p| match p {
                    ContentPart::Text(t) => json!({"type": "text", "text": t}),
                    ContentPart::ImageUrl(u) => {
                        json!({"type": "image_url", "image_url": {"url": u}})
                    }
                })
                .collect(),
        )
    };
    json!({"role": msg.role, "content": content})
}

fn auth_header(auth_env_var: &str) -> Option<String> {
    std::env::var(auth_env_var).ok().filter(|v| !v.is_empty())
}

pub struct HttpChatBackend {
    client: reqwest::blocking::Client,
    endpoint_url: String,
    auth_env_var: String,
}

impl HttpChatBackend {
    /// `endpoint_url` is the full chat-completions URL,
    /// e.g. `https://api.openai.com/v1/chat/completions`.
    pub fn new(endpoint_url: &str, auth_env_var: &str) -> Self {
        HttpChatBackend {
            client: reqwest::blocking::Client::new(),
            endpoint_url: endpoint_url.to_string(),
            auth_env_var: auth_env_var.to_string(),
        }
    }
}

impl ChatBackend for HttpChatBackend {
    fn chat(
        &self,
        model_id: &str,
        messages: &[ChatMessage],
        temperature: f64,
    ) -> Result<String, CallError> {
        let body = json!({
            "model": model_id,
            "temperature": temperature,
            "messages": messages.iter().map(message_json).collect::<Vec<_>>(),
        });
        let mut req = self.client.post(&self.endpoint_url).json(&body);
        if let Some(key) = auth_header(&self.auth_env_var) {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(classify_reqwest)?;
        let status = resp.status().as_u16();
        let text = resp.text().map_err(classify_reqwest)?;
        if !(200..300).contains(&status) {
            return Err(classify_status(status, &text));
        }
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CallError::Terminal(format!("bad response json: {e}")))?;
        let content = value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| CallError::Terminal("response missing choices[0].message.content".into()))?;
        Ok(content.to_string())
    }
}

pub struct HttpEmbedBackend {
    client: reqwest::blocking::Client,
    endpoint_url: String,
    auth_env_var: String,
}

impl HttpEmbedBackend {
    /// `endpoint_url` is the full embeddings URL,
    /// e.g. `https://api.openai.com/v1/embeddings`.
    pub fn new(endpoint_url: &str, auth_env_var: &str) -> Self {
        HttpEmbedBackend {
            client: reqwest::blocking::Client::new(),
            endpoint_url: endpoint_url.to_string(),
            auth_env_var: auth_env_var.to_string(),
        }
    }
}

impl EmbedBackend for HttpEmbedBackend {
    fn embed(&self, model_id: &str, text: &str) -> Result<Vec<f64>, CallError> {
        let body = json!({"model": model_id, "input": text});
        let mut req = self.client.post(&self.endpoint_url).json(&body);
        if let Some(key) = auth_header(&self.auth_env_var) {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(classify_reqwest)?;
        let status = resp.status().as_u16();
        let text_body = resp.text().map_err(classify_reqwest)?;
        if !(200..300).contains(&status) {
            return Err(classify_status(status, &text_body));
        }
        let value: Value = serde_json::from_str(&text_body)
            .map_err(|e| CallError::Terminal(format!("bad response json: {e}")))?;
        let arr = value
            .pointer("/data/0/embedding")
            .and_then(Value::as_array)
            .ok_or_else(|| CallError::Terminal("response missing data[0].embedding".into()))?;
        arr.iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| CallError::Terminal("non-numeric embedding component".into()))
            })
            .collect()
    }
}
