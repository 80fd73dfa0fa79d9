//! Wire-level tests against a scripted in-process HTTP server: transient
//! statuses are retried, payloads parse, and the cache prevents repeat calls.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use artlens_core::gateway::{
    ChatGateway, ChatMessage, EmbedBackend, HttpChatBackend, HttpEmbedBackend, SimClock,
    Timestamps,
};
use artlens_core::{ProviderConfig, ProviderKind};

/// Serves one canned (status, body) response per incoming request, counting
/// requests; panics if more requests arrive than were scripted.
fn scripted_server(responses: Vec<(u16, String)>) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let hits_thread = hits.clone();
    std::thread::spawn(move || {
        for (status, body) in responses {
            let (mut stream, _) = listener.accept().unwrap();
            hits_thread.fetch_add(1, Ordering::SeqCst);
            // drain the request: headers, then content-length bytes of body
            let mut buf = Vec::new();
            let mut byte = [0u8; 1];
            while !buf.ends_with(b"\r\n\r\n") {
                stream.read_exact(&mut byte).unwrap();
                buf.push(byte[0]);
            }
            let head = String::from_utf8_lossy(&buf).to_lowercase();
            let len: usize = head
                .lines()
                .find_map(|l| l.strip_prefix("content-length:"))
                .map(|v| v.trim().parse().unwrap())
                .unwrap_or(0);
            let mut body_buf = vec![0u8; len];
            stream.read_exact(&mut body_buf).unwrap();
            let reason = if status == 200 { "OK" } else { "ERR" };
            let resp = format!(
                "HTTP/1.1 {status} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(resp.as_bytes()).unwrap();
        }
    });
    (format!("http://{addr}/v1/endpoint"), hits)
}

fn chat_body(content: &str) -> String {
    serde_json::json!({
        "choices": [{"message": {"role": "assistant", "content": content}}]
    })
    .to_string()
}

#[test]
fn transient_statuses_are_retried_then_cached() {
    let (url, hits) = scripted_server(vec![
        (429, "{\"error\": \"rate limited\"}".to_string()),
        (503, "{\"error\": \"overloaded\"}".to_string()),
        (200, chat_body("the answer")),
    ]);
    let dir = tempfile::tempdir().unwrap();
    let config = ProviderConfig {
        endpoint_url: url.clone(),
        ..ProviderConfig::new(ProviderKind::TextChat, "fake-model")
    };
    let gateway = ChatGateway::new(
        config,
        Arc::new(HttpChatBackend::new(&url, "UNSET_TEST_KEY")),
        dir.path(),
        Arc::new(SimClock::new()),
        Timestamps::Fixed("t0".into()),
    );
    let messages = vec![ChatMessage::user_text("q")];
    let resp = gateway.complete_cached("subj", "q", &messages).unwrap();
    assert_eq!(resp.raw_text, "the answer");
    assert_eq!(resp.attempt_count, 3);
    assert_eq!(hits.load(Ordering::SeqCst), 3);

    // identical call is a pure cache hit: no further requests
    let again = gateway.complete_cached("subj", "q", &messages).unwrap();
    assert_eq!(again, resp);
    assert_eq!(hits.load(Ordering::SeqCst), 3);
}

#[test]
fn terminal_status_fails_without_retry() {
    let (url, hits) = scripted_server(vec![(401, "{\"error\": \"bad key\"}".to_string())]);
    let dir = tempfile::tempdir().unwrap();
    let config = ProviderConfig {
        endpoint_url: url.clone(),
        ..ProviderConfig::new(ProviderKind::TextChat, "fake-model")
    };
    let gateway = ChatGateway::new(
        config,
        Arc::new(HttpChatBackend::new(&url, "UNSET_TEST_KEY")),
        dir.path(),
        Arc::new(SimClock::new()),
        Timestamps::Fixed("t0".into()),
    );
    let err = gateway
        .complete_cached("subj", "q", &[ChatMessage::user_text("q")])
        .unwrap_err();
    assert!(err.to_string().contains("401"), "unexpected: {err}");
    assert_eq!(hits.load(Ordering::SeqCst), 1);
}

#[test]
fn embeddings_payload_parses() {
    let body = serde_json::json!({
        "data": [{"embedding": [0.1, -0.5, 0.25]}]
    })
    .to_string();
    let (url, _) = scripted_server(vec![(200, body)]);
    let backend = HttpEmbedBackend::new(&url, "UNSET_TEST_KEY");
    let v = backend.embed("fake-embed", "hello").unwrap();
    assert_eq!(v, vec![0.1, -0.5, 0.25]);
}

#[test]
fn malformed_chat_payload_is_terminal() {
    let (url, _) = scripted_server(vec![(200, "{\"unexpected\": true}".to_string())]);
    let dir = tempfile::tempdir().unwrap();
    let config = ProviderConfig {
        endpoint_url: url.clone(),
        ..ProviderConfig::new(ProviderKind::TextChat, "fake-model")
    };
    let gateway = ChatGateway::new(
        config,
        Arc::new(HttpChatBackend::new(&url, "UNSET_TEST_KEY")),
        dir.path(),
        Arc::new(SimClock::new()),
        Timestamps::Fixed("t0".into()),
    );
    assert!(gateway
        .complete_cached("subj", "q", &[ChatMessage::user_text("q")])
        .is_err());
}
