use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::mpsc;
use std::thread;

use tripsolve_nl::{
    translate, ChatError, ChatMessage, ChatTransport, EndpointConfig, HttpTransport, Verdict,
};

/// Serves one request and hands back its header block and body.
fn one_shot_server(reply: String) -> (String, mpsc::Receiver<(String, String)>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut head = String::new();
        let mut length = 0usize;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if line == "\r\n" || line.is_empty() {
                break;
            }
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                length = v.trim().parse().unwrap();
            }
            head.push_str(&line);
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body).unwrap();
        let mut stream = stream;
        write!(
            stream,
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
            reply.len(),
            reply
        )
        .unwrap();
        tx.send((head, String::from_utf8(body).unwrap())).unwrap();
    });
    (url, rx)
}

#[test]
fn offline_mode_never_connects() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    listener.set_nonblocking(true).unwrap();
    let cfg = EndpointConfig {
        base_url: format!("http://{}", listener.local_addr().unwrap()),
        token_env: "TRIPSOLVE_TEST_OFFLINE_TOKEN".into(),
        offline: true,
        ..EndpointConfig::default()
    };
    std::env::set_var("TRIPSOLVE_TEST_OFFLINE_TOKEN", "unused");
    assert_eq!(HttpTransport::connect(&cfg).unwrap_err(), ChatError::Offline);
    let t = translate("not a request", &cfg).unwrap();
    assert!(matches!(t.verdict, Verdict::Failed { .. }));
    assert!(t.transcript.is_empty());
    match listener.accept() {
        Err(e) => assert_eq!(e.kind(), std::io::ErrorKind::WouldBlock),
        Ok(_) => panic!("offline mode opened a connection"),
    }
}

#[test]
fn missing_token_is_reported_by_variable_name() {
    let cfg = EndpointConfig { token_env: "TRIPSOLVE_TEST_TOKEN_NEVER_SET".into(), ..EndpointConfig::default() };
    assert_eq!(
        HttpTransport::connect(&cfg).unwrap_err(),
        ChatError::MissingToken("TRIPSOLVE_TEST_TOKEN_NEVER_SET".into())
    );
}

#[test]
fn negative_temperature_is_rejected() {
    let cfg = EndpointConfig { temperature: -0.5, ..EndpointConfig::default() };
    assert!(matches!(cfg.check(), Err(ChatError::Config(_))));
}

#[test]
fn request_carries_token_model_and_messages() {
    let reply = serde_json::json!({"choices": [{"message": {"role": "assistant", "content": "CategorySearch[Park]"}}]});
    let (url, rx) = one_shot_server(reply.to_string());
    std::env::set_var("TRIPSOLVE_TEST_TOKEN_REQUEST", "s3cret");
    let cfg = EndpointConfig {
        base_url: url,
        model: "test-model".into(),
        token_env: "TRIPSOLVE_TEST_TOKEN_REQUEST".into(),
        max_retries: 0,
        ..EndpointConfig::default()
    };
    let mut transport = HttpTransport::connect(&cfg).unwrap();
    assert!(!format!("{transport:?}").contains("s3cret"));
    let text = transport.complete(&[ChatMessage::system("sys"), ChatMessage::user("hi")]).unwrap();
    assert_eq!(text, "CategorySearch[Park]");
    let (head, body) = rx.recv().unwrap();
    assert!(head.starts_with("POST /v1/chat/completions "), "{head}");
    assert!(head.to_ascii_lowercase().contains("authorization: bearer s3cret"));
    let body: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(body["model"], "test-model");
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["messages"][1]["content"], "hi");
}
