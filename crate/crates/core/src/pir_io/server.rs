//! Answering framed queries over TCP.

use std::io::{BufReader, BufWriter};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;

use super::matrix_file::MatrixFile;
use super::wire::{MessageType, WireFrame};
use crate::error::{PirError, Result};
use crate::pir::{server_respond, Database};

/// Answers one request frame. Malformed input produces an error frame, never a panic.
pub fn respond_to_frame(db: &Database, frame: &WireFrame) -> WireFrame {
    match frame.message_type() {
        Some(MessageType::Query) => match answer_query(db, &frame.payload) {
            Ok(bytes) => WireFrame::new(MessageType::Response, bytes),
            Err(e) => WireFrame::error(&reason(&e)),
        },
        Some(MessageType::DbInfoReq) => {
            let shape = db.shape();
            let mut payload = Vec::with_capacity(32);
            for v in [shape.t as u64, shape.l as u64, shape.r as u64, db.m_prime()] {
                payload.extend_from_slice(&v.to_le_bytes());
            }
            WireFrame::new(MessageType::DbInfo, payload)
        }
        _ => WireFrame::error(&format!("unknown message type {}", frame.kind)),
    }
}

/// Decodes, answers and encodes one request.
pub fn respond_to_bytes(db: &Database, request: &[u8]) -> Vec<u8> {
    let reply = match WireFrame::decode(request) {
        Ok(frame) => respond_to_frame(db, &frame),
        Err(e) => WireFrame::error(&reason(&e)),
    };
    reply.encode()
}

fn reason(e: &PirError) -> String {
    match e {
        PirError::Format(s) => s.clone(),
        other => other.to_string(),
    }
}

fn answer_query(db: &Database, payload: &[u8]) -> Result<Vec<u8>> {
    let q = MatrixFile::from_bytes(payload)?;
    let expected = db.entries().cols();
    if q.matrix.rows() != expected {
        return Err(PirError::Format(format!("row count: expected {expected}, got {}", q.matrix.rows())));
    }
    if q.modulus % db.m_prime() != 0 {
        return Err(PirError::Format(format!(
            "query modulus {} is not a multiple of m' = {}",
            q.modulus,
            db.m_prime()
        )));
    }
    let r = server_respond(db, &q.matrix, q.modulus)?;
    Ok(MatrixFile::new(r, q.modulus)?.to_bytes())
}

/// Serves frames on one connection until the peer closes it or sends a bad header.
pub fn handle_connection(db: &Database, stream: TcpStream) -> Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    loop {
        let frame = match WireFrame::read_from(&mut reader) {
            Ok(f) => f,
            Err(PirError::Io(_)) => return Ok(()),
            Err(e) => {
                WireFrame::error(&reason(&e)).write_to(&mut writer)?;
                return Ok(());
            }
        };
        respond_to_frame(db, &frame).write_to(&mut writer)?;
    }
}

/// Accepts connections forever, one thread each. `max_connections` stops after that many, for tests.
pub fn serve_listener(db: Arc<Database>, listener: TcpListener, max_connections: Option<usize>) -> Result<()> {
    let mut handles = Vec::new();
    for (count, stream) in listener.incoming().enumerate() {
        let stream = stream?;
        let db = Arc::clone(&db);
        handles.push(std::thread::spawn(move || {
            let _ = handle_connection(&db, stream);
        }));
        if max_connections.is_some_and(|max| count + 1 >= max) {
            break;
        }
    }
    for h in handles {
        let _ = h.join();
    }
    Ok(())
}

pub fn serve(db: Database, bind: impl ToSocketAddrs) -> Result<()> {
    serve_listener(Arc::new(db), TcpListener::bind(bind)?, None)
}

/// Sends one frame and waits for the reply.
pub fn send(addr: impl ToSocketAddrs, frame: &WireFrame) -> Result<WireFrame> {
    let stream = TcpStream::connect(addr)?;
    let mut writer = BufWriter::new(stream.try_clone()?);
    frame.write_to(&mut writer)?;
    WireFrame::read_from(&mut BufReader::new(stream))
}

/// Sends a query matrix and unwraps the response matrix.
pub fn send_query(addr: impl ToSocketAddrs, query: &MatrixFile) -> Result<MatrixFile> {
    let reply = send(addr, &WireFrame::new(MessageType::Query, query.to_bytes()))?;
    match reply.message_type() {
        Some(MessageType::Response) => MatrixFile::from_bytes(&reply.payload),
        Some(MessageType::Error) => Err(PirError::Format(format!(
            "server error: {}",
            String::from_utf8_lossy(&reply.payload)
        ))),
        _ => Err(PirError::Format(format!("unexpected reply type {}", reply.kind))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn db() -> Database {
        Database::new(Matrix::from_rows(&[vec![1, 2, 1]], 3).unwrap(), 3, 1, 3).unwrap()
    }

    fn error_text(bytes: &[u8]) -> String {
        let f = WireFrame::decode(bytes).unwrap();
        assert_eq!(f.message_type(), Some(MessageType::Error));
        String::from_utf8(f.payload).unwrap()
    }

    #[test]
    fn answers_query() {
        let q = MatrixFile::new(Matrix::identity(3), 15).unwrap();
        let out = respond_to_bytes(&db(), &WireFrame::new(MessageType::Query, q.to_bytes()).encode());
        let f = WireFrame::decode(&out).unwrap();
        assert_eq!(f.message_type(), Some(MessageType::Response));
        assert_eq!(MatrixFile::from_bytes(&f.payload).unwrap().matrix.row(0), &[1, 2, 1]);
    }

    #[test]
    fn reports_errors() {
        assert_eq!(error_text(&respond_to_bytes(&db(), b"PI")), "short header");
        let q = MatrixFile::new(Matrix::identity(2), 15).unwrap();
        let out = respond_to_bytes(&db(), &WireFrame::new(MessageType::Query, q.to_bytes()).encode());
        assert_eq!(error_text(&out), "row count: expected 3, got 2");
        let q = MatrixFile::new(Matrix::identity(3), 10).unwrap();
        let out = respond_to_bytes(&db(), &WireFrame::new(MessageType::Query, q.to_bytes()).encode());
        assert!(error_text(&out).contains("not a multiple"));
        let out = respond_to_bytes(&db(), &WireFrame { kind: 9, payload: vec![] }.encode());
        assert_eq!(error_text(&out), "unknown message type 9");
    }

    #[test]
    fn db_info() {
        let out = respond_to_bytes(&db(), &WireFrame::new(MessageType::DbInfoReq, vec![]).encode());
        let f = WireFrame::decode(&out).unwrap();
        let words: Vec<u64> = f.payload.chunks(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
        assert_eq!(words, vec![3, 1, 1, 3]);
    }

    #[test]
    fn tcp_round_trip() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = std::thread::spawn(move || serve_listener(Arc::new(db()), listener, Some(1)));
        let q = MatrixFile::new(Matrix::identity(3), 15).unwrap();
        let r = send_query(addr, &q).unwrap();
        assert_eq!(r.matrix.row(0), &[1, 2, 1]);
        server.join().unwrap().unwrap();
    }
}
