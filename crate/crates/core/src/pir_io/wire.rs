use crate::error::{PirError, Result};

pub const WIRE_MAGIC: &[u8; 4] = b"PIR1";
/// Magic, type byte, `u64` little-endian payload length.
pub const HEADER_LEN: usize = 4 + 1 + 8;
pub const MAX_PAYLOAD: u64 = 256 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MessageType {
    /// Payload: a matrix file holding `Q`.
    Query = 1,
    /// Payload: a matrix file holding `R`.
    Response = 2,
    /// Payload: UTF-8 reason.
    Error = 3,
    /// Empty payload.
    DbInfoReq = 4,
    /// Payload: `t`, `L`, `r`, `m'` as `u64` little endian.
    DbInfo = 5,
}

impl MessageType {
    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            1 => MessageType::Query,
            2 => MessageType::Response,
            3 => MessageType::Error,
            4 => MessageType::DbInfoReq,
            5 => MessageType::DbInfo,
            _ => return None,
        })
    }
}

/// One framed message. The type byte is kept raw so unknown types can be reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireFrame {
    pub kind: u8,
    pub payload: Vec<u8>,
}

impl WireFrame {
    pub fn new(kind: MessageType, payload: Vec<u8>) -> Self {
        WireFrame { kind: kind as u8, payload }
    }

    pub fn error(reason: &str) -> Self {
        Self::new(MessageType::Error, reason.as_bytes().to_vec())
    }

    pub fn message_type(&self) -> Option<MessageType> {
        MessageType::from_byte(self.kind)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(WIRE_MAGIC);
        out.push(self.kind);
        out.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses a header, returning the type byte and payload length.
    pub fn decode_header(header: &[u8]) -> Result<(u8, u64)> {
        if header.len() < HEADER_LEN {
            return Err(PirError::Format("short header".into()));
        }
        if &header[..4] != WIRE_MAGIC {
            return Err(PirError::Format("bad magic".into()));
        }
        let len = u64::from_le_bytes(header[5..HEADER_LEN].try_into().expect("8 bytes"));
        if len > MAX_PAYLOAD {
            return Err(PirError::Format("payload too large".into()));
        }
        Ok((header[4], len))
    }

    /// Decodes exactly one frame occupying all of `bytes`.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let (kind, len) = Self::decode_header(bytes)?;
        let body = &bytes[HEADER_LEN..];
        if (body.len() as u64) < len {
            return Err(PirError::Format("short payload".into()));
        }
        if body.len() as u64 > len {
            return Err(PirError::Format("trailing bytes after payload".into()));
        }
        Ok(WireFrame { kind, payload: body.to_vec() })
    }

    pub fn read_from<R: std::io::Read>(reader: &mut R) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        reader.read_exact(&mut header)?;
        let (kind, len) = Self::decode_header(&header)?;
        let mut payload = vec![0u8; len as usize];
        reader.read_exact(&mut payload)?;
        Ok(WireFrame { kind, payload })
    }

    pub fn write_to<W: std::io::Write>(&self, writer: &mut W) -> Result<()> {
        writer.write_all(&self.encode())?;
        Ok(writer.flush()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = WireFrame::new(MessageType::Query, vec![1, 2, 3]);
        let bytes = f.encode();
        assert_eq!(&bytes[..5], b"PIR1\x01");
        assert_eq!(bytes.len(), HEADER_LEN + 3);
        assert_eq!(WireFrame::decode(&bytes).unwrap(), f);
        let mut cursor = std::io::Cursor::new(bytes);
        assert_eq!(WireFrame::read_from(&mut cursor).unwrap(), f);
    }

    #[test]
    fn rejects_malformed() {
        let good = WireFrame::new(MessageType::DbInfoReq, vec![]).encode();
        assert!(WireFrame::decode(&good[..5]).is_err());
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(WireFrame::decode(&bad).is_err());
        let mut long = good.clone();
        long[5] = 9;
        assert!(WireFrame::decode(&long).is_err());
        let mut huge = good;
        huge[5..13].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(WireFrame::decode(&huge).is_err());
    }
}
