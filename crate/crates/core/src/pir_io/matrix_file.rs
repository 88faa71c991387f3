use crate::error::{PirError, Result};
use crate::linalg::Matrix;

pub const MATRIX_MAGIC: &[u8; 8] = b"PIRMAT01";
const HEADER: usize = 8 + 3 * 8;

/// Binary matrix: magic, `u64` rows, cols and modulus (little endian), then `u32` values row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFile {
    pub modulus: u64,
    pub matrix: Matrix,
}

impl MatrixFile {
    pub fn new(matrix: Matrix, modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        if let Some(&bad) = matrix.data().iter().find(|&&x| x >= modulus) {
            return Err(PirError::Format(format!("value {bad} is not below modulus {modulus}")));
        }
        Ok(MatrixFile { modulus, matrix })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER + 4 * self.matrix.data().len());
        out.extend_from_slice(MATRIX_MAGIC);
        out.extend_from_slice(&(self.matrix.rows() as u64).to_le_bytes());
        out.extend_from_slice(&(self.matrix.cols() as u64).to_le_bytes());
        out.extend_from_slice(&self.modulus.to_le_bytes());
        for &v in self.matrix.data() {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER {
            return Err(PirError::Format("matrix file shorter than its header".into()));
        }
        if &bytes[..8] != MATRIX_MAGIC {
            return Err(PirError::Format("bad matrix magic".into()));
        }
        let word = |i: usize| u64::from_le_bytes(bytes[8 + 8 * i..16 + 8 * i].try_into().expect("8 bytes"));
        let (rows, cols, modulus) = (word(0), word(1), word(2));
        check_modulus(modulus)?;
        let count = rows
            .checked_mul(cols)
            .and_then(|c| c.checked_mul(4))
            .and_then(|c| usize::try_from(c).ok())
            .ok_or_else(|| PirError::Format("matrix dimensions overflow".into()))?;
        if bytes.len() - HEADER != count {
            return Err(PirError::Format(format!(
                "matrix body has {} bytes, expected {count}",
                bytes.len() - HEADER
            )));
        }
        let data: Vec<u64> = bytes[HEADER..]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")) as u64)
            .collect();
        let matrix = Matrix::from_vec(rows as usize, cols as usize, data)?;
        MatrixFile::new(matrix, modulus)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_bytes())?)
    }
}

fn check_modulus(modulus: u64) -> Result<()> {
    if modulus == 0 || modulus > 1 << 32 {
        return Err(PirError::Format(format!("modulus {modulus} outside 1..=2^32")));
    }
    Ok(())
}
