use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new(magic: &[u8; 8], version: u32) -> Self {
        let mut buf = magic.to_vec();
        buf.extend(version.to_le_bytes());
        Self { buf }
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend(v.to_le_bytes());
    }

    pub fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    pub fn f64(&mut self, v: f64) {
        self.buf.extend(v.to_le_bytes());
    }

    pub fn bytes(&mut self, v: &[u8]) {
        self.buf.extend(v);
    }

    pub fn str(&mut self, s: &str) {
        self.usize(s.len());
        self.buf.extend(s.as_bytes());
    }

    pub fn strs(&mut self, v: &[String]) {
        self.usize(v.len());
        v.iter().for_each(|s| self.str(s));
    }

    pub fn f64s(&mut self, v: &[f64]) {
        self.usize(v.len());
        v.iter().for_each(|x| self.f64(*x));
    }

    pub fn usizes(&mut self, v: &[usize]) {
        self.usize(v.len());
        v.iter().for_each(|x| self.usize(*x));
    }

    /// Appends the trailing checksum.
    pub fn finish(mut self) -> Vec<u8> {
        let digest = Sha256::digest(&self.buf);
        self.buf.extend(digest);
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

fn truncated() -> Error {
    Error::Format("file is truncated".into())
}

impl<'a> Reader<'a> {
    /// Checks magic, version and checksum; the reader is positioned after the version.
    pub fn open(data: &'a [u8], magic: &[u8; 8], version: u32, what: &str) -> Result<Self> {
        if data.len() < 8 || &data[..8] != magic {
            return Err(Error::Format(format!("not a {what} file (bad magic bytes)")));
        }
        if data.len() < 12 + 32 {
            return Err(truncated());
        }
        let found = u32::from_le_bytes(data[8..12].try_into().expect("4 bytes"));
        if found != version {
            return Err(Error::Format(format!("unsupported {what} format version {found} (expected {version})")));
        }
        let (body, digest) = data.split_at(data.len() - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(Error::Format(format!("{what} checksum mismatch (file corrupted)")));
        }
        Ok(Self { data: body, pos: 12 })
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len()).ok_or_else(truncated)?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Format("count overflows usize".into()))
    }

    /// A count of items at least `item_size` bytes each, checked against the
    /// remaining input before anything is allocated.
    fn count(&mut self, item_size: usize) -> Result<usize> {
        let n = self.usize()?;
        if n.saturating_mul(item_size) > self.data.len() - self.pos {
            return Err(truncated());
        }
        Ok(n)
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        self.take(n)
    }

    pub fn str(&mut self) -> Result<String> {
        let n = self.count(1)?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::Format("invalid UTF-8 string".into()))
    }

    pub fn strs(&mut self) -> Result<Vec<String>> {
        let n = self.count(8)?;
        (0..n).map(|_| self.str()).collect()
    }

    pub fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.count(8)?;
        (0..n).map(|_| self.f64()).collect()
    }

    /// Exactly `n` floats without a length prefix.
    pub fn f64_array(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or_else(truncated)?)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    }

    pub fn usizes(&mut self) -> Result<Vec<usize>> {
        let n = self.count(8)?;
        (0..n).map(|_| self.usize()).collect()
    }

    pub fn finish(self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::Format("trailing bytes after payload".into()));
        }
        Ok(())
    }
}
