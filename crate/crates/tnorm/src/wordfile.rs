//! The on-disk word multiset format: a checksummed header followed by
//! sorted (serialized element, multiplicity) records.
//!
//! Binary layout, all integers little-endian unless noted:
//!   magic "TWF1" | version u16 | variant u8 | flags u8 | n u32 |
//!   entry_count u64 | total_mass 32-byte LE | body_checksum u64 | body
//! Body records: key length (LEB128) | key bytes | multiplicity (LEB128;
//! zigzag-folded when the signed flag is set). Keys are strictly increasing
//! in byte order.
//!
//! The text twin (one `base64key\tmultiplicity` line per record, sorted by
//! raw key bytes) exists for debugging and interop.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

pub const MAGIC: [u8; 4] = *b"TWF1";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 1 + 1 + 4 + 8 + 32 + 8;

const FLAG_SIGNED: u8 = 1;

/// What a file holds; part of the cache key.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[repr(u8)]
pub enum Variant {
    /// The expansion of (ab)^n.
    AbPower = 1,
    /// The expansion of (ba)^n (element-wise inverses of AbPower).
    BaPower = 2,
    /// The C-half file: the expansion of C b (ab)^{n-1}.
    Half = 3,
    /// Words (or their reverse-inverses) strictly below their reverse-inverse.
    Small = 4,
    /// Words equal to their reverse-inverse.
    Equal = 5,
    /// As Small, for the inverted half file.
    SmallPrime = 6,
    /// As Equal, for the inverted half file.
    EqualPrime = 7,
    /// A signed group-ring vector.
    GroupRing = 8,
    /// An intermediate sorted run of an external sort.
    SortRun = 9,
}

impl Variant {
    fn from_u8(v: u8) -> Result<Variant> {
        Ok(match v {
            1 => Variant::AbPower,
            2 => Variant::BaPower,
            3 => Variant::Half,
            4 => Variant::Small,
            5 => Variant::Equal,
            6 => Variant::SmallPrime,
            7 => Variant::EqualPrime,
            8 => Variant::GroupRing,
            9 => Variant::SortRun,
            _ => return Err(Error::Decode(format!("unknown variant {v}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Header {
    pub variant: Variant,
    pub signed: bool,
    pub n: u32,
    pub entry_count: u64,
    pub total_mass: BigUint,
    pub body_checksum: u64,
}

fn fnv1a64(state: u64, bytes: &[u8]) -> u64 {
    let mut h = state;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

pub const FNV_SEED: u64 = 0xcbf2_9ce4_8422_2325;

fn encode_header(h: &Header) -> Result<[u8; HEADER_LEN]> {
    let mut out = [0u8; HEADER_LEN];
    out[0..4].copy_from_slice(&MAGIC);
    out[4..6].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
    out[6] = h.variant as u8;
    out[7] = if h.signed { FLAG_SIGNED } else { 0 };
    out[8..12].copy_from_slice(&h.n.to_le_bytes());
    out[12..20].copy_from_slice(&h.entry_count.to_le_bytes());
    let mass = h.total_mass.to_bytes_le();
    if mass.len() > 32 {
        return Err(Error::Integrity("total mass exceeds header field".into()));
    }
    out[20..20 + mass.len()].copy_from_slice(&mass);
    out[52..60].copy_from_slice(&h.body_checksum.to_le_bytes());
    Ok(out)
}

fn decode_header(bytes: &[u8; HEADER_LEN]) -> Result<Header> {
    if bytes[0..4] != MAGIC {
        return Err(Error::Decode("bad magic".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(Error::Decode(format!("unsupported format version {version}")));
    }
    Ok(Header {
        variant: Variant::from_u8(bytes[6])?,
        signed: bytes[7] & FLAG_SIGNED != 0,
        n: u32::from_le_bytes(bytes[8..12].try_into().unwrap()),
        entry_count: u64::from_le_bytes(bytes[12..20].try_into().unwrap()),
        total_mass: BigUint::from_bytes_le(&bytes[20..52]),
        body_checksum: u64::from_le_bytes(bytes[52..60].try_into().unwrap()),
    })
}

fn write_leb128_biguint(out: &mut Vec<u8>, v: &BigUint) {
    let mut v = v.clone();
    let mask = BigUint::from(0x7fu8);
    loop {
        let byte = (&v & &mask).to_u32_digits().first().copied().unwrap_or(0) as u8;
        v >>= 7u32;
        if v.is_zero() {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn zigzag(v: &BigInt) -> BigUint {
    // non-negative m -> 2m, negative m -> 2|m| - 1
    let two = BigUint::from(2u8);
    let mag = v.magnitude().clone();
    if v.is_negative() {
        mag * two - BigUint::one()
    } else {
        mag * two
    }
}

fn unzigzag(v: BigUint) -> BigInt {
    let (half, rem) = num_integer::Integer::div_rem(&v, &BigUint::from(2u8));
    if rem.is_zero() {
        BigInt::from_biguint(Sign::Plus, half)
    } else {
        -BigInt::from_biguint(Sign::Plus, half + BigUint::one())
    }
}

/// Streaming writer; keys must arrive in strictly increasing byte order.
pub struct WordFileWriter {
    path: PathBuf,
    file: BufWriter<File>,
    variant: Variant,
    signed: bool,
    n: u32,
    entry_count: u64,
    total_mass: BigUint,
    checksum: u64,
    last_key: Option<Vec<u8>>,
    buf: Vec<u8>,
}

impl WordFileWriter {
    pub fn create(path: &Path, variant: Variant, signed: bool, n: u32) -> Result<Self> {
        let mut file = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        // placeholder header; rewritten on finish
        file.write_all(&[0u8; HEADER_LEN]).map_err(|e| Error::io(path, e))?;
        Ok(WordFileWriter {
            path: path.to_path_buf(),
            file,
            variant,
            signed,
            n,
            entry_count: 0,
            total_mass: BigUint::zero(),
            checksum: FNV_SEED,
            last_key: None,
            buf: Vec::new(),
        })
    }

    pub fn push(&mut self, key: &[u8], multiplicity: &BigInt) -> Result<()> {
        if multiplicity.is_zero() {
            return Ok(());
        }
        if !self.signed && multiplicity.is_negative() {
            return Err(Error::Integrity("negative multiplicity in unsigned file".into()));
        }
        if let Some(last) = &self.last_key {
            if key <= last.as_slice() {
                return Err(Error::Integrity(format!(
                    "keys out of order while writing {}",
                    self.path.display()
                )));
            }
        }
        self.last_key = Some(key.to_vec());
        self.buf.clear();
        write_leb128_biguint(&mut self.buf, &BigUint::from(key.len() as u64));
        self.buf.extend_from_slice(key);
        if self.signed {
            let folded = zigzag(multiplicity);
            write_leb128_biguint(&mut self.buf, &folded);
        } else {
            write_leb128_biguint(&mut self.buf, multiplicity.magnitude());
        }
        self.checksum = fnv1a64(self.checksum, &self.buf);
        self.file.write_all(&self.buf).map_err(|e| Error::io(&self.path, e))?;
        self.entry_count += 1;
        self.total_mass += multiplicity.magnitude();
        Ok(())
    }

    pub fn push_unsigned(&mut self, key: &[u8], multiplicity: &BigUint) -> Result<()> {
        self.push(key, &BigInt::from_biguint(Sign::Plus, multiplicity.clone()))
    }

    /// Writes the real header and returns it.
    pub fn finish(mut self) -> Result<Header> {
        let header = Header {
            variant: self.variant,
            signed: self.signed,
            n: self.n,
            entry_count: self.entry_count,
            total_mass: self.total_mass.clone(),
            body_checksum: self.checksum,
        };
        let bytes = encode_header(&header)?;
        self.file.flush().map_err(|e| Error::io(&self.path, e))?;
        let file = self.file.get_mut();
        file.seek(SeekFrom::Start(0)).map_err(|e| Error::io(&self.path, e))?;
        file.write_all(&bytes).map_err(|e| Error::io(&self.path, e))?;
        file.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(header)
    }
}

/// Streaming reader. Verifies key order record by record and the checksum,
/// entry count and mass once the body has been fully consumed.
pub struct WordFileReader {
    path: PathBuf,
    file: BufReader<File>,
    header: Header,
    read_entries: u64,
    read_mass: BigUint,
    checksum: u64,
    last_key: Option<Vec<u8>>,
    finished: bool,
}

impl WordFileReader {
    pub fn open(path: &Path) -> Result<Self> {
        let mut file = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
        let mut bytes = [0u8; HEADER_LEN];
        file.read_exact(&mut bytes).map_err(|e| Error::io(path, e))?;
        let header = decode_header(&bytes).map_err(|e| Error::FileIntegrity {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Ok(WordFileReader {
            path: path.to_path_buf(),
            file,
            header,
            read_entries: 0,
            read_mass: BigUint::zero(),
            checksum: FNV_SEED,
            last_key: None,
            finished: false,
        })
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    fn integrity(&self, reason: impl Into<String>) -> Error {
        Error::FileIntegrity { path: self.path.clone(), reason: reason.into() }
    }

    fn read_leb128(&mut self, raw: &mut Vec<u8>) -> Result<BigUint> {
        let mut out = BigUint::zero();
        let mut shift = 0u32;
        loop {
            let mut byte = [0u8; 1];
            self.file
                .read_exact(&mut byte)
                .map_err(|_| self.integrity("truncated record"))?;
            raw.push(byte[0]);
            out |= BigUint::from(byte[0] & 0x7f) << shift;
            if byte[0] & 0x80 == 0 {
                return Ok(out);
            }
            shift += 7;
            if shift > 8 * 40 {
                return Err(self.integrity("runaway varint"));
            }
        }
    }

    /// Next record, or None at the verified end of the body.
    pub fn next_entry(&mut self) -> Result<Option<(Vec<u8>, BigInt)>> {
        if self.finished {
            return Ok(None);
        }
        if self.read_entries == self.header.entry_count {
            self.finished = true;
            if self.checksum != self.header.body_checksum {
                return Err(self.integrity("body checksum mismatch"));
            }
            if self.read_mass != self.header.total_mass {
                return Err(self.integrity("total mass mismatch"));
            }
            // the body must end exactly here
            let mut probe = [0u8; 1];
            match self.file.read(&mut probe) {
                Ok(0) => {}
                Ok(_) => return Err(self.integrity("trailing bytes after body")),
                Err(e) => return Err(Error::io(&self.path, e)),
            }
            return Ok(None);
        }
        let mut raw = Vec::with_capacity(24);
        let key_len = self.read_leb128(&mut raw)?;
        let key_len = usize::try_from(key_len).map_err(|_| self.integrity("key length overflow"))?;
        if key_len == 0 || key_len > 1 << 20 {
            return Err(self.integrity("implausible key length"));
        }
        let mut key = vec![0u8; key_len];
        self.file
            .read_exact(&mut key)
            .map_err(|_| self.integrity("truncated key"))?;
        raw.extend_from_slice(&key);
        let mult_raw = self.read_leb128(&mut raw)?;
        let multiplicity = if self.header.signed {
            unzigzag(mult_raw)
        } else {
            BigInt::from_biguint(Sign::Plus, mult_raw)
        };
        if multiplicity.is_zero() {
            return Err(self.integrity("zero multiplicity record"));
        }
        if let Some(last) = &self.last_key {
            if key <= *last {
                return Err(self.integrity("key order violation"));
            }
        }
        self.checksum = fnv1a64(self.checksum, &raw);
        self.read_entries += 1;
        self.read_mass += multiplicity.magnitude();
        self.last_key = Some(key.clone());
        Ok(Some((key, multiplicity)))
    }

    /// Reads and verifies the remainder of the file.
    pub fn drain(&mut self) -> Result<()> {
        while self.next_entry()?.is_some() {}
        Ok(())
    }
}

/// Full-scan validation: header well-formed, keys ordered, checksum and
/// counters match.
pub fn validate(path: &Path) -> Result<Header> {
    let mut reader = WordFileReader::open(path)?;
    reader.drain()?;
    Ok(reader.header().clone())
}

/// Writes the text twin of a word file.
pub fn export_text(path: &Path, out: &mut impl Write) -> Result<()> {
    use base64::Engine as _;
    let mut reader = WordFileReader::open(path)?;
    while let Some((key, mult)) = reader.next_entry()? {
        let line = format!(
            "{}\t{}\n",
            base64::engine::general_purpose::STANDARD.encode(&key),
            mult
        );
        out.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Reads the text form back into records.
pub fn parse_text_line(line: &str) -> Result<(Vec<u8>, BigInt)> {
    use base64::Engine as _;
    let mut it = line.trim_end().split('\t');
    let key_b64 = it.next().ok_or_else(|| Error::Decode("empty line".into()))?;
    let mult = it.next().ok_or_else(|| Error::Decode("missing multiplicity".into()))?;
    if it.next().is_some() {
        return Err(Error::Decode("too many fields".into()));
    }
    let key = base64::engine::general_purpose::STANDARD
        .decode(key_b64)
        .map_err(|e| Error::Decode(format!("base64: {e}")))?;
    let mult: BigInt = mult.parse().map_err(|e| Error::Decode(format!("multiplicity: {e}")))?;
    Ok((key, mult))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn keys() -> Vec<(Vec<u8>, BigInt)> {
        vec![
            (vec![1, 0, 0, 0], BigInt::from(3)),
            (vec![2, 0, 1, 1], BigInt::from(1u64 << 40) * BigInt::from(1u64 << 40)),
            (vec![2, 1, 0, 0], BigInt::from(7)),
        ]
    }

    #[test]
    fn roundtrip_and_validation() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.twf");
        let mut w = WordFileWriter::create(&path, Variant::AbPower, false, 5).unwrap();
        for (k, m) in keys() {
            w.push(&k, &m).unwrap();
        }
        let header = w.finish().unwrap();
        assert_eq!(header.entry_count, 3);

        let mut r = WordFileReader::open(&path).unwrap();
        let mut got = Vec::new();
        while let Some(e) = r.next_entry().unwrap() {
            got.push(e);
        }
        assert_eq!(got, keys());
        assert_eq!(r.header().n, 5);
        validate(&path).unwrap();
    }

    #[test]
    fn signed_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("s.twf");
        let mut w = WordFileWriter::create(&path, Variant::GroupRing, true, 0).unwrap();
        w.push(&[1, 0, 0, 0], &BigInt::from(-5)).unwrap();
        w.push(&[3, 0, 0, 0], &BigInt::from(2)).unwrap();
        w.finish().unwrap();
        let mut r = WordFileReader::open(&path).unwrap();
        assert_eq!(r.next_entry().unwrap().unwrap().1, BigInt::from(-5));
        assert_eq!(r.next_entry().unwrap().unwrap().1, BigInt::from(2));
        assert!(r.next_entry().unwrap().is_none());
    }

    #[test]
    fn rejects_out_of_order_writes() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("o.twf");
        let mut w = WordFileWriter::create(&path, Variant::AbPower, false, 1).unwrap();
        w.push(&[2, 0], &BigInt::from(1)).unwrap();
        assert!(w.push(&[1, 0], &BigInt::from(1)).is_err());
    }

    #[test]
    fn detects_corruption() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.twf");
        let mut w = WordFileWriter::create(&path, Variant::AbPower, false, 1).unwrap();
        for (k, m) in keys() {
            w.push(&k, &m).unwrap();
        }
        w.finish().unwrap();
        // flip one body byte
        let mut bytes = std::fs::read(&path).unwrap();
        let idx = HEADER_LEN + 2;
        bytes[idx] ^= 0x01;
        std::fs::write(&path, &bytes).unwrap();
        assert!(validate(&path).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("t.twf");
        let mut w = WordFileWriter::create(&path, Variant::AbPower, false, 2).unwrap();
        for (k, m) in keys() {
            w.push(&k, &m).unwrap();
        }
        w.finish().unwrap();
        let mut text = Vec::new();
        export_text(&path, &mut text).unwrap();
        let lines: Vec<_> = std::str::from_utf8(&text).unwrap().lines().collect();
        assert_eq!(lines.len(), 3);
        for (line, expected) in lines.iter().zip(keys()) {
            assert_eq!(parse_text_line(line).unwrap(), expected);
        }
    }

    #[test]
    fn zigzag_fold() {
        for v in [-7i64, -1, 0, 1, 42] {
            assert_eq!(unzigzag(zigzag(&BigInt::from(v))), BigInt::from(v));
        }
    }
}
