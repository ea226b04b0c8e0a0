//! Byte formats: `RS3S` for a built index, `RSBV` for a plain bit vector.
//!
//! All integers are little-endian. Both formats end in a 64-bit FNV-1a hash of
//! every preceding byte.
//!
//! ```text
//! RS3S:  "RS3S" | version u16 | l0 u16 | k u8 | alpha u8 | tree u8 | select0 u8
//!        | policy u8 | policy_a u64 | policy_b u64 | n u64 | components u32
//!        | { tag u8 | width u8 | count u64 | ceil(count*width/64) x u64 }*
//!        | fnv1a u64
//! RSBV:  "RSBV" | version u16 | n u64 | ceil(n/64) x u64 | fnv1a u64
//! ```

use std::hash::Hasher;

use fnv::FnvHasher;
use rs3::{APolicy, BitVector, Part, RankSelect, RsConfig, TreeKind};

pub const INDEX_MAGIC: &[u8; 4] = b"RS3S";
pub const BITS_MAGIC: &[u8; 4] = b"RSBV";
pub const VERSION: u16 = 1;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FormatError {
    #[error("bad magic at offset {offset}")]
    BadMagic { offset: usize },
    #[error("unsupported format version {version} at offset {offset}")]
    UnsupportedVersion { offset: usize, version: u16 },
    #[error("truncated stream: needed {needed} more byte(s) at offset {offset}")]
    Truncated { offset: usize, needed: usize },
    #[error(
        "checksum mismatch at offset {offset}: stored {stored:#018x}, computed {computed:#018x}"
    )]
    Checksum {
        offset: usize,
        stored: u64,
        computed: u64,
    },
    #[error("invalid {what} at offset {offset}")]
    Invalid { offset: usize, what: &'static str },
    #[error("{extra} trailing byte(s) after offset {offset}")]
    Trailing { offset: usize, extra: usize },
    #[error("inconsistent index: {0}")]
    Index(#[from] rs3::Error),
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

fn put_u16(out: &mut Vec<u8>, x: u16) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn put_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, x: u64) {
    out.extend_from_slice(&x.to_le_bytes());
}

/// Appends the checksum of `out` to it.
pub fn seal(mut out: Vec<u8>) -> Vec<u8> {
    let sum = fnv1a(&out);
    put_u64(&mut out, sum);
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], FormatError> {
        let avail = self.bytes.len() - self.pos;
        if avail < k {
            return Err(FormatError::Truncated {
                offset: self.pos,
                needed: k - avail,
            });
        }
        let s = &self.bytes[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn words(&mut self, count: usize) -> Result<Vec<u64>, FormatError> {
        let bytes = count.checked_mul(8).ok_or(FormatError::Invalid {
            offset: self.pos,
            what: "payload length",
        })?;
        Ok(self
            .take(bytes)?
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn invalid(&self, at: usize, what: &'static str) -> FormatError {
        FormatError::Invalid { offset: at, what }
    }
}

/// Splits off and checks the trailing checksum, then checks the magic and
/// version. Returns a reader positioned after the version.
fn open<'a>(bytes: &'a [u8], magic: &[u8; 4]) -> Result<Reader<'a>, FormatError> {
    let mut head = Reader { bytes, pos: 0 };
    if head.take(4)? != magic {
        return Err(FormatError::BadMagic { offset: 0 });
    }
    let version = head.u16()?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion { offset: 4, version });
    }
    if bytes.len() < 6 + 8 {
        return Err(FormatError::Truncated {
            offset: bytes.len(),
            needed: 6 + 8 - bytes.len(),
        });
    }
    let body = bytes.len() - 8;
    let stored = u64::from_le_bytes(bytes[body..].try_into().unwrap());
    let computed = fnv1a(&bytes[..body]);
    if stored != computed {
        return Err(FormatError::Checksum {
            offset: body,
            stored,
            computed,
        });
    }
    Ok(Reader {
        bytes: &bytes[..body],
        pos: 6,
    })
}

fn close(r: &Reader<'_>) -> Result<(), FormatError> {
    if r.pos != r.bytes.len() {
        return Err(FormatError::Trailing {
            offset: r.pos,
            extra: r.bytes.len() - r.pos,
        });
    }
    Ok(())
}

pub fn encode_bits(v: &BitVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(22 + 8 * v.words().len());
    out.extend_from_slice(BITS_MAGIC);
    put_u16(&mut out, VERSION);
    put_u64(&mut out, v.len() as u64);
    for &w in v.words() {
        put_u64(&mut out, w);
    }
    seal(out)
}

pub fn decode_bits(bytes: &[u8]) -> Result<BitVector, FormatError> {
    let mut r = open(bytes, BITS_MAGIC)?;
    let at = r.pos;
    let n = usize::try_from(r.u64()?).map_err(|_| r.invalid(at, "bit count"))?;
    let words = r.words(n.div_ceil(64))?;
    close(&r)?;
    BitVector::from_words(words, n).map_err(|_| r.invalid(at, "bit vector tail"))
}

fn policy_code(p: APolicy) -> (u8, u64, u64) {
    match p {
        APolicy::Star => (0, 0, 0),
        APolicy::Fast => (1, 0, 0),
        APolicy::Min => (2, 0, 0),
        APolicy::Explicit { a, b } => (3, a as u64, b as u64),
    }
}

pub fn encode_index(rs: &RankSelect) -> Vec<u8> {
    let c = rs.config();
    let parts = rs.parts();
    let payload: usize = parts.iter().map(|p| 10 + 8 * p.words.len()).sum();
    let mut out = Vec::with_capacity(48 + payload);
    out.extend_from_slice(INDEX_MAGIC);
    put_u16(&mut out, VERSION);
    put_u16(&mut out, c.l0 as u16);
    out.push(c.levels);
    out.push(c.alpha as u8);
    out.push(match c.tree {
        TreeKind::ThreeStar => 0,
        TreeKind::TwoStar => 1,
    });
    out.push(c.select0 as u8);
    let (code, a, b) = policy_code(c.a_policy);
    out.push(code);
    put_u64(&mut out, a);
    put_u64(&mut out, b);
    put_u64(&mut out, rs.len() as u64);
    put_u32(&mut out, parts.len() as u32);
    for p in &parts {
        out.push(p.tag);
        out.push(p.width);
        put_u64(&mut out, p.len);
        for &w in &p.words {
            put_u64(&mut out, w);
        }
    }
    seal(out)
}

pub fn decode_index(bytes: &[u8]) -> Result<RankSelect, FormatError> {
    let mut r = open(bytes, INDEX_MAGIC)?;
    let l0 = r.u16()? as usize;
    let levels = r.u8()?;
    let alpha = r.u8()? as usize;
    let tree_at = r.pos;
    let tree = match r.u8()? {
        0 => TreeKind::ThreeStar,
        1 => TreeKind::TwoStar,
        _ => return Err(r.invalid(tree_at, "tree kind")),
    };
    let sel_at = r.pos;
    let select0 = match r.u8()? {
        0 => false,
        1 => true,
        _ => return Err(r.invalid(sel_at, "select0 flag")),
    };
    let pol_at = r.pos;
    let code = r.u8()?;
    let (pa, pb) = (r.u64()?, r.u64()?);
    let a_policy = match code {
        0 => APolicy::Star,
        1 => APolicy::Fast,
        2 => APolicy::Min,
        3 => APolicy::Explicit {
            a: pa as usize,
            b: pb as usize,
        },
        _ => return Err(r.invalid(pol_at, "rate policy")),
    };
    if code != 3 && (pa, pb) != (0, 0) {
        return Err(r.invalid(pol_at + 1, "rates for a non-explicit policy"));
    }
    let n_at = r.pos;
    let n = r.u64()?;
    let count = r.u32()? as usize;

    let mut parts = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let head = r.pos;
        let tag = r.u8()?;
        let width = r.u8()?;
        let len = r.u64()?;
        let part = Part::new(tag, width, len, Vec::new());
        if width > 64 {
            return Err(r.invalid(head + 1, "component width"));
        }
        let words = part
            .expected_words()
            .ok_or_else(|| r.invalid(head + 2, "component length"))?;
        parts.push(Part {
            words: r.words(words)?,
            ..part
        });
    }
    close(&r)?;

    let config = RsConfig {
        l0,
        levels,
        alpha,
        a_policy,
        tree,
        select0,
    };
    if parts.first().map(|p| p.len) != Some(n) {
        return Err(r.invalid(n_at, "bit count"));
    }
    Ok(RankSelect::from_parts(config, &parts)?)
}
