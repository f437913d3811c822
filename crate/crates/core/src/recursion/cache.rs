//! On-disk correlator records.
//!
//! Layout of one record, all integers as LEB128 varints (signed ones zigzagged):
//!
//! ```text
//! magic "OTRW" | version u8 | flavor u8 | twice_genus | n
//! var_count | (name_len name_bytes weight)*
//! text_len text_bytes                      canonical rendering
//! term_count | (exponent* num_len num_be den_len den_be)*
//! ```
//!
//! Numerators are two's-complement big-endian, denominators unsigned big-endian.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, Sign};

use super::{Flavor, RecursionError};
use crate::algebra::{Exponents, LaurentDifferential, Rational, Variable};
use crate::key::CorrelatorKey;

pub const MAGIC: &[u8; 4] = b"OTRW";
pub const VERSION: u8 = 1;

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn put_signed(out: &mut Vec<u8>, v: i64) {
    put_varint(out, ((v << 1) ^ (v >> 63)) as u64);
}

fn put_bytes(out: &mut Vec<u8>, b: &[u8]) {
    put_varint(out, b.len() as u64);
    out.extend_from_slice(b);
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn varint(&mut self) -> Result<u64, String> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = *self.buf.get(self.pos).ok_or("truncated varint")?;
            self.pos += 1;
            v |= ((b & 0x7f) as u64) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err("varint too long".into())
    }

    fn signed(&mut self) -> Result<i64, String> {
        let z = self.varint()?;
        Ok((z >> 1) as i64 ^ -((z & 1) as i64))
    }

    fn bytes(&mut self) -> Result<&'a [u8], String> {
        let len = self.varint()? as usize;
        let end = self.pos.checked_add(len).ok_or("length overflow")?;
        let s = self.buf.get(self.pos..end).ok_or("truncated field")?;
        self.pos = end;
        Ok(s)
    }

    fn byte(&mut self) -> Result<u8, String> {
        let b = *self.buf.get(self.pos).ok_or("truncated header")?;
        self.pos += 1;
        Ok(b)
    }
}

/// Serializes one correlator. Equal inputs always give identical bytes.
pub fn encode(flavor: Flavor, key: CorrelatorKey, value: &LaurentDifferential) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(flavor.tag());
    put_varint(&mut out, key.twice_genus() as u64);
    put_varint(&mut out, key.n as u64);
    put_varint(&mut out, value.vars().len() as u64);
    for v in value.vars() {
        put_bytes(&mut out, v.name().as_bytes());
        put_signed(&mut out, v.weight() as i64);
    }
    put_bytes(&mut out, value.to_string().as_bytes());
    put_varint(&mut out, value.len() as u64);
    for (e, c) in value.terms() {
        for &x in e {
            put_signed(&mut out, x as i64);
        }
        put_bytes(&mut out, &c.numer().to_signed_bytes_be());
        put_bytes(&mut out, &c.denom().to_bytes_be().1);
    }
    out
}

/// Parses a record. The embedded text must match the decoded value.
pub fn decode(bytes: &[u8]) -> Result<(Flavor, CorrelatorKey, LaurentDifferential), String> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if bytes.get(..4) != Some(MAGIC.as_slice()) {
        return Err("bad magic".into());
    }
    r.pos = 4;
    let version = r.byte()?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let flavor = Flavor::from_tag(r.byte()?).ok_or("unknown flavor")?;
    let twice = u32::try_from(r.varint()?).map_err(|_| "genus out of range")?;
    let n = u32::try_from(r.varint()?).map_err(|_| "n out of range")?;
    let var_count = r.varint()? as usize;
    let mut vars = Vec::with_capacity(var_count.min(64));
    for _ in 0..var_count {
        let name = std::str::from_utf8(r.bytes()?).map_err(|_| "variable name is not utf-8")?;
        let weight = i32::try_from(r.signed()?).map_err(|_| "weight out of range")?;
        vars.push(Variable::new(name, weight));
    }
    let text = std::str::from_utf8(r.bytes()?).map_err(|_| "text is not utf-8")?.to_string();
    let term_count = r.varint()? as usize;
    let mut terms = Vec::with_capacity(term_count.min(1 << 20));
    for _ in 0..term_count {
        let mut e = Exponents::with_capacity(var_count);
        for _ in 0..var_count {
            e.push(i32::try_from(r.signed()?).map_err(|_| "exponent out of range")?);
        }
        let num = BigInt::from_signed_bytes_be(r.bytes()?);
        let den = BigInt::from_bytes_be(Sign::Plus, r.bytes()?);
        let c = Rational::from_bigints(num, den).map_err(|e| e.to_string())?;
        if c.is_zero() || !c.is_normalized() {
            return Err("coefficient not in lowest terms".into());
        }
        terms.push((e, c));
    }
    if r.pos != bytes.len() {
        return Err("trailing bytes".into());
    }
    let value = LaurentDifferential::from_terms(vars, terms);
    if value.len() != term_count {
        return Err("duplicate terms".into());
    }
    if value.to_string() != text {
        return Err("text rendering does not match terms".into());
    }
    Ok((flavor, CorrelatorKey::new(twice, n), value))
}

/// Directory of correlator records, one file per flavor and key.
#[derive(Clone, Debug)]
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, RecursionError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(DiskCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, flavor: Flavor, key: CorrelatorKey) -> PathBuf {
        self.dir
            .join(format!("{flavor}-g{}-n{}.otrw", key.twice_genus(), key.n))
    }

    pub fn load(
        &self,
        flavor: Flavor,
        key: CorrelatorKey,
    ) -> Result<Option<LaurentDifferential>, RecursionError> {
        let path = self.path(flavor, key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let corrupt = |reason: String| RecursionError::CacheCorrupt {
            path: path.display().to_string(),
            reason,
        };
        let (f, k, value) = decode(&bytes).map_err(corrupt)?;
        if f != flavor || k != key {
            return Err(corrupt(format!("record holds {f} {k}")));
        }
        Ok(Some(value))
    }

    /// Writes through a temporary file and a rename, so readers never see partial records.
    pub fn store(
        &self,
        flavor: Flavor,
        key: CorrelatorKey,
        value: &LaurentDifferential,
    ) -> Result<(), RecursionError> {
        let path = self.path(flavor, key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&encode(flavor, key, value))?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}
