//! Line-oriented text formats for keys, signatures and blind transcripts.
//!
//! Every file starts with a header line (`rabin-key v1`, `rabin-sig v1`,
//! `rabin-transcript v1`) followed by `name = value` lines. Numbers are
//! decimal. Output of the writers parses back to the same value, and writing
//! a parsed file reproduces it byte for byte.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::blind::{BlindSignature, TranscriptEntry};
use crate::error::{Error, Result};
use crate::hashing::{DigestAlg, Message, Redundancy};
use crate::keygen::{KeyKind, PaddingSet, PrivateKey, PublicKey};
use crate::numtheory::{Idempotents, SecretModulus};
use crate::schemes::{Scheme, Signature};

pub const KEY_HEADER: &str = "rabin-key v1";
pub const SIG_HEADER: &str = "rabin-sig v1";
pub const TRANSCRIPT_HEADER: &str = "rabin-transcript v1";

struct Fields {
    values: HashMap<String, (usize, String)>,
}

impl Fields {
    fn parse(text: &str, header: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, first)) if first.trim_end() == header => {}
            _ => return Err(Error::parse(1, format!("expected header '{header}'"))),
        }
        let mut values = HashMap::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (name, value) = line
                .split_once(" = ")
                .ok_or_else(|| Error::parse(line_no, "expected 'name = value'"))?;
            let name = name.trim().to_string();
            if values
                .insert(name.clone(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::parse(line_no, format!("duplicate field '{name}'")));
            }
        }
        Ok(Fields { values })
    }

    fn take_str(&mut self, name: &str) -> Result<(usize, String)> {
        self.values
            .remove(name)
            .ok_or_else(|| Error::parse(0, format!("missing field '{name}'")))
    }

    fn take_num(&mut self, name: &str) -> Result<BigUint> {
        let (line, raw) = self.take_str(name)?;
        parse_decimal(&raw)
            .ok_or_else(|| Error::parse(line, format!("'{name}' is not a decimal number")))
    }

    fn has(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    fn finish(self) -> Result<()> {
        match self.values.into_iter().min_by_key(|(_, (line, _))| *line) {
            None => Ok(()),
            Some((name, (line, _))) => {
                Err(Error::parse(line, format!("unexpected field '{name}'")))
            }
        }
    }
}

fn parse_decimal(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
}

fn write_public_fields(out: &mut String, public: &PublicKey) {
    writeln!(out, "{KEY_HEADER}").unwrap();
    writeln!(out, "kind = {}", public.kind).unwrap();
    writeln!(out, "n = {}", public.n).unwrap();
    writeln!(out, "redundancy = {}", public.redundancy).unwrap();
    if let Some(set) = &public.padding {
        for (i, u) in set.members.iter().enumerate() {
            writeln!(out, "u{} = {u}", i + 1).unwrap();
        }
    }
}

pub fn public_key_to_text(public: &PublicKey) -> String {
    let mut out = String::new();
    write_public_fields(&mut out, public);
    out
}

pub fn private_key_to_text(key: &PrivateKey) -> String {
    let mut out = String::new();
    write_public_fields(&mut out, &key.public);
    let s = &key.secret;
    writeln!(out, "p = {}", s.p).unwrap();
    writeln!(out, "q = {}", s.q).unwrap();
    writeln!(out, "psi1 = {}", s.idempotents.psi1).unwrap();
    writeln!(out, "psi2 = {}", s.idempotents.psi2).unwrap();
    out
}

fn take_public(fields: &mut Fields) -> Result<PublicKey> {
    let (line, kind) = fields.take_str("kind")?;
    let kind: KeyKind = kind.parse().map_err(|e: String| Error::parse(line, e))?;
    let n = fields.take_num("n")?;
    let (line, redundancy) = fields.take_str("redundancy")?;
    let redundancy: Redundancy = redundancy
        .parse()
        .map_err(|e: String| Error::parse(line, e))?;
    let padding = if kind == KeyKind::General {
        let members = [
            fields.take_num("u1")?,
            fields.take_num("u2")?,
            fields.take_num("u3")?,
            fields.take_num("u4")?,
        ];
        Some(PaddingSet { members })
    } else {
        None
    };
    Ok(PublicKey {
        kind,
        n,
        redundancy,
        padding,
    })
}

/// Parses a public key. A private key file is accepted too; its secret part
/// is ignored.
pub fn parse_public_key(text: &str) -> Result<PublicKey> {
    let mut fields = Fields::parse(text, KEY_HEADER)?;
    let public = take_public(&mut fields)?;
    for secret in ["p", "q", "psi1", "psi2"] {
        fields.values.remove(secret);
    }
    fields.finish()?;
    Ok(public)
}

pub fn parse_private_key(text: &str) -> Result<PrivateKey> {
    let mut fields = Fields::parse(text, KEY_HEADER)?;
    if !fields.has("p") {
        return Err(Error::parse(0, "not a private key (no 'p' field)"));
    }
    let public = take_public(&mut fields)?;
    let p = fields.take_num("p")?;
    let q = fields.take_num("q")?;
    let psi1 = fields.take_num("psi1")?;
    let psi2 = fields.take_num("psi2")?;
    fields.finish()?;

    let secret = SecretModulus::from_primes_unchecked(p, q)?;
    if secret.n != public.n {
        return Err(Error::InvalidKey("n does not equal p*q".into()));
    }
    if secret.idempotents != (Idempotents { psi1, psi2 }) {
        return Err(Error::InvalidKey(
            "stored idempotents do not match p and q".into(),
        ));
    }
    let key = PrivateKey::assemble(public.kind, secret, public.redundancy, public.padding)?;
    Ok(key)
}

pub fn signature_to_text(sig: &Signature) -> String {
    let mut out = String::new();
    writeln!(out, "{SIG_HEADER}").unwrap();
    writeln!(out, "scheme = {}", sig.scheme()).unwrap();
    write_message(&mut out, "", sig.message());
    for (name, value) in sig.components() {
        writeln!(out, "{name} = {value}").unwrap();
    }
    out
}

fn write_message(out: &mut String, prefix: &str, message: &Message) {
    match message.to_reference(DigestAlg::Sha256) {
        Message::Int(m) => writeln!(out, "{prefix}message = {m}").unwrap(),
        Message::Digest(d) => writeln!(out, "{prefix}message-digest = {d}").unwrap(),
        Message::Bytes(_) => unreachable!("bytes become a digest reference"),
    }
}

fn take_message(fields: &mut Fields, prefix: &str) -> Result<Message> {
    let int_key = format!("{prefix}message");
    let digest_key = format!("{prefix}message-digest");
    if fields.has(&int_key) {
        Ok(Message::Int(fields.take_num(&int_key)?))
    } else {
        Ok(Message::Digest(fields.take_num(&digest_key)?))
    }
}

pub fn parse_signature(text: &str) -> Result<Signature> {
    let mut fields = Fields::parse(text, SIG_HEADER)?;
    let (line, scheme) = fields.take_str("scheme")?;
    let scheme: Scheme = scheme.parse().map_err(|e: String| Error::parse(line, e))?;
    let message = take_message(&mut fields, "")?;
    let sig = match scheme {
        Scheme::Classic => Signature::Classic {
            message,
            padding: fields.take_num("u")?,
            root: fields.take_num("s")?,
        },
        Scheme::General => Signature::General {
            message,
            padding: fields.take_num("u")?,
            root: fields.take_num("s")?,
        },
        Scheme::VariantI => Signature::VariantI {
            message,
            padding: fields.take_num("u")?,
            root: fields.take_num("s")?,
            witness: fields.take_num("t")?,
        },
        Scheme::VariantII => Signature::VariantII {
            message,
            masked_root: fields.take_num("f")?,
            r_cubed: fields.take_num("r3")?,
        },
        Scheme::RabinWilliams => Signature::RabinWilliams {
            message,
            e: fields.take_num("e")?,
            f: fields.take_num("f")?,
            root: fields.take_num("s")?,
        },
    };
    fields.finish()?;
    Ok(sig)
}

pub fn transcript_to_text(entries: &[TranscriptEntry]) -> String {
    let mut out = String::new();
    writeln!(out, "{TRANSCRIPT_HEADER}").unwrap();
    for entry in entries {
        match entry {
            TranscriptEntry::Disguised(d) => writeln!(out, "author.disguised = {d}").unwrap(),
            TranscriptEntry::BlindSigned(b) => {
                writeln!(out, "signer.disguised = {}", b.disguised).unwrap();
                writeln!(out, "signer.f = {}", b.masked_root).unwrap();
                writeln!(out, "signer.r3 = {}", b.r_cubed).unwrap();
            }
            TranscriptEntry::Unblinded(sig) => {
                write_message(&mut out, "published.", sig.message());
                for (name, value) in sig.components() {
                    writeln!(out, "published.{name} = {value}").unwrap();
                }
            }
        }
    }
    out
}

/// Parses a transcript written by [`transcript_to_text`]; entries present in
/// the file are returned in protocol order.
pub fn parse_transcript(text: &str) -> Result<Vec<TranscriptEntry>> {
    let mut fields = Fields::parse(text, TRANSCRIPT_HEADER)?;
    let mut entries = Vec::new();
    if fields.has("author.disguised") {
        entries.push(TranscriptEntry::Disguised(
            fields.take_num("author.disguised")?,
        ));
    }
    if fields.has("signer.f") {
        entries.push(TranscriptEntry::BlindSigned(BlindSignature {
            disguised: fields.take_num("signer.disguised")?,
            masked_root: fields.take_num("signer.f")?,
            r_cubed: fields.take_num("signer.r3")?,
        }));
    }
    if fields.has("published.f") {
        let message = take_message(&mut fields, "published.")?;
        entries.push(TranscriptEntry::Unblinded(Signature::VariantII {
            message,
            masked_root: fields.take_num("published.f")?,
            r_cubed: fields.take_num("published.r3")?,
        }));
    }
    fields.finish()?;
    Ok(entries)
}
