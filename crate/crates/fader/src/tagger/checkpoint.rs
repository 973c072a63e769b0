//! Tagger checkpoint file: magic bytes `FADER01`, then a self-describing
//! list of length-prefixed named sections (tag set, config, character
//! inventory, and parameter tensors as row-major little-endian f32).
//! Serialization is canonical: writing the same model twice is
//! byte-identical.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::kb::CoarseType;

use super::crf::TagSet;
use super::{StackBMode, TaggerConfig, TaggerModel};

pub const MAGIC: &[u8; 7] = b"FADER01";

fn push_section(out: &mut Vec<u8>, name: &str, payload: &[u8]) {
    out.extend_from_slice(&(name.len() as u32).to_le_bytes());
    out.extend_from_slice(name.as_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
}

fn coarse_type_code(ty: CoarseType) -> u8 {
    CoarseType::ALL.iter().position(|&t| t == ty).unwrap() as u8
}

fn coarse_type_from(code: u8) -> Result<CoarseType> {
    CoarseType::ALL
        .get(code as usize)
        .copied()
        .ok_or_else(|| Error::CorruptData(format!("unknown coarse type code {code}")))
}

pub fn write_checkpoint(model: &TaggerModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);

    let mut tagset = Vec::new();
    tagset.extend_from_slice(&(model.tagset.types().len() as u32).to_le_bytes());
    for &ty in model.tagset.types() {
        tagset.push(coarse_type_code(ty));
    }
    push_section(&mut out, "tagset", &tagset);

    let cfg = &model.config;
    let mut config = Vec::new();
    for v in [
        cfg.word_hidden as u64,
        cfg.char_emb as u64,
        cfg.char_hidden as u64,
    ] {
        config.extend_from_slice(&v.to_le_bytes());
    }
    config.extend_from_slice(&cfg.dropout.to_le_bytes());
    config.extend_from_slice(&cfg.lr.to_le_bytes());
    for v in [cfg.batch as u64, cfg.max_epochs as u64, cfg.seed] {
        config.extend_from_slice(&v.to_le_bytes());
    }
    config.push(match cfg.stack_b {
        StackBMode::Refined => 0,
        StackBMode::Base => 1,
        StackBMode::Zero => 2,
    });
    config.extend_from_slice(&(cfg.plateau_patience as u64).to_le_bytes());
    config.extend_from_slice(&cfg.lr_floor.to_le_bytes());
    config.extend_from_slice(&(model.emb_dim as u64).to_le_bytes());
    push_section(&mut out, "config", &config);

    let mut chars = Vec::new();
    chars.extend_from_slice(&(model.chars().len() as u32).to_le_bytes());
    for &c in model.chars() {
        chars.extend_from_slice(&(c as u32).to_le_bytes());
    }
    push_section(&mut out, "chars", &chars);

    model.visit_tensors(&mut |name, tensor| {
        let mut payload = Vec::with_capacity(16 + tensor.len() * 4);
        payload.extend_from_slice(&(tensor.rows as u64).to_le_bytes());
        payload.extend_from_slice(&(tensor.cols as u64).to_le_bytes());
        for &x in &tensor.data {
            payload.extend_from_slice(&(x as f32).to_le_bytes());
        }
        push_section(&mut out, &name, &payload);
    });
    out
}

pub fn write_checkpoint_file(path: &Path, model: &TaggerModel) -> Result<()> {
    let bytes = write_checkpoint(model);
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::CorruptData("checkpoint truncated".into()));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn done(&self) -> bool {
        self.pos >= self.data.len()
    }
}

pub fn read_checkpoint(data: &[u8]) -> Result<TaggerModel> {
    let mut cur = Cursor { data, pos: 0 };
    if cur.take(MAGIC.len())? != MAGIC {
        return Err(Error::CorruptData("not a tagger checkpoint".into()));
    }
    let mut sections: Vec<(String, &[u8])> = Vec::new();
    while !cur.done() {
        let name_len = cur.u32()? as usize;
        let name = std::str::from_utf8(cur.take(name_len)?)
            .map_err(|_| Error::CorruptData("bad section name".into()))?
            .to_string();
        let payload_len = cur.u64()? as usize;
        sections.push((name, cur.take(payload_len)?));
    }
    let find = |name: &str| -> Result<&[u8]> {
        sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::CorruptData(format!("checkpoint missing section `{name}`")))
    };

    let tagset = {
        let mut c = Cursor {
            data: find("tagset")?,
            pos: 0,
        };
        let n = c.u32()? as usize;
        let mut types = Vec::with_capacity(n);
        for _ in 0..n {
            types.push(coarse_type_from(c.u8()?)?);
        }
        TagSet::new(&types)
    };

    let (config, emb_dim) = {
        let mut c = Cursor {
            data: find("config")?,
            pos: 0,
        };
        let word_hidden = c.u64()? as usize;
        let char_emb = c.u64()? as usize;
        let char_hidden = c.u64()? as usize;
        let dropout = c.f64()?;
        let lr = c.f64()?;
        let batch = c.u64()? as usize;
        let max_epochs = c.u64()? as usize;
        let seed = c.u64()?;
        let stack_b = match c.u8()? {
            0 => StackBMode::Refined,
            1 => StackBMode::Base,
            2 => StackBMode::Zero,
            other => {
                return Err(Error::CorruptData(format!("unknown stack-b mode {other}")));
            }
        };
        let plateau_patience = c.u64()? as usize;
        let lr_floor = c.f64()?;
        let emb_dim = c.u64()? as usize;
        (
            TaggerConfig {
                word_hidden,
                char_emb,
                char_hidden,
                dropout,
                lr,
                batch,
                max_epochs,
                seed,
                stack_b,
                plateau_patience,
                lr_floor,
            },
            emb_dim,
        )
    };

    let chars = {
        let mut c = Cursor {
            data: find("chars")?,
            pos: 0,
        };
        let n = c.u32()? as usize;
        let mut chars = Vec::with_capacity(n);
        for _ in 0..n {
            let code = c.u32()?;
            chars.push(char::from_u32(code).ok_or_else(|| {
                Error::CorruptData(format!("invalid char codepoint {code}"))
            })?);
        }
        chars
    };

    let mut model = TaggerModel::new(tagset, config, emb_dim, chars)?;
    let mut names = Vec::new();
    model.visit_tensors(&mut |name, _| names.push(name));
    for (name, tensor) in names.iter().zip(model.tensors_mut()) {
        let mut c = Cursor {
            data: find(name)?,
            pos: 0,
        };
        let rows = c.u64()? as usize;
        let cols = c.u64()? as usize;
        if rows != tensor.rows || cols != tensor.cols {
            return Err(Error::CorruptData(format!(
                "tensor `{name}` has shape {rows}x{cols}, expected {}x{}",
                tensor.rows, tensor.cols
            )));
        }
        for x in tensor.data.iter_mut() {
            let bytes: [u8; 4] = c.take(4)?.try_into().unwrap();
            *x = f32::from_le_bytes(bytes) as f64;
        }
    }
    Ok(model)
}

pub fn read_checkpoint_file(path: &Path) -> Result<TaggerModel> {
    let mut f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut data = Vec::new();
    f.read_to_end(&mut data).map_err(|e| Error::io(path, e))?;
    read_checkpoint(&data)
}
