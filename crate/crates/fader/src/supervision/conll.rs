//! CoNLL-style dataset files.
//!
//! One `token<TAB>tag` pair per line, a blank line after each sentence, and a
//! header comment per sentence:
//! `# id=<post id> date=<YYYY-MM-DD> entity=<name> polarity=<POS|NEG>`.
//! The writer is canonical, so write -> read -> write is byte-identical.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};

use super::{validate_tags, LabeledSentence, Polarity, Tag};

pub fn write_conll(sentences: &[LabeledSentence]) -> Result<String> {
    let mut out = String::new();
    for s in sentences {
        if s.tokens.len() != s.tags.len() {
            return Err(Error::CorruptData(format!(
                "sentence {} has {} tokens but {} tags",
                s.post_id,
                s.tokens.len(),
                s.tags.len()
            )));
        }
        if s.post_id.chars().any(char::is_whitespace) || s.post_id.is_empty() {
            return Err(Error::CorruptData(format!(
                "post id `{}` not writable as a CoNLL header",
                s.post_id
            )));
        }
        if let Err((i, msg)) = validate_tags(&s.tags) {
            return Err(Error::CorruptData(format!(
                "sentence {} tag {} invalid: {}",
                s.post_id, i, msg
            )));
        }
        let polarity = match s.polarity {
            Polarity::Positive => "POS",
            Polarity::Negative => "NEG",
        };
        out.push_str(&format!(
            "# id={} date={} entity={} polarity={}\n",
            s.post_id,
            s.date.format("%Y-%m-%d"),
            s.entity_id,
            polarity
        ));
        for (token, tag) in s.tokens.iter().zip(&s.tags) {
            if token.chars().any(char::is_whitespace) || token.is_empty() {
                return Err(Error::CorruptData(format!(
                    "token `{token}` contains whitespace"
                )));
            }
            out.push_str(token);
            out.push('\t');
            out.push_str(&tag.to_string());
            out.push('\n');
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_conll_file(path: &Path, sentences: &[LabeledSentence]) -> Result<()> {
    let text = write_conll(sentences)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_header(line: &str, path: &Path, lineno: usize) -> Result<(String, NaiveDate, String, Polarity)> {
    let err = |msg: &str| Error::Parse {
        path: path.to_path_buf(),
        line: lineno,
        msg: msg.to_string(),
    };
    let body = line
        .strip_prefix("# id=")
        .ok_or_else(|| err("expected `# id=...` header"))?;
    let (id, rest) = body
        .split_once(" date=")
        .ok_or_else(|| err("missing ` date=`"))?;
    let (date_str, rest) = rest
        .split_once(" entity=")
        .ok_or_else(|| err("missing ` entity=`"))?;
    let (entity, polarity_str) = rest
        .rsplit_once(" polarity=")
        .ok_or_else(|| err("missing ` polarity=`"))?;
    let date = NaiveDate::parse_from_str(date_str, "%Y-%m-%d")
        .map_err(|_| err(&format!("bad date `{date_str}`")))?;
    let polarity = match polarity_str.trim_end() {
        "POS" => Polarity::Positive,
        "NEG" => Polarity::Negative,
        other => return Err(err(&format!("bad polarity `{other}`"))),
    };
    Ok((id.to_string(), date, entity.to_string(), polarity))
}

pub fn read_conll_from(text: &str, path: &Path) -> Result<Vec<LabeledSentence>> {
    let mut sentences = Vec::new();
    let mut current: Option<(LabeledSentence, usize)> = None;

    let mut finish = |current: &mut Option<(LabeledSentence, usize)>| -> Result<()> {
        if let Some((sentence, start_line)) = current.take() {
            if let Err((i, msg)) = validate_tags(&sentence.tags) {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    // token i sits i+1 lines below the header
                    line: start_line + 1 + i,
                    msg: format!("invalid BILOU sequence: {msg}"),
                });
            }
            sentences.push(sentence);
        }
        Ok(())
    };

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            finish(&mut current)?;
            continue;
        }
        if line.starts_with('#') {
            finish(&mut current)?;
            let (post_id, date, entity_id, polarity) = parse_header(line, path, lineno)?;
            current = Some((
                LabeledSentence {
                    post_id,
                    tokens: Vec::new(),
                    tags: Vec::new(),
                    date,
                    entity_id,
                    polarity,
                },
                lineno,
            ));
            continue;
        }
        let (sentence, _) = current.as_mut().ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: lineno,
            msg: "token line before any sentence header".into(),
        })?;
        let (token, tag_str) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: lineno,
            msg: "expected `token<TAB>tag`".into(),
        })?;
        let tag: Tag = tag_str.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: lineno,
            msg: format!("malformed tag `{tag_str}`"),
        })?;
        sentence.tokens.push(token.to_string());
        sentence.tags.push(tag);
    }
    finish(&mut current)?;
    Ok(sentences)
}

pub fn read_conll(text: &str) -> Result<Vec<LabeledSentence>> {
    read_conll_from(text, Path::new("<string>"))
}

pub fn read_conll_file(path: &Path) -> Result<Vec<LabeledSentence>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_conll_from(&text, path)
}
