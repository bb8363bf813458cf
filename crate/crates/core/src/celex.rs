//! CELEX document identifiers.
//!
//! A CELEX code is a one-digit document type, a four-digit year, one
//! uppercase letter, a four-digit serial and an optional bracketed part
//! number, e.g. `21999D0624(01)`. All translations of one document share the
//! same code.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CelexError {
    #[error("malformed CELEX identifier {input:?}: {reason}")]
    Malformed { input: String, reason: &'static str },
    #[error("endpoint {endpoint} cannot address bracketed identifier {id}")]
    UnsupportedEndpointForId { id: String, endpoint: Endpoint },
}

/// Structured CELEX identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CelexId {
    doc_type: u8,
    year: u16,
    letter: char,
    serial: u16,
    part: Option<u8>,
}

impl CelexId {
    pub fn new(
        doc_type: u8,
        year: u16,
        letter: char,
        serial: u16,
        part: Option<u8>,
    ) -> Result<Self, CelexError> {
        let err = |reason| CelexError::Malformed {
            input: format!("{doc_type}/{year}/{letter}/{serial}/{part:?}"),
            reason,
        };
        if doc_type > 9 {
            return Err(err("document type must be a single digit"));
        }
        if year > 9999 {
            return Err(err("year must have four digits"));
        }
        if !letter.is_ascii_uppercase() {
            return Err(err("letter must be an uppercase Latin letter"));
        }
        if serial > 9999 {
            return Err(err("serial must have four digits"));
        }
        if matches!(part, Some(p) if !(1..=99).contains(&p)) {
            return Err(err("bracket part must be within 1-99"));
        }
        Ok(Self { doc_type, year, letter, serial, part })
    }

    pub fn doc_type(&self) -> u8 {
        self.doc_type
    }

    pub fn year(&self) -> u16 {
        self.year
    }

    pub fn letter(&self) -> char {
        self.letter
    }

    pub fn serial(&self) -> u16 {
        self.serial
    }

    /// Serial rendered at width four, e.g. `"0624"`.
    pub fn serial_str(&self) -> String {
        format!("{:04}", self.serial)
    }

    pub fn part(&self) -> Option<u8> {
        self.part
    }

    /// The identifier without its bracketed part.
    pub fn base(&self) -> CelexId {
        CelexId { part: None, ..*self }
    }
}

/// Parses the canonical textual form.
pub fn parse_celex(text: &str) -> Result<CelexId, CelexError> {
    let malformed = |reason| CelexError::Malformed { input: text.to_owned(), reason };
    if text.is_empty() {
        return Err(malformed("empty input"));
    }
    let bytes = text.as_bytes();
    if !text.is_ascii() {
        return Err(malformed("non-ASCII character"));
    }
    if bytes.len() < 10 {
        return Err(malformed("too short"));
    }
    let digits = |range: std::ops::Range<usize>, reason| {
        let s = &text[range];
        if s.bytes().all(|b| b.is_ascii_digit()) {
            Ok(s.parse::<u16>().expect("digit run fits u16"))
        } else {
            Err(malformed(reason))
        }
    };
    let doc_type = digits(0..1, "document type is not a digit")? as u8;
    let year = digits(1..5, "year is not four digits")?;
    let letter = bytes[5] as char;
    if !letter.is_ascii_uppercase() {
        return Err(malformed("missing uppercase letter after year"));
    }
    let serial = digits(6..10, "serial is not four digits")?;
    let part = match &text[10..] {
        "" => None,
        rest => {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| malformed("bad bracket syntax"))?;
            if inner.len() != 2 || !inner.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed("bracket part must be two digits"));
            }
            let p: u8 = inner.parse().expect("two digits fit u8");
            if p == 0 {
                return Err(malformed("bracket part must be within 1-99"));
            }
            Some(p)
        }
    };
    Ok(CelexId { doc_type, year, letter, serial, part })
}

/// Canonical textual form; inverse of [`parse_celex`].
pub fn format_celex(id: &CelexId) -> String {
    id.to_string()
}

impl fmt::Display for CelexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:04}{}{:04}", self.doc_type, self.year, self.letter, self.serial)?;
        if let Some(p) = self.part {
            write!(f, "({p:02})")?;
        }
        Ok(())
    }
}

impl FromStr for CelexId {
    type Err = CelexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_celex(s)
    }
}

impl serde::Serialize for CelexId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for CelexId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_celex(&s).map_err(serde::de::Error::custom)
    }
}

/// Historical document endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Smartapi,
    Lexuriserv,
    Ccvista,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Endpoint::Smartapi => "smartapi",
            Endpoint::Lexuriserv => "lexuriserv",
            Endpoint::Ccvista => "ccvista",
        })
    }
}

impl FromStr for Endpoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smartapi" => Ok(Endpoint::Smartapi),
            "lexuriserv" => Ok(Endpoint::Lexuriserv),
            "ccvista" => Ok(Endpoint::Ccvista),
            other => Err(format!("unknown endpoint {other:?}")),
        }
    }
}

pub const SMARTAPI_TEMPLATE: &str =
    "http://europa.eu.int/smartapi/cgi/sga_doc?smartapi!celexpls!prod!CELEXnumdoc&numdoc=CELEXCODE&lg=LG";
pub const LEXURISERV_TEMPLATE: &str =
    "http://europa.eu.int/eur-lex/lex/LexUriServ/LexUriServ.do?uri=CELEX:CELEXCODE:LG:HTML";
pub const CCVISTA_TEMPLATE: &str = "http://HOST/Fulcrum/CCVista/$LG/$CELEXCODE-$LG.doc";
pub const DEFAULT_CCVISTA_HOST: &str = "ccvista.taiaex.be";

/// Synthesizes the download URL for one language version of a document.
pub fn document_url(id: &CelexId, lang: &str, endpoint: Endpoint) -> Result<String, CelexError> {
    document_url_with_host(id, lang, endpoint, DEFAULT_CCVISTA_HOST)
}

/// Like [`document_url`], with the ccvista host overridden.
pub fn document_url_with_host(
    id: &CelexId,
    lang: &str,
    endpoint: Endpoint,
    ccvista_host: &str,
) -> Result<String, CelexError> {
    let celex = id.to_string();
    Ok(match endpoint {
        Endpoint::Smartapi => {
            if id.part.is_some() {
                return Err(CelexError::UnsupportedEndpointForId { id: celex, endpoint });
            }
            // "CELEXnumdoc" is a literal token of the template, not a slot.
            let (head, tail) = SMARTAPI_TEMPLATE.split_once("numdoc=").expect("template contains numdoc=");
            format!("{head}numdoc={}", tail.replace("CELEXCODE", &celex).replace("LG", lang))
        }
        Endpoint::Lexuriserv => {
            LEXURISERV_TEMPLATE.replace("CELEXCODE", &celex).replace(":LG:", &format!(":{lang}:"))
        }
        Endpoint::Ccvista => {
            CCVISTA_TEMPLATE.replace("HOST", ccvista_host).replace("$CELEXCODE", &celex).replace("$LG", lang)
        }
    })
}

pub const JRC_PREFIX: &str = "jrc";

/// Document id of one language version, e.g. `jrc42004D0097-fr`.
pub fn jrc_document_id(id: &CelexId, lang: &str) -> String {
    format!("{JRC_PREFIX}{id}-{lang}")
}

/// Id of a bilingual document, e.g. `jrc31960D0511-et-mt`.
pub fn jrc_pair_id(id: &CelexId, src_lang: &str, tgt_lang: &str) -> String {
    format!("{JRC_PREFIX}{id}-{src_lang}-{tgt_lang}")
}

/// Inverse of [`jrc_document_id`].
pub fn parse_jrc_document_id(text: &str) -> Result<(CelexId, String), CelexError> {
    let malformed = |reason| CelexError::Malformed { input: text.to_owned(), reason };
    let rest = text.strip_prefix(JRC_PREFIX).ok_or_else(|| malformed("missing jrc prefix"))?;
    let (celex, lang) = rest.rsplit_once('-').ok_or_else(|| malformed("missing language suffix"))?;
    if lang.is_empty() {
        return Err(malformed("missing language suffix"));
    }
    Ok((parse_celex(celex)?, lang.to_owned()))
}
