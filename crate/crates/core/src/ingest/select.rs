use std::collections::{BTreeMap, BTreeSet};

use super::IngestError;
use crate::celex::CelexId;
use crate::lang::{is_known, NEW_MEMBER_LANGUAGES};

pub const MIN_LANGUAGES: usize = 10;
pub const MIN_NEW_MEMBER_LANGUAGES: usize = 3;

/// Keeps documents available in at least ten languages, of which at least
/// three are 2004-accession languages or one is Romanian.
pub fn select_corpus(
    inventory: &BTreeMap<CelexId, BTreeSet<String>>,
) -> Result<BTreeSet<CelexId>, IngestError> {
    let mut kept = BTreeSet::new();
    for (id, langs) in inventory {
        if let Some(bad) = langs.iter().find(|l| !is_known(l)) {
            return Err(IngestError::UnknownLanguage(bad.clone()));
        }
        let new_members = langs.iter().filter(|l| NEW_MEMBER_LANGUAGES.contains(&l.as_str())).count();
        if langs.len() >= MIN_LANGUAGES && (new_members >= MIN_NEW_MEMBER_LANGUAGES || langs.contains("ro")) {
            kept.insert(*id);
        }
    }
    Ok(kept)
}
