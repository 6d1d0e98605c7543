//! The instance file format: a versioned TOML document.
//!
//! ```toml
//! version = 1
//! k = 3
//! reserve = 40       # optional
//! value_cap = 100    # optional
//! seller_followers = [0, 1]
//!
//! [[buyers]]
//! id = 0
//! value = 30
//! followers = [2]
//! ```
//!
//! Serialization is canonical (buyers ascending by id, follower lists
//! ascending), so parse followed by serialize is byte-stable and the CLI
//! outputs can be golden-tested.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{AuctionInstance, BuyerType, ModelError, Money};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("instance document is not valid TOML: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("unsupported instance document version {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("buyer entry {position} redefines id {id}")]
    DuplicateBuyerId { position: usize, id: u32 },
    #[error("buyer ids must be dense 0..{expected}, id {missing} is missing")]
    MissingBuyerId { expected: usize, missing: u32 },
    #[error("buyer id {id} is out of range for a document with {count} buyers")]
    IdOutOfRange { id: u32, count: usize },
    #[error("{owner} lists follower {follower} twice")]
    DuplicateFollower { owner: String, follower: u32 },
    #[error("invalid instance: {0}")]
    Model(#[from] ModelError),
}

/// Wire form of one buyer entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct BuyerRecord {
    id: u32,
    value: Money,
    #[serde(default)]
    followers: Vec<u32>,
}

/// Wire form of a whole instance document. Field order here fixes the
/// serialized field order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDocument {
    version: u32,
    k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reserve: Option<Money>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value_cap: Option<Money>,
    seller_followers: Vec<u32>,
    #[serde(default)]
    buyers: Vec<BuyerRecord>,
}

/// A parsed instance plus the document-level reserve hint. The reserve is
/// not part of the ground truth; it is a default the CLI applies when no
/// `--reserve` flag is given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub instance: AuctionInstance,
    pub reserve: Option<Money>,
}

fn check_unique(owner: &str, list: &[u32]) -> Result<(), FormatError> {
    let mut seen = std::collections::BTreeSet::new();
    for &f in list {
        if !seen.insert(f) {
            return Err(FormatError::DuplicateFollower {
                owner: owner.to_string(),
                follower: f,
            });
        }
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, FormatError> {
    let doc: InstanceDocument = toml::from_str(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(doc.version));
    }
    let n = doc.buyers.len();
    let mut slots: Vec<Option<BuyerType>> = vec![None; n];
    for (position, record) in doc.buyers.iter().enumerate() {
        check_unique(&format!("buyer {}", record.id), &record.followers)?;
        let idx = record.id as usize;
        if idx >= n {
            return Err(FormatError::IdOutOfRange {
                id: record.id,
                count: n,
            });
        }
        if slots[idx].is_some() {
            return Err(FormatError::DuplicateBuyerId {
                position,
                id: record.id,
            });
        }
        slots[idx] = Some(BuyerType::new(record.value, record.followers.iter().copied()));
    }
    let mut buyers = Vec::with_capacity(n);
    for (idx, slot) in slots.into_iter().enumerate() {
        match slot {
            Some(buyer) => buyers.push(buyer),
            None => {
                return Err(FormatError::MissingBuyerId {
                    expected: n,
                    missing: idx as u32,
                })
            }
        }
    }
    check_unique("seller", &doc.seller_followers)?;
    let instance =
        AuctionInstance::new(doc.k, doc.seller_followers.iter().copied(), buyers, doc.value_cap)?;
    Ok(InstanceFile {
        instance,
        reserve: doc.reserve,
    })
}

pub fn serialize_instance(instance: &AuctionInstance, reserve: Option<Money>) -> String {
    let doc = InstanceDocument {
        version: FORMAT_VERSION,
        k: instance.units(),
        reserve,
        value_cap: instance.value_cap(),
        seller_followers: instance.seller_followers().iter().map(|b| b.0).collect(),
        buyers: instance
            .buyer_ids()
            .map(|id| BuyerRecord {
                id: id.0,
                value: instance.true_value(id),
                followers: instance.buyer(id).followers.iter().map(|b| b.0).collect(),
            })
            .collect(),
    };
    toml::to_string(&doc).expect("instance documents always serialize")
}
