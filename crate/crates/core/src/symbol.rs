use std::borrow::Borrow;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Identity of an atomic situation or observation token.
///
/// Cheap to clone; ordering is lexicographic on the token text, which is what
/// tie-breaking in causal explanation relies on.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct SymbolId(Arc<str>);

impl SymbolId {
    pub fn new(id: impl AsRef<str>) -> Self {
        SymbolId(Arc::from(id.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<String> for SymbolId {
    fn from(s: String) -> Self {
        SymbolId(Arc::from(s))
    }
}

impl From<&str> for SymbolId {
    fn from(s: &str) -> Self {
        SymbolId::new(s)
    }
}

impl From<SymbolId> for String {
    fn from(s: SymbolId) -> Self {
        s.0.to_string()
    }
}

impl Borrow<str> for SymbolId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for SymbolId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
