//! Variable names.
//!
//! A [`Name`] is an index into a global, append-only table of identifier
//! strings, so equal texts always share one uid. Names inside coherence heads
//! are *bound levels*: they carry a position in the pasting context rather
//! than a text, which makes alpha-equivalent heads literally identical.

use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use dashmap::DashMap;

const BOUND_BIT: u32 = 1 << 31;

struct NameTable {
    texts: RwLock<Vec<Arc<str>>>,
    index: DashMap<Arc<str>, u32>,
}

static TABLE: LazyLock<NameTable> =
    LazyLock::new(|| NameTable { texts: RwLock::new(Vec::new()), index: DashMap::new() });

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(u32);

impl Name {
    /// Interns `text` and returns its name.
    pub fn new(text: &str) -> Name {
        if let Some(uid) = TABLE.index.get(text) {
            return Name(*uid);
        }
        let key: Arc<str> = Arc::from(text);
        let uid = *TABLE.index.entry(key.clone()).or_insert_with(|| {
            let mut texts = TABLE.texts.write().unwrap();
            texts.push(key);
            (texts.len() - 1) as u32
        });
        assert!(uid < BOUND_BIT, "name table overflow");
        Name(uid)
    }

    /// The name of the variable at position `level` of a pasting context
    /// inside a coherence head.
    pub fn bound(level: usize) -> Name {
        assert!((level as u64) < BOUND_BIT as u64);
        Name(BOUND_BIT | level as u32)
    }

    pub fn level(self) -> Option<usize> {
        if self.0 & BOUND_BIT != 0 {
            Some((self.0 & !BOUND_BIT) as usize)
        } else {
            None
        }
    }

    pub fn is_bound(self) -> bool {
        self.level().is_some()
    }

    pub fn uid(self) -> u32 {
        self.0
    }

    pub fn text(self) -> Arc<str> {
        match self.level() {
            Some(l) => Arc::from(format!("#{l}")),
            None => TABLE.texts.read().unwrap()[self.0 as usize].clone(),
        }
    }

    /// The source copy `x_m` used when lifting along `x`.
    pub fn minus(self) -> Name {
        self.suffixed("_m")
    }

    /// The target copy `x_p` used when lifting along `x`.
    pub fn plus(self) -> Name {
        self.suffixed("_p")
    }

    /// The connecting cell `x_f` used when lifting along `x`.
    pub fn arrow(self) -> Name {
        self.suffixed("_f")
    }

    fn suffixed(self, suffix: &str) -> Name {
        Name::new(&format!("{}{}", self.text(), suffix))
    }

    /// First name among `base`, `base1`, `base2`, ... accepted by `free`.
    pub fn fresh(base: &str, mut free: impl FnMut(Name) -> bool) -> Name {
        let candidate = Name::new(base);
        if free(candidate) {
            return candidate;
        }
        (1..).map(|i| Name::new(&format!("{base}{i}"))).find(|n| free(*n)).unwrap()
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text())
    }
}
