use std::collections::HashMap;

use super::{GroupInventory, Grouped, TokenSource, TokenizedDocument};

/// String interner mapping tokens to dense `u32` ids.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Lexicon {
    pub fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = u32::try_from(self.tokens.len()).expect("lexicon exceeds u32 ids");
        self.tokens.push(token.to_owned());
        self.index.insert(token.to_owned(), id);
        id
    }

    pub fn get(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
struct StoredDoc {
    group: u32,
    start: usize,
    end: usize,
}

/// In-memory interned corpus: one flat token buffer plus per-document spans.
///
/// Holds the filtered, tokenized stream so that the repeated sampling passes
/// of a run do not re-read and re-tokenize the input.
#[derive(Debug, Clone, Default)]
pub struct CorpusStore {
    lexicon: Lexicon,
    groups: Lexicon,
    docs: Vec<StoredDoc>,
    tokens: Vec<u32>,
    inventory: GroupInventory,
}

impl CorpusStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_documents<'a>(docs: impl IntoIterator<Item = &'a TokenizedDocument>) -> Self {
        let mut store = Self::new();
        for d in docs {
            store.push(d);
        }
        store
    }

    /// Appends a document. Empty documents are ignored.
    pub fn push(&mut self, doc: &TokenizedDocument) {
        if doc.tokens.is_empty() {
            return;
        }
        let group = self.groups.intern(&doc.group_id);
        let start = self.tokens.len();
        for t in &doc.tokens {
            let id = self.lexicon.intern(t);
            self.tokens.push(id);
        }
        self.docs.push(StoredDoc {
            group,
            start,
            end: self.tokens.len(),
        });
        self.inventory.record(&doc.group_id, doc.tokens.len());
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn inventory(&self) -> &GroupInventory {
        &self.inventory
    }

    pub fn doc(&self, index: usize) -> DocRef<'_> {
        DocRef { store: self, index }
    }

    pub fn iter(&self) -> impl Iterator<Item = DocRef<'_>> + '_ {
        (0..self.docs.len()).map(move |i| self.doc(i))
    }

    /// Documents of one group, in corpus order.
    pub fn group_docs<'a>(&'a self, group_id: &str) -> impl Iterator<Item = DocRef<'a>> + 'a {
        let gid = self.groups.get(group_id);
        self.iter().filter(move |d| Some(self.docs[d.index].group) == gid)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DocRef<'a> {
    store: &'a CorpusStore,
    index: usize,
}

impl<'a> DocRef<'a> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn token_ids(&self) -> &'a [u32] {
        let d = self.store.docs[self.index];
        &self.store.tokens[d.start..d.end]
    }

    pub fn tokens(&self) -> impl Iterator<Item = &'a str> + 'a {
        let lex = &self.store.lexicon;
        self.token_ids().iter().map(move |&id| lex.token(id))
    }

    pub fn to_owned_document(&self) -> TokenizedDocument {
        TokenizedDocument {
            group_id: self.group_id().to_owned(),
            tokens: self.tokens().map(str::to_owned).collect(),
        }
    }
}

impl Grouped for DocRef<'_> {
    fn group_id(&self) -> &str {
        self.store.groups.token(self.store.docs[self.index].group)
    }
}

impl PartialEq for DocRef<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.store, other.store) && self.index == other.index
    }
}

impl TokenSource for [DocRef<'_>] {
    fn for_each_document(&self, f: &mut dyn FnMut(&mut dyn Iterator<Item = &str>)) {
        for d in self {
            f(&mut d.tokens());
        }
    }
}

impl TokenSource for Vec<DocRef<'_>> {
    fn for_each_document(&self, f: &mut dyn FnMut(&mut dyn Iterator<Item = &str>)) {
        self.as_slice().for_each_document(f)
    }
}

/// Every document of a store, as a token source.
impl TokenSource for CorpusStore {
    fn for_each_document(&self, f: &mut dyn FnMut(&mut dyn Iterator<Item = &str>)) {
        for d in self.iter() {
            f(&mut d.tokens());
        }
    }
}

/// One group's documents viewed as a token source without copying.
pub struct StoreSample<'a> {
    pub store: &'a CorpusStore,
    pub group_id: &'a str,
}

impl TokenSource for StoreSample<'_> {
    fn for_each_document(&self, f: &mut dyn FnMut(&mut dyn Iterator<Item = &str>)) {
        for d in self.store.group_docs(self.group_id) {
            f(&mut d.tokens());
        }
    }
}
