use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::store::KnowledgeStore;
use crate::symbol::{check_token, Symbol};

/// The New pattern: a frequency-free token sequence resolved against a store.
///
/// Tokens unknown to the store receive handles past the end of the store's
/// symbol table, so they cost the novel rate and can never be matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    names: Vec<String>,
    symbols: Vec<Symbol>,
    novel: Vec<bool>,
}

impl Query {
    pub fn parse(text: &str, store: &KnowledgeStore) -> Result<Self> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        Self::from_tokens(&tokens, store)
    }

    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], store: &KnowledgeStore) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let base = store.symbols().len() as u32;
        let mut extra: HashMap<&str, Symbol> = HashMap::new();
        let mut q = Query {
            names: Vec::with_capacity(tokens.len()),
            symbols: Vec::with_capacity(tokens.len()),
            novel: Vec::with_capacity(tokens.len()),
        };
        for t in tokens {
            let t = t.as_ref();
            check_token(t)?;
            let (sym, novel) = match store.symbols().lookup(t) {
                Some(s) => (s, false),
                None => {
                    let next = Symbol(base + extra.len() as u32);
                    (*extra.entry(t).or_insert(next), true)
                }
            };
            q.names.push(t.to_owned());
            q.symbols.push(sym);
            q.novel.push(novel);
        }
        Ok(q)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_novel(&self, pos: usize) -> bool {
        self.novel[pos]
    }

    pub fn text(&self) -> String {
        self.names.join(" ")
    }
}
