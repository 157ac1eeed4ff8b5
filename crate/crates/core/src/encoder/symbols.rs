use std::collections::BTreeMap;
use std::fmt;

/// The model element a solver-level name stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Instance(String),
    StateField { step: u32, field: String },
    Param { step: u32, param: String },
    StepCount,
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Instance(n) => write!(f, "instance {n}"),
            Element::StateField { step, field } => write!(f, "state {step}.{field}"),
            Element::Param { step, param } => write!(f, "param {step}.{param}"),
            Element::StepCount => f.write_str("step count"),
        }
    }
}

/// How one declared name decodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolEntry {
    Scalar(Element),
    /// An `(Array Int Int)` constant; each listed index decodes to an element.
    Array(Vec<(i64, Element)>),
}

/// Injective map from declared SMT names to model elements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolMap {
    entries: BTreeMap<String, SymbolEntry>,
}

impl SymbolMap {
    pub fn new() -> Self {
        SymbolMap::default()
    }

    pub(crate) fn scalar(&mut self, name: impl Into<String>, element: Element) {
        let name = name.into();
        debug_assert!(!self.entries.contains_key(&name), "duplicate symbol {name}");
        self.entries.insert(name, SymbolEntry::Scalar(element));
    }

    pub(crate) fn array(&mut self, name: impl Into<String>, cells: Vec<(i64, Element)>) {
        self.entries.insert(name.into(), SymbolEntry::Array(cells));
    }

    pub fn get(&self, name: &str) -> Option<&SymbolEntry> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &SymbolEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every element reachable through the map, with the name that carries it.
    pub fn elements(&self) -> Vec<(&str, Option<i64>, &Element)> {
        let mut out = Vec::new();
        for (name, entry) in &self.entries {
            match entry {
                SymbolEntry::Scalar(e) => out.push((name.as_str(), None, e)),
                SymbolEntry::Array(cells) => {
                    out.extend(cells.iter().map(|(i, e)| (name.as_str(), Some(*i), e)));
                }
            }
        }
        out
    }
}
