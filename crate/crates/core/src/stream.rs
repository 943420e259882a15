use crate::error::{Error, Result};

/// Item identifier. Valid ids are `1..=universe`.
pub type Item = u32;

/// A finite insertion stream over the universe `[1, n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    items: Vec<Item>,
    universe: u32,
}

impl Stream {
    /// Builds a stream, rejecting any id outside `[1, universe]`.
    pub fn new(items: Vec<Item>, universe: u32) -> Result<Self> {
        if universe == 0 {
            return Err(Error::param("universe", "must be positive"));
        }
        if let Some(&bad) = items.iter().find(|&&i| i == 0 || i > universe) {
            return Err(Error::ItemOutOfRange {
                item: bad,
                universe,
            });
        }
        Ok(Self { items, universe })
    }

    pub(crate) fn from_trusted(items: Vec<Item>, universe: u32) -> Self {
        debug_assert!(items.iter().all(|&i| i >= 1 && i <= universe));
        Self { items, universe }
    }

    pub fn empty(universe: u32) -> Result<Self> {
        Self::new(Vec::new(), universe)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    /// Stream length `m`.
    pub fn len(&self) -> u64 {
        self.items.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Item> + '_ {
        self.items.iter().copied()
    }

    pub fn into_items(self) -> Vec<Item> {
        self.items
    }
}

impl<'a> IntoIterator for &'a Stream {
    type Item = Item;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, Item>>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter().copied()
    }
}
