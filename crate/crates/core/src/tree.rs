use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{ImplType, KnowledgeBase};

/// Indexed view of a validated activity tree.
pub(crate) struct Tree<'a> {
    pub(crate) root: &'a str,
    /// Children sorted by id, with the parent's single edge kind.
    children: BTreeMap<&'a str, (ImplType, Vec<&'a str>)>,
    /// Every activity, parents before children.
    pub(crate) order: Vec<&'a str>,
}

impl<'a> Tree<'a> {
    /// Builds the index; fails unless the knowledge base validates without
    /// errors.
    pub(crate) fn new(kb: &'a KnowledgeBase) -> Result<Self> {
        crate::validate::require_valid(kb)?;
        let mut children: BTreeMap<&str, (ImplType, Vec<&str>)> = BTreeMap::new();
        let mut has_parent = alloc::collections::BTreeSet::new();
        for imp in kb.implementations() {
            children
                .entry(imp.parent.as_str())
                .or_insert_with(|| (imp.kind, Vec::new()))
                .1
                .push(imp.child.as_str());
            has_parent.insert(imp.child.as_str());
        }
        for (_, cs) in children.values_mut() {
            cs.sort_unstable();
        }
        let root = kb
            .activities()
            .map(|a| a.id.as_str())
            .find(|id| !has_parent.contains(id))
            .ok_or_else(|| Error::Internal("valid tree without a root".into()))?;
        let mut order = Vec::with_capacity(has_parent.len() + 1);
        order.push(root);
        let mut i = 0;
        while i < order.len() {
            if let Some((_, cs)) = children.get(order[i]) {
                order.extend(cs.iter().copied());
            }
            i += 1;
        }
        Ok(Tree {
            root,
            children,
            order,
        })
    }

    /// Children of `id`, sorted; empty for leaves.
    pub(crate) fn children(&self, id: &str) -> &[&'a str] {
        self.children.get(id).map_or(&[], |(_, cs)| cs.as_slice())
    }

    /// Edge kind shared by the children of `id`, `None` for leaves.
    pub(crate) fn kind(&self, id: &str) -> Option<ImplType> {
        self.children.get(id).map(|(k, _)| *k)
    }

    pub(crate) fn is_leaf(&self, id: &str) -> bool {
        !self.children.contains_key(id)
    }
}
