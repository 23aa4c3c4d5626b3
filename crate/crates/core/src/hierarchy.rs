//! Levels-from-the-top over employee/manager rows.
//!
//! [`evaluate_levels`] follows recursive common-table-expression semantics:
//! the anchor generation is every row without a manager, and each further
//! generation is the rows whose manager is in the previous one. Expansion
//! stops at the first empty generation.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error("duplicate employee id {0}")]
    DuplicateEmpId(String),
    #[error("management cycle through {}", .0.join(", "))]
    CycleDetected(Vec<String>),
    #[error("unknown employee id {0}")]
    UnknownId(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyRecord<I> {
    pub emp_id: I,
    pub first_name: String,
    pub last_name: String,
    /// `None` marks a top executive.
    pub manager_id: Option<I>,
}

impl<I> HierarchyRecord<I> {
    pub fn new(emp_id: I, manager_id: Option<I>) -> Self {
        Self {
            emp_id,
            first_name: String::new(),
            last_name: String::new(),
            manager_id,
        }
    }

    pub fn named(mut self, first_name: &str, last_name: &str) -> Self {
        self.first_name = first_name.to_string();
        self.last_name = last_name.to_string();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyLevels<I> {
    /// Reachable records with their depth, sorted by `(level, emp_id)`.
    pub rows: Vec<(HierarchyRecord<I>, usize)>,
    /// Records whose management chain ends at a missing id.
    pub unreachable: BTreeSet<I>,
}

impl<I: Ord> HierarchyLevels<I> {
    pub fn level_of(&self, id: &I) -> Option<usize> {
        self.rows
            .iter()
            .find(|(r, _)| &r.emp_id == id)
            .map(|(_, level)| *level)
    }
}

struct Tree<'a, I> {
    records: &'a [HierarchyRecord<I>],
    position: HashMap<&'a I, usize>,
    reports: HashMap<&'a I, Vec<usize>>,
}

impl<'a, I: Eq + Hash + Debug> Tree<'a, I> {
    fn new(records: &'a [HierarchyRecord<I>]) -> Result<Self, HierarchyError> {
        let mut position = HashMap::with_capacity(records.len());
        let mut reports: HashMap<&I, Vec<usize>> = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            if position.insert(&r.emp_id, i).is_some() {
                return Err(HierarchyError::DuplicateEmpId(format!("{:?}", r.emp_id)));
            }
            if let Some(m) = &r.manager_id {
                reports.entry(m).or_default().push(i);
            }
        }
        Ok(Self {
            records,
            position,
            reports,
        })
    }

    fn reports_of(&self, i: usize) -> &[usize] {
        self.reports
            .get(&self.records[i].emp_id)
            .map_or(&[], Vec::as_slice)
    }

    fn manager_of(&self, i: usize) -> Option<usize> {
        self.records[i]
            .manager_id
            .as_ref()
            .and_then(|m| self.position.get(m).copied())
    }

    /// Members of the manager-chain loop that `start` runs into, if any.
    fn cycle_from(&self, start: usize) -> Option<Vec<usize>> {
        let mut seen = HashMap::new();
        let mut path = Vec::new();
        let mut cur = Some(start);
        while let Some(i) = cur {
            if let Some(&at) = seen.get(&i) {
                return Some(path[at..].to_vec());
            }
            seen.insert(i, path.len());
            path.push(i);
            cur = self.manager_of(i);
        }
        None
    }

    fn cycle_error(&self, members: impl IntoIterator<Item = usize>) -> HierarchyError
    where
        I: Ord,
    {
        let mut ids: Vec<&I> = members
            .into_iter()
            .map(|i| &self.records[i].emp_id)
            .collect();
        ids.sort();
        ids.dedup();
        HierarchyError::CycleDetected(ids.into_iter().map(|id| format!("{id:?}")).collect())
    }
}

/// Depth of every record below its top executive.
pub fn evaluate_levels<I>(
    records: &[HierarchyRecord<I>],
) -> Result<HierarchyLevels<I>, HierarchyError>
where
    I: Ord + Hash + Clone + Debug,
{
    let tree = Tree::new(records)?;
    let mut level: Vec<Option<usize>> = vec![None; records.len()];

    // anchor: WHERE manager IS NULL
    let mut frontier: Vec<usize> = (0..records.len())
        .filter(|&i| records[i].manager_id.is_none())
        .collect();
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &i in &frontier {
            if level[i].is_some() {
                return Err(tree.cycle_error(tree.cycle_from(i).unwrap_or_else(|| vec![i])));
            }
            level[i] = Some(depth);
            // recursive step: join reports on manager = emp_id
            next.extend_from_slice(tree.reports_of(i));
        }
        frontier = next;
        depth += 1;
    }

    let mut cyclic = BTreeSet::new();
    let mut unreachable = BTreeSet::new();
    for i in (0..records.len()).filter(|&i| level[i].is_none()) {
        match tree.cycle_from(i) {
            Some(members) => cyclic.extend(members),
            None => {
                unreachable.insert(records[i].emp_id.clone());
            }
        }
    }
    if !cyclic.is_empty() {
        return Err(tree.cycle_error(cyclic));
    }

    let mut rows: Vec<(HierarchyRecord<I>, usize)> = records
        .iter()
        .zip(&level)
        .filter_map(|(r, l)| l.map(|l| (r.clone(), l)))
        .collect();
    rows.sort_by(|(a, la), (b, lb)| la.cmp(lb).then_with(|| a.emp_id.cmp(&b.emp_id)));
    Ok(HierarchyLevels { rows, unreachable })
}

/// `root_id` and everyone who reports to it, directly or not.
pub fn subtree<I>(
    records: &[HierarchyRecord<I>],
    root_id: &I,
) -> Result<BTreeSet<I>, HierarchyError>
where
    I: Ord + Hash + Clone + Debug,
{
    let tree = Tree::new(records)?;
    let root = *tree
        .position
        .get(root_id)
        .ok_or_else(|| HierarchyError::UnknownId(format!("{root_id:?}")))?;
    let mut visited = HashSet::from([root]);
    let mut stack = vec![root];
    while let Some(i) = stack.pop() {
        for &child in tree.reports_of(i) {
            if !visited.insert(child) {
                return Err(tree.cycle_error(tree.cycle_from(child).unwrap_or_else(|| vec![child])));
            }
            stack.push(child);
        }
    }
    Ok(visited
        .into_iter()
        .map(|i| records[i].emp_id.clone())
        .collect())
}
