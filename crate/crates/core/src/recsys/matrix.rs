use crate::domain::{AgentId, ContentId, InteractionKind, InteractionRecord, Step};

/// Growable bitset over content ids.
#[derive(Debug, Clone, Default)]
pub(crate) struct BitRow(Vec<u64>);

impl BitRow {
    pub(crate) fn contains(&self, i: ContentId) -> bool {
        let (w, b) = (i as usize / 64, i % 64);
        self.0.get(w).is_some_and(|word| word & (1 << b) != 0)
    }

    /// Returns false if already present.
    pub(crate) fn insert(&mut self, i: ContentId) -> bool {
        let (w, b) = (i as usize / 64, i % 64);
        if w >= self.0.len() {
            self.0.resize(w + 1, 0);
        }
        let was = self.0[w] & (1 << b) != 0;
        self.0[w] |= 1 << b;
        !was
    }
}

fn insert_sorted<T: Ord + Copy>(v: &mut Vec<T>, x: T) {
    let pos = v.partition_point(|&y| y < x);
    v.insert(pos, x);
}

/// Sparse binary user x item matrix of engage events.
#[derive(Debug, Clone)]
pub struct InteractionMatrix {
    rows: Vec<Vec<ContentId>>,
    cols: Vec<Vec<AgentId>>,
    members: Vec<BitRow>,
    nnz: usize,
}

impl InteractionMatrix {
    pub fn new(n_users: usize) -> Self {
        InteractionMatrix {
            rows: vec![Vec::new(); n_users],
            cols: Vec::new(),
            members: vec![BitRow::default(); n_users],
            nnz: 0,
        }
    }

    /// Builds a matrix from explicit `(user, item)` pairs.
    pub fn from_pairs(n_users: usize, pairs: &[(AgentId, ContentId)]) -> Self {
        let mut m = InteractionMatrix::new(n_users);
        for &(u, i) in pairs {
            m.insert(u, i);
        }
        m
    }

    /// Sets entry `(u, i)`. Returns false if it was already set.
    pub fn insert(&mut self, u: AgentId, i: ContentId) -> bool {
        if !self.members[u as usize].insert(i) {
            return false;
        }
        if self.cols.len() <= i as usize {
            self.cols.resize(i as usize + 1, Vec::new());
        }
        insert_sorted(&mut self.rows[u as usize], i);
        insert_sorted(&mut self.cols[i as usize], u);
        self.nnz += 1;
        true
    }

    pub fn contains(&self, u: AgentId, i: ContentId) -> bool {
        self.members[u as usize].contains(i)
    }

    pub fn n_users(&self) -> usize {
        self.rows.len()
    }

    /// Items engaged by `u`, ascending.
    pub fn row(&self, u: AgentId) -> &[ContentId] {
        &self.rows[u as usize]
    }

    /// Users who engaged `i`, ascending.
    pub fn col(&self, i: ContentId) -> &[AgentId] {
        self.cols.get(i as usize).map_or(&[], Vec::as_slice)
    }

    /// One past the largest item id with an entry.
    pub fn item_bound(&self) -> usize {
        self.cols.len()
    }

    pub fn engagement_count(&self, u: AgentId) -> usize {
        self.rows[u as usize].len()
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }
}

/// Append-only interaction history with the matrix derived from its engage records.
#[derive(Debug, Clone)]
pub struct InteractionLog {
    records: Vec<InteractionRecord>,
    matrix: InteractionMatrix,
    viewed: Vec<BitRow>,
}

impl InteractionLog {
    pub fn new(n_users: usize) -> Self {
        InteractionLog {
            records: Vec::new(),
            matrix: InteractionMatrix::new(n_users),
            viewed: vec![BitRow::default(); n_users],
        }
    }

    /// Appends a record. Repeated engages of the same item, and repeated views,
    /// are dropped; returns whether the record was stored.
    pub fn append(&mut self, record: InteractionRecord) -> bool {
        debug_assert!(self.records.last().is_none_or(|r| r.step <= record.step));
        let fresh = match record.kind {
            InteractionKind::Engage => self.matrix.insert(record.agent, record.content),
            InteractionKind::View => self.viewed[record.agent as usize].insert(record.content),
        };
        if fresh {
            self.records.push(record);
        }
        fresh
    }

    pub fn records(&self) -> &[InteractionRecord] {
        &self.records
    }

    pub fn matrix(&self) -> &InteractionMatrix {
        &self.matrix
    }

    pub fn has_engaged(&self, agent: AgentId, item: ContentId) -> bool {
        self.matrix.contains(agent, item)
    }

    pub fn engages_at(&self, step: Step) -> usize {
        let lo = self.records.partition_point(|r| r.step < step);
        self.records[lo..]
            .iter()
            .take_while(|r| r.step == step)
            .filter(|r| r.kind == InteractionKind::Engage)
            .count()
    }
}
