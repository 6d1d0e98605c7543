//! Buyer network model: reachability, critical parents, and the critical tree.
//!
//! The seller spreads the sale information through the buyers' follower
//! links. A buyer participates only if the information reaches her, so the
//! effective network is induced by what each buyer chose to forward. Every
//! mechanism in this crate consumes the three views computed here:
//!
//! - [`ReachabilityView`]: who is connected, and at which BFS distance,
//! - critical parents: the buyers that every path from the seller to a
//!   given buyer must pass through (the strict dominators of that buyer),
//! - [`DiffusionCriticalTree`]: each connected buyer hung under her least
//!   critical parent (her immediate dominator), or under the seller.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact integer money. Prices and values never use floating point so that
/// ties and thresholds compare deterministically.
pub type Money = u64;

/// Dense buyer identifier; ids run 0..n-1 within one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BuyerId(pub u32);

impl BuyerId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for BuyerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A position in the critical tree: the seller (root) or a buyer.
///
/// The seller has no [`BuyerId`]; she cannot win or pay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Node {
    Seller,
    Buyer(BuyerId),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Seller => write!(f, "seller"),
            Node::Buyer(id) => write!(f, "{id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("an instance must offer at least one unit")]
    ZeroUnits,
    #[error("{owner} lists unknown buyer {follower} as a follower")]
    DanglingFollower { owner: Node, follower: BuyerId },
    #[error("buyer {buyer} lists itself as a follower")]
    SelfFollower { buyer: BuyerId },
    #[error("buyer {buyer} has value {value}, above the value cap {cap}")]
    ValueAboveCap { buyer: BuyerId, value: Money, cap: Money },
    #[error("report of buyer {buyer} forwards to {follower}, who is not a true follower")]
    ForwardOutsideFollowers { buyer: BuyerId, follower: BuyerId },
    #[error("report profile covers {got} buyers, instance has {expected}")]
    ReportLengthMismatch { expected: usize, got: usize },
    #[error("buyer {buyer} is not connected")]
    NotConnected { buyer: BuyerId },
    #[error("{id} is not one of the seller's direct followers")]
    NotSellerFollower { id: BuyerId },
}

/// A buyer's true private type: unit value plus the follower set she can
/// forward the sale information to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuyerType {
    pub value: Money,
    pub followers: BTreeSet<BuyerId>,
}

impl BuyerType {
    pub fn new(value: Money, followers: impl IntoIterator<Item = u32>) -> Self {
        BuyerType {
            value,
            followers: followers.into_iter().map(BuyerId).collect(),
        }
    }
}

/// Ground truth for one auction: unit count, the seller's direct followers,
/// and every buyer's true type. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuctionInstance {
    units: u32,
    seller_followers: BTreeSet<BuyerId>,
    buyers: Vec<BuyerType>,
    value_cap: Option<Money>,
}

impl AuctionInstance {
    pub fn new(
        units: u32,
        seller_followers: impl IntoIterator<Item = u32>,
        buyers: Vec<BuyerType>,
        value_cap: Option<Money>,
    ) -> Result<Self, ModelError> {
        let instance = AuctionInstance {
            units,
            seller_followers: seller_followers.into_iter().map(BuyerId).collect(),
            buyers,
            value_cap,
        };
        instance.validate()?;
        Ok(instance)
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.units == 0 {
            return Err(ModelError::ZeroUnits);
        }
        let n = self.buyers.len();
        for &f in &self.seller_followers {
            if f.index() >= n {
                return Err(ModelError::DanglingFollower {
                    owner: Node::Seller,
                    follower: f,
                });
            }
        }
        for (idx, buyer) in self.buyers.iter().enumerate() {
            let id = BuyerId(idx as u32);
            for &f in &buyer.followers {
                if f == id {
                    return Err(ModelError::SelfFollower { buyer: id });
                }
                if f.index() >= n {
                    return Err(ModelError::DanglingFollower {
                        owner: Node::Buyer(id),
                        follower: f,
                    });
                }
            }
            if let Some(cap) = self.value_cap {
                if buyer.value > cap {
                    return Err(ModelError::ValueAboveCap {
                        buyer: id,
                        value: buyer.value,
                        cap,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn units(&self) -> u32 {
        self.units
    }

    pub fn buyer_count(&self) -> usize {
        self.buyers.len()
    }

    pub fn seller_followers(&self) -> &BTreeSet<BuyerId> {
        &self.seller_followers
    }

    pub fn value_cap(&self) -> Option<Money> {
        self.value_cap
    }

    pub fn buyer(&self, id: BuyerId) -> &BuyerType {
        &self.buyers[id.index()]
    }

    pub fn true_value(&self, id: BuyerId) -> Money {
        self.buyers[id.index()].value
    }

    pub fn buyer_ids(&self) -> impl Iterator<Item = BuyerId> + '_ {
        (0..self.buyers.len() as u32).map(BuyerId)
    }

    pub fn max_true_value(&self) -> Money {
        self.buyers.iter().map(|b| b.value).max().unwrap_or(0)
    }

    /// The same instance with the seller informing only `subset` of her
    /// direct followers. Used by the optimal-diffusion solver.
    pub fn restrict_seller(&self, subset: &BTreeSet<BuyerId>) -> Result<Self, ModelError> {
        for &id in subset {
            if !self.seller_followers.contains(&id) {
                return Err(ModelError::NotSellerFollower { id });
            }
        }
        let mut restricted = self.clone();
        restricted.seller_followers = subset.clone();
        Ok(restricted)
    }

    /// The same network selling a different number of units.
    pub fn with_units(&self, units: u32) -> Result<Self, ModelError> {
        if units == 0 {
            return Err(ModelError::ZeroUnits);
        }
        let mut out = self.clone();
        out.units = units;
        Ok(out)
    }
}

/// One buyer's declared type: reported value and the follower subset she
/// actually forwards to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Report {
    pub value: Money,
    pub forwarded: BTreeSet<BuyerId>,
}

impl Report {
    pub fn new(value: Money, forwarded: impl IntoIterator<Item = u32>) -> Self {
        Report {
            value,
            forwarded: forwarded.into_iter().map(BuyerId).collect(),
        }
    }
}

/// The full profile of declared types, indexed by buyer id. A report may
/// only forward to true followers, so a profile is always validated against
/// its instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportProfile {
    reports: Vec<Report>,
}

impl ReportProfile {
    pub fn new(instance: &AuctionInstance, reports: Vec<Report>) -> Result<Self, ModelError> {
        if reports.len() != instance.buyer_count() {
            return Err(ModelError::ReportLengthMismatch {
                expected: instance.buyer_count(),
                got: reports.len(),
            });
        }
        for (idx, report) in reports.iter().enumerate() {
            let id = BuyerId(idx as u32);
            for &f in &report.forwarded {
                if !instance.buyer(id).followers.contains(&f) {
                    return Err(ModelError::ForwardOutsideFollowers {
                        buyer: id,
                        follower: f,
                    });
                }
            }
            if let Some(cap) = instance.value_cap {
                if report.value > cap {
                    return Err(ModelError::ValueAboveCap {
                        buyer: id,
                        value: report.value,
                        cap,
                    });
                }
            }
        }
        Ok(ReportProfile { reports })
    }

    /// Every buyer reports her true value and forwards to all followers.
    pub fn truthful(instance: &AuctionInstance) -> Self {
        ReportProfile {
            reports: instance
                .buyers
                .iter()
                .map(|b| Report {
                    value: b.value,
                    forwarded: b.followers.clone(),
                })
                .collect(),
        }
    }

    /// This profile with buyer `id`'s report swapped out.
    pub fn with_report(
        &self,
        instance: &AuctionInstance,
        id: BuyerId,
        report: Report,
    ) -> Result<Self, ModelError> {
        let mut reports = self.reports.clone();
        reports[id.index()] = report;
        ReportProfile::new(instance, reports)
    }

    pub fn value(&self, id: BuyerId) -> Money {
        self.reports[id.index()].value
    }

    pub fn forwarded(&self, id: BuyerId) -> &BTreeSet<BuyerId> {
        &self.reports[id.index()].forwarded
    }

    pub fn report(&self, id: BuyerId) -> &Report {
        &self.reports[id.index()]
    }

    pub fn reports(&self) -> &[Report] {
        &self.reports
    }
}

/// Connected buyers and their BFS distances from the seller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityView {
    distances: Vec<Option<u32>>,
    connected: Vec<BuyerId>,
}

impl ReachabilityView {
    pub fn is_connected(&self, id: BuyerId) -> bool {
        self.distances[id.index()].is_some()
    }

    /// Shortest-path distance from the seller, `None` when unreachable.
    pub fn distance(&self, id: BuyerId) -> Option<u32> {
        self.distances[id.index()]
    }

    /// Connected buyers in ascending id order.
    pub fn connected(&self) -> &[BuyerId] {
        &self.connected
    }

    pub fn connected_count(&self) -> usize {
        self.connected.len()
    }
}

// Internal index space: 0 is the seller, buyer b maps to b.index() + 1.
const SELLER: usize = 0;

fn node_of(idx: usize) -> Node {
    if idx == SELLER {
        Node::Seller
    } else {
        Node::Buyer(BuyerId((idx - 1) as u32))
    }
}

/// Forward adjacency of the effective (reported) network over internal
/// indices.
fn effective_edges(instance: &AuctionInstance, report: &ReportProfile) -> Vec<Vec<usize>> {
    let n = instance.buyer_count();
    let mut out = vec![Vec::new(); n + 1];
    out[SELLER] = instance
        .seller_followers
        .iter()
        .map(|b| b.index() + 1)
        .collect();
    for idx in 0..n {
        out[idx + 1] = report
            .forwarded(BuyerId(idx as u32))
            .iter()
            .map(|b| b.index() + 1)
            .collect();
    }
    out
}

/// BFS from the seller over `edges`, optionally pretending `removed` does
/// not exist. Returns per-index distances; the seller has distance 0.
fn bfs_distances(edges: &[Vec<usize>], removed: Option<usize>) -> Vec<Option<u32>> {
    let mut dist = vec![None; edges.len()];
    if removed == Some(SELLER) {
        return dist;
    }
    dist[SELLER] = Some(0);
    let mut queue = VecDeque::from([SELLER]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in &edges[u] {
            if Some(v) == removed || dist[v].is_some() {
                continue;
            }
            dist[v] = Some(du + 1);
            queue.push_back(v);
        }
    }
    dist
}

/// Connected buyers and shortest-path distances under the reported
/// forwarding. Unreached buyers have no finite distance.
pub fn connected_and_distances(
    instance: &AuctionInstance,
    report: &ReportProfile,
) -> ReachabilityView {
    let edges = effective_edges(instance, report);
    view_from(&bfs_distances(&edges, None))
}

fn view_from(raw: &[Option<u32>]) -> ReachabilityView {
    let distances: Vec<Option<u32>> = raw[1..].to_vec();
    let connected = distances
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.map(|_| BuyerId(i as u32)))
        .collect();
    ReachabilityView {
        distances,
        connected,
    }
}

/// Immediate dominators of the reachable subgraph, computed by the
/// iterative intersection scheme over reverse postorder. Runs to a
/// fixpoint, so cycles (the network is a general digraph) are handled.
fn immediate_dominators(edges: &[Vec<usize>]) -> Vec<Option<usize>> {
    let n = edges.len();
    // Reverse postorder of the reachable subgraph, seller first.
    let mut state = vec![0u8; n]; // 0 unseen, 1 on stack, 2 done
    let mut postorder = Vec::new();
    let mut stack: Vec<(usize, usize)> = vec![(SELLER, 0)];
    state[SELLER] = 1;
    while let Some(&mut (u, ref mut next)) = stack.last_mut() {
        if *next < edges[u].len() {
            let v = edges[u][*next];
            *next += 1;
            if state[v] == 0 {
                state[v] = 1;
                stack.push((v, 0));
            }
        } else {
            state[u] = 2;
            postorder.push(u);
            stack.pop();
        }
    }
    let order: Vec<usize> = postorder.into_iter().rev().collect();
    let mut rpo_number = vec![usize::MAX; n];
    for (i, &u) in order.iter().enumerate() {
        rpo_number[u] = i;
    }

    let mut preds = vec![Vec::new(); n];
    for (u, outs) in edges.iter().enumerate() {
        if rpo_number[u] == usize::MAX {
            continue;
        }
        for &v in outs {
            preds[v].push(u);
        }
    }

    let mut idom: Vec<Option<usize>> = vec![None; n];
    idom[SELLER] = Some(SELLER);
    let intersect = |idom: &[Option<usize>], rpo: &[usize], mut a: usize, mut b: usize| {
        while a != b {
            while rpo[a] > rpo[b] {
                a = idom[a].unwrap();
            }
            while rpo[b] > rpo[a] {
                b = idom[b].unwrap();
            }
        }
        a
    };
    let mut changed = true;
    while changed {
        changed = false;
        for &u in order.iter().skip(1) {
            let mut new_idom = None;
            for &p in &preds[u] {
                if idom[p].is_none() {
                    continue;
                }
                new_idom = Some(match new_idom {
                    None => p,
                    Some(cur) => intersect(&idom, &rpo_number, p, cur),
                });
            }
            if new_idom.is_some() && idom[u] != new_idom {
                idom[u] = new_idom;
                changed = true;
            }
        }
    }
    idom
}

/// All critical parents of `i`: the buyers that appear on every path from
/// the seller to `i`. Equal to the strict dominators of `i`, i.e. the
/// buyers on `i`'s immediate-dominator chain.
pub fn critical_parents(
    instance: &AuctionInstance,
    report: &ReportProfile,
    i: BuyerId,
) -> Result<BTreeSet<BuyerId>, ModelError> {
    let edges = effective_edges(instance, report);
    let idom = immediate_dominators(&edges);
    critical_parents_from_idom(&idom, i)
}

fn critical_parents_from_idom(
    idom: &[Option<usize>],
    i: BuyerId,
) -> Result<BTreeSet<BuyerId>, ModelError> {
    let start = i.index() + 1;
    if idom[start].is_none() {
        return Err(ModelError::NotConnected { buyer: i });
    }
    let mut parents = BTreeSet::new();
    let mut cur = idom[start].unwrap();
    while cur != SELLER {
        parents.insert(BuyerId((cur - 1) as u32));
        cur = idom[cur].unwrap();
    }
    Ok(parents)
}

/// The critical parent closest to `i` (the immediate dominator), or the
/// seller when `i` has no critical parent.
pub fn least_critical_parent(
    instance: &AuctionInstance,
    report: &ReportProfile,
    i: BuyerId,
) -> Result<Node, ModelError> {
    let edges = effective_edges(instance, report);
    let idom = immediate_dominators(&edges);
    match idom[i.index() + 1] {
        None => Err(ModelError::NotConnected { buyer: i }),
        Some(p) => Ok(node_of(p)),
    }
}

/// Reference oracle for critical parents: delete each candidate in turn and
/// re-run BFS. Quadratic, kept for cross-validation against the dominator
/// path.
pub fn critical_parents_by_removal(
    instance: &AuctionInstance,
    report: &ReportProfile,
    i: BuyerId,
) -> Result<BTreeSet<BuyerId>, ModelError> {
    let edges = effective_edges(instance, report);
    let base = bfs_distances(&edges, None);
    let target = i.index() + 1;
    if base[target].is_none() {
        return Err(ModelError::NotConnected { buyer: i });
    }
    let mut parents = BTreeSet::new();
    for j in instance.buyer_ids() {
        let cand = j.index() + 1;
        if cand == target || base[cand].is_none() {
            continue;
        }
        if bfs_distances(&edges, Some(cand))[target].is_none() {
            parents.insert(j);
        }
    }
    Ok(parents)
}

/// Rooted tree over the connected buyers: each node's parent is its least
/// critical parent, or the seller when it has none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffusionCriticalTree {
    parent: BTreeMap<BuyerId, Node>,
    children: BTreeMap<BuyerId, Vec<BuyerId>>,
    roots: Vec<BuyerId>,
}

impl DiffusionCriticalTree {
    pub fn build(instance: &AuctionInstance, report: &ReportProfile) -> Self {
        let edges = effective_edges(instance, report);
        let idom = immediate_dominators(&edges);
        Self::from_idom(&idom)
    }

    fn from_idom(idom: &[Option<usize>]) -> Self {
        let mut parent = BTreeMap::new();
        let mut children: BTreeMap<BuyerId, Vec<BuyerId>> = BTreeMap::new();
        let mut roots = Vec::new();
        for (idx, dom) in idom.iter().enumerate().skip(1) {
            let Some(p) = dom else { continue };
            let id = BuyerId((idx - 1) as u32);
            let parent_node = node_of(*p);
            parent.insert(id, parent_node);
            match parent_node {
                Node::Seller => roots.push(id),
                Node::Buyer(pb) => children.entry(pb).or_default().push(id),
            }
        }
        // BTreeMap iteration already yields children in ascending id order,
        // but entries were pushed in idom index order, which is ascending.
        DiffusionCriticalTree {
            parent,
            children,
            roots,
        }
    }

    pub fn contains(&self, id: BuyerId) -> bool {
        self.parent.contains_key(&id)
    }

    pub fn parent(&self, id: BuyerId) -> Option<Node> {
        self.parent.get(&id).copied()
    }

    pub fn children(&self, id: BuyerId) -> &[BuyerId] {
        self.children.get(&id).map_or(&[], Vec::as_slice)
    }

    /// Children of the seller, ascending.
    pub fn roots(&self) -> &[BuyerId] {
        &self.roots
    }

    /// Connected buyers in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = BuyerId> + '_ {
        self.parent.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// The subtree rooted at `id`, including `id` itself.
    pub fn subtree(&self, id: BuyerId) -> Vec<BuyerId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children(u).iter().copied());
        }
        out
    }

    /// The connected buyers that remain once `id` and all of its
    /// descendants are removed: the set a buyer competes against.
    pub fn eligible_others(&self, id: BuyerId) -> BTreeSet<BuyerId> {
        let mut others: BTreeSet<BuyerId> = self.parent.keys().copied().collect();
        for d in self.subtree(id) {
            others.remove(&d);
        }
        others
    }
}

/// Free-function form of [`DiffusionCriticalTree::build`].
pub fn build_critical_tree(
    instance: &AuctionInstance,
    report: &ReportProfile,
) -> DiffusionCriticalTree {
    DiffusionCriticalTree::build(instance, report)
}
