//! Small hand-built instances used across tests, benches, and the shipped
//! instance files.

use crate::network::{AuctionInstance, BuyerType};

/// Seven buyers, three units. The network contains a two-cycle between
/// buyers 1 and 2 and a branch whose critical tree differs from the raw
/// adjacency, which makes it a compact exercise for reachability, critical
/// parents, and the mechanism loop.
///
/// Edges: seller -> {0, 1}; 0 -> 2; 1 <-> 2; 1 -> 3; 2 -> 4; 4 -> {5, 6}.
pub fn seven_buyers() -> AuctionInstance {
    let buyers = vec![
        BuyerType::new(30, [2]),
        BuyerType::new(72, [2, 3]),
        BuyerType::new(34, [1, 4]),
        BuyerType::new(45, []),
        BuyerType::new(50, [5, 6]),
        BuyerType::new(66, []),
        BuyerType::new(40, []),
    ];
    AuctionInstance::new(3, [0, 1], buyers, Some(100)).expect("static instance is valid")
}

/// Four buyers, two units. Informing all three direct buyers yields less
/// revenue than informing only buyers 0 and 1, so this is the canonical
/// witness that seller revenue is not monotone in the informed set.
///
/// Edges: seller -> {0, 1, 2}; 0 -> 3.
pub fn revenue_nonmonotone() -> AuctionInstance {
    let buyers = vec![
        BuyerType::new(5, [3]),
        BuyerType::new(20, []),
        BuyerType::new(6, []),
        BuyerType::new(15, []),
    ];
    AuctionInstance::new(2, [0, 1, 2], buyers, Some(100)).expect("static instance is valid")
}

/// Four buyers, two units, two parallel parent/child branches. Buyer 1's
/// utility is identical whether she forwards to buyer 3 or hides: hiding
/// lets buyer 0 win for free, which cancels out the price relief.
///
/// Edges: seller -> {0, 1}; 0 -> 2; 1 -> 3.
pub fn hiding_tie() -> AuctionInstance {
    let buyers = vec![
        BuyerType::new(10, [2]),
        BuyerType::new(15, [3]),
        BuyerType::new(9, []),
        BuyerType::new(20, []),
    ];
    AuctionInstance::new(2, [0, 1], buyers, Some(100)).expect("static instance is valid")
}

/// Same shape as [`hiding_tie`] with buyer 2's value raised to 12. Now
/// hiding strictly hurts buyer 1: sincere forwarding wins at price 10,
/// hiding wins at price 12.
pub fn hiding_strict() -> AuctionInstance {
    let buyers = vec![
        BuyerType::new(10, [2]),
        BuyerType::new(15, [3]),
        BuyerType::new(12, []),
        BuyerType::new(20, []),
    ];
    AuctionInstance::new(2, [0, 1], buyers, Some(100)).expect("static instance is valid")
}
