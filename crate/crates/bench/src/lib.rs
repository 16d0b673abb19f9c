//! Fixtures shared by the benchmarks.

use wordlab_core::words::{parse_word, WordKind};
use wordlab_core::{Carrier, Ring, WordMap};

pub const BUDGET: u64 = 1 << 34;

pub fn ring(lit: &str) -> Ring {
    Ring::parse(lit, None).expect("ring literal")
}

pub fn lie_map(word: &str, carrier: &str, ring_lit: &str) -> WordMap {
    let w = parse_word(word, WordKind::Lie).expect("word");
    WordMap::new(w, &Carrier::parse(carrier).expect("carrier"), &ring(ring_lit), BUDGET).expect("word map")
}

pub fn group_map(word: &str, n: usize, ring_lit: &str) -> WordMap {
    let w = parse_word(word, WordKind::Group).expect("word");
    WordMap::new(w, &Carrier::Sl(n), &ring(ring_lit), BUDGET).expect("word map")
}
