//! Hand-built quote sequences with enumerated expected counts.

use hftml_core::tickdata::{Price, Quote};

pub struct Case {
    pub name: String,
    pub quotes: Vec<Quote>,
    pub up: u64,
    pub down: u64,
    pub skipped: u64,
}

/// Quote at second `s` with bid/ask in cents.
pub fn q(s: i64, bid: i64, ask: i64) -> Quote {
    Quote { ts_ns: s * 1_000_000_000, bid: Price::from_cents(bid), ask: Price::from_cents(ask), bid_sz: 100, ask_sz: 100 }
}

fn qm(s: i64, bid_micros: i64, ask_micros: i64) -> Quote {
    Quote { ts_ns: s * 1_000_000_000, bid: Price::from_micros(bid_micros), ask: Price::from_micros(ask_micros), bid_sz: 100, ask_sz: 100 }
}

fn case(name: &str, quotes: Vec<Quote>, up: u64, down: u64, skipped: u64) -> Case {
    Case { name: name.to_string(), quotes, up, down, skipped }
}

pub fn cases() -> Vec<Case> {
    let mut v = vec![
        case("empty", vec![], 0, 0, 0),
        case("single quote", vec![q(0, 998, 1000)], 0, 0, 0),
        case("zero jump", vec![q(0, 998, 1000), q(1, 998, 1000), q(2, 998, 1000)], 0, 0, 0),
        case("single up", vec![q(0, 998, 1000), q(1, 1001, 1003)], 1, 0, 0),
        case("single down", vec![q(0, 1000, 1002), q(1, 996, 998)], 0, 1, 0),
        case("crossed prior skipped", vec![q(0, 1002, 1000), q(1, 1010, 1012)], 0, 0, 1),
        case("locked prior skipped", vec![q(0, 1000, 1000), q(1, 1010, 1012)], 0, 0, 1),
        case("crossed current still compared", vec![q(0, 998, 1000), q(1, 1004, 1002)], 1, 0, 0),
        case("duplicate quote", vec![q(0, 998, 1000), q(0, 998, 1000), q(1, 998, 1000)], 0, 0, 0),
        case("duplicate after jump", vec![q(0, 998, 1000), q(1, 1001, 1003), q(1, 1001, 1003)], 1, 0, 0),
        case("up boundary is strict", vec![q(0, 998, 1000), q(1, 1000, 1002)], 0, 0, 0),
        case("down boundary is strict", vec![q(0, 1000, 1002), q(1, 998, 1000)], 0, 0, 0),
        case("half-cent mid above boundary", vec![q(0, 998, 1000), q(1, 1001, 1002)], 1, 0, 0),
        case("half-cent mid below boundary", vec![q(0, 998, 1000), q(1, 1000, 1001)], 0, 0, 0),
        case("one micro past up boundary", vec![qm(0, 9_980_000, 10_000_000), qm(1, 10_000_001, 10_020_001)], 1, 0, 0),
        case("one micro short of down boundary", vec![qm(0, 10_000_000, 10_020_000), qm(1, 9_980_001, 10_000_001)], 0, 0, 0),
        case("up then down", vec![q(0, 998, 1000), q(1, 1001, 1003), q(2, 998, 1000)], 1, 1, 0),
        case("two ups", vec![q(0, 998, 1000), q(1, 1001, 1003), q(2, 1004, 1006)], 2, 0, 0),
        case("gradual drift", (0..10).map(|k| q(k, 998 + k, 1000 + k)).collect(), 0, 0, 0),
        case("wide spread absorbs jump", vec![q(0, 990, 1010), q(1, 1000, 1020)], 0, 0, 0),
        case("crossed between jumps", vec![q(0, 998, 1000), q(1, 1003, 1001), q(2, 1010, 1012)], 1, 0, 1),
        case("same timestamp jump", vec![q(0, 998, 1000), q(0, 1001, 1003)], 1, 0, 0),
    ];
    // ladders: spread s cents, then the book shifts by j cents
    for (s, j) in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 2), (3, 3), (4, 3), (4, 4), (5, 4), (2, 10), (10, 5), (10, 7)] {
        let up = u64::from(2 * j > s + 2);
        v.push(case(&format!("shift up {j} on spread {s}"), vec![q(0, 1000, 1000 + s), q(1, 1000 + j, 1000 + s + j)], up, 0, 0));
        v.push(case(&format!("shift down {j} on spread {s}"), vec![q(0, 1000, 1000 + s), q(1, 1000 - j, 1000 + s - j)], 0, up, 0));
    }
    // alternating jumps, n of each kind
    for n in 1..=4i64 {
        let mut quotes = vec![q(0, 998, 1000)];
        for k in 0..n {
            quotes.push(q(2 * k + 1, 1001, 1003));
            quotes.push(q(2 * k + 2, 998, 1000));
        }
        v.push(case(&format!("{n} round trips"), quotes, n as u64, n as u64, 0));
    }
    v
}
