//! Shared inputs for the benchmarks.

use weylkit::weyl::PolyFamily;

/// Families of increasing Weyl complexity.
pub const FAMILIES: &[(&str, &str)] = &[
    ("n,2n,3n", "n, 2n, 3n"),
    ("n,2n,n^2", "n, 2n, n^2"),
    ("n,2n,3n,4n", "n, 2n, 3n, 4n"),
    ("n^2,n^3+n,2n^4", "n^2, n^3 + n, 2n^4"),
];

pub fn family(text: &str) -> PolyFamily {
    PolyFamily::parse(text).expect("valid family")
}
