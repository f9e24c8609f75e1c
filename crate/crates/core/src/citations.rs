//! Citation keys attached to predictions and report rows.

/// `(key, what the keyed result states)`.
pub const TABLE: &[(&str, &str)] = &[
    (
        "tail.ladder-length",
        "tail of the first strict ascending ladder length of the walk",
    ),
    (
        "tail.ladder-height",
        "tail of the first strict ascending ladder height of the walk",
    ),
    (
        "tail.even-cost",
        "tail of the first-ladder cost for an even cost of the jump",
    ),
    (
        "tail.odd-cost",
        "tail of the first-ladder cost for an odd cost of the jump",
    ),
    (
        "tail.ladder-cost",
        "tail of the n-th ladder cost on independent bond scenery",
    ),
    (
        "tail.y-height",
        "tail of the first ladder height of the walk embedded in a renewal medium",
    ),
    (
        "tail.y-length",
        "tail of the first ladder length of the walk embedded in a renewal medium",
    ),
    (
        "tail.first-passage-x",
        "tail of the first passage above 0 of the continuous-time walk in a medium",
    ),
    (
        "transform.power",
        "tail of a power of a variable with regularly varying tail",
    ),
    (
        "transform.product",
        "tail of a product of independent regularly varying variables",
    ),
    (
        "bound.cauchy-schwarz",
        "covariance sandwich for Laplace transforms of two costs",
    ),
    (
        "identity.local-times",
        "bond local-time identities up to the first ladder time",
    ),
    (
        "identity.ladder-decomposition",
        "cost at the n-th ladder time as a sum over windowed local times",
    ),
    (
        "identity.cost-routes",
        "agreement of direct, local-time and directional cost evaluations",
    ),
    (
        "identity.ladder-series",
        "ladder transforms as exponentials of series over the unrestricted walk",
    ),
    (
        "identity.symmetric-generating",
        "factorized joint generating function of ladder time and cost, even cost",
    ),
    (
        "identity.mixed-generating",
        "joint generating function of ladder time, cost and height",
    ),
    (
        "anchor.first-passage",
        "closed-form generating function of the simple-walk ladder time",
    ),
    (
        "anchor.phi",
        "closed-form values of the symmetric ladder factor",
    ),
    (
        "control.pareto",
        "estimator control on exact Pareto samples",
    ),
];

pub fn lookup(key: &str) -> Option<&'static str> {
    TABLE.iter().find(|(k, _)| *k == key).map(|(_, d)| *d)
}

pub fn resolves(key: &str) -> bool {
    lookup(key).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_unique() {
        let mut keys: Vec<_> = TABLE.iter().map(|(k, _)| *k).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), TABLE.len());
        assert!(resolves("tail.y-height"));
        assert!(!resolves("tail.unknown"));
    }
}
