//! The fixed set of result tags that reports attach to claims.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Citation {
    UniqueIrrepImpliesSimple,
    SimplicityCriterion,
    AfIffAcyclic,
    HereditaryRestrictionMorita,
    RelativeCkUniqueness,
    DoublingLadderUhf,
    DownstreamSetCountable,
    RowCountableRowFiniteAf,
    NoForbiddenLadder,
    AfDichotomy,
    CompactsUniqueSink,
    CompactsExclusiveTail,
    RowCountableCompacts,
    UncountableEmitterOpen,
    Computed,
}

impl Citation {
    pub const ALL: [Citation; 15] = [
        Citation::UniqueIrrepImpliesSimple,
        Citation::SimplicityCriterion,
        Citation::AfIffAcyclic,
        Citation::HereditaryRestrictionMorita,
        Citation::RelativeCkUniqueness,
        Citation::DoublingLadderUhf,
        Citation::DownstreamSetCountable,
        Citation::RowCountableRowFiniteAf,
        Citation::NoForbiddenLadder,
        Citation::AfDichotomy,
        Citation::CompactsUniqueSink,
        Citation::CompactsExclusiveTail,
        Citation::RowCountableCompacts,
        Citation::UncountableEmitterOpen,
        Citation::Computed,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Citation::UniqueIrrepImpliesSimple => "unique-irrep-implies-simple",
            Citation::SimplicityCriterion => "simplicity-criterion",
            Citation::AfIffAcyclic => "af-iff-acyclic",
            Citation::HereditaryRestrictionMorita => "hereditary-restriction-morita",
            Citation::RelativeCkUniqueness => "relative-ck-uniqueness",
            Citation::DoublingLadderUhf => "doubling-ladder-uhf",
            Citation::DownstreamSetCountable => "downstream-set-countable",
            Citation::RowCountableRowFiniteAf => "row-countable-row-finite-af",
            Citation::NoForbiddenLadder => "no-forbidden-ladder",
            Citation::AfDichotomy => "af-dichotomy",
            Citation::CompactsUniqueSink => "compacts-unique-sink",
            Citation::CompactsExclusiveTail => "compacts-exclusive-tail",
            Citation::RowCountableCompacts => "row-countable-compacts",
            Citation::UncountableEmitterOpen => "uncountable-emitter-open",
            Citation::Computed => "computed",
        }
    }

    /// The mathematical statement the tag stands for.
    pub fn statement(self) -> &'static str {
        match self {
            Citation::UniqueIrrepImpliesSimple => {
                "a C*-algebra with one irreducible representation up to unitary equivalence is simple"
            }
            Citation::SimplicityCriterion => {
                "C*(E) is simple iff E has Condition (L), is cofinal and every vertex reaches every singular vertex; \
                 equivalently iff E has Condition (L) and no proper nontrivial saturated hereditary set"
            }
            Citation::AfIffAcyclic => "C*(E) is AF iff E has no cycles",
            Citation::HereditaryRestrictionMorita => "for hereditary H, C*(E_H) is Morita equivalent to the ideal generated by H",
            Citation::RelativeCkUniqueness => {
                "under Condition (L), a homomorphism of C*(E,S) that is nonzero on every p_v and every gap projection is injective"
            }
            Citation::DoublingLadderUhf => {
                "the doubled ladder has a full corner isomorphic to the UHF algebra M_(2^infinity), so its algebra is not Type I"
            }
            Citation::DownstreamSetCountable => {
                "for row-countable E with a unique irreducible representation, E_H(v) is countable and C*(E_H(v)) is compacts"
            }
            Citation::RowCountableRowFiniteAf => {
                "with a unique irreducible representation: row-countable, row-finite and AF are equivalent"
            }
            Citation::NoForbiddenLadder => {
                "an AF graph algebra with a unique irreducible representation contains no infinite chain of doubled paths"
            }
            Citation::AfDichotomy => {
                "an AF graph algebra with a unique irreducible representation has exactly one sink and no infinite paths, \
                 or no sinks and an infinite path whose vertices each emit only that path's edge"
            }
            Citation::CompactsUniqueSink => "a unique sink v0 and no infinite paths give C*(E) = K(l2(paths ending at v0))",
            Citation::CompactsExclusiveTail => "simple with an exclusive infinite tail gives C*(E) = K(l2(infinite paths))",
            Citation::RowCountableCompacts => {
                "a row-countable graph algebra with a unique irreducible representation is the compacts on some Hilbert space"
            }
            Citation::UncountableEmitterOpen => {
                "a simple purely infinite graph algebra with an uncountable emitter is the only remaining candidate counterexample"
            }
            Citation::Computed => "established by direct computation in this tool",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn tags_are_distinct_and_serialize_as_tags() {
        let tags: HashSet<&str> = Citation::ALL.iter().map(|c| c.tag()).collect();
        assert_eq!(tags.len(), Citation::ALL.len());
        for c in Citation::ALL {
            assert_eq!(serde_json::to_value(c).unwrap(), serde_json::Value::String(c.tag().into()));
        }
    }
}
