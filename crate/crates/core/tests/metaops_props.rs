//! Laws relating suspension, opposites, lifting, inverses and substitution,
//! checked on random well-typed instances.

mod common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn suspension_commutes_with_substitution(raw in common::choices()) {
        common::suspension_commutes_with_substitution(raw)?;
    }

    #[test]
    fn suspension_commutes_with_composites(raw in common::choices()) {
        common::suspension_commutes_with_composites(raw)?;
    }

    #[test]
    fn opposite_commutes_with_substitution(raw in common::choices()) {
        common::opposite_commutes_with_substitution(raw)?;
    }

    #[test]
    fn opposite_composite_and_identity_laws(raw in common::choices()) {
        common::opposite_composite_and_identity_laws(raw)?;
    }

    #[test]
    fn inclusion_absorbs_disjoint_terms(raw in common::choices()) {
        common::inclusion_absorbs_disjoint_terms(raw)?;
    }

    #[test]
    fn lifting_commutes_with_substitution(raw in common::choices()) {
        common::lifting_commutes_with_substitution(raw)?;
    }

    #[test]
    fn suspension_commutes_with_lifting(raw in common::choices()) {
        common::suspension_commutes_with_lifting(raw)?;
    }

    #[test]
    fn opposite_commutes_with_lifting(raw in common::choices()) {
        common::opposite_commutes_with_lifting(raw)?;
    }

    #[test]
    fn inverse_commutes_with_substitution(raw in common::choices()) {
        common::inverse_commutes_with_substitution(raw)?;
    }
}
