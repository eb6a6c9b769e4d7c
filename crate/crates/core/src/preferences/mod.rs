//! Joint preferences: revealed preference, acyclicity, maximal sets,
//! rationalizability, separable preferences, richness of menu families and
//! additive utilities.

mod relation;
mod revealed;
mod separable;
mod utility;

pub use relation::{
    is_acyclic, maximal_elements, AcyclicityReport, JointPreference, PreferenceRelation, ProductSpace, MAX_SPACE,
};
pub use revealed::{
    is_rationalizable, rationalizability_via_selective_family, rationalizability_via_selective_family_unguarded,
    revealed_choice, revealed_preference, FamilyRationalizability, MemberRationalizability, RationalizabilityReport,
    RevealedPreference,
};
pub use separable::{induced_preference, is_s_rich, is_s_separable_preference, PreferenceSeparabilityReport, RichnessReport};
pub use utility::{additive_choice, parse_rational, AdditiveUtility, UtilityDocument};
