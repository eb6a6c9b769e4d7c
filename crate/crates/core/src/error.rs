use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a dataset needs at least one dimension")]
    NoDimensions,
    #[error("dimension `{0}` is listed more than once")]
    DuplicateDimension(String),
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("{count} dimensions given, at most {max} are supported")]
    TooManyDimensions { count: usize, max: usize },
    #[error("no universe given for dimension `{0}`")]
    MissingUniverse(String),
    #[error("universe of dimension `{0}` is empty")]
    EmptyUniverse(String),
    #[error("item `{item}` is listed twice in the universe of dimension `{dimension}`")]
    DuplicateItem { dimension: String, item: String },
    #[error("unknown item `{item}` in dimension `{dimension}`")]
    UnknownItem { dimension: String, item: String },
    #[error("dimension `{dimension}` has {count} items, at most {max} are supported")]
    TooManyItems {
        dimension: String,
        count: usize,
        max: usize,
    },
    #[error("menu #{menu} has no set for dimension `{dimension}`")]
    MissingDimension { menu: usize, dimension: String },
    #[error("menu #{menu} offers nothing in dimension `{dimension}`")]
    EmptyMenuSet { menu: usize, dimension: String },
    #[error("menu #{menu} has an empty choice")]
    EmptyChoice { menu: usize },
    #[error("menu #{menu} chooses {alternative}, which is not available in the menu")]
    ChoiceOutsideMenu { menu: usize, alternative: String },
    #[error("expected {expected} coordinates, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("menus #{first} and #{second} are identical")]
    DuplicateMenu { first: usize, second: usize },
    #[error("scope error: {0}")]
    ScopeError(String),
    #[error("the dimension subset must be nonempty")]
    EmptySubset,
    #[error("subset enumeration over {count} dimensions exceeds the limit of {max}")]
    TooManyForEnumeration { count: usize, max: usize },
    #[error("the joint choice is not single-valued")]
    NotSingleValued,
    #[error("the joint choice is not separable (fails on dimension `{dimension}`)")]
    NotSeparable { dimension: String },
    #[error("per-dimension decomposition does not reproduce menu #{menu}")]
    ReconstructionMismatch { menu: usize },
    #[error("family is not selective: {0}")]
    FamilyNotSelective(String),
    #[error("family member #{0} duplicates an earlier member")]
    DuplicateMember(usize),
    #[error("family member #{0} is empty")]
    EmptyMember(usize),
    #[error("constructed family failed selectivity re-verification")]
    InternalSelectivityFailure,
    #[error("the strict part of the relation has a cycle")]
    CyclicRelation,
    #[error("the preference is not separable for the requested subset")]
    NotSeparablePreference,
    #[error("branch utility for block #{block} has no value for `{key}`")]
    MissingBranchValue { block: usize, key: String },
    #[error("invalid utility: {0}")]
    InvalidUtility(String),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("invalid attention filter: {0}")]
    InvalidFilter(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("alternative space has {size} elements, at most {max} are supported")]
    SpaceTooLarge { size: usize, max: usize },
    #[error("malformed document: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
