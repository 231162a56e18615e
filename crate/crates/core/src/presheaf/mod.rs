//! Presheaves over finite categories, presheaf maps, representables and the
//! Yoneda embedding, and the category of elements.

mod elements;
mod finset;
#[allow(clippy::module_inception)]
mod presheaf;
mod yoneda;

pub use elements::category_of_elements;
pub(crate) use elements::element_offsets;
pub use finset::FinSet;
pub(crate) use presheaf::same_presheaf;
pub use presheaf::{
    compose_maps, enumerate_presheaves, enumerate_pshmaps, for_each_presheaf, for_each_pshmap,
    identity_map, singleton_presheaf, validate_presheaf, validate_pshmap, Presheaf, PshMap,
};
pub use yoneda::{check_yoneda_lemma, yoneda, yoneda_map, YonedaPair, YonedaReport};
