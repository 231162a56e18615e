//! Finite categories, functors, and natural transformations, all given by
//! explicit tables and checked by decidable validators.

mod category;
mod enumerate;
mod functor;
pub mod generate;
pub mod named;

pub use category::{discrete_cat, op_cat, validate_category, ArrId, Arrow, FinCategory, ObjId};
pub use enumerate::{enumerate_functors, enumerate_nat_trans, functor_category};
pub use functor::{
    compose_functors, constant_functor, identity_functor, identity_trans, is_full_and_faithful,
    trans_comp, validate_functor, validate_nat_trans, FullFaithfulReport, Functor, HomPairReport,
    NatTrans,
};
pub use generate::small_categories;
