//! The presheaf category with families: contexts are presheaves, context
//! maps are presheaf maps, and types and terms are tabulated families over
//! the elements of a context.

mod ops;
mod ty;

pub use ops::{
    ctx_extend, discrete_tm, discrete_ty, empty_ctx, enumerate_terms, enumerate_types,
    for_each_term, for_each_type, proj_p, proj_p_into, shift, sub_pair, sub_pair_into, sub_single,
    tm_subst, ty_from_presheaf, ty_subst, ty_to_presheaf, type_base, var_q, var_q_along, ExtLayout,
    Sub,
};
pub use ty::{validate_tm, validate_ty, Ctx, Fiber, PiFiber, PiKey, TmInCtx, TyInCtx};
