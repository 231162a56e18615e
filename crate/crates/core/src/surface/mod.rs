//! A small named surface language, its elaboration into the name-free
//! `p`/`q` calculus, and its interpretation in the model.

mod ast;
mod elab;
mod interp;
mod lexer;
mod parser;

pub use ast::{
    print_surface, CatRef, CtxExpr, CtxSpec, Decl, Item, Script, SurfaceTerm, SurfaceType, KEYWORDS,
};
pub use elab::{elaborate, print_combinator, CombTy, Combinator};
pub use interp::{
    discrete_size, interpret_in, run_script, Interpreted, Output, ScriptOptions, ScriptRun, SemTy,
    TermOut,
};
pub use lexer::Pos;
pub use parser::{parse_script, parse_term, parse_type};

#[cfg(test)]
mod tests {
    use std::path::Path;
    use std::sync::Arc;

    use super::*;
    use crate::catcore::{named, ObjId};
    use crate::cwf::{discrete_tm, empty_ctx, validate_tm};
    use crate::formers::app_tm;
    use crate::presheaf::FinSet;
    use crate::Error;

    fn run(text: &str) -> crate::Result<ScriptRun> {
        run_script(text, Path::new("."), ScriptOptions::default())
    }

    #[test]
    fn identity_applied_to_a_literal() {
        let out = run("ctx H = empty(terminal)\n\
             term id : Pi(x:{2}) {2} = \\x. x in H\n\
             term r : {2} = id #1 in H\n\
             check r")
        .unwrap();
        let id = out.term("id").unwrap();
        assert_eq!(print_combinator(&id.combinator), "lam(q)");
        assert_eq!(out.term("r").unwrap().term.at(ObjId(0), 0), 1);
        // beta computed directly by the kernel
        let SemTy::Pi { former, .. } = &id.sem else {
            panic!()
        };
        let one = discrete_tm(id.term.ctx(), FinSet::new(2), 1).unwrap();
        assert_eq!(app_tm(former, &id.term, &one).unwrap().at(ObjId(0), 0), 1);
        let Output::Check { report, .. } = &out.outputs[0] else {
            panic!()
        };
        assert!(report.is_ok());
    }

    #[test]
    fn literal_under_a_binder() {
        let out = run("ctx H = yoneda(walking_arrow, b)\nterm k : {3} = #1 in H, x:{2}").unwrap();
        let k = out.term("k").unwrap();
        assert_eq!(print_combinator(&k.combinator), "#1");
        assert!(k.term.table().iter().flatten().all(|&v| v == 1));
        assert!(validate_tm(&k.term).is_ok());
    }

    #[test]
    fn lambda_without_body_is_a_positioned_syntax_error() {
        let Err(Error::Script { line, col, .. }) =
            run("ctx H = empty(terminal)\nterm f : {2} = \\x in H")
        else {
            panic!()
        };
        assert_eq!((line, col), (2, 19));
    }

    #[test]
    fn pairs_and_projections() {
        let out = run("ctx H = yoneda(chain3, c)\n\
             term s : Sigma(x:{2}) {3} = (#1, #2) in H\n\
             term a : {2} = s.1 in H\n\
             term b : {3} = s.2 in H\n\
             term f : Pi(x:{2}) Sigma(y:{2}) {2} = \\x. (x, x) in H")
        .unwrap();
        assert!(out
            .term("a")
            .unwrap()
            .term
            .table()
            .iter()
            .flatten()
            .all(|&v| v == 1));
        assert!(out
            .term("b")
            .unwrap()
            .term
            .table()
            .iter()
            .flatten()
            .all(|&v| v == 2));
        assert!(validate_tm(&out.term("f").unwrap().term).is_ok());
    }

    #[test]
    fn declared_names_weaken_into_longer_contexts() {
        let out = run("ctx H = yoneda(walking_arrow, b)\n\
             type T = {3} in H\n\
             term t : T = #2 in H\n\
             term u : T = t in H, x:{2}, y:T")
        .unwrap();
        let u = out.term("u").unwrap();
        assert_eq!(print_combinator(&u.combinator), "((t)p)p");
        assert!(u.term.table().iter().flatten().all(|&v| v == 2));
    }

    #[test]
    fn dependent_binders() {
        let out = run("ctx H = empty(terminal)\n\
             term g : Pi(f:Pi(x:{2}) {3}) {3} = \\f. f #0 in H\n\
             term y : {2} = x in H, x:{2}, z:Sigma(w:{2}) {2}")
        .unwrap();
        assert_eq!(
            print_combinator(&out.term("g").unwrap().combinator),
            "lam(app(q, #0))"
        );
        assert_eq!(print_combinator(&out.term("y").unwrap().combinator), "(q)p");
    }

    #[test]
    fn errors_name_the_problem() {
        let msg = |s: &str| run(s).unwrap_err().to_string();
        assert!(msg("ctx H = empty(terminal)\nterm a : {2} = y in H, x:{2}")
            .contains("unbound variable `y`"));
        assert!(msg("ctx H = empty(terminal)\nterm a : {2} = #5 in H").contains("#5"));
        assert!(
            msg("ctx H = empty(terminal)\nterm a : {2} = #1 in H\nterm b : {3} = a in H")
                .contains("type mismatch")
        );
        assert!(
            msg("ctx H = empty(terminal)\nterm a : {2} = \\x. x in H").contains("cannot have type")
        );
        assert!(msg("term a : {2} = #1 in H").starts_with("1:1:"));
        assert!(msg("ctx H = yoneda(terminal, nope)").contains("nope"));
    }

    #[test]
    fn interpret_in_returns_binder_types() {
        let h = Arc::new(empty_ctx(&Arc::new(named::chain3())));
        let binders = vec![
            ("x".to_string(), SurfaceType::Discrete(2)),
            ("y".to_string(), SurfaceType::Discrete(3)),
        ];
        let got = interpret_in(
            &h,
            &binders,
            &SurfaceType::Discrete(2),
            &parse_term("x").unwrap(),
            ScriptOptions::default(),
        )
        .unwrap();
        assert_eq!(got.binders.len(), 2);
        assert_eq!(print_combinator(&got.combinator), "(q)p");
    }
}
