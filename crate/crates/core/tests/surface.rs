use presheaf_cwf::surface::{
    parse_script, parse_term, parse_type, print_surface, CatRef, CtxExpr, CtxSpec, Decl, Item, Pos,
    Script, SurfaceTerm, SurfaceType, KEYWORDS,
};
use proptest::prelude::*;

fn name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_']{0,3}".prop_filter("keyword", |s| !KEYWORDS.contains(&s.as_str()))
}

fn path() -> impl Strategy<Value = String> {
    "[a-z/._]{1,8}"
}

fn ty() -> impl Strategy<Value = SurfaceType> {
    let leaf = prop_oneof![
        (0usize..5).prop_map(SurfaceType::Discrete),
        name().prop_map(SurfaceType::Ref),
        path().prop_map(SurfaceType::File),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (name(), inner.clone(), inner.clone()).prop_map(|(x, a, b)| SurfaceType::Pi(
                x,
                Box::new(a),
                Box::new(b)
            )),
            (name(), inner.clone(), inner).prop_map(|(x, a, b)| SurfaceType::Sigma(
                x,
                Box::new(a),
                Box::new(b)
            )),
        ]
    })
}

fn tm() -> impl Strategy<Value = SurfaceTerm> {
    let leaf = prop_oneof![
        name().prop_map(SurfaceTerm::Var),
        (0usize..9).prop_map(SurfaceTerm::Lit)
    ];
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            (name(), inner.clone()).prop_map(|(x, b)| SurfaceTerm::Lam(x, Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(f, a)| SurfaceTerm::App(Box::new(f), Box::new(a))),
            (inner.clone(), inner.clone())
                .prop_map(|(l, r)| SurfaceTerm::Pair(Box::new(l), Box::new(r))),
            inner.clone().prop_map(|t| SurfaceTerm::Proj1(Box::new(t))),
            inner.prop_map(|t| SurfaceTerm::Proj2(Box::new(t))),
        ]
    })
}

fn spec() -> impl Strategy<Value = CtxSpec> {
    (name(), prop::collection::vec((name(), ty()), 0..3)).prop_map(|(base, mut binders)| {
        // binder names are unique within a spec
        let mut seen = std::collections::HashSet::new();
        binders.retain(|(x, _)| seen.insert(x.clone()));
        CtxSpec { base, binders }
    })
}

fn cat() -> impl Strategy<Value = CatRef> {
    prop_oneof![
        name().prop_map(CatRef::Builtin),
        path().prop_map(CatRef::File)
    ]
}

fn decl() -> impl Strategy<Value = Decl> {
    prop_oneof![
        (name(), cat()).prop_map(|(name, c)| Decl::Ctx {
            name,
            expr: CtxExpr::Empty(c)
        }),
        (name(), cat(), name()).prop_map(|(name, c, x)| Decl::Ctx {
            name,
            expr: CtxExpr::Yoneda(c, x)
        }),
        (name(), path()).prop_map(|(name, p)| Decl::Ctx {
            name,
            expr: CtxExpr::File(p)
        }),
        (name(), ty(), spec()).prop_map(|(name, ty, ctx)| Decl::Type { name, ty, ctx }),
        (name(), ty(), tm(), spec()).prop_map(|(name, ty, tm, ctx)| Decl::Term {
            name,
            ty,
            tm,
            ctx
        }),
        name().prop_map(Decl::Eval),
        name().prop_map(Decl::Check),
    ]
}

fn decl_name(d: &Decl) -> Option<(usize, &str)> {
    match d {
        Decl::Ctx { name, .. } => Some((0, name)),
        Decl::Type { name, .. } => Some((1, name)),
        Decl::Term { name, .. } => Some((2, name)),
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn terms_round_trip(t in tm()) {
        let text = print_surface(&t);
        prop_assert_eq!(parse_term(&text).unwrap(), t, "{}", text);
    }

    #[test]
    fn types_round_trip(a in ty()) {
        prop_assert_eq!(parse_type(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn scripts_round_trip(decls in prop::collection::vec(decl(), 0..6)) {
        let mut seen = std::collections::HashSet::new();
        let decls: Vec<Decl> = decls
            .into_iter()
            .filter(|d| decl_name(d).is_none_or(|(k, n)| seen.insert((k, n.to_string()))))
            .collect();
        let script = Script { items: decls.into_iter().map(|decl| Item { pos: Pos::default(), decl }).collect() };
        let parsed = parse_script(&script.to_string()).unwrap();
        let got: Vec<&Decl> = parsed.decls().collect();
        let want: Vec<&Decl> = script.decls().collect();
        prop_assert_eq!(got, want);
    }
}

#[test]
fn documented_examples_round_trip() {
    for text in [
        "term id : Pi(x:{2}) {2} = \\x. x in H",
        "term k : {3} = #1 in H, x:{2}",
        "term f : Pi(x:{2}) Sigma(y:{2}) {2} = \\x. (x, x) in H",
    ] {
        let s = parse_script(text).unwrap();
        assert_eq!(s.to_string().trim_end(), text);
    }
}

#[test]
fn application_is_left_nested_and_lambdas_extend_right() {
    let t = parse_term("\\x. f x y.1").unwrap();
    assert_eq!(print_surface(&t), "\\x. f x y.1");
    let SurfaceTerm::Lam(_, body) = t else {
        panic!()
    };
    let SurfaceTerm::App(fx, y1) = *body else {
        panic!()
    };
    assert!(matches!(*fx, SurfaceTerm::App(..)));
    assert!(matches!(*y1, SurfaceTerm::Proj1(_)));
}

#[test]
fn duplicate_declarations_are_rejected() {
    let e = parse_script("ctx H = empty(terminal)\nctx H = empty(terminal)").unwrap_err();
    assert!(e.to_string().starts_with("2:1:"), "{e}");
    assert!(parse_script("type A = {2} in H, x:{2}, x:{2}").is_err());
    // different namespaces do not clash
    assert!(
        parse_script("ctx a = empty(terminal)\ntype a = {2} in a\nterm a : a = #0 in a").is_ok()
    );
}
