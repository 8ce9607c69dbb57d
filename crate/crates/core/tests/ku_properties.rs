use std::collections::BTreeMap;

use kultc::ku::{detect_kus, parse_source, Detector, KuId, KuVector, Ruleset, SymbolIndex};
use proptest::prelude::*;

/// (import, statement template, KU the statement exercises)
const API: &[(&str, &str, usize)] = &[
    ("java.time.LocalDate", "LocalDate d{i} = LocalDate.now();", 12),
    ("java.io.File", "File f{i} = new File(\"x\");", 13),
    ("java.nio.file.Paths", "Object p{i} = Paths.get(\"a\");", 14),
    ("java.util.concurrent.atomic.AtomicLong", "AtomicLong a{i} = new AtomicLong();", 16),
    ("java.sql.Connection", "Connection c{i} = null;", 17),
    ("java.util.Locale", "Locale l{i} = Locale.getDefault();", 18),
];

const CORE: &[&str] = &[
    "int v{i} = 1 + {n};",
    "for (int j{i} = 0; j{i} < {n}; j{i}++) { }",
    "if ({n} > 2) { }",
    "int[] a{i} = new int[{n}];",
    "do { } while ({n} < 0);",
];

#[derive(Debug, Clone)]
enum Stmt {
    Core(usize, u8),
    Api(usize),
}

fn stmt() -> impl Strategy<Value = Stmt> {
    prop_oneof![
        (0..CORE.len(), 0u8..9).prop_map(|(k, n)| Stmt::Core(k, n)),
        (0..API.len()).prop_map(Stmt::Api),
    ]
}

fn render(class: &str, stmts: &[Stmt], import_prefix: Option<&str>) -> String {
    let mut imports: Vec<String> = stmts
        .iter()
        .filter_map(|s| match s {
            Stmt::Api(k) => Some(API[*k].0),
            _ => None,
        })
        .map(|imp| match import_prefix {
            None => format!("import {imp};"),
            Some(p) => format!("import {p}.{};", imp.rsplit('.').next().unwrap()),
        })
        .collect();
    imports.sort();
    imports.dedup();
    let body: Vec<String> = stmts
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (tpl, n) = match s {
                Stmt::Core(k, n) => (CORE[*k], *n),
                Stmt::Api(k) => (API[*k].1, 0),
            };
            format!("        {}", tpl.replace("{i}", &i.to_string()).replace("{n}", &n.to_string()))
        })
        .collect();
    format!(
        "{}\nclass {class} {{\n    void m() {{\n{}\n    }}\n}}\n",
        imports.join("\n"),
        body.join("\n")
    )
}

fn detect(src: &str) -> KuVector {
    let facts = parse_source(src).unwrap();
    let index = SymbolIndex::from_streams([&facts]);
    detect_kus(&facts, &index, Ruleset::builtin())
}

fn dominates(a: &KuVector, b: &KuVector) -> bool {
    a.counts.iter().zip(b.counts.iter()).all(|(x, y)| x >= y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detection_is_deterministic(stmts in prop::collection::vec(stmt(), 0..12)) {
        let src = render("A", &stmts, None);
        let first = detect(&src);
        prop_assert_eq!(first, detect(&src));
        let d = Detector::with_default_rules();
        let files = BTreeMap::from([("A.java".to_string(), src.clone())]);
        prop_assert_eq!(d.detect_snapshot(&files), first);
        prop_assert_eq!(d.detect_snapshot(&files), first);
    }

    #[test]
    fn appending_a_declaration_never_lowers_counts(
        stmts in prop::collection::vec(stmt(), 0..10),
        extra in prop::collection::vec(stmt(), 0..6),
    ) {
        let base = render("A", &stmts, None);
        let tail = render("Extra", &extra, None);
        let tail_body = tail.lines().filter(|l| !l.starts_with("import")).collect::<Vec<_>>().join("\n");
        let tail_imports = tail.lines().filter(|l| l.starts_with("import")).collect::<Vec<_>>().join("\n");
        let grown = format!("{tail_imports}\n{base}\n{tail_body}");
        prop_assert!(dominates(&detect(&grown), &detect(&base)));
    }

    #[test]
    fn counts_add_over_files(
        a in prop::collection::vec(stmt(), 0..8),
        b in prop::collection::vec(stmt(), 0..8),
    ) {
        let sa = render("A", &a, None);
        let sb = render("B", &b, None);
        let d = Detector::with_default_rules();
        let files = BTreeMap::from([("A.java".to_string(), sa.clone()), ("B.java".to_string(), sb.clone())]);
        let index = d.index(&files);
        let sum = d.detect_file("A.java", &sa, &index) + d.detect_file("B.java", &sb, &index);
        prop_assert_eq!(d.detect_snapshot(&files), sum);
    }

    #[test]
    fn third_party_types_contribute_nothing(stmts in prop::collection::vec(stmt(), 1..12)) {
        let platform = detect(&render("A", &stmts, None));
        let vendored = detect(&render("A", &stmts, Some("org.vendor.lib")));
        for ku in KuId::all() {
            if API.iter().any(|(_, _, k)| *k == ku.number()) {
                prop_assert_eq!(vendored.get(ku), 0, "{} leaked", ku);
            } else {
                prop_assert_eq!(vendored.get(ku), platform.get(ku));
            }
        }
    }

    #[test]
    fn unknown_names_contribute_nothing(stmts in prop::collection::vec(stmt(), 1..12)) {
        let mut src = render("A", &stmts, None);
        src = src.lines().filter(|l| !l.starts_with("import")).collect::<Vec<_>>().join("\n");
        for (imp, _, _) in API {
            let simple = imp.rsplit('.').next().unwrap();
            src = src.replace(simple, &format!("{simple}Vendored"));
        }
        let v = detect(&src);
        for (_, _, k) in API {
            prop_assert_eq!(v.get(KuId::new(*k).unwrap()), 0);
        }
    }
}
