//! Count knowledge units in Java files.
//!
//! ```text
//! cargo run --example detect_kus -- path/to/Foo.java [more.java ...]
//! ```
//!
//! With no arguments a small built-in sample is analysed. Pass `--hits` to
//! print per-capability matches as well.

use std::collections::BTreeMap;

use kultc::ku::{capability_hits, parse_named, Detector, KuId};

const SAMPLE: &str = r#"
import java.util.*;
import java.util.stream.Collectors;

public class Roster {
    private final List<String> names = new ArrayList<>();

    public synchronized void add(String name) {
        if (name == null || name.isEmpty()) {
            throw new IllegalArgumentException("empty name");
        }
        names.add(name.trim());
    }

    public List<String> sorted() {
        return names.stream().sorted().collect(Collectors.toList());
    }
}
"#;

fn main() -> anyhow::Result<()> {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    let show_hits = args.iter().any(|a| a == "--hits");
    args.retain(|a| a != "--hits");

    let files: BTreeMap<String, String> = if args.is_empty() {
        BTreeMap::from([("Roster.java".to_string(), SAMPLE.to_string())])
    } else {
        args.iter()
            .map(|p| Ok((p.clone(), std::fs::read_to_string(p)?)))
            .collect::<anyhow::Result<_>>()?
    };

    let detector = Detector::with_default_rules();
    let index = detector.index(&files);
    for (path, text) in &files {
        let v = detector.detect_file(path, text, &index);
        println!("{path}: {}", v.to_sparse());
        if show_hits {
            if let Ok(facts) = parse_named(path, text) {
                for (cap, n) in capability_hits(&facts, &index, detector.rules()) {
                    println!("  {cap:<8} {n}");
                }
            }
        }
    }
    let total = detector.detect_snapshot(&files);
    println!("total:");
    for ku in KuId::all().filter(|k| total.get(*k) > 0) {
        println!("  {ku:<4} {}", total.get(ku));
    }
    Ok(())
}
