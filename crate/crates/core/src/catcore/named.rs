//! Small categories used throughout the tests, fixtures, and CLI.

use super::category::{discrete_cat, FinCategory};

/// One object, one identity.
pub fn terminal() -> FinCategory {
    FinCategory::from_names(&["*"], &[], &[]).expect("terminal category")
}

/// `a --f--> b`.
pub fn walking_arrow() -> FinCategory {
    FinCategory::from_names(&["a", "b"], &[("f", "a", "b")], &[]).expect("walking arrow")
}

/// `a --f--> b --g--> c` with `f;g = h`.
pub fn chain3() -> FinCategory {
    FinCategory::from_names(
        &["a", "b", "c"],
        &[("f", "a", "b"), ("g", "b", "c"), ("h", "a", "c")],
        &[("f", "g", "h")],
    )
    .expect("chain")
}

/// Two parallel arrows `f, g: a -> b`.
pub fn parallel_pair() -> FinCategory {
    FinCategory::from_names(&["a", "b"], &[("f", "a", "b"), ("g", "a", "b")], &[])
        .expect("parallel pair")
}

/// The linear order `0 < 1 < ... < n-1` as a category.
pub fn chain(n: usize) -> FinCategory {
    let labels: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
    let mut arrows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            arrows.push((format!("f{i}_{j}"), labels[i].clone(), labels[j].clone()));
        }
    }
    let mut compose = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                compose.push((
                    format!("f{i}_{j}"),
                    format!("f{j}_{k}"),
                    format!("f{i}_{k}"),
                ));
            }
        }
    }
    FinCategory::from_named_parts(labels, arrows, compose).expect("chain")
}

/// Looks up a category by its CLI/file name (`builtin:<name>`).
pub fn by_name(name: &str) -> Option<FinCategory> {
    Some(match name {
        "terminal" => terminal(),
        "walking_arrow" | "walking-arrow" => walking_arrow(),
        "chain3" => chain3(),
        "parallel_pair" | "parallel-pair" => parallel_pair(),
        "empty" => discrete_cat(0),
        other => {
            if let Some(n) = other.strip_prefix("discrete") {
                discrete_cat(n.trim_start_matches(['_', '-']).parse().ok()?)
            } else {
                let n = other.strip_prefix("chain")?;
                chain(n.trim_start_matches(['_', '-']).parse().ok()?)
            }
        }
    })
}
