//! Bundled example systems.

use crate::polynomial::{parse_system, LaurentSystem};

/// Two binomials in three unknowns with the curve
/// `x1 = -6 t^4, x2 = -t^-4/12, x3 = 1/t`.
pub const BINOMIAL: &str = "\
# two binomial equations in three unknowns
vars: x1, x2, x3
x1*x2^2*x3 - 2*x1^2*x2^3*x3;
3*x1^2*x2^2*x3^5 + 9*x2*x3;
";

/// The cyclic n-roots system as text: `Σ_i x_i x_{i+1} ⋯ x_{i+k-1}` for
/// `k < n` and `x_1 ⋯ x_n - 1`.
pub fn cyclic_text(n: usize) -> String {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut out = format!("# cyclic {n}-roots\nvars: {}\n", names.join(", "));
    for k in 1..n {
        let terms: Vec<String> = (0..n)
            .map(|i| (0..k).map(|j| names[(i + j) % n].as_str()).collect::<Vec<_>>().join("*"))
            .collect();
        out.push_str(&terms.join(" + "));
        out.push_str(";\n");
    }
    out.push_str(&names.join("*"));
    out.push_str(" - 1;\n");
    out
}

pub fn cyclic(n: usize) -> LaurentSystem {
    parse_system(&cyclic_text(n)).expect("generated text parses")
}

pub fn binomial() -> LaurentSystem {
    parse_system(BINOMIAL).expect("bundled text parses")
}

/// Names accepted by [`bundled`].
pub const BUNDLED: [&str; 4] = ["binomial", "cyclic4", "cyclic8", "cyclic12"];

pub fn bundled_text(name: &str) -> Option<String> {
    match name {
        "binomial" => Some(BINOMIAL.to_string()),
        "cyclic4" => Some(cyclic_text(4)),
        "cyclic8" => Some(cyclic_text(8)),
        "cyclic12" => Some(cyclic_text(12)),
        _ => None,
    }
}

pub fn bundled(name: &str) -> Option<LaurentSystem> {
    bundled_text(name).map(|t| parse_system(&t).expect("bundled text parses"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic4_text() {
        assert_eq!(
            cyclic_text(4),
            "# cyclic 4-roots\nvars: x1, x2, x3, x4\n\
             x1 + x2 + x3 + x4;\n\
             x1*x2 + x2*x3 + x3*x4 + x4*x1;\n\
             x1*x2*x3 + x2*x3*x4 + x3*x4*x1 + x4*x1*x2;\n\
             x1*x2*x3*x4 - 1;\n"
        );
        let s = cyclic(12);
        assert_eq!((s.len(), s.nvars()), (12, 12));
        assert!(s.polys()[..11].iter().all(|p| p.num_terms() == 12));
    }

    #[test]
    fn all_bundled_parse() {
        for name in BUNDLED {
            assert!(bundled(name).is_some());
        }
        assert!(bundled("nope").is_none());
    }
}
