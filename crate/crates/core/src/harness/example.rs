//! End-to-end check of the PPM(8) over RS(6,2) worked example: generator,
//! codewords, OR matrix, candidate sets and the search decoder.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::cwcode::{correlation, superpose, ConstantWeightCode};
use crate::error::Result;
use crate::galois::{GaloisField, ReedSolomonCode, Symbol};
use crate::ura::{outer_decode_search, sections_from_llrs};

/// Systematic generator of the example code over GF(8).
pub fn example_generator() -> Vec<Vec<Symbol>> {
    vec![vec![1, 0, 6, 1, 6, 7], vec![0, 1, 4, 1, 5, 5]]
}

const MESSAGES: [[Symbol; 2]; 3] = [[5, 0], [4, 2], [1, 0]];
const CODEWORDS: [[Symbol; 6]; 3] = [[5, 0, 3, 5, 3, 6], [4, 2, 6, 6, 4, 0], [1, 0, 6, 1, 6, 7]];
/// Rows are the 8 symbols, columns the 6 sections.
const OR_MATRIX: [&str; 8] = [
    "0 1 0 0 0 1",
    "1 0 0 1 0 0",
    "0 1 0 0 0 0",
    "0 0 1 0 1 0",
    "1 0 0 0 1 0",
    "1 0 0 1 0 0",
    "0 0 1 1 1 1",
    "0 0 0 0 0 1",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleReport {
    pub steps: Vec<Step>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed)
    }

    /// First failing step, if any.
    pub fn first_failure(&self) -> Option<&Step> {
        self.steps.iter().find(|s| !s.passed)
    }

    fn check(&mut self, name: &str, expected: String, actual: String) {
        let passed = expected == actual;
        self.steps.push(Step { name: name.to_string(), expected, actual, passed });
    }
}

impl fmt::Display for ExampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "[{}] {}", if s.passed { "ok" } else { "FAIL" }, s.name)?;
            for line in s.actual.lines() {
                writeln!(f, "    {line}")?;
            }
            if !s.passed {
                writeln!(f, "  expected:")?;
                for line in s.expected.lines() {
                    writeln!(f, "    {line}")?;
                }
            }
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn row(v: &[Symbol]) -> String {
    v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn set(s: &[Symbol]) -> String {
    let sorted: BTreeSet<_> = s.iter().collect();
    format!("{{{}}}", sorted.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","))
}

fn messages(list: &[Vec<Symbol>]) -> String {
    let sorted: BTreeSet<_> = list.iter().collect();
    sorted.iter().map(|m| format!("({})", row(m))).collect::<Vec<_>>().join(" ")
}

/// Noiseless LLRs for a binary support: `+inf` on ones, `-inf` elsewhere.
pub fn support_llrs(bits: &[bool]) -> Vec<f64> {
    bits.iter().map(|&b| if b { f64::INFINITY } else { f64::NEG_INFINITY }).collect()
}

/// Runs the worked example with the stock generator.
pub fn verify_example() -> Result<ExampleReport> {
    verify_example_with(example_generator())
}

/// Runs the worked example with a caller-supplied generator, compared
/// against the fixed expected artifacts. Later steps still run after a
/// mismatch so the report shows every divergence.
pub fn verify_example_with(generator: Vec<Vec<Symbol>>) -> Result<ExampleReport> {
    let mut report = ExampleReport { steps: Vec::new() };
    let field = Arc::new(GaloisField::new(3)?);

    // A few products the codewords depend on, from the field tables.
    let products: Vec<String> =
        [(5, 6), (5, 4), (4, 5), (2, 7), (5, 7)].iter().map(|&(a, b)| format!("{a}*{b}={}", field.mul(a, b))).collect();
    report.check("GF(8) products", "5*6=3 5*4=2 4*5=2 2*7=5 5*7=6".into(), products.join(" "));

    report.check(
        "generator",
        example_generator().iter().map(|r| row(r)).collect::<Vec<_>>().join("\n"),
        generator.iter().map(|r| row(r)).collect::<Vec<_>>().join("\n"),
    );
    let code = ConstantWeightCode::from_rs(ReedSolomonCode::from_generator(field, generator)?)?;
    let p = code.params();
    report.check("parameters (n, m, w, d, p)", "48 64 6 1 5".into(), format!("{} {} {} {} {}", p.n, p.m, p.w, p.d, p.p.unwrap_or(0)));

    let cws = MESSAGES.iter().map(|m| code.encode_symbols(m)).collect::<Result<Vec<_>>>()?;
    for (i, (cw, expected)) in cws.iter().zip(&CODEWORDS).enumerate() {
        report.check(&format!("codeword c{}", i + 1), row(expected), row(&cw.positions));
    }

    let bits: Vec<Vec<bool>> = cws.iter().map(|c| c.to_bits(8)).collect();
    let or = superpose(&bits)?;
    let matrix: Vec<String> = (0..8)
        .map(|s| (0..6).map(|j| if or[j * 8 + s] { "1" } else { "0" }).collect::<Vec<_>>().join(" "))
        .collect();
    report.check("OR matrix (symbols x sections)", OR_MATRIX.join("\n"), matrix.join("\n"));

    let llrs = support_llrs(&or);
    let sets = sections_from_llrs(&llrs, &code, MESSAGES.len())?;
    report.check("S1, S2", "{1,4,5} {0,2}".into(), format!("{} {}", set(&sets[0]), set(&sets[1])));

    let product: Vec<Vec<Symbol>> =
        sets[0].iter().flat_map(|&a| sets[1].iter().map(move |&b| vec![a, b])).collect();
    report.check("S1 x S2", "(1 0) (1 2) (4 0) (4 2) (5 0) (5 2)".into(), messages(&product));

    let corr: Vec<String> = product
        .iter()
        .map(|m| -> Result<String> {
            let c = correlation(&code.encode_symbols(m)?.to_bits(8), &or)?;
            Ok(format!("({})->{c}", row(m)))
        })
        .collect::<Result<_>>()?;
    report.check(
        "correlations with OR",
        "(1 0)->6 (1 2)->3 (4 0)->2 (4 2)->6 (5 0)->6 (5 2)->3".into(),
        corr.join(" "),
    );

    let decoded = outer_decode_search(&sets, &llrs, &code, MESSAGES.len())?;
    report.check("search decoder", "(1 0) (4 2) (5 0)".into(), messages(&decoded));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionReport {
    pub users: usize,
    pub order: Option<usize>,
    /// Whether the disjunctive guarantee covers this many users.
    pub guarantee_applies: bool,
    pub decoded: Vec<Vec<Symbol>>,
    /// Decoded list equals the transmitted set.
    pub recovered: bool,
}

impl fmt::Display for SuperpositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = self.order.map_or("none".to_string(), |p| p.to_string());
        if self.guarantee_applies {
            write!(f, "{} users within order {order}: guarantee applies", self.users)?;
        } else {
            write!(f, "{} users exceed order {order}: guarantee not applicable", self.users)?;
        }
        write!(f, "; recovered: {}", self.recovered)
    }
}

/// Decodes the OR superposition of distinct messages through the noiseless
/// LLR path and reports whether the order bound covers the case.
pub fn verify_superposition(code: &ConstantWeightCode, msgs: &[Vec<Symbol>]) -> Result<SuperpositionReport> {
    let distinct: BTreeSet<&Vec<Symbol>> = msgs.iter().collect();
    if distinct.len() != msgs.len() || msgs.is_empty() {
        return crate::error::invalid("need at least one message, all distinct");
    }
    let bits = msgs.iter().map(|m| Ok(code.encode_symbols(m)?.to_bits(code.q()))).collect::<Result<Vec<_>>>()?;
    let llrs = support_llrs(&superpose(&bits)?);
    let sets = sections_from_llrs(&llrs, code, msgs.len())?;
    let decoded = outer_decode_search(&sets, &llrs, code, msgs.len())?;
    let got: BTreeSet<&Vec<Symbol>> = decoded.iter().collect();
    let order = code.params().p;
    Ok(SuperpositionReport {
        users: msgs.len(),
        order,
        guarantee_applies: order.is_some_and(|p| msgs.len() <= p),
        recovered: got == distinct,
        decoded,
    })
}
