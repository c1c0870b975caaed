//! Instance generation from source problems, labelled by brute force.
//!
//! Source formats:
//!
//! * `qbf`: a prefix such as `E x11 x12 A x21 : (x11 | x12) & !x21`.
//!   Blocks alternate starting with `E`; `x<i><j>` abbreviates `x_{i,j}`.
//! * `partition-plurality`, `partition-veto3`: whitespace-separated positive
//!   integers.
//! * `maxsatasg`: two clause lists separated by a `--` line. Each starts
//!   with `p cnf <vars>`; clauses are signed variable numbers ended by `0`;
//!   lines starting with `c` are comments.

use omanip::reductions::{
    gen_maxsatasg_veto_oms, gen_partition_plurality_uw, gen_partition_veto3, gen_qbf_oms,
    in_maxsatasg_eq, partition_brute, qbf_eval, Clause, CnfFormula, Flavor, GeneratedInstance,
    Literal, QbfInstance, ReductionError, ThreeCnfFormula,
};
use omanip::rules::Formula;

use crate::instance::InstanceFile;
use crate::solve::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Qbf,
    PartitionPlurality { m: usize, flavor: Flavor },
    PartitionVeto3,
    Maxsatasg,
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Rewrites `x<i><j>` to `x_{i,j}` and drops whitespace.
fn expand_shorthand(s: &str) -> String {
    let b: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = String::new();
    let mut i = 0;
    while i < b.len() {
        if b[i] == 'x' && i + 2 < b.len() && b[i + 1].is_ascii_digit() && b[i + 2].is_ascii_digit() {
            out.push_str(&format!("x_{{{},{}}}", b[i + 1], b[i + 2]));
            i += 3;
        } else {
            out.push(b[i]);
            i += 1;
        }
    }
    out
}

pub fn parse_qbf(src: &str) -> Result<QbfInstance, CliError> {
    let (prefix, matrix) = src
        .split_once(':')
        .ok_or_else(|| input("expected '<prefix> : <matrix>'"))?;
    let mut blocks: Vec<Vec<(usize, usize)>> = Vec::new();
    for tok in prefix.split_whitespace() {
        match tok {
            "E" | "A" => {
                let want = if blocks.len().is_multiple_of(2) { "E" } else { "A" };
                if tok != want {
                    return Err(input(format!("block {} must start with {want}", blocks.len() + 1)));
                }
                blocks.push(Vec::new());
            }
            var => {
                let f = Formula::parse(expand_shorthand(var).as_bytes())
                    .map_err(|e| input(format!("bad variable '{var}': {e}")))?;
                let (Formula::Var(i, j), Some(block)) = (f, blocks.last_mut()) else {
                    return Err(input(format!("expected a quantifier or variable, got '{var}'")));
                };
                block.push((i, j));
            }
        }
    }
    let mut sizes = Vec::with_capacity(blocks.len());
    for (n, block) in blocks.iter().enumerate() {
        let mut js: Vec<usize> = block
            .iter()
            .map(|&(i, j)| if i == n + 1 { Ok(j) } else { Err(input(format!("x_{{{i},{j}}} listed in block {}", n + 1))) })
            .collect::<Result<_, _>>()?;
        js.sort_unstable();
        if js != (1..=js.len()).collect::<Vec<_>>() {
            return Err(input(format!("block {} must list x_{{{0},1}} .. x_{{{0},k}}", n + 1)));
        }
        sizes.push(js.len());
    }
    let matrix = Formula::parse(expand_shorthand(matrix).as_bytes())
        .map_err(|e| input(format!("bad matrix: {e}")))?;
    Ok(QbfInstance::new(sizes, matrix)?)
}

pub fn parse_weights(src: &str) -> Result<Vec<u64>, CliError> {
    src.split_whitespace()
        .map(|t| t.parse().map_err(|_| input(format!("expected a positive integer, got '{t}'"))))
        .collect()
}

fn parse_cnf_section(src: &str) -> Result<ThreeCnfFormula, CliError> {
    let mut num_vars = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in src.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p cnf") {
            let n = rest
                .split_whitespace()
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| input("expected 'p cnf <vars>'"))?;
            num_vars = Some(n);
            continue;
        }
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| input(format!("bad literal '{tok}'")))?;
            match x {
                0 => clauses.push(Clause(std::mem::take(&mut current))),
                x if x > 0 => current.push(Literal::pos(x as usize)),
                x => current.push(Literal::neg(x.unsigned_abs() as usize)),
            }
        }
    }
    if !current.is_empty() {
        return Err(input("clause not terminated by 0"));
    }
    let n = num_vars.ok_or_else(|| input("missing 'p cnf <vars>' header"))?;
    Ok(ThreeCnfFormula::new(CnfFormula::new(n, clauses)?)?)
}

pub fn parse_formula_pair(src: &str) -> Result<(ThreeCnfFormula, ThreeCnfFormula), CliError> {
    let mut parts = Vec::new();
    let mut cur = String::new();
    for line in src.lines() {
        if line.trim() == "--" {
            parts.push(std::mem::take(&mut cur));
        } else {
            cur.push_str(line);
            cur.push('\n');
        }
    }
    parts.push(cur);
    let [phi, psi] = parts.as_slice() else {
        return Err(input("expected two formulas separated by a '--' line"));
    };
    Ok((parse_cnf_section(phi)?, parse_cnf_section(psi)?))
}

/// The generated instance file, prefixed with its `# label:` comment.
pub fn generate(kind: GenKind, src: &str) -> Result<String, CliError> {
    let (g, label): (GeneratedInstance, bool) = match kind {
        GenKind::Qbf => {
            let q = parse_qbf(src)?;
            (gen_qbf_oms(&q)?, qbf_eval(&q)?)
        }
        GenKind::PartitionPlurality { m, flavor } => {
            let ws = parse_weights(src)?;
            let g = gen_partition_plurality_uw(&ws, m, flavor)?;
            let split = partition_brute(&ws)?;
            (g, if flavor == Flavor::Destructive { split } else { !split })
        }
        GenKind::PartitionVeto3 => {
            let ws = parse_weights(src)?;
            (gen_partition_veto3(&ws)?, !partition_brute(&ws)?)
        }
        GenKind::Maxsatasg => {
            let (phi, psi) = parse_formula_pair(src)?;
            (gen_maxsatasg_veto_oms(&phi, &psi)?, in_maxsatasg_eq(&phi, &psi)?)
        }
    };
    let file = InstanceFile::from_oms(&g.oms, &g.rule, &g.variant);
    Ok(format!("# label: {}\n{file}", if label { "YES" } else { "NO" }))
}

/// The label written by [`generate`], if any.
pub fn read_label(src: &str) -> Option<bool> {
    src.lines().find_map(|l| match l.trim().strip_prefix("# label:")?.trim() {
        "YES" => Some(true),
        "NO" => Some(false),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand() {
        assert_eq!(expand_shorthand("x11 & !x21"), "x_{1,1}&!x_{2,1}");
        assert_eq!(expand_shorthand("x_{1,1}"), "x_{1,1}");
    }

    #[test]
    fn qbf_prefix() {
        let q = parse_qbf("E x11 x12 A x21 : (x11 | x12) & !x21").unwrap();
        assert_eq!(q.block_sizes, vec![2, 1]);
        assert!(parse_qbf("A x11 : x11").is_err());
        assert!(parse_qbf("E x12 : x12").is_err());
        assert!(parse_qbf("E x11 x21 : x11").is_err());
    }

    #[test]
    fn labels() {
        let out = generate(GenKind::Qbf, "E x11 : x11").unwrap();
        assert_eq!(read_label(&out), Some(true));
        let plur = GenKind::PartitionPlurality {
            m: 2,
            flavor: Flavor::Destructive,
        };
        assert_eq!(read_label(&generate(plur, "1 1").unwrap()), Some(true));
        assert_eq!(read_label(&generate(plur, "1 3").unwrap()), Some(false));
        assert_eq!(read_label(&generate(GenKind::PartitionVeto3, "1 3").unwrap()), Some(true));
    }

    #[test]
    fn formula_pair() {
        let src = "c first\np cnf 2\n2 2 2 0\n--\np cnf 2\n2 -2 2 0\n";
        let (phi, psi) = parse_formula_pair(src).unwrap();
        assert_eq!(phi.clauses().len(), 1);
        assert_eq!(psi.clauses()[0].0[1], Literal::neg(2));
        assert!(parse_formula_pair("p cnf 2\n2 2 0\n--\np cnf 2\n2 2 2 0\n").is_err());
        assert_eq!(read_label(&generate(GenKind::Maxsatasg, src).unwrap()), Some(true));
    }
}
