//! Parser and emitter for a subset of the Bayesian Interchange Format:
//! `network`, discrete `variable` and `probability` blocks with `//` line
//! comments, flat `table` rows and per-configuration entries, and opaque
//! `property` lines.
//!
//! Conventions, fixed once and used everywhere: probability rows list the
//! child's levels in declared order; a flat `table` is row-major over parent
//! configurations with the first-listed parent as the most significant
//! digit. Row sums are accepted within 1e-6 and renormalized exactly on
//! load.

use thiserror::Error;

use crate::bn::{Bn, Cpt};
use crate::data::Variable;
use crate::graph::Dag;

#[derive(Debug, Error, PartialEq)]
pub enum BifError {
    #[error("syntax error at line {line}, column {col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("{context}: {message}")]
    Semantic { context: String, message: String },
}

fn semantic(context: impl Into<String>, message: impl Into<String>) -> BifError {
    BifError::Semantic {
        context: context.into(),
        message: message.into(),
    }
}

/// Tolerance for declared probability rows; rows are renormalized after the
/// check so in-memory CPTs sum to one exactly.
const ROW_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BifVariable {
    pub name: String,
    pub levels: Vec<String>,
    pub properties: Vec<String>,
}

/// Probability rows as written: either one flat table or one row per named
/// parent configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbabilityEntries {
    Table(Vec<f64>),
    Rows(Vec<(Vec<String>, Vec<f64>)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifProbability {
    pub child: String,
    pub parents: Vec<String>,
    pub entries: ProbabilityEntries,
    pub properties: Vec<String>,
}

/// Parsed document prior to semantic checking.
#[derive(Debug, Clone, PartialEq)]
pub struct BifDocument {
    pub name: String,
    pub variables: Vec<BifVariable>,
    pub probabilities: Vec<BifProbability>,
    pub properties: Vec<String>,
}

// ---------------------------------------------------------------- lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, BifError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '/' => {
                let (l, co) = (line, col);
                chars.next();
                col += 1;
                if chars.peek() == Some(&'/') {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        chars.next();
                        col += 1;
                    }
                } else {
                    return Err(BifError::Syntax {
                        line: l,
                        col: co,
                        expected: "'//' comment".into(),
                        found: "'/'".into(),
                    });
                }
            }
            '{' | '}' | '(' | ')' | '[' | ']' | ',' | ';' | '|' => {
                tokens.push(Token {
                    tok: Tok::Punct(c),
                    line,
                    col,
                });
                chars.next();
                col += 1;
            }
            c if is_word_char(c) => {
                let (l, co) = (line, col);
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    col += 1;
                }
                tokens.push(Token {
                    tok: Tok::Word(word),
                    line: l,
                    col: co,
                });
            }
            other => {
                return Err(BifError::Syntax {
                    line,
                    col,
                    expected: "identifier, number or punctuation".into(),
                    found: format!("{other:?}"),
                });
            }
        }
    }
    Ok(tokens)
}

fn is_word_char(c: char) -> bool {
    // anything that is not whitespace, structural punctuation or a comment
    // introducer; property payloads carry free-form text
    !c.is_whitespace() && !matches!(c, '{' | '}' | '(' | ')' | '[' | ']' | ',' | ';' | '|' | '/')
}

// --------------------------------------------------------------- parsing

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn end_position(&self) -> (usize, usize) {
        self.tokens
            .last()
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1))
    }

    fn error(&self, expected: &str) -> BifError {
        match self.peek() {
            Some(t) => BifError::Syntax {
                line: t.line,
                col: t.col,
                expected: expected.into(),
                found: match &t.tok {
                    Tok::Word(w) => format!("{w:?}"),
                    Tok::Punct(p) => format!("{p:?}"),
                },
            },
            None => {
                let (line, col) = self.end_position();
                BifError::Syntax {
                    line,
                    col,
                    expected: expected.into(),
                    found: "end of input".into(),
                }
            }
        }
    }

    fn take_punct(&mut self, p: char) -> Result<(), BifError> {
        match self.peek() {
            Some(t) if t.tok == Tok::Punct(p) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(&format!("{p:?}"))),
        }
    }

    fn eat_punct(&mut self, p: char) -> bool {
        if let Some(t) = self.peek() {
            if t.tok == Tok::Punct(p) {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn take_word(&mut self, expected: &str) -> Result<String, BifError> {
        match self.peek() {
            Some(t) => {
                if let Tok::Word(w) = &t.tok {
                    let w = w.clone();
                    self.pos += 1;
                    Ok(w)
                } else {
                    Err(self.error(expected))
                }
            }
            None => Err(self.error(expected)),
        }
    }

    fn take_keyword(&mut self, kw: &str) -> Result<(), BifError> {
        match self.peek() {
            Some(t) if t.tok == Tok::Word(kw.to_string()) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(&format!("keyword {kw:?}"))),
        }
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(t) if t.tok == Tok::Word(kw.to_string()))
    }

    fn take_number(&mut self) -> Result<f64, BifError> {
        let err = self.error("number");
        let word = self.take_word("number")?;
        word.parse::<f64>().map_err(|_| err)
    }

    /// Comma- or whitespace-separated numbers up to the closing semicolon.
    fn take_number_list(&mut self) -> Result<Vec<f64>, BifError> {
        let mut out = vec![self.take_number()?];
        loop {
            if self.eat_punct(';') {
                return Ok(out);
            }
            self.eat_punct(',');
            out.push(self.take_number()?);
        }
    }

    /// An opaque `property` payload: raw words joined up to the semicolon.
    fn take_property(&mut self) -> Result<String, BifError> {
        let mut parts = Vec::new();
        loop {
            match self.peek() {
                Some(t) => match &t.tok {
                    Tok::Punct(';') => {
                        self.pos += 1;
                        return Ok(parts.join(" "));
                    }
                    Tok::Punct(p) => {
                        parts.push(p.to_string());
                        self.pos += 1;
                    }
                    Tok::Word(w) => {
                        parts.push(w.clone());
                        self.pos += 1;
                    }
                },
                None => return Err(self.error("';'")),
            }
        }
    }
}

/// Parses the raw block structure without semantic checks.
pub fn parse_bif_document(text: &str) -> Result<BifDocument, BifError> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
    };

    p.take_keyword("network")?;
    let name = p.take_word("network name")?;
    p.take_punct('{')?;
    let mut properties = Vec::new();
    while !p.eat_punct('}') {
        p.take_keyword("property")?;
        properties.push(p.take_property()?);
    }

    let mut variables = Vec::new();
    let mut probabilities = Vec::new();
    while p.peek().is_some() {
        if p.peek_keyword("variable") {
            p.pos += 1;
            variables.push(parse_variable(&mut p)?);
        } else if p.peek_keyword("probability") {
            p.pos += 1;
            probabilities.push(parse_probability(&mut p)?);
        } else {
            return Err(p.error("'variable' or 'probability' block"));
        }
    }

    Ok(BifDocument {
        name,
        variables,
        probabilities,
        properties,
    })
}

fn parse_variable(p: &mut Parser) -> Result<BifVariable, BifError> {
    let name = p.take_word("variable name")?;
    p.take_punct('{')?;
    p.take_keyword("type")?;
    p.take_keyword("discrete")?;
    p.take_punct('[')?;
    let declared = p.take_number()?;
    p.take_punct(']')?;
    p.take_punct('{')?;
    let mut levels = vec![p.take_word("level label")?];
    while !p.eat_punct('}') {
        p.take_punct(',')?;
        levels.push(p.take_word("level label")?);
    }
    p.take_punct(';')?;
    let mut properties = Vec::new();
    while !p.eat_punct('}') {
        p.take_keyword("property")?;
        properties.push(p.take_property()?);
    }
    if declared != levels.len() as f64 {
        return Err(semantic(
            format!("variable {name}"),
            format!("declares {declared} states but lists {}", levels.len()),
        ));
    }
    Ok(BifVariable {
        name,
        levels,
        properties,
    })
}

fn parse_probability(p: &mut Parser) -> Result<BifProbability, BifError> {
    p.take_punct('(')?;
    let child = p.take_word("child variable")?;
    let mut parents = Vec::new();
    if p.eat_punct('|') {
        parents.push(p.take_word("parent variable")?);
        while !p.eat_punct(')') {
            p.take_punct(',')?;
            parents.push(p.take_word("parent variable")?);
        }
    } else {
        p.take_punct(')')?;
    }
    p.take_punct('{')?;

    let mut properties = Vec::new();
    let mut table: Option<Vec<f64>> = None;
    let mut rows: Vec<(Vec<String>, Vec<f64>)> = Vec::new();
    loop {
        if p.eat_punct('}') {
            break;
        }
        if p.peek_keyword("property") {
            p.pos += 1;
            properties.push(p.take_property()?);
        } else if p.peek_keyword("table") {
            p.pos += 1;
            if table.is_some() {
                return Err(semantic(
                    format!("probability ( {child} ... )"),
                    "duplicate table entry",
                ));
            }
            table = Some(p.take_number_list()?);
        } else if p.eat_punct('(') {
            let mut levels = vec![p.take_word("parent level")?];
            while !p.eat_punct(')') {
                p.take_punct(',')?;
                levels.push(p.take_word("parent level")?);
            }
            rows.push((levels, p.take_number_list()?));
        } else {
            return Err(p.error("'table', '(' configuration or 'property'"));
        }
    }

    let context = format!("probability ( {child} ... )");
    let entries = match (table, rows.is_empty()) {
        (Some(t), true) => ProbabilityEntries::Table(t),
        (None, false) => ProbabilityEntries::Rows(rows),
        (None, true) => return Err(semantic(context, "block has no probability entries")),
        (Some(_), false) => {
            return Err(semantic(
                context,
                "block mixes a flat table with per-configuration rows",
            ))
        }
    };
    Ok(BifProbability {
        child,
        parents,
        entries,
        properties,
    })
}

// ------------------------------------------------------------- semantics

/// Parses a BIF document and assembles the network it describes.
pub fn parse_bif(text: &str) -> Result<Bn, BifError> {
    let doc = parse_bif_document(text)?;
    document_to_bn(&doc)
}

fn document_to_bn(doc: &BifDocument) -> Result<Bn, BifError> {
    let n = doc.variables.len();
    if n == 0 {
        return Err(semantic(
            format!("network {}", doc.name),
            "document declares no variables",
        ));
    }
    let mut variables = Vec::with_capacity(n);
    let index_of = |name: &str| -> Option<usize> {
        doc.variables.iter().position(|v| v.name == name)
    };
    for v in &doc.variables {
        if doc.variables.iter().filter(|o| o.name == v.name).count() > 1 {
            return Err(semantic(
                format!("variable {}", v.name),
                "duplicate variable block",
            ));
        }
        variables.push(
            Variable::new(v.name.clone(), v.levels.clone())
                .map_err(|e| semantic(format!("variable {}", v.name), e.to_string()))?,
        );
    }

    let mut parent_sets: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut block_of: Vec<Option<&BifProbability>> = vec![None; n];
    for block in &doc.probabilities {
        let context = format!("probability ( {} ... )", block.child);
        let child = index_of(&block.child)
            .ok_or_else(|| semantic(&context, format!("undeclared variable {}", block.child)))?;
        if block_of[child].is_some() {
            return Err(semantic(&context, "duplicate probability block"));
        }
        let mut parent_ids = Vec::with_capacity(block.parents.len());
        for parent in &block.parents {
            let id = index_of(parent)
                .ok_or_else(|| semantic(&context, format!("undeclared variable {parent}")))?;
            if parent_ids.contains(&id) || id == child {
                return Err(semantic(&context, format!("repeated variable {parent}")));
            }
            parent_ids.push(id);
        }
        parent_sets[child] = parent_ids;
        block_of[child] = Some(block);
    }
    for (node, block) in block_of.iter().enumerate() {
        if block.is_none() {
            return Err(semantic(
                format!("variable {}", variables[node].name),
                "no probability block",
            ));
        }
    }

    let dag = Dag::from_parent_sets(parent_sets.clone()).map_err(|_| {
        semantic(
            format!("network {}", doc.name),
            "probability blocks imply a cyclic parent structure",
        )
    })?;

    let mut cpts = Vec::with_capacity(n);
    for node in 0..n {
        let block = block_of[node].expect("checked above");
        let context = format!("probability ( {} ... )", block.child);
        // cardinalities in the order the block lists its parents
        let block_parents: Vec<usize> = block
            .parents
            .iter()
            .map(|p| index_of(p).expect("checked above"))
            .collect();
        let block_cards: Vec<usize> = block_parents
            .iter()
            .map(|&p| variables[p].cardinality())
            .collect();
        let q: usize = block_cards.iter().product();
        let r = variables[node].cardinality();

        // rows keyed by block-order configuration index
        let mut block_rows: Vec<Option<Vec<f64>>> = vec![None; q];
        match &block.entries {
            ProbabilityEntries::Table(values) => {
                if values.len() != q * r {
                    return Err(semantic(
                        &context,
                        format!("table has {} values, expected {}", values.len(), q * r),
                    ));
                }
                for (j, chunk) in values.chunks(r).enumerate() {
                    block_rows[j] = Some(chunk.to_vec());
                }
            }
            ProbabilityEntries::Rows(rows) => {
                for (labels, values) in rows {
                    if labels.len() != block_parents.len() {
                        return Err(semantic(
                            &context,
                            format!(
                                "configuration names {} levels, expected {}",
                                labels.len(),
                                block_parents.len()
                            ),
                        ));
                    }
                    let mut j = 0usize;
                    for (label, &parent) in labels.iter().zip(&block_parents) {
                        let level = variables[parent].level_index(label).ok_or_else(|| {
                            semantic(
                                &context,
                                format!(
                                    "unknown level {label:?} of parent {}",
                                    variables[parent].name
                                ),
                            )
                        })?;
                        j = j * variables[parent].cardinality() + level;
                    }
                    if values.len() != r {
                        return Err(semantic(
                            &context,
                            format!("row has {} probabilities, expected {r}", values.len()),
                        ));
                    }
                    if block_rows[j].is_some() {
                        return Err(semantic(&context, "duplicate configuration row"));
                    }
                    block_rows[j] = Some(values.clone());
                }
            }
        }

        // validate, renormalize, and remap block parent order to sorted order
        let sorted_parents = dag.parents(node);
        let sorted_cards: Vec<usize> = sorted_parents
            .iter()
            .map(|&p| variables[p].cardinality())
            .collect();
        let mut table = vec![Vec::new(); q];
        for (j, row) in block_rows.into_iter().enumerate() {
            let Some(row) = row else {
                return Err(semantic(&context, format!("missing configuration {j}")));
            };
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE || row.iter().any(|&p| p < 0.0) {
                return Err(semantic(
                    &context,
                    format!("row {j} sums to {sum}, expected 1"),
                ));
            }
            let normalized: Vec<f64> = row.iter().map(|&p| p / sum).collect();
            // digits of j in block order, then reassembled in sorted order
            let mut digits = vec![0usize; block_parents.len()];
            let mut rest = j;
            for (d, &card) in block_cards.iter().enumerate().rev() {
                digits[d] = rest % card;
                rest /= card;
            }
            let mut sorted_j = 0usize;
            for (&parent, &card) in sorted_parents.iter().zip(&sorted_cards) {
                let d = block_parents
                    .iter()
                    .position(|&p| p == parent)
                    .expect("same parent set");
                sorted_j = sorted_j * card + digits[d];
            }
            table[sorted_j] = normalized;
        }
        cpts.push(
            Cpt::new(node, r, sorted_cards, table)
                .map_err(|e| semantic(&context, e.to_string()))?,
        );
    }

    Bn::new(dag, variables, cpts)
        .map_err(|e| semantic(format!("network {}", doc.name), e.to_string()))
}

// -------------------------------------------------------------- emitting

/// Deterministic textual form of a network; `parse_bif` reproduces the
/// input network exactly up to floating-point printing (CPT entries
/// round-trip bit-for-bit via shortest-exact formatting).
pub fn emit_bif(bn: &Bn, network_name: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("network {network_name} {{\n}}\n"));
    for v in bn.variables() {
        out.push_str(&format!(
            "variable {} {{\n  type discrete [ {} ] {{ {} }};\n}}\n",
            v.name,
            v.cardinality(),
            v.levels.join(", ")
        ));
    }
    for node in 0..bn.node_count() {
        let v = &bn.variables()[node];
        let parents = bn.dag().parents(node);
        if parents.is_empty() {
            out.push_str(&format!("probability ( {} ) {{\n", v.name));
        } else {
            let names: Vec<&str> = parents
                .iter()
                .map(|&p| bn.variables()[p].name.as_str())
                .collect();
            out.push_str(&format!(
                "probability ( {} | {} ) {{\n",
                v.name,
                names.join(", ")
            ));
        }
        let cpt = bn.cpt(node);
        let flat: Vec<String> = (0..cpt.config_count())
            .flat_map(|j| cpt.row(j).iter().map(|p| p.to_string()))
            .collect();
        out.push_str(&format!("  table {};\n}}\n", flat.join(", ")));
    }
    out
}
