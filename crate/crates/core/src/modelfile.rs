//! Text model format: one statement per line, `#` starts a comment.
//!
//! ```text
//! # reversible dimerization
//! species A B
//! init A = 200000
//! init B = 200000
//! reaction 2 A -> B @ 1e-6
//! reaction B -> 2 A @ 1
//! scaling N = 1e6
//! alpha A = 1
//! alpha B = 1
//! ```
//!
//! Reaction sides are `+`-separated terms `[coefficient] species`; an empty
//! side (or a literal `0`) denotes no input or no output. Species must be
//! declared before use. `scaling N` is required; `alpha` defaults to 0 and
//! `init` to 0 for species not mentioned.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{ParseError, ParseErrorKind};
use crate::model::{Model, Reaction, ReactionNetwork};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    Arrow,
    At,
    Equals,
    Plus,
}

struct Positioned {
    token: Token,
    column: usize,
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

fn syntax(line: usize, column: usize, msg: impl Into<String>) -> ParseError {
    err(line, column, ParseErrorKind::Syntax(msg.into()))
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<Positioned>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() || c == ',' => {
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                tokens.push(Positioned {
                    token: Token::Arrow,
                    column,
                });
                i += 2;
            }
            '@' => {
                tokens.push(Positioned {
                    token: Token::At,
                    column,
                });
                i += 1;
            }
            '=' => {
                tokens.push(Positioned {
                    token: Token::Equals,
                    column,
                });
                i += 1;
            }
            '+' => {
                tokens.push(Positioned {
                    token: Token::Plus,
                    column,
                });
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                tokens.push(Positioned {
                    token: Token::Ident(word),
                    column,
                });
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' => {
                let start = i;
                i += 1;
                while i < chars.len() {
                    let d = chars[i];
                    let is_exp_sign =
                        (d == '+' || d == '-') && matches!(chars.get(i - 1), Some('e') | Some('E'));
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || is_exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let word: String = chars[start..i].iter().collect();
                let value: f64 = word
                    .parse()
                    .map_err(|_| syntax(line_no, column, format!("malformed number `{word}`")))?;
                tokens.push(Positioned {
                    token: Token::Number(value),
                    column,
                });
            }
            other => {
                return Err(syntax(
                    line_no,
                    column,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(tokens)
}

/// One side of a reaction: (species index, coefficient) pairs.
fn parse_side(
    line_no: usize,
    tokens: &[Positioned],
    species: &HashMap<String, usize>,
    side_end_col: usize,
) -> Result<Vec<(usize, u32)>, ParseError> {
    // empty side or a bare literal 0 means "no molecules"
    if tokens.is_empty() {
        return Ok(Vec::new());
    }
    if tokens.len() == 1 {
        if let Token::Number(v) = tokens[0].token {
            if v == 0.0 {
                return Ok(Vec::new());
            }
        }
    }
    let mut terms = Vec::new();
    let mut i = 0;
    loop {
        let mut coeff = 1u32;
        match tokens.get(i) {
            Some(Positioned {
                token: Token::Number(v),
                column,
            }) => {
                if v.fract() != 0.0 || *v < 1.0 || *v > f64::from(u32::MAX) {
                    return Err(syntax(
                        line_no,
                        *column,
                        "stoichiometric coefficient must be a positive integer",
                    ));
                }
                coeff = *v as u32;
                i += 1;
            }
            Some(_) => {}
            None => return Err(syntax(line_no, side_end_col, "expected a species term")),
        }
        match tokens.get(i) {
            Some(Positioned {
                token: Token::Ident(name),
                column,
            }) => {
                let idx = *species.get(name).ok_or_else(|| {
                    err(
                        line_no,
                        *column,
                        ParseErrorKind::UnknownSpecies(name.clone()),
                    )
                })?;
                terms.push((idx, coeff));
                i += 1;
            }
            Some(Positioned { column, .. }) => {
                return Err(syntax(line_no, *column, "expected a species name"));
            }
            None => return Err(syntax(line_no, side_end_col, "expected a species name")),
        }
        match tokens.get(i) {
            None => break,
            Some(Positioned {
                token: Token::Plus, ..
            }) => i += 1,
            Some(Positioned { column, .. }) => {
                return Err(syntax(line_no, *column, "expected `+` between terms"));
            }
        }
    }
    Ok(terms)
}

/// Parse a model description.
pub fn parse(text: &str) -> Result<Model, ParseError> {
    let mut species_order: Vec<String> = Vec::new();
    let mut species_index: HashMap<String, usize> = HashMap::new();
    let mut init: HashMap<usize, i64> = HashMap::new();
    let mut alpha: HashMap<usize, f64> = HashMap::new();
    let mut reactions: Vec<Reaction> = Vec::new();
    let mut system_size: Option<f64> = None;
    let mut line_count = 0usize;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        line_count = line_no;
        let tokens = tokenize(line_no, raw_line)?;
        if tokens.is_empty() {
            continue;
        }
        let head = match &tokens[0].token {
            Token::Ident(word) => word.as_str(),
            _ => {
                return Err(syntax(
                    line_no,
                    tokens[0].column,
                    "expected a statement keyword",
                ))
            }
        };
        let rest = &tokens[1..];
        match head {
            "species" => {
                if rest.is_empty() {
                    return Err(syntax(
                        line_no,
                        tokens[0].column,
                        "species statement needs at least one name",
                    ));
                }
                for tok in rest {
                    match &tok.token {
                        Token::Ident(name) => {
                            if species_index.contains_key(name) {
                                return Err(err(
                                    line_no,
                                    tok.column,
                                    ParseErrorKind::DuplicateSpecies(name.clone()),
                                ));
                            }
                            species_index.insert(name.clone(), species_order.len());
                            species_order.push(name.clone());
                        }
                        _ => return Err(syntax(line_no, tok.column, "expected a species name")),
                    }
                }
            }
            "init" => {
                let (target, value, column) = parse_assignment(line_no, rest)?;
                let idx = *species_index.get(&target).ok_or_else(|| {
                    err(
                        line_no,
                        column,
                        ParseErrorKind::UnknownSpecies(target.clone()),
                    )
                })?;
                if value.fract() != 0.0 || value < 0.0 || value > i64::MAX as f64 {
                    return Err(syntax(
                        line_no,
                        column,
                        "init must be a nonnegative integer",
                    ));
                }
                init.insert(idx, value as i64);
            }
            "alpha" => {
                let (target, value, column) = parse_assignment(line_no, rest)?;
                let idx = *species_index.get(&target).ok_or_else(|| {
                    err(
                        line_no,
                        column,
                        ParseErrorKind::UnknownSpecies(target.clone()),
                    )
                })?;
                if value < 0.0 || !value.is_finite() {
                    return Err(syntax(line_no, column, "alpha must be finite and >= 0"));
                }
                alpha.insert(idx, value);
            }
            "scaling" => {
                let (target, value, column) = parse_assignment(line_no, rest)?;
                if target != "N" {
                    return Err(syntax(line_no, column, "scaling statement must assign `N`"));
                }
                if !(value > 1.0) || !value.is_finite() {
                    return Err(syntax(
                        line_no,
                        column,
                        "system size N must be finite and > 1",
                    ));
                }
                system_size = Some(value);
            }
            "reaction" => {
                let arrow_pos = rest
                    .iter()
                    .position(|t| t.token == Token::Arrow)
                    .ok_or_else(|| syntax(line_no, tokens[0].column, "reaction needs `->`"))?;
                let at_pos = rest
                    .iter()
                    .position(|t| t.token == Token::At)
                    .ok_or_else(|| {
                        syntax(line_no, tokens[0].column, "reaction needs `@ <rate>`")
                    })?;
                if at_pos < arrow_pos {
                    return Err(syntax(line_no, rest[at_pos].column, "`@` must follow `->`"));
                }
                let lhs = parse_side(
                    line_no,
                    &rest[..arrow_pos],
                    &species_index,
                    rest[arrow_pos].column,
                )?;
                let rhs = parse_side(
                    line_no,
                    &rest[arrow_pos + 1..at_pos],
                    &species_index,
                    rest[at_pos].column,
                )?;
                let rate = match rest.get(at_pos + 1) {
                    Some(Positioned {
                        token: Token::Number(v),
                        column,
                    }) => {
                        if !(*v > 0.0) || !v.is_finite() {
                            return Err(err(line_no, *column, ParseErrorKind::NonPositiveRate));
                        }
                        if rest.len() > at_pos + 2 {
                            return Err(syntax(
                                line_no,
                                rest[at_pos + 2].column,
                                "unexpected trailing tokens",
                            ));
                        }
                        *v
                    }
                    Some(Positioned { column, .. }) => {
                        return Err(syntax(line_no, *column, "expected a rate after `@`"));
                    }
                    None => {
                        return Err(syntax(
                            line_no,
                            rest[at_pos].column,
                            "expected a rate after `@`",
                        ))
                    }
                };
                let d = species_order.len();
                let mut inputs = vec![0u32; d];
                let mut outputs = vec![0u32; d];
                for (idx, coeff) in lhs {
                    inputs[idx] += coeff;
                }
                for (idx, coeff) in rhs {
                    outputs[idx] += coeff;
                }
                reactions.push(Reaction {
                    inputs,
                    outputs,
                    rate,
                });
            }
            other => {
                return Err(syntax(
                    line_no,
                    tokens[0].column,
                    format!("unknown statement `{other}`"),
                ));
            }
        }
    }

    if species_order.is_empty() {
        return Err(err(line_count + 1, 1, ParseErrorKind::NoSpecies));
    }
    if reactions.is_empty() {
        return Err(err(line_count + 1, 1, ParseErrorKind::NoReactions));
    }
    let n = system_size.ok_or_else(|| {
        syntax(
            line_count + 1,
            1,
            "missing `scaling N = <value>` declaration",
        )
    })?;

    let d = species_order.len();
    // earlier reactions may predate later species declarations
    for r in &mut reactions {
        r.inputs.resize(d, 0);
        r.outputs.resize(d, 0);
    }
    let initial: Vec<i64> = (0..d).map(|i| init.get(&i).copied().unwrap_or(0)).collect();
    let alpha_vec: Vec<f64> = (0..d)
        .map(|i| alpha.get(&i).copied().unwrap_or(0.0))
        .collect();

    let network = ReactionNetwork::new(species_order, reactions)
        .map_err(|e| syntax(line_count + 1, 1, e.to_string()))?;
    Model::new(network, initial, n, &alpha_vec)
        .map_err(|e| syntax(line_count + 1, 1, e.to_string()))
}

fn parse_assignment(
    line_no: usize,
    rest: &[Positioned],
) -> Result<(String, f64, usize), ParseError> {
    match rest {
        [Positioned {
            token: Token::Ident(name),
            column,
        }, Positioned {
            token: Token::Equals,
            ..
        }, Positioned {
            token: Token::Number(v),
            ..
        }] => Ok((name.clone(), *v, *column)),
        _ => {
            let column = rest.first().map_or(1, |t| t.column);
            Err(syntax(line_no, column, "expected `<name> = <value>`"))
        }
    }
}

fn format_value(v: f64) -> String {
    let abs = v.abs();
    if v != 0.0 && !(1e-4..1e15).contains(&abs) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn format_side(network: &ReactionNetwork, coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 1 {
            terms.push(network.species()[i].clone());
        } else if c > 1 {
            terms.push(format!("{c} {}", network.species()[i]));
        }
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Render a model in the canonical statement order; `parse` of the result
/// reconstructs a structurally identical model.
pub fn serialize(model: &Model) -> String {
    let mut out = String::new();
    let network = &model.network;
    let _ = writeln!(out, "species {}", network.species().join(" "));
    for (i, name) in network.species().iter().enumerate() {
        let _ = writeln!(out, "init {name} = {}", model.initial[i]);
    }
    for reaction in network.reactions() {
        let _ = writeln!(
            out,
            "reaction {} -> {} @ {}",
            format_side(network, &reaction.inputs),
            format_side(network, &reaction.outputs),
            format_value(reaction.rate)
        );
    }
    let _ = writeln!(
        out,
        "scaling N = {}",
        format_value(model.scaling.system_size())
    );
    for (i, name) in network.species().iter().enumerate() {
        let _ = writeln!(
            out,
            "alpha {name} = {}",
            format_value(model.scaling.alpha()[i])
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIMERIZATION: &str = "\
# reversible dimerization, Example family
species A B
init A = 200000
init B = 200000
reaction 2 A -> B @ 1e-6
reaction B -> 2 A @ 1
scaling N = 1e6
alpha A = 1
alpha B = 1
";

    #[test]
    fn parses_dimerization_file() {
        let model = parse(DIMERIZATION).unwrap();
        assert_eq!(model.network.species(), &["A".to_string(), "B".to_string()]);
        assert_eq!(model.initial, vec![200_000, 200_000]);
        assert_eq!(model.network.reactions()[0].inputs, vec![2, 0]);
        assert_eq!(model.network.reactions()[0].outputs, vec![0, 1]);
        assert_eq!(model.network.reactions()[0].rate, 1e-6);
        assert_eq!(model.scaling.system_size(), 1e6);
        assert_eq!(model.scaling.gamma(), 0.0);
        assert_eq!(model.scaled_initial(), vec![0.2, 0.2]);
    }

    #[test]
    fn round_trip_is_structurally_identical() {
        let model = parse(DIMERIZATION).unwrap();
        let text = serialize(&model);
        let again = parse(&text).unwrap();
        assert_eq!(model, again);
    }

    #[test]
    fn empty_reaction_list_is_an_error() {
        let text = "species A\ninit A = 5\nscaling N = 10\n";
        match parse(text) {
            Err(e) => assert_eq!(e.kind, ParseErrorKind::NoReactions),
            Ok(_) => panic!("expected error"),
        }
    }

    #[test]
    fn negative_rate_is_rejected_with_position() {
        let text = "species A B\nreaction A -> B @ -1\nscaling N = 10\n";
        let e = parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonPositiveRate);
        assert_eq!(e.line, 2);
    }

    #[test]
    fn unknown_species_is_rejected() {
        let text = "species A\nreaction A -> C @ 1\nscaling N = 10\n";
        let e = parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownSpecies("C".into()));
    }

    #[test]
    fn duplicate_species_is_rejected() {
        let text = "species A A\nreaction A -> @ 1\nscaling N = 10\n";
        let e = parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateSpecies("A".into()));
    }

    #[test]
    fn empty_and_zero_sides() {
        let text = "species A\nreaction -> A @ 1\nreaction A -> 0 @ 0.5\nscaling N = 10\n";
        let model = parse(text).unwrap();
        assert_eq!(model.network.reactions()[0].inputs, vec![0]);
        assert_eq!(model.network.reactions()[0].outputs, vec![1]);
        assert_eq!(model.network.reactions()[1].inputs, vec![1]);
        assert_eq!(model.network.reactions()[1].outputs, vec![0]);
    }

    #[test]
    fn whitespace_insensitive() {
        let text = "species A B\nreaction 2A->B@0.5\nscaling N = 100\n";
        let model = parse(text).unwrap();
        assert_eq!(model.network.reactions()[0].inputs, vec![2, 0]);
        assert_eq!(model.network.reactions()[0].rate, 0.5);
    }

    #[test]
    fn missing_scaling_is_an_error() {
        let text = "species A\nreaction A -> @ 1\n";
        let e = parse(text).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(ref m) if m.contains("scaling")));
    }
}
