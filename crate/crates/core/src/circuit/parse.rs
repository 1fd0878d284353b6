use std::collections::BTreeSet;

use crate::dual_rail::{BellKind, LogicalAmplitudes};
use crate::fock::{Amplitude, FockState, Occupation};
use crate::optics::ModeUnitary;

use super::{BsMatrix, Circuit, Comparison, Condition, Element, ErrorKind, ParseError, PREPARATION_TOL};

const KEYWORDS: [&str; 14] = [
    "modes", "labels", "ket", "amp", "dualrail", "on", "bell", "bs", "matrix", "detect", "as", "postselect", "correct",
    "if",
];

/// Where a statement starts.
#[derive(Clone, Debug)]
pub(crate) struct Span {
    pub line: usize,
    pub column: usize,
    pub token: String,
}

#[derive(Clone, Debug)]
struct Token {
    text: String,
    column: usize,
}

fn error(kind: ErrorKind, line: usize, column: usize, token: &str, message: impl Into<String>) -> ParseError {
    ParseError { kind, line, column, message: message.into(), token: token.to_string() }
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c == '#' {
            break;
        } else if c.is_whitespace() {
            i += 1;
            continue;
        } else if c == '|' && chars.get(i + 1) != Some(&'|') {
            // A ket runs to the closing `>`.
            while i < chars.len() && chars[i] != '>' {
                i += 1;
            }
            if i == chars.len() {
                let text: String = chars[start..].iter().collect();
                return Err(error(ErrorKind::Syntax, line_no, start + 1, text.trim_end(), "unterminated ket, expected `>`"));
            }
            i += 1;
        } else if let Some(op) = ["==", "&&", "||"].iter().find(|op| chars[i..].starts_with(&op.chars().collect::<Vec<_>>())) {
            i += op.len();
        } else {
            while i < chars.len() && !chars[i].is_whitespace() && !"#|&=".contains(chars[i]) {
                i += 1;
            }
            if i == start {
                return Err(error(ErrorKind::Syntax, line_no, start + 1, &c.to_string(), format!("unexpected `{c}`")));
            }
        }
        out.push(Token { text: chars[start..i].iter().collect(), column: start + 1 });
    }
    Ok(out)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&s)
}

fn is_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') && !KEYWORDS.contains(&s)
}

struct Cursor<'a> {
    line: usize,
    tokens: &'a [Token],
    pos: usize,
    end_column: usize,
    labels: Option<&'a [String]>,
    mode_count: usize,
}

impl<'a> Cursor<'a> {
    fn syntax(&self, message: impl Into<String>) -> ParseError {
        match self.tokens.get(self.pos) {
            Some(t) => error(ErrorKind::Syntax, self.line, t.column, &t.text, message),
            None => error(ErrorKind::Syntax, self.line, self.end_column, "", message),
        }
    }

    fn semantic_at(&self, t: &Token, message: impl Into<String>) -> ParseError {
        error(ErrorKind::Semantic, self.line, t.column, &t.text, message)
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<&'a Token, ParseError> {
        let t = self.tokens.get(self.pos).ok_or_else(|| self.syntax(format!("expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.text == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(format!("expected `{kw}`"))),
        }
    }

    fn eat(&mut self, kw: &str) -> bool {
        if self.peek().is_some_and(|t| t.text == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.syntax(format!("unexpected `{}` at end of statement", t.text))),
        }
    }

    fn real(&mut self) -> Result<f64, ParseError> {
        let t = self.next("a number")?;
        match t.text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => {
                self.pos -= 1;
                Err(self.syntax(format!("expected a finite number, found `{}`", t.text)))
            }
        }
    }

    fn complex(&mut self) -> Result<Amplitude, ParseError> {
        Ok(Amplitude::new(self.real()?, self.real()?))
    }

    fn count<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let t = self.next(what)?;
        if !t.text.chars().all(|c| c.is_ascii_digit()) {
            self.pos -= 1;
            return Err(self.syntax(format!("expected {what}, found `{}`", t.text)));
        }
        t.text.parse().map_err(|_| {
            self.pos -= 1;
            self.syntax(format!("{what} `{}` is too large", t.text))
        })
    }

    fn mode(&mut self) -> Result<usize, ParseError> {
        let t = self.next("a mode")?;
        if KEYWORDS.contains(&t.text.as_str()) || !is_label(&t.text) {
            self.pos -= 1;
            return Err(self.syntax(format!("expected a mode, found `{}`", t.text)));
        }
        match self.labels {
            Some(labels) => labels
                .iter()
                .position(|l| l == &t.text)
                .ok_or_else(|| self.semantic_at(t, format!("undeclared mode label `{}`", t.text))),
            None => match t.text.parse::<usize>() {
                Ok(n) if (1..=self.mode_count).contains(&n) => Ok(n - 1),
                Ok(n) => Err(self.semantic_at(t, format!("mode {n} is out of range 1..={}", self.mode_count))),
                Err(_) => Err(self.semantic_at(
                    t,
                    format!("mode `{}` is not a number and no labels were declared", t.text),
                )),
            },
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        let t = self.next("an outcome name")?;
        if !is_identifier(&t.text) {
            self.pos -= 1;
            return Err(self.syntax(format!("expected an outcome name, found `{}`", t.text)));
        }
        Ok(t.text.clone())
    }

    fn condition(&mut self) -> Result<Condition, ParseError> {
        let mut clauses = Vec::new();
        loop {
            let mut clause = Vec::new();
            loop {
                let name = self.name()?;
                self.keyword("==")?;
                let count = self.count("a photon count")?;
                clause.push(Comparison { name, count });
                if !self.eat("&&") {
                    break;
                }
            }
            clauses.push(clause);
            if !self.eat("||") {
                break;
            }
        }
        Ok(Condition { clauses })
    }

    fn ket(&mut self) -> Result<Occupation, ParseError> {
        let t = self.next("a ket")?;
        let inner = t.text.strip_prefix('|').and_then(|s| s.strip_suffix('>'));
        let Some(inner) = inner else {
            self.pos -= 1;
            return Err(self.syntax(format!("expected a ket like `|1,0>`, found `{}`", t.text)));
        };
        let counts: Result<Vec<u32>, _> = inner.split(',').map(|s| s.trim().parse::<u32>()).collect();
        let counts = counts.map_err(|_| {
            error(ErrorKind::Syntax, self.line, t.column, &t.text, "ket entries must be photon counts")
        })?;
        if counts.len() != self.mode_count {
            return Err(self.semantic_at(
                t,
                format!("ket lists {} modes, the circuit has {}", counts.len(), self.mode_count),
            ));
        }
        Ok(Occupation::new(counts))
    }
}

fn parse_modes(c: &mut Cursor) -> Result<Element, ParseError> {
    let count_token = c.peek().cloned();
    let count: usize = c.count("a mode count")?;
    if count == 0 {
        let t = count_token.expect("just read");
        return Err(c.semantic_at(&t, "a circuit needs at least one mode"));
    }
    let labels = if c.eat("labels") {
        let mut labels: Vec<String> = Vec::new();
        while let Some(t) = c.peek() {
            if !is_label(&t.text) {
                return Err(c.syntax(format!("invalid mode label `{}`", t.text)));
            }
            if labels.contains(&t.text) {
                return Err(c.semantic_at(t, format!("label `{}` declared twice", t.text)));
            }
            labels.push(t.text.clone());
            c.pos += 1;
        }
        if labels.len() != count {
            return Err(c.syntax(format!("expected {count} labels, found {}", labels.len())));
        }
        Some(labels)
    } else {
        None
    };
    c.end()?;
    Ok(Element::Modes { count, labels })
}

fn parse_statement(c: &mut Cursor, keyword: &Token) -> Result<Element, ParseError> {
    let e = match keyword.text.as_str() {
        "ket" => {
            let ket = c.ket()?;
            let mut amp = Amplitude::new(1.0, 0.0);
            if c.peek().is_some() {
                amp = Amplitude::default();
                while c.peek().is_some() {
                    c.keyword("amp")?;
                    amp += c.complex()?;
                }
            }
            Element::PrepareKet { terms: vec![(ket, amp)] }
        }
        "dualrail" => {
            let a0 = c.complex()?;
            let a1 = c.complex()?;
            c.keyword("on")?;
            let rail1 = c.mode()?;
            let rail0 = c.mode()?;
            Element::PrepareDualRail { amplitudes: LogicalAmplitudes::new(a0, a1), rail1, rail0 }
        }
        "bell" => {
            let t = c.next("a Bell state")?;
            let kind = BellKind::from_keyword(&t.text).ok_or_else(|| {
                error(
                    ErrorKind::Syntax,
                    c.line,
                    t.column,
                    &t.text,
                    format!("unknown Bell state `{}`, expected phi+, phi-, psi+ or psi-", t.text),
                )
            })?;
            c.keyword("on")?;
            let modes = [c.mode()?, c.mode()?, c.mode()?, c.mode()?];
            Element::PrepareBell { kind, modes }
        }
        "bs" => {
            let modes = [c.mode()?, c.mode()?];
            let mut matrix = BsMatrix::Hadamard;
            if c.eat("matrix") && !c.eat("h") {
                let mut entries = [Amplitude::default(); 4];
                for e in &mut entries {
                    *e = c.complex()?;
                }
                matrix = BsMatrix::Explicit(entries);
            }
            Element::ApplyBs { modes, matrix }
        }
        "detect" => {
            let mode = c.mode()?;
            c.keyword("as")?;
            let name = c.name()?;
            Element::Detect { mode, name }
        }
        "postselect" => Element::PostSelect(c.condition()?),
        "correct" => {
            let t = c.next("a Pauli")?;
            match t.text.as_str() {
                "z" => {}
                "x" | "y" => {
                    return Err(error(
                        ErrorKind::Semantic,
                        c.line,
                        t.column,
                        &t.text,
                        format!("`correct {}` is reserved; only `z` corrections are supported", t.text),
                    ))
                }
                other => {
                    return Err(error(ErrorKind::Syntax, c.line, t.column, other, format!("expected `z`, found `{other}`")))
                }
            }
            c.keyword("on")?;
            let rail1 = c.mode()?;
            let rail0 = c.mode()?;
            c.keyword("if")?;
            let condition = c.condition()?;
            Element::CorrectZ { rail1, rail0, condition }
        }
        "modes" => {
            return Err(error(ErrorKind::Semantic, c.line, keyword.column, &keyword.text, "`modes` may appear only once"));
        }
        other => {
            return Err(error(ErrorKind::Syntax, c.line, keyword.column, other, format!("unknown statement `{other}`")));
        }
    };
    c.end()?;
    Ok(e)
}

/// Parses and validates a program.
pub fn parse(source: &str) -> Result<Circuit, ParseError> {
    let mut elements: Vec<Element> = Vec::new();
    let mut spans: Vec<Span> = Vec::new();
    let mut last_line = 1;
    for (index, line) in source.lines().enumerate() {
        let line_no = index + 1;
        last_line = line_no;
        let tokens = tokenize(line_no, line)?;
        let Some(first) = tokens.first() else {
            continue;
        };
        let (mode_count, labels) = match elements.first() {
            Some(Element::Modes { count, labels }) => (*count, labels.as_deref()),
            _ => (0, None),
        };
        let mut c = Cursor {
            line: line_no,
            tokens: &tokens,
            pos: 1,
            end_column: line.chars().count() + 1,
            labels,
            mode_count,
        };
        let element = if elements.is_empty() {
            if first.text != "modes" {
                return Err(error(ErrorKind::Syntax, line_no, first.column, &first.text, "a program starts with `modes`"));
            }
            parse_modes(&mut c)?
        } else {
            parse_statement(&mut c, first)?
        };
        // Consecutive kets are one superposition.
        if let (Element::PrepareKet { terms: new }, Some(Element::PrepareKet { terms })) = (&element, elements.last_mut()) {
            terms.extend(new.iter().cloned());
            continue;
        }
        elements.push(element);
        spans.push(Span { line: line_no, column: first.column, token: first.text.clone() });
    }
    if elements.is_empty() {
        return Err(error(ErrorKind::Syntax, last_line, 1, "", "empty program, expected `modes`"));
    }
    validate(&elements, &spans)?;
    Ok(Circuit { elements })
}

/// Semantic checks shared by [`parse`] and [`Circuit::new`].
pub(crate) fn validate(elements: &[Element], spans: &[Span]) -> Result<(), ParseError> {
    let fail = |i: usize, message: String| {
        let s = &spans[i];
        Err(error(ErrorKind::Semantic, s.line, s.column, &s.token, message))
    };
    let Some(Element::Modes { count, labels }) = elements.first() else {
        return if elements.is_empty() {
            Err(error(ErrorKind::Syntax, 1, 1, "", "empty program, expected `modes`"))
        } else {
            fail(0, "a program starts with `modes`".into())
        };
    };
    let count = *count;
    if count == 0 {
        return fail(0, "a circuit needs at least one mode".into());
    }
    if let Some(labels) = labels {
        if labels.len() != count {
            return fail(0, format!("expected {count} labels, found {}", labels.len()));
        }
        let unique: BTreeSet<_> = labels.iter().collect();
        if unique.len() != labels.len() {
            return fail(0, "mode labels must be distinct".into());
        }
        if let Some(bad) = labels.iter().find(|l| !is_label(l)) {
            return fail(0, format!("invalid mode label `{bad}`"));
        }
    }

    let mut claimed: BTreeSet<usize> = BTreeSet::new();
    let mut ket_seen = false;
    let mut operations_started = false;
    let mut detected: BTreeSet<usize> = BTreeSet::new();
    let mut bound: BTreeSet<&str> = BTreeSet::new();

    for (i, e) in elements.iter().enumerate().skip(1) {
        let check_modes = |modes: &[usize]| -> Result<(), ParseError> {
            for (k, &m) in modes.iter().enumerate() {
                if m >= count {
                    return fail(i, format!("mode index {m} is out of range for {count} modes"));
                }
                if modes[..k].contains(&m) {
                    return fail(i, format!("mode {} is used twice in one statement", mode_name(labels, m)));
                }
                if detected.contains(&m) {
                    return fail(i, format!("mode {} was already detected", mode_name(labels, m)));
                }
            }
            Ok(())
        };
        let check_condition = |c: &Condition| -> Result<(), ParseError> {
            if c.clauses.is_empty() || c.clauses.iter().any(Vec::is_empty) {
                return fail(i, "empty condition".into());
            }
            for name in c.names() {
                if !bound.contains(name) {
                    return fail(i, format!("outcome `{name}` is not bound by an earlier `detect`"));
                }
            }
            Ok(())
        };
        let claim = |modes: &[usize], claimed: &mut BTreeSet<usize>| -> Result<(), ParseError> {
            if operations_started {
                return fail(i, "preparations must come before beam splitters and detections".into());
            }
            check_modes(modes)?;
            for &m in modes {
                if !claimed.insert(m) {
                    return fail(i, format!("mode {} is already prepared", mode_name(labels, m)));
                }
            }
            Ok(())
        };
        match e {
            Element::Modes { .. } => return fail(i, "`modes` may appear only once".into()),
            Element::PrepareKet { terms } => {
                if ket_seen || !claimed.is_empty() {
                    return fail(i, "a ket prepares every mode and cannot be combined with other preparations".into());
                }
                ket_seen = true;
                let all: Vec<usize> = (0..count).collect();
                claim(&all, &mut claimed)?;
                if let Some((k, _)) = terms.iter().find(|(k, _)| k.len() != count) {
                    return fail(i, format!("ket {k} lists {} modes, the circuit has {count}", k.len()));
                }
                if terms.iter().any(|(_, a)| !a.re.is_finite() || !a.im.is_finite()) {
                    return fail(i, "amplitudes must be finite".into());
                }
                match FockState::new(count, terms.iter().cloned()) {
                    Ok(s) => check_norm(s.norm_squared()).or_else(|m| fail(i, m))?,
                    Err(_) => return fail(i, "ket amplitudes sum to zero".into()),
                }
            }
            Element::PrepareDualRail { amplitudes, rail1, rail0 } => {
                claim(&[*rail1, *rail0], &mut claimed)?;
                let [a0, a1] = amplitudes.as_array();
                if [a0.re, a0.im, a1.re, a1.im].iter().any(|x| !x.is_finite()) {
                    return fail(i, "amplitudes must be finite".into());
                }
                check_norm(amplitudes.norm_squared()).or_else(|m| fail(i, m))?;
            }
            Element::PrepareBell { modes, .. } => claim(modes, &mut claimed)?,
            Element::ApplyBs { modes, matrix } => {
                operations_started = true;
                check_modes(modes)?;
                if let BsMatrix::Explicit(entries) = matrix {
                    if let Err(e) = ModeUnitary::new(2, entries.to_vec()) {
                        return fail(i, format!("beam splitter matrix rejected: {e}"));
                    }
                }
            }
            Element::Detect { mode, name } => {
                operations_started = true;
                check_modes(&[*mode])?;
                if !is_identifier(name) {
                    return fail(i, format!("invalid outcome name `{name}`"));
                }
                if !bound.insert(name) {
                    return fail(i, format!("outcome `{name}` is already bound"));
                }
                detected.insert(*mode);
            }
            Element::PostSelect(c) => {
                operations_started = true;
                check_condition(c)?;
            }
            Element::CorrectZ { rail1, rail0, condition } => {
                operations_started = true;
                check_modes(&[*rail1, *rail0])?;
                check_condition(condition)?;
            }
        }
    }
    Ok(())
}

fn mode_name(labels: &Option<Vec<String>>, m: usize) -> String {
    match labels {
        Some(l) => format!("`{}`", l[m]),
        None => (m + 1).to_string(),
    }
}

fn check_norm(norm_squared: f64) -> Result<(), String> {
    if (norm_squared.sqrt() - 1.0).abs() > PREPARATION_TOL {
        return Err(format!("prepared amplitudes have norm {}, expected 1 within {PREPARATION_TOL:e}", norm_squared.sqrt()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let c = parse("modes 2\nket |1,0>\nbs 1 2 matrix h").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.elements()[2], Element::ApplyBs { modes: [0, 1], matrix: BsMatrix::Hadamard });
    }

    #[test]
    fn duplicate_bs_mode() {
        let e = parse("modes 2\nket |1,0>\nbs 1 1 matrix h").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic);
        assert_eq!(e.line, 3);
    }

    #[test]
    fn kets_merge_and_amps_sum() {
        let c = parse("modes 2\nket |1,0> amp 0.5 0 amp 0.2071067811865476 0\nket |0,1> amp 0 0.7071067811865476").unwrap();
        let Element::PrepareKet { terms } = &c.elements()[1] else { panic!() };
        assert_eq!(terms.len(), 2);
        assert!((terms[0].1.re - 0.7071067811865476).abs() < 1e-16);
    }

    #[test]
    fn labels_resolve() {
        let c = parse("modes 3 labels a b' c\ndualrail 1 0 0 0 on b' a\ndetect c as n").unwrap();
        assert_eq!(c.elements()[1], Element::PrepareDualRail { amplitudes: LogicalAmplitudes::real(1.0, 0.0), rail1: 1, rail0: 0 });
        let e = parse("modes 2 labels a b\ndualrail 1 0 0 0 on 1 2").unwrap_err();
        assert_eq!((e.kind, e.line, e.column, e.token.as_str()), (ErrorKind::Semantic, 2, 21, "1"));
    }

    #[test]
    fn error_positions() {
        let e = parse("modes 2\n  bs 1 2 matrix 1 0 0 0 0 0 1 oops").unwrap_err();
        assert_eq!((e.line, e.column, e.token.as_str()), (2, 31, "oops"));
        let e = parse("modes 2\nket |1,0").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ErrorKind::Syntax, 2, 5));
        let e = parse("# nothing\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse("bs 1 2").unwrap_err();
        assert_eq!(e.token, "bs");
    }

    #[test]
    fn reserved_corrections() {
        let e = parse("modes 2\ndetect 1 as d\ncorrect x on 1 2 if d == 1").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic);
        assert!(e.message.contains("reserved"));
    }

    #[test]
    fn detected_modes_are_gone() {
        assert!(parse("modes 2\ndetect 1 as d\nbs 1 2").is_err());
        assert!(parse("modes 2\ndetect 1 as d\ndetect 1 as e").is_err());
        assert!(parse("modes 2\ndetect 1 as d\ndetect 2 as d").is_err());
        assert!(parse("modes 2\npostselect d == 1").is_err());
    }

    #[test]
    fn preparation_rules() {
        assert!(parse("modes 2\nbs 1 2\nket |1,0>").is_err());
        assert!(parse("modes 4\ndualrail 1 0 0 0 on 1 2\ndualrail 1 0 0 0 on 2 3").is_err());
        assert!(parse("modes 4\ndualrail 1 0 0 0 on 1 2\nket |1,0,0,0>").is_err());
        assert!(parse("modes 2\ndualrail 1 0 1 0 on 1 2").is_err());
        assert!(parse("modes 2\ndualrail 1.0000001 0 0 0 on 1 2").is_ok());
        assert!(parse("modes 2\nket |1,0> amp 0 0").is_err());
    }

    #[test]
    fn operators_without_spaces() {
        let c = parse("modes 2\ndetect 1 as a\ndetect 2 as b\npostselect a==1&&b==0||a==0").unwrap();
        let Element::PostSelect(cond) = &c.elements()[3] else { panic!() };
        assert_eq!(cond.to_string(), "a == 1 && b == 0 || a == 0");
    }

    #[test]
    fn rejects_non_finite_numbers() {
        assert!(parse("modes 2\ndualrail nan 0 1 0 on 1 2").is_err());
        assert!(parse("modes 2\ndualrail inf 0 1 0 on 1 2").is_err());
        assert!(parse("modes 2\ndualrail 1e400 0 1 0 on 1 2").is_err());
    }
}
