//! The `.sopra` scenario format.
//!
//! A UTF-8, line-oriented file. `#` starts a comment outside quotes and blank
//! lines are ignored. An optional `version = 1` header comes before the first
//! section. Each `[section]` header is followed by one record per line: a
//! keyword, positional ids, then `key=value` attributes.
//!
//! ```text
//! version = 1
//!
//! [activities]
//! activity "Commuting 1" type=TopAction
//!
//! [beliefs]
//! belief Alice "Commuting 1" personal=0.1 shared=0.8
//! ```
//!
//! Ids that are not plain words are double-quoted, with `\"`, `\\`, `\n`,
//! `\r` and `\t` escapes. Section names, keywords, attribute keys and enum
//! values are case-insensitive; ids are not. `contextelements` and
//! `contextelement` are accepted for `contextcues` and `contextcue`.
//!
//! [`parse`] checks syntax, duplicates, numbers, the `[0, 1]` range of every
//! strength and that every referenced id is declared. The formal tree rules
//! are left to [`sopra_core::validate`]. [`serialize`] writes the canonical
//! form: sections in a fixed order, records sorted by key and numbers in the
//! shortest form that reads back to the same `f64`.

use std::fmt::{self, Write as _};

use sopra_core::model::*;
use sopra_core::Error as CoreError;

/// A rejected input, with its position (1-based line and column).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    /// Line number, from 1.
    pub line: usize,
    /// Column in characters, from 1.
    pub column: usize,
    /// What the parser was looking for.
    pub expected: String,
    /// What it found instead.
    pub found: String,
    /// Human readable description.
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(
        loc: Location,
        expected: impl Into<String>,
        found: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        ParseError {
            line: loc.line,
            column: loc.column,
            expected: expected.into(),
            found: found.into(),
            message: message.into(),
        }
    }
}

/// Every error found in one input, in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_char('\n')?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

/// Source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct Location {
    pub line: usize,
    pub column: usize,
}

impl Location {
    const START: Location = Location { line: 1, column: 1 };
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Word(String),
    Quoted(String),
    Equals,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    loc: Location,
}

impl Token {
    fn text(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Word(s) | TokenKind::Quoted(s) => Some(s),
            TokenKind::Equals => None,
        }
    }

    fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Word(s) => format!("`{s}`"),
            TokenKind::Quoted(s) => format!("\"{s}\""),
            TokenKind::Equals => "`=`".into(),
        }
    }
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = line.chars().enumerate().peekable();
    while let Some(&(col, c)) = chars.peek() {
        let loc = Location {
            line: line_no,
            column: col + 1,
        };
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '=' => {
                chars.next();
                tokens.push(Token {
                    kind: TokenKind::Equals,
                    loc,
                });
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                let mut closed = false;
                while let Some((ecol, c)) = chars.next() {
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => {
                            let Some((_, e)) = chars.next() else { break };
                            s.push(match e {
                                '"' => '"',
                                '\\' => '\\',
                                'n' => '\n',
                                'r' => '\r',
                                't' => '\t',
                                other => {
                                    return Err(ParseError::new(
                                        Location {
                                            line: line_no,
                                            column: ecol + 1,
                                        },
                                        "one of \\\" \\\\ \\n \\r \\t",
                                        format!("\\{other}"),
                                        format!("unknown escape `\\{other}`"),
                                    ))
                                }
                            });
                        }
                        c => s.push(c),
                    }
                }
                if !closed {
                    return Err(ParseError::new(
                        loc,
                        "closing `\"`",
                        "end of line",
                        "unterminated quoted string",
                    ));
                }
                tokens.push(Token {
                    kind: TokenKind::Quoted(s),
                    loc,
                });
            }
            _ => {
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || c == '=' || c == '"' || c == '#' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                tokens.push(Token {
                    kind: TokenKind::Word(s),
                    loc,
                });
            }
        }
    }
    Ok(tokens)
}

/// Record sections, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Section {
    Activities,
    Agents,
    ContextCues,
    Values,
    Implementations,
    Beliefs,
    HabitualTriggers,
    RelatedValues,
    AdheredValues,
    Same,
}

impl Section {
    pub(crate) const ALL: [Section; 10] = [
        Section::Activities,
        Section::Agents,
        Section::ContextCues,
        Section::Values,
        Section::Implementations,
        Section::Beliefs,
        Section::HabitualTriggers,
        Section::RelatedValues,
        Section::AdheredValues,
        Section::Same,
    ];

    pub(crate) fn name(self) -> &'static str {
        match self {
            Section::Activities => "activities",
            Section::Agents => "agents",
            Section::ContextCues => "contextcues",
            Section::Values => "values",
            Section::Implementations => "implementations",
            Section::Beliefs => "beliefs",
            Section::HabitualTriggers => "habitualtriggers",
            Section::RelatedValues => "relatedvalues",
            Section::AdheredValues => "adheredvalues",
            Section::Same => "same",
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            Section::Activities => "activity",
            Section::Agents => "agent",
            Section::ContextCues => "contextcue",
            Section::Values => "value",
            Section::Implementations => "implementation",
            Section::Beliefs => "belief",
            Section::HabitualTriggers => "habitualtrigger",
            Section::RelatedValues => "relatedvalue",
            Section::AdheredValues => "adheredvalue",
            Section::Same => "same",
        }
    }

    fn from_name(name: &str) -> Option<Section> {
        if name.eq_ignore_ascii_case("contextelements") {
            return Some(Section::ContextCues);
        }
        Section::ALL
            .into_iter()
            .find(|s| s.name().eq_ignore_ascii_case(name))
    }

    fn accepts_keyword(self, kw: &str) -> bool {
        kw.eq_ignore_ascii_case(self.keyword())
            || (self == Section::ContextCues && kw.eq_ignore_ascii_case("contextelement"))
    }

    /// Positional ids and allowed attribute keys (canonical spelling first,
    /// then aliases) with whether each is required.
    fn schema(self) -> (usize, &'static [(&'static [&'static str], bool)]) {
        const STRENGTH: (&[&str], bool) = (&["strength"], true);
        match self {
            Section::Activities => (1, &[(&["label"], false), (&["type"], false)]),
            Section::Agents => (1, &[(&["habitRate"], true)]),
            Section::ContextCues => (1, &[(&["kind", "type"], true)]),
            Section::Values => (1, &[(&["label"], false)]),
            Section::Implementations => (2, &[(&["type"], true)]),
            Section::Beliefs => (
                2,
                &[
                    (&["personal", "personalStrength"], true),
                    (&["shared", "sharedStrength"], true),
                ],
            ),
            Section::HabitualTriggers => (2, &[STRENGTH]),
            Section::RelatedValues => (2, &[STRENGTH, (&["provenance"], false)]),
            Section::AdheredValues => (2, &[STRENGTH]),
            Section::Same => (2, &[]),
        }
    }
}

/// One parsed record line before conversion.
struct Row {
    loc: Location,
    positional: Vec<Token>,
    /// Values by schema slot.
    attrs: Vec<Option<Token>>,
}

impl Row {
    fn id(&self, i: usize) -> &str {
        self.positional[i].text().unwrap_or_default()
    }

    fn attr(&self, slot: usize) -> Option<&Token> {
        self.attrs[slot].as_ref()
    }
}

#[derive(Clone, Copy)]
enum RefKind {
    Activity,
    Agent,
    Value,
    Cue,
}

struct Parser {
    kb: KnowledgeBase,
    errors: Vec<ParseError>,
    refs: Vec<(RefKind, String, Location)>,
}

impl Parser {
    fn error(
        &mut self,
        loc: Location,
        expected: &str,
        found: impl Into<String>,
        message: impl Into<String>,
    ) {
        self.errors
            .push(ParseError::new(loc, expected, found, message));
    }

    fn row(&mut self, section: Section, tokens: &[Token]) -> Option<Row> {
        let head = &tokens[0];
        let loc = head.loc;
        match &head.kind {
            TokenKind::Word(kw) if section.accepts_keyword(kw) => {}
            _ => {
                self.error(
                    loc,
                    section.keyword(),
                    head.describe(),
                    format!(
                        "unknown record `{}` in section [{}]",
                        head.text().unwrap_or("="),
                        section.name()
                    ),
                );
                return None;
            }
        }
        let (arity, keys) = section.schema();
        let mut positional = Vec::new();
        let mut attrs: Vec<Option<Token>> = vec![None; keys.len()];
        let mut i = 1;
        let mut ok = true;
        while i < tokens.len() {
            let tok = &tokens[i];
            let next_is_eq = matches!(tokens.get(i + 1).map(|t| &t.kind), Some(TokenKind::Equals));
            if next_is_eq {
                let TokenKind::Word(key) = &tok.kind else {
                    self.error(
                        tok.loc,
                        "attribute name",
                        tok.describe(),
                        "attribute names cannot be quoted",
                    );
                    return None;
                };
                let Some(value) = tokens.get(i + 2).filter(|t| t.text().is_some()) else {
                    let found = tokens
                        .get(i + 2)
                        .map_or("end of line".into(), Token::describe);
                    self.error(
                        tokens[i + 1].loc,
                        "attribute value",
                        found,
                        format!("missing value for `{key}`"),
                    );
                    return None;
                };
                match keys
                    .iter()
                    .position(|(names, _)| names.iter().any(|n| n.eq_ignore_ascii_case(key)))
                {
                    Some(slot) if attrs[slot].is_some() => {
                        self.error(
                            tok.loc,
                            "distinct attributes",
                            format!("`{key}`"),
                            format!("attribute `{key}` given twice"),
                        );
                        ok = false;
                    }
                    Some(slot) => attrs[slot] = Some(value.clone()),
                    None => {
                        let allowed: Vec<&str> = keys.iter().map(|(n, _)| n[0]).collect();
                        self.error(
                            tok.loc,
                            &if allowed.is_empty() {
                                "no attributes".into()
                            } else {
                                allowed.join(", ")
                            },
                            format!("`{key}`"),
                            format!("unknown attribute `{key}` for {}", section.keyword()),
                        );
                        ok = false;
                    }
                }
                i += 3;
            } else {
                match &tok.kind {
                    TokenKind::Equals => {
                        self.error(
                            tok.loc,
                            "attribute name before `=`",
                            "`=`",
                            "unexpected `=`",
                        );
                        return None;
                    }
                    _ if attrs.iter().any(Option::is_some) => {
                        self.error(
                            tok.loc,
                            "key=value",
                            tok.describe(),
                            "ids must come before attributes",
                        );
                        return None;
                    }
                    _ => positional.push(tok.clone()),
                }
                i += 1;
            }
        }
        if positional.len() != arity {
            let found = positional
                .get(arity)
                .map_or(format!("{} ids", positional.len()), Token::describe);
            let at = positional.get(arity).map_or(loc, |t| t.loc);
            self.error(
                at,
                &format!("{arity} ids"),
                found,
                format!(
                    "{} takes {arity} ids, got {}",
                    section.keyword(),
                    positional.len()
                ),
            );
            return None;
        }
        for p in &positional {
            if p.text() == Some("") {
                self.error(p.loc, "non-empty id", "\"\"", "ids cannot be empty");
                ok = false;
            }
        }
        for (slot, (names, required)) in keys.iter().enumerate() {
            if *required && attrs[slot].is_none() {
                self.error(
                    loc,
                    &format!("`{}=`", names[0]),
                    "end of line",
                    format!("{} requires `{}`", section.keyword(), names[0]),
                );
                ok = false;
            }
        }
        ok.then_some(Row {
            loc,
            positional,
            attrs,
        })
    }

    fn strength(&mut self, tok: &Token, what: &str) -> Option<f64> {
        let TokenKind::Word(text) = &tok.kind else {
            self.error(
                tok.loc,
                "number",
                tok.describe(),
                format!("{what} must be an unquoted number"),
            );
            return None;
        };
        match text.parse::<f64>() {
            Ok(x) if x.is_finite() && (0.0..=1.0).contains(&x) => Some(x),
            Ok(x) if x.is_finite() => {
                self.error(
                    tok.loc,
                    "number in [0, 1]",
                    text.clone(),
                    format!("{what} {x} is outside [0, 1]"),
                );
                None
            }
            _ => {
                self.error(
                    tok.loc,
                    "number",
                    text.clone(),
                    format!("malformed number `{text}` for {what}"),
                );
                None
            }
        }
    }

    fn name<T: std::str::FromStr>(&mut self, tok: &Token, expected: &str) -> Option<T> {
        let text = tok.text().unwrap_or_default();
        match text.parse::<T>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.error(
                    tok.loc,
                    expected,
                    tok.describe(),
                    format!("expected one of {expected}"),
                );
                None
            }
        }
    }

    fn reference(&mut self, kind: RefKind, row: &Row, i: usize) -> String {
        let id = row.id(i).to_string();
        self.refs.push((kind, id.clone(), row.positional[i].loc));
        id
    }

    fn inserted(&mut self, loc: Location, result: Result<(), CoreError>) {
        if let Err(e) = result {
            let found = match &e {
                CoreError::Duplicate { key, .. } => key.clone(),
                other => other.to_string(),
            };
            self.error(loc, "unique key", found, e.to_string());
        }
    }

    fn record(&mut self, section: Section, row: Row) {
        let loc = row.loc;
        let result = match section {
            Section::Activities => {
                let mut activity = Activity::new(row.id(0));
                if let Some(label) = row.attr(0) {
                    activity.label = label.text().unwrap_or_default().into();
                }
                if let Some(tok) = row.attr(1) {
                    match self.name(tok, "Action, AbstractAction, TopAction") {
                        Some(ty) => activity.declared_type = Some(ty),
                        None => return,
                    }
                }
                self.kb.insert_activity(activity)
            }
            Section::Agents => {
                let Some(habit_rate) = self.strength(row.attr(0).unwrap(), "habitRate") else {
                    return;
                };
                self.kb.insert_agent(Agent {
                    id: row.id(0).into(),
                    habit_rate,
                })
            }
            Section::ContextCues => {
                let Some(kind) =
                    self.name(row.attr(0).unwrap(), "object, location, agent, activity")
                else {
                    return;
                };
                self.kb.insert_context_cue(ContextCue {
                    id: row.id(0).into(),
                    kind,
                })
            }
            Section::Values => {
                let mut value = Value::new(row.id(0));
                if let Some(label) = row.attr(0) {
                    value.label = label.text().unwrap_or_default().into();
                }
                self.kb.insert_value(value)
            }
            Section::Implementations => {
                let Some(kind) = self.name(row.attr(0).unwrap(), "allOf, partOf") else {
                    return;
                };
                let child = self.reference(RefKind::Activity, &row, 0);
                let parent = self.reference(RefKind::Activity, &row, 1);
                self.kb.insert_implementation(Implementation {
                    child,
                    parent,
                    kind,
                })
            }
            Section::Beliefs => {
                let personal = self.strength(row.attr(0).unwrap(), "personalStrength");
                let shared = self.strength(row.attr(1).unwrap(), "sharedStrength");
                let (Some(personal), Some(shared)) = (personal, shared) else {
                    return;
                };
                let agent = self.reference(RefKind::Agent, &row, 0);
                let activity = self.reference(RefKind::Activity, &row, 1);
                self.kb.insert_belief(Belief {
                    agent,
                    activity,
                    personal,
                    shared,
                })
            }
            Section::HabitualTriggers => {
                let Some(strength) = self.strength(row.attr(0).unwrap(), "strength") else {
                    return;
                };
                let activity = self.reference(RefKind::Activity, &row, 0);
                let cue = self.reference(RefKind::Cue, &row, 1);
                self.kb.insert_habitual_trigger(HabitualTrigger {
                    activity,
                    cue,
                    strength,
                })
            }
            Section::RelatedValues => {
                let Some(strength) = self.strength(row.attr(0).unwrap(), "strength") else {
                    return;
                };
                let provenance = match row.attr(1) {
                    None => Provenance::Asserted,
                    Some(tok) => match self.name(tok, "asserted, inferred") {
                        Some(p) => p,
                        None => return,
                    },
                };
                let activity = self.reference(RefKind::Activity, &row, 0);
                let value = self.reference(RefKind::Value, &row, 1);
                self.kb.insert_related_value(RelatedValue {
                    activity,
                    value,
                    strength,
                    provenance,
                })
            }
            Section::AdheredValues => {
                let Some(strength) = self.strength(row.attr(0).unwrap(), "strength") else {
                    return;
                };
                let agent = self.reference(RefKind::Agent, &row, 0);
                let value = self.reference(RefKind::Value, &row, 1);
                self.kb.insert_adhered_value(AdheredValue {
                    agent,
                    value,
                    strength,
                })
            }
            Section::Same => {
                let a = self.reference(RefKind::Activity, &row, 0);
                let b = self.reference(RefKind::Activity, &row, 1);
                self.kb.insert_same_link(SameLink::new(a, b))
            }
        };
        self.inserted(loc, result);
    }

    fn check_references(&mut self) {
        let refs = std::mem::take(&mut self.refs);
        for (kind, id, loc) in refs {
            let (ok, what) = match kind {
                RefKind::Activity => (self.kb.activity(&id).is_some(), "activity"),
                RefKind::Agent => (self.kb.agent(&id).is_some(), "agent"),
                RefKind::Value => (self.kb.value(&id).is_some(), "value"),
                RefKind::Cue => (self.kb.is_cue(&id), "context cue, agent or activity"),
            };
            if !ok {
                self.error(
                    loc,
                    &format!("declared {what}"),
                    format!("`{id}`"),
                    format!("reference to undeclared {what} `{id}`"),
                );
            }
        }
    }
}

/// Parses a scenario, collecting every error before returning.
pub fn parse(text: &str) -> Result<KnowledgeBase, ParseErrors> {
    let mut parser = Parser {
        kb: KnowledgeBase::new(),
        errors: Vec::new(),
        refs: Vec::new(),
    };
    let mut section: Option<Section> = None;
    let mut seen_version = false;

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim_start();
        if trimmed.starts_with('[') {
            let col = line.len() - trimmed.len() + 1;
            let loc = Location {
                line: line_no,
                column: line[..col - 1].chars().count() + 1,
            };
            let Some(end) = trimmed.find(']') else {
                parser.error(loc, "`]`", "end of line", "unterminated section header");
                section = None;
                continue;
            };
            let rest = trimmed[end + 1..].trim_start();
            if !rest.is_empty() && !rest.starts_with('#') {
                parser.error(
                    loc,
                    "end of line",
                    format!("`{rest}`"),
                    "unexpected text after section header",
                );
            }
            let name = trimmed[1..end].trim();
            section = Section::from_name(name);
            if section.is_none() {
                let names: Vec<&str> = Section::ALL.iter().map(|s| s.name()).collect();
                parser.error(
                    loc,
                    &names.join(", "),
                    format!("`{name}`"),
                    format!("unknown section [{name}]"),
                );
            }
            continue;
        }
        let tokens = match lex_line(line, line_no) {
            Ok(t) => t,
            Err(e) => {
                parser.errors.push(e);
                continue;
            }
        };
        let Some(first) = tokens.first() else {
            continue;
        };

        if first
            .text()
            .is_some_and(|t| t.eq_ignore_ascii_case("version"))
            && matches!(tokens.get(1).map(|t| &t.kind), Some(TokenKind::Equals))
        {
            if section.is_some() || seen_version {
                parser.error(
                    first.loc,
                    "record",
                    "`version`",
                    "`version` must appear once, before any section",
                );
                continue;
            }
            seen_version = true;
            match tokens.get(2) {
                Some(Token {
                    kind: TokenKind::Word(v),
                    ..
                }) if v == "1" && tokens.len() == 3 => {}
                other => {
                    let found = other.map_or("end of line".into(), Token::describe);
                    let loc = other.map_or(first.loc, |t| t.loc);
                    parser.error(loc, "1", found, "unsupported version");
                }
            }
            continue;
        }

        let Some(current) = section else {
            parser.error(
                first.loc,
                "section header",
                first.describe(),
                "record outside of any section",
            );
            continue;
        };
        if let Some(row) = parser.row(current, &tokens) {
            parser.record(current, row);
        }
    }

    parser.check_references();
    parser.errors.sort_by_key(|e| (e.line, e.column));
    if parser.kb.activities().next().is_none() {
        parser.error(
            Location::START,
            "at least one activity",
            "none",
            "no activities declared",
        );
    }
    if parser.errors.is_empty() {
        Ok(parser.kb)
    } else {
        Err(ParseErrors(parser.errors))
    }
}

fn is_bare(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '/' | '+' | '\''))
}

/// Writes an id, quoting it unless it is a plain word.
pub fn quote(id: &str) -> String {
    if is_bare(id) {
        return id.to_string();
    }
    let mut out = String::with_capacity(id.len() + 2);
    out.push('"');
    for c in id.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Shortest decimal that reads back as the same `f64`.
pub fn number(x: f64) -> String {
    format!("{x}")
}

pub(crate) fn related_value_row(
    activity: &str,
    value: &str,
    strength: f64,
    provenance: Option<Provenance>,
) -> String {
    let mut row = format!(
        "relatedvalue {} {} strength={}",
        quote(activity),
        quote(value),
        number(strength)
    );
    if let Some(p) = provenance {
        let _ = write!(row, " provenance={p}");
    }
    row
}

fn section_rows(kb: &KnowledgeBase, section: Section) -> Vec<String> {
    match section {
        Section::Activities => kb
            .activities()
            .map(|a| {
                let mut row = format!("activity {}", quote(&a.id));
                if a.label != a.id {
                    let _ = write!(row, " label={}", quote(&a.label));
                }
                if let Some(ty) = a.declared_type {
                    let _ = write!(row, " type={ty}");
                }
                row
            })
            .collect(),
        Section::Agents => kb
            .agents()
            .map(|a| format!("agent {} habitRate={}", quote(&a.id), number(a.habit_rate)))
            .collect(),
        Section::ContextCues => kb
            .context_cues()
            .map(|c| format!("contextcue {} kind={}", quote(&c.id), c.kind))
            .collect(),
        Section::Values => kb
            .values()
            .map(|v| {
                let mut row = format!("value {}", quote(&v.id));
                if v.label != v.id {
                    let _ = write!(row, " label={}", quote(&v.label));
                }
                row
            })
            .collect(),
        Section::Implementations => kb
            .implementations()
            .map(|i| {
                format!(
                    "implementation {} {} type={}",
                    quote(&i.child),
                    quote(&i.parent),
                    i.kind
                )
            })
            .collect(),
        Section::Beliefs => kb
            .beliefs()
            .map(|b| {
                format!(
                    "belief {} {} personal={} shared={}",
                    quote(&b.agent),
                    quote(&b.activity),
                    number(b.personal),
                    number(b.shared)
                )
            })
            .collect(),
        Section::HabitualTriggers => kb
            .habitual_triggers()
            .map(|t| {
                format!(
                    "habitualtrigger {} {} strength={}",
                    quote(&t.activity),
                    quote(&t.cue),
                    number(t.strength)
                )
            })
            .collect(),
        Section::RelatedValues => kb
            .related_values()
            .map(|r| {
                let provenance = (r.provenance == Provenance::Inferred).then_some(r.provenance);
                related_value_row(&r.activity, &r.value, r.strength, provenance)
            })
            .collect(),
        Section::AdheredValues => kb
            .adhered_values()
            .map(|a| {
                format!(
                    "adheredvalue {} {} strength={}",
                    quote(&a.agent),
                    quote(&a.value),
                    number(a.strength)
                )
            })
            .collect(),
        Section::Same => kb
            .same_links()
            .map(|l| format!("same {} {}", quote(&l.a), quote(&l.b)))
            .collect(),
    }
}

/// Canonical text of a knowledge base. Empty sections are omitted.
pub fn serialize(kb: &KnowledgeBase) -> String {
    let mut out = String::from("version = 1\n");
    for section in Section::ALL {
        let rows = section_rows(kb, section);
        if rows.is_empty() {
            continue;
        }
        let _ = write!(out, "\n[{}]\n", section.name());
        for row in rows {
            out.push_str(&row);
            out.push('\n');
        }
    }
    out
}
