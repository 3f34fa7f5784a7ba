//! Design-space files.
//!
//! ```text
//! # comment
//! weights { alpha = 1, beta = 30, kappa = 0.25 }
//! gamma = 0.9
//! horizon = 10
//! time-limit-secs = 1800
//! max-design-size = 2
//! modification { id = b1, kind = block-transition, between = c00 c01, cost = 1 }
//! modification { id = g, kind = add-precondition-both, action = stack_a_*,
//!                precondition = picked-from-table_a, cost = 1 }
//! ```
//!
//! `action` and `precondition` take one or more space-separated values;
//! `*` in an action name matches any run of characters.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::time::Duration;

use super::ParseError;
use crate::design::{
    DesignError, DesignModification, LongitudinalParams, ModificationKind, ModificationRecord,
    ObjectiveWeights,
};
use crate::model::ModelPair;

/// Key, values and the line/column of the key.
type Entry = (String, Vec<String>, usize, usize);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DesignSpec {
    pub modifications: Vec<ModificationRecord>,
    pub weights: ObjectiveWeights,
    pub params: LongitudinalParams,
    pub time_limit: Option<Duration>,
    pub max_design_size: Option<usize>,
}

impl DesignSpec {
    /// Resolves every modification against a model pair.
    pub fn resolve(&self, pair: &ModelPair) -> Result<Vec<DesignModification>, DesignError> {
        self.modifications
            .iter()
            .map(|r| DesignModification::resolve(r, pair))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Eq,
    Comma,
}

fn tokenize(text: &str) -> Vec<(Tok, usize, usize)> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut word = String::new();
        let mut word_col = 0;
        for (ci, c) in line.char_indices() {
            let tok = match c {
                '{' => Some(Tok::Open),
                '}' => Some(Tok::Close),
                '=' => Some(Tok::Eq),
                ',' => Some(Tok::Comma),
                c if c.is_whitespace() => None,
                c => {
                    if word.is_empty() {
                        word_col = ci + 1;
                    }
                    word.push(c);
                    continue;
                }
            };
            if !word.is_empty() {
                out.push((Tok::Word(std::mem::take(&mut word)), ln + 1, word_col));
            }
            if let Some(t) = tok {
                out.push((t, ln + 1, ci + 1));
            }
        }
        if !word.is_empty() {
            out.push((Tok::Word(word), ln + 1, word_col));
        }
    }
    out
}

struct Cursor {
    toks: Vec<(Tok, usize, usize)>,
    i: usize,
}

impl Cursor {
    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self
            .toks
            .get(self.i)
            .or(self.toks.last())
            .map_or((1, 1), |t| (t.1, t.2));
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn word(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.i += 1;
                Ok(w)
            }
            _ => Err(self.err("expected a word")),
        }
    }

    /// `{ key = v v, key = v }`, one entry per key with its values.
    fn block(&mut self) -> Result<Vec<Entry>, ParseError> {
        self.expect(Tok::Open, "`{`")?;
        let mut entries = Vec::new();
        loop {
            if self.peek() == Some(&Tok::Close) {
                self.i += 1;
                return Ok(entries);
            }
            let (line, col) = self.toks.get(self.i).map_or((0, 0), |t| (t.1, t.2));
            let key = self.word()?;
            self.expect(Tok::Eq, "`=`")?;
            let mut values = Vec::new();
            while let Some(Tok::Word(w)) = self.peek() {
                values.push(w.clone());
                self.i += 1;
            }
            if values.is_empty() {
                return Err(self.err(format!("`{key}` needs a value")));
            }
            entries.push((key, values, line, col));
            match self.peek() {
                Some(Tok::Comma) => self.i += 1,
                Some(Tok::Close) => {}
                _ => return Err(self.err("expected `,` or `}`")),
            }
        }
    }
}

fn at(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

fn number(v: &[String], key: &str, line: usize, col: usize) -> Result<f64, ParseError> {
    match v {
        [x] => x
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| at(line, col, format!("`{key}` must be a number, got `{x}`"))),
        _ => Err(at(line, col, format!("`{key}` takes one value"))),
    }
}

fn integer(v: &[String], key: &str, line: usize, col: usize) -> Result<u64, ParseError> {
    match v {
        [x] => x.parse::<u64>().map_err(|_| {
            at(
                line,
                col,
                format!("`{key}` must be a non-negative integer, got `{x}`"),
            )
        }),
        _ => Err(at(line, col, format!("`{key}` takes one value"))),
    }
}

fn set_weight(
    spec: &mut DesignSpec,
    key: &str,
    v: &[String],
    line: usize,
    col: usize,
) -> Result<bool, ParseError> {
    let slot = match key {
        "alpha" => &mut spec.weights.alpha,
        "beta" => &mut spec.weights.beta,
        "kappa" => &mut spec.weights.kappa,
        _ => return Ok(false),
    };
    *slot = number(v, key, line, col)?;
    Ok(true)
}

fn modification(
    entries: Vec<Entry>,
    line: usize,
    col: usize,
) -> Result<ModificationRecord, ParseError> {
    let mut id = None;
    let mut kind = None;
    let mut actions = Vec::new();
    let mut between = None;
    let mut preconditions = Vec::new();
    let mut cost = 1.0;
    let mut seen = BTreeSet::new();
    for (key, v, l, c) in entries {
        if !seen.insert(key.clone()) {
            return Err(at(l, c, format!("`{key}` given twice")));
        }
        match key.as_str() {
            "id" => match v.as_slice() {
                [x] => id = Some(x.clone()),
                _ => return Err(at(l, c, "`id` takes one value")),
            },
            "kind" => {
                let k = v.join(" ");
                kind = Some(
                    k.parse::<ModificationKind>()
                        .map_err(|k| at(l, c, format!("unknown modification kind `{k}`")))?,
                );
            }
            "action" => actions = v,
            "between" => match v.as_slice() {
                [a, b] => between = Some((a.clone(), b.clone())),
                _ => return Err(at(l, c, "`between` takes two endpoints")),
            },
            "precondition" => preconditions = v,
            "cost" => {
                cost = number(&v, "cost", l, c)?;
                if cost < 0.0 {
                    return Err(at(l, c, "`cost` must be non-negative"));
                }
            }
            other => return Err(at(l, c, format!("unknown modification key `{other}`"))),
        }
    }
    let id = id.ok_or_else(|| at(line, col, "modification without `id`"))?;
    let kind = kind.ok_or_else(|| at(line, col, format!("modification `{id}` without `kind`")))?;
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(at(
                line,
                col,
                format!("`{kind}` modification `{id}` needs `{what}`"),
            ))
        }
    };
    match kind {
        ModificationKind::BlockTransition => need(between.is_some(), "between")?,
        ModificationKind::PruneHumanAction | ModificationKind::PruneBothAction => {
            need(!actions.is_empty(), "action")?
        }
        ModificationKind::AddPreconditionHuman | ModificationKind::AddPreconditionBoth => {
            need(!actions.is_empty(), "action")?;
            need(!preconditions.is_empty(), "precondition")?;
        }
    }
    Ok(ModificationRecord {
        id,
        kind,
        actions,
        between,
        preconditions,
        cost,
    })
}

pub fn parse_design_spec(text: &str) -> Result<DesignSpec, ParseError> {
    let mut cur = Cursor {
        toks: tokenize(text),
        i: 0,
    };
    let mut spec = DesignSpec::default();
    let mut ids = BTreeSet::new();
    while cur.peek().is_some() {
        let (line, col) = (cur.toks[cur.i].1, cur.toks[cur.i].2);
        let key = cur.word()?;
        match key.as_str() {
            "weights" => {
                for (k, v, l, c) in cur.block()? {
                    if !set_weight(&mut spec, &k, &v, l, c)? {
                        return Err(at(l, c, format!("unknown weight `{k}`")));
                    }
                }
            }
            "modification" => {
                let m = modification(cur.block()?, line, col)?;
                if !ids.insert(m.id.clone()) {
                    return Err(at(
                        line,
                        col,
                        format!("duplicate modification id `{}`", m.id),
                    ));
                }
                spec.modifications.push(m);
            }
            _ => {
                cur.expect(Tok::Eq, "`=`")?;
                let v = vec![cur.word()?];
                match key.as_str() {
                    "gamma" => spec.params.gamma = number(&v, &key, line, col)?,
                    "horizon" => {
                        spec.params.horizon = u32::try_from(integer(&v, &key, line, col)?)
                            .map_err(|_| at(line, col, "`horizon` is too large"))?
                    }
                    "time-limit-secs" => {
                        let secs = number(&v, &key, line, col)?;
                        if secs < 0.0 {
                            return Err(at(line, col, "`time-limit-secs` must be non-negative"));
                        }
                        spec.time_limit = Some(Duration::from_secs_f64(secs));
                    }
                    "max-design-size" => {
                        spec.max_design_size = Some(integer(&v, &key, line, col)? as usize)
                    }
                    k if set_weight(&mut spec, k, &v, line, col)? => {}
                    other => return Err(at(line, col, format!("unknown setting `{other}`"))),
                }
            }
        }
    }
    spec.weights
        .validate()
        .and(spec.params.validate())
        .map_err(|e| ParseError::Invalid(e.to_string()))?;
    Ok(spec)
}

pub fn write_design_spec(spec: &DesignSpec) -> String {
    let mut s = String::new();
    let w = &spec.weights;
    let _ = writeln!(
        s,
        "weights {{ alpha = {}, beta = {}, kappa = {} }}",
        w.alpha, w.beta, w.kappa
    );
    let _ = writeln!(s, "gamma = {}", spec.params.gamma);
    let _ = writeln!(s, "horizon = {}", spec.params.horizon);
    if let Some(t) = spec.time_limit {
        let _ = writeln!(s, "time-limit-secs = {}", t.as_secs_f64());
    }
    if let Some(m) = spec.max_design_size {
        let _ = writeln!(s, "max-design-size = {m}");
    }
    for m in &spec.modifications {
        let _ = write!(s, "modification {{ id = {}, kind = {}", m.id, m.kind);
        if !m.actions.is_empty() {
            let _ = write!(s, ", action = {}", m.actions.join(" "));
        }
        if let Some((a, b)) = &m.between {
            let _ = write!(s, ", between = {a} {b}");
        }
        if !m.preconditions.is_empty() {
            let _ = write!(s, ", precondition = {}", m.preconditions.join(" "));
        }
        let _ = writeln!(s, ", cost = {} }}", m.cost);
    }
    s
}
