use crate::syntax::{classify, Context, Formula, Label};

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Caret,
    Tilde,
    Amp,
    Bar,
    Arrow,
    Le,
    Star,
    Plus,
    AtStar,
    AtPlus,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Caret => "^",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::Le => "<=",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::AtStar => "@*",
            Tok::AtPlus => "@+",
            Tok::Ident(_) | Tok::Eof => "",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |a: u8, b: u8| c == a && bytes.get(i + 1) == Some(&b);
        let tok = if two(b'-', b'>') {
            i += 2;
            Tok::Arrow
        } else if two(b'<', b'=') {
            i += 2;
            Tok::Le
        } else if two(b'@', b'*') {
            i += 2;
            Tok::AtStar
        } else if two(b'@', b'+') {
            i += 2;
            Tok::AtPlus
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else {
            i += 1;
            match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b',' => Tok::Comma,
                b'^' => Tok::Caret,
                b'~' => Tok::Tilde,
                b'&' => Tok::Amp,
                b'|' => Tok::Bar,
                b'*' => Tok::Star,
                b'+' => Tok::Plus,
                _ => {
                    // step over the whole UTF-8 scalar so the span stays on a char boundary
                    let ch = text[start..].chars().next().unwrap();
                    let end = start + ch.len_utf8();
                    return Err(ParseError::syntax(
                        SourceSpan::new(start, end),
                        format!("unexpected character `{ch}`"),
                    ));
                }
            }
        };
        out.push((tok, SourceSpan::new(start, i)));
    }
    out.push((Tok::Eof, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

/// Spans mirroring the formula tree, children in `Formula::children` order.
struct Spanned {
    span: SourceSpan,
    kids: Vec<Spanned>,
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

type PResult = Result<(Formula, Spanned), ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&format!("`{}`", want.text())))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::syntax(
            self.span(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn implication(&mut self) -> PResult {
        let (a, sa) = self.comparison()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let (b, sb) = self.implication()?;
            let span = sa.span.join(sb.span);
            return Ok((Formula::implies(a, b), Spanned { span, kids: vec![sa, sb] }));
        }
        Ok((a, sa))
    }

    fn comparison(&mut self) -> PResult {
        let (a, sa) = self.disjunction()?;
        if *self.peek() == Tok::Le {
            self.bump();
            let (b, sb) = self.disjunction()?;
            if *self.peek() == Tok::Le {
                return Err(ParseError::syntax(self.span(), "`<=` does not associate; add parentheses".into()));
            }
            let span = sa.span.join(sb.span);
            return Ok((Formula::prec(a, b), Spanned { span, kids: vec![sa, sb] }));
        }
        Ok((a, sa))
    }

    fn disjunction(&mut self) -> PResult {
        let (mut a, mut sa) = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let (b, sb) = self.conjunction()?;
            let span = sa.span.join(sb.span);
            a = Formula::or(a, b);
            sa = Spanned { span, kids: vec![sa, sb] };
        }
        Ok((a, sa))
    }

    fn conjunction(&mut self) -> PResult {
        let (mut a, mut sa) = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let (b, sb) = self.unary()?;
            let span = sa.span.join(sb.span);
            a = Formula::and(a, b);
            sa = Spanned { span, kids: vec![sa, sb] };
        }
        Ok((a, sa))
    }

    fn unary(&mut self) -> PResult {
        if *self.peek() == Tok::Tilde {
            let start = self.bump().1;
            let (a, sa) = self.unary()?;
            let span = start.join(sa.span);
            return Ok((Formula::not(a), Spanned { span, kids: vec![sa] }));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult {
        let (mut f, mut sf) = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            self.expect(Tok::LBrace)?;
            let labels = self.label_list(Tok::RBrace)?;
            let end = self.expect(Tok::RBrace)?;
            if labels.is_empty() {
                return Err(ParseError::syntax(end, "empty label list".into()));
            }
            for l in labels {
                let span = sf.span.join(end);
                f = f.label(l);
                sf = Spanned { span, kids: vec![sf] };
            }
        }
        Ok((f, sf))
    }

    fn label_list(&mut self, close: Tok) -> Result<Vec<Label>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() == close {
            return Ok(out);
        }
        loop {
            out.push(self.label()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn label(&mut self) -> Result<Label, ParseError> {
        let l = match self.peek() {
            Tok::AtStar => Label::NeighAll,
            Tok::AtPlus => Label::NeighSome,
            Tok::Star => Label::WorldAll,
            Tok::Plus => Label::WorldSome,
            Tok::Ident(name) => Label::var(name),
            _ => return Err(self.unexpected("a label")),
        };
        self.bump();
        Ok(l)
    }

    fn primary(&mut self) -> PResult {
        let span = self.span();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let (f, s) = self.implication()?;
                let end = self.expect(Tok::RParen)?;
                Ok((f, Spanned { span: span.join(end), kids: s.kids }))
            }
            Tok::Ident(name) => {
                self.bump();
                let leaf = |f: Formula, span| Ok((f, Spanned { span, kids: vec![] }));
                match name.as_str() {
                    "Tn" => leaf(Formula::TopN, span),
                    "Fn" => leaf(Formula::BotN, span),
                    "Tw" => leaf(Formula::TopW, span),
                    "Fw" => leaf(Formula::BotW, span),
                    "cont" | "sub" if *self.peek() == Tok::LParen => {
                        self.bump();
                        let var = match self.peek().clone() {
                            Tok::Ident(v) => v,
                            _ => return Err(self.unexpected("a neighbourhood variable")),
                        };
                        self.bump();
                        let end = self.expect(Tok::RParen)?;
                        let f = if name == "cont" { Formula::Cont(var) } else { Formula::Sub(var) };
                        leaf(f, span.join(end))
                    }
                    _ => leaf(Formula::Atom(name), span),
                }
            }
            _ => Err(self.unexpected("a formula")),
        }
    }
}

fn span_at(s: &Spanned, path: &[usize]) -> SourceSpan {
    let mut cur = s;
    for &i in path {
        match cur.kids.get(i) {
            Some(k) => cur = k,
            None => break,
        }
    }
    cur.span
}

/// Parses without the sort check; `<=` is kept as sugar.
pub fn parse_formula_unchecked(text: &str) -> Result<Formula, ParseError> {
    parse_spanned(text).map(|(f, _)| f)
}

fn parse_spanned(text: &str) -> Result<(Formula, Spanned), ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let (f, s) = p.implication()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok((f, s))
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let (f, spans) = parse_spanned(text)?;
    match classify(&f) {
        Ok(_) => Ok(f),
        Err(e) => Err(ParseError::Sort { span: span_at(&spans, &e.path), error: e }),
    }
}

/// `[l1,...,lk]`; the brackets may be omitted.
pub fn parse_context(text: &str) -> Result<Context, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let bracketed = *p.peek() == Tok::LBracket;
    if bracketed {
        p.bump();
    }
    let close = if bracketed { Tok::RBracket } else { Tok::Eof };
    let labels = p.label_list(close.clone())?;
    if bracketed {
        p.expect(Tok::RBracket)?;
    }
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("`,` or end of input"));
    }
    Ok(Context(labels))
}

pub fn parse_label(text: &str) -> Result<Label, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let l = p.label()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(l)
}

// binding strength, loosest first
const IMP: u8 = 1;
const PREC: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;
const ATOM: u8 = 6;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMP,
        Formula::Prec(..) => PREC,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Not(..) => UNARY,
        _ => ATOM,
    }
}

struct Style {
    unicode: bool,
}

impl Style {
    fn label(&self, l: &Label) -> String {
        if !self.unicode {
            return l.token().to_string();
        }
        match l {
            Label::NeighAll => "⊛".into(),
            Label::NeighSome => "⊚".into(),
            Label::WorldAll => "∗".into(),
            Label::WorldSome => "•".into(),
            Label::NeighVar(n) | Label::WorldVar(n) => n.clone(),
        }
    }

    fn render(&self, f: &Formula, out: &mut String) {
        let u = self.unicode;
        match f {
            Formula::Atom(a) => out.push_str(a),
            Formula::TopN => out.push_str(if u { "⊤n" } else { "Tn" }),
            Formula::BotN => out.push_str(if u { "⊥n" } else { "Fn" }),
            Formula::TopW => out.push_str(if u { "⊤w" } else { "Tw" }),
            Formula::BotW => out.push_str(if u { "⊥w" } else { "Fw" }),
            Formula::Cont(n) => {
                if u {
                    out.push('⊐');
                    out.push_str(n);
                } else {
                    out.push_str(&format!("cont({n})"));
                }
            }
            Formula::Sub(n) => {
                if u {
                    out.push('⊏');
                    out.push_str(n);
                } else {
                    out.push_str(&format!("sub({n})"));
                }
            }
            Formula::Not(a) => {
                out.push_str(if u { "¬" } else { "~" });
                self.child(a, UNARY, out);
            }
            Formula::And(a, b) => self.binary(a, b, AND, if u { " ∧ " } else { " & " }, true, out),
            Formula::Or(a, b) => self.binary(a, b, OR, if u { " ∨ " } else { " | " }, true, out),
            Formula::Implies(a, b) => {
                self.child(a, IMP + 1, out);
                out.push_str(if u { " → " } else { " -> " });
                self.child(b, IMP, out);
            }
            Formula::Prec(a, b) => {
                self.child(a, PREC + 1, out);
                out.push_str(if u { " ≼ " } else { " <= " });
                self.child(b, PREC + 1, out);
            }
            Formula::Labeled(..) => {
                let (base, labels) = f.attribute();
                self.child(base, ATOM, out);
                out.push_str("^{");
                let ls: Vec<String> = labels.iter().map(|l| self.label(l)).collect();
                out.push_str(&ls.join(","));
                out.push('}');
            }
        }
    }

    fn binary(&self, a: &Formula, b: &Formula, lv: u8, op: &str, left_assoc: bool, out: &mut String) {
        let (la, lb) = if left_assoc { (lv, lv + 1) } else { (lv + 1, lv) };
        self.child(a, la, out);
        out.push_str(op);
        self.child(b, lb, out);
    }

    /// Renders `f`, parenthesised unless it binds at least as tightly as `min`.
    fn child(&self, f: &Formula, min: u8, out: &mut String) {
        if level(f) >= min {
            self.render(f, out);
        } else {
            out.push('(');
            self.render(f, out);
            out.push(')');
        }
    }
}

pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    Style { unicode: false }.render(f, &mut out);
    out
}

/// Display-only rendering with mathematical symbols; not accepted by the parser.
pub fn render_formula_unicode(f: &Formula) -> String {
    let mut out = String::new();
    Style { unicode: true }.render(f, &mut out);
    out
}

pub fn render_context(c: &Context) -> String {
    c.to_string()
}
