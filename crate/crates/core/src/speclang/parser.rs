use std::collections::HashMap;

use super::lexer::{lex, Tok, Token};
use super::{sort_diagnostics, Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Nat {
    pub value: usize,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpDef {
    pub name: Name,
    pub arity: usize,
    pub values: Vec<Nat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDef {
    pub name: Name,
    pub arity: usize,
    pub domain: Vec<Vec<Nat>>,
    pub values: Vec<Nat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelDef {
    pub name: Name,
    pub arity: usize,
    pub tuples: Vec<Vec<Nat>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraDecl {
    pub name: Name,
    pub size: usize,
    pub labels: Option<Vec<Name>>,
    pub ops: Vec<OpDef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EgoItem {
    Op(OpDef),
    Partial(PartialDef),
    Rel(RelDef),
}

impl EgoItem {
    pub fn name(&self) -> &Name {
        match self {
            EgoItem::Op(o) => &o.name,
            EgoItem::Partial(p) => &p.name,
            EgoItem::Rel(r) => &r.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgoDecl {
    pub name: Name,
    pub over: Name,
    pub items: Vec<EgoItem>,
}

/// A top-level relation on the carrier of an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDecl {
    pub rel: RelDef,
    pub on: Name,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arg {
    Name(Name),
    Key(Name, Nat),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandDecl {
    pub keyword: Name,
    pub args: Vec<Arg>,
    pub expect: Option<Name>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckDecl {
    pub name: Name,
    pub commands: Vec<CommandDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Algebra(AlgebraDecl),
    Ego(EgoDecl),
    Relation(RelationDecl),
    Check(CheckDecl),
}

impl Decl {
    pub fn name(&self) -> &Name {
        match self {
            Decl::Algebra(a) => &a.name,
            Decl::Ego(e) => &e.name,
            Decl::Relation(r) => &r.rel.name,
            Decl::Check(c) => &c.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Decl::Algebra(_) => "algebra",
            Decl::Ego(_) => "ego",
            Decl::Relation(_) => "rel",
            Decl::Check(_) => "check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecDocument {
    pub decls: Vec<Decl>,
}

const DECL_KEYWORDS: [&str; 4] = ["algebra", "check", "ego", "rel"];

/// Parses a whole document. Every problem found is returned, sorted by position.
pub fn parse(text: &str) -> Result<SpecDocument, Vec<Diagnostic>> {
    let (tokens, mut diags) = lex(text);
    let mut p = Parser {
        tokens,
        pos: 0,
        depth: 0,
        diags: Vec::new(),
    };
    let mut doc = SpecDocument::default();
    while p.peek().tok != Tok::Eof {
        let start = p.pos;
        p.depth = 0;
        match p.decl() {
            Ok(d) => doc.decls.push(d),
            Err(()) => p.recover(start),
        }
    }
    diags.append(&mut p.diags);
    check_unique(&doc, &mut diags);
    if diags.is_empty() {
        Ok(doc)
    } else {
        sort_diagnostics(&mut diags);
        Err(diags)
    }
}

fn check_unique(doc: &SpecDocument, diags: &mut Vec<Diagnostic>) {
    let mut seen: HashMap<(&str, &str), Span> = HashMap::new();
    for d in &doc.decls {
        let n = d.name();
        if let Some(&first) = seen.get(&(d.kind(), n.text.as_str())) {
            diags.push(
                Diagnostic::new(n.span, format!("duplicate {} name `{}`", d.kind(), n.text)).related(first),
            );
        } else {
            seen.insert((d.kind(), &n.text), n.span);
        }
    }
}

type PResult<T> = std::result::Result<T, ()>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Brace depth inside the current declaration.
    depth: isize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        match t.tok {
            Tok::Punct('{') => self.depth += 1,
            Tok::Punct('}') => self.depth -= 1,
            Tok::Eof => return t,
            _ => {}
        }
        self.pos += 1;
        t
    }

    fn error<T>(&mut self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        let d = Diagnostic::new(t.span, format!("unexpected {}", t.tok.describe())).expecting(expected);
        self.diags.push(d);
        Err(())
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(x) if x == w)
    }

    fn is_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    fn keyword(&mut self, w: &str) -> PResult<Span> {
        if self.is_word(w) {
            Ok(self.bump().span)
        } else {
            self.error(&[w])
        }
    }

    fn punct(&mut self, c: char) -> PResult<Span> {
        if self.is_punct(c) {
            Ok(self.bump().span)
        } else {
            self.error(&[&format!("`{c}`")])
        }
    }

    fn name(&mut self) -> PResult<Name> {
        match &self.peek().tok {
            Tok::Word(w) if !w.chars().all(|c| c.is_ascii_digit()) => {
                let text = w.clone();
                Ok(Name {
                    text,
                    span: self.bump().span,
                })
            }
            _ => self.error(&["NAME"]),
        }
    }

    /// Labels and verdicts: any word, or a quoted string.
    fn word(&mut self) -> PResult<Name> {
        match &self.peek().tok {
            Tok::Word(w) | Tok::Str(w) => {
                let text = w.clone();
                Ok(Name {
                    text,
                    span: self.bump().span,
                })
            }
            _ => self.error(&["NAME"]),
        }
    }

    fn nat(&mut self) -> PResult<Nat> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Word(w) if w.chars().all(|c| c.is_ascii_digit()) => {
                self.bump();
                match w.parse() {
                    Ok(value) => Ok(Nat { value, span: t.span }),
                    Err(_) => {
                        self.diags.push(Diagnostic::new(t.span, format!("number {w} is too large")));
                        Err(())
                    }
                }
            }
            _ => self.error(&["NAT"]),
        }
    }

    /// Skips to the next declaration keyword at depth 0, or at the start of
    /// a line when braces are unbalanced.
    fn recover(&mut self, start: usize) {
        if self.pos == start {
            self.bump();
        }
        loop {
            let t = self.peek();
            match &t.tok {
                Tok::Eof => return,
                Tok::Word(w)
                    if DECL_KEYWORDS.contains(&w.as_str()) && (self.depth <= 0 || t.span.col == 1) =>
                {
                    return
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn decl(&mut self) -> PResult<Decl> {
        match &self.peek().tok {
            Tok::Word(w) if w == "algebra" => self.algebra().map(Decl::Algebra),
            Tok::Word(w) if w == "ego" => self.ego().map(Decl::Ego),
            Tok::Word(w) if w == "rel" => self.relation().map(Decl::Relation),
            Tok::Word(w) if w == "check" => self.check().map(Decl::Check),
            _ => self.error(&DECL_KEYWORDS),
        }
    }

    /// `NAME "/" NAT`
    fn signature(&mut self) -> PResult<(Name, usize)> {
        let name = self.name()?;
        self.punct('/')?;
        Ok((name, self.nat()?.value))
    }

    /// `"[" NAT+ "]"`
    fn row(&mut self) -> PResult<Vec<Nat>> {
        self.punct('[')?;
        let mut values = Vec::new();
        while !self.is_punct(']') {
            if self.peek().tok == Tok::Eof || self.is_punct('}') {
                return self.error(&["NAT", "`]`"]);
            }
            values.push(self.nat()?);
        }
        self.bump();
        Ok(values)
    }

    /// `"{" ("(" NAT ("," NAT)* ")")* "}"`, commas between tuples optional.
    fn tuples(&mut self, arity: usize) -> PResult<Vec<Vec<Nat>>> {
        self.punct('{')?;
        let mut out = Vec::new();
        while !self.is_punct('}') {
            if !out.is_empty() && self.is_punct(',') {
                self.bump();
            }
            let open = self.punct('(')?;
            let mut t = Vec::new();
            if !self.is_punct(')') {
                t.push(self.nat()?);
                while self.is_punct(',') {
                    self.bump();
                    t.push(self.nat()?);
                }
            }
            self.punct(')')?;
            if t.len() != arity {
                self.diags.push(Diagnostic::new(
                    open,
                    format!("tuple has {} entries, arity is {arity}", t.len()),
                ));
            }
            out.push(t);
        }
        self.bump();
        Ok(out)
    }

    fn opdef(&mut self) -> PResult<OpDef> {
        self.keyword("op")?;
        let (name, arity) = self.signature()?;
        self.punct('=')?;
        let values = self.row()?;
        Ok(OpDef { name, arity, values })
    }

    fn algebra(&mut self) -> PResult<AlgebraDecl> {
        self.keyword("algebra")?;
        let name = self.name()?;
        self.punct('{')?;
        self.keyword("size")?;
        let size = self.nat()?;
        if size.value == 0 {
            self.diags.push(Diagnostic::new(size.span, "carrier must be non-empty"));
        }
        let mut labels = None;
        if self.is_word("labels") {
            self.bump();
            let mut ls = Vec::new();
            while !self.is_word("op") && !self.is_punct('}') {
                if self.peek().tok == Tok::Eof {
                    return self.error(&["NAME", "`}`", "op"]);
                }
                ls.push(self.word()?);
            }
            labels = Some(ls);
        }
        let mut ops: Vec<OpDef> = Vec::new();
        while !self.is_punct('}') {
            if !self.is_word("op") {
                return self.error(&["op", "`}`"]);
            }
            let op = self.opdef()?;
            self.check_table(&op, size.value);
            if let Some(first) = ops.iter().find(|o| o.name.text == op.name.text) {
                self.diags.push(
                    Diagnostic::new(op.name.span, format!("duplicate operation name `{}`", op.name.text))
                        .related(first.name.span),
                );
            }
            ops.push(op);
        }
        self.bump();
        Ok(AlgebraDecl {
            name,
            size: size.value,
            labels,
            ops,
        })
    }

    fn check_table(&mut self, op: &OpDef, size: usize) {
        let cells = u32::try_from(op.arity)
            .ok()
            .and_then(|a| size.checked_pow(a));
        if cells != Some(op.values.len()) {
            let expected = cells.map_or("too many".to_string(), |c| c.to_string());
            self.diags.push(Diagnostic::new(
                op.name.span,
                format!(
                    "operation `{}` has {} values, expected {expected}",
                    op.name.text,
                    op.values.len()
                ),
            ));
        }
        for v in &op.values {
            if v.value >= size {
                self.diags.push(Diagnostic::new(
                    v.span,
                    format!("value {} exceeds carrier {size}", v.value),
                ));
            }
        }
    }

    fn ego(&mut self) -> PResult<EgoDecl> {
        self.keyword("ego")?;
        let name = self.name()?;
        self.keyword("over")?;
        let over = self.name()?;
        self.punct('{')?;
        let mut items: Vec<EgoItem> = Vec::new();
        while !self.is_punct('}') {
            let item = if self.is_word("op") {
                EgoItem::Op(self.opdef()?)
            } else if self.is_word("partial") {
                self.bump();
                let (name, arity) = self.signature()?;
                self.keyword("dom")?;
                let domain = self.tuples(arity)?;
                self.punct('=')?;
                let values = self.row()?;
                if values.len() != domain.len() {
                    self.diags.push(Diagnostic::new(
                        name.span,
                        format!(
                            "partial operation `{}` has {} values for {} domain tuples",
                            name.text,
                            values.len(),
                            domain.len()
                        ),
                    ));
                }
                EgoItem::Partial(PartialDef {
                    name,
                    arity,
                    domain,
                    values,
                })
            } else if self.is_word("rel") {
                self.bump();
                let (name, arity) = self.signature()?;
                self.punct('=')?;
                let tuples = self.tuples(arity)?;
                EgoItem::Rel(RelDef { name, arity, tuples })
            } else {
                return self.error(&["op", "partial", "rel", "`}`"]);
            };
            if let Some(first) = items.iter().find(|i| i.name().text == item.name().text) {
                self.diags.push(
                    Diagnostic::new(item.name().span, format!("duplicate symbol name `{}`", item.name().text))
                        .related(first.name().span),
                );
            }
            items.push(item);
        }
        self.bump();
        Ok(EgoDecl { name, over, items })
    }

    fn relation(&mut self) -> PResult<RelationDecl> {
        self.keyword("rel")?;
        let (name, arity) = self.signature()?;
        self.keyword("on")?;
        let on = self.name()?;
        self.punct('=')?;
        let tuples = self.tuples(arity)?;
        Ok(RelationDecl {
            rel: RelDef { name, arity, tuples },
            on,
        })
    }

    fn check(&mut self) -> PResult<CheckDecl> {
        self.keyword("check")?;
        let name = self.name()?;
        self.punct('{')?;
        let mut commands = Vec::new();
        while !self.is_punct('}') {
            commands.push(self.command()?);
        }
        if commands.is_empty() {
            return self.error(super::COMMANDS);
        }
        self.bump();
        Ok(CheckDecl { name, commands })
    }

    /// `KEYWORD arg* ("expect" VERDICT)? ";"` with `arg := NAME | NAME "=" NAT`.
    fn command(&mut self) -> PResult<CommandDecl> {
        let keyword = match &self.peek().tok {
            Tok::Word(w) if super::COMMANDS.contains(&w.as_str()) => self.name()?,
            _ => return self.error(super::COMMANDS),
        };
        let mut args = Vec::new();
        let mut expect = None;
        loop {
            if self.is_punct(';') {
                self.bump();
                break;
            }
            if self.is_word("expect") && expect.is_none() {
                self.bump();
                expect = Some(self.word()?);
                continue;
            }
            if expect.is_some() || !matches!(self.peek().tok, Tok::Word(_)) {
                return self.error(&["NAME", "`;`", "expect"]);
            }
            let arg = self.word()?;
            if self.is_punct('=') {
                self.bump();
                args.push(Arg::Key(arg, self.nat()?));
            } else {
                args.push(Arg::Name(arg));
            }
        }
        Ok(CommandDecl {
            keyword,
            args,
            expect,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "algebra two {\n  size 2\n  op join/2 = [0 1 1 1]\n}\n";

    #[test]
    fn minimal_algebra() {
        let doc = parse(TWO).unwrap();
        assert_eq!(doc.decls.len(), 1);
        let Decl::Algebra(a) = &doc.decls[0] else { panic!() };
        assert_eq!(a.size, 2);
        assert_eq!(a.ops[0].arity, 2);
        assert_eq!(a.name.span, Span { line: 1, col: 9 });
    }

    #[test]
    fn out_of_range_value() {
        let d = parse("algebra three {\n  size 3\n  op u/1 = [0 3 1]\n}").unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].message, "value 3 exceeds carrier 3");
        assert_eq!(d[0].span, Span { line: 3, col: 15 });
    }

    #[test]
    fn duplicate_names_carry_both_spans() {
        let d = parse(&format!("{TWO}{TWO}")).unwrap_err();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].span.line, 5);
        assert_eq!(d[0].related, Some(Span { line: 1, col: 9 }));
        assert!(d[0].to_string().contains("first defined at 1:9"));
    }

    #[test]
    fn recovery_reports_every_broken_declaration() {
        let text = "algebra a { size }\nego e over a { bogus }\nalgebra ok { size 1 }\nrel r/1 on ok = {(0)}\n";
        let d = parse(text).unwrap_err();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].span, Span { line: 1, col: 18 });
        assert_eq!(d[0].expected, vec!["NAT"]);
        assert_eq!(d[1].span.line, 2);
        assert_eq!(d[1].expected, vec!["`}`", "op", "partial", "rel"]);
    }

    #[test]
    fn unclosed_block_recovers_at_line_start() {
        let text = "algebra a { size 2\n  op f/1 = [0 1]\nalgebra b { size 1 }\nfoo\n";
        let d = parse(text).unwrap_err();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].span, Span { line: 3, col: 1 });
        assert_eq!(d[1].span, Span { line: 4, col: 1 });
        assert_eq!(d[1].expected, vec!["algebra", "check", "ego", "rel"]);
    }

    #[test]
    fn ego_relation_and_check() {
        let text = "ego t over two {\n op f/1 = [0 0]\n partial s/2 dom {(0,0) (1,1)} = [0 1]\n rel le/2 = {(0,0),(0,1),(1,1)}\n}\n\
                    rel d/2 on two = {(0,0) (1,1)}\n\
                    check c {\n duality two t expect iso;\n fullness t power=2 expect \"iso\";\n}\n";
        let doc = parse(text).unwrap();
        let Decl::Ego(e) = &doc.decls[0] else { panic!() };
        assert_eq!(e.items.len(), 3);
        let Decl::Check(c) = &doc.decls[2] else { panic!() };
        assert_eq!(c.commands.len(), 2);
        assert!(matches!(&c.commands[1].args[1], Arg::Key(k, n) if k.text == "power" && n.value == 2));
        assert_eq!(c.commands[1].expect.as_ref().unwrap().text, "iso");
    }

    #[test]
    fn tuple_arity_and_unknown_command() {
        let d = parse("rel r/2 on a = {(0,1,2)}\ncheck c { frobnicate x; }").unwrap_err();
        assert_eq!(d.len(), 2);
        assert!(d[0].message.contains("arity is 2"));
        assert!(d[1].expected.contains(&"duality".to_string()));
    }
}
