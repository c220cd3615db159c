use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Lower(String),
    Upper(String),
    Backslash,
    Arrow,
    Bar,
    BarBar,
    AmpAmp,
    Bang,
    FatArrow,
    Eq,
    Underscore,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Case,
    Of,
    Let,
    In,
    Where,
    Data,
    Prop,
    Fair,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Lower(x) | Tok::Upper(x) => return write!(f, "`{x}`"),
            Tok::Backslash => "`\\`",
            Tok::Arrow => "`->`",
            Tok::Bar => "`|`",
            Tok::BarBar => "`||`",
            Tok::AmpAmp => "`&&`",
            Tok::Bang => "`!`",
            Tok::FatArrow => "`=>`",
            Tok::Eq => "`=`",
            Tok::Underscore => "`_`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::Semi => "`;`",
            Tok::Case => "`case`",
            Tok::Of => "`of`",
            Tok::Let => "`let`",
            Tok::In => "`in`",
            Tok::Where => "`where`",
            Tok::Data => "`data`",
            Tok::Prop => "`prop`",
            Tok::Fair => "`fair`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn lex(src: &str) -> Result<Vec<Token>, (Pos, String)> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let two = |t: Tok| Some((t, 2));
        let one = |t: Tok| Some((t, 1));
        let punct = match (c, next) {
            ('-', Some('>')) => two(Tok::Arrow),
            ('=', Some('>')) => two(Tok::FatArrow),
            ('|', Some('|')) => two(Tok::BarBar),
            ('&', Some('&')) => two(Tok::AmpAmp),
            ('\\', _) => one(Tok::Backslash),
            ('|', _) => one(Tok::Bar),
            ('!', _) => one(Tok::Bang),
            ('=', _) => one(Tok::Eq),
            ('(', _) => one(Tok::LParen),
            (')', _) => one(Tok::RParen),
            ('{', _) => one(Tok::LBrace),
            ('}', _) => one(Tok::RBrace),
            (',', _) => one(Tok::Comma),
            (':', _) => one(Tok::Colon),
            (';', _) => one(Tok::Semi),
            ('_', n) if !n.is_some_and(is_ident_char) => one(Tok::Underscore),
            _ => None,
        };
        if let Some((tok, n)) = punct {
            for _ in 0..n {
                bump!();
            }
            out.push(Token { tok, pos });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "case" => Tok::Case,
                "of" => Tok::Of,
                "let" => Tok::Let,
                "in" => Tok::In,
                "where" => Tok::Where,
                "data" => Tok::Data,
                "prop" => Tok::Prop,
                "fair" => Tok::Fair,
                _ if c.is_uppercase() => Tok::Upper(word),
                _ => Tok::Lower(word),
            };
            out.push(Token { tok, pos });
            continue;
        }
        return Err((pos, format!("lexical error: unexpected character {c:?}")));
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}
