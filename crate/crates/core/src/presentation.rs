//! One-relator group presentations `< a, b | a b a^-1 = b^3 >`.
//!
//! Grammar (whitespace is insignificant between tokens):
//!
//! ```text
//! presentation := "<" gens "|" rel ">"
//! gens         := ident {"," ident}
//! rel          := word ["=" word]
//! word         := letter {letter}
//! letter       := ident ["^" int]
//! ident        := [A-Za-z][A-Za-z0-9_]*
//! int          := nonzero signed decimal
//! ```
//!
//! A torsion-free one-relator group has the presentation complex (one
//! vertex, an edge per generator, one 2-cell) as a classifying space, so its
//! homology is read off the exponent-sum map `Z -> Z^m`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::abelian::{cokernel_tagged, kernel, FgAbGroup, GroupHom, IntMatrix};
use crate::error::{Error, Result};
use crate::pv::{Home, KClassLedger, LedgerEntry, OrderNote};

/// Symbol of the basepoint class in `K_0(BG)`.
pub const BASEPOINT: &str = "[pt]";
/// Name of the 2-cell generator in `H_2`.
pub const TWO_CELL: &str = "[r]";

/// A freely reduced word: `(generator index, nonzero exponent)` runs with
/// distinct adjacent generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<(usize, i64)>,
}

impl Word {
    pub fn new(letters: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut w = Word::default();
        for (g, e) in letters {
            w.push(g, e);
        }
        w
    }

    fn push(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        match self.letters.last_mut() {
            Some((h, f)) if *h == g => {
                *f += e;
                if *f == 0 {
                    self.letters.pop();
                }
            }
            _ => self.letters.push((g, e)),
        }
    }

    pub fn letters(&self) -> &[(usize, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word::new(self.letters.iter().rev().map(|&(g, e)| (g, -e)))
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.letters.iter().chain(&other.letters).copied())
    }

    /// Rotates the first run to the end.
    pub fn rotate(&self) -> Word {
        match self.letters.split_first() {
            Some((&first, rest)) => Word::new(rest.iter().copied().chain([first])),
            None => Word::default(),
        }
    }

    /// Cyclic reduction: conjugates away matching first and last runs.
    pub fn cyclically_reduced(&self) -> Word {
        let mut l = self.letters.clone();
        while l.len() >= 2 && l[0].0 == l[l.len() - 1].0 {
            let (_, e) = l.pop().expect("len >= 2");
            l[0].1 += e;
            if l[0].1 == 0 {
                l.remove(0);
            }
        }
        Word { letters: l }
    }

    /// Largest `k` with `self` cyclically conjugate to `w^k`.
    pub fn root_exponent(&self) -> usize {
        let l = self.cyclically_reduced().letters;
        match l.len() {
            0 => 0,
            1 => l[0].1.unsigned_abs() as usize,
            len => (1..len)
                .find(|&p| len % p == 0 && (p..len).all(|i| l[i] == l[i - p]))
                .map_or(1, |p| len / p),
        }
    }

    pub fn exponent_sums(&self, ngens: usize) -> Vec<i64> {
        let mut v = vec![0; ngens];
        for &(g, e) in &self.letters {
            v[g] += e;
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Presentation {
    generators: Vec<String>,
    relator: Word,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relator: Word) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                message: "at least one generator is required".into(),
            });
        }
        for (i, g) in generators.iter().enumerate() {
            if !is_ident(g) {
                return Err(Error::Parse {
                    pos: 0,
                    message: format!("`{g}` is not an identifier"),
                });
            }
            if generators[..i].contains(g) {
                return Err(Error::Parse {
                    pos: 0,
                    message: format!("generator `{g}` declared twice"),
                });
            }
        }
        if let Some(&(g, _)) = relator.letters.iter().find(|(g, _)| *g >= generators.len()) {
            return Err(Error::UndeclaredGenerator {
                name: format!("#{g}"),
                pos: 0,
            });
        }
        if relator.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                message: "relator reduces to the identity".into(),
            });
        }
        Ok(Presentation {
            generators,
            relator,
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relator(&self) -> &Word {
        &self.relator
    }

    pub fn with_relator(&self, relator: Word) -> Result<Self> {
        Presentation::new(self.generators.clone(), relator)
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< {} | ", self.generators.join(", "))?;
        let letters: Vec<String> = self
            .relator
            .letters
            .iter()
            .map(|&(g, e)| match e {
                1 => self.generators[g].clone(),
                e => format!("{}^{e}", self.generators[g]),
            })
            .collect();
        write!(f, "{} >", letters.join(" "))
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lt,
    Gt,
    Bar,
    Comma,
    Eq,
    Caret,
    Ident(String),
    Int(String),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let simple = match c {
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            '|' => Some(Tok::Bar),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((start, t));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if c == '-' || c == '+' || c.is_ascii_digit() {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Int(text[start..i].to_string())));
        } else {
            return Err(Error::Parse {
                pos: start,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    gens: Vec<String>,
    _text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.i += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<(usize, String)> {
        match self.toks.get(self.i) {
            Some((p, Tok::Ident(s))) => {
                let out = (*p, s.clone());
                self.i += 1;
                Ok(out)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = Word::default();
        loop {
            let (pos, name) = self.ident()?;
            let g = self
                .gens
                .iter()
                .position(|x| *x == name)
                .ok_or(Error::UndeclaredGenerator { name, pos })?;
            let mut e = 1i64;
            if self.peek() == Some(&Tok::Caret) {
                self.i += 1;
                let p = self.pos();
                match self.toks.get(self.i) {
                    Some((_, Tok::Int(s))) => {
                        e = s.parse().map_err(|_| Error::Parse {
                            pos: p,
                            message: format!("`{s}` is not a valid exponent"),
                        })?;
                        if e == 0 {
                            return Err(Error::Parse {
                                pos: p,
                                message: "exponent must be nonzero".into(),
                            });
                        }
                        self.i += 1;
                    }
                    _ => return self.err("expected an exponent after `^`"),
                }
            }
            w.push(g, e);
            if !matches!(self.peek(), Some(Tok::Ident(_))) {
                return Ok(w);
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Presentation> {
    let mut p = Parser {
        toks: lex(text)?,
        i: 0,
        end: text.len(),
        gens: Vec::new(),
        _text: text,
    };
    p.expect(Tok::Lt, "`<`")?;
    loop {
        let (pos, g) = p.ident()?;
        if p.gens.contains(&g) {
            return Err(Error::Parse {
                pos,
                message: format!("generator `{g}` declared twice"),
            });
        }
        p.gens.push(g);
        if p.peek() == Some(&Tok::Comma) {
            p.i += 1;
        } else {
            break;
        }
    }
    p.expect(Tok::Bar, "`|` or `,`")?;
    let rel_pos = p.pos();
    let lhs = p.word()?;
    let rel = if p.peek() == Some(&Tok::Eq) {
        p.i += 1;
        lhs.concat(&p.word()?.inverse())
    } else {
        lhs
    };
    if p.peek() == Some(&Tok::Comma) {
        return p.err("only one relator is supported");
    }
    p.expect(Tok::Gt, "`>`")?;
    if p.i != p.toks.len() {
        return p.err("trailing input after `>`");
    }
    if rel.is_empty() {
        return Err(Error::Parse {
            pos: rel_pos,
            message: "relator reduces to the identity".into(),
        });
    }
    Presentation::new(p.gens, rel)
}

/// `< a, b | a b a^-1 = b^n >`, i.e. relator `a b a^-1 b^-n`.
pub fn bs_presentation(n: i64) -> Result<Presentation> {
    if n == 0 {
        return Err(Error::Domain("BS(1,n) requires n ≠ 0".into()));
    }
    Presentation::new(
        vec!["a".into(), "b".into()],
        Word::new([(0, 1), (1, 1), (0, -1), (1, -n)]),
    )
}

/// Exponent sum of each generator in the relator.
pub fn exponent_vector(p: &Presentation) -> Vec<i64> {
    p.relator.exponent_sums(p.generators.len())
}

/// The boundary `C_2 = Z -> C_1 = Z^m` of the presentation complex.
fn exponent_map(p: &Presentation) -> GroupHom {
    let cell = FgAbGroup::free(&[TWO_CELL]);
    let names: Vec<&str> = p.generators.iter().map(String::as_str).collect();
    let edges = FgAbGroup::free(&names);
    let col: Vec<Vec<i64>> = exponent_vector(p).into_iter().map(|e| vec![e]).collect();
    let m = IntMatrix::from_rows(&col, 1).expect("column vector");
    GroupHom::new(cell, edges, m).expect("free source")
}

/// `G^ab`, the cokernel of the exponent map, with generators named after the
/// presentation's generators; also returns the projection from `Z^m`.
fn abelianization_with_map(p: &Presentation) -> Result<(FgAbGroup, GroupHom)> {
    let (g, proj, _) = cokernel_tagged(&exponent_map(p), "")?;
    Ok((g, proj))
}

pub fn abelianization(p: &Presentation) -> Result<FgAbGroup> {
    Ok(abelianization_with_map(p)?.0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexHomology {
    pub h0: FgAbGroup,
    pub h1: FgAbGroup,
    pub h2: FgAbGroup,
    pub basepoint_gen: String,
}

/// Homology of the presentation complex, valid as group homology when the
/// relator is not a proper power.
pub fn presentation_homology(p: &Presentation) -> Result<ComplexHomology> {
    let k = p.relator.root_exponent();
    if k >= 2 {
        return Err(Error::ProperPowerRelator { exponent: k });
    }
    let h0 = FgAbGroup::free(&[BASEPOINT]);
    let h1 = abelianization(p)?;
    let (h2, _) = kernel(&exponent_map(p))?;
    Ok(ComplexHomology {
        h0,
        h1,
        h2,
        basepoint_gen: BASEPOINT.to_string(),
    })
}

/// K-homology of the 2-dimensional classifying space:
/// `K_0 = H_0 + H_2`, `K_1 = H_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifyingSpaceK {
    pub k0: FgAbGroup,
    pub k1: FgAbGroup,
    /// `[pt]` in `k0`; each group generator's class in `k1`.
    pub ledger: KClassLedger,
}

pub fn classifying_space_k(p: &Presentation) -> Result<ClassifyingSpaceK> {
    let h = presentation_homology(p)?;
    let mut names = vec![h.basepoint_gen.clone()];
    names.extend(h.h2.gen_names().iter().cloned());
    let k0 = FgAbGroup::new(1 + h.h2.free_rank(), Vec::new(), names)?;
    let (k1, proj) = abelianization_with_map(p)?;

    let mut ledger = KClassLedger::new();
    let mut pt = vec![BigInt::zero(); k0.ngens()];
    pt[0] = BigInt::one();
    ledger.insert_entry(
        BASEPOINT,
        LedgerEntry {
            home: Home::K0,
            order: OrderNote::Exact(k0.element_order(&pt)?),
            coords: Some(pt),
            note: Some("inclusion of a base point".into()),
        },
    );
    for (j, g) in p.generators.iter().enumerate() {
        let coords = proj.matrix().column(j);
        ledger.insert_entry(
            g,
            LedgerEntry {
                home: Home::K1,
                order: OrderNote::Exact(k1.element_order(&coords)?),
                coords: Some(coords),
                note: Some("class of the generator in H_1 = G^ab".into()),
            },
        );
    }
    Ok(ClassifyingSpaceK { k0, k1, ledger })
}
