//! Symbolic coding of orbits against tower partitions, and word files.
//!
//! Text words hold one symbol per line after a `# alphabet` header: a level
//! number, the literal `OUTSIDE`, or `left,right` for product words. Binary
//! words are a little-endian `u32` alphabet size, a `u64` length and the
//! symbols at a fixed width of 1, 2 or 4 bytes.

use std::fmt::Write as _;
use std::io::{Read, Write};

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::orbit::{OrbitState, RankOne, TowerLevel};

pub const OUTSIDE: &str = "OUTSIDE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// Levels `0..height`, with `height` itself standing for outside.
    Tower {
        height: u32,
    },
    /// Pairs of tower symbols, coded `left * (right + 1) + right_symbol`.
    Product {
        left: u32,
        right: u32,
    },
    Plain {
        size: u32,
    },
}

impl Alphabet {
    pub fn size(&self) -> u64 {
        match *self {
            Alphabet::Tower { height } => height as u64 + 1,
            Alphabet::Product { left, right } => (left as u64 + 1) * (right as u64 + 1),
            Alphabet::Plain { size } => size as u64,
        }
    }

    fn header(&self) -> String {
        match *self {
            Alphabet::Tower { height } => format!("# alphabet tower {height}"),
            Alphabet::Product { left, right } => format!("# alphabet product {left} {right}"),
            Alphabet::Plain { size } => format!("# alphabet plain {size}"),
        }
    }

    fn parse_header(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| Error::input(format!("bad alphabet header {line:?}")))
        };
        match parts.as_slice() {
            ["#", "alphabet", "tower", h] => Ok(Alphabet::Tower { height: num(h)? }),
            ["#", "alphabet", "product", l, r] => Ok(Alphabet::Product {
                left: num(l)?,
                right: num(r)?,
            }),
            ["#", "alphabet", "plain", s] => Ok(Alphabet::Plain { size: num(s)? }),
            _ => Err(Error::input(format!("bad alphabet header {line:?}"))),
        }
    }

    fn byte_width(&self) -> usize {
        match self.size() {
            0..=256 => 1,
            257..=65536 => 2,
            _ => 4,
        }
    }
}

fn tower_symbol(height: u32, s: u32) -> String {
    if s == height {
        OUTSIDE.to_string()
    } else {
        s.to_string()
    }
}

fn parse_tower_symbol(height: u32, s: &str) -> Result<u32> {
    let s = s.trim();
    if s == OUTSIDE {
        return Ok(height);
    }
    let v: u32 = s
        .parse()
        .map_err(|_| Error::input(format!("bad symbol {s:?}")))?;
    if v >= height {
        return Err(Error::input(format!(
            "level {v} outside tower of height {height}"
        )));
    }
    Ok(v)
}

/// A finite word over a tower, product or plain alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolWord {
    pub alphabet: Alphabet,
    pub symbols: Vec<u32>,
}

impl SymbolWord {
    pub fn new(alphabet: Alphabet, symbols: Vec<u32>) -> Result<Self> {
        let size = alphabet.size();
        if let Some(bad) = symbols.iter().find(|&&s| s as u64 >= size) {
            return Err(Error::input(format!(
                "symbol {bad} outside alphabet of size {size}"
            )));
        }
        Ok(SymbolWord { alphabet, symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn prefix(&self, n: usize) -> SymbolWord {
        SymbolWord {
            alphabet: self.alphabet,
            symbols: self.symbols[..n.min(self.symbols.len())].to_vec(),
        }
    }

    /// Zip of two tower words.
    pub fn product(left: &SymbolWord, right: &SymbolWord) -> Result<SymbolWord> {
        let (Alphabet::Tower { height: hl }, Alphabet::Tower { height: hr }) =
            (left.alphabet, right.alphabet)
        else {
            return Err(Error::domain(
                "product words need tower alphabets on both sides",
            ));
        };
        if left.len() != right.len() {
            return Err(Error::domain("product of words of different lengths"));
        }
        let alphabet = Alphabet::Product {
            left: hl,
            right: hr,
        };
        if alphabet.size() > u32::MAX as u64 {
            return Err(Error::domain("product alphabet exceeds u32 symbols"));
        }
        let symbols = left
            .symbols
            .iter()
            .zip(&right.symbols)
            .map(|(&a, &b)| a * (hr + 1) + b)
            .collect();
        Ok(SymbolWord { alphabet, symbols })
    }

    /// Splits a product word back into its two tower words.
    pub fn unzip(&self) -> Result<(SymbolWord, SymbolWord)> {
        let Alphabet::Product { left, right } = self.alphabet else {
            return Err(Error::domain("not a product word"));
        };
        let l = self.symbols.iter().map(|s| s / (right + 1)).collect();
        let r = self.symbols.iter().map(|s| s % (right + 1)).collect();
        Ok((
            SymbolWord {
                alphabet: Alphabet::Tower { height: left },
                symbols: l,
            },
            SymbolWord {
                alphabet: Alphabet::Tower { height: right },
                symbols: r,
            },
        ))
    }

    fn render_symbol(&self, s: u32) -> String {
        match self.alphabet {
            Alphabet::Tower { height } => tower_symbol(height, s),
            Alphabet::Product { left, right } => {
                format!(
                    "{},{}",
                    tower_symbol(left, s / (right + 1)),
                    tower_symbol(right, s % (right + 1))
                )
            }
            Alphabet::Plain { .. } => s.to_string(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.symbols.len() * 6 + 32);
        out.push_str(&self.alphabet.header());
        out.push('\n');
        for &s in &self.symbols {
            let _ = writeln!(out, "{}", self.render_symbol(s));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::input("empty word file"))?;
        let alphabet = Alphabet::parse_header(header.trim())?;
        let mut symbols = Vec::new();
        for line in lines {
            let s = match alphabet {
                Alphabet::Tower { height } => parse_tower_symbol(height, line)?,
                Alphabet::Product { left, right } => {
                    let (a, b) = line
                        .split_once(',')
                        .ok_or_else(|| Error::input(format!("bad product symbol {line:?}")))?;
                    parse_tower_symbol(left, a)? * (right + 1) + parse_tower_symbol(right, b)?
                }
                Alphabet::Plain { size } => {
                    let v: u32 = line
                        .trim()
                        .parse()
                        .map_err(|_| Error::input(format!("bad symbol {line:?}")))?;
                    if v >= size {
                        return Err(Error::input(format!(
                            "symbol {v} outside plain alphabet {size}"
                        )));
                    }
                    v
                }
            };
            symbols.push(s);
        }
        Ok(SymbolWord { alphabet, symbols })
    }

    /// Packed binary framing. Reading it back yields a plain alphabet.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let size = u32::try_from(self.alphabet.size())
            .map_err(|_| Error::domain("alphabet too large for u32 framing"))?;
        w.write_all(&size.to_le_bytes())?;
        w.write_all(&(self.symbols.len() as u64).to_le_bytes())?;
        let width = self.alphabet.byte_width();
        let mut buf = Vec::with_capacity(self.symbols.len() * width);
        for &s in &self.symbols {
            buf.extend_from_slice(&s.to_le_bytes()[..width]);
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 12];
        r.read_exact(&mut head)
            .map_err(|_| Error::input("truncated binary word header"))?;
        let size = u32::from_le_bytes(head[..4].try_into().unwrap());
        let len = u64::from_le_bytes(head[4..].try_into().unwrap());
        let alphabet = Alphabet::Plain { size };
        let width = alphabet.byte_width();
        let len = usize::try_from(len).map_err(|_| Error::input("word length overflows usize"))?;
        let mut body = Vec::new();
        r.read_to_end(&mut body)?;
        if body.len() != len * width {
            return Err(Error::input(format!(
                "binary word body has {} bytes, expected {}",
                body.len(),
                len * width
            )));
        }
        let symbols = body
            .chunks_exact(width)
            .map(|c| {
                let mut b = [0u8; 4];
                b[..width].copy_from_slice(c);
                u32::from_le_bytes(b)
            })
            .collect();
        SymbolWord::new(alphabet, symbols)
    }
}

impl RankOne {
    /// Height of `T_n` as a symbol bound.
    pub fn symbol_height(&self, n: usize) -> Result<u32> {
        let h = self.height(n);
        h.to_u32()
            .filter(|&h| h < u32::MAX)
            .ok_or_else(|| Error::domain(format!("T_{n} has {h} levels, too many for u32 symbols")))
    }

    /// Symbol of a state for the stage-`n` partition.
    pub fn symbol(&self, st: &OrbitState, n: usize) -> Result<u32> {
        let height = self.symbol_height(n)?;
        Ok(match self.level_in_tower(st, n)? {
            TowerLevel::Level(l) => l.to_u32().expect("level below height"),
            TowerLevel::Outside => height,
        })
    }

    /// Word `x_0..x_{len-1}` of the orbit of `st` for the stage-`n` partition.
    pub fn code_orbit(&self, st: &OrbitState, n: usize, len: usize) -> Result<SymbolWord> {
        let height = self.symbol_height(n)?;
        let mut cur = st.clone();
        let mut symbols = Vec::with_capacity(len);
        for t in 0..len {
            symbols.push(self.symbol(&cur, n)?);
            if t + 1 < len {
                self.step(&mut cur)?;
            }
        }
        Ok(SymbolWord {
            alphabet: Alphabet::Tower { height },
            symbols,
        })
    }
}

/// Word of the product orbit of `(x, y)` for the partition into pairs of stage-`n` levels.
pub fn code_product_orbit(
    left: &RankOne,
    right: &RankOne,
    x: &OrbitState,
    y: &OrbitState,
    n: usize,
    len: usize,
) -> Result<SymbolWord> {
    let a = left.code_orbit(x, n, len)?;
    let b = right.code_orbit(y, n, len)?;
    SymbolWord::product(&a, &b)
}
