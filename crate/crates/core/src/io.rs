//! Line-oriented text formats for instances, matchings, PIT graphs and
//! partitions.
//!
//! Every format starts with a header line, ids are 0-based, and `#` starts a
//! comment that runs to the end of the line. Serialization is canonical:
//! body lines are sorted, so `serialize(parse(text))` is stable.
//!
//! ```text
//! 3dsras v1
//! n 3
//! mode binary-symmetric
//! e 0 1
//! e 1 2
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hardness::PitInstance;
use crate::model::{AgentId, Instance, Matching, Mode, Triple};

pub const INSTANCE_HEADER: &str = "3dsras v1";
pub const MATCHING_HEADER: &str = "3dsras-matching v1";
pub const PIT_HEADER: &str = "pit v1";
pub const PARTITION_HEADER: &str = "pit-partition v1";

/// Largest instance the parser accepts; the valuation table is dense.
pub const MAX_AGENTS: usize = 20_000;

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let body = line.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        (!words.is_empty()).then_some((k + 1, words))
    })
}

struct Lines<'a, I: Iterator<Item = (usize, Vec<&'a str>)>> {
    inner: I,
    last: usize,
}

impl<'a, I: Iterator<Item = (usize, Vec<&'a str>)>> Lines<'a, I> {
    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.inner.next() {
            Some((line, words)) => {
                self.last = line;
                Ok((line, words))
            }
            None => Err(Error::parse(self.last + 1, format!("missing {what}"))),
        }
    }

    fn header(&mut self, header: &str) -> Result<()> {
        let (line, words) = self.expect("header")?;
        if words.join(" ") != header {
            return Err(Error::parse(line, format!("expected header `{header}`")));
        }
        Ok(())
    }

    fn keyed<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let (line, words) = self.expect(&format!("`{key}` line"))?;
        match words.as_slice() {
            [k, v] if *k == key => v
                .parse()
                .map_err(|_| Error::parse(line, format!("bad value `{v}` for `{key}`"))),
            _ => Err(Error::parse(line, format!("expected `{key} <value>`"))),
        }
    }
}

fn lines(text: &str) -> Lines<'_, impl Iterator<Item = (usize, Vec<&str>)>> {
    Lines {
        inner: content_lines(text),
        last: 0,
    }
}

fn number<T: FromStr>(line: usize, word: &str) -> Result<T> {
    word.parse()
        .map_err(|_| Error::parse(line, format!("`{word}` is not a valid number")))
}

fn agent(line: usize, word: &str, n: usize) -> Result<AgentId> {
    let id: AgentId = number(line, word)?;
    if id >= n {
        return Err(Error::parse(line, format!("id {id} out of range for n = {n}")));
    }
    Ok(id)
}

fn with_comments(comments: &[String], header: &str) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str(header);
    out.push('\n');
    out
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut it = lines(text);
    it.header(INSTANCE_HEADER)?;
    let n: usize = it.keyed("n")?;
    if n > MAX_AGENTS {
        return Err(Error::parse(it.last, format!("n = {n} exceeds the limit of {MAX_AGENTS}")));
    }
    let mode: String = it.keyed("mode")?;
    let mode = Mode::from_str(&mode).map_err(|e| Error::parse(it.last, e))?;

    let mut val = vec![0i32; n * n];
    let mut seen = BTreeSet::new();
    for (line, words) in it.inner {
        let (i, j, v) = match (words.as_slice(), mode) {
            (["e", i, j], Mode::BinarySymmetric) => (agent(line, i, n)?, agent(line, j, n)?, 1),
            (["a", i, j, v], Mode::Binary | Mode::General) => {
                (agent(line, i, n)?, agent(line, j, n)?, number::<i32>(line, v)?)
            }
            (["e", ..], _) => {
                return Err(Error::parse(line, format!("`e` lines require binary-symmetric mode, got {mode}")))
            }
            (["a", ..], Mode::BinarySymmetric) => {
                return Err(Error::parse(line, "`a` lines are not allowed in binary-symmetric mode"))
            }
            _ => return Err(Error::parse(line, format!("unrecognised line `{}`", words.join(" ")))),
        };
        if i == j {
            return Err(Error::parse(line, format!("self-valuation of agent {i}")));
        }
        if v == 0 {
            return Err(Error::parse(line, "zero-valued arcs are implicit"));
        }
        if mode == Mode::Binary && v != 1 {
            return Err(Error::parse(line, format!("value {v} in binary mode")));
        }
        let key = if mode == Mode::BinarySymmetric { (i.min(j), i.max(j)) } else { (i, j) };
        if !seen.insert(key) {
            return Err(Error::parse(line, format!("duplicate entry for ({i}, {j})")));
        }
        val[i * n + j] = v;
        if mode == Mode::BinarySymmetric {
            val[j * n + i] = v;
        }
    }
    Instance::from_table(n, mode, val)
}

pub fn serialize_instance(inst: &Instance) -> String {
    serialize_instance_with_comments(inst, &[])
}

/// As [`serialize_instance`], with leading `# ` comment lines.
pub fn serialize_instance_with_comments(inst: &Instance, comments: &[String]) -> String {
    let mut out = with_comments(comments, INSTANCE_HEADER);
    let _ = writeln!(out, "n {}", inst.n());
    let _ = writeln!(out, "mode {}", inst.mode());
    if inst.mode() == Mode::BinarySymmetric {
        for (a, b) in inst.edges() {
            let _ = writeln!(out, "e {a} {b}");
        }
    } else {
        for (a, b, v) in inst.arcs() {
            let _ = writeln!(out, "a {a} {b} {v}");
        }
    }
    out
}

/// Parses a matching over `n` agents.
pub fn parse_matching(text: &str, n: usize) -> Result<Matching> {
    let mut it = lines(text);
    it.header(MATCHING_HEADER)?;
    let mut triples = Vec::new();
    let mut used = vec![false; n];
    for (line, words) in it.inner {
        let ["t", i, j, k] = words.as_slice() else {
            return Err(Error::parse(line, format!("expected `t i j k`, got `{}`", words.join(" "))));
        };
        let (i, j, k) = (agent(line, i, n)?, agent(line, j, n)?, agent(line, k, n)?);
        if !(i < j && j < k) {
            return Err(Error::parse(line, "triple members must be strictly increasing"));
        }
        for a in [i, j, k] {
            if std::mem::replace(&mut used[a], true) {
                return Err(Error::parse(line, format!("agent {a} already matched")));
            }
        }
        triples.push(Triple::new(i, j, k)?);
    }
    Matching::new(n, triples)
}

pub fn serialize_matching(m: &Matching) -> String {
    serialize_matching_with_comments(m, &[])
}

pub fn serialize_matching_with_comments(m: &Matching, comments: &[String]) -> String {
    let mut out = with_comments(comments, MATCHING_HEADER);
    for t in m.triples() {
        let [i, j, k] = t.members();
        let _ = writeln!(out, "t {i} {j} {k}");
    }
    out
}

pub fn parse_pit(text: &str) -> Result<PitInstance> {
    let mut it = lines(text);
    it.header(PIT_HEADER)?;
    let n: usize = it.keyed("n")?;
    let n_line = it.last;
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, words) in it.inner {
        let ["e", u, v] = words.as_slice() else {
            return Err(Error::parse(line, format!("expected `e u v`, got `{}`", words.join(" "))));
        };
        let (u, v) = (agent(line, u, n)?, agent(line, v, n)?);
        if u == v {
            return Err(Error::parse(line, format!("loop at vertex {u}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::parse(line, format!("duplicate edge ({u}, {v})")));
        }
        edges.push((u, v));
    }
    PitInstance::new(n, &edges).map_err(|e| Error::parse(n_line, e.to_string()))
}

pub fn serialize_pit(g: &PitInstance) -> String {
    serialize_pit_with_comments(g, &[])
}

pub fn serialize_pit_with_comments(g: &PitInstance, comments: &[String]) -> String {
    let mut out = with_comments(comments, PIT_HEADER);
    let _ = writeln!(out, "n {}", g.vertex_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "e {u} {v}");
    }
    out
}

/// Parses a partition over `n` vertices. Disjointness and coverage are left
/// to [`crate::hardness::validate_pit`].
pub fn parse_partition(text: &str, n: usize) -> Result<Vec<[usize; 3]>> {
    let mut it = lines(text);
    it.header(PARTITION_HEADER)?;
    let mut out = Vec::new();
    for (line, words) in it.inner {
        let ["x", i, j, k] = words.as_slice() else {
            return Err(Error::parse(line, format!("expected `x i j k`, got `{}`", words.join(" "))));
        };
        let mut t = [agent(line, i, n)?, agent(line, j, n)?, agent(line, k, n)?];
        t.sort_unstable();
        out.push(t);
    }
    out.sort_unstable();
    Ok(out)
}

pub fn serialize_partition(x: &[[usize; 3]]) -> String {
    let mut sorted: Vec<[usize; 3]> = x
        .iter()
        .map(|t| {
            let mut t = *t;
            t.sort_unstable();
            t
        })
        .collect();
    sorted.sort_unstable();
    let mut out = with_comments(&[], PARTITION_HEADER);
    for [i, j, k] in sorted {
        let _ = writeln!(out, "x {i} {j} {k}");
    }
    out
}
