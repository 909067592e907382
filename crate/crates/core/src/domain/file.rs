//! Domain files: a `domain NAME` header naming a built-in domain, or
//! `domain table` followed by `elem NAME gamma {..}` and `order A <= B` lines.

use super::{builtin_domain, GaloisInsertion};
use crate::error::{Error, Result};
use crate::model::{ConcreteKind, Model};

pub fn parse_domain_file(src: &str, model: &Model, kind: ConcreteKind) -> Result<GaloisInsertion> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| Error::syntax("empty domain file"))?;
    let mut words = header.split_whitespace();
    if words.next() != Some("domain") {
        return Err(Error::syntax("expected `domain NAME`").at(format!("line {hline}")));
    }
    let name = words.next().ok_or_else(|| Error::syntax("missing domain name").at(format!("line {hline}")))?;
    if let Some(extra) = words.next() {
        return Err(Error::syntax(format!("unexpected `{extra}`")).at(format!("line {hline}")));
    }
    if name != "table" {
        if let Some((l, _)) = lines.next() {
            return Err(Error::syntax("built-in domains take no further lines").at(format!("line {l}")));
        }
        return builtin_domain(name, model, kind).map_err(|e| e.at(format!("line {hline}")));
    }

    let mut elems = Vec::new();
    let mut order = Vec::new();
    for (ln, line) in lines {
        let at = |e: Error| e.at(format!("line {ln}"));
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match head {
            "elem" => {
                let rest = rest.trim();
                let (name, rest) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| at(Error::syntax("expected `elem NAME gamma {..}`")))?;
                let set = rest
                    .trim()
                    .strip_prefix("gamma")
                    .ok_or_else(|| at(Error::syntax("expected `gamma` after the element name")))?;
                let set = model.parse_set(set, kind).map_err(at)?;
                elems.push((name.to_string(), set));
            }
            "order" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    [a, "<=", b] => order.push((ln, a.to_string(), b.to_string())),
                    _ => return Err(at(Error::syntax("expected `order A <= B`"))),
                }
            }
            other => return Err(at(Error::syntax(format!("unknown directive `{other}`")))),
        }
    }
    let n = elems.len();
    let find = |ln: usize, name: &str| {
        elems
            .iter()
            .position(|(e, _)| e == name)
            .ok_or_else(|| Error::semantic(format!("unknown abstract element `{name}`")).at(format!("line {ln}")))
    };
    if !order.is_empty() {
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (ln, a, b) in &order {
            let (i, j) = (find(*ln, a)?, find(*ln, b)?);
            if !elems[i].1.is_subset(&elems[j].1) {
                return Err(Error::semantic(format!("`{a} <= {b}` but gamma is not monotone there")).at(format!("line {ln}")));
            }
            le[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !le[i][j] && elems[i].1.is_subset(&elems[j].1) {
                    return Err(Error::semantic(format!(
                        "gamma({}) is included in gamma({}) but the declared order does not relate them",
                        elems[i].0, elems[j].0
                    )));
                }
            }
        }
    }
    GaloisInsertion::from_table("table", kind, model.universe(), elems)
}
