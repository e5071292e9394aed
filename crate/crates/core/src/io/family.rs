use crate::model::{CustomerSpec, DepotSpec, DistanceConvention, Instance, Point};
use crate::{Cost, Error, Load, Result};

use super::canonical::{number, records};

/// Grammar of the `prodhon` adapter.
pub const PRODHON_GRAMMAR: &str = include_str!("../../data/grammar/prodhon.txt");

struct Tokens<'a> {
    toks: Vec<(usize, &'a str)>,
    pos: usize,
    end_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let toks = records(text)
            .into_iter()
            .flat_map(|(l, ts)| ts.into_iter().map(move |t| (l, t)))
            .collect();
        Tokens {
            toks,
            pos: 0,
            end_line: text.lines().count() + 1,
        }
    }

    fn next<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let Some(&(line, tok)) = self.toks.get(self.pos) else {
            return Err(Error::Syntax {
                line: self.end_line,
                msg: format!("missing {what}"),
            });
        };
        self.pos += 1;
        number(tok, line, what)
    }
}

/// Parses a file in the `prodhon` layout described by [`PRODHON_GRAMMAR`].
pub fn parse_prodhon(text: &str, name: &str) -> Result<Instance> {
    let mut t = Tokens::new(text);
    let n: usize = t.next("customer count")?;
    let m: usize = t.next("depot count")?;
    let mut pts = Vec::with_capacity(n + m);
    for k in 0..m + n {
        let what = if k < m {
            "depot coordinates"
        } else {
            "customer coordinates"
        };
        pts.push(Point::new(t.next(what)?, t.next(what)?));
    }
    let q: Load = t.next("vehicle capacity")?;
    let caps: Vec<Load> = (0..m)
        .map(|_| t.next("depot capacities"))
        .collect::<Result<_>>()?;
    let demands: Vec<Load> = (0..n)
        .map(|_| t.next("customer demands"))
        .collect::<Result<_>>()?;
    let opening: Vec<Cost> = (0..m)
        .map(|_| t.next("depot opening costs"))
        .collect::<Result<_>>()?;
    let f: Cost = t.next("route cost")?;
    let flag: u8 = t.next("cost type flag")?;
    if let Some(&(line, _)) = t.toks.get(t.pos) {
        return Err(Error::Syntax {
            line,
            msg: "trailing data after cost type flag".into(),
        });
    }
    let convention = match flag {
        0 => DistanceConvention::ExactReal,
        1 => DistanceConvention::ScaledInteger { factor: 100 },
        other => {
            return Err(Error::Semantic(format!(
                "cost type flag: expected 0 or 1, found {other}"
            )))
        }
    };
    let depots = (0..m)
        .map(|i| DepotSpec {
            capacity: caps[i],
            opening_cost: opening[i],
            coords: Some(pts[i]),
        })
        .collect();
    let customers = (0..n)
        .map(|j| CustomerSpec {
            demand: demands[j],
            coords: Some(pts[m + j]),
        })
        .collect();
    Instance::from_coordinates(name, depots, customers, q, f, convention)
}
