use std::fmt::Write;

use crate::model::{CustomerSpec, DepotSpec, DistanceConvention, DistanceMatrix, Instance, Point};
use crate::{Cost, Error, Load, Result};

pub const HEADER: &str = "CLRP 1";

/// Nonempty lines with comments stripped, paired with 1-based line numbers.
pub(crate) fn records(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(k, l)| {
            let body = l.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            (!toks.is_empty()).then_some((k + 1, toks))
        })
        .collect()
}

pub(crate) fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Syntax {
        line,
        msg: format!("{what}: cannot parse {tok:?}"),
    })
}

fn coords(x: &str, y: &str, line: usize) -> Result<Option<Point>> {
    if x == "-" && y == "-" {
        return Ok(None);
    }
    Ok(Some(Point::new(
        number(x, line, "x")?,
        number(y, line, "y")?,
    )))
}

fn convention(tok: &str, line: usize) -> Result<DistanceConvention> {
    match tok {
        "real" => Ok(DistanceConvention::ExactReal),
        "explicit" => Ok(DistanceConvention::Explicit),
        _ => match tok.strip_prefix("scaled:") {
            Some(f) => {
                let factor: u32 = number(f, line, "scale factor")?;
                if factor == 0 {
                    return Err(Error::Semantic(
                        "convention: scale factor must be positive".into(),
                    ));
                }
                Ok(DistanceConvention::ScaledInteger { factor })
            }
            None => Err(Error::Syntax {
                line,
                msg: format!("unknown distance convention {tok:?}"),
            }),
        },
    }
}

fn expect_len(toks: &[&str], want: usize, line: usize, what: &str) -> Result<()> {
    if toks.len() != want {
        return Err(Error::Syntax {
            line,
            msg: format!("{what}: expected {want} fields, found {}", toks.len()),
        });
    }
    Ok(())
}

/// Parses the canonical text format.
///
/// ```text
/// CLRP 1
/// n m Q F convention          # convention: real | scaled:<factor> | explicit
/// x y w o                     # m depot lines
/// x y d                       # n customer lines
/// MATRIX                      # required for and only allowed with `explicit`
/// c_00 c_01 ...               # m + n rows, depots first
/// ```
///
/// Fields are whitespace separated and `#` starts a comment. A coordinate
/// pair may be `- -` when the matrix supplies the costs.
pub fn parse_canonical(text: &str, name: &str) -> Result<Instance> {
    let recs = records(text);
    let last_line = text.lines().count() + 1;
    let mut it = recs.iter();
    let missing = |section: &str| Error::Syntax {
        line: last_line,
        msg: format!("missing {section}"),
    };

    let (line, toks) = it.next().ok_or_else(|| missing("header"))?;
    if toks.join(" ") != HEADER {
        return Err(Error::Syntax {
            line: *line,
            msg: format!("expected header {HEADER:?}"),
        });
    }
    let (line, toks) = it.next().ok_or_else(|| missing("size line"))?;
    expect_len(toks, 5, *line, "size line")?;
    let n: usize = number(toks[0], *line, "n")?;
    let m: usize = number(toks[1], *line, "m")?;
    let q: Load = number(toks[2], *line, "Q")?;
    let f: Cost = number(toks[3], *line, "F")?;
    let conv = convention(toks[4], *line)?;

    let mut depots = Vec::with_capacity(m);
    for i in 0..m {
        let (line, toks) = it
            .next()
            .ok_or_else(|| missing(&format!("depot section ({i} of {m} depot lines)")))?;
        expect_len(toks, 4, *line, "depot line")?;
        depots.push(DepotSpec {
            coords: coords(toks[0], toks[1], *line)?,
            capacity: number(toks[2], *line, "w")?,
            opening_cost: number(toks[3], *line, "o")?,
        });
    }
    let mut customers = Vec::with_capacity(n);
    for j in 0..n {
        let (line, toks) = it
            .next()
            .ok_or_else(|| missing(&format!("customer section ({j} of {n} customer lines)")))?;
        expect_len(toks, 3, *line, "customer line")?;
        customers.push(CustomerSpec {
            coords: coords(toks[0], toks[1], *line)?,
            demand: number(toks[2], *line, "d")?,
        });
    }

    let matrix = match it.next() {
        None => None,
        Some((_, toks)) if toks.as_slice() == ["MATRIX"] => {
            let size = n + m;
            let mut rows = Vec::with_capacity(size);
            for r in 0..size {
                let (line, toks) = it
                    .next()
                    .ok_or_else(|| missing(&format!("matrix section ({r} of {size} rows)")))?;
                expect_len(toks, size, *line, "matrix row")?;
                rows.push(
                    toks.iter()
                        .map(|t| number::<Cost>(t, *line, "matrix entry"))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            if let Some((line, _)) = it.next() {
                return Err(Error::Syntax {
                    line: *line,
                    msg: "trailing data after matrix".into(),
                });
            }
            Some(DistanceMatrix::from_rows(rows)?)
        }
        Some((line, _)) => {
            return Err(Error::Syntax {
                line: *line,
                msg: "trailing data after customers".into(),
            })
        }
    };
    match (matrix, conv) {
        (Some(dist), DistanceConvention::Explicit) => {
            Instance::new(name, depots, customers, q, f, conv, dist)
        }
        (None, DistanceConvention::Explicit) => {
            Err(missing("matrix section required by explicit convention"))
        }
        (Some(_), _) => Err(Error::Semantic(
            "convention: MATRIX requires the explicit convention".into(),
        )),
        (None, _) => Instance::from_coordinates(name, depots, customers, q, f, conv),
    }
}

/// Writes `instance` in the canonical format. Parsing the output yields an
/// equal instance.
pub fn serialize_canonical(instance: &Instance) -> String {
    let mut out = String::new();
    let conv = match instance.convention {
        DistanceConvention::ExactReal => "real".to_string(),
        DistanceConvention::ScaledInteger { factor } => format!("scaled:{factor}"),
        DistanceConvention::Explicit => "explicit".to_string(),
    };
    let pt = |p: Option<Point>| p.map_or("- -".to_string(), |p| format!("{} {}", p.x, p.y));
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "# {}", instance.name);
    let _ = writeln!(
        out,
        "{} {} {} {} {conv}",
        instance.num_customers(),
        instance.num_depots(),
        instance.vehicle_capacity,
        instance.vehicle_cost
    );
    for d in &instance.depots {
        let _ = writeln!(out, "{} {} {}", pt(d.coords), d.capacity, d.opening_cost);
    }
    for c in &instance.customers {
        let _ = writeln!(out, "{} {}", pt(c.coords), c.demand);
    }
    if instance.convention == DistanceConvention::Explicit {
        let _ = writeln!(out, "MATRIX");
        let dist = instance.distances();
        for u in 0..dist.size() {
            let row: Vec<String> = (0..dist.size())
                .map(|v| dist.get(u, v).to_string())
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}
