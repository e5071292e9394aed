use std::ops::ControlFlow;

use super::moves::{Anchor, Move, Workspace};
use super::NeighborLists;
use crate::model::{Instance, Solution};
use crate::{Error, Result};

/// Strict-improvement threshold; keeps float noise from cycling the descent.
pub const IMPROVEMENT_EPS: f64 = 1e-7;

/// The ten neighborhoods explored by the descent, in exploration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Neighborhood {
    Relocate1Intra,
    Relocate1Inter,
    Relocate2Intra,
    Relocate2Inter,
    Swap11Intra,
    Swap11Inter,
    Swap22Intra,
    Swap22Inter,
    TwoOptIntra,
    TwoOptStarInter,
}

pub const VND_ORDER: [Neighborhood; 10] = [
    Neighborhood::Relocate1Intra,
    Neighborhood::Relocate1Inter,
    Neighborhood::Relocate2Intra,
    Neighborhood::Relocate2Inter,
    Neighborhood::Swap11Intra,
    Neighborhood::Swap11Inter,
    Neighborhood::Swap22Intra,
    Neighborhood::Swap22Inter,
    Neighborhood::TwoOptIntra,
    Neighborhood::TwoOptStarInter,
];

impl Neighborhood {
    fn intra(self) -> bool {
        matches!(
            self,
            Neighborhood::Relocate1Intra
                | Neighborhood::Relocate2Intra
                | Neighborhood::Swap11Intra
                | Neighborhood::Swap22Intra
                | Neighborhood::TwoOptIntra
        )
    }
}

/// Visits the granular candidates of one neighborhood for customer `u`.
/// `Relocate1Inter` also offers a new route at every depot, opening closed
/// ones.
pub(crate) fn candidates_for(
    ws: &Workspace<'_>,
    lists: &NeighborLists,
    nb: Neighborhood,
    u: usize,
    f: &mut impl FnMut(Move) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let inst = ws.instance();
    let m = inst.num_depots();
    let ru = ws.route_of(u);
    let want_intra = nb.intra();
    let u_next = ws.next(u);
    for &v in lists.of_customer(m, u) {
        if (ws.route_of(v) == ru) != want_intra {
            continue;
        }
        match nb {
            Neighborhood::Relocate1Intra | Neighborhood::Relocate1Inter => {
                f(Move::Relocate {
                    u,
                    len: 1,
                    reversed: false,
                    to: Anchor::After(v),
                })?;
                f(Move::Relocate {
                    u,
                    len: 1,
                    reversed: false,
                    to: Anchor::Before(v),
                })?;
            }
            Neighborhood::Relocate2Intra | Neighborhood::Relocate2Inter => {
                if let Some(x) = u_next {
                    if x != v {
                        for reversed in [false, true] {
                            f(Move::Relocate {
                                u,
                                len: 2,
                                reversed,
                                to: Anchor::After(v),
                            })?;
                            f(Move::Relocate {
                                u,
                                len: 2,
                                reversed,
                                to: Anchor::Before(v),
                            })?;
                        }
                    }
                }
            }
            Neighborhood::Swap11Intra | Neighborhood::Swap11Inter => {
                f(Move::Swap {
                    u,
                    ulen: 1,
                    v,
                    vlen: 1,
                })?;
            }
            Neighborhood::Swap22Intra | Neighborhood::Swap22Inter => {
                let v_next = ws.next(v);
                if u_next.is_some() && v_next.is_some() {
                    f(Move::Swap {
                        u,
                        ulen: 2,
                        v,
                        vlen: 2,
                    })?;
                }
                if u_next.is_some() {
                    f(Move::Swap {
                        u,
                        ulen: 2,
                        v,
                        vlen: 1,
                    })?;
                }
                if v_next.is_some() {
                    f(Move::Swap {
                        u,
                        ulen: 1,
                        v,
                        vlen: 2,
                    })?;
                }
            }
            Neighborhood::TwoOptIntra => {
                f(Move::TwoOpt { u, v })?;
            }
            Neighborhood::TwoOptStarInter => {
                f(Move::TwoOptStar {
                    u,
                    v,
                    reversed: false,
                })?;
                f(Move::TwoOptStar {
                    u,
                    v,
                    reversed: true,
                })?;
            }
        }
    }
    if nb == Neighborhood::Relocate1Inter {
        let solo = ws.route_customers(ru).len() == 1;
        for d in 0..m {
            if !(solo && ws.route_depot(ru) == d) {
                f(Move::Relocate {
                    u,
                    len: 1,
                    reversed: false,
                    to: Anchor::NewRoute(d),
                })?;
            }
        }
    }
    ControlFlow::Continue(())
}

/// Counters collected by one descent, used by tests and instrumentation.
#[derive(Debug, Clone, Default)]
pub struct VndTrace {
    pub accepted: Vec<(Neighborhood, Move)>,
}

/// Improves a feasible solution to a local optimum of all ten neighborhoods.
pub fn vnd_improve(
    solution: &Solution,
    lists: &NeighborLists,
    instance: &Instance,
) -> Result<Solution> {
    vnd_improve_traced(solution, lists, instance, None)
}

pub fn vnd_improve_traced(
    solution: &Solution,
    lists: &NeighborLists,
    instance: &Instance,
    mut trace: Option<&mut VndTrace>,
) -> Result<Solution> {
    if !solution.is_feasible() {
        return Err(Error::InvalidArgument(
            "local search requires a feasible solution".into(),
        ));
    }
    let mut ws = Workspace::new(instance, solution);
    let n = instance.num_customers();
    'restart: loop {
        for nb in VND_ORDER {
            let mut found = None;
            for u in 0..n {
                let flow = candidates_for(&ws, lists, nb, u, &mut |mv| {
                    if let Some(d) = ws.evaluate(&mv) {
                        if d.local_feasible && d.cost < -IMPROVEMENT_EPS {
                            found = Some(mv);
                            return ControlFlow::Break(());
                        }
                    }
                    ControlFlow::Continue(())
                });
                if flow.is_break() {
                    break;
                }
            }
            if let Some(mv) = found {
                ws.apply(&mv)
                    .expect("candidate was evaluated on this state");
                if let Some(t) = trace.as_deref_mut() {
                    t.accepted.push((nb, mv));
                }
                continue 'restart;
            }
        }
        break;
    }
    Ok(ws.to_solution())
}
