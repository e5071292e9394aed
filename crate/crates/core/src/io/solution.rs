use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Solution};
use crate::{Cost, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteDoc {
    pub depot: usize,
    pub customers: Vec<usize>,
}

/// On-disk form of a solution. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub instance: String,
    pub objective: Cost,
    pub depots: Vec<usize>,
    pub routes: Vec<RouteDoc>,
}

impl SolutionDoc {
    pub fn of(solution: &Solution, instance: &Instance) -> Self {
        SolutionDoc {
            instance: instance.name.clone(),
            objective: solution.cost,
            depots: solution.config.open().to_vec(),
            routes: solution
                .routes
                .iter()
                .map(|r| RouteDoc {
                    depot: r.depot,
                    customers: r.customers.clone(),
                })
                .collect(),
        }
    }

    /// Rebuilds the solution against `instance`, recomputing its cost.
    /// Listed depots without routes stay open.
    pub fn to_solution(&self, instance: &Instance) -> Result<Solution> {
        let routes = self.routes.iter().map(|r| (r.depot, r.customers.clone()));
        let sol = Solution::from_routes(instance, routes, &self.depots)?;
        if let Some(r) = self.routes.iter().find(|r| !self.depots.contains(&r.depot)) {
            return Err(Error::Structural(format!(
                "route uses depot {} missing from the depot list",
                r.depot
            )));
        }
        let tol = instance.tolerance().max(1e-9);
        if (sol.cost - self.objective).abs() > tol {
            return Err(Error::Integrity(format!(
                "stored objective {} differs from recomputed {}",
                self.objective, sol.cost
            )));
        }
        Ok(sol)
    }
}

pub fn solution_to_json(solution: &Solution, instance: &Instance) -> String {
    serde_json::to_string_pretty(&SolutionDoc::of(solution, instance))
        .expect("plain data serializes")
}

pub fn solution_from_json(text: &str, instance: &Instance) -> Result<Solution> {
    serde_json::from_str::<SolutionDoc>(text)?.to_solution(instance)
}

pub fn write_solution(
    solution: &Solution,
    instance: &Instance,
    path: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(path, solution_to_json(solution, instance) + "\n")?;
    Ok(())
}

pub fn read_solution(path: impl AsRef<Path>, instance: &Instance) -> Result<Solution> {
    solution_from_json(&std::fs::read_to_string(path)?, instance)
}
