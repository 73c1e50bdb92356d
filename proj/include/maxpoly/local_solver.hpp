#pragma once

#include "maxpoly/formulation.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace maxpoly {

struct SolverConfig {
    int starts = 64;
    std::uint64_t rng_seed = 0;
    int max_outer_iterations = 60;
    double feasibility_tol = 1e-10;
    double kkt_tol = 1e-8;
    // Iterates keep x_i <= 1 - x_interior_clamp so dy/dx = -x/y stays finite.
    double x_interior_clamp = 1e-12;
    // Worker threads for independent starts; the answer does not depend on it.
    int threads = 1;
};

enum class StartStatus { Feasible, Infeasible };

struct StartLog {
    double objective = 0.0;
    double max_violation = 0.0;
    bool polished = false;
    StartStatus status = StartStatus::Infeasible;
};

struct SolveResult {
    int n = 0;
    bool symmetric = false;
    Assignment best;
    double objective = 0.0;
    double max_violation = 0.0;
    double kkt_residual = 0.0;
    int winning_start = -1;
    std::vector<StartLog> starts;
    SolverConfig config;
};

// Seed 0 places the chain edges at the angles of a regular configuration;
// the rest perturb it uniformly by +-0.15 and clip to the box.
std::vector<Assignment> initial_seeds(const QuadraticProgram& p, int count, std::uint64_t rng_seed);

// Multistart augmented-Lagrangian maximization of the area in x-space.
// Throws InfeasibleError when no start reaches feasibility_tol.
SolveResult solve(const QuadraticProgram& p, const SolverConfig& config = {});

struct PolishResult {
    Assignment point;
    bool progressed = false;
    int iterations = 0;
};

// Newton refinement of the KKT system restricted to the active constraints.
PolishResult polish(const QuadraticProgram& p, const Assignment& a);

// Infinity norm of the Lagrangian gradient with least-squares multipliers on
// the active set (inequality multipliers kept nonnegative).
double kkt_residual(const QuadraticProgram& p, const Assignment& a);

// Analytic x-space gradient of the objective (y eliminated); exposed for tests.
std::vector<double> objective_gradient_x(const QuadraticProgram& p, const std::vector<double>& x);
// Same for constraint `index` of p.constraints.
std::vector<double> constraint_gradient_x(const QuadraticProgram& p, std::size_t index, const std::vector<double>& x);
double constraint_value_x(const QuadraticProgram& p, std::size_t index, const std::vector<double>& x);
double objective_value_x(const QuadraticProgram& p, const std::vector<double>& x);

// "maxpoly-result/1"
std::string result_to_json(const SolveResult& r);
SolveResult result_from_json(std::string_view text);

} // namespace maxpoly
