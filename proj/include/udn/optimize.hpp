#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "udn/errors.hpp"

namespace udn {

/// Box-constrained maximization problem over a real vector.
struct BoxedProblem {
  std::vector<double> lower;
  std::vector<double> upper;
  std::function<double(std::span<const double>)> objective;

  std::size_t dimension() const { return lower.size(); }
};

inline void validate(const BoxedProblem& p) {
  if (p.lower.size() != p.upper.size())
    throw invalid_parameter("BoxedProblem: bound arrays differ in size");
  if (!p.objective) throw invalid_parameter("BoxedProblem: missing objective");
  for (std::size_t i = 0; i < p.lower.size(); ++i)
    if (!(p.lower[i] <= p.upper[i]))
      throw invalid_parameter("BoxedProblem: lower bound exceeds upper bound");
}

struct GridResult {
  std::vector<double> argmax;
  double value = -std::numeric_limits<double>::infinity();
};

inline constexpr std::uint64_t kDefaultGridBudget = 1ull << 26;

/// Exhaustive lattice search including both endpoints of every coordinate.
/// Ties break toward the lexicographically smallest lattice point. Refuses
/// to run (rather than silently subsampling) when the lattice exceeds the
/// evaluation budget.
inline GridResult grid_search_max(const BoxedProblem& problem, int points_per_dim,
                                  std::uint64_t budget = kDefaultGridBudget) {
  validate(problem);
  if (points_per_dim < 2)
    throw invalid_parameter("grid_search_max: need at least 2 points per dimension");
  const std::size_t dim = problem.dimension();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (total > budget / static_cast<std::uint64_t>(points_per_dim))
      throw budget_exceeded("grid_search_max: lattice exceeds evaluation budget");
    total *= static_cast<std::uint64_t>(points_per_dim);
  }

  std::vector<int> idx(dim, 0);
  std::vector<double> point(dim);
  GridResult best;
  bool first = true;
  for (;;) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double t = static_cast<double>(idx[i]) / (points_per_dim - 1);
      point[i] = problem.lower[i] + t * (problem.upper[i] - problem.lower[i]);
    }
    const double v = problem.objective(point);
    // Strict > keeps the first (lexicographically smallest) maximizer.
    if (first || v > best.value) {
      best.value = v;
      best.argmax = point;
      first = false;
    }
    std::size_t carry = dim;
    while (carry > 0) {
      if (++idx[carry - 1] < points_per_dim) break;
      idx[carry - 1] = 0;
      --carry;
    }
    if (carry == 0) break;
  }
  return best;
}

struct ScalarResult {
  double argmax = 0.0;
  double value = 0.0;
};

/// Golden-section maximization on [lo, hi]. Assumes the caller's objective
/// is unimodal; shrinks the uncertainty interval below tol.
inline ScalarResult golden_section_max(const std::function<double(double)>& f,
                                       double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw invalid_parameter("golden_section_max: tol must be > 0");
  if (!(lo <= hi)) throw invalid_parameter("golden_section_max: empty interval");
  auto eval = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v))
      throw evaluation_error("golden_section_max: objective returned a non-finite value");
    return v;
  };
  if (lo == hi) return {lo, eval(lo)};

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  return {mid, eval(mid)};
}

/// 1-D maximization by coarse grid then golden refinement around the best
/// lattice cell. Robust to mild non-unimodality; deterministic.
inline ScalarResult scalar_grid_golden_max(const std::function<double(double)>& f,
                                           double lo, double hi,
                                           int grid_points = 64,
                                           double tol = 1e-9) {
  if (!(lo <= hi)) throw invalid_parameter("scalar_grid_golden_max: empty interval");
  if (lo == hi) return {lo, f(lo)};
  if (grid_points < 2) grid_points = 2;
  ScalarResult best{lo, f(lo)};
  const double h = (hi - lo) / (grid_points - 1);
  int best_i = 0;
  for (int i = 1; i < grid_points; ++i) {
    const double x = lo + h * i;
    const double v = f(x);
    if (v > best.value) {
      best = {x, v};
      best_i = i;
    }
  }
  const double rl = std::max(lo, lo + h * (best_i - 1));
  const double rh = std::min(hi, lo + h * (best_i + 1));
  const ScalarResult refined = golden_section_max(f, rl, rh, std::min(tol, h));
  return refined.value > best.value ? refined : best;
}

/// Decentralized power-control game: player i picks power in [0, power_max[i]]
/// to maximize its own utility given everyone else's power.
struct GameSpec {
  std::vector<double> power_max;
  std::function<double(std::size_t player, std::span<const double>)> utility;

  std::size_t players() const { return power_max.size(); }
};

struct GameResult {
  std::vector<double> powers;
  bool converged = false;
  int rounds_used = 0;
};

struct BestResponseOptions {
  bool sequential = false;  // default: simultaneous (Jacobi) updates
  int grid_points = 64;
  double refine_tol = 1e-12;
};

/// Iterated best response. Each round every player maximizes its own utility
/// over its interval by grid + golden refinement, holding the others fixed;
/// by default all updates are applied simultaneously. Converged when the
/// largest power change in a round falls below tolerance. Non-convergence is
/// reported, not thrown.
inline GameResult best_response_power_game(const GameSpec& game, int max_rounds,
                                           double tolerance_w,
                                           const BestResponseOptions& opt = {}) {
  if (max_rounds < 1)
    throw invalid_parameter("best_response_power_game: max_rounds must be >= 1");
  if (!game.utility) throw invalid_parameter("best_response_power_game: missing utility");
  const std::size_t n = game.players();
  for (double cap : game.power_max)
    if (!(cap >= 0.0))
      throw invalid_parameter("best_response_power_game: negative power cap");

  GameResult result;
  result.powers.assign(n, 0.0);
  std::vector<double> next(n, 0.0);
  std::vector<double> scratch(n, 0.0);
  for (int round = 1; round <= max_rounds; ++round) {
    double max_change = 0.0;
    scratch = result.powers;
    for (std::size_t i = 0; i < n; ++i) {
      if (opt.sequential) scratch = result.powers;
      auto own = [&](double p) {
        scratch[i] = p;
        return game.utility(i, scratch);
      };
      const ScalarResult br =
          scalar_grid_golden_max(own, 0.0, game.power_max[i], opt.grid_points,
                                 opt.refine_tol);
      scratch[i] = result.powers[i];  // restore for the next player's view
      next[i] = br.argmax;
      max_change = std::max(max_change, std::abs(next[i] - result.powers[i]));
      if (opt.sequential) result.powers[i] = next[i];
    }
    if (!opt.sequential) result.powers = next;
    result.rounds_used = round;
    if (!(max_change >= tolerance_w)) {  // handles tolerance = infinity
      result.converged = true;
      break;
    }
  }
  return result;
}

/// A block of coordinates updated jointly during block-coordinate ascent.
struct CoordinateBlock {
  std::vector<std::size_t> indices;
  int grid_points = 16;
};

struct BlockCoordinateResult {
  std::vector<double> point;
  std::vector<double> trace;  // objective after initialization and each sweep
};

/// Block-coordinate ascent on a shared vector: each sweep solves every block
/// by exhaustive grid (plus golden refinement for 1-D blocks) with the other
/// coordinates held fixed. The objective trace must never decrease; a drop
/// beyond 1e-9 signals a buggy block solver and throws.
inline BlockCoordinateResult block_coordinate_max(
    const BoxedProblem& problem, std::span<const CoordinateBlock> blocks,
    int max_sweeps, double tolerance,
    std::vector<double> initial = {}) {
  validate(problem);
  if (max_sweeps < 1)
    throw invalid_parameter("block_coordinate_max: max_sweeps must be >= 1");
  const std::size_t dim = problem.dimension();
  for (const auto& b : blocks)
    for (std::size_t idx : b.indices)
      if (idx >= dim)
        throw invalid_parameter("block_coordinate_max: block index out of range");

  BlockCoordinateResult result;
  if (initial.empty()) {
    result.point = problem.lower;
  } else {
    if (initial.size() != dim)
      throw invalid_parameter("block_coordinate_max: bad initial point size");
    result.point = std::move(initial);
  }

  double current = problem.objective(result.point);
  result.trace.push_back(current);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (const auto& block : blocks) {
      if (block.indices.size() == 1) {
        const std::size_t i = block.indices[0];
        auto f = [&](double x) {
          const double saved = result.point[i];
          result.point[i] = x;
          const double v = problem.objective(result.point);
          result.point[i] = saved;
          return v;
        };
        const ScalarResult r = scalar_grid_golden_max(
            f, problem.lower[i], problem.upper[i], block.grid_points);
        if (r.value > current) {
          result.point[i] = r.argmax;
          current = r.value;
        }
      } else {
        std::vector<double> saved;
        BoxedProblem sub;
        for (std::size_t idx : block.indices) {
          sub.lower.push_back(problem.lower[idx]);
          sub.upper.push_back(problem.upper[idx]);
          saved.push_back(result.point[idx]);
        }
        sub.objective = [&](std::span<const double> xs) {
          for (std::size_t k = 0; k < block.indices.size(); ++k)
            result.point[block.indices[k]] = xs[k];
          return problem.objective(result.point);
        };
        const GridResult r = grid_search_max(sub, block.grid_points);
        const auto& adopt = r.value > current ? r.argmax : saved;
        for (std::size_t k = 0; k < block.indices.size(); ++k)
          result.point[block.indices[k]] = adopt[k];
        if (r.value > current) current = r.value;
      }
    }
    const double after = problem.objective(result.point);
    if (after < result.trace.back() - 1e-9)
      throw internal_consistency_error(
          "block_coordinate_max: objective decreased across a sweep");
    result.trace.push_back(after);
    if (after - result.trace[result.trace.size() - 2] < tolerance) break;
    current = after;
  }
  return result;
}

}  // namespace udn
