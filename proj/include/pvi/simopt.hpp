#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pvi/errors.hpp"

// Heuristic-parameter search over simulated returns. One-parameter policies
// are fitted by exhaustive grid search; multi-parameter policies by a small
// generational genetic algorithm. Every candidate is scored on common
// random numbers (the caller's evaluator bakes in a fixed base seed), so a
// search is deterministic given the search seed and the evaluation seed.

namespace pvi::simopt {

struct ParamSpec {
  std::string name;
  int lo = 0;
  int hi = 0;  // inclusive
};

struct SearchSpace {
  std::vector<ParamSpec> params;
  std::size_t dimension() const { return params.size(); }
};

// Mean and sample standard deviation of the return for one candidate.
struct Score {
  double mean = 0.0;
  double sd = 0.0;
};

using CandidateEvaluator = std::function<Score(const std::vector<int>&)>;

struct ScoredCandidate {
  int generation = 0;
  std::vector<int> values;
  double mean = 0.0;
  double sd = 0.0;
};

struct GridResult {
  std::vector<int> best;
  Score best_score;
  std::vector<ScoredCandidate> table;  // every evaluated value, in order
};

// Evaluates every value of a one-parameter space; the best candidate is the
// highest mean return with ties broken toward the smaller parameter.
GridResult grid_search(const SearchSpace& space, const CandidateEvaluator& evaluate,
                       int threads = 1);

struct GaConfig {
  int population = 50;
  int max_generations = 100;
  int patience = 5;  // stop after this many generations without a new best vector
  int rollouts_per_candidate = 4'000;  // recorded in logs; the evaluator bakes it in
  double crossover_rate = 0.9;
  double mutation_rate = 0.0;  // per gene; 0 means 1/dimension
  std::uint64_t seed = 1;
  int threads = 1;
};

struct GaResult {
  std::vector<int> best;
  Score best_score;
  std::vector<ScoredCandidate> log;
  int generations = 0;
};

// Generational GA: tournament selection of size 2, uniform crossover,
// per-gene uniform-reset mutation, elitism of one. Candidates are ranked by
// mean return with ties broken toward the lexicographically smallest
// vector; the returned best is the argmax over all evaluated candidates.
GaResult ga_search(const SearchSpace& space, const CandidateEvaluator& evaluate,
                   const GaConfig& config);

}  // namespace pvi::simopt
