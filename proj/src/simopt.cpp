#include "pvi/simopt.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <random>

#include "pvi/parallel.hpp"

namespace pvi::simopt {

namespace {

// Higher mean wins; equal means prefer the lexicographically smaller vector.
bool better(const std::vector<int>& a, double mean_a, const std::vector<int>& b, double mean_b) {
  if (mean_a != mean_b) return mean_a > mean_b;
  return a < b;
}

}  // namespace

GridResult grid_search(const SearchSpace& space, const CandidateEvaluator& evaluate,
                       int threads) {
  if (space.dimension() != 1)
    throw ContractViolation("grid search requires a one-parameter space");
  const auto& p = space.params[0];
  if (p.lo > p.hi) throw ParameterError("grid search: empty range for " + p.name);

  const int n = p.hi - p.lo + 1;
  std::vector<Score> scores(n);
  parallel_for_chunks(n, 1, threads, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i)
      scores[i] = evaluate({p.lo + static_cast<int>(i)});
  });

  GridResult result;
  result.table.reserve(n);
  for (int i = 0; i < n; ++i) {
    result.table.push_back({0, {p.lo + i}, scores[i].mean, scores[i].sd});
    if (i == 0 || scores[i].mean > result.best_score.mean) {
      result.best = {p.lo + i};
      result.best_score = scores[i];
    }
  }
  return result;
}

GaResult ga_search(const SearchSpace& space, const CandidateEvaluator& evaluate,
                   const GaConfig& config) {
  const std::size_t dim = space.dimension();
  if (dim < 1) throw ContractViolation("ga search requires a non-empty space");
  if (config.population < 2) throw ParameterError("ga search: population must be >= 2");

  std::mt19937_64 rng(config.seed);
  const double mutation_rate =
      config.mutation_rate > 0.0 ? config.mutation_rate : 1.0 / double(dim);
  auto uniform_gene = [&](std::size_t g) {
    return std::uniform_int_distribution<int>(space.params[g].lo, space.params[g].hi)(rng);
  };
  auto chance = [&](double rate) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < rate;
  };

  std::map<std::vector<int>, Score> cache;
  auto score_batch = [&](const std::vector<std::vector<int>>& batch, int generation,
                         GaResult& result) {
    std::vector<const std::vector<int>*> fresh;
    for (const auto& cand : batch)
      if (!cache.contains(cand)) {
        cache.emplace(cand, Score{});
        fresh.push_back(&cand);
      }
    // Fresh candidates score concurrently; each result lands in its own
    // slot, so the schedule cannot change the outcome.
    std::vector<Score> scores(fresh.size());
    parallel_for_chunks(fresh.size(), 1, config.threads, [&](std::uint64_t lo, std::uint64_t hi) {
      for (std::uint64_t i = lo; i < hi; ++i) scores[i] = evaluate(*fresh[i]);
    });
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      cache[*fresh[i]] = scores[i];
      result.log.push_back({generation, *fresh[i], scores[i].mean, scores[i].sd});
    }
  };
  auto rank_order = [&](std::vector<std::vector<int>>& pool) {
    std::sort(pool.begin(), pool.end(), [&](const auto& a, const auto& b) {
      const double ma = cache[a].mean, mb = cache[b].mean;
      if (ma != mb) return ma > mb;
      return a < b;
    });
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  };

  std::vector<std::vector<int>> population(config.population, std::vector<int>(dim));
  for (auto& cand : population)
    for (std::size_t g = 0; g < dim; ++g) cand[g] = uniform_gene(g);

  GaResult result;
  std::vector<int> best;
  Score best_score;
  int stale_generations = 0;

  for (int generation = 1; generation <= config.max_generations; ++generation) {
    score_batch(population, generation, result);
    rank_order(population);

    bool improved = false;
    if (best.empty() || better(population[0], cache[population[0]].mean, best, best_score.mean)) {
      if (best != population[0]) improved = true;
      best = population[0];
      best_score = cache[population[0]];
    }
    result.generations = generation;
    stale_generations = improved ? 0 : stale_generations + 1;
    if (stale_generations >= config.patience) break;
    if (generation == config.max_generations) break;

    // The population is sorted, so a tournament of size two is "pick two
    // indices, keep the smaller".
    auto tournament = [&]() -> const std::vector<int>& {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(population.size()) - 1);
      const int a = pick(rng);
      const int b = pick(rng);
      return population[std::min(a, b)];
    };

    // Propose offspring, re-rolling candidates already scored: repeating an
    // evaluation cannot add information under common random numbers, so the
    // budget is better spent on unseen parameter vectors.
    std::vector<std::vector<int>> offspring;
    std::set<std::vector<int>> proposed;
    offspring.reserve(config.population);
    while (static_cast<int>(offspring.size()) < config.population) {
      std::vector<int> child;
      for (int attempt = 0; attempt < 8; ++attempt) {
        child = tournament();
        const std::vector<int>& other = tournament();
        if (chance(config.crossover_rate)) {
          for (std::size_t g = 0; g < dim; ++g)
            if (chance(0.5)) child[g] = other[g];
        }
        for (std::size_t g = 0; g < dim; ++g)
          if (chance(mutation_rate)) child[g] = uniform_gene(g);
        if (!cache.contains(child) && !proposed.contains(child)) break;
      }
      proposed.insert(child);
      offspring.push_back(std::move(child));
    }
    score_batch(offspring, generation + 1, result);

    // Survivors: the best of parents and offspring together, which keeps
    // the incumbent best alive.
    for (auto& child : offspring) population.push_back(std::move(child));
    rank_order(population);
    if (static_cast<int>(population.size()) > config.population)
      population.resize(config.population);
  }

  result.best = best;
  result.best_score = best_score;
  return result;
}

}  // namespace pvi::simopt
