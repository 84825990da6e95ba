#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include "greedy/config.hpp"
#include "greedy/dictionary.hpp"
#include "greedy/expansion.hpp"
#include "greedy/objective.hpp"
#include "greedy/search.hpp"
#include "greedy/trace.hpp"

namespace greedy {

// A search failure inside a run; carries the trace up to the failing iteration.
class RunAborted : public IterationError {
 public:
  RunAborted(std::size_t iteration, const std::string& what, RunTrace partial)
      : IterationError(iteration, what), partial_(std::make_shared<RunTrace>(std::move(partial))) {}

  const RunTrace& partial_trace() const noexcept { return *partial_; }

 private:
  std::shared_ptr<RunTrace> partial_;
};

// G_{m-1} with its cached value.
struct GreedyState {
  std::size_t m = 1;
  Expansion G;
  double value = 0.0;
};

namespace detail {

inline void check_instance(const ConvexObjective& obj, const Dictionary& dict, const AlgorithmConfig& cfg,
                           Algorithm expected) {
  if (cfg.algorithm != expected) {
    throw InvalidArgument(std::string("config selects ") + to_string(cfg.algorithm) + ", runner is " +
                          to_string(expected));
  }
  cfg.validate();
  if (obj.dimension() != dict.dimension()) {
    throw InvalidArgument("objective dimension " + std::to_string(obj.dimension()) +
                          " differs from dictionary dimension " + std::to_string(dict.dimension()));
  }
  if (needs_gradient(expected) && !obj.has_gradient()) {
    throw InvalidArgument(std::string(to_string(expected)) + " needs the objective's gradient");
  }
}

// One greedy step: from state and rng, produce the chosen atom and step
// parameters (already passed through the error mode), or nullopt when the
// state is stationary.
template <class Step>
RunTrace run_loop(const ConvexObjective& obj, const Dictionary& dict, const AlgorithmConfig& cfg,
                  std::optional<Reference> reference, Step&& step) {
  RunTrace trace;
  trace.algorithm = cfg.algorithm;
  trace.objective = obj.descriptor();
  trace.reference = std::move(reference);

  GreedyState state{1, Expansion(dict), 0.0};
  state.value = obj(state.G.vector());
  if (!std::isfinite(state.value)) throw NumericalError("E(0) is not finite");
  trace.initial_value = state.value;

  std::mt19937_64 rng(cfg.seed);
  bool stationary = false;
  for (; state.m <= cfg.max_iterations; ++state.m) {
    IterationRecord rec;
    rec.m = state.m;
    rec.delta = cfg.errors(state.m - 1);
    try {
      std::optional<SearchResult> r;
      if (!stationary) r = step(state, rec.delta, rng);
      if (!r) {
        stationary = true;
        rec.stationary = true;
      } else {
        const double scale = r->w ? 1.0 - *r->w : 1.0 - r->lambda;
        state.G.update(dict, scale, *r->atom, r->lambda);
        state.value = obj(state.G.vector());
        if (!std::isfinite(state.value)) throw NumericalError("non-finite E(G_m)");
        rec.atom = r->atom;
        rec.lambda = r->lambda;
        rec.w = r->w;
        rec.injected_error = r->injected_error;
        rec.certified_gap = r->gap;
        rec.stationary = r->lambda == 0.0 && r->w.value_or(0.0) == 0.0;
      }
    } catch (const std::exception& e) {
      trace.aborted = true;
      trace.abort_reason = e.what();
      throw RunAborted(state.m, e.what(), trace);
    }
    rec.value = state.value;
    rec.snapshot = state.G;
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

inline double search_target(const AlgorithmConfig& cfg, double delta) {
  return cfg.error_mode == ErrorMode::kTolerance ? delta : 0.0;
}

}  // namespace detail

// Weak Relaxed Greedy Algorithm (Frank-Wolfe type); delta-approximate when
// the schedule is nonzero.
inline RunTrace run_wrga(const ConvexObjective& obj, const Dictionary& dict, const AlgorithmConfig& cfg,
                         std::optional<Reference> reference = std::nullopt) {
  detail::check_instance(obj, dict, cfg, Algorithm::kWRGA);
  return detail::run_loop(obj, dict, cfg, std::move(reference),
                          [&](const GreedyState& s, double delta, auto& rng) -> std::optional<SearchResult> {
                            const Vector& G = s.G.vector();
                            const AtomChoice choice =
                                weak_argmax_relative(obj.gradient(G), G, dict, cfg.weakness(s.m));
                            if (choice.stationary) return std::nullopt;
                            const Vector& phi = dict[choice.index];
                            SearchResult r =
                                line_search_unit_interval(obj, G, phi, detail::search_target(cfg, delta));
                            r = apply_error_mode(r, delta, cfg.error_mode, rng, relaxed_step_space(obj, G, phi));
                            r.atom = choice.index;
                            return r;
                          });
}

// Relaxed E-Greedy Algorithm: joint search over atoms and lambda in [0,1].
inline RunTrace run_rega(const ConvexObjective& obj, const Dictionary& dict, const AlgorithmConfig& cfg,
                         std::optional<Reference> reference = std::nullopt) {
  detail::check_instance(obj, dict, cfg, Algorithm::kREGA);
  return detail::run_loop(obj, dict, cfg, std::move(reference),
                          [&](const GreedyState& s, double delta, auto& rng) -> std::optional<SearchResult> {
                            const Vector& G = s.G.vector();
                            SearchResult r = joint_dict_line_search(obj, G, dict, detail::search_target(cfg, delta));
                            const std::size_t atom = *r.atom;
                            r = apply_error_mode(r, delta, cfg.error_mode, rng,
                                                 relaxed_step_space(obj, G, dict[atom]));
                            r.atom = atom;
                            return r;
                          });
}

// Weak Greedy Algorithm with Free Relaxation: G_m = (1-w) G_{m-1} + lambda phi.
inline RunTrace run_wgafr(const ConvexObjective& obj, const Dictionary& dict, const AlgorithmConfig& cfg,
                          std::optional<Reference> reference = std::nullopt) {
  detail::check_instance(obj, dict, cfg, Algorithm::kWGAFR);
  return detail::run_loop(obj, dict, cfg, std::move(reference),
                          [&](const GreedyState& s, double delta, auto& rng) -> std::optional<SearchResult> {
                            const Vector& G = s.G.vector();
                            const AtomChoice choice =
                                weak_argmax_frank_wolfe(obj.gradient(G), dict, cfg.weakness(s.m));
                            if (choice.stationary) return std::nullopt;
                            const Vector& phi = dict[choice.index];
                            SearchResult r = free_relaxation_search(obj, G, phi, detail::search_target(cfg, delta),
                                                                    cfg.w_max);
                            r = apply_error_mode(r, delta, cfg.error_mode, rng, free_step_space(obj, G, phi, r.box));
                            r.atom = choice.index;
                            return r;
                          });
}

// E-Greedy Algorithm with Free Relaxation: joint search over atoms and (w, lambda).
inline RunTrace run_egafr(const ConvexObjective& obj, const Dictionary& dict, const AlgorithmConfig& cfg,
                          std::optional<Reference> reference = std::nullopt) {
  detail::check_instance(obj, dict, cfg, Algorithm::kEGAFR);
  return detail::run_loop(obj, dict, cfg, std::move(reference),
                          [&](const GreedyState& s, double delta, auto& rng) -> std::optional<SearchResult> {
                            const Vector& G = s.G.vector();
                            SearchResult r =
                                joint_dict_free_search(obj, G, dict, detail::search_target(cfg, delta), cfg.w_max);
                            const std::size_t atom = *r.atom;
                            r = apply_error_mode(r, delta, cfg.error_mode, rng,
                                                 free_step_space(obj, G, dict[atom], r.box));
                            r.atom = atom;
                            return r;
                          });
}

inline RunTrace run(const ConvexObjective& obj, const Dictionary& dict, const AlgorithmConfig& cfg,
                    std::optional<Reference> reference = std::nullopt) {
  switch (cfg.algorithm) {
    case Algorithm::kWRGA: return run_wrga(obj, dict, cfg, std::move(reference));
    case Algorithm::kREGA: return run_rega(obj, dict, cfg, std::move(reference));
    case Algorithm::kWGAFR: return run_wgafr(obj, dict, cfg, std::move(reference));
    case Algorithm::kEGAFR: return run_egafr(obj, dict, cfg, std::move(reference));
  }
  throw InvalidArgument("unknown algorithm");
}

}  // namespace greedy
