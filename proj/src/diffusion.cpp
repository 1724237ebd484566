#include "sheafdiff/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "laplacian_detail.hpp"
#include "sheafdiff/errors.hpp"
#include "sheafdiff/spectral.hpp"

namespace sheafdiff {

double StepSizePolicy::initial_step(double lipschitz_constant, std::size_t delay_bound) const {
  switch (mode) {
    case Mode::kFixed:
      if (!(gamma > 0.0)) throw ConfigurationError("fixed step size must be positive");
      return gamma;
    case Mode::kAuto:
    case Mode::kLipschitz: {
      if (!(safety > 0.0)) throw ConfigurationError("step size safety factor must be positive");
      if (lipschitz_constant <= 0.0) return safety;
      const double scale = mode == Mode::kAuto ? static_cast<double>(delay_bound + 1) : 1.0;
      return safety / (lipschitz_constant * scale);
    }
  }
  return gamma;
}

Cochain0 sync_step(const CellularSheaf& sheaf, const PotentialSet& potentials,
                   const Cochain0& x, double gamma) {
  return x - gamma * nonlinear_laplacian_apply(sheaf, potentials, x);
}

std::vector<AgentState> make_agents(const CellularSheaf& sheaf, const Cochain0& x0) {
  sheaf.check_c0(x0);
  std::vector<AgentState> agents(sheaf.vertex_count());
  for (VertexId i = 0; i < sheaf.vertex_count(); ++i) {
    auto& a = agents[i];
    a.own = sheaf.vertex_block(x0, i);
    const auto& incidences = sheaf.graph().incidences(i);
    a.neighbor_cache.reserve(incidences.size());
    for (const auto& inc : incidences) {
      a.neighbor_cache.emplace_back(sheaf.vertex_block(x0, inc.neighbor));
    }
    a.cache_stamp.assign(incidences.size(), 0);
  }
  return agents;
}

Cochain0 assemble(const CellularSheaf& sheaf, std::span<const AgentState> agents) {
  if (agents.size() != sheaf.vertex_count()) {
    throw StructuralError("expected " + std::to_string(sheaf.vertex_count()) + " agents, got " +
                          std::to_string(agents.size()));
  }
  Cochain0 x = sheaf.zero_c0();
  for (VertexId i = 0; i < agents.size(); ++i) sheaf.vertex_block(x, i) = agents[i].own;
  return x;
}

namespace {

// Position of edge e inside the incidence list of vertex j.
std::size_t slot_of(const Graph& graph, VertexId j, EdgeId e) {
  const auto& incidences = graph.incidences(j);
  for (std::size_t k = 0; k < incidences.size(); ++k) {
    if (incidences[k].edge == e) return k;
  }
  throw StructuralError("edge " + std::to_string(e) + " is not incident to vertex " +
                        std::to_string(j));
}

}  // namespace

std::size_t async_tick(std::vector<AgentState>& agents, AsyncSchedule& schedule,
                       const CellularSheaf& sheaf, const PotentialSet& potentials,
                       double gamma, std::size_t tick, AsyncAudit* audit) {
  const Graph& graph = sheaf.graph();
  const std::size_t n = sheaf.vertex_count();
  if (agents.size() != n || schedule.agent_count() != n) {
    throw StructuralError("agents, schedule and sheaf disagree on the number of vertices");
  }
  const std::size_t bound = schedule.delay_bound();

  // Broadcast phase: values sent at `tick` are visible to this tick's updates.
  for (VertexId i = 0; i < n; ++i) {
    if (!schedule.broadcasts_at(i, tick)) continue;
    for (const auto& inc : graph.incidences(i)) {
      auto& receiver = agents[inc.neighbor];
      const std::size_t slot = slot_of(graph, inc.neighbor, inc.edge);
      receiver.neighbor_cache[slot] = agents[i].own;
      receiver.cache_stamp[slot] = tick;
    }
    agents[i].last_broadcast_tick = tick;
    schedule.resample_broadcast_phase(i);
    if (audit) ++audit->broadcasts;
  }

  // Compute phase. An update reads only the agent's own value and its caches,
  // so applying updates in place does not leak into other agents this tick.
  detail::BlockScratch scratch;
  Vector block;
  std::size_t updated = 0;
  for (VertexId i = 0; i < n; ++i) {
    if (!schedule.updates_at(i, tick)) continue;
    auto& a = agents[i];
    if (audit) {
      for (std::size_t stamp : a.cache_stamp) {
        const std::size_t age = tick - stamp;
        audit->max_staleness = std::max(audit->max_staleness, age);
        if (age > bound) ++audit->staleness_violations;
      }
      const std::size_t gap = a.last_update_tick ? tick - *a.last_update_tick : tick + 1;
      audit->max_update_gap = std::max(audit->max_update_gap, gap);
      if (gap > bound + 1) ++audit->gap_violations;
      ++audit->updates;
    }
    detail::accumulate_block(sheaf, potentials, i, a.own, a.neighbor_cache, block, scratch);
    a.own -= gamma * block;
    a.last_update_tick = tick;
    schedule.resample_update_phase(i);
    ++updated;
  }
  return updated;
}

ProgressTracker::ProgressTracker(std::size_t delay_bound) : window_(delay_bound + 1, 0.0) {}

void ProgressTracker::push_step(double squared_step) {
  sum_ -= window_[next_];
  window_[next_] = squared_step;
  sum_ += squared_step;
  next_ = (next_ + 1) % window_.size();
  ++count_;
  // Re-sum periodically so cancellation error does not accumulate.
  if (next_ == 0) {
    sum_ = 0.0;
    for (double v : window_) sum_ += v;
  }
}

ProgressMetrics progress_metrics(const CellularSheaf& sheaf, const PotentialSet& potentials,
                                 std::span<const Cochain0> history, std::size_t delay_bound,
                                 double f_star) {
  if (history.empty()) throw std::invalid_argument("progress_metrics needs at least one state");
  ProgressMetrics out;
  out.alpha = dirichlet_energy(sheaf, potentials, history.back()) - f_star;
  const std::size_t want = delay_bound + 2;
  out.underfull = history.size() < want;
  const std::size_t first = history.size() > want ? history.size() - want : 0;
  for (std::size_t k = first; k + 1 < history.size(); ++k) {
    out.beta += (history[k + 1] - history[k]).squaredNorm();
  }
  return out;
}

namespace {

struct DivergenceDetected {};

constexpr double kDivergenceRelIncrease = 1e-6;
constexpr int kDivergenceStreak = 10;

class SyncStepper {
 public:
  SyncStepper(const CellularSheaf& sheaf, const PotentialSet& potentials, const Cochain0&,
              double gamma)
      : sheaf_(sheaf), potentials_(potentials), gamma_(gamma) {}

  std::size_t step(std::size_t, Cochain0& x) {
    x = sync_step(sheaf_, potentials_, x, gamma_);
    return sheaf_.vertex_count();
  }
  bool caches_fresh(std::size_t) const { return true; }
  AsyncAudit audit() const { return {}; }

 private:
  const CellularSheaf& sheaf_;
  const PotentialSet& potentials_;
  double gamma_;
};

class AsyncStepper {
 public:
  AsyncStepper(const CellularSheaf& sheaf, const PotentialSet& potentials, const Cochain0& x0,
               double gamma, std::size_t delay_bound, std::uint64_t seed,
               const MixtureSpec& mixture)
      : sheaf_(sheaf),
        potentials_(potentials),
        gamma_(gamma),
        agents_(make_agents(sheaf, x0)),
        schedule_(sample_schedule(delay_bound, sheaf.vertex_count(), seed, mixture)) {}

  std::size_t step(std::size_t tick, Cochain0& x) {
    const std::size_t updated =
        async_tick(agents_, schedule_, sheaf_, potentials_, gamma_, tick, &audit_);
    if (updated > 0) {
      for (VertexId i = 0; i < agents_.size(); ++i) sheaf_.vertex_block(x, i) = agents_[i].own;
    }
    return updated;
  }

  // Cache ages as of the last completed tick (t - 1).
  bool caches_fresh(std::size_t tick) const {
    if (tick == 0) return true;
    for (const auto& a : agents_) {
      for (std::size_t stamp : a.cache_stamp) {
        if (tick - 1 - stamp > schedule_.delay_bound()) return false;
      }
    }
    return true;
  }
  AsyncAudit audit() const { return audit_; }

 private:
  const CellularSheaf& sheaf_;
  const PotentialSet& potentials_;
  double gamma_;
  std::vector<AgentState> agents_;
  AsyncSchedule schedule_;
  AsyncAudit audit_;
};

template <class Stepper>
DiffusionTrace run_attempt(const CellularSheaf& sheaf, const PotentialSet& potentials,
                           const std::optional<MinimizerSet>& minimizers, const Cochain0& x0,
                           std::size_t delay_bound, double gamma, const StoppingRule& stop,
                           Stepper stepper) {
  DiffusionTrace trace;
  trace.delay_bound = delay_bound;
  trace.gamma = gamma;
  const double f_star = minimizers ? minimizers->f_star : 0.0;
  trace.f_star = f_star;
  trace.offset_in_image = minimizers ? minimizers->offset_in_image : true;

  EnergyResidualEvaluator evaluate(sheaf, potentials);
  ProgressTracker tracker(delay_bound);
  const std::size_t period = delay_bound + 1;
  const std::size_t record_every = std::max<std::size_t>(1, stop.record_every);
  const double dist0 = minimizers ? minimizers->distance(x0) : 0.0;

  Cochain0 x = x0;
  Cochain0 previous;
  EnergyResidual current = evaluate(x);
  int streak = 0;
  std::size_t t = 0;
  for (;; ++t) {
    const double alpha = current.energy - f_star;
    if (t > 0 && !tracker.window_full()) trace.beta_warmup = true;
    if (t % period == 0) trace.period_alpha.push_back(alpha);

    const bool done = current.residual_norm <= stop.residual_tol && stepper.caches_fresh(t);
    const bool last = done || t >= stop.max_ticks;
    if (t % record_every == 0 || last) {
      TraceRecord rec;
      rec.tick = t;
      rec.energy = current.energy;
      rec.alpha = alpha;
      rec.beta = tracker.beta();
      if (!minimizers) {
        rec.rel_error = std::numeric_limits<double>::quiet_NaN();
      } else {
        rec.rel_error = dist0 > 0.0 ? minimizers->distance(x) / dist0 : 0.0;
      }
      rec.iterate_norm = x.norm();
      rec.residual = current.residual_norm;
      trace.records.push_back(rec);
    }
    if (done) {
      trace.converged_at = t;
      break;
    }
    if (t >= stop.max_ticks) break;

    previous = x;
    if (stepper.step(t, x) == 0) {
      tracker.push_step(0.0);
      continue;
    }
    tracker.push_step((x - previous).squaredNorm());
    const EnergyResidual next = evaluate(x);
    if (!std::isfinite(next.energy) || !std::isfinite(next.residual_norm)) {
      throw DivergenceDetected{};
    }
    if (next.energy > current.energy + kDivergenceRelIncrease * std::abs(current.energy)) {
      if (++streak >= kDivergenceStreak) throw DivergenceDetected{};
    } else {
      streak = 0;
    }
    current = next;
  }
  trace.last_tick = t;
  trace.final_residual = current.residual_norm;
  trace.final_state = std::move(x);
  trace.audit = stepper.audit();
  return trace;
}

template <class MakeStepper>
DiffusionTrace run_with_policy(const CellularSheaf& sheaf, const PotentialSet& potentials,
                               const Cochain0& x0, std::size_t delay_bound,
                               const StepSizePolicy& policy, const StoppingRule& stop,
                               MakeStepper make_stepper) {
  potentials.validate_for(sheaf);
  sheaf.check_c0(x0);
  std::optional<MinimizerSet> minimizers;
  if (potentials.is_quadratic_family()) minimizers = energy_minimum(sheaf, potentials);
  const double K = lipschitz_constant(spectrum(sheaf), potentials);
  double gamma = policy.initial_step(K, delay_bound);
  const std::size_t max_halvings =
      policy.mode == StepSizePolicy::Mode::kFixed ? 0 : policy.max_halvings;
  for (std::size_t halvings = 0;; ++halvings) {
    try {
      DiffusionTrace trace = run_attempt(sheaf, potentials, minimizers, x0, delay_bound, gamma,
                                         stop, make_stepper(gamma));
      trace.halvings = halvings;
      return trace;
    } catch (const DivergenceDetected&) {
      if (halvings >= max_halvings) {
        throw StepSizeError("diffusion diverged with step size " + std::to_string(gamma) +
                            " after " + std::to_string(halvings) + " halvings");
      }
      gamma *= 0.5;
    }
  }
}

}  // namespace

DiffusionTrace run_sync(const CellularSheaf& sheaf, const PotentialSet& potentials,
                        const Cochain0& x0, const StepSizePolicy& policy,
                        const StoppingRule& stop) {
  return run_with_policy(sheaf, potentials, x0, 0, policy, stop, [&](double gamma) {
    return SyncStepper(sheaf, potentials, x0, gamma);
  });
}

DiffusionTrace run_async(const CellularSheaf& sheaf, const PotentialSet& potentials,
                         const Cochain0& x0, std::size_t delay_bound,
                         const StepSizePolicy& policy, const StoppingRule& stop,
                         std::uint64_t rng_seed, const MixtureSpec& mixture) {
  return run_with_policy(sheaf, potentials, x0, delay_bound, policy, stop, [&](double gamma) {
    return AsyncStepper(sheaf, potentials, x0, gamma, delay_bound, rng_seed, mixture);
  });
}

}  // namespace sheafdiff
