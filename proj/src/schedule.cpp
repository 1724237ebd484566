#include "sheafdiff/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sheafdiff {

AsyncSchedule::AsyncSchedule(std::size_t delay_bound, std::vector<std::size_t> update_bound,
                             std::vector<std::size_t> broadcast_bound,
                             std::vector<std::size_t> update_phase,
                             std::vector<std::size_t> broadcast_phase, std::uint64_t rng_seed)
    : delay_bound_(delay_bound),
      update_bound_(std::move(update_bound)),
      broadcast_bound_(std::move(broadcast_bound)),
      update_phase_(std::move(update_phase)),
      broadcast_phase_(std::move(broadcast_phase)),
      rng_seed_(rng_seed),
      rng_(rng_seed ^ 0x5bd1e9955bd1e995ULL) {
  const std::size_t n = update_bound_.size();
  if (broadcast_bound_.size() != n || update_phase_.size() != n || broadcast_phase_.size() != n) {
    throw std::invalid_argument("schedule vectors must have one entry per agent");
  }
  const std::size_t cap = std::max<std::size_t>(1, delay_bound_);
  for (std::size_t i = 0; i < n; ++i) {
    if (update_bound_[i] < 1 || update_bound_[i] > cap || broadcast_bound_[i] < 1 ||
        broadcast_bound_[i] > cap) {
      throw std::invalid_argument("schedule bounds must lie in [1, max(1, B)]");
    }
    if (update_phase_[i] >= update_bound_[i] || broadcast_phase_[i] >= broadcast_bound_[i]) {
      throw std::invalid_argument("schedule phases must lie in [0, bound)");
    }
  }
}

void AsyncSchedule::resample_update_phase(std::size_t i) {
  std::uniform_int_distribution<std::size_t> phase(0, update_bound_[i] - 1);
  update_phase_[i] = phase(rng_);
}

void AsyncSchedule::resample_broadcast_phase(std::size_t i) {
  std::uniform_int_distribution<std::size_t> phase(0, broadcast_bound_[i] - 1);
  broadcast_phase_[i] = phase(rng_);
}

namespace {

std::size_t draw_bound(std::mt19937_64& rng, double fast, double slow, double sd_scale,
                       std::size_t delay_bound) {
  const double b = static_cast<double>(delay_bound);
  std::bernoulli_distribution pick_slow(0.5);
  const double center = (pick_slow(rng) ? slow : fast) * b;
  std::normal_distribution<double> normal(center, sd_scale * (center + 1.0));
  const double cap = static_cast<double>(std::max<std::size_t>(1, delay_bound));
  const double value = std::clamp(std::round(normal(rng)), 1.0, cap);
  return static_cast<std::size_t>(value);
}

}  // namespace

AsyncSchedule sample_schedule(std::size_t delay_bound, std::size_t vertex_count,
                              std::uint64_t rng_seed, const MixtureSpec& mixture) {
  std::mt19937_64 rng(rng_seed);
  std::vector<std::size_t> ub(vertex_count), bb(vertex_count), up(vertex_count),
      bp(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) {
    ub[i] = draw_bound(rng, mixture.update_fast, mixture.update_slow, mixture.sd_scale,
                       delay_bound);
    bb[i] = draw_bound(rng, mixture.broadcast_fast, mixture.broadcast_slow, mixture.sd_scale,
                       delay_bound);
  }
  for (std::size_t i = 0; i < vertex_count; ++i) {
    up[i] = std::uniform_int_distribution<std::size_t>(0, ub[i] - 1)(rng);
    bp[i] = std::uniform_int_distribution<std::size_t>(0, bb[i] - 1)(rng);
  }
  return AsyncSchedule(delay_bound, std::move(ub), std::move(bb), std::move(up), std::move(bp),
                       rng_seed);
}

}  // namespace sheafdiff
