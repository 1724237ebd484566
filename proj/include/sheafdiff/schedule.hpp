#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace sheafdiff {

/// Two-component normal mixtures for the per-agent bounds, centers given as
/// fractions of B. Component standard deviation is sd_scale * (center + 1).
struct MixtureSpec {
  double update_fast = 0.05;
  double update_slow = 0.5;
  double broadcast_fast = 0.1;
  double broadcast_slow = 0.8;
  double sd_scale = 0.1;
};

/// Per-agent update/broadcast periods and phases. Agent i computes at tick t
/// when t mod b_i == p_i and broadcasts when t mod b'_i == p'_i; phases are
/// resampled from the schedule's own RNG after every update and broadcast.
class AsyncSchedule {
 public:
  AsyncSchedule(std::size_t delay_bound, std::vector<std::size_t> update_bound,
                std::vector<std::size_t> broadcast_bound, std::vector<std::size_t> update_phase,
                std::vector<std::size_t> broadcast_phase, std::uint64_t rng_seed);

  std::size_t delay_bound() const { return delay_bound_; }
  std::size_t agent_count() const { return update_bound_.size(); }
  std::uint64_t rng_seed() const { return rng_seed_; }

  std::size_t update_bound(std::size_t i) const { return update_bound_[i]; }
  std::size_t broadcast_bound(std::size_t i) const { return broadcast_bound_[i]; }
  std::size_t update_phase(std::size_t i) const { return update_phase_[i]; }
  std::size_t broadcast_phase(std::size_t i) const { return broadcast_phase_[i]; }

  bool updates_at(std::size_t i, std::size_t tick) const {
    return tick % update_bound_[i] == update_phase_[i];
  }
  bool broadcasts_at(std::size_t i, std::size_t tick) const {
    return tick % broadcast_bound_[i] == broadcast_phase_[i];
  }

  void resample_update_phase(std::size_t i);
  void resample_broadcast_phase(std::size_t i);

 private:
  std::size_t delay_bound_;
  std::vector<std::size_t> update_bound_;
  std::vector<std::size_t> broadcast_bound_;
  std::vector<std::size_t> update_phase_;
  std::vector<std::size_t> broadcast_phase_;
  std::uint64_t rng_seed_;
  // Phase resampling stream, distinct from the one that drew the bounds.
  std::mt19937_64 rng_;
};

/// Draws b_i / b'_i from the mixtures (rounded, clamped to [1, max(1, B)])
/// and uniform phases. B = 0 yields the fully synchronous schedule.
AsyncSchedule sample_schedule(std::size_t delay_bound, std::size_t vertex_count,
                              std::uint64_t rng_seed, const MixtureSpec& mixture = {});

}  // namespace sheafdiff
