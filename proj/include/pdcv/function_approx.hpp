#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pdcv/environments.hpp"
#include "pdcv/mdp.hpp"

namespace pdcv {

/// Interface shared by the tabular and tile-coded action-value functions.
/// `update` moves Q(obs, a) toward `target` and returns the new Q(obs, a).
template <class Q>
concept ActionValueFunction =
    requires(Q& q, const Q& cq, const typename Q::Observation& obs, ActionId a,
             std::span<double> out) {
      typename Q::Observation;
      { cq.value(obs, a) } -> std::convertible_to<double>;
      { cq.action_values(obs, out) };
      { cq.action_count(obs) } -> std::convertible_to<std::size_t>;
      { q.update(obs, a, 0.5, 0.0) } -> std::convertible_to<double>;
    };

/// Action values stored per (state, action), initialised to a constant.
class TabularQ {
 public:
  using Observation = StateId;

  TabularQ(std::size_t state_count, std::size_t action_count, double initial = 0.0);
  /// Variable action counts per state, e.g. taken from a TabularMdp.
  explicit TabularQ(const TabularMdp& model, double initial = 0.0);

  std::size_t state_count() const { return offsets_.size() - 1; }
  std::size_t action_count(StateId s) const { return offsets_.at(s + 1) - offsets_.at(s); }

  double value(StateId s, ActionId a) const { return values_[index(s, a)]; }
  double& at(StateId s, ActionId a) { return values_[index(s, a)]; }
  std::span<const double> row(StateId s) const {
    return std::span<const double>(values_).subspan(offsets_[s], action_count(s));
  }
  void action_values(StateId s, std::span<double> out) const;
  double update(StateId s, ActionId a, double step_size, double target);

  /// Entry-wise sum; both tables must share a layout.
  TabularQ operator+(const TabularQ& other) const;

 private:
  std::size_t index(StateId s, ActionId a) const { return offsets_[s] + a; }

  std::vector<std::size_t> offsets_;
  std::vector<double> values_;
};

/// Grid tile coder with explicit (unhashed) indexing. Tiling i is displaced
/// along dimension d by i * displacement[d] / tilings tile widths, wrapped to
/// one tile width. Each tiling has tiles_per_dimension + 1 tiles per
/// dimension so displaced tilings still cover the whole range.
struct TileCoderConfig {
  std::size_t tilings = 16;
  std::size_t tiles_per_dimension = 8;
  std::vector<double> low;
  std::vector<double> high;
  std::vector<std::size_t> displacement;  // consecutive odd numbers: 1, 3, 5, ...

  /// Coder over the mountain car (position, velocity) box.
  static TileCoderConfig mountain_car();

  std::size_t dimensions() const { return low.size(); }
  std::size_t tiles_per_tiling() const;
  std::size_t tile_count() const { return tilings * tiles_per_tiling(); }
};

class TileCoder {
 public:
  /// Throws std::invalid_argument on inconsistent ranges or displacements.
  explicit TileCoder(TileCoderConfig config);

  const TileCoderConfig& config() const { return config_; }
  std::size_t tilings() const { return config_.tilings; }
  std::size_t tile_count() const { return config_.tile_count(); }

  /// Writes one tile index per tiling into `out` (size == tilings()). Inputs
  /// outside the configured box are clipped to its boundary.
  void active_tiles(std::span<const double> coords, std::span<std::size_t> out) const;
  std::vector<std::size_t> active_tiles(std::span<const double> coords) const;

 private:
  TileCoderConfig config_;
  std::vector<double> inv_width_;
  // shift_[i * dims + d]: displacement of tiling i along d, in tile widths.
  std::vector<double> shift_;
};

inline std::array<double, 2> coordinates(const MountainCarState& s) {
  return {s.position, s.velocity};
}

/// Linear action values over tile-coded features, one feature block per
/// action. The user-facing step size is divided by the number of tilings.
template <class Obs>
class LinearQ {
 public:
  using Observation = Obs;

  LinearQ(TileCoder coder, std::size_t action_count, double initial_q = 0.0)
      : coder_(std::move(coder)),
        action_count_(action_count),
        weights_(coder_.tile_count() * action_count,
                 initial_q / static_cast<double>(coder_.tilings())),
        scratch_(coder_.tilings()) {}

  const TileCoder& coder() const { return coder_; }
  std::size_t action_count(const Obs&) const { return action_count_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> weights() { return weights_; }
  std::size_t feature_count() const { return weights_.size(); }

  double value(const Obs& obs, ActionId a) const {
    tiles(obs);
    return sum_block(a);
  }

  void action_values(const Obs& obs, std::span<double> out) const {
    tiles(obs);
    for (ActionId a = 0; a < action_count_; ++a) out[a] = sum_block(a);
  }

  double update(const Obs& obs, ActionId a, double step_size, double target) {
    tiles(obs);
    const double old = sum_block(a);
    const double delta =
        step_size / static_cast<double>(coder_.tilings()) * (target - old);
    const std::size_t base = a * coder_.tile_count();
    for (std::size_t idx : scratch_) weights_[base + idx] += delta;
    return sum_block(a);
  }

 private:
  void tiles(const Obs& obs) const {
    const auto c = coordinates(obs);
    coder_.active_tiles(c, scratch_);
  }
  double sum_block(ActionId a) const {
    const std::size_t base = a * coder_.tile_count();
    double q = 0.0;
    for (std::size_t idx : scratch_) q += weights_[base + idx];
    return q;
  }

  TileCoder coder_;
  std::size_t action_count_;
  std::vector<double> weights_;
  mutable std::vector<std::size_t> scratch_;
};

/// Q(obs, a) under any representation.
template <ActionValueFunction Q>
double q_value(const Q& q, const typename Q::Observation& obs, ActionId a) {
  return q.value(obs, a);
}

/// sum_a row[a] * Q(obs, a).
template <ActionValueFunction Q>
double expected_q(const Q& q, const typename Q::Observation& obs, std::span<const double> row) {
  std::array<double, 16> buf{};
  std::vector<double> heap;
  std::span<double> vals;
  if (row.size() <= buf.size()) {
    vals = std::span<double>(buf).first(row.size());
  } else {
    heap.resize(row.size());
    vals = heap;
  }
  q.action_values(obs, vals);
  double e = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) e += row[a] * vals[a];
  return e;
}

/// Moves Q(obs, a) toward `target`. Returns the new Q(obs, a); a non-finite
/// target leaves Q untouched and returns NaN so the caller can flag the run.
template <ActionValueFunction Q>
double apply_update(Q& q, const typename Q::Observation& obs, ActionId a, double step_size,
                    double target) {
  if (!std::isfinite(target)) return std::nan("");
  return q.update(obs, a, step_size, target);
}

/// One line of a value-function snapshot.
struct SnapshotRow {
  std::string key;
  ActionId action;
  double value;
};

std::vector<SnapshotRow> snapshot(const TabularQ& q);
std::vector<SnapshotRow> snapshot(const LinearQ<MountainCarState>& q,
                                  std::span<const MountainCarState> observations);

/// CSV with header `state_or_obs_key,action,value`.
void write_snapshot(std::ostream& out, std::span<const SnapshotRow> rows);

}  // namespace pdcv
