#include "pdcv/function_approx.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace pdcv {

TabularQ::TabularQ(std::size_t state_count, std::size_t action_count, double initial)
    : offsets_(state_count + 1), values_(state_count * action_count, initial) {
  for (std::size_t s = 0; s <= state_count; ++s) offsets_[s] = s * action_count;
}

TabularQ::TabularQ(const TabularMdp& model, double initial) : offsets_(model.state_count() + 1) {
  for (StateId s = 0; s < model.state_count(); ++s) {
    offsets_[s + 1] = offsets_[s] + model.action_count(s);
  }
  values_.assign(offsets_.back(), initial);
}

void TabularQ::action_values(StateId s, std::span<double> out) const {
  const auto r = row(s);
  std::copy(r.begin(), r.end(), out.begin());
}

double TabularQ::update(StateId s, ActionId a, double step_size, double target) {
  double& q = values_[index(s, a)];
  q += step_size * (target - q);
  return q;
}

TabularQ TabularQ::operator+(const TabularQ& other) const {
  if (offsets_ != other.offsets_) throw std::invalid_argument("TabularQ: layout mismatch");
  TabularQ sum = *this;
  for (std::size_t i = 0; i < values_.size(); ++i) sum.values_[i] += other.values_[i];
  return sum;
}

TileCoderConfig TileCoderConfig::mountain_car() {
  TileCoderConfig c;
  c.low = {MountainCar::kMinPosition, -MountainCar::kMaxSpeed};
  c.high = {MountainCar::kMaxPosition, MountainCar::kMaxSpeed};
  c.displacement = {1, 3};
  return c;
}

std::size_t TileCoderConfig::tiles_per_tiling() const {
  std::size_t n = 1;
  for (std::size_t d = 0; d < dimensions(); ++d) n *= tiles_per_dimension + 1;
  return n;
}

TileCoder::TileCoder(TileCoderConfig config) : config_(std::move(config)) {
  const std::size_t dims = config_.dimensions();
  if (dims == 0 || config_.high.size() != dims || config_.displacement.size() != dims) {
    throw std::invalid_argument("TileCoder: low/high/displacement must share a nonzero length");
  }
  if (config_.tilings == 0 || config_.tiles_per_dimension == 0) {
    throw std::invalid_argument("TileCoder: tilings and tiles_per_dimension must be positive");
  }
  inv_width_.resize(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    if (!(config_.high[d] > config_.low[d])) throw std::invalid_argument("TileCoder: empty range");
    inv_width_[d] = static_cast<double>(config_.tiles_per_dimension) /
                    (config_.high[d] - config_.low[d]);
  }
  shift_.resize(config_.tilings * dims);
  for (std::size_t i = 0; i < config_.tilings; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      const std::size_t steps = (i * config_.displacement[d]) % config_.tilings;
      shift_[i * dims + d] = static_cast<double>(steps) / static_cast<double>(config_.tilings);
    }
  }
}

void TileCoder::active_tiles(std::span<const double> coords, std::span<std::size_t> out) const {
  const std::size_t dims = config_.dimensions();
  if (coords.size() != dims) throw std::invalid_argument("TileCoder: dimension mismatch");
  if (out.size() != config_.tilings) throw std::invalid_argument("TileCoder: output size mismatch");
  const std::size_t side = config_.tiles_per_dimension + 1;
  std::array<double, 8> scaled{};
  if (dims > scaled.size()) throw std::invalid_argument("TileCoder: too many dimensions");
  for (std::size_t d = 0; d < dims; ++d) {
    const double x = std::clamp(coords[d], config_.low[d], config_.high[d]);
    scaled[d] = (x - config_.low[d]) * inv_width_[d];
  }
  const std::size_t per_tiling = config_.tiles_per_tiling();
  for (std::size_t i = 0; i < config_.tilings; ++i) {
    std::size_t index = 0;
    for (std::size_t d = 0; d < dims; ++d) {
      auto c = static_cast<std::size_t>(scaled[d] + shift_[i * dims + d]);
      c = std::min(c, side - 1);
      index = index * side + c;
    }
    out[i] = i * per_tiling + index;
  }
}

std::vector<std::size_t> TileCoder::active_tiles(std::span<const double> coords) const {
  std::vector<std::size_t> out(config_.tilings);
  active_tiles(coords, out);
  return out;
}

std::vector<SnapshotRow> snapshot(const TabularQ& q) {
  std::vector<SnapshotRow> rows;
  for (StateId s = 0; s < q.state_count(); ++s) {
    for (ActionId a = 0; a < q.action_count(s); ++a) {
      rows.push_back({std::to_string(s), a, q.value(s, a)});
    }
  }
  return rows;
}

std::vector<SnapshotRow> snapshot(const LinearQ<MountainCarState>& q,
                                  std::span<const MountainCarState> observations) {
  std::vector<SnapshotRow> rows;
  char key[64];
  for (const auto& obs : observations) {
    std::snprintf(key, sizeof key, "%.17g;%.17g", obs.position, obs.velocity);
    for (ActionId a = 0; a < q.action_count(obs); ++a) rows.push_back({key, a, q.value(obs, a)});
  }
  return rows;
}

void write_snapshot(std::ostream& out, std::span<const SnapshotRow> rows) {
  out << "state_or_obs_key,action,value\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out << r.key << ',' << r.action << ',' << buf << '\n';
  }
}

}  // namespace pdcv
