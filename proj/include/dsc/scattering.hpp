#pragma once

// Incident/outgoing decomposition of the port and node histories, kept as a
// diagnostic next to the field updates:
//   z_in(t)       = z^p(t)       - z_out(t - tau/2)
//   z_out(t+tau/2) = z^n(t+tau/2) - z_in(t)
// per channel (cell, face) and field, with zero history before the first
// recorded port level. The node value of a channel is the node of its cell.

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "dsc/field_store.hpp"

namespace dsc {

/// A port value paired with its nodal image.
template <class V>
struct ChannelPair {
  V port;
  V image;
  friend bool operator==(const ChannelPair&, const ChannelPair&) = default;
};

using ChannelState = ChannelPair<double>;

/// Swaps port and nodal image. Applying it twice is the identity.
template <class V>
constexpr ChannelPair<V> node_boundary_map(const ChannelPair<V>& s) {
  return {s.image, s.port};
}

class ScatterRecorder {
 public:
  explicit ScatterRecorder(std::size_t ncells) : ncells_(ncells) {
    for (int f = 0; f < kNumFields; ++f) {
      z_in_[f].assign(ncells * kFacesPerCell, 0.0);
      z_out_[f].assign(ncells * kFacesPerCell, 0.0);
      z_out_prev_[f].assign(ncells * kFacesPerCell, 0.0);
    }
  }

  /// Records port level t. Must alternate with record_nodes.
  void record_ports(const FieldStore& fs) {
    for (int f = 0; f < kNumFields; ++f) {
      const auto& z = fs.field(f);
      z_out_prev_[f] = z_out_[f];
      for (std::size_t s = 0; s < z.port.size(); ++s) z_in_[f][s] = z.port[s] - z_out_prev_[f][s];
    }
  }

  /// Records node level t + tau/2.
  void record_nodes(const FieldStore& fs) {
    for (int f = 0; f < kNumFields; ++f) {
      const auto& z = fs.field(f);
      for (std::size_t s = 0; s < z_out_[f].size(); ++s)
        z_out_[f][s] = z.node[s / kFacesPerCell] - z_in_[f][s];
    }
  }

  const std::vector<double>& z_in(int field) const { return z_in_[field]; }
  const std::vector<double>& z_out(int field) const { return z_out_[field]; }
  /// Outgoing values of the previous node level, the ones z_in was built from.
  const std::vector<double>& z_out_prev(int field) const { return z_out_prev_[field]; }

  /// max |z^p - (z_out(t - tau/2) + z_in(t))| / max(1, |z^p|) over all channels.
  double port_identity_error(const FieldStore& fs) const {
    double e = 0.0;
    for (int f = 0; f < kNumFields; ++f) {
      const auto& z = fs.field(f);
      for (std::size_t s = 0; s < z.port.size(); ++s)
        e = std::max(e, std::abs(z.port[s] - (z_out_prev_[f][s] + z_in_[f][s])) /
                            std::max(1.0, std::abs(z.port[s])));
    }
    return e;
  }

  /// max |z^n - (z_in(t) + z_out(t + tau/2))| / max(1, |z^n|) over all channels.
  double node_identity_error(const FieldStore& fs) const {
    double e = 0.0;
    for (int f = 0; f < kNumFields; ++f) {
      const auto& z = fs.field(f);
      for (std::size_t s = 0; s < z_out_[f].size(); ++s) {
        const double n = z.node[s / kFacesPerCell];
        e = std::max(e, std::abs(n - (z_in_[f][s] + z_out_[f][s])) / std::max(1.0, std::abs(n)));
      }
    }
    return e;
  }

  std::size_t num_cells() const { return ncells_; }

 private:
  std::size_t ncells_;
  std::array<std::vector<double>, kNumFields> z_in_, z_out_, z_out_prev_;
};

}  // namespace dsc
