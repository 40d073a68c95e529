#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dsc/errors.hpp"
#include "dsc/hexmesh.hpp"
#include "dsc/vec3.hpp"

namespace dsc {

/// Ports live at integer multiples of tau, nodes half a step later.
struct TimeGrid {
  double tau = 0.0;
  std::uint64_t step = 0;

  double port_time() const { return static_cast<double>(step) * tau; }
  double node_time() const { return (static_cast<double>(step) + 0.5) * tau; }
};

/// Tangential channel values of one face slot; the entry for the face-normal
/// direction is unused and kept at zero.
using Channels = std::array<double, 3>;

/// One scalar field (or one velocity component) in node/port form with a
/// history of depth two.
struct ScalarField {
  std::vector<double> node;       // current nodal value, one per cell
  std::vector<double> node_prev;  // nodal value one step earlier
  std::vector<double> port;       // current port value, one per face slot
  std::vector<double> port_prev;  // port value one step earlier
  std::vector<Channels> chan;     // tangential channels per face slot

  void resize(std::size_t ncells) {
    node.assign(ncells, 0.0);
    node_prev.assign(ncells, 0.0);
    port.assign(ncells * kFacesPerCell, 0.0);
    port_prev.assign(ncells * kFacesPerCell, 0.0);
    chan.assign(ncells * kFacesPerCell, Channels{});
  }

  std::size_t num_cells() const { return node.size(); }

  void rotate_nodes() { std::copy(node.begin(), node.end(), node_prev.begin()); }
  void rotate_ports() { std::copy(port.begin(), port.end(), port_prev.begin()); }

  bool all_finite() const {
    auto fin = [](double v) { return std::isfinite(v); };
    return std::all_of(node.begin(), node.end(), fin) &&
           std::all_of(port.begin(), port.end(), fin) &&
           std::all_of(chan.begin(), chan.end(), [&](const Channels& c) {
             return fin(c[0]) && fin(c[1]) && fin(c[2]);
           });
  }
};

enum class Field : int { T = 0, Ux = 1, Uy = 2, Uz = 3, P = 4 };
inline constexpr int kNumFields = 5;
inline constexpr std::array<const char*, kNumFields> kFieldNames{"T", "ux", "uy", "uz", "p"};

/// Temperature (K), velocity (m/s) and pressure (Pa) on a mesh.
class FieldStore {
 public:
  FieldStore() = default;
  explicit FieldStore(std::size_t ncells) {
    for (auto& f : fields_) f.resize(ncells);
  }

  std::size_t num_cells() const { return fields_[0].num_cells(); }

  ScalarField& operator[](Field f) { return fields_[static_cast<int>(f)]; }
  const ScalarField& operator[](Field f) const { return fields_[static_cast<int>(f)]; }
  ScalarField& field(int i) { return fields_.at(static_cast<std::size_t>(i)); }
  const ScalarField& field(int i) const { return fields_.at(static_cast<std::size_t>(i)); }

  ScalarField& T() { return (*this)[Field::T]; }
  const ScalarField& T() const { return (*this)[Field::T]; }
  ScalarField& p() { return (*this)[Field::P]; }
  const ScalarField& p() const { return (*this)[Field::P]; }
  ScalarField& u(int k) { return fields_[1 + k]; }
  const ScalarField& u(int k) const { return fields_[1 + k]; }

  Vec3 node_velocity(CellId c) const { return {u(0).node[c], u(1).node[c], u(2).node[c]}; }
  Vec3 port_velocity(std::size_t slot) const {
    return {u(0).port[slot], u(1).port[slot], u(2).port[slot]};
  }
  void set_port_velocity(std::size_t slot, const Vec3& v) {
    u(0).port[slot] = v.x;
    u(1).port[slot] = v.y;
    u(2).port[slot] = v.z;
  }

  void rotate_nodes() {
    for (auto& f : fields_) f.rotate_nodes();
  }
  void rotate_ports() {
    for (auto& f : fields_) f.rotate_ports();
  }

  /// Throws NonFiniteState naming the first offending field.
  void check_finite(const char* phase) const {
    for (int i = 0; i < kNumFields; ++i)
      if (!fields_[i].all_finite())
        throw NonFiniteState(std::string("non-finite ") + kFieldNames[i] + " after " + phase);
  }

  friend bool operator==(const FieldStore& a, const FieldStore& b) {
    for (int i = 0; i < kNumFields; ++i) {
      const auto& x = a.fields_[i];
      const auto& y = b.fields_[i];
      if (x.node != y.node || x.node_prev != y.node_prev || x.port != y.port ||
          x.port_prev != y.port_prev || x.chan != y.chan)
        return false;
    }
    return true;
  }

 private:
  std::array<ScalarField, kNumFields> fields_;
};

}  // namespace dsc
