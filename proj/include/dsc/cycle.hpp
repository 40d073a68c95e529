#pragma once

#include <functional>

#include "dsc/field_store.hpp"

namespace dsc {

/// Phases of one update cycle. Empty callbacks are skipped. `reflection`
/// computes the new nodes from the current state and commits them with
/// commit_nodes (which also shifts the node history).
struct CycleOps {
  std::function<void()> connection;
  std::function<void()> cleaning;
  std::function<void()> boundary;
  std::function<void()> smoothing;
  std::function<void()> reflection;
  std::function<void()> after_connection;  // observer, sees ports before cleaning
  std::function<void()> after_ports;       // observer, sees final ports of this level
};

/// Shifts the node history and stores new node values for the given fields.
template <class Writer>
void commit_nodes(FieldStore& fs, Writer&& write) {
  fs.rotate_nodes();
  write(fs);
}

/// Advances ports from t to t + tau and nodes from t + tau/2 to t + 3tau/2.
inline void step_cycle(FieldStore& fs, TimeGrid& tg, const CycleOps& ops) {
  auto run = [&](const std::function<void()>& f, const char* phase) {
    if (!f) return;
    f();
    fs.check_finite(phase);
  };
  fs.rotate_ports();
  run(ops.connection, "connection");
  if (ops.after_connection) ops.after_connection();
  run(ops.cleaning, "cleaning");
  run(ops.boundary, "boundary");
  run(ops.smoothing, "smoothing");
  if (ops.after_ports) ops.after_ports();
  run(ops.reflection, "reflection");
  ++tg.step;
}

}  // namespace dsc
