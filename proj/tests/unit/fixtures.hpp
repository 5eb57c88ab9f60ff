#pragma once

#include "ovsafe/model.hpp"

namespace fixture {

// Same values as configs/canonical.json.
inline ovsafe::ModelParams canonical() { return {1.0, 1.0, 1.0, 0.9, 1.0, 0.0}; }

inline const ovsafe::Model& canonical_model() {
  static const ovsafe::Model m(canonical());
  return m;
}

}  // namespace fixture
