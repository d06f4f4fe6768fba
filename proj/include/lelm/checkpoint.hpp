#pragma once

#include "lelm/network.hpp"
#include "lelm/shock_infer.hpp"

#include <optional>
#include <string>

namespace lelm {

/// Trained model as stored on disk: parameters plus, for inverse runs, the
/// inferred speed grid needed to rebuild the geometry.
struct Checkpoint {
  Network net;
  std::optional<SpeedGrid> speeds;
};

/// Binary little-endian format; reload is bit-exact.
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lelm
