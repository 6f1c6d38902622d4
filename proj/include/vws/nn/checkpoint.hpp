#pragma once

#include <cstdint>
#include <string>

#include "vws/nn/model.hpp"
#include "vws/nn/train.hpp"

namespace vws::nn {

// Binary model file: versioned header (spec fields, normalization stats,
// provenance seeds/hash) followed by the flat weight vector as
// little-endian 64-bit floats. Writers and readers round-trip bitwise.
struct Checkpoint {
  std::uint32_t format_version = 1;
  ModelSpec spec;
  Normalization norm;
  std::vector<double> weights;
  std::uint64_t config_hash = 0;
  std::uint64_t train_seed = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace vws::nn
