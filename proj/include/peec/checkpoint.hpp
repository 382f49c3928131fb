#pragma once
#include <string>
#include <vector>

#include "peec/json_io.hpp"
#include "peec/nn.hpp"

namespace peec {

struct CheckpointBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<double> data;
};

inline constexpr int kCheckpointVersion = 1;

// Writes base.bin (concatenated little-endian float32 blocks in manifest
// order) and base.json (names/shapes/offsets plus caller extras).
void save_checkpoint(const std::string& base, const std::vector<CheckpointBlock>& blocks,
                     const json& extra);
std::pair<std::vector<CheckpointBlock>, json> load_checkpoint(const std::string& base);

// store <-> checkpoint helpers; block names get "prefix/" prepended
void append_store_blocks(std::vector<CheckpointBlock>& out, const std::string& prefix,
                         const ParamStore& store);
void append_adam_blocks(std::vector<CheckpointBlock>& out, const std::string& prefix,
                        const ParamStore& store, const Adam& adam);
void restore_store_blocks(const std::vector<CheckpointBlock>& blocks, const std::string& prefix,
                          ParamStore& store);
void restore_adam_blocks(const std::vector<CheckpointBlock>& blocks, const std::string& prefix,
                         const ParamStore& store, Adam& adam);

}  // namespace peec
