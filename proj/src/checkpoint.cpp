#include "peec/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace peec {

void save_checkpoint(const std::string& base, const std::vector<CheckpointBlock>& blocks,
                     const json& extra) {
  json manifest;
  manifest["version"] = kCheckpointVersion;
  manifest["extra"] = extra;
  json jblocks = json::array();
  std::ofstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("save_checkpoint: cannot open " + base + ".bin");
  size_t offset = 0;
  for (const auto& b : blocks) {
    json jb;
    jb["name"] = b.name;
    jb["rows"] = b.rows;
    jb["cols"] = b.cols;
    jb["offset"] = offset;
    jblocks.push_back(jb);
    for (double v : b.data) {
      float f = static_cast<float>(v);
      bin.write(reinterpret_cast<const char*>(&f), sizeof(float));
    }
    offset += b.data.size();
  }
  manifest["blocks"] = jblocks;
  std::ofstream mf(base + ".json", std::ios::binary);
  if (!mf) throw std::runtime_error("save_checkpoint: cannot open " + base + ".json");
  mf << manifest.dump(2) << "\n";
}

std::pair<std::vector<CheckpointBlock>, json> load_checkpoint(const std::string& base) {
  std::ifstream mf(base + ".json", std::ios::binary);
  if (!mf) throw std::runtime_error("load_checkpoint: cannot open " + base + ".json");
  json manifest = json::parse(mf);
  if (manifest.at("version").get<int>() != kCheckpointVersion) {
    throw std::runtime_error("load_checkpoint: unsupported version");
  }
  std::ifstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("load_checkpoint: cannot open " + base + ".bin");
  std::vector<CheckpointBlock> blocks;
  for (const auto& jb : manifest.at("blocks")) {
    CheckpointBlock b;
    b.name = jb.at("name").get<std::string>();
    b.rows = jb.at("rows").get<int>();
    b.cols = jb.at("cols").get<int>();
    size_t n = static_cast<size_t>(b.rows) * b.cols;
    size_t offset = jb.at("offset").get<size_t>();
    bin.seekg(static_cast<std::streamoff>(offset * sizeof(float)));
    b.data.resize(n);
    for (size_t i = 0; i < n; ++i) {
      float f = 0.0f;
      bin.read(reinterpret_cast<char*>(&f), sizeof(float));
      if (!bin) throw std::runtime_error("load_checkpoint: truncated blob for " + b.name);
      b.data[i] = static_cast<double>(f);
    }
    blocks.push_back(std::move(b));
  }
  return {std::move(blocks), manifest.at("extra")};
}

void append_store_blocks(std::vector<CheckpointBlock>& out, const std::string& prefix,
                         const ParamStore& store) {
  for (int i = 0; i < store.count(); ++i) {
    const ParamBlock& b = store[i];
    out.push_back({prefix + "/" + b.name, b.rows, b.cols, b.value});
  }
}

void append_adam_blocks(std::vector<CheckpointBlock>& out, const std::string& prefix,
                        const ParamStore& store, const Adam& adam) {
  for (int i = 0; i < store.count(); ++i) {
    const ParamBlock& b = store[i];
    out.push_back({prefix + "/adam.m/" + b.name, b.rows, b.cols, adam.m.at(i)});
    out.push_back({prefix + "/adam.v/" + b.name, b.rows, b.cols, adam.v.at(i)});
  }
}

static const CheckpointBlock* find_block(const std::vector<CheckpointBlock>& blocks,
                                         const std::string& name) {
  for (const auto& b : blocks) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

void restore_store_blocks(const std::vector<CheckpointBlock>& blocks, const std::string& prefix,
                          ParamStore& store) {
  for (int i = 0; i < store.count(); ++i) {
    ParamBlock& dst = store[i];
    const CheckpointBlock* src = find_block(blocks, prefix + "/" + dst.name);
    if (!src) throw std::runtime_error("checkpoint missing block " + prefix + "/" + dst.name);
    if (src->rows != dst.rows || src->cols != dst.cols) {
      throw std::runtime_error("checkpoint shape mismatch for " + dst.name);
    }
    dst.value = src->data;
  }
}

void restore_adam_blocks(const std::vector<CheckpointBlock>& blocks, const std::string& prefix,
                         const ParamStore& store, Adam& adam) {
  adam.init(store);
  for (int i = 0; i < store.count(); ++i) {
    const ParamBlock& b = store[i];
    const CheckpointBlock* sm = find_block(blocks, prefix + "/adam.m/" + b.name);
    const CheckpointBlock* sv = find_block(blocks, prefix + "/adam.v/" + b.name);
    if (!sm || !sv) throw std::runtime_error("checkpoint missing optimizer state for " + b.name);
    adam.m[i] = sm->data;
    adam.v[i] = sv->data;
  }
}

}  // namespace peec
