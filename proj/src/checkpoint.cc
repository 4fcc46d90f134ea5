// Copyright 2026 The attrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "attrobust/checkpoint.h"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "attrobust/errors.h"
#include "json.hpp"

namespace attrobust {
namespace {

constexpr std::array<char, 8> kMagic = {'A', 'T', 'R', 'B', 'C', 'K', 'P', 'T'};

const char* kParameterNames[] = {"embedding", "attention_w", "attention_b",
                                 "attention_v", "hidden_w", "hidden_b",
                                 "output_w", "output_b"};

std::vector<std::string> ParameterNames(Pooling pooling) {
  std::vector<std::string> names;
  for (const char* n : kParameterNames) {
    if (pooling == Pooling::kMean && std::strncmp(n, "attention", 9) == 0) {
      continue;
    }
    names.emplace_back(n);
  }
  return names;
}

std::string HashHex(uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetU32(const unsigned char* p) {
  return uint32_t{p[0]} | (uint32_t{p[1]} << 8) | (uint32_t{p[2]} << 16) |
         (uint32_t{p[3]} << 24);
}

}  // namespace

void SaveCheckpoint(const std::string& path, const ReferenceClassifier& model,
                    const Vocabulary& vocab,
                    const CheckpointMetadata& metadata) {
  const ArchitectureConfig& arch = model.arch();
  if (arch.vocab_size != vocab.size()) {
    throw ConfigError("model vocabulary size does not match the vocabulary");
  }
  nlohmann::json header;
  header["format_version"] = kCheckpointFormatVersion;
  header["vocab_hash"] = HashHex(vocab.ContentHash());
  header["vocab_size"] = arch.vocab_size;
  header["embedding_dim"] = arch.embedding_dim;
  header["hidden_dim"] = arch.hidden_dim;
  header["attention_dim"] = arch.attention_dim;
  header["num_classes"] = arch.num_classes;
  header["task_mode"] = std::string(TaskModeName(arch.task_mode));
  header["pooling"] = std::string(PoolingName(arch.pooling));
  header["regime"] = metadata.regime;
  header["preset"] = metadata.preset;
  nlohmann::json shapes = nlohmann::json::array();
  const auto names = ParameterNames(arch.pooling);
  const auto ordered = model.params().Ordered(arch.pooling);
  for (size_t i = 0; i < ordered.size(); ++i) {
    shapes.push_back({{"name", names[i]},
                      {"rows", ordered[i]->rows()},
                      {"cols", ordered[i]->cols()}});
  }
  header["parameters"] = shapes;

  std::string blob(kMagic.begin(), kMagic.end());
  const std::string text = header.dump();
  PutU32(blob, static_cast<uint32_t>(text.size()));
  blob += text;
  for (const Matrix* m : ordered) {
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      for (Eigen::Index c = 0; c < m->cols(); ++c) {
        const uint32_t bits = std::bit_cast<uint32_t>(static_cast<float>((*m)(r, c)));
        PutU32(blob, bits);
      }
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

LoadedCheckpoint LoadCheckpoint(const std::string& path,
                                const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open checkpoint " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string blob = buffer.str();
  const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
  if (blob.size() < 12 || !std::equal(kMagic.begin(), kMagic.end(), blob.begin())) {
    throw ParseError("not a checkpoint file: " + path, 0);
  }
  const uint32_t header_len = GetU32(bytes + 8);
  if (blob.size() < 12 + size_t{header_len}) {
    throw ParseError("truncated checkpoint header", 0);
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(12, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what(), 0);
  }

  ArchitectureConfig arch;
  CheckpointMetadata metadata;
  try {
    if (header.at("format_version").get<int>() != kCheckpointFormatVersion) {
      throw ParseError("unsupported checkpoint format version", 0);
    }
    if (header.at("vocab_hash").get<std::string>() !=
        HashHex(vocab.ContentHash())) {
      throw ConfigError("checkpoint " + path +
                        " was written for a different vocabulary");
    }
    arch.vocab_size = header.at("vocab_size").get<int>();
    arch.embedding_dim = header.at("embedding_dim").get<int>();
    arch.hidden_dim = header.at("hidden_dim").get<int>();
    arch.attention_dim = header.at("attention_dim").get<int>();
    arch.num_classes = header.at("num_classes").get<int>();
    arch.task_mode = ParseTaskMode(header.at("task_mode").get<std::string>());
    arch.pooling = ParsePooling(header.at("pooling").get<std::string>());
    metadata.regime = header.at("regime").get<std::string>();
    metadata.preset = header.at("preset").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what(), 0);
  }

  ModelParameters params;
  const auto& shapes = header.at("parameters");
  auto ordered = params.Ordered(arch.pooling);
  if (shapes.size() != ordered.size()) {
    throw ParseError("checkpoint parameter list does not match architecture", 0);
  }
  size_t offset = 12 + header_len;
  for (size_t i = 0; i < ordered.size(); ++i) {
    const auto rows = shapes[i].at("rows").get<Eigen::Index>();
    const auto cols = shapes[i].at("cols").get<Eigen::Index>();
    if (offset + size_t(rows * cols) * 4 > blob.size()) {
      throw ParseError("truncated checkpoint parameters", 0);
    }
    ordered[i]->resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        (*ordered[i])(r, c) = std::bit_cast<float>(GetU32(bytes + offset));
        offset += 4;
      }
    }
  }
  if (offset != blob.size()) {
    throw ParseError("trailing bytes after checkpoint parameters", 0);
  }
  return LoadedCheckpoint{ReferenceClassifier(arch, std::move(params)),
                          metadata};
}

ReferenceClassifier QuantizeToFloat32(const ReferenceClassifier& model) {
  ModelParameters params = model.params();
  for (Matrix* m : params.Ordered(model.arch().pooling)) {
    *m = m->cast<float>().cast<double>();
  }
  return ReferenceClassifier(model.arch(), std::move(params));
}

}  // namespace attrobust
