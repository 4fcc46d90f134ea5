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


// Checkpoint container:
//
//   bytes 0..7   magic "ATRBCKPT"
//   bytes 8..11  header length L, little-endian uint32
//   next L bytes JSON header (format_version, vocab_hash, architecture,
//                task_mode, pooling, regime metadata, parameter shapes)
//   remainder    parameters as little-endian float32, row-major, in the
//                order of ModelParameters::Ordered()

#ifndef ATTROBUST_CHECKPOINT_H_
#define ATTROBUST_CHECKPOINT_H_

#include <string>

#include "attrobust/classifier.h"
#include "attrobust/vocabulary.h"

namespace attrobust {

inline constexpr int kCheckpointFormatVersion = 1;

struct CheckpointMetadata {
  std::string regime = "vanilla";  // vanilla | adversarial | far
  std::string preset;              // e.g. "AdvAAT" for FAR runs

  bool operator==(const CheckpointMetadata&) const = default;
};

struct LoadedCheckpoint {
  ReferenceClassifier model;
  CheckpointMetadata metadata;
};

void SaveCheckpoint(const std::string& path, const ReferenceClassifier& model,
                    const Vocabulary& vocab,
                    const CheckpointMetadata& metadata);

// Throws ParseError on a malformed container and ConfigError when the stored
// vocabulary hash does not match `vocab`.
LoadedCheckpoint LoadCheckpoint(const std::string& path,
                                const Vocabulary& vocab);

// Rounds every parameter through float32, i.e. the precision a checkpoint
// stores.
ReferenceClassifier QuantizeToFloat32(const ReferenceClassifier& model);

}  // namespace attrobust

#endif  // ATTROBUST_CHECKPOINT_H_
