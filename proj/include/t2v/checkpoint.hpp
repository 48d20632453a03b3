/* Copyright 2026 The t2v Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef T2V_CHECKPOINT_HPP_
#define T2V_CHECKPOINT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "t2v/model.hpp"

namespace t2v {

// Checkpoint layout, version 1:
//
//   t2v-checkpoint 1\n
//   kind <character|word>\n
//   d_c <n>\n  d_h <n>\n  d_t <n>\n
//   symbols <embedding rows>\n  labels <L>\n
//   prng <algorithm>\n  seed <n>\n
//   config <key>=<value>\n          (zero or more)
//   end-header\n
//   symbol <byte length> <utf-8 bytes>\n   (one per non-reserved symbol)
//   label <byte length> <utf-8 bytes>\n    (one per label)
//   tensor <name> <rows> <cols>\n<rows*cols little-endian float32>\n
//                                           (one per tensor, ModelParams order)
//
// Parameters are rounded to float32 on save.
inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  Model model;
  std::string prng = SeededRng::kAlgorithm;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);

// Writes to a sibling temporary file and renames it over `path`.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Writes `contents` atomically (temporary file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

enum class CountMode {
  kPaperRaw,  // embedding rows: |C| characters, or V words + one UNK row
  kActual,    // embedding rows as allocated: PAD and UNK added to either table
};

// Closed-form number of learnable scalars.
std::size_t count_params(ModelKind kind, std::size_t vocabulary, std::size_t input_dim,
                         std::size_t hidden_dim, std::size_t output_dim, std::size_t labels,
                         CountMode mode);

}  // namespace t2v

#endif  // T2V_CHECKPOINT_HPP_
