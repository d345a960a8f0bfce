// Copyright 2026 The Trimodal Embedding Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trimodal/tensor.h"

namespace trimodal {

/// Ordered collection of named double tensors with a versioned binary form.
///
/// Layout, all integers little-endian:
///   magic "TMCK" | u32 version | u64 count |
///   count x ( u32 name_len | name bytes | u32 rank | rank x u64 dim |
///             numel x f64 (IEEE-754 bits, little-endian) )
class TensorArchive {
 public:
  static constexpr std::string_view kMagic = "TMCK";
  static constexpr std::uint32_t kVersion = 1;

  struct Entry {
    std::string name;
    Shape shape;
    std::vector<double> values;
  };

  // Names must be unique.
  void add(std::string name, Shape shape, std::vector<double> values);
  void add(std::string name, const Tensor& t);

  bool contains(std::string_view name) const;
  const Entry& get(std::string_view name) const;
  // Leaf tensor copy of the named entry.
  Tensor tensor(std::string_view name, bool requires_grad = false) const;
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::string serialize() const;
  static TensorArchive deserialize(std::string_view bytes);

  void save(const std::filesystem::path& path) const;
  static TensorArchive load(const std::filesystem::path& path);

 private:
  std::vector<Entry> entries_;
};

}  // namespace trimodal
