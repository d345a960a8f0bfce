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

#include "trimodal/archive.h"

#include <bit>
#include <stdexcept>

#include "trimodal/fileio.h"

namespace trimodal {

namespace {

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get_le(const char* what) {
    need(sizeof(T), what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw std::runtime_error(std::string("archive: truncated while reading ") + what);
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void TensorArchive::add(std::string name, Shape shape, std::vector<double> values) {
  if (contains(name)) throw std::invalid_argument("archive: duplicate tensor name '" + name + "'");
  if (shape_numel(shape) != values.size()) {
    throw std::invalid_argument("archive: shape " + shape_str(shape) + " does not match " +
                                std::to_string(values.size()) + " values for '" + name + "'");
  }
  entries_.push_back({std::move(name), std::move(shape), std::move(values)});
}

void TensorArchive::add(std::string name, const Tensor& t) {
  add(std::move(name), t.shape(), std::vector<double>(t.values().begin(), t.values().end()));
}

bool TensorArchive::contains(std::string_view name) const {
  for (const Entry& e : entries_) {
    if (e.name == name) return true;
  }
  return false;
}

const TensorArchive::Entry& TensorArchive::get(std::string_view name) const {
  for (const Entry& e : entries_) {
    if (e.name == name) return e;
  }
  throw std::out_of_range("archive: no tensor named '" + std::string(name) + "'");
}

Tensor TensorArchive::tensor(std::string_view name, bool requires_grad) const {
  const Entry& e = get(name);
  Tensor t(e.shape, e.values, requires_grad);
  t.set_name(e.name);
  return t;
}

std::string TensorArchive::serialize() const {
  std::string out(kMagic);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, entries_.size());
  for (const Entry& e : entries_) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out += e.name;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.shape.size()));
    for (std::size_t d : e.shape) put_le<std::uint64_t>(out, d);
    for (double v : e.values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

TensorArchive TensorArchive::deserialize(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(kMagic.size(), "magic") != kMagic) {
    throw std::runtime_error("archive: bad magic (not a tensor archive)");
  }
  const auto version = in.get_le<std::uint32_t>("version");
  if (version != kVersion) {
    throw std::runtime_error("archive: unsupported version " + std::to_string(version));
  }
  const auto count = in.get_le<std::uint64_t>("count");
  TensorArchive archive;
  for (std::uint64_t n = 0; n < count; ++n) {
    const auto name_len = in.get_le<std::uint32_t>("name length");
    std::string name(in.take(name_len, "name"));
    const auto rank = in.get_le<std::uint32_t>("rank");
    Shape shape(rank);
    for (auto& d : shape) d = in.get_le<std::uint64_t>("dimension");
    const std::size_t numel = shape_numel(shape);
    if (numel > bytes.size() / 8) throw std::runtime_error("archive: implausible size for '" + name + "'");
    std::vector<double> values(numel);
    for (double& v : values) v = std::bit_cast<double>(in.get_le<std::uint64_t>("payload"));
    archive.add(std::move(name), std::move(shape), std::move(values));
  }
  if (!in.done()) throw std::runtime_error("archive: trailing bytes after last tensor");
  return archive;
}

void TensorArchive::save(const std::filesystem::path& path) const {
  write_file_atomic(path, serialize());
}

TensorArchive TensorArchive::load(const std::filesystem::path& path) {
  try {
    return deserialize(read_file(path));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace trimodal
