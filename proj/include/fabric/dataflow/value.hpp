/*
 * include/fabric/dataflow/value.hpp
 *
 * Copyright 2026 The Fabric Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fabric/common/bytes.hpp"

namespace fabric::dataflow {

enum class Kind : std::uint8_t { int64 = 1, float64 = 2, bytes = 3, fvec = 4 };

/// A value type. `length` is the element count of a float vector and the
/// maximum size of a byte string; it is ignored for scalars.
struct Type {
  Kind kind = Kind::int64;
  std::uint32_t length = 0;

  static Type int64() { return {Kind::int64, 0}; }
  static Type float64() { return {Kind::float64, 0}; }
  static Type bytes(std::uint32_t max_size) { return {Kind::bytes, max_size}; }
  static Type fvec(std::uint32_t n) { return {Kind::fvec, n}; }

  /// Largest encoded Value of this type.
  std::size_t max_encoded_size() const;
  bool operator==(const Type& o) const;
  std::string str() const;
};

/// Parses "int64", "float64", "bytes[N]", "fvec[N]".
Type parse_type(const std::string& text);

class Value {
 public:
  Value() = default;
  static Value of(std::int64_t v) { return Value(v); }
  static Value of(double v) { return Value(v); }
  static Value of(Bytes v) { return Value(std::move(v)); }
  static Value of(std::vector<double> v) { return Value(std::move(v)); }

  Kind kind() const;
  /// True if this value is a member of `t`.
  bool fits(const Type& t) const;

  std::int64_t as_int() const;
  double as_float() const;
  const Bytes& as_bytes() const;
  const std::vector<double>& as_fvec() const;

  Bytes encode() const;
  static Value decode(std::span<const std::uint8_t> bytes);
  /// Stable 16-byte digest of the encoding.
  MessageId digest() const;
  std::string str() const;

  bool operator==(const Value& o) const { return v_ == o.v_; }

 private:
  using Storage = std::variant<std::int64_t, double, Bytes, std::vector<double>>;
  explicit Value(Storage v) : v_(std::move(v)) {}
  Storage v_{std::int64_t{0}};
};

}  // namespace fabric::dataflow
