/*
 * src/dataflow/value.cpp
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

#include "fabric/dataflow/value.hpp"

#include <charconv>
#include <optional>

#include "fabric/common/error.hpp"

namespace fabric::dataflow {

std::size_t Type::max_encoded_size() const {
  switch (kind) {
    case Kind::int64:
    case Kind::float64: return 1 + 8;
    case Kind::bytes: return 1 + 4 + length;
    case Kind::fvec: return 1 + 4 + 8 * std::size_t{length};
  }
  return 0;
}

bool Type::operator==(const Type& o) const {
  if (kind != o.kind) return false;
  return kind == Kind::int64 || kind == Kind::float64 || length == o.length;
}

std::string Type::str() const {
  switch (kind) {
    case Kind::int64: return "int64";
    case Kind::float64: return "float64";
    case Kind::bytes: return "bytes[" + std::to_string(length) + "]";
    case Kind::fvec: return "fvec[" + std::to_string(length) + "]";
  }
  return "?";
}

Type parse_type(const std::string& text) {
  if (text == "int64") return Type::int64();
  if (text == "float64") return Type::float64();
  auto sized = [&](const std::string& prefix) -> std::optional<std::uint32_t> {
    if (text.rfind(prefix + "[", 0) != 0 || text.back() != ']') return std::nullopt;
    const auto digits = text.substr(prefix.size() + 1, text.size() - prefix.size() - 2);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos ||
        digits.size() > 9) {
      return std::nullopt;
    }
    return static_cast<std::uint32_t>(std::stoul(digits));
  };
  if (auto n = sized("bytes")) return Type::bytes(*n);
  if (auto n = sized("fvec"); n && *n > 0) return Type::fvec(*n);
  throw Error(Errc::type_mismatch, "unknown type '" + text + "'");
}

Kind Value::kind() const { return static_cast<Kind>(v_.index() + 1); }

bool Value::fits(const Type& t) const {
  if (kind() != t.kind) return false;
  if (t.kind == Kind::bytes) return as_bytes().size() <= t.length;
  if (t.kind == Kind::fvec) return as_fvec().size() == t.length;
  return true;
}

std::int64_t Value::as_int() const {
  if (auto* p = std::get_if<std::int64_t>(&v_)) return *p;
  throw Error(Errc::type_mismatch, "value is not int64");
}

double Value::as_float() const {
  if (auto* p = std::get_if<double>(&v_)) return *p;
  throw Error(Errc::type_mismatch, "value is not float64");
}

const Bytes& Value::as_bytes() const {
  if (auto* p = std::get_if<Bytes>(&v_)) return *p;
  throw Error(Errc::type_mismatch, "value is not bytes");
}

const std::vector<double>& Value::as_fvec() const {
  if (auto* p = std::get_if<std::vector<double>>(&v_)) return *p;
  throw Error(Errc::type_mismatch, "value is not a float vector");
}

Bytes Value::encode() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(kind()));
  switch (kind()) {
    case Kind::int64: w.i64(as_int()); break;
    case Kind::float64: w.f64(as_float()); break;
    case Kind::bytes: w.blob32(as_bytes()); break;
    case Kind::fvec:
      w.u32(static_cast<std::uint32_t>(as_fvec().size()));
      for (double x : as_fvec()) w.f64(x);
      break;
  }
  return w.take();
}

Value Value::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto k = r.u8();
  switch (static_cast<Kind>(k)) {
    case Kind::int64: return Value::of(r.i64());
    case Kind::float64: return Value::of(r.f64());
    case Kind::bytes: return Value::of(r.blob32());
    case Kind::fvec: {
      const auto n = r.u32();
      if (std::size_t{n} * 8 > r.remaining()) throw Error(Errc::decode_error, "short float vector");
      std::vector<double> v(n);
      for (auto& x : v) x = r.f64();
      return Value::of(std::move(v));
    }
  }
  throw Error(Errc::decode_error, "unknown value kind " + std::to_string(k));
}

MessageId Value::digest() const { return MessageIdBuilder().add(encode()).finish(); }

std::string Value::str() const {
  switch (kind()) {
    case Kind::int64: return std::to_string(as_int());
    case Kind::float64: {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof(buf), as_float());
      return std::string(buf, res.ptr);
    }
    case Kind::bytes: return "bytes(" + std::to_string(as_bytes().size()) + ")";
    case Kind::fvec: return "fvec(" + std::to_string(as_fvec().size()) + ")";
  }
  return "?";
}

}  // namespace fabric::dataflow
