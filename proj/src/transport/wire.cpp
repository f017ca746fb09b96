/*
 * src/transport/wire.cpp
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

#include "fabric/transport/wire.hpp"

#include <algorithm>

namespace fabric::transport {

std::string to_string(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::unknown_log: return "unknown-log";
    case Status::payload_too_large: return "payload-too-large";
    case Status::size_mismatch: return "size-mismatch";
    case Status::storage_failure: return "storage-failure";
    case Status::log_full: return "log-full";
    case Status::bad_request: return "bad-request";
  }
  return "status-" + std::to_string(static_cast<int>(s));
}

Errc to_errc(Status s) {
  switch (s) {
    case Status::unknown_log: return Errc::unknown_log;
    case Status::payload_too_large: return Errc::payload_too_large;
    case Status::size_mismatch: return Errc::size_mismatch;
    case Status::log_full: return Errc::log_full;
    case Status::bad_request: return Errc::decode_error;
    case Status::ok:
    case Status::storage_failure: break;
  }
  return Errc::storage_failure;
}

namespace {

Status read_status(ByteReader& r) {
  const auto v = r.u8();
  if (v > static_cast<std::uint8_t>(Status::bad_request)) {
    throw Error(Errc::decode_error, "unknown status " + std::to_string(v));
  }
  return static_cast<Status>(v);
}

}  // namespace

Bytes encode(const Frame& frame) {
  ByteWriter w;
  w.u32(0).u8(static_cast<std::uint8_t>(type_of(frame)));
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        w.u64(f.request_id);
        if constexpr (std::is_same_v<T, SizeRequest>) {
          w.str16(f.log_name);
        } else if constexpr (std::is_same_v<T, SizeReply>) {
          w.u8(static_cast<std::uint8_t>(f.status)).u32(f.element_size);
        } else if constexpr (std::is_same_v<T, AppendRequest>) {
          w.id(f.message_id).str16(f.log_name).u32(f.element_size).blob32(f.payload);
        } else {
          w.u8(static_cast<std::uint8_t>(f.status)).u64(f.seq);
        }
      },
      frame);
  Bytes out = w.take();
  store_u32(out, 0, static_cast<std::uint32_t>(out.size() - kLengthPrefix));
  return out;
}

Frame decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto len = r.u32();
  if (len != r.remaining()) {
    throw Error(Errc::decode_error, "frame length " + std::to_string(len) + " but " +
                                        std::to_string(r.remaining()) + " bytes follow");
  }
  const auto type = r.u8();
  Frame out;
  switch (static_cast<FrameType>(type)) {
    case FrameType::size_request: {
      SizeRequest f;
      f.request_id = r.u64();
      f.log_name = r.str16();
      out = std::move(f);
      break;
    }
    case FrameType::size_reply: {
      SizeReply f;
      f.request_id = r.u64();
      f.status = read_status(r);
      f.element_size = r.u32();
      out = f;
      break;
    }
    case FrameType::append_request: {
      AppendRequest f;
      f.request_id = r.u64();
      f.message_id = r.id();
      f.log_name = r.str16();
      f.element_size = r.u32();
      f.payload = r.blob32();
      out = std::move(f);
      break;
    }
    case FrameType::append_reply: {
      AppendReply f;
      f.request_id = r.u64();
      f.status = read_status(r);
      f.seq = r.u64();
      out = f;
      break;
    }
    default:
      throw Error(Errc::decode_error, "unknown frame type " + std::to_string(type));
  }
  if (r.remaining() != 0) throw Error(Errc::decode_error, "trailing bytes in frame");
  return out;
}

FrameType type_of(const Frame& frame) {
  return static_cast<FrameType>(frame.index() + 1);
}

std::uint64_t request_id_of(const Frame& frame) {
  return std::visit([](const auto& f) { return f.request_id; }, frame);
}

bool is_request(const Frame& frame) {
  return std::holds_alternative<SizeRequest>(frame) || std::holds_alternative<AppendRequest>(frame);
}

void FrameAssembler::feed(std::span<const std::uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Bytes> FrameAssembler::next() {
  if (buf_.size() < kLengthPrefix) return std::nullopt;
  const auto len = load_u32(buf_, 0);
  if (len > kMaxFrame) throw Error(Errc::decode_error, "frame too large");
  const std::size_t total = kLengthPrefix + len;
  if (buf_.size() < total) return std::nullopt;
  Bytes frame(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(total));
  buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(total));
  return frame;
}

}  // namespace fabric::transport
