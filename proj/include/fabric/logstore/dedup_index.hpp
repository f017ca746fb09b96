/*
 * include/fabric/logstore/dedup_index.hpp
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
#include <list>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fabric/common/message_id.hpp"

namespace fabric::logstore {

using Seq = std::uint64_t;

/// Bounded LRU map from message id to the sequence number it was assigned.
/// Not thread-safe; the owning log serializes access.
class DedupIndex {
 public:
  explicit DedupIndex(std::size_t capacity);

  /// Returns the original seq and refreshes recency on a hit.
  std::optional<Seq> lookup(const MessageId& id);
  void insert(const MessageId& id, Seq seq);

  std::size_t size() const { return map_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// Oldest first.
  std::vector<std::pair<MessageId, Seq>> entries() const;

 private:
  using Order = std::list<std::pair<MessageId, Seq>>;

  std::size_t capacity_;
  Order order_;  // front = most recent
  std::unordered_map<MessageId, Order::iterator, MessageIdHash> map_;
};

}  // namespace fabric::logstore
