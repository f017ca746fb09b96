/*
 * src/logstore/dedup_index.cpp
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

#include "fabric/logstore/dedup_index.hpp"

#include "fabric/common/error.hpp"

namespace fabric::logstore {

DedupIndex::DedupIndex(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(Errc::invalid_argument, "dedup capacity must be positive");
}

std::optional<Seq> DedupIndex::lookup(const MessageId& id) {
  auto it = map_.find(id);
  if (it == map_.end()) return std::nullopt;
  order_.splice(order_.begin(), order_, it->second);
  return it->second->second;
}

void DedupIndex::insert(const MessageId& id, Seq seq) {
  if (auto it = map_.find(id); it != map_.end()) {
    it->second->second = seq;
    order_.splice(order_.begin(), order_, it->second);
    return;
  }
  order_.emplace_front(id, seq);
  map_.emplace(id, order_.begin());
  if (map_.size() > capacity_) {
    map_.erase(order_.back().first);
    order_.pop_back();
  }
}

std::vector<std::pair<MessageId, Seq>> DedupIndex::entries() const {
  return {order_.rbegin(), order_.rend()};
}

}  // namespace fabric::logstore
