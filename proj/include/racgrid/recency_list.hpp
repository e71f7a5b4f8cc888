/*
 * Copyright 2026 The racgrid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <iterator>
#include <list>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace racgrid {

/// Recency-ordered set of keys. Front is least recently used.
template <typename Key, typename Hash = std::hash<Key>>
class RecencyList {
 public:
  bool contains(const Key& k) const { return index_.contains(k); }
  std::size_t size() const noexcept { return order_.size(); }
  bool empty() const noexcept { return order_.empty(); }

  /// Inserts as most recent, or refreshes an existing key.
  void touch(const Key& k) {
    auto it = index_.find(k);
    if (it != index_.end()) {
      order_.splice(order_.end(), order_, it->second);
      return;
    }
    order_.push_back(k);
    index_.emplace(k, std::prev(order_.end()));
  }

  /// Inserts at the back without refreshing an existing key.
  void push_back_if_absent(const Key& k) {
    if (index_.contains(k)) return;
    order_.push_back(k);
    index_.emplace(k, std::prev(order_.end()));
  }

  bool erase(const Key& k) {
    auto it = index_.find(k);
    if (it == index_.end()) return false;
    order_.erase(it->second);
    index_.erase(it);
    return true;
  }

  const Key& oldest() const { return order_.front(); }

  Key pop_oldest() {
    Key k = std::move(order_.front());
    index_.erase(k);
    order_.pop_front();
    return k;
  }

  /// Keys from least to most recently used.
  std::vector<Key> snapshot() const { return {order_.begin(), order_.end()}; }

 private:
  std::list<Key> order_;
  std::unordered_map<Key, typename std::list<Key>::iterator, Hash> index_;
};

}  // namespace racgrid
