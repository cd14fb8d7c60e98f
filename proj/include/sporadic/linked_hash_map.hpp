#pragma once

#include <cstddef>
#include <list>
#include <unordered_map>
#include <utility>

namespace sporadic {

/**
 * Hash table threaded through a doubly-linked list. The list keeps rows in
 * insertion order; touch() moves a row to the back, so callers that touch
 * on use get LRU order with the least recent row at the front.
 */
template <typename Key, typename Value>
class LinkedHashMap
{
  public:
    using Row = std::pair<Key, Value>;
    using iterator = typename std::list<Row>::iterator;
    using const_iterator = typename std::list<Row>::const_iterator;

    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    bool contains(const Key &key) const { return index_.count(key) != 0; }

    Value *find(const Key &key)
    {
        auto it = index_.find(key);
        return it == index_.end() ? nullptr : &it->second->second;
    }

    const Value *find(const Key &key) const
    {
        auto it = index_.find(key);
        return it == index_.end() ? nullptr : &it->second->second;
    }

    /// Inserts at the back. The key must not be present.
    Value &push_back(const Key &key, Value value)
    {
        rows_.emplace_back(key, std::move(value));
        auto last = std::prev(rows_.end());
        index_.emplace(key, last);
        return last->second;
    }

    void touch(const Key &key)
    {
        auto it = index_.find(key);
        if (it != index_.end())
            rows_.splice(rows_.end(), rows_, it->second);
    }

    bool erase(const Key &key)
    {
        auto it = index_.find(key);
        if (it == index_.end())
            return false;
        rows_.erase(it->second);
        index_.erase(it);
        return true;
    }

    Row pop_front()
    {
        Row row = std::move(rows_.front());
        index_.erase(row.first);
        rows_.pop_front();
        return row;
    }

    const Row &front() const { return rows_.front(); }

    void clear()
    {
        rows_.clear();
        index_.clear();
    }

    iterator begin() { return rows_.begin(); }
    iterator end() { return rows_.end(); }
    const_iterator begin() const { return rows_.begin(); }
    const_iterator end() const { return rows_.end(); }

  private:
    std::list<Row> rows_;
    std::unordered_map<Key, iterator> index_;
};

} // namespace sporadic
