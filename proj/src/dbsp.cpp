#include "sporadic/dbsp.hpp"

#include <algorithm>
#include <string>

namespace sporadic {

const char *distance_name(Distance d)
{
    return d == Distance::Manhattan ? "f1" : "f2";
}

void DbspConfig::validate() const
{
    if (nr_r < 1 || nr_c < 1 || nr_p < 1)
        throw ConfigError("table row counts must be positive");
    if (l_a < 1)
        throw ConfigError("lookahead must be positive");
    if (s_c < 1)
        throw ConfigError("container size must be positive");
    if (l_min < 2)
        throw ConfigError("l_min must be at least 2: associations need a "
                          "request to repeat at least twice");
    if (l_max <= l_min)
        throw ConfigError("l_max must exceed l_min");
    if (l_a > nr_c)
        throw ConfigError("lookahead " + std::to_string(l_a) +
                          " exceeds compute table rows " +
                          std::to_string(nr_c));
}

Degree association_degree(std::span<const Timestamp> a,
                          std::span<const Timestamp> b, bool normalised)
{
    if (a.empty() || a.size() != b.size() || a.front() > b.front())
        return Degree::zero();
    std::uint64_t distance = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        distance += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    if (distance == 0)
        return kDegreeMax;
    return Degree{normalised ? a.size() : 1, distance};
}

void AssocContainer::insert(BlockKey key, Degree degree)
{
    if (auto it = by_key_.find(key); it != by_key_.end()) {
        ranked_.erase(it->second);
        by_key_.erase(it);
    }
    Rank rank{degree, next_seq_++};
    ranked_.emplace(rank, key);
    by_key_.emplace(key, rank);
    if (by_key_.size() > capacity_) {
        auto weakest = ranked_.begin();
        by_key_.erase(weakest->second);
        ranked_.erase(weakest);
    }
}

std::optional<Degree> AssocContainer::degree_of(BlockKey key) const
{
    auto it = by_key_.find(key);
    if (it == by_key_.end())
        return std::nullopt;
    return it->second.first;
}

std::vector<AssocContainer::Entry> AssocContainer::entries() const
{
    std::vector<Entry> out;
    out.reserve(ranked_.size());
    for (auto it = ranked_.rbegin(); it != ranked_.rend(); ++it)
        out.push_back(Entry{it->second, it->first.first, it->first.second});
    return out;
}

AssocContainer &PrefetchTable::row(BlockKey key, std::size_t s_c)
{
    if (AssocContainer *existing = rows_.find(key)) {
        rows_.touch(key);
        return *existing;
    }
    if (rows_.size() >= capacity_)
        rows_.pop_front();
    return rows_.push_back(key, AssocContainer(s_c));
}

const AssocContainer *PrefetchTable::find(BlockKey key)
{
    const AssocContainer *found = rows_.find(key);
    if (found)
        rows_.touch(key);
    return found;
}

void compute_associated_requests(const HistoryTable &ctable,
                                 PrefetchTable &ptable, bool normalised,
                                 std::size_t s_c, std::size_t l_a)
{
    std::vector<const HistoryTable::Row *> rows;
    rows.reserve(ctable.size());
    for (const auto &row : ctable)
        rows.push_back(&row);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t last = std::min(i + l_a, rows.size() - 1);
        for (std::size_t j = i + 1; j <= last; ++j) {
            Degree d = association_degree(rows[i]->second, rows[j]->second,
                                          normalised);
            if (!d.positive())
                continue;
            ptable.row(rows[i]->first, s_c).insert(rows[j]->first, d);
        }
    }
}

DbspPrefetcher::DbspPrefetcher(const DbspConfig &config)
    : config_(config), ptable_(config.nr_p)
{
    config_.validate();
}

void DbspPrefetcher::prefetch_engine(BlockKey key, Timestamp ts)
{
    if (History *h = rtable_.find(key)) {
        h->push_back(ts);
        if (h->size() == config_.l_min) {
            History promoted = std::move(*h);
            rtable_.erase(key);
            ctable_.push_back(key, std::move(promoted));
        } else {
            rtable_.touch(key);
        }
    } else if (History *h = ctable_.find(key)) {
        if (h->size() == config_.l_max)
            ctable_.erase(key);
        else
            h->push_back(ts);
    } else {
        if (rtable_.size() >= config_.nr_r)
            rtable_.pop_front();
        rtable_.push_back(key, History{ts});
    }

    if (ctable_.size() == config_.nr_c) {
        compute_associated_requests(ctable_, ptable_, config_.normalised,
                                    config_.s_c, config_.l_a);
        ctable_.clear();
        ++mining_passes_;
    }
}

std::optional<std::vector<AssocContainer::Entry>>
DbspPrefetcher::on_request(BlockKey key, Timestamp ts)
{
    prefetch_engine(key, ts);
    if (!config_.pref_flag)
        return std::nullopt;
    const AssocContainer *found = ptable_.find(key);
    if (!found)
        return std::nullopt;
    return found->entries();
}

std::vector<BlockKey> DbspPrefetcher::associations(const ReadRequest &request)
{
    std::vector<BlockKey> keys;
    if (auto entries = on_request(request.key, request.ts))
        for (const auto &e : *entries)
            keys.push_back(e.key);
    return keys;
}

} // namespace sporadic
