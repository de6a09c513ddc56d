#include "paf/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "paf/core.hpp"
#include "paf/rng.hpp"

namespace paf::data {

namespace {

std::vector<std::string> split_fields(const std::string& line, Format format) {
    std::vector<std::string> fields;
    if (format == Format::MovieLensDat) {
        std::size_t pos = 0;
        for (;;) {
            const std::size_t next = line.find("::", pos);
            if (next == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, next - pos));
            pos = next + 2;
        }
    } else {
        std::size_t pos = 0;
        for (;;) {
            const std::size_t next = line.find(',', pos);
            if (next == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, next - pos));
            pos = next + 1;
        }
    }
    return fields;
}

std::int64_t parse_int(const std::string& s, const std::string& origin, std::size_t line_no) {
    std::int64_t value = 0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        std::ostringstream msg;
        msg << origin << ": line " << line_no << ": expected integer, got \"" << s << '"';
        throw domain_error(msg.str());
    }
    return value;
}

}  // namespace

LoadResult parse_ratings(std::istream& in, Format format, const std::string& origin) {
    struct RawRecord {
        std::int64_t user, item, rating, timestamp;
    };
    std::vector<RawRecord> raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line, format);
        const std::size_t expected_min = format == Format::MovieLensDat ? 4 : 3;
        if (fields.size() < expected_min || fields.size() > 4) {
            std::ostringstream msg;
            msg << origin << ": line " << line_no << ": expected "
                << (format == Format::MovieLensDat ? "UserID::MovieID::Rating::Timestamp"
                                                   : "user,item,rating[,timestamp]");
            throw domain_error(msg.str());
        }
        RawRecord rec{};
        rec.user = parse_int(fields[0], origin, line_no);
        rec.item = parse_int(fields[1], origin, line_no);
        rec.rating = parse_int(fields[2], origin, line_no);
        rec.timestamp = fields.size() > 3 ? parse_int(fields[3], origin, line_no) : 0;
        if (rec.rating < 1 || rec.rating > 5) {
            std::ostringstream msg;
            msg << origin << ": line " << line_no << ": rating " << rec.rating
                << " outside [1, 5]";
            throw domain_error(msg.str());
        }
        raw.push_back(rec);
    }
    if (raw.empty()) throw domain_error(origin + ": no ratings found");

    // Last occurrence of a (user, item) pair wins.
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> last;
    for (std::size_t i = 0; i < raw.size(); ++i) last[{raw[i].user, raw[i].item}] = i;

    LoadResult out;
    out.duplicate_count = static_cast<std::int64_t>(raw.size() - last.size());

    std::map<std::int64_t, std::int32_t> user_index, item_index;
    for (const auto& [key, idx] : last) {
        user_index.emplace(key.first, 0);
        item_index.emplace(key.second, 0);
    }
    for (auto& [id, dense] : user_index) {
        dense = static_cast<std::int32_t>(out.user_ids.size());
        out.user_ids.push_back(id);
    }
    for (auto& [id, dense] : item_index) {
        dense = static_cast<std::int32_t>(out.item_ids.size());
        out.item_ids.push_back(id);
    }
    out.records.reserve(last.size());
    for (const auto& [key, idx] : last) {
        const RawRecord& r = raw[idx];
        out.records.push_back({user_index[r.user], item_index[r.item],
                               static_cast<std::int32_t>(r.rating), r.timestamp});
    }
    return out;
}

LoadResult load_ratings(const std::string& path, Format format) {
    std::ifstream in(path);
    if (!in) throw domain_error("data: cannot open " + path);
    return parse_ratings(in, format, path);
}

SplitDataset split_train_test(const LoadResult& loaded, double hide_frac, std::uint64_t seed) {
    if (hide_frac <= 0.0 || hide_frac >= 1.0)
        throw domain_error("data: hide fraction must lie in (0, 1)");
    const auto n_users = static_cast<std::int32_t>(loaded.user_ids.size());
    const auto n_items = static_cast<std::int32_t>(loaded.item_ids.size());

    std::vector<std::vector<std::size_t>> per_user(static_cast<std::size_t>(n_users));
    for (std::size_t i = 0; i < loaded.records.size(); ++i)
        per_user[static_cast<std::size_t>(loaded.records[i].user)].push_back(i);

    std::vector<model::ObservedMatrix::Entry> train_entries;
    std::vector<TestEntry> test;
    const std::uint64_t split_base = derive_seed(seed, stream::kSplit);
    for (std::int32_t u = 0; u < n_users; ++u) {
        auto& recs = per_user[static_cast<std::size_t>(u)];
        const auto hide =
            static_cast<std::size_t>(std::floor(hide_frac * static_cast<double>(recs.size())));
        Rng rng(derive_seed(split_base, static_cast<std::uint64_t>(u)));
        rng.shuffle(recs);
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const RatingRecord& r = loaded.records[recs[i]];
            const int bin = quantize_rating(r.rating);
            if (i < hide) {
                test.push_back({r.user, r.item, static_cast<std::int8_t>(bin), r.rating});
            } else {
                train_entries.push_back({r.user, r.item, static_cast<std::uint8_t>(bin)});
            }
        }
    }
    std::sort(test.begin(), test.end(), [](const TestEntry& a, const TestEntry& b) {
        return a.user != b.user ? a.user < b.user : a.item < b.item;
    });
    return SplitDataset{model::ObservedMatrix(n_users, n_items, std::move(train_entries)),
                        std::move(test), loaded.user_ids, loaded.item_ids};
}

SplitDataset filter_popular(const SplitDataset& dataset, double threshold) {
    if (threshold < 0.0 || threshold > 1.0)
        throw domain_error("data: popularity threshold must lie in [0, 1]");
    const int n_items = dataset.train.n_cols();
    std::vector<std::int32_t> remap(static_cast<std::size_t>(n_items), -1);
    std::vector<std::int64_t> kept_ids;
    std::int32_t next = 0;
    for (int c = 0; c < n_items; ++c) {
        const auto col = dataset.train.col(c);
        std::int64_t ones = 0;
        for (const model::Cell& cell : col) ones += cell.bit;
        const auto total = static_cast<std::int64_t>(col.size());
        // Strictly more than the threshold fraction of 1s drops the item.
        const bool drop =
            total > 0 && static_cast<double>(ones) > threshold * static_cast<double>(total) + 1e-12;
        if (!drop) {
            remap[static_cast<std::size_t>(c)] = next++;
            kept_ids.push_back(dataset.item_ids[static_cast<std::size_t>(c)]);
        }
    }
    if (next == 0) throw domain_error("data: popularity filter removed every item");

    std::vector<model::ObservedMatrix::Entry> entries;
    for (int u = 0; u < dataset.train.n_rows(); ++u)
        for (const model::Cell& cell : dataset.train.row(u)) {
            const std::int32_t nc = remap[static_cast<std::size_t>(cell.index)];
            if (nc >= 0) entries.push_back({u, nc, cell.bit});
        }
    std::vector<TestEntry> test;
    for (const TestEntry& e : dataset.test) {
        const std::int32_t nc = remap[static_cast<std::size_t>(e.item)];
        if (nc >= 0) test.push_back({e.user, nc, e.bin, e.raw});
    }
    return SplitDataset{model::ObservedMatrix(dataset.train.n_rows(), next, std::move(entries)),
                        std::move(test), dataset.user_ids, std::move(kept_ids)};
}

namespace {

std::vector<std::vector<TestEntry>> test_by_user(const SplitDataset& dataset) {
    std::vector<std::vector<TestEntry>> per_user(
        static_cast<std::size_t>(dataset.train.n_rows()));
    for (const TestEntry& e : dataset.test)
        per_user[static_cast<std::size_t>(e.user)].push_back(e);
    return per_user;
}

}  // namespace

EvalOutcome eval_ber(const SplitDataset& dataset, const EvalConfig& cfg, std::uint64_t seed) {
    if (cfg.recommender == Recommender::Paf && (cfg.T < 1 || cfg.T > dataset.train.n_rows()))
        throw domain_error("data: T must lie in [1, user count]");
    cluster::Partition row_part, col_part;
    if (cfg.recommender == Recommender::Cluster) {
        if (cfg.cluster_k < 1) throw domain_error("data: cluster recommender needs cluster_k >= 1");
        row_part = cluster::estimate_partition(dataset.train, cfg.cluster_k, cluster::Axis::Rows);
        col_part =
            cluster::estimate_partition(dataset.train, cfg.cluster_k, cluster::Axis::Columns);
    }
    const auto per_user = test_by_user(dataset);
    const int n_users = dataset.train.n_rows();
    const std::uint64_t eval_base = derive_seed(seed, stream::kEval);

    std::int64_t scored = 0, errors = 0, skipped = 0, uncheckable = 0, votes = 0;
#pragma omp parallel for schedule(dynamic, 16) num_threads(sim::resolve_workers(cfg.workers)) \
    reduction(+ : scored, errors, skipped, uncheckable, votes)
    for (int u = 0; u < n_users; ++u) {
        const auto& hidden = per_user[static_cast<std::size_t>(u)];
        if (hidden.empty()) {
            ++skipped;
            continue;
        }
        std::vector<std::int32_t> candidates;
        if (cfg.candidates_all) {
            candidates = core::erased_columns(dataset.train, u);
        } else {
            candidates.reserve(hidden.size());
            for (const TestEntry& e : hidden) candidates.push_back(e.item);
        }
        if (candidates.empty()) {
            ++skipped;
            continue;
        }
        const std::uint64_t s = derive_seed(eval_base, static_cast<std::uint64_t>(u));
        core::Recommendation rec;
        switch (cfg.recommender) {
            case Recommender::Paf:
                rec = core::recommend(dataset.train, u, cfg.T, &candidates, s);
                break;
            case Recommender::Global:
                rec = core::recommend(dataset.train, u, dataset.train.n_rows(), &candidates, s);
                break;
            case Recommender::Cluster:
                rec = cluster::recommend_by_cluster(dataset.train, row_part, col_part, u,
                                                    candidates, s);
                break;
        }
        const auto it = std::find_if(hidden.begin(), hidden.end(),
                                     [&](const TestEntry& e) { return e.item == rec.item; });
        if (it == hidden.end()) {
            ++uncheckable;  // only reachable under candidates_all
            continue;
        }
        ++scored;
        errors += it->bin == 0 ? 1 : 0;
        votes += rec.vote_ones + rec.vote_zeros;
    }

    EvalOutcome out;
    out.users_scored = scored;
    out.users_skipped_no_test = skipped;
    out.users_skipped_uncheckable = uncheckable;
    out.stats.trials = scored;
    out.stats.errors = errors;
    out.stats.ber = scored > 0 ? static_cast<double>(errors) / static_cast<double>(scored) : 0.0;
    const auto ci = sim::wilson(errors, scored);
    out.stats.ci_low = ci.low;
    out.stats.ci_high = ci.high;
    out.stats.mean_votes_chosen =
        scored > 0 ? static_cast<double>(votes) / static_cast<double>(scored) : 0.0;
    return out;
}

double eval_rmse(const SplitDataset& dataset, int T, std::uint64_t seed, int workers) {
    if (T < 1 || T > dataset.train.n_rows())
        throw domain_error("data: T must lie in [1, user count]");
    if (dataset.test.empty()) throw domain_error("data: no test entries");
    const auto per_user = test_by_user(dataset);
    const int n_users = dataset.train.n_rows();
    const std::uint64_t eval_base = derive_seed(seed, stream::kEval);

    // Per-user partial sums keep the final reduction order fixed.
    std::vector<double> sq(static_cast<std::size_t>(n_users), 0.0);
    std::vector<std::int64_t> cnt(static_cast<std::size_t>(n_users), 0);
#pragma omp parallel for schedule(dynamic, 16) num_threads(sim::resolve_workers(workers))
    for (int u = 0; u < n_users; ++u) {
        const auto& hidden = per_user[static_cast<std::size_t>(u)];
        if (hidden.empty()) continue;
        const std::uint64_t s = derive_seed(eval_base, static_cast<std::uint64_t>(u));
        const auto neighbors = core::top_neighbors(dataset.train, u, T, s);
        double local = 0.0;
        for (const TestEntry& e : hidden) {
            std::int64_t ones = 0, zeros = 0;
            for (std::int32_t v : neighbors) {
                switch (dataset.train.at(v, e.item)) {
                    case model::Ternary::One: ++ones; break;
                    case model::Ternary::Zero: ++zeros; break;
                    case model::Ternary::Erased: break;
                }
            }
            const int pred = ones > zeros ? 1 : (zeros > ones ? 0 : 1);
            const double mapped = pred ? 4.5 : 2.0;
            const double diff = mapped - static_cast<double>(e.raw);
            local += diff * diff;
        }
        sq[static_cast<std::size_t>(u)] = local;
        cnt[static_cast<std::size_t>(u)] = static_cast<std::int64_t>(hidden.size());
    }
    double total = 0.0;
    std::int64_t n = 0;
    for (int u = 0; u < n_users; ++u) {
        total += sq[static_cast<std::size_t>(u)];
        n += cnt[static_cast<std::size_t>(u)];
    }
    return std::sqrt(total / static_cast<double>(n));
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw domain_error("data: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    return h;
}

}  // namespace paf::data
