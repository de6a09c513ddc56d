#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "paf/data.hpp"

using namespace paf;
using namespace paf::data;

namespace {

LoadResult parse(const std::string& text, Format format = Format::MovieLensDat) {
    std::istringstream in(text);
    return parse_ratings(in, format, "test");
}

// 12 users x 8 items, every rating present, deterministic pattern: items
// 0..3 are liked (rating 4 or 5) by everyone, items 4..7 disliked.
LoadResult block_dataset() {
    std::ostringstream text;
    for (int u = 1; u <= 12; ++u)
        for (int i = 1; i <= 8; ++i) {
            const int rating = i <= 4 ? (i % 2 ? 4 : 5) : (i % 2 ? 1 : 3);
            text << u << "::" << i << "::" << rating << "::0\n";
        }
    return parse(text.str());
}

}  // namespace

TEST_CASE("movielens line parsing") {
    const auto loaded = parse("1::1193::5::978300760\n");
    REQUIRE(loaded.records.size() == 1);
    CHECK(loaded.user_ids == std::vector<std::int64_t>{1});
    CHECK(loaded.item_ids == std::vector<std::int64_t>{1193});
    CHECK(loaded.records[0].rating == 5);
    CHECK(loaded.records[0].timestamp == 978300760);
}

TEST_CASE("csv parsing with optional timestamp") {
    const auto loaded = parse("7,3,4\n7,9,2,123\n", Format::Csv);
    REQUIRE(loaded.records.size() == 2);
    CHECK(loaded.user_ids == std::vector<std::int64_t>{7});
    CHECK(loaded.item_ids == std::vector<std::int64_t>{3, 9});
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse("1::2::6::0\n"), doctest::Contains("line 1"), paf::domain_error);
    CHECK_THROWS_WITH_AS(parse("1::2::5::0\nbroken\n"), doctest::Contains("line 2"),
                         paf::domain_error);
    CHECK_THROWS_AS(parse(""), paf::domain_error);
    CHECK_THROWS_AS(parse("1,2,0\n", Format::Csv), paf::domain_error);
}

TEST_CASE("duplicate pairs keep the last occurrence") {
    const auto loaded = parse("1::5::2::0\n1::5::4::1\n2::5::3::0\n");
    CHECK(loaded.duplicate_count == 1);
    REQUIRE(loaded.records.size() == 2);
    for (const auto& r : loaded.records)
        if (loaded.user_ids[static_cast<std::size_t>(r.user)] == 1) CHECK(r.rating == 4);
}

TEST_CASE("rating quantization") {
    CHECK(quantize_rating(5) == 1);
    CHECK(quantize_rating(4) == 1);
    CHECK(quantize_rating(3) == 0);
    CHECK(quantize_rating(2) == 0);
    CHECK(quantize_rating(1) == 0);
}

TEST_CASE("per-user split hides the floor fraction") {
    std::ostringstream text;
    for (int i = 1; i <= 10; ++i) text << "1::" << i << "::4::0\n";
    text << "2::1::5::0\n";  // single-rating user keeps everything in train
    const auto dataset = split_train_test(parse(text.str()), 0.30, 9);
    std::int64_t user0_hidden = 0;
    for (const auto& e : dataset.test) user0_hidden += e.user == 0;
    CHECK(user0_hidden == 3);
    CHECK(dataset.test.size() == 3);
    CHECK(dataset.train.stored_count() == 8);
}

TEST_CASE("train and test stay disjoint and deterministic") {
    const auto loaded = block_dataset();
    const auto a = split_train_test(loaded, 0.30, 4242);
    const auto b = split_train_test(loaded, 0.30, 4242);
    CHECK(a.train.to_text() == b.train.to_text());
    REQUIRE(a.test.size() == b.test.size());
    for (std::size_t i = 0; i < a.test.size(); ++i) {
        CHECK(a.test[i].user == b.test[i].user);
        CHECK(a.test[i].item == b.test[i].item);
        // Hidden entries must be erased in the training matrix.
        CHECK(a.train.at(a.test[i].user, a.test[i].item) == model::Ternary::Erased);
    }
    CHECK_THROWS_AS(split_train_test(loaded, 0.0, 1), paf::domain_error);
    CHECK_THROWS_AS(split_train_test(loaded, 1.0, 1), paf::domain_error);
}

TEST_CASE("popularity filter uses a strict threshold") {
    // Item 0: 7 of 10 ones (dropped at 0.60); item 1: 6 of 10 ones (kept).
    std::vector<model::ObservedMatrix::Entry> entries;
    for (int u = 0; u < 10; ++u) {
        entries.push_back({u, 0, static_cast<std::uint8_t>(u < 7 ? 1 : 0)});
        entries.push_back({u, 1, static_cast<std::uint8_t>(u < 6 ? 1 : 0)});
    }
    SplitDataset dataset{model::ObservedMatrix(10, 2, std::move(entries)),
                         {{0, 0, 1, 5}, {0, 1, 0, 2}},
                         {},
                         {100, 200}};
    const auto filtered = filter_popular(dataset, 0.60);
    CHECK(filtered.train.n_cols() == 1);
    CHECK(filtered.item_ids == std::vector<std::int64_t>{200});
    REQUIRE(filtered.test.size() == 1);  // the dropped item's test entry goes too
    CHECK(filtered.test[0].item == 0);   // re-indexed
    CHECK(filtered.test[0].raw == 2);
    CHECK_THROWS_AS(filter_popular(dataset, 0.0), paf::domain_error);  // drops everything
}

TEST_CASE("checkable-protocol evaluation on a block dataset") {
    const auto dataset = split_train_test(block_dataset(), 0.30, 31);
    EvalConfig cfg;
    cfg.T = 5;
    const auto outcome = eval_ber(dataset, cfg, 31);
    // 12 users, 8 ratings each: floor(0.3*8) = 2 hidden per user.
    CHECK(outcome.users_scored == 12);
    CHECK(outcome.stats.trials == 12);
    // Liked items are globally liked here, so votes are reliable; errors can
    // only happen for users whose two hidden entries are both disliked.
    std::int64_t all_disliked_users = 0;
    std::vector<int> liked_hidden(12, 0), hidden(12, 0);
    for (const auto& e : dataset.test) {
        ++hidden[static_cast<std::size_t>(e.user)];
        liked_hidden[static_cast<std::size_t>(e.user)] += e.bin;
    }
    for (int u = 0; u < 12; ++u)
        if (hidden[static_cast<std::size_t>(u)] > 0 && liked_hidden[static_cast<std::size_t>(u)] == 0)
            ++all_disliked_users;
    CHECK(outcome.stats.errors == all_disliked_users);
}

TEST_CASE("users with nothing hidden are skipped") {
    const auto loaded = parse("1::1::4::0\n1::2::1::0\n2::1::5::0\n");
    const auto dataset = split_train_test(loaded, 0.30, 7);
    // floor(0.3*2) = 0 and floor(0.3*1) = 0: nothing hidden at all.
    CHECK(dataset.test.empty());
    EvalConfig cfg;
    cfg.T = 1;
    const auto outcome = eval_ber(dataset, cfg, 7);
    CHECK(outcome.users_scored == 0);
    CHECK(outcome.users_skipped_no_test == 2);
}

TEST_CASE("open-candidate protocol can be uncheckable") {
    // User 1 rates items 1..3 and hides one; item 4 is unrated by user 1 and
    // strictly more popular than anything else, so the open protocol
    // recommends it and the recommendation cannot be checked.
    std::ostringstream text;
    text << "1::1::4::0\n1::2::4::0\n1::3::4::0\n";
    for (int u = 2; u <= 8; ++u) text << u << "::4::5::0\n";
    for (int u = 2; u <= 6; ++u) text << u << "::1::4::0\n";
    const auto loaded = parse(text.str());
    const auto dataset = split_train_test(loaded, 0.34, 12);  // user 1 hides 1 of 3
    EvalConfig cfg;
    cfg.T = static_cast<int>(loaded.user_ids.size());
    cfg.candidates_all = true;
    const auto outcome = eval_ber(dataset, cfg, 12);
    CHECK(outcome.users_skipped_uncheckable == 1);
    CHECK(outcome.users_scored == 0);
}

TEST_CASE("cluster recommender runs end to end") {
    const auto dataset = split_train_test(block_dataset(), 0.30, 77);
    EvalConfig cfg;
    cfg.recommender = Recommender::Cluster;
    cfg.cluster_k = 4;
    const auto outcome = eval_ber(dataset, cfg, 77);
    CHECK(outcome.users_scored == 12);
    CHECK(outcome.stats.ber <= 0.6);
    EvalConfig bad = cfg;
    bad.cluster_k = 0;
    CHECK_THROWS_AS(eval_ber(dataset, bad, 77), paf::domain_error);
}

TEST_CASE("rmse of perfect binary predictions on liked items is one half") {
    // Train: every user likes every item; hidden entries carry raws 4 and 5,
    // so prediction 1 maps to 4.5 and each residual is exactly 0.5.
    std::ostringstream text;
    for (int u = 1; u <= 8; ++u)
        for (int i = 1; i <= 8; ++i) text << u << "::" << i << "::" << (i % 2 ? 4 : 5) << "::0\n";
    const auto dataset = split_train_test(parse(text.str()), 0.30, 3);
    REQUIRE_FALSE(dataset.test.empty());
    CHECK(eval_rmse(dataset, 4, 3) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("rmse of a wrong constant prediction on all-fives is three") {
    // Neighbors vote 0 everywhere, truth is raw 5: mapped 2.0 vs 5.0.
    std::vector<model::ObservedMatrix::Entry> entries;
    for (int u = 0; u < 4; ++u)
        for (int i = 0; i < 4; ++i)
            if (u != 0 || i >= 2) entries.push_back({u, i, 0});
    SplitDataset dataset{model::ObservedMatrix(4, 4, std::move(entries)),
                         {{0, 0, 1, 5}, {0, 1, 1, 5}},
                         {},
                         {}};
    CHECK(eval_rmse(dataset, 4, 1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("file checksum is stable") {
    const std::string path = "/tmp/paf_checksum_probe.txt";
    {
        std::ofstream out(path, std::ios::binary);
        out << "abc";
    }
    CHECK(fnv1a_file(path) == 0xe71fa2190541574bULL);  // FNV-1a("abc")
    std::remove(path.c_str());
    CHECK_THROWS_AS(fnv1a_file("/nonexistent/paf"), paf::domain_error);
}
