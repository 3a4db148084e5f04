#include <catch_amalgamated.hpp>

#include "radunc/judge.hpp"
#include "support.hpp"

using namespace radunc;

namespace {

std::vector<ComparisonRecord> small_log() {
    return {
        {"likely", "possible", "s likely", "s possible", "j1", Winner::A},
        {"possible", "likely", "s possible", "s likely", "j1", Winner::A},
        {"likely", "possible", "s likely", "s possible", "j2", Winner::B},
        {"likely", "unlikely", "s likely", "s unlikely", "j1", Winner::A},
    };
}

ComparisonRequest request(std::string a, std::string b, int rep = 0, std::uint64_t nonce = 0) {
    return {a, b, a, b, rep, nonce};
}

} // namespace

TEST_CASE("replay judge returns logged winners per repetition") {
    auto log = small_log();
    ReplayJudge j1("j1", log);
    CHECK(j1.size() == 3);
    CHECK(j1.compare(request("likely", "possible", 0)).winner == Winner::A);
    // Second logged record names "possible" as item_a and winner.
    CHECK(j1.compare(request("likely", "possible", 1)).winner == Winner::B);
    CHECK(j1.compare(request("possible", "likely", 1)).winner == Winner::A);
    CHECK(j1.compare(request("likely", "possible", 0)).judge == "j1");

    ReplayJudge j2("j2", log);
    CHECK(j2.compare(request("possible", "likely", 0)).winner == Winner::A);
}

TEST_CASE("replay judge misses raise ReplayMiss") {
    auto log = small_log();
    ReplayJudge j1("j1", log);
    CHECK(support::error_code_of([&] { j1.compare(request("likely", "possible", 2)); }) == ErrorCode::ReplayMiss);
    CHECK(support::error_code_of([&] { j1.compare(request("possible", "unlikely")); }) == ErrorCode::ReplayMiss);
    ReplayJudge nobody("j9", log);
    CHECK(support::error_code_of([&] { nobody.compare(request("likely", "possible")); }) == ErrorCode::ReplayMiss);
    CHECK(support::error_code_of([&] { j1.compare(request("likely", "likely")); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("replay_judges keeps first-appearance order") {
    auto log = small_log();
    auto judges = replay_judges(log);
    REQUIRE(judges.size() == 2);
    CHECK(judges[0]->id() == "j1");
    CHECK(judges[1]->id() == "j2");
}

TEST_CASE("synthetic judge with a dominant skill always wins") {
    SyntheticJudge judge("s", {{{"high", 1000.0}, {"low", 0.0}}, 1.0, 3});
    for (int i = 0; i < 200; ++i) {
        CHECK(judge.compare(request("high", "low", i, static_cast<std::uint64_t>(i))).winner == Winner::A);
        CHECK(judge.compare(request("low", "high", i, static_cast<std::uint64_t>(i))).winner == Winner::B);
    }
}

TEST_CASE("synthetic judge on equal skills is a fair coin") {
    SyntheticJudge judge("s", {{{"a", 10.0}, {"b", 10.0}}, 1.0, 11});
    int wins = 0;
    for (int i = 0; i < 1000; ++i) wins += judge.compare(request("a", "b", 0, static_cast<std::uint64_t>(i))).winner == Winner::A;
    CHECK(std::abs(wins / 1000.0 - 0.5) <= 0.05);
}

TEST_CASE("synthetic judge win rate follows the logistic model") {
    const double gap = 2.0;
    const double scale = 3.0;
    SyntheticJudge judge("s", {{{"a", 10.0 + gap}, {"b", 10.0}}, scale, 19});
    const double p = 1.0 / (1.0 + std::exp(-gap / scale));
    CHECK(judge.win_probability("a", "b") == Catch::Approx(p));
    const int n = 4000;
    int wins = 0;
    for (int i = 0; i < n; ++i) wins += judge.compare(request("a", "b", 0, static_cast<std::uint64_t>(i))).winner == Winner::A;
    double sd = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(static_cast<double>(wins) / n - p) <= 3 * sd);
}

TEST_CASE("synthetic judge is a pure function of its inputs") {
    SyntheticJudge a("s", {{{"x", 1.0}, {"y", 2.0}}, 2.0, 5});
    SyntheticJudge b("s", {{{"x", 1.0}, {"y", 2.0}}, 2.0, 5});
    for (int i = 0; i < 50; ++i) {
        auto r = request("x", "y", i % 3, static_cast<std::uint64_t>(i));
        CHECK(a.compare(r) == b.compare(r));
        CHECK(a.compare(r) == a.compare(r));
    }
}

TEST_CASE("synthetic judge falls back to a phrase found in the sentence") {
    SyntheticJudge judge("s", {{{"likely", 40.0}, {"most likely", 45.0}, {"unlikely", 5.0}}, 1.0, 0});
    CHECK(judge.win_probability("target", "unlikely", "Effusion is most likely present.", "") > 0.99);
    // "likely" inside "unlikely" is not a whole-word hit.
    CHECK(judge.win_probability("target", "likely", "Effusion is UNLIKELY.", "") < 0.01);
    CHECK(support::error_code_of([&] { judge.win_probability("target", "likely", "no hedge here", ""); }) ==
          ErrorCode::MissingLatentSkill);
    CHECK(support::error_code_of([&] { judge.compare(request("ghost", "likely")); }) == ErrorCode::MissingLatentSkill);
}

TEST_CASE("synthetic judge rejects a non-positive noise scale") {
    CHECK(support::error_code_of([] { SyntheticJudge("s", {{}, 0.0, 0}); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("synthetic_panel ids and independent seeds") {
    auto panel = synthetic_panel({{"a", 1.0}, {"b", 1.0}}, 1.0, 42, 3);
    REQUIRE(panel.size() == 3);
    CHECK(panel[0]->id() == "synthetic-1");
    CHECK(panel[2]->id() == "synthetic-3");
    int differ = 0;
    for (int i = 0; i < 64; ++i) {
        auto r = request("a", "b", 0, static_cast<std::uint64_t>(i));
        differ += panel[0]->compare(r).winner != panel[1]->compare(r).winner;
    }
    CHECK(differ > 0);
}

TEST_CASE("consensus is a majority vote with a seeded coin on ties") {
    std::vector<JudgeOutcome> ab{{Winner::A, "1"}, {Winner::A, "2"}, {Winner::B, "3"}};
    CHECK(consensus(ab, 0) == Winner::A);
    std::vector<JudgeOutcome> b{{Winner::B, "1"}};
    CHECK(consensus(b, 0) == Winner::B);

    std::vector<JudgeOutcome> tie{{Winner::A, "1"}, {Winner::B, "2"}};
    CHECK(consensus(tie, 9) == consensus(tie, 9));
    int a_wins = 0;
    for (std::uint64_t s = 0; s < 400; ++s) a_wins += consensus(tie, s) == Winner::A;
    CHECK(a_wins > 120);
    CHECK(a_wins < 280);

    CHECK(support::error_code_of([] { consensus({}, 0); }) == ErrorCode::EmptyOutcomeList);
}

TEST_CASE("mask_finding hides every case-insensitive mention") {
    CHECK(mask_finding("Pleural effusion, likely. No pleural Effusion on the left.", "pleural effusion") ==
          "<finding>, likely. No <finding> on the left.");
    CHECK(mask_finding("nothing here", "edema") == "nothing here");
    CHECK(mask_finding("edema", "") == "edema");
}
