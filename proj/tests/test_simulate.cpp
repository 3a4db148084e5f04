#include <catch_amalgamated.hpp>

#include "radunc/simulate.hpp"
#include "support.hpp"

using namespace radunc;

namespace {

ReferenceRanking ranking_of(const std::vector<std::pair<std::string, double>>& mus, double sigma = 1.0) {
    ReferenceRanking r;
    for (const auto& [p, mu] : mus) r.entries.push_back({p, {mu, sigma}, 0});
    r.reorder();
    return r;
}

StrategyConfig base_config(std::size_t seeds = 3) {
    StrategyConfig cfg;
    cfg.seeds = support::seed_range(0, seeds);
    cfg.jobs = 2;
    return cfg;
}

} // namespace

TEST_CASE("generate_comparisons covers every pair, repetition and judge") {
    auto latent = support::latent_map();
    std::vector<std::string> items;
    for (const auto& [p, _] : latent) items.push_back(p);
    auto judges = synthetic_panel(latent, 3.0, 1, 4);
    auto log = generate_comparisons(items, judges, 2);
    CHECK(log.size() == 861u * 2 * 4);
    std::map<std::pair<std::string, std::string>, int> per_pair;
    for (const auto& c : log) {
        CHECK(c.item_a != c.item_b);
        ++per_pair[std::minmax(c.item_a, c.item_b)];
    }
    CHECK(per_pair.size() == 861);
    for (const auto& [_, n] : per_pair) CHECK(n == 8);
    // Presentation order alternates between repetitions.
    CHECK(log[0].item_a == log[4].item_b);

    std::map<std::string, std::string> sentences{{items[0], "custom sentence"}};
    auto with = generate_comparisons(std::span(items).first(2), std::span(judges).first(1), 1, sentences);
    REQUIRE(with.size() == 1);
    CHECK(with[0].sentence_a == "custom sentence");
    CHECK(with[0].sentence_b == items[1]);
    CHECK(generate_comparisons({}, judges, 1).empty());
    CHECK(support::error_code_of([&] { generate_comparisons(items, judges, 0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("two-phrase leave-one-out lands on the true rank") {
    auto r = ranking_of({{"high", 40.0}, {"low", 10.0}});
    auto judges = judges_from_ranking(r, 1.0, 3, 2);
    auto cfg = base_config();
    cfg.fit.N = 100;
    cfg.fit.patience = 5;
    auto traces = leave_one_out(r, judges, cfg);
    REQUIRE(traces.size() == 2 * 3);
    for (const auto& t : traces) {
        CHECK(t.final_distance() == 0);
        CHECK(t.distances.size() == 100u);
    }
    CHECK(traces[0].phrase == "high");
    CHECK(traces[0].true_rank == 1);
    CHECK(traces[3].true_rank == 2);
}

TEST_CASE("leave-one-out with an empty phrase list does nothing") {
    auto r = ranking_of({{"a", 30.0}, {"b", 20.0}});
    auto judges = judges_from_ranking(r, 1.0, 3, 1);
    auto traces = leave_one_out(r, judges, base_config(), std::vector<std::string>{});
    CHECK(traces.empty());
    auto s = summarize(traces);
    CHECK(s.mean_final_distance == 0.0);
}

TEST_CASE("leave-one-out validation") {
    auto r = ranking_of({{"a", 30.0}, {"b", 20.0}});
    auto judges = judges_from_ranking(r, 1.0, 3, 1);
    CHECK(support::error_code_of([&] { leave_one_out(r, judges, base_config(), std::vector<std::string>{"zz"}); }) ==
          ErrorCode::UnknownPhrase);
    CHECK(support::error_code_of([&] { leave_one_out(ranking_of({{"a", 1.0}}), judges, base_config()); }) ==
          ErrorCode::EmptyRanking);
    auto no_seeds = base_config();
    no_seeds.seeds.clear();
    CHECK(support::error_code_of([&] { leave_one_out(r, judges, no_seeds); }) == ErrorCode::InvalidConfig);
    auto single = base_config();
    single.judge_mode = JudgeMode::single;
    single.judge_id = "nobody";
    CHECK(support::error_code_of([&] { leave_one_out(r, judges, single); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("leave-one-out is deterministic and independent of job count") {
    std::vector<std::pair<std::string, double>> mus;
    for (int i = 0; i < 12; ++i) mus.emplace_back("p" + std::to_string(i), 40.0 - 2.5 * i);
    auto r = ranking_of(mus);
    auto judges = judges_from_ranking(r, 3.0, 7, 3);
    auto cfg = base_config();
    cfg.strategy = OpponentSelection::random;
    auto a = leave_one_out(r, judges, cfg);
    cfg.jobs = 1;
    auto b = leave_one_out(r, judges, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].phrase == b[i].phrase);
        CHECK(a[i].seed == b[i].seed);
        CHECK(a[i].distances == b[i].distances);
    }
}

TEST_CASE("a held-out phrase is never its own opponent") {
    class Recorder final : public Judge {
    public:
        explicit Recorder(std::string held) : m_held(std::move(held)) {}
        const std::string& id() const override { return m_id; }
        JudgeOutcome compare(const ComparisonRequest& req) const override {
            if (req.item_b == m_held) throw Error(ErrorCode::InvalidConfig, "held-out phrase used as opponent");
            return {req.item_a < req.item_b ? Winner::A : Winner::B, m_id};
        }

    private:
        std::string m_held;
        std::string m_id = "recorder";
    };
    auto r = ranking_of({{"a", 30.0}, {"b", 25.0}, {"c", 20.0}, {"d", 15.0}});
    for (const auto& e : r.entries) {
        std::vector<JudgePtr> judges{std::make_shared<Recorder>(e.phrase)};
        CHECK_NOTHROW(leave_one_out(r, judges, base_config(1), std::vector<std::string>{e.phrase}));
    }
}

TEST_CASE("single-judge mode consults only that judge") {
    auto r = ranking_of({{"a", 30.0}, {"b", 20.0}, {"c", 10.0}});
    auto judges = judges_from_ranking(r, 1.0, 3, 3);
    auto cfg = base_config(1);
    cfg.judge_mode = JudgeMode::single;
    cfg.judge_id = "synthetic-2";
    cfg.fit.N = 100;
    auto traces = leave_one_out(r, judges, cfg);
    CHECK(traces.size() == 3);
}

TEST_CASE("summary statistics") {
    std::vector<RankTrace> traces{{"a", 0, 1, 2, true, {3, 1}}, {"a", 1, 1, 2, true, {2, 3}},
                                  {"b", 0, 2, 2, true, {1, 0}}, {"b", 1, 2, 2, false, {0, 0}}};
    auto s = summarize(traces);
    CHECK(s.mean_final_distance == Catch::Approx(1.0));
    CHECK(s.mean_distance_by_step == std::vector<double>{1.5, 1.0});
    // Per-phrase sample std: a {1,3} -> sqrt(2), b {0,0} -> 0.
    CHECK(s.mean_phrase_std == Catch::Approx(std::sqrt(2.0) / 2.0));
    CHECK(s.final_distance_std == Catch::Approx(std::sqrt(2.0)));
    CHECK(s.mean_steps == 2.0);
}

TEST_CASE("a one-value sweep equals a direct summary") {
    std::vector<std::pair<std::string, double>> mus;
    for (int i = 0; i < 8; ++i) mus.emplace_back("p" + std::to_string(i), 40.0 - 3.0 * i);
    auto r = ranking_of(mus);
    auto judges = judges_from_ranking(r, 3.0, 5, 2);
    auto cfg = base_config(2);
    const std::vector<int> k{4};
    auto points = sweep(SweepParam::K, k, cfg, r, judges);
    REQUIRE(points.size() == 1);
    cfg.fit.K = 4;
    auto direct = summarize(leave_one_out(r, judges, cfg));
    CHECK(points[0].value == 4);
    CHECK(points[0].summary.mean_final_distance == direct.mean_final_distance);
    CHECK(points[0].summary.mean_distance_by_step == direct.mean_distance_by_step);
    CHECK(support::error_code_of([&] { sweep(SweepParam::N, {}, cfg, r, judges); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("strategy names parse") {
    CHECK(parse_selection("random") == OpponentSelection::random);
    CHECK(parse_selection("draw_probability") == OpponentSelection::draw_probability);
    CHECK_FALSE(parse_selection("greedy"));
    CHECK(to_string(OpponentSelection::random) == "random");
}
