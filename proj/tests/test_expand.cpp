#include <catch_amalgamated.hpp>

#include <random>

#include "radunc/expand.hpp"
#include "radunc/io.hpp"
#include "support.hpp"

using namespace radunc;
using Catch::Approx;

namespace {

const PathwayDictionary& dictionary() { return support::bundled_dictionary(); }

const std::vector<BlacklistRule>& blacklist() { return support::bundled_blacklist(); }

FindingRecord rec(std::string study, std::string finding, Status status, std::optional<double> prob = {},
                  std::optional<std::string> location = {}, std::set<std::string> attrs = {},
                  std::optional<std::string> view = {}, Source source = Source::original) {
    FindingRecord r;
    r.study_id = std::move(study);
    r.finding = std::move(finding);
    r.status = status;
    r.prob = prob;
    r.location = std::move(location);
    r.attributes = std::move(attrs);
    r.view = std::move(view);
    r.source = source;
    return r;
}

/// Embeds each known linearization to a fixed vector; unknown text maps to a
/// unique axis so it never merges.
class StubEmbedding final : public EmbeddingProvider {
public:
    explicit StubEmbedding(std::map<std::string, std::vector<double>> table) : m_table(std::move(table)) {}
    std::vector<double> embed(std::string_view text) const override {
        auto it = m_table.find(std::string(text));
        if (it != m_table.end()) return it->second;
        std::vector<double> v(dimension(), 0.0);
        v[2 + detail::fnv1a(text) % (dimension() - 2)] = 1.0;
        return v;
    }
    std::size_t dimension() const override { return 64; }

private:
    std::map<std::string, std::vector<double>> m_table;
};

std::vector<double> at_cosine(double c) {
    std::vector<double> v(64, 0.0);
    v[0] = c;
    v[1] = std::sqrt(1.0 - c * c);
    return v;
}

std::vector<double> axis0() {
    std::vector<double> v(64, 0.0);
    v[0] = 1.0;
    return v;
}

ExpansionRun run(const std::vector<FindingRecord>& records) {
    LexicalEmbedding provider;
    return run_expansion(records, dictionary(), provider, blacklist());
}

std::vector<FindingRecord> load(const char* name) {
    return io::parse_dataset(csv::Table::from_file(std::string(RADUNC_SAMPLES_DIR "/") + name));
}

} // namespace

TEST_CASE("dedup merges pairs at or above the threshold") {
    StubEmbedding provider({{"pleural effusion, left", axis0()}, {"effusion, left", at_cosine(0.95)},
                            {"edema", axis0()}, {"edema, mild", at_cosine(0.89)}});
    std::vector<FindingRecord> records{
        rec("s", "pleural effusion", Status::tp, 0.5, "left"), rec("s", "edema", Status::dp),
        rec("s", "effusion", Status::tp, 0.8, "left"),         rec("s", "edema", Status::dp, {}, {}, {"mild"})};
    auto out = deduplicate(records, provider, 0.9, {});
    REQUIRE(out.size() == 3);
    // Canonical member is the lexicographically first linearization, at the
    // cluster's earliest position, with the highest probability.
    CHECK(out[0].finding == "effusion");
    CHECK(out[0].prob == 0.8);
    CHECK(out[1].finding == "edema");
    CHECK(out[2].attributes == std::set<std::string>{"mild"});
}

TEST_CASE("dedup never merges across studies, statuses or blacklisted pairs") {
    StubEmbedding provider({{"pleural effusion, left", axis0()}, {"pleural effusion, right", axis0()}});
    std::vector<FindingRecord> lateral{rec("s", "pleural effusion", Status::dp, {}, "left"),
                                       rec("s", "pleural effusion", Status::dp, {}, "right")};
    CHECK(deduplicate(lateral, provider, 0.9, blacklist()).size() == 2);
    CHECK(deduplicate(lateral, provider, 0.9, {}).size() == 1);

    std::vector<FindingRecord> studies{rec("a", "pleural effusion", Status::dp, {}, "left"),
                                       rec("b", "pleural effusion", Status::dp, {}, "left")};
    CHECK(deduplicate(studies, provider, 0.9, {}).size() == 2);
    std::vector<FindingRecord> statuses{rec("a", "pleural effusion", Status::dp, {}, "left"),
                                        rec("a", "pleural effusion", Status::dn, {}, "left")};
    CHECK(deduplicate(statuses, provider, 0.9, {}).size() == 2);
}

TEST_CASE("dedup closes merges transitively and leaves expansions alone") {
    std::vector<double> b(64, 0.0);
    b[0] = 0.95;
    b[1] = std::sqrt(1 - 0.95 * 0.95);
    std::vector<double> c(64, 0.0);
    c[0] = 0.95 * 0.95 - std::sqrt(1 - 0.95 * 0.95) * std::sqrt(1 - 0.95 * 0.95);
    c[1] = std::sqrt(1 - c[0] * c[0]);
    StubEmbedding provider({{"a", axis0()}, {"b", b}, {"c", c}});
    std::vector<FindingRecord> records{rec("s", "c", Status::dp), rec("s", "a", Status::dp), rec("s", "b", Status::dp),
                                       rec("s", "a", Status::dp, {}, {}, {}, {}, Source::expansion)};
    REQUIRE(cosine_similarity(provider.embed("a"), provider.embed("c")) < 0.9);
    auto out = deduplicate(records, provider, 0.9, {});
    REQUIRE(out.size() == 2);
    CHECK(out[0].finding == "a");
    CHECK(out[1].source == Source::expansion);
}

TEST_CASE("dedup validation and provider failures") {
    LexicalEmbedding provider;
    CHECK(support::error_code_of([&] { deduplicate({}, provider, 0.0, {}); }) == ErrorCode::InvalidConfig);
    class Broken final : public EmbeddingProvider {
    public:
        std::vector<double> embed(std::string_view) const override { return {1.0}; }
        std::size_t dimension() const override { return 4; }
    } broken;
    std::vector<FindingRecord> one{rec("s", "x", Status::dp)};
    CHECK(support::error_code_of([&] { deduplicate(one, broken, 0.9, {}); }) == ErrorCode::ProviderFailure);
}

TEST_CASE("lexical embedding cosine is token overlap") {
    LexicalEmbedding e;
    CHECK(cosine_similarity(e.embed("pleural effusion, left"), e.embed("Left pleural effusion")) == Approx(1.0));
    CHECK(cosine_similarity(e.embed("a b"), e.embed("a c")) == Approx(0.5).margin(1e-12));
    CHECK(cosine_similarity(e.embed(""), e.embed("a")) == 0.0);
}

TEST_CASE("CHF expands recursively with inherited status and view") {
    auto chf = dictionary().normalize_record(rec("s", "CHF", Status::tp, 0.6, {}, {}, "PA"));
    const auto* v = dictionary().match(chf);
    REQUIRE(v);
    auto traced = expand_finding_traced(chf, *v, dictionary());
    std::vector<std::string> names;
    int max_depth = 0;
    for (const auto& e : traced) {
        names.push_back(e.record.finding);
        max_depth = std::max(max_depth, e.depth);
        CHECK(e.root_diagnosis == "congestive heart failure");
        CHECK(e.record.source == Source::expansion);
        CHECK(e.record.view == "pa");
        CHECK_FALSE(e.record.sentence);
    }
    CHECK(names.front() == "cardiomegaly");
    CHECK(std::count(names.begin(), names.end(), "pulmonary edema") == 1);
    CHECK(std::count(names.begin(), names.end(), "dyspnea") == 1);
    CHECK(max_depth == 3);
    CHECK(max_depth <= dictionary().max_depth());
    for (const auto& e : traced) {
        if (e.record.status == Status::tp) CHECK(e.record.prob == 0.6);
        if (e.record.status == Status::tn) CHECK(*e.record.prob == Approx(0.4));
    }
}

TEST_CASE("negative children follow the parent's certainty") {
    auto tension = dictionary().normalize_record(rec("s", "pneumothorax", Status::tp, 0.7, {}, {"tension"}));
    const auto* v = dictionary().match(tension);
    REQUIRE(v);
    auto kids = expand_finding(tension, *v, dictionary());
    auto marking = std::find_if(kids.begin(), kids.end(), [](const FindingRecord& r) { return r.finding == "marking"; });
    REQUIRE(marking != kids.end());
    CHECK(marking->status == Status::tn);
    CHECK(*marking->prob == Approx(0.3));
    CHECK(marking->location == "pulmonary");
    // Parent attributes are inherited and node attributes added.
    auto air = std::find_if(kids.begin(), kids.end(), [](const FindingRecord& r) { return r.finding == "air"; });
    REQUIRE(air != kids.end());
    CHECK(air->attributes == std::set<std::string>{"large amount", "tension"});

    auto definite = tension;
    definite.status = Status::dp;
    definite.prob.reset();
    auto dkids = expand_finding(definite, *v, dictionary());
    auto dmarking = std::find_if(dkids.begin(), dkids.end(), [](const FindingRecord& r) { return r.finding == "marking"; });
    REQUIRE(dmarking != dkids.end());
    CHECK(dmarking->status == Status::dn);
    CHECK_FALSE(dmarking->prob);
}

TEST_CASE("negative findings expand to nothing") {
    auto edema = dictionary().normalize_record(rec("s", "pulmonary edema", Status::dn));
    auto variants = dictionary().variants_for("pulmonary edema");
    REQUIRE_FALSE(variants.empty());
    CHECK(expand_finding(edema, *variants.front(), dictionary()).empty());
    edema.status = Status::tn;
    edema.prob = 0.2;
    CHECK(expand_finding(edema, *variants.front(), dictionary()).empty());
}

TEST_CASE("expansion through a cyclic dictionary is rejected") {
    auto v = [](std::string d, std::string child) {
        auto p = parse_pathway("view: ap, pa, lateral > ent: " + child + " > status: dp");
        p.diagnosis = d;
        p.name = d;
        return p;
    };
    PathwayDictionary cyc({v("a", "b"), v("b", "a")}, {}, {});
    auto r = rec("s", "a", Status::dp);
    CHECK(support::error_code_of([&] { expand_finding(r, *cyc.match(r), cyc); }) == ErrorCode::CycleDetected);
}

TEST_CASE("conflict classification") {
    using S = Status;
    CHECK(classify_statuses({S::dp, S::dn}) == ConflictType::polarity);
    CHECK(classify_statuses({S::tp, S::tn}) == ConflictType::polarity);
    CHECK(classify_statuses({S::dp, S::tp}) == ConflictType::certainty_pos);
    CHECK(classify_statuses({S::dn, S::tn}) == ConflictType::certainty_neg);
    CHECK(classify_statuses({S::tp}) == ConflictType::duplicate_pos);
    CHECK(classify_statuses({S::dn}) == ConflictType::duplicate_neg);
}

TEST_CASE("conflicts are keyed by study, finding and location") {
    std::vector<FindingRecord> records{
        rec("s", "opacity", Status::dp, {}, "left"), rec("s", "Opacity", Status::dn, {}, "left", {}, {}, Source::expansion),
        rec("s", "opacity", Status::dp),             rec("t", "opacity", Status::dp, {}, "left"),
        rec("s", "fever", Status::tp, 0.6, {}, {}, {}, Source::expansion),
        rec("s", "fever", Status::tp, 0.7, {}, {}, {}, Source::expansion)};
    auto conflicts = detect_conflicts(records);
    REQUIRE(conflicts.size() == 2);
    CHECK(conflicts[0].type == ConflictType::polarity);
    CHECK(conflicts[0].source == ConflictSource::original_vs_expansion);
    CHECK(conflicts[0].members == std::vector<std::size_t>{0, 1});
    CHECK(conflicts[1].type == ConflictType::duplicate_pos);
    CHECK(conflicts[1].source == ConflictSource::expansion_vs_expansion);
}

TEST_CASE("resolution rules") {
    SECTION("originals win over expansions") {
        std::vector<FindingRecord> r{rec("s", "x", Status::tn, 0.2), rec("s", "x", Status::dp, {}, {}, {}, {}, Source::expansion)};
        auto out = resolve_conflicts(r);
        REQUIRE(out.size() == 1);
        CHECK(out[0].status == Status::tn);
    }
    SECTION("a definitive clash removes the whole group") {
        std::vector<FindingRecord> r{rec("s", "x", Status::dp), rec("s", "x", Status::dn), rec("s", "y", Status::dp)};
        auto out = resolve_conflicts(r);
        REQUIRE(out.size() == 1);
        CHECK(out[0].finding == "y");
    }
    SECTION("highest presence probability wins") {
        std::vector<FindingRecord> r{rec("s", "x", Status::tp, 0.6), rec("s", "x", Status::tp, 0.8), rec("s", "x", Status::tn, 0.3)};
        auto out = resolve_conflicts(r);
        REQUIRE(out.size() == 1);
        CHECK(out[0].prob == 0.8);
    }
    SECTION("ties go to the stronger status, then the earliest") {
        std::vector<FindingRecord> r{rec("s", "x", Status::tn, 0.0), rec("s", "x", Status::dn)};
        CHECK(resolve_conflicts(r).front().status == Status::tn);
        std::vector<FindingRecord> d{rec("s", "x", Status::tp, 1.0), rec("s", "x", Status::dp)};
        CHECK(resolve_conflicts(d).front().status == Status::dp);
        std::vector<FindingRecord> e{rec("s", "x", Status::tp, 0.5, {}, {"a"}), rec("s", "x", Status::tp, 0.5, {}, {"b"})};
        CHECK(resolve_conflicts(e).front().attributes == std::set<std::string>{"a"});
    }
    SECTION("expansion-only groups use the same rules") {
        std::vector<FindingRecord> r{rec("s", "x", Status::dp, {}, {}, {}, {}, Source::expansion),
                                     rec("s", "x", Status::dn, {}, {}, {}, {}, Source::expansion)};
        CHECK(resolve_conflicts(r).empty());
    }
}

TEST_CASE("record validation inside the pipeline") {
    CHECK(support::error_code_of([] { run({rec("s", "x", Status::tp)}); }) == ErrorCode::MissingProbability);
    CHECK(support::error_code_of([] { run({rec("s", "x", Status::dp, 0.5)}); }) == ErrorCode::InvalidProbability);
    CHECK(support::error_code_of([] { run({rec("s", "x", Status::tp, 1.5)}); }) == ErrorCode::InvalidProbability);
    auto exp = rec("s", "x", Status::dp, {}, {}, {}, {}, Source::expansion);
    exp.sentence = "text";
    CHECK(support::error_code_of([&] { run({exp}); }) == ErrorCode::SentenceOnExpansion);
}

TEST_CASE("fixture reports expand to the hand-traced output") {
    auto r = run(load("expansion_fixture.csv"));
    auto expected = csv::read_file(RADUNC_SAMPLES_DIR "/expansion_expected.csv");
    CHECK(io::format_dataset_csv(r.after) == expected);

    auto stats = coverage_stats(r, dictionary());
    CHECK(stats.rows_before == 28);
    CHECK(stats.original_rows == 28);
    CHECK(r.deduplicated.size() == 27);
    CHECK(stats.rows_expanded == 80);
    CHECK(stats.rows_after == 66);
    CHECK(stats.removals == 14);
    CHECK(stats.total_conflicts == 12);

    using T = ConflictType;
    using Src = ConflictSource;
    auto n = [&](T t, Src s) { return stats.conflicts.at({t, s}); };
    CHECK(n(T::certainty_neg, Src::expansion_vs_expansion) == 1);
    CHECK(n(T::certainty_pos, Src::expansion_vs_expansion) == 2);
    CHECK(n(T::certainty_pos, Src::original_vs_expansion) == 1);
    CHECK(n(T::certainty_pos, Src::original_vs_original) == 1);
    CHECK(n(T::duplicate_neg, Src::original_vs_original) == 1);
    CHECK(n(T::duplicate_pos, Src::expansion_vs_expansion) == 2);
    CHECK(n(T::duplicate_pos, Src::original_vs_expansion) == 1);
    CHECK(n(T::polarity, Src::expansion_vs_expansion) == 1);
    CHECK(n(T::polarity, Src::original_vs_expansion) == 1);
    CHECK(n(T::polarity, Src::original_vs_original) == 1);

    const std::map<std::string, std::pair<int, int>> coverage{
        {"congestive heart failure", {2, 18}}, {"cardiomegaly", {3, 1}},   {"fracture", {1, 1}},
        {"atelectasis", {1, 1}},               {"consolidation", {2, 2}},  {"pneumonia", {2, 4}},
        {"tuberculosis", {1, 0}},              {"pleural effusion", {3, 5}}, {"pneumothorax", {2, 7}},
        {"copd", {1, 4}},                      {"pulmonary edema", {0, 0}}, {"emphysema", {0, 0}},
        {"lung cancer", {0, 0}},               {"bronchitis", {0, 0}}};
    for (const auto& d : stats.diagnoses) {
        INFO(d.structure.diagnosis);
        REQUIRE(coverage.count(d.structure.diagnosis));
        CHECK(d.expandable == coverage.at(d.structure.diagnosis).first);
        CHECK(d.inferred == coverage.at(d.structure.diagnosis).second);
        CHECK(d.expandable_pct == Approx(100.0 * d.expandable / 28));
    }
    CHECK(stats.total_expandable == 18);
    CHECK(stats.total_inferred == 43);
    CHECK(stats.total_variants == 98);
    CHECK(stats.total_pathways == 33);
}

TEST_CASE("resolved output is conflict free on randomized datasets") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        auto data = support::random_dataset(rng, false);
        auto r = run(data);
        INFO("dataset " << i);
        REQUIRE(detect_conflicts(r.after).empty());
        REQUIRE(detect_conflicts(resolve_conflicts(r.combined)).empty());
    }
}

TEST_CASE("pipeline invariants on randomized datasets") {
    std::mt19937_64 rng(7);
    const int max_depth = dictionary().max_depth();
    for (int i = 0; i < 300; ++i) {
        auto data = support::random_dataset(rng, true);
        auto r = run(data);
        INFO("dataset " << i);
        // Originals with a key to themselves always survive.
        std::map<ConflictKey, int> originals;
        for (const auto& d : r.deduplicated) originals[conflict_key(d)] += d.source == Source::original;
        for (const auto& d : r.deduplicated) {
            if (originals[conflict_key(d)] != 1) continue;
            CHECK(std::find(r.after.begin(), r.after.end(), d) != r.after.end());
        }
        for (const auto& e : r.expanded) {
            CHECK(e.depth <= max_depth);
            CHECK_FALSE(support::error_code_of([&] { validate_record(e.record); }));
        }
        // Expansions only descend from positive matched originals.
        for (std::size_t k = 0; k < r.deduplicated.size(); ++k) {
            if (!is_positive(r.deduplicated[k].status)) CHECK(r.matched_diagnosis[k].empty());
        }
        // Running the pipeline again on its own output changes nothing.
        auto again = run(r.after);
        auto sorted = [](std::vector<FindingRecord> v) {
            std::sort(v.begin(), v.end(), [](const FindingRecord& a, const FindingRecord& b) {
                return io::format_dataset_csv({a}) < io::format_dataset_csv({b});
            });
            return v;
        };
        CHECK(sorted(again.after) == sorted(r.after));
    }
}

TEST_CASE("expansion children inherit view and parent attributes") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        for (const auto& raw : support::random_dataset(rng, false)) {
            auto parent = dictionary().normalize_record(raw);
            if (!is_positive(parent.status)) continue;
            const auto* v = dictionary().match(parent);
            if (!v) continue;
            for (const auto& e : expand_finding_traced(parent, *v, dictionary())) {
                CHECK(e.record.view == parent.view);
                CHECK(e.record.study_id == parent.study_id);
                CHECK(std::includes(e.record.attributes.begin(), e.record.attributes.end(), parent.attributes.begin(),
                                    parent.attributes.end()));
            }
        }
    }
}
