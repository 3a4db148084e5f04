// Command-line front end: vocabulary, reference ranking, fitting, pathway
// expansion, leave-one-out simulation and agreement statistics.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "radunc/radunc.hpp"
#include "radunc/remote_judge.hpp"

namespace fs = std::filesystem;
using namespace radunc;

#ifndef RADUNC_DATA_DIR
#define RADUNC_DATA_DIR "data"
#endif

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Common {
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
};

PipelineConfig load_effective_config(const Common& common) {
    if (!common.config_path.empty()) return load_config(common.config_path);
    PipelineConfig cfg;
    const fs::path base(RADUNC_DATA_DIR);
    cfg.paths.dictionary = (base / "dx_pathway.csv").string();
    cfg.paths.synonyms = (base / "synonyms.csv").string();
    cfg.paths.location_classes = (base / "location_classes.csv").string();
    cfg.paths.blacklist = (base / "blacklist.csv").string();
    cfg.paths.prompt_template = (base / "comparison_prompt.txt").string();
    cfg.validate();
    return cfg;
}

fs::path prepare_out(const Common& common, const PipelineConfig& cfg) {
    fs::path out(common.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorCode::FileNotFound, "cannot create output directory '" + out.string() + "'");
    csv::write_file((out / "config.json").string(), nlohmann::json(cfg).dump(2) + "\n");
    return out;
}

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

/// replay:<log.jsonl> | synthetic:<latent.csv> | remote:<name>[=<url>]
std::vector<JudgePtr> make_judges(const std::vector<std::string>& specs, const PipelineConfig& cfg) {
    std::vector<JudgePtr> judges;
    for (const auto& spec : specs) {
        auto colon = spec.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "judge spec '" + spec + "' lacks a kind");
        const std::string kind = spec.substr(0, colon);
        const std::string arg = spec.substr(colon + 1);
        if (kind == "replay") {
            auto log = io::parse_comparisons(csv::read_file(arg), arg);
            auto js = replay_judges(log);
            judges.insert(judges.end(), js.begin(), js.end());
        } else if (kind == "synthetic") {
            auto latent = io::parse_latent(csv::Table::from_file(arg));
            auto js = synthetic_panel(latent, cfg.synthetic.noise_scale, cfg.synthetic.seed, cfg.synthetic.judges);
            judges.insert(judges.end(), js.begin(), js.end());
        } else if (kind == "remote") {
            auto eq = arg.find('=');
            std::string name = arg.substr(0, eq);
            std::string url = eq == std::string::npos ? env_or_empty("RADUNC_JUDGE_URL") : arg.substr(eq + 1);
            if (name.empty() || url.empty()) {
                throw Error(ErrorCode::InvalidConfig, "remote judge needs a name and a url (or RADUNC_JUDGE_URL)");
            }
            RemoteJudgeConfig rc;
            rc.url = url;
            rc.prompt_template = csv::read_file(cfg.paths.prompt_template);
            rc.bearer_token = env_or_empty("RADUNC_JUDGE_TOKEN");
            rc.timeout_seconds = cfg.remote_timeout_seconds;
            rc.retries = cfg.remote_retries;
            judges.push_back(std::make_shared<RemoteJudge>(name, rc));
        } else {
            throw Error(ErrorCode::InvalidConfig, "unknown judge kind '" + kind + "'");
        }
    }
    return judges;
}

ReferenceRanking load_ranking(const std::string& ranking_csv, const std::string& sentences_jsonl) {
    ReferenceRanking ranking = io::parse_ranking_csv(csv::Table::from_file(ranking_csv));
    std::string sidecar = sentences_jsonl;
    if (sidecar.empty()) {
        auto guess = fs::path(ranking_csv).parent_path() / "ranking_sentences.jsonl";
        if (fs::exists(guess)) sidecar = guess.string();
    }
    if (!sidecar.empty()) io::attach_sentences(ranking, csv::read_file(sidecar), sidecar);
    return ranking;
}

// ---------------------------------------------------------------------------

int cmd_build_vocab(const Common& common, const std::string& input, std::optional<int> threshold) {
    PipelineConfig cfg = load_effective_config(common);
    if (threshold) cfg.vocabulary_threshold = *threshold;
    cfg.validate();
    auto extractions = io::parse_extractions(csv::read_file(input), input);
    Vocabulary vocab = build_vocabulary(extractions, cfg.vocabulary_threshold);
    fs::path out = prepare_out(common, cfg);
    csv::write_file((out / "vocabulary.csv").string(), io::format_vocabulary_csv(vocab));
    csv::write_file((out / "occurrences.jsonl").string(), io::format_occurrences_jsonl(vocab));
    std::cout << vocab.phrases.size() << " phrases at threshold " << cfg.vocabulary_threshold << "\n";
    return 0;
}

int cmd_build_ranking(const Common& common, const std::string& input, const std::string& vocabulary_csv,
                      const std::vector<std::uint64_t>& seeds) {
    PipelineConfig cfg = load_effective_config(common);
    if (!seeds.empty()) cfg.seeds = seeds;
    cfg.validate();
    auto log = io::parse_comparisons(csv::read_file(input), input);
    std::vector<std::string> phrases;
    if (!vocabulary_csv.empty()) {
        auto table = csv::Table::from_file(vocabulary_csv);
        table.require_columns({"phrase"});
        for (std::size_t r = 0; r < table.size(); ++r) phrases.push_back(table.at(r, "phrase"));
    }
    ReferenceRanking ranking = build_reference_ranking(log, phrases, cfg.rating, cfg.seeds);
    fs::path out = prepare_out(common, cfg);
    csv::write_file((out / "ranking.csv").string(), io::format_ranking_csv(ranking));
    csv::write_file((out / "ranking_seeds.csv").string(), io::format_seed_ratings_csv(ranking));
    csv::write_file((out / "ranking_sentences.jsonl").string(), io::format_sentences_jsonl(ranking));
    std::cout << ranking.size() << " phrases ranked over " << ranking.seeds_used() << " seeds\n";
    return 0;
}

int cmd_fit(const Common& common, const std::string& dataset_csv, const std::string& ranking_csv,
            const std::string& sentences_jsonl, const std::vector<std::string>& judge_specs,
            const std::string& strategy, std::optional<std::uint64_t> seed) {
    PipelineConfig cfg = load_effective_config(common);
    if (seed) cfg.fit.seed = *seed;
    cfg.validate();
    auto selection = parse_selection(strategy);
    if (!selection) throw Error(ErrorCode::InvalidConfig, "unknown strategy '" + strategy + "'");
    if (judge_specs.empty()) throw Error(ErrorCode::InvalidConfig, "fit needs at least one --judge");

    auto records = io::parse_dataset(csv::Table::from_file(dataset_csv));
    ReferenceRanking ranking = load_ranking(ranking_csv, sentences_jsonl);
    auto judges = make_judges(judge_specs, cfg);
    SigmoidMap map = calibrate_sigmoid(cfg.anchor_low, cfg.anchor_high);

    struct RowResult {
        bool fitted = false;
        std::string hash;
        double mu = 0.0;
        int steps = 0;
        double prob = 0.0;
        std::string error;
    };
    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (is_tentative(records[i].status)) targets.push_back(i);
    }
    std::vector<RowResult> results(targets.size());
    detail::parallel_for(targets.size(), detail::resolve_jobs(common.jobs), [&](std::size_t k) {
        const FindingRecord& rec = records[targets[k]];
        RowResult& res = results[k];
        if (!rec.sentence) {
            res.error = "MissingSentence: tentative finding has no sentence";
            return;
        }
        res.hash = io::sentence_hash(*rec.sentence);
        try {
            FitTarget target{rec.study_id + "|" + rec.finding + "|" + res.hash, mask_finding(*rec.sentence, rec.finding)};
            FitResult fit = fit_item(target, ranking, judges, cfg.fit, cfg.rating, *selection);
            res.fitted = true;
            res.mu = fit.rating.mu;
            res.steps = fit.steps_taken;
            res.prob = map_probability(fit.rating.mu, map);
        } catch (const std::exception& e) {
            res.error = e.what();
        }
    });

    std::vector<csv::Row> fit_rows;
    std::size_t failures = 0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const auto& rec = records[targets[k]];
        const auto& res = results[k];
        if (res.fitted) {
            fit_rows.push_back({rec.study_id, rec.finding, res.hash, detail::format_double(res.mu),
                                std::to_string(res.steps), detail::format_double(res.prob), ""});
            records[targets[k]].prob = res.prob;
        } else {
            ++failures;
            fit_rows.push_back({rec.study_id, rec.finding, res.hash, "", "", "", res.error});
        }
    }
    fs::path out = prepare_out(common, cfg);
    csv::write_file((out / "fit.csv").string(),
                    csv::format({"study_id", "finding", "sentence_hash", "mu", "steps", "prob", "error"}, fit_rows));
    csv::write_file((out / "dataset_with_prob.csv").string(), io::format_dataset_csv(records));
    std::cout << targets.size() - failures << " of " << targets.size() << " tentative findings fitted\n";
    return 0;
}

std::string pct(double v) { return detail::format_fixed(v, 1); }

int cmd_expand(const Common& common, const std::string& dataset_csv) {
    PipelineConfig cfg = load_effective_config(common);
    PathwayDictionary dict =
        PathwayDictionary::load(cfg.paths.dictionary, cfg.paths.synonyms, cfg.paths.location_classes);
    auto blacklist = blacklist_from_csv(csv::Table::from_file(cfg.paths.blacklist));
    auto records = io::parse_dataset(csv::Table::from_file(dataset_csv));
    LexicalEmbedding provider(cfg.embedding_dimension);
    ExpansionRun run = run_expansion(records, dict, provider, blacklist, {cfg.dedup_threshold});
    CoverageStats stats = coverage_stats(run, dict);

    fs::path out = prepare_out(common, cfg);
    csv::write_file((out / "expanded.csv").string(), io::format_dataset_csv(run.after));

    auto header = io::dataset_header();
    header.push_back("root_diagnosis");
    std::vector<csv::Row> combined;
    for (std::size_t i = 0; i < run.combined.size(); ++i) {
        auto row = io::to_row(run.combined[i]);
        row.push_back(run.combined_root[i]);
        combined.push_back(std::move(row));
    }
    csv::write_file((out / "combined.csv").string(), csv::format(header, combined));

    std::vector<csv::Row> conflicts;
    for (const auto& c : run.conflicts) {
        std::vector<std::string> statuses;
        for (auto i : c.members) statuses.emplace_back(to_string(run.combined[i].status));
        conflicts.push_back({c.key.study_id, c.key.finding, c.key.location.value_or(""), std::string(to_string(c.source)),
                             std::string(to_string(c.type)), std::to_string(c.members.size()), detail::join(statuses, ";")});
    }
    csv::write_file((out / "conflicts.csv").string(),
                    csv::format({"study_id", "finding", "location", "source", "type", "members", "statuses"}, conflicts));

    std::vector<csv::Row> table;
    for (const auto& d : stats.diagnoses) {
        table.push_back({d.structure.diagnosis, std::to_string(d.structure.variants), std::to_string(d.structure.pathways),
                         std::to_string(d.structure.depth), std::to_string(d.structure.width), std::to_string(d.expandable),
                         pct(d.expandable_pct), std::to_string(d.inferred), pct(d.inferred_pct)});
    }
    table.push_back({"total", std::to_string(stats.total_variants), std::to_string(stats.total_pathways),
                     detail::format_fixed(stats.avg_depth, 1), detail::format_fixed(stats.avg_width, 1),
                     std::to_string(stats.total_expandable), pct(stats.total_expandable_pct),
                     std::to_string(stats.total_inferred), pct(stats.total_inferred_pct)});
    csv::write_file((out / "stats.csv").string(),
                    csv::format({"diagnosis", "variants", "pathways", "depth", "width", "expandable", "expandable_pct",
                                 "inferred", "inferred_pct"},
                                table));

    static const std::map<ConflictType, std::string> kPairs{
        {ConflictType::certainty_neg, "dn-tn"}, {ConflictType::certainty_pos, "dp-tp"}, {ConflictType::duplicate_neg, "tn-tn"},
        {ConflictType::duplicate_pos, "tp-tp"}, {ConflictType::polarity, "dp-dn"}};
    std::vector<csv::Row> crosstab;
    std::map<ConflictSource, int> column_totals;
    for (auto t : kAllConflictTypes) {
        csv::Row row{kPairs.at(t), std::string(to_string(t))};
        for (auto s : kAllConflictSources) {
            int n = stats.conflicts.at({t, s});
            column_totals[s] += n;
            row.push_back(std::to_string(n));
        }
        crosstab.push_back(std::move(row));
    }
    csv::Row totals{"total", ""};
    for (auto s : kAllConflictSources) totals.push_back(std::to_string(column_totals[s]));
    crosstab.push_back(std::move(totals));
    csv::write_file((out / "conflict_crosstab.csv").string(),
                    csv::format({"conflict", "type", "expansion_vs_expansion", "original_vs_expansion", "original_vs_original"},
                                crosstab));

    csv::write_file((out / "summary.csv").string(),
                    csv::format({"metric", "value"}, {{"rows_before", std::to_string(stats.rows_before)},
                                                      {"rows_deduplicated", std::to_string(run.deduplicated.size())},
                                                      {"rows_expanded", std::to_string(stats.rows_expanded)},
                                                      {"rows_after", std::to_string(stats.rows_after)},
                                                      {"removals", std::to_string(stats.removals)},
                                                      {"conflicts", std::to_string(stats.total_conflicts)}}));
    std::cout << stats.rows_before << " rows in, " << stats.rows_expanded << " after expansion, " << stats.rows_after
              << " after resolution (" << stats.total_conflicts << " conflicts)\n";
    return 0;
}

int cmd_simulate(const Common& common, const std::string& ranking_csv, const std::string& sentences_jsonl,
                 const std::vector<std::string>& judge_specs, const std::vector<std::uint64_t>& seeds,
                 bool skip_sweeps) {
    PipelineConfig cfg = load_effective_config(common);
    if (!seeds.empty()) cfg.seeds = seeds;
    cfg.validate();
    ReferenceRanking ranking = load_ranking(ranking_csv, sentences_jsonl);
    std::vector<JudgePtr> judges = judge_specs.empty()
                                       ? judges_from_ranking(ranking, cfg.synthetic.noise_scale, cfg.synthetic.seed,
                                                             cfg.synthetic.judges)
                                       : make_judges(judge_specs, cfg);

    StrategyConfig base;
    base.judge_mode = cfg.simulate.judge_mode == "single" ? JudgeMode::single : JudgeMode::all;
    base.judge_id = cfg.simulate.judge_id;
    base.seeds = cfg.seeds;
    base.fit = cfg.fit;
    base.rating = cfg.rating;
    base.jobs = common.jobs;

    fs::path out = prepare_out(common, cfg);
    std::vector<csv::Row> trace_rows;
    std::vector<csv::Row> summary_rows;
    std::vector<svg::Series> series;
    for (const auto& name : cfg.simulate.strategies) {
        StrategyConfig sc = base;
        sc.strategy = *parse_selection(name);
        auto traces = leave_one_out(ranking, judges, sc, cfg.simulate.phrases);
        for (const auto& t : traces) {
            for (std::size_t i = 0; i < t.distances.size(); ++i) {
                trace_rows.push_back({name, t.phrase, std::to_string(t.seed), std::to_string(t.true_rank),
                                      std::to_string(i + 1), std::to_string(t.distances[i])});
            }
        }
        LooSummary s = summarize(traces);
        summary_rows.push_back({name, detail::format_double(s.mean_final_distance), detail::format_double(s.mean_phrase_std),
                                detail::format_double(s.final_distance_std), detail::format_double(s.mean_steps)});
        svg::Series line{name, {}};
        for (std::size_t i = 0; i < s.mean_distance_by_step.size(); ++i) {
            line.points.emplace_back(static_cast<double>(i + 1), s.mean_distance_by_step[i]);
        }
        series.push_back(std::move(line));
        std::cout << name << ": mean final distance " << detail::format_fixed(s.mean_final_distance, 3)
                  << ", per-phrase std " << detail::format_fixed(s.mean_phrase_std, 3) << "\n";
    }
    csv::write_file((out / "traces.csv").string(),
                    csv::format({"strategy", "phrase", "seed", "true_rank", "iteration", "distance"}, trace_rows));
    csv::write_file((out / "summary.csv").string(),
                    csv::format({"strategy", "mean_final_distance", "mean_phrase_std", "final_distance_std", "mean_steps"},
                                summary_rows));
    csv::write_file((out / "strategies.svg").string(),
                    svg::line_chart("Leave-one-out rank distance", "iteration", "mean |rank - true rank|", series));

    if (!skip_sweeps) {
        for (auto [param, label, values] :
             {std::tuple{SweepParam::K, std::string("K"), cfg.simulate.sweep_k},
              std::tuple{SweepParam::N, std::string("N"), cfg.simulate.sweep_n}}) {
            if (values.empty()) continue;
            auto points = sweep(param, values, base, ranking, judges);
            std::vector<csv::Row> rows;
            std::vector<svg::Series> lines;
            for (const auto& p : points) {
                rows.push_back({std::to_string(p.value), detail::format_double(p.summary.mean_final_distance),
                                detail::format_double(p.summary.mean_phrase_std), detail::format_double(p.summary.mean_steps)});
                svg::Series line{label + "=" + std::to_string(p.value), {}};
                for (std::size_t i = 0; i < p.summary.mean_distance_by_step.size(); ++i) {
                    line.points.emplace_back(static_cast<double>(i + 1), p.summary.mean_distance_by_step[i]);
                }
                lines.push_back(std::move(line));
            }
            csv::write_file((out / ("sweep_" + label + ".csv")).string(),
                            csv::format({label, "mean_final_distance", "mean_phrase_std", "mean_steps"}, rows));
            csv::write_file((out / ("sweep_" + label + ".svg")).string(),
                            svg::line_chart("Sweep over " + label, "iteration", "mean |rank - true rank|", lines));
        }
    }
    return 0;
}

int cmd_synth_comparisons(const Common& common, const std::string& latent_csv, int repetitions) {
    PipelineConfig cfg = load_effective_config(common);
    auto latent = io::parse_latent(csv::Table::from_file(latent_csv));
    auto judges = synthetic_panel(latent, cfg.synthetic.noise_scale, cfg.synthetic.seed, cfg.synthetic.judges);
    std::vector<std::string> items;
    for (const auto& [item, _] : latent) items.push_back(item);
    auto log = generate_comparisons(items, judges, repetitions);
    fs::path out = prepare_out(common, cfg);
    csv::write_file((out / "comparisons.jsonl").string(), io::format_comparisons(log));
    std::cout << log.size() << " comparisons from " << judges.size() << " synthetic judges\n";
    return 0;
}

int cmd_agreement(const std::string& matrix_csv) {
    DecisionMatrix m = io::parse_decision_matrix(csv::Table::from_file(matrix_csv));
    // Fleiss needs every rater on every item; alpha tolerates gaps.
    std::string fleiss = "NA";
    try {
        fleiss = detail::format_fixed(fleiss_kappa(m), 6);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::MissingEntries) throw;
    }
    std::cout << "fleiss_kappa," << fleiss << "\n";
    std::cout << "krippendorff_alpha," << detail::format_fixed(krippendorff_alpha(m), 6) << "\n";
    for (std::size_t a = 0; a < m.raters.size(); ++a) {
        for (std::size_t b = a + 1; b < m.raters.size(); ++b) {
            std::cout << "agreement:" << m.raters[a] << ":" << m.raters[b] << ","
                      << detail::format_fixed(pairwise_agreement(m, m.raters[a], m.raters[b]), 6) << "\n";
        }
    }
    return 0;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::DegenerateAnchors:
    case ErrorCode::NonPositiveSigma: return kExitUsage;
    default: return kExitData;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hedging-phrase ranking and diagnostic-pathway expansion for chest X-ray findings"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool needs_out) {
        sub->add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
        auto* out = sub->add_option("--out", common.out_dir, "Output directory");
        if (needs_out) out->required();
        sub->add_option("--jobs", common.jobs, "Worker threads (0 = all cores)");
    };

    std::string input, vocabulary, ranking, sentences, strategy = "draw_probability";
    std::optional<int> threshold;
    std::optional<std::uint64_t> seed;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> judge_specs;
    bool skip_sweeps = false;

    auto* vocab = app.add_subcommand("build-vocab", "Count hedging phrases and keep frequent ones");
    add_common(vocab, true);
    vocab->add_option("extractions", input, "Extraction log (JSONL: phrase, finding, sentence)")->required();
    vocab->add_option("--threshold", threshold, "Minimum count (default 10)");

    auto* rank = app.add_subcommand("build-ranking", "Build the reference ranking from a comparison log");
    add_common(rank, true);
    rank->add_option("comparisons", input, "Comparison log (JSONL)")->required();
    rank->add_option("--vocabulary", vocabulary, "vocabulary.csv restricting the phrase set");
    rank->add_option("--seeds", seeds, "Shuffle seeds (default from config)");

    auto* fit = app.add_subcommand("fit", "Fit tentative findings into the ranking and map them to probabilities");
    add_common(fit, true);
    fit->add_option("dataset", input, "Dataset CSV")->required();
    fit->add_option("--ranking", ranking, "ranking.csv")->required();
    fit->add_option("--sentences", sentences, "ranking_sentences.jsonl (default: next to ranking.csv)");
    fit->add_option("--judge", judge_specs, "replay:<log> | synthetic:<latent.csv> | remote:<name>[=<url>]");
    fit->add_option("--strategy", strategy, "draw_probability or random");
    fit->add_option("--seed", seed, "Fit seed (default from config)");

    auto* expand = app.add_subcommand("expand", "Deduplicate, match, expand and resolve a finding dataset");
    add_common(expand, true);
    expand->add_option("dataset", input, "Dataset CSV")->required();

    auto* sim = app.add_subcommand("simulate", "Leave-one-out refits and K/N sweeps");
    add_common(sim, true);
    sim->add_option("--ranking", ranking, "ranking.csv")->required();
    sim->add_option("--sentences", sentences, "ranking_sentences.jsonl");
    sim->add_option("--judge", judge_specs, "Judges (default: synthetic judges from the ranking)");
    sim->add_option("--seeds", seeds, "Seeds (default from config)");
    sim->add_flag("--skip-sweeps", skip_sweeps, "Only run the strategy comparison");

    int repetitions = 10;
    auto* synth = app.add_subcommand("synth-comparisons", "Comparison log from synthetic judges over a latent table");
    add_common(synth, true);
    synth->add_option("latent", input, "Latent skill CSV (item, skill)")->required();
    synth->add_option("--repetitions", repetitions, "Repetitions per pair and judge")->check(CLI::PositiveNumber);

    auto* agree = app.add_subcommand("agreement", "Agreement statistics for a decision matrix CSV");
    agree->add_option("matrix", input, "Decision matrix CSV")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (vocab->parsed()) return cmd_build_vocab(common, input, threshold);
        if (rank->parsed()) return cmd_build_ranking(common, input, vocabulary, seeds);
        if (fit->parsed()) return cmd_fit(common, input, ranking, sentences, judge_specs, strategy, seed);
        if (expand->parsed()) return cmd_expand(common, input);
        if (sim->parsed()) return cmd_simulate(common, ranking, sentences, judge_specs, seeds, skip_sweeps);
        if (synth->parsed()) return cmd_synth_comparisons(common, input, repetitions);
        if (agree->parsed()) return cmd_agreement(input);
    } catch (const Error& e) {
        std::cerr << "radunc: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "radunc: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
