// ssmrec: train/evaluate collaborative-filtering models with sampled-softmax
// style losses and run the analytical verification suite.
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure,
// 3 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "ssmrec/dataset.hpp"
#include "ssmrec/embedding.hpp"
#include "ssmrec/metrics.hpp"
#include "ssmrec/theory.hpp"
#include "ssmrec/trainer.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- dotted-path json access ------------------------------------------------

const json* find_path(const json& root, const std::string& path) {
    const json* node = &root;
    std::size_t start = 0;
    while (start <= path.size()) {
        std::size_t dot = path.find('.', start);
        std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (!node->is_object() || !node->contains(key)) return nullptr;
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return node;
}

void set_path(json& root, const std::string& path, const json& value) {
    json* node = &root;
    std::size_t start = 0;
    while (true) {
        std::size_t dot = path.find('.', start);
        std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

template <typename T>
T require_field(const json& root, const std::string& path) {
    const json* node = find_path(root, path);
    if (node == nullptr) throw ConfigError("missing required field \"" + path + "\"");
    try {
        return node->get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field \"" + path + "\" has the wrong type");
    }
}

template <typename T>
T field_or(const json& root, const std::string& path, T fallback) {
    const json* node = find_path(root, path);
    if (node == nullptr) return fallback;
    try {
        return node->get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field \"" + path + "\" has the wrong type");
    }
}

// --- enum parsing -------------------------------------------------------------

ssmrec::FileFormat parse_format(const std::string& s) {
    if (s == "pairs" || s == "pair-list") return ssmrec::FileFormat::kPairList;
    if (s == "adjacency" || s == "adjacency-lines") return ssmrec::FileFormat::kAdjacency;
    throw ConfigError("unknown file format \"" + s + "\" (expected pairs|adjacency)");
}

ssmrec::LossKind parse_loss(const std::string& s) {
    if (s == "bce") return ssmrec::LossKind::kBCE;
    if (s == "bpr") return ssmrec::LossKind::kBPR;
    if (s == "sm") return ssmrec::LossKind::kSM;
    if (s == "ccl") return ssmrec::LossKind::kCCL;
    if (s == "ssm") return ssmrec::LossKind::kSSM;
    throw ConfigError("unknown loss kind \"" + s + "\"");
}

ssmrec::SimilarityKind parse_similarity(const std::string& s) {
    if (s == "inner_product" || s == "ip") return ssmrec::SimilarityKind::kInnerProduct;
    if (s == "cosine" || s == "cos") return ssmrec::SimilarityKind::kCosine;
    throw ConfigError("unknown similarity \"" + s + "\" (expected inner_product|cosine)");
}

ssmrec::ModelKind parse_model(const std::string& s) {
    if (s == "mf") return ssmrec::ModelKind::kMF;
    if (s == "svdpp_user") return ssmrec::ModelKind::kSVDppUser;
    if (s == "svdpp_item") return ssmrec::ModelKind::kSVDppItem;
    if (s == "lightgcn") return ssmrec::ModelKind::kLightGCN;
    throw ConfigError("unknown model kind \"" + s + "\"");
}

ssmrec::SamplerStrategy parse_strategy(const std::string& s) {
    if (s == "uniform") return ssmrec::SamplerStrategy::kUniform;
    if (s == "in_batch") return ssmrec::SamplerStrategy::kInBatch;
    throw ConfigError("unknown sampler strategy \"" + s + "\"");
}

// --- config ---------------------------------------------------------------------

struct RunSpec {
    std::string data_path;
    ssmrec::FileFormat format = ssmrec::FileFormat::kPairList;
    int kcore = 0;
    std::uint64_t split_seed = 0;
    ssmrec::TrainConfig train;
};

RunSpec parse_run_config(const json& cfg) {
    RunSpec spec;
    spec.data_path = require_field<std::string>(cfg, "data.path");
    spec.format = parse_format(require_field<std::string>(cfg, "data.format"));
    spec.kcore = field_or<int>(cfg, "data.kcore", 0);
    spec.split_seed = field_or<std::uint64_t>(cfg, "data.split_seed", 0);

    ssmrec::TrainConfig& t = spec.train;
    t.dim = require_field<int>(cfg, "dim");
    t.learning_rate = field_or<double>(cfg, "learning_rate", 0.001);
    t.batch_size = field_or<int>(cfg, "batch_size", 2048);
    t.max_epochs = require_field<int>(cfg, "max_epochs");
    t.eval_every = field_or<int>(cfg, "eval_every", 5);
    t.patience = field_or<int>(cfg, "patience", 10);
    t.l2_coeff = field_or<double>(cfg, "l2_coeff", 0.0);
    t.seed = field_or<std::uint64_t>(cfg, "seed", 0);
    t.eval_k = field_or<int>(cfg, "eval_k", 20);
    t.eval_similarity =
        parse_similarity(field_or<std::string>(cfg, "eval_similarity", "inner_product"));

    t.loss.kind = parse_loss(require_field<std::string>(cfg, "loss.kind"));
    t.loss.similarity = parse_similarity(field_or<std::string>(cfg, "loss.similarity", "cosine"));
    t.loss.temperature = field_or<double>(cfg, "loss.temperature", 0.2);
    t.loss.ccl_margin = field_or<double>(cfg, "loss.ccl_margin", 0.5);
    t.loss.ccl_weight = field_or<double>(cfg, "loss.ccl_weight", 1.0);
    t.loss.l2_coeff = t.l2_coeff;

    t.model.kind = parse_model(require_field<std::string>(cfg, "model.kind"));
    t.model.alpha0 = field_or<double>(cfg, "model.alpha0", 0.5);
    t.model.alpha1 = field_or<double>(cfg, "model.alpha1", 0.0);
    t.model.layers = field_or<int>(cfg, "model.layers", 0);

    t.sampler.strategy =
        parse_strategy(field_or<std::string>(cfg, "sampler.strategy", "in_batch"));
    t.sampler.negatives_per_positive = field_or<int>(cfg, "sampler.negatives_per_positive", 1);
    t.sampler.bce_negative_ratio = field_or<int>(cfg, "sampler.bce_ratio", 4);
    t.sampler.seed = field_or<std::uint64_t>(cfg, "sampler.seed", t.seed + 1);
    return spec;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
    return doc;
}

// --- misc plumbing -----------------------------------------------------------------

std::uint64_t fnv1a64_bytes(const char* data, std::size_t size, std::uint64_t h) {
    for (std::size_t i = 0; i < size; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash missing file: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buffer[1 << 16];
    while (in) {
        in.read(buffer, sizeof(buffer));
        h = fnv1a64_bytes(buffer, static_cast<std::size_t>(in.gcount()), h);
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

ssmrec::DatasetSplit load_and_split(const RunSpec& spec, json* manifest_data) {
    auto loaded = ssmrec::load_interactions(spec.data_path, spec.format);
    ssmrec::InteractionDataset ds = std::move(loaded.dataset);
    if (manifest_data != nullptr) {
        (*manifest_data)["duplicates_dropped"] = loaded.duplicates_dropped;
        (*manifest_data)["input_hash"] = hash_file(spec.data_path);
    }
    if (spec.kcore > 0) ds = kcore_filter(ds, spec.kcore).dataset;
    return split_dataset(ds, spec.split_seed);
}

json report_to_json(const ssmrec::EvalReport& report) {
    return json{{"recall", report.recall},
                {"ndcg", report.ndcg},
                {"group_recall", report.group_recall},
                {"k", report.k},
                {"users_evaluated", report.users_evaluated},
                {"users_skipped", report.users_skipped},
                {"zero_frequency_test_items", report.zero_frequency_test_items}};
}

std::string history_to_jsonl(const ssmrec::TrainHistory& history) {
    std::ostringstream out;
    for (std::size_t e = 0; e < history.epoch_loss.size(); ++e)
        out << json{{"type", "epoch"}, {"epoch", e + 1}, {"loss", history.epoch_loss[e]}}.dump()
            << '\n';
    for (const auto& ev : history.evals)
        out << json{{"type", "eval"},
                    {"epoch", ev.epoch},
                    {"recall", ev.recall},
                    {"ndcg", ev.ndcg}}
                   .dump()
            << '\n';
    out << json{{"type", "summary"},
                {"best_epoch", history.best_epoch},
                {"best_recall", history.best_recall},
                {"epochs_run", history.epochs_run}}
               .dump()
        << '\n';
    return out.str();
}

// --- subcommands ----------------------------------------------------------------------

int cmd_stats(const std::string& input, const std::string& format, int kcore,
              const std::string& json_out) {
    auto loaded = ssmrec::load_interactions(input, parse_format(format));
    ssmrec::InteractionDataset ds = std::move(loaded.dataset);
    if (kcore > 0) ds = ssmrec::kcore_filter(ds, kcore).dataset;
    auto stats = ssmrec::compute_stats(ds);
    json doc{{"users", stats.users},
             {"items", stats.items},
             {"interactions", stats.interactions},
             {"density", stats.density}};
    if (loaded.duplicates_dropped > 0) doc["duplicates_dropped"] = loaded.duplicates_dropped;
    std::cout << doc.dump(2) << std::endl;
    if (!json_out.empty()) write_text(json_out, doc.dump(2) + "\n");
    return 0;
}

struct SeedOutcome {
    std::uint64_t seed;
    double test_recall;
    double test_ndcg;
    double best_val_recall;
    std::string checkpoint;
    std::string history_file;
    std::string history_hash;
};

SeedOutcome run_one_seed(const RunSpec& spec, const ssmrec::DatasetSplit& split,
                         std::uint64_t seed, const fs::path& out_dir) {
    RunSpec local = spec;
    local.train.seed = seed;
    local.train.sampler.seed = seed + 1;
    auto result = ssmrec::train(local.train, split);

    SeedOutcome outcome;
    outcome.seed = seed;
    outcome.best_val_recall = result.history.best_recall;

    fs::path ckpt = out_dir / ("checkpoint_seed" + std::to_string(seed) + ".bin");
    fs::path hist = out_dir / ("history_seed" + std::to_string(seed) + ".jsonl");
    ssmrec::save_embeddings(result.table, ckpt.string());
    write_text(hist, history_to_jsonl(result.history));
    outcome.checkpoint = ckpt.string();
    outcome.history_file = hist.string();
    outcome.history_hash = hash_file(hist.string());

    auto z = ssmrec::forward(local.train.model, result.table, split.train);
    ssmrec::EvalOptions opts;
    opts.k = local.train.eval_k;
    opts.similarity = local.train.eval_similarity;
    auto report = ssmrec::evaluate(z, split.test, split.train, &split.validation, nullptr, opts);
    outcome.test_recall = report.recall;
    outcome.test_ndcg = report.ndcg;
    return outcome;
}

int cmd_train(const std::string& config_path, const std::string& seeds_arg,
              const std::string& out_dir_arg) {
    json cfg = load_json_file(config_path);
    RunSpec spec = parse_run_config(cfg);

    std::vector<std::uint64_t> seeds;
    if (seeds_arg.empty()) {
        seeds.push_back(spec.train.seed);
    } else {
        std::stringstream ss(seeds_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) seeds.push_back(std::stoull(tok));
        }
        if (seeds.empty()) throw ConfigError("--seeds parsed to an empty list");
    }

    fs::path out_dir = out_dir_arg.empty() ? fs::path("runs") : fs::path(out_dir_arg);
    fs::create_directories(out_dir);

    json manifest;
    manifest["command"] = "train";
    manifest["config"] = cfg;
    manifest["config_hash"] = hash_file(config_path);
    manifest["seeds"] = seeds;
    json data_info;
    auto split = load_and_split(spec, &data_info);
    manifest["data"] = data_info;

    std::vector<SeedOutcome> outcomes;
    for (std::uint64_t seed : seeds)
        outcomes.push_back(run_one_seed(spec, split, seed, out_dir));

    json per_seed = json::array();
    double mean_recall = 0.0, mean_ndcg = 0.0;
    for (const auto& o : outcomes) {
        per_seed.push_back(json{{"seed", o.seed},
                                {"checkpoint", o.checkpoint},
                                {"history", o.history_file},
                                {"history_hash", o.history_hash},
                                {"best_val_recall", o.best_val_recall},
                                {"test_recall", o.test_recall},
                                {"test_ndcg", o.test_ndcg}});
        mean_recall += o.test_recall;
        mean_ndcg += o.test_ndcg;
    }
    mean_recall /= outcomes.size();
    mean_ndcg /= outcomes.size();
    double var_recall = 0.0, var_ndcg = 0.0;
    for (const auto& o : outcomes) {
        var_recall += (o.test_recall - mean_recall) * (o.test_recall - mean_recall);
        var_ndcg += (o.test_ndcg - mean_ndcg) * (o.test_ndcg - mean_ndcg);
    }
    double std_recall = outcomes.size() > 1 ? std::sqrt(var_recall / (outcomes.size() - 1)) : 0.0;
    double std_ndcg = outcomes.size() > 1 ? std::sqrt(var_ndcg / (outcomes.size() - 1)) : 0.0;

    json summary{{"runs", per_seed},
                 {"aggregate",
                  {{"test_recall_mean", mean_recall},
                   {"test_recall_std", std_recall},
                   {"test_ndcg_mean", mean_ndcg},
                   {"test_ndcg_std", std_ndcg},
                   {"num_seeds", outcomes.size()}}}};

    json outputs = json::array();
    for (const auto& o : outcomes) {
        outputs.push_back(o.checkpoint);
        outputs.push_back(o.history_file);
    }
    fs::path aggregate_path = out_dir / "aggregate.json";
    outputs.push_back(aggregate_path.string());
    manifest["outputs"] = outputs;
    manifest["results"] = summary;

    write_text(aggregate_path, summary.dump(2) + "\n");
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    std::cout << summary.dump(2) << std::endl;
    return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& checkpoint,
                 const std::string& test_similarity, int groups_count,
                 const std::string& json_out) {
    json cfg = load_json_file(config_path);
    RunSpec spec = parse_run_config(cfg);
    auto split = load_and_split(spec, nullptr);
    auto table = ssmrec::load_embeddings(checkpoint);
    if (table.user.rows() != split.train.num_users() ||
        table.item.rows() != split.train.num_items())
        throw std::runtime_error("checkpoint shape does not match the dataset");

    auto z = ssmrec::forward(spec.train.model, table, split.train);
    ssmrec::EvalOptions opts;
    opts.k = spec.train.eval_k;
    opts.similarity = test_similarity.empty() ? spec.train.eval_similarity
                                              : parse_similarity(test_similarity);

    std::optional<ssmrec::ItemGroups> groups;
    if (groups_count > 0 && groups_count <= split.train.num_items())
        groups = ssmrec::partition_item_groups(split.train, groups_count);

    auto report = ssmrec::evaluate(z, split.test, split.train, &split.validation,
                                   groups ? &*groups : nullptr, opts);
    json doc = report_to_json(report);
    std::cout << doc.dump(2) << std::endl;
    if (!json_out.empty()) write_text(json_out, doc.dump(2) + "\n");
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_path,
              const std::string& out_csv, int parallel, int cap) {
    json cfg = load_json_file(config_path);
    json grid = load_json_file(grid_path);

    json cartesian = json::object();
    json points = json::array();
    if (grid.contains("cartesian") || grid.contains("points")) {
        if (grid.contains("cartesian")) cartesian = grid["cartesian"];
        if (grid.contains("points")) points = grid["points"];
    } else {
        cartesian = grid;  // bare object shorthand
    }
    if (points.empty()) points.push_back(json::object());

    std::vector<std::string> keys;
    for (auto& [key, values] : cartesian.items()) {
        if (!values.is_array() || values.empty())
            throw ConfigError("grid entry \"" + key + "\" must be a non-empty array");
        keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());

    // expand: points x cartesian product
    std::vector<json> patches;
    for (const auto& point : points) {
        std::vector<json> partial = {point};
        for (const auto& key : keys) {
            std::vector<json> next;
            for (const auto& base : partial)
                for (const auto& value : cartesian[key]) {
                    json patch = base;
                    patch[key] = value;
                    next.push_back(std::move(patch));
                }
            partial = std::move(next);
        }
        for (auto& p : partial) patches.push_back(std::move(p));
    }
    if (static_cast<int>(patches.size()) > cap)
        throw ConfigError("grid size " + std::to_string(patches.size()) +
                          " exceeds the cap of " + std::to_string(cap));

    // column set: union of patch keys, sorted
    std::vector<std::string> columns;
    for (const auto& patch : patches)
        for (auto& [key, value] : patch.items())
            if (std::find(columns.begin(), columns.end(), key) == columns.end())
                columns.push_back(key);
    std::sort(columns.begin(), columns.end());

    json data_probe;
    RunSpec base_spec = parse_run_config(cfg);
    auto split = load_and_split(base_spec, &data_probe);

    struct Row {
        json patch;
        double recall = 0.0;
        double ndcg = 0.0;
    };
    std::vector<Row> rows(patches.size());
    std::mutex fail_mutex;
    std::string failure;

    auto run_point = [&](std::size_t idx) {
        try {
            json patched = cfg;
            for (auto& [key, value] : patches[idx].items()) set_path(patched, key, value);
            RunSpec spec = parse_run_config(patched);
            auto result = ssmrec::train(spec.train, split);
            auto z = ssmrec::forward(spec.train.model, result.table, split.train);
            ssmrec::EvalOptions opts;
            opts.k = spec.train.eval_k;
            opts.similarity = spec.train.eval_similarity;
            auto report =
                ssmrec::evaluate(z, split.test, split.train, &split.validation, nullptr, opts);
            rows[idx] = {patches[idx], report.recall, report.ndcg};
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(fail_mutex);
            if (failure.empty()) failure = e.what();
        }
    };

    if (parallel <= 1) {
        for (std::size_t i = 0; i < patches.size(); ++i) run_point(i);
    } else {
        std::size_t next = 0;
        std::mutex next_mutex;
        std::vector<std::thread> workers;
        for (int w = 0; w < parallel; ++w)
            workers.emplace_back([&] {
                while (true) {
                    std::size_t idx;
                    {
                        std::lock_guard<std::mutex> lock(next_mutex);
                        if (next >= patches.size()) return;
                        idx = next++;
                    }
                    run_point(idx);
                }
            });
        for (auto& t : workers) t.join();
    }
    if (!failure.empty()) throw std::runtime_error("sweep point failed: " + failure);

    std::ostringstream csv;
    for (const auto& c : columns) csv << c << ',';
    csv << "recall,ndcg\n";
    for (const auto& row : rows) {
        for (const auto& c : columns) {
            if (row.patch.contains(c)) {
                const json& v = row.patch[c];
                csv << (v.is_string() ? v.get<std::string>() : v.dump());
            }
            csv << ',';
        }
        csv << row.recall << ',' << row.ndcg << '\n';
    }
    std::string out_path = out_csv.empty() ? "sweep.csv" : out_csv;
    write_text(out_path, csv.str());

    json manifest{{"command", "sweep"},
                  {"config", cfg},
                  {"config_hash", hash_file(config_path)},
                  {"grid", grid},
                  {"grid_hash", hash_file(grid_path)},
                  {"data", data_probe},
                  {"outputs", json::array({out_path})}};
    write_text(out_path + ".manifest.json", manifest.dump(2) + "\n");

    std::cout << csv.str();
    return 0;
}

int cmd_verify(const std::string& suite, const std::string& json_out, std::uint64_t seed,
               bool inject_failure) {
    ssmrec::theory::SuiteOptions opts;
    opts.seed = seed;
    opts.inject_failure = inject_failure;
    auto results = ssmrec::theory::run_suite(suite, opts);

    json doc = json::array();
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (max_error=" << r.max_error
                  << ", trials=" << r.trials << ")";
        if (!r.detail.empty()) std::cout << " " << r.detail;
        std::cout << "\n";
        all_pass = all_pass && r.pass;
        doc.push_back(json{{"name", r.name},
                           {"paper_ref", r.claim},
                           {"status", r.pass ? "pass" : "fail"},
                           {"max_error", r.max_error},
                           {"trials", r.trials}});
    }
    std::cout << (all_pass ? "verification passed" : "verification FAILED") << std::endl;
    if (!json_out.empty()) write_text(json_out, doc.dump(2) + "\n");
    return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sampled-softmax recommender toolkit"};
    app.require_subcommand(1);

    auto* stats = app.add_subcommand("stats", "dataset statistics as JSON");
    std::string stats_input, stats_format = "pairs", stats_json;
    int stats_kcore = 0;
    stats->add_option("--input", stats_input, "interaction file")->required();
    stats->add_option("--format", stats_format, "pairs|adjacency");
    stats->add_option("--kcore", stats_kcore, "apply k-core filtering first");
    stats->add_option("--json", stats_json, "also write the JSON report here");

    auto* train = app.add_subcommand("train", "train a model from a JSON config");
    std::string train_config, train_seeds, train_out_dir;
    train->add_option("--config", train_config, "config JSON")->required();
    train->add_option("--seeds", train_seeds, "comma-separated seed list");
    train->add_option("--out-dir", train_out_dir, "output directory (default: runs)");

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on the test split");
    std::string eval_config, eval_checkpoint, eval_similarity, eval_json;
    int eval_groups = 10;
    evaluate->add_option("--config", eval_config, "config JSON")->required();
    evaluate->add_option("--checkpoint", eval_checkpoint, "embedding checkpoint")->required();
    evaluate->add_option("--test-similarity", eval_similarity,
                         "override test-time similarity (ip|cosine)");
    evaluate->add_option("--groups", eval_groups, "popularity groups (0 disables)");
    evaluate->add_option("--json", eval_json, "also write the report here");

    auto* sweep = app.add_subcommand("sweep", "grid sweep producing a CSV");
    std::string sweep_config, sweep_grid, sweep_out;
    int sweep_parallel = 1, sweep_cap = 64;
    sweep->add_option("--config", sweep_config, "config JSON")->required();
    sweep->add_option("--grid", sweep_grid, "grid JSON")->required();
    sweep->add_option("--out", sweep_out, "output CSV path (default: sweep.csv)");
    sweep->add_option("--parallel", sweep_parallel, "parallel sweep points");
    sweep->add_option("--cap", sweep_cap, "maximum grid size");

    auto* verify = app.add_subcommand("verify", "run the analytical verification suite");
    std::string verify_suite = "all", verify_json;
    std::uint64_t verify_seed = 7;
    bool verify_inject = false;
    verify->add_option("--suite", verify_suite, "all|gradients|fixed_point|dcg|magnitude");
    verify->add_option("--json", verify_json, "write the per-check report here");
    verify->add_option("--seed", verify_seed, "suite seed");
    verify->add_flag("--inject-failure", verify_inject,
                     "corrupt one gradient so the suite must fail (testing aid)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (stats->parsed()) return cmd_stats(stats_input, stats_format, stats_kcore, stats_json);
        if (train->parsed()) return cmd_train(train_config, train_seeds, train_out_dir);
        if (evaluate->parsed())
            return cmd_evaluate(eval_config, eval_checkpoint, eval_similarity, eval_groups,
                                eval_json);
        if (sweep->parsed())
            return cmd_sweep(sweep_config, sweep_grid, sweep_out, sweep_parallel, sweep_cap);
        if (verify->parsed())
            return cmd_verify(verify_suite, verify_json, verify_seed, verify_inject);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
