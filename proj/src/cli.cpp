#include "vmad/cli.hpp"

#include "vmad/csv.hpp"
#include "vmad/datagen.hpp"
#include "vmad/errors.hpp"
#include "vmad/math_util.hpp"
#include "vmad/metrics.hpp"
#include "vmad/mlp.hpp"
#include "vmad/scorer.hpp"
#include "vmad/theory.hpp"
#include "vmad/velocity_field.hpp"
#include "vmad/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

namespace vmad::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json section(const json& cfg, const char* name) {
    return cfg.contains(name) ? cfg.at(name) : json::object();
}

template <typename T>
T get_or(const json& j, const char* key, T def) {
    return j.contains(key) ? j.at(key).get<T>() : def;
}

std::uint64_t cfg_seed(const json& cfg) { return get_or<std::uint64_t>(cfg, "seed", 0); }

std::uint64_t config_hash(const json& cfg) { return fnv1a_64(cfg.dump()); }

json meta_block(const json& cfg) {
    return json{{"tool", std::string(tool_name)},
                {"version", std::string(tool_version)},
                {"config_hash", hex64(config_hash(cfg))},
                {"seed", cfg_seed(cfg)}};
}

fs::path out_dir(const json& cfg) {
    const auto out = get_or<std::string>(cfg, "out", "");
    if (out.empty()) throw std::invalid_argument("missing output directory (--out)");
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory: " + dir.string());
    return dir;
}

// Every command echoes its effective config for audit.
void write_run_config(const fs::path& dir, const json& cfg) {
    json echo = cfg;
    echo["meta"] = meta_block(cfg);
    write_text_file(dir / "run_config.json", echo.dump(2) + "\n");
}

json parse_json_file(const fs::path& path) {
    if (!fs::exists(path)) throw io_error("file not found: " + path.string());
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw std::invalid_argument("bad JSON in " + path.string() + ": " + e.what());
    }
}

std::string target_name(std::size_t index, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "target_%03zu_%s", index, suffix);
    return buf;
}

// Per-target sub-seed split from the master seed, independent of K and T.
std::uint64_t target_seed(std::uint64_t master, std::size_t index) {
    return RngState::seeded(master).split(index).key;
}

ScoringConfig scoring_from(const json& cfg) {
    ScoringConfig sc = ScoringConfig::from_json(section(cfg, "scoring"));
    sc.seed = cfg_seed(cfg);
    return sc;
}

VelocityField load_field(const json& cfg, std::size_t expected_dim) {
    const json fj = section(cfg, "field");
    const auto type = get_or<std::string>(fj, "type", "");
    const auto path = get_or<std::string>(fj, "path", "");
    if (type.empty() || path.empty())
        throw std::invalid_argument("field requires type (gmm|mlp) and path");
    const json doc = parse_json_file(path);
    if (type == "gmm") {
        const GMMSpec gmm = GMMSpec::from_json(doc.contains("weights") ? doc : doc.at("gmm"));
        if (expected_dim != 0 && gmm.dim() != expected_dim)
            throw std::invalid_argument("field dimension does not match the targets");
        return gmm_oracle_field(gmm);
    }
    if (type == "mlp") {
        const MLPParams params =
            MLPParams::from_json(doc.contains("model") ? doc.at("model") : doc);
        if (expected_dim != 0 && params.data_dim != expected_dim)
            throw std::invalid_argument("field dimension does not match the targets");
        return mlp_field(params);
    }
    throw std::invalid_argument("unknown field type '" + type + "'");
}

void parallel_over(std::size_t count, std::size_t workers,
                   const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(std::min(workers, count));
    for (std::size_t w = 0; w < errors.size(); ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------- gen-data

int run_gen_data(const json& cfg) {
    const json data = section(cfg, "data");
    const auto kind = get_or<std::string>(data, "kind", "halfmoon");
    const fs::path dir = out_dir(cfg);
    const std::string meta = csv_meta_line(config_hash(cfg), cfg_seed(cfg));
    RngState rng = RngState::seeded(cfg_seed(cfg));

    if (kind == "halfmoon") {
        const auto n = get_or<std::size_t>(data, "n", 500);
        const auto noise = get_or<double>(data, "noise", 0.05);
        const LabeledSet set = gen_halfmoon(n, noise, rng);
        save_labeled_set(dir, set, meta, meta_block(cfg).dump());
        const auto comps = get_or<std::size_t>(data, "arc_components", 256);
        json field = halfmoon_arc_gmm(comps, noise).to_json();
        field["meta"] = meta_block(cfg);
        write_text_file(dir / "arc_gmm.json", field.dump() + "\n");
    } else if (kind == "clusters") {
        ClusterSpec spec;
        spec.n = get_or<std::size_t>(data, "n", 500);
        const LabeledSet set = gen_clusters(spec, rng);
        save_labeled_set(dir, set, meta, meta_block(cfg).dump());
        json field = spec.to_gmm().to_json();
        field["meta"] = meta_block(cfg);
        write_text_file(dir / "gmm.json", field.dump() + "\n");
    } else if (kind == "grid-image") {
        DefectSpec defect;
        defect.shape = DefectSpec::parse_shape(get_or<std::string>(data, "defect_shape", "rect"));
        defect.max_extent = get_or<std::size_t>(data, "defect_extent", 5);
        defect.intensity_shift = get_or<double>(data, "defect_shift", 0.8);
        const auto size = get_or<std::size_t>(data, "size", 16);
        const auto n_normal = get_or<std::size_t>(data, "n_normal", 20);
        const auto n_anomalous = get_or<std::size_t>(data, "n_anomalous", 10);
        const LabeledSet set = gen_grid_images(size, n_normal, n_anomalous, defect, rng);
        save_labeled_set(dir, set, meta, meta_block(cfg).dump());
        std::vector<Target> normals;
        for (std::size_t i = 0; i < set.samples.size(); ++i)
            if (set.labels[i] == 0) normals.push_back(set.samples[i]);
        const auto bandwidth = get_or<double>(data, "kde_bandwidth", 0.25);
        json field = kde_gmm(normals, bandwidth).to_json();
        field["meta"] = meta_block(cfg);
        write_text_file(dir / "kde_gmm.json", field.dump() + "\n");
    } else if (kind == "eval-grid") {
        // Half-moon evaluation lattice, labeled by distance to the arc:
        // < near -> normal, > far -> anomalous, in between dropped.
        const auto res1 = get_or<std::size_t>(data, "res1", 40);
        const auto res2 = get_or<std::size_t>(data, "res2", 40);
        const auto near = get_or<double>(data, "near_distance", 0.5);
        const auto far = get_or<double>(data, "far_distance", 2.0);
        LabeledSet set;
        set.kind = "eval-grid";
        for (const auto& p : gen_eval_grid(res1, res2)) {
            const double dist = distance_to_arc(p);
            if (dist >= near && dist <= far) continue;
            set.samples.push_back(Target::from_point(p));
            set.labels.push_back(dist > far ? 1 : 0);
        }
        save_labeled_set(dir, set, meta, meta_block(cfg).dump());
    } else {
        throw std::invalid_argument("unknown data kind '" + kind + "'");
    }
    write_run_config(dir, cfg);
    return 0;
}

// ------------------------------------------------------------------- train

int run_train(const json& cfg) {
    const auto input = get_or<std::string>(cfg, "input", "");
    if (input.empty()) throw std::invalid_argument("train requires --input dataset");
    const LabeledSet set = load_labeled_set(input);
    std::vector<Vec> data;
    for (std::size_t i = 0; i < set.samples.size(); ++i)
        if (set.labels[i] == 0) data.push_back(set.samples[i].values);
    if (data.empty()) throw std::invalid_argument("train: dataset has no normal samples");

    const json tj = section(cfg, "train");
    TrainConfig tc;
    tc.learning_rate = get_or<double>(tj, "learning_rate", 1e-4);
    tc.epochs = get_or<std::size_t>(tj, "epochs", 2000);
    tc.batch_size = get_or<std::size_t>(tj, "batch_size", 64);
    tc.optimizer = get_or<std::string>(tj, "optimizer", "adam");
    tc.weight_decay = get_or<double>(tj, "weight_decay", 0.0);
    tc.seed = cfg_seed(cfg);
    const auto hidden = get_or<std::vector<std::size_t>>(tj, "hidden", {128, 128, 128});

    RngState rng = RngState::seeded(tc.seed);
    const TrainResult result = train_cfm(data, hidden, tc, rng);

    const fs::path dir = out_dir(cfg);
    json model{{"meta", meta_block(cfg)}, {"model", result.params.to_json()}};
    write_text_file(dir / "model.json", model.dump() + "\n");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t e = 0; e < result.loss_curve.size(); ++e)
        rows.push_back({std::to_string(e + 1), format_double(result.loss_curve[e])});
    write_table_csv(dir / "loss.csv", "epoch,loss", rows,
                    csv_meta_line(config_hash(cfg), cfg_seed(cfg)));
    write_run_config(dir, cfg);
    return 0;
}

// ------------------------------------------------------------------- score

struct ScoredTarget {
    ScoreReport report;
    Heatmap heatmap;
    double score = 0.0;
};

int run_score(const json& cfg) {
    const auto input = get_or<std::string>(cfg, "input", "");
    if (input.empty()) throw std::invalid_argument("score requires --input dataset");
    const LabeledSet set = load_labeled_set(input);
    if (set.samples.empty()) throw std::invalid_argument("score: empty dataset");
    const VelocityField field = load_field(cfg, set.samples.front().flat_size());

    const ScoringConfig base = scoring_from(cfg);
    const auto method = get_or<std::string>(cfg, "method", "mismatch");
    const auto t_init = get_or<double>(cfg, "t_init", 0.5);
    const auto euler_steps = get_or<std::size_t>(cfg, "euler_steps", 10);
    const auto workers = get_or<std::size_t>(cfg, "workers", 1);
    const bool dump_cube = get_or<bool>(cfg, "dump_cube", false);
    if (method != "mismatch" && method != "reconflow")
        throw std::invalid_argument("score method must be 'mismatch' or 'reconflow'");

    const fs::path dir = out_dir(cfg);
    const std::string meta = csv_meta_line(config_hash(cfg), cfg_seed(cfg));

    std::vector<ScoredTarget> results(set.samples.size());
    parallel_over(set.samples.size(), workers, [&](std::size_t i) {
        ScoringConfig sc = base;
        sc.seed = target_seed(base.seed, i);
        if (method == "mismatch") {
            MismatchCube cube;
            results[i].report = score_target(field, set.samples[i], sc,
                                             dump_cube ? &cube : nullptr);
            results[i].heatmap = results[i].report.heatmap;
            results[i].score = results[i].report.score;
            if (dump_cube) write_cube_csv(dir / target_name(i, "cube.csv"), cube, meta);
        } else {
            results[i].heatmap = reconflow_score(field, set.samples[i], sc, t_init, euler_steps);
            results[i].score = image_score(results[i].heatmap.values, sc.top_fraction);
            results[i].report.config = sc;
            results[i].report.heatmap = results[i].heatmap;
            results[i].report.score = results[i].score;
            results[i].report.field_evaluations =
                static_cast<std::uint64_t>(sc.paths) * euler_steps;
        }
    });

    std::vector<std::vector<std::string>> score_rows;
    for (std::size_t i = 0; i < results.size(); ++i) {
        json doc = results[i].report.to_json();
        doc["meta"] = meta_block(cfg);
        doc["index"] = i;
        doc["label"] = set.labels[i];
        doc["method"] = method;
        write_text_file(dir / target_name(i, "score.json"), doc.dump() + "\n");
        write_grid_csv(dir / target_name(i, "heatmap.csv"), results[i].heatmap.to_grid(), meta);
        score_rows.push_back({std::to_string(i), std::to_string(set.labels[i]),
                              format_double(results[i].score)});
    }
    write_table_csv(dir / "scores.csv", "index,label,score", score_rows, meta);
    write_run_config(dir, cfg);
    return 0;
}

// ------------------------------------------------------------------ verify

int run_verify(const json& cfg) {
    std::vector<std::string> selection = get_or<std::vector<std::string>>(cfg, "checks", {});
    const auto reports = run_default_checks(selection, cfg_seed(cfg));
    const fs::path dir = out_dir(cfg);
    json doc{{"meta", meta_block(cfg)}, {"checks", reports_to_json(reports)}};
    write_text_file(dir / "checks.json", doc.dump(2) + "\n");
    const std::string table = reports_table(reports);
    write_text_file(dir / "checks.txt", table);
    std::cout << table;
    write_run_config(dir, cfg);
    for (const auto& r : reports)
        if (!r.pass) return static_cast<int>(exit_code::check_failure);
    return 0;
}

// ------------------------------------------------------------------- sweep

int run_sweep(const json& cfg) {
    const auto input = get_or<std::string>(cfg, "input", "");
    if (input.empty()) throw std::invalid_argument("sweep requires --input dataset");
    const LabeledSet set = load_labeled_set(input);
    if (set.samples.empty()) throw std::invalid_argument("sweep: empty dataset");

    const json sj = section(cfg, "sweep");
    const auto paths_list = get_or<std::vector<std::size_t>>(sj, "paths_list", {2, 5, 10});
    const auto steps_list = get_or<std::vector<std::size_t>>(sj, "steps_list", {2, 5, 10});
    const auto workers = get_or<std::size_t>(cfg, "workers", 1);
    const ScoringConfig base = scoring_from(cfg);

    auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);
    const VelocityField field =
        counting_field(load_field(cfg, set.samples.front().flat_size()), counter);

    std::vector<std::vector<std::string>> rows, timing_rows;
    for (std::size_t k : paths_list) {
        for (std::size_t t : steps_list) {
            ScoringConfig sc = base;
            sc.paths = k;
            sc.steps = t;
            counter->store(0);
            const auto start = std::chrono::steady_clock::now();
            std::vector<double> scores(set.samples.size());
            parallel_over(set.samples.size(), workers, [&](std::size_t i) {
                ScoringConfig per = sc;
                per.seed = target_seed(base.seed, i);
                scores[i] = score_target(field, set.samples[i], per).score;
            });
            const auto stop = std::chrono::steady_clock::now();
            const double wall_ms =
                std::chrono::duration<double, std::milli>(stop - start).count();
            const double evals_per_image = static_cast<double>(counter->load()) /
                                           static_cast<double>(set.samples.size());
            const double roc = auroc(scores, set.labels);
            const double ap = average_precision(scores, set.labels);
            const auto [f1, th] = f1_max(scores, set.labels);
            (void)th;
            rows.push_back({std::to_string(k), std::to_string(t), std::to_string(k * t),
                            format_double(evals_per_image), format_double(roc),
                            format_double(ap), format_double(f1)});
            timing_rows.push_back(
                {std::to_string(k), std::to_string(t), format_double(wall_ms),
                 format_double(1000.0 * static_cast<double>(set.samples.size()) / wall_ms)});
        }
    }
    const fs::path dir = out_dir(cfg);
    const std::string meta = csv_meta_line(config_hash(cfg), cfg_seed(cfg));
    write_table_csv(dir / "sweep.csv", "K,T,KT,evals_per_image,auroc,ap,f1max", rows, meta);
    // Timing is environment-dependent, so it lives outside the primary CSV.
    write_table_csv(dir / "sweep_timing.csv", "K,T,wall_ms,images_per_second", timing_rows, meta);
    write_run_config(dir, cfg);
    return 0;
}

// -------------------------------------------------------------------- eval

int run_eval(const json& cfg) {
    const json ej = section(cfg, "eval");
    const auto mode = get_or<std::string>(ej, "mode", "image");
    const auto input = get_or<std::string>(cfg, "input", "");
    if (input.empty()) throw std::invalid_argument("eval requires --input");
    const fs::path dir = out_dir(cfg);
    const std::string meta = csv_meta_line(config_hash(cfg), cfg_seed(cfg));
    const bool want_curves = get_or<bool>(ej, "curves", false);

    MetricsReport report;
    if (mode == "image") {
        // Any CSV with 'label' and 'score' columns, e.g. scores.csv from a
        // score run.
        std::vector<double> scores;
        std::vector<int> labels;
        {
            const std::string text = read_text_file(input);
            std::istringstream in(text);
            std::string line;
            std::vector<std::string> header;
            long score_col = -1, label_col = -1;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                std::vector<std::string> fields;
                std::string cur;
                for (char c : line) {
                    if (c == ',') {
                        fields.push_back(cur);
                        cur.clear();
                    } else
                        cur.push_back(c);
                }
                fields.push_back(cur);
                if (header.empty()) {
                    header = fields;
                    for (std::size_t i = 0; i < header.size(); ++i) {
                        if (header[i] == "score") score_col = static_cast<long>(i);
                        if (header[i] == "label") label_col = static_cast<long>(i);
                    }
                    if (score_col < 0 || label_col < 0)
                        throw std::invalid_argument("eval: input needs 'label' and 'score' columns");
                    continue;
                }
                if (fields.size() != header.size())
                    throw io_error("eval: malformed row in " + input);
                char* end = nullptr;
                const std::string& sf = fields[static_cast<std::size_t>(score_col)];
                scores.push_back(std::strtod(sf.c_str(), &end));
                if (end == sf.c_str()) throw io_error("eval: bad score value in " + input);
                labels.push_back(static_cast<int>(
                    std::strtol(fields[static_cast<std::size_t>(label_col)].c_str(), nullptr, 10)));
            }
        }
        report.auroc = auroc(scores, labels);
        report.ap = average_precision(scores, labels);
        std::tie(report.f1max, report.threshold_at_f1max) = f1_max(scores, labels);
        if (want_curves) write_score_curves_csv(dir / "curves.csv", scores, labels, meta);
    } else if (mode == "pixel") {
        const LabeledSet set = load_labeled_set(input);
        if (set.kind != "grid-image")
            throw std::invalid_argument("eval pixel mode requires a grid-image dataset with masks");
        const auto scores_dir = get_or<std::string>(cfg, "scores", "");
        if (scores_dir.empty())
            throw std::invalid_argument("eval pixel mode requires --scores directory");
        std::vector<Heatmap> heatmaps;
        std::vector<std::vector<std::uint8_t>> masks;
        std::vector<double> pixel_scores;
        std::vector<int> pixel_labels;
        for (std::size_t i = 0; i < set.samples.size(); ++i) {
            const GridData grid =
                read_grid_csv(fs::path(scores_dir) / target_name(i, "heatmap.csv"));
            if (grid.channels != 1 || grid.width != set.samples[i].width ||
                grid.height != set.samples[i].height)
                throw std::invalid_argument("eval: heatmap shape does not match dataset");
            Heatmap h;
            h.width = grid.width;
            h.height = grid.height;
            h.values = grid.values;
            for (std::size_t p = 0; p < h.values.size(); ++p) {
                pixel_scores.push_back(h.values[p]);
                pixel_labels.push_back(set.samples[i].mask[p] ? 1 : 0);
            }
            heatmaps.push_back(std::move(h));
            masks.push_back(set.samples[i].mask);
        }
        report.auroc = auroc(pixel_scores, pixel_labels);
        report.ap = average_precision(pixel_scores, pixel_labels);
        std::tie(report.f1max, report.threshold_at_f1max) = f1_max(pixel_scores, pixel_labels);
        std::vector<ProPoint> curve;
        report.aupro = aupro(heatmaps, masks, get_or<double>(ej, "fpr_limit", 0.3), &curve);
        if (want_curves) {
            write_score_curves_csv(dir / "curves.csv", pixel_scores, pixel_labels, meta);
            write_pro_curve_csv(dir / "pro_curve.csv", curve, meta);
        }
    } else {
        throw std::invalid_argument("eval mode must be 'image' or 'pixel'");
    }

    json doc{{"meta", meta_block(cfg)}, {"metrics", report.to_json()}, {"mode", mode}};
    write_text_file(dir / "metrics.json", doc.dump(2) + "\n");
    std::cout << doc["metrics"].dump(2) << "\n";
    write_run_config(dir, cfg);
    return 0;
}

// ---------------------------------------------------------------- dispatch

int dispatch(const std::string& command, const json& cfg) {
    if (command == "gen-data") return run_gen_data(cfg);
    if (command == "train") return run_train(cfg);
    if (command == "score") return run_score(cfg);
    if (command == "verify") return run_verify(cfg);
    if (command == "sweep") return run_sweep(cfg);
    if (command == "eval") return run_eval(cfg);
    throw std::invalid_argument("unknown command '" + command + "'");
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(static_cast<std::size_t>(std::stoull(cur)));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (out.empty()) throw std::invalid_argument("expected a comma-separated list, got '" + text + "'");
    return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    return out;
}

} // namespace

int run_command(const std::vector<std::string>& args) {
    CLI::App app{"velocity-mismatch anomaly scoring along affine noise-to-target paths"};
    app.set_version_flag("--version", std::string(tool_name) + " " + std::string(tool_version));
    app.require_subcommand(1);

    // Raw option storage; only options the user actually set override the
    // config file.
    std::string config_path, out, input, scores_dir, aggregator, method, checks, mode, kind,
        field_type, field_path, defect_shape, optimizer, hidden, paths_list, steps_list;
    std::uint64_t seed = 0;
    std::size_t paths = 0, steps = 0, workers = 0, n = 0, size = 0, n_normal = 0,
                n_anomalous = 0, defect_extent = 0, epochs = 0, batch = 0, euler_steps = 0,
                res1 = 0, res2 = 0, arc_components = 0;
    double weight_exp = 0, top_frac = 0, noise = 0, defect_shift = 0, lr = 0, weight_decay = 0,
           t_init = 0, fpr_limit = 0, bandwidth = 0;
    bool dump_cube = false, curves = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags win over it");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--workers", workers, "worker threads");
    };

    CLI::App* sub_gen = app.add_subcommand("gen-data", "generate a toy dataset");
    add_common(sub_gen);
    sub_gen->add_option("--kind", kind, "halfmoon|clusters|grid-image|eval-grid");
    sub_gen->add_option("--n", n, "sample count");
    sub_gen->add_option("--noise", noise, "half-moon jitter");
    sub_gen->add_option("--size", size, "grid-image side length");
    sub_gen->add_option("--n-normal", n_normal, "normal grid images");
    sub_gen->add_option("--n-anomalous", n_anomalous, "anomalous grid images");
    sub_gen->add_option("--defect-shape", defect_shape, "rect|blob");
    sub_gen->add_option("--defect-extent", defect_extent, "defect size bound");
    sub_gen->add_option("--defect-shift", defect_shift, "defect intensity shift");
    sub_gen->add_option("--bandwidth", bandwidth, "KDE field bandwidth");
    sub_gen->add_option("--arc-components", arc_components, "arc mixture components");
    sub_gen->add_option("--res1", res1, "eval-grid x1 resolution");
    sub_gen->add_option("--res2", res2, "eval-grid x2 resolution");

    CLI::App* sub_train = app.add_subcommand("train", "train the MLP flow on a dataset");
    add_common(sub_train);
    sub_train->add_option("--input", input, "dataset file or directory");
    sub_train->add_option("--lr", lr, "learning rate");
    sub_train->add_option("--epochs", epochs, "gradient steps");
    sub_train->add_option("--batch", batch, "batch size");
    sub_train->add_option("--optimizer", optimizer, "adam|sgd");
    sub_train->add_option("--weight-decay", weight_decay, "decoupled weight decay");
    sub_train->add_option("--hidden", hidden, "hidden widths, e.g. 128,128,128");

    CLI::App* sub_score = app.add_subcommand("score", "score targets with a velocity field");
    add_common(sub_score);
    sub_score->add_option("--input", input, "dataset file or directory");
    sub_score->add_option("--field-type", field_type, "gmm|mlp");
    sub_score->add_option("--field", field_path, "field spec file");
    sub_score->add_option("--paths", paths, "K sampled paths");
    sub_score->add_option("--steps", steps, "T interior time steps");
    sub_score->add_option("--aggregator", aggregator, "min|avg|p10|p20|p30|pNN");
    sub_score->add_option("--weight-exp", weight_exp, "time weight exponent");
    sub_score->add_option("--top-frac", top_frac, "image-score top fraction");
    sub_score->add_option("--method", method, "mismatch|reconflow");
    sub_score->add_option("--t-init", t_init, "reconflow start time");
    sub_score->add_option("--euler-steps", euler_steps, "reconflow integration steps");
    sub_score->add_flag("--dump-cube", dump_cube, "write per-target residual cubes");

    CLI::App* sub_verify = app.add_subcommand("verify", "run the numerical check suite");
    add_common(sub_verify);
    sub_verify->add_option("--checks", checks, "comma-separated check name prefixes");

    CLI::App* sub_sweep = app.add_subcommand("sweep", "K/T compute-budget sweep");
    add_common(sub_sweep);
    sub_sweep->add_option("--input", input, "labeled dataset");
    sub_sweep->add_option("--field-type", field_type, "gmm|mlp");
    sub_sweep->add_option("--field", field_path, "field spec file");
    sub_sweep->add_option("--paths-list", paths_list, "K values, e.g. 2,5,10");
    sub_sweep->add_option("--steps-list", steps_list, "T values, e.g. 2,5,10");
    sub_sweep->add_option("--aggregator", aggregator, "min|avg|p10|p20|p30|pNN");
    sub_sweep->add_option("--weight-exp", weight_exp, "time weight exponent");
    sub_sweep->add_option("--top-frac", top_frac, "image-score top fraction");

    CLI::App* sub_eval = app.add_subcommand("eval", "compute anomaly metrics");
    add_common(sub_eval);
    sub_eval->add_option("--input", input, "scores CSV (image) or dataset dir (pixel)");
    sub_eval->add_option("--mode", mode, "image|pixel");
    sub_eval->add_option("--scores", scores_dir, "score output dir (pixel mode)");
    sub_eval->add_option("--fpr-limit", fpr_limit, "AUPRO integration limit");
    sub_eval->add_flag("--curves", curves, "write plot-ready curve CSVs");

    std::vector<std::string> argv_copy = args;
    std::vector<char*> argv_ptrs;
    argv_ptrs.push_back(const_cast<char*>("vmad"));
    for (auto& a : argv_copy) argv_ptrs.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv_ptrs.size()), argv_ptrs.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(exit_code::invalid_argument);
    }

    try {
        json cfg = json::object();
        if (!config_path.empty()) cfg = parse_json_file(config_path);

        CLI::App* sub = app.get_subcommands().front();
        const std::string command = sub->get_name();
        auto set_if = [&](const char* opt, auto&& apply) {
            const auto* option = sub->get_option_no_throw(opt);
            if (option && option->count() > 0) apply();
        };
        set_if("--seed", [&] { cfg["seed"] = seed; });
        set_if("--out", [&] { cfg["out"] = out; });
        set_if("--workers", [&] { cfg["workers"] = workers; });
        set_if("--input", [&] { cfg["input"] = input; });
        set_if("--kind", [&] { cfg["data"]["kind"] = kind; });
        set_if("--n", [&] { cfg["data"]["n"] = n; });
        set_if("--noise", [&] { cfg["data"]["noise"] = noise; });
        set_if("--size", [&] { cfg["data"]["size"] = size; });
        set_if("--n-normal", [&] { cfg["data"]["n_normal"] = n_normal; });
        set_if("--n-anomalous", [&] { cfg["data"]["n_anomalous"] = n_anomalous; });
        set_if("--defect-shape", [&] { cfg["data"]["defect_shape"] = defect_shape; });
        set_if("--defect-extent", [&] { cfg["data"]["defect_extent"] = defect_extent; });
        set_if("--defect-shift", [&] { cfg["data"]["defect_shift"] = defect_shift; });
        set_if("--bandwidth", [&] { cfg["data"]["kde_bandwidth"] = bandwidth; });
        set_if("--arc-components", [&] { cfg["data"]["arc_components"] = arc_components; });
        set_if("--res1", [&] { cfg["data"]["res1"] = res1; });
        set_if("--res2", [&] { cfg["data"]["res2"] = res2; });
        set_if("--lr", [&] { cfg["train"]["learning_rate"] = lr; });
        set_if("--epochs", [&] { cfg["train"]["epochs"] = epochs; });
        set_if("--batch", [&] { cfg["train"]["batch_size"] = batch; });
        set_if("--optimizer", [&] { cfg["train"]["optimizer"] = optimizer; });
        set_if("--weight-decay", [&] { cfg["train"]["weight_decay"] = weight_decay; });
        set_if("--hidden", [&] { cfg["train"]["hidden"] = parse_size_list(hidden); });
        set_if("--field-type", [&] { cfg["field"]["type"] = field_type; });
        set_if("--field", [&] { cfg["field"]["path"] = field_path; });
        set_if("--paths", [&] { cfg["scoring"]["paths"] = paths; });
        set_if("--steps", [&] { cfg["scoring"]["steps"] = steps; });
        set_if("--aggregator", [&] { cfg["scoring"]["aggregator"] = aggregator; });
        set_if("--weight-exp", [&] { cfg["scoring"]["weight_exponent"] = weight_exp; });
        set_if("--top-frac", [&] { cfg["scoring"]["top_fraction"] = top_frac; });
        set_if("--method", [&] { cfg["method"] = method; });
        set_if("--t-init", [&] { cfg["t_init"] = t_init; });
        set_if("--euler-steps", [&] { cfg["euler_steps"] = euler_steps; });
        set_if("--dump-cube", [&] { cfg["dump_cube"] = dump_cube; });
        set_if("--checks", [&] { cfg["checks"] = parse_string_list(checks); });
        set_if("--paths-list", [&] { cfg["sweep"]["paths_list"] = parse_size_list(paths_list); });
        set_if("--steps-list", [&] { cfg["sweep"]["steps_list"] = parse_size_list(steps_list); });
        set_if("--mode", [&] { cfg["eval"]["mode"] = mode; });
        set_if("--scores", [&] { cfg["scores"] = scores_dir; });
        set_if("--fpr-limit", [&] { cfg["eval"]["fpr_limit"] = fpr_limit; });
        set_if("--curves", [&] { cfg["eval"]["curves"] = curves; });

        return dispatch(command, cfg);
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return static_cast<int>(exit_code::io);
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return static_cast<int>(exit_code::numeric);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return static_cast<int>(exit_code::invalid_argument);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return static_cast<int>(exit_code::invalid_argument);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(exit_code::failure);
    }
}

int main_entry(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_command(args);
}

} // namespace vmad::cli
