// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria with stated runtime budgets fail when over budget.

#include "metric_oracles.hpp"

#include "vmad/csv.hpp"
#include "vmad/datagen.hpp"
#include "vmad/math_util.hpp"
#include "vmad/metrics.hpp"
#include "vmad/mlp.hpp"
#include "vmad/scorer.hpp"
#include "vmad/theory.hpp"
#include "vmad/velocity_field.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace vmad;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

GMMSpec gauss_1d(double mean) {
    GMMSpec g;
    g.weights = {1.0};
    g.means = {Vec{mean}};
    g.variances = {1.0};
    return g;
}

GMMSpec two_comp(std::size_t dim) {
    GMMSpec g;
    g.weights = {0.5, 0.5};
    if (dim == 1) {
        g.means = {Vec{-1.5}, Vec{2.0}};
        g.variances = {0.8, 0.5};
    } else {
        g.means = {Vec{-2.0, 0.0}, Vec{2.0, 1.0}};
        g.variances = {1.0, 0.6};
    }
    return g;
}

std::uint64_t target_seed(std::uint64_t master, std::size_t index) {
    return RngState::seeded(master).split(index).key;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// ---- criterion 1: exact identities at 1e-10 over >= 1000 random triples

Outcome criterion_exact_identities() {
    RngState rng = RngState::seeded(101);
    const auto res_gauss = check_residual_identity(GMMSpec::standard_normal(2), 1000, rng);
    GMMSpec mix = two_comp(2);
    const auto res_mix = check_residual_identity(mix, 1000, rng);

    // Pathwise velocity-score identity on random (x0, y, t) triples.
    double pathwise_worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
        const Vec y = mix.sample(rng);
        const Vec x0 = sample_standard_normal(2, rng);
        const double t = 0.02 + 0.96 * rng.next_unit();
        Vec x_t(2);
        for (std::size_t k = 0; k < 2; ++k) x_t[k] = (1.0 - t) * x0[k] + t * y[k];
        const Vec v = oracle_velocity(mix, t, x_t);
        const Vec s_cond = conditional_path_score(y, t, x_t);
        const Vec s_marg = path_marginal_score(mix, t, x_t);
        double res = 0.0, gap = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            const double rv = v[k] - (y[k] - x0[k]);
            const double gs = s_cond[k] - s_marg[k];
            res += rv * rv;
            gap += gs * gs;
        }
        const double lhs = (1.0 - t) * std::sqrt(res);
        const double rhs = (1.0 - t) * (1.0 - t) / t * std::sqrt(gap);
        pathwise_worst = std::max(pathwise_worst,
                                  std::abs(lhs - rhs) / std::max({lhs, rhs, 1e-30}));
    }

    RngState rng2 = RngState::seeded(102);
    const auto ew = check_endpoint_weight_identity(gmm_oracle_field(mix), mix, 1000, rng2);

    Outcome out;
    out.pass = res_gauss.pass && res_mix.pass && pathwise_worst < 1e-10 && ew.pass;
    out.detail = "max rel err: residual link " +
                 fmt(std::max(res_gauss.extra("max_rel_error"), res_mix.extra("max_rel_error"))) +
                 ", pathwise " + fmt(pathwise_worst) + ", endpoint " +
                 fmt(ew.extra("max_rel_error"));
    return out;
}

// ---- criterion 2: Tweedie vs quadrature, 9 probes x 3 times, < 1e-6

Outcome criterion_tweedie() {
    GMMSpec g;
    g.weights = {0.3, 0.7};
    g.means = {Vec{-2.0}, Vec{1.5}};
    g.variances = {0.5, 1.0};
    const std::vector<double> probes{-4, -3, -2, -1, 0, 1, 2, 3, 4};
    double worst = 0.0;
    bool pass = true;
    for (double t : {0.25, 0.5, 0.9}) {
        const auto rep = check_tweedie(g, t, probes);
        pass = pass && rep.pass;
        worst = std::max(worst, rep.extra("max_abs_error"));
    }
    return {pass, "max abs err " + fmt(worst) + " over 9 probes x 3 times"};
}

// ---- criterion 3: population decomposition at n = 1e5 plus null control

Outcome criterion_decomposition() {
    bool pass = true;
    std::string detail;
    for (double t : {0.25, 0.5, 0.75}) {
        RngState rng = RngState::seeded(300 + static_cast<std::uint64_t>(t * 100));
        const auto rep = check_decomposition(gauss_1d(0.0), gauss_1d(3.0), t, 100000, rng);
        pass = pass && rep.pass;
        detail += "t=" + fmt(t) + " |diff|=" + fmt(std::abs(rep.extra("diff"))) + "<=3SE=" +
                  fmt(rep.tolerance) + "; ";
    }
    RngState rng = RngState::seeded(399);
    const auto null_rep = check_decomposition_null(gauss_1d(0.0), 0.5, 100000, rng);
    pass = pass && null_rep.pass;
    detail += "null Fisher " + fmt(null_rep.rhs);
    return {pass, detail};
}

// ---- criterion 4: late-time bound for d in {1,2}

Outcome criterion_late_time() {
    const std::vector<double> grid{0.5, 0.9, 0.99, 0.999};
    bool pass = true;
    std::string detail;
    for (std::size_t d : {1u, 2u}) {
        RngState rng = RngState::seeded(400 + d);
        const auto rep = check_late_time_bound(two_comp(d), grid, 100000, rng);
        pass = pass && rep.pass;
        detail += "d=" + std::to_string(d) + " max " + fmt(rep.lhs) + " vs bound " +
                  fmt(rep.rhs) + "+3SE; ";
    }
    return {pass, detail};
}

// ---- criterion 5: quantile bridge, pathwise identity, learned-field bound

Outcome criterion_quantile_bridge() {
    const GMMSpec p = GMMSpec::standard_normal(2);
    const std::vector<double> alphas{0.1, 0.5, 0.9};
    RngState rng = RngState::seeded(500);
    const auto eq7 = check_quantile_bridge(p, Vec{2.0, 2.0}, 0.5, alphas, 100000, rng);
    RngState rng_75 = RngState::seeded(501);
    const auto eq7_75 = check_quantile_bridge(p, Vec{2.0, 2.0}, 0.75, alphas, 100000, rng_75);

    RngState rng2 = RngState::seeded(502);
    const auto oracle_rep =
        check_learned_bridge(gmm_oracle_field(p), p, Vec{2.0, 2.0}, 0.5, 0.3, 0.3, 100000, rng2);
    RngState rng3 = RngState::seeded(503);
    const auto pert_rep = check_learned_bridge(offset_field(gmm_oracle_field(p), Vec{0.3, -0.2}),
                                               p, Vec{2.0, 2.0}, 0.5, 0.3, 0.3, 100000, rng3);

    // Trained field: a quick MLP on half-moon data, compared against the
    // arc mixture as the normal law.
    RngState data_rng = RngState::seeded(504);
    const LabeledSet moons = gen_halfmoon(800, 0.05, data_rng);
    std::vector<Vec> data;
    for (const auto& s : moons.samples) data.push_back(s.values);
    TrainConfig tc;
    tc.learning_rate = 1e-3;
    tc.epochs = 800;
    tc.batch_size = 64;
    tc.seed = 505;
    const std::size_t hidden[] = {64, 64};
    RngState train_rng = RngState::seeded(tc.seed);
    const TrainResult trained = train_cfm(data, hidden, tc, train_rng);
    const GMMSpec arc = halfmoon_arc_gmm(64, 0.05);
    RngState rng4 = RngState::seeded(506);
    const auto trained_rep = check_learned_bridge(mlp_field(trained.params), arc, Vec{6.0, -1.0},
                                                  0.5, 0.3, 0.3, 100000, rng4);

    Outcome out;
    out.pass = eq7.pass && eq7_75.pass && oracle_rep.pass && pert_rep.pass && trained_rep.pass;
    out.detail = "pathwise " + fmt(eq7.extra("pathwise_max_rel_error")) +
                 ", learned bound holds for oracle/perturbed/trained";
    return out;
}

// ---- criterion 6: min-aggregation tails within the 99% binomial CI

Outcome criterion_min_tail() {
    const std::vector<std::pair<double, std::size_t>> cases = {{0.1, 3}, {0.3, 5}, {0.5, 1}};
    bool pass = true;
    std::string detail;
    for (auto [r, k] : cases) {
        RngState rng = RngState::seeded(600 + k);
        const auto rep = check_min_tail(r, k, 1000000, rng);
        pass = pass && rep.pass;
        detail += "r=" + fmt(r) + ",K=" + std::to_string(k) + ": " + fmt(rep.lhs) + " vs " +
                  fmt(rep.rhs) + "; ";
    }
    return {pass, detail};
}

// ---- criterion 7: concentration slope -0.5 +- 0.1

Outcome criterion_concentration() {
    const ScalarSampler z = [](RngState& s) {
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double v = s.next_normal();
            acc += v * v;
        }
        return acc;
    };
    RngState rng = RngState::seeded(700);
    const auto rep =
        check_concentration(z, std::vector<std::size_t>{4, 16, 64, 256}, 300, rng);
    return {rep.pass, "slope " + fmt(rep.lhs)};
}

// ---- criterion 8: half-moon replication with oracle and trained fields

struct LabeledGrid {
    std::vector<Target> targets;
    std::vector<int> labels;
};

LabeledGrid labeled_eval_grid() {
    LabeledGrid grid;
    for (const auto& point : gen_eval_grid(40, 40)) {
        const double dist = distance_to_arc(point);
        if (dist >= 0.5 && dist <= 2.0) continue; // ambiguous band excluded
        grid.targets.push_back(Target::from_point(point));
        grid.labels.push_back(dist > 2.0 ? 1 : 0);
    }
    return grid;
}

double grid_auroc(const VelocityField& field, const LabeledGrid& grid, std::uint64_t seed) {
    ScoringConfig sc;
    sc.paths = 10;
    sc.steps = 10;
    sc.aggregator.kind = AggregatorSpec::Kind::min;
    sc.weight_exponent = 2.0;
    std::vector<double> scores(grid.targets.size());
    for (std::size_t i = 0; i < grid.targets.size(); ++i) {
        ScoringConfig per = sc;
        per.seed = target_seed(seed, i);
        scores[i] = score_target(field, grid.targets[i], per, nullptr, 2).score;
    }
    return auroc(scores, grid.labels);
}

Outcome criterion_halfmoon() {
    const LabeledGrid grid = labeled_eval_grid();

    const GMMSpec arc = halfmoon_arc_gmm(256, 0.05);
    const double oracle_auroc = grid_auroc(gmm_oracle_field(arc), grid, 801);

    RngState data_rng = RngState::seeded(802);
    const LabeledSet moons = gen_halfmoon(2000, 0.05, data_rng);
    std::vector<Vec> data;
    for (const auto& s : moons.samples) data.push_back(s.values);
    TrainConfig tc;
    tc.learning_rate = 1e-4;
    tc.epochs = 4000;
    tc.batch_size = 64;
    tc.seed = 803;
    const std::size_t hidden[] = {128, 128, 128};
    RngState train_rng = RngState::seeded(tc.seed);
    const TrainResult trained = train_cfm(data, hidden, tc, train_rng);
    const double trained_auroc = grid_auroc(mlp_field(trained.params), grid, 801);

    Outcome out;
    out.pass = oracle_auroc > 0.98 && trained_auroc > 0.95;
    out.detail = "oracle AUROC " + fmt(oracle_auroc) + " (>0.98), trained AUROC " +
                 fmt(trained_auroc) + " (>0.95)";
    return out;
}

// ---- criterion 9: budget monotonicity and exact evaluation counts

Outcome criterion_budget() {
    DefectSpec defect;
    defect.max_extent = 5;
    defect.intensity_shift = 0.5;
    RngState rng = RngState::seeded(900);
    const LabeledSet set = gen_grid_images(16, 20, 10, defect, rng);
    std::vector<Target> normals;
    for (std::size_t i = 0; i < set.samples.size(); ++i)
        if (set.labels[i] == 0) normals.push_back(set.samples[i]);
    const GMMSpec kde = kde_gmm(normals, 0.25);

    auto run_budget = [&](std::size_t k, std::size_t t, bool& evals_exact) {
        auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);
        const VelocityField field = counting_field(gmm_oracle_field(kde), counter);
        ScoringConfig sc;
        sc.paths = k;
        sc.steps = t;
        sc.aggregator.kind = AggregatorSpec::Kind::min;
        std::vector<double> scores(set.samples.size());
        evals_exact = true;
        for (std::size_t i = 0; i < set.samples.size(); ++i) {
            ScoringConfig per = sc;
            per.seed = target_seed(901, i);
            const std::uint64_t before = counter->load();
            scores[i] = score_target(field, set.samples[i], per).score;
            evals_exact = evals_exact && (counter->load() - before == k * t);
        }
        return auroc(scores, set.labels);
    };

    bool exact_low = false, exact_high = false;
    const double auroc_low = run_budget(2, 2, exact_low);
    const double auroc_high = run_budget(10, 10, exact_high);

    Outcome out;
    out.pass = exact_low && exact_high && (auroc_high >= auroc_low - 0.01);
    out.detail = "AUROC(2,2)=" + fmt(auroc_low) + ", AUROC(10,10)=" + fmt(auroc_high) +
                 ", evals exact=" + (exact_low && exact_high ? "yes" : "no");
    return out;
}

// ---- criterion 10: aggregator ordering on every scored target

Outcome criterion_aggregators() {
    DefectSpec defect;
    RngState rng = RngState::seeded(1000);
    const LabeledSet set = gen_grid_images(8, 3, 3, defect, rng);

    const GMMSpec p = GMMSpec::standard_normal(set.samples.front().flat_size());
    const VelocityField field = gmm_oracle_field(p);

    // All five aggregators must run.
    for (const std::string name : {"min", "avg", "p10", "p20", "p30"}) {
        ScoringConfig sc;
        sc.paths = 10;
        sc.steps = 2;
        sc.aggregator = AggregatorSpec::parse(name);
        sc.seed = 1001;
        (void)score_target(field, set.samples.front(), sc);
    }

    bool ordered = true;
    for (std::size_t idx = 0; idx < set.samples.size(); ++idx) {
        ScoringConfig sc;
        sc.paths = 10;
        sc.steps = 3;
        sc.seed = target_seed(1002, idx);
        MismatchCube cube;
        (void)score_target(field, set.samples[idx], sc, &cube);
        std::vector<double> column(cube.paths);
        for (std::size_t j = 0; j < cube.steps; ++j) {
            for (std::size_t i = 0; i < cube.elements; ++i) {
                for (std::size_t k = 0; k < cube.paths; ++k) column[k] = cube.at(k, j, i);
                const double mn = *std::min_element(column.begin(), column.end());
                const double mx = *std::max_element(column.begin(), column.end());
                const double p10 = order_statistic(column, 0.10);
                const double p20 = order_statistic(column, 0.20);
                const double p30 = order_statistic(column, 0.30);
                ordered = ordered && mn <= p10 && p10 <= p20 && p20 <= p30 && p30 <= mx;
            }
        }
    }
    return {ordered, "min <= p10 <= p20 <= p30 <= max on every element and time"};
}

// ---- criterion 11: metric implementations against brute-force oracles

Outcome criterion_metric_oracles() {
    RngState rng = RngState::seeded(1100);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto inst = oracle::random_instance(rng, 16);
        worst = std::max(worst, std::abs(auroc(inst.scores, inst.labels) -
                                         oracle::auroc_pairs(inst.scores, inst.labels)));
        worst = std::max(worst, std::abs(average_precision(inst.scores, inst.labels) -
                                         oracle::ap_recount(inst.scores, inst.labels)));
        const auto [fast_f1, fast_th] = f1_max(inst.scores, inst.labels);
        const auto [slow_f1, slow_th] = oracle::f1_recount(inst.scores, inst.labels);
        worst = std::max(worst, std::abs(fast_f1 - slow_f1));
        worst = std::max(worst, std::abs(fast_th - slow_th));

        std::vector<Heatmap> hs(2);
        std::vector<std::vector<std::uint8_t>> ms(2);
        bool any = false;
        for (auto& h : hs) {
            h.width = h.height = 4;
            h.values.resize(16);
            for (auto& v : h.values) v = 0.25 * std::floor(rng.next_unit() * 5.0);
        }
        for (auto& m : ms) {
            m.assign(16, 0);
            for (auto& b : m) b = rng.next_unit() < 0.25 ? 1 : 0;
            for (auto b : m) any = any || b;
        }
        if (!any) ms[0][5] = 1;
        worst = std::max(worst,
                         std::abs(aupro(hs, ms, 0.3) - oracle::aupro_exhaustive(hs, ms, 0.3)));
    }
    return {worst < 1e-12, "max |optimized - brute force| = " + fmt(worst)};
}

// ---- criterion 12: gradient check

Outcome criterion_gradients() {
    double worst = 0.0;
    for (std::uint64_t point : {1ull, 2ull, 3ull}) {
        RngState mk = RngState::seeded(1200 + point);
        const std::size_t hidden[] = {32, 32};
        MLPParams params = make_mlp(2, hidden, 8, mk);
        for (auto& w : params.weights.back()) w = 0.3 * mk.next_normal();
        for (auto& b : params.biases.back()) b = 0.3 * mk.next_normal();

        RngState batch_rng = RngState::seeded(1300 + point);
        std::vector<CfmSample> batch(6);
        for (auto& s : batch) {
            s.x0 = sample_standard_normal(2, batch_rng);
            s.x1 = sample_standard_normal(2, batch_rng);
            s.t = 0.05 + 0.9 * batch_rng.next_unit();
        }
        const auto grads = cfm_loss_and_grad(params, batch).second;
        RngState pick = RngState::seeded(1400 + point);
        const double h = 1e-5;
        for (int c = 0; c < 20; ++c) {
            const auto layer = static_cast<std::size_t>(
                pick.next_unit() * static_cast<double>(params.layer_count()));
            auto& theta = params.weights[layer];
            const auto idx =
                static_cast<std::size_t>(pick.next_unit() * static_cast<double>(theta.size()));
            const double saved = theta[idx];
            theta[idx] = saved + h;
            const double up = cfm_loss_and_grad(params, batch).first;
            theta[idx] = saved - h;
            const double down = cfm_loss_and_grad(params, batch).first;
            theta[idx] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double analytic = grads.weights[layer][idx];
            worst = std::max(worst, std::abs(analytic - numeric) /
                                        std::max({std::abs(analytic), std::abs(numeric), 1e-6}));
        }
    }
    return {worst < 1e-4, "max rel gradient err " + fmt(worst)};
}

// ---- criterion 13: byte-identical CLI reruns

std::string dir_fingerprint(const fs::path& dir, const std::vector<std::string>& exclude) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::ostringstream os;
    for (const auto& f : files) {
        if (std::find(exclude.begin(), exclude.end(), f.filename().string()) != exclude.end())
            continue;
        os << f.filename().string() << "\n" << read_text_file(f) << "\n";
    }
    return os.str();
}

Outcome criterion_determinism() {
    const fs::path root = fs::temp_directory_path() / "vmad_acceptance_cli";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string cli = VMAD_CLI_PATH;
    const std::string quiet = " > /dev/null 2>&1";

    const fs::path hm = root / "hm";
    const fs::path gi = root / "gi";
    const fs::path model = root / "model";
    const fs::path scores = root / "scores";
    const fs::path checks = root / "checks";
    const fs::path sweep = root / "sweep";
    const fs::path eval_img = root / "eval_img";
    const fs::path eval_px = root / "eval_px";

    const std::vector<std::pair<std::string, fs::path>> commands = {
        {" gen-data --kind halfmoon --n 30 --seed 5 --out " + hm.string(), hm},
        {" gen-data --kind grid-image --size 8 --n-normal 4 --n-anomalous 2 --seed 6 --out " +
             gi.string(),
         gi},
        {" train --input " + (hm / "points.csv").string() +
             " --epochs 30 --batch 8 --lr 0.001 --hidden 16,16 --seed 7 --out " + model.string(),
         model},
        {" score --input " + gi.string() + " --field-type gmm --field " +
             (gi / "kde_gmm.json").string() + " --paths 3 --steps 3 --seed 8 --out " +
             scores.string(),
         scores},
        {" verify --checks min_tail_r50_k1,endpoint_weight --seed 9 --out " + checks.string(),
         checks},
        {" sweep --input " + gi.string() + " --field-type gmm --field " +
             (gi / "kde_gmm.json").string() +
             " --paths-list 2,3 --steps-list 2 --seed 10 --out " + sweep.string(),
         sweep},
        {" eval --mode image --input " + (scores / "scores.csv").string() + " --out " +
             eval_img.string(),
         eval_img},
        {" eval --mode pixel --input " + gi.string() + " --scores " + scores.string() +
             " --out " + eval_px.string(),
         eval_px},
    };
    const std::vector<std::string> exclude{"sweep_timing.csv"};

    for (const auto& [cmd, dir] : commands) {
        if (std::system((cli + cmd + quiet).c_str()) != 0)
            return {false, "command failed: " + cmd};
    }
    std::vector<std::string> first;
    for (const auto& [cmd, dir] : commands) first.push_back(dir_fingerprint(dir, exclude));
    for (const auto& [cmd, dir] : commands) {
        if (std::system((cli + cmd + quiet).c_str()) != 0)
            return {false, "rerun failed: " + cmd};
    }
    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (dir_fingerprint(commands[i].second, exclude) != first[i])
            return {false, "outputs changed on rerun: " + commands[i].first};
    }
    return {true, "8 commands rerun byte-identically (timing CSV exempt)"};
}

struct Criterion {
    int id;
    std::string name;
    double budget_seconds; // 0 = no stated budget
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "exact identities (residual link, pathwise, endpoint weight) < 1e-10", 10,
         criterion_exact_identities},
        {2, "posterior mean vs 1-D quadrature < 1e-6", 10, criterion_tweedie},
        {3, "population decomposition within 3 SE at t in {0.25,0.5,0.75}", 60,
         criterion_decomposition},
        {4, "late-time weighted denoising bound <= d", 60, criterion_late_time},
        {5, "quantile bridge and learned-field bound", 60, criterion_quantile_bridge},
        {6, "min-aggregation tail r^K within 99% CI", 30, criterion_min_tail},
        {7, "path-average concentration slope -0.5 +- 0.1", 60, criterion_concentration},
        {8, "half-moon replication AUROC (oracle > 0.98, trained > 0.95)", 300,
         criterion_halfmoon},
        {9, "compute-budget monotonicity and exact eval counts", 300, criterion_budget},
        {10, "aggregator ordering min <= p10 <= p20 <= p30 <= max", 0, criterion_aggregators},
        {11, "metrics match brute-force oracles (ties included)", 0, criterion_metric_oracles},
        {12, "MLP gradients vs central differences < 1e-4", 0, criterion_gradients},
        {13, "CLI determinism: byte-identical reruns", 0, criterion_determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = outcome.pass;
        std::string note = outcome.detail;
        if (criterion.budget_seconds > 0 && seconds > criterion.budget_seconds) {
            pass = false;
            note += " [over budget " + fmt(criterion.budget_seconds) + " s]";
        }
        if (!pass) ++failures;
        std::printf("[%s] criterion %2d: %s [%.1f s] %s\n", pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name.c_str(), seconds, note.c_str());
    }
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all 13 criteria passed\n");
    return failures;
}
