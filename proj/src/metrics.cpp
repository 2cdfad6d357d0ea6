#include "vmad/metrics.hpp"

#include "vmad/errors.hpp"
#include "vmad/math_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace vmad {

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json j{{"auroc", auroc},
                     {"ap", ap},
                     {"f1max", f1max},
                     {"threshold_at_f1max", threshold_at_f1max}};
    j["aupro"] = aupro ? nlohmann::json(*aupro) : nlohmann::json(nullptr);
    return j;
}

namespace {

void require_scores(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw std::invalid_argument("metrics: scores and labels must be nonempty and equal sized");
    for (int l : labels)
        if (l != 0 && l != 1) throw std::invalid_argument("metrics: labels must be binary");
}

std::size_t count_positives(std::span<const int> labels) {
    std::size_t n = 0;
    for (int l : labels) n += (l == 1);
    return n;
}

// Cumulative (tp, fp) at each distinct threshold, descending; thresholds
// are the distinct score values ("predict positive iff score >= t").
struct Sweep {
    std::vector<double> thresholds;
    std::vector<std::size_t> tp;
    std::vector<std::size_t> fp;
};

Sweep threshold_sweep(std::span<const double> scores, std::span<const int> labels) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    Sweep sweep;
    std::size_t tp = 0, fp = 0, i = 0;
    while (i < order.size()) {
        const double value = scores[order[i]];
        while (i < order.size() && scores[order[i]] == value) {
            if (labels[order[i]] == 1)
                ++tp;
            else
                ++fp;
            ++i;
        }
        sweep.thresholds.push_back(value);
        sweep.tp.push_back(tp);
        sweep.fp.push_back(fp);
    }
    return sweep;
}

} // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
    require_scores(scores, labels);
    const std::size_t n_pos = count_positives(labels);
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw undefined_metric("auroc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Average ranks over tie groups; Mann-Whitney counts ties as 1/2.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j); // ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        i = j;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                                        static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
    require_scores(scores, labels);
    const std::size_t n_pos = count_positives(labels);
    if (n_pos == 0) throw undefined_metric("average_precision: needs at least one positive");
    const Sweep sweep = threshold_sweep(scores, labels);
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < sweep.thresholds.size(); ++k) {
        const double recall = static_cast<double>(sweep.tp[k]) / static_cast<double>(n_pos);
        const double precision = static_cast<double>(sweep.tp[k]) /
                                 static_cast<double>(sweep.tp[k] + sweep.fp[k]);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

std::pair<double, double> f1_max(std::span<const double> scores, std::span<const int> labels) {
    require_scores(scores, labels);
    const std::size_t n_pos = count_positives(labels);
    if (n_pos == 0) throw undefined_metric("f1_max: needs at least one positive");
    const Sweep sweep = threshold_sweep(scores, labels);
    double best = -1.0, best_threshold = 0.0;
    for (std::size_t k = 0; k < sweep.thresholds.size(); ++k) {
        const std::size_t tp = sweep.tp[k];
        const double f1 =
            tp == 0 ? 0.0
                    : 2.0 * static_cast<double>(tp) /
                          static_cast<double>(tp + sweep.fp[k] + n_pos); // 2tp/(2tp+fp+fn)
        if (f1 >= best) { // >= : descending sweep keeps the lowest tied threshold
            best = f1;
            best_threshold = sweep.thresholds[k];
        }
    }
    return {best, best_threshold};
}

std::vector<MaskRegion> connected_regions(std::span<const std::uint8_t> mask, std::size_t width,
                                          std::size_t height, std::size_t image_index) {
    if (mask.size() != width * height)
        throw std::invalid_argument("connected_regions: mask size mismatch");
    std::vector<MaskRegion> regions;
    std::vector<char> seen(mask.size(), 0);
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || seen[start]) continue;
        MaskRegion region;
        region.image = image_index;
        std::deque<std::size_t> queue{start};
        seen[start] = 1;
        while (!queue.empty()) {
            const std::size_t p = queue.front();
            queue.pop_front();
            region.pixels.push_back(p);
            const long px = static_cast<long>(p % width);
            const long py = static_cast<long>(p / width);
            for (long dy = -1; dy <= 1; ++dy) {
                for (long dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const long nx = px + dx, ny = py + dy;
                    if (nx < 0 || ny < 0 || nx >= static_cast<long>(width) ||
                        ny >= static_cast<long>(height))
                        continue;
                    const auto q = static_cast<std::size_t>(ny) * width +
                                   static_cast<std::size_t>(nx);
                    if (mask[q] && !seen[q]) {
                        seen[q] = 1;
                        queue.push_back(q);
                    }
                }
            }
        }
        regions.push_back(std::move(region));
    }
    return regions;
}

double aupro_from_curve(std::span<const ProPoint> curve, double fpr_limit) {
    if (!(fpr_limit > 0.0) || fpr_limit > 1.0)
        throw std::invalid_argument("aupro: fpr_limit must be in (0, 1]");
    double area = 0.0;
    for (std::size_t k = 1; k < curve.size(); ++k) {
        double f0 = curve[k - 1].fpr, f1 = curve[k].fpr;
        double p0 = curve[k - 1].pro, p1 = curve[k].pro;
        if (f0 >= fpr_limit) break;
        if (f1 > fpr_limit) {
            // Clip the segment at the limit.
            const double frac = (fpr_limit - f0) / (f1 - f0);
            p1 = p0 + frac * (p1 - p0);
            f1 = fpr_limit;
        }
        area += 0.5 * (p0 + p1) * (f1 - f0);
    }
    return area / fpr_limit;
}

double aupro(std::span<const Heatmap> heatmaps,
             std::span<const std::vector<std::uint8_t>> masks, double fpr_limit,
             std::vector<ProPoint>* curve_out) {
    if (heatmaps.size() != masks.size() || heatmaps.empty())
        throw std::invalid_argument("aupro: need one mask per heatmap");
    if (!(fpr_limit > 0.0) || fpr_limit > 1.0)
        throw std::invalid_argument("aupro: fpr_limit must be in (0, 1]");

    // Region index per pixel (-1 = background), pooled over all images.
    std::vector<MaskRegion> regions;
    std::vector<std::vector<long>> region_of(heatmaps.size());
    std::size_t n_neg = 0, n_pixels = 0;
    for (std::size_t img = 0; img < heatmaps.size(); ++img) {
        const auto& h = heatmaps[img];
        if (masks[img].size() != h.values.size())
            throw std::invalid_argument("aupro: heatmap/mask size mismatch");
        region_of[img].assign(h.values.size(), -1);
        auto img_regions = connected_regions(masks[img], h.width, h.height, img);
        for (auto& r : img_regions) {
            for (std::size_t p : r.pixels)
                region_of[img][p] = static_cast<long>(regions.size());
            regions.push_back(std::move(r));
        }
        for (std::uint8_t m : masks[img]) n_neg += (m == 0);
        n_pixels += h.values.size();
    }
    if (regions.empty()) throw undefined_metric("aupro: no anomalous regions present");

    struct Pixel {
        double score;
        std::uint32_t image;
        std::uint32_t index;
    };
    std::vector<Pixel> pixels;
    pixels.reserve(n_pixels);
    for (std::size_t img = 0; img < heatmaps.size(); ++img)
        for (std::size_t p = 0; p < heatmaps[img].values.size(); ++p)
            pixels.push_back({heatmaps[img].values[p], static_cast<std::uint32_t>(img),
                              static_cast<std::uint32_t>(p)});
    std::sort(pixels.begin(), pixels.end(),
              [](const Pixel& a, const Pixel& b) { return a.score > b.score; });

    std::vector<std::size_t> hits(regions.size(), 0);
    std::size_t fp = 0;
    std::vector<ProPoint> curve;
    curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t i = 0;
    while (i < pixels.size()) {
        const double value = pixels[i].score;
        while (i < pixels.size() && pixels[i].score == value) {
            const auto& px = pixels[i];
            const long r = region_of[px.image][px.index];
            if (r >= 0)
                ++hits[static_cast<std::size_t>(r)];
            else
                ++fp;
            ++i;
        }
        double pro = 0.0;
        for (std::size_t r = 0; r < regions.size(); ++r)
            pro += static_cast<double>(hits[r]) / static_cast<double>(regions[r].pixels.size());
        pro /= static_cast<double>(regions.size());
        const double fpr = n_neg == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(n_neg);
        curve.push_back({value, fpr, pro});
    }
    // All pixels predicted: (1, 1) closes the curve even when n_neg == 0.
    curve.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});

    const double area = aupro_from_curve(curve, fpr_limit);
    if (curve_out) *curve_out = std::move(curve);
    return area;
}

void write_score_curves_csv(const std::filesystem::path& path, std::span<const double> scores,
                            std::span<const int> labels, const std::string& meta) {
    require_scores(scores, labels);
    const std::size_t n_pos = count_positives(labels);
    const std::size_t n_neg = labels.size() - n_pos;
    const Sweep sweep = threshold_sweep(scores, labels);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < sweep.thresholds.size(); ++k) {
        const double precision = static_cast<double>(sweep.tp[k]) /
                                 static_cast<double>(sweep.tp[k] + sweep.fp[k]);
        const double recall =
            n_pos == 0 ? 0.0 : static_cast<double>(sweep.tp[k]) / static_cast<double>(n_pos);
        const double fpr =
            n_neg == 0 ? 0.0 : static_cast<double>(sweep.fp[k]) / static_cast<double>(n_neg);
        rows.push_back({format_double(sweep.thresholds[k]), format_double(precision),
                        format_double(recall), format_double(fpr)});
    }
    write_table_csv(path, "threshold,precision,recall,fpr", rows, meta);
}

void write_pro_curve_csv(const std::filesystem::path& path, std::span<const ProPoint> curve,
                         const std::string& meta) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : curve)
        rows.push_back({format_double(p.threshold), format_double(p.fpr), format_double(p.pro)});
    write_table_csv(path, "threshold,fpr,pro", rows, meta);
}

} // namespace vmad
