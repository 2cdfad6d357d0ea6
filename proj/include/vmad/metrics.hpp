#pragma once

#include "vmad/scorer.hpp"

#include <json.hpp>
#include <optional>
#include <span>
#include <vector>

namespace vmad {

struct MetricsReport {
    double auroc = 0.0;
    double ap = 0.0;
    double f1max = 0.0;
    double threshold_at_f1max = 0.0;
    std::optional<double> aupro; // pixel-level only

    nlohmann::json to_json() const;
};

// Probability that a random positive outscores a random negative, ties
// counted 1/2 (Mann-Whitney). Requires both classes.
double auroc(std::span<const double> scores, std::span<const int> labels);

// Area under precision-recall by the step sum over distinct thresholds;
// tied scores form one threshold block. Requires at least one positive.
double average_precision(std::span<const double> scores, std::span<const int> labels);

// Max F1 over thresholds "predict positive iff score >= threshold";
// returns (f1, lowest achieving threshold).
std::pair<double, double> f1_max(std::span<const double> scores, std::span<const int> labels);

// One connected anomalous region (8-connectivity) of one mask.
struct MaskRegion {
    std::size_t image = 0;
    std::vector<std::size_t> pixels;
};

std::vector<MaskRegion> connected_regions(std::span<const std::uint8_t> mask, std::size_t width,
                                          std::size_t height, std::size_t image_index = 0);

struct ProPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double pro = 0.0;
};

// Area under the per-region-overlap vs false-positive-rate curve,
// integrated up to fpr_limit and normalized by it. Heatmaps and masks are
// paired per image; masks may be empty on normal images but at least one
// region must exist overall.
double aupro(std::span<const Heatmap> heatmaps,
             std::span<const std::vector<std::uint8_t>> masks, double fpr_limit,
             std::vector<ProPoint>* curve_out = nullptr);

// Piecewise-linear integral of the (fpr, pro) polyline up to fpr_limit,
// normalized by fpr_limit. Shared by the sweep and the brute-force oracle.
double aupro_from_curve(std::span<const ProPoint> curve, double fpr_limit);

// threshold,precision,recall,fpr rows over distinct score thresholds.
void write_score_curves_csv(const std::filesystem::path& path, std::span<const double> scores,
                            std::span<const int> labels, const std::string& meta);

void write_pro_curve_csv(const std::filesystem::path& path, std::span<const ProPoint> curve,
                         const std::string& meta);

} // namespace vmad
