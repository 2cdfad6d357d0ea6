#pragma once

#include "vmad/gmm.hpp"
#include "vmad/rng.hpp"
#include "vmad/scorer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace vmad {

// Labeled toy data: 0 = normal, 1 = anomalous. Grid-image samples carry a
// per-element defect mask inside the Target; label 1 iff mask nonempty.
struct LabeledSet {
    std::string kind; // "halfmoon", "clusters", "grid-image"
    std::vector<Target> samples;
    std::vector<int> labels;

    void validate() const;
};

// Arc geometry shared by the half-moon generators: upper semicircle with
// center (0, 3) and radius 5.
inline const Vec kArcCenter{0.0, 3.0};
inline constexpr double kArcRadius = 5.0;

// n points on the arc (theta uniform on [0, pi]) plus isotropic Gaussian
// jitter of scale `noise`; all labeled normal.
LabeledSet gen_halfmoon(std::size_t n, double noise, RngState& rng);

// Row-major inclusive lattice over x1 in [-8, 8], x2 in [-3, 14].
std::vector<Vec> gen_eval_grid(std::size_t res_x1, std::size_t res_x2);

// Euclidean distance from x to the arc segment (not the full circle).
double distance_to_arc(const Vec& x, const Vec& center = kArcCenter,
                       double radius = kArcRadius);

// Mixture of `components` small Gaussians spaced along the arc; the
// analytic stand-in for the half-moon law used by the oracle field.
GMMSpec halfmoon_arc_gmm(std::size_t components, double noise);

struct ClusterSpec {
    std::vector<Vec> means = {{5.0, 5.0}, {-5.0, 5.0}, {5.0, -5.0}};
    std::vector<double> weights = {0.3, 0.4, 0.3};
    std::vector<double> variances = {0.36, 0.36, 0.36};
    std::size_t n = 500;
    // Off-support probe points appended as anomalous samples.
    std::vector<Vec> probes = {{0.0, 0.0}, {-2.0, -4.0}, {2.0, 0.0}};

    GMMSpec to_gmm() const;
};

LabeledSet gen_clusters(const ClusterSpec& spec, RngState& rng);

struct DefectSpec {
    enum class Shape { rect, blob };
    Shape shape = Shape::rect;
    std::size_t max_extent = 5;    // max side (rect) / walk budget (blob)
    double intensity_shift = 0.8;  // added inside the mask

    static Shape parse_shape(const std::string& s);
};

// Normal images: 3-channel smooth textures (four random low-frequency
// sinusoids per channel, min-max normalized to [0,1]). Anomalous images:
// a normal texture plus a rectangular or blob patch shifted by
// `intensity_shift`, with the mask marking exactly the patched elements.
LabeledSet gen_grid_images(std::size_t size, std::size_t n_normal, std::size_t n_anomalous,
                           const DefectSpec& defect, RngState& rng);

// Kernel-density mixture over flattened samples: one component per sample,
// isotropic variance bandwidth^2. Backs the oracle field for empirical laws.
GMMSpec kde_gmm(const std::vector<Target>& samples, double bandwidth);

// Point kinds: <dir>/points.csv. Grid images: <dir>/manifest.json plus one
// grid CSV per image and mask. Both carry a manifest for uniform loading.
// `meta` is the CSV comment line; `manifest_meta` (JSON text, may be empty)
// is embedded into the manifest under "meta".
void save_labeled_set(const std::filesystem::path& dir, const LabeledSet& set,
                      const std::string& meta, const std::string& manifest_meta = "");
LabeledSet load_labeled_set(const std::filesystem::path& dir);

} // namespace vmad
