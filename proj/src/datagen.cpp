#include "vmad/datagen.hpp"

#include "vmad/errors.hpp"
#include "vmad/math_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace vmad {

void LabeledSet::validate() const {
    if (samples.size() != labels.size())
        throw std::invalid_argument("LabeledSet: one label per sample required");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i].validate();
        if (labels[i] != 0 && labels[i] != 1)
            throw std::invalid_argument("LabeledSet: labels must be binary");
        if (kind == "grid-image") {
            const bool has_mask = std::any_of(samples[i].mask.begin(), samples[i].mask.end(),
                                              [](std::uint8_t m) { return m != 0; });
            if ((labels[i] == 1) != has_mask)
                throw std::invalid_argument("LabeledSet: label=1 iff mask nonempty");
        }
    }
}

LabeledSet gen_halfmoon(std::size_t n, double noise, RngState& rng) {
    if (n == 0) throw std::invalid_argument("gen_halfmoon: n must be >= 1");
    if (noise < 0.0) throw std::invalid_argument("gen_halfmoon: noise must be >= 0");
    LabeledSet set;
    set.kind = "halfmoon";
    set.samples.reserve(n);
    set.labels.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = std::numbers::pi * rng.next_unit();
        Vec p{kArcCenter[0] + kArcRadius * std::cos(theta),
              kArcCenter[1] + kArcRadius * std::sin(theta)};
        if (noise > 0.0) {
            p[0] += noise * rng.next_normal();
            p[1] += noise * rng.next_normal();
        }
        set.samples.push_back(Target::from_point(p));
    }
    return set;
}

std::vector<Vec> gen_eval_grid(std::size_t res_x1, std::size_t res_x2) {
    if (res_x1 < 2 || res_x2 < 2)
        throw std::invalid_argument("gen_eval_grid: resolution must be >= 2 per axis");
    constexpr double x1_lo = -8.0, x1_hi = 8.0, x2_lo = -3.0, x2_hi = 14.0;
    std::vector<Vec> grid;
    grid.reserve(res_x1 * res_x2);
    for (std::size_t r = 0; r < res_x2; ++r) {
        const double x2 = x2_lo + (x2_hi - x2_lo) * static_cast<double>(r) /
                                      static_cast<double>(res_x2 - 1);
        for (std::size_t c = 0; c < res_x1; ++c) {
            const double x1 = x1_lo + (x1_hi - x1_lo) * static_cast<double>(c) /
                                          static_cast<double>(res_x1 - 1);
            grid.push_back(Vec{x1, x2});
        }
    }
    return grid;
}

double distance_to_arc(const Vec& x, const Vec& center, double radius) {
    if (x.size() != 2) throw std::invalid_argument("distance_to_arc: 2-D points only");
    const double ux = x[0] - center[0];
    const double uy = x[1] - center[1];
    if (uy >= 0.0) return std::abs(std::sqrt(ux * ux + uy * uy) - radius);
    // Below the chord: nearest arc point is one of the endpoints.
    const double dx1 = x[0] - (center[0] + radius), dy1 = x[1] - center[1];
    const double dx2 = x[0] - (center[0] - radius), dy2 = x[1] - center[1];
    return std::sqrt(std::min(dx1 * dx1 + dy1 * dy1, dx2 * dx2 + dy2 * dy2));
}

GMMSpec halfmoon_arc_gmm(std::size_t components, double noise) {
    if (components < 2) throw std::invalid_argument("halfmoon_arc_gmm: need >= 2 components");
    GMMSpec g;
    g.weights.assign(components, 1.0 / static_cast<double>(components));
    const double var = std::max(noise * noise, 1e-4);
    g.variances.assign(components, var);
    g.means.reserve(components);
    for (std::size_t i = 0; i < components; ++i) {
        const double theta = std::numbers::pi * static_cast<double>(i) /
                             static_cast<double>(components - 1);
        g.means.push_back(Vec{kArcCenter[0] + kArcRadius * std::cos(theta),
                              kArcCenter[1] + kArcRadius * std::sin(theta)});
    }
    // Weights sum to 1 only up to rounding with equal entries; renormalize.
    double total = 0.0;
    for (double w : g.weights) total += w;
    for (double& w : g.weights) w /= total;
    g.validate();
    return g;
}

GMMSpec ClusterSpec::to_gmm() const {
    GMMSpec g;
    g.weights = weights;
    g.means = means;
    g.variances = variances;
    double total = 0.0;
    for (double w : g.weights) total += w;
    for (double& w : g.weights) w /= total;
    g.validate();
    return g;
}

LabeledSet gen_clusters(const ClusterSpec& spec, RngState& rng) {
    if (spec.n == 0) throw std::invalid_argument("gen_clusters: n must be >= 1");
    const GMMSpec gmm = spec.to_gmm();
    LabeledSet set;
    set.kind = "clusters";
    for (std::size_t i = 0; i < spec.n; ++i) {
        set.samples.push_back(Target::from_point(gmm.sample(rng)));
        set.labels.push_back(0);
    }
    for (const auto& probe : spec.probes) {
        set.samples.push_back(Target::from_point(probe));
        set.labels.push_back(1);
    }
    return set;
}

DefectSpec::Shape DefectSpec::parse_shape(const std::string& s) {
    if (s == "rect") return Shape::rect;
    if (s == "blob") return Shape::blob;
    throw std::invalid_argument("defect shape must be 'rect' or 'blob', got '" + s + "'");
}

namespace {

// Four random low-frequency sinusoids, min-max normalized into [0,1].
void fill_texture_channel(std::size_t size, RngState& rng, std::vector<double>& plane) {
    plane.assign(size * size, 0.0);
    for (int m = 0; m < 4; ++m) {
        const double u = std::floor(rng.next_unit() * 3.0); // 0..2 cycles per axis
        double v = std::floor(rng.next_unit() * 3.0);
        if (u == 0.0 && v == 0.0) v = 1.0;
        const double amp = 0.5 + 0.5 * rng.next_unit();
        const double phase = 2.0 * std::numbers::pi * rng.next_unit();
        for (std::size_t y = 0; y < size; ++y)
            for (std::size_t x = 0; x < size; ++x)
                plane[y * size + x] +=
                    amp * std::sin(2.0 * std::numbers::pi *
                                       (u * static_cast<double>(x) + v * static_cast<double>(y)) /
                                       static_cast<double>(size) +
                                   phase);
    }
    const auto [lo_it, hi_it] = std::minmax_element(plane.begin(), plane.end());
    const double lo = *lo_it, hi = *hi_it;
    const double span = hi - lo;
    for (double& p : plane)
        p = span > 0.0 ? (p - lo) / span : 0.5;
}

std::vector<std::uint8_t> make_defect_mask(std::size_t size, const DefectSpec& defect,
                                           RngState& rng) {
    std::vector<std::uint8_t> mask(size * size, 0);
    if (defect.shape == DefectSpec::Shape::rect) {
        const std::size_t max_side = std::min(defect.max_extent, size - 1);
        const auto w = 1 + static_cast<std::size_t>(rng.next_unit() * static_cast<double>(max_side));
        const auto h = 1 + static_cast<std::size_t>(rng.next_unit() * static_cast<double>(max_side));
        const auto x0 = static_cast<std::size_t>(rng.next_unit() * static_cast<double>(size - w));
        const auto y0 = static_cast<std::size_t>(rng.next_unit() * static_cast<double>(size - h));
        for (std::size_t y = y0; y < y0 + h; ++y)
            for (std::size_t x = x0; x < x0 + w; ++x) mask[y * size + x] = 1;
    } else {
        auto x = static_cast<long>(rng.next_unit() * static_cast<double>(size));
        auto y = static_cast<long>(rng.next_unit() * static_cast<double>(size));
        const std::size_t steps = defect.max_extent * defect.max_extent;
        for (std::size_t s = 0; s <= steps; ++s) {
            mask[static_cast<std::size_t>(y) * size + static_cast<std::size_t>(x)] = 1;
            const auto dir = static_cast<int>(rng.next_unit() * 4.0);
            const long nx = x + (dir == 0) - (dir == 1);
            const long ny = y + (dir == 2) - (dir == 3);
            if (nx >= 0 && nx < static_cast<long>(size)) x = nx;
            if (ny >= 0 && ny < static_cast<long>(size)) y = ny;
        }
    }
    return mask;
}

} // namespace

LabeledSet gen_grid_images(std::size_t size, std::size_t n_normal, std::size_t n_anomalous,
                           const DefectSpec& defect, RngState& rng) {
    if (size < 8) throw std::invalid_argument("gen_grid_images: size must be >= 8");
    if (defect.max_extent >= size)
        throw std::invalid_argument("gen_grid_images: defect must be smaller than the image");
    if (defect.max_extent == 0)
        throw std::invalid_argument("gen_grid_images: defect extent must be >= 1");
    constexpr std::size_t channels = 3;
    LabeledSet set;
    set.kind = "grid-image";
    std::vector<double> plane;
    const std::size_t total = n_normal + n_anomalous;
    for (std::size_t idx = 0; idx < total; ++idx) {
        Target img;
        img.width = img.height = size;
        img.channels = channels;
        img.values.assign(size * size * channels, 0.0);
        for (std::size_t c = 0; c < channels; ++c) {
            fill_texture_channel(size, rng, plane);
            for (std::size_t i = 0; i < size * size; ++i)
                img.values[i * channels + c] = plane[i];
        }
        const bool anomalous = idx >= n_normal;
        img.mask.assign(size * size, 0);
        if (anomalous) {
            img.mask = make_defect_mask(size, defect, rng);
            for (std::size_t i = 0; i < size * size; ++i)
                if (img.mask[i])
                    for (std::size_t c = 0; c < channels; ++c)
                        img.values[i * channels + c] += defect.intensity_shift;
        }
        set.samples.push_back(std::move(img));
        set.labels.push_back(anomalous ? 1 : 0);
    }
    set.validate();
    return set;
}

GMMSpec kde_gmm(const std::vector<Target>& samples, double bandwidth) {
    if (samples.empty()) throw std::invalid_argument("kde_gmm: need at least one sample");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("kde_gmm: bandwidth must be > 0");
    GMMSpec g;
    g.weights.assign(samples.size(), 1.0 / static_cast<double>(samples.size()));
    g.variances.assign(samples.size(), bandwidth * bandwidth);
    for (const auto& s : samples) g.means.push_back(s.values);
    double total = 0.0;
    for (double w : g.weights) total += w;
    for (double& w : g.weights) w /= total;
    g.validate();
    return g;
}

namespace {

std::string index_name(const char* prefix, std::size_t idx) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%03zu.csv", prefix, idx);
    return buf;
}

} // namespace

void save_labeled_set(const std::filesystem::path& dir, const LabeledSet& set,
                      const std::string& meta, const std::string& manifest_meta) {
    set.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory: " + dir.string());

    nlohmann::json manifest;
    if (!manifest_meta.empty()) manifest["meta"] = nlohmann::json::parse(manifest_meta);
    manifest["kind"] = set.kind;
    if (set.kind == "grid-image") {
        const auto& first = set.samples.front();
        manifest["width"] = first.width;
        manifest["height"] = first.height;
        manifest["channels"] = first.channels;
        nlohmann::json entries = nlohmann::json::array();
        for (std::size_t i = 0; i < set.samples.size(); ++i) {
            const auto& img = set.samples[i];
            const std::string file = index_name("img", i);
            write_grid_csv(dir / file,
                           GridData{img.width, img.height, img.channels, img.values}, meta);
            nlohmann::json entry{{"file", file}, {"label", set.labels[i]}};
            if (set.labels[i] == 1) {
                const std::string mask_file = index_name("mask", i);
                GridData mg{img.width, img.height, 1, {}};
                mg.values.assign(img.mask.begin(), img.mask.end());
                write_grid_csv(dir / mask_file, mg, meta);
                entry["mask"] = mask_file;
            } else {
                entry["mask"] = nullptr;
            }
            entries.push_back(entry);
        }
        manifest["entries"] = entries;
    } else {
        PointsData pd;
        pd.dim = set.samples.front().channels;
        for (const auto& s : set.samples) pd.points.push_back(s.values);
        pd.labels = set.labels;
        write_points_csv(dir / "points.csv", pd, meta);
        manifest["file"] = "points.csv";
    }
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

LabeledSet load_labeled_set(const std::filesystem::path& path) {
    LabeledSet set;
    if (std::filesystem::is_regular_file(path) && path.extension() == ".csv") {
        const PointsData pd = read_points_csv(path);
        set.kind = "points";
        for (const auto& p : pd.points) set.samples.push_back(Target::from_point(p));
        set.labels = pd.labels;
        return set;
    }
    const auto manifest_path =
        std::filesystem::is_directory(path) ? path / "manifest.json" : path;
    const auto dir = manifest_path.parent_path();
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_text_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw io_error("bad manifest " + manifest_path.string() + ": " + e.what());
    }
    set.kind = manifest.at("kind").get<std::string>();
    if (set.kind == "grid-image") {
        for (const auto& entry : manifest.at("entries")) {
            const GridData grid = read_grid_csv(dir / entry.at("file").get<std::string>());
            Target img;
            img.width = grid.width;
            img.height = grid.height;
            img.channels = grid.channels;
            img.values = grid.values;
            img.mask.assign(grid.width * grid.height, 0);
            if (!entry.at("mask").is_null()) {
                const GridData mg = read_grid_csv(dir / entry.at("mask").get<std::string>());
                if (mg.width != grid.width || mg.height != grid.height || mg.channels != 1)
                    throw io_error("mask shape mismatch in " + manifest_path.string());
                for (std::size_t i = 0; i < mg.values.size(); ++i)
                    img.mask[i] = mg.values[i] != 0.0 ? 1 : 0;
            }
            set.samples.push_back(std::move(img));
            set.labels.push_back(entry.at("label").get<int>());
        }
    } else {
        const PointsData pd = read_points_csv(dir / manifest.at("file").get<std::string>());
        for (const auto& p : pd.points) set.samples.push_back(Target::from_point(p));
        set.labels = pd.labels;
    }
    set.validate();
    return set;
}

} // namespace vmad
