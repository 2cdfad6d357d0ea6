#include "vmad/csv.hpp"

#include "vmad/errors.hpp"
#include "vmad/math_util.hpp"
#include "vmad/version.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vmad {

std::string format_double(double v) {
    char buf[40];
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return std::string(buf);
    }
    // %.17g round-trips every double; trim to the shortest form that
    // still parses back exactly so files stay readable.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return std::string(buf);
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

std::string csv_meta_line(std::uint64_t config_hash, std::uint64_t seed) {
    std::ostringstream os;
    os << "# " << tool_name << " " << tool_version << " config=" << hex64(config_hash)
       << " seed=" << seed;
    return os.str();
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path.string());
    return in;
}

// Next non-comment line; false at EOF.
bool next_line(std::ifstream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        return true;
    }
    return false;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw io_error("bad numeric field '" + s + "' in " + path.string());
    return v;
}

} // namespace

void write_grid_csv(const std::filesystem::path& path, const GridData& grid,
                    const std::string& meta) {
    if (grid.values.size() != grid.width * grid.height * grid.channels)
        throw std::invalid_argument("write_grid_csv: value count does not match dimensions");
    auto out = open_out(path);
    if (!meta.empty()) out << meta << "\n";
    out << "width,height,channels\n";
    out << grid.width << "," << grid.height << "," << grid.channels << "\n";
    const std::size_t stride = grid.width * grid.channels;
    for (std::size_t y = 0; y < grid.height; ++y) {
        for (std::size_t i = 0; i < stride; ++i) {
            if (i) out << ",";
            out << format_double(grid.values[y * stride + i]);
        }
        out << "\n";
    }
    if (!out) throw io_error("write failed: " + path.string());
}

GridData read_grid_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!next_line(in, line)) throw io_error("empty grid file: " + path.string());
    if (line != "width,height,channels")
        throw io_error("missing grid header in " + path.string());
    if (!next_line(in, line)) throw io_error("missing grid dimensions in " + path.string());
    auto dims = split_fields(line);
    if (dims.size() != 3) throw io_error("bad grid dimensions in " + path.string());
    GridData grid;
    grid.width = static_cast<std::size_t>(std::stoull(dims[0]));
    grid.height = static_cast<std::size_t>(std::stoull(dims[1]));
    grid.channels = static_cast<std::size_t>(std::stoull(dims[2]));
    grid.values.reserve(grid.width * grid.height * grid.channels);
    const std::size_t stride = grid.width * grid.channels;
    for (std::size_t y = 0; y < grid.height; ++y) {
        if (!next_line(in, line)) throw io_error("truncated grid in " + path.string());
        auto fields = split_fields(line);
        if (fields.size() != stride) throw io_error("bad grid row width in " + path.string());
        for (const auto& f : fields) grid.values.push_back(parse_double(f, path));
    }
    return grid;
}

void write_points_csv(const std::filesystem::path& path, const PointsData& data,
                      const std::string& meta) {
    auto out = open_out(path);
    if (!meta.empty()) out << meta << "\n";
    for (std::size_t d = 0; d < data.dim; ++d) out << "x" << (d + 1) << ",";
    out << "label\n";
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        for (double v : data.points[i]) out << format_double(v) << ",";
        out << data.labels[i] << "\n";
    }
    if (!out) throw io_error("write failed: " + path.string());
}

PointsData read_points_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!next_line(in, line)) throw io_error("empty points file: " + path.string());
    auto header = split_fields(line);
    if (header.empty() || header.back() != "label")
        throw io_error("points header must end with 'label' in " + path.string());
    PointsData data;
    data.dim = header.size() - 1;
    while (next_line(in, line)) {
        auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw io_error("bad points row in " + path.string());
        std::vector<double> p(data.dim);
        for (std::size_t d = 0; d < data.dim; ++d) p[d] = parse_double(fields[d], path);
        data.points.push_back(std::move(p));
        data.labels.push_back(static_cast<int>(std::strtol(fields.back().c_str(), nullptr, 10)));
    }
    return data;
}

void write_table_csv(const std::filesystem::path& path, const std::string& header,
                     const std::vector<std::vector<std::string>>& rows,
                     const std::string& meta) {
    auto out = open_out(path);
    if (!meta.empty()) out << meta << "\n";
    out << header << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << row[i];
        }
        out << "\n";
    }
    if (!out) throw io_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    auto out = open_out(path);
    out << content;
    if (!out) throw io_error("write failed: " + path.string());
}

} // namespace vmad
