#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vmad {

// Shortest exact decimal form; round-trips and is byte-stable across runs.
std::string format_double(double v);

// "# vmad <version> config=<hash> seed=<seed>" metadata comment carried by
// every CSV output.
std::string csv_meta_line(std::uint64_t config_hash, std::uint64_t seed);

// Row-major grid with interleaved channels: one line per image row,
// width*channels values per line, preceded by a "width,height,channels"
// header and the dimensions themselves.
struct GridData {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 1;
    std::vector<double> values; // (y*width + x)*channels + c
};

void write_grid_csv(const std::filesystem::path& path, const GridData& grid,
                    const std::string& meta);
GridData read_grid_csv(const std::filesystem::path& path);

// Labeled point sets: header x1,...,xd,label.
struct PointsData {
    std::size_t dim = 0;
    std::vector<std::vector<double>> points;
    std::vector<int> labels;
};

void write_points_csv(const std::filesystem::path& path, const PointsData& data,
                      const std::string& meta);
PointsData read_points_csv(const std::filesystem::path& path);

// Generic table: header plus pre-formatted rows.
void write_table_csv(const std::filesystem::path& path, const std::string& header,
                     const std::vector<std::vector<std::string>>& rows,
                     const std::string& meta);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace vmad
