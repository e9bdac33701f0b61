#pragma once

#include "emprobe/boundary.hpp"
#include "emprobe/inversion.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace emprobe {

std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t value);

/// Record directory: manifest.json plus little-endian float64 tables.
void save_record(const BoundaryRecord& record, const std::filesystem::path& dir, const std::string& config_hash = {});
BoundaryRecord load_record(const std::filesystem::path& dir);

void save_family(const RecordFamily& family, const std::filesystem::path& dir, const std::string& config_hash = {});
RecordFamily load_family(const std::filesystem::path& dir);

/// Comma-separated rows with a mandatory header; reals as %.16e.
class CsvWriter {
public:
    using Cell = std::variant<double, long long, std::string>;

    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<Cell>& cells);

private:
    std::ofstream out_;
    std::size_t columns_;
};

std::string format_real(double value);

/// (xi1, xi2, xi3, omega, weight, n, Re/Im p, Re/Im q) per node.
void write_samples_csv(const SpectralSamples& samples, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace emprobe
