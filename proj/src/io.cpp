#include "emprobe/io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdio>
#include <cstring>
#include <sstream>

namespace emprobe {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::uint64_t to_le(std::uint64_t v)
{
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
    return v;
}

void write_table(const fs::path& path, const double* data, std::size_t count)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(data[i]));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<double> read_table(const fs::path& path, std::size_t count)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        in.read(reinterpret_cast<char*>(&bits), sizeof bits);
        if (!in) throw IoError("truncated table " + path.string());
        out[i] = std::bit_cast<double>(to_le(bits));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes in " + path.string());
    return out;
}

std::vector<double> flatten(const std::vector<Vec3>& v)
{
    std::vector<double> out;
    out.reserve(3 * v.size());
    for (const auto& x : v) out.insert(out.end(), {x.x(), x.y(), x.z()});
    return out;
}

std::vector<Vec3> unflatten(const std::vector<double>& v)
{
    std::vector<Vec3> out(v.size() / 3);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Vec3(v[3 * i], v[3 * i + 1], v[3 * i + 2]);
    return out;
}

}  // namespace

void save_record(const BoundaryRecord& record, const fs::path& dir, const std::string& config_hash)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const std::size_t ns = record.sphere.size();
    const std::size_t nt = record.time.size();
    json m;
    m["format"] = "emprobe-record";
    m["version"] = 1;
    m["config_hash"] = config_hash;
    m["sphere"] = {{"radius", record.sphere.radius},
                   {"polar_count", record.sphere.polar_count},
                   {"azimuth_count", record.sphere.azimuth_count},
                   {"size", ns}};
    m["time"] = {{"horizon", record.time.horizon}, {"count", record.time.count}, {"size", nt}};
    m["medium"] = {{"n", record.medium.n}, {"wave_speed", record.medium.wave_speed}};
    m["provenance"] = {{"source_id", record.provenance.source_id},
                       {"noise_seed", record.provenance.noise_seed},
                       {"noise_level", record.provenance.noise_level}};
    m["epsilon"] = measurement_epsilon(record);
    m["tables"] = {"sphere_nodes.bin", "sphere_normals.bin", "sphere_weights.bin", "time_nodes.bin",
                   "time_weights.bin", "exnu.bin", "t_trace.bin"};
    write_text(dir / "manifest.json", m.dump(2) + "\n");
    const auto nodes = flatten(record.sphere.nodes);
    const auto normals = flatten(record.sphere.normals);
    write_table(dir / "sphere_nodes.bin", nodes.data(), nodes.size());
    write_table(dir / "sphere_normals.bin", normals.data(), normals.size());
    write_table(dir / "sphere_weights.bin", record.sphere.weights.data(), ns);
    write_table(dir / "time_nodes.bin", record.time.nodes.data(), nt);
    write_table(dir / "time_weights.bin", record.time.weights.data(), nt);
    write_table(dir / "exnu.bin", record.exnu.data(), static_cast<std::size_t>(record.exnu.size()));
    write_table(dir / "t_trace.bin", record.t_trace.data(), static_cast<std::size_t>(record.t_trace.size()));
}

BoundaryRecord load_record(const fs::path& dir)
{
    json m;
    try {
        m = json::parse(read_text(dir / "manifest.json"));
    } catch (const json::exception& e) {
        throw IoError("corrupt record manifest in " + dir.string() + ": " + e.what());
    }
    try {
        if (m.at("format") != "emprobe-record") throw IoError("not a record directory: " + dir.string());
        BoundaryRecord r;
        const std::size_t ns = m.at("sphere").at("size");
        const std::size_t nt = m.at("time").at("size");
        r.sphere.radius = m["sphere"].at("radius");
        r.sphere.polar_count = m["sphere"].at("polar_count");
        r.sphere.azimuth_count = m["sphere"].at("azimuth_count");
        r.sphere.nodes = unflatten(read_table(dir / "sphere_nodes.bin", 3 * ns));
        r.sphere.normals = unflatten(read_table(dir / "sphere_normals.bin", 3 * ns));
        r.sphere.weights = read_table(dir / "sphere_weights.bin", ns);
        r.time.horizon = m["time"].at("horizon");
        r.time.count = m["time"].at("count");
        r.time.nodes = read_table(dir / "time_nodes.bin", nt);
        r.time.weights = read_table(dir / "time_weights.bin", nt);
        r.medium.n = m.at("medium").at("n");
        r.medium.wave_speed = m["medium"].at("wave_speed");
        r.provenance.source_id = m.at("provenance").at("source_id");
        r.provenance.noise_seed = m["provenance"].at("noise_seed");
        r.provenance.noise_level = m["provenance"].at("noise_level");
        const auto exnu = read_table(dir / "exnu.bin", 3 * ns * nt);
        const auto tt = read_table(dir / "t_trace.bin", 3 * ns * nt);
        r.exnu = Eigen::Map<const Eigen::Matrix3Xd>(exnu.data(), 3, static_cast<Eigen::Index>(ns * nt));
        r.t_trace = Eigen::Map<const Eigen::Matrix3Xd>(tt.data(), 3, static_cast<Eigen::Index>(ns * nt));
        return r;
    } catch (const json::exception& e) {
        throw IoError("incomplete record manifest in " + dir.string() + ": " + e.what());
    }
}

void save_family(const RecordFamily& family, const fs::path& dir, const std::string& config_hash)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    json m;
    m["format"] = "emprobe-family";
    m["config_hash"] = config_hash;
    m["band"] = family.band;
    m["n_values"] = family.n_values;
    json names = json::array();
    for (std::size_t i = 0; i < family.records.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "record_%03zu", i);
        save_record(family.records[i], dir / name, config_hash);
        names.push_back(name);
    }
    m["records"] = names;
    write_text(dir / "family.json", m.dump(2) + "\n");
}

RecordFamily load_family(const fs::path& dir)
{
    json m;
    try {
        m = json::parse(read_text(dir / "family.json"));
        RecordFamily f;
        f.band = m.at("band");
        f.n_values = m.at("n_values").get<std::vector<double>>();
        for (const auto& name : m.at("records")) f.records.push_back(load_record(dir / name.get<std::string>()));
        return f;
    } catch (const json::exception& e) {
        throw IoError("corrupt family manifest in " + dir.string() + ": " + e.what());
    }
}

std::string format_real(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", value);
    return buf;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size())
{
    if (!out_) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells)
{
    if (cells.size() != columns_) throw IoError("CSV row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        std::visit(
            [this](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>)
                    out_ << format_real(v);
                else
                    out_ << v;
            },
            cells[i]);
    }
    out_ << '\n';
    if (!out_) throw IoError("CSV write failed");
}

void write_samples_csv(const SpectralSamples& samples, const fs::path& path)
{
    CsvWriter csv(path, {"xi1", "xi2", "xi3", "omega", "weight", "n", "re_p", "im_p", "re_q", "im_q"});
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& node = samples.nodes.nodes[i];
        const Vec3 xi = node.xi();
        csv.row({xi.x(), xi.y(), xi.z(), node.probe.omega, node.weight, node.n, samples.p_component[i].real(),
                 samples.p_component[i].imag(), samples.q_component[i].real(), samples.q_component[i].imag()});
    }
}

}  // namespace emprobe
