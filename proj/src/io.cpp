#include "attractorlab/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>

namespace attractorlab {

namespace {
constexpr char kMagic[9] = "ALTRAJ01";

void put_f64(std::ofstream& out, double v) {
    static_assert(sizeof(double) == 8);
    char buf[8];
    std::memcpy(buf, &v, 8); // little-endian hosts only; documented format
    out.write(buf, 8);
}

double get_f64(std::ifstream& in) {
    char buf[8];
    in.read(buf, 8);
    double v;
    std::memcpy(&v, buf, 8);
    return v;
}
} // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << format(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << values[i] << (i + 1 < values.size() ? "," : "\n");
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "t";
    if (!traj.states.empty())
        for (int i = 0; i < traj.states[0].size(); ++i) out << ",v" << i;
    out << "\n";
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        out << CsvWriter::format(traj.times[r]);
        for (int i = 0; i < traj.states[r].size(); ++i)
            out << "," << CsvWriter::format(traj.states[r][i]);
        out << "\n";
    }
}

void write_brownian_csv(const std::filesystem::path& path, const BrownianPath& p) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "t,value\n";
    for (long i = 0; i < p.grid.count; ++i)
        out << CsvWriter::format(p.grid.time(i)) << "," << CsvWriter::format(p.values[i]) << "\n";
}

void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out.write(kMagic, 8);
    const std::uint32_t n = traj.states.empty() ? 0 : std::uint32_t(traj.states[0].size());
    const std::uint64_t count = traj.times.size();
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&count), 8);
    for (std::size_t r = 0; r < count; ++r) {
        put_f64(out, traj.times[r]);
        for (std::uint32_t i = 0; i < n; ++i) put_f64(out, traj.states[r][int(i)]);
    }
}

Trajectory read_trajectory_binary(const std::filesystem::path& path, const Mesh1D& mesh) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("bad trajectory magic in " + path.string());
    std::uint32_t n = 0;
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&count), 8);
    if (int(n) != mesh.interior_nodes)
        throw std::runtime_error("trajectory node count does not match mesh");
    Trajectory traj;
    for (std::uint64_t r = 0; r < count; ++r) {
        traj.times.push_back(get_f64(in));
        Field f(mesh);
        for (std::uint32_t i = 0; i < n; ++i) f[int(i)] = get_f64(in);
        traj.states.push_back(std::move(f));
        traj.newton_iters.push_back(0);
        traj.residuals.push_back(0.0);
    }
    return traj;
}

} // namespace attractorlab
