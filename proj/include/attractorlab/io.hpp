#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "attractorlab/noise.hpp"
#include "attractorlab/stepper.hpp"

namespace attractorlab {

/// Minimal CSV emitter; doubles are printed with %.17g so replays are
/// byte-identical.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);
    static std::string format(double v);

  private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_brownian_csv(const std::filesystem::path& path, const BrownianPath& path_data);

/// Compact dump: magic "ALTRAJ01", u32 node count, u64 record count, then
/// per record one little-endian f64 time followed by N little-endian f64
/// nodal values.
void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_binary(const std::filesystem::path& path, const Mesh1D& mesh);

} // namespace attractorlab
