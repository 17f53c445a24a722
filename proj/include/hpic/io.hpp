#pragma once

#include <cstdio>
#include <string>

#include "hpic/diagnostics.hpp"
#include "hpic/particles.hpp"

namespace hpic {

// Marker snapshot, version 1.
//
// Text:   header lines "hpic-snapshot 1", "dim D", "np N", "time T", then one
//         marker per line: x (dim), v (3), w.
// Binary: magic "HPICSNP1", int32 dim, uint64 np, float64 time, then per
//         marker the same doubles in the same order, little-endian.
void write_snapshot(const std::string& path, const ParticleEnsemble& e,
                    double time, bool binary);
ParticleEnsemble read_snapshot(const std::string& path, double* time = nullptr);

// Density grid: header "# nx ny xlo xhi ylo yhi t" then nx*ny values,
// x fastest, one row of the grid per line.
void write_density_grid(const std::string& path, const DensityGrid& grid);

// Row-buffered CSV writer: every row is written and flushed atomically so a
// killed run never leaves a partial row.
class CsvWriter {
 public:
  CsvWriter() = default;
  explicit CsvWriter(const std::string& path, const std::string& header);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void open_file(const std::string& path, const std::string& header);
  void write_row(const std::string& row);
  bool open() const { return f_ != nullptr; }
  void close();

 private:
  std::FILE* f_ = nullptr;
};

void write_diagnostics_csv(const std::string& path, const DiagnosticsRecord& rec);

// Reads columns t and E_d back from a diagnostics CSV.
void read_diagnostics_csv(const std::string& path, std::vector<double>& t,
                          std::vector<double>& ed);

std::string format_double(double v);  // shortest round-trip-stable form

void ensure_directory(const std::string& path);

}  // namespace hpic
