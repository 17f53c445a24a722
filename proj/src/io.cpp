#include "hpic/io.hpp"

#include <cinttypes>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hpic/errors.hpp"

namespace hpic {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

void write_snapshot(const std::string& path, const ParticleEnsemble& e, double time,
                    bool binary) {
  std::FILE* f = std::fopen(path.c_str(), binary ? "wb" : "w");
  if (!f) throw IoError("cannot open " + path);
  const std::size_t np = e.size();
  if (binary) {
    std::fwrite("HPICSNP1", 1, 8, f);
    const std::int32_t dim = e.dim;
    const std::uint64_t n64 = np;
    std::fwrite(&dim, sizeof dim, 1, f);
    std::fwrite(&n64, sizeof n64, 1, f);
    std::fwrite(&time, sizeof time, 1, f);
    std::vector<double> row(static_cast<std::size_t>(e.dim) + 4);
    for (std::size_t s = 0; s < np; ++s) {
      std::size_t c = 0;
      for (int a = 0; a < e.dim; ++a) row[c++] = e.x[a][s];
      row[c++] = e.v[0][s];
      row[c++] = e.v[1][s];
      row[c++] = e.v[2][s];
      row[c++] = e.w[s];
      std::fwrite(row.data(), sizeof(double), c, f);
    }
  } else {
    std::fprintf(f, "hpic-snapshot 1\ndim %d\nnp %zu\ntime %s\n", e.dim, np,
                 format_double(time).c_str());
    for (std::size_t s = 0; s < np; ++s) {
      std::string line;
      for (int a = 0; a < e.dim; ++a) line += format_double(e.x[a][s]) + " ";
      line += format_double(e.v[0][s]) + " " + format_double(e.v[1][s]) + " " +
              format_double(e.v[2][s]) + " " + format_double(e.w[s]);
      line += '\n';
      std::fwrite(line.data(), 1, line.size(), f);
    }
  }
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

ParticleEnsemble read_snapshot(const std::string& path, double* time) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  char magic[8];
  ParticleEnsemble e;
  if (std::fread(magic, 1, 8, f) == 8 && std::memcmp(magic, "HPICSNP1", 8) == 0) {
    std::int32_t dim = 0;
    std::uint64_t np = 0;
    double t = 0.0;
    if (std::fread(&dim, sizeof dim, 1, f) != 1 || std::fread(&np, sizeof np, 1, f) != 1 ||
        std::fread(&t, sizeof t, 1, f) != 1) {
      std::fclose(f);
      throw IoError("truncated snapshot header in " + path);
    }
    e.dim = dim;
    e.resize(np);
    if (time) *time = t;
    std::vector<double> row(static_cast<std::size_t>(dim) + 4);
    for (std::uint64_t s = 0; s < np; ++s) {
      if (std::fread(row.data(), sizeof(double), row.size(), f) != row.size()) {
        std::fclose(f);
        throw IoError("truncated snapshot body in " + path);
      }
      std::size_t c = 0;
      for (int a = 0; a < dim; ++a) e.x[a][s] = row[c++];
      e.v[0][s] = row[c++];
      e.v[1][s] = row[c++];
      e.v[2][s] = row[c++];
      e.w[s] = row[c++];
    }
    std::fclose(f);
    return e;
  }
  std::fclose(f);

  std::ifstream is(path);
  std::string tag;
  int version = 0, dim = 0;
  std::size_t np = 0;
  double t = 0.0;
  is >> tag >> version;
  if (tag != "hpic-snapshot" || version != 1) throw IoError("unrecognized snapshot " + path);
  is >> tag >> dim >> tag >> np >> tag >> t;
  if (time) *time = t;
  e.dim = dim;
  e.resize(np);
  for (std::size_t s = 0; s < np; ++s) {
    for (int a = 0; a < dim; ++a) is >> e.x[a][s];
    is >> e.v[0][s] >> e.v[1][s] >> e.v[2][s] >> e.w[s];
  }
  if (!is) throw IoError("truncated snapshot body in " + path);
  return e;
}

void write_density_grid(const std::string& path, const DensityGrid& grid) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open " + path);
  std::fprintf(f, "# %d %d %s %s %s %s %s\n", grid.spec.nx, grid.spec.ny,
               format_double(grid.spec.lo[0]).c_str(), format_double(grid.spec.hi[0]).c_str(),
               format_double(grid.spec.lo[1]).c_str(), format_double(grid.spec.hi[1]).c_str(),
               format_double(grid.time).c_str());
  for (int iy = 0; iy < grid.spec.ny; ++iy) {
    std::string line;
    for (int ix = 0; ix < grid.spec.nx; ++ix) {
      if (ix) line += ' ';
      line += format_double(grid.rho[static_cast<std::size_t>(iy) * grid.spec.nx + ix]);
    }
    line += '\n';
    std::fwrite(line.data(), 1, line.size(), f);
  }
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header) {
  open_file(path, header);
}

void CsvWriter::open_file(const std::string& path, const std::string& header) {
  close();
  f_ = std::fopen(path.c_str(), "w");
  if (!f_) throw IoError("cannot open " + path);
  write_row(header);
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::write_row(const std::string& row) {
  if (!f_) return;
  std::string line = row;
  line += '\n';
  if (std::fwrite(line.data(), 1, line.size(), f_) != line.size()) {
    throw IoError("CSV write failed");
  }
  std::fflush(f_);
}

void CsvWriter::close() {
  if (f_) {
    std::fclose(f_);
    f_ = nullptr;
  }
}

void write_diagnostics_csv(const std::string& path, const DiagnosticsRecord& rec) {
  CsvWriter w(path, "t,E_d,H,Px,Py,C");
  for (std::size_t i = 0; i < rec.rows(); ++i) {
    w.write_row(format_double(rec.t[i]) + "," + format_double(rec.ed[i]) + "," +
                format_double(rec.energy[i]) + "," + format_double(rec.px[i]) + "," +
                format_double(rec.py[i]) + "," + format_double(rec.charge[i]));
  }
}

void read_diagnostics_csv(const std::string& path, std::vector<double>& t,
                          std::vector<double>& ed) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  std::getline(is, line);  // header
  t.clear();
  ed.clear();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    t.push_back(std::stod(cell));
    std::getline(ls, cell, ',');
    ed.push_back(std::stod(cell));
  }
}

}  // namespace hpic
