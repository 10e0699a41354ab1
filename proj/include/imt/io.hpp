#pragma once

#include <string>
#include <vector>

#include "imt/grid.hpp"

namespace imt {

struct CsvTable {
    std::string schema;  ///< e.g. "imt.trajectory/v1"
    std::vector<std::string> columns;
    std::vector<RVec> rows;
};

/// First line "# schema: <schema>", then a header row, then data.
void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);
std::string format_number(double v);

/// Column by name; throws SchemaMismatchError when absent.
RVec column(const CsvTable& t, const std::string& name);

// Binary field snapshot, little-endian:
//   char[4] "IMTS", uint32 version = 1, uint64 nz, uint64 ny,
//   float64 dz, float64 dy, float64 t, then nz*ny pairs (re, im) with y fastest.
void write_snapshot(const std::string& path, const ComplexField2D& f, double t);
ComplexField2D read_snapshot(const std::string& path, double* t = nullptr);

}  // namespace imt
