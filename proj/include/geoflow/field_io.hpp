// Field serialization: CSV with a grid header, and an equivalent JSON
// object. Readers validate dimensions and reject mismatches.

#pragma once

#include "geoflow/grid.hpp"

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <string>

namespace geoflow {

// CSV layout:
//   # nx,ny,dx,dy,x0,y0,periodic_x,periodic_y
//   # <the eight values>
//   row-major values, one grid row (fixed i) per line
void write_field_csv(std::ostream& os, const ScalarField2D& f);
void write_field_csv(const std::string& path, const ScalarField2D& f);
ScalarField2D read_field_csv(std::istream& is);
ScalarField2D read_field_csv(const std::string& path);

nlohmann::json field_to_json(const ScalarField2D& f);
ScalarField2D field_from_json(const nlohmann::json& j);

// 1-D snapshot row format used by the evolution CLI: header then
// x,a,b_1,...,b_{N-1} per grid point. The reader infers the (uniform)
// spacing and origin from the x column.
void write_snapshot_csv(std::ostream& os, const ScalarField1D& a,
                        const std::vector<ScalarField1D>& b);
void read_snapshot_csv(std::istream& is, ScalarField1D& a, std::vector<ScalarField1D>& b,
                       bool periodic);

std::string format_double(double v); // shortest round-trip decimal

} // namespace geoflow
