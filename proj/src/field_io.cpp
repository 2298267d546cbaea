#include "geoflow/field_io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace geoflow {

std::string format_double(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

void write_field_csv(std::ostream& os, const ScalarField2D& f) {
    const Grid2D& g = f.grid;
    os << "# nx,ny,dx,dy,x0,y0,periodic_x,periodic_y\n";
    os << "# " << g.nx << ',' << g.ny << ',' << format_double(g.dx) << ','
       << format_double(g.dy) << ',' << format_double(g.x0) << ',' << format_double(g.y0)
       << ',' << (g.periodic_x ? 1 : 0) << ',' << (g.periodic_y ? 1 : 0) << '\n';
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            if (j) os << ',';
            os << format_double(f.at(i, j));
        }
        os << '\n';
    }
}

void write_field_csv(const std::string& path, const ScalarField2D& f) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot open for writing: " + path);
    write_field_csv(os, f);
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("field CSV: bad number '" + s + "'");
    }
}

} // namespace

ScalarField2D read_field_csv(std::istream& is) {
    std::string line, header;
    bool have_header = false;
    std::vector<double> values;
    Grid2D grid;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            header = line.substr(1);
            // the last comment line carrying eight numeric entries is the grid
            auto parts = split_commas(header);
            if (parts.size() == 8 && !parts[0].empty() &&
                (std::isdigit(static_cast<unsigned char>(parts[0][0])) || parts[0][0] == '-')) {
                grid = Grid2D(static_cast<int>(parse_double(parts[0])),
                              static_cast<int>(parse_double(parts[1])), parse_double(parts[2]),
                              parse_double(parts[3]), parse_double(parts[4]),
                              parse_double(parts[5]), parse_double(parts[6]) != 0.0,
                              parse_double(parts[7]) != 0.0);
                have_header = true;
            }
            continue;
        }
        for (const auto& tok : split_commas(line)) values.push_back(parse_double(tok));
    }
    if (!have_header) throw std::invalid_argument("field CSV: missing grid header");
    if (values.size() != grid.size())
        throw std::invalid_argument("field CSV: value count does not match declared grid");
    return ScalarField2D(grid, std::move(values));
}

ScalarField2D read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open: " + path);
    return read_field_csv(is);
}

nlohmann::json field_to_json(const ScalarField2D& f) {
    const Grid2D& g = f.grid;
    nlohmann::json jg{{"nx", g.nx},           {"ny", g.ny},
                      {"dx", g.dx},           {"dy", g.dy},
                      {"x0", g.x0},           {"y0", g.y0},
                      {"periodic_x", g.periodic_x}, {"periodic_y", g.periodic_y}};
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < g.nx; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < g.ny; ++j) row.push_back(f.at(i, j));
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"grid", jg}, {"values", rows}};
}

ScalarField2D field_from_json(const nlohmann::json& j) {
    const auto& jg = j.at("grid");
    Grid2D g(jg.at("nx").get<int>(), jg.at("ny").get<int>(), jg.at("dx").get<double>(),
             jg.at("dy").get<double>(), jg.value("x0", 0.0), jg.value("y0", 0.0),
             jg.value("periodic_x", false), jg.value("periodic_y", false));
    const auto& rows = j.at("values");
    if (static_cast<int>(rows.size()) != g.nx)
        throw std::invalid_argument("field JSON: row count does not match nx");
    std::vector<double> values;
    values.reserve(g.size());
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != g.ny)
            throw std::invalid_argument("field JSON: row length does not match ny");
        for (const auto& v : row) values.push_back(v.get<double>());
    }
    return ScalarField2D(g, std::move(values));
}

void write_snapshot_csv(std::ostream& os, const ScalarField1D& a,
                        const std::vector<ScalarField1D>& b) {
    os << "x,a";
    for (std::size_t k = 0; k < b.size(); ++k) os << ",b_" << (k + 1);
    os << '\n';
    for (int i = 0; i < a.nx; ++i) {
        os << format_double(a.x(i)) << ',' << format_double(a.values[i]);
        for (const auto& bk : b) os << ',' << format_double(bk.values[i]);
        os << '\n';
    }
}

void read_snapshot_csv(std::istream& is, ScalarField1D& a, std::vector<ScalarField1D>& b,
                       bool periodic) {
    std::string line;
    std::vector<std::vector<double>> cols;
    int ncols = -1;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == 'x') continue; // column header
        auto parts = split_commas(line);
        if (ncols < 0) {
            ncols = static_cast<int>(parts.size());
            if (ncols < 3) throw std::invalid_argument("snapshot CSV: expected x,a,b_1,... columns");
            cols.resize(ncols);
        } else if (static_cast<int>(parts.size()) != ncols) {
            throw std::invalid_argument("snapshot CSV: ragged rows");
        }
        for (int c = 0; c < ncols; ++c) cols[c].push_back(parse_double(parts[c]));
    }
    if (ncols < 3 || cols[0].size() < 4) throw std::invalid_argument("snapshot CSV: too few rows");
    const int n = static_cast<int>(cols[0].size());
    const double x0 = cols[0][0];
    const double dx = cols[0][1] - cols[0][0];
    if (!(dx > 0.0)) throw std::invalid_argument("snapshot CSV: x column must increase");
    for (int i = 0; i < n; ++i)
        if (std::abs(cols[0][i] - (x0 + i * dx)) > 1e-9 * std::max(1.0, std::abs(cols[0][i])))
            throw std::invalid_argument("snapshot CSV: non-uniform x column");
    a = ScalarField1D(n, dx, x0, periodic, std::move(cols[1]));
    b.clear();
    for (int c = 2; c < ncols; ++c)
        b.emplace_back(n, dx, x0, periodic, std::move(cols[c]));
}

} // namespace geoflow
