#include "arhlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace arhlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::string file_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_hash: cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

fs::path grid_sidecar(const fs::path& data_path) {
    fs::path p = data_path;
    p.replace_extension();
    p += ".grid.csv";
    return p;
}

std::string sample_to_csv(const std::vector<Curve>& curves) {
    if (curves.empty()) throw std::invalid_argument("sample_to_csv: empty sample");
    const Index m = curves[0].grid->size();
    std::ostringstream out;
    for (Index j = 0; j < m; ++j) out << (j ? "," : "") << "t" << j;
    out << "\n";
    for (const Curve& c : curves) {
        for (Index j = 0; j < m; ++j) {
            out << (j ? "," : "") << format_double(c.values(j));
        }
        out << "\n";
    }
    return out.str();
}

std::string grid_to_csv(const Grid& grid) {
    std::ostringstream out;
    for (Index j = 0; j < grid.size(); ++j) {
        out << (j ? "," : "") << format_double(grid.points()(j));
    }
    out << "\n";
    return out.str();
}

std::string operator_to_csv(const OperatorMatrix& op) {
    std::ostringstream out;
    for (Index i = 0; i < op.kernel.rows(); ++i) {
        for (Index j = 0; j < op.kernel.cols(); ++j) {
            out << (j ? "," : "") << format_double(op.kernel(i, j));
        }
        out << "\n";
    }
    return out.str();
}

void write_sample_csv(const fs::path& path, const std::vector<Curve>& curves,
                      bool with_grid_sidecar) {
    atomic_write(path, sample_to_csv(curves));
    if (with_grid_sidecar) atomic_write(grid_sidecar(path), grid_to_csv(*curves[0].grid));
}

void write_operator_csv(const fs::path& path, const OperatorMatrix& op,
                        bool with_grid_sidecar) {
    atomic_write(path, operator_to_csv(op));
    if (with_grid_sidecar) atomic_write(grid_sidecar(path), grid_to_csv(*op.grid));
}

namespace {

std::vector<std::vector<double>> read_numeric_rows(const fs::path& path, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && skip_header) continue;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": cannot parse '" + cell + "' as a number");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

GridPtr read_grid_csv(const fs::path& path) {
    auto rows = read_numeric_rows(path, false);
    if (rows.size() != 1) throw std::runtime_error("read_grid_csv: expected exactly one row");
    Vector pts(static_cast<Index>(rows[0].size()));
    for (std::size_t j = 0; j < rows[0].size(); ++j) pts(static_cast<Index>(j)) = rows[0][j];
    return Grid::from_points(std::move(pts));
}

std::vector<Curve> read_sample_csv(const fs::path& path, const GridPtr& grid) {
    auto rows = read_numeric_rows(path, true);
    if (rows.empty()) throw std::runtime_error("read_sample_csv: no data rows in " + path.string());
    std::vector<Curve> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (static_cast<Index>(row.size()) != grid->size())
            throw std::runtime_error("read_sample_csv: row width does not match the grid");
        Vector v(grid->size());
        for (std::size_t j = 0; j < row.size(); ++j) v(static_cast<Index>(j)) = row[j];
        out.emplace_back(grid, std::move(v));
    }
    return out;
}

std::vector<Curve> read_sample_csv(const fs::path& path) {
    const fs::path sidecar = grid_sidecar(path);
    if (fs::exists(sidecar)) return read_sample_csv(path, read_grid_csv(sidecar));
    // fall back to a uniform grid of the row width
    auto rows = read_numeric_rows(path, true);
    if (rows.empty()) throw std::runtime_error("read_sample_csv: no data rows in " + path.string());
    return read_sample_csv(path, Grid::uniform(static_cast<Index>(rows[0].size())));
}

OperatorMatrix read_operator_csv(const fs::path& path, const GridPtr& grid) {
    auto rows = read_numeric_rows(path, false);
    const Index m = grid->size();
    if (static_cast<Index>(rows.size()) != m)
        throw std::runtime_error("read_operator_csv: row count does not match the grid");
    Matrix k(m, m);
    for (Index i = 0; i < m; ++i) {
        if (static_cast<Index>(rows[i].size()) != m)
            throw std::runtime_error("read_operator_csv: row width does not match the grid");
        for (Index j = 0; j < m; ++j) k(i, j) = rows[i][j];
    }
    return OperatorMatrix(grid, std::move(k));
}

OperatorMatrix read_operator_csv(const fs::path& path) {
    const fs::path sidecar = grid_sidecar(path);
    if (fs::exists(sidecar)) return read_operator_csv(path, read_grid_csv(sidecar));
    auto rows = read_numeric_rows(path, false);
    if (rows.empty()) throw std::runtime_error("read_operator_csv: empty file " + path.string());
    return read_operator_csv(path, Grid::uniform(static_cast<Index>(rows.size())));
}

void write_json(const fs::path& path, const nlohmann::ordered_json& doc) {
    atomic_write(path, doc.dump(2) + "\n");
}

nlohmann::ordered_json make_manifest(const std::string& command,
                                     const nlohmann::ordered_json& parameters,
                                     const std::vector<fs::path>& inputs) {
    nlohmann::ordered_json manifest;
    manifest["schema"] = "arhlab-manifest-v1";
    manifest["command"] = command;
    manifest["parameters"] = parameters;
    nlohmann::ordered_json files = nlohmann::ordered_json::object();
    for (const fs::path& p : inputs) {
        files[p.filename().string()] = file_hash(p);
    }
    manifest["input_hashes"] = files;
    return manifest;
}

}  // namespace arhlab
