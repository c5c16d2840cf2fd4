#pragma once

#include "arhlab/hilbert.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace arhlab {

namespace fs = std::filesystem;

/// Round-trip decimal form of a double (17 significant digits).
std::string format_double(double v);

/// Write-to-temp-then-rename so readers never observe partial artifacts.
void atomic_write(const fs::path& path, const std::string& content);

/// FNV-1a 64-bit content hash, hex encoded; used by run manifests.
std::string file_hash(const fs::path& path);

/// Sidecar convention: sample.csv <-> sample.grid.csv.
fs::path grid_sidecar(const fs::path& data_path);

std::string sample_to_csv(const std::vector<Curve>& curves);
std::string grid_to_csv(const Grid& grid);
std::string operator_to_csv(const OperatorMatrix& op);

void write_sample_csv(const fs::path& path, const std::vector<Curve>& curves,
                      bool with_grid_sidecar = true);
void write_operator_csv(const fs::path& path, const OperatorMatrix& op,
                        bool with_grid_sidecar = true);

GridPtr read_grid_csv(const fs::path& path);
std::vector<Curve> read_sample_csv(const fs::path& path, const GridPtr& grid);
/// Reads a sample with its grid sidecar (or a uniform grid if absent).
std::vector<Curve> read_sample_csv(const fs::path& path);
OperatorMatrix read_operator_csv(const fs::path& path, const GridPtr& grid);
OperatorMatrix read_operator_csv(const fs::path& path);

void write_json(const fs::path& path, const nlohmann::ordered_json& doc);

/// Run manifest: schema version, echoed parameters, input hashes. Contains no
/// clock so reruns are byte-identical.
nlohmann::ordered_json make_manifest(const std::string& command,
                                     const nlohmann::ordered_json& parameters,
                                     const std::vector<fs::path>& inputs);

}  // namespace arhlab
