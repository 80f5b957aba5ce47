#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/config.hpp"
#include "core/protocols.hpp"

namespace pacnav {

namespace fs = std::filesystem;

inline constexpr int kBundleSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";

// --- delimiter-separated tables ------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column, or -1.
  int column(std::string_view name) const;
};

CsvTable read_csv(const fs::path& path);

/// Shortest round-trip representation.
std::string format_number(double v);

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, std::vector<std::string> header);
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  /// Throws IoError when the field count differs from the header.
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  fs::path path_;
  std::size_t columns_;
  std::ofstream out_;
};

void write_json(const fs::path& path, const Json& j);
Json read_json(const fs::path& path);

// --- schema ---------------------------------------------------------------------

struct ValidationReport {
  int files_checked = 0;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// Column layout of each known table. Columns listed are required, in order,
/// at the start of the header; `extra_prefix` names may follow.
struct TableSchema {
  std::string file;
  std::vector<std::string> columns;
  std::string extra_prefix;
};

const std::vector<TableSchema>& table_schemas();

/// Checks every known file in a bundle or map directory: headers, field
/// counts, numeric fields, config hashes and schema versions.
ValidationReport validate_bundle(const fs::path& dir);
ValidationReport validate_csv(const fs::path& path, const TableSchema& schema,
                              const std::string& config_hash);
ValidationReport validate_map_file(const fs::path& path, const std::string& config_hash);

// --- run bundles ------------------------------------------------------------------

/// Writes config.json, manifest.json, trials.csv, probes.csv, sessions.csv
/// and probe_traces.csv, then validates them. Throws IoError when the written
/// bundle fails its own schema check.
void write_run_bundle(const fs::path& dir, const RunConfig& cfg,
                      const std::vector<SeedResult>& seeds);

/// Probe traces of one seed and probe block, rebuilt from probe_traces.csv
/// (one record per probe trial).
std::vector<TrialRecord> load_probe_traces(const fs::path& dir, int probe_block, int seed_index);

// --- maps -------------------------------------------------------------------------

Json map_to_json(const SpatialMap& map);

/// One file holding the value, td and policy maps for a cue.
Json map_record(const std::string& config_hash, int probe_block, int seed_index, int cue_id,
                const SpatialMap& value, const SpatialMap& td, const SpatialMap& policy);

/// Heatmap of value with policy arrows, as a standalone SVG document.
std::string render_map_svg(const SpatialMap& value, const SpatialMap& policy,
                           const std::string& title);

}  // namespace pacnav
