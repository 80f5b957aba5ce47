#include "core/bundle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace pacnav {

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool is_number(const std::string& s) {
  if (s == "nan" || s == "inf" || s == "-inf") return true;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

double to_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc()) throw IoError("not a number: '" + s + "'");
  return v;
}

std::string num(double v) { return format_number(v); }
std::string num(long v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "1" : "0"; }

// columns that carry text rather than numbers
const std::set<std::string>& text_columns() {
  static const std::set<std::string> cols{"config_hash", "axis", "value", "status",
                                          "architecture", "activation", "error"};
  return cols;
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split(line));
  }
  return t;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const fs::path& path, std::vector<std::string> header)
    : path_(path), columns_(header.size()), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot write " + path.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) {
    throw IoError(path_.string() + ": row has " + std::to_string(fields.size()) + " fields, header " +
                  std::to_string(columns_));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_.put(',');
    out_ << fields[i];
  }
  out_.put('\n');
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("failed writing " + path_.string());
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

// --- schema ------------------------------------------------------------------------

const std::vector<TableSchema>& table_schemas() {
  static const std::vector<TableSchema> schemas{
      {"trials.csv",
       {"config_hash", "seed_index", "seed", "trial_index", "phase", "slot", "session", "cue_id",
        "probe", "probe_block", "start_x", "start_y", "reward_x", "reward_y", "steps", "latency",
        "found", "aborted"},
       ""},
      {"probes.csv",
       {"config_hash", "seed_index", "trial_index", "probe_block", "session", "cue_id", "latency",
        "time_near_correct", "time_near_any", "visit_ratio"},
       "near_"},
      {"sessions.csv",
       {"config_hash", "seed_index", "probe_block", "session", "associations_learned",
        "mean_visit_ratio", "mean_time_near"},
       ""},
      {"probe_traces.csv",
       {"config_hash", "seed_index", "trial_index", "probe_block", "cue_id", "step", "t", "x", "y",
        "action_x", "action_y", "value", "td_error", "reward_rate"},
       ""},
      {"sweep.csv",
       {"config_hash", "axis", "value", "seed_index", "associations_learned", "visit_ratio",
        "dimensionality", "status"},
       ""},
      {"sweep_summary.csv",
       {"config_hash", "axis", "value", "n", "failures", "associations_mean", "associations_stderr",
        "visit_ratio_mean", "visit_ratio_stderr", "dimensionality_mean", "dimensionality_stderr"},
       ""},
      {"dims.csv",
       {"config_hash", "seed_index", "architecture", "activation", "width", "n_samples",
        "n_components", "degenerate"},
       ""},
  };
  return schemas;
}

ValidationReport validate_csv(const fs::path& path, const TableSchema& schema,
                              const std::string& config_hash) {
  ValidationReport rep;
  rep.files_checked = 1;
  const std::string name = path.filename().string();
  auto problem = [&](const std::string& msg) { rep.problems.push_back(name + ": " + msg); };
  CsvTable t;
  try {
    t = read_csv(path);
  } catch (const std::exception& e) {
    problem(e.what());
    return rep;
  }
  if (t.header.size() < schema.columns.size() ||
      !std::equal(schema.columns.begin(), schema.columns.end(), t.header.begin())) {
    problem("header does not match schema");
    return rep;
  }
  for (std::size_t i = schema.columns.size(); i < t.header.size(); ++i) {
    if (schema.extra_prefix.empty() || t.header[i].rfind(schema.extra_prefix, 0) != 0) {
      problem("unexpected column '" + t.header[i] + "'");
    }
  }
  std::vector<bool> numeric(t.header.size());
  for (std::size_t i = 0; i < t.header.size(); ++i) numeric[i] = !text_columns().contains(t.header[i]);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string where = "row " + std::to_string(r + 2);
    if (row.size() != t.header.size()) {
      problem(where + " has " + std::to_string(row.size()) + " fields");
      continue;
    }
    if (!config_hash.empty() && row[0] != config_hash) problem(where + " config_hash mismatch");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (numeric[c] && !is_number(row[c])) {
        problem(where + " column '" + t.header[c] + "' is not numeric");
        break;
      }
    }
    if (rep.problems.size() > 20) break;
  }
  return rep;
}

ValidationReport validate_map_file(const fs::path& path, const std::string& config_hash) {
  ValidationReport rep;
  rep.files_checked = 1;
  const std::string name = path.filename().string();
  auto problem = [&](const std::string& msg) { rep.problems.push_back(name + ": " + msg); };
  Json j;
  try {
    j = read_json(path);
  } catch (const std::exception& e) {
    problem(e.what());
    return rep;
  }
  if (j.value("schema_version", -1) != kBundleSchemaVersion) problem("bad schema_version");
  if (j.value("kind", "") != "spatial_maps") problem("kind must be spatial_maps");
  if (!config_hash.empty() && j.value("config_hash", "") != config_hash) {
    problem("config_hash mismatch");
  }
  for (const char* key : {"value", "td", "policy"}) {
    if (!j.contains(key)) {
      problem(std::string("missing map '") + key + "'");
      continue;
    }
    const Json& m = j[key];
    const int bins = m.value("bins", 0);
    if (!m.contains("cells") || !m["cells"].is_array() ||
        static_cast<int>(m["cells"].size()) != bins * bins || bins < 1) {
      problem(std::string(key) + ": cell count does not match bins");
      continue;
    }
    if (!m.contains("edges") || static_cast<int>(m["edges"].size()) != bins + 1) {
      problem(std::string(key) + ": needs bins + 1 edges");
    }
    const bool vec = std::string(key) == "policy";
    for (const Json& c : m["cells"]) {
      const bool empty = c.value("empty", false);
      const long count = c.value("count", -1L);
      if (count < 0 || empty != (count == 0)) {
        problem(std::string(key) + ": empty flag inconsistent with count");
        break;
      }
      const bool has = vec ? (c.contains("x") && c.contains("y")) : c.contains("mean");
      if (!has) {
        problem(std::string(key) + ": cell missing data fields");
        break;
      }
      if (empty && !(vec ? c["x"].is_null() : c["mean"].is_null())) {
        problem(std::string(key) + ": empty cell carries a value");
        break;
      }
    }
  }
  return rep;
}

ValidationReport validate_bundle(const fs::path& dir) {
  ValidationReport rep;
  auto merge = [&](const ValidationReport& r) {
    rep.files_checked += r.files_checked;
    rep.problems.insert(rep.problems.end(), r.problems.begin(), r.problems.end());
  };
  if (!fs::is_directory(dir)) {
    rep.problems.push_back(dir.string() + " is not a directory");
    return rep;
  }
  std::string hash;
  const fs::path manifest = dir / "manifest.json";
  if (fs::exists(manifest)) {
    ++rep.files_checked;
    try {
      const Json m = read_json(manifest);
      if (m.value("schema_version", -1) != kBundleSchemaVersion) {
        rep.problems.push_back("manifest.json: bad schema_version");
      }
      hash = m.value("config_hash", "");
      if (hash.size() != 16) rep.problems.push_back("manifest.json: missing config_hash");
      if (!m.contains("code_version")) rep.problems.push_back("manifest.json: missing code_version");
      if (!m.contains("status")) rep.problems.push_back("manifest.json: missing status");
      const fs::path cfg_path = dir / "config.json";
      if (fs::exists(cfg_path)) {
        ++rep.files_checked;
        try {
          const RunConfig cfg = load_run_config(cfg_path);
          if (config_hash(cfg) != hash) rep.problems.push_back("config.json: hash differs from manifest");
        } catch (const std::exception& e) {
          rep.problems.push_back(std::string("config.json: ") + e.what());
        }
      }
    } catch (const std::exception& e) {
      rep.problems.push_back(e.what());
    }
  }
  bool any = false;
  for (const TableSchema& s : table_schemas()) {
    const fs::path p = dir / s.file;
    if (!fs::exists(p)) continue;
    if (!any && !fs::exists(manifest)) rep.problems.push_back("manifest.json: missing");
    any = true;
    merge(validate_csv(p, s, hash));
  }
  for (const fs::path& maps_dir : {dir, dir / "maps"}) {
    if (!fs::is_directory(maps_dir)) continue;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(maps_dir)) {
      if (e.path().extension() == ".json" && e.path().filename().string().rfind("map_", 0) == 0) {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      any = true;
      merge(validate_map_file(f, hash));
    }
  }
  if (!any && !fs::exists(manifest)) rep.problems.push_back(dir.string() + ": no bundle files found");
  return rep;
}

// --- run bundles ----------------------------------------------------------------------

void write_run_bundle(const fs::path& dir, const RunConfig& cfg, const std::vector<SeedResult>& seeds) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::string hash = config_hash(cfg);
  const std::size_t n_loc = cfg.task.associations.size();

  save_run_config(cfg, dir / "config.json");

  {
    CsvWriter w(dir / "trials.csv", table_schemas()[0].columns);
    for (const SeedResult& s : seeds) {
      for (const TrialRecord& t : s.trials) {
        const TrialSlot& m = t.meta;
        w.row({hash, num(s.seed_index), num(s.seed), num(m.index), num(m.phase), num(m.slot),
               num(m.session), num(m.cue_id), flag(m.probe), num(m.probe_block), num(m.start.x),
               num(m.start.y), num(m.reward.x), num(m.reward.y), num(t.steps), num(t.latency),
               flag(t.found), flag(t.aborted)});
      }
    }
    w.close();
  }
  {
    std::vector<std::string> header = table_schemas()[1].columns;
    for (std::size_t k = 0; k < n_loc; ++k) header.push_back("near_" + std::to_string(k + 1));
    CsvWriter w(dir / "probes.csv", header);
    for (const SeedResult& s : seeds) {
      for (const ProbeMetrics& p : s.probes) {
        std::vector<std::string> row{hash,
                                     num(s.seed_index),
                                     num(p.trial_index),
                                     num(p.probe_block),
                                     num(p.session),
                                     num(p.cue_id),
                                     num(p.latency),
                                     num(p.time_near_correct),
                                     num(p.time_near_any),
                                     num(p.visit_ratio)};
        for (std::size_t k = 0; k < n_loc; ++k) {
          row.push_back(num(k < p.time_near_each.size() ? p.time_near_each[k] : 0.0));
        }
        w.row(row);
      }
    }
    w.close();
  }
  {
    CsvWriter w(dir / "sessions.csv", table_schemas()[2].columns);
    for (const SeedResult& s : seeds) {
      for (const ProbeSessionScore& p : s.probe_scores) {
        w.row({hash, num(s.seed_index), num(p.probe_block), num(p.session), num(p.associations_learned),
               num(p.mean_visit_ratio), num(p.mean_time_near)});
      }
    }
    w.close();
  }
  {
    CsvWriter w(dir / "probe_traces.csv", table_schemas()[3].columns);
    for (const SeedResult& s : seeds) {
      for (const TrialRecord& t : s.trials) {
        if (!t.meta.probe) continue;
        for (std::size_t i = 0; i < t.positions.size(); ++i) {
          w.row({hash, num(s.seed_index), num(t.meta.index), num(t.meta.probe_block),
                 num(t.meta.cue_id), num(static_cast<long>(i)), num(static_cast<double>(i) * t.dt),
                 num(t.positions[i].x), num(t.positions[i].y), num(t.actions[i].x),
                 num(t.actions[i].y), num(t.values[i]), num(t.td_errors[i]), num(t.reward_rates[i])});
        }
      }
    }
    w.close();
  }

  Json seeds_json = Json::array();
  bool partial = false;
  for (const SeedResult& s : seeds) {
    Json e{{"seed_index", s.seed_index}, {"seed", s.seed}, {"trials", s.trials.size()},
           {"aborted", s.aborted}};
    if (s.aborted) {
      e["error"] = s.error;
      partial = true;
    }
    seeds_json.push_back(e);
  }
  Json manifest;
  manifest["schema_version"] = kBundleSchemaVersion;
  manifest["kind"] = "run";
  manifest["config_hash"] = hash;
  manifest["code_version"] = kCodeVersion;
  manifest["master_seed"] = cfg.master_seed;
  manifest["n_seeds"] = cfg.n_seeds;
  manifest["status"] = partial ? "partial" : "ok";
  manifest["seeds"] = seeds_json;
  manifest["files"] = {"config.json", "trials.csv", "probes.csv", "sessions.csv", "probe_traces.csv"};
  write_json(dir / "manifest.json", manifest);

  const ValidationReport rep = validate_bundle(dir);
  if (!rep.ok()) throw IoError("written bundle failed validation: " + rep.problems.front());
}

std::vector<TrialRecord> load_probe_traces(const fs::path& dir, int probe_block, int seed_index) {
  const CsvTable t = read_csv(dir / "probe_traces.csv");
  const TableSchema& schema = table_schemas()[3];
  std::vector<int> col;
  for (const auto& name : schema.columns) {
    const int c = t.column(name);
    if (c < 0) throw IoError("probe_traces.csv lacks column " + name);
    col.push_back(c);
  }
  enum { Hash, Seed, Trial, Block, Cue, Step, T, X, Y, Ax, Ay, V, Td, R };
  std::map<int, TrialRecord> by_trial;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw IoError("probe_traces.csv: malformed row");
    if (std::stoi(row[col[Seed]]) != seed_index || std::stoi(row[col[Block]]) != probe_block) continue;
    const int trial = std::stoi(row[col[Trial]]);
    TrialRecord& rec = by_trial[trial];
    rec.meta.index = trial;
    rec.meta.probe = true;
    rec.meta.probe_block = probe_block;
    rec.meta.cue_id = std::stoi(row[col[Cue]]);
    rec.positions.push_back({to_double(row[col[X]]), to_double(row[col[Y]])});
    rec.actions.push_back({to_double(row[col[Ax]]), to_double(row[col[Ay]])});
    rec.values.push_back(to_double(row[col[V]]));
    rec.td_errors.push_back(to_double(row[col[Td]]));
    rec.reward_rates.push_back(to_double(row[col[R]]));
    if (rec.positions.size() == 2) rec.dt = to_double(row[col[T]]);
  }
  std::vector<TrialRecord> out;
  for (auto& [idx, rec] : by_trial) {
    rec.steps = static_cast<int>(rec.positions.size());
    out.push_back(std::move(rec));
  }
  return out;
}

// --- maps ------------------------------------------------------------------------------

Json map_to_json(const SpatialMap& map) {
  Json edges = Json::array();
  for (int i = 0; i <= map.bins; ++i) edges.push_back(map.edge(i));
  Json cells = Json::array();
  for (int ix = 0; ix < map.bins; ++ix) {
    for (int iy = 0; iy < map.bins; ++iy) {
      const auto c = static_cast<std::size_t>(ix * map.bins + iy);
      const bool empty = map.count[c] == 0;
      Json cell{{"ix", ix}, {"iy", iy}, {"count", map.count[c]}, {"empty", empty}};
      if (map.kind == MapKind::Policy) {
        cell["x"] = empty ? Json() : Json(map.vector[c].x);
        cell["y"] = empty ? Json() : Json(map.vector[c].y);
      } else {
        cell["mean"] = empty ? Json() : Json(map.scalar[c]);
      }
      cells.push_back(cell);
    }
  }
  return Json{{"kind", map_kind_name(map.kind)},
              {"bins", map.bins},
              {"half_width", map.half_width},
              {"edges", edges},
              {"cells", cells}};
}

Json map_record(const std::string& hash, int probe_block, int seed_index, int cue_id,
                const SpatialMap& value, const SpatialMap& td, const SpatialMap& policy) {
  Json j;
  j["schema_version"] = kBundleSchemaVersion;
  j["kind"] = "spatial_maps";
  j["config_hash"] = hash;
  j["probe_block"] = probe_block;
  j["seed_index"] = seed_index;
  j["cue_id"] = cue_id;
  j["value"] = map_to_json(value);
  j["td"] = map_to_json(td);
  j["policy"] = map_to_json(policy);
  return j;
}

std::string render_map_svg(const SpatialMap& value, const SpatialMap& policy, const std::string& title) {
  constexpr int kCell = 30;
  constexpr int kTop = 24;
  const int n = value.bins;
  const int size = n * kCell;
  double lo = HUGE_VAL;
  double hi = -HUGE_VAL;
  double vmax = 0.0;
  for (int c = 0; c < value.cells(); ++c) {
    if (value.empty(c)) continue;
    lo = std::min(lo, value.scalar[static_cast<std::size_t>(c)]);
    hi = std::max(hi, value.scalar[static_cast<std::size_t>(c)]);
  }
  for (int c = 0; c < policy.cells(); ++c) {
    if (!policy.empty(c)) vmax = std::max(vmax, policy.vector[static_cast<std::size_t>(c)].norm());
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + kTop
      << "\">\n<text x=\"4\" y=\"16\" font-family=\"sans-serif\" font-size=\"12\">" << title
      << "</text>\n";
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const int c = ix * n + iy;
      const int px = ix * kCell;
      const int py = kTop + (n - 1 - iy) * kCell;  // y grows upward in the arena
      std::string fill = "#dddddd";
      if (!value.empty(c)) {
        const double f = hi > lo ? (value.scalar[static_cast<std::size_t>(c)] - lo) / (hi - lo) : 0.5;
        const int r = static_cast<int>(std::lround(68 + f * (253 - 68)));
        const int g = static_cast<int>(std::lround(1 + f * (231 - 1)));
        const int b = static_cast<int>(std::lround(84 + f * (37 - 84)));
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        fill = buf;
      }
      svg << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << kCell << "\" height=\"" << kCell
          << "\" fill=\"" << fill << "\"/>\n";
      if (!policy.empty(c) && vmax > 0.0) {
        const Vec2 v = policy.vector[static_cast<std::size_t>(c)] * (0.45 * kCell / vmax);
        const double cx = px + kCell / 2.0;
        const double cy = py + kCell / 2.0;
        svg << "<line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << cx + v.x << "\" y2=\""
            << cy - v.y << "\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
        svg << "<circle cx=\"" << cx + v.x << "\" cy=\"" << cy - v.y << "\" r=\"1.5\"/>\n";
      }
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace pacnav
