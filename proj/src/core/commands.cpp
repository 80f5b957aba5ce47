#include "core/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

namespace pacnav {

void apply_overrides(RunConfig& cfg, const RunOverrides& o) {
  if (o.n_seeds) cfg.n_seeds = *o.n_seeds;
  if (o.master_seed) cfg.master_seed = *o.master_seed;
  if (o.dt) cfg.agent.dt = *o.dt;
  if (o.scheme) cfg.agent.td_scheme = *o.scheme;
  if (o.threads) cfg.threads = *o.threads;
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  cfg.validate();
}

fs::path resolve_output_dir(const std::string& dir) {
  fs::path p(dir);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
    return fs::path(root) / p;
  }
  return p;
}

RunSummary cmd_run(const RunConfig& cfg, const fs::path& out_dir,
                   std::function<void(int, const TrialRecord&)> on_trial) {
  cfg.validate();
  ExperimentOptions opts;
  opts.n_seeds = cfg.n_seeds;
  opts.master_seed = cfg.master_seed;
  opts.threads = cfg.threads;
  opts.on_trial = std::move(on_trial);

  RunSummary summary;
  summary.bundle = out_dir;
  summary.config_hash = config_hash(cfg);
  summary.seeds = run_experiment(cfg.task, cfg.agent, opts);
  summary.n_seeds = cfg.n_seeds;
  for (const auto& s : summary.seeds) summary.aborted_seeds += s.aborted ? 1 : 0;
  write_run_bundle(out_dir, cfg, summary.seeds);
  return summary;
}

// --- sweep --------------------------------------------------------------------------

std::string_view sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::ExpansionRatio:
      return "expansion_ratio";
    case SweepAxis::Activation:
      return "activation";
    case SweepAxis::K:
      return "K";
    case SweepAxis::TauG:
      return "tau_g";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (SweepAxis a : {SweepAxis::ExpansionRatio, SweepAxis::Activation, SweepAxis::K, SweepAxis::TauG}) {
    if (sweep_axis_name(a) == name) return a;
  }
  throw ConfigError("unknown sweep axis '" + std::string(name) +
                    "' (expansion_ratio, activation, K, tau_g)");
}

namespace {

double parse_number(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(what) + " value '" + s + "' is not a number");
  }
}

}  // namespace

RunConfig apply_sweep_point(const RunConfig& cfg, SweepAxis axis, const std::string& value) {
  RunConfig out = cfg;
  AgentConfig& a = out.agent;
  switch (axis) {
    case SweepAxis::ExpansionRatio: {
      const double ratio = parse_number(value, "expansion_ratio");
      if (!(ratio > 0.0)) throw ConfigError("expansion_ratio must be positive");
      if (a.architecture == Architecture::ExpandedClassic) {
        a.expanded_copies = static_cast<int>(std::lround(ratio));
      } else if (a.architecture == Architecture::Classic) {
        throw ConfigError("the classic architecture has a fixed width");
      } else {
        a.n_hidden = std::max(1, static_cast<int>(std::lround(ratio * a.input_width())));
        a.reservoir.n = a.n_hidden;
      }
      break;
    }
    case SweepAxis::Activation:
      a.activation = Activation{parse_activation_kind(value), 0.0, a.activation.gain};
      break;
    case SweepAxis::K: {
      const double k = parse_number(value, "K");
      a.hidden_init = HiddenInit::KSplit;
      a.k_excitatory = static_cast<int>(std::lround(k));
      break;
    }
    case SweepAxis::TauG:
      a.tau_g = parse_number(value, "tau_g");
      break;
  }
  out.validate();
  return out;
}

SweepSummary cmd_sweep(const RunConfig& cfg, SweepAxis axis, const std::vector<std::string>& values,
                       const fs::path& out_dir) {
  cfg.validate();
  if (values.empty()) throw ConfigError("sweep needs at least one axis value");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const std::string hash = config_hash(cfg);
  const std::string axis_name(sweep_axis_name(axis));

  SweepSummary summary;
  summary.dir = out_dir;
  Json point_errors = Json::array();
  for (const std::string& value : values) {
    try {
      const RunConfig point = apply_sweep_point(cfg, axis, value);
      ExperimentOptions opts;
      opts.n_seeds = point.n_seeds;
      opts.master_seed = point.master_seed;
      opts.threads = point.threads;
      const std::vector<SeedResult> seeds = run_experiment(point.task, point.agent, opts);
      for (const SeedResult& s : seeds) {
        SweepPoint p;
        p.value = value;
        p.seed_index = s.seed_index;
        if (!s.probe_scores.empty()) {
          p.associations_learned = s.probe_scores.back().associations_learned;
          p.visit_ratio = s.probe_scores.back().mean_visit_ratio;
        }
        AgentConfig layer = point.agent;
        layer.seed = s.seed;
        Rng rng = make_stream(s.seed, Stream::Analysis);
        p.dimensionality = hidden_dimensionality(layer, rng).n_components;
        if (s.aborted) {
          p.status = "aborted";
          ++summary.failures;
          point_errors.push_back(Json{{"value", value}, {"seed_index", s.seed_index}, {"error", s.error}});
        }
        summary.points.push_back(p);
      }
    } catch (const std::exception& e) {
      SweepPoint p;
      p.value = value;
      p.seed_index = -1;
      p.status = "failed";
      ++summary.failures;
      point_errors.push_back(Json{{"value", value}, {"error", e.what()}});
      summary.points.push_back(p);
    }
  }

  {
    CsvWriter w(out_dir / "sweep.csv", table_schemas()[4].columns);
    for (const SweepPoint& p : summary.points) {
      w.row({hash, axis_name, p.value, std::to_string(p.seed_index),
             std::to_string(p.associations_learned), format_number(p.visit_ratio),
             std::to_string(p.dimensionality), p.status});
    }
    w.close();
  }
  {
    CsvWriter w(out_dir / "sweep_summary.csv", table_schemas()[5].columns);
    for (const std::string& value : values) {
      std::vector<double> assoc;
      std::vector<double> ratio;
      std::vector<double> dim;
      int failures = 0;
      for (const SweepPoint& p : summary.points) {
        if (p.value != value) continue;
        if (p.status != "ok") {
          ++failures;
          continue;
        }
        assoc.push_back(p.associations_learned);
        ratio.push_back(p.visit_ratio);
        dim.push_back(p.dimensionality);
      }
      const Summary sa = summarize(assoc);
      const Summary sr = summarize(ratio);
      const Summary sd = summarize(dim);
      w.row({hash, axis_name, value, std::to_string(sa.n), std::to_string(failures),
             format_number(sa.mean), format_number(sa.stderr_), format_number(sr.mean),
             format_number(sr.stderr_), format_number(sd.mean), format_number(sd.stderr_)});
    }
    w.close();
  }
  save_run_config(cfg, out_dir / "config.json");
  Json manifest;
  manifest["schema_version"] = kBundleSchemaVersion;
  manifest["kind"] = "sweep";
  manifest["config_hash"] = hash;
  manifest["code_version"] = kCodeVersion;
  manifest["axis"] = axis_name;
  manifest["values"] = values;
  manifest["status"] = summary.failures == 0 ? "ok" : "partial";
  manifest["errors"] = point_errors;
  manifest["files"] = {"config.json", "sweep.csv", "sweep_summary.csv"};
  write_json(out_dir / "manifest.json", manifest);

  const ValidationReport rep = validate_bundle(out_dir);
  if (!rep.ok()) throw IoError("sweep output failed validation: " + rep.problems.front());
  return summary;
}

// --- maps ---------------------------------------------------------------------------------

std::vector<fs::path> cmd_maps(const fs::path& bundle, int probe_block, int seed_index, bool svg,
                               const fs::path& out_dir) {
  const Json manifest = read_json(bundle / "manifest.json");
  const std::string hash = manifest.value("config_hash", "");
  const std::vector<TrialRecord> records = load_probe_traces(bundle, probe_block, seed_index);
  if (records.empty()) {
    throw ConfigError("bundle has no probe block " + std::to_string(probe_block) + " for seed " +
                      std::to_string(seed_index));
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::map<int, std::vector<TrialRecord>> by_cue;
  for (const TrialRecord& r : records) by_cue[r.meta.cue_id].push_back(r);

  std::vector<fs::path> written;
  for (const auto& [cue, recs] : by_cue) {
    const SpatialMap v = value_map(recs);
    const SpatialMap td = td_map(recs);
    const SpatialMap pol = policy_map(recs);
    const std::string stem = "map_b" + std::to_string(probe_block) + "_s" + std::to_string(seed_index) +
                             "_cue" + std::to_string(cue);
    const fs::path json_path = out_dir / (stem + ".json");
    write_json(json_path, map_record(hash, probe_block, seed_index, cue, v, td, pol));
    const ValidationReport rep = validate_map_file(json_path, hash);
    if (!rep.ok()) throw IoError("map output failed validation: " + rep.problems.front());
    written.push_back(json_path);
    if (svg) {
      const fs::path svg_path = out_dir / (stem + ".svg");
      std::ofstream out(svg_path, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + svg_path.string());
      out << render_map_svg(v, pol, "cue " + std::to_string(cue) + " probe " +
                                        std::to_string(probe_block) + " [" + hash + "]");
      written.push_back(svg_path);
    }
  }
  return written;
}

// --- dims --------------------------------------------------------------------------------

DimsSummary cmd_dims(const RunConfig& cfg, const fs::path& out_dir, int n_samples) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const std::string hash = config_hash(cfg);

  DimsSummary summary;
  summary.dir = out_dir;
  CsvWriter w(out_dir / "dims.csv", table_schemas()[6].columns);
  Json curves = Json::array();
  const std::string act = cfg.agent.architecture == Architecture::LinearHidden
                              ? "linear"
                              : std::string(activation_name(cfg.agent.activation.kind));
  for (int i = 0; i < cfg.n_seeds; ++i) {
    AgentConfig layer = cfg.agent;
    layer.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
    Rng rng = make_stream(layer.seed, Stream::Analysis);
    DimReport rep = hidden_dimensionality(layer, rng, n_samples);
    w.row({hash, std::to_string(i), std::string(architecture_name(layer.architecture)), act,
           std::to_string(rep.width), std::to_string(rep.n_samples), std::to_string(rep.n_components),
           rep.degenerate ? "1" : "0"});
    curves.push_back(Json{{"seed_index", i},
                          {"n_components", rep.n_components},
                          {"degenerate", rep.degenerate},
                          {"explained", rep.explained}});
    summary.reports.push_back(std::move(rep));
  }
  w.close();
  save_run_config(cfg, out_dir / "config.json");
  Json manifest;
  manifest["schema_version"] = kBundleSchemaVersion;
  manifest["kind"] = "dims";
  manifest["config_hash"] = hash;
  manifest["code_version"] = kCodeVersion;
  manifest["variance_threshold"] = 0.95;
  manifest["status"] = "ok";
  manifest["reports"] = curves;
  manifest["files"] = {"config.json", "dims.csv"};
  write_json(out_dir / "manifest.json", manifest);

  const ValidationReport rep = validate_bundle(out_dir);
  if (!rep.ok()) throw IoError("dims output failed validation: " + rep.problems.front());
  return summary;
}

ValidationReport cmd_validate(const fs::path& path) {
  if (fs::is_directory(path)) return validate_bundle(path);
  ValidationReport rep;
  rep.files_checked = 1;
  try {
    load_run_config(path).validate();
  } catch (const std::exception& e) {
    rep.problems.push_back(path.filename().string() + ": " + e.what());
  }
  return rep;
}

}  // namespace pacnav
