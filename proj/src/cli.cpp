#include "grouplife/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "grouplife/analytics.hpp"
#include "grouplife/io.hpp"

namespace grouplife {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Value parsing

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument(key + ": expected a number, got '" + text + "'");
  }
  return value;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

int to_int(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument(key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!trim(item).empty()) values.push_back(to_double(key, item));
  }
  return values;
}

/// Either a comma list or `start:stop:count` for an evenly spaced grid.
std::vector<double> to_grid(const std::string& key, const std::string& text) {
  if (text.find(':') == std::string::npos) return to_list(key, text);
  std::stringstream stream(text);
  std::string a, b, c;
  std::getline(stream, a, ':');
  std::getline(stream, b, ':');
  std::getline(stream, c, ':');
  const double start = to_double(key, a);
  const double stop = to_double(key, b);
  const int count = to_int(key, c);
  if (count < 2) throw std::invalid_argument(key + ": grid needs at least two points");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = start + (stop - start) * i / (count - 1);
  return grid;
}

std::string list_text(const std::vector<double>& values) {
  std::string text;
  for (std::size_t i = 0; i < values.size(); ++i) text += (i ? "," : "") + format_double(values[i]);
  return text;
}

// ---------------------------------------------------------------------------
// Key table

struct Key {
  const char* name;
  const char* help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define GL_NUMBER(field)                                                        \
  [](RunConfig& c, const std::string& v) { c.field = to_double(#field, v); }, \
      [](const RunConfig& c) { return format_double(c.field); }
#define GL_INT(field)                                                        \
  [](RunConfig& c, const std::string& v) { c.field = to_int(#field, v); }, \
      [](const RunConfig& c) { return std::to_string(c.field); }

const std::vector<Key>& common_keys() {
  static const std::vector<Key> keys = {
      {"seed", "root random seed",
       [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"out", "output directory",
       [](RunConfig& c, const std::string& v) { c.out = trim(v); },
       [](const RunConfig& c) { return c.out.string(); }},
      {"spec", "error specification: lognormal | weibull",
       [](RunConfig& c, const std::string& v) { c.spec = parse_error_kind(trim(v)); },
       [](const RunConfig& c) { return std::string(to_string(c.spec)); }},
  };
  return keys;
}

const std::vector<Key>& simulate_keys() {
  static const std::vector<Key> keys = {
      {"scenario", "ground-truth scenario: S1 | S2 | S3",
       [](RunConfig& c, const std::string& v) { c.scenario = parse_scenario(trim(v)); },
       [](const RunConfig& c) { return std::string(to_string(c.scenario)); }},
      {"n", "number of groups",
       [](RunConfig& c, const std::string& v) { c.n = to_u64("n", v); },
       [](const RunConfig& c) { return std::to_string(c.n); }},
      {"M", "units per group",
       [](RunConfig& c, const std::string& v) { c.M = to_u64("M", v); },
       [](const RunConfig& c) { return std::to_string(c.M); }},
      {"censoring_time", "Type-I censoring time (0 = calibrated scenario default)", GL_NUMBER(censoring_time)},
      {"true_beta0", "true intercept", GL_NUMBER(true_beta0)},
      {"true_beta", "true coefficients (comma list)",
       [](RunConfig& c, const std::string& v) { c.true_beta = to_list("true_beta", v); },
       [](const RunConfig& c) { return list_text(c.true_beta); }},
      {"true_sigma", "true error scale", GL_NUMBER(true_sigma)},
      {"proportion", "probability of subpopulation 1", GL_NUMBER(proportion)},
      {"atoms", "S1 atom locations (two values)",
       [](RunConfig& c, const std::string& v) { c.atoms = to_list("atoms", v); },
       [](const RunConfig& c) { return list_text(c.atoms); }},
      {"component_mu", "S2 component means (two values)",
       [](RunConfig& c, const std::string& v) { c.component_mu = to_list("component_mu", v); },
       [](const RunConfig& c) { return list_text(c.component_mu); }},
      {"component_sd", "S2 component sds (two values)",
       [](RunConfig& c, const std::string& v) { c.component_sd = to_list("component_sd", v); },
       [](const RunConfig& c) { return list_text(c.component_sd); }},
      {"latent_mu", "S3 latent mean", GL_NUMBER(latent_mu)},
      {"latent_sd", "S3 latent sd", GL_NUMBER(latent_sd)},
  };
  return keys;
}

const std::vector<Key>& fit_keys() {
  static const std::vector<Key> keys = {
      {"data", "dataset CSV",
       [](RunConfig& c, const std::string& v) { c.data = trim(v); },
       [](const RunConfig& c) { return c.data.string(); }},
      {"latent", "latent structure: none | gslh-d | gslh-c | gslh-m",
       [](RunConfig& c, const std::string& v) { c.latent = parse_latent_kind(trim(v)); },
       [](const RunConfig& c) { return std::string(to_string(c.latent)); }},
      {"K", "atoms (gslh-d) or components (gslh-m)",
       [](RunConfig& c, const std::string& v) { c.K = to_u64("K", v); },
       [](const RunConfig& c) { return std::to_string(c.K); }},
      {"tau_max", "total sweeps per chain", GL_INT(chain.tau_max)},
      {"burn_in", "discarded sweeps", GL_INT(chain.burn_in)},
      {"thin", "keep every thin-th sweep after burn-in", GL_INT(chain.thin)},
      {"chains", "number of chains", GL_INT(chain.n_chains)},
      {"threads", "worker threads", GL_INT(chain.threads)},
      {"adapt_until", "last adaptation sweep (-1 = burn_in / 2)", GL_INT(chain.adapt_until)},
      {"adapt_window", "sweeps per adaptation window", GL_INT(chain.adapt_window)},
      {"target_acceptance", "target MH acceptance rate", GL_NUMBER(chain.target_acceptance)},
      {"scale_beta0", "initial proposal scale for beta0", GL_NUMBER(chain.scale_beta0)},
      {"scale_beta", "initial proposal scale for each beta", GL_NUMBER(chain.scale_beta)},
      {"scale_log_sigma", "initial proposal scale for log sigma", GL_NUMBER(chain.scale_log_sigma)},
      {"scale_w", "initial proposal scale for each W", GL_NUMBER(chain.scale_w)},
      {"scale_atom", "initial proposal scale for each atom", GL_NUMBER(chain.scale_atom)},
      {"prior.beta_sd", "prior sd of beta0 and beta", GL_NUMBER(priors.beta_sd)},
      {"prior.log_sigma_mean", "prior mean of log sigma", GL_NUMBER(priors.log_sigma_mean)},
      {"prior.log_sigma_sd", "prior sd of log sigma", GL_NUMBER(priors.log_sigma_sd)},
      {"prior.atom_sd", "prior sd of each atom", GL_NUMBER(priors.atom_sd)},
      {"prior.m0", "latent-law hyperprior m0", GL_NUMBER(priors.hyper.m0)},
      {"prior.k0", "latent-law hyperprior k0", GL_NUMBER(priors.hyper.k0)},
      {"prior.a0", "latent-law hyperprior a0", GL_NUMBER(priors.hyper.a0)},
      {"prior.b0", "latent-law hyperprior b0", GL_NUMBER(priors.hyper.b0)},
      {"prior.dirichlet", "Dirichlet concentration per weight", GL_NUMBER(priors.dirichlet)},
      {"recenter", "move the latent mean into beta0 after each sweep",
       [](RunConfig& c, const std::string& v) { c.recenter = to_bool("recenter", v); },
       [](const RunConfig& c) { return std::string(c.recenter ? "true" : "false"); }},
      {"standardize", "center and scale covariates before fitting",
       [](RunConfig& c, const std::string& v) { c.standardize = to_bool("standardize", v); },
       [](const RunConfig& c) { return std::string(c.standardize ? "true" : "false"); }},
  };
  return keys;
}

const std::vector<Key>& predict_keys() {
  static const std::vector<Key> keys = {
      {"fit", "fit output directory",
       [](RunConfig& c, const std::string& v) { c.fit = trim(v); },
       [](const RunConfig& c) { return c.fit.string(); }},
      {"x_new", "covariates of the new unit (comma list)",
       [](RunConfig& c, const std::string& v) { c.x_new = to_list("x_new", v); },
       [](const RunConfig& c) { return list_text(c.x_new); }},
      {"t_grid", "time grid: comma list or start:stop:count",
       [](RunConfig& c, const std::string& v) { c.t_grid = to_grid("t_grid", v); },
       [](const RunConfig& c) { return list_text(c.t_grid); }},
      {"holdout", "dataset CSV for a Kaplan-Meier overlay",
       [](RunConfig& c, const std::string& v) { c.holdout = trim(v); },
       [](const RunConfig& c) { return c.holdout.string(); }},
      {"predictive_draws", "fresh latent draws per sample for continuous laws", GL_INT(predictive_draws)},
  };
  return keys;
}

#undef GL_NUMBER
#undef GL_INT

std::vector<const Key*> all_keys() {
  std::vector<const Key*> keys;
  for (const auto* table : {&common_keys(), &simulate_keys(), &fit_keys(), &predict_keys()}) {
    for (const auto& key : *table) keys.push_back(&key);
  }
  return keys;
}

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  std::replace(key.begin(), key.end(), '.', '-');
  return "--" + key;
}

json entries_json(const RunConfig& config) {
  json object = json::object();
  for (const auto& [key, value] : config.entries()) object[key] = value;
  return object;
}

// ---------------------------------------------------------------------------
// Commands

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  const ScenarioSpec spec = config.scenario_spec();
  const GroundTruthBundle bundle = simulate(spec);
  ensure_directory(config.out);
  write_dataset_csv(config.out / "data.csv", bundle.dataset);

  json truth;
  truth["scenario"] = std::string(to_string(spec.scenario));
  truth["spec"] = std::string(to_string(spec.error));
  truth["n"] = spec.n;
  truth["M"] = spec.M;
  truth["seed"] = spec.seed;
  truth["beta0"] = spec.truth.beta0;
  truth["beta"] = spec.truth.beta;
  truth["sigma"] = spec.truth.sigma;
  truth["latent_mean"] = spec.latent_mean();
  truth["censoring_time"] = spec.censoring_time;
  truth["censored_fraction"] = bundle.censored_fraction;
  truth["true_w"] = bundle.true_w;
  std::vector<int> memberships;
  for (int k : bundle.memberships) memberships.push_back(k + 1);
  truth["memberships"] = memberships;
  truth["dataset_fingerprint"] = dataset_fingerprint(bundle.dataset);
  truth["note"] = "artifact default ground-truth values, not published values";
  truth["config"] = entries_json(config);
  write_text_file(config.out / "truth.json", truth.dump(2) + "\n");

  out << "wrote " << (config.out / "data.csv").string() << " (" << bundle.dataset.observation_count()
      << " rows) and " << (config.out / "truth.json").string() << "\n";
  out << "realized censoring fraction: " << std::fixed << std::setprecision(4)
      << bundle.censored_fraction << std::defaultfloat << "\n";
  return kExitOk;
}

struct Standardization {
  std::vector<double> center;
  std::vector<double> scale;
};

Standardization standardize(GroupedDataset& data) {
  const std::size_t p = data.covariate_count();
  Standardization s{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)};
  const auto count = static_cast<double>(data.observation_count());
  for (const auto& g : data.groups()) {
    for (const auto& obs : g.observations) {
      for (std::size_t j = 0; j < p; ++j) s.center[j] += obs.covariates[j] / count;
    }
  }
  for (const auto& g : data.groups()) {
    for (const auto& obs : g.observations) {
      for (std::size_t j = 0; j < p; ++j) s.scale[j] += std::pow(obs.covariates[j] - s.center[j], 2) / count;
    }
  }
  for (double& v : s.scale) v = v > 0.0 ? std::sqrt(v) : 1.0;
  std::vector<Group> groups = data.groups();
  for (auto& g : groups) {
    for (auto& obs : g.observations) {
      for (std::size_t j = 0; j < p; ++j) obs.covariates[j] = (obs.covariates[j] - s.center[j]) / s.scale[j];
    }
  }
  data = GroupedDataset(std::move(groups));
  return s;
}

json dic_json(const DicResult& d) {
  return {{"dic", d.dic},
          {"mean_deviance", d.mean_deviance},
          {"deviance_at_mean", d.deviance_at_mean},
          {"p_d", d.p_d},
          {"focus", "conditional on group latent values"}};
}

int cmd_fit(const RunConfig& config, std::ostream& out) {
  if (config.data.empty()) throw std::invalid_argument("fit: --data is required");
  const ModelSpec model = config.model_spec();
  config.chain.validate();
  const GroupedDataset original = read_dataset_csv(config.data);
  GroupedDataset data = original;
  std::optional<Standardization> standardization;
  if (config.standardize) standardization = standardize(data);

  const std::vector<Trace> traces = run_chains(config.chain, data, model);
  ensure_directory(config.out);
  for (const auto& trace : traces) {
    write_trace_csv(config.out / ("trace_chain" + std::to_string(trace.chain + 1) + ".csv"), trace);
  }
  const Trace merged = merge_traces(traces);
  FitReport report = summarize_trace(merged);
  report.dic = dic(merged, data);

  json doc;
  doc["tool"] = {{"name", "grouplife"}, {"version", kVersion}, {"command", "fit"}};
  doc["config"] = entries_json(config);
  doc["dataset"] = {{"path", config.data.string()},
                    {"fingerprint", dataset_fingerprint(original)},
                    {"groups", original.group_count()},
                    {"observations", original.observation_count()},
                    {"covariates", original.covariate_count()},
                    {"censored_fraction", original.censored_fraction()}};
  json notes = json::array();
  notes.push_back("latent law: normal components; atoms have Normal(0, atom_sd^2) priors with increasing order");
  if (model.recenter && model.latent != LatentKind::none) {
    notes.push_back("latent mean re-centered to 0 after every sweep; offset absorbed into beta0");
  }
  if (model.latent == LatentKind::mixed && model.K == 1) {
    notes.push_back("gslh-m with K=1 is equivalent to gslh-c");
  }
  doc["model"] = {{"spec", std::string(to_string(model.error))},
                  {"latent", std::string(to_string(model.latent))},
                  {"K", model.components()},
                  {"equivalent_to", model.latent == LatentKind::mixed && model.K == 1 ? "gslh-c" : ""},
                  {"notes", notes}};
  doc["standardization"] = standardization
                               ? json{{"center", standardization->center}, {"scale", standardization->scale}}
                               : json(nullptr);
  doc["chains"] = traces.size();
  doc["samples"] = report.sample_count;
  doc["dic"] = dic_json(*report.dic);
  json parameters = json::array();
  for (const auto& p : report.parameters) {
    parameters.push_back({{"name", p.name}, {"mean", p.mean}, {"lower", p.lower}, {"upper", p.upper}});
  }
  doc["credible_level"] = report.level;
  doc["parameters"] = parameters;
  json acceptance = json::object();
  for (const auto& a : report.acceptance) acceptance[a.block] = a.rate;
  doc["acceptance"] = acceptance;
  write_text_file(config.out / "report.json", doc.dump(2) + "\n");

  out << "model " << to_string(model.latent) << " (" << to_string(model.error) << "), "
      << traces.size() << " chain(s), " << report.sample_count << " samples\n";
  if (model.latent == LatentKind::mixed && model.K == 1) out << "note: gslh-m with K=1 is equivalent to gslh-c\n";
  out << "DIC " << format_double(report.dic->dic) << " (mean deviance " << format_double(report.dic->mean_deviance)
      << ", p_D " << format_double(report.dic->p_d) << ")\n";
  out << "wrote " << (config.out / "report.json").string() << "\n";
  return kExitOk;
}

json load_report(const std::filesystem::path& input) {
  const auto path = std::filesystem::is_directory(input) ? input / "report.json" : input;
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

int cmd_compare(const RunConfig& config, const std::vector<std::string>& inputs, bool write_file,
                std::ostream& out) {
  if (inputs.size() < 2) throw std::invalid_argument("compare: at least two fit outputs are required");
  struct Row {
    std::string label;
    std::string latent;
    double dic, mean_deviance, p_d, delta;
  };
  std::vector<Row> rows;
  std::string fingerprint;
  for (const auto& input : inputs) {
    const json report = load_report(input);
    const auto fp = report.at("dataset").at("fingerprint").get<std::string>();
    if (fingerprint.empty()) fingerprint = fp;
    if (fp != fingerprint) throw std::invalid_argument("compare: mismatched dataset fingerprints (" + fingerprint + " vs " + fp + ")");
    const auto& model = report.at("model");
    const auto& d = report.at("dic");
    Row row;
    row.latent = model.at("latent").get<std::string>();
    row.label = row.latent + (row.latent == "gslh-d" || row.latent == "gslh-m"
                                  ? " K=" + std::to_string(model.at("K").get<int>())
                                  : "") +
                " " + model.at("spec").get<std::string>();
    row.dic = d.at("dic").get<double>();
    row.mean_deviance = d.at("mean_deviance").get<double>();
    row.p_d = d.at("p_d").get<double>();
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.dic < b.dic; });
  const auto baseline = std::find_if(rows.begin(), rows.end(), [](const Row& r) { return r.latent == "none"; });
  const double reference = baseline != rows.end() ? baseline->dic : rows.front().dic;
  for (auto& row : rows) row.delta = row.dic - reference;

  std::ostringstream table;
  table << "rank\tmodel\tDIC\tmean_deviance\tp_D\tdelta_" << (baseline != rows.end() ? "baseline" : "best") << "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    table << r + 1 << '\t' << rows[r].label << '\t' << format_double(rows[r].dic) << '\t'
          << format_double(rows[r].mean_deviance) << '\t' << format_double(rows[r].p_d) << '\t'
          << format_double(rows[r].delta) << "\n";
  }
  out << table.str();
  if (write_file) {
    ensure_directory(config.out);
    write_text_file(config.out / "comparison.tsv", table.str());
  }
  return kExitOk;
}

int cmd_predict(const RunConfig& config, std::ostream& out) {
  if (config.fit.empty()) throw std::invalid_argument("predict: --fit is required");
  if (config.t_grid.empty()) throw std::invalid_argument("predict: --t-grid is required");
  const json report = load_report(config.fit);
  const ErrorKind kind = parse_error_kind(report.at("model").at("spec").get<std::string>());
  const auto chains = report.at("chains").get<std::size_t>();
  std::vector<Trace> traces;
  for (std::size_t c = 1; c <= chains; ++c) {
    const auto path = config.fit / ("trace_chain" + std::to_string(c) + ".csv");
    if (!std::filesystem::exists(path)) throw IoError("missing trace file '" + path.string() + "'");
    traces.push_back(read_trace_csv(path, kind));
  }
  const Trace merged = merge_traces(traces);
  std::vector<double> x = config.x_new;
  if (x.size() != merged.covariate_count) {
    throw std::invalid_argument("predict: --x-new needs " + std::to_string(merged.covariate_count) + " values");
  }
  if (const auto& s = report.at("standardization"); !s.is_null()) {
    const auto center = s.at("center").get<std::vector<double>>();
    const auto scale = s.at("scale").get<std::vector<double>>();
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = (x[j] - center[j]) / scale[j];
  }
  const auto curve = predicted_reliability_curve(merged, kind, x, config.t_grid, config.predictive_draws, config.seed);
  ensure_directory(config.out);
  {
    std::ostringstream text;
    write_curve(text, "time", "reliability", config.t_grid, curve);
    write_text_file(config.out / "curve.tsv", text.str());
  }
  out << "wrote " << (config.out / "curve.tsv").string() << " (" << curve.size() << " points)\n";
  if (!config.holdout.empty()) {
    const auto km = kaplan_meier(read_dataset_csv(config.holdout));
    std::ostringstream text;
    write_curve(text, "time", "km_survival", km.times, km.survival);
    write_text_file(config.out / "km.tsv", text.str());
    double max_gap = 0.0;
    for (std::size_t g = 0; g < config.t_grid.size(); ++g) {
      max_gap = std::max(max_gap, std::abs(curve[g] - km.at(config.t_grid[g])));
    }
    out << "wrote " << (config.out / "km.tsv").string() << "; max |predicted - K-M| on grid: "
        << format_double(max_gap) << "\n";
  }
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const Key* entry : all_keys()) {
    if (key == entry->name) {
      entry->set(*this, value);
      return;
    }
  }
  throw std::invalid_argument("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> result;
  for (const Key* entry : all_keys()) result.emplace_back(entry->name, entry->get(*this));
  return result;
}

std::string RunConfig::to_text() const {
  std::ostringstream text;
  for (const Key* entry : all_keys()) {
    text << "# " << entry->help << "\n" << entry->name << " = " << entry->get(*this) << "\n";
  }
  return text.str();
}

void RunConfig::load_text(const std::string& text) {
  std::stringstream stream(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_number);
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_number);
    }
  }
}

ScenarioSpec RunConfig::scenario_spec() const {
  ScenarioSpec spec = ScenarioSpec::defaults(scenario, this->spec, n, M, seed);
  if (censoring_time > 0.0) spec.censoring_time = censoring_time;
  spec.truth = {true_beta0, true_beta, true_sigma};
  spec.proportion = proportion;
  spec.atoms = atoms;
  if (component_mu.size() != 2 || component_sd.size() != 2) {
    throw std::invalid_argument("component_mu and component_sd need two values");
  }
  spec.components = {{component_mu[0], component_sd[0]}, {component_mu[1], component_sd[1]}};
  spec.continuous = {latent_mu, latent_sd};
  spec.validate();
  return spec;
}

ModelSpec RunConfig::model_spec() const {
  ModelSpec model;
  model.error = spec;
  model.latent = latent;
  if (K < 1) throw std::invalid_argument("K must be at least 1");
  model.K = K;
  model.priors = priors;
  model.recenter = recenter;
  return model;
}

// ---------------------------------------------------------------------------
// Entry point

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian AFT lifetime regression with group-shared latent heterogeneity"};
  app.require_subcommand(1);

  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  std::string config_path;
  bool print_config = false;

  auto add_keys = [&](CLI::App* sub, const std::vector<Key>& keys) {
    for (const auto& key : keys) {
      auto* option = sub->add_option(flag_name(key.name), flag_values[std::string(sub->get_name()) + ":" + key.name], key.help);
      flag_options[std::string(sub->get_name()) + ":" + key.name] = option;
    }
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_flag("--print-config", print_config, "print the resolved configuration and exit");
    add_keys(sub, common_keys());
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "generate a ground-truth dataset");
  add_common(simulate_cmd);
  add_keys(simulate_cmd, simulate_keys());

  auto* fit_cmd = app.add_subcommand("fit", "run the sampler and write traces plus a report");
  add_common(fit_cmd);
  add_keys(fit_cmd, fit_keys());

  std::vector<std::string> compare_inputs;
  auto* compare_cmd = app.add_subcommand("compare", "rank fitted models by DIC");
  add_common(compare_cmd);
  compare_cmd->add_option("reports", compare_inputs, "fit output directories or report.json files");

  auto* predict_cmd = app.add_subcommand("predict", "posterior predictive reliability curve");
  add_common(predict_cmd);
  add_keys(predict_cmd, predict_keys());
  add_keys(predict_cmd, {fit_keys()[0]});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config.load_text(read_text_file(config_path));
    CLI::App* active = app.get_subcommands().front();
    const std::string prefix = active->get_name() + ":";
    for (const auto& [id, option] : flag_options) {
      if (id.starts_with(prefix) && option->count() > 0) config.set(id.substr(prefix.size()), flag_values[id]);
    }
    config.chain.seed = config.seed;
    if (print_config) {
      out << config.to_text();
      return kExitOk;
    }
    if (active == simulate_cmd) return cmd_simulate(config, out);
    if (active == fit_cmd) return cmd_fit(config, out);
    if (active == compare_cmd) return cmd_compare(config, compare_inputs, compare_cmd->get_option("--out")->count() > 0, out);
    return cmd_predict(config, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: malformed report: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace grouplife
