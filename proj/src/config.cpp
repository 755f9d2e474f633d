#include "sinai/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sinai/error.hpp"
#include "sinai/kesten.hpp"

namespace sinai {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kCommon{"suite", "label", "seed", "law", "threads", "site_budget", "runs"};

const std::map<std::string, std::set<std::string>> kSuiteKeys{
    {"density", {"from", "to", "step", "tol"}},
    {"bh-llt", {"h", "N", "x_grid"}},
    {"renewal", {"h", "N", "x_grid"}},
    {"slopes", {"h_values", "N", "delta_grid"}},
    {"constants", {"h", "N", "spitzer_x", "N_spitzer"}},
    {"conditioned", {"h", "N"}},
    {"events", {"n", "N", "z", "events"}},
    {"coupling", {"n", "N", "z", "events", "filter", "max_envs"}},
    {"sinai-llt", {"n", "N", "z_grid", "method", "filter", "events"}},
};

const std::map<std::string, std::set<std::string>> kRequired{
    {"density", {}},
    {"bh-llt", {"h", "N"}},
    {"renewal", {"h", "N", "x_grid"}},
    {"slopes", {"h_values", "N"}},
    {"constants", {"h", "N"}},
    {"conditioned", {"h", "N"}},
    {"events", {"n", "N"}},
    {"coupling", {"n", "N"}},
    {"sinai-llt", {"n", "N", "z_grid", "method"}},
};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

template <class T>
T get(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("key '" + key + "' is missing or has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

EnvLaw parse_law(const json& j) {
  if (!j.is_object()) config_error("'law' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "kind" && it.key() != "param") config_error("unknown key 'law." + it.key() + "'");
  return make_env_law(law_kind_from_string(get<std::string>(j, "kind")), get<double>(j, "param"));
}

EventParams parse_events(const json& p) {
  EventParams e;
  if (!p.contains("events")) return e;
  const json& j = p.at("events");
  if (!j.is_object()) config_error("'events' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "C1" && it.key() != "C2" && it.key() != "delta1" && it.key() != "enforce_ranges")
      config_error("unknown key 'events." + it.key() + "'");
  e.C1 = get_or(j, "C1", e.C1);
  e.C2 = get_or(j, "C2", e.C2);
  e.delta1 = get_or(j, "delta1", e.delta1);
  e.enforce_ranges = get_or(j, "enforce_ranges", e.enforce_ranges);
  validate(e);
  return e;
}

RunConfig parse_one(const json& j, const RunConfig* parent) {
  if (!j.is_object()) config_error("a run config must be a JSON object");
  RunConfig c;
  c.suite = get<std::string>(j, "suite");
  const auto keys = kSuiteKeys.find(c.suite);
  if (keys == kSuiteKeys.end()) config_error("unknown suite '" + c.suite + "'");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "runs") config_error("key 'runs' is only allowed with suite 'all'");
    if (!kCommon.count(it.key()) && !keys->second.count(it.key())) config_error("unknown key '" + it.key() + "'");
    if (keys->second.count(it.key())) c.params[it.key()] = it.value();
  }
  for (const auto& k : kRequired.at(c.suite))
    if (!j.contains(k)) config_error("suite '" + c.suite + "' needs key '" + k + "'");

  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  else if (parent) c.seed = parent->seed;
  else config_error("key 'seed' is mandatory");
  if (j.contains("law")) c.law = parse_law(j.at("law"));
  else if (parent) c.law = parent->law;
  if (!c.law && c.suite != "density") config_error("suite '" + c.suite + "' needs key 'law'");
  c.threads = get_or(j, "threads", parent ? parent->threads : 0);
  c.site_budget = get_or<Site>(j, "site_budget", parent ? parent->site_budget : kDefaultSiteBudget);
  if (c.threads < 0) config_error("'threads' must be >= 0");
  if (c.site_budget < 16) config_error("'site_budget' must be >= 16");
  c.label = get_or<std::string>(j, "label", c.suite);
  if (c.label.empty() || c.label.find_first_of("/\\.") != std::string::npos)
    config_error("label '" + c.label + "' is not a valid file stem");
  // Early checks of the enum-valued keys.
  if (c.params.contains("events")) parse_events(c.params);
  if (c.params.contains("filter")) env_filter_from_string(get<std::string>(c.params, "filter"));
  if (c.params.contains("method")) {
    const auto m = get<std::string>(c.params, "method");
    if (m != "dp-vs-direct") llt_method_from_string(m);
  }
  return c;
}

}  // namespace

std::vector<RunConfig> parse_run_config(const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  std::vector<RunConfig> out;
  if (get<std::string>(j, "suite") != "all") {
    out.push_back(parse_one(j, nullptr));
    return out;
  }
  RunConfig parent;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!kCommon.count(it.key())) config_error("unknown key '" + it.key() + "'");
  parent.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("law")) parent.law = parse_law(j.at("law"));
  parent.threads = get_or(j, "threads", 0);
  parent.site_budget = get_or<Site>(j, "site_budget", kDefaultSiteBudget);
  if (!j.contains("runs") || !j.at("runs").is_array()) config_error("suite 'all' needs a 'runs' array");
  std::set<std::string> labels;
  for (const auto& r : j.at("runs")) {
    out.push_back(parse_one(r, &parent));
    if (!labels.insert(out.back().label).second) config_error("duplicate label '" + out.back().label + "'");
  }
  return out;
}

std::vector<RunConfig> load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

namespace {

SuiteResult density_suite(const RunConfig& c) {
  const double from = get_or(c.params, "from", -5.0), to = get_or(c.params, "to", 5.0);
  const double step = get_or(c.params, "step", 0.01), tol = get_or(c.params, "tol", 1e-10);
  if (!(step > 0) || !(to >= from)) config_error("density needs step > 0 and to >= from");
  SuiteResult r;
  r.name = "density";
  r.seed = c.seed;
  r.params = c.params;
  const auto count = static_cast<std::int64_t>(std::llround((to - from) / step)) + 1;
  for (std::int64_t i = 0; i < count; ++i) {
    const auto d = phi_inf(from + i * step, tol);
    r.rows.push_back(json{{"x", d.x}, {"phi", d.value}, {"terms", d.terms_used}, {"error_bound", d.error_bound}});
  }
  const double at0 = phi_inf(0.0, tol).value;
  const double mass = phi_cdf(40.0) - phi_cdf(-40.0);
  r.summary = json{{"phi_at_0", at0}, {"integral", mass}};
  r.pass = std::fabs(at0 - 0.5) <= 1e-12 && std::fabs(mass - 1.0) <= 1e-8;
  return r;
}

}  // namespace

SuiteResult run_suite(const RunConfig& c, bool serial) {
  if (c.suite == "density") return density_suite(c);
  const EnvLaw& law = *c.law;
  const RunContext ctx{c.seed, c.threads, serial, c.site_budget};
  const json& p = c.params;
  const auto N = get<std::int64_t>(p, "N");
  if (N < 1) config_error("'N' must be >= 1");
  if (c.suite == "bh-llt") {
    const double h = get<double>(p, "h");
    return estimate_bh_law(law, h, N, get_or(p, "x_grid", default_bh_grid(law, h)), ctx);
  }
  if (c.suite == "renewal")
    return check_renewal_identity(law, get<double>(p, "h"), N, get<std::vector<Site>>(p, "x_grid"), ctx);
  if (c.suite == "slopes")
    return estimate_slope_moments(law, get<std::vector<double>>(p, "h_values"), N,
                                  get_or(p, "delta_grid", std::vector<double>{}), ctx);
  if (c.suite == "constants")
    return estimate_c_constants(law, get<double>(p, "h"), N, get_or(p, "spitzer_x", std::vector<std::int64_t>{}),
                                get_or<std::int64_t>(p, "N_spitzer", 0), ctx);
  if (c.suite == "conditioned") return conditioned_law_check(law, get<double>(p, "h"), N, ctx);
  const auto n = get<std::int64_t>(p, "n");
  const EventParams ev = parse_events(p);
  if (c.suite == "events") return event_frequencies(law, n, N, get_or<Site>(p, "z", 0), ev, ctx);
  if (c.suite == "coupling")
    return coupling_experiment(law, n, N, get_or<Site>(p, "z", 0), ev,
                               env_filter_from_string(get_or<std::string>(p, "filter", "E_C")),
                               get_or<std::int64_t>(p, "max_envs", 10 * N), ctx);
  if (c.suite == "sinai-llt") {
    const auto z = get<std::vector<Site>>(p, "z_grid");
    const auto m = get<std::string>(p, "method");
    if (m == "dp-vs-direct") return compare_llt_methods(law, n, z, N, ctx);
    return verify_sinai_llt(law, n, z, N, llt_method_from_string(m),
                            env_filter_from_string(get_or<std::string>(p, "filter", "E_C")), ev, ctx);
  }
  config_error("unknown suite '" + c.suite + "'");
}

void write_atomic(const fs::path& file, const std::string& contents) {
  const fs::path tmp = file.parent_path() / ("." + file.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) throw Error(ErrorCode::IoError, "rename to " + file.string() + ": " + ec.message());
}

void write_result(const fs::path& dir, const std::string& label, const SuiteResult& r) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_atomic(dir / (label + ".json"), to_json(r).dump(2) + "\n");
  write_atomic(dir / (label + ".csv"), to_csv(r));
}

namespace {

std::string cell(const json& v) {
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(6);
    os << v.get<double>();
    return os.str();
  }
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

Report emit_report(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  Report rep;
  std::ostringstream md;
  md << "# Results: " << dir.filename().string() << "\n\n";
  std::ostringstream bad;
  for (const auto& f : files) {
    SuiteResult r;
    try {
      std::ifstream in(f);
      r = suite_from_json(json::parse(in));
    } catch (const std::exception& e) {
      ++rep.malformed;
      bad << "- `" << f.filename().string() << "`: " << e.what() << "\n";
      continue;
    }
    ++rep.suites;
    rep.failing += !r.pass;
    md << "## " << f.stem().string() << " (" << r.name << ") " << (r.pass ? "PASS" : "FAIL") << "\n\n";
    md << "seed " << r.seed << "\n\n";
    if (!r.rows.empty() && r.rows.front().is_object()) {
      std::vector<std::string> cols;
      for (auto it = r.rows.front().begin(); it != r.rows.front().end(); ++it) cols.push_back(it.key());
      md << "|";
      for (const auto& c : cols) md << " " << c << " |";
      md << "\n|";
      for (std::size_t i = 0; i < cols.size(); ++i) md << " --- |";
      md << "\n";
      for (const auto& row : r.rows) {
        md << "|";
        for (const auto& c : cols) md << " " << (row.contains(c) ? cell(row[c]) : "") << " |";
        md << "\n";
      }
      md << "\n";
    }
    if (!r.summary.empty()) md << "summary: `" << r.summary.dump() << "`\n\n";
  }
  if (rep.malformed) md << "## Unreadable files\n\n" << bad.str() << "\n";
  md << rep.suites << " suite(s), " << rep.failing << " failing, " << rep.malformed << " unreadable\n";
  rep.markdown = md.str();
  return rep;
}

std::string density_table(double from, double to, double step, double tol) {
  if (!(step > 0) || !(to >= from)) throw Error(ErrorCode::RangeError, "density table needs step > 0 and to >= from");
  std::string out = "x,phi,error_bound\n";
  const auto count = static_cast<std::int64_t>(std::llround((to - from) / step)) + 1;
  char buf[96];
  for (std::int64_t i = 0; i < count; ++i) {
    const auto d = phi_inf(from + i * step, tol);
    std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.3g\n", d.x, d.value, d.error_bound);
    out += buf;
  }
  return out;
}

}  // namespace sinai
