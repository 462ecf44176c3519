#include "cevi/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cevi/version.hpp"

namespace cevi::io {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": cannot parse '" + value + "' as a number");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("");
    const std::uint64_t u = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return u;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": cannot parse '" + value + "' as a nonnegative integer");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = lower(value);
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw std::invalid_argument(key + ": cannot parse '" + value + "' as a boolean");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
  if (out.empty()) throw std::invalid_argument(key + ": empty list");
  return out;
}

std::vector<std::size_t> parse_k_grid(const std::string& value) {
  std::vector<std::size_t> out;
  if (value.find(':') != std::string::npos) {
    const auto parts = [&] {
      std::vector<std::string> p;
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ':')) p.push_back(trim(item));
      return p;
    }();
    if (parts.size() != 3) throw std::invalid_argument("k_grid: range form is lo:hi:step");
    const auto lo = parse_uint("k_grid", parts[0]);
    const auto hi = parse_uint("k_grid", parts[1]);
    const auto step = parse_uint("k_grid", parts[2]);
    if (step == 0 || hi < lo) throw std::invalid_argument("k_grid: bad range " + value);
    for (std::uint64_t k = lo; k <= hi; k += step) out.push_back(static_cast<std::size_t>(k));
  } else {
    for (const auto& item : split_list(value))
      out.push_back(static_cast<std::size_t>(parse_uint("k_grid", item)));
  }
  if (out.empty()) throw std::invalid_argument("k_grid: empty");
  return out;
}

std::vector<EstimatorKind> parse_kinds(const std::string& value) {
  if (lower(trim(value)) == "all")
    return {all_estimator_kinds, all_estimator_kinds + std::size(all_estimator_kinds)};
  std::vector<EstimatorKind> out;
  for (const auto& item : split_list(value)) out.push_back(parse_estimator_kind(item));
  if (out.empty()) throw std::invalid_argument("kinds: empty list");
  return out;
}

void apply_key(StudyConfig& c, const std::string& key, const std::string& value) {
  if (key == "family") {
    c.families.clear();
    for (const auto& item : split_list(value)) c.families.push_back(parse_family(item));
  } else if (key == "beta0") {
    c.beta0 = parse_double(key, value);
  } else if (key == "beta1") {
    c.beta1 = parse_double(key, value);
  } else if (key == "burr_eta") {
    c.burr.eta = parse_double(key, value);
  } else if (key == "burr_tau") {
    c.burr.tau = parse_double(key, value);
  } else if (key == "x_stars") {
    c.x_stars = parse_double_list(key, value);
  } else if (key == "p_levels") {
    c.p_levels = parse_double_list(key, value);
  } else if (key == "n") {
    c.n = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "R") {
    c.replications = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "h") {
    c.h = parse_double(key, value);
  } else if (key == "k_grid") {
    c.k_grid = parse_k_grid(value);
  } else if (key == "kinds") {
    c.kinds = parse_kinds(value);
  } else if (key == "master_seed") {
    c.master_seed = parse_uint(key, value);
  } else if (key == "censor_family") {
    if (lower(value) == "same")
      c.censor_family.reset();
    else
      c.censor_family = parse_family(value);
  } else if (key == "no_censoring") {
    c.no_censoring = parse_bool(key, value);
  } else if (key == "ww_kl_spacing_form") {
    c.ww_kl_spacing_form = parse_bool(key, value);
  } else if (key == "ppd_fix_tau") {
    if (lower(value) == "none")
      c.ppd_fix_tau.reset();
    else
      c.ppd_fix_tau = parse_double(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

std::string format_double(double d) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_double(xs[i]);
  }
  return out;
}

json config_to_json(const StudyConfig& c) {
  json j;
  json fams = json::array();
  for (Family f : c.families) fams.push_back(to_string(f));
  j["family"] = fams;
  j["beta0"] = c.beta0;
  j["beta1"] = c.beta1;
  j["burr_eta"] = c.burr.eta;
  j["burr_tau"] = c.burr.tau;
  j["x_stars"] = c.x_stars;
  j["p_levels"] = c.p_levels;
  j["n"] = c.n;
  j["R"] = c.replications;
  j["h"] = c.h;
  j["k_grid"] = c.k_grid;
  json kinds = json::array();
  for (EstimatorKind k : c.kinds) kinds.push_back(to_string(k));
  j["kinds"] = kinds;
  j["master_seed"] = c.master_seed;
  j["censor_family"] = c.censor_family ? json(to_string(*c.censor_family)) : json(nullptr);
  j["no_censoring"] = c.no_censoring;
  j["ww_kl_spacing_form"] = c.ww_kl_spacing_form;
  j["ppd_fix_tau"] = c.ppd_fix_tau ? json(*c.ppd_fix_tau) : json(nullptr);
  return j;
}

StudyConfig config_from_json(const json& j) {
  static const std::vector<std::string> known = {
      "family",      "beta0",       "beta1",        "burr_eta",
      "burr_tau",    "x_stars",     "p_levels",     "n",
      "R",           "h",           "k_grid",       "kinds",
      "master_seed", "censor_family", "no_censoring", "ww_kl_spacing_form",
      "ppd_fix_tau"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key '" + key + "'");

  StudyConfig c;
  c.families.clear();
  for (const auto& f : j.at("family")) c.families.push_back(parse_family(f.get<std::string>()));
  c.beta0 = j.at("beta0").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.burr.eta = j.at("burr_eta").get<double>();
  c.burr.tau = j.at("burr_tau").get<double>();
  c.x_stars = j.at("x_stars").get<std::vector<double>>();
  c.p_levels = j.at("p_levels").get<std::vector<double>>();
  c.n = j.at("n").get<std::size_t>();
  c.replications = j.at("R").get<std::size_t>();
  c.h = j.at("h").get<double>();
  c.k_grid = j.at("k_grid").get<std::vector<std::size_t>>();
  c.kinds.clear();
  for (const auto& k : j.at("kinds")) c.kinds.push_back(parse_estimator_kind(k.get<std::string>()));
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (!j.at("censor_family").is_null())
    c.censor_family = parse_family(j.at("censor_family").get<std::string>());
  c.no_censoring = j.at("no_censoring").get<bool>();
  c.ww_kl_spacing_form = j.at("ww_kl_spacing_form").get<bool>();
  if (!j.at("ppd_fix_tau").is_null()) c.ppd_fix_tau = j.at("ppd_fix_tau").get<double>();
  c.validate();
  return c;
}

}  // namespace

StudyConfig parse_config_text(const std::string& text, const std::string& origin) {
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    // JSON: either a bare config object or a full run manifest
    json j = json::parse(body);
    if (j.contains("config")) return config_from_json(j.at("config"));
    return config_from_json(j);
  }

  StudyConfig c;
  std::map<std::string, bool> seen;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_family = false;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    if (seen[key])
      throw std::invalid_argument(origin + ": duplicate key '" + key + "'");
    seen[key] = true;
    apply_key(c, key, value);
    if (key == "family") have_family = true;
  }
  if (!have_family) throw std::invalid_argument(origin + ": required key 'family' is missing");
  c.finalize();
  c.validate();
  return c;
}

void apply_config_override(StudyConfig& config, const std::string& key,
                           const std::string& value) {
  apply_key(config, key, value);
}

StudyConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

std::string config_to_text(const StudyConfig& c) {
  std::string out;
  out += "# study configuration\n";
  std::string fams;
  for (std::size_t i = 0; i < c.families.size(); ++i)
    fams += std::string(i ? "," : "") + to_string(c.families[i]);
  out += "family = " + fams + "\n";
  out += "beta0 = " + format_double(c.beta0) + "\n";
  out += "beta1 = " + format_double(c.beta1) + "\n";
  out += "burr_eta = " + format_double(c.burr.eta) + "\n";
  out += "burr_tau = " + format_double(c.burr.tau) + "\n";
  out += "x_stars = " + join_doubles(c.x_stars) + "\n";
  out += "p_levels = " + join_doubles(c.p_levels) + "\n";
  out += "n = " + std::to_string(c.n) + "\n";
  out += "R = " + std::to_string(c.replications) + "\n";
  out += "h = " + format_double(c.h) + "\n";
  std::string grid;
  for (std::size_t i = 0; i < c.k_grid.size(); ++i)
    grid += std::string(i ? "," : "") + std::to_string(c.k_grid[i]);
  out += "k_grid = " + grid + "\n";
  std::string kinds;
  for (std::size_t i = 0; i < c.kinds.size(); ++i)
    kinds += std::string(i ? "," : "") + to_string(c.kinds[i]);
  out += "kinds = " + kinds + "\n";
  out += "master_seed = " + std::to_string(c.master_seed) + "\n";
  out += "censor_family = " +
         std::string(c.censor_family ? to_string(*c.censor_family) : "same") + "\n";
  out += std::string("no_censoring = ") + (c.no_censoring ? "true" : "false") + "\n";
  out += std::string("ww_kl_spacing_form = ") + (c.ww_kl_spacing_form ? "true" : "false") + "\n";
  out += "ppd_fix_tau = " + (c.ppd_fix_tau ? format_double(*c.ppd_fix_tau) : "none") + "\n";
  return out;
}

void write_config(const StudyConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write config file " + path.string());
  out << config_to_text(config);
}

std::string runtime_warning(const StudyConfig& config) {
  const std::size_t cells =
      config.families.size() * config.x_stars.size() * config.p_levels.size();
  const std::size_t total = cells * config.replications;
  if (total >= 5000)
    return "study spans " + std::to_string(total) + " replications of n=" +
           std::to_string(config.n) +
           "; expect a long run (the paper-scale profile takes tens of minutes)";
  return {};
}

std::string manifest_to_json(const RunManifest& manifest) {
  json j;
  j["tool_version"] = manifest.tool_version;
  j["started_at"] = manifest.started_at;
  j["master_seed"] = manifest.master_seed;
  j["config"] = config_to_json(manifest.config);
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.started_at = j.at("started_at").get<std::string>();
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.config = config_from_json(j.at("config"));
  return m;
}

}  // namespace cevi::io
