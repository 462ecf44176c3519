#include "cevi/results_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cevi::io {

namespace {

constexpr const char* kResultsHeader =
    "family,x_star,gamma_true,p_censor,estimator,k,median_bias,mse,n_valid,n_missing";

std::string format_double(double d) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& d) {
  return d ? format_double(*d) : std::string{};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::vector<PerformanceRow> sorted_rows(const PerformanceTable& table) {
  std::vector<PerformanceRow> rows = table.rows;
  std::sort(rows.begin(), rows.end(), [](const PerformanceRow& a, const PerformanceRow& b) {
    const std::string fa = to_string(a.family), fb = to_string(b.family);
    if (fa != fb) return fa < fb;
    if (a.x_star != b.x_star) return a.x_star < b.x_star;
    if (a.p_level != b.p_level) return a.p_level < b.p_level;
    const std::string ea = to_string(a.kind), eb = to_string(b.kind);
    if (ea != eb) return ea < eb;
    return a.k < b.k;
  });
  return rows;
}

}  // namespace

std::vector<std::filesystem::path> write_results(const PerformanceTable& table,
                                                 const RunManifest& manifest,
                                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  const auto csv_path = dir / "results.csv";
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csv_path.string());
    out << kResultsHeader << "\n";
    for (const PerformanceRow& r : sorted_rows(table)) {
      out << to_string(r.family) << ',' << format_double(r.x_star) << ','
          << format_double(r.gamma_true) << ',' << format_double(r.p_level) << ','
          << to_string(r.kind) << ',' << r.k << ',' << format_optional(r.median_bias) << ','
          << format_optional(r.mse) << ',' << r.n_valid << ',' << r.n_missing << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + csv_path.string());
  }

  const auto manifest_path = dir / "manifest.json";
  {
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + manifest_path.string());
    out << manifest_to_json(manifest);
    if (!out) throw std::runtime_error("write failed for " + manifest_path.string());
  }
  return {csv_path, manifest_path};
}

PerformanceTable read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kResultsHeader)
    throw std::runtime_error(path.string() + ": unexpected results header");

  PerformanceTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 10 fields");
    PerformanceRow r;
    r.family = parse_family(f[0]);
    r.x_star = std::stod(f[1]);
    r.gamma_true = std::stod(f[2]);
    r.p_level = std::stod(f[3]);
    r.kind = parse_estimator_kind(f[4]);
    r.k = std::stoul(f[5]);
    if (!f[6].empty()) r.median_bias = std::stod(f[6]);
    if (!f[7].empty()) r.mse = std::stod(f[7]);
    r.n_valid = std::stoul(f[8]);
    r.n_missing = std::stoul(f[9]);
    r.unreliable = r.n_valid * 2 < r.n_valid + r.n_missing;
    table.rows.push_back(r);
  }
  return table;
}

std::vector<std::filesystem::path> emit_plot_data(const PerformanceTable& table,
                                                  const std::filesystem::path& dir) {
  if (table.rows.empty()) throw std::invalid_argument("emit_plot_data: empty table");
  std::filesystem::create_directories(dir);

  const auto rows = sorted_rows(table);

  // panel axes
  std::set<std::pair<std::string, double>> file_keys;  // (family, p)
  std::set<double> x_stars;
  std::set<std::size_t> ks;
  std::set<std::string> estimators;
  for (const auto& r : rows) {
    file_keys.insert({to_string(r.family), r.p_level});
    x_stars.insert(r.x_star);
    ks.insert(r.k);
    estimators.insert(to_string(r.kind));
  }

  // (family, p, estimator, k, x*) -> value
  using Key = std::tuple<std::string, double, std::string, std::size_t, double>;
  std::map<Key, std::optional<double>> bias, mse;
  for (const auto& r : rows) {
    const Key key{to_string(r.family), r.p_level, to_string(r.kind), r.k, r.x_star};
    bias[key] = r.median_bias;
    mse[key] = r.mse;
  }

  std::vector<std::filesystem::path> written;
  nlohmann::json omitted = nlohmann::json::array();

  for (const auto& [family, p] : file_keys) {
    for (const bool is_bias : {true, false}) {
      const auto& values = is_bias ? bias : mse;
      const std::string metric = is_bias ? "bias" : "mse";
      const auto path =
          dir / ("plot_" + family + "_p" + format_double(p) + "_" + metric + ".csv");
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path.string());

      out << "estimator,k";
      for (double x : x_stars) out << ",x" << format_double(x);
      out << "\n";

      for (const std::string& est : estimators) {
        bool any_value = false;
        for (std::size_t k : ks)
          for (double x : x_stars) {
            const auto it = values.find(Key{family, p, est, k, x});
            if (it != values.end() && it->second) any_value = true;
          }
        if (!any_value) {
          omitted.push_back({{"file", path.filename().string()}, {"estimator", est}});
          continue;
        }
        for (std::size_t k : ks) {
          out << est << ',' << k;
          for (double x : x_stars) {
            const auto it = values.find(Key{family, p, est, k, x});
            out << ',' << (it != values.end() ? format_optional(it->second) : std::string{});
          }
          out << "\n";
        }
      }
      if (!out) throw std::runtime_error("write failed for " + path.string());
      written.push_back(path);
    }
  }

  const auto sidecar = dir / "plots.json";
  {
    std::ofstream out(sidecar, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + sidecar.string());
    nlohmann::json j;
    j["omitted_series"] = omitted;
    out << j.dump(2) << "\n";
  }
  written.push_back(sidecar);
  return written;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "z,delta,x")
    throw std::runtime_error(path.string() + ": expected header 'z,delta,x'");

  Dataset data;
  data.d = 1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 3 fields");
    const double z = std::stod(f[0]);
    const long delta = std::stol(f[1]);
    const double x = std::stod(f[2]);
    if (!(z > 0.0))
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": z must be > 0");
    if (delta != 0 && delta != 1)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": delta must be 0 or 1");
    data.z.push_back(z);
    data.delta.push_back(static_cast<std::uint8_t>(delta));
    data.x.push_back(x);
  }
  return data;
}

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path) {
  if (data.d != 1) throw std::invalid_argument("dataset CSV supports d = 1 only");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "z,delta,x\n";
  for (std::size_t i = 0; i < data.size(); ++i)
    out << format_double(data.z[i]) << ',' << int(data.delta[i]) << ','
        << format_double(data.x[i]) << "\n";
}

void write_estimate_series_csv(const std::vector<EstimateSeries>& series, std::ostream& out) {
  out << "estimator,k,estimate,phat,degenerate\n";
  for (const EstimateSeries& s : series)
    for (std::size_t i = 0; i < s.k_values.size(); ++i)
      out << to_string(s.kind) << ',' << s.k_values[i] << ','
          << format_optional(s.estimates[i]) << ',' << format_double(s.phat[i]) << ','
          << int(s.degenerate[i]) << "\n";
}

}  // namespace cevi::io
