#include "fnls/cli_harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "fnls/errors.hpp"
#include "fnls/parallel.hpp"

namespace fnls {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError("config: " + key + " = '" + v + "' is not a number");
  return x;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t x = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError("config: " + key + " = '" + v + "' is not an integer");
  return x;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::ReportOnly: return "REPORT-ONLY";
  }
  return "?";
}

// ---------------------------------------------------------------- config

Config Config::parse(const std::string& text) {
  Config c;
  std::stringstream ss(text);
  std::string line, section;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    const std::string where = "config line " + std::to_string(number);
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!section.empty() && !valid_key(section)) throw ConfigError(where + ": bad section name '" + section + "'");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    if (!valid_key(key)) throw ConfigError(where + ": bad key '" + key + "'");
    if (!section.empty()) key = section + "." + key;
    if (c.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    c.entries_[key] = trim(t.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("config: bad key '" + key + "'");
  entries_[key] = value;
}

std::string Config::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("config: missing key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const { return parse_double(key, get(key)); }

std::int64_t Config::get_int(const std::string& key) const { return parse_int(key, get(key)); }

bool Config::get_bool(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: " + key + " = '" + v + "' is not a boolean");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key))) out.push_back(parse_double(key, item));
  return out;
}

std::vector<std::int64_t> Config::get_ints(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(get(key))) out.push_back(parse_int(key, item));
  return out;
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

// ---------------------------------------------------------------- CSV

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw DimensionError("table " + name + ": row has " + std::to_string(row.size()) + " fields, expected " +
                         std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  auto line = [](const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    return out + "\r\n";
  };
  std::string out = line(columns);
  for (const auto& r : rows) out += line(r);
  return out;
}

void write_csv(const std::filesystem::path& path, const Table& table, const std::string& timestamp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# generated " << timestamp << "\r\n" << table.to_csv();
  if (!out) throw ConfigError("cannot write " + path.string());
}

// ---------------------------------------------------------------- SVG

std::string render_svg(const Plot& plot) {
  constexpr double W = 720, H = 450, left = 80, right = 170, top = 40, bottom = 60;
  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!plot.log_x || x > 0) && (!plot.log_y || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double v) { return H - bottom - (ty(v) - y0) / (y1 - y0) * (H - top - bottom); };
  auto label = [](double v, bool log) { return format_number(log ? std::pow(10.0, v) : v).substr(0, 10); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\""
    << " font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(plot.title)
    << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
    << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double gx = left + (W - left - right) * i / 4.0, gy = H - bottom - (H - top - bottom) * i / 4.0;
    o << "<text x=\"" << gx << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">" << label(fx, plot.log_x)
      << "</text>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">" << label(fy, plot.log_y)
      << "</text>\n";
  }
  o << "<text x=\"" << left + (W - left - right) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
    << xml_escape(plot.x_label) << (plot.log_x ? " (log)" : "") << "</text>\n";
  o << "<text transform=\"translate(18," << top + (H - top - bottom) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << xml_escape(plot.y_label) << (plot.log_y ? " (log)" : "") << "</text>\n";
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = colors[k % 7];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (usable(s.x[i], s.y[i])) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    o << "\"/>\n";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (usable(s.x[i], s.y[i]))
        o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(k);
    o << "<line x1=\"" << W - right + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - right + 32 << "\" y2=\"" << ly - 4
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - right + 38 << "\" y=\"" << ly << "\">" << xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ---------------------------------------------------------------- registry and runs

const ExperimentSpec& find_experiment(const std::string& name) {
  const auto& reg = experiment_registry();
  for (const auto& e : reg)
    if (e.name == name) return e;
  std::string names;
  for (const auto& e : reg) names += (names.empty() ? "" : ", ") + e.name;
  throw RegistryError("unknown experiment '" + name + "'; valid names: " + names);
}

Config effective_config(const ExperimentSpec& spec, const Config& overrides) {
  Config c;
  for (const auto& k : spec.keys) c.set(k.name, k.default_value);
  for (const auto& [k, v] : overrides.entries()) {
    if (!c.has(k)) {
      std::string known;
      for (const auto& key : spec.keys) known += (known.empty() ? "" : ", ") + key.name;
      throw ConfigError("config: unknown key '" + k + "' for " + spec.name + "; known keys: " + known);
    }
    c.set(k, v);
  }
  return c;
}

std::string ExperimentRecord::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["anchor"] = anchor;
  j["seed"] = seed;
  j["verdict"] = fnls::to_string(verdict);
  j["detail"] = detail;
  j["config"] = config;
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [k, v] : outputs) {
    if (std::isfinite(v)) out[k] = v;
    else out[k] = format_number(v);
  }
  j["outputs"] = out;
  j["files"] = files;
  return j.dump(2) + "\n";
}

ExperimentRecord evaluate_experiment(const std::string& name, const Config& overrides, const RunOptions& options,
                                     ExperimentOutput* output) {
  const ExperimentSpec& spec = find_experiment(name);
  const Config cfg = effective_config(spec, overrides);
  ExperimentOutput out = spec.run(cfg, ExperimentContext{options.seed, std::max<std::size_t>(1, options.workers)});
  ExperimentRecord rec;
  rec.name = spec.name;
  rec.anchor = spec.anchor;
  rec.config = cfg.entries();
  rec.seed = options.seed;
  rec.outputs = out.metrics;
  rec.verdict = out.verdict;
  rec.detail = out.detail;
  if (output) *output = std::move(out);
  return rec;
}

ExperimentRecord run_experiment(const std::string& name, const Config& overrides, const std::filesystem::path& out_dir,
                                const RunOptions& options) {
  find_experiment(name);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw ConfigError("output directory " + out_dir.string() + " is not writable");
  const auto probe = out_dir / ".fnls_write_probe";
  {
    std::ofstream p(probe);
    if (!p) throw ConfigError("output directory " + out_dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);

  ExperimentOutput out;
  ExperimentRecord rec = evaluate_experiment(name, overrides, options, &out);
  const std::string stamp = utc_timestamp();
  for (std::size_t i = 0; i < out.tables.size(); ++i) {
    const std::string file = i == 0 ? name + ".csv" : name + "_" + out.tables[i].name + ".csv";
    write_csv(out_dir / file, out.tables[i], stamp);
    rec.files.push_back(file);
  }
  if (options.plot) {
    for (std::size_t i = 0; i < out.plots.size(); ++i) {
      const std::string file = name + "_" + out.plots[i].name + ".svg";
      std::ofstream svg(out_dir / file);
      svg << render_svg(out.plots[i]);
      if (!svg) throw ConfigError("cannot write " + (out_dir / file).string());
      rec.files.push_back(file);
    }
  }
  {
    std::ofstream cfg(out_dir / (name + ".cfg"));
    cfg << "# " << name << " seed=" << options.seed << "\n";
    for (const auto& [k, v] : rec.config) cfg << k << "=" << v << "\n";
    rec.files.push_back(name + ".cfg");
  }
  rec.files.push_back(name + "_record.json");
  std::ofstream js(out_dir / (name + "_record.json"));
  js << rec.to_json();
  if (!js) throw ConfigError("cannot write record in " + out_dir.string());
  return rec;
}

// ---------------------------------------------------------------- verification suite

Suite parse_suite(const std::string& name) {
  if (name == "smoke") return Suite::Smoke;
  if (name == "full") return Suite::Full;
  throw ConfigError("unknown suite '" + name + "' (expected smoke or full)");
}

std::vector<CriterionResult> verify_all(Suite suite, const std::map<int, double>& tighten, std::size_t workers,
                                        std::uint64_t seed) {
  const auto& criteria = acceptance_criteria();
  for (const auto& [id, factor] : tighten) {
    if (!(factor > 0.0)) throw ConfigError("tightening factor must be positive");
    if (std::none_of(criteria.begin(), criteria.end(), [&](const CriterionSpec& c) { return c.id == id; }))
      throw ConfigError("no acceptance criterion " + std::to_string(id));
  }
  std::vector<CriterionResult> results(criteria.size());
  parallel_for(criteria.size(), workers, [&](std::size_t i) {
    const CriterionSpec& c = criteria[i];
    CriterionResult& r = results[i];
    r.id = c.id;
    r.title = c.title;
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (const auto& step : c.steps) {
      Config cfg = suite == Suite::Smoke ? step.smoke : step.full;
      if (const auto it = tighten.find(c.id); it != tighten.end()) {
        const Config eff = effective_config(find_experiment(step.experiment), cfg);
        for (const auto& key : c.tolerance_keys)
          if (eff.has(key)) cfg.set(key, format_number(eff.get_double(key) / it->second));
      }
      try {
        const auto rec = evaluate_experiment(step.experiment, cfg, RunOptions{seed, false, 1});
        if (!r.anchor.empty()) r.anchor += "; ";
        r.anchor += rec.anchor;
        if (!r.experiment.empty()) r.experiment += "+";
        r.experiment += step.experiment;
        if (rec.verdict == Verdict::Fail) pass = false;
        if (!detail.empty()) detail += " | ";
        detail += step.experiment + ": " + rec.detail;
      } catch (const std::exception& e) {
        pass = false;
        if (!detail.empty()) detail += " | ";
        detail += step.experiment + ": error: " + e.what();
      }
    }
    r.verdict = pass ? Verdict::Pass : Verdict::Fail;
    r.detail = detail;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  return results;
}

Table summary_table(const std::vector<CriterionResult>& results) {
  Table t{"summary", {"criterion", "title", "anchor", "experiment", "verdict", "seconds", "detail"}, {}};
  for (const auto& r : results)
    t.add_row({std::to_string(r.id), r.title, r.anchor, r.experiment, to_string(r.verdict), format_number(r.seconds),
               r.detail});
  return t;
}

}  // namespace fnls
