#include "tomo/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tomo/version.hpp"

namespace tomo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": not a number: '" + s + "'");
  }
}

long long parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": not an integer: '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument(what + ": not a boolean: '" + s + "'");
}

}  // namespace

std::vector<double> parse_snr_grid(const std::string& spec) {
  const std::string s = trim(spec);
  if (s.empty()) throw std::invalid_argument("snr grid: empty value");
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw std::invalid_argument("snr grid: expected start:step:stop");
    const double start = parse_double(trim(parts[0]), "snr grid start");
    const double step = parse_double(trim(parts[1]), "snr grid step");
    const double stop = parse_double(trim(parts[2]), "snr grid stop");
    if (step <= 0.0) throw std::invalid_argument("snr grid: step must be positive");
    if (stop < start) throw std::invalid_argument("snr grid: stop must be >= start");
    const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (int k = 0; k < n; ++k) grid[k] = start + step * k;
    return grid;
  }
  if (s.find(',') != std::string::npos) {
    std::vector<double> grid;
    for (const auto& part : split(s, ','))
      grid.push_back(parse_double(trim(part), "snr grid value"));
    return grid;
  }
  return {parse_double(s, "snr grid value")};
}

std::string csv_header() {
  return "snr_db,detector,ser,symbol_errors,symbols_total,vector_errors,frames_total";
}

std::string csv_from_records(const std::vector<SerRecord>& records) {
  std::string out = csv_header() + "\n";
  char buf[256];
  for (const SerRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%.10g,%s,%.10g,%llu,%llu,%llu,%llu\n", r.snr_db,
                  std::string(detector_name(r.detector)).c_str(), r.ser,
                  static_cast<unsigned long long>(r.symbol_errors),
                  static_cast<unsigned long long>(r.symbols_total),
                  static_cast<unsigned long long>(r.vector_errors),
                  static_cast<unsigned long long>(r.frames_total));
    out += buf;
  }
  return out;
}

Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  int p = 0;
  int d = 0;
  if (!(in >> p >> d) || p <= 0 || d <= 0)
    throw std::invalid_argument("instance file: first line must be 'p d'");
  Instance inst;
  inst.H = Mat(p, d);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < d; ++c)
      if (!(in >> inst.H(r, c)))
        throw std::invalid_argument("instance file: expected " + std::to_string(p) + "x" +
                                    std::to_string(d) + " channel entries");
  inst.x.resize(p);
  for (int r = 0; r < p; ++r)
    if (!(in >> inst.x[r]))
      throw std::invalid_argument("instance file: expected " + std::to_string(p) +
                                  " received-vector entries");
  double extra = 0.0;
  if (in >> extra) throw std::invalid_argument("instance file: trailing data");
  return inst;
}

Instance read_instance_file(const std::string& path) { return parse_instance(read_text_file(path)); }

std::string format_instance(const Mat& h, const Vec& x) {
  std::ostringstream out;
  out.precision(17);
  out << h.rows() << " " << h.cols() << "\n";
  for (int r = 0; r < h.rows(); ++r) {
    for (int c = 0; c < h.cols(); ++c) out << (c ? " " : "") << h(r, c);
    out << "\n";
  }
  for (int r = 0; r < h.rows(); ++r) out << (r ? " " : "") << x[r];
  out << "\n";
  return out.str();
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config file line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    if (key.empty()) throw std::invalid_argument("config file line " + std::to_string(lineno) +
                                                 ": empty key");
    kv[key] = value;
  }
  return kv;
}

void apply_config_entry(SimConfig& config, const std::string& key, const std::string& value) {
  if (key == "d") {
    config.d = static_cast<int>(parse_int(value, "config field d"));
  } else if (key == "p") {
    config.p = static_cast<int>(parse_int(value, "config field p"));
  } else if (key == "constellation_m" || key == "mod") {
    config.constellation_m = static_cast<int>(parse_int(value, "config field constellation_m"));
  } else if (key == "snr_grid_db" || key == "snr") {
    config.snr_grid_db = parse_snr_grid(value);
  } else if (key == "n_channels" || key == "channels") {
    config.n_channels = static_cast<int>(parse_int(value, "config field n_channels"));
  } else if (key == "frame_len") {
    config.frame_len = static_cast<int>(parse_int(value, "config field frame_len"));
  } else if (key == "detectors") {
    std::vector<Detector> dets;
    for (const auto& name : split(value, ',')) {
      const auto det = parse_detector(trim(name));
      if (!det)
        throw std::invalid_argument("config field detectors: unknown detector '" + trim(name) +
                                    "'");
      dets.push_back(*det);
    }
    config.detectors = std::move(dets);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_int(value, "config field seed"));
  } else if (key == "workers") {
    config.workers = static_cast<int>(parse_int(value, "config field workers"));
  } else if (key == "max_sweeps") {
    config.tlsd.max_sweeps = static_cast<int>(parse_int(value, "config field max_sweeps"));
  } else if (key == "tol") {
    config.tlsd.tol = parse_double(value, "config field tol");
  } else if (key == "arbitrate_with_sic") {
    config.tlsd.arbitrate_with_sic = parse_bool(value, "config field arbitrate_with_sic");
  } else {
    throw std::invalid_argument("config file: unknown key '" + key + "'");
  }
}

std::string manifest_json(const SimConfig& config, const std::vector<PointTiming>& timings,
                          const std::string& started_utc, const std::string& finished_utc) {
  nlohmann::json j;
  j["tool"] = std::string(kToolName);
  j["version"] = std::string(kToolVersion);
  j["started_utc"] = started_utc;
  j["finished_utc"] = finished_utc;

  nlohmann::json cfg;
  cfg["d"] = config.d;
  cfg["p"] = config.p;
  cfg["constellation_m"] = config.constellation_m;
  cfg["snr_grid_db"] = config.snr_grid_db;
  cfg["n_channels"] = config.n_channels;
  cfg["frame_len"] = config.frame_len;
  std::vector<std::string> dets;
  for (Detector det : config.detectors) dets.emplace_back(detector_name(det));
  cfg["detectors"] = dets;
  cfg["seed"] = config.seed;
  cfg["workers"] = config.workers;
  cfg["max_sweeps"] = config.tlsd.max_sweeps;
  cfg["tol"] = config.tlsd.tol;
  cfg["arbitrate_with_sic"] = config.tlsd.arbitrate_with_sic;
  j["config"] = cfg;

  nlohmann::json pts = nlohmann::json::array();
  for (const PointTiming& t : timings) pts.push_back({{"snr_db", t.snr_db}, {"seconds", t.seconds}});
  j["points"] = pts;
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace tomo
