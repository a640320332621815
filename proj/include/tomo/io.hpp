#pragma once

#include <map>
#include <string>
#include <vector>

#include "tomo/linalg.hpp"
#include "tomo/sim.hpp"

namespace tomo {

// "start:step:stop" (inclusive), a comma list, or a single value.
std::vector<double> parse_snr_grid(const std::string& spec);

// results.csv schema. The header and field order are stable.
std::string csv_header();
std::string csv_from_records(const std::vector<SerRecord>& records);

// Single-instance file: first line "p d", then p rows of H, then one row
// of x. Hand-editable plain text.
struct Instance {
  Mat H;
  Vec x;
};

Instance parse_instance(const std::string& text);
Instance read_instance_file(const std::string& path);
std::string format_instance(const Mat& h, const Vec& x);

// Flat "key = value" config file; '#' starts a comment. Keys mirror the
// simulation config field names.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Applies config-file keys onto a SimConfig. Unknown keys or bad values
// throw std::invalid_argument naming the key.
void apply_config_entry(SimConfig& config, const std::string& key, const std::string& value);

std::string manifest_json(const SimConfig& config, const std::vector<PointTiming>& timings,
                          const std::string& started_utc, const std::string& finished_utc);

std::string utc_timestamp();

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace tomo
