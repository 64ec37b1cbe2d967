// SPDX-License-Identifier: Apache-2.0
#include "psc/registry.hpp"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <cerrno>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

using nlohmann::json;

namespace psc {

namespace {

std::string format_number(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

json measurement_map_to_json(const std::map<MetricKind, double>& measurements) {
  json j = json::object();
  for (const auto& [kind, value] : measurements) {
    if (kind.tag() == MetricKind::Tag::QueryCount && value == std::floor(value)) {
      j[std::string(kind.name())] = static_cast<std::int64_t>(value);
    } else {
      j[std::string(kind.name())] = value;
    }
  }
  return j;
}

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw Error(Errc::ParseError, where + ": " + what);
}

void validate_or_throw(const AttackRecord& record, const std::string& where) {
  const auto issues = validate_record(record);
  if (!issues.empty()) {
    throw Error(Errc::ValidationError,
                where + ": " + issues.front().field + ": " + issues.front().message);
  }
}

// --- CSV --------------------------------------------------------------------

const std::vector<std::string> kCsvFixedColumns = {"method", "param_set", "dataset",
                                                   "model",  "mode",      "attack_family"};

std::vector<std::string> split_csv_line(const std::string& line, const std::string& where) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      if (!current.empty()) parse_fail(where, "quote inside unquoted field");
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (quoted) parse_fail(where, "unterminated quoted field");
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<AttackRecord> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    header = split_csv_line(line, "line " + std::to_string(line_no));
    break;
  }
  if (header.empty()) return {};

  for (std::size_t i = 0; i < kCsvFixedColumns.size(); ++i) {
    if (i >= header.size() || header[i] != kCsvFixedColumns[i]) {
      parse_fail("line " + std::to_string(line_no) + ", column " + std::to_string(i + 1),
                 "CSV header must start with method,param_set,dataset,model,mode,attack_family");
    }
  }

  std::vector<AttackRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    const auto fields = split_csv_line(line, where);
    if (fields.size() != header.size())
      parse_fail(where, "expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));

    AttackRecord record;
    record.method = fields[0];
    record.param_set = fields[1];
    record.context.dataset = fields[2];
    record.context.model = fields[3];
    if (auto mode = mode_from_name(fields[4])) record.context.mode = *mode;
    else parse_fail(where + ", column 5", "unknown mode '" + fields[4] + "'");
    if (auto family = family_from_name(fields[5])) record.context.attack_family = *family;
    else parse_fail(where + ", column 6", "unknown attack_family '" + fields[5] + "'");

    for (std::size_t i = kCsvFixedColumns.size(); i < header.size(); ++i) {
      if (fields[i].empty()) continue;  // absent metric
      if (auto kind = MetricKind::from_name(header[i])) {
        const char* begin = fields[i].data();
        const char* end = begin + fields[i].size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end)
          parse_fail(where + ", column " + std::to_string(i + 1),
                     "'" + fields[i] + "' is not a number");
        record.measurements[*kind] = value;
      } else {
        record.meta[header[i]] = fields[i];
      }
    }
    validate_or_throw(record, where);
    records.push_back(std::move(record));
  }
  return records;
}

std::string serialize_csv(std::span<const AttackRecord> records) {
  // Metric columns: canonical order, restricted to the metrics present.
  const std::vector<MetricKind> all_kinds = {
      MetricKind::distance(LpNorm::L0),   MetricKind::distance(LpNorm::L1),
      MetricKind::distance(LpNorm::L2),   MetricKind::distance(LpNorm::LInf),
      MetricKind::success_rate(),         MetricKind::query_count()};
  std::vector<MetricKind> kinds;
  for (const MetricKind& kind : all_kinds) {
    for (const AttackRecord& r : records) {
      if (r.measurements.contains(kind)) {
        kinds.push_back(kind);
        break;
      }
    }
  }
  std::vector<std::string> meta_columns;
  for (const AttackRecord& r : records) {
    for (const auto& [key, value] : r.meta) {
      if (std::find(meta_columns.begin(), meta_columns.end(), key) == meta_columns.end())
        meta_columns.push_back(key);
    }
  }
  std::sort(meta_columns.begin(), meta_columns.end());

  std::string out;
  for (std::size_t i = 0; i < kCsvFixedColumns.size(); ++i) {
    if (i) out.push_back(',');
    out += kCsvFixedColumns[i];
  }
  for (const MetricKind& kind : kinds) {
    out.push_back(',');
    out += std::string(kind.name());
  }
  for (const std::string& col : meta_columns) {
    out.push_back(',');
    out += csv_escape(col);
  }
  out.push_back('\n');

  for (const AttackRecord& r : records) {
    out += csv_escape(r.method);
    out.push_back(',');
    out += csv_escape(r.param_set);
    out.push_back(',');
    out += csv_escape(r.context.dataset);
    out.push_back(',');
    out += csv_escape(r.context.model);
    out.push_back(',');
    out += std::string(mode_name(r.context.mode));
    out.push_back(',');
    out += std::string(family_name(r.context.attack_family));
    for (const MetricKind& kind : kinds) {
      out.push_back(',');
      if (auto it = r.measurements.find(kind); it != r.measurements.end())
        out += format_number(it->second);
    }
    for (const std::string& col : meta_columns) {
      out.push_back(',');
      if (auto it = r.meta.find(col); it != r.meta.end()) out += csv_escape(it->second);
    }
    out.push_back('\n');
  }
  return out;
}

// --- JSONL ------------------------------------------------------------------

std::vector<AttackRecord> parse_jsonl(std::string_view text) {
  std::vector<AttackRecord> records;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty() || line == "\r") {
      if (end == text.size()) break;
      continue;
    }
    const std::string where = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      parse_fail(where, e.what());
    }
    AttackRecord record;
    try {
      record = record_from_json(j);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      parse_fail(where, e.what());
    }
    validate_or_throw(record, where);
    records.push_back(std::move(record));
    if (end == text.size()) break;
  }
  return records;
}

}  // namespace

RecordFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? RecordFormat::Csv : RecordFormat::Jsonl;
}

std::vector<AttackRecord> parse_records(std::string_view text, RecordFormat format) {
  switch (format) {
    case RecordFormat::Csv: return parse_csv(text);
    case RecordFormat::Jsonl: return parse_jsonl(text);
  }
  throw Error(Errc::UnsupportedFormat, "unknown record format");
}

std::string serialize_records(std::span<const AttackRecord> records, RecordFormat format) {
  if (format == RecordFormat::Csv) return serialize_csv(records);
  std::string out;
  for (const AttackRecord& r : records) {
    out += record_to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

json record_to_json(const AttackRecord& record) {
  json j;
  j["method"] = record.method;
  j["param_set"] = record.param_set;
  j["context"] = {{"dataset", record.context.dataset},
                  {"model", record.context.model},
                  {"mode", std::string(mode_name(record.context.mode))},
                  {"attack_family", std::string(family_name(record.context.attack_family))}};
  j["measurements"] = measurement_map_to_json(record.measurements);
  if (!record.meta.empty()) j["meta"] = record.meta;
  return j;
}

AttackRecord record_from_json(const json& j) {
  AttackRecord record;
  record.method = j.at("method").get<std::string>();
  record.param_set = j.at("param_set").get<std::string>();
  const json& ctx = j.at("context");
  record.context.dataset = ctx.at("dataset").get<std::string>();
  record.context.model = ctx.at("model").get<std::string>();
  const auto mode = mode_from_name(ctx.at("mode").get<std::string>());
  if (!mode) throw Error(Errc::ParseError, "unknown mode '" + ctx.at("mode").get<std::string>() + "'");
  record.context.mode = *mode;
  const auto family = family_from_name(ctx.at("attack_family").get<std::string>());
  if (!family)
    throw Error(Errc::ParseError,
                "unknown attack_family '" + ctx.at("attack_family").get<std::string>() + "'");
  record.context.attack_family = *family;

  for (const auto& [name, value] : j.at("measurements").items()) {
    const auto kind = MetricKind::from_name(name);
    if (!kind) throw Error(Errc::ParseError, "unknown metric '" + name + "'");
    if (!value.is_number()) throw Error(Errc::ParseError, "metric '" + name + "' is not a number");
    record.measurements[*kind] = value.get<double>();
  }
  if (j.contains("meta")) {
    for (const auto& [key, value] : j.at("meta").items()) {
      record.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  return record;
}

json spec_to_json(const ComparisonSpec& spec) {
  json j;
  j["x_axis"] = std::string(spec.x_axis.name());
  j["y_axis"] = std::string(spec.y_axis.name());
  j["range"] = {spec.range.lo, spec.range.hi};
  j["resolution"] = spec.resolution;
  j["order"] = spec.order;
  if (spec.fixed) {
    j["fixed"] = {{"metric", std::string(spec.fixed->metric.name())},
                  {"center", spec.fixed->center},
                  {"tolerance", spec.fixed->tolerance}};
  } else {
    j["fixed"] = nullptr;
  }
  return j;
}

ComparisonSpec spec_from_json(const json& j) {
  ComparisonSpec spec;
  auto axis = [&](const char* key) {
    const auto name = j.at(key).get<std::string>();
    const auto kind = MetricKind::from_name(name);
    if (!kind) throw Error(Errc::ParseError, std::string("unknown metric '") + name + "'");
    return *kind;
  };
  spec.x_axis = axis("x_axis");
  spec.y_axis = axis("y_axis");
  spec.range = {j.at("range").at(0).get<double>(), j.at("range").at(1).get<double>()};
  spec.resolution = j.at("resolution").get<int>();
  spec.order = j.at("order").get<int>();
  if (j.contains("fixed") && !j.at("fixed").is_null()) {
    const json& f = j.at("fixed");
    const auto name = f.at("metric").get<std::string>();
    const auto kind = MetricKind::from_name(name);
    if (!kind) throw Error(Errc::ParseError, "unknown fixed metric '" + name + "'");
    spec.fixed = FixedMetric{*kind, f.at("center").get<double>(), f.at("tolerance").get<double>()};
  }
  return spec;
}

std::string spec_digest(const ComparisonSpec& spec) {
  // Canonical form: sorted keys, shortest round-trip numbers (both provided
  // by the JSON dump), then FNV-1a 64 over the bytes.
  const std::string canonical = spec_to_json(spec).dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[i] = hex[(hash >> (60 - 4 * i)) & 0xf];
  buf[16] = '\0';
  return std::string(buf);
}

// --- report JSON -------------------------------------------------------------

namespace {

json context_to_json(const RunContext& context) {
  return {{"dataset", context.dataset},
          {"model", context.model},
          {"mode", std::string(mode_name(context.mode))},
          {"attack_family", std::string(family_name(context.attack_family))}};
}

RunContext context_from_json(const json& j) {
  RunContext context;
  context.dataset = j.at("dataset").get<std::string>();
  context.model = j.at("model").get<std::string>();
  context.mode = *mode_from_name(j.at("mode").get<std::string>());
  context.attack_family = *family_from_name(j.at("attack_family").get<std::string>());
  return context;
}

json curve_to_json(const FittedCurve& curve) {
  json j;
  if (curve.is_polynomial()) {
    const auto& poly = curve.as_polynomial();
    j["type"] = "polynomial";
    j["degree"] = curve.degree();
    j["domain"] = {poly.domain.lo, poly.domain.hi};
    j["coefficients"] = poly.coefficients;
    j["coefficients_x"] = curve.denormalized_coefficients();
  } else {
    j["type"] = "polyline";
    json pts = json::array();
    for (const XY& p : curve.as_polyline().points) pts.push_back({p.x, p.y});
    j["points"] = pts;
  }
  return j;
}

FittedCurve curve_from_json(const json& j) {
  if (j.at("type") == "polynomial") {
    return FittedCurve::polynomial(
        j.at("coefficients").get<std::vector<double>>(),
        {j.at("domain").at(0).get<double>(), j.at("domain").at(1).get<double>()});
  }
  std::vector<XY> pts;
  for (const auto& p : j.at("points")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return FittedCurve::polyline(std::move(pts));
}

}  // namespace

json report_to_json(const ComparisonReport& report) {
  json j;
  j["context"] = context_to_json(report.context);
  j["spec"] = spec_to_json(report.spec);

  json entries = json::array();
  for (const ReportEntry& e : report.entries) {
    json entry;
    entry["method"] = e.method;
    entry["rank"] = e.rank;
    entry["auc"] = e.auc;
    if (e.auc_clamped) entry["auc_clamped"] = *e.auc_clamped;
    entry["auc_range"] = {e.auc_range.lo, e.auc_range.hi};
    entry["dropped_out_of_range"] = e.series.dropped_out_of_range;
    json violations = json::array();
    for (const BoundViolation& v : e.bound_violations) {
      violations.push_back({{"x_from", v.where.lo},
                            {"x_to", v.where.hi},
                            {"bound", v.bound},
                            {"side", v.side == BoundViolation::Side::Above ? "above" : "below"}});
    }
    entry["bound_violations"] = violations;
    json points = json::array();
    for (const SampledPoint& p : e.series.points) {
      points.push_back(
          {{"part", p.part_index}, {"x", p.x}, {"y", p.y}, {"param_set", p.source_param_set}});
    }
    entry["points"] = points;
    entry["curve"] = curve_to_json(e.curve);
    entries.push_back(std::move(entry));
  }
  j["entries"] = entries;

  json crossings = json::array();
  for (const Crossing& c : report.crossings) {
    crossings.push_back({{"method_a", c.method_a}, {"method_b", c.method_b}, {"x", c.x}});
  }
  j["crossings"] = crossings;

  json flips = json::array();
  for (const WinnerFlip& f : report.pointwise_flips) {
    flips.push_back({{"x1", f.x1},
                     {"x2", f.x2},
                     {"winner_at_x1", f.winner_at_x1},
                     {"winner_at_x2", f.winner_at_x2}});
  }
  j["pointwise_flips"] = flips;

  json failures = json::array();
  for (const MethodFailure& f : report.failures) {
    failures.push_back(
        {{"method", f.method}, {"error", std::string(errc_name(f.code))}, {"message", f.message}});
  }
  j["failures"] = failures;
  j["advisories"] = report.advisories;
  return j;
}

ComparisonReport report_from_json(const json& j) {
  ComparisonReport report;
  report.context = context_from_json(j.at("context"));
  report.spec = spec_from_json(j.at("spec"));
  for (const auto& entry : j.at("entries")) {
    SampledSeries series;
    series.method = entry.at("method").get<std::string>();
    series.context = report.context;
    series.dropped_out_of_range = entry.at("dropped_out_of_range").get<std::size_t>();
    for (const auto& p : entry.at("points")) {
      series.points.push_back({p.at("part").get<int>(), p.at("x").get<double>(),
                               p.at("y").get<double>(), p.at("param_set").get<std::string>()});
    }
    ReportEntry e{entry.at("method").get<std::string>(),
                  entry.at("auc").get<double>(),
                  std::nullopt,
                  {entry.at("auc_range").at(0).get<double>(),
                   entry.at("auc_range").at(1).get<double>()},
                  entry.at("rank").get<int>(),
                  {},
                  std::move(series),
                  curve_from_json(entry.at("curve"))};
    if (entry.contains("auc_clamped")) e.auc_clamped = entry.at("auc_clamped").get<double>();
    for (const auto& v : entry.at("bound_violations")) {
      e.bound_violations.push_back(
          {{v.at("x_from").get<double>(), v.at("x_to").get<double>()},
           v.at("bound").get<double>(),
           v.at("side") == "above" ? BoundViolation::Side::Above : BoundViolation::Side::Below});
    }
    report.entries.push_back(std::move(e));
  }
  for (const auto& c : j.at("crossings")) {
    report.crossings.push_back({c.at("method_a").get<std::string>(),
                                c.at("method_b").get<std::string>(), c.at("x").get<double>()});
  }
  for (const auto& f : j.at("pointwise_flips")) {
    report.pointwise_flips.push_back({f.at("x1").get<double>(), f.at("x2").get<double>(),
                                      f.at("winner_at_x1").get<std::string>(),
                                      f.at("winner_at_x2").get<std::string>()});
  }
  for (const auto& f : j.at("failures")) {
    // Failure codes round-trip by name; unknown names degrade to ValidationError.
    Errc code = Errc::ValidationError;
    const std::string name = f.at("error").get<std::string>();
    for (int c = 0; c <= static_cast<int>(Errc::EmptyReport); ++c) {
      if (errc_name(static_cast<Errc>(c)) == name) code = static_cast<Errc>(c);
    }
    report.failures.push_back(
        {f.at("method").get<std::string>(), code, f.at("message").get<std::string>()});
  }
  report.advisories = j.at("advisories").get<std::vector<std::string>>();
  return report;
}

// --- on-disk store ------------------------------------------------------------

namespace {

std::string sanitize_component(std::string_view raw) {
  std::string out;
  for (unsigned char c : raw) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '.' || c == '_' || c == '-';
    if (safe) {
      out.push_back(static_cast<char>(c));
    } else {
      static const char* hex = "0123456789ABCDEF";
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xf]);
    }
  }
  return out;
}

std::string context_dirname(const RunContext& context) {
  return sanitize_component(context.dataset) + "__" + sanitize_component(context.model) + "__" +
         std::string(mode_name(context.mode)) + "__" +
         std::string(family_name(context.attack_family));
}

std::filesystem::path key_dir(const std::filesystem::path& root, const RegistryKey& key) {
  return root / context_dirname(key.context) / key.digest;
}

// Advisory lock file serializing writers of one key. Readers never touch it.
// The file holds the owner's pid; a lock left behind by a dead process is
// broken so one crashed writer cannot wedge the key.
class KeyLock {
 public:
  KeyLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
    for (int attempt = 0; attempt < 250; ++attempt) {
      const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
      if (fd >= 0) {
        const std::string pid = std::to_string(::getpid());
        [[maybe_unused]] ssize_t n = ::write(fd, pid.data(), pid.size());
        ::close(fd);
        held_ = true;
        return;
      }
      if (owner_is_dead()) {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
        continue;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    throw Error(Errc::IoFailure, "timed out acquiring registry lock " + path_.string());
  }

  ~KeyLock() {
    if (held_) {
      std::error_code ec;
      std::filesystem::remove(path_, ec);
    }
  }

  KeyLock(const KeyLock&) = delete;
  KeyLock& operator=(const KeyLock&) = delete;

 private:
  bool owner_is_dead() const {
    std::ifstream in(path_);
    long pid = 0;
    if (!(in >> pid) || pid <= 0) return false;  // unreadable: assume alive
    if (pid == static_cast<long>(::getpid())) return false;
    return ::kill(static_cast<pid_t>(pid), 0) == -1 && errno == ESRCH;
  }

  std::filesystem::path path_;
  bool held_ = false;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error(Errc::IoFailure, "failed writing " + path.string());
}

json provenance_to_json(const Provenance& p) {
  return {{"submitter", p.submitter}, {"timestamp", p.timestamp}, {"note", p.note}};
}

Provenance provenance_from_json(const json& j) {
  return {j.at("submitter").get<std::string>(), j.at("timestamp").get<std::int64_t>(),
          j.at("note").get<std::string>()};
}

struct EntryFile {
  std::string method;
  Provenance provenance;
  std::vector<AttackRecord> records;
};

EntryFile read_entry_file(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  const std::size_t eol = content.find('\n');
  if (eol == std::string::npos)
    throw Error(Errc::ParseError, path.string() + ": missing entry header line");
  json header;
  try {
    header = json::parse(content.substr(0, eol));
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, path.string() + ": bad entry header: " + e.what());
  }
  EntryFile entry;
  entry.method = header.at("method").get<std::string>();
  entry.provenance = provenance_from_json(header.at("provenance"));
  entry.records = parse_records(std::string_view(content).substr(eol + 1), RecordFormat::Jsonl);
  return entry;
}

bool is_live_entry_file(const std::filesystem::path& path) {
  return path.extension() == ".jsonl" &&
         path.filename().string().find(".tmp.") == std::string::npos;
}

std::atomic<std::uint64_t> g_temp_counter{0};

}  // namespace

RegistryKey RegistryKey::make(RunContext context, ComparisonSpec spec) {
  spec.validate();
  std::string digest = spec_digest(spec);
  return RegistryKey{std::move(context), std::move(spec), std::move(digest)};
}

std::filesystem::path registry_add(const std::filesystem::path& root, const RegistryEntry& entry,
                                   const WriteHooks& hooks) {
  if (entry.method.empty()) throw Error(Errc::ValidationError, "entry method is empty");
  for (const AttackRecord& record : entry.records) {
    if (record.method != entry.method)
      throw Error(Errc::ValidationError, "entry for method '" + entry.method +
                                             "' holds a record of method '" + record.method + "'");
    if (record.context != entry.key.context)
      throw Error(Errc::SpecMismatch,
                  "record context differs from the registry key context (method '" +
                      record.method + "')");
    validate_or_throw(record, "record of method '" + record.method + "'");
  }

  std::error_code ec;
  const std::filesystem::path dir = key_dir(root, entry.key);
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

  KeyLock lock(dir);

  const std::filesystem::path spec_path = dir / "spec.json";
  if (!std::filesystem::exists(spec_path)) {
    json spec_doc;
    spec_doc["digest"] = entry.key.digest;
    spec_doc["spec"] = spec_to_json(entry.key.spec);
    spec_doc["context"] = context_to_json(entry.key.context);
    write_file(spec_path, spec_doc.dump(2) + "\n");
  }

  json header;
  header["psc_entry"] = 1;
  header["method"] = entry.method;
  header["record_count"] = entry.records.size();
  header["provenance"] = provenance_to_json(entry.provenance);
  std::string content = header.dump() + "\n" + serialize_records(entry.records, RecordFormat::Jsonl);

  const std::filesystem::path live = dir / (sanitize_component(entry.method) + ".jsonl");
  const std::filesystem::path temp =
      dir / (sanitize_component(entry.method) + ".jsonl.tmp." +
             std::to_string(::getpid()) + "." + std::to_string(g_temp_counter.fetch_add(1)));

  write_file(temp, content);
  if (hooks.after_temp_write) hooks.after_temp_write();

  if (std::filesystem::exists(live)) {
    const std::filesystem::path archive_dir = dir / "archive";
    std::filesystem::create_directories(archive_dir, ec);
    if (ec)
      throw Error(Errc::ConflictArchiveFailure,
                  "cannot create " + archive_dir.string() + ": " + ec.message());
    std::size_t seq = 1;
    std::filesystem::path archived;
    do {
      archived = archive_dir /
                 (sanitize_component(entry.method) + "." + std::to_string(seq) + ".jsonl");
      ++seq;
    } while (std::filesystem::exists(archived));
    std::filesystem::rename(live, archived, ec);
    if (ec)
      throw Error(Errc::ConflictArchiveFailure,
                  "cannot archive " + live.string() + ": " + ec.message());
  }

  std::filesystem::rename(temp, live, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot publish " + live.string() + ": " + ec.message());
  return live;
}

std::vector<ListedEntry> registry_list(const std::filesystem::path& root) {
  std::vector<ListedEntry> out;
  if (!std::filesystem::exists(root)) return out;

  std::vector<std::filesystem::path> key_dirs;
  for (const auto& context_entry : std::filesystem::directory_iterator(root)) {
    if (!context_entry.is_directory()) continue;
    for (const auto& digest_entry : std::filesystem::directory_iterator(context_entry.path())) {
      if (digest_entry.is_directory()) key_dirs.push_back(digest_entry.path());
    }
  }
  std::sort(key_dirs.begin(), key_dirs.end());

  for (const std::filesystem::path& dir : key_dirs) {
    const std::filesystem::path spec_path = dir / "spec.json";
    if (!std::filesystem::exists(spec_path)) continue;
    const json spec_doc = json::parse(read_file(spec_path));
    const RunContext context = context_from_json(spec_doc.at("context"));
    const std::string digest = spec_doc.at("digest").get<std::string>();

    std::vector<std::filesystem::path> files;
    for (const auto& f : std::filesystem::directory_iterator(dir)) {
      if (f.is_regular_file() && is_live_entry_file(f.path())) files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const std::filesystem::path& file : files) {
      EntryFile entry = read_entry_file(file);
      out.push_back(
          {context, digest, entry.method, entry.records.size(), entry.provenance, file});
    }
  }
  return out;
}

std::vector<RegistryEntry> registry_load(const std::filesystem::path& root,
                                         const RegistryKey& key) {
  std::vector<RegistryEntry> out;
  const std::filesystem::path dir = key_dir(root, key);
  if (!std::filesystem::exists(dir)) return out;

  const std::filesystem::path spec_path = dir / "spec.json";
  if (std::filesystem::exists(spec_path)) {
    const json spec_doc = json::parse(read_file(spec_path));
    if (spec_doc.at("digest").get<std::string>() != key.digest)
      throw Error(Errc::SpecMismatch,
                  "stored spec digest disagrees with the key at " + dir.string());
  }

  std::vector<std::filesystem::path> files;
  for (const auto& f : std::filesystem::directory_iterator(dir)) {
    if (f.is_regular_file() && is_live_entry_file(f.path())) files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  for (const std::filesystem::path& file : files) {
    EntryFile entry = read_entry_file(file);
    out.push_back({key, entry.method, std::move(entry.records), entry.provenance});
  }
  return out;
}

ComparisonReport registry_compare(const std::filesystem::path& root, const RegistryKey& key,
                                  std::span<const AttackRecord> uploaded,
                                  const std::string& uploaded_method) {
  for (const AttackRecord& record : uploaded) {
    if (record.method != uploaded_method) continue;
    if (record.context != key.context)
      throw Error(Errc::SpecMismatch, "uploaded records' context differs from the registry key");
  }

  std::vector<AttackRecord> pool;
  std::vector<std::string> methods;
  std::vector<std::string> advisories;

  std::vector<RegistryEntry> baselines = registry_load(root, key);
  for (RegistryEntry& baseline : baselines) {
    if (baseline.method == uploaded_method) {
      advisories.push_back("stored baseline '" + baseline.method +
                           "' replaced by the uploaded records of the same name");
      continue;
    }
    methods.push_back(baseline.method);
    for (AttackRecord& record : baseline.records) pool.push_back(std::move(record));
  }

  for (const AttackRecord& record : uploaded) {
    if (record.method == uploaded_method) pool.push_back(record);
  }
  methods.push_back(uploaded_method);
  std::sort(methods.begin(), methods.end());

  if (baselines.empty()) {
    advisories.push_back("registry holds no baselines for this key; report covers only '" +
                         uploaded_method + "'");
  }

  ComparisonReport report = compare(pool, key.spec, methods);
  for (std::string& note : advisories) report.advisories.push_back(std::move(note));
  return report;
}

}  // namespace psc
