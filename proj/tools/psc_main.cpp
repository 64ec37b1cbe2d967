// SPDX-License-Identifier: Apache-2.0
//
// psc — piece-wise sampling curving toolkit.
//
// Subcommands: compare, registry {add,list,compare}, simgen, plot.
// Exit codes: 0 success, 1 validation, 2 I/O, 3 insufficient data.
// Errors print a single JSON line on stderr; success never writes stderr.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psc/analysis.hpp"
#include "psc/model.hpp"
#include "psc/plot.hpp"
#include "psc/registry.hpp"
#include "psc/simgen.hpp"

namespace {

using psc::Errc;
using psc::Error;

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file_or_throw(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error(Errc::IoFailure, "failed writing " + path);
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw Error(Errc::InvalidSpec, what + ": '" + text + "' is not a number");
  }
}

psc::Interval parse_range(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw Error(Errc::InvalidRange, "range must be written lo:hi, e.g. 0:3.0");
  return {parse_number(text.substr(0, colon), "range lower bound"),
          parse_number(text.substr(colon + 1), "range upper bound")};
}

psc::MetricKind parse_metric(const std::string& name) {
  if (auto kind = psc::MetricKind::from_name(name)) return *kind;
  throw Error(Errc::InvalidSpec,
              "unknown metric '" + name + "' (expected l0, l1, l2, linf, asr or queries)");
}

// --fix asr=99.5~0.5 : hold `asr` to 99.5 with inclusive tolerance 0.5.
psc::FixedMetric parse_fix(const std::string& text) {
  const std::size_t eq = text.find('=');
  const std::size_t tilde = text.find('~');
  if (eq == std::string::npos || tilde == std::string::npos || tilde < eq)
    throw Error(Errc::InvalidSpec, "--fix must be written metric=center~tolerance");
  return {parse_metric(text.substr(0, eq)),
          parse_number(text.substr(eq + 1, tilde - eq - 1), "--fix center"),
          parse_number(text.substr(tilde + 1), "--fix tolerance")};
}

struct SpecFlags {
  std::string x_axis = "l2";
  std::string y_axis = "asr";
  std::string range;
  int resolution = 0;
  int order = 5;
  std::string fix;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& flags) {
  cmd->add_option("--x", flags.x_axis, "x-axis metric (l0,l1,l2,linf,asr,queries)")
      ->capture_default_str();
  cmd->add_option("--y", flags.y_axis, "y-axis metric")->capture_default_str();
  cmd->add_option("--range", flags.range, "comparison range lo:hi")->required();
  cmd->add_option("--resolution", flags.resolution, "number of parts r (>= 1)")->required();
  cmd->add_option("--order", flags.order, "fitting order d (0 = connect points)")
      ->capture_default_str();
  cmd->add_option("--fix", flags.fix, "fixed-metric band, metric=center~tolerance");
}

psc::ComparisonSpec spec_from_flags(const SpecFlags& flags) {
  psc::ComparisonSpec spec;
  spec.x_axis = parse_metric(flags.x_axis);
  spec.y_axis = parse_metric(flags.y_axis);
  spec.range = parse_range(flags.range);
  spec.resolution = flags.resolution;
  spec.order = flags.order;
  if (!flags.fix.empty()) spec.fixed = parse_fix(flags.fix);
  spec.validate();
  return spec;
}

std::vector<psc::AttackRecord> load_records(const std::vector<std::string>& paths) {
  std::vector<psc::AttackRecord> records;
  for (const std::string& path : paths) {
    const std::string content = read_file_or_throw(path);
    std::vector<psc::AttackRecord> parsed;
    try {
      parsed = psc::parse_records(content, psc::format_for_path(path));
    } catch (const Error& e) {
      throw Error(e.code(), path + ": " + e.what());
    }
    for (auto& record : parsed) records.push_back(std::move(record));
  }
  return records;
}

std::vector<std::string> methods_in(std::span<const psc::AttackRecord> records) {
  std::set<std::string> unique;
  for (const auto& record : records) unique.insert(record.method);
  return {unique.begin(), unique.end()};
}

std::string pad(std::string text, std::size_t width) {
  while (text.size() < width) text.push_back(' ');
  return text;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void print_rank_table(const psc::ComparisonReport& report) {
  std::cout << "RANK  " << pad("METHOD", 16) << "  " << pad("AUC", 14) << "  "
            << pad("AUC_CLAMPED", 14) << "  RANGE\n";
  for (const psc::ReportEntry& e : report.entries) {
    std::cout << pad(std::to_string(e.rank), 4) << "  " << pad(e.method, 16) << "  "
              << pad(fixed4(e.auc), 14) << "  "
              << pad(e.auc_clamped ? fixed4(*e.auc_clamped) : "-", 14) << "  ["
              << fixed4(e.auc_range.lo) << ", " << fixed4(e.auc_range.hi) << "]\n";
  }
  for (const psc::MethodFailure& f : report.failures) {
    std::cout << "FAIL  " << pad(f.method, 16) << "  " << f.message << "\n";
  }
  for (const psc::Crossing& c : report.crossings) {
    std::cout << "crossing: " << c.method_a << " x " << c.method_b << " at x=" << fixed4(c.x)
              << "\n";
  }
  if (!report.pointwise_flips.empty()) {
    std::cout << "pointwise flips: " << report.pointwise_flips.size()
              << " (the point-wise winner changes inside the range)\n";
  }
  for (const std::string& advisory : report.advisories) {
    std::cout << "advisory: " << advisory << "\n";
  }
}

void write_outputs(const psc::ComparisonReport& report, const std::string& out_path,
                   const std::string& plot_path, const psc::PlotStyle& style) {
  if (!out_path.empty()) {
    write_file_or_throw(out_path, psc::report_to_json(report).dump(2) + "\n");
  }
  if (!plot_path.empty()) {
    write_file_or_throw(plot_path, psc::render(report, style));
  }
}

// --- simgen scenarios ---------------------------------------------------------

std::vector<double> uniform_xs(psc::Interval range, int samples) {
  std::vector<double> xs(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    xs[static_cast<std::size_t>(i)] =
        (i == samples - 1)
            ? range.hi
            : range.lo + range.width() * static_cast<double>(i) / (samples - 1);
  }
  return xs;
}

std::string method_name(int index) {
  std::string name = "attack_";
  name.push_back(static_cast<char>('a' + index));
  return name;
}

struct SimgenFlags {
  std::string scenario;
  std::string out;
  std::string range = "0:3";
  std::uint64_t seed = 0;
  double noise_sd = 0.0;
  int samples = 160;
  double x_cross = 1.5;
  int num_methods = 4;
};

std::vector<psc::AttackRecord> build_scenario(const SimgenFlags& flags) {
  const psc::Interval range = parse_range(flags.range);
  if (!(range.lo < range.hi)) throw Error(Errc::InvalidRange, "range must satisfy lo < hi");
  if (flags.samples < 2) throw Error(Errc::InvalidModel, "--samples must be >= 2");
  if (flags.noise_sd < 0) throw Error(Errc::InvalidModel, "--noise-sd must be >= 0");
  if (flags.num_methods < 1 || flags.num_methods > 6)
    throw Error(Errc::InvalidModel, "--num-methods must be in [1, 6]");

  const auto xs = uniform_xs(range, flags.samples);
  const psc::MetricKind l2 = psc::MetricKind::distance(psc::LpNorm::L2);
  const psc::MetricKind asr = psc::MetricKind::success_rate();
  const psc::MetricKind queries = psc::MetricKind::query_count();
  const std::array<psc::ParamSet, 1> ps1{{{"ps1", 0.0}}};

  std::vector<psc::AttackRecord> records;
  auto append = [&](std::vector<psc::AttackRecord> more) {
    for (auto& r : more) records.push_back(std::move(r));
  };

  if (flags.scenario == "crossing") {
    if (!(flags.x_cross > range.lo && flags.x_cross < range.hi))
      throw Error(Errc::InvalidCrossing, "--x-cross must lie strictly inside the range");
    psc::RunContext ctx{"synthetic", "simulated", psc::AttackMode::Untargeted,
                        psc::AttackFamily::Gradient};
    auto [steep, gentle] = psc::crossing_pair(flags.x_cross, range);
    steep.noise_sd = flags.noise_sd;
    steep.seed = flags.seed;
    gentle.noise_sd = flags.noise_sd;
    gentle.seed = flags.seed + 1;
    append(psc::generate_runs(steep, "attack_a", ps1, xs, l2, asr, ctx));
    append(psc::generate_runs(gentle, "attack_b", ps1, xs, l2, asr, ctx));
  } else if (flags.scenario == "logistic") {
    psc::RunContext ctx{"synthetic", "simulated", psc::AttackMode::Untargeted,
                        psc::AttackFamily::Gradient};
    // Second parameter set: a stronger (left-shifted) curve that is only
    // exercised over the upper part of the range, so each set wins somewhere.
    const std::array<psc::ParamSet, 1> ps2{{{"ps2", -0.2 * range.width()}}};
    const auto xs_upper =
        uniform_xs({range.lo + 0.4 * range.width(), range.hi}, std::max(2, flags.samples / 2));
    for (int i = 0; i < flags.num_methods; ++i) {
      psc::CurveModel model{psc::Logistic{1.2 + 0.35 * i,
                                          range.lo + range.width() * (0.35 + 0.08 * i),
                                          100.0 - 3.0 * i},
                            flags.noise_sd, flags.seed + static_cast<std::uint64_t>(i)};
      append(psc::generate_runs(model, method_name(i), ps1, xs, l2, asr, ctx));
      psc::CurveModel strong = model;
      strong.seed = model.seed ^ 0x5851f42d4c957f2dULL;
      append(psc::generate_runs(strong, method_name(i), ps2, xs_upper, l2, asr, ctx));
    }
  } else if (flags.scenario == "steep") {
    psc::RunContext ctx{"synthetic", "simulated", psc::AttackMode::Untargeted,
                        psc::AttackFamily::Gradient};
    psc::CurveModel model = psc::underfit_fixture(range);
    model.noise_sd = flags.noise_sd;
    model.seed = flags.seed;
    append(psc::generate_runs(model, "attack_a", ps1, xs, l2, asr, ctx));
  } else if (flags.scenario == "powerdecay") {
    if (!(range.lo > 0))
      throw Error(Errc::InvalidModel, "powerdecay scenario requires a range with lo > 0");
    psc::RunContext ctx{"synthetic", "simulated", psc::AttackMode::Untargeted,
                        psc::AttackFamily::Decision};
    for (int i = 0; i < flags.num_methods; ++i) {
      psc::CurveModel model{psc::PowerDecay{6.0 + 2.0 * i, 0.55 + 0.12 * i, 0.15 * i},
                            flags.noise_sd, flags.seed + static_cast<std::uint64_t>(i)};
      append(psc::generate_runs(model, method_name(i), ps1, xs, queries, l2, ctx));
    }
  } else {
    throw Error(Errc::InvalidModel, "unknown scenario '" + flags.scenario +
                                        "' (expected crossing, logistic, steep or powerdecay)");
  }
  return records;
}

void emit_error(std::string_view name, const std::string& message) {
  nlohmann::json line;
  line["error"] = std::string(name);
  line["message"] = message;
  std::cerr << line.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psc - piece-wise sampling curving toolkit for attack benchmarks"};
  app.set_config("--config", "", "read options from a key=value config file");
  bool print_config = false;
  app.add_flag("--print-config", print_config,
               "print the effective configuration (reparseable) and exit");
  app.require_subcommand(0, 1);

  // compare
  auto* cmd_compare = app.add_subcommand("compare", "sample, fit and rank attack records");
  cmd_compare->configurable();
  cmd_compare->fallthrough();
  std::vector<std::string> compare_records;
  std::vector<std::string> compare_methods;
  SpecFlags compare_spec;
  std::string compare_out;
  std::string compare_plot;
  cmd_compare->add_option("--records", compare_records, "record files (.jsonl or .csv)")
      ->required();
  add_spec_flags(cmd_compare, compare_spec);
  cmd_compare->add_option("--methods", compare_methods,
                          "methods to compare (default: every method present)");
  cmd_compare->add_option("--out", compare_out, "write the JSON report here");
  cmd_compare->add_option("--plot", compare_plot, "write an SVG rendering here");

  // registry
  auto* cmd_registry = app.add_subcommand("registry", "store and compare against baselines");
  cmd_registry->fallthrough();
  cmd_registry->require_subcommand(1);
  std::string registry_root;
  cmd_registry
      ->add_option("--root", registry_root, "registry root directory")
      ->envname("PSC_REGISTRY_ROOT")
      ->required();

  auto* cmd_reg_add = cmd_registry->add_subcommand("add", "store one method's records");
  cmd_reg_add->configurable();
  cmd_reg_add->fallthrough();
  std::vector<std::string> reg_add_records;
  SpecFlags reg_add_spec;
  std::string reg_add_method;
  std::string reg_add_submitter = "anonymous";
  std::string reg_add_note;
  std::int64_t reg_add_timestamp = -1;
  cmd_reg_add->add_option("--records", reg_add_records, "record files for exactly one method")
      ->required();
  cmd_reg_add->add_option("--method", reg_add_method,
                          "store only this method from a multi-method file");
  add_spec_flags(cmd_reg_add, reg_add_spec);
  cmd_reg_add->add_option("--submitter", reg_add_submitter, "who is uploading")
      ->capture_default_str();
  cmd_reg_add->add_option("--note", reg_add_note, "free-form provenance note");
  cmd_reg_add->add_option("--timestamp", reg_add_timestamp,
                          "UTC seconds provenance timestamp (default: now)");

  auto* cmd_reg_list = cmd_registry->add_subcommand("list", "list stored entries");
  cmd_reg_list->configurable();
  cmd_reg_list->fallthrough();
  cmd_reg_list->fallthrough();

  auto* cmd_reg_compare =
      cmd_registry->add_subcommand("compare", "compare an upload against stored baselines");
  cmd_reg_compare->configurable();
  cmd_reg_compare->fallthrough();
  std::string reg_cmp_upload;
  std::string reg_cmp_method;
  SpecFlags reg_cmp_spec;
  std::string reg_cmp_out;
  std::string reg_cmp_plot;
  cmd_reg_compare->add_option("--upload", reg_cmp_upload, "record file to compare")->required();
  add_spec_flags(cmd_reg_compare, reg_cmp_spec);
  cmd_reg_compare->add_option("--method", reg_cmp_method,
                              "uploaded method (default: the single method in the upload)");
  cmd_reg_compare->add_option("--out", reg_cmp_out, "write the JSON report here");
  cmd_reg_compare->add_option("--plot", reg_cmp_plot, "write an SVG rendering here");

  // simgen
  auto* cmd_simgen = app.add_subcommand("simgen", "generate synthetic attack records");
  cmd_simgen->configurable();
  cmd_simgen->fallthrough();
  SimgenFlags simgen_flags;
  cmd_simgen
      ->add_option("--scenario", simgen_flags.scenario,
                   "crossing | logistic | steep | powerdecay")
      ->required();
  cmd_simgen->add_option("--out", simgen_flags.out, "output record file (.jsonl or .csv)")
      ->required();
  cmd_simgen->add_option("--range", simgen_flags.range, "x range lo:hi")->capture_default_str();
  cmd_simgen->add_option("--seed", simgen_flags.seed, "generator seed")->capture_default_str();
  cmd_simgen->add_option("--noise-sd", simgen_flags.noise_sd, "gaussian noise level (>= 0)")
      ->capture_default_str();
  cmd_simgen->add_option("--samples", simgen_flags.samples, "x samples per parameter set")
      ->capture_default_str();
  cmd_simgen->add_option("--x-cross", simgen_flags.x_cross,
                         "crossing abscissa for the crossing scenario")
      ->capture_default_str();
  cmd_simgen->add_option("--num-methods", simgen_flags.num_methods,
                         "methods for logistic/powerdecay scenarios")
      ->capture_default_str();

  // plot
  auto* cmd_plot = app.add_subcommand("plot", "re-render a saved JSON report");
  cmd_plot->configurable();
  cmd_plot->fallthrough();
  std::string plot_report;
  std::string plot_out;
  psc::PlotStyle plot_style;
  cmd_plot->add_option("--report", plot_report, "JSON report written by compare")->required();
  cmd_plot->add_option("--out", plot_out, "output SVG path, or - for standard output")
      ->required();
  cmd_plot->add_option("--width", plot_style.width, "image width in pixels")
      ->capture_default_str();
  cmd_plot->add_option("--height", plot_style.height, "image height in pixels")
      ->capture_default_str();
  cmd_plot->add_option("--precision", plot_style.precision, "legend decimal places")
      ->capture_default_str();
  cmd_plot->add_option("--x-label", plot_style.x_label, "x-axis label");
  cmd_plot->add_option("--y-label", plot_style.y_label, "y-axis label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    emit_error("ParseError", e.what());
    return 1;
  }

  if (print_config) {
    std::cout << app.config_to_str(true, false);
    return 0;
  }
  if (app.get_subcommands().empty()) {
    emit_error("ParseError", "a subcommand is required: compare, registry, simgen or plot");
    return 1;
  }

  try {
    if (cmd_compare->parsed()) {
      const psc::ComparisonSpec spec = spec_from_flags(compare_spec);
      const auto records = load_records(compare_records);
      const auto methods = compare_methods.empty() ? methods_in(records) : compare_methods;
      const psc::ComparisonReport report = psc::compare(records, spec, methods);
      print_rank_table(report);
      write_outputs(report, compare_out, compare_plot, psc::PlotStyle{});
      return 0;
    }

    if (cmd_reg_add->parsed()) {
      const psc::ComparisonSpec spec = spec_from_flags(reg_add_spec);
      auto records = load_records(reg_add_records);
      if (!reg_add_method.empty()) {
        std::erase_if(records,
                      [&](const psc::AttackRecord& r) { return r.method != reg_add_method; });
        if (records.empty())
          throw Error(Errc::NoApplicableRecords,
                      "no records of method '" + reg_add_method + "' in the input");
      }
      const auto methods = methods_in(records);
      if (methods.size() != 1)
        throw Error(Errc::ValidationError, "registry add expects records of exactly one method, got " +
                                               std::to_string(methods.size()));
      psc::RegistryEntry entry;
      entry.key = psc::RegistryKey::make(records.front().context, spec);
      entry.method = methods.front();
      entry.records = records;
      entry.provenance.submitter = reg_add_submitter;
      entry.provenance.note = reg_add_note;
      entry.provenance.timestamp =
          reg_add_timestamp >= 0
              ? reg_add_timestamp
              : std::chrono::duration_cast<std::chrono::seconds>(
                    std::chrono::system_clock::now().time_since_epoch())
                    .count();
      const auto stored = psc::registry_add(registry_root, entry);
      std::cout << "stored " << entry.method << " (" << entry.records.size() << " records) at "
                << stored.string() << "\n";
      return 0;
    }

    if (cmd_reg_list->parsed()) {
      std::cout << pad("DATASET", 12) << "  " << pad("MODEL", 12) << "  " << pad("MODE", 10)
                << "  " << pad("FAMILY", 8) << "  " << pad("DIGEST", 16) << "  "
                << pad("METHOD", 16) << "  " << pad("RECORDS", 8) << "  SUBMITTER\n";
      for (const psc::ListedEntry& e : psc::registry_list(registry_root)) {
        std::cout << pad(e.context.dataset, 12) << "  " << pad(e.context.model, 12) << "  "
                  << pad(std::string(psc::mode_name(e.context.mode)), 10) << "  "
                  << pad(std::string(psc::family_name(e.context.attack_family)), 8) << "  "
                  << pad(e.digest, 16) << "  " << pad(e.method, 16) << "  "
                  << pad(std::to_string(e.record_count), 8) << "  " << e.provenance.submitter
                  << "\n";
      }
      return 0;
    }

    if (cmd_reg_compare->parsed()) {
      const psc::ComparisonSpec spec = spec_from_flags(reg_cmp_spec);
      const auto uploaded = load_records({reg_cmp_upload});
      if (uploaded.empty())
        throw Error(Errc::NoApplicableRecords, "upload file holds no records");
      std::string method = reg_cmp_method;
      if (method.empty()) {
        const auto methods = methods_in(uploaded);
        if (methods.size() != 1)
          throw Error(Errc::ValidationError,
                      "upload holds several methods; pick one with --method");
        method = methods.front();
      }
      const auto key = psc::RegistryKey::make(uploaded.front().context, spec);
      const psc::ComparisonReport report =
          psc::registry_compare(registry_root, key, uploaded, method);
      print_rank_table(report);
      write_outputs(report, reg_cmp_out, reg_cmp_plot, psc::PlotStyle{});
      return 0;
    }

    if (cmd_simgen->parsed()) {
      const auto records = build_scenario(simgen_flags);
      write_file_or_throw(simgen_flags.out,
                          psc::serialize_records(records, psc::format_for_path(simgen_flags.out)));
      std::cout << "wrote " << records.size() << " records to " << simgen_flags.out << "\n";
      return 0;
    }

    if (cmd_plot->parsed()) {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(read_file_or_throw(plot_report));
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::ParseError, plot_report + ": " + e.what());
      }
      const psc::ComparisonReport report = psc::report_from_json(doc);
      const std::string svg = psc::render(report, plot_style);
      if (plot_out == "-") {
        std::cout << svg;
      } else {
        write_file_or_throw(plot_out, svg);
      }
      return 0;
    }

    emit_error("ParseError", "unhandled subcommand");
    return 1;
  } catch (const Error& e) {
    emit_error(psc::errc_name(e.code()), e.message());
    return psc::errc_exit_code(e.code());
  } catch (const std::exception& e) {
    emit_error("IoFailure", e.what());
    return 2;
  }
}
