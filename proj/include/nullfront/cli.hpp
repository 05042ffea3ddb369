#pragma once

// Command-line driver, callable in-process for tests. Subcommands:
// cone, saucer, front, slice, verify, report. Exit 0 when every check
// passes, 2 on a threshold failure, 1 on usage or config errors.

#include "nullfront/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace nullfront {

namespace detail {

// apply "a.b.0.c=value" overrides to the config JSON; value parsed as
// JSON when possible, kept as a string otherwise
inline void apply_override(nlohmann::json& cfg, const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos) throw DomainError("--set expects key=value, got: " + spec);
  std::string path = spec.substr(0, eq), value = spec.substr(eq + 1);
  nlohmann::json val = nlohmann::json::parse(value, nullptr, false);
  if (val.is_discarded()) val = value;

  nlohmann::json* node = &cfg;
  std::size_t pos = 0;
  while (true) {
    auto dot = path.find('.', pos);
    std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    bool is_index = !key.empty() && key.find_first_not_of("0123456789") == std::string::npos;
    if (dot == std::string::npos) {
      if (is_index && node->is_array())
        (*node)[std::stoul(key)] = val;
      else
        (*node)[key] = val;
      return;
    }
    node = is_index && node->is_array() ? &(*node)[std::stoul(key)] : &(*node)[key];
    pos = dot + 1;
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open output file: " + path);
  out << text;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"nullfront: wavefronts from Legendrian data and their slices"};
  app.require_subcommand(1);

  std::string config_path, out_front, out_slice, out_report;
  std::vector<std::string> overrides;
  int slice_index = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario config JSON")->required();
    sub->add_option("--set", overrides, "dotted-path config overrides, key=value");
    sub->add_option("--out-front", out_front, "front CSV output path");
    sub->add_option("--out-slice", out_slice, "sliced CSV output path");
    sub->add_option("--out-report", out_report, "invariant report JSON output path");
    sub->add_option("--slice-index", slice_index, "which slice the sliced CSV exports");
  };

  CLI::App* cmd_cone = app.add_subcommand("cone", "null-cone scenario (sphere fits)");
  CLI::App* cmd_saucer = app.add_subcommand("saucer", "saucer scenario (cusp loci)");
  CLI::App* cmd_front = app.add_subcommand("front", "build the wavefront only");
  CLI::App* cmd_slice = app.add_subcommand("slice", "build and slice the wavefront");
  CLI::App* cmd_verify = app.add_subcommand("verify", "run all checks, report to stdout");
  CLI::App* cmd_report = app.add_subcommand("report", "run all checks, write the report");
  for (auto* sub : {cmd_cone, cmd_saucer, cmd_front, cmd_slice, cmd_verify, cmd_report})
    add_common(sub);

  std::vector<const char*> argv;
  argv.push_back("nullfront");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    std::ifstream in(config_path);
    if (!in) throw DomainError("cannot open config file: " + config_path);
    nlohmann::json cfg;
    try {
      in >> cfg;
    } catch (const nlohmann::json::exception& e) {
      throw DomainError("config parse error in " + config_path + ": " + e.what());
    }
    for (const auto& ov : overrides) detail::apply_override(cfg, ov);

    Scenario sc;
    try {
      sc = load_scenario(cfg);
    } catch (const nlohmann::json::exception& e) {
      throw DomainError("config schema error in " + config_path + ": " + e.what());
    }

    CLI::App* sub = app.get_subcommands().front();
    std::string cmd = sub->get_name();
    if (cmd == "cone" && sc.kind != "cone")
      throw DomainError("subcommand cone needs a scenario of kind cone, got " + sc.kind);
    if (cmd == "saucer" && sc.kind != "saucer")
      throw DomainError("subcommand saucer needs a scenario of kind saucer, got " + sc.kind);

    bool do_slices = cmd != "front";
    RunResult res = run_scenario(sc, do_slices);

    if (!out_front.empty()) {
      std::ostringstream os;
      write_front_csv(res.nc, os);
      detail::write_text_file(out_front, os.str());
    }
    if (!out_slice.empty()) {
      if (slice_index < 0 || slice_index >= static_cast<int>(res.sliced.size()))
        throw DomainError("--slice-index out of range");
      std::ostringstream os;
      write_sliced_csv(res.sliced[slice_index], os);
      detail::write_text_file(out_slice, os.str());
    }
    std::string report = report_json(res).dump(2) + "\n";
    if (!out_report.empty())
      detail::write_text_file(out_report, report);
    else if (cmd == "verify" || cmd == "report")
      out << report;
    for (const auto& w : res.warnings) err << "warning: " << w << '\n';

    if (!res.all_pass()) {
      for (const auto& c : res.checks)
        if (!c.pass)
          err << "check failed: " << c.name << " max " << format_double(c.max)
              << " > threshold " << format_double(c.threshold) << '\n';
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace nullfront
