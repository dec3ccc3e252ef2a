// rvlab: run, list, validate and dump bundled or user experiment configs.
//
// Exit codes: 0 on completion (whatever the verdicts), 2 on a config or
// validation error, 3 when the data cannot support the analysis.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rvlab/rvlab.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStatistical = 3;

rvlab::Json load(const std::string& where) {
  if (std::filesystem::exists(where)) return rvlab::load_config_file(where);
  if (rvlab::find_catalog_entry(where) != nullptr) return rvlab::catalog_config(where);
  rvlab::fail(rvlab::ErrorCode::Config, "config: '" + where + "' is neither a file nor a bundled experiment (see `rvlab list`)");
}

struct Options {
  std::string config;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::optional<std::uint64_t> seed_override;
  std::size_t dump_n = 1000;
  std::string dump_out;
  std::string show;
};

int cmd_run(const Options& o) {
  const auto e = rvlab::prepare_experiment(load(o.config), o.seed_override);
  const auto r = rvlab::run_experiment(e);
  std::filesystem::create_directories(o.out_dir);
  const auto dir = std::filesystem::path(o.out_dir);
  rvlab::write_text_file((dir / rvlab::report_file_name(e)).string(), r.report_text);
  rvlab::write_text_file((dir / rvlab::trace_file_name(e)).string(), r.trace_csv);
  std::size_t passed = 0;
  for (const auto& v : r.report.at("verdicts")) {
    const bool ok = v.at("pass").get<bool>();
    passed += ok ? 1 : 0;
    std::cout << (ok ? "  pass  " : "  FAIL  ") << v.at("claim").get<std::string>() << "\n";
  }
  for (const auto& w : r.report.at("warnings")) std::cout << "  warning: " << w.get<std::string>() << "\n";
  std::cout << e.name << ": " << passed << "/" << r.report.at("verdicts").size() << " verdicts pass; wrote "
            << (dir / rvlab::report_file_name(e)).string() << " and " << (dir / rvlab::trace_file_name(e)).string()
            << "\n";
  return 0;
}

int cmd_list(const Options& o) {
  if (!o.show.empty()) {
    const auto* e = rvlab::find_catalog_entry(o.show);
    if (e == nullptr) rvlab::fail(rvlab::ErrorCode::Config, "show: no bundled experiment named '" + o.show + "'");
    std::cout << e->text;
    return 0;
  }
  for (const auto& e : rvlab::catalog()) std::cout << e.name << "\t" << e.summary << "\n";
  return 0;
}

int cmd_validate(const Options& o) {
  const auto e = rvlab::prepare_experiment(load(o.config), o.seed_override);
  std::cout << e.name << ": ok (" << e.analysis << ", seed " << e.seed << ", config hash "
            << rvlab::detail::hex64(e.config_hash) << ")\n";
  return 0;
}

int cmd_dump(const Options& o) {
  const auto raw = load(o.config);
  const auto e = rvlab::prepare_experiment(raw, o.seed_override);
  const rvlab::ConfigNode root(raw, "");
  const auto g = rvlab::parse_generator(root.child("generator"));
  const auto xs = rvlab::sample(*g, e.seed, o.dump_n);
  const auto csv = rvlab::samples_to_csv(xs);
  if (o.dump_out.empty()) {
    std::cout << csv;
  } else {
    rvlab::write_text_file(o.dump_out, csv);
    std::cerr << "wrote " << xs.size() << " samples (" << rvlab::samples_schema(rvlab::kind_of(xs.front())) << ") to "
              << o.dump_out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rvlab: regular variation experiments"};
  app.set_version_flag("--version", std::string(rvlab::kVersion));
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,config", o.config, "config file path or bundled experiment name")->required();
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    sub->add_option("--seed-override", seed, "replace the config seed");
  };
  auto* run = app.add_subcommand("run", "run an experiment and write <name>.json and <name>.csv");
  add_common(run);
  run->add_option("--out-dir", o.out_dir, "output directory");
  auto* list = app.add_subcommand("list", "list bundled experiments");
  list->add_option("--show", o.show, "print the config of one bundled experiment");
  auto* validate = app.add_subcommand("validate", "parse and check a config without sampling");
  add_common(validate);
  auto* dump = app.add_subcommand("dump-samples", "write generator samples as CSV");
  add_common(dump);
  dump->add_option("--n", o.dump_n, "number of samples")->check(CLI::PositiveNumber);
  dump->add_option("--out", o.dump_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  for (auto* sub : {run, validate, dump})
    if (sub->parsed() && sub->count("--seed-override") > 0) o.seed_override = seed;
  rvlab::set_threads(o.threads);
  try {
    if (run->parsed()) return cmd_run(o);
    if (list->parsed()) return cmd_list(o);
    if (validate->parsed()) return cmd_validate(o);
    return cmd_dump(o);
  } catch (const rvlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_statistical() ? kExitStatistical : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
