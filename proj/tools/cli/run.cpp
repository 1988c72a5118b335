#include "cli/run.hpp"

#include <cstdlib>
#include <filesystem>
#include <future>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "extheat/complexity.hpp"
#include "extheat/errors.hpp"
#include "extheat/io.hpp"

namespace extheat::cli {

namespace {

namespace fs = std::filesystem;

std::string default_output_dir() {
  const char* env = std::getenv("EXTHEAT_OUTPUT_DIR");
  return env != nullptr && *env != '\0' ? env : ".";
}

struct Bound {
  std::string key;
  CLI::Option* option = nullptr;
};

class FlagSet {
 public:
  void add(CLI::App* app, const OptionSpec& spec) {
    auto* opt = app->add_option(spec.flag, storage_[spec.key], spec.help);
    bound_.push_back({spec.key, opt});
  }

  void apply(Config& cfg) const {
    for (const auto& b : bound_)
      if (b.option->count() > 0) cfg.set(b.key, storage_.at(b.key));
  }

 private:
  std::map<std::string, std::string> storage_;
  std::vector<Bound> bound_;
};

void reject_unknown_keys(const Config& cfg) {
  for (const auto& [key, value] : cfg.values())
    if (!is_known_key(key)) throw ConfigError("unknown configuration key '" + key + "'");
}

Config load(const std::string& path) { return path.empty() ? Config{} : Config::from_ini(path); }

int sweep(const Config& base, const std::string& vary, int jobs, std::ostream& out, std::ostream& err) {
  const auto eq = vary.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--vary expects KEY=V1,V2,...");
  const std::string key = vary.substr(0, eq);
  if (!is_known_key(key)) throw ConfigError("unknown configuration key '" + key + "'");
  std::vector<std::string> values;
  std::stringstream ss(vary.substr(eq + 1));
  for (std::string v; std::getline(ss, v, ',');) values.push_back(v);
  if (values.empty()) throw ConfigError("--vary lists no values for " + key);

  const std::string experiment = base.text("run.experiment", "");
  find_experiment(experiment);
  const fs::path root = base.text("run.output_dir", default_output_dir());

  struct Job {
    Config cfg;
    std::ostringstream out, err;
    int code = 0;
  };
  std::vector<Job> runs(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    runs[k].cfg = base;
    runs[k].cfg.set(key, values[k]);
    runs[k].cfg.set("run.output_dir", (root / ("run_" + std::to_string(k))).string());
  }

  const std::size_t width = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t first = 0; first < runs.size(); first += width) {
    std::vector<std::future<void>> pending;
    for (std::size_t k = first; k < std::min(runs.size(), first + width); ++k) {
      pending.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, [&runs, &experiment, k] {
        auto& job = runs[k];
        job.code = execute(experiment, job.cfg, job.out, job.err);
      }));
    }
    for (auto& f : pending) f.get();
  }

  int code = kExitPass;
  auto listing = nlohmann::json::array();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    out << runs[k].out.str();
    err << runs[k].err.str();
    if (runs[k].code == kExitUsage) code = kExitUsage;
    else if (runs[k].code == kExitFail && code == kExitPass) code = kExitFail;
    listing.push_back({{"value", values[k]}, {"dir", "run_" + std::to_string(k)}, {"exit_code", runs[k].code}});
  }
  fs::create_directories(root);
  write_json(root / "sweep.json", {{"experiment", experiment}, {"key", key}, {"runs", listing}});
  return code;
}

}  // namespace

int execute(const std::string& experiment, const Config& cfg, std::ostream& out, std::ostream& err) {
  try {
    reject_unknown_keys(cfg);
    const auto& command = find_experiment(experiment);
    const fs::path dir = cfg.text("run.output_dir", default_output_dir());
    const std::string name = cfg.text("run.name", experiment);
    if (name.empty() || name.find('/') != std::string::npos) throw ConfigError("run.name must be a plain file stem");

    Outcome outcome = command.execute(cfg);

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create run.output_dir " + dir.string() + ": " + ec.message());
    const std::string csv = name + ".csv", json = name + ".json";
    outcome.table.save(dir / csv);
    outcome.report["artifacts"] = {csv, json};
    write_json(dir / json, outcome.report);

    nlohmann::json manifest = {{"tool", "extheat"},
                               {"version", EXTHEAT_VERSION},
                               {"experiment", experiment},
                               {"config", cfg.resolved()},
                               {"outputs", {csv, json}},
                               {"pass", outcome.pass}};
    manifest["config_digest"] = digest(nlohmann::json(cfg.resolved()).dump());
    write_json(dir / "manifest.json", manifest);

    out << name << ": " << (outcome.pass ? "PASS" : "FAIL") << " (" << (dir / json).string() << ")\n";
    return outcome.pass ? kExitPass : kExitFail;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SearchFailure& e) {
    err << "search failed: " << e.what() << '\n';
    return kExitFail;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitFail;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heat equation on exterior domains: experiments and checks", "extheat"};
  app.set_version_flag("--version", std::string("extheat ") + EXTHEAT_VERSION);
  app.require_subcommand(1, 1);

  std::vector<std::pair<CLI::App*, std::string>> subs;
  std::vector<std::unique_ptr<FlagSet>> flags;
  std::vector<std::string> config_paths(experiments().size() + 2);

  for (std::size_t k = 0; k < experiments().size(); ++k) {
    const auto& spec = experiments()[k];
    auto* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("--config", config_paths[k], "INI file; flags override its values");
    flags.push_back(std::make_unique<FlagSet>());
    for (const auto& o : common_options()) flags.back()->add(sub, o);
    for (const auto& o : spec.options) flags.back()->add(sub, o);
    subs.emplace_back(sub, spec.name);
  }

  auto* run_cmd = app.add_subcommand("run", "run the experiment named by run.experiment in a config file");
  std::string& run_config = config_paths[experiments().size()];
  std::string run_output;
  run_cmd->add_option("--config", run_config, "INI file")->required();
  auto* run_output_opt = run_cmd->add_option("--output-dir", run_output, "directory for outputs");

  auto* sweep_cmd = app.add_subcommand("sweep", "repeat a configured experiment over values of one key");
  std::string& sweep_config = config_paths[experiments().size() + 1];
  std::string vary;
  int jobs = 1;
  sweep_cmd->add_option("--config", sweep_config, "INI file")->required();
  sweep_cmd->add_option("--vary", vary, "KEY=V1,V2,...")->required();
  sweep_cmd->add_option("--jobs", jobs, "concurrent runs")->check(CLI::Range(1, 64));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    err << "run 'extheat --help' for the list of commands\n";
    return kExitUsage;
  }

  try {
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (!subs[k].first->parsed()) continue;
      Config cfg = load(config_paths[k]);
      flags[k]->apply(cfg);
      return execute(subs[k].second, cfg, out, err);
    }
    if (run_cmd->parsed()) {
      Config cfg = load(run_config);
      if (run_output_opt->count() > 0) cfg.set("run.output_dir", run_output);
      if (!cfg.has("run.experiment")) throw ConfigError(run_config + ": missing key run.experiment");
      return execute(cfg.text("run.experiment", ""), cfg, out, err);
    }
    if (sweep_cmd->parsed()) {
      Config cfg = load(sweep_config);
      if (!cfg.has("run.experiment")) throw ConfigError(sweep_config + ": missing key run.experiment");
      reject_unknown_keys(cfg);
      return sweep(cfg, vary, jobs, out, err);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("extheat");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data(), out, err);
}

}  // namespace extheat::cli
