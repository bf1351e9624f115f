// tbdkit: run two-body Dirac experiments from a JSON config.
//
//   tbdkit <command> [--config file.json] [--out dir] [--quiet]
//
// Exit status: 0 all checks passed, 1 a physics check failed, 2 usage or
// config error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "commands.hpp"

namespace {

using namespace tbdkit::cli;

using Runner = Outcome (*)(const json&, const Common&);

const std::map<std::string, std::pair<Runner, std::string>>& commands()
{
   static const std::map<std::string, std::pair<Runner, std::string>> table{
      {"compat", {run_compat, "compatibility identity [D1,D2] on random band-limited fields"}},
      {"claim1", {run_claim1, "divergence of the free tensor current for constant potentials"}},
      {"conserve", {run_conserve, "Green's-function completion and the equal-energy limit"}},
      {"kernel", {run_kernel, "norm kernel construction and positivity scan"}},
      {"radius", {run_radius, "Yukawa violation radius against the scanned boundary"}},
      {"toy", {run_toy, "two-dimensional indefinite-metric counterexamples"}},
      {"gauge", {run_gauge, "phase transformations and the kernel value"}},
      {"selfcheck", {run_selfcheck, "the whole invariant battery at reduced sizes"}},
   };
   return table;
}

json load_config(const std::string& path)
{
   if (path.empty()) return json{{"schema_version", schema_version}};
   std::ifstream f(path);
   if (!f) throw ConfigError("cannot open config " + path);
   json cfg;
   try {
      cfg = json::parse(f);
   } catch (const json::parse_error& e) {
      throw ConfigError("config " + path + " is not valid JSON: " + e.what());
   }
   if (!cfg.is_object()) throw ConfigError("config: expected an object");
   if (!cfg.contains("schema_version")) throw ConfigError("config: schema_version is required");
   if (cfg.at("schema_version") != schema_version)
      throw ConfigError("config: unsupported schema_version (expected " + std::to_string(schema_version) + ")");
   return cfg;
}

Common parse_common(const json& cfg, const std::string& command)
{
   Common c;
   if (cfg.contains("command") && cfg.at("command") != command)
      throw ConfigError("config is for command '" + cfg.at("command").dump() + "', not '" + command + "'");
   c.seed = static_cast<std::uint64_t>(get_integer(cfg, "seed", static_cast<long long>(c.seed), 0, "config"));
   c.representation = get_string(cfg, "representation", c.representation, "config");
   try {
      c.gammas = tbdkit::build_gammas(c.representation);
   } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.representation: ") + e.what());
   }
   return c;
}

int run(const std::string& command, const std::string& config_path, const std::string& out_dir, bool quiet)
{
   const json cfg = load_config(config_path);
   const Common common = parse_common(cfg, command);
   const Outcome o = commands().at(command).first(cfg, common);

   json doc = {{"schema_version", schema_version},
               {"command", command},
               {"seed", common.seed},
               {"representation", common.representation},
               {"passed", o.passed},
               {"results", o.results}};
   const std::filesystem::path dir(out_dir);
   std::filesystem::create_directories(dir);
   write_file(dir / (command + ".json"), to_text(doc));
   for (const auto& t : o.tables) write_file(dir / (t.name + ".csv"), t.text());

   if (!quiet) {
      std::cout << command << ": " << (o.passed ? "PASS" : "FAIL") << "\n";
      for (const auto& line : o.summary) std::cout << "  " << line << "\n";
      std::cout << "  wrote " << (dir / (command + ".json")).string();
      if (!o.tables.empty()) std::cout << " and " << o.tables.size() << " csv file(s)";
      std::cout << "\n";
   }
   return o.passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
   CLI::App app{"Two-body Dirac toolkit: compatibility, currents, norm kernels, positivity"};
   app.require_subcommand(1);
   std::string config_path, out_dir = "tbdkit-out";
   bool quiet = false;
   app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
   app.add_option("--out", out_dir, "output directory")->capture_default_str();
   app.add_flag("--quiet", quiet, "no summary on stdout");
   for (const auto& [name, entry] : commands()) app.add_subcommand(name, entry.second)->fallthrough();

   try {
      app.parse(argc, argv);
   } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
   }
   const std::string command = app.get_subcommands().front()->get_name();
   try {
      return run(command, config_path, out_dir, quiet);
   } catch (const ConfigError& e) {
      std::cerr << "tbdkit: " << e.what() << "\n";
   } catch (const std::invalid_argument& e) {
      std::cerr << "tbdkit: invalid input: " << e.what() << "\n";
   } catch (const std::domain_error& e) {
      std::cerr << "tbdkit: invalid input: " << e.what() << "\n";
   } catch (const std::exception& e) {
      std::cerr << "tbdkit: error: " << e.what() << "\n";
   }
   return 2;
}
