#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "platemr/commands.hpp"
#include "platemr/config.hpp"

using namespace platemr;

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for the structurally damped clamped plate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, std::string> config_files;
  std::map<std::string, CLI::App*> subs;
  for (const auto& schema : command_schemas()) {
    CLI::App* sub = app.add_subcommand(schema.name, schema.summary);
    sub->add_option("--config", config_files[schema.name], "key=value file; flags override its entries");
    for (const auto& p : schema.params) {
      std::string help = p.help;
      if (!p.required) help += " [default " + p.fallback + "]";
      if (!p.choices.empty()) {
        help += " {";
        for (std::size_t i = 0; i < p.choices.size(); ++i) help += (i ? "," : "") + p.choices[i];
        help += "}";
      }
      auto* opt = sub->add_option("--" + p.key, flags[schema.name][p.key], help);
      if (p.type == ParamType::flag) opt->expected(0, 1);
    }
    subs[schema.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& schema : command_schemas()) {
    CLI::App* sub = subs[schema.name];
    if (!sub->parsed()) continue;
    std::map<std::string, std::string> given;
    for (const auto& p : schema.params) {
      auto* opt = sub->get_option("--" + p.key);
      if (opt->count() == 0) continue;
      std::string v = flags[schema.name][p.key];
      if (p.type == ParamType::flag && v.empty()) v = "true";
      given[p.key] = v;
    }
    std::vector<std::string> errors;
    std::map<std::string, std::string> from_file;
    if (const auto& path = config_files[schema.name]; !path.empty()) {
      std::ifstream in(path);
      if (!in) {
        std::cerr << "error: cannot read config file " << path << '\n';
        return 2;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      from_file = parse_key_values(ss.str(), errors);
    }
    ConfigResult cfg = make_config(schema.name, from_file, given);
    errors.insert(errors.end(), cfg.errors.begin(), cfg.errors.end());
    if (!errors.empty()) {
      for (const auto& e : errors) std::cerr << "error: " << e << '\n';
      return 2;
    }
    try {
      return run_and_write(*cfg.config, std::cout);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return 2;
}
