#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clab/format.hpp"
#include "clab/suites.hpp"

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int report(const clab::ReportBundle& b) {
  clab::print_table(b, std::cout);
  std::cout << (b.pass ? "PASS" : "FAIL") << "     " << b.scenario.name << "  (" << clab::format_double(b.seconds)
            << " s, reports in " << b.scenario.output.string() << ")\n";
  for (const auto& s : b.suites) std::cout << "         " << s.name << ' ' << clab::format_double(s.seconds) << " s\n";
  return b.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green-operator invariant checks on lattice exhaustions"};
  app.require_subcommand(1);

  std::string scenario_path, dir, out_dir, lambda_text, p_text;
  int radius = 0;

  auto* run = app.add_subcommand("run", "run every suite listed in a scenario");
  run->add_option("scenario", scenario_path, "scenario file (.toml or .json)")->required();
  run->add_option("--out", out_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "run all scenarios in a directory");
  verify->add_option("dir", dir, "directory of scenario files")->required();
  verify->add_option("--out", out_dir, "output root (default clab-out)");

  std::vector<CLI::App*> single;
  for (const auto& name : clab::suite_order()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " suite (and what it depends on)");
    sub->add_option("scenario", scenario_path, "scenario file")->required();
    sub->add_option("--radius", radius, "dense box radius");
    sub->add_option("--lambda", lambda_text, "shift, a number or lambda0-<offset>");
    sub->add_option("--p", p_text, "comma separated exponents, e.g. 1,2,inf");
    sub->add_option("--out", out_dir, "output directory");
    single.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*verify) {
      return clab::verify_all(dir, out_dir.empty() ? "clab-out" : out_dir, std::cout);
    }
    clab::RunOptions opt;
    if (!out_dir.empty()) opt.out = out_dir;
    for (auto* sub : single) {
      if (!*sub) continue;
      opt.suites = std::vector<std::string>{sub->get_name()};
      if (radius != 0) opt.radius = radius;
      if (!lambda_text.empty()) opt.lambdas = std::vector<clab::ShiftEntry>{clab::ShiftEntry::parse(lambda_text)};
      if (!p_text.empty()) {
        std::vector<clab::Exponent> ps;
        for (const auto& t : split(p_text, ',')) ps.push_back(clab::Exponent::parse(t));
        opt.ps = ps;
      }
    }
    return report(clab::run_scenario(scenario_path, opt));
  } catch (const clab::Error& e) {
    std::cerr << "clab: " << e.what() << '\n';
    return clab::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "clab: " << e.what() << '\n';
    return 2;
  }
}
